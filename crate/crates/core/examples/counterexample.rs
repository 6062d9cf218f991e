//! In A = {x : sum x_j^2 = 0} over F_5^3 every 3-term progression has its
//! gap in A as well.

use fpgowers::apcount::counterexample_family;
use fpgowers::Exec;

fn main() -> fpgowers::Result<()> {
    let c = counterexample_family(5, 3, 2, 0, &Exec::default())?;
    println!("|A| = {}", c.set.len());
    println!("nontrivial progressions: {}, with Q(y) != 0: {}", c.progressions, c.bad_gaps);
    println!("{}", c.report);
    Ok(())
}
