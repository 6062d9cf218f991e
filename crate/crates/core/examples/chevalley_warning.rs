//! Zero counts of two quadrics in five variables against p^{n-D}.

use fpgowers::polymap::PolyMap;
use fpgowers::variety::chevalley_warning_check;
use fpgowers::Exec;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::default();
    for p in [5, 7] {
        let system = [PolyMap::random(p, 5, 2, 1, 1)?, PolyMap::random(p, 5, 2, 1, 2)?];
        println!("{}", chevalley_warning_check(&system, &exec)?);
    }
    Ok(())
}
