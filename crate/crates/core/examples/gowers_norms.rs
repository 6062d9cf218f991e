//! U^l norms of a random 1-bounded function by every applicable strategy.

use fpgowers::ffcore::{DenseFunction, FieldParams};
use fpgowers::gowers::{gowers_with, Strategy};
use fpgowers::Exec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::default();
    let params = FieldParams::new(5, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let table = (0..params.size())
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.3)))
        .collect();
    let f = DenseFunction::bounded(params, table)?;
    for l in 1..=3 {
        for s in [Strategy::Definitional, Strategy::Recursive, Strategy::Fourier] {
            if s == Strategy::Fourier && l != 2 {
                continue;
            }
            let g = gowers_with(&f, l, s, &exec)?;
            println!("U^{l} {s:?}: {:.15}", g.value);
        }
    }
    Ok(())
}
