//! ||e(alpha . P)||_{U^d}^{2^d} against |W*(alpha)| / p^{(d-1)n} for every
//! nonzero alpha, on a random cubic over F_7.

use fpgowers::gowers::{nonzero_vectors, phase_identity_check};
use fpgowers::polymap::PolyMap;
use fpgowers::Exec;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::default();
    let map = PolyMap::random(7, 2, 3, 1, 42)?;
    for alpha in nonzero_vectors(map.p(), map.r()) {
        let (identity, bound) = phase_identity_check(&map, &alpha, &exec)?;
        println!("{identity}");
        println!("{bound}");
    }
    Ok(())
}
