//! Density of 3-term progressions in a random set whose gap lies on the
//! circle x^2 + y^2 = 1 over F_7, and the decomposition around p^{-R}.

use fpgowers::apcount::{ap_list, decomposition_check, restricted_density};
use fpgowers::ffcore::FieldParams;
use fpgowers::polymap::PolyMap;
use fpgowers::variety::{level_set, PointSet};
use fpgowers::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::default();
    let map = PolyMap::sum_of_powers(2, 2, 7)?;
    let s = level_set(&map, &[1], &exec)?;
    let params = FieldParams::new(7, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = PointSet::from_indices(params.clone(), (0..params.size()).filter(|_| rng.gen_bool(0.6)))?;

    let r = restricted_density(&a, &s, 3, &exec)?;
    println!("|A| = {}, |S| = {}, density {:.6} ({} / {})", a.len(), s.len(), r.density, r.count, r.normalizer);
    for (x, y) in ap_list(&a, &s, 3, 3)? {
        println!("  x = {:?}  y = {:?}", x.coords(), y.coords());
    }
    println!("{}", decomposition_check(&a, &s, 3, 1.0 / 7.0, &exec)?);
    Ok(())
}
