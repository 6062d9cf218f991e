//! Greedy maximal subspace of sum_{j<=4} x_j^2 = 0 over F_5, then a
//! progression with gap in the subspace inside a dense random set.

use fpgowers::ffcore::FieldParams;
use fpgowers::polymap::PolyMap;
use fpgowers::subspace::{ap_in_coset, dense_translate, greedy_max_subspace, subspace_bound_report, Choice};
use fpgowers::variety::PointSet;
use fpgowers::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::default();
    let map = PolyMap::sum_of_powers(4, 2, 5)?;
    let g = greedy_max_subspace(&map, Choice::LowestIndex, &exec)?;
    println!("M = {} (dim {})", g.subspace, g.subspace.dim());
    println!("{}", g.certificate);
    println!("{}", subspace_bound_report(&map, &g.subspace));

    let params = FieldParams::new(5, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = PointSet::from_indices(params.clone(), (0..params.size()).filter(|_| rng.gen_bool(0.8)))?;
    let (x0, density) = dense_translate(&a, &g.subspace, &exec)?;
    println!("densest coset at {:?}: {density:.3}", x0.coords());
    println!("{:?}", ap_in_coset(&a, &g.subspace, &x0, 3)?);
    Ok(())
}
