//! Level sets, singular locus and W* of x_1^2 + x_2^2 + x_3^2 over F_5.

use fpgowers::polymap::PolyMap;
use fpgowers::variety::{dim_proxy, level_set_sizes, singular_locus, wstar_count};
use fpgowers::Exec;

fn main() -> fpgowers::Result<()> {
    let exec = Exec::new(4, 1 << 24)?;
    let map = PolyMap::sum_of_powers(3, 2, 5)?;
    for (v, size) in level_set_sizes(&map, &exec)?.iter().enumerate() {
        println!("|S_{v}| = {size}");
    }
    let sing = singular_locus(&map, &exec)?;
    println!("singular locus: {} point(s), dim proxy {:.3}", sing.len(), dim_proxy(&sing));
    println!("|W*| = {}", wstar_count(&map, &exec)?);
    Ok(())
}
