//! Fourier transform of an indicator over F_3^2, Parseval, and U^2 as the
//! fourth moment of the spectrum.

use fpgowers::ffcore::{fourier, inverse_fourier};
use fpgowers::ffcore::FieldParams;
use fpgowers::gowers::gowers_u2_fourier;
use fpgowers::variety::PointSet;

fn main() -> fpgowers::Result<()> {
    let params = FieldParams::new(3, 2)?;
    let a = PointSet::from_indices(params.clone(), [0, 1, 4, 8])?;
    let f = a.indicator();
    let spectrum = fourier(&f);
    for (xi, c) in spectrum.table().iter().enumerate() {
        println!("f^({:?}) = {:.4}", params.decode(xi).coords(), c);
    }
    let energy: f64 = spectrum.table().iter().map(|c| c.norm_sqr()).sum();
    println!("sum |f^|^2 = {energy:.6}, density = {:.6}", a.density());
    let back = inverse_fourier(&spectrum);
    let err = back.table().iter().zip(f.table()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("inversion error {err:.2e}");
    println!("U^2 = {:.6}", gowers_u2_fourier(&f)?.value);
    Ok(())
}
