//! Building a map from monomials and round-tripping its JSON document.

use fpgowers::ffcore::FieldParams;
use fpgowers::polymap::{Monomial, PolyMap};

fn main() -> fpgowers::Result<()> {
    let terms = [
        Monomial { row: 0, exponents: vec![2, 0, 0], coeff: 1 },
        Monomial { row: 0, exponents: vec![0, 1, 1], coeff: 3 },
        Monomial { row: 1, exponents: vec![1, 1, 0], coeff: 1 },
        Monomial { row: 1, exponents: vec![0, 0, 2], coeff: 4 },
    ];
    let map = PolyMap::from_monomials(5, 3, 2, 2, &terms)?;
    let text = map.serialize();
    println!("{text}");
    assert_eq!(PolyMap::parse(&text)?, map);

    let params = FieldParams::new(5, 3)?;
    let x = params.point(&[1, 2, 3])?;
    println!("P{:?} = {:?}", x.coords(), map.eval(&x)?);
    Ok(())
}
