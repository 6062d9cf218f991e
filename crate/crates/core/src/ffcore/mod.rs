//! Prime-field arithmetic on `F_p^n`, the canonical integer encoding of its
//! points, additive characters and dense complex tables.
//!
//! Point `(x_0, ..., x_{n-1})` has index `sum_j x_j * p^j`. Every module uses
//! this encoding so bitsets and tables line up.

mod fourier;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::DEFAULT_BUDGET;

pub use fourier::{fourier, inverse_fourier};

/// Largest supported characteristic.
pub const MAX_P: u32 = 1 << 16;

/// Tolerance for exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Tolerance for inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-9;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc as u32
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a as u64, p as u64 - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
pub fn reduce_i64(a: i64, p: u32) -> u32 {
    a.rem_euclid(p as i64) as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    p: u32,
    n: usize,
    size: usize,
    powers: Vec<usize>,
}

impl FieldParams {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        Self::with_budget(p, n, DEFAULT_BUDGET)
    }

    /// Fails unless `p` is prime, `p <= 2^16` and `p^n <= budget`.
    pub fn with_budget(p: u32, n: usize, budget: u64) -> Result<Self> {
        if p > MAX_P || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mut powers = Vec::with_capacity(n + 1);
        let mut acc = 1usize;
        for _ in 0..=n {
            powers.push(acc);
            acc = acc.saturating_mul(p as usize);
        }
        Ok(Self {
            p,
            n,
            size: powers[n],
            powers,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `p^j` for `j <= n`.
    pub fn power(&self, j: usize) -> usize {
        self.powers[j]
    }

    pub fn decode(&self, index: usize) -> Point {
        let mut coords = vec![0; self.n];
        self.digits_into(index, &mut coords);
        Point {
            p: self.p,
            coords,
            index,
        }
    }

    /// Writes the base-p digits of `index` into `out` (length `n`).
    pub fn digits_into(&self, mut index: usize, out: &mut [u32]) {
        let p = self.p as usize;
        for c in out.iter_mut() {
            *c = (index % p) as u32;
            index /= p;
        }
    }

    pub fn encode(&self, coords: &[u32]) -> usize {
        coords
            .iter()
            .zip(&self.powers)
            .map(|(&c, &w)| c as usize * w)
            .sum()
    }

    /// Builds a point from arbitrary integers, reducing mod p.
    pub fn point(&self, coords: &[i64]) -> Result<Point> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: coords.len(),
            });
        }
        let coords: Vec<u32> = coords.iter().map(|&c| reduce_i64(c, self.p)).collect();
        let index = self.encode(&coords);
        Ok(Point {
            p: self.p,
            coords,
            index,
        })
    }

    pub fn zero(&self) -> Point {
        self.decode(0)
    }

    /// Index of `x + y`.
    pub fn add_index(&self, x: usize, y: usize) -> usize {
        self.combine(x, y, |a, b| (a + b) % self.p)
    }

    /// Index of `x - y`.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        self.combine(x, y, |a, b| (a + self.p - b) % self.p)
    }

    /// Index of `c * x`.
    pub fn scale_index(&self, c: u32, x: usize) -> usize {
        let c = c % self.p;
        self.combine(x, 0, |a, _| ((a as u64 * c as u64) % self.p as u64) as u32)
    }

    fn combine(&self, mut x: usize, mut y: usize, op: impl Fn(u32, u32) -> u32) -> usize {
        let p = self.p as usize;
        let mut out = 0;
        for &w in &self.powers[..self.n] {
            out += op((x % p) as u32, (y % p) as u32) as usize * w;
            x /= p;
            y /= p;
        }
        out
    }

    /// The permutation `x -> x + h` of all indices.
    pub fn shift_table(&self, h: usize) -> Vec<u32> {
        let mut hd = vec![0u32; self.n];
        self.digits_into(h, &mut hd);
        let mut table = Vec::with_capacity(self.size);
        table.push(0u32);
        for (j, &hj) in hd.iter().enumerate() {
            let stride = self.powers[j];
            for c in 1..self.p {
                let offset = (((c + hj) % self.p) as usize * stride) as u32;
                for low in 0..stride {
                    let v = table[low] + offset;
                    table.push(v);
                }
            }
            let offset = (hj as usize * stride) as u32;
            for v in &mut table[..stride] {
                *v += offset;
            }
        }
        table
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    p: u32,
    coords: Vec<u32>,
    index: usize,
}

impl Point {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.index == 0
    }

    fn check(&self, other: &Point) -> Result<()> {
        if self.coords.len() != other.coords.len() || self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: other.coords.len(),
            });
        }
        Ok(())
    }

    fn from_coords(p: u32, coords: Vec<u32>) -> Point {
        let mut index = 0usize;
        for &c in coords.iter().rev() {
            index = index * p as usize + c as usize;
        }
        Point { p, coords, index }
    }

    pub fn add(&self, other: &Point) -> Result<Point> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        Ok(Point::from_coords(self.p, coords))
    }

    pub fn scale(&self, c: u32) -> Point {
        let coords = self
            .coords
            .iter()
            .map(|&a| ((a as u64 * c as u64) % self.p as u64) as u32)
            .collect();
        Point::from_coords(self.p, coords)
    }

    /// `sum_j x_j y_j mod p`.
    pub fn dot(&self, other: &Point) -> Result<u32> {
        self.check(other)?;
        Ok(dot_mod(&self.coords, &other.coords, self.p))
    }
}

pub fn dot_mod(x: &[u32], y: &[u32], p: u32) -> u32 {
    let s: u64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a as u64 * b as u64) % p as u64)
        .sum();
    (s % p as u64) as u32
}

/// The additive character `e(a) = exp(2 pi i a / p)`.
pub fn char_e(a: u32, p: u32) -> Complex64 {
    let theta = std::f64::consts::TAU * (a % p) as f64 / p as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// `e(k)` for every residue `k`.
pub fn char_table(p: u32) -> Vec<Complex64> {
    (0..p).map(|a| char_e(a, p)).collect()
}

/// Complex table over all points of `F_p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFunction {
    params: FieldParams,
    table: Vec<Complex64>,
    bounded: bool,
}

impl DenseFunction {
    pub fn new(params: FieldParams, table: Vec<Complex64>) -> Result<Self> {
        if table.len() != params.size() {
            return Err(Error::DimensionMismatch {
                expected: params.size(),
                got: table.len(),
            });
        }
        Ok(Self {
            params,
            table,
            bounded: false,
        })
    }

    /// Constructs a function flagged 1-bounded, checking `|f| <= 1 + 1e-12`.
    pub fn bounded(params: FieldParams, table: Vec<Complex64>) -> Result<Self> {
        let mut f = Self::new(params, table)?;
        if let Some((index, z)) = f
            .table
            .iter()
            .enumerate()
            .find(|(_, z)| z.norm() > 1.0 + IDENTITY_TOL)
        {
            return Err(Error::NotBounded {
                index,
                modulus: z.norm(),
            });
        }
        f.bounded = true;
        Ok(f)
    }

    pub fn from_fn(params: FieldParams, f: impl FnMut(usize) -> Complex64) -> Self {
        let table = (0..params.size()).map(f).collect();
        Self {
            params,
            table,
            bounded: false,
        }
    }

    pub fn constant(params: FieldParams, c: Complex64) -> Self {
        let bounded = c.norm() <= 1.0 + IDENTITY_TOL;
        let table = vec![c; params.size()];
        Self {
            params,
            table,
            bounded,
        }
    }

    /// `x -> e(xi . x)`.
    pub fn linear_phase(params: FieldParams, xi: &Point) -> Result<Self> {
        if xi.coords().len() != params.n() || xi.p() != params.p() {
            return Err(Error::DimensionMismatch {
                expected: params.n(),
                got: xi.coords().len(),
            });
        }
        let chars = char_table(params.p());
        let mut digits = vec![0; params.n()];
        let table = (0..params.size())
            .map(|i| {
                params.digits_into(i, &mut digits);
                chars[dot_mod(&digits, xi.coords(), params.p()) as usize]
            })
            .collect();
        Ok(Self {
            params,
            table,
            bounded: true,
        })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn table(&self) -> &[Complex64] {
        &self.table
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn mean(&self) -> Complex64 {
        crate::exec::tree_reduce(
            self.table
                .chunks(crate::exec::BLOCK as usize)
                .map(|c| c.iter().sum::<Complex64>())
                .collect(),
        ) / self.table.len() as f64
    }

    /// `f - c`.
    pub fn sub_constant(&self, c: Complex64) -> Self {
        Self {
            params: self.params.clone(),
            table: self.table.iter().map(|&z| z - c).collect(),
            bounded: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_oversized() {
        assert!(matches!(FieldParams::new(4, 2), Err(Error::NotPrime(4))));
        assert!(matches!(FieldParams::new(1, 2), Err(Error::NotPrime(1))));
        assert!(FieldParams::new(65537, 1).is_err());
        assert!(matches!(
            FieldParams::with_budget(5, 3, 124),
            Err(Error::BudgetExceeded { needed: 125, .. })
        ));
        assert!(FieldParams::new(2, 31).is_ok());
        assert!(FieldParams::new(2, 32).is_err());
    }

    #[test]
    fn encoding_round_trips_exhaustively() {
        for (p, n) in [(2, 5), (5, 3), (7, 2), (3, 4)] {
            let fp = FieldParams::new(p, n).unwrap();
            for i in 0..fp.size() {
                let x = fp.decode(i);
                assert_eq!(x.index(), i);
                assert_eq!(fp.encode(x.coords()), i);
            }
        }
    }

    #[test]
    fn little_endian_layout() {
        let fp = FieldParams::new(5, 2).unwrap();
        assert_eq!(fp.point(&[1, 2]).unwrap().index(), 11);
        assert_eq!(fp.decode(7).coords(), &[2, 1]);
    }

    #[test]
    fn point_arithmetic_is_coordinatewise() {
        let fp = FieldParams::new(5, 2).unwrap();
        let x = fp.point(&[3, 4]).unwrap();
        let y = fp.point(&[4, 2]).unwrap();
        assert_eq!(x.add(&y).unwrap().coords(), &[2, 1]);
        assert_eq!(x.scale(3).coords(), &[4, 2]);
        assert_eq!(fp.add_index(x.index(), y.index()), x.add(&y).unwrap().index());
        assert_eq!(fp.scale_index(3, x.index()), x.scale(3).index());
        assert_eq!(fp.sub_index(fp.add_index(x.index(), y.index()), y.index()), x.index());
    }

    #[test]
    fn shift_table_matches_add_index() {
        for (p, n) in [(5, 3), (7, 2), (2, 4)] {
            let fp = FieldParams::new(p, n).unwrap();
            for h in [0, 1, fp.size() / 2, fp.size() - 1] {
                let t = fp.shift_table(h);
                for x in 0..fp.size() {
                    assert_eq!(t[x] as usize, fp.add_index(x, h));
                }
            }
        }
    }

    #[test]
    fn dot_examples() {
        let fp = FieldParams::new(5, 2).unwrap();
        let x = fp.point(&[1, 2]).unwrap();
        let y = fp.point(&[3, 4]).unwrap();
        // 1*3 + 2*4 = 11 = 1 mod 5
        assert_eq!(x.dot(&y).unwrap(), 1);
        assert_eq!(x.dot(&fp.zero()).unwrap(), 0);
        assert_eq!(y.dot(&x).unwrap(), 1);
        let other = FieldParams::new(5, 3).unwrap().zero();
        assert!(matches!(x.dot(&other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn character_values() {
        let one = char_e(0, 5);
        assert_eq!(one, Complex64::new(1.0, 0.0));
        for a in 1..5 {
            let prod = char_e(a, 5) * char_e(5 - a, 5);
            assert!((prod - 1.0).norm() < IDENTITY_TOL);
            assert!((char_e(a, 5).norm() - 1.0).abs() < IDENTITY_TOL);
        }
        let s: Complex64 = (0..5).map(|a| char_e(a, 5)).sum();
        assert!(s.norm() < IDENTITY_TOL);
    }

    #[test]
    fn character_orthogonality() {
        let fp = FieldParams::new(3, 3).unwrap();
        for xi in 0..fp.size() {
            let f = DenseFunction::linear_phase(fp.clone(), &fp.decode(xi)).unwrap();
            let expected = if xi == 0 { 1.0 } else { 0.0 };
            assert!((f.mean() - expected).norm() < IDENTITY_TOL);
        }
    }

    #[test]
    fn bounded_flag_is_verified() {
        let fp = FieldParams::new(3, 1).unwrap();
        let ok = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.5)];
        assert!(DenseFunction::bounded(fp.clone(), ok).unwrap().is_bounded());
        let bad = vec![Complex64::new(1.0, 0.1); 3];
        assert!(matches!(
            DenseFunction::bounded(fp.clone(), bad),
            Err(Error::NotBounded { index: 0, .. })
        ));
        assert!(DenseFunction::new(fp, vec![]).is_err());
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(2, 5), 3);
        assert_eq!(pow_mod(3, 4, 7), 4);
        assert_eq!(reduce_i64(-1, 5), 4);
    }
}
