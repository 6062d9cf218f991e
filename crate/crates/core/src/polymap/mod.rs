//! Homogeneous polynomial maps `P = (P_1, ..., P_R): F_p^n -> F_p^R` of
//! degree `d`, stored as symmetric coefficient tensors
//! `P_i(x) = sum_{j_1..j_d} a^i_{j_1..j_d} x_{j_1} ... x_{j_d}`.
//!
//! Only sorted index tuples are stored, so symmetry is structural. Because
//! `d < p`, `d!` is invertible and every homogeneous polynomial has such a
//! representation.

mod document;
mod matrix;

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffcore::{inv_mod, reduce_i64, Point};

pub use document::{MapDocument, TermRecord};
pub use matrix::{rank_in_place, FpMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    p: u32,
    n: usize,
    d: usize,
    coeffs: BTreeMap<Vec<usize>, u32>,
}

impl SymmetricForm {
    pub fn new(p: u32, n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        if d >= p as usize {
            return Err(Error::DegreeTooLarge { d, p });
        }
        Ok(Self {
            p,
            n,
            d,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Coefficient `a_{j_1..j_d}` for any ordering of the indices.
    pub fn coeff(&self, tuple: &[usize]) -> u32 {
        let mut key = tuple.to_vec();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0)
    }

    /// Sets the coefficient of every permutation of `tuple` to `value`.
    pub fn set(&mut self, tuple: &[usize], value: i64) -> Result<()> {
        if tuple.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: tuple.len(),
            });
        }
        if let Some(&j) = tuple.iter().find(|&&j| j >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: j,
                limit: self.n,
            });
        }
        let mut key = tuple.to_vec();
        key.sort_unstable();
        let v = reduce_i64(value, self.p);
        if v == 0 {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, v);
        }
        Ok(())
    }

    /// Adds `c * x^exponents` to the form.
    pub fn add_monomial(&mut self, exponents: &[u32], c: i64) -> Result<()> {
        if exponents.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: exponents.len(),
            });
        }
        let sum: usize = exponents.iter().map(|&e| e as usize).sum();
        if sum != self.d {
            return Err(Error::NotHomogeneous { d: self.d, sum });
        }
        let tuple = exponents_to_tuple(exponents);
        // x^e arises from `mult` ordered tuples, each carrying a_t.
        let mult = multinomial(exponents, self.p);
        let share = reduce_i64(c, self.p) as u64 * inv_mod(mult, self.p) as u64 % self.p as u64;
        let old = self.coeffs.get(&tuple).copied().unwrap_or(0);
        self.set(&tuple, (old as u64 + share) as i64)
    }

    /// Stored `(sorted tuple, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], u32)> {
        self.coeffs.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn exponents_to_tuple(exponents: &[u32]) -> Vec<usize> {
    exponents
        .iter()
        .enumerate()
        .flat_map(|(j, &e)| std::iter::repeat_n(j, e as usize))
        .collect()
}

fn tuple_to_exponents(tuple: &[usize], n: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    for &j in tuple {
        e[j] += 1;
    }
    e
}

/// `d! / prod e_j!` mod p: the number of orderings of a sorted tuple.
fn multinomial(exponents: &[u32], p: u32) -> u32 {
    let d: u32 = exponents.iter().sum();
    let mut acc = factorial_mod(d as usize, p) as u64;
    for &e in exponents {
        acc = acc * inv_mod(factorial_mod(e as usize, p), p) as u64 % p as u64;
    }
    acc as u32
}

/// `k! mod p`; nonzero whenever `k < p`.
pub fn factorial_mod(k: usize, p: u32) -> u32 {
    (1..=k as u64).fold(1u64, |acc, i| acc * i % p as u64) as u32
}

/// One stored tuple expanded for evaluation.
#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: u32,
    tuple: Vec<usize>,
    // coeff times the number of orderings
    monomial: u32,
    perms: Vec<Vec<usize>>,
}

/// A single monomial `coeff * x^exponents` in row `row`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub row: usize,
    pub exponents: Vec<u32>,
    pub coeff: i64,
}

#[derive(Debug, Clone)]
pub struct PolyMap {
    p: u32,
    n: usize,
    d: usize,
    forms: Vec<SymmetricForm>,
    compiled: Vec<Vec<CompiledTerm>>,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.d == other.d && self.forms == other.forms
    }
}

impl Eq for PolyMap {}

impl PolyMap {
    pub fn from_forms(forms: Vec<SymmetricForm>) -> Result<Self> {
        let first = forms
            .first()
            .ok_or_else(|| Error::InvalidArgument("a polynomial map needs R >= 1".into()))?;
        let (p, n, d) = (first.p, first.n, first.d);
        if let Some(f) = forms.iter().find(|f| (f.p, f.n, f.d) != (p, n, d)) {
            return Err(Error::InvalidArgument(format!(
                "forms disagree on (p, n, d): ({p}, {n}, {d}) vs ({}, {}, {})",
                f.p, f.n, f.d
            )));
        }
        let compiled = forms
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(t, a)| {
                        let perms: Vec<Vec<usize>> =
                            t.iter().copied().permutations(d).unique().collect();
                        let monomial =
                            (a as u64 * perms.len() as u64 % p as u64) as u32;
                        CompiledTerm {
                            coeff: a,
                            tuple: t.to_vec(),
                            monomial,
                            perms,
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            p,
            n,
            d,
            forms,
            compiled,
        })
    }

    /// Symmetrizes a list of monomials. Fails on non-homogeneous terms,
    /// `d >= p` or out-of-range rows.
    pub fn from_monomials(p: u32, n: usize, d: usize, r: usize, terms: &[Monomial]) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("a polynomial map needs R >= 1".into()));
        }
        let mut forms = vec![SymmetricForm::new(p, n, d)?; r];
        for t in terms {
            let form = forms.get_mut(t.row).ok_or(Error::IndexOutOfRange {
                index: t.row,
                limit: r,
            })?;
            form.add_monomial(&t.exponents, t.coeff)?;
        }
        Self::from_forms(forms)
    }

    /// `P_i(x) = sum_j a_{ij} x_j^d`.
    pub fn diagonal(a: &FpMatrix, d: usize) -> Result<Self> {
        let mut forms = vec![SymmetricForm::new(a.p(), a.cols(), d)?; a.rows()];
        for (i, form) in forms.iter_mut().enumerate() {
            for j in 0..a.cols() {
                form.set(&vec![j; d], a[(i, j)] as i64)?;
            }
        }
        Self::from_forms(forms)
    }

    /// `Q(x) = sum_j x_j^d`, whose singular locus is `{0}`.
    pub fn sum_of_powers(n: usize, d: usize, p: u32) -> Result<Self> {
        Self::diagonal(&FpMatrix::from_rows(p, &[vec![1; n]])?, d)
    }

    /// Every symmetric coefficient uniform in `F_p`, from a seeded generator.
    pub fn random(p: u32, n: usize, d: usize, r: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forms = Vec::with_capacity(r);
        for _ in 0..r {
            let mut form = SymmetricForm::new(p, n, d)?;
            for t in (0..n).combinations_with_replacement(d) {
                form.set(&t, rng.gen_range(0..p) as i64)?;
            }
            forms.push(form);
        }
        Self::from_forms(forms)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[SymmetricForm] {
        &self.forms
    }

    /// Monomials with nonzero coefficients, canonical order (row, exponents).
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = self
            .compiled
            .iter()
            .enumerate()
            .flat_map(|(row, terms)| {
                terms.iter().map(move |t| Monomial {
                    row,
                    exponents: tuple_to_exponents(&t.tuple, self.n),
                    coeff: t.monomial as i64,
                })
            })
            .filter(|m| m.coeff != 0)
            .collect();
        out.sort_by(|a, b| (a.row, &a.exponents).cmp(&(b.row, &b.exponents)));
        out
    }

    /// `sum_i alpha_i P_i` as a single-row map.
    pub fn combine(&self, alpha: &[u32]) -> Result<Self> {
        self.check_len(alpha.len(), self.r())?;
        let mut form = SymmetricForm::new(self.p, self.n, self.d)?;
        let p = self.p as u64;
        let mut acc: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (f, &a) in self.forms.iter().zip(alpha) {
            for (t, c) in f.terms() {
                *acc.entry(t.to_vec()).or_default() += a as u64 * c as u64 % p;
            }
        }
        for (t, c) in acc {
            form.set(&t, (c % p) as i64)?;
        }
        Self::from_forms(vec![form])
    }

    fn check_len(&self, got: usize, expected: usize) -> Result<()> {
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
        Ok(())
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        if x.p() != self.p {
            return Err(Error::InvalidArgument(format!(
                "point over F_{} used with a map over F_{}",
                x.p(),
                self.p
            )));
        }
        self.check_len(x.coords().len(), self.n)
    }

    pub fn eval(&self, x: &Point) -> Result<Vec<u32>> {
        self.check_point(x)?;
        Ok(self.eval_coords(x.coords()))
    }

    pub fn eval_coords(&self, x: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.r()];
        self.eval_into(x, &mut out);
        out
    }

    /// Evaluates every row at `x` (length `n`) into `out` (length `R`).
    pub fn eval_into(&self, x: &[u32], out: &mut [u32]) {
        for (o, terms) in out.iter_mut().zip(&self.compiled) {
            *o = self.eval_terms(terms, x);
        }
    }

    pub fn eval_row(&self, row: usize, x: &[u32]) -> u32 {
        self.eval_terms(&self.compiled[row], x)
    }

    fn eval_terms(&self, terms: &[CompiledTerm], x: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for t in terms {
            let mut prod = t.monomial as u64;
            for &j in &t.tuple {
                prod = prod * x[j] as u64 % p;
            }
            acc += prod;
        }
        (acc % p) as u32
    }

    /// `P(x + h) - P(x)` componentwise.
    pub fn diff_eval(&self, h: &Point, x: &Point) -> Result<Vec<u32>> {
        let shifted = self.eval(&x.add(h)?)?;
        let base = self.eval(x)?;
        Ok(shifted
            .iter()
            .zip(&base)
            .map(|(&a, &b)| (a + self.p - b) % self.p)
            .collect())
    }

    /// Contracts the first `vs.len()` slots of `Q_row` against `vs`; the
    /// remaining `d - vs.len()` slots are left free. Returns a row-major
    /// table of length `n^(d - vs.len())`.
    pub fn partial_contract(&self, row: usize, vs: &[&[u32]]) -> Vec<u32> {
        let k = vs.len();
        assert!(k <= self.d);
        let free = self.d - k;
        let p = self.p as u64;
        let mut acc = vec![0u64; self.n.pow(free as u32)];
        for t in &self.compiled[row] {
            for perm in &t.perms {
                let mut prod = t.coeff as u64;
                for (v, &j) in vs.iter().zip(perm) {
                    prod = prod * v[j] as u64 % p;
                    if prod == 0 {
                        break;
                    }
                }
                if prod == 0 {
                    continue;
                }
                let slot = perm[k..].iter().fold(0, |s, &j| s * self.n + j);
                acc[slot] += prod;
            }
        }
        acc.into_iter().map(|v| (v % p) as u32).collect()
    }

    /// The symmetric multilinear form `Q_row(v_1, ..., v_d)`.
    pub fn contract(&self, row: usize, vs: &[&[u32]]) -> u32 {
        assert_eq!(vs.len(), self.d);
        self.partial_contract(row, vs)[0]
    }

    /// The `R x n` matrix `Phi(h^1, ..., h^{d-1})` with
    /// `Phi^i_j = d! sum a^i_{j_1..j_{d-1} j} h^1_{j_1} ... h^{d-1}_{j_{d-1}}`,
    /// so that the `(d-1)`-fold difference of `P_i` is `sum_j Phi^i_j x_j + c`.
    pub fn phi_matrix(&self, hs: &[Point]) -> Result<FpMatrix> {
        self.check_len(hs.len(), self.d - 1)?;
        for h in hs {
            self.check_point(h)?;
        }
        let coords: Vec<&[u32]> = hs.iter().map(Point::coords).collect();
        Ok(self.phi_coords(&coords))
    }

    pub fn phi_coords(&self, hs: &[&[u32]]) -> FpMatrix {
        let scale = factorial_mod(self.d, self.p);
        self.scaled_last_free(hs, scale)
    }

    /// Matrix of partial derivatives `d P_i / d x_j` at `x`.
    pub fn jacobian(&self, x: &Point) -> Result<FpMatrix> {
        self.check_point(x)?;
        Ok(self.jacobian_coords(x.coords()))
    }

    pub fn jacobian_coords(&self, x: &[u32]) -> FpMatrix {
        let xs = vec![x; self.d - 1];
        self.scaled_last_free(&xs, self.d as u32 % self.p)
    }

    fn scaled_last_free(&self, vs: &[&[u32]], scale: u32) -> FpMatrix {
        let p = self.p as u64;
        let mut data = Vec::with_capacity(self.r() * self.n);
        for i in 0..self.r() {
            data.extend(
                self.partial_contract(i, vs)
                    .into_iter()
                    .map(|v| (v as u64 * scale as u64 % p) as u32),
            );
        }
        FpMatrix::from_raw(self.p, self.r(), self.n, data)
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument::from_map(self)
    }
}

/// True iff every `R x ceil(n/2)` column submatrix of `a` has rank `R`.
pub fn is_nondegenerate(a: &FpMatrix) -> bool {
    let k = a.cols().div_ceil(2);
    if a.rows() > k {
        return false;
    }
    (0..a.cols())
        .combinations(k)
        .all(|cols| a.select_columns(&cols).rank() == a.rows())
}

/// Random `R x n` coefficient matrix with i.i.d. uniform columns.
pub fn random_diagonal(r: usize, n: usize, p: u32, seed: u64) -> FpMatrix {
    FpMatrix::random(p, r, n, seed)
}
