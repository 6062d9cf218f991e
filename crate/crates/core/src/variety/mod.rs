//! Level sets, singular loci, Birch sets and the counting checks built on
//! them: the `W*` size bound, Chevalley-Warning, and the parameter
//! condition relating degree, codimension and number of equations.

mod pointset;
mod wstar;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ffcore::FieldParams;
use crate::polymap::{FpMatrix, PolyMap};
use crate::report::{Relation, VerificationReport};

pub use pointset::PointSet;
pub use wstar::{wstar_count, wstar_lambda, SampledCount, WstarScan};

/// Field parameters sized by the exec budget.
pub fn field_of(map: &PolyMap, exec: &Exec) -> Result<FieldParams> {
    FieldParams::with_budget(map.p(), map.n(), exec.budget())
}

/// `S_v = P^{-1}(v)`.
pub fn level_set(map: &PolyMap, v: &[u32], exec: &Exec) -> Result<PointSet> {
    if v.len() != map.r() {
        return Err(Error::DimensionMismatch {
            expected: map.r(),
            got: v.len(),
        });
    }
    let params = field_of(map, exec)?;
    let target: Vec<u32> = v.iter().map(|&x| x % map.p()).collect();
    Ok(PointSet::from_predicate(params, exec, |_, x| {
        (0..map.r()).all(|i| map.eval_row(i, x) == target[i])
    }))
}

/// `|S_v|` for every `v in F_p^R`, indexed by the little-endian encoding of `v`.
pub fn level_set_sizes(map: &PolyMap, exec: &Exec) -> Result<Vec<u64>> {
    let params = field_of(map, exec)?;
    let targets = (map.p() as usize).pow(map.r() as u32);
    let partials = exec.map_blocks(params.size() as u64, crate::exec::BLOCK, |range| {
        let mut counts = vec![0u64; targets];
        let mut x = vec![0; map.n()];
        let mut v = vec![0; map.r()];
        for i in range {
            params.digits_into(i as usize, &mut x);
            map.eval_into(&x, &mut v);
            let idx = v.iter().rev().fold(0usize, |a, &c| a * map.p() as usize + c as usize);
            counts[idx] += 1;
        }
        counts
    });
    let mut total = vec![0u64; targets];
    for part in partials {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    Ok(total)
}

/// F_p-points where the Jacobian has rank below `R`.
pub fn singular_locus(map: &PolyMap, exec: &Exec) -> Result<PointSet> {
    let params = field_of(map, exec)?;
    let r = map.r();
    Ok(PointSet::from_predicate(params, exec, |_, x| {
        map.jacobian_coords(x).rank() < r
    }))
}

/// `log_p max(|S|, 1)`. A point-count heuristic, not the algebraic
/// dimension over the closure.
pub fn dim_proxy(set: &PointSet) -> f64 {
    (set.len().max(1) as f64).ln() / (set.params().p() as f64).ln()
}

/// Codimension of the singular locus over the algebraic closure for the
/// diagonal map `P_i = sum_j a_ij x_j^d` (with `d < p`).
///
/// The Jacobian at `x` is `d A diag(x_j^{d-1})`, whose rank is the rank of
/// the columns of `A` on the support of `x`. The locus is thus the union of
/// coordinate subspaces on column sets `T` with `rank A_T < R`, and
/// `K = n - max |T|`.
pub fn diagonal_codimension(a: &FpMatrix) -> usize {
    let n = a.cols();
    for size in (0..=n).rev() {
        if (0..n)
            .combinations(size)
            .any(|cols| a.select_columns(&cols).rank() < a.rows())
        {
            return n - size;
        }
    }
    n
}

/// Common zeros of all rows of all maps versus the Chevalley-Warning bound
/// `p^{n-D}`, `D` the total degree. When `D >= n` the count is recorded
/// without assertion.
pub fn chevalley_warning_check(polys: &[PolyMap], exec: &Exec) -> Result<VerificationReport> {
    let first = polys
        .first()
        .ok_or_else(|| Error::InvalidArgument("no polynomials given".into()))?;
    let (p, n) = (first.p(), first.n());
    if let Some(bad) = polys.iter().find(|m| (m.p(), m.n()) != (p, n)) {
        return Err(Error::InvalidArgument(format!(
            "mixed spaces: F_{p}^{n} and F_{}^{}",
            bad.p(),
            bad.n()
        )));
    }
    let degree: usize = polys.iter().map(|m| m.r() * m.d()).sum();
    let params = FieldParams::with_budget(p, n, exec.budget())?;
    let zeros = PointSet::from_predicate(params, exec, |_, x| {
        polys
            .iter()
            .all(|m| (0..m.r()).all(|i| m.eval_row(i, x) == 0))
    });
    let instance = format!("p={p} n={n} D={degree}");
    if degree >= n {
        return Ok(VerificationReport::report_only(
            "chevalley-warning",
            instance,
            zeros.len() as f64,
            1.0,
        )
        .note("precondition", "D >= n: bound does not apply"));
    }
    let bound = (p as u128).pow((n - degree) as u32);
    Ok(VerificationReport::exact(
        "chevalley-warning",
        instance,
        zeros.len() as u128,
        bound,
        Relation::Ge,
    ))
}

/// Parameters `p^alpha = d`, `beta n = K`, `gamma n = R` and the slack
/// `beta - alpha - (2^d + 1) gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub p: u32,
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(K - (2^d + 1) R) / n` as an exact fraction.
    pub rational_part: (i64, u64),
    pub slack: f64,
    pub epsilon: f64,
    pub satisfied: bool,
}

pub fn main_condition(p: u32, n: usize, d: usize, r: usize, k: usize, epsilon: f64) -> Result<ConditionReport> {
    if n == 0 || d == 0 || r == 0 {
        return Err(Error::InvalidArgument("n, d and R must be positive".into()));
    }
    if d >= p as usize {
        return Err(Error::DegreeTooLarge { d, p });
    }
    if k > n || r > n {
        return Err(Error::InvalidArgument(format!(
            "need K <= n and R <= n (K = {k}, R = {r}, n = {n})"
        )));
    }
    let alpha = (d as f64).ln() / (p as f64).ln();
    let num = k as i64 - ((1i64 << d) + 1) * r as i64;
    let slack = num as f64 / n as f64 - alpha;
    Ok(ConditionReport {
        p,
        n,
        d,
        r,
        k,
        alpha,
        beta: k as f64 / n as f64,
        gamma: r as f64 / n as f64,
        rational_part: (num, n as u64),
        slack,
        epsilon,
        satisfied: slack >= epsilon,
    })
}

/// Bound `(d-1)^n p^R p^{(d-1)n - K}` on `|W*|`.
pub fn wstar_bound(map: &PolyMap, k: usize) -> u128 {
    let (p, n, d, r) = (map.p() as u128, map.n() as u32, map.d() as u32, map.r() as u32);
    // K <= n <= (d-1)n keeps the exponent nonnegative.
    let exp = (d - 1) * n + r - (k as u32).min((d - 1) * n);
    ((d - 1) as u128).pow(n) * p.pow(exp)
}

/// `|W*| <= (d-1)^n p^R p^{(d-1)n-K}` with `K` an analytically certified
/// codimension of the singular locus.
pub fn lemma_wstar_bound_check(map: &PolyMap, k: usize, exec: &Exec) -> Result<VerificationReport> {
    let count = wstar_count(map, exec)?;
    Ok(VerificationReport::exact(
        "wstar-bound",
        format!("p={} n={} d={} R={} K={k}", map.p(), map.n(), map.d(), map.r()),
        count as u128,
        wstar_bound(map, k),
        Relation::Le,
    ))
}
