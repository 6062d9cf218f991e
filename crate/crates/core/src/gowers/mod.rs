//! Gowers uniformity norms
//! `||f||_{U^l}^{2^l} = E_{x, h_1..h_l} Delta_{h_1} ... Delta_{h_l} f(x)`,
//! `Delta_h f(x) = f(x + h) conj(f(x))`, computed exactly by one of four
//! strategies, plus the inequality checks that use them.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{Exec, BLOCK};
use crate::ffcore::{char_table, fourier, DenseFunction, FieldParams, INEQUALITY_TOL};
use crate::polymap::PolyMap;
use crate::report::VerificationReport;
use crate::variety::{level_set, wstar_count, wstar_lambda, PointSet};

/// Largest imaginary part tolerated in a raw power before it is treated as
/// an implementation error.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// The full `(l+1)`-fold average; `p^{(l+1)n}` terms.
    Definitional,
    /// Nested derivative tables; `p^{ln}` work.
    Recursive,
    /// `sum |f^|^4`, only for `l = 2`.
    Fourier,
    /// `|W*(alpha)| / p^{(d-1)n}` for phase functions `e(alpha . P)`.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GowersReport {
    pub l: usize,
    pub value: f64,
    pub raw_power: f64,
    pub imag_residue: f64,
    pub strategy: Strategy,
    pub p: u32,
    pub n: usize,
}

impl GowersReport {
    fn from_raw(raw: Complex64, l: usize, strategy: Strategy, params: &FieldParams) -> Result<Self> {
        if raw.im.abs() > IMAG_RESIDUE_TOL || raw.re < -IMAG_RESIDUE_TOL {
            return Err(Error::ImaginaryResidue {
                real: raw.re,
                imag: raw.im,
                l,
            });
        }
        let raw_power = raw.re.max(0.0);
        Ok(Self {
            l,
            value: raw_power.powf(1.0 / (1u64 << l) as f64),
            raw_power,
            imag_residue: raw.im,
            strategy,
            p: params.p(),
            n: params.n(),
        })
    }
}

fn check_order(l: usize) -> Result<()> {
    if l == 0 {
        Err(Error::InvalidArgument("norm order l must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn work(params: &FieldParams, factor: usize) -> u128 {
    (params.size() as u128)
        .checked_pow(factor as u32)
        .unwrap_or(u128::MAX)
}

/// `Delta_h`: `dst(x) = src(x + h) conj(src(x))`.
fn derivative(src: &[Complex64], shift: &[u32], dst: &mut [Complex64]) {
    for ((d, s), &t) in dst.iter_mut().zip(src).zip(shift) {
        *d = src[t as usize] * s.conj();
    }
}

fn block_mean(table: &[Complex64]) -> Complex64 {
    let partial: Vec<Complex64> = table
        .chunks(BLOCK as usize)
        .map(|c| c.iter().sum())
        .collect();
    crate::exec::tree_reduce(partial) / table.len() as f64
}

/// `U^l` by the recursive strategy:
/// `E_{h_1..h_{l-1}} |E_x Delta_{h_1..h_{l-1}} f(x)|^2`.
pub fn gowers_norm(f: &DenseFunction, l: usize, exec: &Exec) -> Result<GowersReport> {
    check_order(l)?;
    let params = f.params();
    exec.check_budget(work(params, l))?;
    let size = params.size();
    let depth = l - 1;
    let tuples = (size as u64).pow(depth as u32);
    let total = exec.sum_blocks(tuples, BLOCK, |range| {
        // levels[k] = Delta of f along the k slowest digits of the tuple.
        let mut levels: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); size]; depth];
        let mut current: Vec<usize> = vec![usize::MAX; depth];
        let mut acc = Complex64::default();
        for t in range {
            let digits: Vec<usize> = (0..depth)
                .map(|k| (t / (size as u64).pow((depth - 1 - k) as u32) % size as u64) as usize)
                .collect();
            let first_change = (0..depth).find(|&k| digits[k] != current[k]);
            if let Some(start) = first_change {
                for k in start..depth {
                    let shift = params.shift_table(digits[k]);
                    let (before, after) = levels.split_at_mut(k);
                    let src = if k == 0 { f.table() } else { &before[k - 1] };
                    derivative(src, &shift, &mut after[0]);
                    current[k] = digits[k];
                }
            }
            let last = if depth == 0 { f.table() } else { &levels[depth - 1] };
            acc += block_mean(last).norm_sqr();
        }
        acc
    });
    GowersReport::from_raw(total / tuples as f64, l, Strategy::Recursive, params)
}

/// `U^l` straight from the definition, averaging the `2^l`-vertex product
/// over all `(x, h_1, ..., h_l)`. Oracle for small instances.
pub fn gowers_definitional(f: &DenseFunction, l: usize, exec: &Exec) -> Result<GowersReport> {
    check_order(l)?;
    let params = f.params();
    exec.check_budget(work(params, l + 1))?;
    let size = params.size() as u64;
    let n = params.n();
    let p = params.p();
    let terms = size.pow(l as u32 + 1);
    let total = exec.sum_blocks(terms, BLOCK, |range| {
        let mut coords = vec![vec![0u32; n]; l + 1];
        let mut vertex = vec![0u32; n];
        let mut acc = Complex64::default();
        for t in range {
            for (k, c) in coords.iter_mut().enumerate() {
                params.digits_into((t / size.pow(k as u32) % size) as usize, c);
            }
            let mut prod = Complex64::new(1.0, 0.0);
            for omega in 0u32..(1 << l) {
                vertex.copy_from_slice(&coords[0]);
                for k in 0..l {
                    if omega >> k & 1 == 1 {
                        for (v, &h) in vertex.iter_mut().zip(&coords[k + 1]) {
                            *v = (*v + h) % p;
                        }
                    }
                }
                let z = f.table()[params.encode(&vertex)];
                prod *= if omega.count_ones() % 2 == 1 { z.conj() } else { z };
            }
            acc += prod;
        }
        acc
    });
    GowersReport::from_raw(total / terms as f64, l, Strategy::Definitional, params)
}

/// `||f||_{U^2}^4 = sum_xi |f^(xi)|^4`.
pub fn gowers_u2_fourier(f: &DenseFunction) -> Result<GowersReport> {
    let hat = fourier(f);
    let partial: Vec<f64> = hat
        .table()
        .chunks(BLOCK as usize)
        .map(|c| c.iter().map(|z| z.norm_sqr().powi(2)).sum())
        .collect();
    let raw = crate::exec::tree_reduce(partial);
    GowersReport::from_raw(Complex64::new(raw, 0.0), 2, Strategy::Fourier, f.params())
}

/// Dispatches on `strategy`; `ClosedForm` is not available for arbitrary
/// functions.
pub fn gowers_with(f: &DenseFunction, l: usize, strategy: Strategy, exec: &Exec) -> Result<GowersReport> {
    match strategy {
        Strategy::Recursive => gowers_norm(f, l, exec),
        Strategy::Definitional => gowers_definitional(f, l, exec),
        Strategy::Fourier if l == 2 => gowers_u2_fourier(f),
        Strategy::Fourier => Err(Error::InvalidArgument(format!(
            "the Fourier strategy computes U^2 only (got l = {l})"
        ))),
        Strategy::ClosedForm => Err(Error::InvalidArgument(
            "the closed form applies to phase functions e(alpha . P) only".into(),
        )),
    }
}

/// Cheapest exact strategy for `U^l`.
pub fn gowers_fast(f: &DenseFunction, l: usize, exec: &Exec) -> Result<GowersReport> {
    if l == 2 {
        gowers_u2_fourier(f)
    } else {
        gowers_norm(f, l, exec)
    }
}

/// `x -> e(alpha . P(x))`.
pub fn phase_function(map: &PolyMap, alpha: &[u32], exec: &Exec) -> Result<DenseFunction> {
    if alpha.len() != map.r() {
        return Err(Error::DimensionMismatch {
            expected: map.r(),
            got: alpha.len(),
        });
    }
    let params = FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    let combo = map.combine(alpha)?;
    let chars = char_table(map.p());
    let mut x = vec![0; map.n()];
    let table = (0..params.size())
        .map(|i| {
            params.digits_into(i, &mut x);
            chars[combo.eval_row(0, &x) as usize]
        })
        .collect();
    DenseFunction::bounded(params, table)
}

/// `1_S - rho`.
pub fn balanced_indicator(set: &PointSet, rho: f64) -> Result<DenseFunction> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho = {rho} not in [0, 1]")));
    }
    let table = (0..set.params().size())
        .map(|i| Complex64::new(if set.contains(i) { 1.0 - rho } else { -rho }, 0.0))
        .collect();
    DenseFunction::bounded(set.params().clone(), table)
}

/// `||e(alpha . P)||_{U^d}` with raw power `|W*(alpha)| / p^{(d-1)n}`:
/// summing the phase over `h^d` kills every tuple where `Phi^T alpha != 0`.
pub fn phase_norm_closed_form(map: &PolyMap, alpha: &[u32], exec: &Exec) -> Result<GowersReport> {
    let count = wstar_lambda(map, alpha, exec)?;
    let params = FieldParams::with_budget(map.p(), map.n(), u64::MAX)?;
    let tuples = (params.size() as f64).powi(map.d() as i32 - 1);
    GowersReport::from_raw(
        Complex64::new(count as f64 / tuples, 0.0),
        map.d(),
        Strategy::ClosedForm,
        &params,
    )
}

/// All nonzero `alpha in F_p^R` in index order.
pub fn nonzero_vectors(p: u32, r: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as usize).pow(r as u32);
    (1..total).map(move |i| {
        (0..r)
            .map(|k| (i / (p as usize).pow(k as u32) % p as usize) as u32)
            .collect()
    })
}

/// Identity check `||e(alpha . P)||_{U^d}^{2^d} = |W*(alpha)| / p^{(d-1)n}`,
/// plus the weaker bound against `|W*|`.
pub fn phase_identity_check(map: &PolyMap, alpha: &[u32], exec: &Exec) -> Result<(VerificationReport, VerificationReport)> {
    let f = phase_function(map, alpha, exec)?;
    let direct = gowers_fast(&f, map.d(), exec)?;
    let closed = phase_norm_closed_form(map, alpha, exec)?;
    let instance = format!(
        "p={} n={} d={} R={} alpha={alpha:?}",
        map.p(),
        map.n(),
        map.d(),
        map.r()
    );
    let eq = VerificationReport::eq(
        "phase-norm-identity",
        instance.clone(),
        direct.raw_power,
        closed.raw_power,
        INEQUALITY_TOL,
    )
    .note("strategy", format!("{:?}", direct.strategy));
    let tuples = (map.p() as f64).powi(((map.d() - 1) * map.n()) as i32);
    let le = VerificationReport::le(
        "phase-norm-wstar-bound",
        instance,
        direct.raw_power,
        wstar_count(map, exec)? as f64 / tuples,
        INEQUALITY_TOL,
    );
    Ok((eq, le))
}

/// Checks `||1_{S_v} - p^{-R}||_{U^d} <= (d-1)^{n/2^d} p^{(R-K)/2^d}` for an
/// analytically certified codimension `K` of the singular locus. The note
/// records the intermediate bound `p^{-R} sum_{alpha != 0} ||e(alpha . P)||_{U^d}`.
pub fn prop_norm_check(map: &PolyMap, v: &[u32], k_analytic: usize, exec: &Exec) -> Result<(VerificationReport, GowersReport)> {
    let set = level_set(map, v, exec)?;
    let (p, n, d, r) = (map.p() as f64, map.n() as f64, map.d(), map.r());
    let rho = p.powi(-(r as i32));
    let g = balanced_indicator(&set, rho)?;
    let norm = gowers_fast(&g, d, exec)?;
    let scale = 1.0 / (1u64 << d) as f64;
    let rhs = (d as f64 - 1.0).powf(scale * n) * p.powf(scale * (r as f64 - k_analytic as f64));
    let mut triangle = 0.0;
    for alpha in nonzero_vectors(map.p(), r) {
        triangle += phase_norm_closed_form(map, &alpha, exec)?.value;
    }
    triangle *= rho;
    let report = VerificationReport::le(
        "level-set-norm-bound",
        format!("p={} n={} d={d} R={r} K={k_analytic} v={v:?}", map.p(), map.n()),
        norm.value,
        rhs,
        INEQUALITY_TOL,
    )
    .note("triangle_bound", triangle)
    .note("triangle_holds", norm.value <= triangle + INEQUALITY_TOL)
    .note("level_set_size", set.len());
    Ok((report, norm))
}

/// `||f||_{U^{l-1}} <= ||f||_{U^l}`.
pub fn monotonicity_check(f: &DenseFunction, l: usize, exec: &Exec) -> Result<VerificationReport> {
    if l < 2 {
        return Err(Error::InvalidArgument("monotonicity needs l >= 2".into()));
    }
    let lower = gowers_fast(f, l - 1, exec)?;
    let upper = gowers_fast(f, l, exec)?;
    Ok(VerificationReport::le(
        "norm-monotonicity",
        format!("p={} n={} l={l}", f.params().p(), f.params().n()),
        lower.value,
        upper.value,
        INEQUALITY_TOL,
    ))
}

/// `U^1` of a balanced indicator: `| |S| / p^n - rho |`.
pub fn balanced_u1(set: &PointSet, rho: f64) -> f64 {
    (set.density() - rho).abs()
}
