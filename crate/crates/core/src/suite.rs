//! Named verification suites. Each returns the list of reports it produced;
//! a suite passes when none of them fails.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apcount::{counterexample_family, decomposition_check, finite_difference_sides, von_neumann_check};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ffcore::{fourier, DenseFunction, FieldParams, IDENTITY_TOL, INEQUALITY_TOL};
use crate::gowers::{
    gowers_definitional, gowers_norm, gowers_u2_fourier, monotonicity_check,
    nonzero_vectors, phase_identity_check, phase_norm_closed_form, prop_norm_check,
};
use crate::polymap::{random_diagonal, FpMatrix, PolyMap};
use crate::report::{Relation, VerificationReport};
use crate::subspace::{extension_equivalence, greedy_extend, greedy_max_subspace, subspace_bound_report, Choice, LinearSubspace};
use crate::variety::{chevalley_warning_check, diagonal_codimension, lemma_wstar_bound_check, level_set, PointSet};

/// Every runnable suite, in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "lemma2-equality",
    "level-set-norm",
    "wstar-bound",
    "monotonicity-von-neumann",
    "decomposition",
    "counterexample",
    "level-set-concentration",
    "chevalley-warning",
    "subspace-pipeline",
    "strategy-cross-validation",
];

/// Suite that must fail: a perturbed map is checked against the phase
/// function of the original one.
pub const NEGATIVE_CONTROL: &str = "negative-control";

pub fn run_suite(name: &str, exec: &Exec) -> Result<Vec<VerificationReport>> {
    match name {
        "lemma2-equality" => phase_identity_suite(exec),
        "level-set-norm" => level_set_norm(exec),
        "wstar-bound" => wstar_bound_suite(exec),
        "monotonicity-von-neumann" => monotonicity_von_neumann(exec),
        "decomposition" => decomposition(exec),
        "counterexample" => counterexample(exec),
        "level-set-concentration" => level_set_concentration(exec),
        "chevalley-warning" => chevalley_warning(exec),
        "subspace-pipeline" => subspace_pipeline(exec),
        "strategy-cross-validation" => strategy_cross_validation(exec),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, exec)?);
            }
            Ok(out)
        }
        NEGATIVE_CONTROL => negative_control(exec),
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
    }
}

pub fn all_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(VerificationReport::passed)
}

/// A map together with a certified codimension of its singular locus, when
/// one is known analytically.
pub struct Instance {
    pub label: String,
    pub map: PolyMap,
    pub certified_k: Option<usize>,
}

fn diagonal_instance(label: String, a: &FpMatrix, d: usize) -> Result<Instance> {
    Ok(Instance {
        label,
        map: PolyMap::diagonal(a, d)?,
        certified_k: Some(diagonal_codimension(a)),
    })
}

/// Sum-of-powers (for `R = 2` the rows `(1,...,1)` and `(1,2,...,n)`), a
/// seeded random diagonal map and a seeded random dense map for each of
/// `(5,2,2,1)`, `(5,3,2,1)`, `(7,2,3,1)`, `(5,2,2,2)`.
pub fn phase_identity_instances() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (p, n, d, r) in [(5u32, 2usize, 2usize, 1usize), (5, 3, 2, 1), (7, 2, 3, 1), (5, 2, 2, 2)] {
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..n).map(|j| if i == 0 { 1 } else { j as i64 + 1 }).collect())
            .collect();
        let tag = format!("({p},{n},{d},{r})");
        out.push(diagonal_instance(format!("{tag} sum-of-powers"), &FpMatrix::from_rows(p, &rows)?, d)?);
        let seed = 1000 + 10 * p as u64 + n as u64 + 100 * (d as u64 + r as u64);
        out.push(diagonal_instance(
            format!("{tag} random-diagonal seed={seed}"),
            &random_diagonal(r, n, p, seed),
            d,
        )?);
        out.push(Instance {
            label: format!("{tag} random-dense seed={seed}"),
            map: PolyMap::random(p, n, d, r, seed)?,
            certified_k: None,
        });
    }
    Ok(out)
}

fn labelled(mut r: VerificationReport, label: &str) -> VerificationReport {
    r.instance = format!("{label}: {}", r.instance);
    r
}

fn phase_identity_suite(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for inst in phase_identity_instances()? {
        for alpha in nonzero_vectors(inst.map.p(), inst.map.r()) {
            let (eq, _) = phase_identity_check(&inst.map, &alpha, exec)?;
            out.push(labelled(eq, &inst.label));
        }
    }
    Ok(out)
}

fn wstar_bound_suite(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for inst in phase_identity_instances()? {
        if let Some(k) = inst.certified_k {
            out.push(labelled(lemma_wstar_bound_check(&inst.map, k, exec)?, &inst.label));
        }
    }
    Ok(out)
}

/// `(map, K, level values)` of the level-set norm suite.
pub fn level_set_instances() -> Result<Vec<(PolyMap, usize, Vec<Vec<u32>>)>> {
    Ok(vec![
        (PolyMap::sum_of_powers(3, 2, 5)?, 3, (0..5).map(|v| vec![v]).collect()),
        (PolyMap::sum_of_powers(2, 3, 7)?, 2, vec![vec![0], vec![1]]),
    ])
}

fn level_set_norm(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (map, k, values) in level_set_instances()? {
        for v in values {
            out.push(prop_norm_check(&map, &v, k, exec)?.0);
        }
    }
    Ok(out)
}

/// `| |S_v| p^{R-n} - 1 | = p^R ||1_{S_v} - p^{-R}||_{U^1} <= p^R ||.||_{U^d}`.
fn level_set_concentration(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (map, k, values) in level_set_instances()? {
        let (p, n, r) = (map.p() as f64, map.n() as i32, map.r() as i32);
        for v in values {
            let (_, norm) = prop_norm_check(&map, &v, k, exec)?;
            let size = level_set(&map, &v, exec)?.len() as f64;
            let lhs = (size * p.powi(r - n) - 1.0).abs();
            out.push(
                VerificationReport::le(
                    "level-set-concentration",
                    format!("p={} n={n} d={} v={v:?}", map.p(), map.d()),
                    lhs,
                    p.powi(r) * norm.value,
                    INEQUALITY_TOL,
                )
                .note("level_set_size", size),
            );
        }
    }
    Ok(out)
}

fn random_bounded(params: &FieldParams, rng: &mut ChaCha8Rng) -> DenseFunction {
    let table = (0..params.size())
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    DenseFunction::bounded(params.clone(), table).expect("modulus at most 1")
}

fn random_set(params: &FieldParams, rng: &mut ChaCha8Rng) -> PointSet {
    let density = rng.gen_range(0.05..0.95);
    PointSet::from_indices(params.clone(), (0..params.size()).filter(|_| rng.gen_bool(density)))
        .expect("indices in range")
}

fn monotonicity_von_neumann(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let params = FieldParams::new(5, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    for i in 0..100 {
        let f = random_bounded(&params, &mut rng);
        let g = random_bounded(&params, &mut rng);
        for l in [2, 3] {
            out.push(labelled(monotonicity_check(&f, l, exec)?, &format!("pair {i}")));
            out.push(labelled(von_neumann_check(&f, &g, l, exec)?, &format!("pair {i}")));
        }
    }
    Ok(out)
}

fn decomposition(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let params = FieldParams::new(5, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = Vec::new();
    let mut triples = 0;
    while triples < 100 {
        let a = random_set(&params, &mut rng);
        let s = random_set(&params, &mut rng);
        if s.is_empty() {
            continue;
        }
        let rho = rng.gen_range(0.0..1.0);
        let l = 2 + triples % 3;
        out.push(labelled(decomposition_check(&a, &s, l, rho, exec)?, &format!("triple {triples}")));
        triples += 1;
    }
    for (map, _, values) in level_set_instances()? {
        let params = FieldParams::new(map.p(), map.n())?;
        for v in values {
            let s = level_set(&map, &v, exec)?;
            let a = random_set(&params, &mut rng);
            let rho = (map.p() as f64).powi(-(map.r() as i32));
            out.push(decomposition_check(&a, &s, 3, rho, exec)?);
        }
    }
    Ok(out)
}

fn counterexample(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let c = counterexample_family(5, 3, 2, 6, exec)?;
    let params = c.set.params().clone();
    let mut failures = 0u128;
    for x in 0..params.size() {
        let x = params.decode(x);
        for y in 0..params.size() {
            let (l, r) = finite_difference_sides(&c.map, 0, &x, &params.decode(y))?;
            failures += (l != r) as u128;
        }
    }
    let pairs = VerificationReport::exact("parallelogram-identity", "p=5 n=3 d=2 all pairs", failures, 0, Relation::Eq);
    Ok(vec![c.report, pairs])
}

/// Twenty systems with total degree below `n`.
pub fn chevalley_warning_instances() -> Result<Vec<Vec<PolyMap>>> {
    let mut out = Vec::new();
    for i in 0..20u64 {
        let p = if i % 2 == 0 { 5 } else { 7 };
        let n = 3 + (i as usize / 2) % 3;
        let seed = 300 + i;
        let system = match (n, i % 4) {
            (3, _) => vec![PolyMap::random(p, 3, 2, 1, seed)?],
            (4, 0 | 1) => vec![PolyMap::random(p, 4, 3, 1, seed)?],
            (4, _) => vec![PolyMap::random(p, 4, 2, 1, seed)?],
            (_, 0) => vec![PolyMap::random(p, 5, 4, 1, seed)?],
            (_, 1) => vec![PolyMap::random(p, 5, 2, 2, seed)?],
            (_, 2) => vec![PolyMap::random(p, 5, 2, 1, seed)?, PolyMap::random(p, 5, 2, 1, seed + 50)?],
            _ => vec![PolyMap::random(p, 5, 3, 1, seed)?],
        };
        out.push(system);
    }
    Ok(out)
}

fn chevalley_warning(exec: &Exec) -> Result<Vec<VerificationReport>> {
    chevalley_warning_instances()?
        .iter()
        .map(|system| chevalley_warning_check(system, exec))
        .collect()
}

fn diagonal_form(p: u32, coeffs: &[i64]) -> Result<PolyMap> {
    PolyMap::diagonal(&FpMatrix::from_rows(p, &[coeffs.to_vec()])?, 2)
}

/// Fifty `(P, M)` pairs: random or sum-of-powers maps over `F_5`/`F_7` with
/// `n <= 3`, and `M` a seeded partial greedy subspace.
pub fn extension_instances(exec: &Exec) -> Result<Vec<(PolyMap, LinearSubspace)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut out = Vec::new();
    for t in 0..50u64 {
        let p = [5, 7][rng.gen_range(0..2)];
        let n = rng.gen_range(2..=3);
        let d = rng.gen_range(2..=3);
        let r = rng.gen_range(1..=2);
        let map = if t % 3 == 0 {
            PolyMap::sum_of_powers(n, d, p)?
        } else {
            PolyMap::random(p, n, d, r, t)?
        };
        let steps = rng.gen_range(0..=2);
        let start = LinearSubspace::zero(FieldParams::new(p, n)?);
        let g = greedy_extend(&map, start, Choice::Seeded(t), steps, exec)?;
        out.push((map, g.subspace));
    }
    Ok(out)
}

fn subspace_pipeline(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (coeffs, expected) in [(&[1i64, 1][..], 1usize), (&[1, 1, 1, 1][..], 2), (&[1, 2][..], 0)] {
        let map = diagonal_form(5, coeffs)?;
        let g = greedy_max_subspace(&map, Choice::LowestIndex, exec)?;
        let label = format!("coefficients {coeffs:?}");
        out.push(labelled(g.certificate.clone(), &label));
        out.push(labelled(
            VerificationReport::exact("subspace-dimension-expected", "", g.subspace.dim() as u128, expected as u128, Relation::Eq),
            &label,
        ));
        out.push(labelled(subspace_bound_report(&map, &g.subspace), &label));
    }
    for (map, m) in extension_instances(exec)? {
        out.push(extension_equivalence(&map, &m, exec)?);
    }
    Ok(out)
}

/// `(p, n, l)` with `p^{(l+1)n} <= 10^7`, for the definitional oracle.
pub fn definitional_grid() -> Vec<(u32, usize, usize)> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7] {
        for n in 1..=3usize {
            for l in 1..=4usize {
                if (p as u128).pow(((l + 1) * n) as u32) <= 10_000_000 {
                    out.push((p, n, l));
                }
            }
        }
    }
    out
}

fn strategy_cross_validation(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (p, n, l) in definitional_grid() {
        let params = FieldParams::new(p, n)?;
        let f = random_bounded(&params, &mut rng);
        let a = gowers_definitional(&f, l, exec)?;
        let b = gowers_norm(&f, l, exec)?;
        out.push(VerificationReport::eq(
            "definitional-vs-recursive",
            format!("p={p} n={n} l={l}"),
            a.value,
            b.value,
            1e-10,
        ));
    }
    let params = FieldParams::new(5, 2)?;
    for i in 0..100 {
        let f = random_bounded(&params, &mut rng);
        let a = gowers_u2_fourier(&f)?;
        let b = gowers_norm(&f, 2, exec)?;
        let instance = format!("p=5 n=2 function {i}");
        out.push(VerificationReport::eq("fourier-vs-recursive", instance.clone(), a.value, b.value, INEQUALITY_TOL));
        let energy: f64 = f.table().iter().map(|z| z.norm_sqr()).sum::<f64>() / params.size() as f64;
        let spectrum: f64 = fourier(&f).table().iter().map(|z| z.norm_sqr()).sum();
        out.push(VerificationReport::eq("parseval", instance, spectrum, energy, IDENTITY_TOL));
    }
    Ok(out)
}

/// The phase norm of `x_1^2 + x_2^2` over `F_5` against the `W*` count of
/// the perturbed `x_1^2 + 0 x_2^2`, whose `W*` is a line instead of `{0}`.
fn negative_control(exec: &Exec) -> Result<Vec<VerificationReport>> {
    let original = PolyMap::sum_of_powers(2, 2, 5)?;
    let perturbed = diagonal_form(5, &[1, 0])?;
    let mut out = Vec::new();
    for alpha in nonzero_vectors(5, 1) {
        let f = crate::gowers::phase_function(&original, &alpha, exec)?;
        let direct = gowers_norm(&f, 2, exec)?;
        let closed = phase_norm_closed_form(&perturbed, &alpha, exec)?;
        out.push(
            VerificationReport::eq(
                "phase-norm-identity",
                format!("perturbed fixture alpha={alpha:?}"),
                direct.raw_power,
                closed.raw_power,
                INEQUALITY_TOL,
            )
            .note("diff", direct.raw_power - closed.raw_power),
        );
    }
    Ok(out)
}
