//! Linear subspaces inside the zero set `P^{-1}(0)` of a homogeneous map.
//!
//! The greedy construction adds one vector `h` at a time to `M` as long as
//! `M + F_p h` stays inside the variety. Membership of `h` is decided by the
//! mixed multilinear conditions
//!
//! `Q_i(h, ..., h, b_{j_{k+1}}, ..., b_{j_d}) = 0`  for `1 <= k <= d`,
//!
//! over all multisets of basis vectors. Since `d < p`, this is the same as
//! `P(m + c h) = 0` for all `m in M`, `c in F_p`; both tests are implemented.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{Exec, BLOCK};
use crate::ffcore::{inv_mod, FieldParams, Point};
use crate::polymap::PolyMap;
use crate::report::{Relation, VerificationReport};
use crate::variety::PointSet;

#[cfg(test)]
mod tests;

/// A subspace of `F_p^n` kept in reduced row echelon form. Pivots are the
/// lowest nonzero coordinate of each basis vector, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSubspace {
    params: FieldParams,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl LinearSubspace {
    pub fn zero(params: FieldParams) -> Self {
        Self {
            params,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// The span of `vectors`; dependent vectors are dropped.
    pub fn span(params: FieldParams, vectors: &[Point]) -> Result<Self> {
        let mut m = Self::zero(params);
        for v in vectors {
            m.check(v)?;
            if !m.contains(v) {
                m = m.extend(v)?;
            }
        }
        Ok(m)
    }

    fn check(&self, v: &Point) -> Result<()> {
        if v.coords().len() != self.params.n() || v.p() != self.params.p() {
            return Err(Error::DimensionMismatch {
                expected: self.params.n(),
                got: v.coords().len(),
            });
        }
        Ok(())
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<Point> {
        self.basis
            .iter()
            .map(|b| self.params.decode(self.params.encode(b)))
            .collect()
    }

    /// `v` minus its component along the pivots: the canonical
    /// representative of `v + M` with zeros at every pivot coordinate.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.params.p() as u64;
        let mut out = v.to_vec();
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            let f = out[c] as u64;
            if f == 0 {
                continue;
            }
            for (o, &bj) in out.iter_mut().zip(b) {
                *o = ((*o as u64 + (p - f) * bj as u64) % p) as u32;
            }
        }
        out
    }

    pub fn contains(&self, v: &Point) -> bool {
        self.reduce(v.coords()).iter().all(|&c| c == 0)
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.contains(&self.params.decode(index))
    }

    /// `M + F_p h`; fails if `h` already lies in `M`.
    pub fn extend(&self, h: &Point) -> Result<Self> {
        self.check(h)?;
        let p = self.params.p();
        let mut v = self.reduce(h.coords());
        let Some(pivot) = v.iter().position(|&c| c != 0) else {
            return Err(Error::InvalidArgument(format!(
                "vector {:?} already lies in the subspace",
                h.coords()
            )));
        };
        let inv = inv_mod(v[pivot], p) as u64;
        for c in v.iter_mut() {
            *c = (*c as u64 * inv % p as u64) as u32;
        }
        let mut basis = self.basis.clone();
        for b in basis.iter_mut() {
            let f = b[pivot] as u64;
            if f != 0 {
                for (bj, &vj) in b.iter_mut().zip(&v) {
                    *bj = ((*bj as u64 + (p as u64 - f) * vj as u64) % p as u64) as u32;
                }
            }
        }
        let mut rows: Vec<(usize, Vec<u32>)> = self.pivots.iter().copied().zip(basis).collect();
        rows.push((pivot, v));
        rows.sort_by_key(|r| r.0);
        let (pivots, basis) = rows.into_iter().unzip();
        Ok(Self {
            params: self.params.clone(),
            basis,
            pivots,
        })
    }

    /// All `p^m` point indices of `M`, ascending.
    pub fn enumerate(&self) -> Vec<usize> {
        let p = self.params.p() as u64;
        let n = self.params.n();
        let mut out = Vec::with_capacity(self.params.p().pow(self.dim() as u32) as usize);
        let mut coeffs = vec![0u32; self.dim()];
        let mut v = vec![0u32; n];
        loop {
            for (j, x) in v.iter_mut().enumerate() {
                let s: u64 = coeffs
                    .iter()
                    .zip(&self.basis)
                    .map(|(&t, b)| t as u64 * b[j] as u64)
                    .sum();
                *x = (s % p) as u32;
            }
            out.push(self.params.encode(&v));
            let mut k = 0;
            loop {
                if k == coeffs.len() {
                    out.sort_unstable();
                    return out;
                }
                coeffs[k] += 1;
                if (coeffs[k] as u64) < p {
                    break;
                }
                coeffs[k] = 0;
                k += 1;
            }
        }
    }

    /// Smallest index in the coset `x + M`.
    pub fn coset_rep(&self, x: &Point) -> Point {
        let min = self
            .enumerate()
            .into_iter()
            .map(|m| self.params.add_index(x.index(), m))
            .min()
            .unwrap_or(x.index());
        self.params.decode(min)
    }

    /// One basis vector per line, coordinates separated by spaces.
    pub fn to_text(&self) -> String {
        self.basis
            .iter()
            .map(|b| b.iter().join(" ") + "\n")
            .collect()
    }

    pub fn parse(params: FieldParams, text: &str) -> Result<Self> {
        let mut vectors = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let coords = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            vectors.push(params.point(&coords)?);
        }
        Self::span(params, &vectors)
    }
}

impl fmt::Display for LinearSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self
            .basis
            .iter()
            .map(|b| format!("({})", b.iter().join(",")))
            .join(", ");
        write!(f, "span{{{rows}}}")
    }
}

fn check_same_space(map: &PolyMap, m: &LinearSubspace) -> Result<()> {
    if (map.p(), map.n()) != (m.params.p(), m.params.n()) {
        return Err(Error::InvalidArgument(format!(
            "map on F_{}^{} but subspace in F_{}^{}",
            map.p(),
            map.n(),
            m.params.p(),
            m.params.n()
        )));
    }
    Ok(())
}

/// Checks every point of `M` against `P`; the first offending index is
/// reported as [`Error::NotInVariety`].
pub fn check_in_variety(map: &PolyMap, m: &LinearSubspace) -> Result<()> {
    check_same_space(map, m)?;
    let mut x = vec![0u32; map.n()];
    for idx in m.enumerate() {
        m.params.digits_into(idx, &mut x);
        if (0..map.r()).any(|i| map.eval_row(i, &x) != 0) {
            return Err(Error::NotInVariety(idx));
        }
    }
    Ok(())
}

/// Candidate vectors by the mixed multilinear conditions.
pub fn extension_candidates(map: &PolyMap, m: &LinearSubspace, exec: &Exec) -> Result<PointSet> {
    check_in_variety(map, m)?;
    let params = FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    let (n, d, p) = (map.n(), map.d(), map.p() as u64);
    // For each row and each multiset of d-k basis vectors, the contraction
    // is a k-tensor in h; store (k, tensor) pairs.
    let mut conditions: Vec<(usize, Vec<u32>)> = Vec::new();
    for k in 1..=d {
        for multiset in (0..m.dim()).combinations_with_replacement(d - k) {
            let vs: Vec<&[u32]> = multiset.iter().map(|&j| m.basis[j].as_slice()).collect();
            for i in 0..map.r() {
                let t = map.partial_contract(i, &vs);
                if t.iter().any(|&c| c != 0) {
                    conditions.push((k, t));
                }
            }
        }
    }
    Ok(PointSet::from_predicate(params, exec, |_, h| {
        conditions.iter().all(|(k, t)| {
            let mut slots = vec![0usize; *k];
            let mut acc = 0u64;
            'outer: loop {
                let c = t[slots.iter().fold(0, |s, &j| s * n + j)];
                if c != 0 {
                    let mut prod = c as u64;
                    for &j in &slots {
                        prod = prod * h[j] as u64 % p;
                    }
                    acc += prod;
                }
                for s in slots.iter_mut().rev() {
                    *s += 1;
                    if *s < n {
                        continue 'outer;
                    }
                    *s = 0;
                }
                break;
            }
            acc % p == 0
        })
    }))
}

/// Candidate vectors by the direct test `P(m + c h) = 0` for all `m`, `c`.
pub fn extension_candidates_direct(map: &PolyMap, m: &LinearSubspace, exec: &Exec) -> Result<PointSet> {
    check_in_variety(map, m)?;
    let params = FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    let members = m.enumerate();
    exec.check_budget(params.size() as u128 * members.len() as u128 * map.p() as u128)?;
    let p = map.p();
    Ok(PointSet::from_predicate(params.clone(), exec, |h, _| {
        let mut x = vec![0u32; map.n()];
        (1..p).all(|c| {
            let ch = params.scale_index(c, h);
            members.iter().all(|&mi| {
                params.digits_into(params.add_index(mi, ch), &mut x);
                (0..map.r()).all(|i| map.eval_row(i, &x) == 0)
            })
        })
    }))
}

/// Computes both candidate sets and compares them; exact, zero differences.
pub fn extension_equivalence(map: &PolyMap, m: &LinearSubspace, exec: &Exec) -> Result<VerificationReport> {
    let a = extension_candidates(map, m, exec)?;
    let b = extension_candidates_direct(map, m, exec)?;
    let diff = a.len() + b.len() - 2 * a.intersection(&b).len();
    let instance = format!("p={} n={} d={} R={} M={m}", map.p(), map.n(), map.d(), map.r());
    Ok(
        VerificationReport::exact("extension-equivalence", instance, diff as u128, 0, Relation::Eq)
            .note("candidates", a.len()),
    )
}

/// How the greedy step picks among admissible extension vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    LowestIndex,
    Seeded(u64),
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub subspace: LinearSubspace,
    /// Extension vector chosen at each step.
    pub steps: Vec<Point>,
    /// True when no candidate outside `M` remains.
    pub maximal: bool,
    /// Exact comparison of `|candidates \ M|` against 0.
    pub certificate: VerificationReport,
}

/// Grows `M` from `{0}` until no extension exists.
pub fn greedy_max_subspace(map: &PolyMap, choice: Choice, exec: &Exec) -> Result<GreedyResult> {
    let params = FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    greedy_extend(map, LinearSubspace::zero(params), choice, usize::MAX, exec)
}

/// Grows `start` by at most `max_steps` vectors.
pub fn greedy_extend(
    map: &PolyMap,
    start: LinearSubspace,
    choice: Choice,
    max_steps: usize,
    exec: &Exec,
) -> Result<GreedyResult> {
    let mut rng = match choice {
        Choice::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        Choice::LowestIndex => None,
    };
    let mut m = start;
    let mut steps = Vec::new();
    loop {
        let cands = extension_candidates(map, &m, exec)?;
        let outside: Vec<usize> = cands.iter().filter(|&h| !m.contains_index(h)).collect();
        if outside.is_empty() || steps.len() == max_steps {
            check_in_variety(map, &m)?;
            let instance = format!("p={} n={} d={} R={}", map.p(), map.n(), map.d(), map.r());
            let certificate = VerificationReport::exact(
                "subspace-maximality",
                instance,
                outside.len() as u128,
                0,
                Relation::Eq,
            )
            .note("dim", m.dim())
            .note("subspace", &m);
            return Ok(GreedyResult {
                maximal: outside.is_empty(),
                subspace: m,
                steps,
                certificate,
            });
        }
        let pick = match rng.as_mut() {
            Some(r) => outside[r.gen_range(0..outside.len())],
            None => outside[0],
        };
        let h = m.params.decode(pick);
        m = m.extend(&h)?;
        steps.push(h);
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of multisets of size `k` from `m` elements.
fn multisets(m: usize, k: usize) -> u128 {
    if k == 0 {
        1
    } else if m == 0 {
        0
    } else {
        binom(m + k - 1, k)
    }
}

/// Ratio below which a dimension is flagged as below trend.
pub const BELOW_TREND: f64 = 0.5;

/// `dim M` against `(n/R)^{1/d}`, plus the total degree
/// `D = sum_k k R C(m+d-k-1, d-k)` of the extension system. Report only.
pub fn subspace_bound_report(map: &PolyMap, m: &LinearSubspace) -> VerificationReport {
    let (n, d, r) = (map.n(), map.d(), map.r());
    let dim = m.dim();
    let trend = (n as f64 / r as f64).powf(1.0 / d as f64);
    let ratio = dim as f64 / trend;
    let degree: u128 = (1..=d)
        .map(|k| k as u128 * r as u128 * multisets(dim, d - k))
        .sum();
    VerificationReport::report_only(
        "subspace-dimension",
        format!("p={} n={n} d={d} R={r}", map.p()),
        dim as f64,
        trend,
    )
    .note("ratio", format!("{ratio:.6}"))
    .note("cw_degree", degree)
    .note("below_trend", ratio < BELOW_TREND)
    .note("reading", "(n/R)^(1/d)")
}

/// The coset `x + M` maximising `|A ∩ (x+M)| / |M|`, ties to the lowest
/// representative. Representatives are the smallest index in each coset.
pub fn dense_translate(a: &PointSet, m: &LinearSubspace, exec: &Exec) -> Result<(Point, f64)> {
    if a.params() != &m.params {
        return Err(Error::InvalidArgument("set and subspace live in different spaces".into()));
    }
    let params = &m.params;
    let size = params.size() as u64;
    let keys: Vec<Vec<usize>> = exec.map_blocks(size, BLOCK, |range| {
        let mut x = vec![0u32; params.n()];
        range
            .map(|i| {
                params.digits_into(i as usize, &mut x);
                params.encode(&m.reduce(&x))
            })
            .collect()
    });
    // key -> (smallest member, hits)
    let mut cosets: HashMap<usize, (usize, u64)> = HashMap::new();
    for (i, key) in keys.into_iter().flatten().enumerate() {
        let e = cosets.entry(key).or_insert((i, 0));
        e.1 += a.contains(i) as u64;
    }
    let (rep, hits) = cosets
        .into_values()
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
        .expect("at least one coset");
    let msize = (params.p() as u64).pow(m.dim() as u32);
    Ok((params.decode(rep), hits as f64 / msize as f64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosetAp {
    Found { x: Point, y: Point },
    /// Exhaustive: no progression with nonzero gap in `M` inside `A ∩ (x0+M)`.
    NoProgression,
    /// `M = {0}`, so there is no admissible gap at all.
    SubspaceTooSmall,
}

/// First `l`-term progression `x, x+y, ..., x+(l-1)y` inside `A ∩ (x0+M)`
/// with `y in M \ {0}`. `x` runs over `x0 + m` and `y` over `M`, both in
/// ascending index of `m`, `y`.
pub fn ap_in_coset(a: &PointSet, m: &LinearSubspace, x0: &Point, l: usize) -> Result<CosetAp> {
    let params = &m.params;
    if l > params.p() as usize {
        return Err(Error::InvalidArgument(format!("l = {l} exceeds p = {}", params.p())));
    }
    if a.params() != params {
        return Err(Error::InvalidArgument("set and subspace live in different spaces".into()));
    }
    m.check(x0)?;
    if m.dim() == 0 {
        return Ok(CosetAp::SubspaceTooSmall);
    }
    let members = m.enumerate();
    for &mx in &members {
        let x = params.add_index(x0.index(), mx);
        if !a.contains(x) {
            continue;
        }
        for &y in members.iter().filter(|&&y| y != 0) {
            let mut z = x;
            let ok = (1..l).all(|_| {
                z = params.add_index(z, y);
                a.contains(z)
            });
            if ok {
                return Ok(CosetAp::Found {
                    x: params.decode(x),
                    y: params.decode(y),
                });
            }
        }
    }
    Ok(CosetAp::NoProgression)
}
