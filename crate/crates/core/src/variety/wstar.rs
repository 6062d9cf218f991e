//! Enumeration of the Birch sets
//! `W* = {(h^1..h^{d-1}) : rank Phi(h^1..h^{d-1}) < R}` and
//! `W*(lambda) = {(h^1..h^{d-1}) : sum_i lambda_i Phi^i(h^1..h^{d-1}) = 0}`.
//!
//! A tuple is encoded as `idx(h^1) + p^n idx(h^2) + ...`. `Phi` is linear in
//! `h^1`, so for fixed `(h^2..h^{d-1})` it is `sum_k h^1_k B_k` for a slab
//! `B` of `R x n` matrices; stepping `idx(h^1)` by one increments a run of
//! base-p digits, each of which adds one `B_k`. The scan therefore costs
//! amortized `O(R n)` per tuple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{Exec, BLOCK};
use crate::ffcore::FieldParams;
use crate::polymap::{factorial_mod, rank_in_place, PolyMap};

/// What makes a tuple a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Test {
    /// `rank Phi < R`.
    RankDeficient,
    /// All entries of the (single-row) combined `Phi` vanish.
    Zero,
}

/// Prepared scan over `(h^1, ..., h^{d-1})` tuples.
pub struct WstarScan {
    map: PolyMap,
    test: Test,
    params: FieldParams,
    tuples: u64,
}

/// Sampled estimate of a tuple count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledCount {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl WstarScan {
    /// Scan for `W*` itself.
    pub fn rank_deficient(map: &PolyMap) -> Result<Self> {
        let test = if map.r() == 1 {
            Test::Zero
        } else {
            Test::RankDeficient
        };
        Self::build(map.clone(), test)
    }

    /// Scan for `W*(lambda)`; `lambda` must be nonzero.
    pub fn for_lambda(map: &PolyMap, lambda: &[u32]) -> Result<Self> {
        if lambda.len() != map.r() {
            return Err(Error::DimensionMismatch {
                expected: map.r(),
                got: lambda.len(),
            });
        }
        if lambda.iter().all(|&l| l % map.p() == 0) {
            return Err(Error::InvalidArgument("lambda must be nonzero".into()));
        }
        Self::build(map.combine(lambda)?, Test::Zero)
    }

    fn build(map: PolyMap, test: Test) -> Result<Self> {
        if map.d() < 2 {
            return Err(Error::InvalidArgument(
                "W* needs degree at least 2".into(),
            ));
        }
        let params = FieldParams::with_budget(map.p(), map.n(), u64::MAX)?;
        let tuples = (params.size() as u128)
            .checked_pow(map.d() as u32 - 1)
            .filter(|&t| t <= u64::MAX as u128)
            .ok_or(Error::BudgetExceeded {
                needed: u128::MAX,
                budget: u64::MAX,
            })? as u64;
        Ok(Self {
            map,
            test,
            params,
            tuples,
        })
    }

    /// `p^{(d-1)n}`.
    pub fn tuple_count(&self) -> u64 {
        self.tuples
    }

    /// Splits a tuple index into its `d - 1` point indices.
    pub fn decode_tuple(&self, mut t: u64) -> Vec<usize> {
        let size = self.params.size() as u64;
        (0..self.map.d() - 1)
            .map(|_| {
                let h = (t % size) as usize;
                t /= size;
                h
            })
            .collect()
    }

    /// Exact member count.
    pub fn count(&self, exec: &Exec) -> Result<u64> {
        exec.check_budget(self.tuples as u128)?;
        let chunk = BLOCK.max(self.params.size() as u64);
        Ok(exec
            .map_blocks(self.tuples, chunk, |r| self.scan(r.start, r.end, None))
            .into_iter()
            .sum())
    }

    /// Member tuple indices, ascending.
    pub fn members(&self, exec: &Exec) -> Result<Vec<u64>> {
        exec.check_budget(self.tuples as u128)?;
        let chunk = BLOCK.max(self.params.size() as u64);
        let parts = exec.map_blocks(self.tuples, chunk, |r| {
            let mut out = Vec::new();
            self.scan(r.start, r.end, Some(&mut out));
            out
        });
        Ok(parts.concat())
    }

    /// Uniform seeded sampling for tuple spaces beyond the budget.
    pub fn sample(&self, samples: u64, seed: u64) -> SampledCount {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0;
        for _ in 0..samples {
            let t = rng.gen_range(0..self.tuples);
            if self.is_member(t) {
                hits += 1;
            }
        }
        let f = hits as f64 / samples.max(1) as f64;
        let total = self.tuples as f64;
        SampledCount {
            samples,
            hits,
            estimate: f * total,
            std_error: total * (f * (1.0 - f) / samples.max(1) as f64).sqrt(),
        }
    }

    /// Direct membership test, computing `Phi` from scratch.
    pub fn is_member(&self, t: u64) -> bool {
        let hs: Vec<Vec<u32>> = self
            .decode_tuple(t)
            .into_iter()
            .map(|h| self.params.decode(h).coords().to_vec())
            .collect();
        let refs: Vec<&[u32]> = hs.iter().map(Vec::as_slice).collect();
        let phi = self.map.phi_coords(&refs);
        let mut scratch = phi.data().to_vec();
        self.passes(&mut scratch)
    }

    fn passes(&self, phi: &mut [u32]) -> bool {
        match self.test {
            Test::Zero => phi.iter().all(|&v| v == 0),
            Test::RankDeficient => {
                let r = self.map.r();
                phi.iter().all(|&v| v == 0) || rank_in_place(phi, r, self.map.n(), self.map.p()) < r
            }
        }
    }

    /// `B[i][k][j] = d! Q_i(h^2, ..., h^{d-1}, e_k, e_j)` for the given prefix.
    fn slab(&self, prefix: u64) -> Vec<u32> {
        let n = self.map.n();
        let d = self.map.d();
        let size = self.params.size() as u64;
        let mut rest = prefix;
        let hs: Vec<Vec<u32>> = (0..d - 2)
            .map(|_| {
                let h = (rest % size) as usize;
                rest /= size;
                self.params.decode(h).coords().to_vec()
            })
            .collect();
        let refs: Vec<&[u32]> = hs.iter().map(Vec::as_slice).collect();
        let scale = factorial_mod(d, self.map.p()) as u64;
        let p = self.map.p() as u64;
        let mut slab = Vec::with_capacity(self.map.r() * n * n);
        for i in 0..self.map.r() {
            slab.extend(
                self.map
                    .partial_contract(i, &refs)
                    .into_iter()
                    .map(|v| (v as u64 * scale % p) as u32),
            );
        }
        slab
    }

    fn scan(&self, start: u64, end: u64, mut members: Option<&mut Vec<u64>>) -> u64 {
        let n = self.map.n();
        let r = self.map.r();
        let p = self.map.p();
        let size = self.params.size() as u64;
        let mut slab = Vec::new();
        let mut phi = vec![0u32; r * n];
        let mut scratch = vec![0u32; r * n];
        let mut digits = vec![0u32; n];
        let mut prefix = u64::MAX;
        let mut hits = 0;
        for t in start..end {
            let (low, pre) = (t % size, t / size);
            if pre != prefix {
                prefix = pre;
                slab = self.slab(pre);
                self.params.digits_into(low as usize, &mut digits);
                phi.iter_mut().for_each(|v| *v = 0);
                for (k, &c) in digits.iter().enumerate() {
                    for _ in 0..c {
                        add_row(&mut phi, &slab, k, r, n, p);
                    }
                }
            } else {
                for (k, c) in digits.iter_mut().enumerate() {
                    add_row(&mut phi, &slab, k, r, n, p);
                    *c += 1;
                    if *c < p {
                        break;
                    }
                    *c = 0;
                }
            }
            let member = match self.test {
                Test::Zero => phi.iter().all(|&v| v == 0),
                Test::RankDeficient => {
                    scratch.copy_from_slice(&phi);
                    self.passes(&mut scratch)
                }
            };
            if member {
                hits += 1;
                if let Some(m) = members.as_deref_mut() {
                    m.push(t);
                }
            }
        }
        hits
    }
}

/// `phi[i][j] += slab[i][k][j]` mod p.
#[inline]
fn add_row(phi: &mut [u32], slab: &[u32], k: usize, r: usize, n: usize, p: u32) {
    for i in 0..r {
        let src = &slab[(i * n + k) * n..(i * n + k + 1) * n];
        let dst = &mut phi[i * n..(i + 1) * n];
        for (a, &b) in dst.iter_mut().zip(src) {
            let s = *a + b;
            *a = if s >= p { s - p } else { s };
        }
    }
}

/// `|W*(lambda)|`.
pub fn wstar_lambda(map: &PolyMap, lambda: &[u32], exec: &Exec) -> Result<u64> {
    WstarScan::for_lambda(map, lambda)?.count(exec)
}

/// `|W*|`.
pub fn wstar_count(map: &PolyMap, exec: &Exec) -> Result<u64> {
    WstarScan::rank_deficient(map)?.count(exec)
}
