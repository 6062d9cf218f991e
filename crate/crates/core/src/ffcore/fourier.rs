//! Fourier transform on `F_p^n` as `n` rounds of length-p DFTs, one per
//! coordinate. Normalization: `f^(xi) = E_x f(x) e(-xi . x)`.

use num_complex::Complex64;

use super::{char_table, DenseFunction};

pub fn fourier(f: &DenseFunction) -> DenseFunction {
    transform(f, true)
}

/// `f(x) = sum_xi f^(xi) e(xi . x)`.
pub fn inverse_fourier(f: &DenseFunction) -> DenseFunction {
    transform(f, false)
}

fn transform(f: &DenseFunction, forward: bool) -> DenseFunction {
    let params = f.params().clone();
    let p = params.p() as usize;
    let roots = char_table(params.p());
    let scale = if forward { 1.0 / p as f64 } else { 1.0 };
    let mut data = f.table().to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    for axis in 0..params.n() {
        let stride = params.power(axis);
        let span = stride * p;
        for base in (0..data.len()).step_by(span) {
            for low in 0..stride {
                let start = base + low;
                for (k, out) in line.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..p {
                        let e = (k * x) % p;
                        let w = if forward { roots[(p - e) % p] } else { roots[e] };
                        acc += data[start + x * stride] * w;
                    }
                    *out = acc * scale;
                }
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
    DenseFunction::new(params, data).expect("same length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::{char_e, dot_mod, FieldParams, IDENTITY_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_function(p: u32, n: usize, seed: u64) -> DenseFunction {
        let fp = FieldParams::new(p, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseFunction::from_fn(fp, |_| Complex64::new(rng_f(&mut rng), rng_f(&mut rng)))
    }

    fn rng_f(rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-1.0..1.0)
    }

    // Direct O(p^{2n}) summation.
    fn naive(f: &DenseFunction) -> Vec<Complex64> {
        let fp = f.params();
        let size = fp.size();
        (0..size)
            .map(|xi| {
                let xi = fp.decode(xi);
                (0..size)
                    .map(|x| {
                        let x = fp.decode(x);
                        let phase = (fp.p() - dot_mod(xi.coords(), x.coords(), fp.p())) % fp.p();
                        f.table()[x.index()] * char_e(phase, fp.p())
                    })
                    .sum::<Complex64>()
                    / size as f64
            })
            .collect()
    }

    #[test]
    fn delta_transforms_to_constant() {
        let fp = FieldParams::new(5, 1).unwrap();
        let f = DenseFunction::from_fn(fp, |i| Complex64::new((i == 0) as u8 as f64, 0.0));
        for z in fourier(&f).table() {
            assert!((z - 0.2).norm() < IDENTITY_TOL);
        }
    }

    #[test]
    fn constant_transforms_to_delta() {
        let fp = FieldParams::new(3, 3).unwrap();
        let f = DenseFunction::constant(fp, Complex64::new(1.0, 0.0));
        let hat = fourier(&f);
        for (xi, z) in hat.table().iter().enumerate() {
            let expected = if xi == 0 { 1.0 } else { 0.0 };
            assert!((z - expected).norm() < IDENTITY_TOL);
        }
    }

    #[test]
    fn matches_direct_summation() {
        for (p, n, seed) in [(5, 2, 1), (3, 3, 2), (7, 1, 3)] {
            let f = random_function(p, n, seed);
            let fast = fourier(&f);
            for (a, b) in fast.table().iter().zip(naive(&f)) {
                assert!((a - b).norm() < IDENTITY_TOL);
            }
        }
    }

    #[test]
    fn parseval_on_f5_squared() {
        let f = random_function(5, 2, 99);
        let hat = fourier(&f);
        let lhs: f64 = hat.table().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 =
            f.table().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.table().len() as f64;
        assert!((lhs - rhs).abs() < IDENTITY_TOL);
    }

    #[test]
    fn inversion_round_trips() {
        let f = random_function(7, 2, 5);
        let back = inverse_fourier(&fourier(&f));
        for (a, b) in f.table().iter().zip(back.table()) {
            assert!((a - b).norm() < IDENTITY_TOL);
        }
    }
}
