use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::polymap::Monomial;
use crate::variety::level_set;

fn exec() -> Exec {
    Exec::default()
}

fn diag(p: u32, coeffs: &[i64]) -> PolyMap {
    let n = coeffs.len();
    let terms: Vec<Monomial> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let mut e = vec![0; n];
            e[j] = 2;
            Monomial { row: 0, exponents: e, coeff: c }
        })
        .collect();
    PolyMap::from_monomials(p, n, 2, 1, &terms).unwrap()
}

fn pt(fp: &FieldParams, c: &[i64]) -> Point {
    fp.point(c).unwrap()
}

/// Independent soundness oracle: P vanishes at every combination of the basis.
fn vanishes_on(map: &PolyMap, m: &LinearSubspace) -> bool {
    let fp = m.params();
    let basis = m.basis();
    let total = (fp.p() as usize).pow(basis.len() as u32);
    (0..total).all(|mut t| {
        let mut v = fp.zero();
        for b in &basis {
            v = v.add(&b.scale((t % fp.p() as usize) as u32)).unwrap();
            t /= fp.p() as usize;
        }
        map.eval(&v).unwrap().iter().all(|&c| c == 0)
    })
}

#[test]
fn subspace_basics() {
    let fp = FieldParams::new(5, 3).unwrap();
    let m = LinearSubspace::span(
        fp.clone(),
        &[pt(&fp, &[1, 2, 0]), pt(&fp, &[2, 4, 0]), pt(&fp, &[0, 1, 1])],
    )
    .unwrap();
    assert_eq!(m.dim(), 2);
    let pts = m.enumerate();
    assert_eq!(pts.len(), 25);
    assert!(pts.windows(2).all(|w| w[0] < w[1]));
    assert!(m.contains(&pt(&fp, &[1, 3, 1])));
    assert!(!m.contains(&pt(&fp, &[1, 0, 0])));
    assert!(m.extend(&pt(&fp, &[3, 1, 0])).is_err());
    assert_eq!(m.extend(&pt(&fp, &[1, 0, 0])).unwrap().enumerate().len(), 125);

    let again = LinearSubspace::parse(fp.clone(), &m.to_text()).unwrap();
    assert_eq!(again, m);
    let other = LinearSubspace::span(fp.clone(), &[pt(&fp, &[0, 1, 1]), pt(&fp, &[1, 3, 1])]).unwrap();
    assert_eq!(other, m);
    assert_eq!(LinearSubspace::zero(fp.clone()).enumerate(), vec![0]);
    assert_eq!(m.coset_rep(&pt(&fp, &[1, 3, 1])).index(), 0);
}

#[test]
fn candidates_of_zero_subspace_are_the_zero_set() {
    for map in [diag(5, &[1, 1]), PolyMap::sum_of_powers(3, 3, 7).unwrap(), PolyMap::random(5, 3, 2, 2, 1).unwrap()] {
        let fp = FieldParams::new(map.p(), map.n()).unwrap();
        let cands = extension_candidates(&map, &LinearSubspace::zero(fp), &exec()).unwrap();
        let zeros = level_set(&map, &vec![0; map.r()], &exec()).unwrap();
        assert_eq!(cands, zeros);
    }
}

#[test]
fn isotropic_line_candidates() {
    let map = diag(5, &[1, 1]);
    let fp = FieldParams::new(5, 2).unwrap();
    let m = LinearSubspace::span(fp.clone(), &[pt(&fp, &[1, 2])]).unwrap();
    let multi = extension_candidates(&map, &m, &exec()).unwrap();
    let direct = extension_candidates_direct(&map, &m, &exec()).unwrap();
    assert_eq!(multi, direct);
    assert_eq!(multi.iter().collect::<Vec<_>>(), m.enumerate());
    assert!(!multi.contains(pt(&fp, &[1, 3]).index()));

    let off = LinearSubspace::span(fp.clone(), &[pt(&fp, &[1, 0])]).unwrap();
    assert!(matches!(extension_candidates(&map, &off, &exec()), Err(Error::NotInVariety(_))));
}

#[test]
fn greedy_examples() {
    let cases = [(diag(5, &[1, 1]), 1), (diag(5, &[1, 1, 1, 1]), 2), (diag(5, &[1, 2]), 0)];
    for (map, dim) in cases {
        let g = greedy_max_subspace(&map, Choice::LowestIndex, &exec()).unwrap();
        assert_eq!(g.subspace.dim(), dim, "{}", g.subspace);
        assert!(g.maximal && g.certificate.passed(), "{}", g.certificate);
        assert!(vanishes_on(&map, &g.subspace));
        // Maximality by brute force: no h outside M keeps M + F_p h isotropic.
        let fp = g.subspace.params().clone();
        for h in 0..fp.size() {
            let h = fp.decode(h);
            if !g.subspace.contains(&h) {
                assert!(!vanishes_on(&map, &g.subspace.extend(&h).unwrap()));
            }
        }
    }
}

#[test]
fn seeded_greedy_is_reproducible_and_sound() {
    let map = diag(5, &[1, 1, 1, 1]);
    for seed in 0..5 {
        let a = greedy_max_subspace(&map, Choice::Seeded(seed), &exec()).unwrap();
        let b = greedy_max_subspace(&map, Choice::Seeded(seed), &exec()).unwrap();
        assert_eq!(a.subspace, b.subspace);
        assert!(a.maximal && vanishes_on(&map, &a.subspace));
    }
}

#[test]
fn multilinear_and_direct_tests_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for t in 0..50u64 {
        let p = [5, 7][rng.gen_range(0..2)];
        let n = rng.gen_range(2..=3);
        let d = rng.gen_range(2..=3);
        let r = rng.gen_range(1..=2);
        let map = if t % 3 == 0 {
            PolyMap::sum_of_powers(n, d, p).unwrap()
        } else {
            PolyMap::random(p, n, d, r, t).unwrap()
        };
        let fp = FieldParams::new(p, n).unwrap();
        let steps = rng.gen_range(0..=2);
        let g = greedy_extend(&map, LinearSubspace::zero(fp), Choice::Seeded(t), steps, &exec()).unwrap();
        let rep = extension_equivalence(&map, &g.subspace, &exec()).unwrap();
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn bound_report_examples() {
    let fp4 = FieldParams::new(5, 4).unwrap();
    let m = LinearSubspace::span(fp4.clone(), &[pt(&fp4, &[1, 2, 0, 0]), pt(&fp4, &[0, 0, 1, 2])]).unwrap();
    let r = subspace_bound_report(&diag(5, &[1, 1, 1, 1]), &m);
    assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
    assert!(r.notes.contains(&("ratio".into(), "1.000000".into())));
    // k=1: two linear conditions, k=2: one quadratic.
    assert!(r.notes.contains(&("cw_degree".into(), "4".into())));

    let z = subspace_bound_report(&diag(5, &[1, 2]), &LinearSubspace::zero(FieldParams::new(5, 2).unwrap()));
    assert!(z.notes.contains(&("below_trend".into(), "true".into())));
    assert!(z.notes.contains(&("cw_degree".into(), "2".into())));

    let fp2 = FieldParams::new(5, 2).unwrap();
    let line = LinearSubspace::span(fp2.clone(), &[pt(&fp2, &[1, 2])]).unwrap();
    let l = subspace_bound_report(&diag(5, &[1, 1]), &line);
    assert!((l.rhs - 2f64.sqrt()).abs() < 1e-12);
}

fn random_set(fp: &FieldParams, density: f64, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::from_indices(fp.clone(), (0..fp.size()).filter(|_| rng.gen_bool(density))).unwrap()
}

#[test]
fn dense_translate_examples() {
    let fp = FieldParams::new(5, 3).unwrap();
    let m = LinearSubspace::span(fp.clone(), &[pt(&fp, &[1, 1, 2])]).unwrap();
    let as_set = PointSet::from_indices(fp.clone(), m.enumerate()).unwrap();
    assert_eq!(dense_translate(&as_set, &m, &exec()).unwrap(), (fp.zero(), 1.0));
    assert_eq!(dense_translate(&PointSet::full(fp.clone()), &m, &exec()).unwrap(), (fp.zero(), 1.0));

    for seed in 0..5 {
        let a = random_set(&fp, 0.3, seed);
        let (rep, dens) = dense_translate(&a, &m, &exec()).unwrap();
        assert!(dens >= a.density());
        // Brute force over cosets, each keyed by its smallest element.
        let mut best = (0usize, 0usize);
        let mut seen = vec![false; fp.size()];
        for x in 0..fp.size() {
            if seen[x] {
                continue;
            }
            let members: Vec<usize> = m.enumerate().iter().map(|&y| fp.add_index(x, y)).collect();
            let hits = members.iter().filter(|&&z| a.contains(z)).count();
            for &z in &members {
                seen[z] = true;
            }
            if hits > best.1 {
                best = (x, hits);
            }
        }
        assert_eq!(rep.index(), best.0);
        assert_eq!(dens, best.1 as f64 / 5.0);
    }
}

#[test]
fn ap_in_coset_examples() {
    let fp = FieldParams::new(5, 2).unwrap();
    let m = LinearSubspace::span(fp.clone(), &[pt(&fp, &[1, 2])]).unwrap();
    let x0 = pt(&fp, &[1, 0]);
    let coset: Vec<usize> = m.enumerate().iter().map(|&y| fp.add_index(x0.index(), y)).collect();
    let a = PointSet::from_indices(fp.clone(), coset).unwrap();
    let first_y = m.enumerate()[1];
    assert_eq!(
        ap_in_coset(&a, &m, &x0, 3).unwrap(),
        CosetAp::Found { x: x0.clone(), y: fp.decode(first_y) }
    );
    let single = PointSet::from_indices(fp.clone(), [x0.index()]).unwrap();
    assert_eq!(ap_in_coset(&single, &m, &x0, 3).unwrap(), CosetAp::NoProgression);
    assert_eq!(
        ap_in_coset(&a, &LinearSubspace::zero(fp.clone()), &x0, 3).unwrap(),
        CosetAp::SubspaceTooSmall
    );
    assert!(ap_in_coset(&a, &m, &x0, 6).is_err());
}

#[test]
fn pipeline_finds_restricted_progression() {
    let map = diag(5, &[1, 1, 1, 1]);
    let g = greedy_max_subspace(&map, Choice::LowestIndex, &exec()).unwrap();
    let fp = g.subspace.params().clone();
    let a = random_set(&fp, 0.9, 11);
    let (x0, dens) = dense_translate(&a, &g.subspace, &exec()).unwrap();
    assert!(dens >= a.density());
    let CosetAp::Found { x, y } = ap_in_coset(&a, &g.subspace, &x0, 3).unwrap() else {
        panic!("no progression found");
    };
    assert!(!y.is_zero());
    assert_eq!(map.eval(&y).unwrap(), vec![0]);
    for k in 0..3 {
        assert!(a.contains(x.add(&y.scale(k)).unwrap().index()));
    }
}
