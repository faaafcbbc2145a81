use std::collections::BTreeSet;

use aifs_core::cycles::{discover_cycles, MAX_PERIOD};
use aifs_core::fourier::{check_wb_normalization, eval_mb, eval_mb_exact, eval_mu_hat};
use aifs_core::hadamard::{check_hadamard, make_dual_pair};
use aifs_core::ifs::{scalar_digits, standard_simplex_digits};
use aifs_core::linalg::{int, rat, vec_to_f64};
use aifs_core::spectrum::{sierpinski_triple, spectrum_from_cycles};
use aifs_core::system_file::SystemFile;
use aifs_core::torus::{invariant_superset, orbit, orthogonality_bound_distance, orthogonality_bound_finite, find_zeros};
use aifs_core::verify::{completeness_report, orthogonal_pair, sample_points, PairStatus};
use aifs_core::{AffineSystem, AttractorMode, ExpansiveIntMatrix, Rational, RationalMatrix, TorusPoint, TruncationPolicy, Vector};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn rational_matrix(d: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(proptest::collection::vec(small_rational(), d), d).prop_map(|rows| RationalMatrix::new(rows).unwrap())
}

fn int_matrix(d: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-5i64..=5, d), d)
}

fn expansive(d: usize) -> impl Strategy<Value = ExpansiveIntMatrix> {
    int_matrix(d).prop_filter_map("not expansive", |rows| {
        let m = ExpansiveIntMatrix::new(rows).ok()?;
        m.certify().ok()
    })
}

fn digits(d: usize, n: usize) -> impl Strategy<Value = Vec<Vector>> {
    proptest::collection::btree_set(proptest::collection::vec(-3i64..=3, d), n)
        .prop_map(|s| s.into_iter().map(|v| v.into_iter().map(int).collect()).collect())
}

fn system(d: usize) -> impl Strategy<Value = AffineSystem> {
    (expansive(d), 2usize..=4).prop_flat_map(move |(r, n)| digits(d, n).prop_map(move |b| AffineSystem::uniform(r.clone(), b).unwrap()))
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-20.0f64..20.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_exact(m in rational_matrix(3)) {
        if let Ok(inv) = m.inverse() {
            prop_assert!(m.mul(&inv).is_identity());
            prop_assert!(inv.mul(&m).is_identity());
        }
    }

    #[test]
    fn transpose_involution(m in rational_matrix(3), rows in int_matrix(2)) {
        prop_assert_eq!(m.transpose().transpose(), m);
        if let Ok(r) = ExpansiveIntMatrix::new(rows) {
            prop_assert_eq!(r.transpose().transpose(), r.clone());
            prop_assert_eq!(r.check_expansive().ok(), r.transpose().check_expansive().ok());
        }
    }

    #[test]
    fn attractor_self_similarity(sys in system(2), depth in 0usize..4) {
        let a = sys.attractor(depth, AttractorMode::Deterministic).unwrap();
        let b = sys.attractor(depth + 1, AttractorMode::Deterministic).unwrap();
        prop_assert_eq!(b.points.len(), sys.len().pow(depth as u32 + 1));
        let mut grown: Vec<Vector> = (0..sys.len())
            .flat_map(|i| a.exact.as_ref().unwrap().iter().map(move |x| (i, x)))
            .map(|(i, x)| sys.tau(i, x).unwrap())
            .collect();
        let mut next = b.exact.unwrap();
        grown.sort();
        next.sort();
        prop_assert_eq!(grown, next);
        let bx = sys.bounding_box().unwrap();
        prop_assert!(b.points.iter().all(|p| bx.contains(p)));
    }

    #[test]
    fn chaos_game_reproducible(sys in system(2), seed in any::<u64>()) {
        let mode = AttractorMode::ChaosGame { points: 300, seed };
        let a = sys.attractor(0, mode).unwrap();
        let b = sys.attractor(0, mode).unwrap();
        prop_assert_eq!(&a.points, &b.points);
        let bx = sys.bounding_box().unwrap();
        prop_assert!(a.points.iter().all(|p| bx.contains(p)));
    }

    #[test]
    fn symbol_bounded_and_periodic(sys in system(2), x in point(2), k in proptest::collection::vec(-4i64..=4, 2)) {
        let m = eval_mb(&sys, &x).value;
        prop_assert!(m.norm() <= 1.0 + 1e-12);
        let shifted: Vec<f64> = x.iter().zip(&k).map(|(a, b)| a + *b as f64).collect();
        prop_assert!((eval_mb(&sys, &shifted).value - m).norm() < 1e-9);
        prop_assert!((eval_mb(&sys, &[0.0, 0.0]).value.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_symbol_matches_float(sys in system(2), x in proptest::collection::vec((-200i64..=200, 1i64..=100), 2)) {
        let xr: Vector = x.iter().map(|&(n, d)| rat(n, d)).collect();
        let exact = eval_mb_exact(&sys, &xr).unwrap();
        let float = eval_mb(&sys, &vec_to_f64(&xr));
        prop_assert!((exact.value - float.value).norm() < 1e-12);
        if exact.exact_zero {
            prop_assert!(float.value.norm() < 1e-12);
        }
    }

    #[test]
    fn weighted_two_digit_symbol_has_no_zero(w in 1i64..=99, x in proptest::collection::vec((-300i64..=300, 1i64..=60), 1)) {
        prop_assume!(w != 50);
        let p1 = rat(w, 100);
        let p2 = Rational::one() - &p1;
        let gap = (aifs_core::linalg::to_f64(&p1) - aifs_core::linalg::to_f64(&p2)).abs();
        let sys = AffineSystem::new(ExpansiveIntMatrix::new(vec![vec![2]]).unwrap(), scalar_digits(&[0, 1]), Some(vec![p1, p2])).unwrap();
        let xr: Vector = x.iter().map(|&(n, d)| rat(n, d)).collect();
        let m = eval_mb_exact(&sys, &xr).unwrap();
        prop_assert!(!m.exact_zero);
        prop_assert!(m.value.norm() >= gap - 1e-12);
    }

    #[test]
    fn hadamard_swap_symmetry(p in 2i64..=7, shift in 0i64..3) {
        let r = ExpansiveIntMatrix::new(vec![vec![p]]).unwrap();
        let b = scalar_digits(&[0, p / 2 + shift]);
        let l = scalar_digits(&[0, 1]);
        let t = check_hadamard(&r, &b, &l).unwrap();
        let s = check_hadamard(&r.transpose(), &l, &b).unwrap();
        prop_assert_eq!(t.is_certified(), s.is_certified());
        prop_assert!((t.unitarity_defect - s.unitarity_defect).abs() < 1e-12);
        if t.is_certified() {
            let sys_b = AffineSystem::uniform(r, b).unwrap();
            prop_assert!(check_wb_normalization(&sys_b, &l, &sample_points(1, 16)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn orbit_exact_and_closed(rows in int_matrix(2), x in proptest::collection::vec(0i64..30, 2), den in 1i64..=30) {
        let Ok(s) = ExpansiveIntMatrix::new(rows) else { return Ok(()) };
        let p = TorusPoint::new(x.iter().map(|&n| rat(n, den)).collect());
        let a = orbit(&s, &p, 10_000).unwrap();
        let b = orbit(&s, &p, 10_000).unwrap();
        prop_assert_eq!(&a.trail, &b.trail);
        prop_assert_eq!(&a.trail[a.pre_period + a.period], &a.trail[a.pre_period]);
        for q in &a.trail {
            prop_assert!(q.coords().iter().all(|c| den.is_multiple_of(&i64::try_from(c.denom().clone()).unwrap()) && *c >= Rational::zero() && *c < Rational::one()));
        }
        let z = match invariant_superset(&s, std::slice::from_ref(&p), 10_000) {
            Ok(z) => z,
            Err(aifs_core::AifsError::CriterionInapplicable(_)) => {
                prop_assert!(a.trail.iter().any(TorusPoint::is_origin));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let set: BTreeSet<&TorusPoint> = z.iter().collect();
        prop_assert!(z.iter().all(|q| set.contains(&q.map(&s))));
        prop_assert!(orthogonality_bound_finite(&z) >= orthogonality_bound_finite(&z[..1]));
    }

    #[test]
    fn certificates_are_sound(a in proptest::collection::vec(-40i64..=40, 2), b in proptest::collection::vec(-40i64..=40, 2)) {
        let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(3, 2).unwrap(), standard_simplex_digits(2)).unwrap();
        let av: Vector = a.into_iter().map(int).collect();
        let bv: Vector = b.into_iter().map(int).collect();
        let check = orthogonal_pair(&sys, &av, &bv, 40).unwrap();
        if check.status == PairStatus::CertifiedOrthogonal {
            let diff: Vec<f64> = av.iter().zip(&bv).map(|(x, y)| aifs_core::linalg::to_f64(&(x - y))).collect();
            prop_assert!(eval_mu_hat(&sys, &diff, &TruncationPolicy::default()).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn system_file_round_trip(sys in system(2)) {
        let f = SystemFile::from_parts(sys.matrix(), sys.digits(), None);
        let g = SystemFile::from_json(&f.to_json()).unwrap();
        let back = g.system().unwrap();
        prop_assert_eq!(back.matrix().rows(), sys.matrix().rows());
        prop_assert_eq!(back.digits(), sys.digits());
        prop_assert_eq!(back.weights(), sys.weights());
    }
}

#[test]
fn distance_bound_monotone_in_delta() {
    use aifs_core::torus::floor_sqrt_ratio;
    let mut prev = 0;
    for k in (1..=40).rev() {
        let b = floor_sqrt_ratio(3, &rat(k, 40));
        assert!(b >= prev);
        prev = b;
    }
    let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(3, 3).unwrap(), standard_simplex_digits(3)).unwrap();
    let zs = find_zeros(&sys, 64).unwrap();
    let b = orthogonality_bound_distance(&sys.matrix().transpose(), &zs, 4096).unwrap();
    assert_eq!(b.bound, b.k.pow(3));
    assert_eq!(b.k, floor_sqrt_ratio(3, &b.delta_sq) + 1);
}

fn spectra(t: &aifs_core::HadamardTriple, levels: &[usize]) -> (AffineSystem, Vec<aifs_core::SpectrumSet>) {
    let pair = make_dual_pair(t).unwrap();
    let disc = discover_cycles(t, MAX_PERIOD).unwrap();
    for c in &disc.all_cycles {
        assert!(c.verify(&pair.dual).unwrap());
    }
    let sets = levels.iter().map(|&n| spectrum_from_cycles(&pair.dual, &disc.wb_cycles, n).unwrap()).collect();
    (pair.primal, sets)
}

#[test]
fn spectrum_levels_nested_and_q_monotone() {
    let cantor = check_hadamard(&ExpansiveIntMatrix::new(vec![vec![4]]).unwrap(), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap();
    for t in [cantor, sierpinski_triple(3, 2).unwrap(), sierpinski_triple(2, 3).unwrap()] {
        let (primal, sets) = spectra(&t, &[1, 2, 3, 4]);
        let points = sample_points(t.matrix().dim(), 8);
        let mut prev: Option<Vec<f64>> = None;
        for w in sets.windows(2) {
            assert!(w[0].elements.iter().all(|x| w[1].contains(x)));
        }
        for s in &sets {
            let q = completeness_report(&primal, s, &points, &TruncationPolicy::default()).unwrap();
            assert!(q.q_max <= 1.0 + 1e-8, "{}", q.q_max);
            if let Some(p) = &prev {
                assert!(p.iter().zip(&q.q_values).all(|(a, b)| a <= &(b + 1e-15)));
            }
            prev = Some(q.q_values);
        }
    }
}
