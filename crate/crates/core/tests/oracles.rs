//! Reference values checked against independent closed forms or brute force
//! written directly in the tests.

use std::f64::consts::PI;

use aifs_core::cycles::{discover_cycles, MAX_PERIOD};
use aifs_core::fourier::{check_wb_normalization, eval_mb_exact, eval_mu_hat, invariance_residual};
use aifs_core::hadamard::{check_hadamard, make_dual_pair};
use aifs_core::ifs::{scalar_digits, standard_simplex_digits};
use aifs_core::lattice::{build_gamma, dual_lattice, LatticeBasis};
use aifs_core::linalg::{int, rat};
use aifs_core::spectrum::{propdiv_family, sierpinski_triple, spectrum_from_cycles};
use aifs_core::torus::{
    find_zeros, has_zero_weighted, invariant_superset, lemconf_dn, lemconf_verdict, orbit, orthogonality_bound_distance,
    TorusPoint,
};
use aifs_core::verify::{completeness_q, max_orthogonal_family, orthogonal_pair, PairOracle, PairStatus};
use aifs_core::{AffineSystem, AttractorMode, ExpansiveIntMatrix, FourierKernel, RationalMatrix, TruncationPolicy, Vector};
use num_complex::Complex64;

fn m1(p: i64) -> ExpansiveIntMatrix {
    ExpansiveIntMatrix::new(vec![vec![p]]).unwrap()
}

fn cantor4() -> AffineSystem {
    AffineSystem::uniform(m1(4), scalar_digits(&[0, 2])).unwrap()
}

fn ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| int(x)).collect()
}

/// `prod_{n=1}^{terms} (1/N) sum_b e^{2 pi i b x / p^n}` in one dimension.
fn product_1d(p: f64, digits: &[f64], x: f64, terms: i32) -> Complex64 {
    (1..=terms)
        .map(|n| {
            let y = x / p.powi(n);
            digits.iter().map(|b| Complex64::from_polar(1.0, 2.0 * PI * b * y)).sum::<Complex64>() / digits.len() as f64
        })
        .product()
}

#[test]
fn inverse_of_shear() {
    let m = ExpansiveIntMatrix::new(vec![vec![2, 1], vec![0, 2]]).unwrap();
    let want = RationalMatrix::new(vec![vec![rat(1, 2), rat(-1, 4)], vec![int(0), rat(1, 2)]]).unwrap();
    assert_eq!(m.inverse().unwrap(), want);
}

#[test]
fn digit_maps() {
    let sys = cantor4();
    assert_eq!(sys.tau(1, &[rat(2, 3)]).unwrap(), vec![rat(2, 3)]);
    let s3 = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 3).unwrap(), standard_simplex_digits(3)).unwrap();
    assert_eq!(s3.digits()[1], ints(&[1, 0, 0]));
    assert_eq!(s3.tau(1, &ints(&[1, 1, 1])).unwrap(), vec![int(1), rat(1, 2), rat(1, 2)]);
}

#[test]
fn attractor_depths() {
    let a = cantor4().attractor(1, AttractorMode::Deterministic).unwrap();
    assert_eq!(a.exact.unwrap(), vec![vec![int(0)], vec![rat(1, 2)]]);
    let sier = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 2).unwrap(), standard_simplex_digits(2)).unwrap();
    let a = sier.attractor(2, AttractorMode::Deterministic).unwrap();
    assert_eq!(a.points.len(), 9);
    assert!(a.points.iter().flatten().all(|c| (0.0..=1.0).contains(c)));
    let bx = cantor4().bounding_box().unwrap();
    assert!(bx.lo[0] <= 0.0 && bx.hi[0] >= 2.0 / 3.0);
}

#[test]
fn prop_zero_is_exact() {
    let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(6, 4).unwrap(), standard_simplex_digits(4)).unwrap();
    let z0 = vec![rat(1, 2), int(0), rat(1, 3), rat(2, 3)];
    // 1 + e^{i pi} + e^0 + e^{2 pi i/3} + e^{4 pi i/3}
    let direct: Complex64 = [0.0, 0.5, 0.0, 1.0 / 3.0, 2.0 / 3.0].iter().map(|t| Complex64::from_polar(1.0, 2.0 * PI * t)).sum();
    assert!(direct.norm() < 1e-12);
    assert!(eval_mb_exact(&sys, &z0).unwrap().exact_zero);
}

#[test]
fn wb_normalization() {
    let sys = cantor4();
    let xs: Vec<Vec<f64>> = (0..100).map(|i| vec![-10.0 + 0.2 * i as f64 + 0.013]).collect();
    assert!(check_wb_normalization(&sys, &scalar_digits(&[0, 1]), &xs).unwrap() < 1e-12);
    // sum_l W_B((1/8 + l)/4) with l in {0, 2}: cos^2(pi/16) + cos^2(pi/16 + pi) = 2 cos^2(pi/16)
    let bad = check_wb_normalization(&sys, &scalar_digits(&[0, 2]), &[vec![0.125]]).unwrap();
    assert!((bad - (2.0 * (PI / 16.0).cos().powi(2) - 1.0)).abs() < 1e-12);
    assert!(bad > 0.9);
}

#[test]
fn mu_hat_against_direct_product() {
    let sys = cantor4();
    let policy = TruncationPolicy::default();
    let at2 = eval_mu_hat(&AffineSystem::uniform(m1(4), scalar_digits(&[0, 1])).unwrap(), &[2.0], &policy).unwrap();
    assert!(at2.abs() < 1e-15);
    for x in [0.3, 1.0, -7.25, 13.0 / 3.0] {
        let got = eval_mu_hat(&sys, &[x], &policy).unwrap();
        let want = product_1d(4.0, &[0.0, 2.0], x, 60);
        assert!((got.value - want).norm() < 1e-12, "{x}");
        assert!(invariance_residual(&sys, &[x], &policy).unwrap() < 1e-9);
    }
}

#[test]
fn hadamard_rejection_defect() {
    let t = check_hadamard(&m1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 2])).unwrap();
    assert!(!t.is_certified());
    assert!((t.unitarity_defect - 1.0).abs() < 1e-12);
}

#[test]
fn orbits_and_bounds_in_one_dimension() {
    let three = m1(3);
    let half = TorusPoint::new(vec![rat(1, 2)]);
    let o = orbit(&three, &half, 100).unwrap();
    assert_eq!((o.pre_period, o.period), (0, 1));
    assert!(invariant_superset(&m1(2), std::slice::from_ref(&half), 100).is_err());
    let sys = AffineSystem::uniform(three.clone(), scalar_digits(&[0, 1])).unwrap();
    let zs = find_zeros(&sys, 64).unwrap();
    let b = orthogonality_bound_distance(&three, &zs, 100).unwrap();
    assert_eq!((b.delta_sq.clone(), b.bound), (rat(1, 4), 3));
}

#[test]
fn dn_closed_forms() {
    let d1 = lemconf_dn(3, 1, 1).unwrap();
    assert!((d1.dn - (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm()).abs() < 1e-12);
    let d2 = lemconf_dn(3, 1, 2).unwrap();
    assert!((d2.dn - 2.0 * (4.0 * PI / 9.0).cos()).abs() < 1e-12);
    // brute force over k in 1..9
    let brute = (1..9).map(|k| (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 9.0)).norm()).fold(f64::MAX, f64::min);
    assert!((d2.dn - brute).abs() < 1e-12);
    let rep = lemconf_verdict(3, 1, 5).unwrap();
    assert!(rep.rows.iter().all(|r| r.scaled >= 2.0));
    assert_eq!(lemconf_dn(6, 4, 1).unwrap().dn, 0.0);
}

#[test]
fn weighted_near_half_has_no_zero() {
    let sys = AffineSystem::new(m1(2), scalar_digits(&[0, 1]), Some(vec![rat(4999, 10000), rat(5001, 10000)])).unwrap();
    assert!(!has_zero_weighted(&sys, 64).unwrap().has_zero);
}

#[test]
fn gamma_lattices() {
    let g = build_gamma(&m1(2), &scalar_digits(&[0, 1]), 8).unwrap();
    assert!(g.basis.same_lattice(&LatticeBasis::integer(1)));
    let r = ExpansiveIntMatrix::scalar(2, 2).unwrap();
    let g = build_gamma(&r, &standard_simplex_digits(2), 8).unwrap();
    assert!(g.basis.same_lattice(&LatticeBasis::integer(2)));
    let r3 = ExpansiveIntMatrix::scalar(3, 2).unwrap();
    let g = build_gamma(&r3, &standard_simplex_digits(2), 8).unwrap();
    assert!(dual_lattice(&g.basis).unwrap().same_lattice(&LatticeBasis::integer(2)));
}

#[test]
fn cantor_spectrum_and_certificates() {
    let t = check_hadamard(&m1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap();
    let disc = discover_cycles(&t, MAX_PERIOD).unwrap();
    let pair = make_dual_pair(&t).unwrap();
    let sp = spectrum_from_cycles(&pair.dual, &disc.wb_cycles, 3).unwrap();
    let want: Vec<Vector> = [0, 1, 4, 5, 16, 17, 20, 21].iter().map(|&k| ints(&[k])).collect();
    assert_eq!(sp.elements, want);

    let c = orthogonal_pair(&pair.primal, &ints(&[0]), &ints(&[1]), 40).unwrap();
    assert_eq!(c.status, PairStatus::CertifiedOrthogonal);
    let cert = c.certificate.unwrap();
    assert_eq!(cert.vanishing_index, 1);
    assert_eq!(cert.witness, TorusPoint::new(vec![rat(1, 4)]));

    let oracle = PairOracle::new(&pair.primal, 40).unwrap();
    let fam = max_orthogonal_family(&oracle, &sp.elements, 1_000_000).unwrap();
    assert_eq!((fam.size, fam.exhaustive), (8, true));

    let kernel = FourierKernel::new(&pair.primal).unwrap();
    let policy = TruncationPolicy::default();
    let x = 1.0 / 3.0;
    let only_zero = completeness_q(&kernel, &[vec![0.0]], &[x], &policy);
    let single = product_1d(4.0, &[0.0, 2.0], x, 60).norm_sqr();
    assert!((only_zero - single).abs() < 1e-12 && only_zero < 1.0);
    let big = spectrum_from_cycles(&pair.dual, &disc.wb_cycles, 8).unwrap();
    let elems: Vec<Vec<f64>> = big.elements.iter().map(|v| aifs_core::linalg::vec_to_f64(v)).collect();
    let q = completeness_q(&kernel, &elems, &[x], &policy);
    assert!((0.99..=1.0 + 1e-8).contains(&q), "{q}");
}

#[test]
fn propdiv_constructions() {
    let f = propdiv_family(6, 4, &[(1, 2), (1, 3)]).unwrap();
    assert_eq!(f.z0, vec![rat(1, 2), int(0), rat(1, 3), rat(2, 3)]);
    assert!(f.certified_zero);
    let f = propdiv_family(6, 3, &[(2, 2)]).unwrap();
    assert_eq!(f.z0, vec![rat(1, 2), int(0), rat(1, 2)]);
    assert!(f.certified_zero);
}

#[test]
fn pipeline_both_orientations() {
    use aifs_core::pipeline::{conjecture_probe, PipelineConfig, Verdict};
    let config = PipelineConfig { level: 6, ..PipelineConfig::default() };
    let cantor = check_hadamard(&m1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap();
    for t in [cantor, sierpinski_triple(3, 2).unwrap()] {
        let p = conjecture_probe(&t, &config).unwrap();
        assert_eq!((p.forward.verdict, p.swapped.verdict), (Verdict::SpectralEvidence, Verdict::SpectralEvidence));
    }
}
