//! Orthogonality certificates, maximal orthogonal families and the Parseval
//! sum `Q(x) = sum_lambda |mu_hat(x + lambda)|^2`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::clique::{max_clique, BitGraph};
use crate::error::{AifsError, Result};
use crate::fourier::{mb_vanishes, FourierKernel, TruncationPolicy, NEAR_ZERO};
use crate::ifs::AffineSystem;
use crate::linalg::{common_denominator, neg, ser_vectors, sub, vec_to_f64, Rational, RationalMatrix, Vector};
use crate::sampling::kronecker;
use crate::spectrum::SpectrumSet;
use crate::torus::TorusPoint;

pub const DEFAULT_N_MAX: usize = 40;
/// Largest candidate set accepted by [`max_orthogonal_family`].
pub const GRID_CAP: usize = 20_000;
/// Largest set accepted by [`certify_family`].
pub const FAMILY_CAP: usize = 4096;
pub const CLIQUE_NODE_BUDGET: u64 = 5_000_000;

pub const Q_LOWER: f64 = 0.99;
pub const Q_SLACK: f64 = 1e-8;
pub const Q_SAMPLES: usize = 32;

fn ser_pair<S: serde::Serializer>(p: &(Vector, Vector), s: S) -> std::result::Result<S::Ok, S::Error> {
    ser_vectors(&[p.0.clone(), p.1.clone()], s)
}

/// `m_B` vanishes exactly at `witness = S^{-n}(lambda - lambda')`, so
/// `mu_hat(lambda - lambda') = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityCertificate {
    #[serde(serialize_with = "ser_pair")]
    pub pair: (Vector, Vector),
    pub vanishing_index: usize,
    pub witness: TorusPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    CertifiedOrthogonal,
    /// No certificate and the truncated transform is bounded away from 0.
    NumericallyNonzero,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub status: PairStatus,
    pub certificate: Option<OrthogonalityCertificate>,
    /// `|mu_hat(lambda - lambda')|`, only computed without a certificate.
    pub numeric_abs: Option<f64>,
}

/// Exact zero-chain test for `mu_hat_B(lambda - lambda') = 0`.
#[derive(Clone, Debug)]
pub struct PairOracle {
    sys: AffineSystem,
    kernel: FourierKernel,
    powers: Vec<RationalMatrix>,
    pub n_max: usize,
    pub policy: TruncationPolicy,
}

impl PairOracle {
    pub fn new(sys: &AffineSystem, n_max: usize) -> Result<Self> {
        let kernel = FourierKernel::new(sys)?;
        let s_inv = sys.matrix_inverse().transpose();
        let mut powers = Vec::with_capacity(n_max);
        let mut cur = s_inv.clone();
        for _ in 0..n_max {
            powers.push(cur.clone());
            cur = cur.mul(&s_inv);
        }
        Ok(Self { sys: sys.clone(), kernel, powers, n_max, policy: TruncationPolicy::default() })
    }

    pub fn system(&self) -> &AffineSystem {
        &self.sys
    }

    pub fn kernel(&self) -> &FourierKernel {
        &self.kernel
    }

    /// Smallest `n <= n_max` with `m_B(S^{-n} x) = 0` exactly, and that point.
    pub fn vanishing_index(&self, x: &[Rational]) -> Option<(usize, Vector)> {
        if x.iter().all(Zero::is_zero) {
            return None;
        }
        let mut y = vec_to_f64(x);
        for n in 1..=self.n_max {
            y = self.kernel.apply_s_inv(&y);
            if self.kernel.m(&y).norm() >= NEAR_ZERO {
                continue;
            }
            let exact = self.powers[n - 1].mat_vec(x);
            if let Ok(true) = mb_vanishes(self.sys.digits(), self.sys.weights(), &exact) {
                return Some((n, exact));
            }
        }
        None
    }

    /// Tests `mu_hat(b - a) = 0`; the witness is `S^{-n}(b - a)`.
    pub fn check(&self, a: &[Rational], b: &[Rational]) -> PairCheck {
        let diff = sub(b, a);
        if let Some((n, w)) = self.vanishing_index(&diff) {
            let certificate = OrthogonalityCertificate {
                pair: (a.to_vec(), b.to_vec()),
                vanishing_index: n,
                witness: TorusPoint::new(w),
            };
            return PairCheck { status: PairStatus::CertifiedOrthogonal, certificate: Some(certificate), numeric_abs: None };
        }
        let mu = self.kernel.mu_hat(&vec_to_f64(&diff), &self.policy);
        let status = if mu.abs() > mu.error_radius + 1e-9 { PairStatus::NumericallyNonzero } else { PairStatus::Undetermined };
        PairCheck { status, certificate: None, numeric_abs: Some(mu.abs()) }
    }
}

pub fn orthogonal_pair(sys: &AffineSystem, a: &[Rational], b: &[Rational], n_max: usize) -> Result<PairCheck> {
    Ok(PairOracle::new(sys, n_max)?.check(a, b))
}

/// Representative of `{x, -x}`.
fn sign_canonical(x: Vector) -> Vector {
    let n = neg(&x);
    if n > x {
        n
    } else {
        x
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCertification {
    pub elements: usize,
    pub pairs: usize,
    /// Differences up to sign; `mu_hat(-x)` is the conjugate of `mu_hat(x)`.
    pub distinct_differences: usize,
    pub certified: usize,
    pub numerically_nonzero: usize,
    pub undetermined: usize,
    pub max_vanishing_index: usize,
    #[serde(serialize_with = "ser_vectors")]
    pub uncertified_sample: Vec<Vector>,
}

impl FamilyCertification {
    pub fn all_certified(&self) -> bool {
        self.certified == self.distinct_differences
    }

    pub fn uncertified(&self) -> usize {
        self.distinct_differences - self.certified
    }
}

/// Certifies every pair of `elements`, working on distinct differences.
pub fn certify_family(oracle: &PairOracle, elements: &[Vector]) -> Result<FamilyCertification> {
    if elements.len() > FAMILY_CAP {
        return Err(AifsError::BudgetExceeded(format!("{} elements exceed the family cap {FAMILY_CAP}", elements.len())));
    }
    let mut diffs: HashSet<Vector> = HashSet::new();
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            diffs.insert(sign_canonical(sub(a, b)));
        }
    }
    let mut diffs: Vec<Vector> = diffs.into_iter().collect();
    diffs.sort();
    let results: Vec<(Option<usize>, PairStatus)> = diffs
        .par_iter()
        .map(|x| match oracle.vanishing_index(x) {
            Some((n, _)) => (Some(n), PairStatus::CertifiedOrthogonal),
            None => {
                let mu = oracle.kernel.mu_hat(&vec_to_f64(x), &oracle.policy);
                let st = if mu.abs() > mu.error_radius + 1e-9 { PairStatus::NumericallyNonzero } else { PairStatus::Undetermined };
                (None, st)
            }
        })
        .collect();
    let count = |s: PairStatus| results.iter().filter(|r| r.1 == s).count();
    let uncertified_sample = diffs
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.0.is_none())
        .take(8)
        .map(|(x, _)| x.clone())
        .collect();
    Ok(FamilyCertification {
        elements: elements.len(),
        pairs: elements.len() * elements.len().saturating_sub(1) / 2,
        distinct_differences: diffs.len(),
        certified: count(PairStatus::CertifiedOrthogonal),
        numerically_nonzero: count(PairStatus::NumericallyNonzero),
        undetermined: count(PairStatus::Undetermined),
        max_vanishing_index: results.iter().filter_map(|r| r.0).max().unwrap_or(0),
        uncertified_sample,
    })
}

/// `(1/q) Z^d` intersected with the cube `[lo, hi]^d`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateGrid {
    pub dim: usize,
    pub lo: i64,
    pub hi: i64,
    pub denominator: i64,
}

impl CandidateGrid {
    pub fn new(dim: usize, lo: i64, hi: i64, denominator: i64) -> Result<Self> {
        if lo > hi || denominator < 1 || dim == 0 {
            return Err(AifsError::InvalidSystem(format!("bad grid [{lo}, {hi}]^{dim} / {denominator}")));
        }
        Ok(Self { dim, lo, hi, denominator })
    }

    pub fn size(&self) -> f64 {
        (((self.hi - self.lo) * self.denominator + 1) as f64).powi(self.dim as i32)
    }

    pub fn points(&self, cap: usize) -> Result<Vec<Vector>> {
        if self.size() > cap as f64 {
            return Err(AifsError::BudgetExceeded(format!("grid of {:.0} points exceeds cap {cap}", self.size())));
        }
        let q = self.denominator;
        let axis: Vec<Rational> = (self.lo * q..=self.hi * q).map(|k| Rational::new(k.into(), q.into())).collect();
        let mut out: Vec<Vector> = vec![Vec::new()];
        for _ in 0..self.dim {
            out = out.into_iter().flat_map(|p| axis.iter().map(move |a| {
                let mut v = p.clone();
                v.push(a.clone());
                v
            })).collect();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyResult {
    #[serde(serialize_with = "ser_vectors")]
    pub family: Vec<Vector>,
    pub size: usize,
    /// The search finished; otherwise `size` is a lower bound only.
    pub exhaustive: bool,
    pub candidates: usize,
    pub certified_edges: usize,
}

/// Largest pairwise-certified subset of `candidates` (maximum clique of the
/// certified-orthogonality graph).
pub fn max_orthogonal_family(oracle: &PairOracle, candidates: &[Vector], node_budget: u64) -> Result<FamilyResult> {
    let n = candidates.len();
    if n > GRID_CAP {
        return Err(AifsError::BudgetExceeded(format!("{n} candidates exceed the grid cap {GRID_CAP}")));
    }
    let q = common_denominator(candidates.iter().flatten());
    let qr = Rational::from_integer(q.clone());
    let scaled: Vec<Vec<i64>> = candidates
        .iter()
        .map(|v| v.iter().map(|x| (x * &qr).to_integer().to_i64()).collect::<Option<Vec<i64>>>())
        .collect::<Option<_>>()
        .ok_or_else(|| AifsError::Unsupported("candidate coordinates overflow i64".into()))?;
    let key = |i: usize, j: usize| -> Vec<i64> {
        let d: Vec<i64> = scaled[i].iter().zip(&scaled[j]).map(|(a, b)| a - b).collect();
        let m: Vec<i64> = d.iter().map(|x| -x).collect();
        if m > d {
            m
        } else {
            d
        }
    };
    let mut keys: HashSet<Vec<i64>> = HashSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            keys.insert(key(i, j));
        }
    }
    let keys: Vec<Vec<i64>> = keys.into_iter().collect();
    let q_big: BigInt = q;
    let verdicts: HashMap<Vec<i64>, bool> = keys
        .into_par_iter()
        .map(|k| {
            let x: Vector = k.iter().map(|&c| Rational::new(c.into(), q_big.clone())).collect();
            let ok = oracle.vanishing_index(&x).is_some();
            (k, ok)
        })
        .collect();
    let mut g = BitGraph::new(n);
    let mut edges = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if verdicts[&key(i, j)] {
                g.add_edge(i, j);
                edges += 1;
            }
        }
    }
    let c = max_clique(&g, node_budget);
    let family: Vec<Vector> = c.members.iter().map(|&i| candidates[i].clone()).collect();
    Ok(FamilyResult { size: family.len(), family, exhaustive: c.exhaustive, candidates: n, certified_edges: edges })
}

/// Truncated Parseval sum at `x`.
pub fn completeness_q(kernel: &FourierKernel, elements: &[Vec<f64>], x: &[f64], policy: &TruncationPolicy) -> f64 {
    elements
        .par_iter()
        .map(|l| {
            let y: Vec<f64> = x.iter().zip(l).map(|(a, b)| a + b).collect();
            kernel.mu_hat(&y, policy).value.norm_sqr()
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub level: usize,
    pub terms: usize,
    pub spectrum_size: usize,
    pub sample_points: Vec<Vec<f64>>,
    pub q_values: Vec<f64>,
    pub q_min: f64,
    pub q_max: f64,
    pub q_mean: f64,
}

impl CompletenessReport {
    pub fn within(&self, lower: f64, slack: f64) -> bool {
        self.q_min >= lower && self.q_max <= 1.0 + slack
    }
}

/// Standard sample points in `[0,1)^d`.
pub fn sample_points(d: usize, count: usize) -> Vec<Vec<f64>> {
    kronecker(d, count)
}

pub fn completeness_report(
    sys: &AffineSystem,
    spectrum: &SpectrumSet,
    points: &[Vec<f64>],
    policy: &TruncationPolicy,
) -> Result<CompletenessReport> {
    let kernel = FourierKernel::new(sys)?;
    let elems: Vec<Vec<f64>> = spectrum.elements.iter().map(|v| vec_to_f64(v)).collect();
    let q_values: Vec<f64> = points.iter().map(|x| completeness_q(&kernel, &elems, x, policy)).collect();
    let q_min = q_values.iter().copied().fold(f64::INFINITY, f64::min);
    let q_max = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let q_mean = q_values.iter().sum::<f64>() / q_values.len().max(1) as f64;
    Ok(CompletenessReport {
        level: spectrum.level,
        terms: policy.max_terms,
        spectrum_size: elems.len(),
        sample_points: points.to_vec(),
        q_values,
        q_min,
        q_max,
        q_mean,
    })
}
