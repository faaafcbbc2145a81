//! End-to-end analysis of a Hadamard triple: cycles, spectrum, orthogonality
//! certificates and Parseval evidence.

use serde::{Deserialize, Serialize};

use crate::cycles::{discover_cycles, CycleDiscovery, MAX_PERIOD};
use crate::error::Result;
use crate::fourier::{conjugated_kernel, FourierKernel, TruncationPolicy};
use crate::hadamard::{make_dual_pair, HadamardTriple};
use crate::ifs::AffineSystem;
use crate::linalg::RationalMatrix;
use crate::spectrum::{spectrum_from_cycles, spectrum_size_estimate};
use crate::verify::{
    certify_family, completeness_report, sample_points, CompletenessReport, FamilyCertification, PairOracle,
    DEFAULT_N_MAX, FAMILY_CAP, Q_LOWER, Q_SAMPLES, Q_SLACK,
};

#[derive(Clone, Debug, Serialize)]
pub struct PipelineConfig {
    /// Upper limit on the spectrum level used for the Parseval sum.
    pub level: usize,
    /// Upper limit on the level whose pairs are certified.
    pub ortho_level: usize,
    /// Upper limit on the number of spectrum elements in the Parseval sum.
    pub q_budget: usize,
    pub samples: usize,
    pub n_max: usize,
    pub max_period: usize,
    pub policy: TruncationPolicy,
    pub q_lower: f64,
    pub q_slack: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            level: 8,
            ortho_level: 4,
            q_budget: 70_000,
            samples: Q_SAMPLES,
            n_max: DEFAULT_N_MAX,
            max_period: MAX_PERIOD,
            policy: TruncationPolicy::default(),
            q_lower: Q_LOWER,
            q_slack: Q_SLACK,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// All pairs certified and `Q` within `[q_lower, 1 + q_slack]` at every sample.
    SpectralEvidence,
    /// Orthogonal, but the Parseval sum falls short somewhere.
    IncompleteEvidence,
    /// Some pair lacks an orthogonality certificate.
    OrthogonalityUnconfirmed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub triple: HadamardTriple,
    pub cycles: CycleDiscovery,
    pub ortho_level: usize,
    pub orthogonality: FamilyCertification,
    pub completeness: CompletenessReport,
    pub verdict: Verdict,
}

fn largest_level(est: impl Fn(usize) -> f64, max_level: usize, budget: usize) -> usize {
    (0..=max_level).rev().find(|&l| est(l) <= budget as f64).unwrap_or(0)
}

pub fn analyze_triple(triple: &HadamardTriple, config: &PipelineConfig) -> Result<SpectralReport> {
    let pair = make_dual_pair(triple)?;
    let cycles = discover_cycles(triple, config.max_period)?;
    let n = pair.dual.len();
    let est = |l: usize| spectrum_size_estimate(&cycles.wb_cycles, n, l);

    let q_level = largest_level(est, config.level, config.q_budget);
    let ortho_level = largest_level(est, config.ortho_level.min(q_level), FAMILY_CAP);

    let oracle = PairOracle::new(&pair.primal, config.n_max)?;
    let small = spectrum_from_cycles(&pair.dual, &cycles.wb_cycles, ortho_level)?;
    let orthogonality = certify_family(&oracle, &small.elements)?;

    let big = spectrum_from_cycles(&pair.dual, &cycles.wb_cycles, q_level)?;
    let points = sample_points(triple.matrix().dim(), config.samples);
    let completeness = completeness_report(&pair.primal, &big, &points, &config.policy)?;

    let verdict = if !orthogonality.all_certified() {
        Verdict::OrthogonalityUnconfirmed
    } else if completeness.within(config.q_lower, config.q_slack) {
        Verdict::SpectralEvidence
    } else {
        Verdict::IncompleteEvidence
    };
    Ok(SpectralReport { triple: triple.clone(), cycles, ortho_level, orthogonality, completeness, verdict })
}

pub const PROBE_LABEL: &str = "experimental: numerical evidence only, not a proof";

/// Runs the pipeline on `(R, B, L)` and on `(R^T, L, B)`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureProbe {
    pub label: &'static str,
    pub forward: SpectralReport,
    pub swapped: SpectralReport,
    pub agree: bool,
}

pub fn conjecture_probe(triple: &HadamardTriple, config: &PipelineConfig) -> Result<ConjectureProbe> {
    triple.require_certified()?;
    let swapped_triple = triple.swapped()?;
    swapped_triple.require_certified()?;
    let forward = analyze_triple(triple, config)?;
    let swapped = analyze_triple(&swapped_triple, config)?;
    let agree = forward.verdict == swapped.verdict;
    Ok(ConjectureProbe { label: PROBE_LABEL, forward, swapped, agree })
}

/// `|mu_hat_V(x) - mu_hat_B(V^T x)|` where `mu_V` is the invariant measure of
/// `R_V = V R V^{-1}`, `B_V = V B`.
pub fn covariance_residual(sys: &AffineSystem, v: &RationalMatrix, x: &[f64], policy: &TruncationPolicy) -> Result<f64> {
    let kv = conjugated_kernel(sys, v)?;
    let kb = FourierKernel::new(sys)?;
    let vt = v.transpose().to_f64();
    let d = sys.dim();
    let y = crate::linalg::mat_vec_f64(&vt, x, d);
    Ok((kv.mu_hat(x, policy).value - kb.mu_hat(&y, policy).value).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::check_hadamard;
    use crate::ifs::scalar_digits;
    use crate::linalg::{int, rat, ExpansiveIntMatrix};
    use crate::spectrum::sierpinski_triple;

    fn cantor4() -> HadamardTriple {
        check_hadamard(&ExpansiveIntMatrix::new(vec![vec![4]]).unwrap(), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap()
    }

    #[test]
    fn cantor4_is_spectral_evidence() {
        let r = analyze_triple(&cantor4(), &PipelineConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SpectralEvidence, "{:?}", r.completeness.q_min);
        assert_eq!(r.completeness.level, 8);
    }

    #[test]
    fn probe_both_orientations() {
        let p = conjecture_probe(&cantor4(), &PipelineConfig::default()).unwrap();
        assert!(p.agree);
        assert_eq!(p.swapped.verdict, Verdict::SpectralEvidence);
        let p = conjecture_probe(&sierpinski_triple(3, 2).unwrap(), &PipelineConfig::default()).unwrap();
        assert_eq!(p.forward.verdict, Verdict::SpectralEvidence, "{:?}", p.forward.completeness.q_min);
        assert_eq!(p.swapped.verdict, Verdict::SpectralEvidence, "{:?}", p.swapped.completeness.q_min);
    }

    #[test]
    fn probe_refuses_broken_triple() {
        let bad = check_hadamard(&ExpansiveIntMatrix::new(vec![vec![4]]).unwrap(), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 2])).unwrap();
        assert!(conjecture_probe(&bad, &PipelineConfig::default()).is_err());
    }

    #[test]
    fn covariance_for_a_shear() {
        let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(3, 2).unwrap(), crate::ifs::standard_simplex_digits(2)).unwrap();
        let v = RationalMatrix::new(vec![vec![int(1), rat(1, 2)], vec![int(0), int(2)]]).unwrap();
        let r = covariance_residual(&sys, &v, &[0.3, -1.7], &TruncationPolicy::default()).unwrap();
        assert!(r < 1e-9, "{r}");
    }
}
