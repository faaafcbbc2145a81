//! Affine systems `(R, B, weights)`, the maps `tau_b` and attractor approximations.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::linalg::{
    contraction_profile, int, mat_mul_f64, mat_vec_f64, to_f64, vec_to_f64, ExpansiveIntMatrix,
    Rational, RationalMatrix, Vector,
};

/// Burn-in for the chaos game.
pub const CHAOS_BURN_IN: usize = 32;

/// `(R, B, weights)` with precomputed `R^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSystem {
    r: ExpansiveIntMatrix,
    r_inv: RationalMatrix,
    digits: Vec<Vector>,
    weights: Vec<Rational>,
}

impl AffineSystem {
    /// Validates digits (distinct, right dimension) and weights (positive, sum 1).
    /// `weights = None` means uniform.
    pub fn new(r: ExpansiveIntMatrix, digits: Vec<Vector>, weights: Option<Vec<Rational>>) -> Result<Self> {
        let d = r.dim();
        if digits.is_empty() {
            return Err(AifsError::InvalidSystem("digit set is empty".into()));
        }
        if let Some(bad) = digits.iter().find(|b| b.len() != d) {
            return Err(AifsError::Shape(format!("digit of length {} in dimension {d}", bad.len())));
        }
        let mut seen = HashSet::new();
        for b in &digits {
            if !seen.insert(b.clone()) {
                return Err(AifsError::InvalidSystem("digits must be pairwise distinct".into()));
            }
        }
        let n = digits.len();
        let weights = match weights {
            None => vec![Rational::new(1.into(), (n as i64).into()); n],
            Some(w) => {
                if w.len() != n {
                    return Err(AifsError::InvalidSystem(format!("{} weights for {n} digits", w.len())));
                }
                if w.iter().any(|p| !p.is_positive()) {
                    return Err(AifsError::InvalidSystem("weights must be positive".into()));
                }
                if w.iter().sum::<Rational>() != Rational::one() {
                    return Err(AifsError::InvalidSystem("weights must sum to 1".into()));
                }
                w
            }
        };
        let r_inv = r.inverse()?;
        Ok(Self { r, r_inv, digits, weights })
    }

    pub fn uniform(r: ExpansiveIntMatrix, digits: Vec<Vector>) -> Result<Self> {
        Self::new(r, digits, None)
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn matrix(&self) -> &ExpansiveIntMatrix {
        &self.r
    }

    pub fn matrix_inverse(&self) -> &RationalMatrix {
        &self.r_inv
    }

    pub fn digits(&self) -> &[Vector] {
        &self.digits
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn has_integer_digits(&self) -> bool {
        self.digits.iter().all(|b| b.iter().all(|c| c.is_integer()))
    }

    pub fn contains_zero_digit(&self) -> bool {
        self.digits.iter().any(|b| b.iter().all(Zero::is_zero))
    }

    /// `{0, e_1, ..., e_d}` in any order.
    pub fn is_standard_simplex(&self) -> bool {
        let d = self.dim();
        if self.len() != d + 1 {
            return false;
        }
        let mut expected: HashSet<Vector> = HashSet::new();
        expected.insert(vec![Rational::zero(); d]);
        for i in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            expected.insert(e);
        }
        self.digits.iter().all(|b| expected.contains(b))
    }

    pub fn ensure_expansive(&self) -> Result<()> {
        if self.r.is_certified() || self.r.check_expansive()? {
            Ok(())
        } else {
            Err(AifsError::NotExpansive { min_modulus: self.r.min_eigen_modulus() })
        }
    }

    fn digit(&self, index: usize) -> Result<&Vector> {
        self.digits.get(index).ok_or(AifsError::IndexOutOfRange { index, len: self.digits.len() })
    }

    /// `tau_b(x) = R^{-1}(x + b)` for `b = digits[index]`, exactly.
    pub fn tau(&self, index: usize, x: &[Rational]) -> Result<Vector> {
        let b = self.digit(index)?;
        if x.len() != self.dim() {
            return Err(AifsError::Shape(format!("point of length {} in dimension {}", x.len(), self.dim())));
        }
        let shifted: Vector = x.iter().zip(b).map(|(a, c)| a + c).collect();
        Ok(self.r_inv.mat_vec(&shifted))
    }

    /// Fixed point of `tau_b`, i.e. the solution of `(R - I) x = b`.
    pub fn fixed_point(&self, index: usize) -> Result<Vector> {
        let b = self.digit(index)?;
        let d = self.dim();
        let mut rows = self.r.to_rational().rows();
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] -= Rational::one();
        }
        RationalMatrix::new(rows)?.solve(b).map_err(|_| {
            AifsError::InvalidSystem(format!("R - I is singular in dimension {d}, tau_b has no unique fixed point"))
        })
    }

    /// Deterministic or chaos-game approximation of the attractor.
    pub fn attractor(&self, depth: usize, mode: AttractorMode) -> Result<AttractorCloud> {
        self.ensure_expansive()?;
        match mode {
            AttractorMode::Deterministic => self.attractor_words(depth),
            AttractorMode::ChaosGame { points, seed } => self.attractor_chaos(depth, points, seed),
        }
    }

    fn attractor_words(&self, depth: usize) -> Result<AttractorCloud> {
        let total = (self.len() as f64).powi(depth as i32);
        if total > 2e7 {
            return Err(AifsError::BudgetExceeded(format!("{total:.0} attractor points requested")));
        }
        let mut level: Vec<Vector> = vec![self.fixed_point(0)?];
        for _ in 0..depth {
            // level n+1 = union over b of tau_b(level n), grouped by b
            let next: Vec<Vec<Vector>> = (0..self.len())
                .into_par_iter()
                .map(|i| level.iter().map(|x| self.tau(i, x)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            level = next.into_iter().flatten().collect();
        }
        let points = level.iter().map(|x| vec_to_f64(x)).collect();
        Ok(AttractorCloud { depth, mode: AttractorMode::Deterministic, points, exact: Some(level) })
    }

    fn attractor_chaos(&self, depth: usize, count: usize, seed: u64) -> Result<AttractorCloud> {
        let d = self.dim();
        let inv = self.r_inv.to_f64();
        let digits: Vec<Vec<f64>> = self.digits.iter().map(|b| vec_to_f64(b)).collect();
        let dist = WeightedIndex::new(self.weights_f64())
            .map_err(|e| AifsError::InvalidSystem(format!("weights: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec_to_f64(&self.fixed_point(0)?);
        let step = |x: &mut Vec<f64>, rng: &mut ChaCha8Rng| {
            let b = &digits[dist.sample(rng)];
            let shifted: Vec<f64> = x.iter().zip(b).map(|(a, c)| a + c).collect();
            *x = mat_vec_f64(&inv, &shifted, d);
        };
        for _ in 0..CHAOS_BURN_IN {
            step(&mut x, &mut rng);
        }
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            step(&mut x, &mut rng);
            points.push(x.clone());
        }
        Ok(AttractorCloud { depth, mode: AttractorMode::ChaosGame { points: count, seed }, points, exact: None })
    }

    /// Axis-aligned box certified to contain the attractor.
    ///
    /// The attractor is `{ sum_{j >= 1} A^j b_j }` with `A = R^{-1}`; each
    /// coordinate is bounded by the per-term extremes over the digits plus a
    /// tail controlled by the contraction profile of `A`.
    pub fn bounding_box(&self) -> Result<BoundingBox> {
        self.ensure_expansive()?;
        let d = self.dim();
        let a = self.r_inv.to_f64();
        let profile = contraction_profile(&a, d)
            .ok_or_else(|| AifsError::InvalidSystem("could not establish a contraction constant".into()))?;
        let digits: Vec<Vec<f64>> = self.digits.iter().map(|b| vec_to_f64(b)).collect();
        let max_digit = digits.iter().map(|b| crate::linalg::norm2(b)).fold(0.0, f64::max);
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        let mut power = a.clone();
        let terms = 200;
        for _ in 0..terms {
            for i in 0..d {
                let coords = digits.iter().map(|b| mat_vec_f64(&power, b, d)[i]);
                let (mn, mx) = coords.fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| (mn.min(v), mx.max(v)));
                lo[i] += mn;
                hi[i] += mx;
            }
            power = mat_mul_f64(&power, &a, d);
        }
        // sum_{j > terms} ||A^j|| <= ||A^terms|| * sum_{m >= 1} ||A^m||
        let tail_norm = crate::linalg::operator_norm(&power, d) * 1.01 * profile.series_bound * max_digit;
        for i in 0..d {
            let width = hi[i] - lo[i] + 2.0 * tail_norm;
            let pad = 0.01 * width + tail_norm + 1e-9;
            lo[i] -= pad;
            hi[i] += pad;
        }
        Ok(BoundingBox { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AttractorMode {
    Deterministic,
    ChaosGame { points: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractorCloud {
    pub depth: usize,
    pub mode: AttractorMode,
    pub points: Vec<Vec<f64>>,
    /// Exact coordinates, deterministic mode only.
    #[serde(skip)]
    pub exact: Option<Vec<Vector>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn contains_exact(&self, x: &[Rational]) -> bool {
        self.contains(&vec_to_f64(x))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// One-dimensional digits from integers.
pub fn scalar_digits(values: &[i64]) -> Vec<Vector> {
    values.iter().map(|&v| vec![int(v)]).collect()
}

/// `{0, e_1, ..., e_d}`.
pub fn standard_simplex_digits(d: usize) -> Vec<Vector> {
    let mut out = vec![vec![Rational::zero(); d]];
    for i in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[i] = Rational::one();
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn cantor4() -> AffineSystem {
        AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![4]]).unwrap(), scalar_digits(&[0, 2])).unwrap()
    }

    #[test]
    fn tau_examples() {
        let sys = cantor4();
        assert_eq!(sys.tau(0, &[int(0)]).unwrap(), vec![int(0)]);
        assert_eq!(sys.tau(1, &[rat(2, 3)]).unwrap(), vec![rat(2, 3)]);
        assert!(matches!(sys.tau(2, &[int(0)]), Err(AifsError::IndexOutOfRange { index: 2, len: 2 })));

        let sys3 = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 3).unwrap(), standard_simplex_digits(3)).unwrap();
        let e1 = sys3.digits().iter().position(|b| b[0] == int(1)).unwrap();
        assert_eq!(sys3.tau(e1, &[int(1), int(1), int(1)]).unwrap(), vec![int(1), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn deterministic_attractor_small_depths() {
        let sys = cantor4();
        let c0 = sys.attractor(0, AttractorMode::Deterministic).unwrap();
        assert_eq!(c0.exact.unwrap(), vec![vec![int(0)]]);
        let c1 = sys.attractor(1, AttractorMode::Deterministic).unwrap();
        assert_eq!(c1.exact.unwrap(), vec![vec![int(0)], vec![rat(1, 2)]]);

        let sier = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 2).unwrap(), standard_simplex_digits(2)).unwrap();
        let c2 = sier.attractor(2, AttractorMode::Deterministic).unwrap();
        assert_eq!(c2.points.len(), 9);
        assert!(c2.points.iter().all(|p| p.iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn chaos_game_is_reproducible() {
        let sys = cantor4();
        let mode = AttractorMode::ChaosGame { points: 50, seed: 7 };
        let a = sys.attractor(0, mode).unwrap();
        let b = sys.attractor(0, mode).unwrap();
        assert_eq!(a.points, b.points);
        let bx = sys.bounding_box().unwrap();
        assert!(a.points.iter().all(|p| bx.contains(p)));
    }

    #[test]
    fn non_expansive_rejected() {
        let sys = AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![1, 0], vec![0, 2]]).unwrap(), standard_simplex_digits(2));
        let sys = sys.unwrap();
        assert!(matches!(sys.attractor(1, AttractorMode::Deterministic), Err(AifsError::NotExpansive { .. })));
    }

    #[test]
    fn bounding_boxes() {
        let bx = cantor4().bounding_box().unwrap();
        assert!(bx.lo[0] <= 0.0 && bx.hi[0] >= 2.0 / 3.0 && bx.hi[0] < 0.7);

        let origin = AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![3]]).unwrap(), scalar_digits(&[0])).unwrap();
        let bx = origin.bounding_box().unwrap();
        assert!(bx.lo[0] <= 0.0 && bx.hi[0] >= 0.0 && bx.hi[0] < 1e-6);

        let l = vec![
            vec![int(0), int(0), int(0)],
            vec![int(1), int(1), int(0)],
            vec![int(0), int(1), int(1)],
            vec![int(1), int(0), int(1)],
        ];
        let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 3).unwrap(), l).unwrap();
        let bx = sys.bounding_box().unwrap();
        for i in 0..3 {
            assert!(bx.lo[i] <= 0.0 && bx.hi[i] >= 1.0 && bx.hi[i] < 1.1);
        }
    }

    #[test]
    fn validation() {
        let r = ExpansiveIntMatrix::new(vec![vec![2]]).unwrap();
        assert!(AffineSystem::uniform(r.clone(), scalar_digits(&[0, 0])).is_err());
        assert!(AffineSystem::new(r.clone(), scalar_digits(&[0, 1]), Some(vec![rat(1, 2), rat(1, 3)])).is_err());
        assert!(AffineSystem::new(r.clone(), scalar_digits(&[0, 1]), Some(vec![rat(0, 1), rat(1, 1)])).is_err());
        assert!(AffineSystem::new(r, scalar_digits(&[0, 1]), Some(vec![rat(1, 3), rat(2, 3)])).is_ok());
    }
}
