//! The symbol `m_B`, the weight `W_B = |m_B|^2` and the Fourier transform of the
//! invariant measure as a truncated infinite product.

pub mod cyclotomic;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::ifs::AffineSystem;
use crate::linalg::{contraction_profile, norm2, to_f64, vec_to_f64, Rational, RationalMatrix, Vector};

/// Below this modulus a float factor is re-checked with the exact test.
pub(crate) const NEAR_ZERO: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymbolValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub exact_zero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub max_terms: usize,
    pub tail_bound: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { max_terms: 64, tail_bound: 1e-12 }
    }
}

impl TruncationPolicy {
    pub fn with_terms(max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(AifsError::InvalidSystem("max_terms must be at least 1".into()));
        }
        Ok(Self { max_terms, ..Self::default() })
    }
}

/// Truncated value of the infinite product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuHat {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub error_radius: f64,
    pub terms: usize,
    /// Index `n` of a factor certified to vanish exactly (rational inputs only).
    pub exact_zero_at: Option<usize>,
}

impl MuHat {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Floating-point evaluator for `m_B` and the product `prod_n m_B(S^{-n} x)`.
///
/// The tail estimate uses `|m_B(y) - 1| <= lip * ||y||` with
/// `lip = 2 pi sum_b w_b ||b||` and `sum_{j >= 1} ||S^{-j}|| <= gain`.
#[derive(Clone, Debug)]
pub struct FourierKernel {
    dim: usize,
    s_inv: Vec<f64>,
    digits: Vec<Vec<f64>>,
    weights: Vec<f64>,
    lip: f64,
    gain: f64,
}

impl FourierKernel {
    pub fn new(sys: &AffineSystem) -> Result<Self> {
        sys.ensure_expansive()?;
        let s_inv = sys.matrix_inverse().transpose();
        Self::from_parts(&s_inv, sys.digits(), sys.weights())
    }

    /// Kernel for an arbitrary contraction `S^{-1}` (rational entries),
    /// e.g. after a change of coordinates.
    pub fn from_parts(s_inv: &RationalMatrix, digits: &[Vector], weights: &[Rational]) -> Result<Self> {
        let dim = s_inv.dim();
        let a = s_inv.to_f64();
        let profile = contraction_profile(&a, dim)
            .ok_or(AifsError::NotExpansive { min_modulus: f64::NAN })?;
        let digits: Vec<Vec<f64>> = digits.iter().map(|b| vec_to_f64(b)).collect();
        let weights: Vec<f64> = weights.iter().map(to_f64).collect();
        let lip = 2.0 * PI * digits.iter().zip(&weights).map(|(b, w)| w * norm2(b)).sum::<f64>();
        Ok(Self { dim, s_inv: a, digits, weights, lip, gain: profile.series_bound })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self, x: &[f64]) -> Complex64 {
        self.digits
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| {
                let phase: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
                Complex64::from_polar(*w, 2.0 * PI * phase)
            })
            .sum()
    }

    pub fn apply_s_inv(&self, y: &[f64]) -> Vec<f64> {
        crate::linalg::mat_vec_f64(&self.s_inv, y, self.dim)
    }

    fn tail(&self, y: &[f64], partial: f64) -> f64 {
        let eps = self.lip * self.gain * norm2(y);
        partial * eps.exp_m1().min(2.0)
    }

    pub fn mu_hat(&self, x: &[f64], policy: &TruncationPolicy) -> MuHat {
        let mut y = x.to_vec();
        let mut value = Complex64::new(1.0, 0.0);
        let mut terms = 0;
        let mut radius = self.tail(&y, 1.0);
        if radius == 0.0 {
            return MuHat { value, error_radius: 0.0, terms: 0, exact_zero_at: None };
        }
        for n in 1..=policy.max_terms {
            y = self.apply_s_inv(&y);
            value *= self.m(&y);
            terms = n;
            let rel = self.tail(&y, 1.0);
            radius = value.norm() * rel;
            if rel < policy.tail_bound || value.norm() < 1e-300 {
                break;
            }
        }
        MuHat { value, error_radius: radius, terms, exact_zero_at: None }
    }
}

/// Floating-point `m_B(x)` using the system weights.
pub fn eval_mb(sys: &AffineSystem, x: &[f64]) -> SymbolValue {
    let value = sys
        .digits()
        .iter()
        .zip(sys.weights())
        .map(|(b, w)| {
            let phase: f64 = b.iter().zip(x).map(|(u, v)| to_f64(u) * v).sum();
            Complex64::from_polar(to_f64(w), 2.0 * PI * phase)
        })
        .sum();
    SymbolValue { value, exact_zero: false }
}

/// Decides `m_B(x) = 0` exactly for rational `x`.
pub fn eval_mb_exact(sys: &AffineSystem, x: &[Rational]) -> Result<SymbolValue> {
    if x.len() != sys.dim() {
        return Err(AifsError::Shape(format!("point of length {} in dimension {}", x.len(), sys.dim())));
    }
    let value = eval_mb(sys, &vec_to_f64(x)).value;
    let zero = mb_vanishes(sys.digits(), sys.weights(), x)?;
    Ok(SymbolValue { value: if zero { Complex64::zero() } else { value }, exact_zero: zero })
}

pub(crate) fn mb_vanishes(digits: &[Vector], weights: &[Rational], x: &[Rational]) -> Result<bool> {
    let phases: Vec<Rational> = digits.iter().map(|b| crate::linalg::dot(b, x)).collect();
    cyclotomic::phases_vanish(&phases, weights)
}

pub fn eval_wb(sys: &AffineSystem, x: &[f64]) -> f64 {
    eval_mb(sys, x).value.norm_sqr()
}

/// `max_x |sum_l W_B(S^{-1}(x + l)) - 1|` over the samples.
pub fn check_wb_normalization(sys_b: &AffineSystem, l: &[Vector], samples: &[Vec<f64>]) -> Result<f64> {
    if l.len() != sys_b.len() {
        return Err(AifsError::CardinalityMismatch { b: sys_b.len(), l: l.len() });
    }
    let d = sys_b.dim();
    let s_inv = sys_b.matrix_inverse().transpose().to_f64();
    let l: Vec<Vec<f64>> = l.iter().map(|v| vec_to_f64(v)).collect();
    let residual = samples
        .iter()
        .map(|x| {
            let total: f64 = l
                .iter()
                .map(|lv| {
                    let shifted: Vec<f64> = x.iter().zip(lv).map(|(a, b)| a + b).collect();
                    eval_wb(sys_b, &crate::linalg::mat_vec_f64(&s_inv, &shifted, d))
                })
                .sum();
            (total - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

pub fn eval_mu_hat(sys: &AffineSystem, x: &[f64], policy: &TruncationPolicy) -> Result<MuHat> {
    Ok(FourierKernel::new(sys)?.mu_hat(x, policy))
}

/// Like [`eval_mu_hat`] for a rational point, but factors that are numerically
/// tiny are re-checked exactly; a certified zero factor makes the value exactly 0.
pub fn eval_mu_hat_exact(
    sys: &AffineSystem,
    kernel: &FourierKernel,
    x: &[Rational],
    policy: &TruncationPolicy,
) -> Result<MuHat> {
    let s_inv = sys.matrix_inverse().transpose();
    let mut y: Vector = x.to_vec();
    let mut value = Complex64::new(1.0, 0.0);
    let mut radius = 0.0;
    let mut terms = 0;
    if y.iter().all(Zero::is_zero) {
        return Ok(MuHat { value, error_radius: 0.0, terms: 0, exact_zero_at: None });
    }
    for n in 1..=policy.max_terms {
        y = s_inv.mat_vec(&y);
        let yf = vec_to_f64(&y);
        let factor = kernel.m(&yf);
        terms = n;
        if factor.norm() < NEAR_ZERO {
            match mb_vanishes(sys.digits(), sys.weights(), &y) {
                Ok(true) => {
                    return Ok(MuHat { value: Complex64::zero(), error_radius: 0.0, terms: n, exact_zero_at: Some(n) })
                }
                Ok(false) => {}
                Err(e) if e.is_budget() => {}
                Err(e) => return Err(e),
            }
        }
        value *= factor;
        let rel = kernel.tail(&yf, 1.0);
        radius = value.norm() * rel;
        if rel < policy.tail_bound {
            break;
        }
    }
    Ok(MuHat { value, error_radius: radius, terms, exact_zero_at: None })
}

/// `|mu(x) - m_B(S^{-1} x) mu(S^{-1} x)|` under the same policy.
pub fn invariance_residual(sys: &AffineSystem, x: &[f64], policy: &TruncationPolicy) -> Result<f64> {
    let k = FourierKernel::new(sys)?;
    let y = k.apply_s_inv(x);
    let lhs = k.mu_hat(x, policy).value;
    let rhs = k.m(&y) * k.mu_hat(&y, policy).value;
    Ok((lhs - rhs).norm())
}

/// Kernel for the conjugated system `R_V = V R V^{-1}`, `B_V = V B`.
pub fn conjugated_kernel(sys: &AffineSystem, v: &RationalMatrix) -> Result<FourierKernel> {
    let v_inv = v.inverse()?;
    let r = sys.matrix().to_rational();
    let r_v = v.mul(&r).mul(&v_inv);
    let s_v_inv = r_v.transpose().inverse()?;
    let digits: Vec<Vector> = sys.digits().iter().map(|b| v.mat_vec(b)).collect();
    FourierKernel::from_parts(&s_v_inv, &digits, sys.weights())
}
