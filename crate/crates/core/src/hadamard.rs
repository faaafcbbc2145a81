//! Hadamard triples `(R, B, L)` and the dual pair `(R, B)`, `(S, L)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::fourier::cyclotomic::phases_vanish;
use crate::ifs::AffineSystem;
use crate::linalg::{dot, format_rational, int, sub, ExpansiveIntMatrix, Rational, Vector};

/// Max-norm tolerance on `H* H - I`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactCertificate {
    /// Every pair of distinct columns is a vanishing sum of roots of unity.
    Unitary,
    /// Some pair of columns has a non-vanishing inner product.
    NotUnitary,
    /// A denominator exceeded the exact cap.
    Unavailable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HadamardTriple {
    r: ExpansiveIntMatrix,
    b: Vec<Vector>,
    l: Vec<Vector>,
    pub unitarity_defect: f64,
    pub exact: ExactCertificate,
    pub warnings: Vec<String>,
}

impl HadamardTriple {
    pub fn matrix(&self) -> &ExpansiveIntMatrix {
        &self.r
    }

    pub fn b(&self) -> &[Vector] {
        &self.b
    }

    pub fn l(&self) -> &[Vector] {
        &self.l
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn is_certified(&self) -> bool {
        self.unitarity_defect < UNITARITY_TOL && self.exact != ExactCertificate::NotUnitary
    }

    /// Errors unless certified.
    pub fn require_certified(&self) -> Result<&Self> {
        if self.is_certified() {
            Ok(self)
        } else {
            Err(AifsError::NotCertified { defect: self.unitarity_defect })
        }
    }

    /// `(R^T, L, B)`, the triple with the roles of the digit sets exchanged.
    pub fn swapped(&self) -> Result<HadamardTriple> {
        check_hadamard(&self.r.transpose(), &self.l, &self.b)
    }
}

impl Serialize for HadamardTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let fmt = |v: &[Vector]| -> Vec<Vec<String>> { v.iter().map(|x| x.iter().map(format_rational).collect()).collect() };
        let mut st = s.serialize_struct("HadamardTriple", 7)?;
        st.serialize_field("R", &self.r.rows())?;
        st.serialize_field("B", &fmt(&self.b))?;
        st.serialize_field("L", &fmt(&self.l))?;
        st.serialize_field("unitarity_defect", &self.unitarity_defect)?;
        st.serialize_field("exact", &self.exact)?;
        st.serialize_field("certified", &self.is_certified())?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Builds `H[b, l] = N^{-1/2} exp(2 pi i (R^{-1} b) . l)` and measures
/// `||H* H - I||_max`; when every phase is rational an exact certificate is
/// computed as well.
pub fn check_hadamard(r: &ExpansiveIntMatrix, b: &[Vector], l: &[Vector]) -> Result<HadamardTriple> {
    if b.len() != l.len() {
        return Err(AifsError::CardinalityMismatch { b: b.len(), l: l.len() });
    }
    if b.is_empty() {
        return Err(AifsError::InvalidSystem("empty digit sets".into()));
    }
    let d = r.dim();
    if b.iter().chain(l).any(|v| v.len() != d) {
        return Err(AifsError::Shape(format!("digits must have length {d}")));
    }
    let n = b.len();
    let r_inv = r.inverse()?;
    let rb: Vec<Vector> = b.iter().map(|v| r_inv.mat_vec(v)).collect();
    // phase[i][j] = (R^{-1} b_i) . l_j
    let phases: Vec<Vec<Rational>> = rb.iter().map(|x| l.iter().map(|y| dot(x, y)).collect()).collect();
    let scale = 1.0 / (n as f64).sqrt();
    let h: Vec<Vec<Complex64>> = phases
        .iter()
        .map(|row| row.iter().map(|p| Complex64::from_polar(scale, 2.0 * PI * crate::linalg::to_f64(&crate::linalg::frac(p)))).collect())
        .collect();
    let mut defect: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let s: Complex64 = (0..n).map(|i| h[i][j].conj() * h[i][k]).sum();
            let target = if j == k { 1.0 } else { 0.0 };
            defect = defect.max((s - target).norm());
        }
    }
    let exact = exact_certificate(&rb, l);
    let mut warnings = Vec::new();
    if !b.iter().any(|v| v.iter().all(|c| c == &int(0))) {
        warnings.push("0 is not a digit of B; the lattice description of W_B-cycles assumes it is".into());
    }
    Ok(HadamardTriple { r: r.clone(), b: b.to_vec(), l: l.to_vec(), unitarity_defect: defect, exact, warnings })
}

fn exact_certificate(rb: &[Vector], l: &[Vector]) -> ExactCertificate {
    let ones = vec![int(1); rb.len()];
    for j in 0..l.len() {
        for k in (j + 1)..l.len() {
            let diff = sub(&l[k], &l[j]);
            let phases: Vec<Rational> = rb.iter().map(|x| dot(x, &diff)).collect();
            match phases_vanish(&phases, &ones) {
                Ok(true) => {}
                Ok(false) => return ExactCertificate::NotUnitary,
                Err(_) => return ExactCertificate::Unavailable,
            }
        }
    }
    ExactCertificate::Unitary
}

/// The two uniform systems `(R, B)` and `(S, L)` of a certified triple.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub primal: AffineSystem,
    pub dual: AffineSystem,
}

pub fn make_dual_pair(triple: &HadamardTriple) -> Result<DualPair> {
    triple.require_certified()?;
    let primal = AffineSystem::uniform(triple.r.clone(), triple.b.clone())?;
    let dual = AffineSystem::uniform(triple.r.transpose(), triple.l.clone())?;
    Ok(DualPair { primal, dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{scalar_digits, standard_simplex_digits};

    fn r1(p: i64) -> ExpansiveIntMatrix {
        ExpansiveIntMatrix::new(vec![vec![p]]).unwrap()
    }

    fn sier3_l(p: i64) -> Vec<Vector> {
        let h = p / 2;
        vec![
            vec![int(0), int(0), int(0)],
            vec![int(h), int(h), int(0)],
            vec![int(0), int(h), int(h)],
            vec![int(h), int(0), int(h)],
        ]
    }

    #[test]
    fn cantor4_is_certified() {
        let t = check_hadamard(&r1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap();
        assert!(t.is_certified());
        assert!(t.unitarity_defect < 1e-12);
        assert_eq!(t.exact, ExactCertificate::Unitary);
    }

    #[test]
    fn sierpinski_3d_even_is_certified() {
        let r = ExpansiveIntMatrix::scalar(2, 3).unwrap();
        let t = check_hadamard(&r, &standard_simplex_digits(3), &sier3_l(2)).unwrap();
        assert!(t.is_certified());
    }

    #[test]
    fn repeated_column_rejected() {
        let t = check_hadamard(&r1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 2])).unwrap();
        assert!(!t.is_certified());
        assert!((t.unitarity_defect - 1.0).abs() < 1e-12);
        assert_eq!(t.exact, ExactCertificate::NotUnitary);
    }

    #[test]
    fn cardinality_mismatch() {
        let err = check_hadamard(&r1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0])).unwrap_err();
        assert_eq!(err, AifsError::CardinalityMismatch { b: 2, l: 1 });
    }

    #[test]
    fn dual_pairs() {
        let t = check_hadamard(&r1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).unwrap();
        let dp = make_dual_pair(&t).unwrap();
        assert_eq!(dp.dual.matrix().rows(), vec![vec![4]]);
        assert_eq!(dp.dual.digits(), scalar_digits(&[0, 1]).as_slice());

        let shear = ExpansiveIntMatrix::new(vec![vec![2, 1], vec![0, 2]]).unwrap();
        let l = vec![vec![int(0), int(0)], vec![int(1), int(0)]];
        let b = vec![vec![int(0), int(0)], vec![int(1), int(0)]];
        let t = check_hadamard(&shear, &b, &l).unwrap();
        assert_eq!(make_dual_pair(&t).unwrap().dual.matrix().rows(), vec![vec![2, 0], vec![1, 2]]);
        let bad = check_hadamard(&r1(4), &scalar_digits(&[0, 2]), &scalar_digits(&[0, 2])).unwrap();
        assert!(matches!(make_dual_pair(&bad), Err(AifsError::NotCertified { .. })));
    }

    #[test]
    fn missing_zero_digit_warns() {
        let t = check_hadamard(&r1(4), &scalar_digits(&[1, 3]), &scalar_digits(&[0, 1])).unwrap();
        assert!(t.is_certified());
        assert_eq!(t.warnings.len(), 1);
    }
}
