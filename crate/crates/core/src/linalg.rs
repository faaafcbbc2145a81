//! Exact integer and rational matrix arithmetic, plus expansivity certification.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{AifsError, Result};
use crate::fourier::cyclotomic::{cyclotomic_poly, totient};

pub type Rational = BigRational;
pub type Vector = Vec<Rational>;

/// Margin used when certifying `|lambda| > 1` numerically.
pub const EXPANSIVE_MARGIN: f64 = 1e-9;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(n.into())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range: fall back to a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || AifsError::Parse(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(AifsError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, digits)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole: BigInt = match whole.trim() {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let part: BigInt = digits.parse().map_err(|_| bad())?;
        let part = BigRational::new(part, scale);
        let whole = BigRational::from_integer(whole);
        return Ok(if negative { whole - part } else { whole + part });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_vector(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

pub fn format_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn ser_vector<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
}

/// Vectors as arrays of `"p/q"` strings.
pub(crate) fn ser_vectors<S: serde::Serializer>(v: &[Vector], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(|x| x.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| -x).collect()
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Least common multiple of the denominators of all entries.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Square integer matrix `R` driving an affine system.
///
/// `certified_expansive` is only set by [`ExpansiveIntMatrix::certify`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpansiveIntMatrix {
    dim: usize,
    entries: Vec<i64>,
    certified_expansive: bool,
}

impl ExpansiveIntMatrix {
    /// Builds a square, non-singular integer matrix from rows.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(AifsError::Shape("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AifsError::Shape(format!("matrix is not square ({dim} rows)")));
        }
        let m = Self { dim, entries: rows.into_iter().flatten().collect(), certified_expansive: false };
        if m.det().is_zero() {
            return Err(AifsError::Singular);
        }
        Ok(m)
    }

    pub fn scalar(p: i64, dim: usize) -> Result<Self> {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { p } else { 0 }).collect())
            .collect();
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_certified(&self) -> bool {
        self.certified_expansive
    }

    /// `Some(p)` when the matrix is `p * I`.
    pub fn as_scalar(&self) -> Option<i64> {
        let p = self.get(0, 0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expect = if i == j { p } else { 0 };
                if self.get(i, j) != expect {
                    return None;
                }
            }
        }
        Some(p)
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        Self { dim: d, entries, certified_expansive: self.certified_expansive }
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&v| int(v)).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&v| v as f64).collect()
    }

    pub fn det(&self) -> BigInt {
        let cp = self.char_poly();
        let c0 = cp[0].clone();
        if self.dim.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        self.to_rational().inverse()
    }

    pub fn mat_vec(&self, v: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| &v[j] * BigInt::from(self.get(i, j))).sum())
            .collect()
    }

    pub fn mat_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.get(i, j) as f64 * v[j]).sum()).collect()
    }

    /// Characteristic polynomial `det(tI - M)`, coefficients low degree first
    /// (monic, so the last entry is 1). Faddeev-LeVerrier in exact arithmetic.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let n = self.dim;
        let a = self.to_rational();
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = RationalMatrix::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = a.mul(&m);
            for i in 0..n {
                let idx = i * n + i;
                next.entries[idx] += &coeffs[n - k + 1];
            }
            m = next;
            let am = a.mul(&m);
            let trace: Rational = (0..n).map(|i| am.entries[i * n + i].clone()).sum();
            coeffs[n - k] = -trace / int(k as i64);
        }
        coeffs.into_iter().map(|c| c.to_integer()).collect()
    }

    /// Numerical eigenvalues from the characteristic polynomial.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let cp: Vec<f64> = self.char_poly().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        poly_roots(&cp)
    }

    /// `true` iff every eigenvalue has modulus greater than one.
    ///
    /// Eigenvalues that are roots of unity are detected exactly. Any other
    /// eigenvalue with modulus within [`EXPANSIVE_MARGIN`] of 1 is reported as
    /// [`AifsError::Borderline`].
    pub fn check_expansive(&self) -> Result<bool> {
        let cp = self.char_poly();
        if has_root_of_unity(&cp) {
            return Ok(false);
        }
        let eig = self.eigenvalues();
        if let Some(b) = eig.iter().map(|z| z.norm()).find(|m| (m - 1.0).abs() < EXPANSIVE_MARGIN) {
            return Err(AifsError::Borderline { modulus: b });
        }
        Ok(eig.iter().all(|z| z.norm() >= 1.0 + EXPANSIVE_MARGIN))
    }

    pub fn min_eigen_modulus(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Returns the matrix with its expansivity certified, or an error.
    pub fn certify(mut self) -> Result<Self> {
        if self.certified_expansive {
            return Ok(self);
        }
        if !self.check_expansive()? {
            return Err(AifsError::NotExpansive { min_modulus: self.min_eigen_modulus() });
        }
        self.certified_expansive = true;
        Ok(self)
    }
}

impl fmt::Display for ExpansiveIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

fn has_root_of_unity(cp: &[BigInt]) -> bool {
    let degree = (cp.len() - 1) as u64;
    // phi(k) >= sqrt(k / 2), so only k <= 2 d^2 can have phi(k) <= d
    for k in 1..=(2 * degree * degree + 2) {
        if totient(k) > degree {
            continue;
        }
        let phi: Vec<BigInt> = cyclotomic_poly(k).into_iter().map(BigInt::from).collect();
        if poly_rem_is_zero(cp, &phi) {
            return true;
        }
    }
    false
}

/// Whether the monic integer polynomial `divisor` divides `p` (both low degree first).
fn poly_rem_is_zero(p: &[BigInt], divisor: &[BigInt]) -> bool {
    let mut rem: Vec<BigInt> = p.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = rem.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = rem.len() - dd;
        for (i, c) in divisor[..dd].iter().enumerate() {
            rem[shift + i] -= &lead * c;
        }
    }
    rem.iter().all(|c| c.is_zero())
}

/// All complex roots of a real polynomial (coefficients low degree first),
/// by Aberth-Ehrlich iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| *v == 0.0) {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|v| Complex64::new(v / lead, 0.0)).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for coef in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + coef;
        }
        (p, dp)
    };
    let radius = 1.0 + monic[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = roots[i] - roots[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                roots[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + roots[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots
}

/// Square matrix with exact rational entries (row-major).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(AifsError::Shape("rational matrix must be square and non-empty".into()));
        }
        Ok(Self { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![Rational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Rational::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let dim = cols.len();
        if dim == 0 || cols.iter().any(|c| c.len() != dim) {
            return Err(AifsError::Shape("need d columns of length d".into()));
        }
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.entries[i * dim + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.entries[j * d + i] = self.entries[i * d + j].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &other.entries[k * d + j];
                    if !b.is_zero() {
                        m.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mat_vec(&self, v: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, x) in self.entries[i * d..(i + 1) * d].iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(to_f64).collect()
    }

    pub fn to_int_matrix(&self) -> Option<ExpansiveIntMatrix> {
        if !self.is_integral() {
            return None;
        }
        let rows = self
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.to_integer().to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        ExpansiveIntMatrix::new(rows).ok()
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(d).entries;
        for col in 0..d {
            let pivot = (col..d).find(|&r| !a[r * d + col].is_zero()).ok_or(AifsError::Singular)?;
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                    inv.swap(pivot * d + j, col * d + j);
                }
            }
            let p = a[col * d + col].clone();
            for j in 0..d {
                a[col * d + j] = &a[col * d + j] / &p;
                inv[col * d + j] = &inv[col * d + j] / &p;
            }
            for r in 0..d {
                if r == col || a[r * d + col].is_zero() {
                    continue;
                }
                let f = a[r * d + col].clone();
                for j in 0..d {
                    let t = &f * &a[col * d + j];
                    a[r * d + j] -= t;
                    let t = &f * &inv[col * d + j];
                    inv[r * d + j] -= t;
                }
            }
        }
        Ok(Self { dim: d, entries: inv })
    }

    /// Solves `self * x = rhs` exactly.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self.inverse()?.mat_vec(rhs))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

// ---------------------------------------------------------------------------
// floating-point helpers shared by the box and truncation estimates

pub(crate) fn mat_mul_f64(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

pub(crate) fn mat_vec_f64(a: &[f64], v: &[f64], d: usize) -> Vec<f64> {
    (0..d).map(|i| (0..d).map(|j| a[i * d + j] * v[j]).sum()).collect()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Spectral-norm estimate by 200 power-iteration steps on `A^T A`.
pub(crate) fn operator_norm(a: &[f64], d: usize) -> f64 {
    let mut at = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            at[j * d + i] = a[i * d + j];
        }
    }
    let ata = mat_mul_f64(&at, a, d);
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.37 * i as f64).collect();
    let mut estimate = 0.0;
    for _ in 0..200 {
        let w = mat_vec_f64(&ata, &v, d);
        let n = norm2(&w);
        if n == 0.0 {
            return 0.0;
        }
        estimate = n / norm2(&v);
        v = w.iter().map(|x| x / n).collect();
    }
    estimate.sqrt()
}

/// Geometric control of the powers of a contraction `A` (spectral radius < 1).
#[derive(Clone, Debug)]
pub(crate) struct Contraction {
    /// `norms[j] ~ ||A^{j+1}||`, inflated by 1%.
    #[cfg_attr(not(test), allow(dead_code))]
    pub norms: Vec<f64>,
    /// Upper bound on `sum_{j >= 1} ||A^j||`.
    pub series_bound: f64,
}

pub(crate) fn contraction_profile(a: &[f64], d: usize) -> Option<Contraction> {
    let mut norms = Vec::new();
    let mut power = a.to_vec();
    for _ in 0..256 {
        let n = operator_norm(&power, d) * 1.01;
        norms.push(n);
        if n < 0.5 {
            // every power splits as (A^k)^q A^r with 1 <= r <= k
            let series_bound = norms.iter().sum::<f64>() / (1.0 - n);
            return Some(Contraction { norms, series_bound });
        }
        power = mat_mul_f64(&power, a, d);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExpansiveIntMatrix {
        ExpansiveIntMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn expansive_examples() {
        assert!(m(&[&[2, 0], &[0, 2]]).check_expansive().unwrap());
        assert!(m(&[&[2, 1], &[0, 2]]).check_expansive().unwrap());
        assert!(!m(&[&[1, 0], &[0, 2]]).check_expansive().unwrap());
        assert!(!m(&[&[-1, 0], &[0, 3]]).check_expansive().unwrap());
        // rotation by 90 degrees has eigenvalues +-i
        assert!(!m(&[&[0, -1], &[1, 0]]).check_expansive().unwrap());
        assert!(m(&[&[1, -1], &[1, 1]]).check_expansive().unwrap());
    }

    #[test]
    fn certify_sets_flag() {
        let r = m(&[&[2, 1], &[0, 2]]).certify().unwrap();
        assert!(r.is_certified());
        assert!(matches!(
            m(&[&[1, 0], &[0, 2]]).certify(),
            Err(AifsError::NotExpansive { .. })
        ));
    }

    #[test]
    fn shape_and_singularity_errors() {
        assert!(matches!(
            ExpansiveIntMatrix::new(vec![vec![1, 2], vec![3]]),
            Err(AifsError::Shape(_))
        ));
        assert_eq!(ExpansiveIntMatrix::new(vec![vec![1, 2], vec![2, 4]]), Err(AifsError::Singular));
    }

    #[test]
    fn inverse_and_transpose_examples() {
        assert_eq!(m(&[&[4]]).inverse().unwrap().rows(), vec![vec![rat(1, 4)]]);
        assert_eq!(m(&[&[2, 1], &[0, 2]]).transpose().rows(), vec![vec![2, 0], vec![1, 2]]);
        let inv = m(&[&[2, 1], &[0, 2]]).inverse().unwrap();
        assert_eq!(inv.rows(), vec![vec![rat(1, 2), rat(-1, 4)], vec![rat(0, 1), rat(1, 2)]]);
        assert!(m(&[&[2, 1], &[0, 2]]).to_rational().mul(&inv).is_identity());
    }

    #[test]
    fn char_poly_and_det() {
        let a = m(&[&[2, 1], &[0, 2]]);
        let cp: Vec<i64> = a.char_poly().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(cp, vec![4, -4, 1]);
        assert_eq!(a.det(), BigInt::from(4));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational(" 3/6 ").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("0.4999").unwrap(), rat(4999, 10000));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("pi").is_err());
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_vector("1/3,2/3").unwrap(), vec![rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
        assert_eq!(frac(&rat(7, 2)), rat(1, 2));
        assert_eq!(frac(&int(-4)), int(0));
    }

    #[test]
    fn roots_of_quadratic() {
        let roots = poly_roots(&[2.0, -3.0, 1.0]);
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - 1.0).abs() < 1e-12 && (re[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_of_shear_inverse() {
        let inv = m(&[&[2, 1], &[0, 2]]).inverse().unwrap().to_f64();
        let c = contraction_profile(&inv, 2).unwrap();
        assert!(c.norms[0] < 1.0);
        assert!(c.series_bound > 1.0 && c.series_bound < 10.0);
    }
}
