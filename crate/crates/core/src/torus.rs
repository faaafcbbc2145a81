//! Zeros of `m_B` on the torus, the map `x -> S x mod Z^d`, and the
//! orthogonality bounds and `D_n` criterion built on them.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::fourier::cyclotomic::vanishing_sum;
use crate::fourier::mb_vanishes;
use crate::ifs::AffineSystem;
use crate::linalg::{format_rational, frac, int, rat, to_f64, ExpansiveIntMatrix, Rational, Vector};

/// Default grid resolution for the numeric zero scan.
pub const DEFAULT_ZERO_GRID: usize = 64;
/// Denominator cap when rationalising numeric zeros.
pub const RATIONALIZE_CAP: i64 = 10_000;

/// Point of `[0, 1)^d` with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint(Vec<Rational>);

impl TorusPoint {
    /// Reduces every coordinate modulo 1.
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords.iter().map(frac).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `S x mod Z^d`.
    pub fn map(&self, s: &ExpansiveIntMatrix) -> Self {
        Self::new(s.mat_vec(&self.0))
    }

    /// Squared Euclidean distance to the nearest point of `Z^d`.
    pub fn dist_sq_to_lattice(&self) -> Rational {
        self.0
            .iter()
            .map(|c| {
                let other = Rational::one() - c;
                let m = if *c < other { c.clone() } else { other };
                &m * &m
            })
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Certified,
    Numeric,
}

/// One-parameter family `{ x : x[half] = 1/2, x[b] = x[a] + 1/2 }` of zeros for
/// the digits `{0, e_1, e_2, e_3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroFamily {
    pub half: usize,
    pub free: usize,
    pub shifted: usize,
}

impl ZeroFamily {
    pub fn describe(&self) -> String {
        let mut parts = vec![String::new(); 3];
        parts[self.half] = "1/2".into();
        parts[self.free] = "a".into();
        parts[self.shifted] = "a+1/2".into();
        format!("({})", parts.join(", "))
    }

    pub fn sample(&self, a: &Rational) -> TorusPoint {
        let mut v = vec![Rational::zero(); 3];
        v[self.half] = rat(1, 2);
        v[self.free] = a.clone();
        v[self.shifted] = a + rat(1, 2);
        TorusPoint::new(v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSet {
    pub points: Vec<TorusPoint>,
    /// Refined zeros that could not be rationalised and certified.
    pub numeric: Vec<Vec<f64>>,
    pub exactness: Exactness,
    /// `true` when the zero set is known to be fully described.
    pub complete: bool,
    pub structure: Option<String>,
    pub families: Vec<ZeroFamily>,
}

impl ZeroSet {
    pub fn has_families(&self) -> bool {
        !self.families.is_empty()
    }
}

/// Zeros of `m_B` in `[0, 1)^d` for a uniform system.
pub fn find_zeros(sys: &AffineSystem, grid: usize) -> Result<ZeroSet> {
    if !sys.is_uniform() {
        return Err(AifsError::Unsupported("find_zeros expects uniform weights; use has_zero_weighted".into()));
    }
    let d = sys.dim();
    if sys.is_standard_simplex() && d <= 3 {
        return Ok(simplex_zeros(d));
    }
    if d == 1 && sys.has_integer_digits() {
        return polynomial_zeros(sys);
    }
    scan_zeros(sys, grid)
}

fn simplex_zeros(d: usize) -> ZeroSet {
    let structure = Some("standard-simplex digits".to_string());
    match d {
        1 => ZeroSet {
            points: vec![TorusPoint::new(vec![rat(1, 2)])],
            numeric: vec![],
            exactness: Exactness::Certified,
            complete: true,
            structure,
            families: vec![],
        },
        2 => ZeroSet {
            points: vec![TorusPoint::new(vec![rat(1, 3), rat(2, 3)]), TorusPoint::new(vec![rat(2, 3), rat(1, 3)])],
            numeric: vec![],
            exactness: Exactness::Certified,
            complete: true,
            structure,
            families: vec![],
        },
        _ => {
            // 1 + u + v + w = 0 with unimodular u, v, w forces the four terms into
            // two opposite pairs; the term paired with 1 is -1
            let families = vec![
                ZeroFamily { half: 0, free: 1, shifted: 2 },
                ZeroFamily { half: 1, free: 0, shifted: 2 },
                ZeroFamily { half: 2, free: 0, shifted: 1 },
            ];
            let samples: Vec<Rational> = (0..4).map(|k| rat(k, 4)).collect();
            let points: BTreeSet<TorusPoint> =
                families.iter().flat_map(|f| samples.iter().map(move |a| f.sample(a))).collect();
            ZeroSet {
                points: points.into_iter().collect(),
                numeric: vec![],
                exactness: Exactness::Certified,
                complete: true,
                structure,
                families,
            }
        }
    }
}

fn polynomial_zeros(sys: &AffineSystem) -> Result<ZeroSet> {
    let exps: Vec<i64> = sys
        .digits()
        .iter()
        .map(|b| {
            let v = b[0].to_integer();
            i64::try_from(v).map_err(|_| AifsError::Unsupported("digit too large".into()))
        })
        .collect::<Result<_>>()?;
    let lo = *exps.iter().min().unwrap();
    let deg = (*exps.iter().max().unwrap() - lo) as usize;
    if deg > 4096 {
        return Err(AifsError::BudgetExceeded(format!("symbol polynomial of degree {deg}")));
    }
    let mut coeffs = vec![0.0; deg + 1];
    for (e, w) in exps.iter().zip(sys.weights_f64()) {
        coeffs[(e - lo) as usize] += w;
    }
    let mut points = BTreeSet::new();
    let mut numeric = Vec::new();
    for z in crate::linalg::poly_roots(&coeffs) {
        if (z.norm() - 1.0).abs() > 1e-6 {
            continue;
        }
        let x = (z.arg() / (2.0 * PI)).rem_euclid(1.0);
        match certify_candidate(sys, &[x]) {
            Some(p) => {
                points.insert(p);
            }
            None => numeric.push(vec![x]),
        }
    }
    let complete = numeric.is_empty();
    Ok(ZeroSet {
        points: points.into_iter().collect(),
        numeric,
        exactness: if complete { Exactness::Certified } else { Exactness::Numeric },
        complete,
        structure: Some("roots of the symbol polynomial".into()),
        families: vec![],
    })
}

/// Best rational approximation with denominator at most `cap`.
pub fn rationalize(x: f64, cap: i64) -> Rational {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i64;
        let h2 = ai.saturating_mul(h1).saturating_add(h0);
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > cap || k2 <= 0 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let rem = v - a;
        if rem.abs() < 1e-12 {
            break;
        }
        v = 1.0 / rem;
    }
    if k1 == 0 {
        return int(x.round() as i64);
    }
    rat(h1, k1)
}

fn certify_candidate(sys: &AffineSystem, x: &[f64]) -> Option<TorusPoint> {
    let q: Vec<Rational> = x.iter().map(|v| rationalize(*v, RATIONALIZE_CAP)).collect();
    if q.iter().zip(x).any(|(r, v)| (to_f64(r) - v).abs() > 1e-8) {
        return None;
    }
    match mb_vanishes(sys.digits(), sys.weights(), &q) {
        Ok(true) => Some(TorusPoint::new(q)),
        _ => None,
    }
}

/// Gauss-Newton refinement of a zero of `m(x) = sum_b w_b e^{2 pi i b.x}`.
fn refine(digits: &[Vec<f64>], weights: &[f64], start: &[f64]) -> Option<Vec<f64>> {
    let d = start.len();
    let eval = |x: &[f64]| -> (Complex64, Vec<Complex64>) {
        let mut m = Complex64::zero();
        let mut grad = vec![Complex64::zero(); d];
        for (b, w) in digits.iter().zip(weights) {
            let phase: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
            let t = Complex64::from_polar(*w, 2.0 * PI * phase);
            m += t;
            for j in 0..d {
                grad[j] += t * Complex64::new(0.0, 2.0 * PI * b[j]);
            }
        }
        (m, grad)
    };
    let mut x = start.to_vec();
    for _ in 0..100 {
        let (m, g) = eval(&x);
        if m.norm() < 1e-14 {
            return Some(x);
        }
        // J is 2 x d: rows (Re grad), (Im grad); minimal-norm step J^T (J J^T)^{-1} f
        let jr: Vec<f64> = g.iter().map(|z| z.re).collect();
        let ji: Vec<f64> = g.iter().map(|z| z.im).collect();
        let a11: f64 = jr.iter().map(|v| v * v).sum();
        let a12: f64 = jr.iter().zip(&ji).map(|(u, v)| u * v).sum();
        let a22: f64 = ji.iter().map(|v| v * v).sum();
        let det = a11 * a22 - a12 * a12;
        let step: Vec<f64> = if det.abs() > 1e-12 * (a11 * a22).max(1e-300) {
            let y1 = (a22 * m.re - a12 * m.im) / det;
            let y2 = (-a12 * m.re + a11 * m.im) / det;
            (0..d).map(|j| jr[j] * y1 + ji[j] * y2).collect()
        } else {
            // rank one: least squares along the gradient direction
            let nrm = a11 + a22;
            if nrm < 1e-300 {
                return None;
            }
            (0..d).map(|j| (jr[j] * m.re + ji[j] * m.im) / nrm).collect()
        };
        let mut t = 1.0;
        let base = m.norm();
        loop {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            if eval(&cand).0.norm() < base || t < 1e-6 {
                x = cand;
                break;
            }
            t *= 0.5;
        }
    }
    let (m, _) = eval(&x);
    (m.norm() < 1e-10).then_some(x)
}

fn torus_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(u, v)| {
        let d = (u - v).rem_euclid(1.0);
        d.min(1.0 - d) < tol
    })
}

/// Refined zeros of a (possibly weighted) symbol from an `n^d` grid scan.
pub(crate) fn scan_symbol(digits: &[Vec<f64>], weights: &[f64], dim: usize, grid: usize) -> Result<Vec<Vec<f64>>> {
    let total = (grid as f64).powi(dim as i32);
    if total > 2e7 {
        return Err(AifsError::BudgetExceeded(format!("zero scan of {total:.0} grid points")));
    }
    let lip = 2.0 * PI * digits.iter().zip(weights).map(|(b, w)| w * crate::linalg::norm2(b)).sum::<f64>();
    let h = 1.0 / grid as f64;
    let radius = lip * h * (dim as f64).sqrt() / 2.0 + 1e-12;
    let total = total as usize;
    let found: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rem = idx;
            let x: Vec<f64> = (0..dim)
                .map(|_| {
                    let c = rem % grid;
                    rem /= grid;
                    c as f64 * h
                })
                .collect();
            let m: Complex64 = digits
                .iter()
                .zip(weights)
                .map(|(b, w)| Complex64::from_polar(*w, 2.0 * PI * b.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>()))
                .sum();
            if m.norm() > radius {
                return None;
            }
            refine(digits, weights, &x).map(|z| z.iter().map(|v| v.rem_euclid(1.0)).collect())
        })
        .collect();
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for z in found {
        if !unique.iter().any(|u| torus_close(u, &z, 1e-7)) {
            unique.push(z);
            if unique.len() > 4096 {
                break;
            }
        }
    }
    Ok(unique)
}

fn scan_zeros(sys: &AffineSystem, grid: usize) -> Result<ZeroSet> {
    let digits: Vec<Vec<f64>> = sys.digits().iter().map(|b| b.iter().map(to_f64).collect()).collect();
    let found = scan_symbol(&digits, &sys.weights_f64(), sys.dim(), grid)?;
    let mut points = BTreeSet::new();
    let mut numeric = Vec::new();
    for z in found {
        match certify_candidate(sys, &z) {
            Some(p) => {
                points.insert(p);
            }
            None => numeric.push(z),
        }
    }
    Ok(ZeroSet {
        points: points.into_iter().collect(),
        exactness: if numeric.is_empty() { Exactness::Certified } else { Exactness::Numeric },
        numeric,
        complete: false,
        structure: None,
        families: vec![],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitResult {
    pub trail: Vec<TorusPoint>,
    pub pre_period: usize,
    pub period: usize,
}

impl OrbitResult {
    /// The periodic part of the trail.
    pub fn cycle(&self) -> &[TorusPoint] {
        &self.trail[self.pre_period..self.pre_period + self.period]
    }
}

/// Exact orbit of `x` under `x -> S x mod Z^d` up to the first recurrence.
pub fn orbit(s: &ExpansiveIntMatrix, x: &TorusPoint, max_steps: usize) -> Result<OrbitResult> {
    if x.dim() != s.dim() {
        return Err(AifsError::Shape(format!("point of length {} in dimension {}", x.dim(), s.dim())));
    }
    let mut seen: HashMap<TorusPoint, usize> = HashMap::new();
    let mut trail = vec![x.clone()];
    seen.insert(x.clone(), 0);
    let mut cur = x.clone();
    for step in 1..=max_steps {
        cur = cur.map(s);
        trail.push(cur.clone());
        if let Some(&first) = seen.get(&cur) {
            return Ok(OrbitResult { trail, pre_period: first, period: step - first });
        }
        seen.insert(cur.clone(), step);
    }
    Err(AifsError::BudgetExceeded(format!("no recurrence within {max_steps} steps")))
}

/// Closure of `zeros` under the torus map, if finite within `max_size` and free of 0.
pub fn invariant_superset(s: &ExpansiveIntMatrix, zeros: &[TorusPoint], max_size: usize) -> Result<Vec<TorusPoint>> {
    let mut set: BTreeSet<TorusPoint> = BTreeSet::new();
    let mut queue: VecDeque<TorusPoint> = zeros.iter().cloned().collect();
    while let Some(p) = queue.pop_front() {
        if p.is_origin() {
            return Err(AifsError::CriterionInapplicable("the invariant closure contains 0".into()));
        }
        if set.insert(p.clone()) {
            if set.len() > max_size {
                return Err(AifsError::BudgetExceeded(format!("closure not finite within budget of {max_size} points")));
            }
            queue.push_back(p.map(s));
        }
    }
    Ok(set.into_iter().collect())
}

/// `|Z'| + 1`.
pub fn orthogonality_bound_finite(z_prime: &[TorusPoint]) -> u64 {
    z_prime.len() as u64 + 1
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceBound {
    /// Exact lower bound on the squared distance from the orbit to `Z^d`.
    #[serde(serialize_with = "ser_rational")]
    pub delta_sq: Rational,
    pub delta: f64,
    /// `floor(sqrt(d) / delta) + 1`.
    pub k: u64,
    pub bound: u64,
    /// How `delta` was obtained.
    pub source: String,
    pub orbit_points: usize,
    pub note: Option<String>,
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Largest integer `k` with `k^2 * delta_sq <= d`, i.e. `floor(sqrt(d) / delta)`.
pub fn floor_sqrt_ratio(d: u64, delta_sq: &Rational) -> u64 {
    let d = int(d as i64);
    let mut k: u64 = 0;
    while int((k + 1) as i64) * int((k + 1) as i64) * delta_sq <= d {
        k += 1;
    }
    k
}

/// Distance criterion: `delta = dist(O(Z), Z^d)` and the bound `(floor(sqrt(d)/delta) + 1)^d`.
pub fn orthogonality_bound_distance(s: &ExpansiveIntMatrix, zeros: &ZeroSet, horizon: usize) -> Result<DistanceBound> {
    let d = s.dim() as u64;
    let (delta_sq, source, orbit_points, note) = if zeros.has_families() {
        if !s.as_scalar().is_some_and(|p| p.rem_euclid(2) == 1) {
            return Err(AifsError::CriterionInapplicable(
                "zero families with a 1/2 coordinate need S = pI with p odd".into(),
            ));
        }
        // the 1/2 coordinate is fixed by an odd scalar, so every orbit point keeps it
        let note = (d == 3).then(|| {
            "formula gives (floor(sqrt(3)/(1/2)) + 1)^3 = 4^3 = 64; a published statement of this bound prints 256".to_string()
        });
        (rat(1, 4), "zero family with a coordinate fixed at 1/2".to_string(), 0, note)
    } else {
        if !zeros.numeric.is_empty() {
            return Err(AifsError::CriterionInapplicable("zero set contains uncertified points".into()));
        }
        let mut visited: BTreeSet<TorusPoint> = BTreeSet::new();
        for z in &zeros.points {
            let o = orbit(s, z, horizon)?;
            visited.extend(o.trail.into_iter().skip(1));
        }
        let min = visited
            .iter()
            .map(TorusPoint::dist_sq_to_lattice)
            .min()
            .unwrap_or_else(Rational::one);
        if min.is_zero() {
            return Err(AifsError::CriterionInapplicable("the orbit of Z meets Z^d (delta = 0)".into()));
        }
        (min, "exact orbit minimum".to_string(), visited.len(), None)
    };
    let k = floor_sqrt_ratio(d, &delta_sq) + 1;
    let bound = k
        .checked_pow(d as u32)
        .ok_or_else(|| AifsError::BudgetExceeded("distance bound overflows u64".into()))?;
    Ok(DistanceBound { delta: to_f64(&delta_sq).sqrt(), delta_sq, k, bound, source, orbit_points, note })
}

/// Brute-force budget for the `D_n` minimisation.
pub const DN_MAX_MODULUS: u64 = 10_000;
pub const DN_MAX_COMBINATIONS: f64 = 2e8;

#[derive(Clone, Debug, Serialize)]
pub struct DnResult {
    pub p: u64,
    pub d: usize,
    pub n: u32,
    pub dn: f64,
    /// `p^n D_n`.
    pub scaled: f64,
    pub minimizer: Vec<u64>,
    pub exact_zero: bool,
}

fn better(a: (f64, &[u64]), b: (f64, &[u64])) -> bool {
    const TIE: f64 = 1e-13;
    a.0 < b.0 - TIE || ((a.0 - b.0).abs() <= TIE && a.1 < b.1)
}

fn dn_search(m: u64, d: usize, first: u64, roots: &[Complex64]) -> (f64, Vec<u64>) {
    let mut best = (f64::INFINITY, Vec::new());
    let mut ks = vec![first; d];
    fn rec(
        pos: usize,
        start: u64,
        acc: Complex64,
        m: u64,
        ks: &mut Vec<u64>,
        roots: &[Complex64],
        best: &mut (f64, Vec<u64>),
    ) {
        if pos == ks.len() {
            let v = acc.norm();
            if better((v, ks), (best.0, &best.1)) {
                *best = (v, ks.clone());
            }
            return;
        }
        for k in start..m {
            ks[pos] = k;
            rec(pos + 1, k, acc + roots[k as usize], m, ks, roots, best);
        }
    }
    let acc = Complex64::new(1.0, 0.0) + roots[first as usize];
    rec(1, first, acc, m, &mut ks, roots, &mut best);
    best
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `D_n = min |1 + sum_l e^{2 pi i k_l / p^n}|` by exhaustive search over
/// sorted `k` (the expression is symmetric in the `k_l`).
pub fn lemconf_dn(p: u64, d: usize, n: u32) -> Result<DnResult> {
    if p < 2 || n == 0 || d == 0 {
        return Err(AifsError::InvalidSystem("need p >= 2, d >= 1, n >= 1".into()));
    }
    let m = p.checked_pow(n).filter(|m| *m <= DN_MAX_MODULUS).ok_or_else(|| {
        AifsError::BudgetExceeded(format!("p^n exceeds {DN_MAX_MODULUS} (p = {p}, n = {n})"))
    })?;
    let combos = binomial(m + d as u64 - 1, d as u64);
    if combos > DN_MAX_COMBINATIONS {
        return Err(AifsError::BudgetExceeded(format!("{combos:.3e} combinations for p = {p}, d = {d}, n = {n}")));
    }
    let roots: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
    let (value, minimizer) = (0..m)
        .into_par_iter()
        .map(|first| dn_search(m, d, first, &roots))
        .reduce(
            || (f64::INFINITY, Vec::new()),
            |a, b| if better((b.0, &b.1), (a.0, &a.1)) { b } else { a },
        );
    let mut exact_zero = false;
    let mut dn = value;
    if value < 1e-9 {
        let mut terms = vec![(0u64, Rational::one())];
        terms.extend(minimizer.iter().map(|&k| (k, Rational::one())));
        if vanishing_sum(m, &terms)? {
            exact_zero = true;
            dn = 0.0;
        }
    }
    Ok(DnResult { p, d, n, dn, scaled: dn * m as f64, minimizer, exact_zero })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemconfVerdict {
    /// The finite check is consistent with `inf p^n D_n > 0`.
    CriterionTriggered,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemconfReport {
    pub p: u64,
    pub d: usize,
    pub rows: Vec<DnResult>,
    pub min_scaled: f64,
    pub verdict: LemconfVerdict,
    pub note: String,
}

/// Evidence threshold on `min_n p^n D_n`.
pub const LEMCONF_THRESHOLD: f64 = 1.0;

/// Runs `D_n` for `n = 1..=n_max` and summarises. A finite check never proves
/// the infimum condition; the verdict only records evidence.
pub fn lemconf_verdict(p: u64, d: usize, n_max: u32) -> Result<LemconfReport> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let row = lemconf_dn(p, d, n)?;
        let stop = row.exact_zero;
        rows.push(row);
        if stop {
            break;
        }
    }
    let min_scaled = rows.iter().map(|r| r.scaled).fold(f64::INFINITY, f64::min);
    let any_zero = rows.iter().any(|r| r.exact_zero);
    let stable = match rows.as_slice() {
        [.., a, b] => b.scaled >= 0.9 * a.scaled,
        _ => true,
    };
    let (verdict, note) = if any_zero {
        (LemconfVerdict::Inconclusive, "D_n = 0 exactly at some n: the criterion cannot apply".to_string())
    } else if min_scaled >= LEMCONF_THRESHOLD && stable {
        (
            LemconfVerdict::CriterionTriggered,
            format!("min p^n D_n = {min_scaled:.6} over n <= {n_max}; evidence only, not a proof"),
        )
    } else {
        (LemconfVerdict::Inconclusive, format!("min p^n D_n = {min_scaled:.6}; no stable positive lower bound"))
    };
    Ok(LemconfReport { p, d, rows, min_scaled, verdict, note })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedZeroVerdict {
    pub has_zero: bool,
    pub exactness: Exactness,
}

/// Whether the weighted symbol `sum_b p_b e^{2 pi i b.x}` has a zero.
///
/// For two digits the answer is exact: a zero exists iff `p_1 = p_2`.
pub fn has_zero_weighted(sys: &AffineSystem, grid: usize) -> Result<WeightedZeroVerdict> {
    if sys.len() == 2 {
        return Ok(WeightedZeroVerdict { has_zero: sys.weights()[0] == sys.weights()[1], exactness: Exactness::Certified });
    }
    let digits: Vec<Vec<f64>> = sys.digits().iter().map(|b| b.iter().map(to_f64).collect()).collect();
    let found = scan_symbol(&digits, &sys.weights_f64(), sys.dim(), grid)?;
    Ok(WeightedZeroVerdict { has_zero: !found.is_empty(), exactness: Exactness::Numeric })
}

/// Exact zero test helper for callers holding a plain vector.
pub fn is_exact_zero(sys: &AffineSystem, x: &Vector) -> Result<bool> {
    mb_vanishes(sys.digits(), sys.weights(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{scalar_digits, standard_simplex_digits};

    fn tp(v: &[(i64, i64)]) -> TorusPoint {
        TorusPoint::new(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    fn shear_s() -> ExpansiveIntMatrix {
        ExpansiveIntMatrix::new(vec![vec![2, 0], vec![1, 2]]).unwrap()
    }

    #[test]
    fn zeros_of_simple_systems() {
        let s1 = AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![2]]).unwrap(), scalar_digits(&[0, 1])).unwrap();
        assert_eq!(find_zeros(&s1, 64).unwrap().points, vec![tp(&[(1, 2)])]);
        let s2 = AffineSystem::uniform(ExpansiveIntMatrix::scalar(2, 2).unwrap(), standard_simplex_digits(2)).unwrap();
        assert_eq!(find_zeros(&s2, 64).unwrap().points, vec![tp(&[(1, 3), (2, 3)]), tp(&[(2, 3), (1, 3)])]);
        let s3 = AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![4]]).unwrap(), scalar_digits(&[0, 2])).unwrap();
        let z = find_zeros(&s3, 64).unwrap();
        assert_eq!(z.points, vec![tp(&[(1, 4)]), tp(&[(3, 4)])]);
        assert!(z.complete);
    }

    #[test]
    fn grid_scan_finds_shear_zeros() {
        let b = vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]];
        let sys = AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![2, 1], vec![0, 2]]).unwrap(), b).unwrap();
        let z = scan_zeros(&sys, 32).unwrap();
        assert_eq!(z.points, vec![tp(&[(1, 3), (2, 3)]), tp(&[(2, 3), (1, 3)])]);
        assert!(z.numeric.is_empty());
    }

    #[test]
    fn shear_orbit_is_the_six_cycle() {
        let o = orbit(&shear_s(), &tp(&[(1, 3), (2, 3)]), 100).unwrap();
        let expected = vec![
            tp(&[(1, 3), (2, 3)]),
            tp(&[(2, 3), (2, 3)]),
            tp(&[(1, 3), (0, 1)]),
            tp(&[(2, 3), (1, 3)]),
            tp(&[(1, 3), (1, 3)]),
            tp(&[(2, 3), (0, 1)]),
        ];
        assert_eq!(o.cycle(), expected.as_slice());
        assert_eq!((o.pre_period, o.period), (0, 6));
        let z = invariant_superset(&shear_s(), &[tp(&[(1, 3), (2, 3)]), tp(&[(2, 3), (1, 3)])], 100).unwrap();
        assert_eq!(orthogonality_bound_finite(&z), 7);
    }

    #[test]
    fn orbit_fixed_points() {
        let o = orbit(&ExpansiveIntMatrix::scalar(2, 2).unwrap(), &tp(&[(0, 1), (0, 1)]), 10).unwrap();
        assert_eq!(o.period, 1);
        let o = orbit(&ExpansiveIntMatrix::new(vec![vec![3]]).unwrap(), &tp(&[(1, 2)]), 10).unwrap();
        assert_eq!((o.pre_period, o.period), (0, 1));
    }

    #[test]
    fn superset_failures() {
        let two = ExpansiveIntMatrix::new(vec![vec![2]]).unwrap();
        assert!(matches!(invariant_superset(&two, &[tp(&[(1, 2)])], 10), Err(AifsError::CriterionInapplicable(_))));
        let three = ExpansiveIntMatrix::new(vec![vec![3]]).unwrap();
        assert!(matches!(invariant_superset(&three, &[tp(&[(1, 7)])], 2), Err(AifsError::BudgetExceeded(_))));
        assert_eq!(orthogonality_bound_finite(&[]), 1);
    }

    #[test]
    fn distance_bounds() {
        let three = ExpansiveIntMatrix::new(vec![vec![3]]).unwrap();
        let sys = AffineSystem::uniform(three.clone(), scalar_digits(&[0, 1])).unwrap();
        let b = orthogonality_bound_distance(&three, &find_zeros(&sys, 64).unwrap(), 100).unwrap();
        assert_eq!((b.delta_sq.clone(), b.bound), (rat(1, 4), 3));

        let s3 = ExpansiveIntMatrix::scalar(3, 3).unwrap();
        let sys = AffineSystem::uniform(s3.clone(), standard_simplex_digits(3)).unwrap();
        let b = orthogonality_bound_distance(&s3, &find_zeros(&sys, 64).unwrap(), 100).unwrap();
        assert_eq!((b.k, b.bound), (4, 64));
        assert!(b.note.unwrap().contains("256"));

        let two = ExpansiveIntMatrix::new(vec![vec![2]]).unwrap();
        let sys = AffineSystem::uniform(two.clone(), scalar_digits(&[0, 1])).unwrap();
        assert!(orthogonality_bound_distance(&two, &find_zeros(&sys, 64).unwrap(), 100).is_err());
    }

    #[test]
    fn floor_of_sqrt_ratio() {
        assert_eq!(floor_sqrt_ratio(3, &rat(1, 4)), 3);
        assert_eq!(floor_sqrt_ratio(1, &rat(1, 4)), 2);
        assert_eq!(floor_sqrt_ratio(2, &rat(1, 2)), 2);
    }

    #[test]
    fn dn_examples() {
        let r = lemconf_dn(3, 1, 1).unwrap();
        assert!((r.dn - 1.0).abs() < 1e-14);
        assert_eq!(r.minimizer, vec![1]);
        let r = lemconf_dn(3, 2, 1).unwrap();
        assert!(r.exact_zero && r.dn == 0.0);
        let r = lemconf_dn(3, 1, 2).unwrap();
        assert!((r.dn - 2.0 * (4.0 * PI / 9.0).cos()).abs() < 1e-14);
        assert_eq!(r.minimizer, vec![4]);
        assert!(matches!(lemconf_dn(3, 1, 9), Err(AifsError::BudgetExceeded(_))));
    }

    #[test]
    fn lemconf_verdicts() {
        let r = lemconf_verdict(3, 1, 5).unwrap();
        assert_eq!(r.verdict, LemconfVerdict::CriterionTriggered);
        assert!(r.rows.iter().all(|row| row.scaled >= 2.0));
        assert_eq!(lemconf_verdict(3, 2, 3).unwrap().verdict, LemconfVerdict::Inconclusive);
        assert_eq!(lemconf_verdict(6, 4, 2).unwrap().verdict, LemconfVerdict::Inconclusive);
    }

    #[test]
    fn weighted_zeros() {
        let r = ExpansiveIntMatrix::new(vec![vec![2]]).unwrap();
        let w = |a, b| AffineSystem::new(r.clone(), scalar_digits(&[0, 1]), Some(vec![a, b])).unwrap();
        assert!(!has_zero_weighted(&w(rat(1, 3), rat(2, 3)), 64).unwrap().has_zero);
        assert!(has_zero_weighted(&w(rat(1, 2), rat(1, 2)), 64).unwrap().has_zero);
        assert!(!has_zero_weighted(&w(rat(4999, 10000), rat(5001, 10000)), 64).unwrap().has_zero);
    }

    #[test]
    fn rationalize_small() {
        assert_eq!(rationalize(1.0 / 3.0, 10_000), rat(1, 3));
        assert_eq!(rationalize(0.75, 10_000), rat(3, 4));
        assert_eq!(rationalize(0.0, 10_000), int(0));
    }
}
