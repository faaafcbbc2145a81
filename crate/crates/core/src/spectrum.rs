//! Candidate spectra generated from `W_B`-cycles, plus the explicit families
//! for the standard-simplex digit sets.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::cycles::{discover_cycles, CycleDiscovery, CycleRecord, MAX_PERIOD};
use crate::error::{AifsError, Result};
use crate::fourier::mb_vanishes;
use crate::hadamard::{check_hadamard, HadamardTriple};
use crate::ifs::{standard_simplex_digits, AffineSystem};
use crate::linalg::{add, format_rational, int, neg, rat, ExpansiveIntMatrix, Rational, Vector};

/// Hard cap on enumerated elements.
pub const SPECTRUM_CAP: usize = 5_000_000;

/// `Lambda_n = { -S^n x + sum_{k<n} S^k l_k : x in C, l_k in L }` over the
/// given `W_B`-cycles `C`. For the zero cycle this is the plain digit
/// expansion; levels are nested.
#[derive(Clone, Debug)]
pub struct SpectrumSet {
    pub cycles: Vec<CycleRecord>,
    pub s: ExpansiveIntMatrix,
    pub l: Vec<Vector>,
    pub level: usize,
    /// One sorted component per cycle.
    pub components: Vec<Vec<Vector>>,
    /// Sorted, deduplicated union.
    pub elements: Vec<Vector>,
}

impl SpectrumSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

impl Serialize for SpectrumSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let fmt = |v: &Vec<Vector>| -> Vec<Vec<String>> {
            v.iter().map(|x| x.iter().map(format_rational).collect()).collect()
        };
        let mut st = s.serialize_struct("SpectrumSet", 4)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("cycles", &self.cycles)?;
        st.serialize_field("size", &self.elements.len())?;
        st.serialize_field("elements", &fmt(&self.elements))?;
        st.end()
    }
}

/// Estimated size before deduplication.
pub fn spectrum_size_estimate(cycles: &[CycleRecord], n_digits: usize, level: usize) -> f64 {
    let pts: usize = cycles.iter().map(|c| c.period()).sum();
    pts as f64 * (n_digits as f64).powi(level as i32)
}

/// Digit expansions `{ sum_{k<n} S^k l_k }`.
pub fn digit_expansions(s: &ExpansiveIntMatrix, l: &[Vector], level: usize) -> Vec<Vector> {
    let d = s.dim();
    let mut set: Vec<Vector> = vec![vec![Rational::zero(); d]];
    let mut shifted: Vec<Vector> = l.to_vec();
    for _ in 0..level {
        set = set.iter().flat_map(|e| shifted.iter().map(move |v| add(e, v))).collect();
        shifted = shifted.iter().map(|v| s.mat_vec(v)).collect();
    }
    set
}

pub fn spectrum_from_cycles(dual: &AffineSystem, cycles: &[CycleRecord], level: usize) -> Result<SpectrumSet> {
    if let Some(bad) = cycles.iter().find(|c| !c.is_wb_cycle) {
        return Err(AifsError::NotWbCycle(format!("{bad} is not a W_B-cycle")));
    }
    let est = spectrum_size_estimate(cycles, dual.len(), level);
    if est > SPECTRUM_CAP as f64 {
        return Err(AifsError::BudgetExceeded(format!("spectrum level {level} would hold {est:.0} elements")));
    }
    let s = dual.matrix().clone();
    let expansions = digit_expansions(&s, dual.digits(), level);
    let mut union: BTreeSet<Vector> = BTreeSet::new();
    let mut components = Vec::with_capacity(cycles.len());
    for c in cycles {
        let mut comp: BTreeSet<Vector> = BTreeSet::new();
        for x in &c.points {
            let mut offset = neg(x);
            for _ in 0..level {
                offset = s.mat_vec(&offset);
            }
            comp.extend(expansions.iter().map(|e| add(&offset, e)));
        }
        union.extend(comp.iter().cloned());
        components.push(comp.into_iter().collect());
    }
    Ok(SpectrumSet {
        cycles: cycles.to_vec(),
        s,
        l: dual.digits().to_vec(),
        level,
        components,
        elements: union.into_iter().collect(),
    })
}

/// Dual digit sets for `R = pI_d`, `B = {0, e_1, ..., e_d}`, `d <= 3`, when one
/// exists (p even for d = 1, 3; p a multiple of 3 for d = 2).
pub fn sierpinski_dual_digits(p: i64, d: usize) -> Option<Vec<Vector>> {
    match d {
        1 if p % 2 == 0 => Some(vec![vec![int(0)], vec![int(p / 2)]]),
        2 if p % 3 == 0 => {
            let a = 2 * p / 3;
            Some(vec![vec![int(0), int(0)], vec![int(a), int(-a)], vec![int(-a), int(a)]])
        }
        3 if p % 2 == 0 => {
            let h = p / 2;
            Some(vec![
                vec![int(0), int(0), int(0)],
                vec![int(h), int(h), int(0)],
                vec![int(0), int(h), int(h)],
                vec![int(h), int(0), int(h)],
            ])
        }
        _ => None,
    }
}

pub fn sierpinski_triple(p: i64, d: usize) -> Result<HadamardTriple> {
    let l = sierpinski_dual_digits(p, d)
        .ok_or_else(|| AifsError::Unsupported(format!("no dual digit set for d = {d}, p = {p}")))?;
    check_hadamard(&ExpansiveIntMatrix::scalar(p, d)?, &standard_simplex_digits(d), &l)
}

/// `L = { j m v_0 : j = 0..d }` with `v_0 = (1, ..., d)` and `m = p / (d + 1)`.
pub fn thpmuld_triple(p: i64, d: usize) -> Result<HadamardTriple> {
    let n = d as i64 + 1;
    if p % n != 0 || p < 2 {
        return Err(AifsError::InvalidSystem(format!("p = {p} is not a multiple of d + 1 = {n}")));
    }
    let m = p / n;
    let l: Vec<Vector> = (0..n).map(|j| (1..=d as i64).map(|i| int(j * m * i)).collect()).collect();
    check_hadamard(&ExpansiveIntMatrix::scalar(p, d)?, &standard_simplex_digits(d), &l)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThpmuldResult {
    pub p: i64,
    pub d: usize,
    pub discovery: CycleDiscovery,
    pub spectrum: SpectrumSet,
}

/// Spectrum for `p` divisible by `d + 1`, generated from the discovered cycles.
pub fn thpmuld_spectrum(p: i64, d: usize, level: usize) -> Result<ThpmuldResult> {
    let triple = thpmuld_triple(p, d)?;
    let triple = triple.require_certified()?.clone();
    let discovery = discover_cycles(&triple, MAX_PERIOD)?;
    let dual = crate::hadamard::make_dual_pair(&triple)?.dual;
    let spectrum = spectrum_from_cycles(&dual, &discovery.wb_cycles, level)?;
    Ok(ThpmuldResult { p, d, discovery, spectrum })
}

/// `z_0` and the family `{ p^n z_0 : n >= 1 }` from a decomposition
/// `d + 1 = sum_k q_k d_k` into proper divisors `d_k` of `p`.
#[derive(Clone, Debug, Serialize)]
pub struct PropdivFamily {
    pub p: i64,
    pub d: usize,
    #[serde(serialize_with = "crate::linalg::ser_vector")]
    pub z0: Vector,
    /// `m_B(z_0) = 0` certified exactly.
    pub certified_zero: bool,
}

impl PropdivFamily {
    /// `p^n z_0` for `n = 1..=count`.
    pub fn members(&self, count: usize) -> Vec<Vector> {
        let mut out = Vec::with_capacity(count);
        let mut cur = self.z0.clone();
        let p = int(self.p);
        for _ in 0..count {
            cur = cur.iter().map(|c| c * &p).collect();
            out.push(cur.clone());
        }
        out
    }

    pub fn system(&self) -> Result<AffineSystem> {
        AffineSystem::uniform(ExpansiveIntMatrix::scalar(self.p, self.d)?, standard_simplex_digits(self.d))
    }
}

/// `decomposition` lists pairs `(q_k, d_k)`.
pub fn propdiv_family(p: i64, d: usize, decomposition: &[(u32, i64)]) -> Result<PropdivFamily> {
    let malformed = |msg: String| AifsError::InvalidSystem(format!("malformed decomposition: {msg}"));
    for &(_, dk) in decomposition {
        if dk < 2 || dk >= p || p % dk != 0 {
            return Err(malformed(format!("{dk} is not a proper divisor (>= 2) of {p}")));
        }
    }
    let total: i64 = decomposition.iter().map(|&(q, dk)| q as i64 * dk).sum();
    if total != d as i64 + 1 {
        return Err(malformed(format!("sum q_k d_k = {total}, expected d + 1 = {}", d + 1)));
    }
    let mut z0: Vector = decomposition
        .iter()
        .flat_map(|&(q, dk)| (0..q).flat_map(move |_| (0..dk).map(move |j| rat(j, dk))))
        .collect();
    // the leading 0 plays the role of the constant term of m_B
    z0.remove(0);
    let sys = AffineSystem::uniform(ExpansiveIntMatrix::scalar(p, d)?, standard_simplex_digits(d))?;
    let certified_zero = mb_vanishes(sys.digits(), sys.weights(), &z0)?;
    Ok(PropdivFamily { p, d, z0, certified_zero })
}
