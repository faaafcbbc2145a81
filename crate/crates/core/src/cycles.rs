//! `(S, L)`-cycles inside `Gamma^o ∩ X_L` and their `W_B` classification.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::hadamard::{make_dual_pair, HadamardTriple};
use crate::ifs::AffineSystem;
use crate::lattice::{build_gamma, dual_lattice, LatticeBasis};
use crate::linalg::{dot, format_vector, is_integral, sub, Rational, RationalMatrix, Vector};

/// Guard on cycle length.
pub const MAX_PERIOD: usize = 64;
/// Maximum number of lattice candidates inspected.
pub const CANDIDATE_CAP: usize = 1_000_000;

/// A cycle `points[i] = tau_{l_i}(points[i-1])` (indices mod the period).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub points: Vec<Vector>,
    /// Indices into `L`; `digit_word[i]` maps `points[i-1]` to `points[i]`.
    pub digit_word: Vec<usize>,
    pub is_wb_cycle: bool,
}

impl CycleRecord {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Re-applies the maps and checks the cycle equations exactly.
    pub fn verify(&self, sys_l: &AffineSystem) -> Result<bool> {
        let m = self.points.len();
        for i in 0..m {
            let prev = &self.points[(i + m - 1) % m];
            if sys_l.tau(self.digit_word[i], prev)? != self.points[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rotation starting at the lexicographically smallest point.
    fn canonical(mut self) -> Self {
        let start = (0..self.points.len()).min_by(|&a, &b| self.points[a].cmp(&self.points[b])).unwrap_or(0);
        self.points.rotate_left(start);
        self.digit_word.rotate_left(start);
        self
    }
}

impl Serialize for CycleRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pts: Vec<Vec<String>> = self.points.iter().map(|p| p.iter().map(crate::linalg::format_rational).collect()).collect();
        let mut st = s.serialize_struct("CycleRecord", 3)?;
        st.serialize_field("points", &pts)?;
        st.serialize_field("digit_word", &self.digit_word)?;
        st.serialize_field("is_wb_cycle", &self.is_wb_cycle)?;
        st.end()
    }
}

impl std::fmt::Display for CycleRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| format_vector(p)).collect();
        write!(f, "{{{}}}", pts.join(" -> "))
    }
}

/// Candidates: points of the dual lattice inside the bounding box of `X_L`.
pub fn enumerate_candidates(dual: &LatticeBasis, sys_l: &AffineSystem) -> Result<Vec<Vector>> {
    let bx = sys_l.bounding_box()?;
    dual.points_in_box(&bx, CANDIDATE_CAP)
}

/// Elementary cycles of the digit maps restricted to `candidates`.
///
/// An edge `x -> y` exists when `y = tau_l(x)`, equivalently `x = S y - l`.
pub fn find_cycles(sys_l: &AffineSystem, candidates: &[Vector], max_period: usize) -> Result<Vec<CycleRecord>> {
    let index: HashMap<&Vector, usize> = candidates.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let s = sys_l.matrix();
    // succ[x] = list of (y, l)
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); candidates.len()];
    for (yi, y) in candidates.iter().enumerate() {
        let sy = s.mat_vec(y);
        for (li, l) in sys_l.digits().iter().enumerate() {
            let x = sub(&sy, l);
            if let Some(&xi) = index.get(&x) {
                succ[xi].push((yi, li));
            }
        }
    }
    let mut cycles = Vec::new();
    for start in 0..candidates.len() {
        // paths through nodes with index >= start; each elementary cycle is
        // found once, from its smallest node
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut on_path = vec![false; candidates.len()];
        dfs(start, start, &succ, &mut stack, &mut on_path, max_period, &mut |path| {
            let points = path.iter().map(|&(n, _)| candidates[n].clone()).collect::<Vec<_>>();
            // path[i].1 is the digit taking path[i-1] to path[i]; path[0].1 closes the loop
            let word = path.iter().map(|&(_, l)| l).collect::<Vec<_>>();
            cycles.push(CycleRecord { points, digit_word: word, is_wb_cycle: false }.canonical());
        });
    }
    cycles.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(cycles)
}

fn dfs(
    start: usize,
    node: usize,
    succ: &[Vec<(usize, usize)>],
    stack: &mut Vec<(usize, usize)>,
    on_path: &mut [bool],
    max_period: usize,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    on_path[node] = true;
    if stack.is_empty() {
        stack.push((node, usize::MAX));
    }
    for &(next, l) in &succ[node] {
        if next == start {
            let mut path = stack.clone();
            path[0].1 = l;
            emit(&path);
        } else if next > start && !on_path[next] && stack.len() < max_period {
            stack.push((next, l));
            dfs(start, next, succ, stack, on_path, max_period, emit);
            stack.pop();
        }
    }
    on_path[node] = false;
    if stack.len() == 1 && stack[0].0 == node {
        stack.clear();
    }
}

/// `W_B(x) = 1` exactly: all `e^{2 pi i b.x}` coincide, i.e. `(b - b_0).x` is an integer.
pub fn wb_is_one(digits: &[Vector], x: &[Rational]) -> bool {
    let base = dot(&digits[0], x);
    digits.iter().all(|b| (dot(b, x) - &base).is_integer())
}

pub fn classify_wb(sys_b: &AffineSystem, cycles: Vec<CycleRecord>) -> Vec<CycleRecord> {
    cycles
        .into_iter()
        .map(|mut c| {
            c.is_wb_cycle = c.points.iter().all(|x| wb_is_one(sys_b.digits(), x));
            c
        })
        .collect()
}

/// Cycles obtained from primitive digit words of length `<= max_len`: the fixed
/// point of `tau_{w_m} o ... o tau_{w_1}` is solved exactly and the orbit kept
/// if `W_B = 1` along it. Independent of any lattice.
pub fn cycles_by_words(sys_l: &AffineSystem, sys_b: &AffineSystem, max_len: usize, budget: usize) -> Result<Vec<CycleRecord>> {
    let n = sys_l.len();
    let d = sys_l.dim();
    let s_inv = sys_l.matrix_inverse().clone();
    let mut found: BTreeSet<Vec<Vector>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut visited = 0usize;
    for len in 1..=max_len {
        let count = (n as f64).powi(len as i32);
        visited += count as usize;
        if visited > budget || count > budget as f64 {
            break;
        }
        // (S^{-len})
        let mut a_pow = RationalMatrix::identity(d);
        for _ in 0..len {
            a_pow = s_inv.mul(&a_pow);
        }
        let mut lhs = RationalMatrix::identity(d).rows();
        for (i, row) in lhs.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= a_pow.get(i, j);
            }
        }
        let lhs = RationalMatrix::new(lhs)?.inverse()?;
        let words: Vec<Vec<usize>> = (0..count as usize)
            .map(|mut code| {
                (0..len)
                    .map(|_| {
                        let l = code % n;
                        code /= n;
                        l
                    })
                    .collect()
            })
            .filter(|w: &Vec<usize>| is_primitive(w))
            .collect();
        let cycles: Vec<CycleRecord> = words
            .par_iter()
            .filter_map(|w| {
                // offset of the composition applied to 0
                let mut c = vec![Rational::zero(); d];
                for &l in w {
                    c = sys_l.tau(l, &c).ok()?;
                }
                let x = lhs.mat_vec(&c);
                let mut points = Vec::with_capacity(len);
                let mut cur = x;
                for &l in w {
                    cur = sys_l.tau(l, &cur).ok()?;
                    points.push(cur.clone());
                }
                if !points.iter().all(|p| wb_is_one(sys_b.digits(), p)) {
                    return None;
                }
                Some(CycleRecord { points, digit_word: w.clone(), is_wb_cycle: true }.canonical())
            })
            .collect();
        for c in cycles {
            if found.insert(c.points.clone()) {
                out.push(c);
            }
        }
    }
    out.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(out)
}

fn is_primitive(w: &[usize]) -> bool {
    let m = w.len();
    (1..m).filter(|p| m.is_multiple_of(*p)).all(|p| (0..m).any(|i| w[i] != w[i % p]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleMethod {
    /// `Gamma^o ∩ X_L` enumeration.
    Lattice,
    /// Primitive-word fixed points (used when `Gamma` is rank deficient).
    Words,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleDiscovery {
    pub method: CycleMethod,
    pub dual_lattice: Option<LatticeBasis>,
    pub candidates: usize,
    pub all_cycles: Vec<CycleRecord>,
    pub wb_cycles: Vec<CycleRecord>,
    /// Candidates lying on no cycle (transient or outside `X_L`).
    pub off_cycle_candidates: usize,
    pub notes: Vec<String>,
}

/// Default word length for the fallback search.
pub const WORD_MAX_LEN: usize = 6;
pub const WORD_BUDGET: usize = 200_000;

/// `W_B`-cycles of a certified triple, by the lattice route when `Gamma` has
/// full rank and by the word route otherwise.
pub fn discover_cycles(triple: &HadamardTriple, max_period: usize) -> Result<CycleDiscovery> {
    let pair = make_dual_pair(triple)?;
    let r = triple.matrix();
    let mut notes = Vec::new();
    match build_gamma(r, triple.b(), 32) {
        Ok(gamma) => {
            let dual = dual_lattice(&gamma.basis)?;
            if triple.b().iter().all(|b| is_integral(b)) && !dual.contains_integer_lattice() {
                notes.push("dual lattice does not contain Z^d".into());
            }
            if !dual.is_invariant_under(&r.transpose()) {
                notes.push("dual lattice is not S-invariant".into());
            }
            let candidates = enumerate_candidates(&dual, &pair.dual)?;
            let all = find_cycles(&pair.dual, &candidates, max_period)?;
            let on_cycle: BTreeSet<&Vector> = all.iter().flat_map(|c| c.points.iter()).collect();
            let off = candidates.len() - on_cycle.len();
            let classified = classify_wb(&pair.primal, all);
            let wb: Vec<CycleRecord> = classified.iter().filter(|c| c.is_wb_cycle).cloned().collect();
            Ok(CycleDiscovery {
                method: CycleMethod::Lattice,
                dual_lattice: Some(dual),
                candidates: candidates.len(),
                all_cycles: classified,
                wb_cycles: wb,
                off_cycle_candidates: off,
                notes,
            })
        }
        Err(AifsError::RankDeficient { rank, dim }) => {
            notes.push(format!(
                "Gamma has rank {rank} < {dim}; cycles found from primitive words of length <= {WORD_MAX_LEN}, completeness not certified"
            ));
            let wb = cycles_by_words(&pair.dual, &pair.primal, WORD_MAX_LEN.min(max_period), WORD_BUDGET)?;
            Ok(CycleDiscovery {
                method: CycleMethod::Words,
                dual_lattice: None,
                candidates: 0,
                all_cycles: wb.clone(),
                wb_cycles: wb,
                off_cycle_candidates: 0,
                notes,
            })
        }
        Err(e) => Err(e),
    }
}
