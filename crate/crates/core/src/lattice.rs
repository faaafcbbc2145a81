//! The digit lattice `Gamma`, its dual and lattice points in a box.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{AifsError, Result};
use crate::ifs::BoundingBox;
use crate::linalg::{common_denominator, is_integral, sub, to_f64, ExpansiveIntMatrix, Rational, RationalMatrix, Vector};

/// Lattice generated by the columns of an invertible rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    basis: RationalMatrix,
    inverse: RationalMatrix,
}

impl LatticeBasis {
    pub fn new(basis: RationalMatrix) -> Result<Self> {
        let inverse = basis.inverse()?;
        Ok(Self { basis, inverse })
    }

    pub fn integer(d: usize) -> Self {
        Self::new(RationalMatrix::identity(d)).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn is_member(&self, x: &[Rational]) -> bool {
        is_integral(&self.inverse.mat_vec(x))
    }

    /// Index-free comparison: equal as sets.
    pub fn same_lattice(&self, other: &LatticeBasis) -> bool {
        self.basis.columns().iter().all(|c| other.is_member(c)) && other.basis.columns().iter().all(|c| self.is_member(c))
    }

    pub fn contains_integer_lattice(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::from_integer(1.into());
            self.is_member(&e)
        })
    }

    pub fn is_invariant_under(&self, s: &ExpansiveIntMatrix) -> bool {
        self.basis.columns().iter().all(|c| self.is_member(&s.mat_vec(c)))
    }

    /// Lattice points inside `bx`, in lexicographic order.
    pub fn points_in_box(&self, bx: &BoundingBox, cap: usize) -> Result<Vec<Vector>> {
        let d = self.dim();
        let inv = self.inverse.to_f64();
        let mut ranges = Vec::with_capacity(d);
        let mut count: f64 = 1.0;
        for i in 0..d {
            let (mut lo, mut hi) = (0.0, 0.0);
            for j in 0..d {
                let a = inv[i * d + j];
                let (u, v) = (a * bx.lo[j], a * bx.hi[j]);
                lo += u.min(v);
                hi += u.max(v);
            }
            let lo = (lo - 1e-9).ceil() as i64;
            let hi = (hi + 1e-9).floor() as i64;
            count *= (hi - lo + 1).max(0) as f64;
            ranges.push((lo, hi));
        }
        if count > cap as f64 {
            return Err(AifsError::BudgetExceeded(format!("{count:.0} lattice candidates exceed cap {cap}")));
        }
        let mut out = Vec::new();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return Ok(out);
        }
        let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let zr: Vector = z.iter().map(|&v| Rational::from_integer(v.into())).collect();
            let x = self.basis.mat_vec(&zr);
            if bx.contains(&x.iter().map(to_f64).collect::<Vec<_>>()) {
                out.push(x);
            }
            let mut i = 0;
            loop {
                if i == d {
                    out.sort();
                    return Ok(out);
                }
                if z[i] < ranges[i].1 {
                    z[i] += 1;
                    break;
                }
                z[i] = ranges[i].0;
                i += 1;
            }
        }
    }
}

impl Serialize for LatticeBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cols: Vec<Vec<String>> = self
            .basis
            .columns()
            .iter()
            .map(|c| c.iter().map(crate::linalg::format_rational).collect())
            .collect();
        cols.serialize(s)
    }
}

/// Row Hermite normal form of an integer generator list; returns the nonzero rows.
pub fn hermite_rows(mut rows: Vec<Vec<BigInt>>, d: usize) -> Vec<Vec<BigInt>> {
    let mut pivot = 0;
    for col in 0..d {
        if pivot == rows.len() {
            break;
        }
        loop {
            let best = (pivot..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot, best);
            let mut done = true;
            for r in (pivot + 1)..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[pivot][col]);
                let (head, tail) = rows.split_at_mut(r);
                for (x, y) in tail[0].iter_mut().zip(&head[pivot]) {
                    *x -= &q * y;
                }
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot == rows.len() || rows[pivot][col].is_zero() {
            continue;
        }
        if rows[pivot][col].is_negative() {
            for x in rows[pivot].iter_mut() {
                *x = -x.clone();
            }
        }
        for r in 0..pivot {
            let q = rows[r][col].div_floor(&rows[pivot][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(pivot);
            for (x, y) in head[r].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        pivot += 1;
    }
    rows.truncate(pivot);
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaResult {
    pub basis: LatticeBasis,
    /// Number of digit levels that were needed before the lattice stabilised.
    pub depth_used: usize,
}

/// `Gamma`, generated by all `sum_{k <= n} R^k b_k`.
///
/// With `b_0` a fixed digit the group is generated by the constant words
/// `sum_{k <= n} R^k b_0` and the single-digit changes `R^k (b - b_0)`. Once a
/// full level adds nothing new, no later level can either.
pub fn build_gamma(r: &ExpansiveIntMatrix, digits: &[Vector], depth: usize) -> Result<GammaResult> {
    let d = r.dim();
    if digits.is_empty() {
        return Err(AifsError::RankDeficient { rank: 0, dim: d });
    }
    let base = digits.iter().find(|b| b.iter().all(Zero::is_zero)).unwrap_or(&digits[0]).clone();
    let scale = common_denominator(digits.iter().flatten());
    let scale_r = Rational::from_integer(scale.clone());
    let to_int = |v: &Vector| -> Vec<BigInt> { v.iter().map(|x| (x * &scale_r).to_integer()).collect() };

    let mut deltas: Vec<Vector> = digits.iter().map(|b| sub(b, &base)).collect();
    let mut word = base.clone();
    let mut power_base = base.clone();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut last: Option<Vec<Vec<BigInt>>> = None;
    for level in 0..=depth {
        rows.push(to_int(&word));
        rows.extend(deltas.iter().map(&to_int));
        rows = hermite_rows(rows, d);
        if rows.len() == d && last.as_ref() == Some(&rows) {
            return Ok(GammaResult { basis: lattice_from_rows(&rows, &scale)?, depth_used: level });
        }
        last = Some(rows.clone());
        deltas = deltas.iter().map(|v| r.mat_vec(v)).collect();
        power_base = r.mat_vec(&power_base);
        word = crate::linalg::add(&word, &power_base);
    }
    if rows.len() == d {
        return Ok(GammaResult { basis: lattice_from_rows(&rows, &scale)?, depth_used: depth });
    }
    Err(AifsError::RankDeficient { rank: rows.len(), dim: d })
}

fn lattice_from_rows(rows: &[Vec<BigInt>], scale: &BigInt) -> Result<LatticeBasis> {
    let cols: Vec<Vector> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::new(x.clone(), scale.clone())).collect())
        .collect();
    LatticeBasis::new(RationalMatrix::from_columns(&cols)?)
}

/// `Gamma^o = { x : beta . x in Z for all beta in Gamma }`, basis `M^{-T}`.
pub fn dual_lattice(gamma: &LatticeBasis) -> Result<LatticeBasis> {
    LatticeBasis::new(gamma.inverse.transpose())
}
