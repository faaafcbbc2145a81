//! Exact vanishing test for weighted sums of roots of unity.
//!
//! A sum `sum_j c_j * zeta_q^{a_j}` with rational `c_j` vanishes iff the
//! polynomial `P(t) = sum_j c_j t^{a_j}` is divisible by the cyclotomic
//! polynomial `Phi_q`. Instead of dividing by `Phi_q` (quadratic in `q`) we use
//! `t^q - 1 = Phi_q * Psi_q` and test `P * Psi_q == 0 (mod t^q - 1)`, which
//! costs `O(#terms * q)` once `Psi_q` is known.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{AifsError, Result};
use crate::linalg::Rational;

/// Largest common denominator accepted by the exact path.
pub const DENOMINATOR_CAP: u64 = 1_000_000;

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn mobius(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn mul_binomial(poly: &[i128], d: usize) -> Option<Vec<i128>> {
    // poly * (t^d - 1)
    let mut out = vec![0i128; poly.len() + d];
    for (i, &c) in poly.iter().enumerate() {
        out[i + d] = out[i + d].checked_add(c)?;
        out[i] = out[i].checked_sub(c)?;
    }
    Some(out)
}

fn div_binomial(poly: &[i128], d: usize) -> Option<Vec<i128>> {
    // exact quotient poly / (t^d - 1): poly[i] = q[i-d] - q[i]
    if poly.len() <= d {
        return None;
    }
    let len = poly.len() - d;
    let mut q = vec![0i128; len];
    for i in 0..len {
        let prev = if i >= d { q[i - d] } else { 0 };
        q[i] = prev.checked_sub(poly[i])?;
    }
    // remainder check on the top coefficients
    for i in len..poly.len() {
        let prev = if i >= d && i - d < len { q[i - d] } else { 0 };
        let cur = if i < len { q[i] } else { 0 };
        if prev - cur != poly[i] {
            return None;
        }
    }
    Some(q)
}

/// Product of `(t^d - 1)^{e_d}` over the given factors, multiplications first.
fn binomial_product(factors: &[(u64, i8)]) -> Option<Vec<i128>> {
    let mut poly = vec![1i128];
    for &(d, e) in factors.iter().filter(|(_, e)| *e > 0) {
        for _ in 0..e {
            poly = mul_binomial(&poly, d as usize)?;
        }
    }
    for &(d, e) in factors.iter().filter(|(_, e)| *e < 0) {
        for _ in 0..(-e) {
            poly = div_binomial(&poly, d as usize)?;
        }
    }
    Some(poly)
}

/// Coefficients (low degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Vec<i128> {
    assert!(n >= 1);
    let factors: Vec<(u64, i8)> = divisors(n).into_iter().map(|d| (d, mobius(n / d))).collect();
    binomial_product(&factors).expect("cyclotomic coefficients fit in i128")
}

/// `(t^q - 1) / Phi_q(t)`, i.e. the product of `Phi_d` over proper divisors `d` of `q`.
fn cofactor(q: u64) -> Option<Vec<i128>> {
    let factors: Vec<(u64, i8)> = divisors(q)
        .into_iter()
        .filter(|&d| d < q)
        .map(|d| (d, -mobius(q / d)))
        .collect();
    binomial_product(&factors)
}

fn lcm_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Decides exactly whether `sum_j c_j exp(2 pi i a_j / q)` is zero.
///
/// Exponents are taken modulo `q`; `q` must be at most [`DENOMINATOR_CAP`].
pub fn vanishing_sum(q: u64, terms: &[(u64, Rational)]) -> Result<bool> {
    if q == 0 {
        return Err(AifsError::Unsupported("root-of-unity order 0".into()));
    }
    if q > DENOMINATOR_CAP {
        return Err(AifsError::ExactnessUnavailable { q: q as u128, cap: DENOMINATOR_CAP });
    }
    let scale = lcm_denominators(terms.iter().map(|(_, c)| c));
    let mut sparse: std::collections::BTreeMap<u64, BigInt> = std::collections::BTreeMap::new();
    for (a, c) in terms {
        let scaled = (c * Rational::from_integer(scale.clone())).to_integer();
        *sparse.entry(a % q).or_insert_with(BigInt::zero) += scaled;
    }
    sparse.retain(|_, c| !c.is_zero());
    if sparse.is_empty() {
        return Ok(true);
    }
    let overflow = || AifsError::ExactnessUnavailable { q: q as u128, cap: DENOMINATOR_CAP };
    let coeffs: Vec<(usize, i128)> = sparse
        .into_iter()
        .map(|(a, c)| c.to_i128().map(|c| (a as usize, c)))
        .collect::<Option<_>>()
        .ok_or_else(overflow)?;
    let psi = cofactor(q).ok_or_else(overflow)?;
    let q = q as usize;
    let mut acc = vec![0i128; q];
    for &(a, c) in &coeffs {
        for (j, &p) in psi.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let slot = &mut acc[(a + j) % q];
            *slot = c
                .checked_mul(p)
                .and_then(|v| slot.checked_add(v))
                .ok_or_else(overflow)?;
        }
    }
    Ok(acc.iter().all(|c| c.is_zero()))
}

/// Reduces a list of rational phases `x_j` (meaning `exp(2 pi i x_j)`) to a
/// common order `q` and integer exponents in `0..q`.
pub fn phases_to_exponents(phases: &[Rational]) -> Result<(u64, Vec<u64>)> {
    let q = lcm_denominators(phases.iter());
    let q_u64 = match q.to_u64() {
        Some(v) if v <= DENOMINATOR_CAP => v,
        _ => {
            return Err(AifsError::ExactnessUnavailable {
                q: q.to_u128().unwrap_or(u128::MAX),
                cap: DENOMINATOR_CAP,
            })
        }
    };
    let exps = phases
        .iter()
        .map(|x| {
            let scaled = (x * Rational::from_integer(q.clone())).to_integer();
            let r = scaled.mod_floor(&q);
            debug_assert!(!r.is_negative());
            r.to_u64().expect("residue below cap")
        })
        .collect();
    Ok((q_u64, exps))
}

/// Exact test that `sum_j w_j exp(2 pi i x_j) = 0` for rational phases and weights.
pub fn phases_vanish(phases: &[Rational], weights: &[Rational]) -> Result<bool> {
    let (q, exps) = phases_to_exponents(phases)?;
    let terms: Vec<(u64, Rational)> = exps.into_iter().zip(weights.iter().cloned()).collect();
    vanishing_sum(q, &terms)
}
