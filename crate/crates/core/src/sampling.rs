//! Low-discrepancy sample points.

/// Unique positive root of `x^{d+1} = x + 1`.
fn harmonious(d: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// First `count` points of the additive recurrence `frac(1/2 + n alpha)` with
/// `alpha_i = phi_d^{-i}`; the golden ratio for `d = 1`.
pub(crate) fn kronecker(d: usize, count: usize) -> Vec<Vec<f64>> {
    let g = harmonious(d);
    let alpha: Vec<f64> = (1..=d).map(|i| g.powi(-(i as i32))).collect();
    (1..=count)
        .map(|n| alpha.iter().map(|a| (0.5 + n as f64 * a).fract()).collect())
        .collect()
}
