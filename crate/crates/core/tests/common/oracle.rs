//! Reference computations written without the library's code paths.

use std::collections::HashMap;

/// Pairwise sign sum by explicit enumeration of all `k < j`.
pub fn brute_force_s(x: &[f64]) -> i64 {
    let mut s = 0i64;
    for k in 0..x.len() {
        for j in (k + 1)..x.len() {
            if x[j] > x[k] {
                s += 1;
            } else if x[j] < x[k] {
                s -= 1;
            }
        }
    }
    s
}

/// Tie-corrected variance of S, tie groups counted through a hash map of
/// the value bit patterns.
pub fn hand_variance(x: &[f64]) -> f64 {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for v in x {
        // +0.0 and -0.0 compare equal; fold them together.
        let key = if *v == 0.0 { 0 } else { v.to_bits() };
        *counts.entry(key).or_default() += 1;
    }
    let n = x.len() as f64;
    let mut total = n * (n - 1.0) * (2.0 * n + 5.0);
    for &q in counts.values() {
        let q = q as f64;
        total -= q * (q - 1.0) * (2.0 * q + 5.0);
    }
    total / 18.0
}

/// `erf(x)` by composite Simpson quadrature of `2/sqrt(pi) * exp(-t^2)`.
pub fn erf_quadrature(x: f64) -> f64 {
    let steps = 20_000usize;
    let h = x / steps as f64;
    let f = |t: f64| (-t * t).exp();
    let mut sum = f(0.0) + f(x);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
}

/// Two-sided normal p-value from the quadrature erf.
pub fn p_two_sided(z: f64) -> f64 {
    1.0 - erf_quadrature(z.abs() / std::f64::consts::SQRT_2)
}

/// Mann-Kendall z with the continuity correction, from first principles.
pub fn mk_z(x: &[f64]) -> f64 {
    let s = brute_force_s(x) as f64;
    let var = hand_variance(x);
    if var == 0.0 || s == 0.0 {
        0.0
    } else if s > 0.0 {
        (s - 1.0) / var.sqrt()
    } else {
        (s + 1.0) / var.sqrt()
    }
}

/// Sample-by-sample left-rectangle accumulation over `(t, v, i)` rows.
pub fn accumulate_energy(rows: &[(f64, f64, f64)]) -> f64 {
    let mut e = 0.0;
    let mut i = 0;
    while i + 1 < rows.len() {
        let (t0, v0, c0) = rows[i];
        let t1 = rows[i + 1].0;
        e += v0 * c0 * (t1 - t0);
        i += 1;
    }
    e
}
