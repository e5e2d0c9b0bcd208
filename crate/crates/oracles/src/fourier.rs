//! Direct partial sums of the harmonic series behind the tail.

use std::f64::consts::PI;

/// Ladder frequency `α_k`: `2kπ/τ` (`odd = false`) or `(2k-1)π/τ`.
pub fn frequency(tau: f64, odd: bool, k: usize) -> f64 {
    if odd {
        (2 * k - 1) as f64 * PI / tau
    } else {
        2.0 * k as f64 * PI / tau
    }
}

/// `Σ_{k=1}^{terms} α_k^{-m}·cos(α_k x)` for even `m`, `sin` for odd `m`.
/// Summed from the smallest terms up to limit rounding.
pub fn harmonic_partial_sum(tau: f64, odd: bool, m: u32, x: f64, terms: usize) -> f64 {
    (1..=terms)
        .rev()
        .map(|k| {
            let alpha = frequency(tau, odd, k);
            let trig = if m.is_multiple_of(2) {
                (alpha * x).cos()
            } else {
                (alpha * x).sin()
            };
            trig / alpha.powi(m as i32)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel() {
        let s = harmonic_partial_sum(2.0 * PI, false, 2, 0.0, 100_000);
        assert!((s - PI * PI / 6.0).abs() < 1e-4);
    }
}
