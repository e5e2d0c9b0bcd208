//! Spectral method of steps.
//!
//! Each delay interval is represented by values at Chebyshev–Lobatto points.
//! Writing `w = y - b·z`, where `z` is the solution one delay back, the
//! equation becomes `w' = a·w + (ab + c)·z`, so
//! `y(u) = e^{au}(y(0) - b·z(0)) + b·z(u) + (ab + c)e^{au}∫₀^u e^{-av}z(v)dv`.
//! No derivative of the history is needed. The integral is done on the
//! Chebyshev expansion; the node count doubles until two resolutions agree.

use std::f64::consts::PI;

const MIN_NODES: usize = 16;
const MAX_NODES: usize = 512;

/// One interval: values at `u_j = τ(1 + cos(jπ/n))/2`, `j = 0..=n`.
#[derive(Debug, Clone)]
struct Segment {
    values: Vec<f64>,
}

fn nodes(n: usize, tau: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| 0.5 * tau * (1.0 + (j as f64 * PI / n as f64).cos()))
        .collect()
}

impl Segment {
    fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Barycentric interpolation on `[0, τ]`.
    fn eval(&self, tau: f64, u: f64) -> f64 {
        let n = self.n();
        let xs = nodes(n, tau);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, x) in xs.iter().enumerate() {
            let diff = u - x;
            if diff == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w * self.values[j] / diff;
            den += w / diff;
        }
        num / den
    }
}

/// Chebyshev coefficients of the interpolant through Lobatto values.
fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    (0..=n)
        .map(|k| {
            let mut sum = 0.0;
            for (j, v) in values.iter().enumerate() {
                let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
                sum += weight * v * ((j * k) as f64 * PI / n as f64).cos();
            }
            let scale = if k == 0 || k == n { 1.0 } else { 2.0 };
            scale * sum / n as f64
        })
        .collect()
}

/// Values at the nodes of `∫_{x_n}^{x} g`, `x ∈ [-1, 1]`, with `x_n = -1`.
fn cumulative_integral(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let c = coefficients(values);
    // ∫T_0 = T_1, ∫T_1 = T_2/4, ∫T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1)).
    let mut big = vec![0.0; n + 2];
    for k in 0..=n {
        match k {
            0 => big[1] += c[0],
            1 => big[2] += c[1] / 4.0,
            _ => {
                big[k + 1] += c[k] / (2.0 * (k + 1) as f64);
                big[k - 1] -= c[k] / (2.0 * (k - 1) as f64);
            }
        }
    }
    let eval = |x: f64| -> f64 {
        let theta = x.clamp(-1.0, 1.0).acos();
        big.iter().enumerate().map(|(k, b)| b * (k as f64 * theta).cos()).sum()
    };
    let base = eval(-1.0);
    (0..=n).map(|j| eval((j as f64 * PI / n as f64).cos()) - base).collect()
}

/// Solution of `y' = a·y + b·y'(t-τ) + c·y(t-τ)` with history `h`, by
/// spectral collocation on each delay interval.
pub struct SpectralMos {
    tau: f64,
    segments: Vec<Segment>,
    history: Box<dyn Fn(f64) -> f64>,
}

impl SpectralMos {
    pub fn new(a: f64, b: f64, c: f64, tau: f64, history: impl Fn(f64) -> f64 + 'static, horizon: f64) -> Self {
        let count = ((horizon / tau).ceil() as usize).max(1);
        let mut segments: Vec<Segment> = Vec::with_capacity(count);
        let mut start = history(0.0);
        for _ in 0..count {
            let current = {
                let previous: Box<dyn Fn(f64) -> f64 + '_> = match segments.last() {
                    None => Box::new(|u: f64| history(u - tau)),
                    Some(seg) => Box::new(move |u: f64| seg.eval(tau, u)),
                };
                let solve = |n: usize| -> Segment {
                    let us = nodes(n, tau);
                    let g: Vec<f64> = us.iter().map(|&u| (-a * u).exp() * previous(u)).collect();
                    let integral = cumulative_integral(&g);
                    let z0 = previous(0.0);
                    let values = us
                        .iter()
                        .zip(&integral)
                        .map(|(&u, &i)| {
                            (a * u).exp() * (start - b * z0 + (a * b + c) * 0.5 * tau * i) + b * previous(u)
                        })
                        .collect();
                    Segment { values }
                };
                let mut n = MIN_NODES;
                let mut current = solve(n);
                while n < MAX_NODES {
                    let refined = solve(2 * n);
                    let scale = refined.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
                    let probes = (0..=16).map(|i| tau * (i as f64 + 0.37) / 17.0);
                    let diff = probes
                        .map(|u| (refined.eval(tau, u) - current.eval(tau, u)).abs())
                        .fold(0.0, f64::max);
                    current = refined;
                    n *= 2;
                    if diff <= 1e-13 * scale {
                        break;
                    }
                }
                current
            };
            start = current.values[0];
            segments.push(current);
        }
        Self {
            tau,
            segments,
            history: Box::new(history),
        }
    }

    pub fn horizon(&self) -> f64 {
        self.segments.len() as f64 * self.tau
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        if t < 0.0 {
            return (self.history)(t);
        }
        let index = ((t / self.tau).floor() as usize).min(self.segments.len() - 1);
        self.segments[index].eval(self.tau, t - index as f64 * self.tau)
    }
}
