//! Residues as limits, `c = lim_{s→r} (s - r)·F(s)`, by Richardson
//! extrapolation along a ray.

use num_complex::Complex64;

/// Extrapolates `g(h) = (h·dir)·F(r + h·dir)` to `h = 0` from `h = h0, h0/2, …`.
pub fn residue_limit<F: Fn(Complex64) -> Complex64>(f: F, r: Complex64, h0: f64, levels: usize) -> Complex64 {
    let dir = Complex64::new(1.0, 1.0) / 2f64.sqrt();
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let step = dir * h;
        let mut row = vec![step * f(r + step)];
        for j in 1..=i {
            let factor = 2f64.powi(j as i32);
            let improved = (row[j - 1] * factor - table[i - 1][j - 1]) / (factor - 1.0);
            row.push(improved);
        }
        table.push(row);
    }
    table[levels - 1][levels - 1]
}
