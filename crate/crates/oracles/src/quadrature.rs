//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> (Complex64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kron = f(centre) * WGK[7];
    let mut gauss = f(centre) * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// `∫_lo^hi f`, bisecting until each piece meets its share of `tol`
/// (absolute) or the depth limit is hit.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, tol: f64) -> Complex64 {
    fn recurse<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64, tol: f64, depth: u32) -> Complex64 {
        let (value, error) = kronrod(f, lo, hi);
        if error <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (lo + hi);
        recurse(f, lo, mid, 0.5 * tol, depth - 1) + recurse(f, mid, hi, 0.5 * tol, depth - 1)
    }
    recurse(&f, lo, hi, tol, 40)
}
