//! Small derivative-free and subgradient solvers, and adaptive quadrature.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimizes a convex (or unimodal) function on `[lo, hi]` by golden-section
/// search. Returns `(argmin, min)` once the bracket is narrower than `xtol`.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Result of a certified convex minimization.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// A lower bound on the true minimum.
    pub lower: f64,
    pub iterations: usize,
}

/// Minimizes a convex function over the box `[0, 1]^n` with the central-cut
/// ellipsoid method.
///
/// `oracle` returns the value and a subgradient. Objective cuts give the lower
/// bound `f(c) − sqrt(gᵀ P g)`, valid because the ellipsoid always contains a
/// minimizer. Stops when the best value is within `gap` of the best lower bound.
pub fn ellipsoid_unit_box<F>(n: usize, oracle: F, gap: f64, max_iter: usize) -> Result<Minimum>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    if n == 0 {
        let (v, _) = oracle(&[]);
        return Ok(Minimum { x: vec![], value: v, lower: v, iterations: 0 });
    }
    if n == 1 {
        return bisect_unit_interval(|x| oracle(&[x]), gap, max_iter);
    }
    let nf = n as f64;
    let mut c = DVector::from_element(n, 0.5);
    // Ball of radius sqrt(n)/2 around the centre contains the box.
    let mut p = DMatrix::<f64>::identity(n, n) * (nf / 4.0);
    let mut best = (f64::INFINITY, c.as_slice().to_vec());
    let mut lower = f64::NEG_INFINITY;
    for it in 0..max_iter {
        let g = if let Some(i) = (0..n).find(|&i| c[i] < 0.0 || c[i] > 1.0) {
            let mut g = DVector::zeros(n);
            g[i] = if c[i] < 0.0 { -1.0 } else { 1.0 };
            g
        } else {
            let (v, sub) = oracle(c.as_slice());
            if v < best.0 {
                best = (v, c.as_slice().to_vec());
            }
            let g = DVector::from_vec(sub);
            let width = (g.transpose() * &p * &g)[(0, 0)].max(0.0).sqrt();
            lower = lower.max(v - width);
            if best.0 - lower <= gap * best.0.abs().max(1.0) || width == 0.0 {
                return Ok(Minimum { x: best.1, value: best.0, lower, iterations: it });
            }
            g
        };
        let pg = &p * &g;
        let denom = (g.transpose() * &pg)[(0, 0)];
        if !(denom > 0.0) {
            break;
        }
        let gt = pg / denom.sqrt();
        c -= &gt / (nf + 1.0);
        p = (&p - (&gt * gt.transpose()) * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
        p = (&p + p.transpose()) * 0.5;
    }
    if best.0.is_finite() && best.0 - lower <= gap * best.0.abs().max(1.0) {
        return Ok(Minimum { x: best.1, value: best.0, lower, iterations: max_iter });
    }
    Err(Error::numeric("ellipsoid method did not certify the minimum", vec![best.0, lower]))
}

/// One-dimensional case: bisection on the sign of the subgradient.
fn bisect_unit_interval<F>(oracle: F, gap: f64, max_iter: usize) -> Result<Minimum>
where
    F: Fn(f64) -> (f64, Vec<f64>),
{
    let (mut a, mut b) = (0.0, 1.0);
    let mut best = (f64::INFINITY, 0.0);
    let mut lower = f64::NEG_INFINITY;
    for it in 0..max_iter {
        let m = 0.5 * (a + b);
        let (v, g) = oracle(m);
        if v < best.0 {
            best = (v, m);
        }
        let g = g[0];
        // Over [a, b] the function is at least f(m) + g (x − m).
        lower = lower.max(v - g.abs() * (b - a) / 2.0);
        if best.0 - lower <= gap * best.0.abs().max(1.0) || g == 0.0 {
            return Ok(Minimum { x: vec![best.1], value: best.0, lower: lower.min(best.0), iterations: it });
        }
        if g > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    for x in [0.0, 1.0] {
        let (v, _) = oracle(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    Err(Error::numeric("bisection did not certify the minimum", vec![best.0, lower]))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod-15 estimate and its difference from the embedded Gauss-7 rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to relative error `rtol`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimates fall below `rtol · |I|` (or `atol`). On failure the error carries
/// the current integral and error estimates.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64, atol: f64, max_panels: usize) -> Result<(f64, f64)> {
    let mut panels = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= (rtol * total.abs()).max(atol) {
            return Ok((total, err));
        }
        if panels.len() >= max_panels {
            return Err(Error::numeric("quadrature did not reach the requested accuracy", vec![total, err]));
        }
        let worst = (0..panels.len()).max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3)).unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
        let (x, _) = golden_section(|x| x, 1.0, 2.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn ellipsoid_minimizes_nonsmooth_convex() {
        // f(x) = |x0 − 0.2| + 2|x1 − 0.7| + |x2 − 1.5|, box-constrained minimum 0.5.
        let f = |x: &[f64]| {
            let v = (x[0] - 0.2).abs() + 2.0 * (x[1] - 0.7).abs() + (x[2] - 1.5).abs();
            let g = vec![(x[0] - 0.2).signum(), 2.0 * (x[1] - 0.7).signum(), (x[2] - 1.5).signum()];
            (v, g)
        };
        let m = ellipsoid_unit_box(3, f, 1e-9, 20000).unwrap();
        assert!((m.value - 0.5).abs() < 1e-8);
        assert!(m.lower <= m.value);
    }

    #[test]
    fn bisection_handles_one_dimension() {
        let m = ellipsoid_unit_box(1, |x: &[f64]| ((x[0] - 0.25).powi(2), vec![2.0 * (x[0] - 0.25)]), 1e-12, 200).unwrap();
        assert!((m.x[0] - 0.25).abs() < 1e-5);
    }

    #[test]
    fn quadrature_of_kinked_function() {
        let (v, _) = integrate(|x: f64| x.abs().min(1.0), -2.0, 3.0, 1e-12, 0.0, 10_000).unwrap();
        assert!((v - 4.0).abs() < 1e-10);
        let (v, _) = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-13, 0.0, 100).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }
}
