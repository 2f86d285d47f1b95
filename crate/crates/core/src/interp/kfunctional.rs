use serde::Serialize;

use crate::bfs::{BfsSpec, FunctionNorm};
use crate::error::{Error, Result};
use crate::numeric::{ellipsoid_unit_box, golden_section, integrate};

/// Two lattice norms on the same coordinates, with real-method parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationCouple {
    pub e0: BfsSpec,
    pub e1: BfsSpec,
    pub theta: f64,
    pub p: f64,
}

/// How to solve the K-functional minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMethod {
    /// One-dimensional reduction when either norm is `L^∞`, ellipsoid otherwise.
    Auto,
    /// Always the generic ellipsoid solver.
    Ellipsoid,
}

const ELLIPSOID_GAP: f64 = 1e-10;
const ELLIPSOID_ITERS: usize = 200_000;

impl InterpolationCouple {
    /// `p` must lie in `[1, ∞)`; `p ≥ 1` is what the K-method norm is defined for.
    pub fn new(e0: BfsSpec, e1: BfsSpec, theta: f64, p: f64) -> Result<Self> {
        if e0.base().len() != e1.base().len() {
            return Err(Error::Shape(format!(
                "E0 has {} coordinates, E1 has {}",
                e0.base().len(),
                e1.base().len()
            )));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Parameter(format!("θ = {theta} must lie in (0, 1)")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p = {p} must lie in [1, ∞)")));
        }
        Ok(InterpolationCouple { e0, e1, theta, p })
    }

    pub fn dim(&self) -> usize {
        self.e0.base().len()
    }

    /// `K(t, a) = inf { ‖a0‖_{E0} + t ‖a1‖_{E1} : a = a0 + a1 }`.
    pub fn k_functional(&self, t: f64, a: &[f64]) -> Result<f64> {
        self.k_functional_with(t, a, KMethod::Auto)
    }

    pub fn k_functional_with(&self, t: f64, a: &[f64], method: KMethod) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        self.e0.base().check_len(a, "a")?;
        let abs: Vec<f64> = a.iter().map(|v| v.abs()).collect();
        if abs.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let cap = self.e0.norm(&abs).min(t * self.e1.norm(&abs));
        let value = match method {
            KMethod::Auto if self.e1.is_infinite() => {
                sup_reduction(&abs, &self.e0, &self.e1, |c, rest| self.e0.norm(rest) + t * c)
            }
            KMethod::Auto if self.e0.is_infinite() => {
                sup_reduction(&abs, &self.e1, &self.e0, |c, rest| c + t * self.e1.norm(rest))
            }
            _ => self.ellipsoid(t, &abs)?,
        };
        Ok(value.min(cap))
    }

    /// Minimizes over `a0 = λ a`, `λ ∈ [0, 1]^n`: moving each coordinate of
    /// `a0` into the interval between 0 and `a_i` lowers both lattice norms.
    fn ellipsoid(&self, t: f64, abs: &[f64]) -> Result<f64> {
        let n = abs.len();
        let b0 = self.e0.base();
        let b1 = self.e1.base();
        // Coordinates free in one of the norms go entirely to that side.
        let mut fixed = vec![None; n];
        for i in 0..n {
            if abs[i] == 0.0 || b1.is_null_atom(i) {
                fixed[i] = Some(0.0);
            } else if b0.is_null_atom(i) {
                fixed[i] = Some(1.0);
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let split = |lam: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let mut a0 = vec![0.0; n];
            let mut a1 = vec![0.0; n];
            let mut k = 0;
            for i in 0..n {
                let l = match fixed[i] {
                    Some(l) => l,
                    None => {
                        k += 1;
                        lam[k - 1]
                    }
                };
                a0[i] = l * abs[i];
                a1[i] = (1.0 - l) * abs[i];
            }
            (a0, a1)
        };
        let oracle = |lam: &[f64]| {
            let (a0, a1) = split(lam);
            let v = self.e0.norm(&a0) + t * self.e1.norm(&a1);
            let g0 = self.e0.subgradient(&a0);
            let g1 = self.e1.subgradient(&a1);
            let g = free.iter().map(|&i| abs[i] * (g0[i] - t * g1[i])).collect();
            (v, g)
        };
        let m = ellipsoid_unit_box(free.len(), oracle, ELLIPSOID_GAP, ELLIPSOID_ITERS)?;
        Ok(m.value)
    }

    /// `‖a‖_{θ,p} = (∫_0^∞ (t^{−θ} K(t, a))^p dt/t)^{1/p}` to relative error `rtol`.
    ///
    /// Below `t_min`, `K(t) = t ‖a‖_{E1}`; above `t_max`, `K(t) = ‖a‖_{E0}`; both
    /// tails are integrated in closed form. The middle range is integrated in
    /// `s = ln t` by adaptive Gauss–Kronrod.
    pub fn real_interp_norm(&self, a: &[f64], rtol: f64) -> Result<f64> {
        self.e0.base().check_len(a, "a")?;
        let n0 = self.e0.norm(a);
        let n1 = self.e1.norm(a);
        if n0 == 0.0 && n1 == 0.0 {
            return Ok(0.0);
        }
        if n0 == 0.0 || n1 == 0.0 {
            return Err(Error::Domain("a is zero in one norm of the couple but not the other".into()));
        }
        let (th, p) = (self.theta, self.p);
        let k = |t: f64| self.k_functional(t, a);
        let cross = n0 / n1;
        let mut t_min = cross;
        for _ in 0..200 {
            if k(t_min)? >= t_min * n1 * (1.0 - 1e-12) {
                break;
            }
            t_min *= 0.5;
        }
        let mut t_max = cross;
        for _ in 0..200 {
            if k(t_max)? >= n0 * (1.0 - 1e-12) {
                break;
            }
            t_max *= 2.0;
        }
        let head = n1.powf(p) * t_min.powf((1.0 - th) * p) / ((1.0 - th) * p);
        let tail = n0.powf(p) * t_max.powf(-th * p) / (th * p);
        let middle = if t_max > t_min {
            let failed = std::cell::Cell::new(None);
            let f = |s: f64| {
                let t = s.exp();
                match k(t) {
                    Ok(v) => (t.powf(-th) * v).powf(p),
                    Err(e) => {
                        failed.set(Some(e));
                        0.0
                    }
                }
            };
            let scale = head + tail;
            let res = integrate(f, t_min.ln(), t_max.ln(), rtol * 0.5, rtol * 0.5 * scale, 4000);
            if let Some(e) = failed.take() {
                return Err(e);
            }
            res?.0
        } else {
            0.0
        };
        Ok((head + middle + tail).powf(1.0 / p))
    }
}

/// `min_c F(c, (|a| − c/s)_+)` where `s` are the `L^∞` scales: the `L^∞` part of
/// an optimal split is capped at level `c`. Null atoms of the `L^∞` side are
/// free there, so they never enter the other norm.
fn sup_reduction(abs: &[f64], other: &BfsSpec, sup: &BfsSpec, cost: impl Fn(f64, &[f64]) -> f64) -> f64 {
    let s = sup.scale();
    let null = sup.base();
    let rest = |c: f64| -> Vec<f64> {
        (0..abs.len())
            .map(|i| if null.is_null_atom(i) { 0.0 } else { (abs[i] - c / s[i]).max(0.0) })
            .collect()
    };
    let f = |c: f64| cost(c, &rest(c));
    let top = (0..abs.len())
        .filter(|&i| !null.is_null_atom(i))
        .map(|i| abs[i] * s[i])
        .fold(0.0, f64::max);
    // With L¹ on the other side the objective is piecewise linear in c, so its
    // minimum sits on a breakpoint c = s_i |a_i|.
    let mut best = f(0.0).min(f(top));
    for i in 0..abs.len() {
        if !null.is_null_atom(i) {
            best = best.min(f(abs[i] * s[i]));
        }
    }
    if other.p() != 1.0 && top > 0.0 {
        let (_, v) = golden_section(f, 0.0, top, top * 1e-13);
        best = best.min(v);
    }
    best
}

/// Checks on a grid of `t` values that `K(·, a)` is nondecreasing and concave
/// and `K(t, a)/t` nonincreasing. Returns the largest violation of each.
pub fn k_shape_violations(ts: &[f64], ks: &[f64]) -> (f64, f64, f64) {
    let mut mono: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    let mut concave: f64 = 0.0;
    for i in 1..ts.len() {
        mono = mono.max(ks[i - 1] - ks[i]);
        ratio = ratio.max(ks[i] / ts[i] - ks[i - 1] / ts[i - 1]);
    }
    for i in 1..ts.len().saturating_sub(1) {
        // K(t_i) must lie above the chord through its neighbours.
        let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
        let chord = (1.0 - w) * ks[i - 1] + w * ks[i + 1];
        concave = concave.max(chord - ks[i]);
    }
    let scale = ks.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    (mono / scale, concave / scale, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfs::{decreasing_rearrangement, FiniteMeasureSpace};

    fn couple(w: &[f64], p0: f64, p1: f64) -> InterpolationCouple {
        let mu = FiniteMeasureSpace::new(w.to_vec()).unwrap();
        InterpolationCouple::new(BfsSpec::new(mu.clone(), p0).unwrap(), BfsSpec::new(mu, p1).unwrap(), 0.5, 2.0).unwrap()
    }

    #[test]
    fn l1_linf_examples() {
        let c = couple(&[1.0, 1.0], 1.0, f64::INFINITY);
        for t in [0.1, 0.5, 1.0, 2.0, 3.0, 100.0] {
            assert!((c.k_functional(t, &[1.0, 1.0]).unwrap() - t.min(2.0)).abs() < 1e-12);
        }
        assert_eq!(c.k_functional(1.0, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(c.k_functional(0.0, &[1.0, 1.0]).is_err());
        assert!((c.k_functional(1e6, &[3.0, -1.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn matches_rearrangement_with_weights() {
        let w = [0.5, 1.25, 0.0, 2.0];
        let a = [3.0, -1.0, 50.0, 0.5];
        let c = couple(&w, 1.0, f64::INFINITY);
        let r = decreasing_rearrangement(&a, c.e0.base()).unwrap();
        for t in [0.01, 0.3, 0.5, 1.0, 1.7, 3.0, 3.75, 10.0] {
            let k = c.k_functional(t, &a).unwrap();
            assert!((k - r.primitive(t)).abs() < 1e-12, "t = {t}");
            let ke = c.k_functional_with(t, &a, KMethod::Ellipsoid).unwrap();
            assert!((ke - r.primitive(t)).abs() < 1e-7, "t = {t}: {ke}");
        }
    }

    #[test]
    fn swapped_couple_agrees_with_ellipsoid() {
        let c = couple(&[1.0, 2.0, 0.5], f64::INFINITY, 2.0);
        let a = [1.0, -2.0, 4.0];
        for t in [0.2, 1.0, 5.0] {
            let k = c.k_functional(t, &a).unwrap();
            let ke = c.k_functional_with(t, &a, KMethod::Ellipsoid).unwrap();
            assert!((k - ke).abs() < 1e-7, "t = {t}: {k} vs {ke}");
        }
    }

    #[test]
    fn real_norm_closed_form() {
        let c = couple(&[1.0, 1.0], 1.0, f64::INFINITY);
        let v = c.real_interp_norm(&[1.0, 1.0], 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        assert_eq!(c.real_interp_norm(&[0.0, 0.0], 1e-4).unwrap(), 0.0);
        let v2 = c.real_interp_norm(&[2.0, 2.0], 1e-10).unwrap();
        assert!((v2 - 4.0).abs() < 1e-8);
    }

    #[test]
    fn couple_rejects_p_below_one() {
        let mu = FiniteMeasureSpace::counting(2);
        assert!(InterpolationCouple::new(BfsSpec::l1(mu.clone()), BfsSpec::linf(mu), 0.5, 0.5).is_err());
    }
}
