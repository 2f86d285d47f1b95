use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bfs::{BfsSpec, FunctionNorm};
use crate::error::{Error, Result};

/// The Calderón–Lozanovskii product `Y0^{1−θ} Y1^θ` over a shared measure space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalderonSpace {
    pub y0: BfsSpec,
    pub y1: BfsSpec,
    pub theta: f64,
}

/// An optimal decomposition `|x| = |x0|^{1−θ} |x1|^θ` and its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalderonNorm {
    pub value: f64,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    pub iterations: usize,
}

const MAX_NEWTON: usize = 200;

impl CalderonSpace {
    pub fn new(y0: BfsSpec, y1: BfsSpec, theta: f64) -> Result<Self> {
        if y0.base() != y1.base() {
            return Err(Error::Shape("Y0 and Y1 must share a measure space".into()));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Parameter(format!("θ = {theta} must lie in (0, 1)")));
        }
        Ok(CalderonSpace { y0, y1, theta })
    }

    /// `inf ‖x0‖^{1−θ} ‖x1‖^θ` over `|x| ≤ |x0|^{1−θ} |x1|^θ`.
    ///
    /// When either factor is `L^∞` the optimum is explicit. Otherwise, with the
    /// constraint active, `x0 = |x| e^{θu}` and `x1 = |x| e^{−(1−θ)u}`, and
    /// `(1−θ) log ‖x0‖ + θ log ‖x1‖` is a smooth convex function of `u`
    /// (a sum of log-sum-exps), invariant under adding a constant to `u`. One
    /// coordinate is pinned and the rest found by damped Newton.
    pub fn norm(&self, x: &[f64]) -> Result<CalderonNorm> {
        let mu = self.y0.base();
        mu.check_len(x, "x")?;
        let th = self.theta;
        let n = x.len();
        let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let support: Vec<usize> = (0..n).filter(|&i| !mu.is_null_atom(i) && ax[i] > 0.0).collect();
        if support.is_empty() {
            return Ok(CalderonNorm { value: 0.0, x0: ax.clone(), x1: ax, iterations: 0 });
        }
        if self.y0 == self.y1 {
            let value = self.y0.norm(&ax);
            return Ok(CalderonNorm { value, x0: ax.clone(), x1: ax, iterations: 0 });
        }
        if self.y1.is_infinite() {
            let s = self.y1.scale();
            let mut x0 = ax.clone();
            let mut x1 = ax.clone();
            for &i in &support {
                x1[i] = 1.0 / s[i];
                x0[i] = (ax[i] * s[i].powf(th)).powf(1.0 / (1.0 - th));
            }
            let value = self.y0.norm(&x0).powf(1.0 - th);
            return Ok(CalderonNorm { value, x0, x1, iterations: 0 });
        }
        if self.y0.is_infinite() {
            let s = self.y0.scale();
            let mut x0 = ax.clone();
            let mut x1 = ax.clone();
            for &i in &support {
                x0[i] = 1.0 / s[i];
                x1[i] = (ax[i] * s[i].powf(1.0 - th)).powf(1.0 / th);
            }
            let value = self.y1.norm(&x1).powf(th);
            return Ok(CalderonNorm { value, x0, x1, iterations: 0 });
        }
        self.newton(&ax, &support)
    }

    fn newton(&self, ax: &[f64], support: &[usize]) -> Result<CalderonNorm> {
        let th = self.theta;
        let m = support.len();
        let w = self.y0.base().weights();
        let (p0, p1) = (self.y0.p(), self.y1.p());
        // log of w s |x|^p per support atom, for both factors.
        let l0: Vec<f64> = support.iter().map(|&i| (w[i] * self.y0.scale()[i]).ln() + p0 * ax[i].ln()).collect();
        let l1: Vec<f64> = support.iter().map(|&i| (w[i] * self.y1.scale()[i]).ln() + p1 * ax[i].ln()).collect();

        // log-sum-exp of l + a u and the softmax weights.
        let lse = |l: &[f64], a: f64, u: &[f64]| -> (f64, Vec<f64>) {
            let e: Vec<f64> = l.iter().zip(u).map(|(l, u)| l + a * u).collect();
            let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ex: Vec<f64> = e.iter().map(|v| (v - top).exp()).collect();
            let s: f64 = ex.iter().sum();
            (top + s.ln(), ex.into_iter().map(|v| v / s).collect())
        };
        let eval = |u: &[f64]| -> (f64, Vec<f64>, Vec<f64>) {
            let (a, pi0) = lse(&l0, p0 * th, u);
            let (b, pi1) = lse(&l1, -p1 * (1.0 - th), u);
            ((1.0 - th) * a / p0 + th * b / p1, pi0, pi1)
        };

        let mut u = vec![0.0; m];
        let (mut f, mut pi0, mut pi1) = eval(&u);
        let scale = th * (1.0 - th);
        let mut iterations = 0;
        let mut converged = m == 1;
        while !converged && iterations < MAX_NEWTON {
            iterations += 1;
            let k = m - 1;
            let grad = DVector::from_iterator(k, (0..k).map(|i| scale * (pi0[i] - pi1[i])));
            if grad.amax() <= 1e-14 {
                converged = true;
                break;
            }
            let mut h = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    let d = if i == j { 1.0 } else { 0.0 };
                    h[(i, j)] = scale
                        * (th * p0 * (d * pi0[i] - pi0[i] * pi0[j]) + (1.0 - th) * p1 * (d * pi1[i] - pi1[i] * pi1[j]));
                }
            }
            let step = match h.clone().cholesky() {
                Some(c) => c.solve(&grad),
                None => grad.clone(),
            };
            let decrement = grad.dot(&step);
            // f − f* ≈ decrement / 2 near the optimum; below this it is lost in rounding of f.
            if decrement <= 1e-15 * f.abs().max(1.0) {
                converged = true;
                break;
            }
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = (0..m).map(|i| if i < k { u[i] - t * step[i] } else { 0.0 }).collect();
                let (ft, a, b) = eval(&trial);
                if ft <= f - 1e-4 * t * decrement || t < 1e-12 {
                    if ft <= f {
                        u = trial;
                        f = ft;
                        pi0 = a;
                        pi1 = b;
                    }
                    break;
                }
                t *= 0.5;
            }
            if t < 1e-12 || decrement.abs() <= 1e-28 {
                // No further decrease is representable; accept if the gradient is tiny.
                let g = (0..k).map(|i| scale * (pi0[i] - pi1[i]).abs()).fold(0.0, f64::max);
                converged = g <= 1e-10;
                if !converged {
                    return Err(Error::numeric("Calderón optimizer stalled", vec![f.exp(), g]));
                }
            }
        }
        if !converged {
            let g = (0..m).map(|i| scale * (pi0[i] - pi1[i]).abs()).fold(0.0, f64::max);
            return Err(Error::numeric("Calderón optimizer hit its iteration budget", vec![f.exp(), g]));
        }
        let mut x0 = ax.to_vec();
        let mut x1 = ax.to_vec();
        for (k, &i) in support.iter().enumerate() {
            x0[i] = ax[i] * (th * u[k]).exp();
            x1[i] = ax[i] * (-(1.0 - th) * u[k]).exp();
        }
        let value = self.y0.norm(&x0).powf(1.0 - th) * self.y1.norm(&x1).powf(th);
        Ok(CalderonNorm { value, x0, x1, iterations })
    }
}

/// Largest relative shortfall of `|x0|^{1−θ}|x1|^θ` below `|x|` on positive-weight atoms.
pub fn decomposition_gap(space: &CalderonSpace, x: &[f64], dec: &CalderonNorm) -> f64 {
    let mu = space.y0.base();
    let th = space.theta;
    (0..x.len())
        .filter(|&i| !mu.is_null_atom(i))
        .map(|i| {
            let prod = dec.x0[i].abs().powf(1.0 - th) * dec.x1[i].abs().powf(th);
            (x[i].abs() - prod) / x[i].abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}
