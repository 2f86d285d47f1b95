//! Seeded randomized suites over the generators in [`crate::gen`].
//!
//! Case `i` of a suite draws from `gen::stream(seed, i)`, so a failing case can
//! be regenerated on its own. Each check reports the worst case over the suite
//! and names it in the witness.

use rand::Rng;

use crate::bfs::{decreasing_rearrangement, set_function, BfsSpec, FunctionNorm, FiniteMeasureSpace, SetFunctionKind, SetFunctionTable};
use crate::check::Check;
use crate::error::{Result, Witness};
use crate::extension::{mcshane_extend, norm_constant_bounds, pointwise_ae_constant, pointwise_extend, whitney_extend};
use crate::gen;
use crate::interp::{interp_domination_check, interpolated_lipschitz_check, k_shape_violations, CalderonSpace, InterpolationCouple};
use crate::map::SampledMap;
use crate::measure_extension::{l1_zero_norm, measure_extend, verify_nu, y_lipschitz_constant};
use crate::metric::{factorize, induce_universal_map, lipschitz_constant};
use crate::par;
use crate::tol;

/// Largest value of a metric over the cases of a suite.
#[derive(Debug, Clone, Copy)]
struct Worst {
    value: f64,
    case: usize,
}

impl Worst {
    fn new() -> Self {
        Worst { value: f64::NEG_INFINITY, case: 0 }
    }

    fn push(&mut self, case: usize, v: f64) {
        if v > self.value || (v.is_nan() && !self.value.is_nan()) {
            *self = Worst { value: v, case };
        }
    }

    fn at_most(&self, name: &str, bound: f64, tol: f64) -> Check {
        Check::at_most(name, self.value, bound, tol, Witness::Indices { indices: vec![self.case] })
    }
}

/// Runs `case` on every index in parallel and folds each metric to its worst value.
fn over_cases<const M: usize>(count: usize, case: impl Fn(usize) -> [f64; M] + Sync + Send) -> [Worst; M] {
    let rows = par::map_indices(count, case);
    let mut out = [Worst::new(); M];
    for (i, row) in rows.into_iter().enumerate() {
        for (w, v) in out.iter_mut().zip(row) {
            w.push(i, v);
        }
    }
    out
}

fn or_nan(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// McShane and Whitney envelopes of random real maps, and the quotient
/// factorization of the McShane extension with both canonical universal maps.
pub fn envelope_suite(seed: u64, count: usize) -> Vec<Check> {
    let [agree, lip, order, ident, proj, univ] = over_cases(count, |i| {
        let c = gen::scalar_case(&mut gen::stream(seed, i as u64), 8, 4);
        let (m, w) = match (mcshane_extend(&c.space, &c.map, c.k), whitney_extend(&c.space, &c.map, c.k)) {
            (Ok(m), Ok(w)) => (m, w),
            _ => return [f64::NAN; 6],
        };
        let order = (0..c.space.len())
            .map(|x| m.extended.row(x)[0] - w.extended.row(x)[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let scalar = BfsSpec::scalar();
        let factored = (|| -> Result<[f64; 3]> {
            let f = factorize(&c.space, &m.extended, &scalar, c.k)?;
            let check = f.check(&c.space, &scalar);
            let identity: Vec<usize> = (0..c.space.len()).collect();
            let direct = induce_universal_map(&c.space, &c.space, &identity, m.extended.values(), &f, &scalar)?;
            let qspace = f.quotient.as_metric_space(c.space.labels())?;
            let through = induce_universal_map(&c.space, &qspace, &f.quotient.projection, &f.factored, &f, &scalar)?;
            let univ = direct.factor_error.max(through.factor_error).max(direct.lipschitz.max(through.lipschitz) - 1.0);
            Ok([check.identity_error, check.projection_lipschitz, univ])
        })();
        let [ident, proj, univ] = factored.unwrap_or([f64::NAN; 3]);
        [
            m.max_discrepancy().max(w.max_discrepancy()),
            m.constants.classical.max(w.constants.classical) / c.k,
            order,
            ident,
            proj,
            univ,
        ]
    });
    vec![
        agree.at_most("envelopes/agreement", 0.0, tol::EXACT),
        lip.at_most("envelopes/lipschitz-ratio", 1.0, tol::EXACT),
        order.at_most("envelopes/mcshane-below-whitney", 0.0, tol::EXACT),
        ident.at_most("envelopes/factorization-identity", 0.0, tol::EXACT),
        proj.at_most("envelopes/projection-lipschitz", 1.0, tol::EXACT),
        univ.at_most("envelopes/universal-map", 0.0, tol::EXACT),
    ]
}

/// Atom-by-atom extension with null atoms, the `L^p` bounds on its classical
/// constant, and independence from values on null atoms.
pub fn pointwise_suite(seed: u64, count: usize) -> Vec<Check> {
    let [agree, ratio, nulls, p1, p2, pinf] = over_cases(count, |i| {
        let mut rng = gen::stream(seed, i as u64);
        let c = gen::pointwise_case(&mut rng, 8, 4, 10);
        let Ok(r) = pointwise_extend(&c.space, &c.map, c.k) else { return [f64::NAN; 6] };
        let mu = c.map.range().base();
        let shifted: Vec<Vec<f64>> = c
            .map
            .values()
            .iter()
            .map(|row| row.iter().enumerate().map(|(w, v)| if mu.is_null_atom(w) { v + rng.gen_range(-50.0..50.0) } else { *v }).collect())
            .collect();
        let nulls = SampledMap::new(c.map.domain().to_vec(), shifted, c.map.range().clone())
            .and_then(|m| pointwise_extend(&c.space, &m, c.k))
            .map(|s| {
                let mut worst: f64 = 0.0;
                for x in 0..c.space.len() {
                    for w in (0..mu.len()).filter(|&w| !mu.is_null_atom(w)) {
                        worst = worst.max((s.extended.row(x)[w] - r.extended.row(x)[w]).abs());
                    }
                }
                worst
            });
        let bound = |p: f64| or_nan(norm_constant_bounds(&c.space, &r, p).map(|b| b.achieved - b.bound));
        let pw = or_nan(pointwise_ae_constant(&c.space, &r.extended).map(|p| p.value));
        [r.max_discrepancy(), pw / c.k, or_nan(nulls), bound(1.0), bound(2.0), bound(f64::INFINITY)]
    });
    vec![
        agree.at_most("pointwise/agreement", 0.0, tol::EXACT),
        ratio.at_most("pointwise/constant-ratio", 1.0, tol::EXACT),
        nulls.at_most("pointwise/null-atom-independence", 0.0, 0.0),
        p1.at_most("pointwise/l1-bound", 0.0, tol::EXACT),
        p2.at_most("pointwise/l2-bound", 0.0, tol::EXACT),
        pinf.at_most("pointwise/linf-bound", 0.0, tol::EXACT),
    ]
}

/// Extension with `φ = K μ` into `L¹`, `L²` and `L^∞` (cycled by case).
pub fn measure_suite(seed: u64, count: usize) -> Vec<Check> {
    let [nu, agree, ylip] = over_cases(count, |i| {
        let y_p = [1.0, 2.0, f64::INFINITY][i % 3];
        let c = gen::measure_case(&mut gen::stream(seed, i as u64), 6, 8, y_p);
        let failing = match verify_nu(&c.space, &c.map, &c.phi) {
            Ok((_, reports)) => reports.iter().filter(|r| !r.passes()).count() as f64,
            Err(_) => f64::NAN,
        };
        let y = c.map.range().clone();
        let Ok(r) = measure_extend(&c.space, &c.map, &c.phi, &y) else { return [failing.max(1.0), f64::NAN, f64::NAN] };
        let ylip = or_nan(y_lipschitz_constant(&c.space, &r.extended, &y).map(|p| p.value / c.k));
        [failing, r.max_discrepancy(), ylip]
    });
    vec![
        nu.at_most("measure/nu-failures", 0.0, 0.0),
        agree.at_most("measure/agreement", 0.0, tol::EXACT),
        ylip.at_most("measure/y-lipschitz-ratio", 1.0, tol::EXACT),
    ]
}

/// `‖f‖₁ ≤ 2‖f‖_{1,0} ≤ 2‖f‖₁`, and the positive/negative-part formula against
/// the supremum over all subsets.
pub fn l1_zero_suite(seed: u64, count: usize) -> Vec<Check> {
    let [equiv, shortcut] = over_cases(count, |i| {
        let mut rng = gen::stream(seed, i as u64);
        let n = rng.gen_range(1..=10);
        let nulls = rng.gen_range(0..=n / 3);
        let mu = gen::measure(&mut rng, n, nulls);
        let f = gen::vector(&mut rng, n, 10.0);
        let l1 = mu.integral(&f.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let l10 = l1_zero_norm(&f, &mu);
        let sup = mu.subset_integrals(&f).into_iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        [(l1 - 2.0 * l10).max(2.0 * l10 - 2.0 * l1), (l10 - sup).abs() / l1.max(1.0)]
    });
    vec![
        equiv.at_most("l1-zero/equivalence", 0.0, 1e-12),
        shortcut.at_most("l1-zero/shortcut-vs-enumeration", 0.0, 1e-12),
    ]
}

/// Exponent pairs and `θ` values for the Calderón product of two `L^p` spaces.
pub const CALDERON_GRID: [(f64, f64, f64); 9] = [
    (1.0, f64::INFINITY, 0.25),
    (1.0, f64::INFINITY, 0.5),
    (1.0, f64::INFINITY, 0.75),
    (1.0, 2.0, 0.25),
    (1.0, 2.0, 0.5),
    (1.0, 2.0, 0.75),
    (2.0, f64::INFINITY, 0.25),
    (2.0, f64::INFINITY, 0.5),
    (2.0, f64::INFINITY, 0.75),
];

/// The product `(L^{p0})^{1−θ}(L^{p1})^θ` against the `L^{p_θ}` norm, and the
/// quality of the returned decomposition.
pub fn calderon_suite(seed: u64, count: usize) -> Vec<Check> {
    let [rel, gap] = over_cases(count, |i| {
        let mut rng = gen::stream(seed, i as u64);
        let n = rng.gen_range(1..=8);
        let nulls = rng.gen_range(0..=n / 4);
        let mu = gen::measure(&mut rng, n, nulls);
        let x = gen::vector(&mut rng, n, 5.0);
        let mut worst = [0.0_f64; 2];
        for (p0, p1, th) in CALDERON_GRID {
            let c = CalderonSpace::new(BfsSpec::new(mu.clone(), p0).unwrap(), BfsSpec::new(mu.clone(), p1).unwrap(), th)
                .expect("grid parameters are valid");
            let pt = 1.0 / ((1.0 - th) / p0 + th / p1);
            let exact = BfsSpec::new(mu.clone(), pt).unwrap().norm(&x);
            match c.norm(&x) {
                Ok(r) => {
                    worst[0] = worst[0].max((r.value - exact).abs() / exact.max(f64::MIN_POSITIVE));
                    worst[1] = worst[1].max(crate::interp::decomposition_gap(&c, &x, &r));
                }
                Err(_) => return [f64::NAN; 2],
            }
        }
        worst
    });
    vec![
        rel.at_most("calderon/closed-form-relative-error", 0.0, tol::OPTIMIZED),
        gap.at_most("calderon/decomposition-gap", 0.0, tol::OPTIMIZED),
    ]
}

/// `t` values `10^{-3}, …, 10^3`, log-spaced.
pub fn log_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (count - 1) as f64)).collect()
}

/// `K(t, a; L¹, L^∞)` against `∫_0^t a*(s) ds`, plus the shape of `K(·, a)`.
pub fn kfunctional_suite(seed: u64, count: usize) -> Vec<Check> {
    let ts = log_grid(20);
    let [err, mono, concave, ratio] = over_cases(count, |i| {
        let mut rng = gen::stream(seed, i as u64);
        let n = rng.gen_range(1..=8);
        let mu = gen::measure(&mut rng, n, 0);
        let a = gen::vector(&mut rng, n, 5.0);
        let couple = InterpolationCouple::new(BfsSpec::l1(mu.clone()), BfsSpec::linf(mu.clone()), 0.5, 1.0).unwrap();
        let star = decreasing_rearrangement(&a, &mu).unwrap();
        let mut ks = Vec::with_capacity(ts.len());
        let mut err: f64 = 0.0;
        for &t in &ts {
            let Ok(k) = couple.k_functional(t, &a) else { return [f64::NAN; 4] };
            let exact = star.primitive(t);
            err = err.max((k - exact).abs() / exact.max(1.0));
            ks.push(k);
        }
        let (m, c, r) = k_shape_violations(&ts, &ks);
        [err, m, c, r]
    });
    vec![
        err.at_most("kfunctional/rearrangement-error", 0.0, tol::OPTIMIZED),
        mono.at_most("kfunctional/monotonicity", 0.0, tol::OPTIMIZED),
        concave.at_most("kfunctional/concavity", 0.0, tol::OPTIMIZED),
        ratio.at_most("kfunctional/ratio-monotonicity", 0.0, tol::OPTIMIZED),
    ]
}

/// Interpolated Lipschitz constants into Calderón products, and the
/// interpolated domination inequality for linear maps on `(ℓ¹, ℓ^∞)`.
pub fn interpolation_suite(seed: u64, count: usize) -> Vec<Check> {
    let [lip, dom] = over_cases(count, |i| {
        let mut rng = gen::stream(seed, i as u64);
        let (p0, p1, th) = CALDERON_GRID[rng.gen_range(0..CALDERON_GRID.len())];
        let c = gen::pointwise_case(&mut rng, 6, 4, 6);
        let mu = c.map.range().base().clone();
        let y0 = BfsSpec::new(mu.clone(), p0).unwrap();
        let y1 = BfsSpec::new(mu.clone(), p1).unwrap();
        let lip = or_nan((|| {
            let k0 = lipschitz_constant(&c.space, &c.map, &y0)?.value;
            let k1 = lipschitz_constant(&c.space, &c.map, &y1)?.value;
            let cs = CalderonSpace::new(y0.clone(), y1.clone(), th)?;
            let r = interpolated_lipschitz_check(&c.space, &c.map, &cs, k0, k1)?;
            Ok(if r.bound > 0.0 { r.achieved / r.bound } else { r.achieved })
        })());
        let dom = or_nan(domination_ratio(&mut rng, th));
        [lip, dom]
    });
    vec![
        lip.at_most("interpolation/lipschitz-ratio", 1.0, tol::OPTIMIZED),
        dom.at_most("interpolation/domination-ratio", 1.0, 1e-5),
    ]
}

/// Largest ratio of the two sides of the interpolated domination inequality for
/// a random `3 × 3` map over 20 test vectors.
pub fn domination_ratio<R: Rng>(rng: &mut R, theta: f64) -> Result<f64> {
    let case = gen::domination_case(rng, 3, 3);
    let p = [1.0, 2.0][rng.gen_range(0..2)];
    let tests: Vec<Vec<f64>> = (0..20).map(|_| gen::vector(rng, 3, 3.0)).collect();
    let inputs = FiniteMeasureSpace::counting(3);
    let e = InterpolationCouple::new(BfsSpec::l1(inputs.clone()), BfsSpec::linf(inputs), theta, p)?;
    let y = InterpolationCouple::new(BfsSpec::l1(case.mu.clone()), BfsSpec::linf(case.mu.clone()), theta, p)?;
    let phi0 = proportional(&case.mu, case.k0)?;
    let phi1 = proportional(&case.mu, case.k1)?;
    Ok(interp_domination_check(&case.matrix, &e, &y, &phi0, &phi1, &tests)?.achieved)
}

/// `A ↦ k μ(A)`.
fn proportional(mu: &FiniteMeasureSpace, k: f64) -> Result<SetFunctionTable> {
    set_function(SetFunctionKind::IndicatorNorm { k, z: BfsSpec::l1(mu.clone()) })
}

/// Every suite, `count` cases each.
pub fn run_all(seed: u64, count: usize) -> Vec<Check> {
    let mut out = Vec::new();
    out.extend(envelope_suite(seed, count));
    out.extend(pointwise_suite(seed, count));
    out.extend(measure_suite(seed, count));
    out.extend(l1_zero_suite(seed, count));
    out.extend(calderon_suite(seed, count));
    out.extend(kfunctional_suite(seed, count));
    out.extend(interpolation_suite(seed, count));
    out.into_iter().map(|c| c.prefixed("suite")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_are_reproducible() {
        let a = run_all(3, 6);
        for c in &a {
            assert!(c.holds, "{c:?}");
        }
        assert_eq!(a, run_all(3, 6));
    }

    #[test]
    fn worst_keeps_first_maximum_and_nan() {
        let mut w = Worst::new();
        w.push(0, 1.0);
        w.push(1, 1.0);
        assert_eq!(w.case, 0);
        w.push(2, f64::NAN);
        w.push(3, 5.0);
        assert_eq!(w.case, 2);
    }
}
