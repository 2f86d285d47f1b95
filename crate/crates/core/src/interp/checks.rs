use serde::Serialize;

use super::calderon::CalderonSpace;
use super::kfunctional::InterpolationCouple;
use crate::bfs::{BfsSpec, FunctionNorm, SetFunctionTable};
use crate::error::{Error, Result, Witness};
use crate::extension::pointwise_ae_constant;
use crate::map::SampledMap;
use crate::measure_extension::phi_lipschitz_constant;
use crate::metric::{lipschitz_constant, FiniteMetricSpace};
use crate::par;
use crate::subset::{check_enumerable, Subset};
use crate::tol;

/// Outcome of an interpolated inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpReport {
    pub bound: f64,
    pub achieved: f64,
    pub holds: bool,
    /// Where `achieved` is attained.
    pub witness: Witness,
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn masked(f: &[f64], a: Subset) -> Vec<f64> {
    f.iter().enumerate().map(|(i, v)| if a.contains(i) { *v } else { 0.0 }).collect()
}

/// `‖T(x) − T(y)‖_{Y0^{1−θ}Y1^θ} ≤ K0^{1−θ} K1^θ d(x, y)` for a map that is
/// `K0`-Lipschitz into `Y0` and `K1`-Lipschitz into `Y1`.
pub fn interpolated_lipschitz_check(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    c: &CalderonSpace,
    k0: f64,
    k1: f64,
) -> Result<InterpReport> {
    for (y, k, name) in [(&c.y0, k0, "Y0"), (&c.y1, k1, "Y1")] {
        let got = lipschitz_constant(space, map, y)?;
        if tol::exceeds_rel(got.value, k, tol::EXACT) {
            let (x, y) = got.witness.expect("positive constant has a witness");
            return Err(Error::precondition(
                format!("T is not {k}-Lipschitz into {name} (constant {})", got.value),
                Witness::Pair { x, y },
            ));
        }
    }
    let bound = k0.powf(1.0 - c.theta) * k1.powf(c.theta);
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    let ratios = par::map_indices(pairs.len(), |p| {
        let (a, b) = pairs[p];
        c.norm(&diff(map.row(a), map.row(b))).map(|r| r.value / space.d(dom[a], dom[b]))
    });
    let mut best = (0.0, Witness::None);
    for (p, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if r > best.0 {
            best = (r, Witness::Pair { x: dom[pairs[p].0], y: dom[pairs[p].1] });
        }
    }
    Ok(InterpReport {
        bound,
        achieved: best.0,
        holds: !tol::exceeds(best.0, bound, tol::OPTIMIZED),
        witness: best.1,
    })
}

/// `‖(T(x) − T(y)) χ_A‖_{Y0^{1−θ}Y1^θ} ≤ φ0(A)^{1−θ} φ1(A)^θ d(x, y)` for a map
/// that is φ0-Lipschitz into `Y0` and φ1-Lipschitz into `Y1`.
///
/// `achieved` is the largest ratio of the two sides, so the bound is 1.
pub fn interpolated_phi_check(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    c: &CalderonSpace,
    phi0: &SetFunctionTable,
    phi1: &SetFunctionTable,
) -> Result<InterpReport> {
    let n = c.y0.base().len();
    check_enumerable(n)?;
    for (y, phi, name) in [(&c.y0, phi0, "Y0"), (&c.y1, phi1, "Y1")] {
        let got = phi_lipschitz_constant(space, map, phi, y)?;
        if tol::exceeds(got.value, 1.0, tol::EXACT) {
            let (x, y, subset) = got.witness.expect("positive constant has a witness");
            return Err(Error::precondition(
                format!("T is not φ-Lipschitz into {name} (ratio {})", got.value),
                Witness::PairSubset { x, y, subset },
            ));
        }
    }
    let th = c.theta;
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    let per_pair = par::map_indices(pairs.len(), |p| -> Result<(f64, Subset)> {
        let (a, b) = pairs[p];
        let dv = diff(map.row(a), map.row(b));
        let d = space.d(dom[a], dom[b]);
        let mut best = (0.0, Subset::EMPTY);
        for m in 1..1u32 << n {
            let s = Subset(m);
            let rhs = phi0.get(s).powf(1.0 - th) * phi1.get(s).powf(th);
            if rhs <= 0.0 {
                continue;
            }
            let r = c.norm(&masked(&dv, s))?.value / (rhs * d);
            if r > best.0 {
                best = (r, s);
            }
        }
        Ok(best)
    });
    let mut best = (0.0, Witness::None);
    for (p, r) in per_pair.into_iter().enumerate() {
        let (r, s) = r?;
        if r > best.0 {
            best = (r, Witness::PairSubset { x: dom[pairs[p].0], y: dom[pairs[p].1], subset: s });
        }
    }
    Ok(InterpReport { bound: 1.0, achieved: best.0, holds: !tol::exceeds(best.0, 1.0, tol::OPTIMIZED), witness: best.1 })
}

/// `|T(x)(w) − T(y)(w)| ≤ K0^{1−θ} K1^θ d(x, y)` on positive-weight atoms for a
/// map that is pointwise `K0`- and `K1`-Lipschitz a.e.
pub fn interpolated_pointwise_check(space: &FiniteMetricSpace, map: &SampledMap, theta: f64, k0: f64, k1: f64) -> Result<InterpReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!("θ = {theta} must lie in (0, 1)")));
    }
    let got = pointwise_ae_constant(space, map)?;
    let witness = match got.witness {
        Some((x, y, atom)) => Witness::PairAtom { x, y, atom },
        None => Witness::None,
    };
    for k in [k0, k1] {
        if tol::exceeds_rel(got.value, k, tol::EXACT) {
            return Err(Error::precondition(format!("T is not pointwise {k}-Lipschitz a.e."), witness));
        }
    }
    let bound = k0.powf(1.0 - theta) * k1.powf(theta);
    Ok(InterpReport { bound, achieved: got.value, holds: !tol::exceeds_rel(got.value, bound, tol::EXACT), witness })
}

/// A linear map `R^n → R^m` given by its rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearMap {
    pub rows: Vec<Vec<f64>>,
}

impl LinearMap {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix must be nonempty and rectangular".into()));
        }
        Ok(LinearMap { rows })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn outputs(&self) -> usize {
        self.rows.len()
    }

    pub fn inputs(&self) -> usize {
        self.rows[0].len()
    }
}

/// Relative accuracy for real-interpolation norms in domination checks; the
/// compared quantities are ratios of two quadratures.
const DOMINATION_RTOL: f64 = 1e-9;

/// `‖T(x) χ_A‖_{Ȳ_{θ,p}} ≤ φ0(A)^{1−θ} φ1(A)^θ ‖x‖_{Ē_{θ,p}}` over test vectors
/// and every subset `A` of the output atoms.
///
/// The hypotheses `‖T(x) χ_A‖_{Y0} ≤ φ0(A) ‖x‖_{E0}` and
/// `‖T(z) χ_A‖_{Y1} ≤ φ1(A) ‖z‖_{E1}` are verified on the test vectors (for `z`
/// the vectors and their pairwise differences). `achieved` is the largest ratio
/// of the two sides; the bound is 1.
pub fn interp_domination_check(
    t: &LinearMap,
    e: &InterpolationCouple,
    y: &InterpolationCouple,
    phi0: &SetFunctionTable,
    phi1: &SetFunctionTable,
    tests: &[Vec<f64>],
) -> Result<InterpReport> {
    let m = y.dim();
    if t.inputs() != e.dim() || t.outputs() != m {
        return Err(Error::Shape(format!(
            "matrix is {}×{} but the couples have {} inputs and {m} outputs",
            t.outputs(),
            t.inputs(),
            e.dim()
        )));
    }
    if e.theta != y.theta || e.p != y.p {
        return Err(Error::Parameter("both couples must use the same θ and p".into()));
    }
    check_enumerable(m)?;
    if phi0.atoms() != m || phi1.atoms() != m {
        return Err(Error::Shape("set functions must live on the output atoms".into()));
    }
    if let Some(k) = tests.iter().position(|x| x.len() != e.dim()) {
        return Err(Error::Shape(format!("test vector {k} has the wrong length")));
    }
    let hyp = |spec: &BfsSpec, phi: &SetFunctionTable, norm_in: &BfsSpec, x: &[f64]| -> Option<Subset> {
        let tx = t.apply(x);
        let nx = norm_in.norm(x);
        (1..1u32 << m)
            .map(Subset)
            .find(|&s| tol::exceeds_rel(spec.norm_on(&tx, s), phi.get(s) * nx, tol::EXACT))
    };
    for (k, x) in tests.iter().enumerate() {
        if let Some(subset) = hyp(&y.e0, phi0, &e.e0, x) {
            return Err(Error::precondition("hypothesis on (E0, Y0) fails on a test vector", Witness::Vector { index: k, subset }));
        }
        if let Some(subset) = hyp(&y.e1, phi1, &e.e1, x) {
            return Err(Error::precondition("hypothesis on (E1, Y1) fails on a test vector", Witness::Vector { index: k, subset }));
        }
    }
    for (i, j) in par::pairs(tests.len()) {
        let z = diff(&tests[i], &tests[j]);
        if hyp(&y.e1, phi1, &e.e1, &z).is_some() {
            return Err(Error::precondition(
                "hypothesis on (E1, Y1) fails on a difference of test vectors",
                Witness::Indices { indices: vec![i, j] },
            ));
        }
    }
    let th = e.theta;
    let per_vector = par::map_indices(tests.len(), |k| -> Result<(f64, Subset)> {
        let x = &tests[k];
        let nx = e.real_interp_norm(x, DOMINATION_RTOL)?;
        let tx = t.apply(x);
        let mut best = (0.0, Subset::EMPTY);
        for mm in 1..1u32 << m {
            let s = Subset(mm);
            let rhs = phi0.get(s).powf(1.0 - th) * phi1.get(s).powf(th) * nx;
            let v = masked(&tx, s);
            if rhs <= 0.0 {
                if v.iter().any(|c| *c != 0.0) && y.e0.norm(&v) > 0.0 {
                    return Ok((f64::INFINITY, s));
                }
                continue;
            }
            let lhs = y.real_interp_norm(&v, DOMINATION_RTOL)?;
            let r = lhs / rhs;
            if r > best.0 {
                best = (r, s);
            }
        }
        Ok(best)
    });
    let mut best = (0.0, Witness::None);
    for (k, r) in per_vector.into_iter().enumerate() {
        let (r, s) = r?;
        if r > best.0 {
            best = (r, Witness::Vector { index: k, subset: s });
        }
    }
    Ok(InterpReport { bound: 1.0, achieved: best.0, holds: !tol::exceeds(best.0, 1.0, 1e-5), witness: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfs::{set_function, FiniteMeasureSpace, SetFunctionKind};

    fn unit(n: usize, p: f64) -> BfsSpec {
        BfsSpec::new(FiniteMeasureSpace::counting(n), p).unwrap()
    }

    #[test]
    fn lipschitz_bound_arithmetic_and_constant_map() {
        let sp = FiniteMetricSpace::unlabeled(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = CalderonSpace::new(unit(2, 1.0), unit(2, f64::INFINITY), 0.5).unwrap();
        let t = SampledMap::total(vec![vec![1.0, 2.0], vec![1.0, 2.0]], unit(2, 1.0)).unwrap();
        let r = interpolated_lipschitz_check(&sp, &t, &c, 4.0, 1.0).unwrap();
        assert_eq!(r.bound, 2.0);
        assert_eq!(r.achieved, 0.0);
        assert!(r.holds);

        let t = SampledMap::total(vec![vec![0.0, 0.0], vec![1.0, 1.0]], unit(2, 1.0)).unwrap();
        let r = interpolated_lipschitz_check(&sp, &t, &c, 2.0, 1.0).unwrap();
        assert!((r.achieved - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            interpolated_lipschitz_check(&sp, &t, &c, 1.0, 1.0),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn phi_check_reduces_to_plain_check() {
        let sp = FiniteMetricSpace::unlabeled(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let y = unit(2, 2.0);
        let c = CalderonSpace::new(y.clone(), y.clone(), 0.4).unwrap();
        let phi = set_function(SetFunctionKind::IndicatorNorm { k: 3.0, z: y.clone() }).unwrap();
        let t = SampledMap::total(vec![vec![0.0, 1.0], vec![2.0, -1.0]], y.clone()).unwrap();
        let r = interpolated_phi_check(&sp, &t, &c, &phi, &phi).unwrap();
        let plain = phi_lipschitz_constant(&sp, &t, &phi, &y).unwrap();
        assert!((r.achieved - plain.value).abs() < 1e-12);
    }

    #[test]
    fn pointwise_check_with_equal_constants() {
        let sp = FiniteMetricSpace::unlabeled(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = SampledMap::total(vec![vec![0.0, 0.0], vec![0.5, -1.0]], unit(2, 1.0)).unwrap();
        let r = interpolated_pointwise_check(&sp, &t, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(r.bound, 1.0);
        assert!(r.holds);
    }

    #[test]
    fn domination_identity_and_zero() {
        let e = InterpolationCouple::new(unit(3, 1.0), unit(3, f64::INFINITY), 0.5, 2.0).unwrap();
        let phi = set_function(SetFunctionKind::IndicatorNorm { k: 1.0, z: unit(3, f64::INFINITY) }).unwrap();
        let tests = vec![vec![1.0, -2.0, 0.5], vec![0.0, 3.0, 1.0], vec![2.0, 2.0, 2.0]];
        let id = LinearMap::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let r = interp_domination_check(&id, &e, &e, &phi, &phi, &tests).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.achieved - 1.0).abs() < 1e-8);
        let zero = LinearMap::new(vec![vec![0.0; 3]; 3]).unwrap();
        let r = interp_domination_check(&zero, &e, &e, &phi, &phi, &tests).unwrap();
        assert_eq!(r.achieved, 0.0);
    }
}
