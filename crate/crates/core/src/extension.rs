//! McShane and Whitney envelopes, the atom-by-atom a.e. extension, and the
//! coordinatewise extension into `ℓ^∞(I)`.

use serde::Serialize;

use crate::bfs::{BfsSpec, FiniteMeasureSpace, FunctionNorm};
use crate::error::{Error, Result, Witness};
use crate::map::SampledMap;
use crate::metric::{lipschitz_constant, FiniteMetricSpace};
use crate::par;
use crate::tol;

/// Constants measured on an extended map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    /// The constant the extension was built with.
    pub given: f64,
    /// Lipschitz constant of the extension under the range norm.
    pub classical: f64,
    /// Pointwise a.e. constant of the extension, for function-valued ranges.
    pub pointwise: Option<f64>,
    /// φ-Lipschitz constant, for measure-based extensions.
    pub phi: Option<f64>,
}

/// `|T̂_i(x)| ≤ K d(x, x0) + ‖T(x0)‖_∞` for all `x` and coordinates `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub anchor: usize,
    /// Largest `|T̂_i(x)| − K d(x, x0) − ‖T(x0)‖_∞`; nonpositive when the bound holds.
    pub max_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub point: usize,
    /// `max |T̂(x)(w) − T(x)(w)|` over atoms of positive weight.
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionResult {
    /// The extension on every point of the metric space.
    pub extended: SampledMap,
    pub constants: ConstantReport,
    /// One entry per point of the original domain.
    pub agreement: Vec<Agreement>,
    pub boundedness: Option<BoundednessReport>,
}

impl ExtensionResult {
    pub fn max_discrepancy(&self) -> f64 {
        self.agreement.iter().map(|a| a.discrepancy).fold(0.0, f64::max)
    }
}

fn check_constant(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Parameter(format!("K = {k} must be a nonnegative real")));
    }
    Ok(())
}

fn check_nonempty(map: &SampledMap) -> Result<()> {
    if map.is_empty() {
        return Err(Error::Domain("the subset S has no points".into()));
    }
    Ok(())
}

fn check_scalar(map: &SampledMap) -> Result<()> {
    if map.atoms() != 1 {
        return Err(Error::Shape(format!("expected a real-valued map, got {} columns", map.atoms())));
    }
    Ok(())
}

/// First pair `(x, y)` of domain points and atom `w` with
/// `|T(x)(w) − T(y)(w)| > K d(x, y)`, restricted to atoms where `atom_ok` holds.
fn pointwise_violation(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    k: f64,
    atom_ok: impl Fn(usize) -> bool + Sync + Send,
) -> Option<(usize, usize, usize)> {
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    par::find_first(pairs.len(), |p| {
        let (a, b) = pairs[p];
        let bound = k * space.d(dom[a], dom[b]);
        (0..map.atoms())
            .filter(|&w| atom_ok(w))
            .find(|&w| tol::exceeds_rel((map.row(a)[w] - map.row(b)[w]).abs(), bound, tol::EXACT))
            .map(|w| (dom[a], dom[b], w))
    })
}

/// Per-atom envelope `sign · max_u {sign · r_u(w) − K d(x, u)}` at every point of `space`.
fn envelope(space: &FiniteMetricSpace, map: &SampledMap, k: f64, sign: f64) -> Vec<Vec<f64>> {
    let dom = map.domain();
    par::map_indices(space.len(), |x| {
        (0..map.atoms())
            .map(|w| {
                let best = (0..map.len())
                    .map(|u| sign * map.row(u)[w] - k * space.d(x, dom[u]))
                    .fold(f64::NEG_INFINITY, f64::max);
                sign * best
            })
            .collect()
    })
}

fn agreement(map: &SampledMap, extended: &[Vec<f64>], mu: &FiniteMeasureSpace) -> Vec<Agreement> {
    map.domain()
        .iter()
        .enumerate()
        .map(|(k, &x)| Agreement {
            point: x,
            discrepancy: (0..map.atoms())
                .filter(|&w| !mu.is_null_atom(w))
                .map(|w| (extended[x][w] - map.row(k)[w]).abs())
                .fold(0.0, f64::max),
        })
        .collect()
}

fn scalar_extend(space: &FiniteMetricSpace, map: &SampledMap, k: f64, sign: f64) -> Result<ExtensionResult> {
    check_constant(k)?;
    check_nonempty(map)?;
    check_scalar(map)?;
    map.check_points(space)?;
    if let Some((x, y, _)) = pointwise_violation(space, map, k, |_| true) {
        return Err(Error::precondition(
            format!("K = {k} is below the Lipschitz ratio of T on S"),
            Witness::Pair { x, y },
        ));
    }
    let values = envelope(space, map, k, sign);
    let agreement = agreement(map, &values, map.range().base());
    let extended = SampledMap::total(values, map.range().clone())?;
    let classical = lipschitz_constant(space, &extended, extended.range())?.value;
    Ok(ExtensionResult {
        extended,
        constants: ConstantReport { given: k, classical, pointwise: None, phi: None },
        agreement,
        boundedness: None,
    })
}

/// `T^M(x) = max_{u ∈ S} {T(u) − K d(x, u)}`, the smallest `K`-Lipschitz extension.
pub fn mcshane_extend(space: &FiniteMetricSpace, map: &SampledMap, k: f64) -> Result<ExtensionResult> {
    scalar_extend(space, map, k, 1.0)
}

/// `T^W(x) = min_{u ∈ S} {T(u) + K d(x, u)}`, the largest `K`-Lipschitz extension.
pub fn whitney_extend(space: &FiniteMetricSpace, map: &SampledMap, k: f64) -> Result<ExtensionResult> {
    scalar_extend(space, map, k, -1.0)
}

/// The pointwise a.e. constant together with a pair and atom attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseConstant {
    pub value: f64,
    /// `(x, y, atom)`, ambient indices.
    pub witness: Option<(usize, usize, usize)>,
    pub degenerate: bool,
}

/// `max |T(x)(w) − T(y)(w)| / d(x, y)` over pairs and atoms of positive weight.
pub fn pointwise_ae_constant(space: &FiniteMetricSpace, map: &SampledMap) -> Result<PointwiseConstant> {
    map.check_points(space)?;
    if map.len() < 2 {
        return Ok(PointwiseConstant { value: 0.0, witness: None, degenerate: true });
    }
    let mu = map.range().base();
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    let (idx, value, atom) = par::max_by_index(pairs.len(), |p| {
        let (a, b) = pairs[p];
        let d = space.d(dom[a], dom[b]);
        let mut best = (0.0, 0);
        for w in (0..map.atoms()).filter(|&w| !mu.is_null_atom(w)) {
            let r = (map.row(a)[w] - map.row(b)[w]).abs() / d;
            if r > best.0 {
                best = (r, w);
            }
        }
        best
    })
    .expect("at least one pair");
    let (a, b) = pairs[idx];
    Ok(PointwiseConstant {
        value,
        witness: (value > 0.0).then_some((dom[a], dom[b], atom)),
        degenerate: false,
    })
}

/// `T̂(y)(w) = max_{x ∈ S} {r_x(w) − K d(x, y)}` on every atom, null atoms included.
pub fn pointwise_extend(space: &FiniteMetricSpace, map: &SampledMap, k: f64) -> Result<ExtensionResult> {
    check_constant(k)?;
    check_nonempty(map)?;
    map.check_points(space)?;
    let mu = map.range().base();
    if let Some((x, y, atom)) = pointwise_violation(space, map, k, |w| !mu.is_null_atom(w)) {
        return Err(Error::precondition(
            format!("K = {k} is below the pointwise ratio of T on S"),
            Witness::PairAtom { x, y, atom },
        ));
    }
    let values = envelope(space, map, k, 1.0);
    let agreement = agreement(map, &values, mu);
    let extended = SampledMap::total(values, map.range().clone())?;
    let classical = lipschitz_constant(space, &extended, extended.range())?.value;
    let pointwise = pointwise_ae_constant(space, &extended)?.value;
    Ok(ExtensionResult {
        extended,
        constants: ConstantReport { given: k, classical, pointwise: Some(pointwise), phi: None },
        agreement,
        boundedness: None,
    })
}

/// Largest violation of `|T̂(x)(w) − T(y)(w)| ≤ K d(x, y)` over `x ∈ M`,
/// `y ∈ S` and atoms of positive weight; nonpositive when the sandwich holds.
pub fn sandwich_excess(space: &FiniteMetricSpace, map: &SampledMap, result: &ExtensionResult) -> f64 {
    let k = result.constants.given;
    let mu = map.range().base();
    let ext = &result.extended;
    let per_point = par::map_indices(space.len(), |x| {
        let mut worst = f64::NEG_INFINITY;
        for (j, &y) in map.domain().iter().enumerate() {
            for w in (0..map.atoms()).filter(|&w| !mu.is_null_atom(w)) {
                worst = worst.max((ext.row(x)[w] - map.row(j)[w]).abs() - k * space.d(x, y));
            }
        }
        worst
    });
    per_point.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBound {
    pub achieved: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Lipschitz constant of a pointwise extension under `L^p(μ)` against
/// `K μ(Ω)^{1/p}` (`K` for `p = ∞`).
pub fn norm_constant_bounds(space: &FiniteMetricSpace, result: &ExtensionResult, p: f64) -> Result<NormBound> {
    let mu = result.extended.range().base().clone();
    let k = result.constants.given;
    let bound = if p.is_infinite() { k } else { k * mu.total().powf(1.0 / p) };
    let lp = BfsSpec::new(mu, p)?;
    let achieved = lipschitz_constant(space, &result.extended, &lp)?.value;
    Ok(NormBound { achieved, bound, holds: !tol::exceeds(achieved, bound, tol::EXACT) })
}

/// Extends each coordinate of a map into `ℓ^∞(I)` by McShane with the same `K`.
///
/// Every coordinate counts, so the range is taken with counting measure.
pub fn coordinatewise_extend_linf(space: &FiniteMetricSpace, map: &SampledMap, k: f64) -> Result<ExtensionResult> {
    check_constant(k)?;
    check_nonempty(map)?;
    map.check_points(space)?;
    let range = BfsSpec::linf(FiniteMeasureSpace::counting(map.atoms()));
    let map = map.with_range(range.clone())?;
    if let Some((x, y, _)) = pointwise_violation(space, &map, k, |_| true) {
        return Err(Error::precondition(
            format!("K = {k} is below the sup-norm Lipschitz ratio of T on S"),
            Witness::Pair { x, y },
        ));
    }
    let values = envelope(space, &map, k, 1.0);
    let agreement = agreement(&map, &values, range.base());

    let anchor = map.domain()[0];
    let anchor_norm = range.norm(map.row(0));
    let max_excess = (0..space.len())
        .map(|x| {
            let top = values[x].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            top - k * space.d(x, anchor) - anchor_norm
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let boundedness = BoundednessReport {
        anchor,
        max_excess,
        holds: !tol::exceeds_rel(max_excess + anchor_norm, anchor_norm, tol::EXACT),
    };

    let extended = SampledMap::total(values, range)?;
    let classical = lipschitz_constant(space, &extended, extended.range())?.value;
    Ok(ExtensionResult {
        extended,
        constants: ConstantReport { given: k, classical, pointwise: None, phi: None },
        agreement,
        boundedness: Some(boundedness),
    })
}
