//! Finite metric spaces, map-induced pseudo-metrics and their metric quotients.
//!
//! Finite metric spaces are complete, so the completion of the quotient by the
//! pseudo-metric `d_T = ρ(T·, T·)/K` is the quotient itself. The maximality
//! property of that factorization is checked constructively by
//! [`induce_universal_map`].

use std::fmt;

use serde::Serialize;

use crate::bfs::FunctionNorm;
use crate::error::{Error, Result, Witness};
use crate::map::SampledMap;
use crate::par;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Finite,
    Nonnegative,
    ZeroDiagonal,
    Symmetry,
    Positivity,
    Triangle,
}

/// A violated metric axiom. For `Triangle`, `indices = [i, j, k]` means
/// `d(i, j) > d(i, k) + d(k, j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axiom {
            Axiom::Triangle => write!(
                f,
                "triangle inequality fails at ({}, {}) via {}",
                self.indices[0], self.indices[1], self.indices[2]
            ),
            other => write!(f, "{other:?} fails at {:?}", self.indices),
        }
    }
}

/// Lists every violated metric axiom. Pass `allow_zero = true` for pseudo-metrics.
fn check_axioms(dist: &[Vec<f64>], allow_zero: bool) -> Result<Vec<Violation>> {
    let n = dist.len();
    if let Some(i) = dist.iter().position(|r| r.len() != n) {
        return Err(Error::Shape(format!(
            "distance matrix row {i} has {} entries, expected {n}",
            dist[i].len()
        )));
    }
    let eps = tol::METRIC_AXIOM;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = dist[i][j];
            if !v.is_finite() {
                out.push(Violation { axiom: Axiom::Finite, indices: vec![i, j] });
            } else if v < 0.0 {
                out.push(Violation { axiom: Axiom::Nonnegative, indices: vec![i, j] });
            }
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    for i in 0..n {
        if dist[i][i].abs() > eps {
            out.push(Violation { axiom: Axiom::ZeroDiagonal, indices: vec![i] });
        }
    }
    for (i, j) in par::pairs(n) {
        let (a, b) = (dist[i][j], dist[j][i]);
        if (a - b).abs() > eps * a.abs().max(b.abs()).max(1.0) {
            out.push(Violation { axiom: Axiom::Symmetry, indices: vec![i, j] });
        }
        if !allow_zero && a <= eps {
            out.push(Violation { axiom: Axiom::Positivity, indices: vec![i, j] });
        }
    }
    let triangles = par::map_indices(n, |i| {
        let mut v = Vec::new();
        for j in i + 1..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = dist[i][k] + dist[k][j];
                if dist[i][j] > via + eps * via.max(1.0) {
                    v.push(Violation { axiom: Axiom::Triangle, indices: vec![i, j, k] });
                }
            }
        }
        v
    });
    out.extend(triangles.into_iter().flatten());
    Ok(out)
}

/// Empty iff `dist` is a metric within `1e-12`.
pub fn validate_metric(dist: &[Vec<f64>]) -> Result<Vec<Violation>> {
    check_axioms(dist, false)
}

/// Labeled points with a full distance matrix satisfying the metric axioms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != dist.len() {
            return Err(Error::Shape(format!("{} labels for {} points", labels.len(), dist.len())));
        }
        if dist.is_empty() {
            return Err(Error::Domain("metric space has no points".into()));
        }
        let report = validate_metric(&dist)?;
        if let Some(v) = report.first() {
            return Err(Error::Invalid(format!("not a metric: {v}")));
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Points labeled `p0, p1, ...`.
    pub fn unlabeled(dist: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, dist)
    }

    /// Euclidean distances between the given coordinates.
    pub fn euclidean(points: &[Vec<f64>]) -> Result<Self> {
        let dist = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        Self::unlabeled(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// A Lipschitz constant attained on a pair of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzConstant {
    pub value: f64,
    /// Ambient point indices of a pair attaining `value`.
    pub witness: Option<(usize, usize)>,
    /// The domain had fewer than two points; the constant is 0 by convention.
    pub degenerate: bool,
}

/// `max ρ(T(x), T(y)) / d(x, y)` over pairs of distinct domain points.
pub fn lipschitz_constant_by<F>(space: &FiniteMetricSpace, map: &SampledMap, rho: F) -> Result<LipschitzConstant>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync + Send,
{
    map.check_points(space)?;
    if map.len() < 2 {
        return Ok(LipschitzConstant { value: 0.0, witness: None, degenerate: true });
    }
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    let best = par::max_by_index(pairs.len(), |k| {
        let (a, b) = pairs[k];
        (rho(map.row(a), map.row(b)) / space.d(dom[a], dom[b]), ())
    })
    .expect("at least one pair");
    let (a, b) = pairs[best.0];
    let value = best.1;
    Ok(LipschitzConstant {
        value,
        witness: (value > 0.0).then_some((dom[a], dom[b])),
        degenerate: false,
    })
}

/// Lipschitz constant with the distance induced by `norm`.
pub fn lipschitz_constant<N: FunctionNorm>(space: &FiniteMetricSpace, map: &SampledMap, norm: &N) -> Result<LipschitzConstant> {
    lipschitz_constant_by(space, map, |f, g| norm.distance(f, g))
}

/// A symmetric, zero-diagonal matrix satisfying the triangle inequality, with
/// zeros allowed off the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoMetric {
    dist: Vec<Vec<f64>>,
}

impl PseudoMetric {
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let report = check_axioms(&dist, true)?;
        if let Some(v) = report.first() {
            return Err(Error::Invalid(format!("not a pseudo-metric: {v}")));
        }
        Ok(PseudoMetric { dist })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// `d_T(x, y) = ρ(T(x), T(y)) / K` for a map defined on all of `space`.
///
/// Requires `K` at least the Lipschitz constant of `T`, which makes `d_T ≤ d`.
pub fn pseudo_metric_from_map<N: FunctionNorm>(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    norm: &N,
    k: f64,
) -> Result<PseudoMetric> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Parameter(format!("K = {k} must be positive")));
    }
    map.require_total(space)?;
    let n = space.len();
    let rows = par::map_indices(n, |i| (0..n).map(|j| norm.distance(map.row(i), map.row(j))).collect::<Vec<f64>>());
    for (i, j) in par::pairs(n) {
        if tol::exceeds_rel(rows[i][j], k * space.d(i, j), tol::EXACT) {
            return Err(Error::precondition(
                format!(
                    "K = {k} is below the Lipschitz ratio {} at points ({i}, {j})",
                    rows[i][j] / space.d(i, j)
                ),
                Witness::Pair { x: i, y: j },
            ));
        }
    }
    let dist = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.into_iter()
                .enumerate()
                .map(|(j, v)| if i == j { 0.0 } else { v / k })
                .collect()
        })
        .collect();
    Ok(PseudoMetric { dist })
}

/// The metric space of classes `{d_T = 0}` with the inherited distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientSpace {
    /// Point indices of each class, ascending; classes ordered by first member.
    pub classes: Vec<Vec<usize>>,
    pub dist: Vec<Vec<f64>>,
    /// Class of each point.
    pub projection: Vec<usize>,
}

impl QuotientSpace {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    /// The quotient as a metric space in its own right, labeled by class members.
    pub fn as_metric_space(&self, base_labels: &[String]) -> Result<FiniteMetricSpace> {
        let labels = self
            .classes
            .iter()
            .map(|c| format!("[{}]", c.iter().map(|&i| base_labels[i].as_str()).collect::<Vec<_>>().join(",")))
            .collect();
        FiniteMetricSpace::new(labels, self.dist.clone())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so classes are labeled deterministically.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Identifies points at pseudo-distance `≤ 1e-9`, closing the relation transitively.
pub fn quotient(ps: &PseudoMetric) -> QuotientSpace {
    let n = ps.len();
    let mut uf = UnionFind::new(n);
    for (i, j) in par::pairs(n) {
        if ps.d(i, j) <= tol::QUOTIENT_ZERO {
            uf.union(i, j);
        }
    }
    let mut class_of_root = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut projection = vec![0; n];
    for i in 0..n {
        let r = uf.find(i);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        projection[i] = class_of_root[r];
        classes[class_of_root[r]].push(i);
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let dist = reps
        .iter()
        .enumerate()
        .map(|(a, &ra)| reps.iter().enumerate().map(|(b, &rb)| if a == b { 0.0 } else { ps.d(ra, rb) }).collect())
        .collect();
    QuotientSpace { classes, dist, projection }
}

/// `T = T̄ ∘ j` through the metric quotient `M_T`.
#[derive(Debug, Clone, Serialize)]
pub struct Factorization {
    pub k: f64,
    pub quotient: QuotientSpace,
    /// `T̄` on each class, taken from the class representative.
    pub factored: Vec<Vec<f64>>,
    /// `T` on every point of the original space.
    pub original: Vec<Vec<f64>>,
}

/// Diagnostics of a factorization; all should be at rounding level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    /// `max ρ(T̄(j(x)), T(x))`.
    pub identity_error: f64,
    /// `max d̄(j(x), j(y)) / d(x, y)`; at most 1.
    pub projection_lipschitz: f64,
    /// Lipschitz constant of `T̄` on the quotient metric.
    pub factor_lipschitz: f64,
    /// `max |d̄(j(x), j(y)) − ρ(T(x), T(y))/K|`.
    pub distance_error: f64,
}

pub fn factorize<N: FunctionNorm>(space: &FiniteMetricSpace, map: &SampledMap, norm: &N, k: f64) -> Result<Factorization> {
    let ps = pseudo_metric_from_map(space, map, norm, k)?;
    let quotient = quotient(&ps);
    let factored = quotient.classes.iter().map(|c| map.row(c[0]).to_vec()).collect();
    Ok(Factorization { k, quotient, factored, original: map.values().to_vec() })
}

impl Factorization {
    /// `T̄(j(x))`.
    pub fn composed(&self, x: usize) -> &[f64] {
        &self.factored[self.quotient.projection[x]]
    }

    pub fn check<N: FunctionNorm>(&self, space: &FiniteMetricSpace, norm: &N) -> FactorizationCheck {
        let n = space.len();
        let q = &self.quotient;
        let identity_error = (0..n)
            .map(|x| norm.distance(self.composed(x), &self.original[x]))
            .fold(0.0, f64::max);
        let mut projection_lipschitz: f64 = 0.0;
        let mut distance_error: f64 = 0.0;
        for (x, y) in par::pairs(n) {
            let dq = q.dist[q.projection[x]][q.projection[y]];
            projection_lipschitz = projection_lipschitz.max(dq / space.d(x, y));
            let expected = norm.distance(&self.original[x], &self.original[y]) / self.k;
            distance_error = distance_error.max((dq - expected).abs());
        }
        let mut factor_lipschitz: f64 = 0.0;
        for (a, b) in par::pairs(q.len()) {
            factor_lipschitz = factor_lipschitz.max(norm.distance(&self.factored[a], &self.factored[b]) / q.dist[a][b]);
        }
        FactorizationCheck { identity_error, projection_lipschitz, factor_lipschitz, distance_error }
    }
}

/// Certificate that `i: J → M_T` exists with `i ∘ i0 = j` and `T̄ ∘ i = T0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalCertificate {
    /// Class of `M_T` assigned to each point of `J`.
    pub map: Vec<usize>,
    /// `max ρ(T̄(i(z)), T0(z))`.
    pub factor_error: f64,
    /// `max d̄(i(z), i(z')) / ρ̄(z, z')`; at most 1.
    pub lipschitz: f64,
}

/// Builds the map `i: J → M_T` through which any other factorization
/// `T = T0 ∘ i0` passes, and verifies both commuting identities.
///
/// `i0` sends each point of `M` to a point of `J` and must be a 1-Lipschitz
/// surjection (the finite form of a dense image); `t0` gives `T0` on each point
/// of `J` and must be `K`-Lipschitz with `T0(i0(x)) = T(x)`.
pub fn induce_universal_map<N: FunctionNorm>(
    space: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    i0: &[usize],
    t0: &[Vec<f64>],
    fact: &Factorization,
    norm: &N,
) -> Result<UniversalCertificate> {
    let n = space.len();
    let m = target.len();
    if i0.len() != n || t0.len() != m {
        return Err(Error::Shape(format!(
            "i0 must have {n} entries and T0 {m} rows (got {} and {})",
            i0.len(),
            t0.len()
        )));
    }
    if let Some(x) = i0.iter().position(|&z| z >= m) {
        return Err(Error::Shape(format!("i0({x}) = {} is outside J", i0[x])));
    }
    let eps = tol::EXACT;
    let mut hit = vec![false; m];
    for &z in i0 {
        hit[z] = true;
    }
    if let Some(z) = hit.iter().position(|h| !h) {
        return Err(Error::hypothesis(
            format!("i0 is not onto: point {z} of J has no preimage"),
            Witness::Point { x: z },
        ));
    }
    for (x, y) in par::pairs(n) {
        if tol::exceeds_rel(target.d(i0[x], i0[y]), space.d(x, y), eps) {
            return Err(Error::hypothesis("i0 is not 1-Lipschitz", Witness::Pair { x, y }));
        }
    }
    for (a, b) in par::pairs(m) {
        if tol::exceeds_rel(norm.distance(&t0[a], &t0[b]), fact.k * target.d(a, b), eps) {
            return Err(Error::hypothesis(format!("T0 is not {}-Lipschitz on J", fact.k), Witness::Pair { x: a, y: b }));
        }
    }
    for x in 0..n {
        if norm.distance(&t0[i0[x]], &fact.original[x]) > eps * (1.0 + norm.norm(&fact.original[x])) {
            return Err(Error::hypothesis("T0 ∘ i0 differs from T", Witness::Point { x }));
        }
    }
    let q = &fact.quotient;
    let mut image = vec![usize::MAX; m];
    for x in 0..n {
        let z = i0[x];
        let c = q.projection[x];
        if image[z] == usize::MAX {
            image[z] = c;
        } else if image[z] != c {
            let other = (0..x).find(|&y| i0[y] == z).expect("earlier preimage");
            return Err(Error::hypothesis(
                "i is not well defined: two preimages of one point of J lie in different classes",
                Witness::Pair { x: other, y: x },
            ));
        }
    }
    // i ∘ i0 = j holds by construction once i is well defined.
    let factor_error = (0..m)
        .map(|z| norm.distance(&fact.factored[image[z]], &t0[z]))
        .fold(0.0, f64::max);
    if factor_error > eps * (1.0 + t0.iter().map(|r| norm.norm(r)).fold(0.0, f64::max)) {
        let z = (0..m)
            .max_by(|&a, &b| {
                norm.distance(&fact.factored[image[a]], &t0[a]).total_cmp(&norm.distance(&fact.factored[image[b]], &t0[b]))
            })
            .unwrap();
        return Err(Error::hypothesis("T̄ ∘ i differs from T0", Witness::Point { x: z }));
    }
    let mut lipschitz: f64 = 0.0;
    for (a, b) in par::pairs(m) {
        let r = q.dist[image[a]][image[b]] / target.d(a, b);
        if r > 1.0 + eps {
            return Err(Error::hypothesis("i is not 1-Lipschitz", Witness::Pair { x: a, y: b }));
        }
        lipschitz = lipschitz.max(r);
    }
    Ok(UniversalCertificate { map: image, factor_error, lipschitz })
}

/// Glues the points of each block of `partition` together and gives the result
/// the largest metric below `d` (shortest paths where in-block steps are free).
///
/// Returns the glued space and the gluing map `M → J`. Used to build
/// intermediate factorizations for [`induce_universal_map`].
pub fn glue(space: &FiniteMetricSpace, partition: &[Vec<usize>]) -> Result<(FiniteMetricSpace, Vec<usize>)> {
    let n = space.len();
    let mut block = vec![usize::MAX; n];
    for (b, members) in partition.iter().enumerate() {
        for &x in members {
            if x >= n || block[x] != usize::MAX {
                return Err(Error::Invalid(format!("point {x} is missing from or repeated in the partition")));
            }
            block[x] = b;
        }
    }
    if block.contains(&usize::MAX) {
        return Err(Error::Invalid("partition does not cover every point".into()));
    }
    let m = partition.len();
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for x in 0..n {
        for y in 0..n {
            let (a, b) = (block[x], block[y]);
            let v = if a == b { 0.0 } else { space.d(x, y) };
            if v < d[a][b] {
                d[a][b] = v;
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let labels = partition
        .iter()
        .map(|c| c.iter().map(|&i| space.labels()[i].as_str()).collect::<Vec<_>>().join("+"))
        .collect();
    Ok((FiniteMetricSpace::new(labels, d)?, block))
}
