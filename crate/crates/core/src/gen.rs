//! Seeded random instances for the verification suites.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bfs::{set_function, BfsSpec, FiniteMeasureSpace, SetFunctionKind, SetFunctionTable};
use crate::extension::pointwise_ae_constant;
use crate::interp::LinearMap;
use crate::map::SampledMap;
use crate::measure_extension::{phi_lipschitz_constant, L1ZeroNorm};
use crate::metric::{lipschitz_constant, FiniteMetricSpace};
use crate::subset::Subset;

pub type Rng64 = ChaCha8Rng;

/// The generator behind every seeded suite.
pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `k` derived from `seed`.
pub fn stream(seed: u64, k: u64) -> Rng64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

/// A random metric on `n` points: Euclidean in dimension 1 to 3, or the
/// shortest-path metric of a complete graph with random edge lengths.
pub fn metric_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    if rng.gen_bool(0.5) {
        let dim = rng.gen_range(1..=3);
        loop {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
            if let Ok(sp) = FiniteMetricSpace::euclidean(&pts) {
                if (0..n).all(|i| (0..n).all(|j| i == j || sp.d(i, j) > 1e-3)) {
                    return sp;
                }
            }
        }
    }
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(0.2..4.0);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::unlabeled(d).expect("shortest paths form a metric")
}

/// A random nonempty subset of `0..n` of size at most `max`, sorted.
pub fn point_subset<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=max.min(n));
    let mut s = sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}

/// Weights in `[0.1, 2]`, with `nulls` of them set to zero.
pub fn measure<R: Rng>(rng: &mut R, n: usize, nulls: usize) -> FiniteMeasureSpace {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
    for i in sample(rng, n, nulls.min(n - 1)).into_iter() {
        w[i] = 0.0;
    }
    FiniteMeasureSpace::new(w).expect("at least one positive weight")
}

pub fn vector<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// A constant strictly above `minimal`, so that rounding never flips a check.
pub fn generous<R: Rng>(rng: &mut R, minimal: f64) -> f64 {
    if minimal > 0.0 {
        minimal * (1.0 + 1e-3 + rng.gen_range(0.0..0.5))
    } else {
        rng.gen_range(0.1..2.0)
    }
}

/// A real-valued map on a subset with a valid constant `k`.
#[derive(Debug, Clone)]
pub struct ScalarCase {
    pub space: FiniteMetricSpace,
    pub map: SampledMap,
    pub k: f64,
}

pub fn scalar_case<R: Rng>(rng: &mut R, max_points: usize, max_subset: usize) -> ScalarCase {
    let n = rng.gen_range(2..=max_points);
    let space = metric_space(rng, n);
    let s = point_subset(rng, n, max_subset);
    let values = vector(rng, s.len(), 5.0);
    let map = SampledMap::scalar(s, values).expect("valid scalar map");
    let l = lipschitz_constant(&space, &map, map.range()).expect("valid points").value;
    let k = generous(rng, l);
    ScalarCase { space, map, k }
}

/// A map into functions on atoms, some of weight zero, with a valid pointwise constant.
#[derive(Debug, Clone)]
pub struct PointwiseCase {
    pub space: FiniteMetricSpace,
    pub map: SampledMap,
    pub k: f64,
}

pub fn pointwise_case<R: Rng>(rng: &mut R, max_points: usize, max_subset: usize, max_atoms: usize) -> PointwiseCase {
    let n = rng.gen_range(2..=max_points);
    let atoms = rng.gen_range(2..=max_atoms);
    let space = metric_space(rng, n);
    let nulls = rng.gen_range(1..=(atoms / 3).max(1));
    let mu = measure(rng, atoms, nulls);
    let s = point_subset(rng, n, max_subset);
    let rows = (0..s.len()).map(|_| vector(rng, atoms, 5.0)).collect();
    let map = SampledMap::new(s, rows, BfsSpec::linf(mu)).expect("valid map");
    let l = pointwise_ae_constant(&space, &map).expect("valid points").value;
    let k = generous(rng, l);
    PointwiseCase { space, map, k }
}

/// How a measure-extension case was built; each family makes every `ν_x` additive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureFamily {
    /// `S` is a single point.
    SinglePoint,
    /// `T(y) = g + a(y)·1` with `a` real and `K`-Lipschitz.
    ShiftedProfile,
    /// `S` is the whole space and the rows are arbitrary.
    Total,
}

#[derive(Debug, Clone)]
pub struct MeasureCase {
    pub space: FiniteMetricSpace,
    pub map: SampledMap,
    pub k: f64,
    /// `φ = K μ`.
    pub phi: SetFunctionTable,
    pub family: MeasureFamily,
}

/// A φ-Lipschitz map with `φ = K μ` for which the extension hypotheses hold.
pub fn measure_case<R: Rng>(rng: &mut R, max_points: usize, max_atoms: usize, y_p: f64) -> MeasureCase {
    let n = rng.gen_range(2..=max_points);
    let atoms = rng.gen_range(1..=max_atoms);
    let space = metric_space(rng, n);
    let nulls = if atoms > 1 && rng.gen_bool(0.5) { 1 } else { 0 };
    let mu = measure(rng, atoms, nulls);
    let range = BfsSpec::new(mu.clone(), y_p).expect("valid exponent");
    let family = match rng.gen_range(0..3) {
        0 => MeasureFamily::SinglePoint,
        1 => MeasureFamily::ShiftedProfile,
        _ => MeasureFamily::Total,
    };
    let (domain, rows, minimal) = match family {
        MeasureFamily::SinglePoint => {
            let x = rng.gen_range(0..n);
            (vec![x], vec![vector(rng, atoms, 5.0)], 0.0)
        }
        MeasureFamily::ShiftedProfile => {
            let s = point_subset(rng, n, n);
            let g = vector(rng, atoms, 5.0);
            let shifts = vector(rng, s.len(), 5.0);
            let rows: Vec<Vec<f64>> = shifts.iter().map(|a| g.iter().map(|v| v + a).collect()).collect();
            let scalar = SampledMap::scalar(s.clone(), shifts).expect("valid shifts");
            let l = lipschitz_constant(&space, &scalar, scalar.range()).expect("valid points").value;
            (s, rows, l)
        }
        MeasureFamily::Total => {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| vector(rng, atoms, 5.0)).collect();
            let total = SampledMap::total(rows.clone(), range.clone()).expect("valid map");
            let unit = set_function(SetFunctionKind::IndicatorNorm { k: 1.0, z: BfsSpec::l1(mu.clone()) }).expect("K = 1");
            let l = phi_lipschitz_constant(&space, &total, &unit, &L1ZeroNorm { base: mu.clone() })
                .expect("valid map")
                .value;
            ((0..n).collect(), rows, l)
        }
    };
    let k = generous(rng, minimal);
    let map = SampledMap::new(domain, rows, range).expect("valid map");
    let phi = set_function(SetFunctionKind::IndicatorNorm { k, z: BfsSpec::l1(mu) }).expect("positive K");
    MeasureCase { space, map, k, phi, family }
}

/// A linear map `R^3 → R^3` with its exact constants for
/// `‖T(x) χ_A‖_{L¹(μ)} ≤ K0 μ(A) ‖x‖_1` and `‖T(x) χ_A‖_{L^∞(μ)} ≤ K1 μ(A) ‖x‖_∞`,
/// rescaled so that `max(K0, K1) = 1`.
#[derive(Debug, Clone)]
pub struct DominationCase {
    pub matrix: LinearMap,
    pub mu: FiniteMeasureSpace,
    pub k0: f64,
    pub k1: f64,
}

pub fn domination_case<R: Rng>(rng: &mut R, m: usize, n: usize) -> DominationCase {
    let mu = measure(rng, m, 0);
    let rows: Vec<Vec<f64>> = (0..m).map(|_| vector(rng, n, 2.0)).collect();
    let (k0, k1) = domination_constants(&rows, &mu);
    let s = k0.max(k1);
    let rows = rows.into_iter().map(|r| r.into_iter().map(|v| v / s).collect()).collect();
    let (k0, k1) = (k0 / s, k1 / s);
    DominationCase { matrix: LinearMap::new(rows).expect("rectangular"), mu, k0, k1 }
}

/// Exact constants via extreme points: `±e_j` for `ℓ¹`, sign vectors for `ℓ^∞`.
pub fn domination_constants(rows: &[Vec<f64>], mu: &FiniteMeasureSpace) -> (f64, f64) {
    let m = rows.len();
    let n = rows[0].len();
    let mut k0: f64 = 0.0;
    let mut k1: f64 = 0.0;
    for a in 1..1u32 << m {
        let s = Subset(a);
        let ma = mu.measure(s);
        if ma == 0.0 {
            continue;
        }
        for j in 0..n {
            let col: f64 = s.atoms().map(|i| mu.weight(i) * rows[i][j].abs()).sum();
            k0 = k0.max(col / ma);
        }
        for i in s.atoms().filter(|&i| !mu.is_null_atom(i)) {
            let row: f64 = rows[i].iter().map(|v| v.abs()).sum();
            k1 = k1.max(row / ma);
        }
    }
    (k0, k1)
}
