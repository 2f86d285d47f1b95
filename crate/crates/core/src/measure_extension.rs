//! Extension through the set functions
//! `ν_x(A) = max_{y ∈ S} {∫_A T(y) dμ − φ(A) d(x, y)}` and their densities.

use serde::Serialize;

use crate::bfs::{kothe_dual, set_function, BfsSpec, FiniteMeasureSpace, FunctionNorm, SetFunctionKind, SetFunctionTable};
use crate::error::{Error, Result, Witness};
use crate::extension::{Agreement, ConstantReport, ExtensionResult};
use crate::map::SampledMap;
use crate::metric::{lipschitz_constant, FiniteMetricSpace};
use crate::par;
use crate::subset::{check_enumerable, Subset};
use crate::tol;

/// `‖f‖_{L¹,0} = sup_A |∫_A f dμ| = max(∫ f⁺ dμ, ∫ f⁻ dμ)`.
pub fn l1_zero_norm(f: &[f64], mu: &FiniteMeasureSpace) -> f64 {
    let (pos, neg) = f.iter().zip(mu.weights()).fold((0.0, 0.0), |(p, n), (v, w)| {
        if *v > 0.0 {
            (p + v * w, n)
        } else {
            (p, n - v * w)
        }
    });
    f64::max(pos, neg)
}

/// `L¹(μ)` under the equivalent norm `‖·‖_{L¹,0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1ZeroNorm {
    pub base: FiniteMeasureSpace,
}

impl FunctionNorm for L1ZeroNorm {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn norm(&self, f: &[f64]) -> f64 {
        l1_zero_norm(f, &self.base)
    }

    fn norm_on(&self, f: &[f64], a: Subset) -> f64 {
        let (pos, neg) = a.atoms().fold((0.0, 0.0), |(p, n), i| {
            let v = f[i] * self.base.weight(i);
            if v > 0.0 {
                (p + v, n)
            } else {
                (p, n - v)
            }
        });
        f64::max(pos, neg)
    }
}

/// A signed measure on the atoms, given by its value on each singleton.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteSignedMeasure {
    #[serde(skip)]
    base: FiniteMeasureSpace,
    atom_values: Vec<f64>,
}

impl FiniteSignedMeasure {
    pub fn new(base: FiniteMeasureSpace, atom_values: Vec<f64>) -> Result<Self> {
        base.check_len(&atom_values, "atom values")?;
        if atom_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("measure values must be finite".into()));
        }
        Ok(FiniteSignedMeasure { base, atom_values })
    }

    /// `ν(A) = ∫_A h dμ`.
    pub fn from_density(base: FiniteMeasureSpace, h: &[f64]) -> Result<Self> {
        base.check_len(h, "density")?;
        let values = h.iter().zip(base.weights()).map(|(v, w)| v * w).collect();
        Self::new(base, values)
    }

    pub fn base(&self) -> &FiniteMeasureSpace {
        &self.base
    }

    pub fn atom_values(&self) -> &[f64] {
        &self.atom_values
    }

    pub fn value(&self, a: Subset) -> f64 {
        a.atoms().map(|i| self.atom_values[i]).sum()
    }

    pub fn table(&self) -> Result<SetFunctionTable> {
        SetFunctionTable::from_fn(self.base.len(), |a| self.value(a))
    }

    pub fn is_mu_continuous(&self) -> bool {
        self.base.null_atoms().atoms().all(|i| self.atom_values[i] == 0.0)
    }

    /// `sup_B |ν(B)|`.
    pub fn semivariation(&self) -> f64 {
        let pos: f64 = self.atom_values.iter().filter(|v| **v > 0.0).sum();
        let neg: f64 = self.atom_values.iter().filter(|v| **v < 0.0).sum();
        pos.max(-neg)
    }

    /// `|ν| = Σ |ν({i})|`.
    pub fn variation(&self) -> f64 {
        self.atom_values.iter().map(|v| v.abs()).sum()
    }

    /// `dν/dμ`, or `None` if `ν` charges a null atom.
    pub fn density(&self) -> Option<Vec<f64>> {
        if !self.is_mu_continuous() {
            return None;
        }
        Some(
            self.atom_values
                .iter()
                .zip(self.base.weights())
                .map(|(v, w)| if *w > 0.0 { v / w } else { 0.0 })
                .collect(),
        )
    }

    /// `|ν|_Y = sup |∫ g dν|` over `g` in the unit ball of `Y'`, computed as
    /// `‖dν/dμ‖_Y`. `None` means infinite: a measure charging a null atom has no
    /// density, and `g` may be arbitrarily large there.
    pub fn y_variation(&self, y: &BfsSpec) -> Option<f64> {
        self.density().map(|h| y.norm(&h))
    }
}

/// The φ-Lipschitz constant and where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiConstant {
    pub value: f64,
    /// `(x, y, A)`, ambient point indices.
    pub witness: Option<(usize, usize, Subset)>,
    /// Subsets of positive measure with `φ(A) = 0`, left out of the maximum.
    pub skipped: usize,
}

/// `max ‖(T(x) − T(y)) χ_A‖ / (φ(A) d(x, y))` over pairs and subsets with `φ(A) > 0`.
///
/// A value at most 1 certifies that `T` is φ-Lipschitz.
pub fn phi_lipschitz_constant<N: FunctionNorm>(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    phi: &SetFunctionTable,
    norm: &N,
) -> Result<PhiConstant> {
    map.check_points(space)?;
    let mu = map.range().base();
    let n = mu.len();
    check_enumerable(n)?;
    if phi.atoms() != n {
        return Err(Error::Shape(format!("φ is over {} atoms, the range over {n}", phi.atoms())));
    }
    let skipped = (1..1u32 << n)
        .filter(|&m| phi.get(Subset(m)) <= 0.0 && mu.measure(Subset(m)) > 0.0)
        .count();
    if map.len() < 2 {
        return Ok(PhiConstant { value: 0.0, witness: None, skipped });
    }
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    let (idx, value, subset) = par::max_by_index(pairs.len(), |p| {
        let (a, b) = pairs[p];
        let diff: Vec<f64> = map.row(a).iter().zip(map.row(b)).map(|(u, v)| u - v).collect();
        let d = space.d(dom[a], dom[b]);
        let mut best = (0.0, Subset::EMPTY);
        for m in 1..1u32 << n {
            let s = Subset(m);
            let ph = phi.get(s);
            if ph <= 0.0 {
                continue;
            }
            let r = norm.norm_on(&diff, s) / (ph * d);
            if r > best.0 {
                best = (r, s);
            }
        }
        best
    })
    .expect("at least one pair");
    let (a, b) = pairs[idx];
    Ok(PhiConstant {
        value,
        witness: (value > 0.0).then_some((dom[a], dom[b], subset)),
        skipped,
    })
}

/// The smallest `K` with `‖(T(x) − T(y)) χ_A‖_Y ≤ K ‖χ_A‖_Y d(x, y)` for all pairs and subsets.
pub fn y_lipschitz_constant(space: &FiniteMetricSpace, map: &SampledMap, y: &BfsSpec) -> Result<PhiConstant> {
    let phi = set_function(SetFunctionKind::IndicatorNorm { k: 1.0, z: y.clone() })?;
    phi_lipschitz_constant(space, map, &phi, y)
}

/// `K` if `φ(A) = K μ(A)` for every `A` (within `1e-9` relative), else `None`.
pub fn proportional_to_measure(phi: &SetFunctionTable, mu: &FiniteMeasureSpace) -> Option<f64> {
    let n = mu.len();
    if phi.atoms() != n {
        return None;
    }
    let full = Subset::full(n);
    let k = phi.get(full) / mu.total();
    let ok = (0..1u32 << n).all(|m| {
        let s = Subset(m);
        let expected = k * mu.measure(s);
        (phi.get(s) - expected).abs() <= tol::EXACT * expected.abs().max(1.0)
    });
    (ok && k > 0.0).then_some(k)
}

/// `∫_A T(y) dμ` for every row of the map and every subset.
fn row_integrals(map: &SampledMap) -> Vec<Vec<f64>> {
    let mu = map.range().base();
    par::map_indices(map.len(), |k| mu.subset_integrals(map.row(k)))
}

fn nu_from_integrals(
    space: &FiniteMetricSpace,
    map: &SampledMap,
    integrals: &[Vec<f64>],
    phi: &SetFunctionTable,
    x: usize,
) -> Result<SetFunctionTable> {
    let dom = map.domain();
    SetFunctionTable::from_fn(phi.atoms(), |a| {
        if a.is_empty() {
            return 0.0;
        }
        let ph = phi.get(a);
        (0..map.len())
            .map(|k| integrals[k][a.index()] - ph * space.d(x, dom[k]))
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

fn check_nu_inputs(space: &FiniteMetricSpace, map: &SampledMap, phi: &SetFunctionTable) -> Result<()> {
    map.check_points(space)?;
    if map.is_empty() {
        return Err(Error::Domain("the subset S has no points".into()));
    }
    check_enumerable(map.atoms())?;
    if phi.atoms() != map.atoms() {
        return Err(Error::Shape(format!("φ is over {} atoms, the range over {}", phi.atoms(), map.atoms())));
    }
    Ok(())
}

/// `ν_x(A) = max_{y ∈ S} {∫_A T(y) dμ − φ(A) d(x, y)}` for every subset `A`.
pub fn nu_table(space: &FiniteMetricSpace, map: &SampledMap, phi: &SetFunctionTable, x: usize) -> Result<SetFunctionTable> {
    check_nu_inputs(space, map, phi)?;
    if x >= space.len() {
        return Err(Error::Shape(format!("point {x} is outside the metric space")));
    }
    nu_from_integrals(space, map, &row_integrals(map), phi, x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityReport {
    pub additive: bool,
    /// Disjoint `(A, B)` with `ν(A ∪ B) ≠ ν(A) + ν(B)`.
    pub witness: Option<(Subset, Subset)>,
}

/// Exhaustive finite additivity over disjoint pairs, absolute tolerance `1e-9`.
///
/// Each unordered pair `{A, B}` with `A ∪ B = U` is visited once by letting `A`
/// contain the lowest atom of `U`; `ν(∅) = 0` is checked separately.
pub fn check_additive(table: &SetFunctionTable) -> AdditivityReport {
    let n = table.atoms();
    if table.get(Subset::EMPTY).abs() > tol::EXACT {
        return AdditivityReport { additive: false, witness: Some((Subset::EMPTY, Subset::EMPTY)) };
    }
    let witness = par::find_first(1 << n, |u| {
        let u = u as u32;
        if u == 0 {
            return None;
        }
        let low = u & u.wrapping_neg();
        let rest = u ^ low;
        let vu = table.get(Subset(u));
        // A = low ∪ s for every submask s of the rest; B = U \ A nonempty.
        let mut s = rest;
        loop {
            let a = low | s;
            let b = u ^ a;
            if b != 0 {
                let sum = table.get(Subset(a)) + table.get(Subset(b));
                if (vu - sum).abs() > tol::EXACT {
                    return Some((Subset(a), Subset(b)));
                }
            }
            if s == 0 {
                return None;
            }
            s = (s - 1) & rest;
        }
    });
    AdditivityReport { additive: witness.is_none(), witness }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub continuous: bool,
    /// A μ-null set with nonzero value.
    pub witness: Option<Subset>,
}

/// `ν(A) = 0` (within `1e-9`) for every set of zero-weight atoms.
pub fn check_mu_continuous(table: &SetFunctionTable, mu: &FiniteMeasureSpace) -> ContinuityReport {
    let null = mu.null_atoms().0;
    let mut s = null;
    loop {
        if table.get(Subset(s)).abs() > tol::EXACT {
            return ContinuityReport { continuous: false, witness: Some(Subset(s)) };
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & null;
    }
    ContinuityReport { continuous: true, witness: None }
}

/// The density `h` with `ν(A) = ∫_A h dμ` for every `A`; zero on null atoms.
pub fn radon_nikodym(table: &SetFunctionTable, mu: &FiniteMeasureSpace) -> Result<Vec<f64>> {
    let n = mu.len();
    if table.atoms() != n {
        return Err(Error::Shape(format!("table over {} atoms, measure over {n}", table.atoms())));
    }
    let add = check_additive(table);
    if let Some((a, b)) = add.witness {
        return Err(Error::hypothesis("set function is not additive", Witness::Subsets { a, b }));
    }
    let cont = check_mu_continuous(table, mu);
    if let Some(subset) = cont.witness {
        return Err(Error::hypothesis("set function charges a μ-null set", Witness::Subset { subset }));
    }
    let h: Vec<f64> = (0..n)
        .map(|i| if mu.is_null_atom(i) { 0.0 } else { table.get(Subset::singleton(i)) / mu.weight(i) })
        .collect();
    let integrals = mu.subset_integrals(&h);
    if let Some(m) = (0..1usize << n).find(|&m| (integrals[m] - table.values()[m]).abs() > tol::EXACT) {
        return Err(Error::numeric(
            format!("density does not reproduce the set function on {}", Subset(m as u32)),
            vec![integrals[m], table.values()[m]],
        ));
    }
    Ok(h)
}

/// Additivity and μ-continuity of `ν_x` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuReport {
    pub point: usize,
    pub additivity: AdditivityReport,
    pub continuity: ContinuityReport,
}

impl NuReport {
    pub fn passes(&self) -> bool {
        self.additivity.additive && self.continuity.continuous
    }
}

/// Builds `ν_x` at every point of `space` and tests both hypotheses.
pub fn verify_nu(space: &FiniteMetricSpace, map: &SampledMap, phi: &SetFunctionTable) -> Result<(Vec<SetFunctionTable>, Vec<NuReport>)> {
    check_nu_inputs(space, map, phi)?;
    let integrals = row_integrals(map);
    let mu = map.range().base();
    let tables = (0..space.len())
        .map(|x| nu_from_integrals(space, map, &integrals, phi, x))
        .collect::<Result<Vec<_>>>()?;
    let reports = tables
        .iter()
        .enumerate()
        .map(|(x, t)| NuReport { point: x, additivity: check_additive(t), continuity: check_mu_continuous(t, mu) })
        .collect();
    Ok((tables, reports))
}

/// Checks that `T` is φ-Lipschitz into `(L¹, ‖·‖_{L¹,0})`; returns the offending
/// pair and subset otherwise.
fn phi_lipschitz_violation(space: &FiniteMetricSpace, map: &SampledMap, phi: &SetFunctionTable) -> Option<(usize, usize, Subset)> {
    let mu = map.range().base();
    let n = mu.len();
    let pairs = par::pairs(map.len());
    let dom = map.domain();
    par::find_first(pairs.len(), |p| {
        let (a, b) = pairs[p];
        let diff: Vec<f64> = map.row(a).iter().zip(map.row(b)).map(|(u, v)| u - v).collect();
        let d = space.d(dom[a], dom[b]);
        let l1z = L1ZeroNorm { base: mu.clone() };
        (1..1u32 << n)
            .map(Subset)
            .find(|&s| tol::exceeds_rel(l1z.norm_on(&diff, s), phi.get(s) * d, tol::EXACT))
            .map(|s| (dom[a], dom[b], s))
    })
}

/// Extends `T: S → Y(μ)` to the whole space by `T̂(x) = dν_x/dμ`.
///
/// Requires `φ` monotone and nonnegative and `T` φ-Lipschitz into
/// `(L¹, ‖·‖_{L¹,0})`. Every `ν_x` must be additive and μ-continuous; the first
/// point where one fails is reported with the failed check. The returned map
/// takes values in `y`.
pub fn measure_extend(space: &FiniteMetricSpace, map: &SampledMap, phi: &SetFunctionTable, y: &BfsSpec) -> Result<ExtensionResult> {
    check_nu_inputs(space, map, phi)?;
    let mu = map.range().base();
    if y.base() != mu {
        return Err(Error::Shape("Y must live over the same measure space as the map".into()));
    }
    if let Some(m) = phi.values().iter().position(|v| *v < 0.0) {
        return Err(Error::Parameter(format!("φ is negative on {}", Subset(m as u32))));
    }
    if !phi.monotone {
        if let Some((a, b)) = phi.monotonicity_violation() {
            return Err(Error::precondition("φ is not increasing", Witness::Subsets { a, b }));
        }
    }
    if let Some((x, yy, subset)) = phi_lipschitz_violation(space, map, phi) {
        return Err(Error::precondition(
            "T is not φ-Lipschitz on S under the L¹ semivariation norm",
            Witness::PairSubset { x, y: yy, subset },
        ));
    }
    let integrals = row_integrals(map);
    let densities = par::map_indices(space.len(), |x| -> Result<Vec<f64>> {
        let table = nu_from_integrals(space, map, &integrals, phi, x)?;
        let add = check_additive(&table);
        if let Some((a, b)) = add.witness {
            return Err(Error::hypothesis(
                format!("ν at point {x} is not additive"),
                Witness::PointSubsets { x, check: "additivity".into(), a, b },
            ));
        }
        let cont = check_mu_continuous(&table, mu);
        if let Some(a) = cont.witness {
            return Err(Error::hypothesis(
                format!("ν at point {x} charges a μ-null set"),
                Witness::PointSubsets { x, check: "mu-continuity".into(), a, b: Subset::EMPTY },
            ));
        }
        radon_nikodym(&table, mu)
    });
    let values = densities.into_iter().collect::<Result<Vec<_>>>()?;
    let agreement = map
        .domain()
        .iter()
        .enumerate()
        .map(|(k, &x)| Agreement {
            point: x,
            discrepancy: (0..mu.len())
                .filter(|&w| !mu.is_null_atom(w))
                .map(|w| (values[x][w] - map.row(k)[w]).abs())
                .fold(0.0, f64::max),
        })
        .collect();
    let extended = SampledMap::total(values, y.clone())?;
    let classical = lipschitz_constant(space, &extended, y)?.value;
    let phi_value = phi_lipschitz_constant(space, &extended, phi, &L1ZeroNorm { base: mu.clone() })?.value;
    let given = proportional_to_measure(phi, mu).unwrap_or(phi.bound());
    Ok(ExtensionResult {
        extended,
        constants: ConstantReport { given, classical, pointwise: None, phi: Some(phi_value) },
        agreement,
        boundedness: None,
    })
}

/// Recomputed set functions of a total `Y`-Lipschitz map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseReport {
    /// `max(1, ‖χ_Ω‖_{Y'})`; the `Y` norm is multiplied by this so that the dual
    /// indicator of `Ω` has norm at most one.
    pub rescale: f64,
    /// `max |ν̂_x(A) − ∫_A T(x) dμ|` over points and subsets.
    pub nu_error: f64,
    /// `max | |ν̂_x| − ‖T(x)‖_{L¹} |` over points.
    pub variation_error: f64,
    /// Every `ν̂_x` is additive.
    pub additive: bool,
}

/// For a total map that is `Y`-Lipschitz with constant `K`, recomputes
/// `ν̂_x(A) = max_{y ∈ M} {∫_A T(y) dμ − K ‖χ_A‖_Y d(x, y)}` and compares it
/// with `∫_A T(x) dμ`.
pub fn converse_check(space: &FiniteMetricSpace, map: &SampledMap, y: &BfsSpec, k: f64) -> Result<ConverseReport> {
    map.require_total(space)?;
    let mu = map.range().base();
    if y.base() != mu {
        return Err(Error::Shape("Y must live over the same measure space as the map".into()));
    }
    let yk = y_lipschitz_constant(space, map, y)?;
    if tol::exceeds_rel(yk.value, k, tol::EXACT) {
        let (x, yy, subset) = yk.witness.expect("positive constant has a witness");
        return Err(Error::hypothesis(
            format!("map is not Y-Lipschitz with constant {k}"),
            Witness::PairSubset { x, y: yy, subset },
        ));
    }
    let n = mu.len();
    let full = Subset::full(n);
    let rescale = kothe_dual(y).indicator_norm(full).max(1.0);
    let phi = SetFunctionTable::from_fn(n, |a| k * rescale * y.indicator_norm(a))?;
    let (tables, _) = verify_nu(space, map, &phi)?;
    let integrals = row_integrals(map);
    let mut nu_error: f64 = 0.0;
    let mut variation_error: f64 = 0.0;
    let mut additive = true;
    for (x, t) in tables.iter().enumerate() {
        for m in 0..1usize << n {
            nu_error = nu_error.max((t.values()[m] - integrals[x][m]).abs());
        }
        additive &= check_additive(t).additive;
        let singletons: Vec<f64> = (0..n).map(|i| t.get(Subset::singleton(i))).collect();
        let var = FiniteSignedMeasure::new(mu.clone(), singletons)?.variation();
        let l1 = BfsSpec::l1(mu.clone()).norm(map.row(x));
        variation_error = variation_error.max((var - l1).abs());
    }
    Ok(ConverseReport { rescale, nu_error, variation_error, additive })
}
