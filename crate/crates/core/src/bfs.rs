//! Finite atomic measure spaces and the weighted `L^p` function spaces over them.
//!
//! Every subset of atoms is measurable. Atoms of weight zero are kept (rather
//! than dropped) so that "almost everywhere" statements stay observable: values
//! on a null atom never affect a norm, an integral or an a.e. comparison.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par;
use crate::subset::{check_enumerable, Subset};
use crate::tol;

/// `n` atoms with nonnegative weights, at least one of them positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMeasureSpace {
    weights: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Invalid(format!(
                "weight {i} is {} (weights must be finite and nonnegative)",
                weights[i]
            )));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::Invalid("at least one atom must have positive weight".into()));
        }
        Ok(FiniteMeasureSpace { weights })
    }

    /// `n` atoms of weight one (counting measure).
    pub fn counting(n: usize) -> Self {
        FiniteMeasureSpace { weights: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    #[inline]
    pub fn is_null_atom(&self, i: usize) -> bool {
        self.weights[i] == 0.0
    }

    /// `μ(Ω)`.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn measure(&self, a: Subset) -> f64 {
        a.atoms().map(|i| self.weights[i]).sum()
    }

    /// The union of all zero-weight atoms; every μ-null set is a subset of it.
    pub fn null_atoms(&self) -> Subset {
        Subset(
            self.weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w == 0.0)
                .fold(0, |m, (i, _)| m | (1 << i)),
        )
    }

    pub fn integral(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `∫_A f dμ`.
    pub fn integral_on(&self, f: &[f64], a: Subset) -> f64 {
        a.atoms().map(|i| f[i] * self.weights[i]).sum()
    }

    /// `∫_A f dμ` for every subset `A`, indexed by bitmask.
    pub fn subset_integrals(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; 1 << n];
        for m in 1usize..1 << n {
            let i = m.trailing_zeros() as usize;
            out[m] = out[m & (m - 1)] + f[i] * self.weights[i];
        }
        out
    }

    pub(crate) fn check_len(&self, f: &[f64], what: &str) -> Result<()> {
        if f.len() != self.len() {
            Err(Error::Shape(format!(
                "{what} has length {} but the measure space has {} atoms",
                f.len(),
                self.len()
            )))
        } else {
            Ok(())
        }
    }
}

/// A norm on functions over a fixed finite set of coordinates.
pub trait FunctionNorm: Sync {
    /// Number of coordinates (atoms) the norm acts on.
    fn dim(&self) -> usize;

    fn norm(&self, f: &[f64]) -> f64;

    fn distance(&self, f: &[f64], g: &[f64]) -> f64 {
        let diff: Vec<f64> = f.iter().zip(g).map(|(a, b)| a - b).collect();
        self.norm(&diff)
    }

    /// `‖f χ_A‖`.
    fn norm_on(&self, f: &[f64], a: Subset) -> f64 {
        let masked: Vec<f64> = f
            .iter()
            .enumerate()
            .map(|(i, v)| if a.contains(i) { *v } else { 0.0 })
            .collect();
        self.norm(&masked)
    }
}

/// A weighted `L^p(μ)` norm, `1 ≤ p ≤ ∞`, with optional per-atom multipliers.
///
/// For finite `p` the norm is `(Σ μ_i s_i |f_i|^p)^{1/p}`; for `p = ∞` it is
/// `max s_i |f_i|` over atoms of positive weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BfsSpec {
    base: FiniteMeasureSpace,
    #[serde(with = "exponent")]
    p: f64,
    scale: Vec<f64>,
}

impl BfsSpec {
    pub fn new(base: FiniteMeasureSpace, p: f64) -> Result<Self> {
        let n = base.len();
        Self::with_scale(base, p, vec![1.0; n])
    }

    pub fn with_scale(base: FiniteMeasureSpace, p: f64, scale: Vec<f64>) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("exponent p = {p} must lie in [1, ∞]")));
        }
        if scale.len() != base.len() {
            return Err(Error::Shape(format!(
                "scale has length {} but the measure space has {} atoms",
                scale.len(),
                base.len()
            )));
        }
        if let Some(i) = scale.iter().position(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::Parameter(format!("scale {i} is {} (must be positive)", scale[i])));
        }
        Ok(BfsSpec { base, p, scale })
    }

    pub fn l1(base: FiniteMeasureSpace) -> Self {
        Self::new(base, 1.0).expect("p = 1 is valid")
    }

    pub fn linf(base: FiniteMeasureSpace) -> Self {
        Self::new(base, f64::INFINITY).expect("p = ∞ is valid")
    }

    /// The real line with the absolute value, as `L^∞` over one unit atom.
    pub fn scalar() -> Self {
        Self::linf(FiniteMeasureSpace::counting(1))
    }

    pub fn base(&self) -> &FiniteMeasureSpace {
        &self.base
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// Order continuity fails for `L^∞` in general; at finite dimension it is harmless.
    pub fn is_order_continuous(&self) -> bool {
        !self.is_infinite()
    }

    /// `‖χ_A‖`.
    pub fn indicator_norm(&self, a: Subset) -> f64 {
        if self.is_infinite() {
            a.atoms()
                .filter(|&i| !self.base.is_null_atom(i))
                .map(|i| self.scale[i])
                .fold(0.0, f64::max)
        } else {
            let s: f64 = a.atoms().map(|i| self.base.weight(i) * self.scale[i]).sum();
            s.powf(1.0 / self.p)
        }
    }

    /// Euclidean subgradient of the norm at `f`.
    pub fn subgradient(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let mut g = vec![0.0; n];
        if self.is_infinite() {
            let mut best = (-1.0, None);
            for i in 0..n {
                if self.base.is_null_atom(i) {
                    continue;
                }
                let v = self.scale[i] * f[i].abs();
                if v > best.0 {
                    best = (v, Some(i));
                }
            }
            if let (v, Some(k)) = best {
                if v > 0.0 {
                    g[k] = self.scale[k] * f[k].signum();
                }
            }
        } else if self.p == 1.0 {
            for i in 0..n {
                if f[i] != 0.0 {
                    g[i] = self.base.weight(i) * self.scale[i] * f[i].signum();
                }
            }
        } else {
            let nrm = self.norm(f);
            if nrm > 0.0 {
                for i in 0..n {
                    let ws = self.base.weight(i) * self.scale[i];
                    g[i] = ws * f[i].abs().powf(self.p - 1.0) * f[i].signum() / nrm.powf(self.p - 1.0);
                }
            }
        }
        g
    }
}

impl FunctionNorm for BfsSpec {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn norm(&self, f: &[f64]) -> f64 {
        let w = self.base.weights();
        if self.is_infinite() {
            f.iter()
                .zip(w)
                .zip(&self.scale)
                .filter(|((_, w), _)| **w > 0.0)
                .map(|((v, _), s)| s * v.abs())
                .fold(0.0, f64::max)
        } else if self.p == 1.0 {
            f.iter().zip(w).zip(&self.scale).map(|((v, w), s)| w * s * v.abs()).sum()
        } else if self.p == 2.0 {
            f.iter()
                .zip(w)
                .zip(&self.scale)
                .map(|((v, w), s)| w * s * v * v)
                .sum::<f64>()
                .sqrt()
        } else {
            // Factor out the largest magnitude so |f|^p cannot overflow.
            let big = f
                .iter()
                .zip(w)
                .filter(|(_, w)| **w > 0.0)
                .map(|(v, _)| v.abs())
                .fold(0.0, f64::max);
            if big == 0.0 {
                return 0.0;
            }
            let s: f64 = f
                .iter()
                .zip(w)
                .zip(&self.scale)
                .map(|((v, w), s)| w * s * (v.abs() / big).powf(self.p))
                .sum();
            big * s.powf(1.0 / self.p)
        }
    }

    fn norm_on(&self, f: &[f64], a: Subset) -> f64 {
        let w = self.base.weights();
        if self.is_infinite() {
            a.atoms()
                .filter(|&i| w[i] > 0.0)
                .map(|i| self.scale[i] * f[i].abs())
                .fold(0.0, f64::max)
        } else if self.p == 1.0 {
            a.atoms().map(|i| w[i] * self.scale[i] * f[i].abs()).sum()
        } else {
            let mut buf = [0.0; tol::MAX_ATOMS];
            if f.len() > tol::MAX_ATOMS {
                let masked: Vec<f64> = (0..f.len()).map(|i| if a.contains(i) { f[i] } else { 0.0 }).collect();
                return self.norm(&masked);
            }
            for i in a.atoms() {
                buf[i] = f[i];
            }
            self.norm(&buf[..f.len()])
        }
    }
}

/// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// The Köthe dual under the pairing `∫ f g dμ`.
///
/// The exponent becomes `p'`. Scales become `s^{1-p'}` for `1 < p < ∞`, which is
/// `1/s` at both endpoints, so that Hölder's inequality is sharp and taking the
/// dual twice returns the original space.
pub fn kothe_dual(space: &BfsSpec) -> BfsSpec {
    let q = conjugate_exponent(space.p);
    let scale = if space.p == 1.0 || space.is_infinite() {
        space.scale.iter().map(|s| 1.0 / s).collect()
    } else {
        space.scale.iter().map(|s| s.powf(1.0 - q)).collect()
    };
    BfsSpec { base: space.base.clone(), p: q, scale }
}

/// A maximizer of `∫ f g dμ` over the unit ball of the Köthe dual.
#[derive(Debug, Clone, Serialize)]
pub struct DualNorm {
    /// `∫ f g dμ` at the extremizer.
    pub value: f64,
    /// `‖f‖` computed directly.
    pub closed_form: f64,
    pub extremizer: Vec<f64>,
}

/// Computes `‖f‖` as `sup { ∫ f g dμ : ‖g‖_{Y'} ≤ 1 }`.
///
/// For `p = 1` every sign pattern (the extreme points of the dual ball) is
/// enumerated; for `p = ∞` every atom; otherwise the norming function
/// `s |f|^{p-1} sign f / ‖f‖^{p-1}` is used. The result is checked against the
/// direct norm.
pub fn dual_norm_by_enumeration(space: &BfsSpec, f: &[f64]) -> Result<DualNorm> {
    let base = space.base();
    base.check_len(f, "f")?;
    let n = base.len();
    let closed_form = space.norm(f);
    let (value, extremizer) = if space.p == 1.0 {
        check_enumerable(n)?;
        let best = par::max_by_index(1 << n, |m| {
            let g: Vec<f64> = (0..n)
                .map(|i| if m >> i & 1 == 1 { space.scale[i] } else { -space.scale[i] })
                .collect();
            (base.integral(&f.iter().zip(&g).map(|(a, b)| a * b).collect::<Vec<_>>()), g)
        })
        .expect("at least one sign pattern");
        (best.1, best.2)
    } else if space.is_infinite() {
        let best = par::max_by_index(n, |k| {
            let mut g = vec![0.0; n];
            if base.is_null_atom(k) {
                return (f64::NEG_INFINITY, g);
            }
            g[k] = f[k].signum() * space.scale[k] / base.weight(k);
            let v = base.weight(k) * f[k] * g[k];
            (v, g)
        })
        .expect("at least one atom");
        (best.1.max(0.0), if best.1 > 0.0 { best.2 } else { vec![0.0; n] })
    } else if closed_form == 0.0 {
        (0.0, vec![0.0; n])
    } else {
        let g: Vec<f64> = (0..n)
            .map(|i| {
                space.scale[i] * f[i].abs().powf(space.p - 1.0) * f[i].signum()
                    / closed_form.powf(space.p - 1.0)
            })
            .collect();
        let v = base.integral(&f.iter().zip(&g).map(|(a, b)| a * b).collect::<Vec<_>>());
        (v, g)
    };
    if (value - closed_form).abs() > tol::EXACT * closed_form.max(1.0) {
        return Err(Error::numeric(
            "dual-ball supremum disagrees with the closed-form norm",
            vec![value, closed_form],
        ));
    }
    Ok(DualNorm { value, closed_form, extremizer })
}

/// A real value for every subset of atoms, indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetFunctionTable {
    n: usize,
    values: Vec<f64>,
    /// Set when the constructor guarantees `A ⊆ B ⇒ φ(A) ≤ φ(B)`.
    pub monotone: bool,
}

impl SetFunctionTable {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        check_enumerable(n)?;
        if values.len() != 1 << n {
            return Err(Error::Shape(format!(
                "set function over {n} atoms needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("set function values must be finite".into()));
        }
        Ok(SetFunctionTable { n, values, monotone: false })
    }

    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64 + Sync + Send) -> Result<Self> {
        check_enumerable(n)?;
        let values = par::map_indices(1 << n, |m| f(Subset(m as u32)));
        Ok(SetFunctionTable { n, values, monotone: false })
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, a: Subset) -> f64 {
        self.values[a.index()]
    }

    /// `sup |φ|`; always finite here.
    pub fn bound(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exhaustive monotonicity check; returns a pair `A ⊆ B` with `φ(A) > φ(B)`.
    ///
    /// Checking `A ⊂ A ∪ {i}` for every `A` and `i` suffices, since every
    /// inclusion is a chain of single-atom steps.
    pub fn monotonicity_violation(&self) -> Option<(Subset, Subset)> {
        let n = self.n;
        par::find_first(1 << n, |m| {
            let a = Subset(m as u32);
            (0..n).filter(|&i| !a.contains(i)).find_map(|i| {
                let b = a.union(Subset::singleton(i));
                (self.get(a) > self.get(b) + tol::EXACT).then_some((a, b))
            })
        })
    }
}

/// How to build a set function.
#[derive(Debug, Clone)]
pub enum SetFunctionKind {
    /// `φ(A) = K ‖χ_A‖_Z`.
    IndicatorNorm { k: f64, z: BfsSpec },
    /// Explicit values indexed by bitmask.
    Table { n: usize, values: Vec<f64> },
}

pub fn set_function(kind: SetFunctionKind) -> Result<SetFunctionTable> {
    match kind {
        SetFunctionKind::IndicatorNorm { k, z } => {
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::Parameter(format!("K = {k} must be positive")));
            }
            let mut t = SetFunctionTable::from_fn(z.base().len(), |a| k * z.indicator_norm(a))?;
            t.monotone = true;
            Ok(t)
        }
        SetFunctionKind::Table { n, values } => {
            let mut t = SetFunctionTable::from_values(n, values)?;
            t.monotone = t.monotonicity_violation().is_none();
            Ok(t)
        }
    }
}

/// `f ≤ g` on every atom of positive weight.
pub fn ae_leq(f: &[f64], g: &[f64], mu: &FiniteMeasureSpace) -> Result<bool> {
    mu.check_len(f, "f")?;
    mu.check_len(g, "g")?;
    Ok((0..mu.len()).all(|i| mu.is_null_atom(i) || f[i] <= g[i]))
}

/// The nonincreasing rearrangement of `|f|` as a step function on `[0, μ(Ω))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rearrangement {
    /// `(value, length)` steps with strictly decreasing values.
    pub steps: Vec<(f64, f64)>,
}

impl Rearrangement {
    pub fn total_length(&self) -> f64 {
        self.steps.iter().map(|s| s.1).sum()
    }

    /// `f*(s)`, zero past the end of the support.
    pub fn value_at(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(v, len) in &self.steps {
            acc += len;
            if s < acc {
                return v;
            }
        }
        0.0
    }

    /// `∫_0^t f*(s) ds`.
    pub fn primitive(&self, t: f64) -> f64 {
        let mut left = t.max(0.0);
        let mut acc = 0.0;
        for &(v, len) in &self.steps {
            if left <= 0.0 {
                break;
            }
            let take = left.min(len);
            acc += v * take;
            left -= take;
        }
        acc
    }
}

pub fn decreasing_rearrangement(f: &[f64], mu: &FiniteMeasureSpace) -> Result<Rearrangement> {
    mu.check_len(f, "f")?;
    let mut atoms: Vec<(f64, f64)> = f
        .iter()
        .zip(mu.weights())
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| (v.abs(), *w))
        .collect();
    atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut steps: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, w) in atoms {
        match steps.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => steps.push((v, w)),
        }
    }
    Ok(Rearrangement { steps })
}

/// Serde adapter for exponents: a number, or the string `"inf"`.
pub mod exponent {
    use super::*;

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(p),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("exponent {s:?} is neither a number nor \"inf\""))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(w: &[f64]) -> FiniteMeasureSpace {
        FiniteMeasureSpace::new(w.to_vec()).unwrap()
    }

    #[test]
    fn measure_space_rejects_bad_weights() {
        assert!(FiniteMeasureSpace::new(vec![1.0, -0.5]).is_err());
        assert!(FiniteMeasureSpace::new(vec![0.0, 0.0]).is_err());
        assert!(FiniteMeasureSpace::new(vec![f64::NAN]).is_err());
        let m = mu(&[1.0, 0.0, 2.0]);
        assert_eq!(m.total(), 3.0);
        assert_eq!(m.null_atoms(), Subset(0b010));
    }

    #[test]
    fn norm_examples() {
        let l1 = BfsSpec::l1(mu(&[1.0, 1.0]));
        assert_eq!(l1.norm(&[1.0, -1.0]), 2.0);
        let linf = BfsSpec::linf(mu(&[1.0, 0.0]));
        assert_eq!(linf.norm(&[3.0, 100.0]), 3.0);
        let l2 = BfsSpec::new(mu(&[1.0, 1.0]), 2.0).unwrap();
        assert!((l2.norm(&[1.0, 1.0]) - 2f64.sqrt()).abs() < 1e-15);
        let l3 = BfsSpec::new(mu(&[1.0, 1.0]), 3.0).unwrap();
        assert!((l3.norm(&[1.0, 1.0]) - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn norm_on_matches_masking() {
        let sp = BfsSpec::with_scale(mu(&[0.5, 0.0, 2.0, 1.0]), 1.5, vec![1.0, 2.0, 0.5, 3.0]).unwrap();
        let f = [1.0, -4.0, 2.5, -0.25];
        for m in 0..16u32 {
            let a = Subset(m);
            let masked: Vec<f64> = (0..4).map(|i| if a.contains(i) { f[i] } else { 0.0 }).collect();
            assert!((sp.norm_on(&f, a) - sp.norm(&masked)).abs() < 1e-14);
        }
    }

    #[test]
    fn kothe_dual_exponents() {
        let base = mu(&[1.0, 2.0]);
        assert_eq!(kothe_dual(&BfsSpec::new(base.clone(), 2.0).unwrap()).p(), 2.0);
        assert!(kothe_dual(&BfsSpec::l1(base.clone())).is_infinite());
        assert!((kothe_dual(&BfsSpec::new(base.clone(), 3.0).unwrap()).p() - 1.5).abs() < 1e-15);
        let sp = BfsSpec::with_scale(base, 3.0, vec![2.0, 0.25]).unwrap();
        let back = kothe_dual(&kothe_dual(&sp));
        assert_eq!(back.p(), 3.0);
        for (a, b) in back.scale().iter().zip(sp.scale()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn dual_norm_examples() {
        let l2 = BfsSpec::new(mu(&[1.0, 1.0]), 2.0).unwrap();
        let d = dual_norm_by_enumeration(&l2, &[1.0, 1.0]).unwrap();
        assert!((d.value - 2f64.sqrt()).abs() < 1e-12);
        let l1 = BfsSpec::l1(mu(&[1.0, 1.0]));
        let d = dual_norm_by_enumeration(&l1, &[2.0, -3.0]).unwrap();
        assert!((d.value - 5.0).abs() < 1e-12);
        assert_eq!(d.extremizer, vec![1.0, -1.0]);
        for sp in [l1, l2, BfsSpec::linf(mu(&[1.0, 1.0]))] {
            assert_eq!(dual_norm_by_enumeration(&sp, &[0.0, 0.0]).unwrap().value, 0.0);
        }
    }

    #[test]
    fn dual_norm_rejects_large_enumeration() {
        let sp = BfsSpec::l1(FiniteMeasureSpace::counting(21));
        assert!(matches!(dual_norm_by_enumeration(&sp, &[1.0; 21]), Err(Error::Resource(_))));
    }

    #[test]
    fn set_function_examples() {
        let phi = set_function(SetFunctionKind::IndicatorNorm { k: 1.0, z: BfsSpec::l1(mu(&[1.0, 2.0])) }).unwrap();
        assert_eq!(phi.get(Subset(0b10)), 2.0);
        assert_eq!(phi.get(Subset(0b11)), 3.0);
        assert_eq!(phi.get(Subset::EMPTY), 0.0);
        assert!(phi.monotone);

        let phi = set_function(SetFunctionKind::IndicatorNorm { k: 5.0, z: BfsSpec::linf(mu(&[1.0, 0.0, 3.0])) }).unwrap();
        assert_eq!(phi.get(Subset(0b001)), 5.0);
        assert_eq!(phi.get(Subset(0b101)), 5.0);
        assert_eq!(phi.get(Subset(0b010)), 0.0);

        let phi = set_function(SetFunctionKind::IndicatorNorm {
            k: 1.0,
            z: BfsSpec::new(mu(&[1.0, 1.0]), 2.0).unwrap(),
        })
        .unwrap();
        assert!((phi.get(Subset(0b11)) - 2f64.sqrt()).abs() < 1e-15);

        assert!(set_function(SetFunctionKind::IndicatorNorm { k: 0.0, z: BfsSpec::scalar() }).is_err());
    }

    #[test]
    fn explicit_table_monotonicity_flag() {
        let t = set_function(SetFunctionKind::Table { n: 2, values: vec![0.0, 1.0, 2.0, 1.5] }).unwrap();
        assert!(!t.monotone);
        assert_eq!(t.monotonicity_violation(), Some((Subset(0b10), Subset(0b11))));
        assert!(set_function(SetFunctionKind::Table { n: 2, values: vec![0.0, 1.0] }).is_err());
    }

    #[test]
    fn ae_leq_examples() {
        assert!(ae_leq(&[1.0, 99.0], &[2.0, 0.0], &mu(&[1.0, 0.0])).unwrap());
        assert!(ae_leq(&[1.0, 2.0], &[1.0, 2.0], &mu(&[1.0, 1.0])).unwrap());
        assert!(!ae_leq(&[3.0, 0.0], &[2.0, 0.0], &mu(&[1.0, 1.0])).unwrap());
        assert!(ae_leq(&[1.0], &[1.0, 2.0], &mu(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let r = decreasing_rearrangement(&[1.0, 3.0], &mu(&[1.0, 1.0])).unwrap();
        assert_eq!(r.steps, vec![(3.0, 1.0), (1.0, 1.0)]);
        let r = decreasing_rearrangement(&[2.0, 2.0, 2.0], &mu(&[1.0, 0.5, 0.0])).unwrap();
        assert_eq!(r.steps, vec![(2.0, 1.5)]);
        let r = decreasing_rearrangement(&[-2.0, 1.0], &mu(&[2.0, 1.0])).unwrap();
        assert_eq!(r.steps, vec![(2.0, 2.0), (1.0, 1.0)]);
        assert_eq!(r.primitive(2.5), 4.5);
        assert_eq!(r.primitive(10.0), 5.0);
        assert_eq!(r.value_at(2.5), 1.0);
    }
}
