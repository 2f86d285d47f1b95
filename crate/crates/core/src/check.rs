//! A named inequality check with the values on both sides.

use serde::Serialize;

use crate::error::Witness;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "real")]
    pub bound: f64,
    #[serde(with = "real")]
    pub achieved: f64,
    pub holds: bool,
    /// Where `achieved` is attained; always set when the check fails.
    pub witness: Witness,
}

impl Check {
    /// `achieved ≤ bound + tol`. A NaN never holds.
    pub fn at_most(name: impl Into<String>, achieved: f64, bound: f64, tol: f64, witness: Witness) -> Check {
        Check { name: name.into(), bound, achieved, holds: achieved <= bound + tol, witness }
    }

    /// `achieved ≤ bound + tol · max(1, |bound|)`.
    pub fn at_most_rel(name: impl Into<String>, achieved: f64, bound: f64, tol: f64, witness: Witness) -> Check {
        Check { name: name.into(), bound, achieved, holds: achieved <= bound + tol * bound.abs().max(1.0), witness }
    }

    pub fn prefixed(mut self, prefix: &str) -> Check {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

/// Serde adapter writing non-finite reals as `"inf"`, `"-inf"` or `"nan"`.
pub mod real {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }
}

/// Index and value of the largest entry; the first wins ties and NaN counts as largest.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if !(v > b || (v.is_nan() && !b.is_nan())) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_and_nan() {
        assert!(Check::at_most("a", 1.0 + 1e-10, 1.0, 1e-9, Witness::None).holds);
        assert!(!Check::at_most("a", f64::NAN, 1.0, 1e-9, Witness::None).holds);
        assert!(Check::at_most_rel("a", 100.0 + 1e-8, 100.0, 1e-9, Witness::None).holds);
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0]), Some((1, 3.0)));
        assert_eq!(argmax([1.0, f64::NAN, 3.0]).map(|p| p.0), Some(1));
        assert_eq!(argmax(std::iter::empty()), None);
    }
}
