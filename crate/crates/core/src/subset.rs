use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol::MAX_ATOMS;

/// A set of atoms encoded as a bitmask; bit `i` is atom `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_ATOMS);
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_atoms(atoms: &[usize]) -> Subset {
        Subset(atoms.iter().fold(0, |m, &i| m | (1 << i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// Binary string with atom 0 first, e.g. `{0, 2}` over 3 atoms is `"101"`.
    pub fn to_bits(self, n: usize) -> String {
        (0..n).map(|i| if self.contains(i) { '1' } else { '0' }).collect()
    }

    pub fn parse_bits(s: &str, n: usize) -> Result<Subset> {
        if s.len() != n {
            return Err(Error::Invalid(format!(
                "subset key {s:?} must have exactly {n} binary digits"
            )));
        }
        let mut m = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => m |= 1 << i,
                '0' => {}
                _ => return Err(Error::Invalid(format!("subset key {s:?} is not binary"))),
            }
        }
        Ok(Subset(m))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.atoms().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.atoms())
    }
}

/// Refuse enumeration over more atoms than the table representation allows.
pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ATOMS {
        Err(Error::Resource(format!(
            "{n} atoms exceeds the subset enumeration cap of {MAX_ATOMS}"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_round_trip() {
        let s = Subset::from_atoms(&[0, 2]);
        assert_eq!(s.to_bits(3), "101");
        assert_eq!(Subset::parse_bits("101", 3).unwrap(), s);
        assert!(Subset::parse_bits("10", 3).is_err());
        assert!(Subset::parse_bits("1x1", 3).is_err());
    }

    #[test]
    fn atoms_iterate_in_order() {
        let s = Subset(0b1011_0000);
        assert_eq!(s.atoms().collect::<Vec<_>>(), vec![4, 5, 7]);
        assert_eq!(s.len(), 3);
        assert!(Subset(0b0001_0000).is_subset_of(s));
        assert_eq!(format!("{s}"), "{4,5,7}");
    }

    #[test]
    fn full_set() {
        assert_eq!(Subset::full(3), Subset(0b111));
        assert_eq!(Subset::full(20).len(), 20);
        assert!(check_enumerable(21).is_err());
    }
}
