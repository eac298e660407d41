//! Coefficient tuples and the exponent families they belong to.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("family {family} expects {expected} coefficients, got {got}")]
    Length {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("odd family needs k >= 1")]
    BadK,
}

/// Exponent families supported by the counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Exponents (1, 2, 3), variables in `1..=P`.
    Vino,
    /// Exponents (1, 2, 4), variables in `1..=P`.
    Quartic,
    /// Exponents (1, 3, ..., 2k-1), variables in `-P..=P`.
    Odd(u32),
}

impl Family {
    pub fn exponents(&self) -> Vec<u32> {
        match *self {
            Family::Vino => vec![1, 2, 3],
            Family::Quartic => vec![1, 2, 4],
            Family::Odd(k) => (1..=k).map(|j| 2 * j - 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Family::Vino | Family::Quartic => 3,
            Family::Odd(k) => k as usize,
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self, Family::Odd(_))
    }

    /// Name without the `k` parameter, as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Vino => "vino",
            Family::Quartic => "quartic",
            Family::Odd(_) => "odd",
        }
    }

    pub fn parse(name: &str, k: Option<u32>) -> Result<Family, CoeffError> {
        match name {
            "vino" => Ok(Family::Vino),
            "quartic" => Ok(Family::Quartic),
            "odd" => match k {
                Some(k) if k >= 1 => Ok(Family::Odd(k)),
                _ => Err(CoeffError::BadK),
            },
            other => Err(CoeffError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Odd(k) => write!(f, "odd({k})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Right-hand side `h` of a diagonal system, matched position by position
/// with the family's exponent list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoeffTuple {
    family: Family,
    values: Vec<BigInt>,
}

impl CoeffTuple {
    pub fn new(family: Family, values: Vec<BigInt>) -> Result<Self, CoeffError> {
        if values.len() != family.len() {
            return Err(CoeffError::Length {
                family,
                expected: family.len(),
                got: values.len(),
            });
        }
        Ok(CoeffTuple { family, values })
    }

    pub fn from_i64(family: Family, values: &[i64]) -> Result<Self, CoeffError> {
        Self::new(family, values.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Parses comma-separated decimal integers, e.g. `1,-3,7`.
    pub fn parse(family: Family, text: &str) -> Result<Self, CoeffError> {
        let values = text
            .split(',')
            .map(|s| {
                let s = s.trim();
                BigInt::from_str(s).map_err(|_| CoeffError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(family, values)
    }

    pub fn zero(family: Family) -> Self {
        CoeffTuple {
            family,
            values: vec![BigInt::zero(); family.len()],
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.family.exponents()
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Values as machine integers, or `None` if any overflows `i128`.
    pub fn to_i128(&self) -> Option<Vec<i128>> {
        self.values.iter().map(ToPrimitive::to_i128).collect()
    }

    /// Semicolon-joined decimal values, the CSV form.
    pub fn joined(&self, sep: &str) -> String {
        self.values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for CoeffTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.joined(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_lists() {
        assert_eq!(Family::Vino.exponents(), vec![1, 2, 3]);
        assert_eq!(Family::Quartic.exponents(), vec![1, 2, 4]);
        assert_eq!(Family::Odd(4).exponents(), vec![1, 3, 5, 7]);
    }

    #[test]
    fn parse_with_negatives() {
        let h = CoeffTuple::parse(Family::Vino, "1,-3, 7").unwrap();
        assert_eq!(h.to_i128().unwrap(), vec![1, -3, 7]);
        assert_eq!(h.joined(";"), "1;-3;7");
        assert!(matches!(
            CoeffTuple::parse(Family::Vino, "1,2"),
            Err(CoeffError::Length { expected: 3, got: 2, .. })
        ));
        assert!(matches!(
            CoeffTuple::parse(Family::Odd(2), "1,x"),
            Err(CoeffError::Parse(_))
        ));
    }

    #[test]
    fn family_parse() {
        assert_eq!(Family::parse("odd", Some(3)).unwrap(), Family::Odd(3));
        assert_eq!(Family::parse("odd", None), Err(CoeffError::BadK));
        assert!(Family::parse("cubic", None).is_err());
    }
}
