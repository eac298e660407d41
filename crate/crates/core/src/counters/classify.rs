use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::CountError;
use crate::coeff::{CoeffTuple, Family};
use crate::identities::{phi, psi};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    /// `h_j = a^j - b^j` for every exponent, `a != b`, both inside the box.
    Pair { a: u64, b: u64 },
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Ψ(h) for vino tuples, Φ(h) for quartic tuples.
    pub discriminant: BigInt,
}

/// Structured-or-generic verdict for a vino or quartic tuple inside `1..=P`.
pub fn classify(h: &CoeffTuple, p: u64) -> Result<Classification, CountError> {
    let discriminant = match h.family() {
        Family::Vino => psi(h)?,
        Family::Quartic => phi(h)?,
        other => {
            return Err(CountError::FamilyMismatch {
                expected: "vino or quartic".into(),
                got: other,
            })
        }
    };
    let verdict = if h.is_zero() {
        Verdict::Zero
    } else {
        candidate_pair(h, p).map_or(Verdict::Generic, |(a, b)| Verdict::Pair { a, b })
    };
    Ok(Classification {
        verdict,
        discriminant,
    })
}

fn candidate_pair(h: &CoeffTuple, p: u64) -> Option<(u64, u64)> {
    let v = h.values();
    let (h1, h2) = (&v[0], &v[1]);
    if h1.is_zero() {
        return None;
    }
    let (q, r) = h2.div_rem(h1);
    if !r.is_zero() {
        return None;
    }
    let (a2, b2) = (&q + h1, &q - h1);
    if a2.is_odd() {
        return None;
    }
    let (a, b): (BigInt, BigInt) = (a2 / 2, b2 / 2);
    let one = BigInt::one();
    let pb = BigInt::from(p);
    if a < one || b < one || a > pb || b > pb || a == b {
        return None;
    }
    let fits = h
        .exponents()
        .iter()
        .zip(v)
        .all(|(&e, hj)| a.pow(e) - b.pow(e) == *hj);
    if !fits {
        return None;
    }
    Some((a.try_into().ok()?, b.try_into().ok()?))
}

/// Ordered solutions of the structured family `{x} = {a, z}`, `{y} = {b, z}`
/// with `1 <= z <= P`: `Σ_z (2 - [z = a])(2 - [z = b])`.
pub fn family_count(a: u64, b: u64, p: u64) -> u64 {
    (1..=p)
        .map(|z| (2 - (z == a) as u64) * (2 - (z == b) as u64))
        .sum()
}

/// Membership in the structured family of the pair `(a, b)`.
pub(crate) fn in_family(a: i128, b: i128, sol: &[i128; 4]) -> bool {
    let [x1, x2, y1, y2] = *sol;
    let other = |u: i128, v: i128, fixed: i128| -> Option<i128> {
        if u == fixed {
            Some(v)
        } else if v == fixed {
            Some(u)
        } else {
            None
        }
    };
    match (other(x1, x2, a), other(y1, y2, b)) {
        (Some(zx), Some(zy)) => zx == zy,
        _ => false,
    }
}
