//! Exact solution counts for the affine diagonal systems.
//!
//! Two independent routes exist for every count: [`brute_count`] enumerates
//! the box directly, and the identity-driven counters in [`fast`] and [`odd`]
//! turn a product identity into a finite divisor search. Tests hold the two
//! routes against each other.

mod brute;
mod classify;
pub mod fast;
pub mod odd;
mod pool;

pub(crate) use pool::ordered_map as ordered;

use std::collections::BTreeMap;
use std::time::Duration;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::arith::FactorError;
use crate::coeff::{CoeffError, CoeffTuple, Family};
use crate::identities::IdentityError;

pub use brute::{brute_count, search_volume};
pub use classify::{classify, family_count, Classification, Verdict};
pub use fast::{fast_count_s2, fast_count_s3, fast_count_t2, fast_count_t3};
pub use odd::{
    count_u, fast_count_type0, r0, tau_k, type_decompose, type_of, TypeDecomposition,
};

/// Largest box size accepted anywhere; keeps all reconstruction arithmetic
/// inside `i128`.
pub const MAX_P: u64 = 1_000_000_000;
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
pub const THREADS_ENV: &str = "PAUCITY_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("search volume {volume} exceeds budget {budget}")]
    BudgetExceeded { volume: u128, budget: u64 },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("expected a {expected} tuple, got {got}")]
    FamilyMismatch { expected: String, got: Family },
    #[error("invalid system: {0}")]
    InvalidSpec(String),
    #[error("no representation with at most k+1 summands inside the box")]
    NoRepresentation,
}

impl CountError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            CountError::BudgetExceeded { .. }
                | CountError::Factor(FactorError::BudgetExceeded(_))
                | CountError::Factor(FactorError::TooLarge(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Fast,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Fast => "fast",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxKind {
    /// `1 <= x <= P`
    OneToP,
    /// `|x| <= P`
    Symmetric,
}

/// A system `Σ (x_i^j - y_i^j) = h_j` over `t` pairs (vino, quartic) or
/// `Σ x_i^{2j-1} = h_j` over `s` variables (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSpec {
    pub family: Family,
    pub vars: usize,
    pub p: u64,
}

impl SystemSpec {
    pub fn new(family: Family, vars: usize, p: u64) -> Result<Self, CountError> {
        if p < 1 || p > MAX_P {
            return Err(CountError::InvalidSpec(format!("P={p} outside 1..={MAX_P}")));
        }
        if vars < 1 {
            return Err(CountError::InvalidSpec("need at least one variable".into()));
        }
        Ok(SystemSpec { family, vars, p })
    }

    pub fn box_kind(&self) -> BoxKind {
        if self.family.is_odd() {
            BoxKind::Symmetric
        } else {
            BoxKind::OneToP
        }
    }

    pub fn check(&self, h: &CoeffTuple) -> Result<(), CountError> {
        if h.family() != self.family {
            return Err(CountError::FamilyMismatch {
                expected: self.family.to_string(),
                got: h.family(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub total: u64,
    /// Labeled sub-counts summing to `total`.
    pub breakdown: Vec<(String, u64)>,
    pub method: Method,
    pub elapsed: Duration,
    /// Free-form remarks (e.g. headline-formula comparisons).
    pub notes: Vec<String>,
}

impl CountResult {
    pub(crate) fn single(label: &str, total: u64, method: Method) -> Self {
        CountResult {
            total,
            breakdown: vec![(label.to_string(), total)],
            method,
            elapsed: Duration::ZERO,
            notes: Vec::new(),
        }
    }

    pub(crate) fn from_breakdown(map: BTreeMap<String, u64>, method: Method) -> Self {
        CountResult {
            total: map.values().sum(),
            breakdown: map.into_iter().collect(),
            method,
            elapsed: Duration::ZERO,
            notes: Vec::new(),
        }
    }

    /// The branch label when there is exactly one, otherwise the labels
    /// joined with `+`.
    pub fn branch(&self) -> String {
        self.breakdown
            .iter()
            .map(|(l, _)| l.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }
}

/// Worker count and search-volume guard shared by all counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    pub threads: usize,
    pub budget: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            threads: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl CountConfig {
    pub fn with_threads(threads: usize) -> Self {
        CountConfig {
            threads: threads.max(1),
            ..Default::default()
        }
    }

    /// Reads the worker count from `PAUCITY_THREADS`, defaulting to 1.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(1);
        Self::with_threads(threads)
    }
}

/// Counts with the requested method. The fast route degrades to brute force
/// when a factorization runs out of budget.
pub fn count(
    spec: &SystemSpec,
    h: &CoeffTuple,
    method: Method,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    spec.check(h)?;
    if method == Method::Brute {
        return brute_count(spec, h, cfg);
    }
    let fast = match (spec.family, spec.vars) {
        (Family::Vino, 2) => fast_count_s2(spec.p, h, cfg),
        (Family::Quartic, 2) => fast_count_t2(spec.p, h, cfg),
        (Family::Vino, 3) => fast_count_s3(spec.p, h, cfg),
        (Family::Quartic, 3) => fast_count_t3(spec.p, h, cfg),
        (Family::Odd(k), s) if s == k as usize + 1 => odd::fast_count_u(k, spec.p, h, cfg),
        _ => {
            let mut r = brute_count(spec, h, cfg)?;
            r.method = Method::Fast;
            r.notes.push("no identity-accelerated path for this system; enumerated".into());
            return Ok(r);
        }
    };
    match fast {
        Err(CountError::Factor(e)) => {
            let mut r = brute_count(spec, h, cfg)?;
            r.method = Method::Fast;
            r.breakdown = vec![("brute-fallback".into(), r.total)];
            r.notes.push(format!("fell back to enumeration: {e}"));
            Ok(r)
        }
        other => other,
    }
}

/// Counts a batch of tuples, spreading them over `cfg.threads` workers.
/// Results come back in input order.
pub fn count_many(
    spec: &SystemSpec,
    hs: &[CoeffTuple],
    method: Method,
    cfg: &CountConfig,
) -> Vec<Result<CountResult, CountError>> {
    let inner = CountConfig { threads: 1, ..*cfg };
    ordered(cfg.threads, hs, |h| count(spec, h, method, &inner))
}

/// `Σ(a^j - b^j)`-style bound: the largest `|h_j|` any solution in the box
/// can produce.
pub(crate) fn reachable(spec: &SystemSpec, h: &CoeffTuple) -> bool {
    let p = BigInt::from(spec.p);
    let n = BigInt::from(spec.vars as u64);
    h.values().iter().zip(spec.family.exponents()).all(|(v, e)| {
        let bound = match spec.box_kind() {
            BoxKind::OneToP => &n * (p.pow(e) - 1u32),
            BoxKind::Symmetric => &n * p.pow(e),
        };
        v.magnitude() <= bound.magnitude()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SystemSpec::new(Family::Vino, 2, 0).is_err());
        assert!(SystemSpec::new(Family::Vino, 0, 3).is_err());
        assert!(SystemSpec::new(Family::Vino, 2, MAX_P + 1).is_err());
        let s = SystemSpec::new(Family::Odd(2), 3, 5).unwrap();
        assert_eq!(s.box_kind(), BoxKind::Symmetric);
        let h = CoeffTuple::from_i64(Family::Vino, &[0, 0, 0]).unwrap();
        assert!(matches!(s.check(&h), Err(CountError::FamilyMismatch { .. })));
    }

    #[test]
    fn reachability() {
        let s = SystemSpec::new(Family::Vino, 2, 3).unwrap();
        let ok = CoeffTuple::from_i64(Family::Vino, &[4, 16, 52]).unwrap();
        let far = CoeffTuple::from_i64(Family::Vino, &[5, 0, 0]).unwrap();
        assert!(reachable(&s, &ok));
        assert!(!reachable(&s, &far));
    }

    #[test]
    fn env_threads() {
        // Only checks the parser; the variable itself is process-global.
        assert_eq!(CountConfig::with_threads(0).threads, 1);
        assert_eq!(CountConfig::default().threads, 1);
    }
}
