//! Odd-power systems `Σ x_i^{2j-1} = h_j` over `|x_i| <= P`: type
//! decomposition, minimal representations and the type-0 divisor path.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use super::{brute_count, CountConfig, CountError, CountResult, Method, SystemSpec};
use crate::arith::{signed_tuples, TuplePredicate};
use crate::coeff::{CoeffTuple, Family};
use crate::identities::upsilon;

/// Number of disjoint zero-sum index pairs a solution admits: zeros pair
/// among themselves, and each `v > 0` pairs with `-v`.
pub fn type_of(x: &[i64]) -> usize {
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for &v in x {
        *counts.entry(v).or_default() += 1;
    }
    let zeros = counts.get(&0).copied().unwrap_or(0);
    zeros / 2
        + counts
            .iter()
            .filter(|(&v, _)| v > 0)
            .map(|(v, &c)| c.min(counts.get(&-v).copied().unwrap_or(0)))
            .sum::<usize>()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecomposition {
    /// `j -> V^{(j)}`, only nonzero entries.
    pub counts: BTreeMap<usize, u64>,
    /// Largest type present, `None` without solutions.
    pub i_k: Option<usize>,
}

impl TypeDecomposition {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

fn odd_spec(k: u32, s: usize, p: u64, h: &CoeffTuple) -> Result<SystemSpec, CountError> {
    let spec = SystemSpec::new(Family::Odd(k), s, p)?;
    spec.check(h)?;
    Ok(spec)
}

/// `U_{s,k}(P; h)` by enumeration, broken down by type.
pub fn count_u(
    k: u32,
    s: usize,
    p: u64,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    brute_count(&odd_spec(k, s, p, h)?, h, cfg)
}

pub fn type_decompose(
    k: u32,
    s: usize,
    p: u64,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<TypeDecomposition, CountError> {
    let r = count_u(k, s, p, h, cfg)?;
    let counts: BTreeMap<usize, u64> = r
        .breakdown
        .iter()
        .filter_map(|(label, c)| Some((label.strip_prefix("type")?.parse().ok()?, *c)))
        .filter(|&(_, c)| c > 0)
        .collect();
    let i_k = counts.keys().next_back().copied();
    Ok(TypeDecomposition { counts, i_k })
}

/// Power table `v -> (v, v^3, …, v^{2k-1})` for `|v| <= P`.
fn odd_powers(k: u32, p: u64) -> Result<Vec<(i64, Vec<i128>)>, CountError> {
    let top = 2 * k - 1;
    let fits = (p as i128)
        .checked_pow(top)
        .and_then(|v| v.checked_mul(k as i128 + 2))
        .is_some();
    if !fits {
        return Err(CountError::InvalidSpec(format!("P={p} too large for exponent {top}")));
    }
    let p = p as i64;
    Ok((-p..=p)
        .map(|v| (v, (1..=k).map(|j| (v as i128).pow(2 * j - 1)).collect()))
        .collect())
}

/// All coordinate-wise sums of `r` entries of the power table.
fn half_sums(table: &[(i64, Vec<i128>)], r: usize, k: usize) -> HashSet<Vec<i128>> {
    let mut level: HashSet<Vec<i128>> = HashSet::from([vec![0; k]]);
    for _ in 0..r {
        level = level
            .iter()
            .flat_map(|acc| {
                table
                    .iter()
                    .map(move |(_, pw)| acc.iter().zip(pw).map(|(a, b)| a + b).collect())
            })
            .collect();
    }
    level
}

/// Smallest `r <= k + 1` with `h_j = Σ_{i<=r} a_i^{2j-1}`, `|a_i| <= P`.
pub fn r0(k: u32, p: u64, h: &CoeffTuple, cfg: &CountConfig) -> Result<Option<usize>, CountError> {
    if h.family() != Family::Odd(k) {
        return Err(CountError::FamilyMismatch {
            expected: Family::Odd(k).to_string(),
            got: h.family(),
        });
    }
    SystemSpec::new(Family::Odd(k), 1, p)?;
    if h.is_zero() {
        return Ok(Some(0));
    }
    let Some(target) = h.to_i128() else {
        return Ok(None);
    };
    let table = odd_powers(k, p)?;
    let power = |v: i64| -> Option<&Vec<i128>> { table.get((v + p as i64) as usize).map(|e| &e.1) };
    let in_box = |v: i128| v.unsigned_abs() <= p as u128;
    let width = 2 * p as u128 + 1;
    for r in 1..=(k as usize + 1) {
        let found = match r {
            1 => in_box(target[0]) && power(target[0] as i64) == Some(&target),
            2 => table.iter().any(|(a, pa)| {
                let b = target[0] - *a as i128;
                in_box(b) && power(b as i64).is_some_and(|pb| pa.iter().zip(pb).zip(&target).all(|((x, y), t)| x + y == *t))
            }),
            _ => {
                let (lo, hi) = (r / 2, r - r / 2);
                let volume = width.saturating_pow(hi as u32);
                if volume > cfg.budget as u128 {
                    return Err(CountError::BudgetExceeded {
                        volume,
                        budget: cfg.budget,
                    });
                }
                let left = half_sums(&table, lo, k as usize);
                half_sums(&table, hi, k as usize).iter().any(|s| {
                    let rest: Vec<i128> = target.iter().zip(s).map(|(t, v)| t - v).collect();
                    left.contains(&rest)
                })
            }
        };
        if found {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Growth exponent `⌊(k + 1 - r0) / 2⌋`.
pub fn tau_k(k: u32, h: &CoeffTuple, p: u64, cfg: &CountConfig) -> Result<usize, CountError> {
    let r = r0(k, p, h, cfg)?.ok_or(CountError::NoRepresentation)?;
    Ok((k as usize + 1 - r) / 2)
}

/// Pair positions `(i, j)`, `i < j`, in lexicographic order.
fn pair_index(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// Prefix conditions on `d_ij = x_i + x_j`: bounded by `2P`, every triangle
/// sum `d_ij + d_il + d_jl` even, and the full tuple summing to `κ h1`.
struct PairSums {
    pairs: Vec<(usize, usize)>,
    at: HashMap<(usize, usize), usize>,
    bound: u128,
    total: i128,
}

impl TuplePredicate for PairSums {
    fn admits_prefix(&self, prefix: &[i128]) -> bool {
        let pos = prefix.len() - 1;
        if prefix[pos].unsigned_abs() > self.bound {
            return false;
        }
        let (j, l) = self.pairs[pos];
        for i in 0..j {
            let (a, b) = (self.at[&(i, j)], self.at[&(i, l)]);
            if (prefix[a] + prefix[b] + prefix[pos]) % 2 != 0 {
                return false;
            }
        }
        pos + 1 < self.pairs.len() || prefix.iter().sum::<i128>() == self.total
    }

    fn max_abs(&self, _pos: usize) -> Option<u128> {
        Some(self.bound)
    }
}

/// `V^{(0)}_{κ+1,κ}(P; h)`: solutions without a zero-sum pair. For such a
/// solution `Υ_κ(h) = C(κ) ∏_{i<j} (x_i + x_j)`, so the pair sums form a
/// divisor tuple of `Υ_κ(h)/C(κ)` and determine the `x_i`.
pub fn fast_count_type0(
    kappa: u32,
    p: u64,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let s = kappa as usize + 1;
    let spec = odd_spec(kappa, s, p, h)?;
    if kappa < 2 || kappa > 3 {
        let d = type_decompose(kappa, s, p, h, cfg)?;
        let n = d.counts.get(&0).copied().unwrap_or(0);
        let mut r = CountResult::single("type0-enumerated", n, Method::Fast);
        r.elapsed = start.elapsed();
        return Ok(r);
    }
    let done = |n: u64, note: Option<&str>| {
        let mut r = CountResult::single("type0-divisor", n, Method::Fast);
        r.notes.extend(note.map(String::from));
        r.elapsed = start.elapsed();
        Ok(r)
    };
    if !super::reachable(&spec, h) {
        return done(0, Some("unreachable"));
    }
    let data = upsilon(kappa)?;
    let value = data.eval(h.values())?;
    if value.is_zero() {
        return done(0, Some("Υ(h) = 0 admits no type-0 solution"));
    }
    let (q, rem) = value.div_rem(&data.c_constant);
    if !rem.is_zero() {
        return done(0, Some("C(κ) does not divide Υ(h)"));
    }
    let pairs = pair_index(s);
    let bound = 2 * p as u128;
    if *q.magnitude() > BigUint::from(bound).pow(pairs.len() as u32) {
        return done(0, Some("Υ(h)/C(κ) exceeds every box product"));
    }
    let h_vals = h.to_i128().expect("reachable tuples fit i128");
    let pred = PairSums {
        at: pairs.iter().enumerate().map(|(i, &ij)| (ij, i)).collect(),
        pairs: pairs.clone(),
        bound,
        total: kappa as i128 * h_vals[0],
    };
    let exps = Family::Odd(kappa).exponents();
    let mut sols: BTreeSet<Vec<i64>> = BTreeSet::new();
    for t in signed_tuples(&q, pairs.len(), Some(&pred))? {
        let d = t.entries();
        let mut x = Vec::with_capacity(s);
        for i in 0..s {
            let around: i128 = pairs
                .iter()
                .zip(d)
                .filter(|((a, b), _)| *a == i || *b == i)
                .map(|(_, v)| v)
                .sum();
            let num = around - h_vals[0];
            if num % (kappa as i128 - 1) != 0 {
                break;
            }
            x.push(num / (kappa as i128 - 1));
        }
        if x.len() < s || x.iter().any(|v| v.unsigned_abs() > p as u128) {
            continue;
        }
        let solves = exps
            .iter()
            .zip(&h_vals)
            .all(|(&e, hj)| x.iter().map(|v| v.pow(e)).sum::<i128>() == *hj);
        let sums_match = pairs
            .iter()
            .zip(d)
            .all(|(&(i, j), &dij)| x[i] + x[j] == dij);
        let x: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        if solves && sums_match && type_of(&x) == 0 {
            sols.insert(x);
        }
    }
    done(sols.len() as u64, None)
}

/// `U_{k+1,k}` with type 0 from the divisor path and the remaining types by
/// enumeration.
pub(crate) fn fast_count_u(
    k: u32,
    p: u64,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let s = k as usize + 1;
    let type0 = fast_count_type0(k, p, h, cfg)?;
    let rest = type_decompose(k, s, p, h, cfg)?;
    let mut breakdown: BTreeMap<String, u64> = rest
        .counts
        .iter()
        .filter(|(&j, _)| j > 0)
        .map(|(j, &c)| (format!("type{j}"), c))
        .collect();
    breakdown.insert(type0.branch(), type0.total);
    let mut r = CountResult::from_breakdown(breakdown, Method::Fast);
    r.notes = type0.notes;
    r.notes.push("types >= 1 enumerated".into());
    r.elapsed = start.elapsed();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd(k: u32, v: &[i64]) -> CoeffTuple {
        CoeffTuple::from_i64(Family::Odd(k), v).unwrap()
    }

    fn cfg() -> CountConfig {
        CountConfig::default()
    }

    #[test]
    fn type_examples() {
        assert_eq!(type_of(&[1, -1, 5]), 1);
        assert_eq!(type_of(&[0, 0, 0]), 1);
        assert_eq!(type_of(&[1, 2, 0]), 0);
        assert_eq!(type_of(&[2, -2, 2, -2, 0]), 2);
        assert_eq!(type_of(&[]), 0);
    }

    #[test]
    fn decompositions() {
        let d = type_decompose(2, 3, 2, &odd(2, &[0, 0]), &cfg()).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(1, 13)]));
        assert_eq!(d.i_k, Some(1));
        let d = type_decompose(2, 3, 5, &odd(2, &[3, 9]), &cfg()).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 6)]));
        assert_eq!(d.i_k, Some(0));
        for p in [1, 3, 6] {
            let d = type_decompose(2, 3, p, &odd(2, &[1, 2]), &cfg()).unwrap();
            assert!(d.counts.is_empty());
            assert_eq!(d.i_k, None);
        }
    }

    #[test]
    fn u_examples() {
        assert_eq!(count_u(2, 3, 5, &odd(2, &[0, 0]), &cfg()).unwrap().total, 31);
        let r = count_u(3, 4, 3, &odd(3, &[0, 0, 0]), &cfg()).unwrap();
        let d = type_decompose(3, 4, 3, &odd(3, &[0, 0, 0]), &cfg()).unwrap();
        assert_eq!(d.total(), r.total);
        assert!(r.total >= 3u64.pow(d.i_k.unwrap() as u32));
    }

    #[test]
    fn minimal_representations() {
        assert_eq!(r0(2, 5, &odd(2, &[0, 0]), &cfg()).unwrap(), Some(0));
        assert_eq!(r0(2, 2, &odd(2, &[2, 8]), &cfg()).unwrap(), Some(1));
        assert_eq!(r0(2, 2, &odd(2, &[3, 9]), &cfg()).unwrap(), Some(2));
        // 1 + 1 + 1: three summands, nothing shorter
        assert_eq!(r0(2, 3, &odd(2, &[3, 3]), &cfg()).unwrap(), Some(3));
        assert_eq!(r0(2, 1, &odd(2, &[1, 2]), &cfg()).unwrap(), None);
        assert_eq!(tau_k(2, &odd(2, &[3, 9]), 5, &cfg()).unwrap(), 0);
        assert_eq!(tau_k(3, &odd(3, &[0, 0, 0]), 5, &cfg()).unwrap(), 2);
        assert_eq!(tau_k(2, &odd(2, &[2, 8]), 5, &cfg()).unwrap(), 1);
        assert!(matches!(
            tau_k(2, &odd(2, &[1, 2]), 1, &cfg()),
            Err(CountError::NoRepresentation)
        ));
    }

    #[test]
    fn four_summands_via_halves() {
        // k = 3: 1 + 1 + 1 + 2 needs four terms in a box of size 2
        let h = odd(3, &[5, 11, 35]);
        assert_eq!(r0(3, 2, &h, &cfg()).unwrap(), Some(4));
    }

    #[test]
    fn type0_examples() {
        let r = fast_count_type0(2, 5, &odd(2, &[3, 9]), &cfg()).unwrap();
        assert_eq!(r.total, 6);
        assert_eq!(fast_count_type0(2, 5, &odd(2, &[0, 0]), &cfg()).unwrap().total, 0);
        assert_eq!(fast_count_type0(2, 5, &odd(2, &[1, 2]), &cfg()).unwrap().total, 0);
    }

    #[test]
    fn type0_matches_decomposition() {
        for (k, p) in [(2u32, 4u64), (3, 3)] {
            let s = k as usize + 1;
            let range = 4i64;
            let mut seen = 0;
            let hs: Vec<Vec<i64>> = match k {
                2 => (-range..=range)
                    .flat_map(|a| (-3 * range..=3 * range).step_by(3).map(move |b| vec![a, b]))
                    .collect(),
                _ => (-range..=range)
                    .flat_map(|a| (-6..=6).flat_map(move |b| [-30, -6, 0, 6, 30].map(|c| vec![a, 3 * b, c])))
                    .collect(),
            };
            for v in hs {
                let h = odd(k, &v);
                let fast = fast_count_type0(k, p, &h, &cfg()).unwrap().total;
                let d = type_decompose(k, s, p, &h, &cfg()).unwrap();
                let want = d.counts.get(&0).copied().unwrap_or(0);
                assert_eq!(fast, want, "k={k} P={p} h={v:?}");
                seen += want;
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn fast_u_agrees_with_enumeration() {
        for v in [[0, 0], [3, 9], [1, 2], [2, 8], [1, 1]] {
            let h = odd(2, &v);
            let a = fast_count_u(2, 5, &h, &cfg()).unwrap();
            let b = count_u(2, 3, 5, &h, &cfg()).unwrap();
            assert_eq!(a.total, b.total, "h={v:?}");
        }
    }
}
