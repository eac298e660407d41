//! Identity-driven counters for two and three pairs.
//!
//! Every solution of the two-pair system with `Ψ(h) ≠ 0` (resp. `Φ(h) ≠ 0`)
//! yields a factorization of `Ψ(h)/12` (resp. `Φ(h)/8`) into the four cross
//! differences `x_i - y_j` (and `τ`). Enumerating those factorizations and
//! reconstructing the unknowns gives the count; the degenerate discriminant
//! cases fall into the structured family or the `τ = 0` branch.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::classify::{classify, family_count, in_family, Verdict};
use super::pool::ordered_map;
use super::{count, reachable, CountConfig, CountError, CountResult, Method, SystemSpec};
use crate::arith::{signed_tuples, LinearEq, TupleConstraint};
use crate::coeff::{CoeffTuple, Family};

type Solution = [i128; 4];

/// Two-pair context: the exponent list, box and `h` narrowed to `i128`.
struct Pairs {
    exps: [u32; 3],
    p: i128,
    h: [i128; 3],
}

impl Pairs {
    fn in_box(&self, v: i128) -> bool {
        (1..=self.p).contains(&v)
    }

    /// Keeps `[x1, x2, y1, y2]` if it lies in the box and solves the system.
    fn accept(&self, sol: Solution, out: &mut BTreeSet<Solution>) -> bool {
        if !sol.iter().all(|&v| self.in_box(v)) {
            return false;
        }
        let [x1, x2, y1, y2] = sol;
        let ok = self
            .exps
            .iter()
            .zip(self.h)
            .all(|(&e, hj)| x1.pow(e) + x2.pow(e) - y1.pow(e) - y2.pow(e) == hj);
        if ok {
            out.insert(sol);
        }
        ok
    }

    /// `(x1, x2, y1, y2)` from `x1` and the cross differences
    /// `d1 = x1-y1, d2 = x1-y2, d3 = x2-y1`.
    fn from_x1(x1: i128, d: &[i128]) -> Solution {
        [x1, x1 - d[0] + d[2], x1 - d[0], x1 - d[1]]
    }

    /// `x1` from the quadratic equation when `d2 + d3 = h1 ≠ 0`.
    fn linear_x1(&self, d: &[i128]) -> Option<i128> {
        let [h1, h2, _] = self.h;
        let (d1, d2, d3) = (d[0], d[1], d[2]);
        let num = h2 - (d1 - d3).pow(2) + d1 * d1 + d2 * d2;
        exact_quotient(num, 2 * h1)
    }
}

fn exact_quotient(num: i128, den: i128) -> Option<i128> {
    if den == 0 || num % den != 0 {
        None
    } else {
        Some(num / den)
    }
}

/// Prepares the two-pair context, or returns early for `h` that no box point
/// reaches.
fn pairs(family: Family, p: u64, h: &CoeffTuple) -> Result<Result<Pairs, CountResult>, CountError> {
    let spec = SystemSpec::new(family, 2, p)?;
    spec.check(h)?;
    if !reachable(&spec, h) {
        return Ok(Err(CountResult::single("unreachable", 0, Method::Fast)));
    }
    let v = h.to_i128().expect("reachable tuples fit i128");
    let exps = family.exponents();
    Ok(Ok(Pairs {
        exps: [exps[0], exps[1], exps[2]],
        p: p as i128,
        h: [v[0], v[1], v[2]],
    }))
}

fn zero_count(p: u64) -> u64 {
    2 * p * p - p
}

fn pair_result(a: u64, b: u64, p: u64) -> CountResult {
    let n = family_count(a, b, p);
    let mut r = CountResult::single("pair", n, Method::Fast);
    r.notes.push(format!(
        "structured pair (a,b)=({a},{b}): exact family sum {n}; headline value 4P = {} differs by {}",
        4 * p,
        (4 * p) as i128 - n as i128
    ));
    r
}

fn finish(mut r: CountResult, start: Instant) -> CountResult {
    r.elapsed = start.elapsed();
    r
}

/// `S_2(P; h)` for the exponents (1, 2, 3).
pub fn fast_count_s2(p: u64, h: &CoeffTuple, _cfg: &CountConfig) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let ctx = match pairs(Family::Vino, p, h)? {
        Ok(c) => c,
        Err(r) => return Ok(finish(r, start)),
    };
    let cls = classify(h, p)?;
    let r = match cls.verdict {
        Verdict::Zero => CountResult::single("zero", zero_count(p), Method::Fast),
        Verdict::Pair { a, b } => pair_result(a, b, p),
        Verdict::Generic if cls.discriminant.is_zero() => {
            CountResult::single("generic-null", 0, Method::Fast)
        }
        Verdict::Generic => {
            let n = s2_divisor(&ctx, &cls.discriminant)?;
            CountResult::single("divisor", n, Method::Fast)
        }
    };
    Ok(finish(r, start))
}

fn s2_divisor(ctx: &Pairs, psi: &BigInt) -> Result<u64, CountError> {
    let (q, rem) = psi.div_rem(&BigInt::from(12));
    if !rem.is_zero() || ctx.p == 1 {
        return Ok(0);
    }
    let bound = (ctx.p - 1) as u128;
    if *q.magnitude() > BigUint::from(bound).pow(4) {
        return Ok(0);
    }
    let [h1, _, h3] = ctx.h;
    let constraint = TupleConstraint::bounded(4, bound)
        .with_eq(LinearEq::sum_of(&[1, 2], h1))
        .with_eq(LinearEq::sum_of(&[0, 3], h1));
    let mut sols = BTreeSet::new();
    for t in signed_tuples(&q, 4, Some(&constraint))? {
        let d = t.entries();
        let x1 = if h1 != 0 {
            ctx.linear_x1(d)
        } else {
            // d3 = -d2: only the cubic equation still sees x1
            let (d1, d2) = (d[0], d[1]);
            exact_quotient(h3 + (d1 + d2).pow(3) - d1.pow(3) - d2.pow(3), 6 * d1 * d2)
        };
        if let Some(x1) = x1 {
            ctx.accept(Pairs::from_x1(x1, d), &mut sols);
        }
    }
    Ok(sols.len() as u64)
}

/// `T_2(P; h)` for the exponents (1, 2, 4).
pub fn fast_count_t2(p: u64, h: &CoeffTuple, _cfg: &CountConfig) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let ctx = match pairs(Family::Quartic, p, h)? {
        Ok(c) => c,
        Err(r) => return Ok(finish(r, start)),
    };
    let cls = classify(h, p)?;
    let [h1, h2, _] = ctx.h;
    let r = if cls.verdict == Verdict::Zero {
        CountResult::single("zero", zero_count(p), Method::Fast)
    } else if !cls.discriminant.is_zero() {
        CountResult::single("divisor", t2_divisor(&ctx, &cls.discriminant)?, Method::Fast)
    } else if h1 == 0 || h2 == 0 {
        CountResult::single("degenerate", 0, Method::Fast)
    } else {
        let sporadic = t2_sporadic(&ctx)?;
        match cls.verdict {
            Verdict::Pair { a, b } => {
                let extra = sporadic
                    .iter()
                    .filter(|s| !in_family(a as i128, b as i128, s))
                    .count() as u64;
                let mut r = pair_result(a, b, p);
                r.breakdown.push(("sporadic".into(), extra));
                r.total += extra;
                r
            }
            _ => CountResult::single("sporadic", sporadic.len() as u64, Method::Fast),
        }
    };
    Ok(finish(r, start))
}

fn t2_divisor(ctx: &Pairs, phi: &BigInt) -> Result<u64, CountError> {
    let (q, rem) = phi.div_rem(&BigInt::from(8));
    if !rem.is_zero() || ctx.p == 1 {
        return Ok(0);
    }
    let bound = (ctx.p - 1) as u128;
    // |τ| <= 3P^2 - 3 on the box
    let tau_bound = 3 * (ctx.p as u128).pow(2) - 3;
    if tau_bound == 0 || *q.magnitude() > BigUint::from(bound).pow(4) * tau_bound {
        return Ok(0);
    }
    let [h1, _, h4] = ctx.h;
    let mut constraint = TupleConstraint::bounded(5, bound)
        .with_eq(LinearEq::sum_of(&[1, 2], h1))
        .with_eq(LinearEq::sum_of(&[0, 3], h1));
    constraint.bounds[4] = Some(tau_bound);
    let mut sols = BTreeSet::new();
    for t in signed_tuples(&q, 5, Some(&constraint))? {
        let d = t.entries();
        let candidates = if h1 != 0 {
            ctx.linear_x1(d).into_iter().collect()
        } else {
            quartic_roots(d[0], d[1], h4)
        };
        for x1 in candidates {
            let sol = Pairs::from_x1(x1, d);
            let [x1, x2, y1, y2] = sol;
            let tau = x1 * x1 + x1 * x2 + x2 * x2 - y1 * y1 - y1 * y2 - y2 * y2;
            if tau == d[4] {
                ctx.accept(sol, &mut sols);
            }
        }
    }
    Ok(sols.len() as u64)
}

/// Integer roots of `6u^2 c2 - 4u c3 + c4 = h4` where `c_j = (d1+d2)^j - d1^j - d2^j`.
fn quartic_roots(d1: i128, d2: i128, h4: i128) -> Vec<i128> {
    let big = |v: i128| BigInt::from(v);
    let s = big(d1 + d2);
    let (b1, b2) = (big(d1), big(d2));
    let c = |j: u32| -> BigInt { s.pow(j) - b1.pow(j) - b2.pow(j) };
    let a = c(2) * BigInt::from(6);
    let b = -(c(3) * BigInt::from(4));
    let c0 = c(4) - big(h4);
    if a.is_zero() {
        return Vec::new();
    }
    let disc = &b * &b - BigInt::from(4) * &a * &c0;
    if disc.is_negative() {
        return Vec::new();
    }
    let r = disc.sqrt();
    if &r * &r != disc {
        return Vec::new();
    }
    let den = &a * 2;
    let mut out = Vec::new();
    for num in [-&b + &r, -&b - &r] {
        let (q, rem) = num.div_rem(&den);
        if rem.is_zero() {
            if let Some(v) = q.to_i128() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Solutions with `τ(x, y) = 0`, via the difference of squares
/// `(4h1x1 - (h1^2 - h2))^2 - (4h1y1 + (h1^2 + h2))^2 = 12 h2 h1^2`.
fn t2_sporadic(ctx: &Pairs) -> Result<BTreeSet<Solution>, CountError> {
    let [h1, h2, _] = ctx.h;
    let mut sols = BTreeSet::new();
    let (u, v) = (h1 * h1 - h2, h1 * h1 + h2);
    let (Some(sx), Some(sy)) = (exact_quotient(u, 2 * h1), exact_quotient(-v, 2 * h1)) else {
        return Ok(sols);
    };
    let m = BigInt::from(12) * BigInt::from(h2) * BigInt::from(h1 * h1);
    // |X| + |Y| over the box bounds each factor
    let reach = 8 * h1.unsigned_abs() * ctx.p as u128 + u.unsigned_abs() + v.unsigned_abs();
    let constraint = TupleConstraint::bounded(2, reach);
    for t in signed_tuples(&m, 2, Some(&constraint))? {
        let (e1, e2) = (t.entries()[0], t.entries()[1]);
        if (e1 + e2) % 2 != 0 {
            continue;
        }
        let (x, y) = ((e1 + e2) / 2, (e2 - e1) / 2);
        let (Some(x1), Some(y1)) = (
            exact_quotient(x + u, 4 * h1),
            exact_quotient(y - v, 4 * h1),
        ) else {
            continue;
        };
        ctx.accept([x1, sx - x1, y1, sy - y1], &mut sols);
    }
    Ok(sols)
}

/// `S_3(P; h)` as a sum of two-pair counts over the third pair.
pub fn fast_count_s3(p: u64, h: &CoeffTuple, cfg: &CountConfig) -> Result<CountResult, CountError> {
    three_pairs(Family::Vino, p, h, cfg)
}

/// `T_3(P; h)` as a sum of two-pair counts over the third pair.
pub fn fast_count_t3(p: u64, h: &CoeffTuple, cfg: &CountConfig) -> Result<CountResult, CountError> {
    three_pairs(Family::Quartic, p, h, cfg)
}

fn three_pairs(
    family: Family,
    p: u64,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let spec = SystemSpec::new(family, 3, p)?;
    spec.check(h)?;
    let calls = (p as u128) * (p as u128);
    if calls > cfg.budget as u128 {
        return Err(CountError::BudgetExceeded {
            volume: calls,
            budget: cfg.budget,
        });
    }
    if !reachable(&spec, h) {
        return Ok(finish(CountResult::single("unreachable", 0, Method::Fast), start));
    }
    let exps = family.exponents();
    // multiplicity of each shifted tuple h'(u, v) = h - u^j + v^j
    let mut shifted: BTreeMap<Vec<BigInt>, u64> = BTreeMap::new();
    for u in 1..=p {
        for v in 1..=p {
            let key = h
                .values()
                .iter()
                .zip(&exps)
                .map(|(hj, &e)| hj - BigInt::from(u).pow(e) + BigInt::from(v).pow(e))
                .collect();
            *shifted.entry(key).or_default() += 1;
        }
    }
    let spec2 = SystemSpec::new(family, 2, p)?;
    let inner = CountConfig { threads: 1, ..*cfg };
    let keys: Vec<(Vec<BigInt>, u64)> = shifted.into_iter().collect();
    let parts = ordered_map(cfg.threads, &keys, |(key, _)| {
        let hp = CoeffTuple::new(family, key.clone())?;
        count(&spec2, &hp, Method::Fast, &inner)
    });
    let mut breakdown: BTreeMap<String, u64> = BTreeMap::new();
    let mut notes = BTreeSet::new();
    for ((_, mult), part) in keys.iter().zip(parts) {
        let part = part?;
        for (label, c) in &part.breakdown {
            *breakdown.entry(label.clone()).or_default() += c * mult;
        }
        notes.extend(part.notes.into_iter().filter(|n| n.starts_with("fell back")));
    }
    breakdown.retain(|_, c| *c > 0);
    let mut r = CountResult::from_breakdown(breakdown, Method::Fast);
    r.notes.push(format!("{} distinct shifted tuples", keys.len()));
    r.notes.extend(notes);
    Ok(finish(r, start))
}
