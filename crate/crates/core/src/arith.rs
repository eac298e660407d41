//! Factorization and signed divisor-tuple enumeration.
//!
//! Inputs are bounded by `2^96`, which keeps every modular product inside
//! `u128` arithmetic. Trial division runs to `10^6`; remaining cofactors go
//! through Brent's variant of Pollard rho, and every prime factor above
//! `10^12` carries a primality proof (deterministic Miller-Rabin below
//! `3.3 * 10^24`, a Lucas certificate above).

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const TRIAL_LIMIT: u32 = 1_000_000;
const RHO_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor zero")]
    ZeroInput,
    #[error("{0} exceeds the 2^96 factorization guard")]
    TooLarge(String),
    #[error("factorization budget exceeded on cofactor {0}")]
    BudgetExceeded(u128),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    sign: i8,
    prime_powers: Vec<(u128, u32)>,
}

impl FactoredInt {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn prime_powers(&self) -> &[(u128, u32)] {
        &self.prime_powers
    }

    pub fn abs_value(&self) -> u128 {
        self.prime_powers
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn value(&self) -> BigInt {
        BigInt::from(self.abs_value()) * BigInt::from(self.sign)
    }

    pub fn divisor_count(&self) -> u64 {
        self.prime_powers.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

pub fn factorize(n: &BigInt) -> Result<FactoredInt, FactorError> {
    if n.is_zero() {
        return Err(FactorError::ZeroInput);
    }
    let abs = n.abs();
    let limit = BigInt::from(1u8) << 96;
    if abs > limit {
        return Err(FactorError::TooLarge(n.to_string()));
    }
    let mut f = factorize_u128(abs.to_u128().unwrap())?;
    f.sign = if n.is_negative() { -1 } else { 1 };
    Ok(f)
}

/// Factors a positive machine integer (no size guard beyond `u128`).
pub fn factorize_u128(n: u128) -> Result<FactoredInt, FactorError> {
    assert!(n > 0);
    let mut rest = n;
    let mut primes: Vec<u128> = Vec::new();
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if is_prime_after_trial(m)? {
                primes.push(m);
            } else {
                let d = rho(m).ok_or(FactorError::BudgetExceeded(m))?;
                stack.push(d);
                stack.push(m / d);
            }
        }
    }
    primes.sort_unstable();
    let mut prime_powers: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match prime_powers.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => prime_powers.push((p, 1)),
        }
    }
    Ok(FactoredInt {
        sign: 1,
        prime_powers,
    })
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    // m <= 2^96 here, so 32-bit limbs keep every partial product in range.
    let mut r: u128 = 0;
    for shift in [64u32, 32, 0] {
        let limb = (b >> shift) & 0xFFFF_FFFF;
        r = (r << 32) % m;
        r = (r + a * limb % m) % m;
    }
    r
}

fn pow_mod(mut base: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u128, a: u128) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
/// The first 13 prime bases are a proof of primality below this bound.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

/// Primality of `n > 1`, valid when `n` has no prime factor below
/// [`TRIAL_LIMIT`].
fn is_prime_after_trial(n: u128) -> Result<bool, FactorError> {
    let t = TRIAL_LIMIT as u128;
    if n < t * t {
        return Ok(true);
    }
    if !MR_BASES.iter().all(|&a| strong_probable_prime(n, a)) {
        return Ok(false);
    }
    if n < MR_DETERMINISTIC_BOUND {
        return Ok(true);
    }
    lucas_certificate(n)
}

/// Proves primality of a strong probable prime `n` by exhibiting, for every
/// prime `q | n - 1`, a base of full order modulo `q`.
fn lucas_certificate(n: u128) -> Result<bool, FactorError> {
    let f = factorize_u128(n - 1)?;
    for &(q, _) in f.prime_powers() {
        let witness = (2..200u128).find(|&a| {
            pow_mod(a, n - 1, n) == 1 && pow_mod(a, (n - 1) / q, n) != 1
        });
        if witness.is_none() {
            return Err(FactorError::BudgetExceeded(n));
        }
    }
    Ok(true)
}

/// Brent's cycle detection with batched gcds. Returns a proper divisor.
fn rho(n: u128) -> Option<u128> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut spent = 0u64;
    for c in 1..64u128 {
        let f = |x: u128| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u128, 2u128, 2u128);
        let mut q = 1u128;
        let mut g = 1u128;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            spent += r;
            r *= 2;
            if spent > RHO_BUDGET {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// All positive divisors in ascending order.
pub fn divisors(f: &FactoredInt) -> Vec<u128> {
    divisors_of_exponents(f.prime_powers(), &f.prime_powers().iter().map(|p| p.1).collect::<Vec<_>>())
        .into_iter()
        .map(|(d, _)| d)
        .collect()
}

/// Divisors of `∏ p_i^{e_i}` with their exponent vectors, ascending.
fn divisors_of_exponents(primes: &[(u128, u32)], exps: &[u32]) -> Vec<(u128, Vec<u32>)> {
    let mut out = vec![(1u128, vec![0u32; exps.len()])];
    for (i, (&(p, _), &e)) in primes.iter().zip(exps).enumerate() {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for (d, v) in &out {
            let mut d = *d;
            for a in 0..=e {
                let mut v = v.clone();
                v[i] = a;
                next.push((d, v));
                if a < e {
                    d *= p;
                }
            }
        }
        out = next;
    }
    out.sort_unstable_by_key(|(d, _)| *d);
    out
}

/// An ordered tuple of nonzero integers with a fixed product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorTuple(pub Vec<i128>);

impl DivisorTuple {
    pub fn entries(&self) -> &[i128] {
        &self.0
    }

    pub fn product(&self) -> BigInt {
        self.0.iter().map(|&d| BigInt::from(d)).product()
    }
}

/// Side condition on divisor tuples, consulted on every signed prefix.
pub trait TuplePredicate: Sync {
    /// `false` prunes every completion of `prefix`.
    fn admits_prefix(&self, prefix: &[i128]) -> bool;

    /// Optional bound on `|d_pos|`, used to cut divisor loops short.
    fn max_abs(&self, _pos: usize) -> Option<u128> {
        None
    }
}

impl<F: Fn(&[i128]) -> bool + Sync> TuplePredicate for F {
    fn admits_prefix(&self, prefix: &[i128]) -> bool {
        self(prefix)
    }
}

/// `Σ coeffs_i d_i = rhs`, checked once the prefix covers every index used.
#[derive(Debug, Clone)]
pub struct LinearEq {
    pub coeffs: Vec<(usize, i128)>,
    pub rhs: i128,
}

impl LinearEq {
    pub fn sum_of(indices: &[usize], rhs: i128) -> Self {
        LinearEq {
            coeffs: indices.iter().map(|&i| (i, 1)).collect(),
            rhs,
        }
    }

    fn last_index(&self) -> usize {
        self.coeffs.iter().map(|c| c.0).max().unwrap_or(0)
    }
}

/// Per-position absolute bounds plus linear equalities.
#[derive(Debug, Clone, Default)]
pub struct TupleConstraint {
    pub bounds: Vec<Option<u128>>,
    pub equalities: Vec<LinearEq>,
}

impl TupleConstraint {
    pub fn bounded(len: usize, bound: u128) -> Self {
        TupleConstraint {
            bounds: vec![Some(bound); len],
            equalities: Vec::new(),
        }
    }

    pub fn with_eq(mut self, eq: LinearEq) -> Self {
        self.equalities.push(eq);
        self
    }

    pub fn unbound(mut self, pos: usize) -> Self {
        self.bounds[pos] = None;
        self
    }
}

impl TuplePredicate for TupleConstraint {
    fn admits_prefix(&self, prefix: &[i128]) -> bool {
        let pos = prefix.len() - 1;
        let d = prefix[pos];
        if let Some(Some(b)) = self.bounds.get(pos) {
            if d.unsigned_abs() > *b {
                return false;
            }
        }
        self.equalities
            .iter()
            .filter(|eq| eq.last_index() == pos)
            .all(|eq| eq.coeffs.iter().map(|&(i, c)| c * prefix[i]).sum::<i128>() == eq.rhs)
    }

    fn max_abs(&self, pos: usize) -> Option<u128> {
        self.bounds.get(pos).copied().flatten()
    }
}

/// Every ordered `m`-tuple of nonzero integers with product `n` that the
/// predicate admits, exactly once. Signs of the first `m - 1` entries are free
/// and the last is forced. Output is sorted by absolute values, then by sign
/// pattern (`+` before `-`).
pub fn signed_tuples(
    n: &BigInt,
    m: usize,
    constraint: Option<&dyn TuplePredicate>,
) -> Result<Vec<DivisorTuple>, FactorError> {
    assert!(m >= 1, "tuple length must be positive");
    let f = factorize(n)?;
    Ok(signed_tuples_factored(&f, m, constraint))
}

pub fn signed_tuples_factored(
    f: &FactoredInt,
    m: usize,
    constraint: Option<&dyn TuplePredicate>,
) -> Vec<DivisorTuple> {
    let exps: Vec<u32> = f.prime_powers().iter().map(|p| p.1).collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(m);
    descend(f, &exps, f.sign() as i128, m, constraint, &mut prefix, &mut out);
    out.sort_by(|a, b| {
        let key = |t: &DivisorTuple| -> (Vec<u128>, Vec<bool>) {
            (
                t.0.iter().map(|d| d.unsigned_abs()).collect(),
                t.0.iter().map(|&d| d < 0).collect(),
            )
        };
        key(a).cmp(&key(b))
    });
    out
}

fn descend(
    f: &FactoredInt,
    rest: &[u32],
    sign: i128,
    m: usize,
    constraint: Option<&dyn TuplePredicate>,
    prefix: &mut Vec<i128>,
    out: &mut Vec<DivisorTuple>,
) {
    let pos = prefix.len();
    let admits = |p: &[i128]| constraint.is_none_or(|c| c.admits_prefix(p));
    if pos + 1 == m {
        let last: u128 = f
            .prime_powers()
            .iter()
            .zip(rest)
            .map(|(&(p, _), &e)| p.pow(e))
            .product();
        if constraint.and_then(|c| c.max_abs(pos)).is_some_and(|b| last > b) {
            return;
        }
        prefix.push(sign * last as i128);
        if admits(prefix) {
            out.push(DivisorTuple(prefix.clone()));
        }
        prefix.pop();
        return;
    }
    let bound = constraint.and_then(|c| c.max_abs(pos));
    for (d, e) in divisors_of_exponents(f.prime_powers(), rest) {
        if bound.is_some_and(|b| d > b) {
            break;
        }
        let left: Vec<u32> = rest.iter().zip(&e).map(|(a, b)| a - b).collect();
        for s in [1i128, -1] {
            prefix.push(s * d as i128);
            if admits(prefix) {
                descend(f, &left, sign * s, m, constraint, prefix, out);
            }
            prefix.pop();
        }
    }
}
