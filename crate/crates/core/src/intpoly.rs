//! Sparse multivariate polynomials over the integers.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! lexicographic. No zero coefficient is ever stored, so two polynomials are
//! equal exactly when their term maps are equal and an identity check reduces
//! to `is_zero()`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },
    #[error("evaluation point has {got} coordinates, polynomial has {expected} variables")]
    PointLength { expected: usize, got: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("weight vector has length {got}, polynomial has {expected} variables")]
    WeightLength { expected: usize, got: usize },
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("polynomial is not exactly divisible")]
    NotDivisible,
}

/// Exponent vector `z_1^{a_1} ... z_n^{a_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Positive integer weights grading the variables of a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Self {
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        WeightVector(weights)
    }

    /// Weights `1, 3, 5, ..., 2n-1`.
    pub fn odd(n: usize) -> Self {
        WeightVector((0..n as u64).map(|i| 2 * i + 1).collect())
    }

    pub fn weights(&self) -> &[u64] {
        &self.0
    }

    fn grade(&self, m: &Monomial) -> u64 {
        self.0.iter().zip(m.exponents()).map(|(w, &e)| w * e as u64).sum()
    }
}

/// Result of [`MultiPoly::weighted_degree`]. `degree` is `None` for the zero
/// polynomial (degree minus infinity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedDegree {
    pub degree: Option<u64>,
    pub homogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c.into());
        p
    }

    /// The variable with the given index.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, index), BigInt::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, combining
    /// repeated monomials.
    pub fn from_terms<C, I>(nvars: usize, terms: I) -> Self
    where
        C: Into<BigInt>,
        I: IntoIterator<Item = (C, Vec<u32>)>,
    {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c.into());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> BigInt {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_default()
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_constant().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::VarMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same context");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        acc
    }

    pub fn eval(&self, point: &[BigInt]) -> Result<BigInt, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Replaces variable `i` by `assignments[i]` where given; unassigned
    /// variables map to the same-index variable of the target context, which
    /// must then have at least as many variables.
    pub fn substitute(
        &self,
        assignments: &BTreeMap<usize, MultiPoly>,
    ) -> Result<MultiPoly, PolyError> {
        for &i in assignments.keys() {
            if i >= self.nvars {
                return Err(PolyError::IndexOutOfRange {
                    index: i,
                    nvars: self.nvars,
                });
            }
        }
        let target = match assignments.values().next() {
            Some(p) => p.nvars,
            None => return Ok(self.clone()),
        };
        if let Some(p) = assignments.values().find(|p| p.nvars != target) {
            return Err(PolyError::VarMismatch {
                left: target,
                right: p.nvars,
            });
        }
        let images: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| match assignments.get(&i) {
                Some(p) => Ok(p.clone()),
                None if i < target => Ok(MultiPoly::var(target, i)),
                None => Err(PolyError::IndexOutOfRange {
                    index: i,
                    nvars: target,
                }),
            })
            .collect::<Result<_, _>>()?;
        let mut cache = PowerCache::new(&images);
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t.mul(cache.power(i, e))?;
                }
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`, by long division in graded-lex order.
    /// Fails as soon as a leading term is not divisible.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(divisor)?;
        let (lm, lc) = divisor
            .leading_term()
            .map(|(m, c)| (m.clone(), c.clone()))
            .ok_or(PolyError::DivisionByZeroPoly)?;
        let mut rem = self.terms.clone();
        let mut quotient = MultiPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = rm.div(&lm).ok_or(PolyError::NotDivisible)?;
            let (qc, r) = rc.div_rem(&lc);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            for (dm, dc) in &divisor.terms {
                let key = dm.mul(&qm);
                let e = rem.entry(key).or_default();
                *e -= dc * &qc;
                if e.is_zero() {
                    let key = dm.mul(&qm);
                    rem.remove(&key);
                }
            }
            quotient.add_term(qm, qc);
        }
        Ok(quotient)
    }

    pub fn weighted_degree(&self, w: &WeightVector) -> Result<WeightedDegree, PolyError> {
        if w.0.len() != self.nvars {
            return Err(PolyError::WeightLength {
                expected: self.nvars,
                got: w.0.len(),
            });
        }
        let mut grades = self.terms.keys().map(|m| w.grade(m));
        let Some(first) = grades.next() else {
            return Ok(WeightedDegree {
                degree: None,
                homogeneous: true,
            });
        };
        let (mut max, mut homogeneous) = (first, true);
        for g in grades {
            homogeneous &= g == first;
            max = max.max(g);
        }
        Ok(WeightedDegree {
            degree: Some(max),
            homogeneous,
        })
    }

    /// Canonical text with the given variable names: descending graded-lex
    /// order, every coefficient written out.
    pub fn to_text(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(&c.abs().to_string());
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push_str(&format!("*{}", names[v])),
                    _ => out.push_str(&format!("*{}^{}", names[v], e)),
                }
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_text(&refs))
    }
}

/// Memoized powers of substitution images.
struct PowerCache<'a> {
    images: &'a [MultiPoly],
    powers: Vec<Vec<MultiPoly>>,
}

impl<'a> PowerCache<'a> {
    fn new(images: &'a [MultiPoly]) -> Self {
        PowerCache {
            images,
            powers: images.iter().map(|p| vec![MultiPoly::one(p.nvars)]).collect(),
        }
    }

    fn power(&mut self, i: usize, e: u32) -> &MultiPoly {
        let e = e as usize;
        while self.powers[i].len() <= e {
            let next = self.powers[i]
                .last()
                .unwrap()
                .mul(&self.images[i])
                .expect("same context");
            self.powers[i].push(next);
        }
        &self.powers[i][e]
    }
}
