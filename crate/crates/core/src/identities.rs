//! Multiplicative polynomial identities behind the fast counters.
//!
//! Everything here is certified by exact symbolic expansion: an identity holds
//! when `lhs - rhs` has an empty term map. The odd-power relation `Υ_κ` is
//! rebuilt from scratch by solving for the integer kernel of the coefficient
//! system obtained from power sums in `κ - 1` variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{CoeffTuple, Family};
use crate::intpoly::{Monomial, MultiPoly, PolyError, WeightVector};
use crate::linalg::integer_kernel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("kappa must be at least 2, got {0}")]
    KappaTooSmall(u32),
    #[error("relation space for kappa={kappa} has dimension {dim}, expected 1")]
    KernelDimensionUnexpected { kappa: u32, dim: usize },
    #[error("expected a {expected} tuple, got {got}")]
    WrongFamily { expected: String, got: Family },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

// -------------------------------------------------------------------------
// Named polynomials
// -------------------------------------------------------------------------

/// `x^j - y^j` in the two variables `(x, y)`.
pub fn sj_poly(j: u32) -> MultiPoly {
    assert!(j >= 1);
    MultiPoly::from_terms(2, [(1, vec![j, 0]), (-1, vec![0, j])])
}

/// `x1^j + x2^j - y1^j - y2^j` in `(x1, x2, y1, y2)`.
pub fn sigma_poly(j: u32) -> MultiPoly {
    assert!(j >= 1);
    MultiPoly::from_terms(
        4,
        [
            (1, vec![j, 0, 0, 0]),
            (1, vec![0, j, 0, 0]),
            (-1, vec![0, 0, j, 0]),
            (-1, vec![0, 0, 0, j]),
        ],
    )
}

/// `(x1^2 + x1 x2 + x2^2) - (y1^2 + y1 y2 + y2^2)` in `(x1, x2, y1, y2)`.
pub fn tau_poly() -> MultiPoly {
    MultiPoly::from_terms(
        4,
        [
            (1, vec![2, 0, 0, 0]),
            (1, vec![1, 1, 0, 0]),
            (1, vec![0, 2, 0, 0]),
            (-1, vec![0, 0, 2, 0]),
            (-1, vec![0, 0, 1, 1]),
            (-1, vec![0, 0, 0, 2]),
        ],
    )
}

/// `(x1 - y1)(x1 - y2)(x2 - y1)(x2 - y2)`.
pub fn cross_difference_product() -> MultiPoly {
    let v = |i| MultiPoly::var(4, i);
    let diff = |a: usize, b: usize| v(a).sub(&v(b)).unwrap();
    [(0, 2), (0, 3), (1, 2), (1, 3)]
        .into_iter()
        .fold(MultiPoly::one(4), |acc, (a, b)| acc.mul(&diff(a, b)).unwrap())
}

/// `Σ_{i<n} x_i^e` in `n` variables.
pub fn power_sum(nvars: usize, e: u32) -> MultiPoly {
    MultiPoly::from_terms(
        nvars,
        (0..nvars).map(|i| {
            let mut m = vec![0; nvars];
            m[i] = e;
            (1, m)
        }),
    )
}

/// `∏_{i<j} (x_i + x_j)` in `n` variables.
pub fn pair_sum_product(nvars: usize) -> MultiPoly {
    let mut acc = MultiPoly::one(nvars);
    for i in 0..nvars {
        for j in i + 1..nvars {
            let f = MultiPoly::var(nvars, i).add(&MultiPoly::var(nvars, j)).unwrap();
            acc = acc.mul(&f).unwrap();
        }
    }
    acc
}

// -------------------------------------------------------------------------
// Identity certification
// -------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    /// `s1^4 + 3 s2^2 - 4 s1 s3 = 0`
    CubicUnivariate,
    /// `σ1^4 + 3σ2^2 - 4σ1σ3 = 12 ∏(x_i - y_j)`
    CubicDiscriminant,
    /// `s2^3 + s1^4 s2 - 2 s1^2 s4 = 0`
    QuarticUnivariate,
    /// `σ2^3 + σ1^4σ2 - 2σ1^2σ4 = 8 ∏(x_i - y_j) τ`
    QuarticDiscriminant,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 4] = [
        IdentityKind::CubicUnivariate,
        IdentityKind::CubicDiscriminant,
        IdentityKind::QuarticUnivariate,
        IdentityKind::QuarticDiscriminant,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            IdentityKind::CubicUnivariate => "cubic_univariate",
            IdentityKind::CubicDiscriminant => "cubic_discriminant",
            IdentityKind::QuarticUnivariate => "quartic_univariate",
            IdentityKind::QuarticDiscriminant => "quartic_discriminant",
        }
    }

    /// The constant multiplying the product side (zero for the univariate
    /// identities).
    pub fn constant(&self) -> i64 {
        match self {
            IdentityKind::CubicUnivariate | IdentityKind::QuarticUnivariate => 0,
            IdentityKind::CubicDiscriminant => 12,
            IdentityKind::QuarticDiscriminant => 8,
        }
    }

    /// Left-hand side: the discriminant form applied to `s_j` or `σ_j`.
    pub fn lhs(&self) -> MultiPoly {
        match self {
            IdentityKind::CubicUnivariate => cubic_form(&sj_poly),
            IdentityKind::CubicDiscriminant => cubic_form(&sigma_poly),
            IdentityKind::QuarticUnivariate => quartic_form(&sj_poly),
            IdentityKind::QuarticDiscriminant => quartic_form(&sigma_poly),
        }
    }

    /// Right-hand side with an arbitrary constant in place of the true one.
    pub fn rhs_with_constant(&self, c: i64) -> MultiPoly {
        let c = BigInt::from(c);
        match self {
            IdentityKind::CubicUnivariate | IdentityKind::QuarticUnivariate => {
                MultiPoly::constant(2, 0).scale(&c)
            }
            IdentityKind::CubicDiscriminant => cross_difference_product().scale(&c),
            IdentityKind::QuarticDiscriminant => cross_difference_product()
                .mul(&tau_poly())
                .unwrap()
                .scale(&c),
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn cubic_form(s: &dyn Fn(u32) -> MultiPoly) -> MultiPoly {
    let (s1, s2, s3) = (s(1), s(2), s(3));
    let three = BigInt::from(3);
    let four = BigInt::from(4);
    s1.pow(4)
        .add(&s2.pow(2).scale(&three))
        .and_then(|p| p.sub(&s1.mul(&s3)?.scale(&four)))
        .unwrap()
}

fn quartic_form(s: &dyn Fn(u32) -> MultiPoly) -> MultiPoly {
    let (s1, s2, s4) = (s(1), s(2), s(4));
    let two = BigInt::from(2);
    s2.pow(3)
        .add(&s1.pow(4).mul(&s2).unwrap())
        .and_then(|p| p.sub(&s1.pow(2).mul(&s4)?.scale(&two)))
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub holds: bool,
    /// `lhs - rhs`, expanded.
    pub residual: MultiPoly,
}

pub fn check_identity(name: &str, lhs: &MultiPoly, rhs: &MultiPoly) -> IdentityReport {
    let residual = lhs.sub(rhs).expect("both sides share a variable context");
    IdentityReport {
        name: name.to_string(),
        holds: residual.is_zero(),
        residual,
    }
}

pub fn verify_identity(which: IdentityKind) -> IdentityReport {
    check_identity(
        which.label(),
        &which.lhs(),
        &which.rhs_with_constant(which.constant()),
    )
}

// -------------------------------------------------------------------------
// Discriminants
// -------------------------------------------------------------------------

fn expect_family(h: &CoeffTuple, family: Family) -> Result<(), IdentityError> {
    if h.family() == family {
        Ok(())
    } else {
        Err(IdentityError::WrongFamily {
            expected: family.to_string(),
            got: h.family(),
        })
    }
}

/// `Ψ(h) = h1^4 + 3 h2^2 - 4 h1 h3`.
pub fn psi(h: &CoeffTuple) -> Result<BigInt, IdentityError> {
    expect_family(h, Family::Vino)?;
    let [h1, h2, h3] = h.values() else { unreachable!() };
    Ok(h1.pow(4) + 3 * h2 * h2 - 4 * h1 * h3)
}

/// `Φ(h) = h2^3 + h1^4 h2 - 2 h1^2 h4`.
pub fn phi(h: &CoeffTuple) -> Result<BigInt, IdentityError> {
    expect_family(h, Family::Quartic)?;
    let [h1, h2, h4] = h.values() else { unreachable!() };
    Ok(h2.pow(3) + h1.pow(4) * h2 - 2 * h1 * h1 * h4)
}

// -------------------------------------------------------------------------
// The odd power-sum relation
// -------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpsilonData {
    pub kappa: u32,
    /// Polynomial in `z_1..z_κ`.
    pub upsilon: MultiPoly,
    /// `C(κ)` with `Υ(τ_1..τ_κ) = C ∏_{i<j≤κ+1} (x_i + x_j)`.
    pub c_constant: BigInt,
    pub kernel_dim: usize,
}

impl UpsilonData {
    pub fn weighted_degree_target(&self) -> u64 {
        let k = self.kappa as u64;
        k * (k + 1) / 2
    }

    pub fn variable_names(&self) -> Vec<String> {
        (1..=self.kappa).map(|i| format!("z{i}")).collect()
    }

    pub fn to_text(&self) -> String {
        let names = self.variable_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.upsilon.to_text(&refs)
    }

    pub fn to_json(&self) -> UpsilonJson {
        UpsilonJson {
            kappa: self.kappa,
            terms: self
                .upsilon
                .terms()
                .rev()
                .map(|(m, c)| UpsilonTerm {
                    alpha: m.exponents().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
            c_constant: self.c_constant.to_string(),
        }
    }

    pub fn eval(&self, h: &[BigInt]) -> Result<BigInt, IdentityError> {
        Ok(self.upsilon.eval(h)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpsilonTerm {
    pub alpha: Vec<u32>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpsilonJson {
    pub kappa: u32,
    pub terms: Vec<UpsilonTerm>,
    pub c_constant: String,
}

/// All exponent vectors `α` of length `kappa` with `Σ (2i-1) α_i = target`,
/// in ascending graded-lex order.
pub fn weighted_monomials(kappa: usize, target: u64) -> Vec<Monomial> {
    fn rec(i: usize, kappa: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == kappa {
            if left == 0 {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        let w = 2 * i as u64 + 1;
        for a in 0..=left / w {
            cur.push(a as u32);
            rec(i + 1, kappa, left - a * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, kappa, target, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `Υ(p_1(x), p_3(x), ..., p_{2κ-1}(x))` where `p_e` is the `e`-th power sum
/// in `nvars` variables.
pub fn compose_with_power_sums(upsilon: &MultiPoly, nvars: usize) -> Result<MultiPoly, PolyError> {
    let subs: BTreeMap<usize, MultiPoly> = (0..upsilon.nvars())
        .map(|i| (i, power_sum(nvars, 2 * i as u32 + 1)))
        .collect();
    upsilon.substitute(&subs)
}

/// Reconstructs `Υ_κ` by linear algebra: the unknown coefficients of every
/// weight-`κ(κ+1)/2` monomial are constrained by requiring the composition
/// with odd power sums in `κ - 1` variables to vanish identically.
pub fn construct_upsilon(kappa: u32) -> Result<UpsilonData, IdentityError> {
    if kappa < 2 {
        return Err(IdentityError::KappaTooSmall(kappa));
    }
    let k = kappa as usize;
    let target = (kappa as u64) * (kappa as u64 + 1) / 2;
    let monos = weighted_monomials(k, target);

    // Column c holds the expansion of ∏ t_i^{α_i} for monomial c.
    let inner_vars = k - 1;
    let sums: Vec<MultiPoly> = (0..k).map(|i| power_sum(inner_vars, 2 * i as u32 + 1)).collect();
    let mut powers: Vec<Vec<MultiPoly>> = sums.iter().map(|_| vec![MultiPoly::one(inner_vars)]).collect();
    let mut columns = Vec::with_capacity(monos.len());
    for m in &monos {
        let mut col = MultiPoly::one(inner_vars);
        for (i, &e) in m.exponents().iter().enumerate() {
            while powers[i].len() <= e as usize {
                let next = powers[i].last().unwrap().mul(&sums[i])?;
                powers[i].push(next);
            }
            if e > 0 {
                col = col.mul(&powers[i][e as usize])?;
            }
        }
        columns.push(col);
    }

    let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for col in &columns {
        for (m, _) in col.terms() {
            let next = row_index.len();
            row_index.entry(m.clone()).or_insert(next);
        }
    }
    let mut rows = vec![vec![BigInt::zero(); monos.len()]; row_index.len()];
    for (c, col) in columns.iter().enumerate() {
        for (m, v) in col.terms() {
            rows[row_index[m]][c] = v.clone();
        }
    }

    let kernel = integer_kernel(rows, monos.len());
    if kernel.len() != 1 {
        return Err(IdentityError::KernelDimensionUnexpected {
            kappa,
            dim: kernel.len(),
        });
    }
    let mut upsilon = MultiPoly::from_terms(
        k,
        monos
            .iter()
            .zip(&kernel[0])
            .map(|(m, c)| (c.clone(), m.exponents().to_vec())),
    );
    let mut pure = vec![0u32; k];
    pure[0] = target as u32;
    let anchor = upsilon.coeff(&pure);
    let flip = if anchor.is_zero() {
        upsilon.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false)
    } else {
        anchor.is_negative()
    };
    if flip {
        upsilon = upsilon.neg();
    }

    let composed = compose_with_power_sums(&upsilon, k + 1)?;
    let quotient = composed.exact_div(&pair_sum_product(k + 1))?;
    let c_constant = quotient.as_constant().ok_or(PolyError::NotDivisible)?;
    if c_constant.is_zero() {
        return Err(PolyError::NotDivisible.into());
    }

    Ok(UpsilonData {
        kappa,
        upsilon,
        c_constant,
        kernel_dim: kernel.len(),
    })
}

/// Independent re-check of a constructed relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpsilonCertificate {
    pub kappa: u32,
    pub vanishes_on_short_sums: bool,
    pub weighted_homogeneous: bool,
    pub weighted_degree: Option<u64>,
    pub primitive: bool,
    pub quotient_is_constant: bool,
}

impl UpsilonCertificate {
    pub fn holds(&self, expected_degree: u64) -> bool {
        self.vanishes_on_short_sums
            && self.weighted_homogeneous
            && self.weighted_degree == Some(expected_degree)
            && self.primitive
            && self.quotient_is_constant
    }
}

pub fn certify_upsilon(data: &UpsilonData) -> Result<UpsilonCertificate, IdentityError> {
    let k = data.kappa as usize;
    let short = compose_with_power_sums(&data.upsilon, k - 1)?;
    let wd = data.upsilon.weighted_degree(&WeightVector::odd(k))?;
    let long = compose_with_power_sums(&data.upsilon, k + 1)?;
    let expected = pair_sum_product(k + 1).scale(&data.c_constant);
    Ok(UpsilonCertificate {
        kappa: data.kappa,
        vanishes_on_short_sums: short.is_zero(),
        weighted_homogeneous: wd.homogeneous,
        weighted_degree: wd.degree,
        primitive: data.upsilon.content().is_one(),
        quotient_is_constant: long.sub(&expected)?.is_zero(),
    })
}

type UpsilonCache = Mutex<HashMap<u32, Arc<UpsilonData>>>;

fn cache() -> &'static UpsilonCache {
    static CACHE: OnceLock<UpsilonCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide cached [`construct_upsilon`]. Concurrent first calls may both
/// construct; the first insert wins.
pub fn upsilon(kappa: u32) -> Result<Arc<UpsilonData>, IdentityError> {
    if let Some(d) = cache().lock().unwrap().get(&kappa) {
        return Ok(d.clone());
    }
    let built = Arc::new(construct_upsilon(kappa)?);
    let mut guard = cache().lock().unwrap();
    Ok(guard.entry(kappa).or_insert(built).clone())
}

/// `Υ_κ(h)` for an odd-power tuple of length `κ`.
pub fn upsilon_value(kappa: u32, h: &CoeffTuple) -> Result<BigInt, IdentityError> {
    if h.family() != Family::Odd(kappa) {
        return Err(IdentityError::WrongFamily {
            expected: Family::Odd(kappa).to_string(),
            got: h.family(),
        });
    }
    upsilon(kappa)?.eval(h.values())
}
