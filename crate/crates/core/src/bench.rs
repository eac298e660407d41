//! Sweeps, timings and log-log growth fits over the counters.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{CoeffTuple, Family};
use crate::counters::{
    classify, count, search_volume, CountConfig, CountError, Method, SystemSpec, Verdict,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("need at least 3 points with nonzero count, got {0}")]
    InsufficientNonzeroPoints(usize),
    #[error("ladder needs at least 3 box sizes, got {0}")]
    LadderTooShort(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub vars: usize,
    pub p: u64,
    pub h: CoeffTuple,
    pub method: Method,
    /// `None` when the method was skipped for exceeding the budget.
    pub count: Option<u64>,
    pub elapsed_ms: f64,
    pub branch: String,
}

impl SweepRow {
    fn skipped(family: Family, vars: usize, p: u64, h: &CoeffTuple, method: Method) -> Self {
        SweepRow {
            family,
            vars,
            p,
            h: h.clone(),
            method,
            count: None,
            elapsed_ms: 0.0,
            branch: "SKIPPED".into(),
        }
    }
}

#[derive(Serialize)]
struct CsvRecord {
    family: String,
    t_or_s: usize,
    #[serde(rename = "P")]
    p: u64,
    h: String,
    method: &'static str,
    count: String,
    branch: String,
    elapsed_ms: String,
}

#[derive(Serialize)]
struct JsonRecord {
    family: String,
    t_or_s: usize,
    #[serde(rename = "P")]
    p: u64,
    h: Vec<String>,
    method: &'static str,
    count: Option<u64>,
    branch: String,
    elapsed_ms: f64,
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRecord {
            family: r.family.to_string(),
            t_or_s: r.vars,
            p: r.p,
            h: r.h.joined(";"),
            method: r.method.name(),
            count: r.count.map_or("SKIPPED".into(), |c| c.to_string()),
            branch: r.branch.clone(),
            elapsed_ms: format!("{:.3}", r.elapsed_ms),
        })?;
    }
    if rows.is_empty() {
        w.write_record(["family", "t_or_s", "P", "h", "method", "count", "branch", "elapsed_ms"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(rows: &[SweepRow]) -> Result<String, BenchError> {
    let recs: Vec<JsonRecord> = rows
        .iter()
        .map(|r| JsonRecord {
            family: r.family.to_string(),
            t_or_s: r.vars,
            p: r.p,
            h: r.h.values().iter().map(ToString::to_string).collect(),
            method: r.method.name(),
            count: r.count,
            branch: r.branch.clone(),
            elapsed_ms: r.elapsed_ms,
        })
        .collect();
    Ok(serde_json::to_string_pretty(&recs)?)
}

/// Every tuple with `|h_j| <= hmax`, first coordinate varying slowest.
pub fn h_box(family: Family, hmax: i64) -> Vec<CoeffTuple> {
    let mut out = vec![Vec::new()];
    for _ in 0..family.len() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (-hmax..=hmax).map(move |v| {
                    let mut n = prefix.clone();
                    n.push(v);
                    n
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|v| CoeffTuple::from_i64(family, &v).expect("length matches family"))
        .collect()
}

fn row(
    spec: &SystemSpec,
    h: &CoeffTuple,
    method: Method,
    cfg: &CountConfig,
) -> Result<SweepRow, CountError> {
    let r = count(spec, h, method, cfg)?;
    Ok(SweepRow {
        family: spec.family,
        vars: spec.vars,
        p: spec.p,
        h: h.clone(),
        method,
        count: Some(r.total),
        elapsed_ms: r.elapsed_ms(),
        branch: r.branch(),
    })
}

/// Brute and fast rows for every `h` in the box `|h_j| <= hmax`.
pub fn sweep(
    family: Family,
    vars: usize,
    p: u64,
    hmax: i64,
    cfg: &CountConfig,
) -> Result<Vec<SweepRow>, BenchError> {
    let spec = SystemSpec::new(family, vars, p)?;
    let volume = search_volume(&spec);
    if volume > cfg.budget as u128 {
        return Err(CountError::BudgetExceeded {
            volume,
            budget: cfg.budget,
        }
        .into());
    }
    let hs = h_box(family, hmax);
    let inner = CountConfig { threads: 1, ..*cfg };
    let rows = crate::counters::ordered(cfg.threads, &hs, |h| -> Result<Vec<SweepRow>, CountError> {
        Ok(vec![
            row(&spec, h, Method::Brute, &inner)?,
            row(&spec, h, Method::Fast, &inner)?,
        ])
    });
    let mut out = Vec::with_capacity(2 * hs.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub points: Vec<(u64, u64)>,
    /// Least-squares slope of `log(count + 1)` against `log P`.
    pub slope: f64,
    /// Root-mean-square deviation of the points from the fitted line.
    pub residual: f64,
}

/// Fits the growth exponent; `+1` keeps zero counts finite.
pub fn fit(points: &[(u64, u64)]) -> Result<SlopeFit, BenchError> {
    let nonzero = points.iter().filter(|p| p.1 > 0).count();
    if nonzero < 3 {
        return Err(BenchError::InsufficientNonzeroPoints(nonzero));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64 + 1.0).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    Ok(SlopeFit {
        points: points.to_vec(),
        slope,
        residual: (ssr / n).sqrt(),
    })
}

/// Counts along a ladder of box sizes (fast route where one exists) and fits
/// the growth exponent.
pub fn slope(
    family: Family,
    vars: usize,
    h: &CoeffTuple,
    ladder: &[u64],
    cfg: &CountConfig,
) -> Result<SlopeFit, BenchError> {
    if ladder.len() < 3 {
        return Err(BenchError::LadderTooShort(ladder.len()));
    }
    let mut points = Vec::with_capacity(ladder.len());
    for &p in ladder {
        let spec = SystemSpec::new(family, vars, p)?;
        points.push((p, count(&spec, h, Method::Fast, cfg)?.total));
    }
    fit(&points)
}

/// Timed fast and brute rows for each sample and box size. The first fast
/// call per input is a discarded warm-up; brute is skipped over budget.
pub fn bench_compare(
    family: Family,
    vars: usize,
    samples: &[CoeffTuple],
    ladder: &[u64],
    cfg: &CountConfig,
) -> Result<Vec<SweepRow>, BenchError> {
    let mut out = Vec::new();
    for h in samples {
        for &p in ladder {
            let spec = SystemSpec::new(family, vars, p)?;
            count(&spec, h, Method::Fast, cfg)?;
            let t = Instant::now();
            let mut fast = row(&spec, h, Method::Fast, cfg)?;
            fast.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
            out.push(fast);
            if search_volume(&spec) > cfg.budget as u128 {
                out.push(SweepRow::skipped(family, vars, p, h, Method::Brute));
            } else {
                let t = Instant::now();
                let mut brute = row(&spec, h, Method::Brute, cfg)?;
                brute.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
                out.push(brute);
            }
        }
    }
    Ok(out)
}

/// `h` realised by a random point of the box: `σ_j` over `vars` pairs with
/// coordinates in `1..=coord_max` (vino, quartic), or the odd power sums of
/// `vars` coordinates in `-coord_max..=coord_max`. Distinct tuples accepted
/// by `keep` are returned in generation order.
pub fn sample_h(
    family: Family,
    vars: usize,
    coord_max: i64,
    n: usize,
    seed: u64,
    keep: impl Fn(&CoeffTuple) -> bool,
) -> Vec<CoeffTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exps = family.exponents();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    let attempts = 1000 * n.max(1);
    for _ in 0..attempts {
        if out.len() == n {
            break;
        }
        let (pos, neg): (Vec<i64>, Vec<i64>) = if family.is_odd() {
            let lo = -coord_max;
            ((0..vars).map(|_| rng.gen_range(lo..=coord_max)).collect(), Vec::new())
        } else {
            let mut draw = || (0..vars).map(|_| rng.gen_range(1..=coord_max)).collect();
            (draw(), draw())
        };
        let values: Vec<BigInt> = exps
            .iter()
            .map(|&e| {
                let s = |v: &[i64]| v.iter().map(|&x| BigInt::from(x).pow(e)).sum::<BigInt>();
                s(&pos) - s(&neg)
            })
            .collect();
        let h = CoeffTuple::new(family, values).expect("length matches family");
        if keep(&h) && seen.insert(h.joined(",")) {
            out.push(h);
        }
    }
    out
}

/// Two-pair samples that classify as generic with nonzero discriminant.
pub fn generic_samples(family: Family, n: usize, seed: u64, coord_max: i64) -> Vec<CoeffTuple> {
    sample_h(family, 2, coord_max, n, seed, |h| {
        classify(h, coord_max as u64).is_ok_and(|c| {
            c.verdict == Verdict::Generic && !num_traits::Zero::is_zero(&c.discriminant)
        })
    })
}
