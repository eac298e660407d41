use std::fmt;

use serde::Serialize;

use paucity_core::bench::{self, SlopeFit, SweepRow};
use paucity_core::coeff::{CoeffTuple, Family};
use paucity_core::counters::{Classification, CountResult, SystemSpec, TypeDecomposition, Verdict};

use crate::Format;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inconsistent inputs (exit 2).
    Usage(String),
    /// Disagreeing methods or a failed certificate (exit 1).
    Check(String),
    /// Search volume or factorization budget exceeded (exit 3).
    Budget(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Io(_) => 1,
            Failure::Budget(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::Budget(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

fn h_strings(h: &CoeffTuple) -> Vec<String> {
    h.values().iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
pub struct Part {
    pub label: String,
    pub count: u64,
}

#[derive(Serialize)]
pub struct CountReport {
    pub family: String,
    pub exponents: Vec<u32>,
    #[serde(rename = "P")]
    pub p: u64,
    pub h: Vec<String>,
    pub method: &'static str,
    pub count: u64,
    pub breakdown: Vec<Part>,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    row: SweepRow,
}

impl CountReport {
    pub fn new(spec: &SystemSpec, h: &CoeffTuple, r: &CountResult) -> Self {
        CountReport {
            family: spec.family.to_string(),
            exponents: spec.family.exponents(),
            p: spec.p,
            h: h_strings(h),
            method: r.method.name(),
            count: r.total,
            breakdown: r
                .breakdown
                .iter()
                .map(|(l, c)| Part {
                    label: l.clone(),
                    count: *c,
                })
                .collect(),
            elapsed_ms: r.elapsed_ms(),
            notes: r.notes.clone(),
            row: SweepRow {
                family: spec.family,
                vars: spec.vars,
                p: spec.p,
                h: h.clone(),
                method: r.method,
                count: Some(r.total),
                elapsed_ms: r.elapsed_ms(),
                branch: r.branch(),
            },
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn emit(reports: &[CountReport], format: Format) {
    match format {
        Format::Json if reports.len() == 1 => println!("{}", json(&reports[0])),
        Format::Json => println!("{}", json(&reports)),
        Format::Csv => {
            let rows: Vec<SweepRow> = reports.iter().map(|r| r.row.clone()).collect();
            bench::write_csv(&rows, std::io::stdout()).expect("stdout");
        }
        Format::Text => {
            for r in reports {
                let parts: Vec<String> = r.breakdown.iter().map(|p| format!("{}={}", p.label, p.count)).collect();
                println!(
                    "{} P={} h=({}) method={} count={} breakdown[{}] elapsed_ms={:.3}",
                    r.family,
                    r.p,
                    r.h.join(","),
                    r.method,
                    r.count,
                    parts.join(" "),
                    r.elapsed_ms
                );
                for n in &r.notes {
                    println!("  note: {n}");
                }
            }
        }
    }
}

#[derive(Serialize)]
struct ClassifyJson {
    family: String,
    #[serde(rename = "P")]
    p: u64,
    h: Vec<String>,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<u64>,
    discriminant: String,
}

pub fn classification(family: Family, p: u64, h: &CoeffTuple, c: &Classification, format: Format) {
    let (verdict, a, b) = match c.verdict {
        Verdict::Zero => ("zero", None, None),
        Verdict::Pair { a, b } => ("pair", Some(a), Some(b)),
        Verdict::Generic => ("generic", None, None),
    };
    let disc_name = if family == Family::Vino { "psi" } else { "phi" };
    match format {
        Format::Json => println!(
            "{}",
            json(&ClassifyJson {
                family: family.to_string(),
                p,
                h: h_strings(h),
                verdict,
                a,
                b,
                discriminant: c.discriminant.to_string(),
            })
        ),
        _ => {
            let v = match c.verdict {
                Verdict::Pair { a, b } => format!("Pair({a},{b})"),
                Verdict::Zero => "Zero".into(),
                Verdict::Generic => "Generic".into(),
            };
            println!("{family} P={p} h={h} verdict={v} {disc_name}={}", c.discriminant);
        }
    }
}

#[derive(Serialize)]
struct TypesJson {
    k: u32,
    s: usize,
    #[serde(rename = "P")]
    p: u64,
    h: Vec<String>,
    total: u64,
    counts: Vec<Part>,
    i_k: Option<usize>,
}

pub fn types(k: u32, s: usize, p: u64, h: &CoeffTuple, d: &TypeDecomposition, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            json(&TypesJson {
                k,
                s,
                p,
                h: h_strings(h),
                total: d.total(),
                counts: d
                    .counts
                    .iter()
                    .map(|(j, c)| Part {
                        label: format!("type{j}"),
                        count: *c,
                    })
                    .collect(),
                i_k: d.i_k,
            })
        ),
        _ => {
            println!("odd({k}) s={s} P={p} h={h} total={}", d.total());
            for (j, c) in &d.counts {
                println!("  type{j}: {c}");
            }
            match d.i_k {
                Some(i) => println!("  I_k = {i}"),
                None => println!("  I_k = none (no solutions)"),
            }
        }
    }
}

#[derive(Serialize)]
struct R0Json {
    k: u32,
    #[serde(rename = "P")]
    p: u64,
    h: Vec<String>,
    r0: Option<usize>,
    tau: Option<usize>,
}

pub fn r0(k: u32, p: u64, h: &CoeffTuple, r: Option<usize>, tau: Option<usize>, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            json(&R0Json {
                k,
                p,
                h: h_strings(h),
                r0: r,
                tau,
            })
        ),
        _ => match (r, tau) {
            (Some(r), Some(t)) => println!("odd({k}) P={p} h={h} r0={r} tau={t}"),
            _ => println!("odd({k}) P={p} h={h} r0=none (no representation with at most k+1 summands)"),
        },
    }
}

#[derive(Serialize)]
struct SlopeJson {
    family: String,
    t_or_s: usize,
    h: Vec<String>,
    points: Vec<(u64, u64)>,
    slope: f64,
    residual: f64,
}

pub fn slope(family: Family, vars: usize, h: &CoeffTuple, fit: &SlopeFit, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            json(&SlopeJson {
                family: family.to_string(),
                t_or_s: vars,
                h: h_strings(h),
                points: fit.points.clone(),
                slope: fit.slope,
                residual: fit.residual,
            })
        ),
        _ => {
            for (p, c) in &fit.points {
                println!("P={p} count={c}");
            }
            println!("slope={:.4} residual={:.4}", fit.slope, fit.residual);
        }
    }
}
