mod report;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use paucity_core::bench::{self, generic_samples, sample_h, SweepRow};
use paucity_core::coeff::{CoeffTuple, Family};
use paucity_core::counters::{
    self, classify, r0, tau_k, type_decompose, CountConfig, CountError, Method, SystemSpec,
    DEFAULT_BUDGET, THREADS_ENV,
};
use paucity_core::identities::{certify_upsilon, upsilon, verify_identity, IdentityKind};

use report::{emit, CountReport, Failure};

const MAX_KAPPA: u32 = 6;

#[derive(Parser)]
#[command(name = "paucity", version, about = "Identity checks and exact solution counts for affine diagonal systems")]
struct Cli {
    /// Worker threads for counting loops.
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 1)]
    threads: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest brute-force search volume attempted.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Fast,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Vino,
    Quartic,
    Odd,
}

#[derive(Args, Clone)]
struct FamilyOpts {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Number of odd exponents (odd family only).
    #[arg(long)]
    k: Option<u32>,
}

impl FamilyOpts {
    fn resolve(&self) -> Result<Family, Failure> {
        let name = match self.family {
            FamilyArg::Vino => "vino",
            FamilyArg::Quartic => "quartic",
            FamilyArg::Odd => "odd",
        };
        if self.family != FamilyArg::Odd && self.k.is_some() {
            return Err(Failure::Usage("--k only applies to --family odd".into()));
        }
        Family::parse(name, self.k).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the four polynomial identities and Υ_κ for κ <= 4.
    Verify,
    /// Construct the odd power-sum relation Υ_κ.
    Upsilon {
        #[arg(long)]
        kappa: u32,
        #[arg(long)]
        json: bool,
    },
    /// Count solutions of one system.
    Count {
        #[command(flatten)]
        family: FamilyOpts,
        /// Pairs (vino, quartic).
        #[arg(long, conflicts_with = "s", required_unless_present = "s")]
        t: Option<usize>,
        /// Signed variables (odd).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
    },
    /// Structured-or-generic verdict with the discriminant.
    Classify {
        #[command(flatten)]
        family: FamilyOpts,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Type decomposition of an odd-power system.
    Types {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Minimal number of odd-power summands and the growth exponent.
    R0 {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Brute and fast counts for every h with |h_j| <= hmax.
    Sweep {
        #[command(flatten)]
        family: FamilyOpts,
        #[arg(long, visible_alias = "s")]
        t: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        hmax: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Least-squares growth exponent over a ladder of box sizes.
    Slope {
        #[command(flatten)]
        family: FamilyOpts,
        #[arg(long, visible_alias = "s")]
        t: usize,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<u64>,
    },
    /// Time fast against brute on seeded generic samples.
    Bench {
        #[command(flatten)]
        family: FamilyOpts,
        #[arg(long, visible_alias = "s", default_value_t = 2)]
        t: usize,
        #[arg(long, value_delimiter = ',')]
        p_ladder: Vec<u64>,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Coordinate range of the box points the samples are built from.
        #[arg(long, default_value_t = 40)]
        coord_max: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_h(family: Family, text: &str) -> Result<CoeffTuple, Failure> {
    CoeffTuple::parse(family, text).map_err(|e| Failure::Usage(e.to_string()))
}

fn spec(family: Family, vars: usize, p: u64) -> Result<SystemSpec, Failure> {
    SystemSpec::new(family, vars, p).map_err(Failure::from)
}

/// Exclusive create, so concurrent runs never clobber each other's output.
fn create(path: &PathBuf) -> Result<std::fs::File, Failure> {
    OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_rows(path: &PathBuf, rows: &[SweepRow], format: Format) -> Result<(), Failure> {
    let mut f = create(path)?;
    match format {
        Format::Json => {
            let text = bench::to_json(rows).map_err(|e| Failure::Io(e.to_string()))?;
            writeln!(f, "{text}").map_err(|e| Failure::Io(e.to_string()))
        }
        _ => bench::write_csv(rows, f).map_err(|e| Failure::Io(e.to_string())),
    }
}

/// Rows agree pairwise on `(P, h)` whenever both methods produced a count.
fn disagreements(rows: &[SweepRow]) -> usize {
    rows.iter()
        .enumerate()
        .filter(|(i, a)| {
            rows[i + 1..].iter().any(|b| {
                a.p == b.p && a.h == b.h && a.method != b.method && a.count.zip(b.count).is_some_and(|(x, y)| x != y)
            })
        })
        .count()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = CountConfig {
        threads: cli.threads.max(1),
        budget: cli.budget,
    };
    let format = cli.format;
    match cli.cmd {
        Cmd::Verify => {
            let mut ok = true;
            for kind in IdentityKind::ALL {
                let r = verify_identity(kind);
                ok &= r.holds;
                println!("{} {}", if r.holds { "PASS" } else { "FAIL" }, r.name);
            }
            for kappa in 2..=4 {
                let data = upsilon(kappa)?;
                let cert = certify_upsilon(&data)?;
                let holds = cert.holds(data.weighted_degree_target());
                ok &= holds;
                println!(
                    "{} upsilon kappa={kappa} C={} kernel_dim={}",
                    if holds { "PASS" } else { "FAIL" },
                    data.c_constant,
                    data.kernel_dim
                );
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Check("identity verification failed".into()))
            }
        }
        Cmd::Upsilon { kappa, json } => {
            if kappa > MAX_KAPPA {
                return Err(Failure::Usage(format!("--kappa above {MAX_KAPPA} is out of desk scale")));
            }
            let data = upsilon(kappa)?;
            if json || format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&data.to_json()).expect("serializable"));
            } else {
                println!("Upsilon_{kappa} = {}", data.to_text());
                println!("C({kappa}) = {}", data.c_constant);
                println!("kernel_dim = {}", data.kernel_dim);
            }
            Ok(())
        }
        Cmd::Count {
            family,
            t,
            s,
            p,
            h,
            method,
        } => {
            let family = family.resolve()?;
            let h = parse_h(family, &h)?;
            let vars = t.or(s).expect("clap enforces one of --t/--s");
            let spec = spec(family, vars, p)?;
            let methods: &[Method] = match method {
                MethodArg::Brute => &[Method::Brute],
                MethodArg::Fast => &[Method::Fast],
                MethodArg::Both => &[Method::Brute, Method::Fast],
            };
            let mut reports = Vec::new();
            for &m in methods {
                let r = counters::count(&spec, &h, m, &cfg)?;
                reports.push(CountReport::new(&spec, &h, &r));
            }
            emit(&reports, format);
            if reports.windows(2).any(|w| w[0].count != w[1].count) {
                return Err(Failure::Check(format!(
                    "methods disagree: {}",
                    reports.iter().map(|r| format!("{}={}", r.method, r.count)).collect::<Vec<_>>().join(" ")
                )));
            }
            Ok(())
        }
        Cmd::Classify { family, p, h } => {
            let family = family.resolve()?;
            let h = parse_h(family, &h)?;
            spec(family, 2, p)?;
            let c = classify(&h, p)?;
            report::classification(family, p, &h, &c, format);
            Ok(())
        }
        Cmd::Types { k, s, p, h } => {
            let family = Family::Odd(k);
            let h = parse_h(family, &h)?;
            let d = type_decompose(k, s, p, &h, &cfg)?;
            report::types(k, s, p, &h, &d, format);
            Ok(())
        }
        Cmd::R0 { k, p, h } => {
            let family = Family::Odd(k);
            let h = parse_h(family, &h)?;
            let r = r0(k, p, &h, &cfg)?;
            let tau = match r {
                Some(_) => Some(tau_k(k, &h, p, &cfg)?),
                None => None,
            };
            report::r0(k, p, &h, r, tau, format);
            Ok(())
        }
        Cmd::Sweep {
            family,
            t,
            p,
            hmax,
            out,
        } => {
            let family = family.resolve()?;
            let rows = bench::sweep(family, t, p, hmax, &cfg)?;
            write_rows(&out, &rows, format)?;
            let bad = disagreements(&rows);
            println!("{} rows written to {}, {bad} disagreements", rows.len(), out.display());
            if bad > 0 {
                return Err(Failure::Check("fast and brute disagree".into()));
            }
            Ok(())
        }
        Cmd::Slope {
            family,
            t,
            h,
            ladder,
        } => {
            let family = family.resolve()?;
            let h = parse_h(family, &h)?;
            let fit = bench::slope(family, t, &h, &ladder, &cfg)?;
            report::slope(family, t, &h, &fit, format);
            Ok(())
        }
        Cmd::Bench {
            family,
            t,
            p_ladder,
            samples,
            seed,
            coord_max,
            out,
        } => {
            let family = family.resolve()?;
            if coord_max < 1 {
                return Err(Failure::Usage("--coord-max must be positive".into()));
            }
            let hs = if family.is_odd() {
                sample_h(family, t, coord_max, samples, seed, |h| !h.is_zero())
            } else {
                generic_samples(family, samples, seed, coord_max)
            };
            let rows = bench::bench_compare(family, t, &hs, &p_ladder, &cfg)?;
            write_rows(&out, &rows, format)?;
            let skipped = rows.iter().filter(|r| r.count.is_none()).count();
            let bad = disagreements(&rows);
            println!(
                "{} samples, {} rows ({skipped} skipped over budget) written to {}, {bad} disagreements",
                hs.len(),
                rows.len(),
                out.display()
            );
            if bad > 0 {
                return Err(Failure::Check("fast and brute disagree".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        if e.is_budget() {
            return Failure::Budget(e.to_string());
        }
        match e {
            CountError::Coeff(_) | CountError::FamilyMismatch { .. } | CountError::InvalidSpec(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<bench::BenchError> for Failure {
    fn from(e: bench::BenchError) -> Self {
        match e {
            bench::BenchError::Count(c) => c.into(),
            bench::BenchError::LadderTooShort(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<paucity_core::identities::IdentityError> for Failure {
    fn from(e: paucity_core::identities::IdentityError) -> Self {
        use paucity_core::identities::IdentityError;
        match e {
            IdentityError::KappaTooSmall(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}
