//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paucity_core::bench::{generic_samples, sample_h, slope, sweep};
use paucity_core::coeff::{CoeffTuple, Family};
use paucity_core::counters::{
    brute_count, count_many, family_count, fast_count_s2, r0, tau_k, type_decompose,
    CountConfig, Method, SystemSpec,
};
use paucity_core::identities::{certify_upsilon, upsilon, verify_identity, IdentityKind};

const LIMIT_IDENTITIES: Duration = Duration::from_secs(60);
const LIMIT_CLOSED_FORMS: Duration = Duration::from_secs(10);
const LIMIT_ORACLE: Duration = Duration::from_secs(600);
const LIMIT_PAIR: Duration = Duration::from_secs(1);
const LIMIT_FAST_CALL: Duration = Duration::from_secs(1);
const LIMIT_ODD: Duration = Duration::from_secs(30);
const LIMIT_TAU: Duration = Duration::from_secs(600);
const LIMIT_SLOPES: Duration = Duration::from_secs(900);

const ORACLE_BOXES: [u64; 3] = [4, 8, 12];
const ORACLE_HMAX: i64 = 6;
const ORACLE_RANDOM: usize = 200;
const ORACLE_RANDOM_HMAX: i64 = 1000;
const ORACLE_RANDOM_P: u64 = 12;
const ORACLE_SEED: u64 = 0x5eed_0003;

const STABLE_SAMPLES: usize = 50;
const STABLE_SEED: u64 = 0x5eed_0005;
const STABLE_COORD_MAX: i64 = 40;
const STABLE_P: (u64, u64) = (100_000, 1_000_000);

const TAU_SAMPLES: usize = 20;
const TAU_SEED: u64 = 0x5eed_0007;
const TAU_LADDER: [u64; 4] = [6, 10, 14, 18];
const TAU_TOLERANCE: f64 = 0.35;

const S3_SAMPLES: usize = 20;
const S3_SEED: u64 = 0x5eed_0008;
const S3_LADDER: [u64; 3] = [8, 16, 32];
const S3_SLOPE_MAX: f64 = 2.3;
const S3_STRUCTURED_SLOPE: f64 = 2.0;
const S3_STRUCTURED_TOLERANCE: f64 = 0.3;
const U42_LADDER: [u64; 3] = [6, 10, 16];
const U42_SLOPE_MAX: f64 = 1.3;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn tuple(f: Family, v: &[i64]) -> CoeffTuple {
    CoeffTuple::from_i64(f, v).unwrap()
}

fn identities() -> Check {
    let start = Instant::now();
    for kind in IdentityKind::ALL {
        let r = verify_identity(kind);
        ensure(r.holds && r.residual.is_zero(), || format!("{} residual {}", r.name, r.residual))?;
    }
    let mut constants = Vec::new();
    for kappa in 2..=4 {
        let data = upsilon(kappa).map_err(|e| e.to_string())?;
        let cert = certify_upsilon(&data).map_err(|e| e.to_string())?;
        ensure(cert.holds(data.weighted_degree_target()), || {
            format!("Υ_{kappa} certificate failed: {cert:?}")
        })?;
        constants.push(format!("C({kappa})={}", data.c_constant));
    }
    within(start.elapsed(), LIMIT_IDENTITIES)?;
    Ok(format!("4 identities exact, Υ_2..Υ_4 certified, {}", constants.join(" ")))
}

fn closed_forms() -> Check {
    let start = Instant::now();
    let cfg = CountConfig::default();
    for family in [Family::Vino, Family::Quartic] {
        let zero = CoeffTuple::zero(family);
        for p in 1..=30u64 {
            let spec = SystemSpec::new(family, 2, p).unwrap();
            let want = 2 * p * p - p;
            for method in [Method::Brute, Method::Fast] {
                let got = paucity_core::counters::count(&spec, &zero, method, &cfg)
                    .map_err(|e| e.to_string())?
                    .total;
                ensure(got == want, || {
                    format!("{family} {} P={p}: {got} != {want}", method.name())
                })?;
            }
        }
    }
    within(start.elapsed(), LIMIT_CLOSED_FORMS)?;
    Ok("2P^2-P for P=1..30, both families, both methods".into())
}

fn random_h(family: Family) -> Vec<CoeffTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    (0..ORACLE_RANDOM)
        .map(|_| {
            let v: Vec<i64> = (0..family.len())
                .map(|_| rng.gen_range(-ORACLE_RANDOM_HMAX..=ORACLE_RANDOM_HMAX))
                .collect();
            tuple(family, &v)
        })
        .collect()
}

/// Fast and brute agree everywhere; returns the fast counts for the
/// determinism check.
fn oracle(cfg: &CountConfig) -> Result<(Vec<u64>, String), String> {
    let start = Instant::now();
    let mut counts = Vec::new();
    let mut compared = 0usize;
    let mut nonzero = 0usize;
    for family in [Family::Vino, Family::Quartic] {
        for p in ORACLE_BOXES {
            let rows = sweep(family, 2, p, ORACLE_HMAX, cfg).map_err(|e| e.to_string())?;
            for pair in rows.chunks(2) {
                let (b, f) = (&pair[0], &pair[1]);
                ensure(b.count == f.count, || {
                    format!("{family} P={p} h={}: brute {:?} fast {:?}", b.h, b.count, f.count)
                })?;
                counts.push(f.count.unwrap());
                compared += 1;
                nonzero += usize::from(f.count > Some(0));
            }
        }
        let spec = SystemSpec::new(family, 2, ORACLE_RANDOM_P).unwrap();
        let hs = random_h(family);
        let fast = count_many(&spec, &hs, Method::Fast, cfg);
        let brute = count_many(&spec, &hs, Method::Brute, cfg);
        for ((h, f), b) in hs.iter().zip(fast).zip(brute) {
            let (f, b) = (f.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
            ensure(f.total == b.total, || {
                format!("{family} P={ORACLE_RANDOM_P} h={h}: brute {} fast {}", b.total, f.total)
            })?;
            counts.push(f.total);
            compared += 1;
        }
    }
    within(start.elapsed(), LIMIT_ORACLE)?;
    let msg = format!("{compared} (family, P, h) cases equal, {nonzero} with solutions");
    Ok((counts, msg))
}

fn structured_pair() -> Check {
    let start = Instant::now();
    let cfg = CountConfig::default();
    let (a, b, p) = (2u64, 1u64, 10u64);
    let want = family_count(a, b, p);
    for (family, h) in [(Family::Vino, [1, 3, 7]), (Family::Quartic, [1, 3, 15])] {
        let spec = SystemSpec::new(family, 2, p).unwrap();
        let got = brute_count(&spec, &tuple(family, &h), &cfg).map_err(|e| e.to_string())?;
        ensure(got.total == want && want == 36, || format!("{family}: {} vs {want}", got.total))?;
    }
    let fast = fast_count_s2(p, &tuple(Family::Vino, &[1, 3, 7]), &cfg).map_err(|e| e.to_string())?;
    ensure(fast.total == want, || format!("fast {}", fast.total))?;
    ensure(fast.notes.iter().any(|n| n.contains("4P = 40")), || "missing 4P note".into())?;
    within(start.elapsed(), LIMIT_PAIR)?;
    Ok(format!(
        "brute S_2 = brute T_2 = {want}; headline 4P = {} differs by {}",
        4 * p,
        4 * p - want
    ))
}

fn stabilization(cfg: &CountConfig) -> Result<(Vec<u64>, String), String> {
    let hs = generic_samples(Family::Vino, STABLE_SAMPLES, STABLE_SEED, STABLE_COORD_MAX);
    ensure(hs.len() == STABLE_SAMPLES, || format!("only {} samples", hs.len()))?;
    let (lo, hi) = STABLE_P;
    let spec_lo = SystemSpec::new(Family::Vino, 2, lo).unwrap();
    let spec_hi = SystemSpec::new(Family::Vino, 2, hi).unwrap();
    let mut slowest = Duration::ZERO;
    let a = count_many(&spec_lo, &hs, Method::Fast, cfg);
    let b = count_many(&spec_hi, &hs, Method::Fast, cfg);
    let mut counts = Vec::new();
    for ((h, a), b) in hs.iter().zip(a).zip(b) {
        let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
        ensure(a.breakdown[0].0 == "divisor", || format!("h={h} took branch {}", a.branch()))?;
        ensure(a.total == b.total && a.total >= 1, || {
            format!("h={h}: P={lo} gives {}, P={hi} gives {}", a.total, b.total)
        })?;
        slowest = slowest.max(a.elapsed).max(b.elapsed);
        ensure(slowest < LIMIT_FAST_CALL, || format!("h={h}: fast call took {slowest:.2?}"))?;
        ensure(
            brute_count(&spec_lo, h, cfg).is_err_and(|e| e.is_budget()),
            || format!("brute at P={lo} was not budget-skipped"),
        )?;
        counts.push(a.total);
    }
    Ok((counts, format!("{STABLE_SAMPLES} generic h stable from P=1e5 to 1e6, slowest fast call {slowest:.2?}, brute budget-skipped")))
}

fn odd_system() -> Check {
    let start = Instant::now();
    let cfg = CountConfig::default();
    let f = Family::Odd(2);
    let mut checked = 0;
    let mut check = |h: &[i64], p: u64, want: u64| -> Result<(), String> {
        let d = type_decompose(2, 3, p, &tuple(f, h), &cfg).map_err(|e| e.to_string())?;
        let spec = SystemSpec::new(f, 3, p).unwrap();
        let total = brute_count(&spec, &tuple(f, h), &cfg).map_err(|e| e.to_string())?.total;
        ensure(total == want && d.total() == total, || {
            format!("U_3,2({p};{h:?}) = {total}, types sum {}, want {want}", d.total())
        })?;
        if let Some(i) = d.i_k {
            ensure(total >= p.pow(i as u32), || format!("U < P^I_k at P={p} h={h:?}"))?;
        }
        checked += 1;
        Ok(())
    };
    for p in [2, 5, 10] {
        check(&[0, 0], p, 6 * p + 1)?;
    }
    for p in [2, 5, 10, 20] {
        check(&[3, 9], p, 6)?;
    }
    for p in [2, 5, 10, 20] {
        check(&[1, 2], p, 0)?;
    }
    within(start.elapsed(), LIMIT_ODD)?;
    Ok(format!("{checked} exact values; decompositions sum to totals, U >= P^I_k"))
}

/// `h_j = Σ_{i<=r} a_i^{2j-1}` with `r` in {1, 2}, `|a_i| <= 3`, `h != 0`.
fn built_samples() -> Vec<(u32, usize, CoeffTuple)> {
    let mut rng = ChaCha8Rng::seed_from_u64(TAU_SEED);
    let mut out = Vec::new();
    while out.len() < TAU_SAMPLES {
        let k = rng.gen_range(2..=3u32);
        let r = rng.gen_range(1..=2usize);
        let a: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
        let values: Vec<BigInt> = (1..=k)
            .map(|j| a.iter().map(|&x| BigInt::from(x).pow(2 * j - 1)).sum())
            .collect();
        let h = CoeffTuple::new(Family::Odd(k), values).unwrap();
        if !h.is_zero() {
            out.push((k, r, h));
        }
    }
    out
}

fn growth_exponent() -> Check {
    let start = Instant::now();
    let cfg = CountConfig::default();
    let top = *TAU_LADDER.last().unwrap();
    let mut worst: f64 = 0.0;
    for (k, r, h) in built_samples() {
        let r_min = r0(k, top, &h, &cfg).map_err(|e| e.to_string())?;
        ensure(r_min.is_some_and(|m| m <= r), || format!("k={k} h={h}: r0 {r_min:?} > {r}"))?;
        let tau = tau_k(k, &h, top, &cfg).map_err(|e| e.to_string())?;
        let fit = slope(Family::Odd(k), k as usize + 1, &h, &TAU_LADDER, &cfg)
            .map_err(|e| format!("k={k} h={h}: {e}"))?;
        let dev = (fit.slope - tau as f64).abs();
        worst = worst.max(dev);
        ensure(dev <= TAU_TOLERANCE, || {
            format!("k={k} h={h}: slope {:.3} vs τ = {tau}, points {:?}", fit.slope, fit.points)
        })?;
    }
    within(start.elapsed(), LIMIT_TAU)?;
    Ok(format!("{TAU_SAMPLES} built h: r0 <= r, |slope - τ| <= {worst:.3}"))
}

fn growth_slopes() -> Check {
    let start = Instant::now();
    let cfg = CountConfig::default();
    let nonzero = |h: &CoeffTuple| !h.is_zero();
    let mut s3_max: f64 = f64::MIN;
    for h in sample_h(Family::Vino, 3, 4, S3_SAMPLES, S3_SEED, nonzero) {
        let fit = slope(Family::Vino, 3, &h, &S3_LADDER, &cfg).map_err(|e| format!("h={h}: {e}"))?;
        s3_max = s3_max.max(fit.slope);
        ensure(fit.slope <= S3_SLOPE_MAX, || format!("S_3 h={h}: slope {:.3}", fit.slope))?;
    }
    let structured = slope(Family::Vino, 3, &tuple(Family::Vino, &[1, 3, 7]), &S3_LADDER, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(
        (structured.slope - S3_STRUCTURED_SLOPE).abs() <= S3_STRUCTURED_TOLERANCE,
        || format!("S_3 (1,3,7): slope {:.3}", structured.slope),
    )?;
    let mut u_max: f64 = f64::MIN;
    for h in sample_h(Family::Odd(2), 4, 3, S3_SAMPLES, S3_SEED, nonzero) {
        let fit = slope(Family::Odd(2), 4, &h, &U42_LADDER, &cfg).map_err(|e| format!("h={h}: {e}"))?;
        u_max = u_max.max(fit.slope);
        ensure(fit.slope <= U42_SLOPE_MAX, || format!("U_4,2 h={h}: slope {:.3}", fit.slope))?;
    }
    within(start.elapsed(), LIMIT_SLOPES)?;
    Ok(format!(
        "max S_3 slope {s3_max:.3}, S_3(1,3,7) slope {:.3}, max U_4,2 slope {u_max:.3}",
        structured.slope
    ))
}

fn determinism() -> Check {
    let one = CountConfig::with_threads(1);
    let four = CountConfig::with_threads(4);
    let (a3, _) = oracle(&one)?;
    let (b3, _) = oracle(&four)?;
    ensure(a3 == b3, || "oracle counts differ between 1 and 4 workers".into())?;
    let (a5, _) = stabilization(&one)?;
    let (b5, _) = stabilization(&four)?;
    ensure(a5 == b5, || "stabilization counts differ between 1 and 4 workers".into())?;
    Ok(format!("{} + {} counts identical with 1 and 4 workers", a3.len(), a5.len()))
}

fn run(n: usize, title: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    println!("criterion {n} [{tag}] {title}: {detail} ({:.2?})", start.elapsed());
    outcome.is_ok()
}

fn main() -> ExitCode {
    let single = CountConfig::default();
    let results = [
        run(1, "identity certification", identities),
        run(2, "closed forms 2P^2-P", closed_forms),
        run(3, "oracle equivalence", || oracle(&single).map(|r| r.1)),
        run(4, "structured-pair counts", structured_pair),
        run(5, "paucity stabilization", || stabilization(&single).map(|r| r.1)),
        run(6, "odd-power system", odd_system),
        run(7, "growth exponent τ(k;h)", growth_exponent),
        run(8, "growth slopes", growth_slopes),
        run(9, "determinism across workers", determinism),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
