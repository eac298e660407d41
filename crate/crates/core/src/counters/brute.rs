use std::collections::BTreeMap;
use std::time::Instant;

use super::pool::ordered_map;
use super::{odd::type_of, reachable, BoxKind, CountConfig, CountError, CountResult, Method, SystemSpec};
use crate::coeff::CoeffTuple;

/// `Σ_i sign_i v_i^{e_j} = h_j` with every `v_i` in `lo..=hi`. The first
/// exponent is 1, so the last variable is solved for, not enumerated.
#[derive(Debug, Clone)]
pub(crate) struct DiagonalSystem {
    signs: Vec<i128>,
    lo: i64,
    hi: i64,
    h: Vec<i128>,
    /// `powers[j][v - lo] = v^{e_j}`
    powers: Vec<Vec<i128>>,
}

impl DiagonalSystem {
    /// `None` when no tuple in the box can reach `h`.
    pub(crate) fn new(spec: &SystemSpec, h: &CoeffTuple) -> Result<Option<Self>, CountError> {
        spec.check(h)?;
        if !reachable(spec, h) {
            return Ok(None);
        }
        let exps = spec.family.exponents();
        debug_assert_eq!(exps[0], 1);
        let p = spec.p as i64;
        let (signs, lo, hi) = match spec.box_kind() {
            BoxKind::OneToP => {
                let t = spec.vars;
                let mut s = vec![1i128; t];
                s.extend(std::iter::repeat_n(-1, t));
                (s, 1, p)
            }
            BoxKind::Symmetric => (vec![1i128; spec.vars], -p, p),
        };
        let n = signs.len() as u32;
        let max_e = *exps.iter().max().unwrap();
        let ok = (spec.p as i128)
            .checked_pow(max_e)
            .and_then(|v| v.checked_mul(2 * n as i128 + 2))
            .is_some();
        if !ok {
            return Err(CountError::InvalidSpec(format!(
                "P={} too large for exponent {max_e}",
                spec.p
            )));
        }
        let h = h.to_i128().expect("reachable tuples fit i128");
        let powers = exps
            .iter()
            .map(|&e| (lo..=hi).map(|v| (v as i128).pow(e)).collect())
            .collect();
        Ok(Some(DiagonalSystem {
            signs,
            lo,
            hi,
            h,
            powers,
        }))
    }

    pub(crate) fn nvars(&self) -> usize {
        self.signs.len()
    }

    /// Values the first variable ranges over.
    pub(crate) fn first_range(&self) -> Vec<i64> {
        if self.nvars() == 1 {
            vec![self.lo]
        } else {
            (self.lo..=self.hi).collect()
        }
    }

    /// Visits every solution whose first coordinate is `first` (for a
    /// single-variable system `first` is ignored).
    pub(crate) fn for_each_with_first(&self, first: i64, visit: &mut dyn FnMut(&[i64])) {
        let n = self.nvars();
        let m = self.h.len();
        let mut sums = vec![0i128; m];
        let mut buf = vec![0i64; n];
        if n == 1 {
            self.finish(&sums, &mut buf, visit);
            return;
        }
        let idx = (first - self.lo) as usize;
        for j in 0..m {
            sums[j] = self.signs[0] * self.powers[j][idx];
        }
        buf[0] = first;
        self.descend(1, &mut sums, &mut buf, visit);
    }

    fn descend(&self, depth: usize, sums: &mut [i128], buf: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
        if depth + 1 == self.nvars() {
            self.finish(sums, buf, visit);
            return;
        }
        let sign = self.signs[depth];
        let m = self.h.len();
        for v in self.lo..=self.hi {
            let idx = (v - self.lo) as usize;
            for j in 0..m {
                sums[j] += sign * self.powers[j][idx];
            }
            buf[depth] = v;
            self.descend(depth + 1, sums, buf, visit);
            for j in 0..m {
                sums[j] -= sign * self.powers[j][idx];
            }
        }
    }

    fn finish(&self, sums: &[i128], buf: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
        let last = self.nvars() - 1;
        let sign = self.signs[last];
        let v = sign * (self.h[0] - sums[0]);
        if v < self.lo as i128 || v > self.hi as i128 {
            return;
        }
        let idx = (v as i64 - self.lo) as usize;
        for j in 1..self.h.len() {
            if sums[j] + sign * self.powers[j][idx] != self.h[j] {
                return;
            }
        }
        buf[last] = v as i64;
        visit(buf);
    }

    /// Folds over all solutions, partitioning the first coordinate across
    /// workers; partial results are merged in range order.
    pub(crate) fn fold<A, F>(&self, threads: usize, visit: F) -> Vec<A>
    where
        A: Default + Send,
        F: Fn(&mut A, &[i64]) + Sync + Send,
    {
        ordered_map(threads, &self.first_range(), |&first| {
            let mut acc = A::default();
            self.for_each_with_first(first, &mut |x| visit(&mut acc, x));
            acc
        })
    }
}

/// Number of elementary checks brute force performs on this system.
pub fn search_volume(spec: &SystemSpec) -> u128 {
    let (n, width) = match spec.box_kind() {
        BoxKind::OneToP => (2 * spec.vars, spec.p as u128),
        BoxKind::Symmetric => (spec.vars, 2 * spec.p as u128 + 1),
    };
    let mut v: u128 = 1;
    for _ in 1..n {
        v = v.saturating_mul(width);
    }
    v
}

/// Direct enumeration of the box. Odd systems carry a per-type breakdown.
pub fn brute_count(
    spec: &SystemSpec,
    h: &CoeffTuple,
    cfg: &CountConfig,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    spec.check(h)?;
    let volume = search_volume(spec);
    if volume > cfg.budget as u128 {
        return Err(CountError::BudgetExceeded {
            volume,
            budget: cfg.budget,
        });
    }
    let Some(sys) = DiagonalSystem::new(spec, h)? else {
        let mut r = CountResult::single("unreachable", 0, Method::Brute);
        r.elapsed = start.elapsed();
        return Ok(r);
    };
    let mut result = if spec.family.is_odd() {
        let parts: Vec<BTreeMap<usize, u64>> = sys.fold(cfg.threads, |acc: &mut BTreeMap<usize, u64>, x| {
            *acc.entry(type_of(x)).or_default() += 1;
        });
        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
        let mut by_type: BTreeMap<usize, u64> = BTreeMap::new();
        for part in parts {
            for (j, c) in part {
                *by_type.entry(j).or_default() += c;
            }
        }
        for (j, c) in by_type {
            merged.insert(format!("type{j}"), c);
        }
        CountResult::from_breakdown(merged, Method::Brute)
    } else {
        let parts: Vec<u64> = sys.fold(cfg.threads, |acc: &mut u64, _| *acc += 1);
        CountResult::single("enumerated", parts.into_iter().sum(), Method::Brute)
    };
    result.elapsed = start.elapsed();
    Ok(result)
}
