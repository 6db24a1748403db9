//! Sieve-backed arithmetic functions: `r(n)` (sums of two squares), `r3(n)`,
//! `omega(n)`, membership in the set of integers built only from primes
//! `≡ 1 (mod 4)`, and the windows `S_{Λ,K}` of such integers with exactly `K`
//! distinct prime factors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{iterated_log, ln_gamma};

/// Memory guard on table construction.
pub const MAX_TABLE_LIMIT: u64 = 100_000_000;

const SEGMENT: u64 = 1 << 20;

/// Arithmetic tables over a contiguous range `[lo, hi]`.
///
/// Built once, then read-only. `n = 0` is representable with `r(0) = 1`.
#[derive(Debug, Clone)]
pub struct ArithTables {
    lo: u64,
    hi: u64,
    spf: Vec<u32>,
    r2: Vec<u32>,
    omega: Vec<u8>,
    a1: Vec<bool>,
}

fn base_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

impl ArithTables {
    /// Tables for `0..=limit`.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_window(0, limit)
    }

    /// Tables for the window `[lo, hi]` only, factoring by a segmented sieve
    /// with primes up to `sqrt(hi)`.
    pub fn build_window(lo: u64, hi: u64) -> Result<Self> {
        if hi > MAX_TABLE_LIMIT {
            return Err(Error::TableTooLarge { requested: hi, max: MAX_TABLE_LIMIT });
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty table window [{lo}, {hi}]")));
        }
        let len = (hi - lo + 1) as usize;
        let mut t = ArithTables {
            lo,
            hi,
            spf: vec![0; len],
            r2: vec![0; len],
            omega: vec![0; len],
            a1: vec![false; len],
        };
        let primes = base_primes((hi as f64).sqrt() as u64 + 1);
        let mut seg_lo = lo;
        while seg_lo <= hi {
            let seg_hi = (seg_lo + SEGMENT - 1).min(hi);
            t.fill_segment(seg_lo, seg_hi, &primes);
            seg_lo = seg_hi + 1;
        }
        Ok(t)
    }

    fn fill_segment(&mut self, seg_lo: u64, seg_hi: u64, primes: &[u64]) {
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut rest: Vec<u64> = (seg_lo..=seg_hi).collect();
        // product of (e + 1) over p ≡ 1 (4); zeroed by an odd power of p ≡ 3 (4)
        let mut r2_mult = vec![1u32; len];
        let mut all_one_mod4 = vec![true; len];
        let off = (seg_lo - self.lo) as usize;
        for &p in primes {
            if p * p > seg_hi {
                break;
            }
            let first = seg_lo.div_ceil(p).max(1) * p;
            let mut m = first;
            while m <= seg_hi {
                let i = (m - seg_lo) as usize;
                let mut e = 0u32;
                while rest[i] % p == 0 {
                    rest[i] /= p;
                    e += 1;
                }
                let slot = off + i;
                if self.spf[slot] == 0 {
                    self.spf[slot] = p as u32;
                }
                self.omega[slot] += 1;
                match p % 4 {
                    1 => r2_mult[i] = r2_mult[i].saturating_mul(e + 1),
                    3 => {
                        all_one_mod4[i] = false;
                        if e % 2 == 1 {
                            r2_mult[i] = 0;
                        }
                    }
                    _ => all_one_mod4[i] = false,
                }
                m += p;
            }
        }
        for i in 0..len {
            let n = seg_lo + i as u64;
            let slot = off + i;
            if n == 0 {
                self.r2[slot] = 1;
                continue;
            }
            let q = rest[i];
            if q > 1 {
                // one prime factor above sqrt(hi) remains
                if self.spf[slot] == 0 {
                    self.spf[slot] = q as u32;
                }
                self.omega[slot] += 1;
                match q % 4 {
                    1 => r2_mult[i] = r2_mult[i].saturating_mul(2),
                    3 => {
                        all_one_mod4[i] = false;
                        r2_mult[i] = 0;
                    }
                    _ => all_one_mod4[i] = false,
                }
            } else if n == 1 {
                self.spf[slot] = 1;
            }
            self.r2[slot] = 4 * r2_mult[i];
            self.a1[slot] = all_one_mod4[i];
        }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    /// Inclusive upper end of the table range.
    pub fn limit(&self) -> u64 {
        self.hi
    }

    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        self.lo <= lo && hi <= self.hi
    }

    fn slot(&self, n: u64) -> Result<usize> {
        if n < self.lo || n > self.hi {
            return Err(Error::TableLimit { value: n, lo: self.lo, hi: self.hi });
        }
        Ok((n - self.lo) as usize)
    }

    /// Smallest prime factor; `1` for `n = 1`, `0` for `n = 0`.
    pub fn spf(&self, n: u64) -> Result<u32> {
        Ok(self.spf[self.slot(n)?])
    }

    /// Ordered signed representations `n = m1^2 + m2^2`.
    pub fn r2(&self, n: u64) -> Result<u32> {
        Ok(self.r2[self.slot(n)?])
    }

    pub fn omega(&self, n: u64) -> Result<u8> {
        Ok(self.omega[self.slot(n)?])
    }

    /// Every prime divisor is `≡ 1 (mod 4)`; true for `n = 1`.
    pub fn is_a1(&self, n: u64) -> Result<bool> {
        Ok(self.a1[self.slot(n)?])
    }

    /// Ordered signed representations as a sum of three squares.
    pub fn r3(&self, n: u64) -> Result<u64> {
        self.slot(n)?;
        self.slot(0)?;
        let mut total = self.r2(n)? as u64;
        let mut j = 1u64;
        while j * j <= n {
            total += 2 * self.r2(n - j * j)? as u64;
            j += 1;
        }
        Ok(total)
    }

    /// `sum_{1 <= n <= u} r3(n)`, via prefix sums of `r(n)`.
    pub fn r3_partial(&self, u: u64) -> Result<u64> {
        self.slot(u)?;
        self.slot(0)?;
        let mut prefix = Vec::with_capacity(u as usize + 1);
        let mut acc = 0u64;
        for m in 0..=u {
            acc += self.r2[(m - self.lo) as usize] as u64;
            prefix.push(acc);
        }
        let mut total = prefix[u as usize];
        let mut j = 1u64;
        while j * j <= u {
            total += 2 * prefix[(u - j * j) as usize];
            j += 1;
        }
        // drop n = 0
        Ok(total - 1)
    }

    /// Rows `(n, spf, r2, omega, a1)` over `[from, to]`.
    pub fn rows(&self, from: u64, to: u64) -> Result<Vec<(u64, u32, u32, u8, bool)>> {
        self.slot(from)?;
        self.slot(to)?;
        Ok((from..=to)
            .map(|n| {
                let i = (n - self.lo) as usize;
                (n, self.spf[i], self.r2[i], self.omega[i], self.a1[i])
            })
            .collect())
    }
}

/// Integer window `[ceil(a1^2 Λ^2), floor(a2^2 Λ^2)]`, clipped below at 1.
pub fn s_window(lambda: f64, a1: f64, a2: f64) -> (u64, u64) {
    let lo = (a1 * a1 * lambda * lambda).ceil().max(1.0) as u64;
    let hi = (a2 * a2 * lambda * lambda).floor().max(0.0) as u64;
    (lo, hi)
}

/// Sorted `ℓ` in the window with every prime factor `≡ 1 (mod 4)` and `omega(ℓ) = k`.
pub fn enumerate_s(tables: &ArithTables, lambda: f64, k: u32, a1: f64, a2: f64) -> Result<Vec<u64>> {
    let (lo, hi) = s_window(lambda, a1, a2);
    if lo > hi {
        return Ok(Vec::new());
    }
    if !tables.covers(lo, hi) {
        return Err(Error::TableLimit { value: if lo < tables.lo { lo } else { hi }, lo: tables.lo, hi: tables.hi });
    }
    Ok((lo..=hi)
        .filter(|&n| {
            let i = (n - tables.lo) as usize;
            tables.a1[i] && tables.omega[i] as u32 == k
        })
        .collect())
}

/// `K = floor(β log_2 Λ)` with iterated natural logs, clamped to 0 when
/// `log_2 Λ` is not positive.
pub fn omega_target(lambda: f64, beta: f64) -> u32 {
    match iterated_log(lambda, 2) {
        Some(l2) if l2 > 0.0 => (beta * l2).floor() as u32,
        _ => 0,
    }
}

/// Main term `(Λ^2 / log Λ) (½ log_2 Λ)^{K-1} / (K-1)!`; `None` for `K = 0`.
pub fn predicted_cardinality(lambda: f64, k: u32) -> Option<f64> {
    if k == 0 {
        return None;
    }
    let l1 = lambda.ln();
    let l2 = iterated_log(lambda, 2)?;
    let km1 = (k - 1) as f64;
    let log_val = 2.0 * l1 - l1.ln() + km1 * (0.5 * l2).ln() - ln_gamma(km1 + 1.0);
    Some(log_val.exp())
}

/// `(K-1)!` divided by the Stirling form `sqrt(2π) K^{K-1/2} e^{-K}`.
pub fn stirling_factorial_ratio(k: u32) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    let log_fact = ln_gamma(kf);
    let log_stirling = 0.5 * (2.0 * std::f64::consts::PI).ln() + (kf - 0.5) * kf.ln() - kf;
    (log_fact - log_stirling).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardinalityRow {
    pub lambda: f64,
    pub k: u32,
    pub card: u64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

impl CardinalityRow {
    pub const COLUMNS: [&'static str; 5] = ["lambda", "K", "card", "predicted", "ratio"];

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!("{},{},{},{},{}", self.lambda, self.k, self.card, opt(self.predicted), opt(self.ratio))
    }
}

/// Exact `|S_{Λ,K}|` against the predicted main term for each `Λ`.
pub fn cardinality_check(tables: &ArithTables, lambdas: &[f64], beta: f64, a1: f64, a2: f64) -> Result<Vec<CardinalityRow>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let k = omega_target(lambda, beta);
            let card = enumerate_s(tables, lambda, k, a1, a2)?.len() as u64;
            let predicted = predicted_cardinality(lambda, k);
            let ratio = predicted.map(|p| card as f64 / p);
            Ok(CardinalityRow { lambda, k, card, predicted, ratio })
        })
        .collect()
}

/// Max over min of the ratios with `K >= 1`.
pub fn ratio_spread(rows: &[CardinalityRow]) -> Option<f64> {
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    if ratios.is_empty() {
        return None;
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min)
}

/// Table covering the windows of every `Λ` in the list.
pub fn tables_for_lambdas(lambdas: &[f64], a1: f64, a2: f64) -> Result<ArithTables> {
    let lo = lambdas.iter().map(|&l| s_window(l, a1, a2).0).min().unwrap_or(1);
    let hi = lambdas.iter().map(|&l| s_window(l, a1, a2).1).max().unwrap_or(1);
    ArithTables::build_window(lo.min(hi), hi.max(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_r2(n: u64) -> u32 {
        let r = (n as f64).sqrt() as i64 + 1;
        let mut c = 0;
        for a in -r..=r {
            for b in -r..=r {
                if (a * a + b * b) as u64 == n {
                    c += 1;
                }
            }
        }
        c
    }

    fn factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_table_values() {
        let t = ArithTables::build(10).unwrap();
        assert_eq!(t.r2(1).unwrap(), 4);
        assert_eq!(t.r2(2).unwrap(), 4);
        assert_eq!(t.r2(5).unwrap(), 8);
        assert_eq!(t.r2(3).unwrap(), 0);
        assert_eq!(t.r2(0).unwrap(), 1);
        assert_eq!(t.omega(6).unwrap(), 2);
        assert_eq!(t.omega(8).unwrap(), 1);
        assert_eq!(t.omega(1).unwrap(), 0);
        assert_eq!(t.spf(9).unwrap(), 3);
        assert!(t.r2(11).is_err());
    }

    #[test]
    fn a1_members_up_to_thirty() {
        let t = ArithTables::build(30).unwrap();
        let got: Vec<u64> = (1..=30).filter(|&n| t.is_a1(n).unwrap()).collect();
        assert_eq!(got, vec![1, 5, 13, 17, 25, 29]);
    }

    #[test]
    fn tables_match_brute_force_and_divisor_formula() {
        let t = ArithTables::build(2000).unwrap();
        for n in 1..=2000u64 {
            assert_eq!(t.r2(n).unwrap(), brute_r2(n), "r2({n})");
            let d1 = (1..=n).filter(|d| n % d == 0 && d % 4 == 1).count() as u32;
            let d3 = (1..=n).filter(|d| n % d == 0 && d % 4 == 3).count() as u32;
            assert_eq!(t.r2(n).unwrap(), 4 * (d1 - d3));
            let f = factor(n);
            assert_eq!(t.omega(n).unwrap() as usize, f.len());
            assert_eq!(t.is_a1(n).unwrap(), f.iter().all(|(p, _)| p % 4 == 1));
            if n > 1 {
                assert_eq!(t.spf(n).unwrap() as u64, f[0].0);
            }
        }
    }

    #[test]
    fn window_tables_agree_with_full_tables() {
        let full = ArithTables::build(5000).unwrap();
        let win = ArithTables::build_window(3001, 5000).unwrap();
        for n in 3001..=5000 {
            assert_eq!(full.r2(n).unwrap(), win.r2(n).unwrap());
            assert_eq!(full.omega(n).unwrap(), win.omega(n).unwrap());
            assert_eq!(full.is_a1(n).unwrap(), win.is_a1(n).unwrap());
            assert_eq!(full.spf(n).unwrap(), win.spf(n).unwrap());
        }
        assert!(win.r2(3000).is_err());
        assert!(win.r3(4000).is_err());
    }

    #[test]
    fn r3_small_values_and_partial_sum() {
        let t = ArithTables::build(10_000).unwrap();
        assert_eq!(t.r3(1).unwrap(), 6);
        assert_eq!(t.r3(2).unwrap(), 12);
        assert_eq!(t.r3(7).unwrap(), 0);
        let direct: u64 = (1..=100).map(|n| t.r3(n).unwrap()).sum();
        assert_eq!(t.r3_partial(100).unwrap(), direct);
        // lattice points in the closed ball of radius 10, minus the origin
        assert_eq!(direct, 4168);
        let ratio = direct as f64 / 1000.0;
        assert!((4.0..=4.4).contains(&ratio));
    }

    #[test]
    fn memory_guard() {
        assert!(matches!(ArithTables::build(MAX_TABLE_LIMIT + 1), Err(Error::TableTooLarge { .. })));
    }

    #[test]
    fn s_window_example_k1() {
        let t = ArithTables::build(200).unwrap();
        // a1 = 0.5, a2 = 1, Λ = 10 -> window [25, 100]
        let s = enumerate_s(&t, 10.0, 1, 0.5, 1.0).unwrap();
        assert_eq!(s, vec![25, 29, 37, 41, 53, 61, 73, 89, 97]);
        assert!(enumerate_s(&t, 10.0, 0, 0.5, 1.0).unwrap().is_empty());
        assert_eq!(enumerate_s(&t, 1.0, 0, 0.5, 1.0).unwrap(), vec![1]);
        assert!(enumerate_s(&t, 100.0, 1, 0.5, 1.0).is_err());
    }

    #[test]
    fn omega_target_uses_iterated_natural_logs() {
        // log log 100 = 1.527..., √2 times that = 2.16...
        assert_eq!(omega_target(100.0, std::f64::consts::SQRT_2), 2);
        assert_eq!(omega_target(50.0, std::f64::consts::SQRT_2), 1);
        assert_eq!(omega_target(2.0, std::f64::consts::SQRT_2), 0);
    }

    #[test]
    fn stirling_ratio_tends_to_one() {
        for k in 3..40 {
            let r = stirling_factorial_ratio(k);
            assert!((r - 1.0).abs() < 0.15, "K={k}: {r}");
        }
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let dev = (stirling_factorial_ratio(k) - 1.0).abs();
            assert!(dev <= prev);
            prev = dev;
        }
    }

    #[test]
    fn predicted_matches_direct_formula() {
        let lam: f64 = 100.0;
        let k = 3;
        let direct = lam * lam / lam.ln() * (0.5 * lam.ln().ln()).powi(2) / 2.0;
        assert!((predicted_cardinality(lam, k).unwrap() / direct - 1.0).abs() < 1e-12);
        assert!(predicted_cardinality(lam, 0).is_none());
    }
}
