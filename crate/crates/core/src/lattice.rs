//! Exact lattice point counts in the dilates `sqrt(t) B` and the discrepancy
//! `P(t) = #(sqrt(t) B ∩ Z^3) - vol(B) t^{3/2}`.
//!
//! Counting walks the horizontal slices `m3 = const`; each slice is a disc
//! whose integer points are counted with the 8-fold symmetric row sum. Points
//! whose squared radius lands within the guard band of the approximate slice
//! radius are re-decided by the profile's gauge test, which is also what the
//! brute-force oracle falls back to, so both routes agree on ties.

use rayon::prelude::*;
use serde::Serialize;

use crate::body::{slice_radius, BodyGeometry, RevolutionProfile};
use crate::error::{Error, Result};
use crate::numeric::iterated_log;

/// Largest brute-force box the oracle accepts.
pub const BRUTE_BOX_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub t: f64,
    pub count: u64,
    pub per_slice: Option<Vec<(i64, u64)>>,
    /// Lattice points whose membership was decided inside the guard band.
    pub boundary_flags: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CountOptions {
    pub keep_slices: bool,
    /// Relative guard band on the squared slice radius; `None` takes the body's tolerance.
    pub guard_band: Option<f64>,
}

/// Squared radius of slice `m3` of `sqrt(t) B`, negative when the slice is empty.
///
/// Exact integer arithmetic for the sphere; closed form for the spheroid;
/// bisection on the meridian for Fourier profiles.
fn scaled_slice_sq(g: &BodyGeometry, t: f64, m3: i64) -> f64 {
    let z = m3 as f64;
    match &g.profile {
        RevolutionProfile::Sphere => t - z * z,
        RevolutionProfile::Spheroid { a, b } => a * a * (t - z * z / (b * b)),
        p @ RevolutionProfile::FourierCosine { .. } => {
            if t == 0.0 {
                return if m3 == 0 { 0.0 } else { -1.0 };
            }
            let s = t.sqrt();
            let zu = z / s;
            let (lo, hi) = g.z_range;
            if zu > hi {
                -(zu - hi) * s
            } else if zu < lo {
                -(lo - zu) * s
            } else {
                let r = slice_radius(p, zu, g.tolerances.pole_eps).unwrap_or(0.0);
                t * r * r
            }
        }
    }
}

/// Largest `k >= -1` whose point (squared radius `r2_of(k)`) is inside, given
/// the approximate boundary value `v` and the monotone exact test `inside`.
fn last_inside(
    estimate: i64,
    r2_of: impl Fn(i64) -> f64,
    v: f64,
    band: f64,
    inside: &impl Fn(f64) -> bool,
    flags: &mut u64,
) -> i64 {
    let mut k = estimate.max(-1);
    while r2_of(k + 1) <= v {
        k += 1;
    }
    while k >= 0 && r2_of(k) > v {
        k -= 1;
    }
    let mut moved_up = false;
    while (r2_of(k + 1) - v).abs() <= band {
        *flags += 1;
        if inside(r2_of(k + 1)) {
            k += 1;
            moved_up = true;
        } else {
            break;
        }
    }
    if !moved_up {
        while k >= 0 && (v - r2_of(k)).abs() <= band {
            *flags += 1;
            if inside(r2_of(k)) {
                break;
            }
            k -= 1;
        }
    }
    k
}

fn floor_sqrt_estimate(v: f64) -> i64 {
    if v <= 0.0 {
        if v == 0.0 {
            0
        } else {
            -1
        }
    } else {
        v.sqrt().floor() as i64
    }
}

/// Integer points `(m1, m2)` of a disc using 8-fold symmetry:
/// `1 + 4 R + 4 (2 sum_{m=1}^{d} (h(m) - m) + d)` with `R` the last axis point,
/// `d` the last diagonal point and `h(m)` the height of row `m`.
fn disc_count(v: f64, band: f64, inside: &impl Fn(f64) -> bool, flags: &mut u64) -> u64 {
    let axis = last_inside(floor_sqrt_estimate(v), |k| (k * k) as f64, v, band, inside, flags);
    if axis < 0 {
        return 0;
    }
    let d = last_inside(floor_sqrt_estimate(v / 2.0), |k| (2 * k * k) as f64, v, band, inside, flags);
    let mut quadrant: u64 = d as u64;
    for m in 1..=d {
        let base = m * m;
        let h = last_inside(
            floor_sqrt_estimate(v - base as f64),
            |s| (base + s * s) as f64,
            v,
            band,
            inside,
            flags,
        );
        debug_assert!(h >= m);
        quadrant += 2 * (h - m) as u64;
    }
    1 + 4 * axis as u64 + 4 * quadrant
}

/// Plain row-sum disc count; reference for the symmetric version.
fn disc_count_rows(v: f64, band: f64, inside: &impl Fn(f64) -> bool, flags: &mut u64) -> u64 {
    let axis = last_inside(floor_sqrt_estimate(v), |k| (k * k) as f64, v, band, inside, flags);
    if axis < 0 {
        return 0;
    }
    let mut total = 1 + 4 * axis as u64;
    for m in 1..=axis {
        let base = m * m;
        let h = last_inside(floor_sqrt_estimate(v - base as f64), |s| (base + s * s) as f64, v, band, inside, flags);
        total += 4 * (h.max(0) as u64);
    }
    total
}

fn slice_range(g: &BodyGeometry, t: f64) -> (i64, i64) {
    let s = t.sqrt();
    let lo = (s * g.z_range.0).floor() as i64 - 1;
    let hi = (s * g.z_range.1).ceil() as i64 + 1;
    (lo, hi)
}

fn count_slice(g: &BodyGeometry, t: f64, m3: i64, guard: f64, symmetric: bool) -> (u64, u64) {
    let v = scaled_slice_sq(g, t, m3);
    let band = guard * v.abs().max(1.0);
    let z = m3 as f64;
    let inside = |r2: f64| g.profile.gauge_sq(r2, z) <= t;
    let mut flags = 0;
    let n = if symmetric {
        disc_count(v, band, &inside, &mut flags)
    } else {
        disc_count_rows(v, band, &inside, &mut flags)
    };
    (n, flags)
}

/// `#(sqrt(t) B ∩ Z^3)`.
pub fn count_points(g: &BodyGeometry, t: f64) -> CountResult {
    count_points_with(g, t, CountOptions::default())
}

pub fn count_points_with(g: &BodyGeometry, t: f64, opts: CountOptions) -> CountResult {
    assert!(t >= 0.0 && t.is_finite(), "dilation parameter must be a finite non-negative number");
    let guard = opts.guard_band.unwrap_or(g.tolerances.guard_band);
    let (lo, hi) = slice_range(g, t);
    let slices: Vec<(i64, u64, u64)> = (lo..=hi)
        .into_par_iter()
        .map(|m3| {
            let (n, f) = count_slice(g, t, m3, guard, true);
            (m3, n, f)
        })
        .collect();
    let count = slices.iter().map(|s| s.1).sum();
    let boundary_flags = slices.iter().map(|s| s.2).sum();
    let per_slice = opts
        .keep_slices
        .then(|| slices.iter().filter(|s| s.1 > 0).map(|s| (s.0, s.1)).collect());
    CountResult { t, count, per_slice, boundary_flags }
}

/// Slice counts through the unsymmetrized row sum, for cross-checking.
pub fn count_points_rowsum(g: &BodyGeometry, t: f64) -> u64 {
    let (lo, hi) = slice_range(g, t);
    (lo..=hi).map(|m3| count_slice(g, t, m3, g.tolerances.guard_band, false).0).sum()
}

/// Triple loop over the bounding box with the radial membership test.
pub fn brute_count(g: &BodyGeometry, t: f64) -> Result<u64> {
    assert!(t >= 0.0 && t.is_finite(), "dilation parameter must be a finite non-negative number");
    let half = (t.sqrt() * g.c2).ceil() as i64;
    let side = (2 * half + 1) as u128;
    let points = side * side * side;
    if points > BRUTE_BOX_LIMIT {
        return Err(Error::BoxTooLarge { points, limit: BRUTE_BOX_LIMIT });
    }
    let guard = g.tolerances.guard_band;
    let p = &g.profile;
    let total = (-half..=half)
        .into_par_iter()
        .map(|m3| {
            let z = m3 as f64;
            let mut n = 0u64;
            for m1 in -half..=half {
                for m2 in -half..=half {
                    let r2 = (m1 * m1 + m2 * m2) as f64;
                    let n2 = r2 + z * z;
                    if n2 == 0.0 {
                        n += 1;
                        continue;
                    }
                    let rho = p.rho(r2.sqrt().atan2(z.abs()));
                    let reach = t * rho * rho;
                    let margin = reach - n2;
                    let inside = if margin.abs() <= guard * reach.max(1.0) {
                        p.gauge_sq(r2, z) <= t
                    } else {
                        margin >= 0.0
                    };
                    n += inside as u64;
                }
            }
            n
        })
        .collect::<Vec<u64>>();
    Ok(total.iter().sum())
}

/// `t^{1/2} (log t)^{1/3} (log_2 t)^{2(sqrt 2 - 1)/3} (log_3 t)^{-2/3}`, defined for `t >= 20`.
pub fn growth_shape(t: f64) -> Option<f64> {
    if t < 20.0 {
        return None;
    }
    let l1 = iterated_log(t, 1)?;
    let l2 = iterated_log(t, 2)?;
    let l3 = iterated_log(t, 3)?;
    let e = 2.0 * (std::f64::consts::SQRT_2 - 1.0) / 3.0;
    Some(t.sqrt() * l1.cbrt() * l2.powf(e) * l3.powf(-2.0 / 3.0))
}

/// One evaluated point of a discrepancy scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub t: f64,
    pub count: u64,
    pub volume_term: f64,
    pub discrepancy: f64,
    pub normalized: Option<f64>,
}

impl ScanRecord {
    pub const COLUMNS: [&'static str; 5] = ["t", "count", "volume_term", "discrepancy", "normalized"];

    pub fn csv_row(&self) -> String {
        let norm = self.normalized.map(|v| v.to_string()).unwrap_or_default();
        format!("{},{},{},{},{}", self.t, self.count, self.volume_term, self.discrepancy, norm)
    }
}

fn record_from_count(g: &BodyGeometry, t: f64, count: u64) -> ScanRecord {
    let volume_term = g.volume * t.powf(1.5);
    let discrepancy = count as f64 - volume_term;
    ScanRecord { t, count, volume_term, discrepancy, normalized: growth_shape(t).map(|s| discrepancy / s) }
}

/// `P(t)` with its normalization by the growth shape.
pub fn discrepancy(g: &BodyGeometry, t: f64) -> ScanRecord {
    record_from_count(g, t, count_points(g, t).count)
}

/// Discrepancy records over an ascending grid.
pub fn discrepancy_scan(g: &BodyGeometry, t_grid: &[f64]) -> Result<Vec<ScanRecord>> {
    if t_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("t grid must be sorted ascending".into()));
    }
    if let Some(bad) = t_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidArgument(format!("t={bad} is not a valid dilation")));
    }
    Ok(t_grid.par_iter().map(|&t| discrepancy(g, t)).collect())
}

/// Running minimum of `P` along a scan, for tracking large negative excursions.
pub fn running_minimum(records: &[ScanRecord]) -> Vec<(f64, f64)> {
    let mut best = f64::INFINITY;
    records
        .iter()
        .map(|r| {
            best = best.min(r.discrepancy);
            (r.t, best)
        })
        .collect()
}

/// Sorted distinct dilations `x` in `(x_lo, x_hi]` at which `#(sqrt(x) B ∩ Z^3)` jumps.
pub fn jump_points(g: &BodyGeometry, x_lo: f64, x_hi: f64) -> Vec<f64> {
    assert!(0.0 <= x_lo && x_lo <= x_hi);
    let (lo, hi) = slice_range(g, x_hi);
    let p = &g.profile;
    let mut out: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .flat_map_iter(|m3| {
            let z = m3 as f64;
            let v_hi = scaled_slice_sq(g, x_hi, m3);
            let v_lo = scaled_slice_sq(g, x_lo, m3);
            let mut found = Vec::new();
            let r_hi = floor_sqrt_estimate(v_hi.max(0.0)) + 1;
            for m1 in 0..=r_hi {
                let start = (floor_sqrt_estimate(v_lo - (m1 * m1) as f64) - 1).max(m1);
                let mut m2 = start;
                loop {
                    let r2 = (m1 * m1 + m2 * m2) as f64;
                    let tau = p.gauge_sq(r2, z);
                    if tau > x_hi {
                        break;
                    }
                    if tau > x_lo {
                        found.push(tau);
                    }
                    m2 += 1;
                }
            }
            found
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> BodyGeometry {
        BodyGeometry::new(RevolutionProfile::Sphere).unwrap()
    }

    /// Independent triple loop with the implicit equation of the unit ball.
    fn ball_oracle(t: i64) -> u64 {
        let r = (t as f64).sqrt().ceil() as i64;
        let mut n = 0;
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    if a * a + b * b + c * c <= t {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn sphere_small_counts() {
        let g = sphere();
        assert_eq!(count_points(&g, 1.0).count, 7);
        assert_eq!(ball_oracle(4), 33);
        assert_eq!(count_points(&g, 4.0).count, 33);
        assert_eq!(count_points(&g, 0.0).count, 1);
        assert_eq!(brute_count(&g, 1.0).unwrap(), 7);
        for t in 0..60 {
            assert_eq!(count_points(&g, t as f64).count, ball_oracle(t), "t={t}");
        }
    }

    #[test]
    fn spheroid_unit_dilation_matches_implicit_loop() {
        let g = BodyGeometry::new(RevolutionProfile::spheroid(2.0, 1.0)).unwrap();
        let mut n = 0;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -1i64..=1 {
                    if ((a * a + b * b) as f64) / 4.0 + (c * c) as f64 <= 1.0 {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(count_points(&g, 1.0).count, n);
        assert_eq!(brute_count(&g, 1.0).unwrap(), n);
    }

    #[test]
    fn origin_only_at_zero() {
        for p in [RevolutionProfile::spheroid(2.0, 1.0), RevolutionProfile::fourier([1.0, 0.05])] {
            let g = BodyGeometry::new(p).unwrap();
            assert_eq!(count_points(&g, 0.0).count, 1);
            assert_eq!(brute_count(&g, 0.0).unwrap(), 1);
        }
    }

    #[test]
    fn symmetric_and_row_sums_agree() {
        for p in [RevolutionProfile::Sphere, RevolutionProfile::spheroid(2.0, 1.0), RevolutionProfile::fourier([1.0, 0.05, 0.01])] {
            let g = BodyGeometry::new(p).unwrap();
            for t in [0.5, 3.0, 17.0, 50.25, 333.0] {
                assert_eq!(count_points(&g, t).count, count_points_rowsum(&g, t));
            }
        }
    }

    #[test]
    fn per_slice_sums_and_reflect() {
        let g = BodyGeometry::new(RevolutionProfile::fourier([1.0, 0.05])).unwrap();
        let r = count_points_with(&g, 123.0, CountOptions { keep_slices: true, guard_band: None });
        let slices = r.per_slice.unwrap();
        assert_eq!(slices.iter().map(|s| s.1).sum::<u64>(), r.count);
        for &(m3, n) in &slices {
            let mirror = slices.iter().find(|s| s.0 == -m3).unwrap();
            assert_eq!(mirror.1, n);
        }
    }

    #[test]
    fn brute_box_guard() {
        let g = sphere();
        assert!(matches!(brute_count(&g, 1e6), Err(Error::BoxTooLarge { .. })));
    }

    #[test]
    fn discrepancy_examples() {
        let g = sphere();
        let r = discrepancy(&g, 1.0);
        assert!((r.discrepancy - (7.0 - 4.0 * std::f64::consts::PI / 3.0)).abs() < 1e-12);
        assert!(r.normalized.is_none());
        let r = discrepancy(&g, 4.0);
        assert!((r.discrepancy - (33.0 - 32.0 * std::f64::consts::PI / 3.0)).abs() < 1e-12);
        assert!((r.discrepancy + 0.5103).abs() < 1e-4);
        assert_eq!(discrepancy(&g, 0.0).discrepancy, 1.0);
        assert!(discrepancy(&g, 25.0).normalized.is_some());
    }

    #[test]
    fn scan_is_monotone_and_rejects_unsorted() {
        let g = sphere();
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 2.5).collect();
        let recs = discrepancy_scan(&g, &grid).unwrap();
        assert!(recs.windows(2).all(|w| w[0].count <= w[1].count));
        assert!(discrepancy_scan(&g, &[]).unwrap().is_empty());
        assert!(discrepancy_scan(&g, &[2.0, 1.0]).is_err());
        let mins = running_minimum(&recs);
        assert!(mins.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn jumps_account_for_count_increments() {
        for p in [RevolutionProfile::Sphere, RevolutionProfile::fourier([1.0, 0.05])] {
            let g = BodyGeometry::new(p).unwrap();
            let jumps = jump_points(&g, 40.0, 60.0);
            assert!(jumps.windows(2).all(|w| w[0] < w[1]));
            // between consecutive jumps the count is constant
            for w in jumps.windows(2) {
                let a = count_points(&g, w[0] + 0.25 * (w[1] - w[0])).count;
                let b = count_points(&g, w[0] + 0.75 * (w[1] - w[0])).count;
                assert_eq!(a, b);
            }
            // and it changes at every jump
            for w in jumps.windows(2) {
                let before = count_points(&g, 0.5 * (w[0] + w[1])).count;
                let at = count_points(&g, w[1]).count;
                assert!(at > before);
            }
        }
    }
}
