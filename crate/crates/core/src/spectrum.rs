//! Frequency classes `(ℓ, m3)`, the damped exponential sum `S(t)`, the
//! Gamma-weighted (Borel) mean `B(t)` of the lattice rest, and the comparison
//! of `B(t)` with `-t S(t) / 2π`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ArithTables;
use crate::body::{gaussian_curvature, support_point, BodyGeometry};
use crate::error::{Error, Result};
use crate::lattice::{count_points, jump_points};
use crate::numeric::{par_compensated_sum, pearson, stirling_tail, CompensatedSum, GL5_NODES, GL5_WEIGHTS};

/// Default exponent in the cutoff `t^{2 eps0} log t`.
pub const DEFAULT_EPS0: f64 = 0.3;

/// Half-width of the Borel window in standard deviations of the Gamma weight.
pub const BOREL_WINDOW: f64 = 8.0;

/// Log density below which the upper window edge may stop.
const BOREL_EDGE_LOG_DENSITY: f64 = -40.0;

/// Uniform panels laid over the Borel window before splitting at jumps.
pub const BOREL_BASE_PANELS: usize = 64;

/// Weight mass the quadrature must capture on the window.
pub const BOREL_MASS_TOL: f64 = 1e-6;

/// Coefficient model for the class weights `g(ℓ, m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffModel {
    /// Every lattice vector carries weight 1, so `g = r(ℓ)`.
    #[default]
    Unit,
    /// Weight `κ3^{-1/2}` at the boundary point with the class's outward normal.
    Curvature,
}

impl fmt::Display for CoeffModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoeffModel::Unit => "unit",
            CoeffModel::Curvature => "curvature",
        })
    }
}

impl FromStr for CoeffModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(CoeffModel::Unit),
            "curvature" => Ok(CoeffModel::Curvature),
            other => Err(Error::InvalidArgument(format!("unknown coefficient model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreqClass {
    pub ell: u64,
    pub m3: i64,
    /// `H(sqrt(ℓ), 0, m3)`.
    pub lambda: f64,
    pub g: f64,
    pub norm2: u64,
}

/// Classes sorted by `λ`, ties by `(norm2, m3, ℓ)`, with their weights `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSeries {
    pub t: f64,
    /// Damping scale `1 / log t`.
    pub x: f64,
    pub cutoff: f64,
    pub classes: Vec<FreqClass>,
    pub f: Vec<f64>,
}

impl SpectralSeries {
    pub const COLUMNS: [&'static str; 5] = ["ell", "m3", "lambda", "g", "f"];

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.classes.iter().map(|c| c.lambda).collect()
    }

    pub fn total_weight(&self) -> f64 {
        par_compensated_sum(self.f.len(), |i| self.f[i])
    }

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.classes
            .iter()
            .zip(&self.f)
            .map(|(c, f)| format!("{},{},{},{},{}", c.ell, c.m3, c.lambda, c.g, f))
    }

    /// A series with every weight set to zero.
    pub fn zeroed(&self) -> SpectralSeries {
        SpectralSeries { f: vec![0.0; self.f.len()], ..self.clone() }
    }
}

/// `t^{2 eps0} log t`.
pub fn series_cutoff(t: f64, eps0: f64) -> f64 {
    t.powf(2.0 * eps0) * t.ln()
}

/// `exp(-π² X λ² / 2)`.
pub fn damping(x: f64, lambda: f64) -> f64 {
    (-0.5 * PI * PI * x * lambda * lambda).exp()
}

fn class_order(a: &FreqClass, b: &FreqClass) -> std::cmp::Ordering {
    a.lambda
        .total_cmp(&b.lambda)
        .then(a.norm2.cmp(&b.norm2))
        .then(a.m3.cmp(&b.m3))
        .then(a.ell.cmp(&b.ell))
}

/// Enumerate all classes with `0 < ℓ + m3^2 <= t^{2 eps0} log t` and `r(ℓ) > 0`.
pub fn build_series(g: &BodyGeometry, tables: &ArithTables, t: f64, model: CoeffModel, eps0: f64) -> Result<SpectralSeries> {
    if !(t >= 3.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("spectral series needs t >= 3, got {t}")));
    }
    if !(eps0 > 0.0) {
        return Err(Error::InvalidArgument(format!("eps0 must be positive, got {eps0}")));
    }
    build_series_with_cutoff(g, tables, t, model, series_cutoff(t, eps0))
}

/// [`build_series`] with an explicit bound on `ℓ + m3^2`.
pub fn build_series_with_cutoff(g: &BodyGeometry, tables: &ArithTables, t: f64, model: CoeffModel, cutoff: f64) -> Result<SpectralSeries> {
    if !(t >= 3.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("spectral series needs t >= 3, got {t}")));
    }
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidArgument(format!("cutoff must be finite and non-negative, got {cutoff}")));
    }
    let n_max = cutoff.floor() as u64;
    if !tables.covers(0, n_max) {
        return Err(Error::CutoffExceedsTable { cutoff, limit: tables.limit() });
    }
    let x = 1.0 / t.ln();
    let m3_max = (n_max as f64).sqrt() as i64 + 1;
    let p = &g.profile;
    let mut classes: Vec<FreqClass> = (-m3_max..=m3_max)
        .into_par_iter()
        .flat_map_iter(|m3| {
            let sq = m3.unsigned_abs() * m3.unsigned_abs();
            let ell_max = n_max.checked_sub(sq);
            ell_max
                .into_iter()
                .flat_map(move |hi| 0..=hi)
                .filter(move |&ell| ell > 0 || m3 != 0)
                .filter_map(move |ell| {
                    let r = tables.r2(ell).ok()?;
                    if r == 0 {
                        return None;
                    }
                    let (lambda, theta) = support_point(p, (ell as f64).sqrt(), m3 as f64);
                    let alpha = match model {
                        CoeffModel::Unit => 1.0,
                        CoeffModel::Curvature => gaussian_curvature(p, theta).abs().powf(-0.5),
                    };
                    Some(FreqClass { ell, m3, lambda, g: r as f64 * alpha, norm2: ell + sq })
                })
        })
        .collect();
    classes.par_sort_by(class_order);
    let f = classes.iter().map(|c| c.g / c.norm2 as f64 * damping(x, c.lambda)).collect();
    Ok(SpectralSeries { t, x, cutoff, classes, f })
}

/// `S(t) = Σ f(n) cos(2π λ_n t)` in class order.
pub fn eval_s(series: &SpectralSeries, t: f64) -> f64 {
    let (f, c) = (&series.f, &series.classes);
    par_compensated_sum(f.len(), |i| f[i] * (2.0 * PI * c[i].lambda * t).cos())
}

/// Log of the Gamma(k+1) density in the standardized variable
/// `s = (u - k) / sqrt(k)`, including the Jacobian `sqrt(k)`.
pub fn borel_log_density(k: f64, s: f64) -> f64 {
    let rk = k.sqrt();
    k * (s / rk).ln_1p() - s * rk - 0.5 * (2.0 * PI).ln() - stirling_tail(k)
}

/// Quadrature layout for one Borel mean.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelPlan {
    pub t: f64,
    pub k: f64,
    pub x: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    /// Panel boundaries in `s`, ascending.
    pub breaks: Vec<f64>,
}

impl BorelPlan {
    /// Uniform panels over the window, plus the extra breakpoints `x_breaks`
    /// given on the argument scale `X u`.
    pub fn new(t: f64, x_breaks: &[f64]) -> Result<Self> {
        if !(t >= 3.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("Borel mean needs t >= 3, got {t}")));
        }
        let lt = t.ln();
        let (k, x) = (t * t * lt, 1.0 / lt);
        let rk = k.sqrt();
        let s_lo = (-BOREL_WINDOW).max(-rk);
        // the weight is right-skewed for small k; widen the upper edge until the density is negligible
        let mut s_hi = BOREL_WINDOW;
        while borel_log_density(k, s_hi) > BOREL_EDGE_LOG_DENSITY && s_hi < 8.0 * BOREL_WINDOW {
            s_hi += 0.5;
        }
        let h = (s_hi - s_lo) / BOREL_BASE_PANELS as f64;
        let mut breaks: Vec<f64> = (0..=BOREL_BASE_PANELS).map(|i| s_lo + h * i as f64).collect();
        breaks.extend(
            x_breaks
                .iter()
                .map(|&xb| (xb / x - k) / rk)
                .filter(|s| *s > s_lo && *s < s_hi),
        );
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Ok(BorelPlan { t, k, x, s_lo, s_hi, breaks })
    }

    /// Window `[X u_lo, X u_hi]` on the argument scale.
    pub fn x_window(&self) -> (f64, f64) {
        let rk = self.k.sqrt();
        (self.x * (self.k + self.s_lo * rk), self.x * (self.k + self.s_hi * rk))
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn node_count(&self) -> usize {
        5 * self.panels()
    }

    fn x_at(&self, s: f64) -> f64 {
        self.x * (self.k + s * self.k.sqrt())
    }

    /// Weighted sum `Σ w_i h(panel, X u_i)` over all nodes, with the mass `Σ w_i`.
    ///
    /// `h` receives the panel index so piecewise-constant parts can be
    /// evaluated once per panel.
    pub fn integrate<F>(&self, h: F) -> (f64, f64)
    where
        F: Fn(usize, f64) -> f64 + Sync,
    {
        let parts: Vec<(CompensatedSum, CompensatedSum)> = (0..self.panels())
            .into_par_iter()
            .map(|j| {
                let (a, b) = (self.breaks[j], self.breaks[j + 1]);
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                let mut val = CompensatedSum::new();
                let mut mass = CompensatedSum::new();
                for (node, wt) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
                    let s = mid + half * node;
                    let w = wt * half * borel_log_density(self.k, s).exp();
                    mass.add(w);
                    val.add(w * h(j, self.x_at(s)));
                }
                (val, mass)
            })
            .collect();
        let mut val = CompensatedSum::new();
        let mut mass = CompensatedSum::new();
        for (v, m) in &parts {
            val.merge(v);
            mass.merge(m);
        }
        (val.value(), mass.value())
    }

    /// Mean of a smooth function of `X u` under the window weights.
    pub fn mean_of(&self, h: impl Fn(f64) -> f64 + Sync) -> f64 {
        self.integrate(|_, xu| h(xu)).0
    }

    /// Argument value at the midpoint of panel `j`.
    pub fn panel_mid_x(&self, j: usize) -> f64 {
        self.x_at(0.5 * (self.breaks[j] + self.breaks[j + 1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorelResult {
    pub t: f64,
    pub k: f64,
    pub x: f64,
    pub value: f64,
    pub mass: f64,
    pub nodes: usize,
    pub jumps: usize,
}

impl BorelResult {
    pub const COLUMNS: [&'static str; 7] = ["t", "k", "X", "borel", "mass", "nodes", "jumps"];

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{},{}", self.t, self.k, self.x, self.value, self.mass, self.nodes, self.jumps)
    }
}

/// `B(t)`: the Gamma(k+1)-weighted mean of `P(X u)`.
///
/// The lattice count is a step function of its argument, so panels are split
/// at every jump inside the window and the count is taken once per panel.
pub fn borel_mean(g: &BodyGeometry, t: f64) -> Result<BorelResult> {
    let probe = BorelPlan::new(t, &[])?;
    let (x_lo, x_hi) = probe.x_window();
    let jumps = jump_points(g, x_lo.max(0.0), x_hi);
    let plan = BorelPlan::new(t, &jumps)?;
    let counts: Vec<f64> = (0..plan.panels())
        .into_par_iter()
        .map(|j| count_points(g, plan.panel_mid_x(j)).count as f64)
        .collect();
    let vol = g.volume;
    let (value, mass) = plan.integrate(|j, xu| counts[j] - vol * xu.powf(1.5));
    if !(mass >= 1.0 - BOREL_MASS_TOL) {
        return Err(Error::Normalization { mass, tolerance: BOREL_MASS_TOL });
    }
    Ok(BorelResult { t, k: plan.k, x: plan.x, value, mass, nodes: plan.node_count(), jumps: jumps.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkRow {
    pub t: f64,
    pub borel: f64,
    /// `-t S(t) / 2π` before scaling.
    pub raw: f64,
    /// `scale * raw`.
    pub predicted: f64,
    pub residual: f64,
}

impl LinkRow {
    pub const COLUMNS: [&'static str; 5] = ["t", "borel", "raw_predicted", "predicted", "residual"];

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.t, self.borel, self.raw, self.predicted, self.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkReport {
    pub scale: f64,
    /// Correlation of `B` with the unscaled prediction; unchanged by any positive scale.
    pub pearson: Option<f64>,
    pub rows: Vec<LinkRow>,
}

/// `-t S(t) / 2π`.
pub fn link_prediction(series: &SpectralSeries, t: f64) -> f64 {
    -t * eval_s(series, t) / (2.0 * PI)
}

/// Least-squares scale `c >= 0` minimizing `Σ (B - c p)^2`; 0 when `p` vanishes.
pub fn fit_scale(borel: &[f64], raw: &[f64]) -> f64 {
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (b, p) in borel.iter().zip(raw) {
        num.add(b * p);
        den.add(p * p);
    }
    if den.value() > 0.0 {
        (num.value() / den.value()).max(0.0)
    } else {
        0.0
    }
}

pub fn link_rows(ts: &[f64], borel: &[f64], raw: &[f64], scale: f64) -> Vec<LinkRow> {
    ts.iter()
        .zip(borel)
        .zip(raw)
        .map(|((&t, &b), &p)| {
            let predicted = scale * p;
            LinkRow { t, borel: b, raw: p, predicted, residual: b - predicted }
        })
        .collect()
}

/// Both sides of the link on a grid of `t`, with one fitted positive scale.
pub fn spectral_link_report(
    g: &BodyGeometry,
    tables: &ArithTables,
    t_grid: &[f64],
    model: CoeffModel,
    eps0: f64,
) -> Result<LinkReport> {
    let sides: Vec<(f64, f64)> = t_grid
        .iter()
        .map(|&t| {
            let b = borel_mean(g, t)?.value;
            let series = build_series(g, tables, t, model, eps0)?;
            Ok((b, link_prediction(&series, t)))
        })
        .collect::<Result<_>>()?;
    let (borel, raw): (Vec<f64>, Vec<f64>) = sides.into_iter().unzip();
    let scale = fit_scale(&borel, &raw);
    Ok(LinkReport { scale, pearson: pearson(&borel, &raw), rows: link_rows(t_grid, &borel, &raw, scale) })
}

/// Tables large enough for every series on the grid.
pub fn tables_for_grid(t_grid: &[f64], eps0: f64) -> Result<ArithTables> {
    let top = t_grid.iter().map(|&t| series_cutoff(t, eps0)).fold(1.0, f64::max);
    ArithTables::build(top.floor() as u64)
}
