//! The resonance lemma as a search procedure, and the assembly of the
//! resonating set `M̂`, the choice of `Λ`, and the exponent optimization.
//!
//! Given weights `f(n) >= 0` and non-decreasing frequencies `λ_n`, the lemma
//! guarantees some `t` in `[T/2, (6L)^{|M|+1} T]` with
//! `Σ f(n) cos(2π λ_n t) >= Σ_M f / 8 - Σ_{λ_n <= 2Λ} f / (L-1) - 2 Σ f / (π² T Λ)`.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, SQRT_2};

use log::warn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{enumerate_s, omega_target, ArithTables};
use crate::body::BodyGeometry;
use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_section_max, iterated_log, CompensatedSum};
use crate::spectrum::{build_series, series_cutoff, CoeffModel, SpectralSeries};

/// Width to which the best grid point is refined.
pub const REFINE_WIDTH: f64 = 1e-10;

/// Default bound on `X λ²` for the damping check.
pub const DEFAULT_XH_BOUND: f64 = 10.0;

/// Grid points in the first scan block; later blocks double up to [`MAX_BLOCK`].
const FIRST_BLOCK: u64 = 256;
const MAX_BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaInstance {
    pub f: Vec<f64>,
    pub lambda: Vec<f64>,
    pub big_lambda: f64,
    pub l: u64,
    /// Zero-based indices into `f` / `lambda`, ascending.
    pub m: Vec<usize>,
    pub t: f64,
}

impl LemmaInstance {
    pub fn new(f: Vec<f64>, lambda: Vec<f64>, big_lambda: f64, l: u64, mut m: Vec<usize>, t: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if f.len() != lambda.len() {
            return bad(format!("{} weights but {} frequencies", f.len(), lambda.len()));
        }
        if let Some(i) = f.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad(format!("f[{i}] = {} is not a finite non-negative number", f[i]));
        }
        if let Some(i) = lambda.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return bad(format!("lambda[{i}] = {} is not a finite positive number", lambda[i]));
        }
        if let Some(i) = lambda.windows(2).position(|w| w[0] > w[1]) {
            return bad(format!("lambda decreases at index {}", i + 1));
        }
        if !(big_lambda.is_finite() && big_lambda > 0.0) {
            return bad(format!("Lambda = {big_lambda} must be positive"));
        }
        if l < 2 {
            return bad(format!("L = {l} must be at least 2"));
        }
        if !(t.is_finite() && t >= 2.0) {
            return bad(format!("T = {t} must be at least 2"));
        }
        m.sort_unstable();
        m.dedup();
        for &i in &m {
            let Some(&lam) = lambda.get(i) else {
                return bad(format!("index {i} in M is out of range"));
            };
            if !(0.5 * big_lambda..=1.5 * big_lambda).contains(&lam) {
                return bad(format!("lambda[{i}] = {lam} lies outside [Lambda/2, 3 Lambda/2]"));
            }
        }
        Ok(LemmaInstance { f, lambda, big_lambda, l, m, t })
    }

    /// Upper end `(6L)^{|M|+1} T` of the guaranteed interval.
    pub fn interval_end(&self) -> f64 {
        (6.0 * self.l as f64).powi(self.m.len() as i32 + 1) * self.t
    }

    /// `(6L)^{|M|+1} <= T`.
    pub fn conforming(&self) -> bool {
        (6.0 * self.l as f64).powi(self.m.len() as i32 + 1) <= self.t
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.last().copied().unwrap_or(0.0)
    }

    /// `Σ f(n) cos(2π λ_n t)` in index order, skipping zero weights.
    pub fn sum_at(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (f, l) in self.f.iter().zip(&self.lambda) {
            if *f != 0.0 {
                acc.add(f * (2.0 * PI * l * t).cos());
            }
        }
        acc.value()
    }
}

/// The three terms of the lower bound and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhsTerms {
    pub resonance: f64,
    pub low_frequency: f64,
    pub total_mass: f64,
    pub bound: f64,
}

pub fn rhs_terms(inst: &LemmaInstance) -> RhsTerms {
    let resonance: f64 = inst.m.iter().map(|&i| inst.f[i]).collect::<CompensatedSum>().value();
    let low_frequency: f64 = inst
        .f
        .iter()
        .zip(&inst.lambda)
        .filter(|(_, l)| **l <= 2.0 * inst.big_lambda)
        .map(|(f, _)| *f)
        .collect::<CompensatedSum>()
        .value();
    let total_mass = inst.f.iter().copied().collect::<CompensatedSum>().value();
    let bound = resonance / 8.0
        - low_frequency / (inst.l - 1) as f64
        - 2.0 * total_mass / (PI * PI * inst.t * inst.big_lambda);
    RhsTerms { resonance, low_frequency, total_mass, bound }
}

pub fn rhs_bound(inst: &LemmaInstance) -> f64 {
    rhs_terms(inst).bound
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaWitness {
    pub t: f64,
    pub sum_value: f64,
    pub rhs_bound: f64,
    pub met: bool,
    /// Part of the interval actually scanned.
    pub interval: (f64, f64),
    /// The budget cut the scan short of the lemma's full interval.
    pub capped: bool,
    /// The scan ended early because a grid point already met the bound.
    pub stopped_early: bool,
    pub grid_points: u64,
    /// Scanned `(t, sum)` pairs, when requested.
    pub samples: Option<Vec<(f64, f64)>>,
}

impl LemmaWitness {
    pub fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("witness_t".into(), self.t.to_string()),
            ("sum_value".into(), self.sum_value.to_string()),
            ("rhs_bound".into(), self.rhs_bound.to_string()),
            ("met".into(), self.met.to_string()),
            ("interval_lo".into(), self.interval.0.to_string()),
            ("interval_hi".into(), self.interval.1.to_string()),
            ("capped".into(), self.capped.to_string()),
            ("stopped_early".into(), self.stopped_early.to_string()),
            ("grid_points".into(), self.grid_points.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Grid spacing; `None` takes `1 / (8 λ_max)`.
    pub step: Option<f64>,
    /// Maximum number of grid points.
    pub budget: u64,
    /// Keep scanning after the bound is met.
    pub exhaustive: bool,
    pub keep_samples: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { step: None, budget: 1 << 24, exhaustive: false, keep_samples: false }
    }
}

/// Default grid spacing `1 / (8 λ_max)`.
pub fn default_step(inst: &LemmaInstance) -> f64 {
    1.0 / (8.0 * inst.lambda_max())
}

fn better(a: (u64, f64), b: (u64, f64)) -> (u64, f64) {
    // larger value wins, ties go to the smaller index
    match a.1.total_cmp(&b.1) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    }
}

/// Scan the lemma interval on a uniform grid, then refine the best point.
///
/// The grid is processed in blocks of fixed, worker-independent sizes; unless
/// `exhaustive` is set the scan ends after the first block in which the bound
/// is met.
pub fn search_witness(inst: &LemmaInstance, grid_step: f64, budget: u64) -> Result<LemmaWitness> {
    search_witness_with(inst, SearchOptions { step: Some(grid_step), budget, ..SearchOptions::default() })
}

pub fn search_witness_with(inst: &LemmaInstance, opts: SearchOptions) -> Result<LemmaWitness> {
    let rhs = rhs_bound(inst);
    let lmax = inst.lambda_max();
    let bound = if lmax > 0.0 { 1.0 / (4.0 * lmax) } else { f64::INFINITY };
    let step = opts.step.unwrap_or_else(|| default_step(inst));
    if !(step > 0.0 && step <= bound) {
        return Err(Error::Resolution { step, bound });
    }
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("search budget must be positive".into()));
    }
    let t_lo = 0.5 * inst.t;
    let full_hi = inst.interval_end();
    let full_points = ((full_hi - t_lo) / step).floor();
    let capped = full_points + 1.0 > opts.budget as f64;
    let n_points = if capped { opts.budget } else { full_points as u64 + 1 };
    let at = |i: u64| t_lo + i as f64 * step;

    let mut best: Option<(u64, f64)> = None;
    let mut samples = opts.keep_samples.then(Vec::new);
    let mut next = 0u64;
    let mut block = FIRST_BLOCK;
    let mut stopped_early = false;
    while next < n_points {
        let end = (next + block).min(n_points);
        let values: Vec<(u64, f64)> = (next..end).into_par_iter().map(|i| (i, inst.sum_at(at(i)))).collect();
        let block_best = values.iter().copied().reduce(better).expect("non-empty block");
        best = Some(best.map_or(block_best, |b| better(b, block_best)));
        if let Some(s) = samples.as_mut() {
            s.extend(values.iter().map(|&(i, v)| (at(i), v)));
        }
        next = end;
        block = (block * 2).min(MAX_BLOCK);
        if !opts.exhaustive && best.is_some_and(|b| b.1 >= rhs) && next < n_points {
            stopped_early = true;
            break;
        }
    }
    let (bi, bv) = best.expect("at least one grid point");
    let scanned_hi = at(next - 1);
    let (mut t_best, mut v_best) = (at(bi), bv);
    let (a, b) = ((t_best - step).max(t_lo), (t_best + step).min(scanned_hi));
    if b > a {
        let width = REFINE_WIDTH.max(4.0 * f64::EPSILON * b.abs());
        let (tr, vr) = golden_section_max(|t| inst.sum_at(t), a, b, width);
        if vr > v_best {
            t_best = tr;
            v_best = vr;
        }
    }
    Ok(LemmaWitness {
        t: t_best,
        sum_value: v_best,
        rhs_bound: rhs,
        met: v_best >= rhs,
        interval: (t_lo, scanned_hi),
        capped,
        stopped_early,
        grid_points: next,
        samples,
    })
}

/// The `Λ` exponent `(1 - β + β log(2β)) / 3` on `log_2 T`.
pub fn lambda_exponent(beta: f64) -> f64 {
    (1.0 - beta + beta * (2.0 * beta).ln()) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub warnings: Vec<String>,
}

/// `Λ = c0 (log T)^{1/3} (log_2 T)^{e(β)} (log_3 T)^{-1/6}`, natural iterated logs.
///
/// A factor whose iterated log is not positive is replaced by 1.
pub fn select_lambda(t: f64, beta: f64, c0: f64) -> LambdaChoice {
    let mut warnings = Vec::new();
    let mut factor = |j: u32, power: f64| match iterated_log(t, j) {
        Some(v) if v > 0.0 => v.powf(power),
        _ => {
            let msg = format!("log_{j} T is not positive at T={t}; its factor is clamped to 1");
            warn!("{msg}");
            warnings.push(msg);
            1.0
        }
    };
    let lambda = c0 * factor(1, 1.0 / 3.0) * factor(2, lambda_exponent(beta)) * factor(3, -1.0 / 6.0);
    LambdaChoice { lambda, warnings }
}

/// `E(β) = 2/3 (β - 1 - β log β) + 1/3 β log 2`.
pub fn exponent_e(beta: f64) -> f64 {
    assert!(beta > 0.0);
    2.0 / 3.0 * (beta - 1.0 - beta * beta.ln()) + beta * LN_2 / 3.0
}

/// `E'(β) = -2/3 log β + 1/3 log 2`.
pub fn exponent_e_prime(beta: f64) -> f64 {
    -2.0 / 3.0 * beta.ln() + LN_2 / 3.0
}

/// Argmax of `E` by bisection on `E'`.
pub fn maximize_e() -> f64 {
    bisect(exponent_e_prime, 1.0, 4.0)
}

/// Argmax of a smooth concave function on `[a, b]` by bisection on a
/// central-difference derivative.
pub fn argmax_by_derivative(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 1e-5 * (b - a);
    bisect(|x| f(x + h) - f(x - h), a, b)
}

/// The resonating set `M̂` inside a spectral series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSelection {
    pub big_lambda: f64,
    pub k: u32,
    /// Elements of `S_{Λ,K}`.
    pub s_set: Vec<u64>,
    /// Integers `m3` in `[a3 Λ, a4 Λ]`.
    pub m3_range: Option<(i64, i64)>,
    /// Series indices, ascending.
    pub indices: Vec<usize>,
    /// `(6L)^{|M|+1}`.
    pub star_value: f64,
}

impl MSelection {
    pub fn card(&self) -> usize {
        self.indices.len()
    }

    pub fn m3_count(&self) -> usize {
        self.m3_range.map_or(0, |(lo, hi)| (hi - lo + 1) as usize)
    }
}

/// Select the classes `(ℓ, m3)` with `ℓ ∈ S_{Λ,K}`, `K = [β log_2 Λ]`, and
/// `m3 ∈ [a3 Λ, a4 Λ]`, then check each `λ` against `[Λ/2, 3Λ/2]`.
pub fn build_m(g: &BodyGeometry, tables: &ArithTables, series: &SpectralSeries, big_lambda: f64, beta: f64, l: u64) -> Result<MSelection> {
    let r = g.rect;
    let k = omega_target(big_lambda, beta);
    let lo3 = ((r.a3 * big_lambda).ceil() as i64).max(1);
    let hi3 = (r.a4 * big_lambda).floor() as i64;
    let m3_range = (lo3 <= hi3).then_some((lo3, hi3));
    let s_set = if m3_range.is_some() { enumerate_s(tables, big_lambda, k, r.a1, r.a2)? } else { Vec::new() };
    let mut indices = Vec::new();
    if let (Some((lo3, hi3)), Some(&ell_max)) = (m3_range, s_set.last()) {
        let top = ell_max + (hi3 * hi3) as u64;
        if top as f64 > series.cutoff {
            return Err(Error::InvalidArgument(format!(
                "resonating window reaches norm {top}, beyond the series cutoff {}",
                series.cutoff
            )));
        }
        let position: HashMap<(u64, i64), usize> =
            series.classes.iter().enumerate().map(|(i, c)| ((c.ell, c.m3), i)).collect();
        for &ell in &s_set {
            for m3 in lo3..=hi3 {
                let &i = position.get(&(ell, m3)).ok_or_else(|| {
                    Error::InvalidArgument(format!("class ({ell}, {m3}) missing from the series"))
                })?;
                let lambda = series.classes[i].lambda;
                let (lo, hi) = (0.5 * big_lambda, 1.5 * big_lambda);
                if !(lo..=hi).contains(&lambda) {
                    return Err(Error::LambdaWindow { ell, m3, lambda, lo, hi });
                }
                indices.push(i);
            }
        }
    }
    indices.sort_unstable();
    let star_value = (6.0 * l as f64).powi(indices.len() as i32 + 1);
    Ok(MSelection { big_lambda, k, s_set, m3_range, indices, star_value })
}

/// `(log T)^{1/3} (log_2 T)^{2(√2-1)/3} (log_3 T)^{-2/3}`; `None` unless `log_3 T > 0`.
pub fn resonance_shape(t: f64) -> Option<f64> {
    let l1 = iterated_log(t, 1)?;
    let l2 = iterated_log(t, 2)?;
    let l3 = iterated_log(t, 3)?;
    if l3 <= 0.0 {
        return None;
    }
    Some(l1.cbrt() * l2.powf(2.0 * (SQRT_2 - 1.0) / 3.0) * l3.powf(-2.0 / 3.0))
}

/// `floor((log_2 T)^20)`; infinite when it overflows, `None` when `log_2 T <= 0`.
pub fn asymptotic_l(t: f64) -> Option<f64> {
    iterated_log(t, 2).filter(|v| *v > 0.0).map(|v| v.powi(20).floor())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub beta: f64,
    pub c0: f64,
    pub l: u64,
    pub eps0: f64,
    pub model: CoeffModel,
    pub xh_bound: f64,
    pub search: SearchOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            beta: SQRT_2,
            c0: 0.5,
            l: 3,
            eps0: crate::spectrum::DEFAULT_EPS0,
            model: CoeffModel::Unit,
            xh_bound: DEFAULT_XH_BOUND,
            search: SearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub t: f64,
    pub beta: f64,
    pub c0: f64,
    pub l: u64,
    pub l_asymptotic: Option<f64>,
    pub big_lambda: f64,
    pub classes: usize,
    pub cutoff: f64,
    pub selection: MSelection,
    pub star_ok: bool,
    /// `max X λ²` over `M`.
    pub xh_max: Option<f64>,
    pub xh_bound: f64,
    pub xh_ok: bool,
    pub terms: RhsTerms,
    pub shape: Option<f64>,
    pub witness: LemmaWitness,
    pub warnings: Vec<String>,
}

impl PipelineReport {
    pub fn key_values(&self) -> Vec<(String, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
        let sel = &self.selection;
        let mut kv: Vec<(String, String)> = vec![
            ("T".into(), self.t.to_string()),
            ("beta".into(), self.beta.to_string()),
            ("c0".into(), self.c0.to_string()),
            ("L".into(), self.l.to_string()),
            ("L_asymptotic".into(), opt(self.l_asymptotic)),
            ("Lambda".into(), self.big_lambda.to_string()),
            ("K".into(), sel.k.to_string()),
            ("series_classes".into(), self.classes.to_string()),
            ("series_cutoff".into(), self.cutoff.to_string()),
            ("S_card".into(), sel.s_set.len().to_string()),
            ("m3_count".into(), sel.m3_count().to_string()),
            ("M_card".into(), sel.card().to_string()),
            ("star_value".into(), sel.star_value.to_string()),
            ("star_ok".into(), self.star_ok.to_string()),
            ("xh_max".into(), opt(self.xh_max)),
            ("xh_bound".into(), self.xh_bound.to_string()),
            ("xh_ok".into(), self.xh_ok.to_string()),
            ("resonance_mass".into(), self.terms.resonance.to_string()),
            ("low_frequency_mass".into(), self.terms.low_frequency.to_string()),
            ("total_mass".into(), self.terms.total_mass.to_string()),
            ("resonance_shape".into(), opt(self.shape)),
            ("resonance_ratio".into(), opt(self.shape.map(|s| self.terms.resonance / s))),
        ];
        kv.extend(self.witness.key_values());
        for (i, w) in self.warnings.iter().enumerate() {
            kv.push((format!("warning_{i}"), w.clone()));
        }
        kv
    }
}

/// Tables large enough for [`run_construction`] at `T`.
pub fn tables_for_pipeline(g: &BodyGeometry, t: f64, opts: &PipelineOptions) -> Result<ArithTables> {
    let lam = select_lambda(t, opts.beta, opts.c0).lambda;
    let window_hi = (g.rect.a2 * g.rect.a2 * lam * lam).floor();
    ArithTables::build(series_cutoff(t, opts.eps0).floor().max(window_hi) as u64)
}

/// Choose `Λ`, build the series at `t = T`, select `M`, check the side
/// conditions, evaluate the bound, and search for a witness.
pub fn run_construction(g: &BodyGeometry, tables: &ArithTables, t: f64, opts: &PipelineOptions) -> Result<PipelineReport> {
    if opts.l < 2 {
        return Err(Error::InvalidArgument(format!("L = {} must be at least 2", opts.l)));
    }
    let choice = select_lambda(t, opts.beta, opts.c0);
    let mut warnings = choice.warnings;
    let big_lambda = choice.lambda;
    let series = build_series(g, tables, t, opts.model, opts.eps0)?;
    let selection = build_m(g, tables, &series, big_lambda, opts.beta, opts.l)?;
    if selection.indices.is_empty() {
        let msg = format!("resonating set is empty at Lambda={big_lambda}");
        warn!("{msg}");
        warnings.push(msg);
    }
    let star_ok = selection.star_value <= t;
    if !star_ok {
        let msg = format!("(6L)^(|M|+1) = {} exceeds T = {t}", selection.star_value);
        warn!("{msg}");
        warnings.push(msg);
    }
    let xh_max = selection
        .indices
        .iter()
        .map(|&i| series.x * series.classes[i].lambda.powi(2))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let xh_ok = xh_max.is_none_or(|v| v < opts.xh_bound);
    if !xh_ok {
        let msg = format!("X lambda^2 reaches {} on M, above the bound {}", xh_max.unwrap_or(0.0), opts.xh_bound);
        warn!("{msg}");
        warnings.push(msg);
    }
    let l_asymptotic = asymptotic_l(t);
    let inst = LemmaInstance::new(series.f.clone(), series.lambdas(), big_lambda, opts.l, selection.indices.clone(), t)?;
    let terms = rhs_terms(&inst);
    let witness = search_witness_with(&inst, opts.search)?;
    if witness.capped && !witness.met {
        let msg = "search budget ended before the lemma interval was covered".to_string();
        warn!("{msg}");
        warnings.push(msg);
    }
    Ok(PipelineReport {
        t,
        beta: opts.beta,
        c0: opts.c0,
        l: opts.l,
        l_asymptotic,
        big_lambda,
        classes: series.len(),
        cutoff: series.cutoff,
        selection,
        star_ok,
        xh_max,
        xh_bound: opts.xh_bound,
        xh_ok,
        terms,
        shape: resonance_shape(t),
        witness,
        warnings,
    })
}

/// Parameters of the random instance family used by the property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstanceSpec {
    pub t: f64,
    pub l_choices: Vec<u64>,
    pub max_m: usize,
    pub max_tail: usize,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        Self { t: 16.0, l_choices: vec![3, 12, 20], max_m: 4, max_tail: 6 }
    }
}

/// A random instance satisfying the lemma's hypotheses: `|M|` terms inside
/// `[Λ/2, 3Λ/2]`, plus tail terms below and above that window.
pub fn random_instance(rng: &mut ChaCha8Rng, spec: &RandomInstanceSpec) -> LemmaInstance {
    let big_lambda = rng.random_range(1.0..4.0);
    let l = spec.l_choices[rng.random_range(0..spec.l_choices.len())];
    let n_m = rng.random_range(1..=spec.max_m);
    let n_tail = rng.random_range(0..=spec.max_tail);
    let mut terms: Vec<(f64, f64, bool)> = Vec::with_capacity(n_m + n_tail);
    for _ in 0..n_m {
        terms.push((rng.random_range(0.5 * big_lambda..=1.5 * big_lambda), rng.random_range(0.1..1.0), true));
    }
    for _ in 0..n_tail {
        let lam = if rng.random_bool(0.3) {
            rng.random_range(0.05 * big_lambda..0.5 * big_lambda)
        } else {
            rng.random_range(1.5 * big_lambda..4.0 * big_lambda)
        };
        terms.push((lam.max(1e-3), rng.random_range(0.0..0.3), false));
    }
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = terms.iter().enumerate().filter(|(_, x)| x.2).map(|(i, _)| i).collect();
    let (lambda, f) = terms.iter().map(|x| (x.0, x.1)).unzip();
    LemmaInstance::new(f, lambda, big_lambda, l, m, spec.t).expect("generator respects the hypotheses")
}

/// `count` instances from a ChaCha8 stream seeded with `seed`.
pub fn random_instances(seed: u64, count: usize, spec: &RandomInstanceSpec) -> Vec<LemmaInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, spec)).collect()
}
