//! Run configuration, read from TOML.
//!
//! Every field has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected.

use std::f64::consts::SQRT_2;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::body::{RevolutionProfile, Tolerances};
use crate::error::{Error, Result};
use crate::lemma::{LemmaInstance, DEFAULT_XH_BOUND};
use crate::spectrum::{CoeffModel, DEFAULT_EPS0};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Worker threads, 0 for the available parallelism. Results do not depend
    /// on it, so it is left out of the echoed config and the hash.
    #[serde(skip_serializing)]
    pub workers: usize,
    /// Seed of the random lemma instances.
    pub seed: u64,
    pub body: RevolutionProfile,
    pub tolerances: Tolerances,
    pub count: CountConfig,
    pub scan: ScanConfig,
    pub arith: ArithConfig,
    pub spectrum: SpectrumConfig,
    pub borel: BorelConfig,
    pub link: LinkConfig,
    pub lemma: LemmaConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            workers: 0,
            seed: 20_240_601,
            body: RevolutionProfile::Sphere,
            tolerances: Tolerances::default(),
            count: CountConfig::default(),
            scan: ScanConfig::default(),
            arith: ArithConfig::default(),
            spectrum: SpectrumConfig::default(),
            borel: BorelConfig::default(),
            link: LinkConfig::default(),
            lemma: LemmaConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CountConfig {
    pub t: f64,
    /// Also run the brute-force oracle.
    pub brute: bool,
}

impl Default for CountConfig {
    fn default() -> Self {
        Self { t: 1.0, brute: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { t_min: 1.0, t_max: 100.0, step: 1.0 }
    }
}

impl ScanConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("scan.step must be positive, got {}", self.step)));
        }
        if !(self.t_min >= 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
            return Err(Error::Config(format!("scan range [{}, {}] is invalid", self.t_min, self.t_max)));
        }
        let n = ((self.t_max - self.t_min) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.t_min + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArithConfig {
    /// Upper end of the full tables used by `arith table`.
    pub table_limit: u64,
    /// Rows printed by `arith table`.
    pub from: u64,
    pub to: u64,
    /// `Λ` values of the cardinality check.
    pub lambdas: Vec<f64>,
    pub beta: f64,
}

impl Default for ArithConfig {
    fn default() -> Self {
        Self { table_limit: 1_000_000, from: 1, to: 100, lambdas: vec![50.0, 100.0, 200.0, 400.0], beta: SQRT_2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub t: f64,
    pub eps0: f64,
    pub coeff: CoeffModel,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { t: 20.0, eps0: DEFAULT_EPS0, coeff: CoeffModel::Unit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BorelConfig {
    pub t: f64,
}

impl Default for BorelConfig {
    fn default() -> Self {
        Self { t: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self { t_min: 10.0, t_max: 30.0, n: 20 }
    }
}

impl LinkConfig {
    /// `n` equally spaced points from `t_min` to `t_max`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.n == 0 || !(self.t_min >= 3.0 && self.t_max >= self.t_min) {
            return Err(Error::Config(format!(
                "link grid needs n >= 1 and 3 <= t_min <= t_max, got n={} [{}, {}]",
                self.n, self.t_min, self.t_max
            )));
        }
        if self.n == 1 {
            return Ok(vec![self.t_min]);
        }
        let h = (self.t_max - self.t_min) / (self.n - 1) as f64;
        Ok((0..self.n).map(|i| self.t_min + h * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub f: Vec<f64>,
    pub lambda: Vec<f64>,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    /// Zero-based indices of the distinguished terms.
    #[serde(rename = "M")]
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    #[serde(rename = "T")]
    pub t: f64,
    pub beta: f64,
    pub c0: f64,
    #[serde(rename = "L")]
    pub l: u64,
    /// Bound on `X λ²` over the resonating set.
    pub xh_bound: f64,
    /// Grid spacing; absent means `1 / (8 λ_max)`.
    pub step: Option<f64>,
    /// Maximum grid points per search.
    pub budget: u64,
    /// Random instances run by `lemma search` when no instance is given.
    pub instances: usize,
    pub instance: Option<InstanceConfig>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            t: 1e4,
            beta: SQRT_2,
            c0: 0.5,
            l: 3,
            xh_bound: DEFAULT_XH_BOUND,
            step: None,
            budget: 1 << 24,
            instances: 50,
            instance: None,
        }
    }
}

impl LemmaConfig {
    pub fn explicit_instance(&self) -> Option<Result<LemmaInstance>> {
        self.instance.as_ref().map(|i| {
            LemmaInstance::new(i.f.clone(), i.lambda.clone(), i.big_lambda, self.l, i.m.clone(), self.t)
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory receiving `<command>.csv`; absent means standard output.
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML of the resolved configuration.
    pub fn resolved_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of [`Self::resolved_toml`], lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.resolved_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[scan]\nstep = 1.0\nwidth = 2").is_err());
        assert!(RunConfig::from_toml("[body]\nkind = \"sphere\"\nradius = 2").is_err());
    }

    #[test]
    fn round_trip_and_hash() {
        let text = r#"
            seed = 7
            [body]
            kind = "spheroid"
            a = 2.0
            b = 1.0
            [spectrum]
            coeff = "curvature"
            [lemma]
            L = 5
            [lemma.instance]
            f = [1.0]
            lambda = [1.0]
            Lambda = 1.0
            M = [0]
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.body, RevolutionProfile::spheroid(2.0, 1.0));
        assert_eq!(cfg.spectrum.coeff, CoeffModel::Curvature);
        assert_eq!(cfg.lemma.l, 5);
        let again = RunConfig::from_toml(&cfg.resolved_toml()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
        let other = RunConfig { seed: 8, ..cfg.clone() };
        assert_ne!(other.hash(), cfg.hash());
        let threads = RunConfig { workers: 4, ..cfg.clone() };
        assert_eq!(threads.hash(), cfg.hash());
        assert!(cfg.lemma.explicit_instance().unwrap().is_ok());
    }

    #[test]
    fn grids() {
        let s = ScanConfig { t_min: 1.0, t_max: 2.0, step: 0.25 };
        assert_eq!(s.grid().unwrap(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(ScanConfig { step: 0.0, ..s.clone() }.grid().is_err());
        let l = LinkConfig::default().grid().unwrap();
        assert_eq!(l.len(), 20);
        assert_eq!(l[0], 10.0);
        assert!((l[19] - 30.0).abs() < 1e-12);
    }
}
