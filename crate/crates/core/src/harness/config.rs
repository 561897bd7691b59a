//! Experiment configuration, loaded from TOML and overridable from the CLI.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{CliffordBlock, CnotPairing, TDopedLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Tdoped,
    Mipt,
    Kurtosis,
    Renyi4,
    Oracle,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tdoped => "tdoped",
            ExperimentKind::Mipt => "mipt",
            ExperimentKind::Kurtosis => "kurtosis",
            ExperimentKind::Renyi4 => "renyi4",
            ExperimentKind::Oracle => "oracle",
        }
    }

    /// Stable tag mixed into every per-instance seed.
    pub fn seed_tag(self) -> u64 {
        match self {
            ExperimentKind::Tdoped => 1,
            ExperimentKind::Mipt => 2,
            ExperimentKind::Kurtosis => 3,
            ExperimentKind::Renyi4 => 4,
            ExperimentKind::Oracle => 5,
        }
    }

    fn default_qubits(self) -> Vec<usize> {
        match self {
            ExperimentKind::Mipt => vec![8, 12, 16],
            ExperimentKind::Renyi4 => vec![12],
            ExperimentKind::Oracle => vec![8, 12],
            _ => vec![8],
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tdoped" => ExperimentKind::Tdoped,
            "mipt" => ExperimentKind::Mipt,
            "kurtosis" => ExperimentKind::Kurtosis,
            "renyi4" => ExperimentKind::Renyi4,
            "oracle" => ExperimentKind::Oracle,
            _ => return Err(Error::InvalidConfig(format!("unknown experiment `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    /// Tableau for Clifford-only circuits, statevector otherwise.
    #[default]
    Auto,
    Tableau,
    Statevector,
}

impl FromStr for BackendChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BackendChoice::Auto),
            "tableau" => Ok(BackendChoice::Tableau),
            "statevector" => Ok(BackendChoice::Statevector),
            _ => Err(Error::InvalidConfig(format!("unknown backend `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

/// An angle given either as radians or as text such as `pi/4`, `3pi/4`,
/// `-pi/20` or `0.7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

pub fn parse_angle(s: &str) -> Result<f64> {
    let bad = || Error::InvalidConfig(format!("cannot parse angle `{s}`"));
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = match &t[..pos] {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[pos + 2..];
    let div = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    let v = coef * PI / div;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Inclusive arithmetic grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PmGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl PmGrid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // rounding to 12 decimals keeps grid values free of accumulated noise
        (0..count).map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

impl Default for PmGrid {
    fn default() -> Self {
        PmGrid { start: 0.02, stop: 0.40, step: 0.02 }
    }
}

impl FromStr for PmGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidConfig(format!("bad grid `{s}`, expected start:stop:step")))?;
        let [start, stop, step] = nums[..] else {
            return Err(Error::InvalidConfig(format!("bad grid `{s}`, expected start:stop:step")));
        };
        if !(step > 0.0) || stop < start || !(0.0..=1.0).contains(&start) || stop > 1.0 {
            return Err(Error::InvalidConfig(format!("grid `{s}` must satisfy 0 <= start <= stop <= 1, step > 0")));
        }
        Ok(PmGrid { start, stop, step })
    }
}

impl TryFrom<String> for PmGrid {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PmGrid> for String {
    fn from(g: PmGrid) -> String {
        g.to_string()
    }
}

impl fmt::Display for PmGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub kind: ExperimentKind,
    pub qubits: Vec<usize>,
    /// T counts `0..=nt_max`; defaults to `2n` per size.
    pub nt_max: Option<usize>,
    /// Explicit T counts; overrides `nt_max`.
    pub nt_values: Option<Vec<usize>>,
    /// Circuits per T count.
    pub samples: usize,
    /// Trajectories per brickwork grid point.
    pub instances: usize,
    pub thetas: Vec<Angle>,
    pub pm_grid: PmGrid,
    pub cycles: usize,
    pub subsystem_fraction: f64,
    pub master_seed: u64,
    pub backend: BackendChoice,
    pub out: PathBuf,
    pub format: OutputFormat,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub pairing: CnotPairing,
    pub layout: TDopedLayout,
    pub block: CliffordBlock,
    pub statevector_cap: usize,
    pub mipt_statevector_cap: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self::new(ExperimentKind::Tdoped)
    }
}

impl EnsembleConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        EnsembleConfig {
            kind,
            qubits: kind.default_qubits(),
            nt_max: None,
            nt_values: match kind {
                ExperimentKind::Oracle => Some(vec![0, 2, 4, 6]),
                _ => None,
            },
            samples: if kind == ExperimentKind::Oracle { 2000 } else { 500 },
            instances: 400,
            thetas: vec![Angle::Radians(0.0)],
            pm_grid: PmGrid::default(),
            cycles: 125,
            subsystem_fraction: 0.25,
            master_seed: 2024,
            backend: BackendChoice::Auto,
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
            threads: 0,
            pairing: CnotPairing::Independent,
            layout: TDopedLayout::Interleaved,
            // the moment predictions and the kurtosis argument assume fully
            // scrambled Clifford segments
            block: match kind {
                ExperimentKind::Oracle | ExperimentKind::Kurtosis => CliffordBlock::Uniform,
                _ => CliffordBlock::Steps,
            },
            statevector_cap: 20,
            mipt_statevector_cap: 12,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// T counts for size `n`.
    pub fn nt_list(&self, n: usize) -> Vec<usize> {
        match (&self.nt_values, self.nt_max) {
            (Some(v), _) => v.clone(),
            (None, Some(m)) => (0..=m).collect(),
            (None, None) => (0..=2 * n).collect(),
        }
    }

    pub fn theta_values(&self) -> Result<Vec<f64>> {
        self.thetas.iter().map(Angle::radians).collect()
    }

    /// Qubits per region for size `n`.
    pub fn region_size(&self, n: usize) -> usize {
        (self.subsystem_fraction * n as f64).round() as usize
    }

    /// Checks everything that can be checked before simulating: config
    /// errors first, then resource limits.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::InvalidConfig(m));
        if self.qubits.is_empty() {
            return cfg("qubit list is empty".into());
        }
        if !(self.subsystem_fraction > 0.0 && self.subsystem_fraction <= 0.25) {
            return cfg(format!("subsystem fraction {} must lie in (0, 1/4]", self.subsystem_fraction));
        }
        let thetas = self.theta_values()?;
        if thetas.is_empty() || thetas.iter().any(|t| !t.is_finite()) {
            return cfg("theta list must be non-empty and finite".into());
        }
        let tdoped_like = matches!(self.kind, ExperimentKind::Tdoped | ExperimentKind::Kurtosis | ExperimentKind::Renyi4);
        for &n in &self.qubits {
            let k = self.subsystem_fraction * n as f64;
            if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
                return cfg(format!("subsystem fraction {} of n={n} is not a positive integer", self.subsystem_fraction));
            }
            match self.kind {
                ExperimentKind::Mipt if n < 4 || n % 2 != 0 => return cfg(format!("brickwork needs even n >= 4, got {n}")),
                ExperimentKind::Mipt => {}
                _ if n < 4 || n % 4 != 0 => return cfg(format!("t-doped circuits need n divisible by 4, got {n}")),
                _ => {}
            }
        }
        if tdoped_like || self.kind == ExperimentKind::Oracle {
            let min = match self.kind {
                ExperimentKind::Kurtosis => 4,
                _ => 2,
            };
            if self.samples < min {
                return cfg(format!("need at least {min} samples, got {}", self.samples));
            }
            if self.nt_values.as_ref().is_some_and(|v| v.is_empty()) {
                return cfg("T-count list is empty".into());
            }
        }
        if self.kind == ExperimentKind::Mipt {
            if self.instances < 2 {
                return cfg("need at least 2 instances".into());
            }
            if self.cycles == 0 {
                return cfg("need at least one cycle".into());
            }
        }
        if self.backend == BackendChoice::Tableau {
            if self.kind == ExperimentKind::Mipt && thetas.iter().any(|&t| t != 0.0) {
                return cfg("tableau backend requires theta = 0".into());
            }
            if tdoped_like && self.qubits.iter().any(|&n| self.nt_list(n).iter().any(|&t| t > 0)) {
                return cfg("tableau backend cannot run circuits with T gates".into());
            }
        }
        // resource limits
        for &n in &self.qubits {
            let needs_sv = match self.kind {
                ExperimentKind::Mipt => {
                    self.backend == BackendChoice::Statevector || thetas.iter().any(|&t| t != 0.0)
                }
                _ => self.backend == BackendChoice::Statevector || self.nt_list(n).iter().any(|&t| t > 0),
            };
            let cap = if self.kind == ExperimentKind::Mipt { self.mipt_statevector_cap } else { self.statevector_cap };
            if needs_sv && n > cap {
                return Err(Error::Resource(format!("n={n} exceeds the statevector cap of {cap} qubits")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert!((parse_angle("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("3pi/4").unwrap() - 0.75 * PI).abs() < 1e-15);
        assert!((parse_angle("-pi/20").unwrap() + PI / 20.0).abs() < 1e-15);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi/x").is_err());
    }

    #[test]
    fn grids() {
        let g: PmGrid = "0.05:0.35:0.02".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 16);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[15], 0.35);
        assert_eq!(v[7], 0.19);
        assert!("0.1:0.05:0.01".parse::<PmGrid>().is_err());
        assert!("0.1:0.2".parse::<PmGrid>().is_err());
        assert!("0.1:0.2:0".parse::<PmGrid>().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            kind = "mipt"
            qubits = [8, 12]
            thetas = [0.0, "pi/4"]
            pm_grid = "0.1:0.3:0.05"
            instances = 10
            cycles = 5
        "#;
        let c = EnsembleConfig::from_toml_str(text).unwrap();
        assert_eq!(c.kind, ExperimentKind::Mipt);
        assert_eq!(c.pm_grid.values().len(), 5);
        assert!((c.theta_values().unwrap()[1] - PI / 4.0).abs() < 1e-15);
        let back = EnsembleConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
        assert!(EnsembleConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = EnsembleConfig::new(ExperimentKind::Tdoped);
        c.validate().unwrap();
        c.backend = BackendChoice::Tableau;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.nt_values = Some(vec![0]);
        c.validate().unwrap();

        let mut c = EnsembleConfig::new(ExperimentKind::Tdoped);
        c.subsystem_fraction = 0.125;
        c.qubits = vec![12];
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.qubits = vec![16];
        c.validate().unwrap();

        let mut c = EnsembleConfig::new(ExperimentKind::Mipt);
        c.thetas = vec![Angle::Text("pi/4".into())];
        assert!(matches!(c.validate(), Err(Error::Resource(_))));
        c.qubits = vec![8];
        c.validate().unwrap();
        c.backend = BackendChoice::Tableau;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));

        let mut c = EnsembleConfig::new(ExperimentKind::Tdoped);
        c.qubits = vec![24];
        assert!(matches!(c.validate(), Err(Error::Resource(_))));
    }
}
