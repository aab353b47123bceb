//! Scenario files: a named preset with its parameter block, or an explicit
//! state, pair of observables and channel. Complex numbers are `[re, im]`.
//!
//! ```toml
//! [preset]
//! name = "stern_gerlach"
//! rho01 = [0.3, 0.0]
//!
//! [grid]
//! start = 0.0
//! stop = 6.283185307179586
//! count = 64
//! ```

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QprobError, Result};
use crate::ising::IsingQuenchSpec;
use crate::linalg::{c64, CMatrix};
use crate::manybody::{self, LoschmidtSpec, OtocSpec};
use crate::presets::{self, TwoTimeSetup};
use crate::schemes::DetectorSpec;
use crate::state::{DensityOperator, Observable, QuantumChannel};
use crate::thermo::{self, HeatExchangeSpec, WorkProtocol};

pub type ComplexMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SternGerlachParams {
    pub rho01: [f64; 2],
    pub rho11: f64,
}

impl Default for SternGerlachParams {
    fn default() -> Self {
        SternGerlachParams { rho01: [0.0, 0.0], rho11: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Spin1Params {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitRamseyParams {
    pub rho01: [f64; 2],
}

impl Default for QubitRamseyParams {
    fn default() -> Self {
        QubitRamseyParams { rho01: [0.3, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    pub rho01: [f64; 2],
    pub kappa: f64,
    pub sigma: f64,
    pub p0: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            rho01: [0.3, 0.0],
            kappa: 1.0,
            sigma: 0.6,
            p0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrivenQubitParams {
    pub omega: f64,
    pub delta: f64,
    pub p: f64,
    pub c: f64,
    pub t: f64,
}

impl Default for DrivenQubitParams {
    fn default() -> Self {
        let omega = 1.0 + SQRT_2;
        DrivenQubitParams {
            omega,
            delta: 1.0,
            p: 0.5,
            c: -0.5,
            t: PI / omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoQubitHeatParams {
    pub p: f64,
    pub eta: f64,
    pub xi: f64,
    pub theta: f64,
    pub beta_c: f64,
    pub beta_h: f64,
}

impl Default for TwoQubitHeatParams {
    fn default() -> Self {
        TwoQubitHeatParams {
            p: 0.26,
            eta: 0.2,
            xi: 0.0,
            theta: PI / 4.0,
            beta_c: 1.0,
            beta_h: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoQubitOtocParams {
    pub b1: f64,
    pub b2: f64,
    pub j: f64,
    pub beta: f64,
    pub u: f64,
}

impl Default for TwoQubitOtocParams {
    fn default() -> Self {
        TwoQubitOtocParams {
            b1: 1.0,
            b2: 1.1,
            j: 2.0,
            beta: 10.0,
            u: PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitLoschmidtParams {
    pub b: f64,
    pub delta: f64,
}

impl Default for QubitLoschmidtParams {
    fn default() -> Self {
        QubitLoschmidtParams { b: 1.0, delta: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingQuenchParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub beta: f64,
    pub p: f64,
}

impl Default for IsingQuenchParams {
    fn default() -> Self {
        IsingQuenchParams {
            n: 12,
            lambda0: 0.0,
            lambda1: 0.5,
            beta: 0.1,
            p: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    SternGerlach(SternGerlachParams),
    Spin1Wtpm(Spin1Params),
    QubitRamsey(QubitRamseyParams),
    GaussianDetector(DetectorParams),
    DrivenQubit(DrivenQubitParams),
    TwoQubitHeat(TwoQubitHeatParams),
    TwoQubitOtoc(TwoQubitOtocParams),
    QubitLoschmidt(QubitLoschmidtParams),
    IsingQuench(IsingQuenchParams),
}

pub const PRESET_NAMES: [&str; 9] = [
    "stern_gerlach",
    "spin1_wtpm",
    "qubit_ramsey",
    "gaussian_detector",
    "driven_qubit",
    "two_qubit_heat",
    "two_qubit_otoc",
    "qubit_loschmidt",
    "ising_quench",
];

fn complex(z: [f64; 2]) -> Complex64 {
    c64(z[0], z[1])
}

impl Preset {
    /// Preset with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "stern_gerlach" => Preset::SternGerlach(Default::default()),
            "spin1_wtpm" => Preset::Spin1Wtpm(Default::default()),
            "qubit_ramsey" => Preset::QubitRamsey(Default::default()),
            "gaussian_detector" => Preset::GaussianDetector(Default::default()),
            "driven_qubit" => Preset::DrivenQubit(Default::default()),
            "two_qubit_heat" => Preset::TwoQubitHeat(Default::default()),
            "two_qubit_otoc" => Preset::TwoQubitOtoc(Default::default()),
            "qubit_loschmidt" => Preset::QubitLoschmidt(Default::default()),
            "ising_quench" => Preset::IsingQuench(Default::default()),
            other => {
                return Err(QprobError::InvalidParameter(format!(
                    "unknown preset `{other}` (known: {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::SternGerlach(_) => "stern_gerlach",
            Preset::Spin1Wtpm(_) => "spin1_wtpm",
            Preset::QubitRamsey(_) => "qubit_ramsey",
            Preset::GaussianDetector(_) => "gaussian_detector",
            Preset::DrivenQubit(_) => "driven_qubit",
            Preset::TwoQubitHeat(_) => "two_qubit_heat",
            Preset::TwoQubitOtoc(_) => "two_qubit_otoc",
            Preset::QubitLoschmidt(_) => "qubit_loschmidt",
            Preset::IsingQuench(_) => "ising_quench",
        }
    }

    /// Replaces parameters by key. Each value is a TOML literal; a bare number
    /// given for a complex parameter is taken as its real part.
    pub fn with_overrides(&self, overrides: &[(String, String)]) -> std::result::Result<Self, String> {
        let mut table = match toml::Value::try_from(self).map_err(|e| e.to_string())? {
            toml::Value::Table(t) => t,
            _ => unreachable!("presets serialize to tables"),
        };
        for (key, raw) in overrides {
            let current = table
                .get(key)
                .ok_or_else(|| format!("parameter `{key}` does not apply to preset `{}`", self.name()))?;
            let mut value = parse_literal(raw).map_err(|e| format!("--{key}: {e}"))?;
            if let (toml::Value::Array(_), toml::Value::Float(_) | toml::Value::Integer(_)) = (current, &value) {
                value = toml::Value::Array(vec![value, toml::Value::Float(0.0)]);
            }
            table.insert(key.clone(), value);
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| e.message().to_string())
    }

    pub fn two_time(&self) -> Result<TwoTimeSetup> {
        match self {
            Preset::SternGerlach(p) => presets::stern_gerlach(complex(p.rho01), p.rho11),
            Preset::Spin1Wtpm(_) => presets::spin1_wtpm(),
            Preset::QubitRamsey(p) => presets::qubit_ramsey(complex(p.rho01)),
            Preset::GaussianDetector(_) => Ok(self.detector()?.0),
            Preset::DrivenQubit(_) => {
                let w = self.work()?;
                TwoTimeSetup::new(w.rho, w.h1, w.channel, w.h2)
            }
            Preset::QubitLoschmidt(_) => {
                let l = self.loschmidt()?;
                let n = l.rho.dim();
                TwoTimeSetup::new(l.rho, l.h0, QuantumChannel::identity(n), l.hdelta)
            }
            _ => Err(self.mismatch("a two-time measurement setup")),
        }
    }

    pub fn detector(&self) -> Result<(TwoTimeSetup, DetectorSpec)> {
        match self {
            Preset::GaussianDetector(p) => presets::gaussian_detector(complex(p.rho01), p.kappa, p.sigma, p.p0),
            _ => Err(self.mismatch("a detector")),
        }
    }

    pub fn work(&self) -> Result<WorkProtocol> {
        match self {
            Preset::DrivenQubit(p) => thermo::driven_qubit_preset(p.omega, p.delta, p.p, p.c, p.t),
            _ => Err(self.mismatch("a work protocol")),
        }
    }

    pub fn heat(&self) -> Result<HeatExchangeSpec> {
        match self {
            Preset::TwoQubitHeat(p) => thermo::two_qubit_heat_preset(p.p, p.eta, p.xi, p.theta, p.beta_c, p.beta_h),
            _ => Err(self.mismatch("a heat exchange")),
        }
    }

    /// The OTOC setup and its counting parameter `u`.
    pub fn otoc(&self) -> Result<(OtocSpec, f64)> {
        match self {
            Preset::TwoQubitOtoc(p) => Ok((manybody::two_qubit_otoc_preset(p.b1, p.b2, p.j, p.beta)?, p.u)),
            _ => Err(self.mismatch("an OTOC")),
        }
    }

    pub fn loschmidt(&self) -> Result<LoschmidtSpec> {
        match self {
            Preset::QubitLoschmidt(p) => manybody::qubit_loschmidt_preset(p.b, p.delta),
            _ => Err(self.mismatch("a Loschmidt echo")),
        }
    }

    pub fn ising(&self) -> Result<IsingQuenchSpec> {
        match self {
            Preset::IsingQuench(p) => {
                let spec = IsingQuenchSpec {
                    n: p.n,
                    lambda0: p.lambda0,
                    lambda1: p.lambda1,
                    beta: p.beta,
                    p: p.p,
                };
                spec.validate()?;
                Ok(spec)
            }
            _ => Err(self.mismatch("an Ising quench")),
        }
    }

    fn mismatch(&self, what: &str) -> QprobError {
        QprobError::InvalidParameter(format!("preset `{}` does not describe {what}", self.name()))
    }
}

fn parse_literal(raw: &str) -> std::result::Result<toml::Value, String> {
    let raw = raw.trim();
    let text = if raw.contains(',') && !raw.starts_with('[') {
        format!("v = [{raw}]")
    } else {
        format!("v = {raw}")
    };
    let mut t: toml::Table = toml::from_str(&text).map_err(|e| e.message().to_string())?;
    Ok(t.remove("v").expect("key present"))
}

/// Absent entirely, the channel is the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub unitary: Option<ComplexMatrix>,
    pub kraus: Option<Vec<ComplexMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitScenario {
    pub dim: usize,
    pub rho: ComplexMatrix,
    #[serde(rename = "O1")]
    pub o1: ComplexMatrix,
    #[serde(rename = "O2")]
    pub o2: ComplexMatrix,
    #[serde(default)]
    pub channel: ChannelSpec,
}

fn to_matrix(name: &str, dim: usize, m: &ComplexMatrix) -> Result<CMatrix> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(QprobError::InvalidParameter(format!("`{name}` must be a {dim}x{dim} matrix of [re, im] pairs")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| complex(m[i][j])))
}

impl ExplicitScenario {
    pub fn two_time(&self) -> Result<TwoTimeSetup> {
        let d = self.dim;
        let channel = match (&self.channel.unitary, &self.channel.kraus) {
            (Some(u), None) => QuantumChannel::unitary(to_matrix("channel.unitary", d, u)?)?,
            (None, None) => QuantumChannel::identity(d),
            (None, Some(ks)) => QuantumChannel::kraus(
                ks.iter()
                    .map(|k| to_matrix("channel.kraus", d, k))
                    .collect::<Result<Vec<_>>>()?,
            )?,
            _ => {
                return Err(QprobError::InvalidParameter(
                    "channel takes at most one of `unitary` or `kraus`".into(),
                ))
            }
        };
        TwoTimeSetup::new(
            DensityOperator::new(to_matrix("rho", d, &self.rho)?)?,
            Observable::new(to_matrix("O1", d, &self.o1)?, "O1")?,
            channel,
            Observable::new(to_matrix("O2", d, &self.o2)?, "O2")?,
        )
    }

    /// Reads `O1` and `O2` as the initial and final Hamiltonians.
    pub fn work(&self) -> Result<WorkProtocol> {
        let s = self.two_time()?;
        WorkProtocol::new(s.o1, s.o2, s.channel, s.rho)
    }
}

/// Inclusive grid of `count` points from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Grid { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Parses `start,stop,count`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("grid `{s}` must be start,stop,count"));
        }
        let f = |x: &str| x.parse::<f64>().map_err(|e| format!("grid `{s}`: {e}"));
        let count = parts[2].parse::<usize>().map_err(|e| format!("grid `{s}`: {e}"))?;
        Ok(Grid::new(f(parts[0])?, f(parts[1])?, count))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: Option<Preset>,
    pub explicit: Option<ExplicitScenario>,
    pub grid: Option<Grid>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if cfg.preset.is_some() && cfg.explicit.is_some() {
            return Err("config must contain exactly one of [preset] or [explicit]".into());
        }
        Ok(cfg)
    }

    pub fn two_time(&self) -> Result<TwoTimeSetup> {
        match (&self.preset, &self.explicit) {
            (Some(p), _) => p.two_time(),
            (None, Some(e)) => e.two_time(),
            (None, None) => Err(QprobError::InvalidParameter("no scenario given".into())),
        }
    }

    pub fn work(&self) -> Result<WorkProtocol> {
        match (&self.preset, &self.explicit) {
            (Some(p), _) => p.work(),
            (None, Some(e)) => e.work(),
            (None, None) => Err(QprobError::InvalidParameter("no scenario given".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_file_parses_with_defaults() {
        let cfg = ScenarioConfig::from_toml("[preset]\nname = \"gaussian_detector\"\nkappa = 2.0\n").unwrap();
        match cfg.preset.unwrap() {
            Preset::GaussianDetector(p) => {
                assert_eq!(p.kappa, 2.0);
                assert_eq!(p.sigma, 0.6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        assert!(ScenarioConfig::from_toml("[preset]\nname = \"stern_gerlach\"\nkappa = 2.0\n").is_err());
        assert!(Preset::by_name("stern_gerlach")
            .unwrap()
            .with_overrides(&[("kappa".into(), "1".into())])
            .is_err());
    }

    #[test]
    fn overrides_accept_bare_reals_for_complex() {
        let p = Preset::by_name("stern_gerlach")
            .unwrap()
            .with_overrides(&[("rho01".into(), "0.1".into()), ("rho11".into(), "0.4".into())])
            .unwrap();
        assert_eq!(p, Preset::SternGerlach(SternGerlachParams { rho01: [0.1, 0.0], rho11: 0.4 }));
        let q = p.with_overrides(&[("rho01".into(), "0.1,-0.2".into())]).unwrap();
        assert_eq!(q, Preset::SternGerlach(SternGerlachParams { rho01: [0.1, -0.2], rho11: 0.4 }));
    }

    #[test]
    fn integer_chain_length_override() {
        let p = Preset::by_name("ising_quench")
            .unwrap()
            .with_overrides(&[("N".into(), "8".into()), ("p".into(), "0".into())])
            .unwrap();
        let spec = p.ising().unwrap();
        assert_eq!((spec.n, spec.p), (8, 0.0));
    }

    #[test]
    fn explicit_scenario_builds() {
        let text = r#"
[explicit]
dim = 2
rho = [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]]
O1 = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
O2 = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
[explicit.channel]
unitary = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
"#;
        let setup = ScenarioConfig::from_toml(text).unwrap().two_time().unwrap();
        assert_eq!(setup.rho.dim(), 2);
        let both = format!("{text}\n[preset]\nname = \"spin1_wtpm\"\n");
        assert!(ScenarioConfig::from_toml(&both).is_err());
    }

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(Grid::parse("0,1,3").unwrap().points(), vec![0.0, 0.5, 1.0]);
        assert!(Grid::parse("0,1").is_err());
    }
}
