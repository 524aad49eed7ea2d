//! Run configuration: a TOML file with `[params]` and `[run]` sections, with
//! every field overridable from the command line.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use qdm_core::{Frame, PrepMode, SystemParams};

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, toml::de::Error),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(p, e) => write!(f, "invalid config {}: {e}", p.display()),
            ConfigError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A phase written as a number of radians or a multiple of pi ("pi", "-pi/2", "0.5pi").
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase(pub f64);

impl std::str::FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace(' ', "");
        let bad = || format!("invalid phase '{s}': expected radians or a multiple of pi");
        let Some(pos) = t.find("pi") else {
            return t.parse::<f64>().map(Phase).map_err(|_| bad());
        };
        let (head, tail) = (&t[..pos], &t[pos + 2..]);
        let coef = match head.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let div = match tail {
            "" => 1.0,
            d => d.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        if div == 0.0 {
            return Err(bad());
        }
        Ok(Phase(coef * PI / div))
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Phase(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FrameArg {
    #[default]
    Rotating,
    Lab,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Rotating => Frame::Rotating,
            FrameArg::Lab => Frame::Lab,
        }
    }
}

/// Which drive acts during `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Preparation drive (Ω, φ).
    #[default]
    Prep,
    /// Readout drive (Ω̄ = Ω(√2+1), φ̄ = 0).
    Readout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// |0⟩⟨0|
    Ground,
    /// |1⟩⟨1|
    Direct,
    /// |2⟩⟨2|
    Indirect,
    /// 𝟙/3
    Mixed,
    /// |E₀⟩⟨E₀| for the configured phase.
    E0,
    /// Closed-form asymptotic state.
    Analytic,
    /// Exact steady state.
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrepArg {
    Ideal,
    #[default]
    Analytic,
    Nullspace,
    Dissipative,
}

impl From<PrepArg> for PrepMode {
    fn from(p: PrepArg) -> Self {
        match p {
            PrepArg::Ideal => PrepMode::Ideal,
            PrepArg::Analytic => PrepMode::Analytic,
            PrepArg::Nullspace => PrepMode::NullSpace,
            PrepArg::Dissipative => PrepMode::Dissipative,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamSection {
    omega: Option<f64>,
    #[serde(alias = "te")]
    t_e: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    eps_ratio: Option<f64>,
    phi: Option<Phase>,
    omega_l: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    t_end: Option<f64>,
    sample_dt: Option<f64>,
    tol: Option<f64>,
    phi: Option<Vec<Phase>>,
    eps_ratio: Option<Vec<f64>>,
    n: Option<Vec<u32>>,
    out: Option<PathBuf>,
    emit: Option<Emit>,
    frame: Option<FrameArg>,
    initial: Option<InitialState>,
    stage: Option<Stage>,
    prep: Option<PrepArg>,
    readout_dissipation: Option<bool>,
    f0: Option<u8>,
    f2: Option<u8>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    params: ParamSection,
    #[serde(default)]
    run: RunSection,
}

/// Flags shared by every subcommand; each overrides the matching config entry.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file with [params] and [run] sections.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Rabi coupling Ω, µeV.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Tunneling coupling T_e, µeV.
    #[arg(long)]
    pub te: Option<f64>,
    /// Direct-exciton decay rate Γ₁, µeV.
    #[arg(long)]
    pub gamma1: Option<f64>,
    /// Indirect-exciton decay rate Γ₂, µeV (alternative to --eps-ratio).
    #[arg(long, conflicts_with = "eps_ratio")]
    pub gamma2: Option<f64>,
    /// Γ₂/Γ₁; a comma-separated list for `tables` and `fidelity`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps_ratio: Vec<f64>,
    /// Laser phase (radians or e.g. "pi"); a list for `tables`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<Phase>,
    /// Laser frequency ω_L, µeV (lab frame only).
    #[arg(long)]
    pub omega_l: Option<f64>,
    /// End time, ps.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Sampling interval, ps.
    #[arg(long)]
    pub sample_dt: Option<f64>,
    /// Relative integration tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Table rows (readout indices), comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    #[arg(long, value_enum)]
    pub initial: Option<InitialState>,
    #[arg(long, value_enum)]
    pub stage: Option<Stage>,
    #[arg(long, value_enum)]
    pub prep: Option<PrepArg>,
    /// Switch off Γ₁ and Γ₂ during readout.
    #[arg(long)]
    pub no_readout_dissipation: bool,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub t_end: Option<f64>,
    pub sample_dt: Option<f64>,
    pub tol: Option<f64>,
    /// Explicit phase list, if any.
    pub phis: Option<Vec<f64>>,
    /// Explicit Γ₂/Γ₁ list, if any.
    pub eps_ratios: Option<Vec<f64>>,
    pub ns: Option<Vec<u32>>,
    pub out: Option<PathBuf>,
    pub emit: Emit,
    pub frame: Frame,
    pub initial: Option<InitialState>,
    pub stage: Stage,
    pub prep: PrepMode,
    pub readout_dissipation: bool,
    pub f0: Option<u8>,
    pub f2: Option<u8>,
}

pub const DEFAULT_EPS_RATIO: f64 = 1e-4;

fn load(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_owned(), e))?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse(path.to_owned(), e))
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl RunConfig {
    /// Merges defaults, the config file (if any) and flags, in that order.
    pub fn resolve(args: &CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let (fp, fr) = (file.params, file.run);
        if fp.gamma2.is_some() && fp.eps_ratio.is_some() {
            return Err(ConfigError::Invalid("[params] sets both gamma2 and eps_ratio".into()));
        }

        let reference = SystemParams::reference();
        let omega = args.omega.or(fp.omega).unwrap_or(reference.omega);
        let t_e = args.te.or(fp.t_e).unwrap_or(reference.t_e);
        let gamma1 = args.gamma1.or(fp.gamma1).unwrap_or(reference.gamma1);

        let eps_list = non_empty(args.eps_ratio.clone()).or(fr.eps_ratio);
        let phi_list = non_empty(args.phi.iter().map(|p| p.0).collect()).or(fr.phi.map(|v| v.into_iter().map(|p| p.0).collect()));

        // A flag of either kind beats any file entry of either kind.
        let gamma2 = if let Some(g2) = args.gamma2 {
            g2
        } else if let Some(list) = non_empty(args.eps_ratio.clone()) {
            list[0] * gamma1
        } else if let Some(g2) = fp.gamma2 {
            g2
        } else if let Some(eps) = fp.eps_ratio {
            eps * gamma1
        } else if let Some(list) = &eps_list {
            list[0] * gamma1
        } else {
            DEFAULT_EPS_RATIO * gamma1
        };
        let phi = phi_list
            .as_ref()
            .map(|v| v[0])
            .or(fp.phi.map(|p| p.0))
            .unwrap_or(reference.phi);

        let mut params = SystemParams::new(omega, t_e, gamma1, gamma2, phi);
        params.omega_l = args.omega_l.or(fp.omega_l).unwrap_or(SystemParams::DEFAULT_OMEGA_L);

        Ok(RunConfig {
            params,
            t_end: args.t_end.or(fr.t_end),
            sample_dt: args.sample_dt.or(fr.sample_dt),
            tol: args.tol.or(fr.tol),
            phis: phi_list,
            eps_ratios: eps_list,
            ns: non_empty(args.n.clone()).or(fr.n),
            out: args.out.clone().or(fr.out),
            emit: args.emit.or(fr.emit).unwrap_or_default(),
            frame: args.frame.or(fr.frame).unwrap_or_default().into(),
            initial: args.initial.or(fr.initial),
            stage: args.stage.or(fr.stage).unwrap_or_default(),
            prep: args.prep.or(fr.prep).unwrap_or_default().into(),
            readout_dissipation: !args.no_readout_dissipation && fr.readout_dissipation.unwrap_or(true),
            f0: fr.f0,
            f2: fr.f2,
        })
    }

    /// Rejects lists where a single value is expected.
    pub fn single_point(&self) -> Result<(), ConfigError> {
        if self.phis.as_ref().is_some_and(|v| v.len() > 1) {
            return Err(ConfigError::Invalid("this command takes a single phi".into()));
        }
        if self.eps_ratios.as_ref().is_some_and(|v| v.len() > 1) {
            return Err(ConfigError::Invalid("this command takes a single eps-ratio".into()));
        }
        Ok(())
    }
}
