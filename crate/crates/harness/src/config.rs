use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use cayley_core::curvature::CurvatureScale;

use crate::error::HarnessError;

pub const SEED_ENV: &str = "CAYLEY_VARIATION_SEED";

/// Largest ambient dimension `m1 + m2` accepted by any campaign.
pub const MAX_AMBIENT_DIM: usize = 64;
/// Largest vector count accepted by `extremize`.
pub const MAX_EXTREMIZE_N: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Identities,
    IneqKey,
    IneqSum,
    Lines,
    Curvature,
    VariationComplex,
    VariationQuat,
    VariationOcto,
    Extremize,
    CertifyOdd,
    ReportAll,
}

impl Command {
    /// Every command except `report-all`, in report order.
    pub const CAMPAIGNS: [Command; 10] = [
        Command::Identities,
        Command::IneqKey,
        Command::IneqSum,
        Command::Lines,
        Command::Curvature,
        Command::VariationComplex,
        Command::VariationQuat,
        Command::VariationOcto,
        Command::Extremize,
        Command::CertifyOdd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::IneqKey => "ineq-key",
            Command::IneqSum => "ineq-sum",
            Command::Lines => "lines",
            Command::Curvature => "curvature",
            Command::VariationComplex => "variation-complex",
            Command::VariationQuat => "variation-quat",
            Command::VariationOcto => "variation-octo",
            Command::Extremize => "extremize",
            Command::CertifyOdd => "certify-odd",
            Command::ReportAll => "report-all",
        }
    }

    fn defaults(self) -> Defaults {
        let none = Defaults {
            trials: 10_000,
            m1: None,
            m2: None,
            n: None,
            d: Derived::Unused,
            tol: 1e-9,
            lambda_sq: false,
        };
        match self {
            Command::Identities => Defaults { tol: 1e-12, ..none },
            Command::IneqKey | Command::IneqSum => Defaults {
                m1: Some(8),
                n: Some(5),
                ..none
            },
            Command::Lines => Defaults {
                trials: 1000,
                tol: 1e-10,
                ..none
            },
            Command::Curvature => Defaults {
                tol: 1e-10,
                lambda_sq: true,
                ..none
            },
            Command::VariationComplex | Command::VariationQuat => Defaults {
                m1: Some(8),
                m2: Some(4),
                n: Some(4),
                d: Derived::Complete,
                lambda_sq: true,
                ..none
            },
            Command::VariationOcto => Defaults {
                m1: Some(16),
                m2: Some(4),
                n: Some(6),
                d: Derived::Complete,
                lambda_sq: true,
                ..none
            },
            Command::Extremize => Defaults {
                n: Some(8),
                tol: 1e-8,
                ..none
            },
            Command::CertifyOdd => Defaults {
                trials: 100_000,
                m1: Some(4),
                m2: Some(4),
                n: Some(3),
                tol: 1e-6,
                ..none
            },
            Command::ReportAll => none,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy)]
enum Derived {
    Unused,
    /// `d = m1 + m2 - n`.
    Complete,
}

#[derive(Debug, Clone, Copy)]
struct Defaults {
    trials: u64,
    m1: Option<usize>,
    m2: Option<usize>,
    n: Option<usize>,
    d: Derived,
    tol: f64,
    lambda_sq: bool,
}

/// Flags as given on the command line; `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub lambda_sq: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub format: Option<Format>,
}

/// A validated campaign configuration. Dimensions that a command does not
/// use are `None`.
///
/// `tol` is the pass threshold for the command's scale-free residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: u64,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub lambda_sq: Option<f64>,
    pub tol: f64,
    pub out: Option<String>,
    pub format: Format,
    /// Resolved configurations of the campaigns run by `report-all`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub campaigns: Vec<CampaignConfig>,
}

pub const DEFAULT_SEED: u64 = 0;

/// Parses the seed override variable; `Ok(None)` when unset.
pub fn seed_from_env() -> Result<Option<u64>, HarnessError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::config(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(HarnessError::config(format!("{SEED_ENV}: {e}"))),
    }
}

impl CampaignConfig {
    /// Default configuration of `command`.
    pub fn defaults(command: Command) -> Result<Self, HarnessError> {
        Self::resolve(RawConfig {
            command: Some(command),
            ..RawConfig::default()
        })
    }

    /// Fills defaults and checks every invariant.
    pub fn resolve(raw: RawConfig) -> Result<Self, HarnessError> {
        let command = raw
            .command
            .ok_or_else(|| HarnessError::config("--command is required"))?;
        let def = command.defaults();
        let pick = |flag: &str, given: Option<usize>, default: Option<usize>| match (given, default) {
            (Some(_), None) => Err(HarnessError::config(format!(
                "--{flag} is not used by {}",
                command.name()
            ))),
            (g, d) => Ok(g.or(d)),
        };
        let m1 = pick("m1", raw.m1, def.m1)?;
        let m2 = pick("m2", raw.m2, def.m2)?;
        let n = pick("n", raw.n, def.n)?;
        let d = match def.d {
            Derived::Unused => pick("d", raw.d, None)?,
            Derived::Complete => {
                let ambient = m1.unwrap_or(0) + m2.unwrap_or(0);
                Some(raw.d.unwrap_or(ambient.saturating_sub(n.unwrap_or(0))))
            }
        };
        let lambda_sq = match (raw.lambda_sq, def.lambda_sq) {
            (Some(_), false) => {
                return Err(HarnessError::config(format!(
                    "--lambda-sq is not used by {}",
                    command.name()
                )))
            }
            (Some(l), true) => Some(l),
            (None, true) => Some(default_lambda_sq(command, m1.unwrap_or(0))?),
            (None, false) => None,
        };
        let mut cfg = CampaignConfig {
            command,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            trials: raw.trials.unwrap_or(def.trials),
            m1,
            m2,
            n,
            d,
            lambda_sq,
            tol: raw.tol.unwrap_or(def.tol),
            out: raw.out,
            format: raw.format.unwrap_or(Format::Json),
            campaigns: Vec::new(),
        };
        if command == Command::ReportAll {
            if raw.tol.is_some() {
                return Err(HarnessError::config("--tol is not used by report-all"));
            }
            for sub in Command::CAMPAIGNS {
                cfg.campaigns.push(Self::resolve(RawConfig {
                    command: Some(sub),
                    seed: Some(cfg.seed),
                    trials: raw.trials,
                    format: Some(cfg.format),
                    ..RawConfig::default()
                })?);
            }
            cfg.trials = cfg.campaigns.iter().map(|c| c.trials).sum();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::config(msg));
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("--tol must be positive and finite, got {}", self.tol));
        }
        if let Some(l) = self.lambda_sq {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("--lambda-sq must be positive and finite, got {l}"));
            }
        }
        let m1 = self.m1.unwrap_or(0);
        let m2 = self.m2.unwrap_or(0);
        let n = self.n.unwrap_or(0);
        let d = self.d.unwrap_or(0);
        let name = self.command.name();
        match self.command {
            Command::Identities | Command::Lines | Command::Curvature | Command::ReportAll => {}
            Command::IneqKey | Command::IneqSum => {
                if m1 == 0 || n == 0 {
                    return bad(format!("{name} needs m1 >= 1 and n >= 1"));
                }
                if m1 > MAX_AMBIENT_DIM || n > MAX_AMBIENT_DIM {
                    return bad(format!("{name} accepts m1, n <= {MAX_AMBIENT_DIM}"));
                }
            }
            Command::VariationComplex | Command::VariationQuat | Command::VariationOcto => {
                match self.command {
                    Command::VariationComplex if m1 == 0 || m1 % 2 != 0 => {
                        return bad(format!("{name} needs a positive even m1, got {m1}"));
                    }
                    Command::VariationQuat if m1 == 0 || m1 % 4 != 0 => {
                        return bad(format!("{name} needs m1 divisible by 4, got {m1}"));
                    }
                    Command::VariationOcto if m1 != 16 => {
                        return bad(format!("{name} needs m1 = 16, got {m1}"));
                    }
                    _ => {}
                }
                if n == 0 {
                    return bad(format!("{name} needs n >= 1"));
                }
                if n + d > m1 + m2 {
                    return bad(format!("n + d = {} exceeds m1 + m2 = {}", n + d, m1 + m2));
                }
                if m1 + m2 > MAX_AMBIENT_DIM {
                    return bad(format!("{name} accepts m1 + m2 <= {MAX_AMBIENT_DIM}"));
                }
            }
            Command::Extremize => {
                if n == 0 || n > MAX_EXTREMIZE_N {
                    return bad(format!("{name} needs 1 <= n <= {MAX_EXTREMIZE_N}, got {n}"));
                }
            }
            Command::CertifyOdd => {
                if m1 == 0 || m2 == 0 || m1 % 2 != 0 || m2 % 2 != 0 {
                    return bad(format!("{name} needs positive even m1 and m2, got {m1} and {m2}"));
                }
                if n == 0 || n > m1 + m2 {
                    return bad(format!("{name} needs 1 <= n <= m1 + m2, got {n}"));
                }
                if n % 2 == 0 && n > m1.min(m2) {
                    return bad(format!(
                        "{name} builds even-n frames from n/2 invariant planes in each factor; needs n <= min(m1, m2)"
                    ));
                }
                if m1 + m2 > MAX_AMBIENT_DIM {
                    return bad(format!("{name} accepts m1 + m2 <= {MAX_AMBIENT_DIM}"));
                }
            }
        }
        Ok(())
    }

    pub fn curvature_scale(&self) -> Result<CurvatureScale, HarnessError> {
        let l = self
            .lambda_sq
            .ok_or_else(|| HarnessError::config(format!("{} has no curvature scale", self.command.name())))?;
        Ok(CurvatureScale::new(l)?)
    }
}

fn default_lambda_sq(command: Command, m1: usize) -> Result<f64, HarnessError> {
    let s = match command {
        Command::VariationComplex => CurvatureScale::complex_projective(m1)?,
        Command::VariationQuat => CurvatureScale::quaternionic_projective(m1)?,
        _ => CurvatureScale::cayley_plane(),
    };
    Ok(s.lambda_sq())
}
