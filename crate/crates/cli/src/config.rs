//! Run configuration: TOML files merged with command-line flags.

use std::fmt;
use std::path::PathBuf;

use coinwalk::{CoinOp, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    TransferLine,
    TransferCycle,
    TransferComplete,
    TransferRegular,
    TeleportLine,
    TeleportCycle,
    TeleportComplete,
    TeleportRegular,
    VerifyAll,
    Certify,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::TransferLine => "transfer-line",
            Protocol::TransferCycle => "transfer-cycle",
            Protocol::TransferComplete => "transfer-complete",
            Protocol::TransferRegular => "transfer-regular",
            Protocol::TeleportLine => "teleport-line",
            Protocol::TeleportCycle => "teleport-cycle",
            Protocol::TeleportComplete => "teleport-complete",
            Protocol::TeleportRegular => "teleport-regular",
            Protocol::VerifyAll => "verify-all",
            Protocol::Certify => "certify",
        }
    }

    pub fn is_transfer(&self) -> bool {
        matches!(
            self,
            Protocol::TransferLine | Protocol::TransferCycle | Protocol::TransferComplete | Protocol::TransferRegular
        )
    }

    pub fn is_teleport(&self) -> bool {
        matches!(
            self,
            Protocol::TeleportLine | Protocol::TeleportCycle | Protocol::TeleportComplete | Protocol::TeleportRegular
        )
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Enumerate,
    Sample,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Structured,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    Explicit(Vec<Complex64>),
    Random { seed: u64 },
}

/// A coin operator forced onto one step, replacing the generated schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementOverride {
    pub step: usize,
    pub op: String,
}

impl PlacementOverride {
    /// Parses `STEP=OP`, e.g. `3=X`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (step, op) =
            text.split_once('=').ok_or_else(|| CliError::Config(format!("placement {text:?} is not STEP=OP")))?;
        let step: usize = step
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("placement step {step:?} is not a positive integer")))?;
        if step == 0 {
            return Err(CliError::Config("placement steps start at 1".into()));
        }
        Ok(PlacementOverride { step, op: op.trim().to_string() })
    }

    pub fn coin_op(&self, dim: usize) -> Result<CoinOp, CliError> {
        match self.op.as_str() {
            "I" => Ok(CoinOp::identity(dim)),
            "X" if dim == 2 => Ok(CoinOp::pauli_x()),
            "X" | "X_d" => Ok(CoinOp::cyclic_shift(dim)),
            "X_d^-1" | "Xinv" => Ok(CoinOp::cyclic_shift_inverse(dim)),
            "F" | "F_d" => Ok(CoinOp::fourier(dim)),
            other => {
                Err(CliError::Config(format!("unknown coin operator {other:?}; expected I, X, X_d, X_d^-1 or F_d")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub protocol: Protocol,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<u8>,
    pub input: InputSpec,
    pub seed: u64,
    pub mode: Mode,
    pub trace: bool,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub placements: Vec<PlacementOverride>,
    pub trials: usize,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: usize = 8;

impl RunConfig {
    pub fn new(protocol: Protocol) -> Self {
        RunConfig {
            protocol,
            d: None,
            n: None,
            x: None,
            t: None,
            method: None,
            input: InputSpec::Random { seed: DEFAULT_SEED },
            seed: DEFAULT_SEED,
            mode: Mode::Enumerate,
            trace: false,
            format: Format::Structured,
            out: None,
            placements: Vec::new(),
            trials: DEFAULT_TRIALS,
        }
    }

    pub fn need_d(&self) -> Result<usize, CliError> {
        self.d.ok_or_else(|| self.missing("--d"))
    }

    pub fn need_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| self.missing("--n"))
    }

    pub fn need_x(&self) -> Result<i64, CliError> {
        self.x.ok_or_else(|| self.missing("--target"))
    }

    pub fn need_t(&self) -> Result<usize, CliError> {
        self.t.ok_or_else(|| self.missing("--t"))
    }

    pub fn need_method(&self) -> Result<u8, CliError> {
        self.method.ok_or_else(|| self.missing("--method"))
    }

    fn missing(&self, flag: &str) -> CliError {
        CliError::Config(format!("{} needs {flag}", self.protocol))
    }
}

/// Parses `re,im` (or a bare real number).
pub fn parse_amplitude(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Config(format!("amplitude {text:?} is not RE,IM"));
    let mut parts = text.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// On-disk configuration.
///
/// ```toml
/// protocol = "transfer-regular"
///
/// [arena]
/// n = 9
/// d = 3
/// x = 4
///
/// [input]
/// amplitudes = [[0.6, 0.0], [0.0, 0.8]]   # or: random = true
/// seed = 7
///
/// [output]
/// mode = "enumerate"
/// trace = false
/// format = "structured"
/// path = "report.json"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub protocol: Option<Protocol>,
    #[serde(default)]
    pub arena: ArenaSection,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaSection {
    pub d: Option<usize>,
    pub n: Option<usize>,
    #[serde(alias = "target")]
    pub x: Option<i64>,
    pub t: Option<usize>,
    pub method: Option<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub random: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub mode: Option<Mode>,
    pub trace: Option<bool>,
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    /// `STEP=OP` overrides.
    #[serde(default)]
    pub place: Vec<String>,
    pub trials: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }

    /// Applies the file on top of the defaults for `protocol`.
    pub fn into_config(self, protocol: Option<Protocol>) -> Result<RunConfig, CliError> {
        let protocol = protocol.or(self.protocol).ok_or_else(|| CliError::Config("config names no protocol".into()))?;
        let mut cfg = RunConfig::new(protocol);
        cfg.d = self.arena.d;
        cfg.n = self.arena.n;
        cfg.x = self.arena.x;
        cfg.t = self.arena.t;
        cfg.method = self.arena.method;
        if let Some(seed) = self.input.seed {
            cfg.seed = seed;
        }
        cfg.input = match (self.input.amplitudes, self.input.random) {
            (Some(_), true) => return Err(CliError::Config("input gives both amplitudes and random = true".into())),
            (Some(a), false) => InputSpec::Explicit(a.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()),
            (None, _) => InputSpec::Random { seed: cfg.seed },
        };
        cfg.mode = self.output.mode.unwrap_or_default();
        cfg.trace = self.output.trace.unwrap_or(false);
        cfg.format = self.output.format.unwrap_or_default();
        cfg.out = self.output.path;
        cfg.placements = self.schedule.place.iter().map(|p| PlacementOverride::parse(p)).collect::<Result<_, _>>()?;
        if let Some(t) = self.schedule.trials {
            cfg.trials = t;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes() {
        assert_eq!(parse_amplitude("0.6,0").unwrap(), Complex64::new(0.6, 0.0));
        assert_eq!(parse_amplitude("-1e-3, 2").unwrap(), Complex64::new(-1e-3, 2.0));
        assert_eq!(parse_amplitude("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert!(parse_amplitude("a,b").is_err());
        assert!(parse_amplitude("1,2,3").is_err());
    }

    #[test]
    fn placement_syntax() {
        let p = PlacementOverride::parse("3=X").unwrap();
        assert_eq!(p, PlacementOverride { step: 3, op: "X".into() });
        assert_eq!(p.coin_op(2).unwrap(), CoinOp::pauli_x());
        assert_eq!(p.coin_op(3).unwrap(), CoinOp::cyclic_shift(3));
        assert!(PlacementOverride::parse("0=X").is_err());
        assert!(PlacementOverride::parse("X").is_err());
        assert!(PlacementOverride::parse("2=Q").unwrap().coin_op(2).is_err());
    }

    #[test]
    fn file_sections() {
        let text = r#"
protocol = "transfer-regular"
[arena]
n = 9
d = 3
x = 4
[input]
amplitudes = [[0.6, 0.0], [0.0, 0.8], [0.0, 0.0]]
[output]
trace = true
format = "csv"
"#;
        let cfg = ConfigFile::parse(text).unwrap().into_config(None).unwrap();
        assert_eq!(cfg.protocol, Protocol::TransferRegular);
        assert_eq!((cfg.n, cfg.d, cfg.x), (Some(9), Some(3), Some(4)));
        assert!(cfg.trace);
        assert_eq!(cfg.format, Format::Csv);
        assert!(matches!(cfg.input, InputSpec::Explicit(ref v) if v.len() == 3));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigFile::parse("protocol = \"certify\"\n[arena]\nq = 1\n").is_err());
        assert!(ConfigFile::parse("").unwrap().into_config(None).is_err());
    }
}
