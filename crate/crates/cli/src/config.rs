//! Run configuration: flat `key = value` files, flag overrides and the echo
//! written into every CSV.

use std::fmt;
use std::str::FromStr;

use nmchan_core::channel::ChannelMode;
use nmchan_core::ReservoirSpec;

use crate::error::{CliError, Result};

/// Prefix of the config echo lines in emitted CSV files.
pub const ECHO_PREFIX: &str = "# config ";

pub const KEYS: [&str; 9] = ["alpha2", "x", "theta", "r", "mode", "tau_max", "step", "rotation", "output_path"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    HighT,
    Markovian,
}

impl Mode {
    pub fn channel_mode(self) -> ChannelMode {
        match self {
            Mode::Exact => ChannelMode::NonMarkovianExact,
            Mode::HighT => ChannelMode::NonMarkovianHighT,
            Mode::Markovian => ChannelMode::Markovian,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::HighT => "high_T",
            Mode::Markovian => "markovian",
        })
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "high_t" | "hight" => Ok(Mode::HighT),
            "markovian" | "markov" => Ok(Mode::Markovian),
            _ => Err(CliError::config(format!("unknown mode {s:?} (expected exact, high_T or markovian)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha2: f64,
    pub x: f64,
    pub theta: f64,
    pub r: f64,
    pub mode: Mode,
    pub tau_max: f64,
    pub step: f64,
    pub rotation: bool,
    /// `-` writes to stdout.
    pub output_path: String,
}

impl Default for RunConfig {
    /// Reference parameters with x = 10.
    fn default() -> Self {
        Self {
            alpha2: 0.01,
            x: 10.0,
            theta: 100.0,
            r: 0.1,
            mode: Mode::HighT,
            tau_max: 1.0,
            step: 1e-3,
            rotation: false,
            output_path: "-".into(),
        }
    }
}

/// Values given on the command line; each one wins over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha2: Option<f64>,
    pub x: Option<f64>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub mode: Option<Mode>,
    pub tau_max: Option<f64>,
    pub step: Option<f64>,
    pub rotation: Option<bool>,
    pub output_path: Option<String>,
}

fn parse_real(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| CliError::config(format!("{key}: cannot parse {v:?} as a number")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::config(format!("{key}: cannot parse {v:?} as a flag"))),
    }
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are skipped; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`, got {raw:?}", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(CliError::config(format!("line {}: duplicate key {key}", n + 1)));
            }
            cfg.set(key, value)
                .map_err(|e| CliError::config(format!("line {}: {}", n + 1, strip(e))))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    /// Recovers the configuration from the echo block of an emitted CSV.
    pub fn from_echo(csv: &str) -> Result<Self> {
        let body: String = csv
            .lines()
            .filter_map(|l| l.strip_prefix(ECHO_PREFIX))
            .map(|l| format!("{l}\n"))
            .collect();
        if body.is_empty() {
            return Err(CliError::config("no config echo found"));
        }
        Self::parse(&body)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "alpha2" => self.alpha2 = parse_real(key, value)?,
            "x" => self.x = parse_real(key, value)?,
            "theta" => self.theta = parse_real(key, value)?,
            "r" => self.r = parse_real(key, value)?,
            "mode" => self.mode = value.parse()?,
            "tau_max" => self.tau_max = parse_real(key, value)?,
            "step" => self.step = parse_real(key, value)?,
            "rotation" => self.rotation = parse_bool(key, value)?,
            "output_path" => self.output_path = value.to_string(),
            _ => return Err(CliError::config(format!("unknown key {key:?} (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        macro_rules! over {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        over!(alpha2, x, theta, r, mode, tau_max, step, rotation, output_path);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.reservoir()?;
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(CliError::config(format!("r must be non-negative (got {})", self.r)));
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(CliError::config(format!("tau_max must be positive (got {})", self.tau_max)));
        }
        if !(self.step > 0.0 && self.step < self.tau_max) {
            return Err(CliError::config(format!(
                "step must satisfy 0 < step < tau_max (got step {}, tau_max {})",
                self.step, self.tau_max
            )));
        }
        if self.output_path.is_empty() {
            return Err(CliError::config("output_path is empty"));
        }
        Ok(())
    }

    pub fn reservoir(&self) -> Result<ReservoirSpec> {
        Ok(ReservoirSpec::new(self.alpha2, self.x, self.theta)?)
    }

    /// `key = value` lines in field order. Reals use the shortest form that
    /// parses back to the same value.
    pub fn echo(&self) -> String {
        format!(
            "alpha2 = {}\nx = {}\ntheta = {}\nr = {}\nmode = {}\ntau_max = {}\nstep = {}\nrotation = {}\noutput_path = {}\n",
            self.alpha2, self.x, self.theta, self.r, self.mode, self.tau_max, self.step, self.rotation, self.output_path
        )
    }

    /// Output grid `τ_i = i·step`, `floor(tau_max/step) + 1` points.
    pub fn grid(&self) -> Vec<f64> {
        let n = (self.tau_max / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| (i as f64 * self.step).min(self.tau_max)).collect()
    }
}

fn strip(e: CliError) -> String {
    match e {
        CliError::Config(m) => m,
        other => other.to_string(),
    }
}
