use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nmchan_core::channel::{max_step, ChannelState};
use nmchan_core::gaussian::{assemble, make_twb, SymplecticForm};
use nmchan_core::separability::{
    markov_separability_time, s_exact, s_high_t, s_markovian, trace_and_analyze, ExtremumKind, SeparabilityTime,
    SeparabilityTrace, BOUNDARY_BAND,
};
use nmchan_core::ReservoirSpec;
use rayon::prelude::*;

use crate::config::{Mode, RunConfig};
use crate::csv::{num, Csv, COLUMNS};
use crate::error::{CliError, Result};

/// Channel for the configured mode. Non-Markovian tables are sampled at
/// least as finely as the mode oscillation requires, whatever the output step.
fn channel(cfg: &RunConfig, mode: Mode) -> Result<ChannelState> {
    let spec = cfg.reservoir()?;
    let table_step = match mode {
        Mode::Markovian => cfg.step,
        _ => cfg.step.min(max_step(spec.x())),
    };
    Ok(ChannelState::build(spec, mode.channel_mode(), cfg.tau_max, table_step)?)
}

/// `S(τ)` of the twin beam under `ch`, clamped onto the table range.
fn separability_fn(ch: &ChannelState, r: f64, tau_max: f64) -> impl Fn(f64) -> f64 + '_ {
    move |t| {
        let c = ch
            .coefficients(t.clamp(0.0, tau_max))
            .expect("tau clamped into the table range");
        s_exact(r, c.big_gamma, c.delta_gamma)
    }
}

pub fn coeffs(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let ch = channel(cfg, cfg.mode)?;
    let mut out = Csv::new("coeffs");
    out.config(cfg);
    out.comment("s_nm and s_markov are left empty by coeffs");
    out.row(&COLUMNS);
    for tau in cfg.grid() {
        let c = ch.coefficients(tau)?;
        out.row(&[num(tau), num(c.gamma), num(c.delta), num(c.big_gamma), num(c.delta_gamma), String::new(), String::new()]);
    }
    Ok(out.finish())
}

#[derive(Debug, Clone)]
pub struct TraceOutput {
    pub csv: String,
    pub summary: String,
    pub nm: SeparabilityTrace,
    pub markov: SeparabilityTrace,
}

fn describe(label: &str, tr: &SeparabilityTrace, tau_max: f64) -> String {
    let mut s = format!("{label}:\n");
    if tr.crossings.is_empty() {
        s += "  crossings: none\n";
    } else {
        let list: Vec<String> = tr
            .crossings
            .iter()
            .map(|c| format!("{:?} at {}", c.direction, num(c.tau)).to_lowercase())
            .collect();
        s += &format!("  crossings: {}\n", list.join(", "));
    }
    match tr.separability_time {
        Some(t) => s += &format!("  separability time: {}\n", num(t)),
        None => s += &format!("  separability time: none in window [0,{tau_max}]\n"),
    }
    if tr.revivals.is_empty() {
        s += "  revivals: none\n";
    } else {
        let list: Vec<String> = tr.revivals.iter().map(|(a, b)| format!("[{}, {}]", num(*a), num(*b))).collect();
        s += &format!("  revivals: {}\n", list.join(", "));
    }
    let maxima = tr.extrema.iter().filter(|e| e.kind == ExtremumKind::Max).count();
    s += &format!(
        "  extrema: {} ({maxima} max, {} min)",
        tr.extrema.len(),
        tr.extrema.len() - maxima
    );
    let spacings: Vec<f64> = [ExtremumKind::Max, ExtremumKind::Min]
        .iter()
        .flat_map(|&k| tr.extremum_spacings(k))
        .collect();
    if !spacings.is_empty() {
        s += &format!(", mean same-kind spacing {}", num(spacings.iter().sum::<f64>() / spacings.len() as f64));
    }
    s.push('\n');
    s
}

pub fn trace(cfg: &RunConfig) -> Result<TraceOutput> {
    cfg.validate()?;
    let ch = channel(cfg, cfg.mode)?;
    let mk = channel(cfg, Mode::Markovian)?;
    let s_nm = separability_fn(&ch, cfg.r, cfg.tau_max);
    let s_m = separability_fn(&mk, cfg.r, cfg.tau_max);
    let nm = trace_and_analyze(&s_nm, cfg.tau_max, cfg.step)?;
    let markov = trace_and_analyze(&s_m, cfg.tau_max, cfg.step)?;

    let s0 = assemble(&make_twb(cfg.r)?)?;
    let mut min_margin = f64::INFINITY;
    let mut unphysical = None;

    let mut out = Csv::new("trace");
    out.config(cfg);
    out.row(&COLUMNS);
    for tau in cfg.grid() {
        let c = ch.coefficients(tau)?;
        match ch.evolve(&s0, tau, cfg.rotation) {
            Ok(s) => min_margin = min_margin.min(s.symplectic_margin(SymplecticForm::Physicality)),
            Err(e) => {
                unphysical.get_or_insert((tau, e.to_string()));
            }
        }
        out.row(&[
            num(tau),
            num(c.gamma),
            num(c.delta),
            num(c.big_gamma),
            num(c.delta_gamma),
            num(s_exact(cfg.r, c.big_gamma, c.delta_gamma)),
            num(s_m(tau)),
        ]);
    }

    let start = s_nm(0.0);
    let mut summary = String::new();
    summary += &format!(
        "initial state: S(0) = {} ({})\n",
        num(start),
        if start.abs() <= BOUNDARY_BAND {
            "on the separability boundary"
        } else if start < 0.0 {
            "entangled"
        } else {
            "separable"
        }
    );
    summary += &describe(&format!("non-markovian ({})", cfg.mode), &nm, cfg.tau_max);
    summary += &describe("markovian", &markov, cfg.tau_max);
    summary += &match unphysical {
        None => format!(
            "physicality: min symplectic margin {} over {} evolved states (rotation {})\n",
            num(min_margin),
            cfg.grid().len(),
            if cfg.rotation { "on" } else { "off" }
        ),
        Some((tau, e)) => format!("physicality: violated first at tau = {} ({e})\n", num(tau)),
    };
    out.comment("summary");
    out.comment(&summary);
    Ok(TraceOutput {
        csv: out.finish(),
        summary,
        nm,
        markov,
    })
}

/// Non-Markovian first up-crossing inside the window and the Markovian
/// closed-form time.
pub fn separability_times(cfg: &RunConfig) -> Result<(Option<f64>, SeparabilityTime)> {
    cfg.validate()?;
    if cfg.r <= 0.0 {
        return Err(CliError::config(format!("separability time needs r > 0 (got {})", cfg.r)));
    }
    let ch = channel(cfg, cfg.mode)?;
    let tr = trace_and_analyze(separability_fn(&ch, cfg.r, cfg.tau_max), cfg.tau_max, cfg.step)?;
    let markov = markov_separability_time(&cfg.reservoir()?, cfg.r)?;
    Ok((tr.separability_time, markov))
}

fn nm_text(t: Option<f64>) -> String {
    t.map_or_else(|| "none".into(), num)
}

fn markov_text(t: SeparabilityTime) -> String {
    match t {
        SeparabilityTime::Finite(t) => num(t),
        SeparabilityTime::Infinite => "infinite".into(),
    }
}

pub fn septime(cfg: &RunConfig) -> Result<String> {
    let (nm, markov) = separability_times(cfg)?;
    let nm = match nm {
        Some(t) => num(t),
        None => format!("no separation before tau_max = {}", cfg.tau_max),
    };
    Ok(format!(
        "tau_s non-markovian ({}): {nm}; markovian: {}\n",
        cfg.mode,
        markov_text(markov)
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Theta,
    R,
    Alpha2,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Theta => "theta",
            Axis::R => "r",
            Axis::Alpha2 => "alpha2",
        })
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "theta" => Ok(Axis::Theta),
            "r" => Ok(Axis::R),
            "alpha2" => Ok(Axis::Alpha2),
            _ => Err(CliError::config(format!("unknown sweep axis {s:?} (expected x, theta, r or alpha2)"))),
        }
    }
}

impl Axis {
    pub fn apply(self, cfg: &RunConfig, v: f64) -> RunConfig {
        let mut c = cfg.clone();
        match self {
            Axis::X => c.x = v,
            Axis::Theta => c.theta = v,
            Axis::R => c.r = v,
            Axis::Alpha2 => c.alpha2 = v,
        }
        c
    }
}

pub fn sweep(cfg: &RunConfig, axis: Axis, values: &[f64]) -> Result<String> {
    if values.is_empty() {
        return Err(CliError::config("sweep needs at least one value"));
    }
    let rows: Vec<_> = values
        .par_iter()
        .map(|&v| separability_times(&axis.apply(cfg, v)))
        .collect();

    let mut out = Csv::new("sweep");
    out.config(cfg);
    out.comment(&format!("sweep axis: {axis}; tau_s_nm = none means no separation before tau_max"));
    out.row(&[axis.to_string().as_str(), "tau_s_nm", "tau_s_markov", "ratio", "status"]);
    for (&v, row) in values.iter().zip(rows) {
        match row {
            Ok((nm, markov)) => {
                let ratio = match (nm, markov) {
                    (Some(a), SeparabilityTime::Finite(b)) => num(a / b),
                    _ => String::new(),
                };
                out.row(&[num(v), nm_text(nm), markov_text(markov), ratio, "ok".into()]);
            }
            Err(e) => {
                let status = match e {
                    CliError::Config(m) => format!("invalid: {m}"),
                    other => format!("error: {other}"),
                };
                let status = status.replace([',', '\n'], ";");
                out.row(&[num(v), String::new(), String::new(), String::new(), status]);
            }
        }
    }
    Ok(out.finish())
}

pub const FIG1_ALPHA2: f64 = 0.01;
pub const FIG1_THETA: f64 = 100.0;
pub const FIG1_R: f64 = 0.1;
pub const FIG1_STEP: f64 = 1e-3;
pub const FIG1_PANELS: [(&str, f64); 2] = [("fig1_top.csv", 10.0), ("fig1_bottom.csv", 0.01)];

/// One panel: high-temperature and Markovian separability functions on
/// `τ ∈ [0, 1]`.
pub fn fig1_panel(x: f64) -> Result<String> {
    let spec = ReservoirSpec::new(FIG1_ALPHA2, x, FIG1_THETA)?;
    let cfg = RunConfig {
        alpha2: FIG1_ALPHA2,
        x,
        theta: FIG1_THETA,
        r: FIG1_R,
        mode: Mode::HighT,
        tau_max: 1.0,
        step: FIG1_STEP,
        ..Default::default()
    };
    let mut out = Csv::new("fig1");
    out.config(&cfg);
    out.row(&["tau", "s_nm_highT", "s_markov"]);
    for tau in cfg.grid() {
        out.row(&[num(tau), num(s_high_t(&spec, FIG1_R, tau)), num(s_markovian(&spec, FIG1_R, tau))]);
    }
    Ok(out.finish())
}

pub fn fig1(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    FIG1_PANELS
        .iter()
        .map(|&(name, x)| {
            let path = dir.join(name);
            fs::write(&path, fig1_panel(x)?).map_err(|e| CliError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Writes to `output_path`, or stdout when it is `-`.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    if cfg.output_path == "-" {
        let mut stdout = std::io::stdout().lock();
        return match stdout.write_all(text.as_bytes()) {
            // a closed pipe (`| head`) is not a failure of the run
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
            _ => Ok(()),
        };
    }
    let path = Path::new(&cfg.output_path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
