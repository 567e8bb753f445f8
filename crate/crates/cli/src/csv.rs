//! CSV emission: `#` metadata lines, a header row, LF line endings and
//! numbers at 12 significant digits.

use std::fmt::Write;

use crate::config::{RunConfig, ECHO_PREFIX};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const UNITS: &str = "dimensionless: tau = omega_c t, omega_c = 1, mode frequency 1/x, theta = k_B T / (hbar omega_c)";

pub const COLUMNS: [&str; 7] = ["tau", "gamma", "delta", "big_gamma", "delta_gamma", "s_nm", "s_markov"];

/// Scientific notation with 12 significant digits. Negative zero prints as
/// zero so sign noise never changes the bytes.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.11e}")
}

#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(command: &str) -> Self {
        let mut c = Csv::default();
        c.comment(&format!("nmchan {VERSION} {command}"));
        c.comment(&format!("units: {UNITS}"));
        c
    }

    pub fn comment(&mut self, text: &str) {
        for line in text.lines() {
            let _ = writeln!(self.buf, "# {line}");
        }
    }

    pub fn config(&mut self, cfg: &RunConfig) {
        for line in cfg.echo().lines() {
            let _ = writeln!(self.buf, "{ECHO_PREFIX}{line}");
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(f.as_ref());
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
