use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use super::Derived;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Settings for a convergence run. Keys in files and flags: `alpha`, `c`,
/// `L`, `nlist`, `window`, `grid`, `tol`, `x_max`, `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub c: f64,
    pub l: f64,
    pub n_list: Vec<usize>,
    pub window: (f64, f64),
    pub grid: usize,
    pub tol: f64,
    pub x_max: f64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha: 0.0,
            c: 1.0,
            l: 0.0,
            n_list: vec![20, 40, 60],
            window: (0.5, 4.0),
            grid: 25,
            tol: 1e-10,
            x_max: 60.0,
            out: PathBuf::from("out"),
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::BadValue { key: key.into(), value: value.into() })
}

impl ExperimentConfig {
    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: format!("expected key = value, got `{line}`") })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.into(), value: value.into() };
        match key {
            "alpha" => self.alpha = number(key, value)?,
            "c" => self.c = number(key, value)?,
            "L" => self.l = number(key, value)?,
            "tol" => self.tol = number(key, value)?,
            "x_max" => self.x_max = number(key, value)?,
            "grid" => self.grid = value.parse().map_err(|_| bad())?,
            "out" => self.out = PathBuf::from(value),
            "nlist" => {
                self.n_list = value
                    .split(',')
                    .map(|v| v.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad())?
            }
            "window" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 2 {
                    return Err(bad());
                }
                self.window = (number(key, parts[0])?, number(key, parts[1])?);
            }
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if !(self.alpha > -1.0) {
            return fail(format!("alpha must exceed -1, got {}", self.alpha));
        }
        if !(self.c > 0.0) {
            return fail(format!("c must be positive, got {}", self.c));
        }
        if !(self.window.0 > 0.0 && self.window.1 > self.window.0) {
            return fail(format!("window must satisfy 0 < x_lo < x_hi, got {:?}", self.window));
        }
        if self.window.1 > self.x_max / 2.0 {
            return fail(format!("window end {} beyond x_max / 2", self.window.1));
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return fail(format!("nlist must be positive and increasing, got {:?}", self.n_list));
        }
        if self.grid < 2 {
            return fail(format!("grid must be at least 2, got {}", self.grid));
        }
        if !(self.tol > 0.0) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.x_max >= 30.0) {
            return fail(format!("x_max must be at least 30, got {}", self.x_max));
        }
        Ok(())
    }

    pub fn derived(&self, n: usize, c1: f64) -> Derived {
        let nf = n as f64;
        Derived { n, big_n: nf / (1.0 + self.l * nf.powf(-2.0 / 3.0)), scale: (c1 * nf).powf(2.0 / 3.0) }
    }

    /// Equally spaced points covering the window, ends included.
    pub fn window_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.window;
        (0..self.grid).map(|k| lo + (hi - lo) * k as f64 / (self.grid - 1) as f64).collect()
    }

    /// `key = value` lines for every setting plus the derived quantities.
    pub fn echo(&self, c1: Option<f64>, c2: Option<f64>) -> String {
        let mut s = String::new();
        let list: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        let _ = writeln!(s, "c = {:?}", self.c);
        let _ = writeln!(s, "L = {:?}", self.l);
        let _ = writeln!(s, "nlist = {}", list.join(","));
        let _ = writeln!(s, "window = {:?},{:?}", self.window.0, self.window.1);
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "x_max = {:?}", self.x_max);
        let _ = writeln!(s, "out = {}", self.out.display());
        if let (Some(c1), Some(c2)) = (c1, c2) {
            let _ = writeln!(s, "# c1 = {c1:.16e}");
            let _ = writeln!(s, "# c2 = {c2:.16e}");
            let _ = writeln!(s, "# s = {:.16e}", c2 * self.l);
            for &n in &self.n_list {
                let d = self.derived(n, c1);
                let _ = writeln!(s, "# n = {n}: N = {:.16e}, scale = {:.16e}", d.big_n, d.scale);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let text = "# run\nalpha = 0.5\nL=1 # shift\nnlist = 10, 20,30\nwindow = 0.25,3\n\nout = /tmp/x\n";
        let c = ExperimentConfig::parse_str(text).unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.l, 1.0);
        assert_eq!(c.n_list, vec![10, 20, 30]);
        assert_eq!(c.window, (0.25, 3.0));
        assert_eq!(c.out, PathBuf::from("/tmp/x"));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(ExperimentConfig::parse_str("alpha 1"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(ExperimentConfig::parse_str("beta = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ExperimentConfig::parse_str("alpha = x"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(ExperimentConfig::parse_str("window = 1"), Err(ConfigError::BadValue { .. })));
        for text in ["nlist = 40,20", "window = 0,2", "alpha = -1", "grid = 1", "window = 1,40"] {
            assert!(ExperimentConfig::parse_str(text).unwrap().validate().is_err(), "{text}");
        }
    }

    #[test]
    fn echo_round_trips() {
        let mut c = ExperimentConfig::default();
        c.set("L", "0.3").unwrap();
        let back = ExperimentConfig::parse_str(&c.echo(Some(0.5), Some(1.2))).unwrap();
        assert_eq!(back, c);
    }
}
