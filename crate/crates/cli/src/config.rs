//! Run configuration: built-in defaults, a `key = value` file, a `--params`
//! list and explicit flags, merged in that order of increasing priority.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use fuzzybox_core::{Geometry, QuantizationParams};

use crate::CliError;

/// Every setting that can be given on the command line or in a file.
/// `None` means "use the subcommand default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub half_line: Option<bool>,
    pub ell: Option<f64>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub q0: Option<f64>,
    pub grid_h: Option<f64>,
    pub out: Option<PathBuf>,
    /// momentum in units of ℏ/q0
    pub p: Option<f64>,
    /// start position or probe centre
    pub q: Option<f64>,
    pub width: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_step: Option<f64>,
    pub levels: Option<usize>,
}

pub const KEYS: [&str; 20] = [
    "a",
    "b",
    "half_line",
    "ell",
    "hbar",
    "mass",
    "q0",
    "grid_h",
    "p",
    "q",
    "width",
    "t_end",
    "dt",
    "stride",
    "x_min",
    "x_max",
    "c_min",
    "c_max",
    "c_step",
    "levels",
];

fn number(key: &str, raw: &str) -> Result<f64, CliError> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn count(key: &str, raw: &str) -> Result<usize, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: '{raw}' is not a non-negative integer")))
}

fn boolean(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(CliError::Config(format!(
            "{key}: '{other}' is not a boolean"
        ))),
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "a" => self.a = Some(number(&key, raw)?),
            "b" => self.b = Some(number(&key, raw)?),
            "half_line" => self.half_line = Some(boolean(&key, raw)?),
            "ell" => self.ell = Some(number(&key, raw)?),
            "hbar" => self.hbar = Some(number(&key, raw)?),
            "mass" | "m" => self.mass = Some(number(&key, raw)?),
            "q0" => self.q0 = Some(number(&key, raw)?),
            "grid_h" => self.grid_h = Some(number(&key, raw)?),
            "out" => self.out = Some(PathBuf::from(raw.trim())),
            "p" => self.p = Some(number(&key, raw)?),
            "q" => self.q = Some(number(&key, raw)?),
            "width" => self.width = Some(number(&key, raw)?),
            "t_end" => self.t_end = Some(number(&key, raw)?),
            "dt" => self.dt = Some(number(&key, raw)?),
            "stride" => self.stride = Some(count(&key, raw)?),
            "x_min" => self.x_min = Some(number(&key, raw)?),
            "x_max" => self.x_max = Some(number(&key, raw)?),
            "c_min" => self.c_min = Some(number(&key, raw)?),
            "c_max" => self.c_max = Some(number(&key, raw)?),
            "c_step" => self.c_step = Some(number(&key, raw)?),
            "levels" => self.levels = Some(count(&key, raw)?),
            other => return Err(CliError::Config(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key=value` pairs separated by commas.
    pub fn from_params(list: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for item in list.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--params entry '{item}' is not key=value"))
            })?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// Parses a file of `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut s = Settings::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    no + 1
                ))
            })?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            half_line: over.half_line.or(self.half_line),
            ell: over.ell.or(self.ell),
            hbar: over.hbar.or(self.hbar),
            mass: over.mass.or(self.mass),
            q0: over.q0.or(self.q0),
            grid_h: over.grid_h.or(self.grid_h),
            out: over.out.or(self.out),
            p: over.p.or(self.p),
            q: over.q.or(self.q),
            width: over.width.or(self.width),
            t_end: over.t_end.or(self.t_end),
            dt: over.dt.or(self.dt),
            stride: over.stride.or(self.stride),
            x_min: over.x_min.or(self.x_min),
            x_max: over.x_max.or(self.x_max),
            c_min: over.c_min.or(self.c_min),
            c_max: over.c_max.or(self.c_max),
            c_step: over.c_step.or(self.c_step),
            levels: over.levels.or(self.levels),
        }
    }

    fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
        match v {
            Some(x) if x <= 0.0 => Err(CliError::Config(format!(
                "{name} must be positive, got {x}"
            ))),
            _ => Ok(()),
        }
    }

    /// Checks the settings that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("ell", self.ell),
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("q0", self.q0),
            ("grid_h", self.grid_h),
            ("width", self.width),
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("c_step", self.c_step),
        ] {
            Self::positive(name, v)?;
        }
        if self.stride == Some(0) {
            return Err(CliError::Config("stride must be at least 1".into()));
        }
        if let (Some(a), Some(b)) = (self.a, self.b) {
            if self.half_line != Some(true) && b <= a {
                return Err(CliError::Config(format!(
                    "need a < b, got a = {a}, b = {b}"
                )));
            }
        }
        if self.half_line == Some(true) && self.b.is_some() {
            return Err(CliError::Config(
                "b cannot be combined with half_line".into(),
            ));
        }
        if let (Some(lo), Some(hi)) = (self.x_min, self.x_max) {
            if hi <= lo {
                return Err(CliError::Config(format!(
                    "need x_min < x_max, got [{lo}, {hi}]"
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (self.c_min, self.c_max) {
            if hi < lo {
                return Err(CliError::Config(format!(
                    "need c_min ≤ c_max, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn hbar(&self) -> f64 {
        self.hbar.unwrap_or(1.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass.unwrap_or(1.0)
    }

    pub fn q0(&self) -> f64 {
        self.q0.unwrap_or(1.0)
    }

    /// Lengths in units of `q0`.
    pub fn len(&self, v: f64) -> f64 {
        v * self.q0()
    }

    /// Sweep over `ell`, or the single configured value.
    pub fn ells(&self, default: &[f64]) -> Vec<f64> {
        match self.ell {
            Some(e) => vec![e],
            None => default.iter().map(|&e| self.len(e)).collect(),
        }
    }

    /// Sweep over the left endpoint, or the single configured value.
    pub fn lefts(&self, default: &[f64]) -> Vec<f64> {
        match self.a {
            Some(a) => vec![a],
            None => default.iter().map(|&a| self.len(a)).collect(),
        }
    }

    /// Geometry for a left endpoint `a`; `b` defaults to `a + 10 q0`.
    pub fn geometry(&self, a: f64) -> Result<Geometry, CliError> {
        let g = if self.half_line == Some(true) {
            Geometry::half_line(a)
        } else {
            Geometry::bounded(a, self.b.unwrap_or(a + self.len(10.0)))
        };
        g.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self, ell: f64) -> Result<QuantizationParams, CliError> {
        QuantizationParams::with_unit(ell, self.hbar(), self.mass(), self.q0())
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Resolved key/value listing for CSV metadata, in fixed key order. The
/// output location is left out so that runs into different directories
/// produce identical files.
pub struct Resolved<'a>(pub &'a Settings);

impl fmt::Display for Resolved<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let num = |v: Option<f64>| v.map_or("default".to_string(), fuzzybox_core::banded::fmt_f64);
        let cnt = |v: Option<usize>| v.map_or("default".to_string(), |n| n.to_string());
        let values = [
            num(s.a),
            num(s.b),
            s.half_line.map_or("default".to_string(), |v| v.to_string()),
            num(s.ell),
            num(Some(s.hbar())),
            num(Some(s.mass())),
            num(Some(s.q0())),
            num(s.grid_h),
            num(s.p),
            num(s.q),
            num(s.width),
            num(s.t_end),
            num(s.dt),
            cnt(s.stride),
            num(s.x_min),
            num(s.x_max),
            num(s.c_min),
            num(s.c_max),
            num(s.c_step),
            cnt(s.levels),
        ];
        for (k, v) in KEYS.iter().zip(values) {
            writeln!(f, "# {k} = {v}")?;
        }
        Ok(())
    }
}
