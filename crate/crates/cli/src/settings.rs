//! Merged run settings: a flat key=value config file overlaid by
//! command-line flags, echoed verbatim into every report so a run can
//! be reproduced from its own output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

/// Smallest tolerance any command accepts; below this the quadrature
/// cannot honour the request and the run is refused.
pub const MIN_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad grammar, or inputs the computation refuses.
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

/// Map a library error to an input-class CLI error.
pub fn lib_err(e: valdisc::VdError) -> CliError {
    CliError::Input(e.to_string())
}

/// Flat string-to-string settings store. Keys mirror the long flag
/// names (kebab-case). Lookup order: command-line flag, then config
/// file, then the command's documented default.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parse a flat `key = value` file: one pair per line, `#` starts a
    /// comment, blank lines ignored.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return input_err(format!("cannot read {}: {e}", path.display())),
        };
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return input_err(format!(
                    "{}:{}: expected key=value, got {raw:?}",
                    path.display(),
                    lineno + 1
                ));
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Settings { values })
    }

    /// Overlay a flag value (flags beat the file).
    pub fn set_flag(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v);
        }
    }

    /// Overlay a boolean switch; only its presence is recorded, so a
    /// file-set `true` cannot be switched back off from the command line.
    pub fn set_switch(&mut self, key: &str, on: bool) {
        if on {
            self.values.insert(key.to_string(), "true".to_string());
        }
    }

    /// Record a default so the echoed config shows the effective value.
    pub fn set_default(&mut self, key: &str, value: impl Into<String>) {
        self.values.entry(key.to_string()).or_insert_with(|| value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        match self.get(key) {
            Some(v) => Ok(v),
            None => input_err(format!("missing required setting --{key}")),
        }
    }

    pub fn get_f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => input_err(format!("--{key}: expected a finite number, got {s:?}")),
            },
        }
    }

    pub fn get_u64(&self, key: &str) -> CliResult<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => match s.parse::<u64>() {
                Ok(v) => Ok(Some(v)),
                Err(_) => input_err(format!("--{key}: expected a nonnegative integer, got {s:?}")),
            },
        }
    }

    pub fn get_usize(&self, key: &str) -> CliResult<Option<usize>> {
        Ok(self.get_u64(key)?.map(|v| v as usize))
    }

    pub fn get_bool(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(s) => input_err(format!("--{key}: expected true/false, got {s:?}")),
        }
    }

    /// Verdict tolerance: command default unless overridden; never
    /// below [`MIN_TOL`].
    pub fn tolerance(&mut self, default: f64) -> CliResult<f64> {
        self.set_default("tol", format_float(default));
        let t = self.get_f64("tol")?.unwrap_or(default);
        if t < MIN_TOL {
            return input_err(format!("--tol {t:e} is below the minimum {MIN_TOL:e}"));
        }
        Ok(t)
    }

    /// Seed is recorded in every report even when unused.
    pub fn seed(&mut self) -> CliResult<u64> {
        self.set_default("seed", "0");
        Ok(self.get_u64("seed")?.unwrap_or(0))
    }

    /// A single sampling radius, strictly inside the unit disc.
    pub fn radius(&mut self, default: Option<f64>) -> CliResult<f64> {
        if let Some(d) = default {
            self.set_default("r", format_float(d));
        }
        let r = match self.get_f64("r")? {
            Some(v) => v,
            None => return input_err("missing required setting --r"),
        };
        check_radius(r)?;
        Ok(r)
    }

    /// Comma-separated radii, each strictly inside the unit disc.
    pub fn radius_grid(&mut self, default: &str) -> CliResult<Vec<f64>> {
        self.set_default("r-grid", default);
        let raw = self.require("r-grid")?.to_string();
        let mut grid = Vec::new();
        for part in raw.split(',') {
            let p = part.trim();
            if p.is_empty() {
                continue;
            }
            let r: f64 = match p.parse() {
                Ok(v) => v,
                Err(_) => return input_err(format!("--r-grid: bad radius {p:?}")),
            };
            check_radius(r)?;
            grid.push(r);
        }
        if grid.is_empty() {
            return input_err("--r-grid: needs at least one radius");
        }
        Ok(grid)
    }

    /// Either `--r` or `--r-grid`, normalized to a grid.
    pub fn radius_or_grid(&mut self, default_grid: &str) -> CliResult<Vec<f64>> {
        if self.get("r").is_some() {
            let r = self.radius(None)?;
            Ok(vec![r])
        } else {
            self.radius_grid(default_grid)
        }
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

pub fn check_radius(r: f64) -> CliResult<()> {
    if !(r > 0.0 && r < 1.0) {
        return input_err(format!("radius {r} must lie strictly between 0 and 1"));
    }
    Ok(())
}

/// Stable float formatting for the echoed config.
pub fn format_float(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else if x == x.trunc() {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}
