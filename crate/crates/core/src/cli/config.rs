use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

/// Subcommand selected for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RabiFreq,
    Evolve,
    FitShift,
    BesselApprox,
    IdentitySweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RabiFreq => "rabi-freq",
            Command::Evolve => "evolve",
            Command::FitShift => "fit-shift",
            Command::BesselApprox => "bessel-approx",
            Command::IdentitySweep => "identity-sweep",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "rabi-freq" => Command::RabiFreq,
            "evolve" => Command::Evolve,
            "fit-shift" => Command::FitShift,
            "bessel-approx" => Command::BesselApprox,
            "identity-sweep" => Command::IdentitySweep,
            _ => return Err(format!("unknown command {s:?}")),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Problems found while validating a configuration, reported together.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0.join("; "))
    }
}

impl std::error::Error for ConfigErrors {}

/// A command plus flat `key = value` parameters. Values stay textual until a
/// command asks for them; every key that is read (including defaults) is
/// recorded so the resolved configuration can be echoed into the output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, params: BTreeMap::new() }
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// ignored. Later keys override earlier ones.
    pub fn parse(command: Command, text: &str) -> Result<Self, ConfigErrors> {
        let mut cfg = RunConfig::new(command);
        let mut errors = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match cfg.set_pair(line) {
                Ok(()) => {}
                Err(e) => errors.push(format!("line {}: {e}", lineno + 1)),
            }
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), String> {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("expected key=value, got {pair:?}"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("invalid key {k:?}"));
        }
        self.params.insert(k.to_string(), v.to_string());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }
}

/// Typed reads from a [`RunConfig`], collecting every problem instead of
/// stopping at the first.
pub(crate) struct Reader<'a> {
    cfg: &'a RunConfig,
    resolved: BTreeMap<String, String>,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Reader { cfg, resolved: BTreeMap::new(), errors: Vec::new() }
    }

    fn raw(&mut self, key: &str, default: Option<&str>) -> Option<String> {
        match self.cfg.get(key).or(default) {
            Some(v) => {
                self.resolved.insert(key.to_string(), v.to_string());
                Some(v.to_string())
            }
            None => {
                self.errors.push(format!("missing `{key}`"));
                None
            }
        }
    }

    pub fn error(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    pub fn has(&self, key: &str) -> bool {
        self.cfg.get(key).is_some()
    }

    fn parsed<T: FromStr>(&mut self, key: &str, default: Option<&str>, what: &str) -> Option<T> {
        let v = self.raw(key, default)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!("`{key}` must be {what}, got {v:?}"));
                None
            }
        }
    }

    pub fn real(&mut self, key: &str, default: Option<&str>) -> Option<f64> {
        let x: f64 = self.parsed(key, default, "a real number")?;
        if !x.is_finite() {
            self.errors.push(format!("`{key}` must be finite"));
            return None;
        }
        Some(x)
    }

    pub fn nonneg(&mut self, key: &str, default: Option<&str>) -> Option<f64> {
        let x = self.real(key, default)?;
        if x < 0.0 {
            self.errors.push(format!("`{key}` must be >= 0, got {x}"));
            return None;
        }
        Some(x)
    }

    pub fn uint(&mut self, key: &str, default: Option<&str>) -> Option<u64> {
        self.parsed(key, default, "a non-negative integer")
    }

    pub fn flag(&mut self, key: &str, default: bool) -> Option<bool> {
        let d = if default { "true" } else { "false" };
        let v = self.raw(key, Some(d))?;
        match v.as_str() {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            _ => {
                self.errors.push(format!("`{key}` must be true or false, got {v:?}"));
                None
            }
        }
    }

    pub fn choice(&mut self, key: &str, default: Option<&str>, allowed: &[&str]) -> Option<String> {
        let v = self.raw(key, default)?;
        if allowed.contains(&v.as_str()) {
            Some(v)
        } else {
            self.errors.push(format!("`{key}` must be one of {}, got {v:?}", allowed.join("|")));
            None
        }
    }

    pub fn reals(&mut self, key: &str, default: Option<&str>) -> Option<Vec<f64>> {
        let v = self.raw(key, default)?;
        match parse_real_list(&v) {
            Ok(xs) if xs.is_empty() => {
                self.errors.push(format!("`{key}` must not be empty"));
                None
            }
            Ok(xs) => Some(xs),
            Err(e) => {
                self.errors.push(format!("`{key}`: {e}"));
                None
            }
        }
    }

    pub fn uints(&mut self, key: &str, default: Option<&str>) -> Option<Vec<u64>> {
        let xs = self.reals(key, default)?;
        if let Some(bad) = xs.iter().find(|x| !(**x >= 0.0 && x.fract() == 0.0 && **x <= 1e15)) {
            self.errors.push(format!("`{key}` must hold non-negative integers, got {bad}"));
            return None;
        }
        Some(xs.into_iter().map(|x| x as u64).collect())
    }

    pub fn finish(self) -> Result<BTreeMap<String, String>, ConfigErrors> {
        if self.errors.is_empty() {
            Ok(self.resolved)
        } else {
            Err(ConfigErrors(self.errors))
        }
    }
}

/// Comma-separated items, each a number or an inclusive range
/// `start:stop:step`.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for item in s.split(',') {
        let item = item.trim();
        let parts: Vec<&str> = item.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("bad number {p:?}"));
        match parts.as_slice() {
            [x] => out.push(num(x)?),
            [a, b, st] => {
                let (a, b, st) = (num(a)?, num(b)?, num(st)?);
                if !(st > 0.0) || b < a {
                    return Err(format!("range {item:?} needs stop >= start and step > 0"));
                }
                let count = ((b - a) / st + 1e-9).floor() as usize;
                if count > 10_000_000 {
                    return Err(format!("range {item:?} is too long"));
                }
                out.extend((0..=count).map(|i| a + i as f64 * st));
            }
            _ => return Err(format!("bad list item {item:?}")),
        }
    }
    Ok(out)
}
