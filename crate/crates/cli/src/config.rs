//! Run configuration: defaults, `key=value` files and command-line overrides.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Text,
    Json,
    Dot,
}

impl FromStr for OutputMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputMode::Text),
            "json" => Ok(OutputMode::Json),
            "dot" => Ok(OutputMode::Dot),
            other => Err(format!("unknown output mode `{other}` (expected text, json or dot)")),
        }
    }
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputMode::Text => "text",
            OutputMode::Json => "json",
            OutputMode::Dot => "dot",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub base: Option<PathBuf>,
    pub spec: Option<String>,
    /// Second spec for comparisons.
    pub other: Option<String>,
    /// Type name or index; the first type when absent.
    pub root: Option<String>,
    pub r: u32,
    pub rmax: u32,
    pub d: u32,
    pub k: u32,
    pub kmax: u32,
    pub n: u32,
    pub m: u32,
    pub depth: u32,
    pub pi: BTreeSet<u64>,
    pub mode: OutputMode,
    pub cache_dir: Option<PathBuf>,
    /// Portrait cap override.
    pub capacity: Option<f64>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base: None,
            spec: None,
            other: None,
            root: None,
            r: 2,
            rmax: 3,
            d: 0,
            k: 1,
            kmax: 2,
            n: 1,
            m: 2,
            depth: 2,
            pi: [2].into(),
            mode: OutputMode::Text,
            cache_dir: None,
            capacity: None,
            threads: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "base", "spec", "other", "root", "r", "rmax", "d", "k", "kmax", "n", "m", "depth", "pi", "mode",
    "cache_dir", "capacity", "threads",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{v}`"))
}

/// Parses a prime set such as `2,3` or `{2,3}`.
pub fn parse_pi(v: &str) -> Result<BTreeSet<u64>, String> {
    let body = v.trim().trim_start_matches('{').trim_end_matches('}');
    let mut out = BTreeSet::new();
    for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p: u64 = num("pi", part)?;
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(format!("`{p}` in pi is not a prime"));
        }
        out.insert(p);
    }
    Ok(out)
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "base" => self.base = Some(v.into()),
            "spec" => self.spec = Some(v.into()),
            "other" => self.other = Some(v.into()),
            "root" => self.root = Some(v.into()),
            "r" => self.r = num(key, v)?,
            "rmax" => self.rmax = num(key, v)?,
            "d" => self.d = num(key, v)?,
            "k" => self.k = num(key, v)?,
            "kmax" => self.kmax = num(key, v)?,
            "n" => self.n = num(key, v)?,
            "m" => self.m = num(key, v)?,
            "depth" => self.depth = num(key, v)?,
            "pi" => self.pi = parse_pi(v)?,
            "mode" => self.mode = v.parse()?,
            "cache_dir" => self.cache_dir = Some(v.into()),
            "capacity" => {
                let c: f64 = v
                    .parse()
                    .map_err(|_| format!("`capacity` expects a number, got `{v}`"))?;
                if c.is_nan() || c <= 0.0 {
                    return Err("`capacity` must be positive".into());
                }
                self.capacity = Some(c);
            }
            "threads" => self.threads = Some(num(key, v)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got `{line}`", i + 1))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(())
    }
}

/// Defaults overridden by the file's entries.
pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut cfg = RunConfig::default();
    cfg.apply_text(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(cfg)
}
