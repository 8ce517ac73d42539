//! Flat `key = value` config files and value parsers shared by subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Keys and values from a config file, in file order of first appearance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected key = value", i + 1);
            };
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key `{key}`", i + 1);
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// One-line rendering for the CSV metadata header.
    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "code",
    "scheme",
    "sigma",
    "samples",
    "seed",
    "alpha-aux",
    "alpha-logical",
    "alpha",
    "method",
    "reduce-generators",
    "out",
    "target-rel-stderr",
];

/// Flag value if given, else config value, else `None`.
pub fn pick(flag: Option<String>, file: &ConfigFile, key: &str) -> Option<String> {
    flag.or_else(|| file.get(key).map(str::to_string))
}

pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

/// `start:stop:step` (inclusive) or a comma separated list.
pub fn parse_sigmas(s: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("sigma range must be start:stop:step");
        }
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad sigma `{p}`")))
            .collect::<Result<Vec<_>>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) {
            bail!("sigma step must be positive");
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count < 0.0 {
            bail!("empty sigma range");
        }
        (0..=count as usize)
            .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
            .collect()
    } else {
        parse_list(s)
            .iter()
            .map(|p| p.parse::<f64>().with_context(|| format!("bad sigma `{p}`")))
            .collect::<Result<Vec<_>>>()?
    };
    if out.is_empty() {
        bail!("no sigma values");
    }
    if let Some(bad) = out.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        bail!("sigma must be positive, got {bad}");
    }
    Ok(out)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    parse_list(s)
        .iter()
        .map(|p| p.parse::<f64>().with_context(|| format!("bad number `{p}`")))
        .collect()
}

pub fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => bail!("expected a boolean, got `{other}`"),
    }
}

/// Accepts plain integers and forms like `1e6`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("bad count `{s}`"))?;
    if f.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&f) {
        bail!("count must be a non-negative integer, got `{s}`");
    }
    Ok(f as u64)
}
