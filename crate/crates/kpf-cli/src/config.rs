use std::collections::BTreeMap;
use std::fs;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Resolved settings: config-file entries overridden by flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    values: BTreeMap<String, String>,
}

/// Keys that only pick where output goes and stay out of the hash.
const UNHASHED: [&str; 2] = ["out", "format"];

/// `key = value` per line, `#` comments, blank lines ignored.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("config line {}: expected key=value", n + 1)));
        };
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty key", n + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn build(command: &str, file: Option<&str>, flags: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut values = match file {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("reading config {p}: {e}")))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        values.extend(flags);
        Ok(RunConfig { command: command.to_string(), values })
    }

    /// First 16 hex digits of SHA-256 over the command and the sorted settings.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(b"\n");
        for (k, v) in &self.values {
            if UNHASHED.contains(&k.as_str()) {
                continue;
            }
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.str(key).unwrap_or(default)
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(CliError::Config(format!("{key}: expected a boolean, got {v:?}"))),
        }
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.str(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}"))))
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.parse_or(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.str(key).map(|v| parse_list(key, v)).transpose()
    }

    /// `x,y` pairs separated by `;`.
    pub fn pairs(&self, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
        let Some(v) = self.str(key) else {
            return Ok(vec![]);
        };
        v.split(';')
            .map(|p| match parse_list(key, p)?.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(CliError::Config(format!("{key}: expected x,y, got {p:?}"))),
            })
            .collect()
    }
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',')
        .map(|s| {
            let s = s.trim();
            match s {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => s.parse::<f64>().map_err(|_| CliError::Config(format!("{key}: cannot parse number {s:?}"))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text() {
        let m = parse_config_text("# c\nfunction = reciprocal\n--tol=1e-3  # trailing\n\ninner_tol = 2\n").unwrap();
        assert_eq!(m["function"], "reciprocal");
        assert_eq!(m["tol"], "1e-3");
        assert_eq!(m["inner-tol"], "2");
        assert!(parse_config_text("nonsense").is_err());
    }

    #[test]
    fn hash_ignores_output_keys() {
        let a = RunConfig { command: "invert".into(), values: [("function".to_string(), "zero".to_string())].into() };
        let mut b = a.clone();
        b.values.insert("out".into(), "x.csv".into());
        b.values.insert("format".into(), "json".into());
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        let mut c = a.clone();
        c.values.insert("tol".into(), "1e-3".into());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn pairs_and_lists() {
        let c = RunConfig { command: "x".into(), values: [("point".to_string(), "2,3;1,-2".to_string())].into() };
        assert_eq!(c.pairs("point").unwrap(), vec![(2.0, 3.0), (1.0, -2.0)]);
        assert_eq!(parse_list("r", "-inf,1,inf").unwrap(), vec![f64::NEG_INFINITY, 1.0, f64::INFINITY]);
        assert!(parse_list("r", "1,x").is_err());
    }
}
