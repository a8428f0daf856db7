//! Flat `key = value` configuration files with `[section]` headers.
//!
//! The format is intentionally small so archived run configurations stay
//! readable: `#` starts a comment, sections are `[metric]`, `[run]`,
//! `[output]` and `[tolerances]`, and every value is a bare scalar or a
//! comma-separated list. Command-line flags override file values; the fully
//! resolved configuration is echoed into the output header.

use halfmass::Error;
use std::collections::BTreeMap;
use std::path::Path;

/// Parsed configuration file: `section.key -> value`, insertion-ordered by
/// the BTreeMap key so the resolved echo is stable.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const SECTIONS: [&str; 4] = ["metric", "run", "output", "tolerances"];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::config(
                        format!("line {}", lineno + 1),
                        format!("unknown section `[{name}]` (expected one of {SECTIONS:?})"),
                    ));
                }
                section = name.to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            if section.is_empty() {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    "key outside of any [section]",
                ));
            }
            values.insert(
                format!("{section}.{}", key.trim()),
                value.trim().to_string(),
            );
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, Error> {
        self.get(key)
            .map(|raw| {
                raw.parse::<f64>()
                    .map_err(|_| Error::config(key, format!("expected a number, got `{raw}`")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, Error> {
        self.get(key)
            .map(|raw| {
                raw.parse::<usize>()
                    .map_err(|_| Error::config(key, format!("expected an integer, got `{raw}`")))
            })
            .transpose()
    }

    /// Keys of the `[metric]` section other than family and dim, parsed as
    /// family parameters.
    pub fn metric_params(&self) -> Result<BTreeMap<String, f64>, Error> {
        let mut params = BTreeMap::new();
        for (key, raw) in &self.values {
            if let Some(name) = key.strip_prefix("metric.") {
                if name == "family" || name == "dim" {
                    continue;
                }
                let value = raw.parse::<f64>().map_err(|_| {
                    Error::config(key.clone(), format!("expected a number, got `{raw}`"))
                })?;
                params.insert(name.to_string(), value);
            }
        }
        Ok(params)
    }
}

/// A radius schedule argument: either `r` or `min:max:count`.
pub fn parse_schedule(raw: &str) -> Result<halfmass::harness::Schedule, Error> {
    let parts: Vec<&str> = raw.split(':').collect();
    let parse = |s: &str, what: &str| -> Result<f64, Error> {
        s.parse::<f64>()
            .map_err(|_| Error::config("r", format!("expected a number for {what}, got `{s}`")))
    };
    match parts.as_slice() {
        [r] => halfmass::harness::Schedule::single(parse(r, "the radius")?),
        [min, max, count] => {
            let count = count.parse::<usize>().map_err(|_| {
                Error::config("r", format!("expected an integer count, got `{count}`"))
            })?;
            halfmass::harness::Schedule::new(parse(min, "r_min")?, parse(max, "r_max")?, count)
        }
        _ => Err(Error::config(
            "r",
            format!("expected `r` or `min:max:count`, got `{raw}`"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let cfg = ConfigFile::parse(
            "# run archive\n[metric]\nfamily = half-schwarzschild\nm = 1.5 # solar\n\n[run]\nr = 10:100:4\norder = 32\n",
        )
        .unwrap();
        assert_eq!(cfg.get("metric.family"), Some("half-schwarzschild"));
        assert_eq!(cfg.get_f64("metric.m").unwrap(), Some(1.5));
        assert_eq!(cfg.get_usize("run.order").unwrap(), Some(32));
        assert_eq!(cfg.metric_params().unwrap()["m"], 1.5);
    }

    #[test]
    fn rejects_unknown_sections_and_bare_keys() {
        let err = ConfigFile::parse("[nope]\n").unwrap_err();
        assert!(err.to_string().contains("unknown section"));
        let err = ConfigFile::parse("family = flat\n").unwrap_err();
        assert!(err.to_string().contains("outside"));
        let err = ConfigFile::parse("[run]\njust words\n").unwrap_err();
        assert!(err.to_string().contains("key = value"));
    }

    #[test]
    fn schedules_parse_both_forms() {
        let s = parse_schedule("500").unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.r_min, 500.0);
        let s = parse_schedule("10:1000:8").unwrap();
        assert_eq!(s.count, 8);
        assert!(parse_schedule("10:20").is_err());
        assert!(parse_schedule("abc").is_err());
    }
}
