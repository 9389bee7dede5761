//! Flag and config-file resolution.
//!
//! The config file holds `key = value` lines; keys are long flag names
//! without the leading dashes. `#` starts a comment. Flags win over the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "units",
    "length-unit",
    "tol",
    "out",
    "format",
    "jobs",
    "mirror1",
    "mirror2",
    "gap",
    "gap-sweep",
    "temperature",
    "temperature-sweep",
    "r-product",
    "window",
    "points",
    "q",
    "polarization",
    "delay",
    "r",
    "sector",
    "k-vacuum",
    "k-dielectric",
    "phase",
    "sweep",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::config(format!("{}:{line}: {msg}", path.display()));
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim().trim_start_matches("--");
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if entries.insert(key.to_string(), (line, value.trim().to_string())).is_some() {
                return Err(err(format!("key `{key}` given twice")));
            }
        }
        Ok(Self { path: path.to_path_buf(), entries })
    }
}

/// A raw setting together with where it came from.
#[derive(Debug, Clone)]
pub struct Sourced {
    pub value: String,
    pub origin: String,
    /// Directory that relative file names in the value are resolved against.
    pub base: Option<PathBuf>,
}

impl Sourced {
    pub fn error(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::config(format!("{}: {msg}", self.origin))
    }

    pub fn parse<T>(&self, parser: impl Fn(&str) -> Result<T, String>) -> CliResult<T> {
        parser(&self.value).map_err(|m| self.error(m))
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        match &self.base {
            Some(dir) if Path::new(file).is_relative() => dir.join(file),
            _ => PathBuf::from(file),
        }
    }
}

#[derive(Debug, Default)]
pub struct Settings {
    file: Option<ConfigFile>,
}

impl Settings {
    pub fn new(config: Option<&Path>) -> CliResult<Self> {
        Ok(Self { file: config.map(ConfigFile::load).transpose()? })
    }

    pub fn get(&self, key: &str, flag: &Option<String>) -> Option<Sourced> {
        if let Some(v) = flag {
            return Some(Sourced { value: v.clone(), origin: format!("--{key}"), base: None });
        }
        let file = self.file.as_ref()?;
        let (line, value) = file.entries.get(key)?;
        Some(Sourced {
            value: value.clone(),
            origin: format!("{}:{line} ({key})", file.path.display()),
            base: file.path.parent().map(Path::to_path_buf),
        })
    }

    pub fn parse<T>(&self, key: &str, flag: &Option<String>, parser: impl Fn(&str) -> Result<T, String>) -> CliResult<Option<T>> {
        self.get(key, flag).map(|s| s.parse(parser)).transpose()
    }

    pub fn require<T>(&self, key: &str, flag: &Option<String>, parser: impl Fn(&str) -> Result<T, String>) -> CliResult<T> {
        self.parse(key, flag, parser)?.ok_or_else(|| CliError::config(format!("--{key} is required")))
    }
}

pub fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

pub fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v <= 0.0 {
        return Err(format!("must be positive, got {v}"));
    }
    Ok(v)
}

pub fn non_negative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v < 0.0 {
        return Err(format!("must be non-negative, got {v}"));
    }
    Ok(v)
}

pub fn count(s: &str) -> Result<usize, String> {
    let n: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
    if n == 0 {
        return Err("must be at least 1".into());
    }
    Ok(n)
}

/// `start:stop:count:log|lin` as an explicit list.
pub fn sweep(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, n, spacing] = parts[..] else {
        return Err(format!("expected start:stop:count:log|lin, got `{s}`"));
    };
    let (start, stop, n) = (number(start)?, number(stop)?, count(n)?);
    if n > 1 && start == stop {
        return Err("start and stop must differ when count > 1".into());
    }
    let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    match spacing {
        "lin" => Ok((0..n).map(|i| start + (stop - start) * frac(i)).collect()),
        "log" => {
            if !(start > 0.0 && stop > 0.0) {
                return Err("log sweeps need positive start and stop".into());
            }
            let ratio = stop / start;
            Ok((0..n).map(|i| if i == n - 1 { stop } else { start * ratio.powf(frac(i)) }).collect())
        }
        other => Err(format!("spacing must be `log` or `lin`, got `{other}`")),
    }
}

/// `a:b` with `0 ≤ a < b`.
pub fn window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got `{s}`"))?;
    let (a, b) = (non_negative(a)?, number(b)?);
    if !(b > a) {
        return Err(format!("window must satisfy a < b, got {a}:{b}"));
    }
    Ok((a, b))
}

/// Either a single value or a sweep, but not both.
pub fn scalar_or_sweep(
    settings: &Settings,
    key: &str,
    flag: &Option<String>,
    sweep_key: &str,
    sweep_flag: &Option<String>,
    parser: fn(&str) -> Result<f64, String>,
) -> CliResult<Vec<f64>> {
    let one = settings.get(key, flag);
    let many = settings.get(sweep_key, sweep_flag);
    match (one, many) {
        (Some(a), Some(b)) => Err(CliError::config(format!("{} and {} are mutually exclusive", a.origin, b.origin))),
        (Some(a), None) => Ok(vec![a.parse(parser)?]),
        (None, Some(b)) => {
            let values = b.parse(sweep)?;
            for v in &values {
                parser(&v.to_string()).map_err(|m| b.error(m))?;
            }
            Ok(values)
        }
        (None, None) => Err(CliError::config(format!("one of --{key} or --{sweep_key} is required"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        assert_eq!(sweep("1:3:3:lin").unwrap(), vec![1.0, 2.0, 3.0]);
        let s = sweep("1e-7:1e-5:3:log").unwrap();
        assert!((s[1] - 1e-6).abs() < 1e-18 && s[2] == 1e-5);
        assert!(sweep("0:1:3:log").is_err());
        assert!(sweep("1:1:3:lin").is_err());
        assert!(sweep("1:2:3").is_err());
        assert_eq!(sweep("5:5:1:lin").unwrap(), vec![5.0]);
    }

    #[test]
    fn config_file_lines() {
        let f = ConfigFile::parse("# run\ngap = 1e-6\n\nmirror1 = perfect  # ideal\n", Path::new("run.cfg")).unwrap();
        let s = Settings { file: Some(f) };
        let g = s.get("gap", &None).unwrap();
        assert_eq!(g.value, "1e-6");
        assert_eq!(g.origin, "run.cfg:2 (gap)");
        assert_eq!(s.get("gap", &Some("2e-6".into())).unwrap().value, "2e-6");
        let err = ConfigFile::parse("gap = 1\nbogus = 2\n", Path::new("c")).unwrap_err();
        assert!(err.to_string().starts_with("c:2:"), "{err}");
        assert!(ConfigFile::parse("gap 1\n", Path::new("c")).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(window("0.95:1.05").unwrap(), (0.95, 1.05));
        assert!(window("1:1").is_err());
        assert!(window("-1:1").is_err());
    }
}
