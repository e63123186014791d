//! Run configuration with three-layer precedence: command-line flags
//! override an optional `key=value` config file, which overrides the
//! defaults. The effective configuration is echoed into a `.meta`
//! sidecar next to each CSV for provenance.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

/// Effective run configuration. `ratio` is `omega_m / g_mag`; `omega_c`
/// is `omega_c / g_mag` and only contributes a global phase.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ratio: f64,
    pub xi_ratio: f64,
    pub tau_max: f64,
    pub steps: usize,
    pub n_b: usize,
    pub omega_c: f64,
    pub out: PathBuf,
}

/// Unset fields fall through to the config file and then the defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub ratio: Option<f64>,
    pub xi_ratio: Option<f64>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
    pub n_b: Option<usize>,
    pub omega_c: Option<f64>,
}

impl RunConfig {
    pub fn defaults(out: PathBuf) -> Self {
        Self {
            ratio: 15.0,
            xi_ratio: 0.5,
            tau_max: 3.0 * std::f64::consts::PI,
            steps: 400,
            n_b: 12,
            omega_c: 0.0,
            out,
        }
    }

    /// Defaults, then the config file (if any), then the flags.
    pub fn resolve(out: PathBuf, config_file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut cfg = Self::defaults(out);
        if let Some(path) = config_file {
            let file = parse_config_file(path)?;
            cfg.apply(&file);
        }
        cfg.apply(flags);
        cfg.validate().map_err(|e| anyhow!(e))?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.ratio {
            self.ratio = v;
        }
        if let Some(v) = o.xi_ratio {
            self.xi_ratio = v;
        }
        if let Some(v) = o.tau_max {
            self.tau_max = v;
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.n_b {
            self.n_b = v;
        }
        if let Some(v) = o.omega_c {
            self.omega_c = v;
        }
    }

    // negated comparisons are deliberate: NaN must fail every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.ratio >= 2.0) {
            return Err(format!("ratio must be at least 2, got {}", self.ratio));
        }
        if self.steps < 2 {
            return Err(format!("steps must be at least 2, got {}", self.steps));
        }
        if self.n_b < 4 {
            return Err(format!("nb must be at least 4, got {}", self.n_b));
        }
        if !(self.xi_ratio > 0.0) {
            return Err(format!("xi-ratio must be positive, got {}", self.xi_ratio));
        }
        if !(self.tau_max > 0.0) {
            return Err(format!("tau-max must be positive, got {}", self.tau_max));
        }
        if !(self.omega_c >= 0.0) {
            return Err(format!("omega-c must be non-negative, got {}", self.omega_c));
        }
        Ok(())
    }

    /// `key=value` lines sorted by key; `extra` entries (command name,
    /// ratio lists) join the config fields.
    pub fn meta(&self, extra: &[(&str, String)]) -> String {
        let mut map = BTreeMap::new();
        map.insert("nb".to_string(), self.n_b.to_string());
        map.insert("omega-c".to_string(), crate::fmt_f(self.omega_c));
        map.insert("ratio".to_string(), crate::fmt_f(self.ratio));
        map.insert("steps".to_string(), self.steps.to_string());
        map.insert("tau-max".to_string(), crate::fmt_f(self.tau_max));
        map.insert("xi-ratio".to_string(), crate::fmt_f(self.xi_ratio));
        for (k, v) in extra {
            map.insert((*k).to_string(), v.clone());
        }
        let mut out = String::new();
        for (k, v) in map {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

fn parse_config_file(path: &Path) -> Result<Overrides> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut o = Overrides::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value, got {line:?}", path.display(), lineno + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        let parse_f = || -> Result<f64> {
            value.parse().with_context(|| format!("{}:{}: bad number {value:?}", path.display(), lineno + 1))
        };
        let parse_u = || -> Result<usize> {
            value.parse().with_context(|| format!("{}:{}: bad integer {value:?}", path.display(), lineno + 1))
        };
        match key {
            "ratio" => o.ratio = Some(parse_f()?),
            "xi-ratio" => o.xi_ratio = Some(parse_f()?),
            "tau-max" => o.tau_max = Some(parse_f()?),
            "steps" => o.steps = Some(parse_u()?),
            "nb" => o.n_b = Some(parse_u()?),
            "omega-c" => o.omega_c = Some(parse_f()?),
            other => bail!("{}:{}: unknown key {other:?}", path.display(), lineno + 1),
        }
    }
    Ok(o)
}

/// Comma-separated ratio list, e.g. `10,15,30`.
pub fn parse_ratios(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .with_context(|| format!("bad ratio {part:?} in {s:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.conf");
        fs::write(&cfg_path, "ratio = 20\nsteps=100\n# comment\n\n").unwrap();
        let flags = Overrides { steps: Some(50), ..Default::default() };
        let cfg =
            RunConfig::resolve(dir.path().join("o.csv"), Some(&cfg_path), &flags).unwrap();
        assert_eq!(cfg.ratio, 20.0); // from file
        assert_eq!(cfg.steps, 50); // flag wins
        assert_eq!(cfg.n_b, 12); // default
    }

    #[test]
    fn bad_values_rejected() {
        let flags = Overrides { ratio: Some(1.0), ..Default::default() };
        assert!(RunConfig::resolve(PathBuf::from("x.csv"), None, &flags).is_err());
        let flags = Overrides { n_b: Some(3), ..Default::default() };
        assert!(RunConfig::resolve(PathBuf::from("x.csv"), None, &flags).is_err());
        let flags = Overrides { steps: Some(1), ..Default::default() };
        assert!(RunConfig::resolve(PathBuf::from("x.csv"), None, &flags).is_err());
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.conf");
        fs::write(&cfg_path, "nope=1\n").unwrap();
        assert!(RunConfig::resolve(dir.path().join("o.csv"), Some(&cfg_path), &Overrides::default()).is_err());
    }

    #[test]
    fn meta_lines_are_sorted() {
        let cfg = RunConfig::defaults(PathBuf::from("x.csv"));
        let meta = cfg.meta(&[("command", "evolve".into())]);
        let keys: Vec<&str> = meta.lines().map(|l| l.split('=').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(meta.contains("command=evolve\n"));
    }

    #[test]
    fn ratio_list_parsing() {
        assert_eq!(parse_ratios("10, 15,30").unwrap(), vec![10.0, 15.0, 30.0]);
        assert!(parse_ratios("10,abc").is_err());
    }
}
