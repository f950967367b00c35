//! Experiment configuration: TOML schema, defaults, overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use multicache_core::network::InterfererModel;
use multicache_core::{db_to_linear, ContentParams, Method, NetworkParams, Scheme};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::HarnessError;

/// Name of the resolved-config echo written into every output directory.
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Monte Carlo deployments per (scheme, antenna count).
    pub trials: u64,
    #[serde(with = "str_list")]
    pub schemes: Vec<Scheme>,
    pub gamma_db: Vec<f64>,
    pub out: PathBuf,
    /// Rayon worker threads for Monte Carlo; 0 uses every available core.
    pub workers: usize,
    #[serde(with = "via_str")]
    pub interferer_model: InterfererModel,
    pub network: NetworkSection,
    pub content: ContentSection,
    pub optimize: OptimizeSection,
    pub compare: CompareSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub lambda_b: f64,
    pub alpha: f64,
    pub antennas: usize,
    pub cluster_size: usize,
    pub region_half_width: f64,
    pub guard_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContentSection {
    pub library_size: usize,
    pub cache_size: usize,
    pub zipf_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    /// Coverage table fed to the optimizer.
    #[serde(with = "via_str")]
    pub coverage: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub antennas: Vec<usize>,
    pub deltas: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 10_000,
            schemes: Scheme::ALL.to_vec(),
            gamma_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            out: PathBuf::from("out"),
            workers: 0,
            interferer_model: InterfererModel::Explicit,
            network: NetworkSection::default(),
            content: ContentSection::default(),
            optimize: OptimizeSection::default(),
            compare: CompareSection::default(),
        }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        let p = NetworkParams::default();
        Self {
            lambda_b: p.lambda_b,
            alpha: p.alpha,
            antennas: p.antennas,
            cluster_size: p.cluster_size,
            region_half_width: p.region_half_width,
            guard_radius: p.guard_radius,
        }
    }
}

impl Default for ContentSection {
    fn default() -> Self {
        Self { library_size: 100, cache_size: 10, zipf_delta: 0.9 }
    }
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self { coverage: Method::Upper }
    }
}

impl Default for CompareSection {
    fn default() -> Self {
        Self { antennas: vec![2, 4], deltas: vec![0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.1] }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub schemes: Option<Vec<Scheme>>,
    pub gamma_db: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn field_error(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { field: field.to_owned(), message: message.into() }
}

impl ExperimentConfig {
    /// Parses TOML text. Unknown keys and type mismatches are reported with
    /// their line and column.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let mut message = e.message().to_owned();
            if let Some(span) = e.span() {
                let line = text[..span.start].matches('\n').count() + 1;
                let column = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                message = format!("line {line}, column {column}: {message}");
            }
            ConfigError { field: String::new(), message }
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(field_error("", format!("cannot read {}: {e}", path.display())))
        })?;
        Self::from_toml(&text).map_err(|mut e| {
            e.message = format!("{}: {}", path.display(), e.message);
            HarnessError::Config(e)
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.trials {
            self.trials = v;
        }
        if let Some(v) = &o.schemes {
            self.schemes = v.clone();
        }
        if let Some(v) = &o.gamma_db {
            self.gamma_db = v.clone();
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
    }

    /// Network parameters at SIR target `gamma_db`.
    pub fn network_at(&self, gamma_db: f64) -> NetworkParams {
        let n = &self.network;
        NetworkParams {
            lambda_b: n.lambda_b,
            alpha: n.alpha,
            antennas: n.antennas,
            cluster_size: n.cluster_size,
            gamma: db_to_linear(gamma_db),
            region_half_width: n.region_half_width,
            guard_radius: n.guard_radius,
        }
    }

    pub fn content_params(&self) -> Result<ContentParams, ConfigError> {
        self.content_with_delta(self.content.zipf_delta)
    }

    pub fn content_with_delta(&self, delta: f64) -> Result<ContentParams, ConfigError> {
        let c = &self.content;
        ContentParams::zipf(c.library_size, delta, c.cache_size)
            .map_err(|e| field_error("content", e.to_string()))
    }

    /// Effective worker count.
    pub fn worker_count(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(field_error("trials", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(field_error("schemes", "at least one scheme is required"));
        }
        if self.gamma_db.is_empty() {
            return Err(field_error("gamma_db", "at least one SIR target is required"));
        }
        if let Some(g) = self.gamma_db.iter().find(|g| !g.is_finite() || g.abs() > 200.0) {
            return Err(field_error("gamma_db", format!("{g} dB is not a usable SIR target")));
        }
        let probe = self.network_at(self.gamma_db[0]);
        probe
            .validate()
            .map_err(|e| field_error(&format!("network.{}", model_field(&e)), e.to_string()))?;
        for &scheme in &self.schemes {
            probe
                .validate_for(scheme)
                .map_err(|e| field_error("schemes", format!("{scheme}: {e}")))?;
        }
        if self.content.cache_size > self.content.library_size {
            return Err(field_error("content.cache_size", "cannot exceed content.library_size"));
        }
        self.content_params()?;
        if self.optimize.coverage == Method::Mc {
            return Err(field_error("optimize.coverage", "must be an analytic method"));
        }
        if self.compare.antennas.iter().any(|&l| l == 0) {
            return Err(field_error("compare.antennas", "antenna counts must be positive"));
        }
        for &d in &self.compare.deltas {
            self.content_with_delta(d).map_err(|e| field_error("compare.deltas", e.message))?;
        }
        Ok(())
    }

    /// TOML text with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Writes the resolved config into the output directory.
    pub fn echo(&self) -> Result<PathBuf, HarnessError> {
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join(RESOLVED_CONFIG_FILE);
        std::fs::write(&path, self.to_toml())?;
        Ok(path)
    }
}

fn model_field(e: &multicache_core::network::ModelError) -> &'static str {
    match e {
        multicache_core::network::ModelError::InvalidParams { field, .. } => field,
        _ => "",
    }
}

mod via_str {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

mod str_list {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        c.validate().unwrap();
        let p = c.network_at(0.0);
        assert_eq!((p.lambda_b, p.alpha, p.antennas, p.cluster_size, p.gamma), (5e-5, 4.0, 2, 2, 1.0));
        let content = c.content_params().unwrap();
        assert_eq!((content.library_size(), content.cache_size()), (100, 10));
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = ExperimentConfig::default();
        c.schemes = vec![Scheme::Zf];
        c.optimize.coverage = Method::Exact;
        c.interferer_model = InterfererModel::Fast;
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = ExperimentConfig::from_toml("seed = 3\n[network]\nantenas = 4\n").unwrap_err();
        assert!(e.message.contains("line 3"), "{e}");
        assert!(e.message.contains("antenas"), "{e}");
    }

    #[test]
    fn bad_scheme_rejected() {
        let e = ExperimentConfig::from_toml("schemes = [\"mmse\"]").unwrap_err();
        assert!(e.message.contains("mf"), "{e}");
    }

    #[test]
    fn physical_constraints_name_the_field() {
        let mut c = ExperimentConfig::default();
        c.network.alpha = 2.0;
        assert_eq!(c.validate().unwrap_err().field, "network.alpha");

        let mut c = ExperimentConfig::default();
        c.network.antennas = 1;
        assert_eq!(c.validate().unwrap_err().field, "schemes");
        c.schemes = vec![Scheme::Mf];
        c.validate().unwrap();

        let mut c = ExperimentConfig::default();
        c.content.cache_size = 101;
        assert_eq!(c.validate().unwrap_err().field, "content.cache_size");

        let mut c = ExperimentConfig::default();
        c.trials = 0;
        assert_eq!(c.validate().unwrap_err().field, "trials");

        let mut c = ExperimentConfig::default();
        c.optimize.coverage = Method::Mc;
        assert_eq!(c.validate().unwrap_err().field, "optimize.coverage");
    }

    #[test]
    fn overrides_win() {
        let mut c = ExperimentConfig::from_toml("seed = 3\ntrials = 5").unwrap();
        c.apply(&Overrides { seed: Some(9), gamma_db: Some(vec![-3.0]), ..Default::default() });
        assert_eq!((c.seed, c.trials, c.gamma_db.as_slice()), (9, 5, &[-3.0][..]));
    }
}
