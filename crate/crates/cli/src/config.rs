use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use xlex::engine::{Coefficients, DecisionFeatures, LexiconSelector, ModelConfig};

use crate::args::ModelArgs;
use crate::failure::Failure;

/// Values loadable from `--config`. Relative paths are taken relative to the
/// file's directory.
///
/// ```toml
/// lexicon = "fin.csv"
/// normalized = false
/// selector = "combined"
/// features = "avg"
/// coeffs = "0.3,0.1,0.1,0.5"
/// threads = 4
/// resources = "resources"
/// reps = 10
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub normalized: Option<bool>,
    pub selector: Option<String>,
    pub features: Option<String>,
    pub coeffs: Option<String>,
    pub threads: Option<usize>,
    pub resources: Option<PathBuf>,
    pub reps: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.lexicon, &mut cfg.resources].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn parsed<T: std::str::FromStr<Err = xlex::Error>>(value: &Option<String>, key: &str) -> Result<Option<T>, Failure> {
        value
            .as_deref()
            .map(|v| v.parse().map_err(|e| Failure::usage(format!("config key `{key}`: {e}"))))
            .transpose()
    }
}

/// Model settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub lexicon: PathBuf,
    pub config: ModelConfig,
}

pub fn resolve_model(args: &ModelArgs, file: &FileConfig) -> Result<ResolvedModel, Failure> {
    let lexicon = args
        .lexicon
        .clone()
        .or_else(|| file.lexicon.clone())
        .ok_or_else(|| Failure::usage("no lexicon given; pass --lexicon or set `lexicon` in the config file"))?;
    let normalized = args.normalized || file.normalized.unwrap_or(false);
    let selector = match args.selector {
        Some(s) => s,
        None => FileConfig::parsed::<LexiconSelector>(&file.selector, "selector")?.unwrap_or(LexiconSelector::Combined),
    };
    let features = match args.features {
        Some(f) => f,
        None => FileConfig::parsed::<DecisionFeatures>(&file.features, "features")?.unwrap_or_default(),
    };
    let coefficients = match args.coeffs {
        Some(c) => c,
        None => FileConfig::parsed::<Coefficients>(&file.coeffs, "coeffs")?.unwrap_or_default(),
    };
    Ok(ResolvedModel {
        lexicon: if normalized { normalized_path(&lexicon) } else { lexicon },
        config: ModelConfig::new(selector, features, coefficients),
    })
}

pub fn resolve_features(flag: Option<DecisionFeatures>, file: &FileConfig) -> Result<DecisionFeatures, Failure> {
    match flag {
        Some(f) => Ok(f),
        None => Ok(FileConfig::parsed(&file.features, "features")?.unwrap_or_default()),
    }
}

/// `foo.csv` becomes `foo.norm.csv`; paths already ending in `.norm.csv`
/// are kept.
pub fn normalized_path(path: &Path) -> PathBuf {
    let s = path.to_string_lossy();
    if s.ends_with(".norm.csv") {
        return path.to_path_buf();
    }
    match s.strip_suffix(".csv") {
        Some(stem) => PathBuf::from(format!("{stem}.norm.csv")),
        None => PathBuf::from(format!("{s}.norm.csv")),
    }
}
