//! Line-oriented model configuration.
//!
//! ```text
//! # keys before the first section apply to every model
//! baseline = M1
//! weighting = reciprocal-log-mcap
//!
//! [model M1]
//! predictors = dp, market_cap
//!
//! [model M2]
//! predictors = suppliers_count, customers_count, dp, market_cap
//! transform.suppliers_count = log1p
//! missing.suppliers_avg_dp = drop_rows
//! ```

use std::path::Path;

use thiserror::Error;

use crate::graph::GicsSector;
use crate::netmetrics::ConstraintMode;
use crate::transform::{ModelSpec, TransformError, Variable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub models: Vec<ModelSpec>,
    /// Name of the model the R² gains are measured from.
    pub baseline: String,
}

impl SpecFile {
    pub fn baseline_index(&self) -> usize {
        self.models
            .iter()
            .position(|m| m.name == self.baseline)
            .expect("baseline validated")
    }
}

pub fn load(path: &Path) -> Result<SpecFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

fn apply(spec: &mut ModelSpec, key: &str, value: &str) -> Result<(), String> {
    let spec_err = |e: TransformError| e.to_string();
    match key {
        "response" => spec.response = value.parse().map_err(spec_err)?,
        "predictors" => {
            spec.predictors = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<Variable>().map_err(spec_err))
                .collect::<Result<_, _>>()?;
        }
        "sector_indicators" => spec.sector_indicators = parse_bool(value)?,
        "country_indicators" => spec.country_indicators = parse_bool(value)?,
        "sector_reference" => {
            spec.sector_reference = value.parse::<GicsSector>().map_err(|e| e.to_string())?
        }
        "country_reference" => spec.country_reference = value.to_owned(),
        "weighting" | "weights" => spec.weighting = value.parse().map_err(spec_err)?,
        "exclude_financials" => spec.exclude_financials = parse_bool(value)?,
        "keep_financials" => spec.exclude_financials = !parse_bool(value)?,
        "constraint_mode" => {
            spec.constraint_mode = match value {
                "same_side" | "same-side" => ConstraintMode::SameSide,
                "mixed" => ConstraintMode::Mixed,
                other => return Err(format!("unknown constraint mode `{other}`")),
            }
        }
        _ => {
            if let Some(var) = key.strip_prefix("transform.") {
                let var: Variable = var.parse().map_err(spec_err)?;
                spec.transforms
                    .insert(var, value.parse().map_err(spec_err)?);
            } else if let Some(var) = key.strip_prefix("missing.") {
                let var: Variable = var.parse().map_err(spec_err)?;
                spec.missing.insert(var, value.parse().map_err(spec_err)?);
            } else {
                return Err(format!("unknown key `{key}`"));
            }
        }
    }
    Ok(())
}

/// (line, key, value)
type Entry = (usize, String, String);

pub fn parse(text: &str) -> Result<SpecFile, ConfigError> {
    let mut globals: Vec<Entry> = Vec::new();
    let mut baseline: Option<String> = None;
    let mut sections: Vec<(String, usize, Vec<Entry>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let inner = header.strip_suffix(']').ok_or_else(|| ConfigError::Line {
                line,
                message: "unterminated section header".into(),
            })?;
            let name = inner
                .trim()
                .strip_prefix("model")
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| ConfigError::Line {
                    line,
                    message: format!("expected `[model NAME]`, found `[{inner}]`"),
                })?;
            if sections.iter().any(|(n, ..)| n == name) {
                return Err(ConfigError::Line {
                    line,
                    message: format!("model `{name}` defined twice"),
                });
            }
            sections.push((name.to_owned(), line, Vec::new()));
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Line {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim().to_owned(), value.trim().to_owned());
        match sections.last_mut() {
            Some((_, _, entries)) => entries.push((line, key, value)),
            None if key == "baseline" => baseline = Some(value),
            None => globals.push((line, key, value)),
        }
    }

    if sections.is_empty() {
        return Err(ConfigError::Invalid("no `[model NAME]` sections".into()));
    }
    let mut models = Vec::with_capacity(sections.len());
    for (name, _, entries) in sections {
        let mut spec = ModelSpec::baseline(name);
        for (line, key, value) in globals.iter().chain(&entries) {
            apply(&mut spec, key, value).map_err(|message| ConfigError::Line {
                line: *line,
                message,
            })?;
        }
        models.push(spec);
    }
    let baseline = baseline.unwrap_or_else(|| models[0].name.clone());
    if !models.iter().any(|m| m.name == baseline) {
        return Err(ConfigError::Invalid(format!(
            "baseline `{baseline}` is not a defined model"
        )));
    }
    Ok(SpecFile { models, baseline })
}
