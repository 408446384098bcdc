//! JSON persistence for DFAM models and fitted baseline classifiers.
//!
//! Both are written compactly with a trailing newline, so a given model
//! always serialises to the same bytes.

use std::fs;
use std::path::Path;

use dfam_core::baselines::Classifier;
use dfam_core::dfam::{DfamConfig, DfamModel, WindowSignature};
use dfam_core::{ActivityLabel, Error as CoreError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLASSIFIER_VERSION: &str = "dfam-classifier/1";

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string(value).map_err(|e| Error::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CoreError::CorruptModel(format!("{}: not a {what}: {e}", path.display())).into())
}

pub fn save_model(path: &Path, model: &DfamModel) -> Result<()> {
    write_json(path, model)
}

pub fn load_model(path: &Path) -> Result<DfamModel> {
    #[derive(Deserialize)]
    struct Probe {
        version: Option<String>,
    }
    let probe: Probe = read_json(path, "model file")?;
    if probe.version.as_deref() != Some(dfam_core::dfam::MODEL_VERSION) {
        return Err(CoreError::CorruptModel(format!(
            "{}: unsupported model version {:?}",
            path.display(),
            probe.version
        ))
        .into());
    }
    let model: DfamModel = read_json(path, "model file")?;
    model.validate()?;
    Ok(model)
}

/// Adds one labelled signature to a model file in place. Records already in
/// the file are written back unchanged.
pub fn append_signature(path: &Path, label: &ActivityLabel, signature: WindowSignature) -> Result<DfamModel> {
    let mut model = load_model(path)?;
    model.append(label, signature)?;
    model.validate()?;
    save_model(path, &model)?;
    Ok(model)
}

/// A fitted baseline classifier plus the windowing it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierFile {
    pub version: String,
    pub config: DfamConfig,
    pub feature_names: Vec<String>,
    pub classifier: Classifier,
}

impl ClassifierFile {
    pub fn new(config: DfamConfig, feature_names: Vec<String>, classifier: Classifier) -> Self {
        Self {
            version: CLASSIFIER_VERSION.to_string(),
            config,
            feature_names,
            classifier,
        }
    }
}

pub fn save_classifier(path: &Path, file: &ClassifierFile) -> Result<()> {
    write_json(path, file)
}

pub fn load_classifier(path: &Path) -> Result<ClassifierFile> {
    let file: ClassifierFile = read_json(path, "classifier file")?;
    if file.version != CLASSIFIER_VERSION {
        return Err(CoreError::CorruptModel(format!(
            "{}: unsupported classifier version {:?}",
            path.display(),
            file.version
        ))
        .into());
    }
    if !file.classifier.is_fitted() {
        return Err(CoreError::NotFitted.into());
    }
    Ok(file)
}

/// Either kind of trained model file.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Dfam(DfamModel),
    Classifier(ClassifierFile),
}

pub fn load_any(path: &Path) -> Result<AnyModel> {
    #[derive(Deserialize)]
    struct Probe {
        version: Option<String>,
    }
    let probe: Probe = read_json(path, "model file")?;
    match probe.version.as_deref() {
        Some(CLASSIFIER_VERSION) => load_classifier(path).map(AnyModel::Classifier),
        _ => load_model(path).map(AnyModel::Dfam),
    }
}
