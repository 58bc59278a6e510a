//! Instance bundles on disk: a directory with `kb1`, `kb2`, `alignment.tsv`
//! and `instance.dpi`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use riodbg_core::{parse_dpi, parse_kb, DpiError, KbError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AlignedInstance, Correspondence, Relation};

pub const KB1: &str = "kb1";
pub const KB2: &str = "kb2";
pub const ALIGNMENT: &str = "alignment.tsv";
pub const DPI: &str = "instance.dpi";

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Kb { path: PathBuf, source: KbError },
    #[error("{path}: {source}")]
    Dpi { path: PathBuf, source: DpiError },
    #[error("{path}: {message}")]
    Alignment { path: PathBuf, message: String },
    #[error("{path}: merged KB does not match kb1, kb2 and the alignment")]
    Mismatch { path: PathBuf },
}

#[derive(Serialize, Deserialize)]
struct Row {
    atom1: String,
    atom2: String,
    rel: String,
    v: f64,
    correct: bool,
}

fn read(path: &Path) -> Result<String, BundleError> {
    fs::read_to_string(path).map_err(|source| BundleError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<(), BundleError> {
    fs::write(path, text).map_err(|source| BundleError::Io { path: path.to_owned(), source })
}

pub fn write_bundle(dir: &Path, instance: &AlignedInstance) -> Result<(), BundleError> {
    fs::create_dir_all(dir).map_err(|source| BundleError::Io { path: dir.to_owned(), source })?;
    write(&dir.join(KB1), &instance.kb1.to_text())?;
    write(&dir.join(KB2), &instance.kb2.to_text())?;
    let path = dir.join(ALIGNMENT);
    let alignment_err = |e: csv::Error| BundleError::Alignment { path: path.clone(), message: e.to_string() };
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(Vec::new());
    for c in &instance.alignment {
        w.serialize(Row {
            atom1: c.atom1.clone(),
            atom2: c.atom2.clone(),
            rel: c.relation.as_str().to_owned(),
            v: c.confidence,
            correct: c.correct,
        })
        .map_err(alignment_err)?;
    }
    let bytes = w.into_inner().map_err(|e| BundleError::Alignment { path: path.clone(), message: e.to_string() })?;
    write(&path, &String::from_utf8(bytes).expect("tsv is UTF-8"))?;
    write(&dir.join(DPI), &instance.dpi().to_text())
}

/// Reads a bundle; the instance id is the directory name.
pub fn read_bundle(dir: &Path) -> Result<AlignedInstance, BundleError> {
    let kb = |name: &str| {
        let path = dir.join(name);
        parse_kb(&read(&path)?).map_err(|source| BundleError::Kb { path, source })
    };
    let (kb1, kb2) = (kb(KB1)?, kb(KB2)?);

    let path = dir.join(ALIGNMENT);
    let text = read(&path)?;
    let mut alignment = Vec::new();
    let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(text.as_bytes());
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let bad = |message: String| BundleError::Alignment { path: path.clone(), message: format!("row {}: {message}", line + 1) };
        let row = row.map_err(|e| bad(e.to_string()))?;
        if !(0.0..=1.0).contains(&row.v) {
            return Err(bad(format!("confidence {} outside [0, 1]", row.v)));
        }
        let relation: Relation = row.rel.parse().map_err(bad)?;
        alignment.push(Correspondence { atom1: row.atom1, atom2: row.atom2, relation, confidence: row.v, correct: row.correct });
    }

    let dpi_path = dir.join(DPI);
    let dpi = parse_dpi(&read(&dpi_path)?).map_err(|source| BundleError::Dpi { path: dpi_path.clone(), source })?;
    let id = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
    let instance = AlignedInstance::new(id, kb1, kb2, alignment, dpi.b)
        .map_err(|message| BundleError::Alignment { path: dir.to_owned(), message })?;
    let same = instance.merged.len() == dpi.o.len()
        && instance.merged.iter().zip(dpi.o.iter()).all(|(a, b)| a.id == b.id && a.formula == b.formula);
    if !same {
        return Err(BundleError::Mismatch { path: dpi_path });
    }
    Ok(instance)
}

/// Every bundle directly under `dir`, in name order.
pub fn load_dataset(dir: &Path) -> Result<Vec<AlignedInstance>, BundleError> {
    let entries = fs::read_dir(dir).map_err(|source| BundleError::Io { path: dir.to_owned(), source })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(DPI).is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| read_bundle(d)).collect()
}
