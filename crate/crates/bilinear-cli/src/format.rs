//! On-disk formats: system files and matrix files.
//!
//! Both are JSON with every number carried as an exact string (decimal or
//! `"p/q"`), so nothing is rounded on the way in or out. Indices are 1-based
//! on disk and 0-based in memory. Serialization is canonical — coefficients
//! sorted by `(k, i, j)`, two-space pretty-printing, trailing newline — and
//! `parse ∘ print` is the identity on canonical files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use bilinear::core::{BilinearMap, BilinearSystem, SignClass};
use bilinear::linalg::{Matrix, Vector};
use bilinear::scalar::{format_scalar, parse_scalar};

/// One coefficient `(x*y)_k += c·x_i·y_j`, 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffFile {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub name: String,
    pub coeffs: Vec<CoeffFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedFile {
    pub name: String,
    pub entries: Vec<String>,
}

/// The system file: a complete bilinear system with display names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub dim: usize,
    pub operators: Vec<OperatorFile>,
    pub seeds: Vec<SeedFile>,
    pub sign_class: String,
}

/// A matrix input file: exact entries, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: Vec<Vec<String>>,
}

/// A parsed system together with the display names from its file.
#[derive(Debug, Clone)]
pub struct NamedSystem {
    pub system: BilinearSystem,
    pub op_names: Vec<String>,
    pub seed_names: Vec<String>,
}

/// Default operator names: `f` alone, `f1, f2, …` when several.
pub fn default_op_names(count: usize) -> Vec<String> {
    if count == 1 {
        vec!["f".to_string()]
    } else {
        (1..=count).map(|k| format!("f{k}")).collect()
    }
}

/// Default seed names: `s` alone, `s1, s2, …` when several.
pub fn default_seed_names(count: usize) -> Vec<String> {
    if count == 1 {
        vec!["s".to_string()]
    } else {
        (1..=count).map(|k| format!("s{k}")).collect()
    }
}

/// Wraps a bare system in default names.
pub fn with_default_names(system: BilinearSystem) -> NamedSystem {
    let op_names = default_op_names(system.operators().len());
    let seed_names = default_seed_names(system.seeds().len());
    NamedSystem {
        system,
        op_names,
        seed_names,
    }
}

fn check_name(name: &str, what: &str) -> Result<()> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        bail!(
            "{what} name {name:?} is invalid: names are ASCII identifiers \
             (letters, digits, underscores, not starting with a digit)"
        );
    }
    if name == "u" {
        bail!("{what} name \"u\" is reserved for the marked leaf of patterns");
    }
    Ok(())
}

fn sign_class_to_str(class: SignClass) -> &'static str {
    match class {
        SignClass::Nonnegative => "nonnegative",
        SignClass::General => "general",
    }
}

fn sign_class_from_str(s: &str) -> Result<SignClass> {
    match s {
        "nonnegative" => Ok(SignClass::Nonnegative),
        "general" => Ok(SignClass::General),
        other => bail!("unknown sign_class {other:?}: expected \"nonnegative\" or \"general\""),
    }
}

/// Converts a named system to its canonical file form.
pub fn to_file(named: &NamedSystem) -> SystemFile {
    let operators = named
        .system
        .operators()
        .iter()
        .zip(&named.op_names)
        .map(|(op, name)| {
            let mut coeffs: Vec<CoeffFile> = op
                .iter()
                .map(|(k, i, j, c)| CoeffFile {
                    k: k + 1,
                    i: i + 1,
                    j: j + 1,
                    c: format_scalar(c),
                })
                .collect();
            coeffs.sort_by_key(|c| (c.k, c.i, c.j));
            OperatorFile {
                name: name.clone(),
                coeffs,
            }
        })
        .collect();
    let seeds = named
        .system
        .seeds()
        .iter()
        .zip(&named.seed_names)
        .map(|(seed, name)| SeedFile {
            name: name.clone(),
            entries: seed.iter().map(format_scalar).collect(),
        })
        .collect();
    SystemFile {
        dim: named.system.dim(),
        operators,
        seeds,
        sign_class: sign_class_to_str(named.system.sign_class()).to_string(),
    }
}

/// Validates and converts a file into a live system.
pub fn from_file(file: &SystemFile) -> Result<NamedSystem> {
    if file.dim == 0 {
        bail!("dim must be at least 1");
    }
    if file.operators.is_empty() {
        bail!("a system needs at least one operator");
    }
    if file.seeds.is_empty() {
        bail!("a system needs at least one seed");
    }
    let sign_class = sign_class_from_str(&file.sign_class)?;
    let mut op_names = Vec::with_capacity(file.operators.len());
    let mut ops = Vec::with_capacity(file.operators.len());
    for op_file in &file.operators {
        check_name(&op_file.name, "operator")?;
        if op_names.contains(&op_file.name) {
            bail!("duplicate operator name {:?}", op_file.name);
        }
        let mut coeffs = Vec::with_capacity(op_file.coeffs.len());
        for coeff in &op_file.coeffs {
            for (label, idx) in [("k", coeff.k), ("i", coeff.i), ("j", coeff.j)] {
                if idx == 0 || idx > file.dim {
                    bail!(
                        "operator {:?}: index {label}={idx} out of range 1..={}",
                        op_file.name,
                        file.dim
                    );
                }
            }
            let c = parse_scalar(&coeff.c).with_context(|| {
                format!(
                    "operator {:?}: coefficient at (k={}, i={}, j={})",
                    op_file.name, coeff.k, coeff.i, coeff.j
                )
            })?;
            coeffs.push((coeff.k - 1, coeff.i - 1, coeff.j - 1, c));
        }
        ops.push(BilinearMap::from_coeffs(file.dim, coeffs)?);
        op_names.push(op_file.name.clone());
    }
    let mut seed_names = Vec::with_capacity(file.seeds.len());
    let mut seeds = Vec::with_capacity(file.seeds.len());
    for seed_file in &file.seeds {
        check_name(&seed_file.name, "seed")?;
        if seed_names.contains(&seed_file.name) {
            bail!("duplicate seed name {:?}", seed_file.name);
        }
        if seed_file.entries.len() != file.dim {
            bail!(
                "seed {:?} has {} entries, expected dim = {}",
                seed_file.name,
                seed_file.entries.len(),
                file.dim
            );
        }
        let entries = seed_file
            .entries
            .iter()
            .map(|e| {
                parse_scalar(e)
                    .with_context(|| format!("seed {:?}: entry {e:?}", seed_file.name))
            })
            .collect::<Result<Vec<_>>>()?;
        seeds.push(Vector::new(entries));
        seed_names.push(seed_file.name.clone());
    }
    let system = BilinearSystem::new(file.dim, ops, seeds, sign_class)
        .context("system file fails the sign-class invariants")?;
    Ok(NamedSystem {
        system,
        op_names,
        seed_names,
    })
}

/// Canonical text of a system file (pretty JSON, trailing newline).
pub fn render_system(named: &NamedSystem) -> String {
    let mut text = serde_json::to_string_pretty(&to_file(named)).expect("system files serialize");
    text.push('\n');
    text
}

/// Parses system-file text.
pub fn parse_system(text: &str) -> Result<NamedSystem> {
    let file: SystemFile = serde_json::from_str(text).context("system file is not valid JSON")?;
    from_file(&file)
}

/// Reads and parses a system file from disk.
pub fn read_system(path: &Path) -> Result<NamedSystem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read system file {}", path.display()))?;
    parse_system(&text).with_context(|| format!("in system file {}", path.display()))
}

/// Canonical text of a matrix file.
pub fn render_matrix(m: &Matrix) -> String {
    let rows = (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| format_scalar(m.get(i, j))).collect())
        .collect();
    let mut text =
        serde_json::to_string_pretty(&MatrixFile { rows }).expect("matrix files serialize");
    text.push('\n');
    text
}

/// Parses matrix-file text into a square matrix.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let file: MatrixFile = serde_json::from_str(text).context("matrix file is not valid JSON")?;
    let d = file.rows.len();
    if d == 0 {
        bail!("matrix file has no rows");
    }
    let mut rows = Vec::with_capacity(d);
    for (i, row) in file.rows.iter().enumerate() {
        if row.len() != d {
            bail!(
                "matrix row {} has {} entries, expected {d} (square matrix)",
                i + 1,
                row.len()
            );
        }
        let entries = row
            .iter()
            .map(|e| parse_scalar(e).with_context(|| format!("row {}: entry {e:?}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(entries);
    }
    Ok(Matrix::from_rows(rows)?)
}

/// Reads and parses a matrix file from disk.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read matrix file {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("in matrix file {}", path.display()))
}
