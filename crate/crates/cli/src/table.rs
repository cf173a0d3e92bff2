//! Delimited-text datasets: one header row, one label column, numeric features.

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::Array2;
use strent::gbm::Dataset;

use crate::error::CliError;

/// A parsed dataset whose labels are still raw strings.
#[derive(Debug, Clone)]
pub struct Table {
    pub feature_names: Vec<String>,
    pub features: Array2<f64>,
    pub labels: Vec<String>,
    /// 1-based source line of each row.
    pub lines: Vec<u64>,
}

pub fn read_table(path: &Path, label: &str) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::in_file(path, e))?;
    let header = rdr.headers().map_err(|e| CliError::in_file(path, e))?.clone();
    let Some(label_col) = header.iter().position(|h| h == label) else {
        return Err(CliError::data(format!(
            "{}: label column '{label}' not found; columns are: {}",
            path.display(),
            header.iter().collect::<Vec<_>>().join(", ")
        )));
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.to_owned())
        .collect();
    let d = feature_names.len();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::in_file(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(CliError::data(format!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                header.len(),
                record.len()
            )));
        }
        for (i, field) in record.iter().enumerate() {
            if i == label_col {
                if field.is_empty() {
                    return Err(CliError::data(format!("{}:{line}: empty label", path.display())));
                }
                labels.push(field.to_owned());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                CliError::data(format!(
                    "{}:{line}: column '{}' value '{field}' is not numeric",
                    path.display(),
                    header.get(i).unwrap_or_default()
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::data(format!(
                    "{}:{line}: column '{}' value '{field}' is not finite",
                    path.display(),
                    header.get(i).unwrap_or_default()
                )));
            }
            values.push(v);
        }
        lines.push(line);
    }
    if labels.is_empty() {
        return Err(CliError::data(format!("{}: no data rows", path.display())));
    }
    let features = Array2::from_shape_vec((labels.len(), d), values).expect("row lengths checked");
    Ok(Table {
        feature_names,
        features,
        labels,
        lines,
    })
}

/// How raw labels map to class indices.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassMap {
    /// Labels are names; the index is the position in the list.
    Named(Vec<String>),
    /// Labels are integers in `0..k`.
    Indexed(usize),
}

impl ClassMap {
    pub fn num_classes(&self) -> usize {
        match self {
            ClassMap::Named(names) => names.len(),
            ClassMap::Indexed(k) => *k,
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        match self {
            ClassMap::Named(names) => Some(names),
            ClassMap::Indexed(_) => None,
        }
    }

    /// Picks a map for `table`: explicit names first, then integer labels
    /// (widened to `num_classes` if given), then the sorted distinct labels
    /// when nothing fixes the class count.
    pub fn infer(
        names: Option<&[String]>,
        num_classes: Option<usize>,
        table: &Table,
    ) -> Result<Self, CliError> {
        if let Some(names) = names {
            let unique: BTreeSet<&String> = names.iter().collect();
            if unique.len() != names.len() {
                return Err(CliError::data("class names must be distinct"));
            }
            if let Some(k) = num_classes.filter(|&k| k != names.len()) {
                return Err(CliError::data(format!(
                    "{} class names given for a structure over {k} classes",
                    names.len()
                )));
            }
            return Ok(ClassMap::Named(names.to_vec()));
        }
        let numeric: Option<Vec<usize>> = table.labels.iter().map(|l| l.parse().ok()).collect();
        if let Some(ids) = numeric {
            let needed = ids.iter().max().map_or(0, |m| m + 1);
            return Ok(ClassMap::Indexed(num_classes.unwrap_or(0).max(needed)));
        }
        if num_classes.is_some() {
            return Err(CliError::data(
                "labels are not class indices; name the classes with --classes or a structure file 'classes' list",
            ));
        }
        let distinct: BTreeSet<&String> = table.labels.iter().collect();
        Ok(ClassMap::Named(distinct.into_iter().cloned().collect()))
    }

    pub fn resolve(&self, table: &Table, path: &Path) -> Result<Vec<usize>, CliError> {
        table
            .labels
            .iter()
            .zip(&table.lines)
            .map(|(label, line)| {
                let found = match self {
                    ClassMap::Named(names) => names.iter().position(|n| n == label),
                    ClassMap::Indexed(k) => label.parse::<usize>().ok().filter(|y| y < k),
                };
                found.ok_or_else(|| {
                    CliError::data(format!(
                        "{}:{line}: label '{label}' is not one of the {} classes",
                        path.display(),
                        self.num_classes()
                    ))
                })
            })
            .collect()
    }

    pub fn dataset(&self, table: &Table, path: &Path) -> Result<Dataset, CliError> {
        let labels = self.resolve(table, path)?;
        let mut data = Dataset::new(table.features.clone(), labels, self.num_classes())?
            .with_feature_names(table.feature_names.clone())?;
        if let Some(names) = self.names() {
            data = data.with_class_names(names.to_vec())?;
        }
        Ok(data)
    }

    /// Display name of class `c`.
    pub fn label(&self, c: usize) -> String {
        match self {
            ClassMap::Named(names) => names[c].clone(),
            ClassMap::Indexed(_) => c.to_string(),
        }
    }
}

/// Loads `path` and checks that its feature columns match `expected`.
pub fn read_matching(
    path: &Path,
    label: &str,
    expected: &[String],
) -> Result<Table, CliError> {
    let table = read_table(path, label)?;
    if table.feature_names != expected {
        return Err(CliError::data(format!(
            "{}: feature columns [{}] do not match the model's [{}]",
            path.display(),
            table.feature_names.join(", "),
            expected.join(", ")
        )));
    }
    Ok(table)
}
