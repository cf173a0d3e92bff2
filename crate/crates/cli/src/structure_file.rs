//! JSON structure files: a weighted list of partitions over named or indexed
//! classes.
//!
//! ```json
//! {
//!   "classes": ["jan", "feb", "mar", "apr"],
//!   "partitions": [[["jan"], ["feb"], ["mar"], ["apr"]], [[0, 1], [2, 3]]],
//!   "weights": [0.5, 0.5]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use strent::{Partition, RandomPartition};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<String>>,
    pub partitions: Vec<Vec<Vec<ClassRef>>>,
    pub weights: Vec<f64>,
    /// Seed of the draw that produced a sampled structure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl StructureFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::in_file(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::in_file(path, e))
    }

    /// Builds the file for `rp`, writing members by name when `classes` is given.
    pub fn from_structure(rp: &RandomPartition, classes: Option<&[String]>, seed: Option<u64>) -> Self {
        let member = |c: usize| match classes {
            Some(names) => ClassRef::Name(names[c].clone()),
            None => ClassRef::Index(c),
        };
        StructureFile {
            classes: classes.map(<[String]>::to_vec),
            partitions: rp
                .partitions()
                .iter()
                .map(|p| {
                    p.blocks()
                        .iter()
                        .map(|b| b.iter().map(|&c| member(c)).collect())
                        .collect()
                })
                .collect(),
            weights: rp.weights().to_vec(),
            seed,
        }
    }

    /// JSON with one partition per line.
    pub fn to_json(&self) -> String {
        let mut fields = Vec::new();
        if let Some(c) = &self.classes {
            fields.push(format!("  \"classes\": {}", compact(c)));
        }
        let partitions: Vec<String> = self
            .partitions
            .iter()
            .map(|p| format!("    {}", compact(p)))
            .collect();
        fields.push(format!("  \"partitions\": [\n{}\n  ]", partitions.join(",\n")));
        fields.push(format!("  \"weights\": {}", compact(&self.weights)));
        if let Some(seed) = self.seed {
            fields.push(format!("  \"seed\": {seed}"));
        }
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }

    fn index_of(&self, r: &ClassRef) -> Result<usize, String> {
        match (r, &self.classes) {
            (ClassRef::Index(i), Some(names)) if *i >= names.len() => {
                Err(format!("class index {i} out of range for {} classes", names.len()))
            }
            (ClassRef::Index(i), _) => Ok(*i),
            (ClassRef::Name(n), Some(names)) => names
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| format!("unknown class '{n}'")),
            (ClassRef::Name(n), None) => {
                Err(format!("class '{n}' is named but the file has no 'classes' list"))
            }
        }
    }

    /// Number of classes: the length of `classes`, else one past the largest index.
    pub fn num_classes(&self) -> usize {
        match &self.classes {
            Some(names) => names.len(),
            None => self
                .partitions
                .iter()
                .flatten()
                .flatten()
                .filter_map(|r| match r {
                    ClassRef::Index(i) => Some(i + 1),
                    ClassRef::Name(_) => None,
                })
                .max()
                .unwrap_or(0),
        }
    }

    pub fn to_structure(&self) -> Result<RandomPartition, String> {
        let k = self.num_classes();
        let partitions = self
            .partitions
            .iter()
            .enumerate()
            .map(|(t, blocks)| {
                let blocks = blocks
                    .iter()
                    .map(|b| b.iter().map(|r| self.index_of(r)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("partition {t}: {e}"))?;
                Partition::new(blocks, k).map_err(|e| format!("partition {t}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RandomPartition::new(partitions, self.weights.clone()).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<(RandomPartition, Option<Vec<String>>), CliError> {
        let file = Self::read(path)?;
        let rp = file.to_structure().map_err(|e| CliError::in_file(path, e))?;
        Ok((rp, file.classes))
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("structure file serializes")
}
