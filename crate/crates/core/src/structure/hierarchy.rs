use std::io::Read;

use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::partition::{Partition, RandomPartition};

const CIFAR100_HIERARCHY: &str = include_str!("assets/cifar100_hierarchy.csv");

/// Leveled label maps. Each level assigns a group label to every class; the
/// identity level is implicit and not stored. Levels need not be nested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub class_names: Vec<String>,
    pub level_names: Vec<String>,
    /// `levels[l][class]` is the group label of `class` at level `l + 1`.
    pub levels: Vec<Vec<String>>,
}

impl HierarchySpec {
    pub fn new(
        class_names: Vec<String>,
        level_names: Vec<String>,
        levels: Vec<Vec<String>>,
    ) -> Result<Self, StructureError> {
        let k = class_names.len();
        if k == 0 {
            return Err(StructureError::EmptyGraph);
        }
        if level_names.len() != levels.len() {
            return Err(StructureError::Parse {
                line: 1,
                message: format!("{} level names for {} levels", level_names.len(), levels.len()),
            });
        }
        for (l, level) in levels.iter().enumerate() {
            if let Some(class) = (0..k).find(|&c| level.get(c).is_none_or(|g| g.is_empty())) {
                return Err(StructureError::IncompleteLevelMap { level: l + 1, class });
            }
            if level.len() > k {
                return Err(StructureError::IncompleteLevelMap { level: l + 1, class: k });
            }
        }
        Ok(HierarchySpec {
            class_names,
            level_names,
            levels,
        })
    }

    /// Reads a delimited table with a header row: the first column names the
    /// class, each further column gives its group at one level.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, StructureError> {
        let mut rdr = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.is_empty() {
            return Err(StructureError::Parse {
                line: 1,
                message: "missing header".into(),
            });
        }
        let level_names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut class_names = Vec::new();
        let mut levels = vec![Vec::new(); level_names.len()];
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let class = class_names.len();
            class_names.push(record.get(0).unwrap_or_default().to_owned());
            for (l, level) in levels.iter_mut().enumerate() {
                match record.get(l + 1) {
                    Some(g) if !g.is_empty() => level.push(g.to_owned()),
                    _ => return Err(StructureError::IncompleteLevelMap { level: l + 1, class }),
                }
            }
        }
        HierarchySpec::new(class_names, level_names, levels)
    }

    /// CIFAR-100 class -> superclass -> category -> supercategory maps.
    pub fn cifar100() -> Self {
        Self::from_csv(CIFAR100_HIERARCHY.as_bytes()).expect("bundled hierarchy is valid")
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Number of levels including the implicit identity level.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// Partition induced by level `l` (0 is the singleton partition).
    pub fn level_partition(&self, l: usize) -> Result<Partition, StructureError> {
        if l == 0 {
            return Ok(Partition::singleton(self.num_classes())?);
        }
        let level = self
            .levels
            .get(l - 1)
            .ok_or(StructureError::IncompleteLevelMap { level: l, class: 0 })?;
        Ok(Partition::from_assignment(level)?)
    }
}

fn csv_error(e: csv::Error) -> StructureError {
    StructureError::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}

/// One partition per level (identity first), weighted by `weights`.
pub fn hierarchy_structure(
    spec: &HierarchySpec,
    weights: &[f64],
) -> Result<RandomPartition, StructureError> {
    if weights.len() != spec.num_levels() {
        return Err(StructureError::InvalidWeights(format!(
            "{} weights for {} levels",
            weights.len(),
            spec.num_levels()
        )));
    }
    let partitions = (0..spec.num_levels())
        .map(|l| spec.level_partition(l))
        .collect::<Result<Vec<_>, _>>()?;
    RandomPartition::new(partitions, weights.to_vec())
        .map_err(|e| StructureError::InvalidWeights(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn cifar_levels() {
        let spec = HierarchySpec::cifar100();
        assert_eq!(spec.num_classes(), 100);
        assert_eq!(spec.num_levels(), 4);
        let rp = hierarchy_structure(&spec, &[0.25; 4]).unwrap();
        let sizes: Vec<usize> = rp.partitions().iter().map(Partition::num_blocks).collect();
        assert_eq!(sizes, vec![100, 20, 8, 4]);
        // every superclass holds five classes
        assert!(rp.partitions()[1].blocks().iter().all(|b| b.len() == 5));
        let maple = spec.class_names.iter().position(|c| c == "maple_tree").unwrap();
        let oak = spec.class_names.iter().position(|c| c == "oak_tree").unwrap();
        let trout = spec.class_names.iter().position(|c| c == "trout").unwrap();
        let sc = &rp.partitions()[1];
        assert_eq!(sc.coarsen_label(maple), sc.coarsen_label(oak));
        assert_ne!(sc.coarsen_label(maple), sc.coarsen_label(trout));
    }

    #[test]
    fn identity_only() {
        let spec = HierarchySpec::new(names(&["a", "b", "c"]), vec![], vec![]).unwrap();
        assert_eq!(
            hierarchy_structure(&spec, &[1.0]).unwrap(),
            RandomPartition::trivial(3).unwrap()
        );
    }

    #[test]
    fn two_level() {
        let spec = HierarchySpec::new(
            names(&["w", "x", "y", "z"]),
            names(&["group"]),
            vec![names(&["a", "a", "b", "b"])],
        )
        .unwrap();
        let rp = hierarchy_structure(&spec, &[0.5, 0.5]).unwrap();
        assert_eq!(rp.partitions()[0], Partition::singleton(4).unwrap());
        assert_eq!(rp.partitions()[1].blocks(), &[vec![0, 1], vec![2, 3]]);
        assert!(matches!(
            hierarchy_structure(&spec, &[1.0]),
            Err(StructureError::InvalidWeights(_))
        ));
        assert!(matches!(
            hierarchy_structure(&spec, &[0.7, 0.7]),
            Err(StructureError::InvalidWeights(_))
        ));
    }

    #[test]
    fn incomplete_levels() {
        let err = HierarchySpec::new(
            names(&["w", "x", "y"]),
            names(&["g"]),
            vec![names(&["a", ""])],
        )
        .unwrap_err();
        assert_eq!(err, StructureError::IncompleteLevelMap { level: 1, class: 1 });
        let csv = "class,g\nw,a\nx,\n";
        assert_eq!(
            HierarchySpec::from_csv(csv.as_bytes()).unwrap_err(),
            StructureError::IncompleteLevelMap { level: 1, class: 1 }
        );
    }
}
