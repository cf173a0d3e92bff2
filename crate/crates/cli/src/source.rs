//! Turns structure flags into random partitions and loss specifications.

use std::path::Path;

use strent::entropy::three_state_structure;
use strent::gbm::LossSpec;
use strent::structure::{circular_structure, hierarchy_structure};
use strent::{Graph, HierarchySpec, RandomPartition};

use crate::args::StructureArgs;
use crate::error::CliError;
use crate::structure_file::StructureFile;

const BUILTIN_CIFAR100: &str = "builtin:cifar100";

#[derive(Debug, Clone)]
pub enum Source {
    /// No structure flag: the trivial random partition.
    Standard,
    /// One fixed random partition.
    Fixed {
        structure: RandomPartition,
        classes: Option<Vec<String>>,
    },
    /// Circular structures, one per singleton weight.
    Circular {
        k: usize,
        window: usize,
        p0: Vec<f64>,
    },
    /// Per-round graph draws, one loss per (partition size, singleton weight).
    Graph {
        graph: Graph,
        sizes: Vec<usize>,
        p0: Vec<f64>,
    },
}

impl Source {
    pub fn resolve(args: &StructureArgs) -> Result<Self, CliError> {
        let wants_p0 = args.circular.is_some() || args.graph.is_some();
        if !wants_p0 && !args.p0.is_empty() {
            return Err(CliError::usage("--p0 applies only to --circular or --graph"));
        }
        if wants_p0 && args.p0.is_empty() {
            return Err(CliError::usage("--circular and --graph need --p0"));
        }
        if let Some(bad) = args.p0.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(CliError::usage(format!("--p0 {bad} is outside [0, 1]")));
        }
        if let Some(path) = &args.structure {
            let (structure, classes) = StructureFile::load(path)?;
            return Ok(Source::Fixed { structure, classes });
        }
        if let Some(h) = &args.hierarchy {
            let spec = if h == BUILTIN_CIFAR100 {
                HierarchySpec::cifar100()
            } else {
                let path = Path::new(h);
                let file = std::fs::File::open(path).map_err(|e| CliError::in_file(path, e))?;
                HierarchySpec::from_csv(file).map_err(|e| CliError::in_file(path, e))?
            };
            let levels = spec.num_levels();
            let weights = match &args.level_weights {
                Some(w) => w.clone(),
                None => vec![1.0 / levels as f64; levels],
            };
            let structure = hierarchy_structure(&spec, &weights)
                .map_err(|e| CliError::usage(format!("--level-weights: {e}")))?;
            return Ok(Source::Fixed {
                structure,
                classes: Some(spec.class_names),
            });
        }
        if let Some(q1) = args.three_state {
            let structure =
                three_state_structure(q1).map_err(|e| CliError::usage(format!("--three-state: {e}")))?;
            return Ok(Source::Fixed {
                structure,
                classes: None,
            });
        }
        if let Some((k, window)) = args.circular {
            circular_structure(k, window, args.p0[0])
                .map_err(|e| CliError::usage(format!("--circular {k},{window}: {e}")))?;
            return Ok(Source::Circular {
                k,
                window,
                p0: args.p0.clone(),
            });
        }
        if let Some(path) = &args.graph {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::in_file(path, e))?;
            let graph = Graph::parse(&text).map_err(|e| CliError::in_file(path, e))?;
            if !graph.is_connected() {
                return Err(CliError::in_file(path, "graph is not connected"));
            }
            if args.partition_size.is_empty() {
                return Err(CliError::usage("--graph needs --partition-size"));
            }
            let k = graph.num_vertices();
            if let Some(m) = args.partition_size.iter().find(|&&m| m == 0 || m > k) {
                return Err(CliError::usage(format!(
                    "--partition-size {m} must lie between 1 and the {k} graph vertices"
                )));
            }
            return Ok(Source::Graph {
                graph,
                sizes: args.partition_size.clone(),
                p0: args.p0.clone(),
            });
        }
        Ok(Source::Standard)
    }

    pub fn class_names(&self) -> Option<&[String]> {
        match self {
            Source::Fixed {
                classes: Some(c), ..
            } => Some(c),
            _ => None,
        }
    }

    pub fn num_classes(&self) -> Option<usize> {
        match self {
            Source::Standard => None,
            Source::Fixed { structure, .. } => Some(structure.num_classes()),
            Source::Circular { k, .. } => Some(*k),
            Source::Graph { graph, .. } => Some(graph.num_vertices()),
        }
    }

    /// Every structured loss named by the flags, with a column label each.
    pub fn losses(&self, paired: bool) -> Result<Vec<(String, LossSpec)>, CliError> {
        Ok(match self {
            Source::Standard => vec![],
            Source::Fixed { structure, .. } => vec![(
                "structure".into(),
                LossSpec::Fixed {
                    structure: structure.clone(),
                },
            )],
            Source::Circular { k, window, p0 } => p0
                .iter()
                .map(|&p| {
                    Ok((
                        format!("p0={p}"),
                        LossSpec::Fixed {
                            structure: circular_structure(*k, *window, p)?,
                        },
                    ))
                })
                .collect::<Result<_, CliError>>()?,
            Source::Graph { graph, sizes, p0 } => {
                let pairs: Vec<(usize, f64)> = if paired {
                    if sizes.len() != p0.len() {
                        return Err(CliError::usage(format!(
                            "--paired needs as many partition sizes as p0 values ({} vs {})",
                            sizes.len(),
                            p0.len()
                        )));
                    }
                    sizes.iter().copied().zip(p0.iter().copied()).collect()
                } else {
                    sizes
                        .iter()
                        .flat_map(|&m| p0.iter().map(move |&p| (m, p)))
                        .collect()
                };
                pairs
                    .into_iter()
                    .map(|(m, p)| {
                        (
                            format!("m={m} p0={p}"),
                            LossSpec::Variable {
                                graph: graph.clone(),
                                partition_size: m,
                                p0: p,
                            },
                        )
                    })
                    .collect()
            }
        })
    }

    /// The single loss for a training run.
    pub fn single_loss(&self) -> Result<LossSpec, CliError> {
        let mut losses = self.losses(false)?;
        match losses.len() {
            0 => Ok(LossSpec::Standard),
            1 => Ok(losses.remove(0).1),
            n => Err(CliError::usage(format!(
                "training takes one structure, but the flags describe {n}; use `sweep` for grids"
            ))),
        }
    }

    /// A fixed random partition for scoring, if the flags name one.
    pub fn fixed(&self) -> Result<Option<RandomPartition>, CliError> {
        match self.single_loss()? {
            LossSpec::Standard => Ok(None),
            LossSpec::Fixed { structure } => Ok(Some(structure)),
            LossSpec::Variable { .. } => Err(CliError::usage(
                "graph structures are redrawn during training; score with a fixed structure \
                 (generate one with `gen-structure --graph`)",
            )),
        }
    }
}
