use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use strent::gbm::HessianKind;

#[derive(Debug, Parser)]
#[command(
    name = "strent",
    version,
    about = "Structured entropy and structured-loss gradient boosting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a booster and write the model and per-round metrics.
    Train(TrainArgs),
    /// Score a saved model on a dataset.
    Eval(EvalArgs),
    /// Mean test log loss over a grid of structures, train sizes and seeds.
    Sweep(SweepArgs),
    /// Shannon and structured entropy of a distribution.
    Entropy(EntropyArgs),
    /// Write a structure file from a circular, hierarchy or graph source.
    GenStructure(GenStructureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training data: delimited text with a header row.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Name of the label column.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Class names in index order, for labels that are names.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub classes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(group(
    ArgGroup::new("source")
        .args(["structure", "hierarchy", "circular", "graph", "three_state"])
        .multiple(false)
))]
pub struct StructureArgs {
    /// JSON structure file.
    #[arg(long, value_name = "PATH")]
    pub structure: Option<PathBuf>,
    /// Class hierarchy table (class column first, one column per level), or
    /// `builtin:cifar100`.
    #[arg(long, value_name = "PATH")]
    pub hierarchy: Option<String>,
    /// Hierarchy level weights, identity level first. Defaults to equal weights.
    #[arg(long, value_delimiter = ',', requires = "hierarchy", value_name = "W")]
    pub level_weights: Option<Vec<f64>>,
    /// Circular structure over K classes with blocks of WINDOW neighbours.
    #[arg(long, value_name = "K,WINDOW", value_parser = parse_circular)]
    pub circular: Option<(usize, usize)>,
    /// Edge-list graph whose connected partitions are resampled each round.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Three-class structure with singleton weight Q1 and block {0,1} | {2}.
    #[arg(long, value_name = "Q1")]
    pub three_state: Option<f64>,
    /// Singleton-partition weight(s).
    #[arg(long, value_delimiter = ',', value_name = "P0")]
    pub p0: Vec<f64>,
    /// Number of connected blocks per graph draw.
    #[arg(long, value_delimiter = ',', requires = "graph", value_name = "M")]
    pub partition_size: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hessian {
    Fisher,
    ClampedExact,
}

impl std::fmt::Display for Hessian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

impl From<Hessian> for HessianKind {
    fn from(h: Hessian) -> Self {
        match h {
            Hessian::Fisher => HessianKind::Fisher,
            Hessian::ClampedExact => HessianKind::ClampedExact,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoostArgs {
    /// Boosting rounds.
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    /// Learning rate.
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    /// L2 penalty on leaf values.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Minimum rows per leaf.
    #[arg(long, default_value_t = 5)]
    pub min_samples_leaf: usize,
    /// Curvature used for leaf values and split gains.
    #[arg(long, value_enum, default_value_t = Hessian::Fisher)]
    pub hessian: Hessian,
    /// Random seed. Drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Held-out data scored after every round.
    #[arg(long, value_name = "PATH")]
    pub test_data: Option<PathBuf>,
    #[command(flatten)]
    pub structure: StructureArgs,
    #[command(flatten)]
    pub boost: BoostArgs,
    /// Maximum tree depth.
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    /// Model output path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Per-round metrics path. Defaults to the model path with extension
    /// `metrics.csv`.
    #[arg(long, value_name = "PATH")]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Data to score.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Name of the label column.
    #[arg(long, default_value = "label")]
    pub label: String,
    #[command(flatten)]
    pub structure: StructureArgs,
    /// Report path. Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Held-out data used for every cell.
    #[arg(long, value_name = "PATH")]
    pub test_data: PathBuf,
    #[command(flatten)]
    pub structure: StructureArgs,
    #[command(flatten)]
    pub boost: BoostArgs,
    /// Depths tried per cell; the lowest mean test loss is reported.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub max_depth: Vec<usize>,
    /// Seeds per cell.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Training subsample sizes. Defaults to the full training set.
    #[arg(long, value_delimiter = ',', value_name = "N")]
    pub train_sizes: Vec<usize>,
    /// Pair the i-th partition size with the i-th p0 instead of crossing them.
    #[arg(long, requires = "graph")]
    pub paired: bool,
    /// Results table path. Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Per-trial long-format results.
    #[arg(long, value_name = "PATH")]
    pub detail: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").args(["dist", "data"]).required(true)))]
pub struct EntropyArgs {
    /// Class probabilities.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_name = "P")]
    pub dist: Option<Vec<f64>>,
    /// Data whose label frequencies give the distribution.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Name of the label column.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Class names in index order, for labels that are names.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub classes: Option<Vec<String>>,
    #[command(flatten)]
    pub structure: StructureArgs,
    /// Report path. Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenStructureArgs {
    #[command(flatten)]
    pub structure: StructureArgs,
    /// Class names in index order.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub classes: Option<Vec<String>>,
    /// Seed for graph draws. Drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path. Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_circular(s: &str) -> Result<(usize, usize), String> {
    let (k, w) = s
        .split_once(',')
        .ok_or_else(|| format!("expected K,WINDOW, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("'{v}': {e}"))
    };
    Ok((parse(k)?, parse(w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_shapes() {
        Cli::command_for_tests().debug_assert();
        assert_eq!(parse_circular("12,3"), Ok((12, 3)));
        assert!(parse_circular("12").is_err());
        let cli = Cli::try_parse_from([
            "strent", "sweep", "--data", "a.csv", "--test-data", "b.csv", "--graph", "g.txt",
            "--partition-size", "5,10", "--p0", "0.1,0.5", "--max-depth", "2,3",
        ])
        .unwrap();
        let Command::Sweep(s) = cli.command else { panic!() };
        assert_eq!(s.structure.partition_size, [5, 10]);
        assert_eq!(s.max_depth, [2, 3]);
        assert!(Cli::try_parse_from([
            "strent", "train", "--data", "a", "--out", "m", "--circular", "12,3", "--graph", "g"
        ])
        .is_err());
    }

    impl Cli {
        fn command_for_tests() -> clap::Command {
            <Cli as clap::CommandFactory>::command()
        }
    }
}
