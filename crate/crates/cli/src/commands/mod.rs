mod entropy;
mod eval;
mod gen_structure;
mod sweep;
mod train;

use std::io::Write;
use std::path::Path;

use strent::gbm::{BoostConfig, LossSpec};

pub use entropy::run as entropy;
pub use eval::run as eval;
pub use gen_structure::run as gen_structure;
pub use sweep::run as sweep;
pub use train::run as train;

use crate::args::BoostArgs;
use crate::error::CliError;
use crate::source::Source;

/// Writes `text` to `path`, or to standard output when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::in_file(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::data(format!("stdout: {e}"))),
    }
}

/// Renders rows as comma-separated text, quoting where needed.
fn csv_text<I, R>(rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| strent::RngState::from_entropy().seed())
}

fn boost_config(args: &BoostArgs, max_depth: usize, seed: u64, loss: LossSpec) -> BoostConfig {
    BoostConfig {
        num_rounds: args.rounds,
        learning_rate: args.lr,
        max_depth,
        min_samples_leaf: args.min_samples_leaf,
        lambda: args.lambda,
        seed,
        loss,
        hessian: args.hessian.into(),
        allow_single_class: false,
    }
}

/// Class names from `--classes`, else from the structure source.
fn class_names<'a>(
    explicit: Option<&'a [String]>,
    source: &'a Source,
) -> Result<Option<&'a [String]>, CliError> {
    match (explicit, source.class_names()) {
        (Some(a), Some(b)) if a != b => Err(CliError::data(
            "--classes disagrees with the class list of the structure",
        )),
        (Some(a), _) => Ok(Some(a)),
        (None, b) => Ok(b),
    }
}

fn fmt_list<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
