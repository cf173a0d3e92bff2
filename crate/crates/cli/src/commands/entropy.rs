use strent::entropy::{shannon_entropy, structured_entropy};
use strent::{LogBase, ProbDist, RandomPartition};

use super::{class_names, csv_text, emit};
use crate::args::EntropyArgs;
use crate::error::CliError;
use crate::source::Source;
use crate::table::{read_table, ClassMap};

pub fn run(args: EntropyArgs) -> Result<(), CliError> {
    let source = Source::resolve(&args.structure)?;
    let structure = source.fixed()?;
    let names = class_names(args.classes.as_deref(), &source)?;

    let (dist, classes) = match (&args.dist, &args.data) {
        (Some(p), _) => {
            let dist = ProbDist::new(p.clone()).map_err(|e| CliError::usage(format!("--dist: {e}")))?;
            let classes = match names {
                Some(n) => ClassMap::Named(n.to_vec()),
                None => ClassMap::Indexed(dist.len()),
            };
            (dist, classes)
        }
        (None, Some(path)) => {
            let table = read_table(path, &args.label)?;
            let k = structure.as_ref().map(RandomPartition::num_classes);
            let classes = ClassMap::infer(names, k, &table)?;
            let labels = classes.resolve(&table, path)?;
            (ProbDist::from_counts(&labels, classes.num_classes())?, classes)
        }
        (None, None) => unreachable!("clap requires --dist or --data"),
    };
    if classes.num_classes() != dist.len() {
        return Err(CliError::data(format!(
            "{} class names for a distribution over {} classes",
            classes.num_classes(),
            dist.len()
        )));
    }
    let structure = match structure {
        Some(rp) => rp,
        None => RandomPartition::trivial(dist.len())?,
    };
    if structure.num_classes() != dist.len() {
        return Err(CliError::data(format!(
            "structure covers {} classes but the distribution has {}",
            structure.num_classes(),
            dist.len()
        )));
    }

    let mut rows: Vec<[String; 3]> = vec![["quantity".into(), "block".into(), "value".into()]];
    let mut scalar = |name: &str, v: f64| rows.push([name.into(), String::new(), v.to_string()]);
    scalar("num_classes", dist.len() as f64);
    scalar("shannon_entropy_nats", shannon_entropy(&dist, LogBase::Natural));
    scalar("shannon_entropy_bits", shannon_entropy(&dist, LogBase::Two));
    scalar("structured_entropy_nats", structured_entropy(&dist, &structure, LogBase::Natural)?);
    scalar("structured_entropy_bits", structured_entropy(&dist, &structure, LogBase::Two)?);
    let blocks = structure.random_block_dist(&dist)?;
    for (block, p) in blocks.blocks.iter().zip(&blocks.probs) {
        let members: Vec<String> = block.iter().map(|&c| classes.label(c)).collect();
        rows.push(["random_block".into(), members.join(" "), p.to_string()]);
    }
    emit(args.out.as_deref(), &csv_text(rows))
}
