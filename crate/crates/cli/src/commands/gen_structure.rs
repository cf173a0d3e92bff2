use strent::gbm::LossSpec;
use strent::structure::variable_random_partition;
use strent::RngState;

use super::{class_names, emit, resolve_seed};
use crate::args::GenStructureArgs;
use crate::error::CliError;
use crate::source::Source;
use crate::structure_file::StructureFile;

pub fn run(args: GenStructureArgs) -> Result<(), CliError> {
    let source = Source::resolve(&args.structure)?;
    let names = class_names(args.classes.as_deref(), &source)?;
    let (structure, seed) = match source.single_loss()? {
        LossSpec::Standard => {
            return Err(CliError::usage(
                "name a structure source: --circular, --hierarchy, --graph, --structure or --three-state",
            ))
        }
        LossSpec::Fixed { structure } => (structure, None),
        LossSpec::Variable {
            graph,
            partition_size,
            p0,
        } => {
            let seed = resolve_seed(args.seed);
            let rp = variable_random_partition(&graph, partition_size, p0, &mut RngState::from_seed(seed))?;
            (rp, Some(seed))
        }
    };
    if let Some(n) = names.filter(|n| n.len() != structure.num_classes()) {
        return Err(CliError::data(format!(
            "{} class names for a structure over {} classes",
            n.len(),
            structure.num_classes()
        )));
    }
    let file = StructureFile::from_structure(&structure, names, seed);
    emit(args.out.as_deref(), &file.to_json())
}
