use strent::gbm::{evaluate, BoostModel};

use super::{csv_text, emit};
use crate::args::EvalArgs;
use crate::error::CliError;
use crate::source::Source;
use crate::table::{read_matching, read_table, ClassMap};

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.model).map_err(|e| CliError::in_file(&args.model, e))?;
    let model = BoostModel::read_json(std::io::BufReader::new(file))
        .map_err(|e| CliError::in_file(&args.model, e))?;
    let source = Source::resolve(&args.structure)?;
    let structure = source.fixed()?;

    let table = match &model.feature_names {
        Some(names) => read_matching(&args.data, &args.label, names)?,
        None => read_table(&args.data, &args.label)?,
    };
    let classes = match &model.class_names {
        Some(names) => ClassMap::Named(names.clone()),
        None => ClassMap::Indexed(model.num_classes),
    };
    if let Some(rp) = &structure {
        if rp.num_classes() != model.num_classes {
            return Err(CliError::data(format!(
                "structure covers {} classes but the model has {}",
                rp.num_classes(),
                model.num_classes
            )));
        }
        if let (Some(a), Some(b)) = (source.class_names(), &model.class_names) {
            if a != b.as_slice() {
                return Err(CliError::data("structure class names differ from the model's"));
            }
        }
    }
    let data = classes.dataset(&table, &args.data)?;
    let report = evaluate(&model, &data, structure.as_ref())
        .map_err(|e| CliError::data(format!("{} vs {}: {e}", args.model.display(), args.data.display())))?;

    let mut rows = vec![
        ["metric".to_string(), "value".into()],
        ["num_rows".into(), report.num_rows.to_string()],
        ["log_loss".into(), report.log_loss.to_string()],
        ["accuracy".into(), report.accuracy.to_string()],
    ];
    if let Some(s) = report.structured_log_loss {
        rows.push(["structured_log_loss".into(), s.to_string()]);
    }
    for (i, a) in report.coarsened_accuracy.iter().enumerate() {
        rows.push([format!("coarsened_accuracy_{i}"), a.to_string()]);
    }
    emit(args.out.as_deref(), &csv_text(rows))
}
