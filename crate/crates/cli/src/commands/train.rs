use strent::gbm::{fit, staged_log_loss};
use strent::RngState;

use super::{boost_config, class_names, csv_text, emit, resolve_seed};
use crate::args::TrainArgs;
use crate::error::CliError;
use crate::source::Source;
use crate::table::{read_matching, read_table, ClassMap};

pub fn run(args: TrainArgs) -> Result<(), CliError> {
    let source = Source::resolve(&args.structure)?;
    let loss = source.single_loss()?;
    let seed = resolve_seed(args.boost.seed);

    let path = &args.data.data;
    let table = read_table(path, &args.data.label)?;
    let names = class_names(args.data.classes.as_deref(), &source)?;
    let classes = ClassMap::infer(names, source.num_classes(), &table)?;
    let train = classes.dataset(&table, path)?;
    let test = match &args.test_data {
        Some(p) => {
            let t = read_matching(p, &args.data.label, &table.feature_names)?;
            Some(classes.dataset(&t, p)?)
        }
        None => None,
    };

    let config = boost_config(&args.boost, args.max_depth, seed, loss);
    let model = fit(&train, &config, &mut RngState::from_seed(seed))?;
    let json = model.to_json()?;
    std::fs::write(&args.out, json).map_err(|e| CliError::in_file(&args.out, e))?;

    let test_loss = test
        .as_ref()
        .map(|t| staged_log_loss(&model, t))
        .transpose()?;
    let mut text = format!(
        "# seed={seed} loss={} rounds={} lr={} max_depth={} min_samples_leaf={} lambda={} hessian={}\n",
        config.loss.label(),
        config.num_rounds,
        config.learning_rate,
        config.max_depth,
        config.min_samples_leaf,
        config.lambda,
        args.boost.hessian,
    );
    let header = vec!["round".to_string(), "train_log_loss".into(), "test_log_loss".into()];
    let rows = model.train_log_loss.iter().enumerate().map(|(r, l)| {
        vec![
            (r + 1).to_string(),
            l.to_string(),
            test_loss.as_ref().map_or(String::new(), |t| t[r].to_string()),
        ]
    });
    text.push_str(&csv_text(std::iter::once(header).chain(rows)));
    let metrics = args
        .metrics
        .clone()
        .unwrap_or_else(|| args.out.with_extension("metrics.csv"));
    emit(Some(&metrics), &text)?;

    let last = model.train_log_loss.last().copied().unwrap_or(f64::NAN);
    println!(
        "seed={seed} rounds={} train_log_loss={last}{} model={} metrics={}",
        model.trees.len(),
        test_loss
            .as_ref()
            .and_then(|t| t.last())
            .map_or(String::new(), |l| format!(" test_log_loss={l}")),
        args.out.display(),
        metrics.display()
    );
    Ok(())
}
