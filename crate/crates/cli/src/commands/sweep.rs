use rand::seq::index::sample;
use rayon::prelude::*;
use strent::gbm::{evaluate, fit, Dataset, LossSpec};
use strent::RngState;

use super::{boost_config, class_names, csv_text, emit, fmt_list, resolve_seed};
use crate::args::SweepArgs;
use crate::error::CliError;
use crate::source::Source;
use crate::table::{read_matching, read_table, ClassMap};

/// Trial `t` fits with stream `2t` (so a one-trial sweep on the full data
/// matches `train` with the same seed) and subsamples with stream `2t + 1`.
fn fit_rng(seed: u64, trial: usize) -> RngState {
    RngState::with_stream(seed, 2 * trial as u64)
}

fn subsample_rng(seed: u64, trial: usize) -> RngState {
    RngState::with_stream(seed, 2 * trial as u64 + 1)
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if args.max_depth.is_empty() || args.max_depth.contains(&0) {
        return Err(CliError::usage("--max-depth values must be at least 1"));
    }
    let source = Source::resolve(&args.structure)?;
    let mut configs = vec![("standard".to_string(), LossSpec::Standard)];
    configs.extend(source.losses(args.paired)?);
    let seed = resolve_seed(args.boost.seed);

    let path = &args.data.data;
    let table = read_table(path, &args.data.label)?;
    let names = class_names(args.data.classes.as_deref(), &source)?;
    let classes = ClassMap::infer(names, source.num_classes(), &table)?;
    let train = classes.dataset(&table, path)?;
    let test_table = read_matching(&args.test_data, &args.data.label, &table.feature_names)?;
    let test = classes.dataset(&test_table, &args.test_data)?;

    let n = train.num_rows();
    let sizes = if args.train_sizes.is_empty() {
        vec![n]
    } else {
        args.train_sizes.clone()
    };
    if let Some(s) = sizes.iter().find(|&&s| s < 2 || s > n) {
        return Err(CliError::data(format!(
            "train size {s} must lie between 2 and the {n} available rows"
        )));
    }
    // subsets[size][trial], shared by every configuration
    let subsets: Vec<Vec<Dataset>> = sizes
        .iter()
        .map(|&size| {
            (0..args.trials)
                .map(|t| {
                    if size == n {
                        return train.clone();
                    }
                    let mut rows = sample(&mut subsample_rng(seed, t), n, size).into_vec();
                    rows.sort_unstable();
                    train.subset(&rows)
                })
                .collect()
        })
        .collect();

    let depths = &args.max_depth;
    let jobs: Vec<(usize, usize, usize, usize)> = (0..sizes.len())
        .flat_map(|s| {
            (0..configs.len()).flat_map(move |c| {
                (0..depths.len()).flat_map(move |d| (0..args.trials).map(move |t| (s, c, d, t)))
            })
        })
        .collect();
    let losses: Vec<f64> = jobs
        .par_iter()
        .map(|&(s, c, d, t)| {
            let config = boost_config(&args.boost, depths[d], seed, configs[c].1.clone());
            let model = fit(&subsets[s][t], &config, &mut fit_rng(seed, t)).map_err(|e| {
                CliError::data(format!("train size {} trial {t} {}: {e}", sizes[s], configs[c].0))
            })?;
            Ok(evaluate(&model, &test, None)?.log_loss)
        })
        .collect::<Result<_, CliError>>()?;

    // losses are grouped by (size, config, depth) in runs of `trials`
    let means: Vec<f64> = losses
        .chunks(args.trials)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let best = |s: usize, c: usize| {
        let base = (s * configs.len() + c) * depths.len();
        means[base..base + depths.len()]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };

    let mut text = format!(
        "# seed={seed} trials={} max_depth={} rounds={} lr={} lambda={} hessian={}\n",
        args.trials,
        fmt_list(depths),
        args.boost.rounds,
        args.boost.lr,
        args.boost.lambda,
        args.boost.hessian
    );
    let header = std::iter::once("train_size".to_string()).chain(configs.iter().map(|c| c.0.clone()));
    let rows = sizes.iter().enumerate().map(|(s, size)| {
        std::iter::once(size.to_string())
            .chain((0..configs.len()).map(|c| best(s, c).to_string()))
            .collect::<Vec<_>>()
    });
    text.push_str(&csv_text(std::iter::once(header.collect::<Vec<_>>()).chain(rows)));
    emit(args.out.as_deref(), &text)?;

    if let Some(detail) = &args.detail {
        let header = ["train_size", "config", "max_depth", "trial", "test_log_loss"].map(String::from);
        let rows = jobs.iter().zip(&losses).map(|(&(s, c, d, t), l)| {
            [
                sizes[s].to_string(),
                configs[c].0.clone(),
                depths[d].to_string(),
                t.to_string(),
                l.to_string(),
            ]
        });
        emit(Some(detail), &format!("# seed={seed}\n{}", csv_text(std::iter::once(header).chain(rows))))?;
    }
    Ok(())
}
