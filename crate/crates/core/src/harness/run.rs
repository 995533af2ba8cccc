use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

use super::config::{SweepPoint, ValidatedConfig};
use super::record::{truth_hash, ResultRecord};
use crate::channel::{sample_network_realization, CsiView};
use crate::metrics::sinrs;
use crate::optimizer::{search, SearchSpec};
use crate::ris::build_matrix;
use crate::rng::{trial_seed, StreamKind, TrialStreams};
use crate::{Error, Result};

/// Runs every (point, trial) cell and returns rows in (point, trial,
/// architecture, method) order. One realization per cell is shared by all
/// architectures and methods. Output is independent of `threads`.
pub fn run_trials(cfg: &ValidatedConfig, threads: Option<usize>) -> Result<Vec<ResultRecord>> {
    let jobs: Vec<(usize, u64)> = (0..cfg.points.len())
        .flat_map(|p| (0..cfg.config.trials).map(move |t| (p, t)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| run_cell(cfg, &cfg.points[p], t))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(rows.into_iter().flatten().collect())
}

fn run_cell(cfg: &ValidatedConfig, point: &SweepPoint, trial: u64) -> Result<Vec<ResultRecord>> {
    let seed = trial_seed(cfg.config.seed, point.id, trial);
    let streams = TrialStreams::new(seed);
    let real = sample_network_realization(&point.geometry, &point.fading, &point.csi, &streams)?;
    let hash = truth_hash(&real);
    let search_seed = streams.stream(StreamKind::Search, 0).next_u64();

    let mut rows = Vec::with_capacity(cfg.architectures.len() * cfg.methods.len());
    for arch in &cfg.architectures {
        let architecture = arch.resolve(point.cell);
        for &method in &cfg.methods {
            let spec = SearchSpec {
                architecture,
                objective: cfg.config.objective,
                method,
                budget: cfg.config.budget,
                seed: search_seed,
            };
            let started = Instant::now();
            let outcome = search(&spec, &real, &point.link);
            let elapsed = started.elapsed().as_secs_f64() * 1e3;

            let mut row = ResultRecord {
                point_id: point.id,
                elements: point.elements(),
                users: point.users(),
                cell_rows: point.cell.rows,
                cell_cols: point.cell.cols,
                kappa: point.fading.kappa,
                csi_p_db: point.csi_p_db,
                sigma2: point.link.noise_power(),
                powers: point.link.powers().to_vec(),
                trial,
                seed,
                arch: architecture.label(),
                method: method.label().to_string(),
                objective: spec.objective.label().to_string(),
                obj_est: None,
                obj_true: None,
                sinrs: Vec::new(),
                pattern: None,
                evaluations: 0,
                wall_ms: cfg.config.record_wall_time.then_some(elapsed),
                truth_hash: hash.clone(),
                refused: false,
            };
            match outcome {
                Ok(result) => {
                    let t = build_matrix(&result.best_pattern, point.elements())?;
                    row.sinrs = sinrs(&t, &real, &point.link, CsiView::Truth)?;
                    row.obj_est = Some(result.best_objective_on_estimates);
                    row.obj_true = Some(result.achieved_objective_on_truth);
                    row.pattern = Some(result.best_pattern.to_string());
                    row.evaluations = result.evaluations;
                }
                Err(Error::CapExceeded { .. }) => row.refused = true,
                Err(e) => return Err(e),
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Per point and (architecture, method): mean ± sample std of the
/// truth-evaluated objective over trials.
pub fn point_summary(records: &[ResultRecord]) -> String {
    let mut groups: BTreeMap<(u64, String, String), Vec<f64>> = BTreeMap::new();
    let mut refused: BTreeMap<(u64, String, String), usize> = BTreeMap::new();
    for r in records {
        let key = (r.point_id, r.arch.clone(), r.method.clone());
        match r.obj_true {
            Some(v) => groups.entry(key).or_default().push(v),
            None => *refused.entry(key).or_default() += 1,
        }
    }
    let mut out = String::new();
    for ((point, arch, method), values) in &groups {
        let (mean, std) = mean_std(values);
        let _ = writeln!(
            out,
            "point {point} {arch:>18} {method:>20}: {mean:.6} ± {std:.6} (n = {})",
            values.len()
        );
    }
    for ((point, arch, method), n) in &refused {
        let _ = writeln!(
            out,
            "point {point} {arch:>18} {method:>20}: refused ({n} trials)"
        );
    }
    out
}

/// Mean and sample standard deviation; the deviation of one value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
