//! Simulation sweeps over `(n, rep)` with one random stream per task.

use std::time::Instant;

use blockbeta_core::hull::convex_hull;
use blockbeta_core::predict_rate;
use blockbeta_core::sampler::{BlockBetaSampler, RngStream};
use log::{debug, warn};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Observable};
use crate::error::{CliError, Result};
use crate::record::{aggregate, Prediction, RawRow, RunRecord, VERSION_TAG};

/// Hull failures (probability zero) are retried on fresh sub-streams.
pub const MAX_ATTEMPTS: u64 = 4;

/// Stream of task `(n_index, rep)` on attempt `a`: `a·2⁴⁸ + n_index·2³² + rep`.
pub fn stream_index(n_index: usize, rep: usize, attempt: u64) -> u64 {
    (attempt << 48) | ((n_index as u64) << 32) | rep as u64
}

fn run_task(
    cfg: &ExperimentConfig,
    sampler: &BlockBetaSampler,
    vol_z: f64,
    n_index: usize,
    rep: usize,
) -> Result<RawRow> {
    let n = cfg.n_grid[n_index];
    let mut last_err = None;
    for attempt in 0..MAX_ATTEMPTS {
        let stream = stream_index(n_index, rep, attempt);
        let mut rng = RngStream::new(cfg.root_seed, stream);
        let cloud = sampler.sample_cloud(&mut rng, n);
        match convex_hull(&cloud) {
            Ok(hull) => {
                let volume_deficit = cfg.wants(Observable::VolumeDeficit).then(|| vol_z - hull.volume);
                debug!("n={n} rep={rep} f={:?}", hull.f_vector);
                return Ok(RawRow { n, rep, f_vector: hull.f_vector, volume_deficit, seed_stream: stream });
            }
            Err(e) => {
                warn!("n={n} rep={rep} stream={stream}: {e}; retrying on the next sub-stream");
                last_err = Some(e);
            }
        }
    }
    Err(last_err.expect("at least one attempt").into())
}

/// Runs every `(n, rep)` task. Results do not depend on the worker count.
pub fn simulate(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunRecord> {
    cfg.validate()?;
    let bs = cfg.blocks()?;
    let bp = cfg.beta_params()?;
    let sampler = BlockBetaSampler::new(&bs, &bp)?;
    let vol_z = bs.container_volume();
    let tasks: Vec<(usize, usize)> =
        (0..cfg.n_grid.len()).flat_map(|i| (0..cfg.reps_per_n).map(move |r| (i, r))).collect();

    let start = Instant::now();
    let threads = workers.or(cfg.workers).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<RawRow> = pool
        .install(|| tasks.par_iter().map(|&(i, r)| run_task(cfg, &sampler, vol_z, i, r)).collect::<Result<Vec<_>>>())?;
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let predicted = predict_rate(&bs, &bp).ok().map(|p| Prediction {
        exponent: p.exponent,
        log_power: p.log_power,
        formula: p.to_string(),
    });
    let dim = bs.total();
    Ok(RunRecord {
        version: VERSION_TAG.to_string(),
        config: cfg.clone(),
        config_hash: cfg.hash(),
        dim,
        predicted,
        aggregates: aggregate(&rows, dim),
        rows,
        wall_clock_seconds,
        csv_sha256: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::write_csv;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(vec![2, 1]);
        cfg.n_grid = vec![10, 30, 90];
        cfg.reps_per_n = 3;
        cfg.root_seed = 17;
        cfg.observables = vec![Observable::FVector, Observable::VolumeDeficit];
        cfg
    }

    #[test]
    fn rows_are_ordered_and_complete() {
        let rec = simulate(&small(), Some(2)).unwrap();
        assert_eq!(rec.rows.len(), 9);
        assert_eq!(rec.rows[4].n, 30);
        assert_eq!(rec.rows[4].rep, 1);
        assert_eq!(rec.rows[4].seed_stream, stream_index(1, 1, 0));
        assert!(rec.rows.iter().all(|r| r.volume_deficit.unwrap() > 0.0));
        assert_eq!(rec.aggregates.len(), 3);
        assert!((rec.predicted.as_ref().unwrap().exponent - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let a = simulate(&small(), Some(1)).unwrap();
        let b = simulate(&small(), Some(3)).unwrap();
        assert_eq!(write_csv(&a.rows, a.dim).unwrap(), write_csv(&b.rows, b.dim).unwrap());
    }

    #[test]
    fn stream_layout() {
        assert_eq!(stream_index(0, 0, 0), 0);
        assert_eq!(stream_index(2, 5, 1), (1 << 48) + (2 << 32) + 5);
    }
}
