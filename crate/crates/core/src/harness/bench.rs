//! Wall-clock scaling of the shallow sampler against CC-C on the same kind
//! of circuit: depth fixed, `m = n²` modes.

use std::time::Instant;

use serde::Serialize;

use super::{fit_slope, Algorithm, SETUP_STREAM};
use crate::error::Result;
use crate::photonics::{compose_circuit, random_shallow_circuit};
use crate::samplers::{sample_cc_c, sample_rng, sample_shallow, Sample, ShallowPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub depth: usize,
    pub shallow_ns: Vec<usize>,
    pub cc_c_ns: Vec<usize>,
    /// Each timed batch holds at least this many samples...
    pub min_samples: usize,
    /// ...and lasts at least this long.
    pub min_seconds: f64,
    /// Timed batches per cell.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            depth: 2,
            shallow_ns: (4..=16).collect(),
            cc_c_ns: (10..=22).collect(),
            min_samples: 5,
            min_seconds: 0.02,
            repeats: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub depth: usize,
    pub samples: usize,
    /// Mean seconds per sample over all batches.
    pub mean_seconds: f64,
    /// Spread of the per-batch means.
    pub stddev_seconds: f64,
    /// Circuit composition and plan construction, not included above.
    pub prep_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Slope of log time against log n for the shallow sampler.
    pub shallow_loglog_slope: f64,
    /// Slope of log time against log n for CC-C.
    pub cc_c_loglog_slope: f64,
    /// Slope of log time against n for CC-C.
    pub cc_c_semilog_slope: f64,
}

impl BenchReport {
    /// Largest `stddev / mean` over all cells.
    pub fn max_relative_spread(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.stddev_seconds / r.mean_seconds)
            .fold(0.0, f64::max)
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("algorithm,n,m,depth,samples,mean_seconds,stddev_seconds,prep_seconds\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{:.6e},{:.6e},{:.6e}\n",
                r.algorithm,
                r.n,
                r.m,
                r.depth,
                r.samples,
                r.mean_seconds,
                r.stddev_seconds,
                r.prep_seconds
            ));
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "shallow log-log slope {:.3}\ncc-c log-log slope {:.3}\ncc-c semi-log slope {:.4} (ln 2 = {:.4})\nlargest relative spread {:.3}\n",
            self.shallow_loglog_slope,
            self.cc_c_loglog_slope,
            self.cc_c_semilog_slope,
            std::f64::consts::LN_2,
            self.max_relative_spread()
        )
    }

    fn series(&self, algorithm: Algorithm) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| (r.n as f64, r.mean_seconds.ln()))
            .unzip()
    }
}

fn time_cell<G: FnMut(u64) -> Result<Sample>>(
    cfg: &BenchConfig,
    mut draw: G,
) -> Result<(usize, f64, f64)> {
    // One untimed batch first so caches and allocations settle.
    let mut index = 0u64;
    for _ in 0..cfg.min_samples {
        draw(index)?;
        index += 1;
    }
    let warmup = index;
    let mut means = Vec::with_capacity(cfg.repeats);
    for _ in 0..cfg.repeats.max(1) {
        let start = Instant::now();
        let mut count = 0usize;
        while count < cfg.min_samples || start.elapsed().as_secs_f64() < cfg.min_seconds {
            draw(index)?;
            index += 1;
            count += 1;
        }
        means.push(start.elapsed().as_secs_f64() / count as f64);
    }
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / means.len() as f64;
    Ok(((index - warmup) as usize, mean, var.sqrt()))
}

/// Time both samplers on single threads across the configured grids.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for (algorithm, ns) in [
        (Algorithm::Shallow, &cfg.shallow_ns),
        (Algorithm::CcC, &cfg.cc_c_ns),
    ] {
        for &n in ns {
            let m = n * n;
            let prep = Instant::now();
            let spec =
                random_shallow_circuit(m, cfg.depth, &mut sample_rng(cfg.seed, SETUP_STREAM))?;
            let circuit = compose_circuit::<f64>(&spec)?;
            let (samples, mean, sd, prep_seconds) = if algorithm == Algorithm::Shallow {
                let plan = ShallowPlan::new(&circuit, n)?;
                let prep_seconds = prep.elapsed().as_secs_f64();
                let (s, mean, sd) =
                    time_cell(cfg, |i| sample_shallow(&plan, &mut sample_rng(cfg.seed, i)))?;
                (s, mean, sd, prep_seconds)
            } else {
                let prep_seconds = prep.elapsed().as_secs_f64();
                let u = &circuit.unitary;
                let (s, mean, sd) =
                    time_cell(cfg, |i| sample_cc_c(u, n, &mut sample_rng(cfg.seed, i)))?;
                (s, mean, sd, prep_seconds)
            };
            rows.push(BenchRow {
                algorithm,
                n,
                m,
                depth: cfg.depth,
                samples,
                mean_seconds: mean,
                stddev_seconds: sd,
                prep_seconds,
            });
        }
    }
    let mut report = BenchReport {
        rows,
        shallow_loglog_slope: f64::NAN,
        cc_c_loglog_slope: f64::NAN,
        cc_c_semilog_slope: f64::NAN,
    };
    let (ns, ts) = report.series(Algorithm::Shallow);
    if ns.len() >= 2 {
        let log_ns: Vec<f64> = ns.iter().map(|x| x.ln()).collect();
        report.shallow_loglog_slope = fit_slope(&log_ns, &ts);
    }
    let (ns, ts) = report.series(Algorithm::CcC);
    if ns.len() >= 2 {
        let log_ns: Vec<f64> = ns.iter().map(|x| x.ln()).collect();
        report.cc_c_loglog_slope = fit_slope(&log_ns, &ts);
        report.cc_c_semilog_slope = fit_slope(&ns, &ts);
    }
    Ok(report)
}
