//! Solve-time benchmark across instance sizes.
//!
//! Instance generation and parsing happen outside the timed region; only
//! `global_solver::solve` is measured. With a fixed seed the instances are
//! identical across repeats, so the spread reflects timer noise alone.

use std::hint::black_box;
use std::time::Instant;

use osbrp_core::global_solver;
use osbrp_core::instance_io::{generate, GenerateError, GeneratorConfig, InitialStockPolicy};
use serde::Serialize;

const STATION_CAPACITY: i64 = 20;
const DEMAND_RANGE: (i64, i64) = (-10, 10);
const VEHICLE_CAPACITY_RANGE: (i64, i64) = (0, 8);

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Horizon lengths to measure, strictly increasing.
    pub sizes: Vec<usize>,
    /// Visits per instance.
    pub visits: usize,
    /// Timed solves per size, at least 3.
    pub repeats: usize,
    /// Base seed; size index `i` uses `seed + i`.
    pub seed: u64,
}

#[derive(Debug)]
pub enum BenchConfigError {
    NoSizes,
    SizesNotIncreasing { index: usize, size: usize, previous: usize },
    TooFewRepeats { repeats: usize },
    Generate(GenerateError),
}

impl std::fmt::Display for BenchConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BenchConfigError::NoSizes => write!(f, "at least one size is required"),
            BenchConfigError::SizesNotIncreasing {
                index,
                size,
                previous,
            } => write!(
                f,
                "sizes must be strictly increasing, but sizes[{index}] = {size} <= {previous}"
            ),
            BenchConfigError::TooFewRepeats { repeats } => {
                write!(f, "at least 3 repeats are required, got {repeats}")
            }
            BenchConfigError::Generate(e) => write!(f, "generating a bench instance: {e}"),
        }
    }
}

impl std::error::Error for BenchConfigError {}

/// Wall-time statistics of one size, in nanoseconds.
#[derive(Debug, Clone, Serialize)]
pub struct SizeMeasurement {
    pub epochs: usize,
    pub visits: usize,
    pub repeats: usize,
    pub min_ns: u64,
    pub median_ns: u64,
    pub max_ns: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub measurements: Vec<SizeMeasurement>,
    /// `median_ns` of each size divided by the previous size's; empty for a
    /// single size.
    pub ratios: Vec<f64>,
    /// Median of `ratios`; absent for a single size.
    pub median_doubling_ratio: Option<f64>,
}

pub fn run(config: &BenchConfig) -> Result<BenchReport, BenchConfigError> {
    if config.sizes.is_empty() {
        return Err(BenchConfigError::NoSizes);
    }
    for (index, window) in config.sizes.windows(2).enumerate() {
        if window[1] <= window[0] {
            return Err(BenchConfigError::SizesNotIncreasing {
                index: index + 1,
                size: window[1],
                previous: window[0],
            });
        }
    }
    if config.repeats < 3 {
        return Err(BenchConfigError::TooFewRepeats {
            repeats: config.repeats,
        });
    }

    let mut measurements = Vec::with_capacity(config.sizes.len());
    for (index, &size) in config.sizes.iter().enumerate() {
        let instance = generate(&GeneratorConfig {
            epochs: size,
            visit_count: config.visits.min(size),
            station_capacity: STATION_CAPACITY,
            demand_range: DEMAND_RANGE,
            vehicle_capacity_range: VEHICLE_CAPACITY_RANGE,
            seed: config.seed + index as u64,
            initial_stock_policy: InitialStockPolicy::Uniform,
        })
        .map_err(BenchConfigError::Generate)?;

        // One unmeasured warm-up so page faults and lazy allocations do not
        // land in the first sample.
        black_box(global_solver::solve(&instance));

        let mut samples = Vec::with_capacity(config.repeats);
        for _ in 0..config.repeats {
            let start = Instant::now();
            let solution = global_solver::solve(&instance);
            let elapsed = start.elapsed();
            black_box(solution);
            samples.push(elapsed.as_nanos() as u64);
        }
        samples.sort_unstable();
        measurements.push(SizeMeasurement {
            epochs: size,
            visits: config.visits.min(size),
            repeats: config.repeats,
            min_ns: samples[0],
            median_ns: median_u64(&samples),
            max_ns: samples[samples.len() - 1],
        });
    }

    let ratios: Vec<f64> = measurements
        .windows(2)
        .map(|pair| pair[1].median_ns as f64 / pair[0].median_ns.max(1) as f64)
        .collect();
    let median_doubling_ratio = median_f64(&ratios);

    Ok(BenchReport {
        measurements,
        ratios,
        median_doubling_ratio,
    })
}

/// Middle element of a sorted slice, averaging the two central elements for
/// even lengths.
fn median_u64(sorted: &[u64]) -> u64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    }
}

fn median_f64(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

pub fn render_report(report: &BenchReport) -> String {
    let mut out = String::new();
    for m in &report.measurements {
        out.push_str(&format!(
            "epochs {}: median {:.3} ms, min {:.3} ms, max {:.3} ms (visits {}, repeats {})\n",
            m.epochs,
            m.median_ns as f64 / 1e6,
            m.min_ns as f64 / 1e6,
            m.max_ns as f64 / 1e6,
            m.visits,
            m.repeats,
        ));
    }
    for (pair, ratio) in report.measurements.windows(2).zip(&report.ratios) {
        out.push_str(&format!(
            "ratio {}/{}: {:.2}\n",
            pair[1].epochs, pair[0].epochs, ratio
        ));
    }
    if let Some(median) = report.median_doubling_ratio {
        out.push_str(&format!("median doubling ratio: {median:.2}\n"));
    }
    out
}
