//! Runtime sweeps over shapes, codebook sizes and methods.

use lattice_itc::{extract_points, run_kmeans, run_lattice, run_reference, GridField64, Method, RunTrace64};

use crate::cluster::{build_params, finish, ClusterConfig, Source};
use crate::error::{HarnessError, Result};
use crate::synth::{synth_shape, ShapeSpec};

pub const DEFAULT_REPETITIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub shapes: Vec<ShapeSpec>,
    pub m_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    /// Repetition `r` uses seed `seed_base + r`.
    pub seed_base: u64,
    pub radius_factor: f64,
    pub max_iter: usize,
}

impl BenchSpec {
    pub fn new(shapes: Vec<ShapeSpec>, m_values: Vec<usize>, methods: Vec<Method>) -> Self {
        Self {
            shapes,
            m_values,
            methods,
            repetitions: DEFAULT_REPETITIONS,
            seed_base: 0,
            radius_factor: lattice_itc::DEFAULT_RADIUS_FACTOR,
            max_iter: lattice_itc::params::DEFAULT_MAX_ITER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(HarnessError::Usage("repetitions must be at least 1".into()));
        }
        if self.shapes.is_empty() || self.m_values.is_empty() || self.methods.is_empty() {
            return Err(HarnessError::Usage("shape, m and method sweeps must be nonempty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub shape: String,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub rep: usize,
    pub iterations: usize,
    /// Setup (density or data potential precomputation) plus the loop.
    pub total_seconds: f64,
    /// Loop time over the number of updates.
    pub seconds_per_iter: f64,
    pub initial_objective: f64,
    pub final_objective: f64,
}

/// Runs one method on an already rasterized mask.
pub fn run_method(
    mask: &GridField64,
    method: Method,
    cfg: &ClusterConfig,
) -> Result<RunTrace64> {
    let n = mask.count_nonzero();
    let params = build_params(n, cfg)?;
    Ok(match method {
        Method::ItcLattice => run_lattice(mask, cfg.m, &params, None)?.1,
        Method::ItcReference => run_reference(&extract_points(mask)?, cfg.m, &params)?.1,
        Method::Kmeans => run_kmeans(&extract_points(mask)?, cfg.m, cfg.seed, cfg.max_iter)?.trace,
    })
}

/// Runs every `(shape, m, method)` cell `repetitions` times, in that nesting
/// order, calling `on_row` as each run finishes.
pub fn run_bench(spec: &BenchSpec, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for shape in &spec.shapes {
        let mask = synth_shape(shape)?;
        let n = mask.count_nonzero();
        for &m in &spec.m_values {
            for &method in &spec.methods {
                for rep in 0..spec.repetitions {
                    let mut cfg = ClusterConfig::new(Source::Synth(*shape), method, m);
                    cfg.seed = spec.seed_base + rep as u64;
                    cfg.radius_factor = spec.radius_factor;
                    cfg.max_iter = spec.max_iter;
                    let trace = run_method(&mask, method, &cfg)?;
                    let row = BenchRow {
                        shape: shape.to_string(),
                        n,
                        m,
                        method,
                        rep,
                        iterations: trace.iterations,
                        total_seconds: trace.total_seconds(),
                        seconds_per_iter: trace.seconds_per_iteration(),
                        initial_objective: trace.initial_objective().unwrap_or(f64::NAN),
                        final_objective: trace.final_objective().unwrap_or(f64::NAN),
                    };
                    on_row(&row);
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

pub const BENCH_HEADER: [&str; 8] = [
    "shape",
    "n",
    "m",
    "method",
    "rep",
    "iterations",
    "total_seconds",
    "seconds_per_iter",
];

pub fn bench_csv(rows: &[BenchRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.shape.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.method.to_string(),
            r.rep.to_string(),
            r.iterations.to_string(),
            format!("{:.9}", r.total_seconds),
            format!("{:.9}", r.seconds_per_iter),
        ])?;
    }
    finish(w)
}

/// Mean `seconds_per_iter` of the rows matching `method`, `n` and `m`.
pub fn mean_seconds_per_iter(rows: &[BenchRow], method: Method, n: usize, m: usize) -> Option<f64> {
    let sel: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method && r.n == n && r.m == m)
        .map(|r| r.seconds_per_iter)
        .collect();
    if sel.is_empty() {
        None
    } else {
        Some(sel.iter().sum::<f64>() / sel.len() as f64)
    }
}
