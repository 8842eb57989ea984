//! Command line front end for the `itc` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lattice_itc::Method;

use crate::bench::{bench_csv, run_bench, BenchSpec};
use crate::cluster::{cluster_to_files, ClusterConfig, Source, Weighting};
use crate::error::{HarnessError, Result};
use crate::netpbm::write_file;
use crate::synth::ShapeSpec;

#[derive(Debug, Parser)]
#[command(name = "itc", version, about = "Information-theoretic clustering of binary images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster one image and write codebook, labels, trace (and density).
    Cluster(ClusterArgs),
    /// Time methods over a sweep of synthetic shapes and codebook sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// PBM or PGM input image.
    #[arg(long, value_name = "PATH", conflicts_with = "synth", required_unless_present = "synth")]
    pub input: Option<PathBuf>,
    /// Synthetic shape, e.g. disk:8@64x64.
    #[arg(long, value_name = "SPEC")]
    pub synth: Option<ShapeSpec>,
    #[arg(long, default_value = "itc-lattice")]
    pub method: Method,
    /// Number of codebook vectors.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    /// Codebook kernel width; defaults to sqrt(N/M)/2.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Data kernel width; defaults to omega/2.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = lattice_itc::DEFAULT_RADIUS_FACTOR)]
    pub radius_factor: f64,
    /// none, chamfer, or a PGM weight map.
    #[arg(long, default_value = "none", value_name = "none|chamfer|FILE")]
    pub weighted: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = lattice_itc::params::DEFAULT_MAX_ITER as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,
    #[arg(long, value_name = "PATH")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated shape specs.
    #[arg(long, value_delimiter = ',', required = true)]
    pub shapes: Vec<ShapeSpec>,
    /// Comma-separated codebook sizes.
    #[arg(long = "m", value_delimiter = ',', required = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub m_values: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "itc-ref,itc-lattice,kmeans")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = crate::bench::DEFAULT_REPETITIONS as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub repetitions: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long, default_value_t = lattice_itc::DEFAULT_RADIUS_FACTOR)]
    pub radius_factor: f64,
    #[arg(long, default_value_t = lattice_itc::params::DEFAULT_MAX_ITER as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

impl std::str::FromStr for Weighting {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => Weighting::None,
            "chamfer" => Weighting::Chamfer,
            path => Weighting::File(PathBuf::from(path)),
        })
    }
}

impl ClusterArgs {
    pub fn config(&self) -> Result<ClusterConfig> {
        let source = match (&self.input, &self.synth) {
            (Some(p), None) => Source::File(p.clone()),
            (None, Some(s)) => Source::Synth(*s),
            _ => return Err(HarnessError::Usage("give exactly one of --input and --synth".into())),
        };
        let mut cfg = ClusterConfig::new(source, self.method, self.m as usize);
        cfg.omega = self.omega;
        cfg.xi = self.xi;
        cfg.radius_factor = self.radius_factor;
        cfg.weighting = self.weighted.parse()?;
        cfg.seed = self.seed;
        cfg.max_iter = self.max_iter as usize;
        Ok(cfg)
    }
}

impl BenchArgs {
    pub fn spec(&self) -> BenchSpec {
        let mut spec = BenchSpec::new(
            self.shapes.clone(),
            self.m_values.iter().map(|&m| m as usize).collect(),
            self.methods.clone(),
        );
        spec.repetitions = self.repetitions as usize;
        spec.seed_base = self.seed_base;
        spec.radius_factor = self.radius_factor;
        spec.max_iter = self.max_iter as usize;
        spec
    }
}

/// Caps the global worker pool at `ITC_THREADS` when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("ITC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| HarnessError::Usage(format!("ITC_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| HarnessError::Usage(format!("cannot configure {n} worker threads: {e}")))
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Cluster(args) => {
            let cfg = args.config()?;
            cluster_to_files(&cfg, &args.out_prefix)?;
        }
        Command::Bench(args) => {
            let spec = args.spec();
            let mut stderr = std::io::stderr();
            let rows = run_bench(&spec, |r| {
                let _ = writeln!(
                    stderr,
                    "{} m={} {} rep {}: {} iterations, {:.6} s/iter",
                    r.shape, r.m, r.method, r.rep, r.iterations, r.seconds_per_iter
                );
            })?;
            write_file(&args.out, &bench_csv(&rows)?)?;
        }
    }
    Ok(())
}
