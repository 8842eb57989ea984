//! One clustering job: load or synthesize a mask, run a method, render outputs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lattice_itc::{
    chamfer_transform, default_params, density_from_mask, extract_points, run_kmeans, run_lattice,
    run_reference, segment, weighted_density, Codebook64, GridField64, ItcParams64, LabelMap, Method,
    RunTrace64, WeightMap, BACKGROUND,
};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::netpbm::{self, SaveMode};
use crate::synth::{synth_shape, ShapeSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synth(ShapeSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weighting {
    None,
    Chamfer,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub source: Source,
    pub method: Method,
    pub m: usize,
    /// Overrides the size policy when set; `xi` defaults to `omega / 2`.
    pub omega: Option<f64>,
    pub xi: Option<f64>,
    pub radius_factor: f64,
    pub weighting: Weighting,
    pub seed: u64,
    pub max_iter: usize,
}

impl ClusterConfig {
    pub fn new(source: Source, method: Method, m: usize) -> Self {
        Self {
            source,
            method,
            m,
            omega: None,
            xi: None,
            radius_factor: lattice_itc::DEFAULT_RADIUS_FACTOR,
            weighting: Weighting::None,
            seed: 0,
            max_iter: lattice_itc::params::DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub mask: GridField64,
    pub codebook: Codebook64,
    pub trace: RunTrace64,
    pub labels: LabelMap,
    /// Data density, lattice method only.
    pub density: Option<GridField64>,
    /// SHA-256 of the input file, or of the P4 encoding of a synthetic mask.
    pub digest: String,
}

pub fn load_source(source: &Source) -> Result<(GridField64, String)> {
    match source {
        Source::File(path) => {
            let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
            let mask = netpbm::decode(&bytes)?.to_mask();
            Ok((mask, hex_digest(&bytes)))
        }
        Source::Synth(spec) => {
            let mask = synth_shape(spec)?;
            let digest = hex_digest(&netpbm::encode_field(&mask, SaveMode::Binary));
            Ok((mask, digest))
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Policy parameters for `n` data points, with the config's overrides applied.
pub fn build_params(n: usize, cfg: &ClusterConfig) -> Result<ItcParams64> {
    let policy = default_params::<f64>(n, cfg.m)?;
    let omega = cfg.omega.unwrap_or(policy.omega());
    let xi = cfg.xi.unwrap_or(if cfg.omega.is_some() { omega / 2.0 } else { policy.xi() });
    let params = ItcParams64::new(xi, omega)?
        .with_seed(cfg.seed)
        .with_max_iter(cfg.max_iter)
        .with_radius_factor(cfg.radius_factor);
    params.validate()?;
    Ok(params)
}

fn weight_field(mask: &GridField64, weighting: &Weighting) -> Result<Option<GridField64>> {
    Ok(match weighting {
        Weighting::None => None,
        Weighting::Chamfer => Some(chamfer_transform(mask)?.into_field()),
        Weighting::File(path) => Some(netpbm::load_gray_image(path)?),
    })
}

pub fn run_cluster(cfg: &ClusterConfig) -> Result<ClusterRun> {
    if cfg.weighting != Weighting::None && cfg.method != Method::ItcLattice {
        return Err(HarnessError::Usage(format!(
            "--weighted applies to itc-lattice only, not {}",
            cfg.method
        )));
    }
    let (mask, digest) = load_source(&cfg.source)?;
    let n = mask.count_nonzero();
    if n == 0 {
        return Err(lattice_itc::ItcError::EmptyImage.into());
    }
    let params = build_params(n, cfg)?;
    log::info!("input sha256 {digest}, {n} foreground cells");

    let (codebook, mut trace, density) = match cfg.method {
        Method::ItcLattice => {
            let weights = weight_field(&mask, &cfg.weighting)?;
            let (code, trace) = run_lattice(&mask, cfg.m, &params, weights.as_ref())?;
            let density = match &weights {
                None => density_from_mask(&mask, params.xi(), params.radius_factor)?,
                Some(w) => weighted_density(&WeightMap::external(w, &mask)?, params.xi(), params.radius_factor)?,
            };
            (code, trace, Some(density))
        }
        Method::ItcReference => {
            let (code, trace) = run_reference(&extract_points(&mask)?, cfg.m, &params)?;
            (code, trace, None)
        }
        Method::Kmeans => {
            let r = run_kmeans(&extract_points(&mask)?, cfg.m, cfg.seed, cfg.max_iter)?;
            (r.centers, r.trace, None)
        }
    };
    trace.echo("input_sha256", &digest);
    trace.echo(
        "weighted",
        match &cfg.weighting {
            Weighting::None => "none".to_string(),
            Weighting::Chamfer => "chamfer".to_string(),
            Weighting::File(p) => p.display().to_string(),
        },
    );
    for (k, v) in &trace.config {
        log::info!("{} {k}={v}", trace.method);
    }
    let labels = segment(&mask, &codebook)?;
    Ok(ClusterRun {
        mask,
        codebook,
        trace,
        labels,
        density,
        digest,
    })
}

pub fn codebook_csv(code: &Codebook64) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "u", "v"])?;
    for (k, p) in code.as_slice().iter().enumerate() {
        w.write_record([k.to_string(), format!("{:.6}", p.u), format!("{:.6}", p.v)])?;
    }
    finish(w)
}

/// `iter,seconds,d_cs`; for k-means the last column carries the inertia.
pub fn trace_csv(trace: &RunTrace64) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iter", "seconds", "d_cs"])?;
    for r in &trace.records {
        w.write_record([
            r.iteration.to_string(),
            format!("{:.9}", r.seconds),
            format!("{:.12e}", r.objective),
        ])?;
    }
    finish(w)
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| HarnessError::Csv(csv::Error::from(e.into_error())))
}

/// Gray level of label `k` out of `m`: 255 down to 1, background 0.
pub fn label_gray(label: i32, m: usize) -> u8 {
    if label == BACKGROUND {
        return 0;
    }
    let span = (m - 1).max(1);
    (255 - label as usize * 254 / span) as u8
}

pub fn labels_pgm(labels: &LabelMap, m: usize) -> Vec<u8> {
    let pixels: Vec<u8> = labels.labels.iter().map(|&l| label_gray(l, m)).collect();
    netpbm::encode_pgm(labels.width, labels.height, &pixels)
}

pub fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>-codebook.csv`, `<prefix>-labels.pgm`, `<prefix>-trace.csv`
/// and, for the lattice method, `<prefix>-density.pgm`.
pub fn write_outputs(run: &ClusterRun, prefix: &Path) -> Result<Vec<PathBuf>> {
    let mut files = vec![
        (output_path(prefix, "-codebook.csv"), codebook_csv(&run.codebook)?),
        (output_path(prefix, "-labels.pgm"), labels_pgm(&run.labels, run.codebook.len())),
        (output_path(prefix, "-trace.csv"), trace_csv(&run.trace)?),
    ];
    if let Some(d) = &run.density {
        files.push((
            output_path(prefix, "-density.pgm"),
            netpbm::encode_field(d, SaveMode::GrayNormalized),
        ));
    }
    for (path, bytes) in &files {
        netpbm::write_file(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Runs a job and writes its outputs, logging the elapsed time.
pub fn cluster_to_files(cfg: &ClusterConfig, prefix: &Path) -> Result<ClusterRun> {
    let start = Instant::now();
    let run = run_cluster(cfg)?;
    write_outputs(&run, prefix)?;
    log::info!(
        "{} finished after {} iterations in {:.3}s",
        cfg.method,
        run.trace.iterations,
        start.elapsed().as_secs_f64()
    );
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_levels() {
        assert_eq!(label_gray(BACKGROUND, 5), 0);
        assert_eq!(label_gray(0, 1), 255);
        assert_eq!(label_gray(0, 3), 255);
        assert_eq!(label_gray(2, 3), 1);
        let levels: Vec<u8> = (0..255).map(|k| label_gray(k, 255)).collect();
        assert!(levels.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn codebook_rows() {
        let code = Codebook64::new(vec![
            lattice_itc::Position::new(1.0, 2.5),
            lattice_itc::Position::new(-0.1234567, 3.0),
        ])
        .unwrap();
        let text = String::from_utf8(codebook_csv(&code).unwrap()).unwrap();
        assert_eq!(text, "k,u,v\n0,1.000000,2.500000\n1,-0.123457,3.000000\n");
    }

    #[test]
    fn prefix_suffix() {
        assert_eq!(output_path(Path::new("out/run"), "-trace.csv"), PathBuf::from("out/run-trace.csv"));
    }

    #[test]
    fn weighting_needs_lattice() {
        let mut cfg = ClusterConfig::new(Source::Synth("disk:4@16x16".parse().unwrap()), Method::Kmeans, 2);
        cfg.weighting = Weighting::Chamfer;
        assert!(matches!(run_cluster(&cfg), Err(HarnessError::Usage(_))));
    }

    #[test]
    fn omega_override_sets_xi() {
        let mut cfg = ClusterConfig::new(Source::Synth("disk:4@16x16".parse().unwrap()), Method::ItcLattice, 2);
        cfg.omega = Some(3.0);
        let p = build_params(40, &cfg).unwrap();
        assert_eq!((p.omega(), p.xi()), (3.0, 1.5));
        cfg.omega = None;
        let p = build_params(400, &cfg).unwrap();
        assert!((p.omega() - 7.0710678).abs() < 1e-6);
    }
}
