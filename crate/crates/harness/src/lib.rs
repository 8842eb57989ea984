//! Netpbm codecs, synthetic shapes, the clustering job runner and the
//! benchmark sweep behind the `itc` command line tool.

pub mod bench;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod netpbm;
pub mod synth;

pub use bench::{run_bench, BenchRow, BenchSpec};
pub use cluster::{run_cluster, write_outputs, ClusterConfig, ClusterRun, Source, Weighting};
pub use error::{HarnessError, Result};
pub use netpbm::{load_binary_image, save_field, SaveMode};
pub use synth::{synth, synth_shape, ShapeKind, ShapeSpec};
