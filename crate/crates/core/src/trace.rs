//! Per-iteration run records shared by every clustering method.

use std::fmt;
use std::str::FromStr;

use crate::grid::Codebook;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ItcReference,
    ItcLattice,
    Kmeans,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ItcReference, Method::ItcLattice, Method::Kmeans];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ItcReference => "itc-ref",
            Method::ItcLattice => "itc-lattice",
            Method::Kmeans => "kmeans",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected itc-ref, itc-lattice or kmeans)"))
    }
}

/// One pass of the iteration loop.
///
/// `objective` is the Cauchy-Schwarz divergence for the ITC methods and the
/// inertia for k-means, evaluated for the codebook entering the pass.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub seconds: f64,
    pub objective: T,
    pub snapshot: Option<Codebook<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub method: Method,
    /// Parameter echo as `(name, value)` pairs, in insertion order.
    pub config: Vec<(String, String)>,
    /// One-time work done before the loop (density precomputation, constant
    /// potentials).
    pub setup_seconds: f64,
    pub records: Vec<IterationRecord<T>>,
    /// Number of codebook updates performed.
    pub iterations: usize,
    /// Whether a convergence threshold (rather than `max_iter`) ended the run.
    pub converged: bool,
}

impl<T: Copy> RunTrace<T> {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            config: Vec::new(),
            setup_seconds: 0.0,
            records: Vec::new(),
            iterations: 0,
            converged: false,
        }
    }

    pub fn echo(&mut self, key: &str, value: impl fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub(crate) fn push(&mut self, seconds: f64, objective: T, snapshot: Option<Codebook<T>>) {
        let iteration = self.records.len();
        self.records.push(IterationRecord {
            iteration,
            // keep the documented strictly-positive invariant on coarse clocks
            seconds: seconds.max(f64::MIN_POSITIVE),
            objective,
            snapshot,
        });
    }

    /// Wall time spent inside the iteration loop.
    pub fn loop_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.seconds).sum()
    }

    pub fn total_seconds(&self) -> f64 {
        self.setup_seconds + self.loop_seconds()
    }

    /// Loop time divided by the number of updates (or by one when none ran).
    pub fn seconds_per_iteration(&self) -> f64 {
        self.loop_seconds() / self.iterations.max(1) as f64
    }

    pub fn initial_objective(&self) -> Option<T> {
        self.records.first().map(|r| r.objective)
    }

    pub fn final_objective(&self) -> Option<T> {
        self.records.last().map(|r| r.objective)
    }
}
