//! Solver parameters and divergence bookkeeping.

use crate::conv::DEFAULT_RADIUS_FACTOR;
use crate::error::{ItcError, Result};
use crate::scalar::Scalar;
use crate::trace::RunTrace;

pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_EPS_DCS: f64 = 1e-4;
pub const DEFAULT_THETA: f64 = 0.05;
/// Lower bound applied to the kernel-width policy.
pub const MIN_OMEGA: f64 = 0.5;

/// Kernel widths and stopping rules for one clustering run.
///
/// `tau` and `rho` are derived from `xi` and `omega` on construction
/// (`tau^2 = xi^2 + omega^2`, `rho^2 = 2 omega^2`), which is why the widths are
/// only reachable through accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct ItcParams<T> {
    xi: T,
    omega: T,
    tau: T,
    rho: T,
    pub max_iter: usize,
    /// Relative change of the divergence below which iteration stops.
    pub eps_dcs: T,
    /// Largest coordinate movement (lattice units) below which iteration stops.
    pub theta: T,
    pub seed: u64,
    /// Filter masks extend `ceil(radius_factor * sigma)` cells from the center.
    pub radius_factor: T,
    /// Multiplies the constant `c` of the reference update; 1 keeps the
    /// default `c = (N/M) V(X;W) / V(W)`. See [`ItcParams::stationary_repulsion_scale`].
    pub repulsion_scale: T,
}

impl<T: Scalar> ItcParams<T> {
    pub fn new(xi: T, omega: T) -> Result<Self> {
        for (name, x) in [("xi", xi), ("omega", omega)] {
            if !(x > T::zero()) || !x.is_finite() {
                return Err(ItcError::InvalidParams(format!(
                    "{name} must be positive and finite, got {x}"
                )));
            }
        }
        Ok(Self {
            xi,
            omega,
            tau: (xi * xi + omega * omega).sqrt(),
            rho: (T::lit(2.0) * omega * omega).sqrt(),
            max_iter: DEFAULT_MAX_ITER,
            eps_dcs: T::lit(DEFAULT_EPS_DCS),
            theta: T::lit(DEFAULT_THETA),
            seed: 0,
            radius_factor: T::lit(DEFAULT_RADIUS_FACTOR),
            repulsion_scale: T::one(),
        })
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_radius_factor(mut self, radius_factor: T) -> Self {
        self.radius_factor = radius_factor;
        self
    }

    /// `tau^2 / rho^2`, the factor by which the default reference constant
    /// must be scaled for its fixed points to be stationary points of the
    /// divergence (the derivatives of `G_tau` and `G_rho` differ by it).
    pub fn stationary_repulsion_scale(&self) -> T {
        (self.tau * self.tau) / (self.rho * self.rho)
    }

    pub fn with_repulsion_scale(mut self, scale: T) -> Self {
        self.repulsion_scale = scale;
        self
    }

    pub fn with_thresholds(mut self, eps_dcs: T, theta: T) -> Self {
        self.eps_dcs = eps_dcs;
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(ItcError::InvalidParams("max_iter must be at least 1".into()));
        }
        for (name, x) in [
            ("eps_dcs", self.eps_dcs),
            ("theta", self.theta),
            ("radius_factor", self.radius_factor),
            ("repulsion_scale", self.repulsion_scale),
        ] {
            if !(x > T::zero()) || !x.is_finite() {
                return Err(ItcError::InvalidParams(format!(
                    "{name} must be positive and finite, got {x}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn echo_into(&self, trace: &mut RunTrace<T>) {
        trace.echo("xi", self.xi);
        trace.echo("omega", self.omega);
        trace.echo("max_iter", self.max_iter);
        trace.echo("eps_dcs", self.eps_dcs);
        trace.echo("theta", self.theta);
        trace.echo("radius_factor", self.radius_factor);
        trace.echo("repulsion_scale", self.repulsion_scale);
        trace.echo("seed", self.seed);
    }
}

/// Kernel widths from the size policy `omega = sqrt(n / m) / 2`, `xi = omega / 2`.
///
/// `omega` is floored at [`MIN_OMEGA`].
pub fn default_params<T: Scalar>(n: usize, m: usize) -> Result<ItcParams<T>> {
    if m == 0 || m > n {
        return Err(ItcError::InvalidM { m, n });
    }
    let ratio = T::from_index(n) / T::from_index(m);
    let omega = (ratio.sqrt() / T::lit(2.0)).max(T::lit(MIN_OMEGA));
    ItcParams::new(omega / T::lit(2.0), omega)
}

/// Information potentials and the Cauchy-Schwarz divergence built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport<T> {
    /// Cross potential `V(X; W)`.
    pub v_cross: T,
    /// Codebook potential `V(W)`.
    pub v_code: T,
    /// Data potential `V(X)`; constant for a dataset.
    pub v_data: T,
    pub d_cs: T,
}

impl<T: Scalar> DivergenceReport<T> {
    pub fn new(v_cross: T, v_code: T, v_data: T) -> Result<Self> {
        if !(v_code > T::zero()) {
            return Err(ItcError::DegenerateCodebook);
        }
        if !(v_cross > T::zero()) {
            return Err(ItcError::DisjointSupport);
        }
        if !(v_data > T::zero()) {
            return Err(ItcError::EmptyImage);
        }
        let d_cs = -T::lit(2.0) * v_cross.ln() + v_code.ln() + v_data.ln();
        Ok(Self {
            v_cross,
            v_code,
            v_data,
            d_cs,
        })
    }
}
