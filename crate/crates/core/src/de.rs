//! Options and result types shared by the two density-evolution engines,
//! plus the bisection search both use for BP thresholds.

use serde::Serialize;

/// Convergence controls for a density-evolution run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeOptions {
    /// A run counts as decoded once every message is below this.
    pub tol_msg: f64,
    /// Bisection stops when the threshold bracket is at most this wide.
    pub tol_eps: f64,
    /// Sweep cap per run.
    pub max_iters: u64,
    /// A run has stalled when the largest per-sweep change falls below this
    /// while messages are still above `tol_msg`.
    pub stall_tol: f64,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions { tol_msg: 1e-10, tol_eps: 1e-7, max_iters: 100_000, stall_tol: 1e-15 }
    }
}

impl DeOptions {
    pub fn with_tol_eps(mut self, tol_eps: f64) -> Self {
        self.tol_eps = tol_eps;
        self
    }
}

/// Outcome of a BP-threshold bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub epsilon_bp: f64,
    /// Sweep count of the last converging probe.
    pub iterations_at_threshold: u64,
    pub bracket_width: f64,
    /// Set when density evolution does not even converge at `eps = 0`;
    /// `epsilon_bp` is then reported as 0.
    pub no_threshold: bool,
}

/// Bisection on `[0, 1]` against a monotone convergence predicate.
/// `probe` returns `(converged, iterations)`.
pub(crate) fn bisect_threshold(
    opts: &DeOptions,
    mut probe: impl FnMut(f64) -> (bool, u64),
) -> ThresholdResult {
    let (zero_ok, zero_iters) = probe(0.0);
    if !zero_ok {
        return ThresholdResult {
            epsilon_bp: 0.0,
            iterations_at_threshold: zero_iters,
            bracket_width: 0.0,
            no_threshold: true,
        };
    }
    let (one_ok, one_iters) = probe(1.0);
    if one_ok {
        return ThresholdResult {
            epsilon_bp: 1.0,
            iterations_at_threshold: one_iters,
            bracket_width: 0.0,
            no_threshold: false,
        };
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iters_at = zero_iters;
    while hi - lo > opts.tol_eps {
        let mid = 0.5 * (lo + hi);
        let (ok, iters) = probe(mid);
        if ok {
            lo = mid;
            iters_at = iters;
        } else {
            hi = mid;
        }
    }
    ThresholdResult {
        epsilon_bp: 0.5 * (lo + hi),
        iterations_at_threshold: iters_at,
        bracket_width: hi - lo,
        no_threshold: false,
    }
}
