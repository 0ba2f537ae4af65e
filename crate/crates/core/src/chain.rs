//! Section-indexed density evolution for the randomized coupled MN ensemble.
//!
//! A profile holds the erasure probabilities `x_i` (information-bit messages)
//! and `y_i` (parity-bit messages) for sections `i = -L ..= L`. Sections
//! outside that range are shortened and read as exactly zero. One sweep
//! applies the two window-averaged update maps simultaneously from the old
//! state.

use crate::de::{bisect_threshold, DeOptions, ThresholdResult};

/// Per-section DE state of a coupled chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainProfile {
    coupling: u32,
    window: u32,
    pub eps: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl ChainProfile {
    pub fn all_ones(coupling: u32, window: u32, eps: f64) -> Self {
        let lhat = (2 * coupling + 1) as usize;
        ChainProfile { coupling, window, eps, x: vec![1.0; lhat], y: vec![1.0; lhat] }
    }

    pub fn all_zero(coupling: u32, window: u32, eps: f64) -> Self {
        let lhat = (2 * coupling + 1) as usize;
        ChainProfile { coupling, window, eps, x: vec![0.0; lhat], y: vec![0.0; lhat] }
    }

    pub fn coupling(&self) -> u32 {
        self.coupling
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn lhat(&self) -> usize {
        self.x.len()
    }

    /// Section values in order `i = -L ..= L`.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Read with shortening: zero outside `|i| <= L`.
    pub fn x_at(&self, section: i64) -> f64 {
        let idx = section + i64::from(self.coupling);
        if idx < 0 || idx >= self.x.len() as i64 {
            0.0
        } else {
            self.x[idx as usize]
        }
    }

    pub fn y_at(&self, section: i64) -> f64 {
        let idx = section + i64::from(self.coupling);
        if idx < 0 || idx >= self.y.len() as i64 {
            0.0
        } else {
            self.y[idx as usize]
        }
    }

    pub fn sections(&self) -> impl Iterator<Item = i64> {
        let big_l = i64::from(self.coupling);
        -big_l..=big_l
    }

    pub fn max_message(&self) -> f64 {
        self.x.iter().chain(&self.y).fold(0.0, |acc, &m| acc.max(m))
    }

    /// Mean parity erasure `(1/lhat) * sum_i y_i`, the continuation anchor.
    pub fn mean_y(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }

    /// Swaps in fresh section values; the anchored continuation rescales
    /// `y` itself and writes the implied channel parameter back here.
    pub(crate) fn replace(&mut self, x: Vec<f64>, y: Vec<f64>, eps: f64) {
        debug_assert_eq!(x.len(), self.x.len());
        debug_assert_eq!(y.len(), self.y.len());
        self.x = x;
        self.y = y;
        self.eps = eps;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.x.len();
        let mut worst = 0.0f64;
        for idx in 0..n {
            worst = worst
                .max((self.x[idx] - self.x[n - 1 - idx]).abs())
                .max((self.y[idx] - self.y[n - 1 - idx]).abs());
        }
        worst
    }

    /// Snapshot as CSV rows `(section, x, y)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,x,y\n");
        for (idx, section) in self.sections().enumerate() {
            out.push_str(&format!("{},{:.12},{:.12}\n", section, self.x[idx], self.y[idx]));
        }
        out
    }
}

/// Window-averaged intermediates of one sweep, with the channel factor of
/// the parity update left out so callers can rescale it exactly.
pub(crate) struct SweepParts {
    pub x_new: Vec<f64>,
    /// `exit_mean[i] = (1/w) * sum_j ty(i + j)`; the parity update is
    /// `eps * exit_mean^(g-1)` and the EXIT summand is `exit_mean^g`.
    pub exit_mean: Vec<f64>,
}

pub(crate) fn sweep_parts(p: &ChainProfile, l: u32, r: u32, g: u32) -> SweepParts {
    let big_l = i64::from(p.coupling);
    let w = i64::from(p.window);
    let wf = p.window as f64;
    let lhat = p.lhat();
    // window tails m = -L .. L + w - 1
    let n_mid = lhat + p.window as usize - 1;
    let mut tx = vec![0.0; n_mid];
    let mut ty = vec![0.0; n_mid];
    for (mi, item) in tx.iter_mut().enumerate() {
        let m = mi as i64 - big_l;
        let mut sum_x = 0.0;
        let mut sum_y = 0.0;
        for k in 0..w {
            sum_x += p.x_at(m - k);
            sum_y += p.y_at(m - k);
        }
        let a = 1.0 - sum_x / wf;
        let b = 1.0 - sum_y / wf;
        *item = (1.0 - a.powi(r as i32 - 1) * b.powi(g as i32)).clamp(0.0, 1.0);
        ty[mi] = (1.0 - a.powi(r as i32) * b.powi(g as i32 - 1)).clamp(0.0, 1.0);
    }
    let mut x_new = vec![0.0; lhat];
    let mut exit_mean = vec![0.0; lhat];
    for idx in 0..lhat {
        let mut sum_tx = 0.0;
        let mut sum_ty = 0.0;
        for j in 0..p.window as usize {
            sum_tx += tx[idx + j];
            sum_ty += ty[idx + j];
        }
        x_new[idx] = (sum_tx / wf).powi(l as i32 - 1).clamp(0.0, 1.0);
        exit_mean[idx] = (sum_ty / wf).clamp(0.0, 1.0);
    }
    SweepParts { x_new, exit_mean }
}

/// One synchronous sweep of the chain DE update maps.
pub fn chain_sweep(p: &ChainProfile, l: u32, r: u32, g: u32) -> ChainProfile {
    let parts = sweep_parts(p, l, r, g);
    let y = parts
        .exit_mean
        .iter()
        .map(|&t| (p.eps * t.powi(g as i32 - 1)).clamp(0.0, 1.0))
        .collect();
    ChainProfile {
        coupling: p.coupling,
        window: p.window,
        eps: p.eps,
        x: parts.x_new,
        y,
    }
}

/// Max-norm distance between `p` and its own sweep; zero exactly on fixed
/// points of the DE system.
pub fn fixed_point_residual(p: &ChainProfile, l: u32, r: u32, g: u32) -> f64 {
    let next = chain_sweep(p, l, r, g);
    let mut worst = 0.0f64;
    for idx in 0..p.lhat() {
        worst = worst
            .max((p.x[idx] - next.x[idx]).abs())
            .max((p.y[idx] - next.y[idx]).abs());
    }
    worst
}

/// Result of iterating the chain from the all-ones interior profile.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub converged: bool,
    pub iterations: u64,
    pub stalled: bool,
    pub profile: ChainProfile,
}

/// Forward DE at fixed channel parameter.
pub fn chain_run(
    l: u32,
    r: u32,
    g: u32,
    coupling: u32,
    window: u32,
    eps: f64,
    opts: &DeOptions,
) -> ChainRun {
    let mut cur = ChainProfile::all_ones(coupling, window, eps);
    for iter in 1..=opts.max_iters {
        let next = chain_sweep(&cur, l, r, g);
        let mut max_change = 0.0f64;
        for idx in 0..cur.lhat() {
            debug_assert!(
                next.x[idx] <= cur.x[idx] + 1e-12 && next.y[idx] <= cur.y[idx] + 1e-12,
                "chain DE must be monotone from the all-ones start"
            );
            max_change = max_change
                .max((cur.x[idx] - next.x[idx]).abs())
                .max((cur.y[idx] - next.y[idx]).abs());
        }
        cur = next;
        let max_msg = cur.max_message();
        if max_msg < opts.tol_msg {
            return ChainRun { converged: true, iterations: iter, stalled: false, profile: cur };
        }
        if max_change < opts.stall_tol {
            return ChainRun { converged: false, iterations: iter, stalled: true, profile: cur };
        }
    }
    ChainRun { converged: false, iterations: opts.max_iters, stalled: false, profile: cur }
}

/// BP threshold of the randomized coupled ensemble by bisection.
pub fn chain_threshold(
    l: u32,
    r: u32,
    g: u32,
    coupling: u32,
    window: u32,
    opts: &DeOptions,
) -> ThresholdResult {
    bisect_threshold(opts, |eps| {
        let run = chain_run(l, r, g, coupling, window, eps, opts);
        (run.converged, run.iterations)
    })
}
