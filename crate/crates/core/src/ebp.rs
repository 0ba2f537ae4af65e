//! EBP EXIT curves of the randomized coupled MN ensemble.
//!
//! Non-trivial DE fixed points are found by anchored iteration: the anchor
//! is the mean parity erasure `(1/lhat) * sum_i y_i`, and because the parity
//! update is exactly linear in the channel parameter, `eps` can be rescaled
//! every sweep so the anchor is met without any inner root finding. A curve
//! is traced by walking the anchor downward with warm starts, halving the
//! step where `eps` jumps or the iteration fails.

use crate::chain::{self, sweep_parts, ChainProfile};
use crate::de::DeOptions;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct ContinuationOptions {
    /// Anchor decrement between curve points.
    pub anchor_step: f64,
    /// Refine the step when consecutive `eps` values jump by more than this.
    pub eps_jump_tol: f64,
    /// Smallest step the refinement may reach.
    pub min_step: f64,
    /// Fixed-point iteration stops when the profile moves less than this.
    pub fp_tol: f64,
    pub max_iters: u64,
    /// Failures below this anchor end the branch instead of aborting the
    /// trace; by then the profile has essentially collapsed to trivial.
    pub terminus_anchor: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            anchor_step: 1e-3,
            eps_jump_tol: 1e-3,
            min_step: 1e-3 / 256.0,
            fp_tol: 1e-11,
            max_iters: 100_000,
            terminus_anchor: 0.02,
        }
    }
}

impl ContinuationOptions {
    pub fn with_step(step: f64) -> Self {
        ContinuationOptions {
            anchor_step: step,
            min_step: step / 256.0,
            ..ContinuationOptions::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ContinuationError {
    #[error("anchored iteration did not converge at anchor {anchor}")]
    NoConvergence { anchor: f64, last: Box<ChainProfile> },
    #[error("anchor {anchor} is infeasible (achieved {achieved})")]
    AnchorInfeasible { anchor: f64, achieved: f64 },
}

/// A converged non-trivial fixed point projected onto the EXIT chart.
#[derive(Debug, Clone)]
pub struct EbpPoint {
    /// Achieved mean parity erasure.
    pub anchor: f64,
    pub eps: f64,
    pub h_ebp: f64,
    /// Independent fixed-point residual of `profile` under the chain sweep.
    pub residual: f64,
    pub profile: ChainProfile,
}

/// Ordered curve of fixed points by decreasing anchor.
#[derive(Debug, Clone)]
pub struct EbpCurve {
    pub l: u32,
    pub r: u32,
    pub g: u32,
    pub coupling: u32,
    pub window: u32,
    pub points: Vec<EbpPoint>,
}

#[derive(Debug, thiserror::Error)]
#[error("continuation aborted after {} points: {cause}", partial.points.len())]
pub struct TraceError {
    pub partial: EbpCurve,
    pub cause: ContinuationError,
}

/// EXIT function value of a profile:
/// `(1/lhat) * sum_i ((1/w) * sum_j ty(i+j))^g`.
pub fn h_ebp(p: &ChainProfile, l: u32, r: u32, g: u32) -> f64 {
    let parts = sweep_parts(p, l, r, g);
    parts.exit_mean.iter().map(|&t| t.powi(g as i32)).sum::<f64>() / p.lhat() as f64
}

/// Finds the DE fixed point whose mean parity erasure equals `anchor`,
/// warm-started from `seed`. Every sweep recomputes the channel parameter
/// as `anchor / mean(y_without_eps)`, which is exact because the parity
/// update is linear in `eps`.
pub fn anchored_fixed_point(
    l: u32,
    r: u32,
    g: u32,
    anchor: f64,
    seed: &ChainProfile,
    opts: &ContinuationOptions,
) -> Result<EbpPoint, ContinuationError> {
    let mut p = seed.clone();
    let lhat = p.lhat() as f64;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let parts = sweep_parts(&p, l, r, g);
        let mut mean_hat = 0.0;
        let y_hat: Vec<f64> = parts
            .exit_mean
            .iter()
            .map(|&t| {
                let v = t.powi(g as i32 - 1);
                mean_hat += v;
                v
            })
            .collect();
        mean_hat /= lhat;
        if mean_hat < 1e-300 {
            return Err(ContinuationError::AnchorInfeasible { anchor, achieved: 0.0 });
        }
        let eps = (anchor / mean_hat).min(1.0);
        let mut change = 0.0f64;
        for idx in 0..p.lhat() {
            let y_new = (eps * y_hat[idx]).clamp(0.0, 1.0);
            change = change
                .max((p.x()[idx] - parts.x_new[idx]).abs())
                .max((p.y()[idx] - y_new).abs());
        }
        p.replace(parts.x_new, y_hat.iter().map(|&v| (eps * v).clamp(0.0, 1.0)).collect(), eps);
        if change < opts.fp_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ContinuationError::NoConvergence { anchor, last: Box::new(p) });
    }
    let achieved = p.mean_y();
    if (achieved - anchor).abs() > 1e-8 {
        // the eps clamp engaged: no fixed point carries this much erasure
        return Err(ContinuationError::AnchorInfeasible { anchor, achieved });
    }
    let residual = chain::fixed_point_residual(&p, l, r, g);
    let h = h_ebp(&p, l, r, g);
    Ok(EbpPoint { anchor: achieved, eps: p.eps, h_ebp: h, residual, profile: p })
}

/// Traces the EBP curve from the `eps = 1` forward-DE stall down to the
/// trivial fixed point, warm-starting every anchor from the previous
/// profile.
pub fn trace_curve(
    l: u32,
    r: u32,
    g: u32,
    coupling: u32,
    window: u32,
    opts: &ContinuationOptions,
) -> Result<EbpCurve, TraceError> {
    let mut curve = EbpCurve { l, r, g, coupling, window, points: Vec::new() };
    let forward = DeOptions { max_iters: opts.max_iters, ..DeOptions::default() };
    let start = chain::chain_run(l, r, g, coupling, window, 1.0, &forward);
    if start.converged {
        // decodable even at eps = 1: no non-trivial fixed points to plot
        return Ok(curve);
    }
    let start_anchor = start.profile.mean_y();
    match anchored_fixed_point(l, r, g, start_anchor, &start.profile, opts) {
        Ok(point) => curve.points.push(point),
        Err(cause) => return Err(TraceError { partial: curve, cause }),
    }
    let mut step = opts.anchor_step;
    loop {
        let last = curve.points.last().expect("curve is seeded");
        let target = last.anchor - step;
        if target <= 0.0 {
            break;
        }
        match anchored_fixed_point(l, r, g, target, &last.profile, opts) {
            Ok(point) => {
                let jump = (point.eps - last.eps).abs();
                if jump > opts.eps_jump_tol && step > opts.min_step {
                    step *= 0.5;
                    continue;
                }
                if jump > opts.eps_jump_tol {
                    log::warn!(
                        "eps jump {jump:.2e} at anchor {target:.6} exceeds {:.2e} at min step",
                        opts.eps_jump_tol
                    );
                }
                debug_assert!(point.anchor < last.anchor, "anchors must decrease");
                if point.h_ebp > last.h_ebp + 1e-9 {
                    log::warn!(
                        "h_ebp increased by {:.2e} at anchor {target:.6}",
                        point.h_ebp - last.h_ebp
                    );
                }
                curve.points.push(point);
                step = (step * 2.0).min(opts.anchor_step);
            }
            Err(_) if step > opts.min_step => step *= 0.5,
            Err(_) if target <= opts.terminus_anchor => break,
            Err(cause) => return Err(TraceError { partial: curve, cause }),
        }
    }
    Ok(curve)
}

impl EbpCurve {
    /// Knee of the curve: the point farthest from the chord between the
    /// curve ends, in range-normalized `(eps, h)` coordinates.
    pub fn knee_index(&self) -> Option<usize> {
        let n = self.points.len();
        if n < 3 {
            return None;
        }
        let eps_lo = self.points.iter().map(|p| p.eps).fold(f64::INFINITY, f64::min);
        let eps_hi = self.points.iter().map(|p| p.eps).fold(f64::NEG_INFINITY, f64::max);
        let h_lo = self.points.iter().map(|p| p.h_ebp).fold(f64::INFINITY, f64::min);
        let h_hi = self.points.iter().map(|p| p.h_ebp).fold(f64::NEG_INFINITY, f64::max);
        if eps_hi - eps_lo < 1e-12 || h_hi - h_lo < 1e-12 {
            return None;
        }
        let norm = |p: &EbpPoint| {
            (((p.eps - eps_lo) / (eps_hi - eps_lo)), ((p.h_ebp - h_lo) / (h_hi - h_lo)))
        };
        let (x0, y0) = norm(&self.points[0]);
        let (x1, y1) = norm(&self.points[n - 1]);
        let (dx, dy) = (x1 - x0, y1 - y0);
        let len = dx.hypot(dy).max(1e-300);
        let mut best = (0.0f64, None);
        for (idx, point) in self.points.iter().enumerate().take(n - 1).skip(1) {
            let (px, py) = norm(point);
            let dist = (dx * (py - y0) - dy * (px - x0)).abs() / len;
            if dist > best.0 {
                best = (dist, Some(idx));
            }
        }
        best.1
    }

    /// Indices of the cliff region: from the knee down to `h_ebp = 0.05`.
    pub fn cliff_indices(&self) -> Vec<usize> {
        match self.knee_index() {
            Some(knee) => {
                (knee..self.points.len()).filter(|&i| self.points[i].h_ebp >= 0.05).collect()
            }
            None => Vec::new(),
        }
    }

    /// Smallest channel parameter reached on the cliff; this is where the
    /// left-most cliff edge of the curve drops.
    pub fn leftmost_cliff_eps(&self) -> Option<f64> {
        let cliff = self.cliff_indices();
        cliff.iter().map(|&i| self.points[i].eps).fold(None, |acc: Option<f64>, e| {
            Some(acc.map_or(e, |a| a.min(e)))
        })
    }

    /// Wiggle amplitude: the largest gap between adjacent interior local
    /// extrema of `eps` along the cliff. Zero when `eps` is monotone there.
    pub fn wiggle_amplitude(&self) -> f64 {
        let cliff = self.cliff_indices();
        if cliff.len() < 3 {
            return 0.0;
        }
        let mut eps_seq: Vec<f64> = Vec::with_capacity(cliff.len());
        for &i in &cliff {
            let e = self.points[i].eps;
            if eps_seq.last() != Some(&e) {
                eps_seq.push(e);
            }
        }
        let mut extrema = Vec::new();
        for i in 1..eps_seq.len().saturating_sub(1) {
            let (prev, here, next) = (eps_seq[i - 1], eps_seq[i], eps_seq[i + 1]);
            if (here > prev && here > next) || (here < prev && here < next) {
                extrema.push(here);
            }
        }
        extrema.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }

    /// CSV export, one curve point per row.
    pub fn to_curve_csv(&self) -> String {
        let mut out = String::from("anchor,eps,h_ebp,residual\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.12},{:.12},{:.12},{:.3e}\n",
                p.anchor, p.eps, p.h_ebp, p.residual
            ));
        }
        out
    }

    /// Wide CSV export with the per-section parity erasures of every point.
    pub fn to_profiles_csv(&self) -> String {
        let big_l = i64::from(self.coupling);
        let mut out = String::from("anchor");
        for section in -big_l..=big_l {
            out.push_str(&format!(",y_{section}"));
        }
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{:.12}", p.anchor));
            for &y in p.profile.y() {
                out.push_str(&format!(",{y:.9}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_curve_json(&self) -> String {
        #[derive(Serialize)]
        struct Params {
            l: u32,
            r: u32,
            g: u32,
            coupling: u32,
            window: u32,
        }
        #[derive(Serialize)]
        struct Point {
            anchor: f64,
            eps: f64,
            h_ebp: f64,
            residual: f64,
        }
        #[derive(Serialize)]
        struct Curve {
            params: Params,
            points: Vec<Point>,
        }
        let curve = Curve {
            params: Params {
                l: self.l,
                r: self.r,
                g: self.g,
                coupling: self.coupling,
                window: self.window,
            },
            points: self
                .points
                .iter()
                .map(|p| Point { anchor: p.anchor, eps: p.eps, h_ebp: p.h_ebp, residual: p.residual })
                .collect(),
        };
        serde_json::to_string_pretty(&curve).expect("curve serializes")
    }

    pub fn to_profiles_json(&self) -> String {
        #[derive(Serialize)]
        struct Row {
            anchor: f64,
            y: Vec<f64>,
        }
        #[derive(Serialize)]
        struct Profiles {
            sections: Vec<i64>,
            rows: Vec<Row>,
        }
        let big_l = i64::from(self.coupling);
        let profiles = Profiles {
            sections: (-big_l..=big_l).collect(),
            rows: self
                .points
                .iter()
                .map(|p| Row { anchor: p.anchor, y: p.profile.y().to_vec() })
                .collect(),
        };
        serde_json::to_string_pretty(&profiles).expect("profiles serialize")
    }
}
