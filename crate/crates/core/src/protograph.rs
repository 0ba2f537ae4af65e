//! Density evolution on protograph base matrices over the BEC.
//!
//! Messages live on edge types: a base-matrix entry `m > 1` stands for `m`
//! parallel edges that carry one shared value by symmetry. One sweep is a
//! full flooding round: variables send with the channel prior (erasure
//! probability 1 on punctured columns), then checks reply using the fresh
//! variable messages.

use crate::base_matrix::BaseMatrix;
use crate::de::{bisect_threshold, DeOptions, ThresholdResult};

/// Per-edge-type erasure probabilities in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMessages {
    pub v2c: Vec<f64>,
    pub c2v: Vec<f64>,
}

impl EdgeMessages {
    pub fn all_ones(n_edges: usize) -> Self {
        EdgeMessages { v2c: vec![1.0; n_edges], c2v: vec![1.0; n_edges] }
    }

    pub fn max_message(&self) -> f64 {
        self.v2c.iter().chain(&self.c2v).fold(0.0, |acc, &m| acc.max(m))
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    row: u32,
    col: u32,
    mult: u32,
}

/// A base matrix compiled for sweeping.
#[derive(Debug, Clone)]
pub struct Protograph {
    edges: Vec<Edge>,
    row_edges: Vec<Vec<u32>>,
    col_edges: Vec<Vec<u32>>,
    punctured: Vec<bool>,
}

/// Result of iterating density evolution at a fixed channel parameter.
#[derive(Debug, Clone)]
pub struct DeRun {
    pub converged: bool,
    /// Sweeps actually performed.
    pub iterations: u64,
    pub max_message: f64,
    /// True when the run ended because the update stopped moving while
    /// messages were still above tolerance.
    pub stalled: bool,
    pub messages: EdgeMessages,
}

// Below this the excluded factor is removed by explicit recomputation
// instead of division, so a (near-)zero message cannot produce 0/0.
const LEAVE_ONE_OUT_FLOOR: f64 = 1e-12;

fn ipow(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(e as i32),
    }
}

impl Protograph {
    pub fn new(base: &BaseMatrix) -> Self {
        let mut edges = Vec::new();
        let mut row_edges = vec![Vec::new(); base.rows()];
        let mut col_edges = vec![Vec::new(); base.cols()];
        for row in 0..base.rows() {
            for col in 0..base.cols() {
                let mult = base.get(row, col);
                if mult > 0 {
                    let id = edges.len() as u32;
                    edges.push(Edge { row: row as u32, col: col as u32, mult });
                    row_edges[row].push(id);
                    col_edges[col].push(id);
                }
            }
        }
        Protograph { edges, row_edges, col_edges, punctured: base.punctured().to_vec() }
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(check row, variable column, multiplicity)` of edge type `idx`.
    pub fn edge_info(&self, idx: usize) -> (usize, usize, u32) {
        let e = self.edges[idx];
        (e.row as usize, e.col as usize, e.mult)
    }

    /// One synchronous sweep; reads `cur`, fills `next`.
    fn sweep_into(&self, cur: &EdgeMessages, next: &mut EdgeMessages, eps: f64) {
        for (col, edges) in self.col_edges.iter().enumerate() {
            let eps_v = if self.punctured[col] { 1.0 } else { eps };
            let mut prod = 1.0;
            for &e in edges {
                prod *= ipow(cur.c2v[e as usize], self.edges[e as usize].mult);
            }
            for &e in edges {
                let excluded = cur.c2v[e as usize];
                let x = if excluded > LEAVE_ONE_OUT_FLOOR {
                    eps_v * prod / excluded
                } else {
                    let mut rest = 1.0;
                    for &other in edges {
                        let mut mult = self.edges[other as usize].mult;
                        if other == e {
                            mult -= 1;
                        }
                        rest *= ipow(cur.c2v[other as usize], mult);
                    }
                    eps_v * rest
                };
                next.v2c[e as usize] = x.clamp(0.0, 1.0);
            }
        }
        for edges in &self.row_edges {
            let mut prod = 1.0;
            for &e in edges {
                prod *= ipow(1.0 - next.v2c[e as usize], self.edges[e as usize].mult);
            }
            for &e in edges {
                let excluded = 1.0 - next.v2c[e as usize];
                let y = if excluded > LEAVE_ONE_OUT_FLOOR {
                    1.0 - prod / excluded
                } else {
                    let mut rest = 1.0;
                    for &other in edges {
                        let mut mult = self.edges[other as usize].mult;
                        if other == e {
                            mult -= 1;
                        }
                        rest *= ipow(1.0 - next.v2c[other as usize], mult);
                    }
                    1.0 - rest
                };
                next.c2v[e as usize] = y.clamp(0.0, 1.0);
            }
        }
    }

    /// One sweep as a pure function of the incoming state.
    pub fn sweep(&self, msgs: &EdgeMessages, eps: f64) -> EdgeMessages {
        let mut next = EdgeMessages::all_ones(self.n_edges());
        self.sweep_into(msgs, &mut next, eps);
        next
    }

    /// Iterates from the all-ones state until every message drops below
    /// `tol_msg`, the update stalls, or the sweep budget runs out.
    pub fn run(&self, eps: f64, opts: &DeOptions) -> DeRun {
        let mut cur = EdgeMessages::all_ones(self.n_edges());
        let mut next = EdgeMessages::all_ones(self.n_edges());
        for iter in 1..=opts.max_iters {
            self.sweep_into(&cur, &mut next, eps);
            let mut max_msg = 0.0f64;
            let mut max_change = 0.0f64;
            for e in 0..self.n_edges() {
                debug_assert!(
                    next.v2c[e] <= cur.v2c[e] + 1e-12 && next.c2v[e] <= cur.c2v[e] + 1e-12,
                    "BEC DE must be monotone from the all-ones start"
                );
                max_msg = max_msg.max(next.v2c[e]).max(next.c2v[e]);
                max_change = max_change
                    .max((cur.v2c[e] - next.v2c[e]).abs())
                    .max((cur.c2v[e] - next.c2v[e]).abs());
            }
            std::mem::swap(&mut cur, &mut next);
            if max_msg < opts.tol_msg {
                return DeRun {
                    converged: true,
                    iterations: iter,
                    max_message: max_msg,
                    stalled: false,
                    messages: cur,
                };
            }
            if max_change < opts.stall_tol {
                return DeRun {
                    converged: false,
                    iterations: iter,
                    max_message: max_msg,
                    stalled: true,
                    messages: cur,
                };
            }
        }
        let max_msg = cur.max_message();
        DeRun {
            converged: false,
            iterations: opts.max_iters,
            max_message: max_msg,
            stalled: false,
            messages: cur,
        }
    }

    /// BP threshold by bisection on the channel parameter.
    pub fn threshold(&self, opts: &DeOptions) -> ThresholdResult {
        bisect_threshold(opts, |eps| {
            let run = self.run(eps, opts);
            (run.converged, run.iterations)
        })
    }

    /// Per-iteration `(iter, max_msg)` decay samples at a fixed channel.
    pub fn trace(&self, eps: f64, opts: &DeOptions) -> Vec<(u64, f64)> {
        let mut cur = EdgeMessages::all_ones(self.n_edges());
        let mut next = EdgeMessages::all_ones(self.n_edges());
        let mut samples = Vec::new();
        for iter in 1..=opts.max_iters {
            self.sweep_into(&cur, &mut next, eps);
            std::mem::swap(&mut cur, &mut next);
            let max_msg = cur.max_message();
            samples.push((iter, max_msg));
            if max_msg < opts.tol_msg {
                break;
            }
            let change = cur
                .v2c
                .iter()
                .zip(&next.v2c)
                .chain(cur.c2v.iter().zip(&next.c2v))
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            if change < opts.stall_tol {
                break;
            }
        }
        samples
    }

    /// Per-column residual erasure probability (product of all incoming
    /// check messages, times the channel prior).
    pub fn column_marginals(&self, msgs: &EdgeMessages, eps: f64) -> Vec<f64> {
        self.col_edges
            .iter()
            .enumerate()
            .map(|(col, edges)| {
                let eps_v = if self.punctured[col] { 1.0 } else { eps };
                edges.iter().fold(eps_v, |acc, &e| {
                    acc * ipow(msgs.c2v[e as usize], self.edges[e as usize].mult)
                })
            })
            .collect()
    }
}

/// One DE sweep over `base` (spec surface; compiles the graph per call).
pub fn de_sweep(base: &BaseMatrix, msgs: &EdgeMessages, eps: f64) -> EdgeMessages {
    Protograph::new(base).sweep(msgs, eps)
}

/// Runs DE at a fixed channel parameter from the all-ones state.
pub fn de_converges(base: &BaseMatrix, eps: f64, opts: &DeOptions) -> DeRun {
    Protograph::new(base).run(eps, opts)
}

/// BP threshold of the ensemble described by `base`.
pub fn bp_threshold(base: &BaseMatrix, opts: &DeOptions) -> ThresholdResult {
    Protograph::new(base).threshold(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;

    /// Scalar `(l, r)`-regular recursion used as an independent oracle:
    /// `x <- eps * (1 - (1 - x)^(r-1))^(l-1)`.
    fn scalar_regular_converges(l: u32, r: u32, eps: f64, opts: &DeOptions) -> (bool, u64) {
        let mut x = 1.0f64;
        for iter in 1..=opts.max_iters {
            let y = 1.0 - (1.0 - x).powi(r as i32 - 1);
            let next = eps * y.powi(l as i32 - 1);
            let change = (x - next).abs();
            x = next;
            if x.max(y) < opts.tol_msg {
                return (true, iter);
            }
            if change < opts.stall_tol {
                return (false, iter);
            }
        }
        (false, opts.max_iters)
    }

    fn scalar_regular_threshold(l: u32, r: u32, opts: &DeOptions) -> f64 {
        crate::de::bisect_threshold(opts, |eps| scalar_regular_converges(l, r, eps, opts))
            .epsilon_bp
    }

    #[test]
    fn one_sweep_matches_scalar_reduction() {
        // base [3 3]: x' = eps * (1 - (1 - x)^5)^2 for a shared message x.
        let base = ensemble::regular_base(3, 6).unwrap();
        let graph = Protograph::new(&base);
        let eps = 0.41;
        let mut msgs = EdgeMessages::all_ones(graph.n_edges());
        for _ in 0..5 {
            msgs = graph.sweep(&msgs, eps);
        }
        let mut x = 1.0f64;
        for _ in 0..5 {
            x = eps * (1.0 - (1.0 - x).powi(5)).powi(2);
        }
        for &v in &msgs.v2c {
            assert!((v - x).abs() < 1e-13, "{v} vs {x}");
        }
    }

    #[test]
    fn zero_check_messages_zero_the_variables() {
        let base = ensemble::sc_ldpc_base(3, 6, 1).unwrap();
        let graph = Protograph::new(&base);
        let zeros = EdgeMessages { v2c: vec![1.0; graph.n_edges()], c2v: vec![0.0; graph.n_edges()] };
        let out = graph.sweep(&zeros, 0.7);
        assert!(out.v2c.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn uncoupled_mn_first_sweep() {
        let base = ensemble::mn_base(4, 2, 2).unwrap();
        let graph = Protograph::new(&base);
        let eps = 0.37;
        let out = graph.sweep(&EdgeMessages::all_ones(graph.n_edges()), eps);
        // information column is punctured: its messages stay exactly 1;
        // parity messages drop to eps after one sweep.
        for (e, edge) in graph.edges.iter().enumerate() {
            if edge.col == 0 {
                assert_eq!(out.v2c[e], 1.0);
            } else {
                assert_eq!(out.v2c[e], eps);
            }
        }
    }

    #[test]
    fn mn_information_messages_never_resolve_at_zero() {
        let base = ensemble::mn_base(4, 2, 2).unwrap();
        let graph = Protograph::new(&base);
        let opts = DeOptions { max_iters: 2000, ..DeOptions::default() };
        let run = graph.run(0.0, &opts);
        assert!(!run.converged);
        for (e, edge) in graph.edges.iter().enumerate() {
            if edge.col == 0 {
                assert_eq!(run.messages.v2c[e], 1.0);
            }
        }
    }

    #[test]
    fn sc_ldpc_l1_converges_below_threshold() {
        let base = ensemble::sc_ldpc_base(3, 6, 1).unwrap();
        let run = de_converges(&base, 0.70, &DeOptions::default());
        assert!(run.converged);
        let run = de_converges(&base, 0.73, &DeOptions::default());
        assert!(!run.converged);
    }

    #[test]
    fn zero_channel_resolves_unpunctured_graphs_quickly() {
        let base = ensemble::sc_ldpc_base(4, 8, 2).unwrap();
        let run = de_converges(&base, 0.0, &DeOptions::default());
        assert!(run.converged);
        assert!(run.iterations <= 3);
    }

    #[test]
    fn regular_36_threshold() {
        let base = ensemble::regular_base(3, 6).unwrap();
        let opts = DeOptions::default().with_tol_eps(1e-6);
        let result = bp_threshold(&base, &opts);
        assert!(!result.no_threshold);
        assert!((result.epsilon_bp - 0.4294).abs() < 2e-4, "{}", result.epsilon_bp);
        assert!(result.bracket_width <= 1e-6);
    }

    #[test]
    fn sc_mn_l8_threshold() {
        let base = ensemble::sc_mn_base(4, 2, 2, 8).unwrap();
        let result = bp_threshold(&base, &DeOptions::default().with_tol_eps(1e-6));
        assert!((result.epsilon_bp - 0.500252).abs() < 2e-4, "{}", result.epsilon_bp);
    }

    #[test]
    fn sc_ha_l4_threshold() {
        let base = ensemble::sc_ha_base(2, 4, 2, 4).unwrap();
        let result = bp_threshold(&base, &DeOptions::default().with_tol_eps(1e-6));
        assert!((result.epsilon_bp - 0.516970).abs() < 2e-4, "{}", result.epsilon_bp);
    }

    #[test]
    fn uncoupled_mn_has_no_threshold() {
        let base = ensemble::mn_base(4, 2, 2).unwrap();
        let opts = DeOptions { max_iters: 3000, ..DeOptions::default() };
        let result = bp_threshold(&base, &opts);
        assert!(result.no_threshold);
        assert_eq!(result.epsilon_bp, 0.0);
    }

    #[test]
    fn oracle_equivalence_for_regular_36() {
        let opts = DeOptions::default().with_tol_eps(1e-10);
        let base = ensemble::regular_base(3, 6).unwrap();
        let de = bp_threshold(&base, &opts).epsilon_bp;
        let scalar = scalar_regular_threshold(3, 6, &opts);
        assert!((de - scalar).abs() < 1e-9, "de={de} scalar={scalar}");
    }

    #[test]
    fn channel_monotonicity() {
        let base = ensemble::sc_mn_base(4, 2, 2, 2).unwrap();
        let graph = Protograph::new(&base);
        let opts = DeOptions { max_iters: 400, ..DeOptions::default() };
        let low = graph.run(0.3, &opts);
        let high = graph.run(0.9, &opts);
        for e in 0..graph.n_edges() {
            assert!(low.messages.v2c[e] <= high.messages.v2c[e] + 1e-12);
            assert!(low.messages.c2v[e] <= high.messages.c2v[e] + 1e-12);
        }
    }

    #[test]
    fn stalled_coupled_profile_is_reflection_symmetric() {
        // above threshold the converged column marginals mirror i <-> -i
        let base = ensemble::sc_ldpc_base(3, 6, 4).unwrap();
        let graph = Protograph::new(&base);
        let run = graph.run(0.55, &DeOptions::default());
        assert!(run.stalled);
        let marginals = graph.column_marginals(&run.messages, 0.55);
        let n = marginals.len();
        for c in 0..n {
            assert!((marginals[c] - marginals[n - 1 - c]).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_is_monotone_and_ends_converged() {
        let base = ensemble::regular_base(3, 6).unwrap();
        let graph = Protograph::new(&base);
        let samples = graph.trace(0.40, &DeOptions::default());
        assert!(samples.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        assert!(samples.last().unwrap().1 < 1e-10);
    }

    #[test]
    fn parallel_edge_exclusion_counts_slots() {
        // 1x1 base with a 3-fold edge on a transmitted column: the check
        // sees two other slots of the same variable.
        let base = BaseMatrix::from_rows(vec![vec![3]]);
        let graph = Protograph::new(&base);
        let msgs = EdgeMessages { v2c: vec![0.5], c2v: vec![0.25] };
        let eps = 0.8;
        let out = graph.sweep(&msgs, eps);
        assert!((out.v2c[0] - eps * 0.25f64.powi(2)).abs() < 1e-15);
        let x = out.v2c[0];
        assert!((out.c2v[0] - (1.0 - (1.0 - x) * (1.0 - x))).abs() < 1e-15);
    }
}
