//! Round-synchronous execution of the node-local update
//!
//! ```text
//! x̂_i ← q_i x̂_i + (1 - q_i)/d_i · (Σ_{j ∈ N_i} x̂_j + ½ Σ_{j ∈ N_i} (x̃_ji - x̃_ij))
//! ```
//!
//! Each round every node broadcasts its previous estimate to its neighbours,
//! then every node updates from its own inbox only (Jacobi sweep).

use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{self, centered, AggregatedMeasurement, MeasurementSet, StateVector};
use crate::graph::Graph;

/// Local data held by one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRule {
    pub id: usize,
    pub q: f64,
    pub degree: usize,
    pub neighbors: Vec<usize>,
    /// `x̃_ij` for each neighbour `j`, aligned with `neighbors`.
    pub outgoing: Vec<f64>,
    /// `x̃_ji` for each neighbour `j`, aligned with `neighbors`.
    pub incoming: Vec<f64>,
}

impl NodeRule {
    /// `½ Σ_j (x̃_ji - x̃_ij)`.
    pub fn measurement_bias(&self) -> f64 {
        0.5 * self
            .incoming
            .iter()
            .zip(&self.outgoing)
            .map(|(a, b)| a - b)
            .sum::<f64>()
    }

    /// New estimate from the node's own previous value and the values its
    /// neighbours sent this round.
    pub fn update(&self, own: f64, inbox: &[(usize, f64)]) -> f64 {
        let sum: f64 = inbox.iter().map(|(_, v)| v).sum();
        self.q * own + (1.0 - self.q) / self.degree as f64 * (sum + self.measurement_bias())
    }
}

/// One rule per node from the graph, measurements and regularization.
pub fn build_rules(g: &Graph, m: &MeasurementSet, q: &[f64]) -> Result<Vec<NodeRule>> {
    if q.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: q.len(),
        });
    }
    (0..g.node_count())
        .map(|i| {
            let neighbors = g.neighbors(i).to_vec();
            let outgoing = neighbors
                .iter()
                .map(|&j| m.get(i, j))
                .collect::<Result<_>>()?;
            let incoming = neighbors
                .iter()
                .map(|&j| m.get(j, i))
                .collect::<Result<_>>()?;
            Ok(NodeRule {
                id: i,
                q: q[i],
                degree: neighbors.len(),
                neighbors,
                outgoing,
                incoming,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncConfig {
    pub max_rounds: usize,
    /// Stop once the max-norm change between rounds drops below this.
    pub tol: f64,
    /// Record every `stride`-th state (round 0 and the final round always).
    pub stride: usize,
    /// Relative-difference error required to certify convergence.
    pub certify_tol: f64,
    /// Abort once the centred residual exceeds this.
    pub divergence_limit: f64,
    pub log_messages: bool,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            max_rounds: 50_000,
            tol: 1e-9,
            stride: 1,
            certify_tol: 1e-6,
            divergence_limit: 1e12,
            log_messages: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Message {
    pub round: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    /// `(round, state)` pairs.
    pub trajectory: Vec<(usize, StateVector)>,
    pub rounds_run: usize,
    pub converged: bool,
    pub relative_diff_error: f64,
    /// Mean offset of the final state from the centralized solution.
    pub drift_beta: f64,
    /// `‖centre(x̂(k)) - x̂*_C‖_∞` for every round `k`, starting at 0.
    pub residuals: Vec<f64>,
    pub final_state: StateVector,
    pub centralized: StateVector,
    pub diagnostic: Option<String>,
    pub messages: Vec<Message>,
}

impl SimulationResult {
    /// `round,node,estimate` with 1-based node ids.
    pub fn write_trajectory_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "round,node,estimate")?;
        for (round, x) in &self.trajectory {
            for (i, v) in x.iter().enumerate() {
                writeln!(w, "{round},{},{v:.17e}", i + 1)?;
            }
        }
        Ok(())
    }

    /// `round,log_residual` (natural log), skipping exact zeros.
    pub fn write_residual_csv<W: Write>(&self, mut w: W, stride: usize) -> Result<()> {
        writeln!(w, "round,log_residual")?;
        let stride = stride.max(1);
        for (k, r) in self.residuals.iter().enumerate() {
            if (k % stride == 0 || k + 1 == self.residuals.len()) && *r > 0.0 {
                writeln!(w, "{k},{:.17e}", r.ln())?;
            }
        }
        Ok(())
    }
}

/// `max over edges |(x̂_i - x̂_j) - (x_{C,i} - x_{C,j})|`.
pub fn relative_difference_error(xhat: &StateVector, xc: &StateVector, g: &Graph) -> Result<f64> {
    for len in [xhat.len(), xc.len()] {
        if len != g.node_count() {
            return Err(Error::DimensionMismatch {
                expected: g.node_count(),
                found: len,
            });
        }
    }
    Ok(g.edges()
        .iter()
        .map(|&(i, j)| ((xhat[i] - xhat[j]) - (xc[i] - xc[j])).abs())
        .fold(0.0, f64::max))
}

/// Offset `β` of the limit `x̂*_C + β𝟙` reached from `x0`.
///
/// The left Perron vector of `F_Q` is proportional to `d_i / (1 - q_i)`,
/// and `β = vᵀ(x0 - x̂*_C) / vᵀ𝟙`.
pub fn predicted_drift(g: &Graph, q: &[f64], x0: &StateVector, xc: &StateVector) -> f64 {
    let v: Vec<f64> = (0..g.node_count())
        .map(|i| g.degree(i) as f64 / (1.0 - q[i]))
        .collect();
    let total: f64 = v.iter().sum();
    v.iter()
        .enumerate()
        .map(|(i, w)| w * (x0[i] - xc[i]))
        .sum::<f64>()
        / total
}

pub fn run_sync(
    g: &Graph,
    rules: &[NodeRule],
    x0: &StateVector,
    cfg: &SyncConfig,
) -> Result<SimulationResult> {
    let n = g.node_count();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    let mut by_id: Vec<Option<&NodeRule>> = vec![None; n];
    for r in rules {
        if r.id < n {
            by_id[r.id] = Some(r);
        }
    }
    let rules: Vec<&NodeRule> = by_id
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| Error::InvalidParameter(format!("missing rule for node {}", i + 1)))
        })
        .collect::<Result<_>>()?;

    // Reference solution from the same local data the nodes hold.
    let xt = AggregatedMeasurement {
        xt: DVector::from_fn(n, |i, _| 2.0 * rules[i].measurement_bias()),
    };
    let xc = estimation::centralized_solution(g, &xt)?;

    let stride = cfg.stride.max(1);
    let mut x = x0.clone();
    let mut trajectory = vec![(0, x.clone())];
    let mut residuals = vec![(centered(&x) - &xc).amax()];
    let mut messages = Vec::new();
    let mut inbox: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut next = DVector::zeros(n);
    let mut rounds = 0;
    let mut settled = false;
    let mut diagnostic = None;

    while rounds < cfg.max_rounds {
        rounds += 1;
        for b in &mut inbox {
            b.clear();
        }
        for (from, rule) in rules.iter().enumerate() {
            for &to in &rule.neighbors {
                inbox[to].push((from, x[from]));
                if cfg.log_messages {
                    messages.push(Message {
                        round: rounds,
                        from,
                        to,
                    });
                }
            }
        }
        for (i, rule) in rules.iter().enumerate() {
            next[i] = rule.update(x[i], &inbox[i]);
        }
        let change = (&next - &x).amax();
        std::mem::swap(&mut x, &mut next);
        let residual = (centered(&x) - &xc).amax();
        residuals.push(residual);
        if rounds % stride == 0 {
            trajectory.push((rounds, x.clone()));
        }
        if !residual.is_finite() || residual > cfg.divergence_limit {
            diagnostic = Some(format!("diverged at round {rounds}: residual {residual:e}"));
            break;
        }
        if change < cfg.tol {
            settled = true;
            break;
        }
    }
    if trajectory.last().map(|t| t.0) != Some(rounds) {
        trajectory.push((rounds, x.clone()));
    }

    let relative_diff_error = relative_difference_error(&x, &xc, g)?;
    let converged = settled && relative_diff_error <= cfg.certify_tol;
    if !settled && diagnostic.is_none() {
        diagnostic = Some(format!(
            "no convergence within {} rounds (last residual {:e})",
            cfg.max_rounds,
            residuals.last().unwrap()
        ));
    }
    Ok(SimulationResult {
        trajectory,
        rounds_run: rounds,
        converged,
        relative_diff_error,
        drift_beta: x.mean() - xc.mean(),
        residuals,
        final_state: x,
        centralized: xc,
        diagnostic,
        messages,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub points: usize,
    /// Fewer than 20 usable rounds before the residual hit the floor.
    pub flagged: bool,
}

/// Per-round contraction factor from a least-squares fit of
/// `ln residual` against the round index.
///
/// Rounds whose residual fell below `1e-11` times the initial residual are
/// discarded as round-off, and the first quarter of the remaining rounds is
/// skipped so faster modes do not bias the slope.
pub fn empirical_rate(result: &SimulationResult) -> RateEstimate {
    let r0 = result.residuals[0];
    let floor = (r0 * 1e-11).max(f64::MIN_POSITIVE);
    let usable: Vec<(f64, f64)> = result
        .residuals
        .iter()
        .enumerate()
        .take_while(|(_, r)| **r > floor)
        .map(|(k, r)| (k as f64, r.ln()))
        .collect();
    let flagged = usable.len() < 20;
    let window = if flagged {
        &usable[..]
    } else {
        &usable[usable.len() / 4..]
    };
    if window.len() < 2 {
        return RateEstimate {
            rate: 0.0,
            points: window.len(),
            flagged: true,
        };
    }
    let m = window.len() as f64;
    let mean_k = window.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = window.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(k, y) in window {
        sxy += (k - mean_k) * (y - mean_y);
        sxx += (k - mean_k) * (k - mean_k);
    }
    RateEstimate {
        rate: (sxy / sxx).exp(),
        points: window.len(),
        flagged,
    }
}
