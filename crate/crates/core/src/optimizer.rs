//! Greedy random-perturbation search over the per-node regularization `q`.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::schemes::{self, ParameterDomain, SchemeLabel};
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub iterations: usize,
    /// Initial standard deviation of the per-coordinate perturbation.
    pub sigma0: f64,
    /// Factor applied to the perturbation scale after each rejected step.
    pub decay: f64,
    pub seed: u64,
    /// Clearance kept from the boundaries of `(μ, 1)`.
    pub margin: f64,
    /// Extra passes of `iterations` steps, each resetting the scale to `sigma0`.
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            iterations: 5000,
            sigma0: 0.05,
            decay: 0.995,
            seed: 0,
            margin: 1e-6,
            restarts: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("optimizer: {m}")));
        if self.iterations == 0 {
            return bad("iterations must be > 0");
        }
        if !(self.sigma0 > 0.0) {
            return bad("sigma0 must be > 0");
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return bad("decay must lie in (0, 1]");
        }
        if !(self.margin > 0.0) {
            return bad("margin must be > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationTrace {
    pub init_label: SchemeLabel,
    /// Entry 0 is the initial point; entry `t` follows iteration `t`.
    pub best_cri: Vec<f64>,
    pub best_q: Vec<Vec<f64>>,
    /// Whether iteration `t` (1-based) improved the incumbent; entry 0 is `false`.
    pub accepted: Vec<bool>,
}

impl OptimizationTrace {
    pub fn final_cri(&self) -> f64 {
        *self.best_cri.last().unwrap()
    }

    pub fn final_q(&self) -> &[f64] {
        self.best_q.last().unwrap()
    }

    pub fn iterations(&self) -> usize {
        self.best_cri.len() - 1
    }

    /// `iteration,cri,accepted`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,cri,accepted")?;
        for (t, (c, a)) in self.best_cri.iter().zip(&self.accepted).enumerate() {
            writeln!(w, "{t},{c:.17e},{}", u8::from(*a))?;
        }
        Ok(())
    }

    /// `iteration,node,q` for every `stride`-th iteration and the last one.
    pub fn write_q_csv<W: Write>(&self, mut w: W, stride: usize) -> Result<()> {
        let stride = stride.max(1);
        writeln!(w, "iteration,node,q")?;
        let last = self.best_q.len() - 1;
        for (t, q) in self.best_q.iter().enumerate() {
            if t % stride == 0 || t == last {
                for (i, v) in q.iter().enumerate() {
                    writeln!(w, "{t},{},{v:.17e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// Coordinatewise clamp into `[lower + margin, upper - margin]`.
pub fn project(q: &[f64], domain: &ParameterDomain, margin: f64) -> Result<Vec<f64>> {
    if !(margin >= 0.0) || !(margin < (domain.upper - domain.lower) / 2.0) {
        return Err(Error::DegenerateDomain {
            lower: domain.lower,
            upper: domain.upper,
            margin,
        });
    }
    let (lo, hi) = (domain.lower + margin, domain.upper - margin);
    Ok(q.iter().map(|v| v.clamp(lo, hi)).collect())
}

fn cri_of(g: &Graph, q: &[f64]) -> Result<f64> {
    spectral::cri(&spectral::spectrum_fq(g, q)?)
}

/// Regularization vectors of Σ₀, Σ_η*, Σ_ρ* and Σ_ε*, in that order.
pub fn scheme_starting_points(g: &Graph) -> Result<Vec<(SchemeLabel, Vec<f64>)>> {
    let n = g.node_count();
    Ok(vec![
        (SchemeLabel::Sigma0, vec![0.0; n]),
        (
            SchemeLabel::SigmaEta,
            schemes::q_from_eta(g, schemes::optimal_eta(g)?),
        ),
        (
            SchemeLabel::SigmaRho,
            schemes::q_from_rho(g, schemes::optimal_rho(g, 1e-9)?),
        ),
        (
            SchemeLabel::SigmaEps,
            schemes::q_from_eps(g, schemes::optimal_eps(g)?),
        ),
    ])
}

/// Starts from the best (by CRI after projection into `(μ, 1)`) of the
/// Σ₀/Σ_η*/Σ_ρ*/Σ_ε* regularizations, then runs [`greedy_optimize_from`].
pub fn greedy_optimize(g: &Graph, cfg: &OptimizerConfig) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let domain = schemes::regularization_domain(g)?;
    let mut best: Option<(SchemeLabel, Vec<f64>, f64)> = None;
    for (label, q) in scheme_starting_points(g)? {
        let q = project(&q, &domain, cfg.margin)?;
        let r = cri_of(g, &q)?;
        if best.as_ref().is_none_or(|b| r < b.2) {
            best = Some((label, q, r));
        }
    }
    let (label, q, _) = best.unwrap();
    greedy_optimize_from(g, cfg, q, label)
}

/// Single-candidate hill climbing: perturb every coordinate with
/// `N(0, σ_t²)`, project into `(μ + margin, 1 - margin)`, accept only a
/// strict CRI decrease, and shrink `σ_t` by `decay` on rejection.
pub fn greedy_optimize_from(
    g: &Graph,
    cfg: &OptimizerConfig,
    q0: Vec<f64>,
    init_label: SchemeLabel,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let domain = schemes::regularization_domain(g)?;
    let mut current = project(&q0, &domain, cfg.margin)?;
    let mut current_cri = cri_of(g, &current)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let total = cfg.iterations * (cfg.restarts + 1);
    let mut trace = OptimizationTrace {
        init_label,
        best_cri: Vec::with_capacity(total + 1),
        best_q: Vec::with_capacity(total + 1),
        accepted: Vec::with_capacity(total + 1),
    };
    trace.best_cri.push(current_cri);
    trace.best_q.push(current.clone());
    trace.accepted.push(false);

    let mut sigma = cfg.sigma0;
    for t in 0..total {
        if t > 0 && t % cfg.iterations == 0 {
            sigma = cfg.sigma0;
        }
        let proposal: Vec<f64> = current
            .iter()
            .map(|&v| {
                let z: f64 = StandardNormal.sample(&mut rng);
                v + sigma * z
            })
            .collect();
        let proposal = project(&proposal, &domain, cfg.margin)?;
        let r = cri_of(g, &proposal)?;
        let accept = r < current_cri;
        if accept {
            current = proposal;
            current_cri = r;
        } else {
            sigma *= cfg.decay;
        }
        trace.best_cri.push(current_cri);
        trace.best_q.push(current.clone());
        trace.accepted.push(accept);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;

    fn unit() -> ParameterDomain {
        ParameterDomain::new(0.0, 1.0, "unit").unwrap()
    }

    #[test]
    fn project_examples() {
        assert_eq!(project(&[5.0], &unit(), 1e-6).unwrap(), vec![1.0 - 1e-6]);
        assert_eq!(project(&[0.3, 0.7], &unit(), 1e-6).unwrap(), vec![0.3, 0.7]);
        let d = ParameterDomain::new(-0.25, 1.0, "mu").unwrap();
        assert_eq!(project(&[-0.25], &d, 1e-6).unwrap(), vec![-0.25 + 1e-6]);
        assert!(matches!(
            project(&[0.5], &unit(), 0.5),
            Err(Error::DegenerateDomain { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            decay: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            iterations: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn trace_is_monotone_and_feasible() {
        let g = Graph::generate(&Topology::small_world_default()).unwrap();
        let cfg = OptimizerConfig {
            iterations: 300,
            seed: 5,
            ..Default::default()
        };
        let trace = greedy_optimize(&g, &cfg).unwrap();
        assert_eq!(trace.iterations(), 300);
        let mu = schemes::regularization_domain(&g).unwrap().lower;
        for w in trace.best_cri.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for q in &trace.best_q {
            assert!(q
                .iter()
                .all(|&v| v >= mu + cfg.margin && v <= 1.0 - cfg.margin));
        }
        let again = greedy_optimize(&g, &cfg).unwrap();
        assert_eq!(trace.best_cri, again.best_cri);
    }

    #[test]
    fn trace_csv_shape() {
        let g = Graph::generate(&Topology::Friendship { k: 2 }).unwrap();
        let cfg = OptimizerConfig {
            iterations: 10,
            ..Default::default()
        };
        let trace = greedy_optimize(&g, &cfg).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert!(text.starts_with("iteration,cri,accepted\n0,"));
        let mut buf = Vec::new();
        trace.write_q_csv(&mut buf, 5).unwrap();
        // iterations 0, 5, 10 with 5 nodes each, plus header
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 16);
    }
}
