//! Iterative schemes `x̂(k+1) = F x̂(k) + u`, their parameter domains and
//! optimal scalar parameters.
//!
//! Every scheme here is a member of the regularized family
//! `F_Q = Q + (I - Q) F₀`, `u_Q = (I - Q) u₀`, with `F₀ = D⁻¹A` and
//! `u₀ = ½ D⁻¹ x̃`:
//!
//! | scheme | state matrix | per-node `q_i` |
//! |--------|--------------|----------------|
//! | Σ₀ | `D⁻¹A` | `0` |
//! | Σ_η | `ηI + (1-η)F₀` | `η` |
//! | Σ_ρ | `(D + ρ/2 I)⁻¹(A + ρ/2 I)` | `(ρ/2) / (d_i + ρ/2)` |
//! | Σ_ε | `I - εL` | `1 - ε d_i` |
//!
//! Each builder forms `F` and `u` from the scheme's own formula and records
//! the equivalent `q` separately, so the two routes can be compared.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{AggregatedMeasurement, StateVector};
use crate::graph::Graph;
use crate::spectral::{self, SpectralSummary, Spectrum};

/// Clearance kept from open domain boundaries.
pub const DOMAIN_MARGIN: f64 = 1e-9;
/// A scheme converges when every non-Perron modulus is below `1 - CONVERGENCE_GAP`.
pub const CONVERGENCE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SchemeLabel {
    Sigma0,
    SigmaQ,
    SigmaEta,
    SigmaRho,
    SigmaEps,
}

impl fmt::Display for SchemeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeLabel::Sigma0 => "sigma0",
            SchemeLabel::SigmaQ => "sigmaQ",
            SchemeLabel::SigmaEta => "sigmaEta",
            SchemeLabel::SigmaRho => "sigmaRho",
            SchemeLabel::SigmaEps => "sigmaEps",
        };
        f.write_str(s)
    }
}

/// Per-node regularization weights, all strictly below 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationVector(Vec<f64>);

impl RegularizationVector {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if let Some((node, &value)) = q
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v < 1.0) || !v.is_finite())
        {
            return Err(Error::RegularizationOutOfRange {
                node: node + 1,
                value,
            });
        }
        Ok(Self(q))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every entry strictly inside `domain`, which guarantees convergence
    /// when `domain` is the sufficient domain `(μ, 1)`.
    pub fn is_within(&self, domain: &ParameterDomain) -> bool {
        self.0.iter().all(|&v| domain.contains(v, 0.0))
    }
}

/// Open interval `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterDomain {
    pub lower: f64,
    pub upper: f64,
    pub label: &'static str,
}

impl ParameterDomain {
    pub fn new(lower: f64, upper: f64, label: &'static str) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::DegenerateDomain {
                lower,
                upper,
                margin: 0.0,
            });
        }
        Ok(Self {
            lower,
            upper,
            label,
        })
    }

    /// `lower + margin < v < upper - margin`.
    pub fn contains(&self, v: f64, margin: f64) -> bool {
        v > self.lower + margin && v < self.upper - margin
    }

    fn check(&self, v: f64) -> Result<()> {
        if self.contains(v, DOMAIN_MARGIN) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                label: self.label.to_string(),
                value: v,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }
}

/// Where a scheme's parameter sits relative to the classic and extended domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainClass {
    Classic,
    Extended,
    Outside,
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SchemeParameter {
    None,
    Vector,
    Eta(f64),
    Rho(f64),
    Eps(f64),
}

#[derive(Debug, Clone)]
pub struct IterativeScheme {
    pub label: SchemeLabel,
    pub parameter: SchemeParameter,
    pub f: DMatrix<f64>,
    pub u: DVector<f64>,
    /// Equivalent per-node regularization.
    pub q: RegularizationVector,
    pub domain: DomainClass,
    /// Diagonal of `(I - Q)⁻¹ D`, the symmetrizer of `f`.
    similarity: Vec<f64>,
}

impl IterativeScheme {
    fn assemble(
        g: &Graph,
        label: SchemeLabel,
        parameter: SchemeParameter,
        f: DMatrix<f64>,
        u: DVector<f64>,
        q: RegularizationVector,
        domain: DomainClass,
    ) -> Result<Self> {
        let similarity = spectral::similarity_weights(g, q.as_slice())?;
        Ok(Self {
            label,
            parameter,
            f,
            u,
            q,
            domain,
            similarity,
        })
    }

    pub fn step(&self, x: &StateVector) -> StateVector {
        &self.f * x + &self.u
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let n = self.f.nrows();
        let sqrt_m: Vec<f64> = self.similarity.iter().map(|v| v.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| self.f[(i, j)] * sqrt_m[i] / sqrt_m[j]);
        spectral::sym_eigen(&s, spectral::SpectrumKind::StateMatrix(self.label))
    }

    pub fn cri(&self) -> Result<f64> {
        spectral::cri(&self.spectrum()?)
    }

    /// Every non-Perron eigenvalue has modulus below `1 - 1e-12`.
    pub fn converges(&self) -> bool {
        self.cri().is_ok_and(|r| r < 1.0 - CONVERGENCE_GAP)
    }

    pub fn summary(&self, domain: Option<ParameterDomain>) -> SchemeSummary {
        let cri = self.cri().ok();
        SchemeSummary {
            label: self.label,
            parameter: self.parameter,
            domain_class: self.domain,
            domain,
            cri,
            converges: self.converges(),
            q_min: self.q.min(),
            q_max: self.q.max(),
        }
    }
}

/// Structured dump of a scheme for reports.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeSummary {
    pub label: SchemeLabel,
    pub parameter: SchemeParameter,
    pub domain_class: DomainClass,
    pub domain: Option<ParameterDomain>,
    pub cri: Option<f64>,
    pub converges: bool,
    pub q_min: f64,
    pub q_max: f64,
}

impl SchemeSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scheme summary serializes")
    }
}

/// `D⁻¹A`.
pub fn f0(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut f = DMatrix::zeros(n, n);
    for i in 0..n {
        let w = 1.0 / g.degree(i) as f64;
        for &j in g.neighbors(i) {
            f[(i, j)] = w;
        }
    }
    f
}

/// `½ D⁻¹ x̃`.
pub fn u0(g: &Graph, xt: &AggregatedMeasurement) -> DVector<f64> {
    DVector::from_fn(g.node_count(), |i, _| 0.5 * xt.xt[i] / g.degree(i) as f64)
}

/// `Q + (I - Q) F₀`.
pub fn state_matrix_q(g: &Graph, q: &[f64]) -> DMatrix<f64> {
    let mut f = f0(g);
    for i in 0..g.node_count() {
        f.row_mut(i).scale_mut(1.0 - q[i]);
        f[(i, i)] += q[i];
    }
    f
}

/// `(I - Q) u₀`.
pub fn input_q(g: &Graph, xt: &AggregatedMeasurement, q: &[f64]) -> DVector<f64> {
    let mut u = u0(g, xt);
    for i in 0..u.len() {
        u[i] *= 1.0 - q[i];
    }
    u
}

pub fn q_from_eta(g: &Graph, eta: f64) -> Vec<f64> {
    vec![eta; g.node_count()]
}

pub fn q_from_rho(g: &Graph, rho: f64) -> Vec<f64> {
    let half = 0.5 * rho;
    (0..g.node_count())
        .map(|i| half / (g.degree(i) as f64 + half))
        .collect()
}

pub fn q_from_eps(g: &Graph, eps: f64) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| 1.0 - eps * g.degree(i) as f64)
        .collect()
}

fn require_connected(g: &Graph, xt: &AggregatedMeasurement) -> Result<()> {
    if xt.xt.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: xt.xt.len(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

pub fn build_sigma0(g: &Graph, xt: &AggregatedMeasurement) -> Result<IterativeScheme> {
    require_connected(g, xt)?;
    IterativeScheme::assemble(
        g,
        SchemeLabel::Sigma0,
        SchemeParameter::None,
        f0(g),
        u0(g, xt),
        RegularizationVector::zeros(g.node_count()),
        DomainClass::Unconstrained,
    )
}

pub fn build_sigma_q(
    g: &Graph,
    xt: &AggregatedMeasurement,
    q: &RegularizationVector,
) -> Result<IterativeScheme> {
    require_connected(g, xt)?;
    if q.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: q.len(),
        });
    }
    let domain = if q.is_within(&regularization_domain(g)?) {
        DomainClass::Extended
    } else {
        DomainClass::Outside
    };
    IterativeScheme::assemble(
        g,
        SchemeLabel::SigmaQ,
        SchemeParameter::Vector,
        state_matrix_q(g, q.as_slice()),
        input_q(g, xt, q.as_slice()),
        q.clone(),
        domain,
    )
}

fn classify(value: f64, classic: &ParameterDomain, extended: &ParameterDomain) -> DomainClass {
    if classic.contains(value, DOMAIN_MARGIN) {
        DomainClass::Classic
    } else if extended.contains(value, DOMAIN_MARGIN) {
        log::warn!(
            "{} = {value} lies in the extended domain {} but outside the classic {}",
            extended.label,
            extended.label,
            classic.label
        );
        DomainClass::Extended
    } else {
        DomainClass::Outside
    }
}

/// Builds Σ_η, Σ_ρ or Σ_ε without checking the parameter against its
/// extended domain. Only structural requirements are enforced: `η < 1`,
/// `ρ > -2 d_m`, `ε > 0`.
pub fn build_unchecked(
    g: &Graph,
    xt: &AggregatedMeasurement,
    parameter: SchemeParameter,
) -> Result<IterativeScheme> {
    require_connected(g, xt)?;
    let n = g.node_count();
    let classic = classic_domains(g)?;
    let extended = extended_domains(g)?;
    let u_0 = u0(g, xt);
    match parameter {
        SchemeParameter::Eta(eta) => {
            if !(eta < 1.0) {
                return Err(Error::InvalidParameter(format!("eta = {eta} must be < 1")));
            }
            let f = DMatrix::identity(n, n) * eta + f0(g) * (1.0 - eta);
            let u = &u_0 * (1.0 - eta);
            let q = RegularizationVector::new(q_from_eta(g, eta))?;
            let domain = classify(eta, &classic.eta, &extended.eta);
            IterativeScheme::assemble(g, SchemeLabel::SigmaEta, parameter, f, u, q, domain)
        }
        SchemeParameter::Rho(rho) => {
            let d_min = g.degrees().min as f64;
            if !(rho > -2.0 * d_min) {
                return Err(Error::InvalidParameter(format!(
                    "rho = {rho} <= -2 d_m makes D + rho/2 I singular or indefinite"
                )));
            }
            let half = 0.5 * rho;
            let f = DMatrix::from_fn(n, n, |i, j| {
                let a = if i == j {
                    half
                } else if g.has_edge(i, j) {
                    1.0
                } else {
                    0.0
                };
                a / (g.degree(i) as f64 + half)
            });
            let u = DVector::from_fn(n, |i, _| {
                let d = g.degree(i) as f64;
                d * u_0[i] / (d + half)
            });
            let q = RegularizationVector::new(q_from_rho(g, rho))?;
            let domain = classify(rho, &classic.rho, &extended.rho);
            IterativeScheme::assemble(g, SchemeLabel::SigmaRho, parameter, f, u, q, domain)
        }
        SchemeParameter::Eps(eps) => {
            if !(eps > 0.0) {
                return Err(Error::InvalidParameter(format!("eps = {eps} must be > 0")));
            }
            let f = DMatrix::identity(n, n) - g.laplacian() * eps;
            let u = DVector::from_fn(n, |i, _| eps * g.degree(i) as f64 * u_0[i]);
            let q = RegularizationVector::new(q_from_eps(g, eps))?;
            let domain = classify(eps, &classic.eps, &extended.eps);
            IterativeScheme::assemble(g, SchemeLabel::SigmaEps, parameter, f, u, q, domain)
        }
        SchemeParameter::None => build_sigma0(g, xt),
        SchemeParameter::Vector => Err(Error::InvalidParameter(
            "use build_sigma_q for vector parameters".into(),
        )),
    }
}

pub fn build_sigma_eta(g: &Graph, xt: &AggregatedMeasurement, eta: f64) -> Result<IterativeScheme> {
    extended_domains(g)?.eta.check(eta)?;
    build_unchecked(g, xt, SchemeParameter::Eta(eta))
}

pub fn build_sigma_rho(g: &Graph, xt: &AggregatedMeasurement, rho: f64) -> Result<IterativeScheme> {
    let d_min = g.degrees().min as f64;
    if !(rho > -2.0 * d_min) {
        return Err(Error::InvalidParameter(format!(
            "rho = {rho} <= -2 d_m makes D + rho/2 I singular or indefinite"
        )));
    }
    extended_domains(g)?.rho.check(rho)?;
    build_unchecked(g, xt, SchemeParameter::Rho(rho))
}

pub fn build_sigma_eps(g: &Graph, xt: &AggregatedMeasurement, eps: f64) -> Result<IterativeScheme> {
    extended_domains(g)?.eps.check(eps)?;
    build_unchecked(g, xt, SchemeParameter::Eps(eps))
}

/// Sufficient per-node domain `(μ, 1)` with `μ = 1 - 2 / λ_{n-1}^𝓛`.
pub fn regularization_domain(g: &Graph) -> Result<ParameterDomain> {
    let s = spectral::summary(g)?;
    domain_from_summary(&s, g.node_count())
}

fn domain_from_summary(s: &SpectralSummary, n: usize) -> Result<ParameterDomain> {
    let mu = s.mu();
    let lo = -1.0 + 2.0 / n as f64;
    if mu < lo - 1e-9 || mu > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} outside [{lo}, 0]; spectrum inconsistent"
        )));
    }
    ParameterDomain::new(mu, 1.0, "Qcheck")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeDomains {
    pub eta: ParameterDomain,
    pub rho: ParameterDomain,
    pub eps: ParameterDomain,
}

/// `Q_η = (0, 1)`, `Q_ρ = (0, ∞)`, `Q_ε = (0, 1/d_M)`.
pub fn classic_domains(g: &Graph) -> Result<SchemeDomains> {
    let d_max = g.degrees().max as f64;
    Ok(SchemeDomains {
        eta: ParameterDomain::new(0.0, 1.0, "Q_eta")?,
        rho: ParameterDomain::new(0.0, f64::INFINITY, "Q_rho")?,
        eps: ParameterDomain::new(0.0, 1.0 / d_max, "Q_eps")?,
    })
}

/// `Q̌_η = (μ, 1)`, `Q̌_ρ = (d_m (λ_{n-1}^𝓛 - 2), ∞)`, `Q̄_ε = (0, 2 / λ_{n-1}^L)`.
pub fn extended_domains(g: &Graph) -> Result<SchemeDomains> {
    let s = spectral::summary(g)?;
    let d_min = g.degrees().min as f64;
    Ok(SchemeDomains {
        eta: ParameterDomain::new(s.mu(), 1.0, "Qcheck_eta")?,
        rho: ParameterDomain::new(d_min * (s.lambda_max_nl - 2.0), f64::INFINITY, "Qcheck_rho")?,
        eps: ParameterDomain::new(0.0, 2.0 / s.lambda_max_l, "Qbar_eps")?,
    })
}

/// `η* = 1 - 1/ς_𝓛`.
pub fn optimal_eta(g: &Graph) -> Result<f64> {
    Ok(1.0 - 1.0 / spectral::summary(g)?.varsigma_nl)
}

/// `ε* = 1/ς_L`.
pub fn optimal_eps(g: &Graph) -> Result<f64> {
    Ok(1.0 / spectral::summary(g)?.varsigma_l)
}

/// Classic-domain η: `η*` when `ς_𝓛 >= 1`, otherwise the trivial `0`.
pub fn classic_optimal_eta(g: &Graph) -> Result<f64> {
    let s = spectral::summary(g)?;
    Ok(if s.varsigma_nl >= 1.0 {
        1.0 - 1.0 / s.varsigma_nl
    } else {
        0.0
    })
}

/// Classic-domain ρ: `ρ*` when `ς_𝓛 >= 1`, otherwise the trivial `0`.
pub fn classic_optimal_rho(g: &Graph, tol: f64) -> Result<f64> {
    let s = spectral::summary(g)?;
    if s.varsigma_nl >= 1.0 {
        optimal_rho(g, tol)
    } else {
        Ok(0.0)
    }
}

/// The search interval `2(ς_𝓛 - 1)·[s_m, s_M]` for ρ*.
pub fn rho_interval(g: &Graph) -> Result<(f64, f64)> {
    let s = spectral::summary(g)?;
    let p = g.degrees();
    let (s_m, s_max) = if s.varsigma_nl >= 1.0 {
        (p.min as f64, p.max as f64)
    } else {
        (p.max as f64, p.min as f64)
    };
    let k = 2.0 * (s.varsigma_nl - 1.0);
    Ok((k * s_m, k * s_max))
}

fn rho_cri(g: &Graph, rho: f64) -> f64 {
    spectral::spectrum_fq(g, &q_from_rho(g, rho))
        .and_then(|s| spectral::cri(&s))
        .unwrap_or(f64::INFINITY)
}

/// ρ minimizing the CRI of Σ_ρ over the interval from [`rho_interval`],
/// clipped to `Q̌_ρ`. A 64-point scan brackets the minimum, then golden
/// section narrows it to width `tol`. If the scan is not unimodal the best
/// point of a 1024-point grid is refined instead. Regular graphs return the
/// single admissible point directly.
pub fn optimal_rho(g: &Graph, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be > 0")));
    }
    let (mut lo, mut hi) = rho_interval(g)?;
    let domain = extended_domains(g)?.rho;
    let floor = domain.lower + DOMAIN_MARGIN.max(domain.lower.abs() * 1e-9);
    lo = lo.max(floor);
    hi = hi.max(lo);
    if g.regular_degree().is_some() || hi - lo <= tol {
        return Ok(0.5 * (lo + hi));
    }
    let scan = grid(lo, hi, 64);
    let values: Vec<f64> = scan.iter().map(|&r| rho_cri(g, r)).collect();
    let best = argmin(&values);
    let (a, b) = if is_unimodal(&values) {
        (
            scan[best.saturating_sub(1)],
            scan[(best + 1).min(scan.len() - 1)],
        )
    } else {
        log::debug!("rho scan is not unimodal; refining a dense grid");
        let dense = grid(lo, hi, 1024);
        let dv: Vec<f64> = dense.iter().map(|&r| rho_cri(g, r)).collect();
        let k = argmin(&dv);
        (
            dense[k.saturating_sub(1)],
            dense[(k + 1).min(dense.len() - 1)],
        )
    };
    let refined = golden_section(|r| rho_cri(g, r), a, b, tol);
    // keep the scanned point if refinement did not beat it
    Ok(if rho_cri(g, refined) <= values[best] {
        refined
    } else {
        scan[best]
    })
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

/// First index of the minimum, so ties resolve to the smaller parameter.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

fn is_unimodal(values: &[f64]) -> bool {
    const SLACK: f64 = 1e-12;
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] + SLACK {
            rising = true;
        } else if rising && w[1] < w[0] - SLACK {
            return false;
        }
    }
    true
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
