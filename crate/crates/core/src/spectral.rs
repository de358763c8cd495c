//! Spectra of graph Laplacians and of the iteration state matrices.
//!
//! Every state matrix `F_Q = Q + (I - Q) D⁻¹A` with `q_i < 1` satisfies
//! `M F_Q = F_Qᵀ M` for the positive diagonal `M = (I - Q)⁻¹ D`, so
//! `M^{1/2} F_Q M^{-1/2}` is symmetric with the same eigenvalues. All state
//! matrix spectra are computed through that similarity; no general
//! nonsymmetric eigensolver is used anywhere.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::schemes::{self, SchemeLabel};

/// Largest node count accepted by the exhaustive Cheeger enumeration.
pub const CHEEGER_MAX_NODES: usize = 24;
/// Symmetry tolerance required by [`sym_eigen`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Distance from 1 within which an eigenvalue counts as the Perron root.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    NormalizedLaplacian,
    Laplacian,
    StateMatrix(SchemeLabel),
    Symmetric,
}

/// Real eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Second-smallest eigenvalue.
    pub fn second(&self) -> f64 {
        self.values[1]
    }

    /// `index,eigenvalue` rows with a 0-based index.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,eigenvalue")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v:.17e}")?;
        }
        Ok(())
    }
}

fn max_asymmetry(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    worst
}

/// Eigenvalues and matching eigenvector columns, ascending.
pub fn sym_eigen_decomposition(s: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            found: s.ncols(),
        });
    }
    let asym = max_asymmetry(s);
    if asym >= SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(s.clone());
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(s.nrows(), s.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn sym_eigen(s: &DMatrix<f64>, kind: SpectrumKind) -> Result<Spectrum> {
    let (values, _) = sym_eigen_decomposition(s)?;
    Ok(Spectrum { values, kind })
}

pub fn normalized_laplacian_spectrum(g: &Graph) -> Result<Spectrum> {
    sym_eigen(
        &g.normalized_laplacian()?,
        SpectrumKind::NormalizedLaplacian,
    )
}

pub fn laplacian_spectrum(g: &Graph) -> Result<Spectrum> {
    sym_eigen(&g.laplacian(), SpectrumKind::Laplacian)
}

/// Diagonal of `M = (I - Q)⁻¹ D`.
pub fn similarity_weights(g: &Graph, q: &[f64]) -> Result<Vec<f64>> {
    check_q(g, q)?;
    Ok(q.iter()
        .enumerate()
        .map(|(i, &qi)| g.degree(i) as f64 / (1.0 - qi))
        .collect())
}

fn check_q(g: &Graph, q: &[f64]) -> Result<()> {
    if q.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: q.len(),
        });
    }
    if let Some((node, &value)) = q.iter().enumerate().find(|(_, &v)| !(v < 1.0)) {
        return Err(Error::RegularizationOutOfRange {
            node: node + 1,
            value,
        });
    }
    Ok(())
}

/// `M^{1/2} F M^{-1/2}` for the state matrix `F` of a scheme with
/// regularization `q`.
pub fn symmetrize_state_matrix(g: &Graph, f: &DMatrix<f64>, q: &[f64]) -> Result<DMatrix<f64>> {
    let m = similarity_weights(g, q)?;
    let n = g.node_count();
    if f.nrows() != n || f.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.nrows(),
        });
    }
    let sqrt_m: Vec<f64> = m.iter().map(|v| v.sqrt()).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        f[(i, j)] * sqrt_m[i] / sqrt_m[j]
    }))
}

/// Spectrum of a state matrix `F` known to equal `F_Q` for the given `q`.
pub fn state_matrix_spectrum(
    g: &Graph,
    f: &DMatrix<f64>,
    q: &[f64],
    label: SchemeLabel,
) -> Result<Spectrum> {
    let s = symmetrize_state_matrix(g, f, q)?;
    sym_eigen(&s, SpectrumKind::StateMatrix(label))
}

/// Spectrum of `F_Q = Q + (I - Q) F₀`.
pub fn spectrum_fq(g: &Graph, q: &[f64]) -> Result<Spectrum> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    check_q(g, q)?;
    let f = schemes::state_matrix_q(g, q);
    state_matrix_spectrum(g, &f, q, SchemeLabel::SigmaQ)
}

/// Convergence rate index: the largest eigenvalue modulus once the Perron
/// root at 1 has been set aside.
pub fn cri(s: &Spectrum) -> Result<f64> {
    if s.len() < 2 {
        return Err(Error::UnitEigenvalue(
            "spectrum has fewer than 2 values".into(),
        ));
    }
    let (unit_idx, gap) = s
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, (v - 1.0).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if gap > UNIT_TOL {
        return Err(Error::UnitEigenvalue(format!(
            "no eigenvalue within {UNIT_TOL:e} of 1 (closest off by {gap:e})"
        )));
    }
    let rest = s
        .values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != unit_idx)
        .map(|(_, v)| *v);
    if rest.clone().any(|v| (v - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::UnitEigenvalue(
            "repeated unit eigenvalue (disconnected graph)".into(),
        ));
    }
    Ok(rest.map(f64::abs).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub lambda1_nl: f64,
    pub lambda_max_nl: f64,
    pub varsigma_nl: f64,
    pub lambda1_l: f64,
    pub lambda_max_l: f64,
    pub varsigma_l: f64,
}

impl SpectralSummary {
    pub fn from_spectra(nl: &Spectrum, l: &Spectrum) -> Self {
        let (lambda1_nl, lambda_max_nl) = (nl.second(), nl.max());
        let (lambda1_l, lambda_max_l) = (l.second(), l.max());
        Self {
            lambda1_nl,
            lambda_max_nl,
            varsigma_nl: 0.5 * (lambda1_nl + lambda_max_nl),
            lambda1_l,
            lambda_max_l,
            varsigma_l: 0.5 * (lambda1_l + lambda_max_l),
        }
    }

    /// `μ = 1 - 2 / λ_{n-1}^𝓛`.
    pub fn mu(&self) -> f64 {
        1.0 - 2.0 / self.lambda_max_nl
    }
}

/// Extreme eigenvalues and midpoints of the normalized and plain Laplacians.
/// Fails on disconnected graphs.
pub fn summary(g: &Graph) -> Result<SpectralSummary> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let nl = normalized_laplacian_spectrum(g)?;
    let l = laplacian_spectrum(g)?;
    Ok(SpectralSummary::from_spectra(&nl, &l))
}

/// Minimum cut ratio `|cut(S, Sᶜ)| / min(vol S, vol Sᶜ)` as an exact fraction.
pub fn cheeger_fraction(g: &Graph) -> Result<(u64, u64)> {
    let n = g.node_count();
    if n > CHEEGER_MAX_NODES {
        return Err(Error::ExhaustiveBoundExceeded {
            n,
            max: CHEEGER_MAX_NODES,
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let deg: Vec<i64> = (0..n).map(|i| g.degree(i) as i64).collect();
    let total: i64 = deg.iter().sum();
    // Node 0 stays outside S; Gray code walks every subset of the rest.
    let mut in_s = vec![false; n];
    let (mut cut, mut vol) = (0i64, 0i64);
    let mut best: Option<(u64, u64)> = None;
    let count: u64 = 1 << (n - 1);
    for step in 1..count {
        let v = step.trailing_zeros() as usize + 1;
        let entering = !in_s[v];
        for &u in g.neighbors(v) {
            let same_side = in_s[u] == in_s[v];
            cut += if same_side { 1 } else { -1 };
        }
        in_s[v] = entering;
        vol += if entering { deg[v] } else { -deg[v] };
        let denom = vol.min(total - vol);
        if denom == 0 {
            continue;
        }
        let cand = (cut as u64, denom as u64);
        best = match best {
            Some(b) if b.0 * cand.1 <= cand.0 * b.1 => Some(b),
            _ => Some(cand),
        };
    }
    Ok(best.expect("n >= 2 connected graph has a proper cut"))
}

pub fn cheeger_constant(g: &Graph) -> Result<f64> {
    let (num, den) = cheeger_fraction(g)?;
    Ok(num as f64 / den as f64)
}

/// Upper bound on the Cheeger constant from all cuts that split the node ids
/// into two cyclically contiguous arcs. Works for any `n`.
pub fn cheeger_upper_bound_arcs(g: &Graph) -> Result<f64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let total = g.degrees().volume as f64;
    let mut best = f64::INFINITY;
    for start in 0..n {
        let mut in_s = vec![false; n];
        let (mut cut, mut vol) = (0i64, 0usize);
        for len in 1..n {
            let v = (start + len - 1) % n;
            for &u in g.neighbors(v) {
                cut += if in_s[u] { -1 } else { 1 };
            }
            in_s[v] = true;
            vol += g.degree(v);
            let denom = (vol as f64).min(total - vol as f64);
            best = best.min(cut as f64 / denom);
        }
    }
    Ok(best)
}

/// `min over edges (i, j) of |N_i ∩ N_j| / (2 max(d_i, d_j))`.
pub fn hg_coefficient(g: &Graph) -> Result<f64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let best = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let common = g.neighbors(i).iter().filter(|k| g.has_edge(j, **k)).count();
            common as f64 / (2 * g.degree(i).max(g.degree(j))) as f64
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    /// `None` when the graph is too large for the exhaustive Cheeger search.
    pub cheeger: Option<f64>,
    pub hg: f64,
    pub lambda1_le_2cheeger: Option<bool>,
    pub lambda_max_le_2_1m_hg: bool,
    pub varsigma_lt_1: bool,
    /// `C_G < H_G`, decided exactly for small graphs and through the arc
    /// upper bound otherwise; `None` when the arc bound is inconclusive.
    pub cheeger_lt_hg: Option<bool>,
}

pub fn bound_report(g: &Graph) -> Result<BoundReport> {
    const TOL: f64 = 1e-9;
    let s = summary(g)?;
    let hg = hg_coefficient(g)?;
    let cheeger = match cheeger_constant(g) {
        Ok(c) => Some(c),
        Err(Error::ExhaustiveBoundExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let cheeger_lt_hg = match cheeger {
        Some(c) => Some(c < hg),
        None => {
            let ub = cheeger_upper_bound_arcs(g)?;
            (ub < hg).then_some(true)
        }
    };
    Ok(BoundReport {
        cheeger,
        hg,
        lambda1_le_2cheeger: cheeger.map(|c| s.lambda1_nl <= 2.0 * c + TOL),
        lambda_max_le_2_1m_hg: s.lambda_max_nl <= 2.0 * (1.0 - hg) + TOL,
        varsigma_lt_1: s.varsigma_nl < 1.0 - TOL,
        cheeger_lt_hg,
    })
}

/// `max over nontrivial 𝓛 eigenvalues of c |1 - λ| <= 2 sqrt(c - 1)`.
pub fn ramanujan_check(g: &Graph) -> Result<bool> {
    let c = g.regular_degree().ok_or(Error::NotRegular)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let nl = normalized_laplacian_spectrum(g)?;
    let c = c as f64;
    let worst = nl.values[1..]
        .iter()
        .map(|l| c * (1.0 - l).abs())
        .fold(0.0, f64::max);
    Ok(worst <= 2.0 * (c - 1.0).sqrt() + 1e-9)
}

/// Symmetric part check helper exposed for tests: `max |M F - Fᵀ M|`.
pub fn similarity_residual(g: &Graph, f: &DMatrix<f64>, q: &[f64]) -> Result<f64> {
    let m = DMatrix::from_diagonal(&DVector::from_vec(similarity_weights(g, q)?));
    Ok((&m * f - f.transpose() * &m).amax())
}
