//! Relative measurements, the least-squares cost and its centralized solution.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral;

/// Node states or estimates, one scalar per node.
pub type StateVector = DVector<f64>;

/// Noisy relative measurements `x̃_ij ≈ x_j - x_i`, one per ordered adjacent
/// pair. Keys are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub n: usize,
    pub entries: BTreeMap<(usize, usize), f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl MeasurementSet {
    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        self.entries
            .get(&(i, j))
            .copied()
            .ok_or(Error::MissingMeasurement { i: i + 1, j: j + 1 })
    }

    /// CSV with a `# n=.. sigma=.. seed=..` header line and 1-based ids.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# n={} sigma={} seed={}",
            self.n, self.noise_sigma, self.seed
        )?;
        writeln!(w, "i,j,value")?;
        for (&(i, j), v) in &self.entries {
            writeln!(w, "{},{},{}", i + 1, j + 1, v)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (n, noise_sigma, seed) = {
            let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
            let header = header?;
            let body = header
                .strip_prefix('#')
                .ok_or_else(|| err(1, "expected `# n=.. sigma=.. seed=..`"))?;
            let mut n = None;
            let mut sigma = None;
            let mut seed = None;
            for tok in body.split_whitespace() {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| err(1, "bad header token"))?;
                match k {
                    "n" => n = v.parse().ok(),
                    "sigma" => sigma = v.parse().ok(),
                    "seed" => seed = v.parse().ok(),
                    _ => return Err(err(1, "unknown header key")),
                }
            }
            (
                n.ok_or_else(|| err(1, "missing n"))?,
                sigma.ok_or_else(|| err(1, "missing sigma"))?,
                seed.ok_or_else(|| err(1, "missing seed"))?,
            )
        };
        let mut entries = BTreeMap::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "i,j,value" {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(err(lineno, "expected 3 columns"));
            }
            let id = |s: &str| -> Result<usize> {
                let v: usize = s.trim().parse().map_err(|_| err(lineno, "bad node id"))?;
                if v == 0 || v > n {
                    return Err(err(lineno, "node id out of range"));
                }
                Ok(v - 1)
            };
            let value: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| err(lineno, "bad value"))?;
            entries.insert((id(cols[0])?, id(cols[1])?), value);
        }
        Ok(Self {
            n,
            entries,
            noise_sigma,
            seed,
        })
    }
}

/// `x̃_i = Σ_{j ∈ N_i} (x̃_ji - x̃_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedMeasurement {
    pub xt: DVector<f64>,
}

fn check_len(g: &Graph, len: usize) -> Result<()> {
    if len != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: len,
        });
    }
    Ok(())
}

/// Draws `x̃_ij = x_j - x_i + ν_ij` with independent `ν_ij ~ N(0, σ²)` per
/// ordered pair, in `(i, j)` lexicographic order from a ChaCha8 stream.
pub fn generate_measurements(
    g: &Graph,
    x: &StateVector,
    sigma: f64,
    seed: u64,
) -> Result<MeasurementSet> {
    check_len(g, x.len())?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be finite and >= 0, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut entries = BTreeMap::new();
    for i in 0..g.node_count() {
        for &j in g.neighbors(i) {
            let nu = if sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            entries.insert((i, j), x[j] - x[i] + nu);
        }
    }
    Ok(MeasurementSet {
        n: g.node_count(),
        entries,
        noise_sigma: sigma,
        seed,
    })
}

pub fn aggregate(g: &Graph, m: &MeasurementSet) -> Result<AggregatedMeasurement> {
    check_len(g, m.n)?;
    let mut xt = DVector::zeros(g.node_count());
    for i in 0..g.node_count() {
        for &j in g.neighbors(i) {
            xt[i] += m.get(j, i)? - m.get(i, j)?;
        }
    }
    Ok(AggregatedMeasurement { xt })
}

/// `h(x̂) = ½ Σ_i Σ_{j ∈ N_i} (x̂_i - x̂_j + x̃_ij)²`.
pub fn cost_h(g: &Graph, m: &MeasurementSet, xhat: &StateVector) -> Result<f64> {
    check_len(g, xhat.len())?;
    let mut h = 0.0;
    for i in 0..g.node_count() {
        for &j in g.neighbors(i) {
            let r = xhat[i] - xhat[j] + m.get(i, j)?;
            h += r * r;
        }
    }
    Ok(0.5 * h)
}

/// Minimum-norm minimizer `½ L† x̃`, with `L†` built from the eigenpairs of
/// `L` whose eigenvalue exceeds `1e-9 · λ_max`.
pub fn centralized_solution(g: &Graph, xt: &AggregatedMeasurement) -> Result<StateVector> {
    check_len(g, xt.xt.len())?;
    let scale = xt.xt.amax().max(1.0);
    let sum = xt.xt.sum();
    if sum.abs() > 1e-9 * scale {
        return Err(Error::NotZeroSum(sum));
    }
    let (values, vectors) = spectral::sym_eigen_decomposition(&g.laplacian())?;
    let tau = 1e-9 * values[values.len() - 1];
    if values.iter().filter(|&&v| v <= tau).count() > 1 {
        return Err(Error::Disconnected);
    }
    let mut out = DVector::zeros(g.node_count());
    for (k, &lam) in values.iter().enumerate() {
        if lam > tau {
            let v = vectors.column(k);
            out += v * (v.dot(&xt.xt) / lam);
        }
    }
    Ok(out * 0.5)
}

/// `x - mean(x) 𝟙`.
pub fn centered(x: &StateVector) -> StateVector {
    let mean = x.mean();
    x.map(|v| v - mean)
}
