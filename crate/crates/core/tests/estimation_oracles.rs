mod common;

use common::{random_connected, uniform_vec};
use grds::estimation::{aggregate, centralized_solution, cost_h, generate_measurements};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(clippy::needless_range_loop)]
/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Minimum-norm solution of `2L x = x̃` from the normal equations of the
/// stacked system `[2L; 𝟙ᵀ] x = [x̃; 0]`.
fn constrained_least_squares(l: &[Vec<f64>], xt: &[f64]) -> Vec<f64> {
    let n = xt.len();
    let mut rows: Vec<Vec<f64>> = l
        .iter()
        .map(|r| r.iter().map(|v| 2.0 * v).collect())
        .collect();
    rows.push(vec![1.0; n]);
    let mut rhs = xt.to_vec();
    rhs.push(0.0);
    let ata: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rows.iter().map(|r| r[i] * r[j]).sum())
                .collect()
        })
        .collect();
    let atb: Vec<f64> = (0..n)
        .map(|i| rows.iter().zip(&rhs).map(|(r, b)| r[i] * b).sum())
        .collect();
    solve_dense(ata, atb)
}

#[test]
fn centralized_matches_constrained_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..60 {
        let n = rng.random_range(2..=8);
        let g = random_connected(&mut rng, n, 0.35, trial % 3 == 0);
        let x = DVector::from_vec(uniform_vec(&mut rng, n, -5.0, 5.0));
        let m = generate_measurements(&g, &x, 0.3, trial).unwrap();
        let xt = aggregate(&g, &m).unwrap();
        let sol = centralized_solution(&g, &xt).unwrap();

        let lap = g.laplacian();
        let l: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| lap[(i, j)]).collect())
            .collect();
        let oracle = constrained_least_squares(&l, xt.xt.as_slice());
        for i in 0..n {
            assert!((sol[i] - oracle[i]).abs() < 1e-8, "trial {trial}");
        }
        assert!(sol.sum().abs() < 1e-9);
        assert!((lap * &sol * 2.0 - &xt.xt).amax() < 1e-8);
    }
}

#[test]
fn gradient_vanishes_at_centralized_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let step = 1e-6;
    for trial in 0..40 {
        let n = rng.random_range(2..=10);
        let g = random_connected(&mut rng, n, 0.4, false);
        let x = DVector::from_vec(uniform_vec(&mut rng, n, -3.0, 3.0));
        let m = generate_measurements(&g, &x, 0.5, trial).unwrap();
        let sol = centralized_solution(&g, &aggregate(&g, &m).unwrap()).unwrap();
        for i in 0..n {
            let mut plus = sol.clone();
            plus[i] += step;
            let mut minus = sol.clone();
            minus[i] -= step;
            let grad =
                (cost_h(&g, &m, &plus).unwrap() - cost_h(&g, &m, &minus).unwrap()) / (2.0 * step);
            assert!(grad.abs() < 1e-7, "trial {trial} coordinate {i}: {grad:e}");
        }
    }
}

#[test]
fn perturbations_never_lower_the_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let n = 9;
    let g = random_connected(&mut rng, n, 0.3, false);
    let x = DVector::from_vec(uniform_vec(&mut rng, n, -3.0, 3.0));
    let m = generate_measurements(&g, &x, 0.4, 8).unwrap();
    let sol = centralized_solution(&g, &aggregate(&g, &m).unwrap()).unwrap();
    let h0 = cost_h(&g, &m, &sol).unwrap();
    for _ in 0..100 {
        let mut d = DVector::from_vec(uniform_vec(&mut rng, n, -1.0, 1.0));
        let mean = d.mean();
        d.add_scalar_mut(-mean);
        d *= 1e-3 / d.norm();
        assert!(h0 <= cost_h(&g, &m, &(&sol + d)).unwrap());
    }
}
