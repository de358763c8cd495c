mod common;

use common::{gen, small_corpus};
use grds::graph::{Graph, Topology};
use grds::optimizer::{
    greedy_optimize, greedy_optimize_from, project, scheme_starting_points, OptimizerConfig,
};
use grds::schemes::{optimal_eta, q_from_eta, regularization_domain, SchemeLabel};
use grds::spectral::{cri, spectrum_fq};

fn cri_q(g: &Graph, q: &[f64]) -> f64 {
    cri(&spectrum_fq(g, q).unwrap()).unwrap()
}

fn cfg(iterations: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        iterations,
        seed,
        ..Default::default()
    }
}

#[test]
fn friendship_stays_at_one_half() {
    let g = gen(Topology::Friendship { k: 9 });
    let trace = greedy_optimize(&g, &cfg(1000, 1)).unwrap();
    assert!((trace.best_cri[0] - 0.5).abs() < 1e-9);
    assert!((trace.final_cri() - 0.5).abs() < 1e-3);
}

#[test]
fn circulant_reaches_the_reported_cri() {
    let g = gen(Topology::Circulant {
        n: 36,
        offsets: vec![1, 2],
    });
    let trace = greedy_optimize(&g, &cfg(2000, 2)).unwrap();
    assert!(
        (trace.final_cri() - 0.953).abs() < 1e-3,
        "{}",
        trace.final_cri()
    );
}

#[test]
fn ramanujan_never_worse_than_eta_star() {
    let g = gen(Topology::RamanujanCandidate {
        n: 16,
        c: 3,
        seed: 0,
    });
    let eta = cri_q(&g, &q_from_eta(&g, optimal_eta(&g).unwrap()));
    let trace = greedy_optimize(&g, &cfg(1500, 3)).unwrap();
    assert!(trace.final_cri() <= eta + 1e-12);
}

#[test]
fn line_graph_family_is_escaped() {
    // star(3): q = (1 - 2t, t, t) has spectrum {1, t, -t}
    let g = gen(Topology::Star { n: 3 });
    for t in [0.1, 0.25, 0.4] {
        assert!((cri_q(&g, &[1.0 - 2.0 * t, t, t]) - t).abs() < 1e-12);
    }
    let trace = greedy_optimize_from(
        &g,
        &cfg(2000, 4),
        vec![0.5, 0.25, 0.25],
        SchemeLabel::SigmaQ,
    )
    .unwrap();
    assert!((trace.best_cri[0] - 0.25).abs() < 1e-9);
    assert!(trace.final_cri() < 0.05, "{}", trace.final_cri());
}

#[test]
fn never_worse_than_any_scheme_start() {
    for (name, g) in small_corpus() {
        let dom = regularization_domain(&g).unwrap();
        let c = cfg(200, 5);
        let trace = greedy_optimize(&g, &c).unwrap();
        for (label, q) in scheme_starting_points(&g).unwrap() {
            let start = cri_q(&g, &q);
            let projected = cri_q(&g, &project(&q, &dom, c.margin).unwrap());
            let inside = q.iter().all(|&v| dom.contains(v, 0.0));
            // starts outside (μ, 1) are compared after projection
            let reference = if inside {
                start.max(projected)
            } else {
                projected
            };
            assert!(
                trace.final_cri() <= reference + 1e-6,
                "{name}: {label} start {start} projected {projected} final {}",
                trace.final_cri()
            );
        }
    }
}

#[test]
fn every_trace_point_is_feasible_and_convergent() {
    let g = gen(Topology::small_world_default());
    let c = cfg(400, 6);
    let trace = greedy_optimize(&g, &c).unwrap();
    let mu = regularization_domain(&g).unwrap().lower;
    for (q, r) in trace.best_q.iter().zip(&trace.best_cri) {
        assert!(q.iter().all(|&v| v > mu && v < 1.0));
        assert!(*r < 1.0);
    }
    for w in trace.best_cri.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn restarts_extend_the_trace() {
    let g = gen(Topology::Cycle { n: 7 });
    let c = OptimizerConfig {
        restarts: 2,
        ..cfg(50, 7)
    };
    let trace = greedy_optimize(&g, &c).unwrap();
    assert_eq!(trace.iterations(), 150);
}
