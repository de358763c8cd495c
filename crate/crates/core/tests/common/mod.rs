#![allow(dead_code)]

use grds::graph::{Graph, Topology};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random spanning tree plus extra edges with probability `p`. When
/// `bipartite` is set, extra edges only join nodes of opposite tree parity.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, bipartite: bool) -> Graph {
    let mut edges = Vec::new();
    let mut depth = vec![0usize; n];
    for v in 1..n {
        let parent = rng.random_range(0..v);
        depth[v] = depth[parent] + 1;
        edges.push((parent, v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if edges.contains(&(i, j)) || edges.contains(&(j, i)) {
                continue;
            }
            if bipartite && depth[i] % 2 == depth[j] % 2 {
                continue;
            }
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn gen(t: Topology) -> Graph {
    Graph::generate(&t).unwrap()
}

/// Named graphs used by several suites, all with n <= 24.
pub fn small_corpus() -> Vec<(String, Graph)> {
    let topologies = vec![
        Topology::Complete { n: 2 },
        Topology::Complete { n: 4 },
        Topology::Complete { n: 7 },
        Topology::Path { n: 3 },
        Topology::Path { n: 9 },
        Topology::Star { n: 3 },
        Topology::Star { n: 8 },
        Topology::Cycle { n: 3 },
        Topology::Cycle { n: 12 },
        Topology::Circulant {
            n: 20,
            offsets: vec![1, 2],
        },
        Topology::Friendship { k: 9 },
        Topology::small_world_default(),
        Topology::RamanujanCandidate {
            n: 16,
            c: 3,
            seed: 0,
        },
        Topology::RandomRegular {
            n: 14,
            c: 4,
            seed: 3,
        },
    ];
    topologies
        .into_iter()
        .map(|t| (t.to_string(), gen(t)))
        .collect()
}
