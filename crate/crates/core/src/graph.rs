//! Undirected simple graphs modelling sensor networks.
//!
//! Node indices are 0-based in the API. The edge-list text format and every
//! CSV written by the crate use 1-based ids.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

/// Attempts made by the pairing model before giving up on a simple graph.
const PAIRING_BUDGET: usize = 10_000;
/// Random regular graphs tried when looking for a Ramanujan candidate.
const RAMANUJAN_BUDGET: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based unordered pairs. Rejects self-loops,
    /// duplicate edges (in either orientation) and out-of-range ids.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", a + 1)));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    a + 1,
                    b + 1
                )));
            }
        }
        Ok(Self::from_sorted_set(n, set))
    }

    fn from_sorted_set(n: usize, set: BTreeSet<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self {
            n,
            edges: set.into_iter().collect(),
            adj,
        }
    }

    /// Like [`Graph::new`] but silently merges duplicate pairs.
    fn dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self::from_sorted_set(n, set)
    }

    pub fn generate(topology: &Topology) -> Result<Self> {
        topology.build()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Unordered edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn degrees(&self) -> DegreeProfile {
        let d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        DegreeProfile {
            min: d.iter().copied().min().unwrap_or(0),
            max: d.iter().copied().max().unwrap_or(0),
            volume: d.iter().sum(),
            degrees: d,
        }
    }

    /// Common degree if every node has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let p = self.degrees();
        (p.min == p.max).then_some(p.min)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Two-colouring by breadth-first search over every component.
    pub fn is_bipartite(&self) -> bool {
        let mut colour: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap();
                for &v in &self.adj[u] {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for i in 0..self.n {
            l[(i, i)] = self.degree(i) as f64;
        }
        l
    }

    /// `D^{-1/2} L D^{-1/2}`; fails on isolated nodes.
    pub fn normalized_laplacian(&self) -> Result<DMatrix<f64>> {
        if let Some(i) = (0..self.n).find(|&i| self.degree(i) == 0) {
            return Err(Error::IsolatedNode(i + 1));
        }
        let scale: Vec<f64> = (0..self.n)
            .map(|i| 1.0 / (self.degree(i) as f64).sqrt())
            .collect();
        let mut nl = DMatrix::identity(self.n, self.n);
        for &(i, j) in &self.edges {
            let v = -scale[i] * scale[j];
            nl[(i, j)] = v;
            nl[(j, i)] = v;
        }
        Ok(nl)
    }

    pub fn matrices(&self) -> Result<DenseMatrixBundle> {
        let normalized_laplacian = self.normalized_laplacian()?;
        let adjacency = self.adjacency();
        let degree = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n,
            (0..self.n).map(|i| self.degree(i) as f64),
        ));
        let laplacian = &degree - &adjacency;
        Ok(DenseMatrixBundle {
            adjacency,
            degree,
            laplacian,
            normalized_laplacian,
        })
    }

    /// Writes the `n <count>` header followed by one 1-based `i j` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n {}", self.n)?;
        for &(i, j) in &self.edges {
            writeln!(w, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let parse_err = |msg: String| Error::Parse { line: lineno, msg };
            match n {
                None => {
                    if parts.next() != Some("n") {
                        return Err(parse_err("expected header `n <count>`".into()));
                    }
                    let count = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| parse_err("invalid node count".into()))?;
                    n = Some(count);
                }
                Some(count) => {
                    let mut id = || -> Result<usize> {
                        let v = parts
                            .next()
                            .and_then(|s| s.parse::<usize>().ok())
                            .ok_or_else(|| parse_err("expected two node ids".into()))?;
                        if v == 0 || v > count {
                            return Err(parse_err(format!("node id {v} outside 1..={count}")));
                        }
                        Ok(v - 1)
                    };
                    let a = id()?;
                    let b = id()?;
                    if parts.next().is_some() {
                        return Err(parse_err("trailing tokens".into()));
                    }
                    edges.push((a, b));
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing header `n <count>`".into(),
        })?;
        Graph::new(n, edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub min: usize,
    pub max: usize,
    pub volume: usize,
}

#[derive(Debug, Clone)]
pub struct DenseMatrixBundle {
    pub adjacency: DMatrix<f64>,
    pub degree: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    pub normalized_laplacian: DMatrix<f64>,
}

/// Topology descriptors understood by [`Graph::generate`].
///
/// Textual form (used by config files): `complete:5`, `path:3`, `star:4`,
/// `cycle:12`, `circulant:36:1,2`, `friendship:9`, `clique_bridge:6,7,9`,
/// `clique_bridge:6,7,9:6-7,13-14,22-1,3-17`, `random_regular:16:3:7`,
/// `ramanujan:16:3:7`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    /// Hub is node 1.
    Star {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Circulant {
        n: usize,
        offsets: Vec<usize>,
    },
    /// `k` triangles sharing hub node 1; `n = 2k + 1`.
    Friendship {
        k: usize,
    },
    /// Cliques on consecutive id blocks joined by 1-based bridge edges. With
    /// no bridges, the last node of each block is joined to the first node
    /// of the next one.
    CliqueBridge {
        sizes: Vec<usize>,
        bridges: Option<Vec<(usize, usize)>>,
    },
    RandomRegular {
        n: usize,
        c: usize,
        seed: u64,
    },
    RamanujanCandidate {
        n: usize,
        c: usize,
        seed: u64,
    },
}

impl Topology {
    /// Three cliques of 6, 7 and 9 nodes joined by four bridge edges.
    pub fn small_world_default() -> Self {
        Topology::CliqueBridge {
            sizes: vec![6, 7, 9],
            bridges: Some(vec![(6, 7), (13, 14), (22, 1), (3, 17)]),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Topology::Complete { n }
            | Topology::Path { n }
            | Topology::Star { n }
            | Topology::Cycle { n }
            | Topology::Circulant { n, .. }
            | Topology::RandomRegular { n, .. }
            | Topology::RamanujanCandidate { n, .. } => *n,
            Topology::Friendship { k } => 2 * k + 1,
            Topology::CliqueBridge { sizes, .. } => sizes.iter().sum(),
        }
    }

    fn build(&self) -> Result<Graph> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            &Topology::Complete { n } => {
                if n < 2 {
                    return invalid(format!("complete graph needs n >= 2, got {n}"));
                }
                Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
            }
            &Topology::Path { n } => {
                if n < 2 {
                    return invalid(format!("path needs n >= 2, got {n}"));
                }
                Graph::new(n, (0..n - 1).map(|i| (i, i + 1)))
            }
            &Topology::Star { n } => {
                if n < 2 {
                    return invalid(format!("star needs n >= 2, got {n}"));
                }
                Graph::new(n, (1..n).map(|i| (0, i)))
            }
            &Topology::Cycle { n } => {
                if n < 3 {
                    return invalid(format!("cycle needs n >= 3, got {n}"));
                }
                Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
            }
            Topology::Circulant { n, offsets } => circulant(*n, offsets),
            &Topology::Friendship { k } => {
                if k < 1 {
                    return invalid("friendship graph needs k >= 1".into());
                }
                let edges = (0..k).flat_map(|t| {
                    let (a, b) = (2 * t + 1, 2 * t + 2);
                    [(0, a), (0, b), (a, b)]
                });
                Graph::new(2 * k + 1, edges)
            }
            Topology::CliqueBridge { sizes, bridges } => clique_bridge(sizes, bridges.as_deref()),
            &Topology::RandomRegular { n, c, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_regular(n, c, &mut rng)
            }
            &Topology::RamanujanCandidate { n, c, seed } => ramanujan_candidate(n, c, seed),
        }
    }
}

fn circulant(n: usize, offsets: &[usize]) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "circulant graph needs n >= 3, got {n}"
        )));
    }
    if offsets.is_empty() {
        return Err(Error::InvalidParameter(
            "circulant graph needs offsets".into(),
        ));
    }
    for &s in offsets {
        if s == 0 || s > n / 2 {
            return Err(Error::InvalidParameter(format!(
                "circulant offset {s} outside 1..={}",
                n / 2
            )));
        }
    }
    Ok(Graph::dedup(
        n,
        (0..n).flat_map(|i| offsets.iter().map(move |&s| (i, (i + s) % n))),
    ))
}

fn clique_bridge(sizes: &[usize], bridges: Option<&[(usize, usize)]>) -> Result<Graph> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "clique sizes must be non-empty and positive".into(),
        ));
    }
    let n: usize = sizes.iter().sum();
    let mut edges = Vec::new();
    let mut starts = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for &s in sizes {
        starts.push(offset);
        for i in offset..offset + s {
            for j in i + 1..offset + s {
                edges.push((i, j));
            }
        }
        offset += s;
    }
    match bridges {
        Some(list) => {
            for &(a, b) in list {
                if a == 0 || b == 0 || a > n || b > n {
                    return Err(Error::InvalidParameter(format!(
                        "bridge ({a}, {b}) outside 1..={n}"
                    )));
                }
                edges.push((a - 1, b - 1));
            }
        }
        None => {
            for w in 0..sizes.len().saturating_sub(1) {
                edges.push((starts[w] + sizes[w] - 1, starts[w + 1]));
            }
        }
    }
    Graph::new(n, edges)
}

/// Pairing model with rejection of loops and multi-edges.
pub(crate) fn random_regular(n: usize, c: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n < 2 || c == 0 || c >= n {
        return Err(Error::InvalidParameter(format!(
            "regular graph needs 1 <= c < n, got n = {n}, c = {c}"
        )));
    }
    if (n * c) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n * c = {} is odd", n * c)));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, c)).collect();
    'attempt: for _ in 0..PAIRING_BUDGET {
        points.shuffle(rng);
        let mut set = BTreeSet::new();
        for pair in points.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || !set.insert((a.min(b), a.max(b))) {
                continue 'attempt;
            }
        }
        return Ok(Graph::from_sorted_set(n, set));
    }
    Err(Error::RetryBudgetExhausted {
        attempts: PAIRING_BUDGET,
        what: format!("simple {c}-regular graph on {n} nodes"),
    })
}

/// First seeded random `c`-regular graph that is connected, non-bipartite,
/// Ramanujan and has `ς_𝓛 > 1`.
fn ramanujan_candidate(n: usize, c: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RAMANUJAN_BUDGET {
        let g = random_regular(n, c, &mut rng)?;
        if !g.is_connected() || g.is_bipartite() {
            continue;
        }
        if !spectral::ramanujan_check(&g)? {
            continue;
        }
        if spectral::summary(&g)?.varsigma_nl > 1.0 {
            return Ok(g);
        }
    }
    Err(Error::RetryBudgetExhausted {
        attempts: RAMANUJAN_BUDGET,
        what: format!("Ramanujan {c}-regular graph on {n} nodes with varsigma > 1"),
    })
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Topology::Complete { n } => write!(f, "complete:{n}"),
            Topology::Path { n } => write!(f, "path:{n}"),
            Topology::Star { n } => write!(f, "star:{n}"),
            Topology::Cycle { n } => write!(f, "cycle:{n}"),
            Topology::Circulant { n, offsets } => write!(f, "circulant:{n}:{}", join(offsets)),
            Topology::Friendship { k } => write!(f, "friendship:{k}"),
            Topology::CliqueBridge { sizes, bridges } => {
                write!(f, "clique_bridge:{}", join(sizes))?;
                if let Some(b) = bridges {
                    let b: Vec<String> = b.iter().map(|(i, j)| format!("{i}-{j}")).collect();
                    write!(f, ":{}", b.join(","))?;
                }
                Ok(())
            }
            Topology::RandomRegular { n, c, seed } => write!(f, "random_regular:{n}:{c}:{seed}"),
            Topology::RamanujanCandidate { n, c, seed } => write!(f, "ramanujan:{n}:{c}:{seed}"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("topology `{s}`: {msg}"));
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| bad("missing field"))?
                .parse()
                .map_err(|_| bad("expected an integer"))
        };
        let seed = |i: usize| -> Result<u64> {
            match parts.get(i) {
                None => Ok(0),
                Some(p) => p.parse().map_err(|_| bad("expected an integer seed")),
            }
        };
        let list = |i: usize| -> Result<Vec<usize>> {
            parts
                .get(i)
                .ok_or_else(|| bad("missing list"))?
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| bad("expected integer list")))
                .collect()
        };
        let expect_len = |lo: usize, hi: usize| {
            if parts.len() < lo || parts.len() > hi {
                Err(bad("wrong number of fields"))
            } else {
                Ok(())
            }
        };
        let topo = match parts[0] {
            "complete" => {
                expect_len(2, 2)?;
                Topology::Complete { n: num(1)? }
            }
            "path" => {
                expect_len(2, 2)?;
                Topology::Path { n: num(1)? }
            }
            "star" => {
                expect_len(2, 2)?;
                Topology::Star { n: num(1)? }
            }
            "cycle" => {
                expect_len(2, 2)?;
                Topology::Cycle { n: num(1)? }
            }
            "circulant" => {
                expect_len(3, 3)?;
                Topology::Circulant {
                    n: num(1)?,
                    offsets: list(2)?,
                }
            }
            "friendship" => {
                expect_len(2, 2)?;
                Topology::Friendship { k: num(1)? }
            }
            "clique_bridge" => {
                expect_len(2, 3)?;
                let bridges = match parts.get(2) {
                    None => None,
                    Some(spec) => Some(
                        spec.split(',')
                            .map(|pair| {
                                let (a, b) = pair
                                    .split_once('-')
                                    .ok_or_else(|| bad("bridge must look like `i-j`"))?;
                                let a = a.trim().parse().map_err(|_| bad("bad bridge id"))?;
                                let b = b.trim().parse().map_err(|_| bad("bad bridge id"))?;
                                Ok((a, b))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                };
                Topology::CliqueBridge {
                    sizes: list(1)?,
                    bridges,
                }
            }
            "random_regular" => {
                expect_len(3, 4)?;
                Topology::RandomRegular {
                    n: num(1)?,
                    c: num(2)?,
                    seed: seed(3)?,
                }
            }
            "ramanujan" => {
                expect_len(3, 4)?;
                Topology::RamanujanCandidate {
                    n: num(1)?,
                    c: num(2)?,
                    seed: seed(3)?,
                }
            }
            _ => return Err(bad("unknown kind")),
        };
        Ok(topo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(t: Topology) -> Graph {
        Graph::generate(&t).unwrap()
    }

    #[test]
    fn circulant_36_is_4_regular() {
        let g = gen(Topology::Circulant {
            n: 36,
            offsets: vec![1, 2],
        });
        assert_eq!(g.edge_count(), 72);
        assert_eq!(g.regular_degree(), Some(4));
        for i in 0..36 {
            for s in [1, 2] {
                assert!(g.has_edge(i, (i + s) % 36));
                assert!(g.has_edge(i, (i + 36 - s) % 36));
            }
        }
        // degree matrix from an independent count over the edge list
        let mut count = [0usize; 36];
        for &(a, b) in g.edges() {
            count[a] += 1;
            count[b] += 1;
        }
        let m = g.matrices().unwrap();
        for (i, c) in count.iter().enumerate() {
            assert_eq!(*c, 4);
            assert_eq!(m.degree[(i, i)], 4.0);
        }
    }

    #[test]
    fn friendship_nine_triangles() {
        let g = gen(Topology::Friendship { k: 9 });
        assert_eq!(g.node_count(), 19);
        assert_eq!(g.degree(0), 18);
        assert!((1..19).all(|i| g.degree(i) == 2));
        assert!(g.is_connected());
        assert!(!g.is_bipartite());
    }

    #[test]
    fn complete_two_is_single_edge() {
        let g = gen(Topology::Complete { n: 2 });
        assert_eq!(g.edges(), &[(0, 1)]);
        let p = g.degrees();
        assert_eq!((p.min, p.max, p.volume), (1, 1, 2));
        let nl = g.normalized_laplacian().unwrap();
        assert_eq!(nl, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn small_world_default_instance() {
        let g = gen(Topology::small_world_default());
        assert_eq!(g.node_count(), 22);
        assert_eq!(g.edge_count(), 15 + 21 + 36 + 4);
        assert!(g.is_connected());
        assert!(g.has_edge(21, 0) && g.has_edge(2, 16));
    }

    #[test]
    fn path_three_laplacian() {
        let g = gen(Topology::Path { n: 3 });
        let l = g.laplacian();
        let expected =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(l, expected);
        assert!(g.is_connected());
        assert!(g.is_bipartite());
    }

    #[test]
    fn disjoint_edges_are_disconnected() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn isolated_node_rejected_for_normalized_laplacian() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        assert!(matches!(g.matrices(), Err(Error::IsolatedNode(3))));
    }

    #[test]
    fn invalid_edges_rejected() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(1, []).is_err());
    }

    #[test]
    fn invalid_descriptors() {
        assert!(Graph::generate(&Topology::RandomRegular {
            n: 5,
            c: 3,
            seed: 1
        })
        .is_err());
        assert!(Graph::generate(&Topology::Circulant {
            n: 10,
            offsets: vec![6]
        })
        .is_err());
        assert!(Graph::generate(&Topology::Cycle { n: 2 }).is_err());
    }

    #[test]
    fn random_regular_is_regular_and_seeded() {
        let t = Topology::RandomRegular {
            n: 20,
            c: 3,
            seed: 11,
        };
        let a = gen(t.clone());
        let b = gen(t);
        assert_eq!(a, b);
        assert_eq!(a.regular_degree(), Some(3));
    }

    #[test]
    fn ramanujan_candidate_properties() {
        let g = gen(Topology::RamanujanCandidate {
            n: 16,
            c: 3,
            seed: 0,
        });
        assert_eq!(g.regular_degree(), Some(3));
        assert!(g.is_connected() && !g.is_bipartite());
        assert!(spectral::ramanujan_check(&g).unwrap());
        assert!(spectral::summary(&g).unwrap().varsigma_nl > 1.0);
    }

    #[test]
    fn descriptor_round_trip() {
        for s in [
            "complete:5",
            "path:3",
            "star:4",
            "cycle:12",
            "circulant:36:1,2",
            "friendship:9",
            "clique_bridge:6,7,9",
            "clique_bridge:6,7,9:6-7,13-14,22-1,3-17",
            "random_regular:16:3:7",
            "ramanujan:16:3:7",
        ] {
            let t: Topology = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("hypercube:3".parse::<Topology>().is_err());
        assert!("complete:x".parse::<Topology>().is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = gen(Topology::small_world_default());
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = Graph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(g, back);

        let err = Graph::read_edge_list("n 3\n1 2\n2 7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = Graph::read_edge_list("# c\n1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
