//! Undirected simple graphs and the three network families.

use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph in adjacency-list form. Neighbour lists are
/// sorted, so two graphs with the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph on `n_agents` vertices and no edges.
    pub fn empty(n_agents: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n_agents],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(n_agents: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n_agents];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n_agents {
                    return Err(Error::Index { index: v, n_agents });
                }
            }
            if a == b {
                return Err(Error::parameter("edges", format!("self-loop at {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::parameter("edges", format!("duplicate edge at {v}")));
            }
        }
        Ok(Graph { adjacency })
    }

    // Used by the generators, which never produce loops or duplicates.
    fn from_adjacency_unchecked(mut adjacency: Vec<Vec<usize>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { adjacency }
    }

    pub fn n_agents(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        self.adjacency.get(i).map(Vec::len).ok_or(Error::Index {
            index: i,
            n_agents: self.n_agents(),
        })
    }

    /// Neighbours of `i`, sorted ascending.
    ///
    /// Panics if `i` is out of range; use [`Graph::degree`] for a checked
    /// lookup.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_agents() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.n_agents() as f64
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Full scan of the structural invariants: symmetric, loop-free,
    /// duplicate-free and in range.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n_agents();
        for (i, list) in self.adjacency.iter().enumerate() {
            for (k, &j) in list.iter().enumerate() {
                if j >= n {
                    return Err(Error::Index {
                        index: j,
                        n_agents: n,
                    });
                }
                if j == i {
                    return Err(Error::Data(format!("self-loop at {i}")));
                }
                if k > 0 && list[k - 1] >= j {
                    return Err(Error::Data(format!(
                        "unsorted or duplicate neighbour at {i}"
                    )));
                }
                if self.adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::Data(format!("edge {i}-{j} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Writes the edge list: one `i j` pair per line, 0-based, sorted.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }
}

/// The family-specific parameters of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NetworkKind {
    /// G(N, p): every pair is linked independently with probability `p`.
    Random { p: f64 },
    /// Ring lattice with `n_neighbors` immediate neighbours plus random
    /// shortcuts. Odd `n_neighbors` are rounded up to the next even value.
    SmallWorld {
        n_neighbors: usize,
        rewire_prob: f64,
    },
    /// Preferential attachment from a ring of `m0` vertices, `m` expected
    /// links per arriving vertex.
    ScaleFree { m0: usize, m: f64 },
}

/// Network family, without parameters. Used to group configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Random,
    SmallWorld,
    ScaleFree,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Random, Family::SmallWorld, Family::ScaleFree];

    pub fn display_name(self) -> &'static str {
        match self {
            Family::Random => "Random",
            Family::SmallWorld => "Small world",
            Family::ScaleFree => "Scale free",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n_agents: usize,
    #[serde(flatten)]
    pub kind: NetworkKind,
}

impl NetworkSpec {
    pub fn random(n_agents: usize, p: f64) -> Self {
        NetworkSpec {
            n_agents,
            kind: NetworkKind::Random { p },
        }
    }

    pub fn small_world(n_agents: usize, n_neighbors: usize, rewire_prob: f64) -> Self {
        NetworkSpec {
            n_agents,
            kind: NetworkKind::SmallWorld {
                n_neighbors,
                rewire_prob,
            },
        }
    }

    pub fn scale_free(n_agents: usize, m0: usize, m: f64) -> Self {
        NetworkSpec {
            n_agents,
            kind: NetworkKind::ScaleFree { m0, m },
        }
    }

    pub fn family(&self) -> Family {
        match self.kind {
            NetworkKind::Random { .. } => Family::Random,
            NetworkKind::SmallWorld { .. } => Family::SmallWorld,
            NetworkKind::ScaleFree { .. } => Family::ScaleFree,
        }
    }

    /// Lattice neighbour count actually used for small-world networks
    /// (odd values rounded up). `None` for the other families.
    pub fn effective_n_neighbors(&self) -> Option<usize> {
        match self.kind {
            NetworkKind::SmallWorld { n_neighbors, .. } => Some(round_up_even(n_neighbors)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_agents;
        if n == 0 {
            return Err(Error::parameter("n_agents", "must be at least 1"));
        }
        match self.kind {
            NetworkKind::Random { p } => check_random(p),
            NetworkKind::SmallWorld {
                n_neighbors,
                rewire_prob,
            } => check_small_world(n, n_neighbors, rewire_prob),
            NetworkKind::ScaleFree { m0, m } => check_scale_free(n, m0, m),
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match self.kind {
            NetworkKind::Random { p } => gen_random(self.n_agents, p, rng),
            NetworkKind::SmallWorld {
                n_neighbors,
                rewire_prob,
            } => gen_small_world(self.n_agents, n_neighbors, rewire_prob, rng),
            NetworkKind::ScaleFree { m0, m } => gen_scale_free(self.n_agents, m0, m, rng),
        }
    }
}

fn round_up_even(k: usize) -> usize {
    k + (k % 2)
}

fn check_random(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(
            "p",
            format!("must lie in (0, 1), got {p}"),
        ));
    }
    Ok(())
}

fn check_small_world(n: usize, n_neighbors: usize, rewire_prob: f64) -> Result<()> {
    if n_neighbors < 2 {
        return Err(Error::parameter("n_neighbors", "must be at least 2"));
    }
    if round_up_even(n_neighbors) >= n {
        return Err(Error::parameter(
            "n_neighbors",
            format!(
                "{n_neighbors} (even: {}) must be below n_agents = {n}",
                round_up_even(n_neighbors)
            ),
        ));
    }
    if !(0.0..=1.0).contains(&rewire_prob) {
        return Err(Error::parameter(
            "rewire_prob",
            format!("must lie in [0, 1], got {rewire_prob}"),
        ));
    }
    Ok(())
}

fn check_scale_free(n: usize, m0: usize, m: f64) -> Result<()> {
    if m0 < 2 {
        return Err(Error::parameter("m0", "must be at least 2"));
    }
    if m.is_nan() || m < 1.0 {
        return Err(Error::parameter(
            "m",
            format!("must be at least 1, got {m}"),
        ));
    }
    if m > m0 as f64 {
        return Err(Error::parameter("m", format!("{m} exceeds m0 = {m0}")));
    }
    if n < m0 {
        return Err(Error::parameter(
            "n_agents",
            format!("{n} is smaller than m0 = {m0}"),
        ));
    }
    Ok(())
}

/// Erdős–Rényi G(N, p), sampled by geometric skipping over the lower
/// triangle so the cost is linear in the number of edges.
pub fn gen_random<R: Rng + ?Sized>(n_agents: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_random(p)?;
    let mut adjacency = vec![Vec::new(); n_agents];
    let log_q = (1.0 - p).ln();
    let n = n_agents as i64;
    let mut v: i64 = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        // saturating float->int conversion; huge skips simply end the scan
        w = w.saturating_add(1).saturating_add(skip as i64);
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            let (a, b) = (v as usize, w as usize);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

/// Ring lattice plus shortcuts (Newman–Watts): each lattice edge `(i, j)`
/// spawns, with probability `rewire_prob`, an extra edge from `i` to a
/// uniformly chosen non-neighbour. Lattice edges are never removed.
pub fn gen_small_world<R: Rng + ?Sized>(
    n_agents: usize,
    n_neighbors: usize,
    rewire_prob: f64,
    rng: &mut R,
) -> Result<Graph> {
    check_small_world(n_agents, n_neighbors, rewire_prob)?;
    let half = round_up_even(n_neighbors) / 2;
    let n = n_agents;
    let mut adjacency = vec![Vec::with_capacity(2 * half + 2); n];
    for i in 0..n {
        for d in 1..=half {
            let j = (i + d) % n;
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    if rewire_prob > 0.0 {
        for i in 0..n {
            for _ in 0..half {
                if !rng.random_bool(rewire_prob) {
                    continue;
                }
                if adjacency[i].len() + 1 >= n {
                    continue;
                }
                loop {
                    let w = rng.random_range(0..n);
                    if w != i && !adjacency[i].contains(&w) {
                        adjacency[i].push(w);
                        adjacency[w].push(i);
                        break;
                    }
                }
            }
        }
    }
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

/// Barabási–Albert preferential attachment. Starts from a ring on `m0`
/// vertices (a single edge when `m0 == 2`); each later vertex brings
/// `floor(m)` links, plus one more with probability `m - floor(m)`, to
/// distinct existing vertices chosen proportionally to degree.
pub fn gen_scale_free<R: Rng + ?Sized>(
    n_agents: usize,
    m0: usize,
    m: f64,
    rng: &mut R,
) -> Result<Graph> {
    Ok(scale_free_counted(n_agents, m0, m, rng)?.0)
}

/// As [`gen_scale_free`], also returning the number of edges contributed by
/// the seed ring and by arrivals.
pub fn scale_free_counted<R: Rng + ?Sized>(
    n_agents: usize,
    m0: usize,
    m: f64,
    rng: &mut R,
) -> Result<(Graph, usize, usize)> {
    check_scale_free(n_agents, m0, m)?;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_agents];
    // every edge contributes both endpoints; uniform picks from this list
    // are degree-proportional picks of vertices
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * ((m.ceil() as usize) * n_agents + m0));
    let add = |adjacency: &mut Vec<Vec<usize>>, endpoints: &mut Vec<usize>, a: usize, b: usize| {
        adjacency[a].push(b);
        adjacency[b].push(a);
        endpoints.push(a);
        endpoints.push(b);
    };

    let ring_edges = if m0 == 2 {
        add(&mut adjacency, &mut endpoints, 0, 1);
        1
    } else {
        for i in 0..m0 {
            add(&mut adjacency, &mut endpoints, i, (i + 1) % m0);
        }
        m0
    };

    let whole = m.floor();
    let frac = m - whole;
    let mut arrival_edges = 0;
    let mut targets = Vec::with_capacity(whole as usize + 1);
    for v in m0..n_agents {
        let mut links = whole as usize;
        if frac > 0.0 && rng.random_bool(frac) {
            links += 1;
        }
        targets.clear();
        while targets.len() < links {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            add(&mut adjacency, &mut endpoints, v, t);
        }
        arrival_edges += links;
    }
    Ok((
        Graph::from_adjacency_unchecked(adjacency),
        ring_edges,
        arrival_edges,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn degree_lookups() {
        let c10 = cycle(10);
        assert!((0..10).all(|i| c10.degree(i).unwrap() == 2));
        let star = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(star.degree(0).unwrap(), 4);
        let empty = Graph::empty(3);
        assert_eq!(empty.degree(2).unwrap(), 0);
        assert!(matches!(
            empty.degree(3),
            Err(Error::Index { index: 3, .. })
        ));
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn random_vanishing_p_has_no_edges() {
        let g = gen_random(5, 1e-12, &mut stream(1, 0)).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(gen_random(5, 0.0, &mut stream(1, 0)).is_err());
        assert!(gen_random(5, 1.0, &mut stream(1, 0)).is_err());
    }

    #[test]
    fn small_world_without_shortcuts_is_a_lattice() {
        let g = gen_small_world(10, 2, 0.0, &mut stream(1, 0)).unwrap();
        assert_eq!(g, cycle(10));
        let g = gen_small_world(1000, 10, 0.0, &mut stream(1, 0)).unwrap();
        assert!(g.degrees().all(|d| d == 10));
        let h = gen_small_world(1000, 10, 0.0, &mut stream(99, 5)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn small_world_rounds_odd_neighbour_counts_up() {
        let g = gen_small_world(50, 5, 0.0, &mut stream(1, 0)).unwrap();
        assert!(g.degrees().all(|d| d == 6));
        assert_eq!(
            NetworkSpec::small_world(50, 5, 0.0).effective_n_neighbors(),
            Some(6)
        );
        assert!(gen_small_world(10, 10, 0.0, &mut stream(1, 0)).is_err());
        assert!(gen_small_world(10, 9, 0.0, &mut stream(1, 0)).is_err());
    }

    #[test]
    fn scale_free_edge_count_is_exact() {
        let (g, ring, arrivals) = scale_free_counted(1000, 4, 2.0, &mut stream(3, 0)).unwrap();
        assert_eq!(ring, 4);
        assert_eq!(arrivals, 2 * 996);
        assert_eq!(g.edge_count(), 1996);
        g.check_invariants().unwrap();
    }

    #[test]
    fn scale_free_without_arrivals_is_the_ring() {
        let g = gen_scale_free(5, 5, 1.0, &mut stream(3, 0)).unwrap();
        assert_eq!(g, cycle(5));
        let g = gen_scale_free(2, 2, 1.0, &mut stream(3, 0)).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn scale_free_parameter_errors() {
        assert!(gen_scale_free(100, 2, 3.0, &mut stream(3, 0)).is_err());
        assert!(gen_scale_free(100, 1, 1.0, &mut stream(3, 0)).is_err());
        assert!(gen_scale_free(100, 4, 0.5, &mut stream(3, 0)).is_err());
    }

    #[test]
    fn edge_list_dump_is_sorted() {
        let g = Graph::from_edges(4, [(2, 3), (0, 2), (1, 0)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n2 3\n");
    }

    #[test]
    fn spec_json_shape() {
        let spec = NetworkSpec::random(1000, 0.01);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"n_agents":1000,"kind":"Random","p":0.01}"#);
        let back: NetworkSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
