//! Test-only oracles and graph libraries shared by the integration suites.

#![allow(dead_code, clippy::needless_range_loop)]

use cascade_core::Graph;
use rand::Rng;

/// Every labelled connected graph on `n` vertices, by enumerating edge
/// subsets of the complete graph.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    (0u64..1 << pairs.len())
        .filter_map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            is_connected(n, &edges).then(|| Graph::from_edges(n, edges).unwrap())
        })
        .collect()
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// A connected graph on `n` vertices: a random spanning tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected<R: Rng>(n: usize, extra: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && rng.random_bool(extra) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Thresholds that often coincide with achievable neighbour fractions.
pub fn tied_threshold<R: Rng>(rng: &mut R) -> f64 {
    let d = rng.random_range(1..=7u32);
    let k = rng.random_range(0..=d);
    k as f64 / d as f64
}

/// Least fixed point of the switching rule containing `seeds`: add any
/// agent whose rule fires, one at a time in index order, until no agent
/// can be added.
pub fn closure_oracle(adjacency: &[Vec<usize>], thresholds: &[f64], seeds: &[usize]) -> Vec<bool> {
    let n = adjacency.len();
    let mut on = vec![false; n];
    for &s in seeds {
        on[s] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if on[i] || adjacency[i].is_empty() {
                continue;
            }
            let active = adjacency[i].iter().filter(|&&j| on[j]).count();
            if active as f64 / adjacency[i].len() as f64 > thresholds[i] {
                on[i] = true;
                changed = true;
            }
        }
    }
    on
}

pub fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n_agents()).map(|i| g.neighbors(i).to_vec()).collect()
}

/// Least squares by the normal equations `XᵀX b = Xᵀy`, solved with
/// Gaussian elimination and partial pivoting. `x` is row-major with the
/// intercept column included.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in x.iter().zip(y) {
        for r in 0..p {
            for c in 0..p {
                a[r][c] += row[r] * row[c];
            }
            a[r][p] += row[r] * yi;
        }
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in col + 1..p {
            let f = a[r][col] / a[col][col];
            for c in col..=p {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut b = vec![0.0; p];
    for r in (0..p).rev() {
        let s: f64 = (r + 1..p).map(|c| a[r][c] * b[c]).sum();
        b[r] = (a[r][p] - s) / a[r][r];
    }
    b
}

/// Inverse of `XᵀX` by Gauss–Jordan elimination, for standard errors.
pub fn gram_inverse(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; 2 * p]; p];
    for row in x {
        for r in 0..p {
            for c in 0..p {
                a[r][c] += row[r] * row[c];
            }
        }
    }
    for (r, row) in a.iter_mut().enumerate() {
        row[p + r] = 1.0;
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        for c in 0..2 * p {
            a[col][c] /= d;
        }
        for r in 0..p {
            if r != col {
                let f = a[r][col];
                for c in 0..2 * p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    a.into_iter().map(|row| row[p..].to_vec()).collect()
}
