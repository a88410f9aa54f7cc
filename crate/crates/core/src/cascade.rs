//! Threshold switching dynamics.
//!
//! Agents start in state 0 except for the seeds. At each step every agent
//! still in state 0 looks at the previous step's states and switches when
//! the fraction of its neighbours in state 1 strictly exceeds its threshold.
//! State 1 is absorbing, and agents with no neighbours never switch unless
//! seeded. A run halts after the first step in which nobody switches.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-agent switching thresholds, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAssignment(Vec<f64>);

impl ThresholdAssignment {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if let Some(bad) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::parameter(
                "thresholds",
                format!("{bad} is outside [0, 1]"),
            ));
        }
        Ok(ThresholdAssignment(thresholds))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for ThresholdAssignment {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Non-empty set of distinct seed agents, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet(Vec<usize>);

impl SeedSet {
    pub fn new(mut seeds: Vec<usize>, n_agents: usize) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::parameter("seeds", "seed set is empty"));
        }
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::parameter("seeds", "duplicate seed"));
        }
        if let Some(&last) = seeds.last() {
            if last >= n_agents {
                return Err(Error::Index {
                    index: last,
                    n_agents,
                });
            }
        }
        Ok(SeedSet(seeds))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.0.binary_search(&agent).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    pub final_state: Vec<bool>,
    /// Agents newly switched at each step; `switch_steps[0]` holds the
    /// responses to the seeds. Never contains an empty step.
    pub switch_steps: Vec<Vec<usize>>,
    /// Fraction of all agents in state 1 at the end, seeds included.
    pub percolation: f64,
}

impl CascadeResult {
    pub fn step_count(&self) -> usize {
        self.switch_steps.len()
    }

    /// Agents that switched in direct response to the seeds.
    pub fn first_step(&self) -> &[usize] {
        self.switch_steps.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn on_count(&self) -> usize {
        self.final_state.iter().filter(|&&s| s).count()
    }
}

/// I.i.d. Uniform[0, 1] thresholds.
pub fn draw_thresholds<R: Rng + ?Sized>(n_agents: usize, rng: &mut R) -> ThresholdAssignment {
    ThresholdAssignment((0..n_agents).map(|_| rng.random::<f64>()).collect())
}

/// Uniform sample of `n_seeds` distinct agents.
pub fn select_seeds<R: Rng + ?Sized>(
    n_agents: usize,
    n_seeds: usize,
    rng: &mut R,
) -> Result<SeedSet> {
    if n_seeds == 0 || n_seeds > n_agents {
        return Err(Error::parameter(
            "n_seeds",
            format!("must lie in [1, {n_agents}], got {n_seeds}"),
        ));
    }
    let mut seeds = index::sample(rng, n_agents, n_seeds).into_vec();
    seeds.sort_unstable();
    Ok(SeedSet(seeds))
}

#[inline]
fn fires(on_neighbors: usize, degree: usize, threshold: f64) -> bool {
    degree > 0 && (on_neighbors as f64 / degree as f64) > threshold
}

/// One synchronous update by full scan. Returns the new state and the
/// agents that switched, in ascending order.
pub fn step(
    g: &Graph,
    state: &[bool],
    thresholds: &ThresholdAssignment,
) -> (Vec<bool>, Vec<usize>) {
    let switched: Vec<usize> = (0..g.n_agents())
        .filter(|&i| !state[i])
        .filter(|&i| {
            let nbrs = g.neighbors(i);
            let on = nbrs.iter().filter(|&&j| state[j]).count();
            fires(on, nbrs.len(), thresholds[i])
        })
        .collect();
    let mut next = state.to_vec();
    for &i in &switched {
        next[i] = true;
    }
    (next, switched)
}

/// Runs the dynamics to the fixed point.
///
/// Equivalent to iterating [`step`] until it switches nobody, but only
/// re-examines agents adjacent to the previous step's switchers.
pub fn run_cascade(
    g: &Graph,
    thresholds: &ThresholdAssignment,
    seeds: &SeedSet,
) -> Result<CascadeResult> {
    let n = g.n_agents();
    if thresholds.len() != n {
        return Err(Error::parameter(
            "thresholds",
            format!("{} thresholds for {n} agents", thresholds.len()),
        ));
    }
    if let Some(&last) = seeds.as_slice().last() {
        if last >= n {
            return Err(Error::Index {
                index: last,
                n_agents: n,
            });
        }
    }

    let mut state = vec![false; n];
    let mut on_neighbors = vec![0usize; n];
    let mut frontier: Vec<usize> = seeds.as_slice().to_vec();
    for &s in &frontier {
        state[s] = true;
    }
    let mut switch_steps = Vec::new();
    // marks candidates already queued in the current step
    let mut queued = vec![false; n];
    let mut candidates = Vec::new();

    loop {
        candidates.clear();
        for &a in &frontier {
            for &b in g.neighbors(a) {
                on_neighbors[b] += 1;
                if !state[b] && !queued[b] {
                    queued[b] = true;
                    candidates.push(b);
                }
            }
        }
        let mut switched: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&b| fires(on_neighbors[b], g.neighbors(b).len(), thresholds[b]))
            .collect();
        for &b in &candidates {
            queued[b] = false;
        }
        if switched.is_empty() {
            break;
        }
        switched.sort_unstable();
        for &b in &switched {
            state[b] = true;
        }
        frontier = switched.clone();
        switch_steps.push(switched);
    }

    let on = state.iter().filter(|&&s| s).count();
    Ok(CascadeResult {
        percolation: on as f64 / n as f64,
        final_state: state,
        switch_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn thresholds(v: &[f64]) -> ThresholdAssignment {
        ThresholdAssignment::new(v.to_vec()).unwrap()
    }

    #[test]
    fn step_switches_on_strict_excess_only() {
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        let (_, sw) = step(&edge, &[true, false], &thresholds(&[0.0, 0.4]));
        assert_eq!(sw, vec![1]);

        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (_, sw) = step(&tri, &[true, false, false], &thresholds(&[0.0, 0.5, 0.5]));
        assert!(sw.is_empty());

        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (next, sw) = step(
            &star,
            &[true, false, false, false],
            &thresholds(&[0.0, 0.2, 0.99, 1.0]),
        );
        assert_eq!(sw, vec![1, 2]);
        assert_eq!(next, vec![true, true, true, false]);
    }

    #[test]
    fn isolated_agents_never_switch() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let (_, sw) = step(&g, &[true, false, false], &thresholds(&[0.0, 0.0, 0.0]));
        assert_eq!(sw, vec![1]);
    }

    #[test]
    fn chain_of_forced_switches() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let seeds = SeedSet::new(vec![0], 3).unwrap();
        let r = run_cascade(&path, &thresholds(&[0.5, 0.3, 0.3]), &seeds).unwrap();
        assert_eq!(r.switch_steps, vec![vec![1], vec![2]]);
        assert_eq!(r.percolation, 1.0);
        assert_eq!(r.step_count(), 2);
    }

    #[test]
    fn maximal_thresholds_block_everything() {
        let mut rng = stream(5, 0);
        let g = crate::graph::gen_random(200, 0.05, &mut rng).unwrap();
        let seeds = select_seeds(200, 10, &mut rng).unwrap();
        let r = run_cascade(&g, &thresholds(&vec![1.0; 200]), &seeds).unwrap();
        assert!(r.switch_steps.is_empty());
        assert_eq!(r.percolation, 10.0 / 200.0);
    }

    #[test]
    fn run_matches_repeated_full_steps() {
        for k in 0..50 {
            let mut rng = stream(11, k);
            let g = crate::graph::gen_random(120, 0.04, &mut rng).unwrap();
            let th = draw_thresholds(120, &mut rng);
            let seeds = select_seeds(120, 3, &mut rng).unwrap();
            let r = run_cascade(&g, &th, &seeds).unwrap();

            let mut state = vec![false; 120];
            for &s in seeds.as_slice() {
                state[s] = true;
            }
            let mut steps = Vec::new();
            loop {
                let (next, sw) = step(&g, &state, &th);
                if sw.is_empty() {
                    break;
                }
                state = next;
                steps.push(sw);
            }
            assert_eq!(r.switch_steps, steps);
            assert_eq!(r.final_state, state);
        }
    }

    #[test]
    fn threshold_draws() {
        let a = draw_thresholds(1000, &mut stream(2, 0));
        let b = draw_thresholds(1000, &mut stream(2, 0));
        assert_eq!(a, b);
        let mean = a.as_slice().iter().sum::<f64>() / 1000.0;
        assert!((0.45..=0.55).contains(&mean));
        let one = draw_thresholds(1, &mut stream(2, 1));
        assert!((0.0..=1.0).contains(&one[0]));
        assert!(ThresholdAssignment::new(vec![1.5]).is_err());
    }

    #[test]
    fn seed_selection() {
        let s = select_seeds(1000, 5, &mut stream(4, 0)).unwrap();
        assert_eq!(s.len(), 5);
        let all = select_seeds(5, 5, &mut stream(4, 0)).unwrap();
        assert_eq!(all.as_slice(), &[0, 1, 2, 3, 4]);
        assert!(select_seeds(5, 6, &mut stream(4, 0)).is_err());
        assert!(select_seeds(5, 0, &mut stream(4, 0)).is_err());
        assert!(SeedSet::new(vec![1, 1], 5).is_err());
        assert!(SeedSet::new(vec![], 5).is_err());
    }

    #[test]
    fn seed_selection_is_uniform() {
        let mut rng = stream(8, 0);
        let mut counts = [0usize; 10];
        for _ in 0..10_000 {
            counts[select_seeds(10, 1, &mut rng).unwrap().as_slice()[0]] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((f - 0.1).abs() <= 0.03, "frequency {f}");
        }
    }
}
