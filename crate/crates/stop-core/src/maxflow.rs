//! Maximum flow and minimum cut by FIFO preflow push-relabel.

use crate::scalar::Scalar;
use std::collections::VecDeque;

/// Capacitated digraph; source and sink are chosen per query.
#[derive(Debug, Clone)]
pub struct FlowNetwork<T> {
    n: usize,
    arcs: Vec<(usize, usize, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinCutResult<T> {
    pub value: T,
    /// Nodes reachable from the source in the final residual network, sorted.
    pub source_side: Vec<usize>,
    /// Flow on each arc, in insertion order.
    pub flows: Vec<T>,
}

impl<T> MinCutResult<T> {
    pub fn contains(&self, v: usize) -> bool {
        self.source_side.binary_search(&v).is_ok()
    }
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(n: usize) -> Self {
        FlowNetwork { n, arcs: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize, T)] {
        &self.arcs
    }

    /// Add an arc. An infinite capacity stands for "more than every finite cut".
    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: T) -> usize {
        assert!(tail < self.n && head < self.n, "arc endpoint out of range");
        assert!(capacity >= T::zero(), "capacities are nonnegative");
        self.arcs.push((tail, head, capacity));
        self.arcs.len() - 1
    }

    pub fn max_flow_min_cut(&self, source: usize, sink: usize) -> MinCutResult<T> {
        assert_ne!(source, sink);
        let n = self.n;
        let big = self
            .arcs
            .iter()
            .map(|a| a.2)
            .filter(|c| c.is_finite())
            .fold(T::one(), |acc, c| acc + c);
        let mut to = Vec::with_capacity(2 * self.arcs.len());
        let mut res = Vec::with_capacity(2 * self.arcs.len());
        let mut adj = vec![Vec::new(); n];
        for (k, &(u, v, c)) in self.arcs.iter().enumerate() {
            let c = if c.is_finite() { c } else { big };
            to.push(v);
            res.push(c);
            adj[u].push(2 * k);
            to.push(u);
            res.push(T::zero());
            adj[v].push(2 * k + 1);
        }

        let mut height = vec![0usize; n];
        let mut excess = vec![T::zero(); n];
        let mut current = vec![0usize; n];
        let mut queue = VecDeque::new();
        height[source] = n;
        for &e in &adj[source] {
            let c = res[e];
            if c > T::zero() {
                res[e] = T::zero();
                res[e ^ 1] = res[e ^ 1] + c;
                let w = to[e];
                if excess[w] == T::zero() && w != sink && w != source {
                    queue.push_back(w);
                }
                excess[w] = excess[w] + c;
                excess[source] = excess[source] - c;
            }
        }

        while let Some(v) = queue.pop_front() {
            while excess[v] > T::zero() {
                if current[v] == adj[v].len() {
                    let next = adj[v]
                        .iter()
                        .filter(|&&e| res[e] > T::zero())
                        .map(|&e| height[to[e]])
                        .min();
                    match next {
                        Some(h) if h < 2 * n => {
                            height[v] = h + 1;
                            current[v] = 0;
                        }
                        // Numerical dust with nowhere to go.
                        _ => {
                            excess[v] = T::zero();
                            break;
                        }
                    }
                    continue;
                }
                let e = adj[v][current[v]];
                let w = to[e];
                if res[e] > T::zero() && height[v] == height[w] + 1 {
                    let delta = if excess[v] < res[e] { excess[v] } else { res[e] };
                    res[e] = res[e] - delta;
                    res[e ^ 1] = res[e ^ 1] + delta;
                    if excess[w] == T::zero() && w != sink && w != source {
                        queue.push_back(w);
                    }
                    excess[w] = excess[w] + delta;
                    excess[v] = excess[v] - delta;
                } else {
                    current[v] += 1;
                }
            }
        }

        let tol = T::from(1e-12).expect("representable tolerance");
        let mut seen = vec![false; n];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(v) = stack.pop() {
            for &e in &adj[v] {
                let w = to[e];
                if !seen[w] && res[e] > tol {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let flows = self
            .arcs
            .iter()
            .enumerate()
            .map(|(k, _)| res[2 * k + 1])
            .collect();
        MinCutResult {
            value: excess[sink],
            source_side: (0..n).filter(|&v| seen[v]).collect(),
            flows,
        }
    }
}
