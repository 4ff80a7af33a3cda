//! Directed capacitated graphs and Dinic's maximum-flow algorithm.

use std::collections::VecDeque;
use std::fmt;

/// Arc capacity. Infinite arcs stay symbolic in the graph and are only
/// given a number when a [`Dinic`] solver is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(u64),
    Infinite,
}

impl Capacity {
    pub fn resolve(self, infinite: u64) -> u64 {
        match self {
            Capacity::Finite(c) => c,
            Capacity::Infinite => infinite,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    labels: Vec<String>,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> usize {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: Capacity) -> usize {
        assert!(tail < self.labels.len() && head < self.labels.len());
        self.arcs.push(Arc {
            tail,
            head,
            capacity,
        });
        self.arcs.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn set_capacity(&mut self, arc: usize, capacity: Capacity) {
        self.arcs[arc].capacity = capacity;
    }

    /// Capacity of the cut whose source side is `source_side`.
    pub fn cut_capacity(&self, source_side: &[bool], infinite: u64) -> u64 {
        self.arcs
            .iter()
            .filter(|a| source_side[a.tail] && !source_side[a.head])
            .map(|a| a.capacity.resolve(infinite))
            .sum()
    }
}

/// Exact integer max-flow over a fixed arc set. Capacities can be changed
/// between runs without rebuilding adjacency.
#[derive(Clone, Debug)]
pub struct Dinic {
    n: usize,
    /// Residual edges; edge `2a` is arc `a`, `2a + 1` its reverse.
    head: Vec<usize>,
    cap: Vec<u64>,
    original: Vec<u64>,
    adj: Vec<Vec<usize>>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

impl Dinic {
    pub fn new(net: &FlowNetwork, infinite: u64) -> Self {
        let n = net.node_count();
        let mut d = Dinic {
            n,
            head: Vec::with_capacity(2 * net.arc_count()),
            cap: Vec::with_capacity(2 * net.arc_count()),
            original: Vec::with_capacity(net.arc_count()),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            cursor: vec![0; n],
        };
        for a in net.arcs() {
            let c = a.capacity.resolve(infinite);
            d.adj[a.tail].push(d.head.len());
            d.head.push(a.head);
            d.cap.push(c);
            d.adj[a.head].push(d.head.len());
            d.head.push(a.tail);
            d.cap.push(0);
            d.original.push(c);
        }
        d
    }

    /// Changes the capacity of arc `arc` for subsequent runs.
    pub fn set_capacity(&mut self, arc: usize, capacity: u64) {
        self.original[arc] = capacity;
    }

    fn reset(&mut self) {
        for (a, &c) in self.original.iter().enumerate() {
            self.cap[2 * a] = c;
            self.cap[2 * a + 1] = 0;
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let h = self.head[e];
                if self.cap[e] > 0 && self.level[h] == u32::MAX {
                    self.level[h] = self.level[v] + 1;
                    queue.push_back(h);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: u64) -> u64 {
        if v == t {
            return pushed;
        }
        while self.cursor[v] < self.adj[v].len() {
            let e = self.adj[v][self.cursor[v]];
            let h = self.head[e];
            if self.cap[e] > 0 && self.level[h] == self.level[v] + 1 {
                let got = self.dfs(h, t, pushed.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.cursor[v] += 1;
        }
        0
    }

    /// Maximum `s`-`t` flow, stopping early once `limit` units are routed.
    /// Residual state from this run stays available to [`Dinic::source_side`].
    pub fn max_flow_limited(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        assert!(s < self.n && t < self.n);
        self.reset();
        if s == t {
            return limit;
        }
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let got = self.dfs(s, t, limit - flow);
                if got == 0 {
                    break;
                }
                flow += got;
                if flow >= limit {
                    break;
                }
            }
        }
        flow
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        self.max_flow_limited(s, t, u64::MAX)
    }

    /// Nodes reachable from `s` in the residual graph of the last run. After
    /// a run that was not cut short, this is the source side of a minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &self.adj[v] {
                let h = self.head[e];
                if self.cap[e] > 0 && !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }
}

/// Maximum flow from `s` to `t` with infinite arcs set to `infinite`.
pub fn max_flow(net: &FlowNetwork, s: usize, t: usize, infinite: u64) -> u64 {
    Dinic::new(net, infinite).max_flow(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nodes(net: &mut FlowNetwork, count: usize) {
        for i in 0..count {
            net.add_node(format!("n{i}"));
        }
    }

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new();
        nodes(&mut net, 2);
        net.add_arc(0, 1, Capacity::Finite(3));
        assert_eq!(max_flow(&net, 0, 1, 100), 3);
    }

    #[test]
    fn disconnected() {
        let mut net = FlowNetwork::new();
        nodes(&mut net, 3);
        net.add_arc(0, 1, Capacity::Finite(3));
        assert_eq!(max_flow(&net, 0, 2, 100), 0);
    }

    #[test]
    fn infinite_arcs_use_the_given_value() {
        let mut net = FlowNetwork::new();
        nodes(&mut net, 2);
        net.add_arc(0, 1, Capacity::Infinite);
        assert_eq!(max_flow(&net, 0, 1, 7), 7);
    }

    #[test]
    fn capacity_updates_between_runs() {
        let mut net = FlowNetwork::new();
        nodes(&mut net, 3);
        net.add_arc(0, 1, Capacity::Finite(5));
        let b = net.add_arc(1, 2, Capacity::Finite(1));
        let mut d = Dinic::new(&net, 10);
        assert_eq!(d.max_flow(0, 2), 1);
        d.set_capacity(b, 4);
        assert_eq!(d.max_flow(0, 2), 4);
        assert_eq!(d.max_flow_limited(0, 2, 2), 2);
    }

    /// Exhaustive minimum over every cut separating `s` from `t`.
    fn brute_min_cut(net: &FlowNetwork, s: usize, t: usize, inf: u64) -> u64 {
        let n = net.node_count();
        let mut best = u64::MAX;
        for mask in 0u32..1 << n {
            if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
                continue;
            }
            let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            best = best.min(net.cut_capacity(&side, inf));
        }
        best
    }

    proptest! {
        #[test]
        fn matches_brute_force_min_cut(
            n in 2usize..=12,
            arcs in proptest::collection::vec((0usize..12, 0usize..12, 0u64..6, any::<bool>()), 0..36),
        ) {
            let mut net = FlowNetwork::new();
            nodes(&mut net, n);
            for (a, b, c, inf) in arcs {
                let (a, b) = (a % n, b % n);
                if a != b {
                    let cap = if inf && c == 0 { Capacity::Infinite } else { Capacity::Finite(c) };
                    net.add_arc(a, b, cap);
                }
            }
            let inf = 50;
            let mut d = Dinic::new(&net, inf);
            let flow = d.max_flow(0, n - 1);
            prop_assert_eq!(flow, brute_min_cut(&net, 0, n - 1, inf));
            // residual reachability yields a minimum cut
            let side = d.source_side(0);
            prop_assert!(!side[n - 1]);
            prop_assert_eq!(net.cut_capacity(&side, inf), flow);
        }
    }
}
