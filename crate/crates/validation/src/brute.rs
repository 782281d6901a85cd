//! Exhaustive reference computations on tiny flow networks and graphs.

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fairalloc::flow::{ArcId, FlowNetwork, NodeKind};

/// A small network in plain form: node 0 is the source, node 1 the sink,
/// arcs are `(from, to, capacity, cost)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallNet {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize, i64, i64)>,
}

impl SmallNet {
    /// Random network with at most `max_nodes` nodes and `max_arcs` arcs.
    /// No arc enters the source or leaves the sink.
    pub fn random(seed: u64, max_nodes: usize, max_arcs: usize, max_cap: i64, max_cost: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = rng.gen_range(2..=max_nodes);
        let count = rng.gen_range(1..=max_arcs);
        let mut arcs = Vec::with_capacity(count);
        while arcs.len() < count {
            let from = rng.gen_range(0..nodes);
            let to = rng.gen_range(0..nodes);
            if from == to || to == 0 || from == 1 {
                continue;
            }
            arcs.push((from, to, rng.gen_range(0..=max_cap), rng.gen_range(-max_cost..=max_cost)));
        }
        SmallNet { nodes, arcs }
    }

    /// The same network as a [`FlowNetwork`]; arc `i` keeps id `i`.
    pub fn to_network(&self) -> (FlowNetwork, Vec<ArcId>) {
        let mut net = FlowNetwork::new();
        for _ in 2..self.nodes {
            net.add_node(NodeKind::Plain);
        }
        let ids = self
            .arcs
            .iter()
            .map(|&(u, v, cap, cost)| net.add_arc(u, v, cap, cost))
            .collect();
        (net, ids)
    }

    /// Calls `visit` with every integral flow respecting capacities and
    /// conservation, as per-arc values.
    pub fn for_each_flow(&self, mut visit: impl FnMut(&[i64])) {
        // last arc index touching each node: conservation is checked there
        let mut last = vec![None; self.nodes];
        for (i, &(u, v, _, _)) in self.arcs.iter().enumerate() {
            last[u] = Some(i);
            last[v] = Some(i);
        }
        let mut closes: Vec<Vec<usize>> = vec![Vec::new(); self.arcs.len()];
        for (node, l) in last.iter().enumerate() {
            if let Some(i) = *l {
                if node > 1 {
                    closes[i].push(node);
                }
            }
        }
        let mut balance = vec![0i64; self.nodes];
        let mut flow = vec![0i64; self.arcs.len()];
        self.descend(0, &closes, &mut balance, &mut flow, &mut visit);
    }

    fn descend(
        &self,
        i: usize,
        closes: &[Vec<usize>],
        balance: &mut [i64],
        flow: &mut [i64],
        visit: &mut impl FnMut(&[i64]),
    ) {
        if i == self.arcs.len() {
            visit(flow);
            return;
        }
        let (u, v, cap, _) = self.arcs[i];
        for f in 0..=cap {
            flow[i] = f;
            balance[u] -= f;
            balance[v] += f;
            if closes[i].iter().all(|&n| balance[n] == 0) {
                self.descend(i + 1, closes, balance, flow, visit);
            }
            balance[u] += f;
            balance[v] -= f;
        }
        flow[i] = 0;
    }

    /// Net flow out of the source for per-arc values `flow`.
    pub fn value_of(&self, flow: &[i64]) -> i64 {
        self.arcs
            .iter()
            .zip(flow)
            .map(|(&(u, v, _, _), &f)| {
                if u == 0 {
                    f
                } else if v == 0 {
                    -f
                } else {
                    0
                }
            })
            .sum()
    }

    pub fn cost_of(&self, flow: &[i64]) -> i64 {
        self.arcs.iter().zip(flow).map(|(a, &f)| a.3 * f).sum()
    }

    /// Maximum value over all integral flows.
    pub fn brute_max_flow(&self) -> i64 {
        let mut best = 0;
        self.for_each_flow(|f| best = best.max(self.value_of(f)));
        best
    }

    /// `(maximum value, minimum cost among flows of that value)`.
    pub fn brute_min_cost_max_flow(&self) -> (i64, i64) {
        let mut best = (0i64, 0i64);
        self.for_each_flow(|f| {
            let (value, cost) = (self.value_of(f), self.cost_of(f));
            if value > best.0 || (value == best.0 && cost < best.1) {
                best = (value, cost);
            }
        });
        best
    }

    /// Minimum capacity over all source-sink cuts.
    pub fn min_cut(&self) -> i64 {
        let inner = self.nodes - 2;
        (0u32..1 << inner)
            .map(|mask| {
                let in_s = |n: usize| n == 0 || (n > 1 && mask >> (n - 2) & 1 == 1);
                self.arcs
                    .iter()
                    .filter(|&&(u, v, _, _)| in_s(u) && !in_s(v))
                    .map(|a| a.2)
                    .sum::<i64>()
            })
            .min()
            .unwrap_or(0)
    }
}

/// Random arc list `(from, to, cost)` on `nodes` nodes; self loops and
/// parallel arcs allowed.
pub fn random_graph(seed: u64, max_nodes: usize, max_arcs: usize, max_cost: i64) -> (usize, Vec<(usize, usize, i64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(1..=max_nodes);
    let count = rng.gen_range(0..=max_arcs);
    let arcs = (0..count)
        .map(|_| {
            (
                rng.gen_range(0..nodes),
                rng.gen_range(0..nodes),
                rng.gen_range(-max_cost..=max_cost),
            )
        })
        .collect();
    (nodes, arcs)
}

/// Minimum mean over all simple directed cycles, by enumerating them.
pub fn min_cycle_mean(nodes: usize, arcs: &[(usize, usize, i64)]) -> Option<Ratio<i64>> {
    let mut out: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nodes];
    for &(u, v, c) in arcs {
        out[u].push((v, c));
    }
    let mut best: Option<Ratio<i64>> = None;
    let mut on_path = vec![false; nodes];
    // each simple cycle is enumerated from its smallest node
    for start in 0..nodes {
        walk(start, start, 0, 0, &out, &mut on_path, &mut best);
    }
    best
}

fn walk(
    start: usize,
    u: usize,
    cost: i64,
    len: i64,
    out: &[Vec<(usize, i64)>],
    on_path: &mut [bool],
    best: &mut Option<Ratio<i64>>,
) {
    on_path[u] = true;
    for &(v, c) in &out[u] {
        if v == start {
            let mean = Ratio::new(cost + c, len + 1);
            if best.map_or(true, |b| mean < b) {
                *best = Some(mean);
            }
        } else if v > start && !on_path[v] {
            walk(start, v, cost + c, len + 1, out, on_path, best);
        }
    }
    on_path[u] = false;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flows_of_a_single_path() {
        let net = SmallNet {
            nodes: 3,
            arcs: vec![(0, 2, 2, 1), (2, 1, 1, 1)],
        };
        let mut seen = Vec::new();
        net.for_each_flow(|f| seen.push(f.to_vec()));
        assert_eq!(seen, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(net.brute_max_flow(), 1);
        assert_eq!(net.min_cut(), 1);
        assert_eq!(net.brute_min_cost_max_flow(), (1, 2));
    }

    #[test]
    fn cycles_of_a_triangle_and_a_loop() {
        let arcs = [(0, 1, -5), (1, 2, 2), (2, 0, 1), (2, 2, 0)];
        assert_eq!(min_cycle_mean(3, &arcs), Some(Ratio::new(-2, 3)));
        assert_eq!(min_cycle_mean(3, &[(0, 1, 1), (1, 2, 1)]), None);
    }

    #[test]
    fn max_flow_equals_min_cut_on_random_nets() {
        for seed in 0..30 {
            let net = SmallNet::random(seed, 7, 9, 2, 3);
            assert_eq!(net.brute_max_flow(), net.min_cut(), "seed {seed}");
        }
    }
}
