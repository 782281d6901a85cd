//! Howard's policy iteration for the minimum cycle mean.
//!
//! Produces the same minimum mean as [`karp_min_mean_cycle`] but usually
//! needs only a handful of linear passes instead of Karp's `n` passes, which
//! matters on experiment-scale residual graphs. Arithmetic is exact: a node's
//! cycle mean is kept as `W / L` and its bias as `X / L` with `L` the length
//! of the policy cycle it drains into.

use std::cmp::Ordering;

use num_rational::Ratio;

use super::karp::{frac_cmp, karp_min_mean_cycle, MeanCycle};
use super::residual::{Component, ResidualGraph};

const MAX_ROUNDS: usize = 100_000;

pub fn howard_min_mean_cycle(res: &ResidualGraph) -> Option<MeanCycle> {
    howard_with_hint(res, &mut PolicyHint::default())
}

/// Preferred out-arc per node, remembered between calls on successive
/// residual graphs of one network. Arcs are identified by their origin in
/// the network, so the hint survives rebuilding the residual graph.
#[derive(Debug, Clone, Default)]
pub(crate) struct PolicyHint {
    choice: Vec<Option<(usize, bool)>>,
}

pub(crate) fn howard_with_hint(res: &ResidualGraph, hint: &mut PolicyHint) -> Option<MeanCycle> {
    if hint.choice.len() < res.node_count() {
        hint.choice.resize(res.node_count(), None);
    }
    let mut best: Option<(Ratio<i64>, usize, Vec<usize>)> = None;
    for comp in res.cyclic_components() {
        let Some((mean, node, cycle)) = howard_component(res, &comp, hint) else {
            // Did not settle within the round budget; Karp is exact and bounded.
            return karp_min_mean_cycle(res);
        };
        let better = match &best {
            None => true,
            Some((m, v, _)) => (mean, node) < (*m, *v),
        };
        if better {
            best = Some((mean, node, cycle));
        }
    }
    best.map(|(mean, _, arcs)| MeanCycle { arcs, mean })
}

#[derive(Clone, Copy, Debug)]
struct Value {
    /// cycle weight W and length L: mean = W / L
    w: i64,
    l: i64,
    /// bias scaled by L
    x: i64,
}

impl Value {
    fn mean_cmp(&self, other: &Value) -> Ordering {
        frac_cmp(self.w, self.l, other.w, other.l)
    }
}

struct Local {
    n: usize,
    start: Vec<usize>,
    /// (to, cost, residual arc id), grouped by tail
    out: Vec<(usize, i64, usize)>,
}

fn howard_component(
    res: &ResidualGraph,
    comp: &Component,
    hint: &mut PolicyHint,
) -> Option<(Ratio<i64>, usize, Vec<usize>)> {
    let n = comp.nodes.len();
    let local = |v: usize| comp.nodes.binary_search(&v).expect("node in component");
    let mut start = vec![0usize; n + 1];
    for &i in &comp.arcs {
        start[local(res.arc(i).from) + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut out = vec![(0usize, 0i64, 0usize); comp.arcs.len()];
    for &i in &comp.arcs {
        let a = res.arc(i);
        let u = local(a.from);
        out[fill[u]] = (local(a.to), a.cost, i);
        fill[u] += 1;
    }
    let g = Local { n, start, out };

    // initial policy: the remembered arc if it survived, else the cheapest
    let mut policy: Vec<usize> = (0..n)
        .map(|u| {
            let arcs = g.start[u]..g.start[u + 1];
            let remembered = hint.choice[comp.nodes[u]]
                .and_then(|o| arcs.clone().find(|&e| res.arc(g.out[e].2).origin == Some(o)));
            remembered.unwrap_or_else(|| {
                arcs.min_by_key(|&e| (g.out[e].1, e))
                    .expect("every node of a cyclic component has an out-arc")
            })
        })
        .collect();

    let mut values = vec![Value { w: 0, l: 1, x: 0 }; n];
    for _ in 0..MAX_ROUNDS {
        evaluate(&g, &policy, &mut values);
        if !improve(&g, &mut policy, &values) {
            for (u, &e) in policy.iter().enumerate() {
                hint.choice[comp.nodes[u]] = res.arc(g.out[e].2).origin;
            }
            let v = (0..n)
                .min_by(|&a, &b| values[a].mean_cmp(&values[b]).then(a.cmp(&b)))
                .expect("nonempty component");
            let cycle = policy_cycle(&g, &policy, v);
            let mean = Ratio::new(values[v].w, values[v].l);
            debug_assert!(res.is_cycle(&cycle));
            debug_assert_eq!(Ratio::new(res.cycle_cost(&cycle), cycle.len() as i64), mean);
            return Some((mean, comp.nodes[v], cycle));
        }
    }
    None
}

/// Value determination for a functional policy graph.
fn evaluate(g: &Local, policy: &[usize], values: &mut [Value]) {
    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; g.n];
    let mut path: Vec<usize> = Vec::new();
    let mut pos = vec![usize::MAX; g.n];
    for s in 0..g.n {
        if state[s] != NEW {
            continue;
        }
        path.clear();
        let mut v = s;
        while state[v] == NEW {
            state[v] = OPEN;
            pos[v] = path.len();
            path.push(v);
            v = g.out[policy[v]].0;
        }
        let mut tail_end = path.len();
        if state[v] == OPEN {
            // new cycle: path[pos[v]..]
            let cyc = &path[pos[v]..];
            let l = cyc.len() as i64;
            let w: i64 = cyc.iter().map(|&u| g.out[policy[u]].1).sum();
            let root_at = (0..cyc.len()).min_by_key(|&i| cyc[i]).expect("nonempty cycle");
            let root = cyc[root_at];
            values[root] = Value { w, l, x: 0 };
            state[root] = DONE;
            // predecessors of root along the cycle, walking backwards
            let mut i = root_at;
            for _ in 1..cyc.len() {
                i = if i == 0 { cyc.len() - 1 } else { i - 1 };
                let u = cyc[i];
                let next = values[g.out[policy[u]].0];
                values[u] = Value {
                    w,
                    l,
                    x: l * g.out[policy[u]].1 - w + next.x,
                };
                state[u] = DONE;
            }
            tail_end = pos[v];
        }
        for &u in path[..tail_end].iter().rev() {
            let next = values[g.out[policy[u]].0];
            values[u] = Value {
                w: next.w,
                l: next.l,
                x: next.l * g.out[policy[u]].1 - next.w + next.x,
            };
            state[u] = DONE;
        }
    }
}

/// One improvement step; returns whether the policy changed.
fn improve(g: &Local, policy: &mut [usize], values: &[Value]) -> bool {
    let mut changed = false;
    // first: switch to successors draining into a strictly smaller mean
    for u in 0..g.n {
        let mut best = policy[u];
        let mut best_val = values[g.out[best].0];
        for e in g.start[u]..g.start[u + 1] {
            let cand = values[g.out[e].0];
            if cand.mean_cmp(&best_val) == Ordering::Less {
                best = e;
                best_val = cand;
            }
        }
        if best_val.mean_cmp(&values[u]) == Ordering::Less {
            policy[u] = best;
            changed = true;
        }
    }
    if changed {
        return true;
    }
    // then: among equal-mean successors, strictly decrease the bias
    for u in 0..g.n {
        let vu = values[u];
        // candidate bias = c - W_u/L_u + X_v/L_v, kept as num / (L_u * L_v)
        let bias = |e: usize| -> (i128, i128) {
            let (v, c, _) = g.out[e];
            let vv = values[v];
            let (lu, lv) = (i128::from(vu.l), i128::from(vv.l));
            (
                i128::from(c) * lu * lv - i128::from(vu.w) * lv + i128::from(vv.x) * lu,
                lu * lv,
            )
        };
        let mut best: Option<(usize, (i128, i128))> = None;
        for e in g.start[u]..g.start[u + 1] {
            if values[g.out[e].0].mean_cmp(&vu) != Ordering::Equal {
                continue;
            }
            let b = bias(e);
            if best.map_or(true, |(_, bb)| b.0 * bb.1 < bb.0 * b.1) {
                best = Some((e, b));
            }
        }
        if let Some((e, (num, den))) = best {
            // compare with the current bias X_u / L_u
            if num * i128::from(vu.l) < i128::from(vu.x) * den && e != policy[u] {
                policy[u] = e;
                changed = true;
            }
        }
    }
    changed
}

fn policy_cycle(g: &Local, policy: &[usize], from: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n];
    let mut v = from;
    while !seen[v] {
        seen[v] = true;
        v = g.out[policy[v]].0;
    }
    // v is on the cycle; start it at its smallest node
    let mut members = vec![v];
    let mut u = g.out[policy[v]].0;
    while u != v {
        members.push(u);
        u = g.out[policy[u]].0;
    }
    let root = *members.iter().min().expect("nonempty cycle");
    let mut arcs = Vec::with_capacity(members.len());
    let mut u = root;
    loop {
        arcs.push(g.out[policy[u]].2);
        u = g.out[policy[u]].0;
        if u == root {
            break;
        }
    }
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_simple_cases() {
        let res = ResidualGraph::from_arcs(3, [(0, 1, -5), (1, 2, 2), (2, 0, 1)]);
        assert_eq!(howard_min_mean_cycle(&res).unwrap().mean, Ratio::new(-2, 3));
        let res = ResidualGraph::from_arcs(4, [(0, 1, -3), (1, 2, 5)]);
        assert_eq!(howard_min_mean_cycle(&res), None);
        let mut arcs: Vec<(usize, usize, i64)> = (0..6).map(|i| (i, (i + 1) % 6, -1)).collect();
        arcs.push((0, 6, -2));
        arcs.push((6, 0, -2));
        let res = ResidualGraph::from_arcs(7, arcs);
        assert_eq!(howard_min_mean_cycle(&res).unwrap().mean, Ratio::from_integer(-2));
    }

    #[test]
    fn needs_bias_phase() {
        // Both cycles share the mean 0 initially reached; a cheaper one needs
        // a detour through a positive arc.
        let res = ResidualGraph::from_arcs(
            4,
            [(0, 1, 0), (1, 0, 0), (1, 2, 3), (2, 3, -5), (3, 2, -5), (3, 1, 1)],
        );
        let cycle = howard_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.mean, Ratio::from_integer(-5));
        assert_eq!(karp_min_mean_cycle(&res).unwrap().mean, cycle.mean);
    }
}
