//! Karp's minimum mean cycle algorithm in exact integer arithmetic.

use std::cmp::Ordering;

use num_rational::Ratio;

use super::residual::{Component, ResidualGraph};

/// A directed cycle of residual arcs (indices into the residual graph, in
/// traversal order) together with its exact mean arc cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub arcs: Vec<usize>,
    pub mean: Ratio<i64>,
}

const INF: i64 = i64::MAX / 4;

/// `a/b < c/d` for positive denominators.
pub(crate) fn frac_cmp(a: i64, b: i64, c: i64, d: i64) -> Ordering {
    (i128::from(a) * i128::from(d)).cmp(&(i128::from(c) * i128::from(b)))
}

/// Minimum mean cycle over all cycles of `res`, or `None` when `res` is
/// acyclic.
///
/// Runs per strongly connected component. Ties between components and
/// between nodes of the final min-max expression go to the lowest node id.
pub fn karp_min_mean_cycle(res: &ResidualGraph) -> Option<MeanCycle> {
    let mut best: Option<(Ratio<i64>, usize, Vec<usize>)> = None;
    for comp in res.cyclic_components() {
        let (mean, node, cycle) = karp_component(res, &comp);
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

/// Returns (minimum mean, node achieving it, a cycle through the critical walk).
fn karp_component(res: &ResidualGraph, comp: &Component) -> (Ratio<i64>, usize, Vec<usize>) {
    let n = comp.nodes.len();
    let local = |v: usize| comp.nodes.binary_search(&v).expect("node in component");
    let arcs: Vec<(usize, usize, i64, usize)> = comp
        .arcs
        .iter()
        .map(|&i| {
            let a = res.arc(i);
            (local(a.from), local(a.to), a.cost, i)
        })
        .collect();

    // dist[k * n + v]: minimum cost of a walk with exactly k arcs ending at v,
    // starting anywhere; pred holds the last arc of that walk.
    let mut dist = vec![INF; (n + 1) * n];
    let mut pred = vec![u32::MAX; (n + 1) * n];
    dist[..n].fill(0);
    for k in 1..=n {
        let (prev, cur) = dist.split_at_mut(k * n);
        let prev = &prev[(k - 1) * n..];
        let cur = &mut cur[..n];
        let pred_k = &mut pred[k * n..(k + 1) * n];
        for (idx, &(u, v, w, _)) in arcs.iter().enumerate() {
            let du = prev[u];
            if du < INF {
                let cand = du + w;
                if cand < cur[v] {
                    cur[v] = cand;
                    pred_k[v] = idx as u32;
                }
            }
        }
    }

    // min over v of max over k of (D_n(v) - D_k(v)) / (n - k)
    let mut best: Option<(i64, i64, usize)> = None;
    for v in 0..n {
        let dn = dist[n * n + v];
        if dn >= INF {
            continue;
        }
        let mut worst: Option<(i64, i64)> = None;
        for k in 0..n {
            let dk = dist[k * n + v];
            if dk >= INF {
                continue;
            }
            let (num, den) = (dn - dk, (n - k) as i64);
            if worst.map_or(true, |(a, b)| frac_cmp(num, den, a, b) == Ordering::Greater) {
                worst = Some((num, den));
            }
        }
        let (num, den) = worst.expect("level 0 is always finite");
        if best.map_or(true, |(a, b, _)| frac_cmp(num, den, a, b) == Ordering::Less) {
            best = Some((num, den, v));
        }
    }
    let (num, den, v_star) = best.expect("a cyclic component has a walk of every length");
    let lambda = Ratio::new(num, den);

    // Walk the n-arc critical walk backwards; the first repeated node closes a
    // cycle whose mean equals lambda.
    let mut seen_at = vec![usize::MAX; n];
    let mut node = v_star;
    let mut level = n;
    let mut walk_arcs = vec![0usize; n + 1];
    loop {
        if seen_at[node] != usize::MAX {
            let top = seen_at[node];
            let cycle: Vec<usize> = (level + 1..=top).map(|j| arcs[walk_arcs[j]].3).collect();
            debug_assert!(res.is_cycle(&cycle));
            debug_assert_eq!(
                Ratio::new(res.cycle_cost(&cycle), cycle.len() as i64),
                lambda,
                "critical walk cycle must be minimum mean"
            );
            return (lambda, comp.nodes[v_star], cycle);
        }
        seen_at[node] = level;
        let p = pred[level * n + node] as usize;
        walk_arcs[level] = p;
        node = arcs[p].0;
        level -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclic_graph_has_no_cycle() {
        let res = ResidualGraph::from_arcs(4, [(0, 1, -3), (1, 2, 5), (0, 2, 1), (2, 3, -7)]);
        assert_eq!(karp_min_mean_cycle(&res), None);
    }

    #[test]
    fn triangle_mean() {
        let res = ResidualGraph::from_arcs(3, [(0, 1, -5), (1, 2, 2), (2, 0, 1)]);
        let cycle = karp_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.mean, Ratio::new(-2, 3));
        let mut arcs = cycle.arcs.clone();
        arcs.sort_unstable();
        assert_eq!(arcs, vec![0, 1, 2]);
        assert!(res.is_cycle(&cycle.arcs));
    }

    #[test]
    fn picks_smaller_mean_of_two_cycles() {
        // cycle A: 0<->1 mean 1; cycle B: 2->3->4->2 mean -1/3; joined by a bridge.
        let res = ResidualGraph::from_arcs(
            5,
            [(0, 1, 1), (1, 0, 1), (1, 2, -100), (2, 3, 0), (3, 4, 0), (4, 2, -1)],
        );
        let cycle = karp_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.mean, Ratio::new(-1, 3));
        assert_eq!(cycle.arcs.len(), 3);
    }

    #[test]
    fn prefers_lower_mean_over_lower_total() {
        // long cycle total -6 over 6 arcs (mean -1) vs 2-cycle total -4 (mean -2)
        let mut arcs: Vec<(usize, usize, i64)> = (0..6).map(|i| (i, (i + 1) % 6, -1)).collect();
        arcs.push((0, 6, -2));
        arcs.push((6, 0, -2));
        let res = ResidualGraph::from_arcs(7, arcs);
        let cycle = karp_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.mean, Ratio::from_integer(-2));
    }

    #[test]
    fn self_loop() {
        let res = ResidualGraph::from_arcs(2, [(0, 1, 4), (1, 1, -3)]);
        let cycle = karp_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.arcs, vec![1]);
        assert_eq!(cycle.mean, Ratio::from_integer(-3));
    }

    #[test]
    fn parallel_arcs() {
        let res = ResidualGraph::from_arcs(2, [(0, 1, 5), (0, 1, 1), (1, 0, 0)]);
        let cycle = karp_min_mean_cycle(&res).unwrap();
        assert_eq!(cycle.mean, Ratio::new(1, 2));
        assert!(cycle.arcs.contains(&1));
    }
}
