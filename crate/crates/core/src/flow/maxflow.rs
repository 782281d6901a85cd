use std::collections::VecDeque;

use super::network::{ArcId, FlowNetwork, NodeId};

/// Shortest (fewest arcs) augmenting path from source to sink in the
/// residual network, as `(arc, forward)` steps. Neighbours are scanned in
/// ascending node id order, so the path is deterministic.
fn shortest_augmenting_path(net: &FlowNetwork) -> Option<Vec<(ArcId, bool)>> {
    let n = net.node_count();
    let mut pred: Vec<Option<(ArcId, bool, NodeId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[FlowNetwork::SOURCE] = true;
    queue.push_back(FlowNetwork::SOURCE);
    while let Some(u) = queue.pop_front() {
        for inc in net.incident(u) {
            if seen[inc.other] {
                continue;
            }
            let a = net.arc(inc.arc);
            let residual = if inc.forward { a.residual() } else { a.flow };
            if residual <= 0 {
                continue;
            }
            seen[inc.other] = true;
            pred[inc.other] = Some((inc.arc, inc.forward, u));
            if inc.other == FlowNetwork::SINK {
                let mut path = Vec::new();
                let mut v = FlowNetwork::SINK;
                while let Some((arc, forward, prev)) = pred[v] {
                    path.push((arc, forward));
                    v = prev;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(inc.other);
        }
    }
    None
}

fn bottleneck(net: &FlowNetwork, path: &[(ArcId, bool)]) -> i64 {
    path.iter()
        .map(|&(arc, forward)| {
            let a = net.arc(arc);
            if forward {
                a.residual()
            } else {
                a.flow
            }
        })
        .min()
        .unwrap_or(0)
}

fn apply(net: &mut FlowNetwork, path: &[(ArcId, bool)], amount: i64) {
    for &(arc, forward) in path {
        net.push(arc, if forward { amount } else { -amount });
    }
}

/// Raises the current flow to a maximum one by shortest augmenting paths
/// (Edmonds-Karp) and returns its value. Any valid flow is an acceptable
/// starting point.
pub fn max_flow(net: &mut FlowNetwork) -> i64 {
    while let Some(path) = shortest_augmenting_path(net) {
        let delta = bottleneck(net, &path);
        apply(net, &path, delta);
    }
    net.flow_value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augment {
    Augmented,
    None,
}

/// Pushes one unit along a shortest augmenting path, if any exists.
pub fn augment_once(net: &mut FlowNetwork) -> Augment {
    match shortest_augmenting_path(net) {
        Some(path) => {
            apply(net, &path, 1);
            Augment::Augmented
        }
        None => Augment::None,
    }
}

/// Whether the sink is reachable from the source in the residual network.
pub fn has_augmenting_path(net: &FlowNetwork) -> bool {
    shortest_augmenting_path(net).is_some()
}
