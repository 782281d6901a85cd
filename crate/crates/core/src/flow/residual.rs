use super::network::{ArcId, FlowNetwork, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualArc {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: i64,
    pub residual: i64,
    /// Underlying network arc and whether this is its forward copy.
    pub origin: Option<(ArcId, bool)>,
}

/// Arcs with positive residual capacity: a forward copy `(capacity - flow,
/// +cost)` and a backward copy `(flow, -cost)` per network arc, whichever
/// are nonempty. A snapshot; rebuild after the flow changes.
#[derive(Debug, Clone)]
pub struct ResidualGraph {
    node_count: usize,
    arcs: Vec<ResidualArc>,
}

impl ResidualGraph {
    pub fn of(net: &FlowNetwork) -> Self {
        let mut arcs = Vec::with_capacity(net.arc_count() * 2);
        for (id, a) in net.arcs().iter().enumerate() {
            if a.residual() > 0 {
                arcs.push(ResidualArc {
                    from: a.from,
                    to: a.to,
                    cost: a.cost,
                    residual: a.residual(),
                    origin: Some((id, true)),
                });
            }
            if a.flow > 0 {
                arcs.push(ResidualArc {
                    from: a.to,
                    to: a.from,
                    cost: -a.cost,
                    residual: a.flow,
                    origin: Some((id, false)),
                });
            }
        }
        ResidualGraph {
            node_count: net.node_count(),
            arcs,
        }
    }

    /// A free-standing weighted digraph, each arc with unit residual.
    pub fn from_arcs(node_count: usize, arcs: impl IntoIterator<Item = (NodeId, NodeId, i64)>) -> Self {
        let arcs = arcs
            .into_iter()
            .map(|(from, to, cost)| {
                assert!(from < node_count && to < node_count, "unknown node");
                ResidualArc {
                    from,
                    to,
                    cost,
                    residual: 1,
                    origin: None,
                }
            })
            .collect();
        ResidualGraph { node_count, arcs }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[ResidualArc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &ResidualArc {
        &self.arcs[id]
    }

    pub fn cycle_cost(&self, cycle: &[usize]) -> i64 {
        cycle.iter().map(|&a| self.arcs[a].cost).sum()
    }

    /// Whether `cycle` is a closed walk of residual arcs.
    pub fn is_cycle(&self, cycle: &[usize]) -> bool {
        !cycle.is_empty()
            && cycle
                .iter()
                .zip(cycle.iter().cycle().skip(1))
                .all(|(&a, &b)| self.arcs[a].to == self.arcs[b].from)
    }

    /// Strongly connected components that contain at least one cycle, each
    /// with its member nodes ascending and the arcs running inside it in arc
    /// order. Components are ordered by their smallest node.
    pub(crate) fn cyclic_components(&self) -> Vec<Component> {
        let comp = self.scc_ids();
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut nodes: Vec<Vec<NodeId>> = vec![Vec::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            nodes[c].push(v);
        }
        let mut arcs: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (i, a) in self.arcs.iter().enumerate() {
            if comp[a.from] == comp[a.to] {
                arcs[comp[a.from]].push(i);
            }
        }
        let mut out: Vec<Component> = nodes
            .into_iter()
            .zip(arcs)
            .filter(|(_, arcs)| !arcs.is_empty())
            .map(|(nodes, arcs)| Component { nodes, arcs })
            .collect();
        out.sort_by_key(|c| c.nodes[0]);
        out
    }

    /// Iterative Tarjan.
    fn scc_ids(&self) -> Vec<usize> {
        let n = self.node_count;
        let mut start = vec![0usize; n + 1];
        for a in &self.arcs {
            start[a.from + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![0usize; self.arcs.len()];
        for a in &self.arcs {
            adj[fill[a.from]] = a.to;
            fill[a.from] += 1;
        }

        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, start[root]));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < start[v + 1] {
                    let w = adj[*pos];
                    *pos += 1;
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, start[w]));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }
}

pub(crate) struct Component {
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<usize>,
}
