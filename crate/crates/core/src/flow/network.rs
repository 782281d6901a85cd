use std::fmt::Write as _;

use thiserror::Error;

pub type NodeId = usize;
pub type ArcId = usize;

/// Role of a node in the layered allocation network. Indices refer to
/// positions in the owning [`Instance`](crate::model::Instance).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Source,
    Sink,
    Job(usize),
    JobTime { job: usize, period: u32 },
    CompanyTime { company: usize, period: u32 },
    Company(usize),
    DummyJob { layer: usize, index: usize },
    DummyJobTime { layer: usize, index: usize },
    DummyCompanyTime { layer: usize, company: usize },
    /// Node of a network that does not model an allocation (tests, tools).
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: i64,
    pub cost: i64,
    pub flow: i64,
}

impl Arc {
    pub fn residual(&self) -> i64 {
        self.capacity - self.flow
    }
}

/// One traversal direction of an arc as seen from a node: forward along a
/// real arc, or backward against its flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Incidence {
    pub other: NodeId,
    pub arc: ArcId,
    pub forward: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("arc {arc}: flow {flow} outside [0, {capacity}]")]
    CapacityViolated { arc: ArcId, flow: i64, capacity: i64 },
    #[error("node {node}: inflow {inflow} != outflow {outflow}")]
    Conservation {
        node: NodeId,
        inflow: i64,
        outflow: i64,
    },
}

/// Directed graph with integer capacities, integer costs and a current
/// integral flow from [`FlowNetwork::SOURCE`] to [`FlowNetwork::SINK`].
///
/// Parallel arcs are allowed. Every node keeps its incidences ordered by the
/// id of the node on the other end, so traversals break ties by ascending
/// node id.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    kinds: Vec<NodeKind>,
    arcs: Vec<Arc>,
    incident: Vec<Vec<Incidence>>,
}

impl Default for FlowNetwork {
    fn default() -> Self {
        Self::new()
    }
}

impl FlowNetwork {
    pub const SOURCE: NodeId = 0;
    pub const SINK: NodeId = 1;

    /// Network holding only the source and the sink.
    pub fn new() -> Self {
        FlowNetwork {
            kinds: vec![NodeKind::Source, NodeKind::Sink],
            arcs: Vec::new(),
            incident: vec![Vec::new(), Vec::new()],
        }
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        self.kinds.push(kind);
        self.incident.push(Vec::new());
        self.kinds.len() - 1
    }

    pub fn add_arc(&mut self, from: NodeId, to: NodeId, capacity: i64, cost: i64) -> ArcId {
        assert!(from < self.node_count() && to < self.node_count(), "unknown node");
        assert!(capacity >= 0, "negative capacity");
        let id = self.arcs.len();
        self.arcs.push(Arc {
            from,
            to,
            capacity,
            cost,
            flow: 0,
        });
        Self::insert_sorted(
            &mut self.incident[from],
            Incidence {
                other: to,
                arc: id,
                forward: true,
            },
        );
        Self::insert_sorted(
            &mut self.incident[to],
            Incidence {
                other: from,
                arc: id,
                forward: false,
            },
        );
        id
    }

    fn insert_sorted(list: &mut Vec<Incidence>, inc: Incidence) {
        let at = list.partition_point(|x| (x.other, x.arc) <= (inc.other, inc.arc));
        list.insert(at, inc);
    }

    /// Changes an arc's capacity. The current flow must still fit.
    pub fn set_capacity(&mut self, arc: ArcId, capacity: i64) {
        let a = &mut self.arcs[arc];
        assert!(
            (0..=capacity).contains(&a.flow),
            "capacity {capacity} below flow {} on arc {arc}",
            a.flow
        );
        a.capacity = capacity;
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub(crate) fn incident(&self, node: NodeId) -> &[Incidence] {
        &self.incident[node]
    }

    /// Pushes `amount` along an arc; negative amounts cancel flow.
    pub(crate) fn push(&mut self, arc: ArcId, amount: i64) {
        let a = &mut self.arcs[arc];
        a.flow += amount;
        debug_assert!(a.flow >= 0 && a.flow <= a.capacity);
    }

    pub fn reset_flow(&mut self) {
        for a in &mut self.arcs {
            a.flow = 0;
        }
    }

    /// Net flow out of the source.
    pub fn flow_value(&self) -> i64 {
        self.incident[Self::SOURCE]
            .iter()
            .map(|inc| {
                let f = self.arcs[inc.arc].flow;
                if inc.forward {
                    f
                } else {
                    -f
                }
            })
            .sum()
    }

    /// Sum of cost times flow over all arcs.
    pub fn total_cost(&self) -> i64 {
        self.arcs.iter().map(|a| a.cost * a.flow).sum()
    }

    /// Capacity bounds on every arc and conservation at every inner node.
    pub fn validate(&self) -> Result<(), FlowError> {
        for (id, a) in self.arcs.iter().enumerate() {
            if a.flow < 0 || a.flow > a.capacity {
                return Err(FlowError::CapacityViolated {
                    arc: id,
                    flow: a.flow,
                    capacity: a.capacity,
                });
            }
        }
        let mut inflow = vec![0i64; self.node_count()];
        let mut outflow = vec![0i64; self.node_count()];
        for a in &self.arcs {
            outflow[a.from] += a.flow;
            inflow[a.to] += a.flow;
        }
        for node in 0..self.node_count() {
            if node != Self::SOURCE && node != Self::SINK && inflow[node] != outflow[node] {
                return Err(FlowError::Conservation {
                    node,
                    inflow: inflow[node],
                    outflow: outflow[node],
                });
            }
        }
        Ok(())
    }

    /// `from to capacity cost flow`, one arc per line in arc order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {} {} {}", a.from, a.to, a.capacity, a.cost, a.flow);
        }
        out
    }
}
