use super::howard::{howard_min_mean_cycle, howard_with_hint, PolicyHint};
use super::karp::{karp_min_mean_cycle, MeanCycle};
use super::maxflow::max_flow;
use super::network::FlowNetwork;
use super::residual::ResidualGraph;

/// Which exact minimum-mean-cycle routine drives cycle cancelling. Both
/// return a cycle of the same (minimum) mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CycleFinder {
    #[default]
    Karp,
    Howard,
}

impl CycleFinder {
    pub fn find(self, res: &ResidualGraph) -> Option<MeanCycle> {
        match self {
            CycleFinder::Karp => karp_min_mean_cycle(res),
            CycleFinder::Howard => howard_min_mean_cycle(res),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinCostFlow {
    pub value: i64,
    pub cost: i64,
    /// Number of negative cycles cancelled.
    pub cancelled: usize,
}

/// Maximum flow of minimum cost: a maximum flow first, then repeated
/// cancelling of a minimum-mean residual cycle while its mean is negative.
pub fn min_cost_max_flow(net: &mut FlowNetwork) -> MinCostFlow {
    min_cost_max_flow_with(net, CycleFinder::Karp)
}

pub fn min_cost_max_flow_with(net: &mut FlowNetwork, finder: CycleFinder) -> MinCostFlow {
    let value = max_flow(net);
    let mut cost = net.total_cost();
    let mut cancelled = 0;
    let mut hint = PolicyHint::default();
    loop {
        let res = ResidualGraph::of(net);
        let found = match finder {
            CycleFinder::Karp => karp_min_mean_cycle(&res),
            CycleFinder::Howard => howard_with_hint(&res, &mut hint),
        };
        let Some(cycle) = found else { break };
        if cycle.mean >= 0.into() {
            break;
        }
        cancel(net, &res, &cycle);
        cancelled += 1;
        let next = net.total_cost();
        assert!(next < cost, "cancelling a negative cycle must lower the cost");
        assert_eq!(net.flow_value(), value, "cancelling must preserve the flow value");
        cost = next;
    }
    MinCostFlow {
        value,
        cost,
        cancelled,
    }
}

/// Pushes the bottleneck residual amount around `cycle`.
pub fn cancel(net: &mut FlowNetwork, res: &ResidualGraph, cycle: &MeanCycle) -> i64 {
    let delta = cycle
        .arcs
        .iter()
        .map(|&a| res.arc(a).residual)
        .min()
        .expect("nonempty cycle");
    for &a in &cycle.arcs {
        let (arc, forward) = res.arc(a).origin.expect("residual arc of a network");
        net.push(arc, if forward { delta } else { -delta });
    }
    delta
}

/// Optimality certificate: no residual cycle of negative mean.
pub fn is_cost_optimal(net: &FlowNetwork) -> bool {
    karp_min_mean_cycle(&ResidualGraph::of(net)).map_or(true, |c| c.mean >= 0.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::network::NodeKind;

    /// Two routes share a unit bottleneck; shortest-path max flow takes the
    /// expensive one first (lower node id) and cancelling must reroute.
    #[test]
    fn reroutes_to_cheaper_route() {
        for finder in [CycleFinder::Karp, CycleFinder::Howard] {
            let mut net = FlowNetwork::new();
            let x = net.add_node(NodeKind::Plain);
            let y = net.add_node(NodeKind::Plain);
            let m = net.add_node(NodeKind::Plain);
            let sx = net.add_arc(FlowNetwork::SOURCE, x, 1, 9);
            net.add_arc(FlowNetwork::SOURCE, y, 1, 2);
            net.add_arc(x, m, 1, 0);
            net.add_arc(y, m, 1, 0);
            net.add_arc(m, FlowNetwork::SINK, 1, 0);
            let out = min_cost_max_flow_with(&mut net, finder);
            assert_eq!((out.value, out.cost, out.cancelled), (1, 2, 1));
            assert_eq!(net.arc(sx).flow, 0);
            assert!(is_cost_optimal(&net));
            assert!(net.validate().is_ok());
        }
    }

    #[test]
    fn forced_flow_has_forced_cost() {
        let mut net = FlowNetwork::new();
        let x = net.add_node(NodeKind::Plain);
        net.add_arc(FlowNetwork::SOURCE, x, 1, 4);
        net.add_arc(x, FlowNetwork::SINK, 1, 3);
        let out = min_cost_max_flow(&mut net);
        assert_eq!((out.value, out.cost, out.cancelled), (1, 7, 0));
    }
}
