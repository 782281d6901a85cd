//! Maximum job count and the max-lexmin fair distribution of it.
//!
//! The instance becomes a layered network `source -> job -> job-time ->
//! company-time -> company -> sink`. Progressive filling then raises every
//! company's sink capacity one unit per round and retires a company as soon
//! as an extra unit no longer raises the maximum flow (or its total capacity
//! is reached). The retired capacities sum to the maximum flow and, sorted,
//! form the leximin-optimal fairness vector.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flow::{augment_once, max_flow, Augment, ArcId, FlowNetwork, NodeId, NodeKind};
use crate::model::{CompanyId, FairnessVector, Instance, JobId, Period};

/// A `job-time -> company-time` arc carrying a bid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BidArc {
    pub arc: ArcId,
    pub job: usize,
    pub company: usize,
    pub period: Period,
}

/// Flow network of an instance plus handles to the arcs the solvers read
/// back. Indices in handles are instance positions, not ids.
#[derive(Debug, Clone)]
pub struct AllocationNetwork {
    pub network: FlowNetwork,
    pub job_nodes: Vec<NodeId>,
    pub company_nodes: Vec<NodeId>,
    /// `company -> sink` arc per company.
    pub sink_arcs: Vec<ArcId>,
    pub bid_arcs: Vec<BidArc>,
    /// `company-time` node per (company, period) that has one.
    pub company_time_nodes: BTreeMap<(usize, Period), NodeId>,
    /// `source -> job` arc per job.
    pub source_arcs: Vec<ArcId>,
    /// `job -> job-time` arc per (job, period).
    pub job_time_arcs: BTreeMap<(usize, Period), ArcId>,
    /// `company-time -> company` arc per (company, period).
    pub company_time_arcs: BTreeMap<(usize, Period), ArcId>,
}

impl AllocationNetwork {
    pub fn node_count_of(&self, pred: impl Fn(NodeKind) -> bool) -> usize {
        self.network.kinds().iter().filter(|&&k| pred(k)).count()
    }

    pub fn sink_capacities(&self) -> Vec<i64> {
        self.sink_arcs
            .iter()
            .map(|&a| self.network.arc(a).capacity)
            .collect()
    }

    /// Flow into the sink per company.
    pub fn company_flows(&self) -> Vec<i64> {
        self.sink_arcs.iter().map(|&a| self.network.arc(a).flow).collect()
    }

    /// `(job, company, period)` for every bid arc carrying flow.
    pub fn chosen_bids(&self) -> impl Iterator<Item = &BidArc> + '_ {
        self.bid_arcs
            .iter()
            .filter(move |b| self.network.arc(b.arc).flow > 0)
    }
}

/// Builds the layered network with company-sink capacities `N_k`.
///
/// A company-time node exists for every (company, period) with a bid or a
/// declared capacity; job-time arcs exist only where a bid exists.
pub fn build_mlmf_network(instance: &Instance) -> AllocationNetwork {
    let mut net = FlowNetwork::new();
    let jobs = instance.jobs();
    let companies = instance.companies();

    let job_nodes: Vec<NodeId> = (0..jobs.len()).map(|j| net.add_node(NodeKind::Job(j))).collect();
    let mut job_time: BTreeMap<(usize, Period), NodeId> = BTreeMap::new();
    for (j, job) in jobs.iter().enumerate() {
        for &t in job.periods() {
            let node = net.add_node(NodeKind::JobTime { job: j, period: t });
            job_time.insert((j, t), node);
        }
    }
    let mut company_time: BTreeMap<(usize, Period), NodeId> = BTreeMap::new();
    for (k, company) in companies.iter().enumerate() {
        let mut periods: Vec<Period> = company.capacities().keys().copied().collect();
        periods.extend(company.bids().map(|(_, t, _)| t));
        periods.sort_unstable();
        periods.dedup();
        for t in periods {
            let node = net.add_node(NodeKind::CompanyTime { company: k, period: t });
            company_time.insert((k, t), node);
        }
    }
    let company_nodes: Vec<NodeId> = (0..companies.len())
        .map(|k| net.add_node(NodeKind::Company(k)))
        .collect();

    let source_arcs = job_nodes
        .iter()
        .map(|&node| net.add_arc(FlowNetwork::SOURCE, node, 1, 0))
        .collect();
    let job_time_arcs = job_time
        .iter()
        .map(|(&key, &node)| (key, net.add_arc(job_nodes[key.0], node, 1, 0)))
        .collect();
    let mut bid_arcs = Vec::with_capacity(instance.bid_count());
    for (k, company) in companies.iter().enumerate() {
        for (job, t, cost) in company.bids() {
            let j = instance.job_position(job).expect("validated instance");
            let arc = net.add_arc(job_time[&(j, t)], company_time[&(k, t)], 1, i64::from(cost));
            bid_arcs.push(BidArc {
                arc,
                job: j,
                company: k,
                period: t,
            });
        }
    }
    let company_time_arcs = company_time
        .iter()
        .map(|(&(k, t), &node)| {
            let cap = companies[k].capacity_at(t);
            ((k, t), net.add_arc(node, company_nodes[k], i64::from(cap), 0))
        })
        .collect();
    let sink_arcs = company_nodes
        .iter()
        .zip(companies)
        .map(|(&node, company)| net.add_arc(node, FlowNetwork::SINK, i64::from(company.total_capacity()), 0))
        .collect();

    AllocationNetwork {
        network: net,
        job_nodes,
        company_nodes,
        sink_arcs,
        bid_arcs,
        company_time_nodes: company_time,
        source_arcs,
        job_time_arcs,
        company_time_arcs,
    }
}

impl AllocationNetwork {
    /// Routes a unit of flow through every bid, cheapest first, whose job is
    /// still unassigned and whose slot and company still have room. The
    /// result is a valid flow, usually a good starting point for cycle
    /// cancelling.
    pub fn seed_cheapest_bids(&mut self) {
        let mut order: Vec<usize> = (0..self.bid_arcs.len()).collect();
        order.sort_by_key(|&i| (self.network.arc(self.bid_arcs[i].arc).cost, i));
        for i in order {
            let b = self.bid_arcs[i];
            let path = [
                self.source_arcs[b.job],
                self.job_time_arcs[&(b.job, b.period)],
                b.arc,
                self.company_time_arcs[&(b.company, b.period)],
                self.sink_arcs[b.company],
            ];
            if path.iter().all(|&a| self.network.arc(a).residual() > 0) {
                for a in path {
                    self.network.push(a, 1);
                }
            }
        }
    }
}

/// Order in which a round visits the still-active companies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum CompanyOrder {
    /// Instance order.
    #[default]
    Ascending,
    /// A permutation of instance order drawn from the seed.
    Seeded(u64),
    /// Explicit permutation of instance positions.
    Explicit(Vec<usize>),
}

impl CompanyOrder {
    fn resolve(&self, count: usize) -> Vec<usize> {
        match self {
            CompanyOrder::Ascending => (0..count).collect(),
            CompanyOrder::Seeded(seed) => {
                let mut order: Vec<usize> = (0..count).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                order
            }
            CompanyOrder::Explicit(order) => {
                let mut check = order.clone();
                check.sort_unstable();
                assert!(
                    check.iter().copied().eq(0..count),
                    "explicit order must permute 0..{count}"
                );
                order.clone()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImaxflowOptions {
    pub order: CompanyOrder,
    /// Recompute the maximum flow from zero at every step instead of
    /// augmenting the retained flow by at most one unit.
    pub from_scratch: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlmfResult {
    /// Maximum number of assignable jobs.
    pub max_jobs: u32,
    /// Retired sink capacity per company, keyed by company id.
    pub fixed_caps: BTreeMap<CompanyId, u32>,
    /// `fixed_caps` sorted nondecreasingly.
    pub fairness: FairnessVector,
    /// Flow value after every capacity-raising step, in step order.
    pub trace: Vec<u32>,
}

/// Progressive filling with the default options.
pub fn imaxflow(instance: &Instance) -> MlmfResult {
    imaxflow_with(instance, &ImaxflowOptions::default()).0
}

/// Progressive filling; also returns the network holding the final flow
/// (sink capacities at their retired values).
pub fn imaxflow_with(instance: &Instance, options: &ImaxflowOptions) -> (MlmfResult, AllocationNetwork) {
    let mut layout = build_mlmf_network(instance);
    let companies = instance.companies();
    let totals: Vec<i64> = companies.iter().map(|k| i64::from(k.total_capacity())).collect();
    for &arc in &layout.sink_arcs {
        layout.network.set_capacity(arc, 0);
    }
    let mut caps = vec![0i64; companies.len()];
    let mut fixed: Vec<Option<i64>> = vec![None; companies.len()];
    let order = options.order.resolve(companies.len());
    let mut active: Vec<usize> = order;
    let mut current = 0i64;
    let mut trace = Vec::new();

    while !active.is_empty() {
        let mut still_active = Vec::with_capacity(active.len());
        for &k in &active {
            let previous = current;
            if caps[k] < totals[k] {
                caps[k] += 1;
                layout.network.set_capacity(layout.sink_arcs[k], caps[k]);
                current = if options.from_scratch {
                    layout.network.reset_flow();
                    max_flow(&mut layout.network)
                } else {
                    match augment_once(&mut layout.network) {
                        Augment::Augmented => previous + 1,
                        Augment::None => previous,
                    }
                };
                trace.push(current as u32);
                if current > previous {
                    still_active.push(k);
                } else {
                    caps[k] -= 1;
                    if options.from_scratch {
                        // the recomputed flow may route a unit through the raised arc
                        layout.network.reset_flow();
                        layout.network.set_capacity(layout.sink_arcs[k], caps[k]);
                        max_flow(&mut layout.network);
                    } else {
                        layout.network.set_capacity(layout.sink_arcs[k], caps[k]);
                    }
                    fixed[k] = Some(caps[k]);
                }
            } else {
                fixed[k] = Some(caps[k]);
            }
        }
        active = still_active;
    }

    let fixed_caps: BTreeMap<CompanyId, u32> = companies
        .iter()
        .zip(&fixed)
        .map(|(company, cap)| (company.id(), cap.expect("every company retires") as u32))
        .collect();
    let fairness = FairnessVector::from_counts(fixed_caps.values().copied());
    debug_assert_eq!(fairness.sum(), current as u64);
    (
        MlmfResult {
            max_jobs: current as u32,
            fixed_caps,
            fairness,
            trace,
        },
        layout,
    )
}

/// Jobs carried by the network flow, as `(job id, company id, period)`.
pub(crate) fn flow_choices(
    instance: &Instance,
    layout: &AllocationNetwork,
) -> Vec<(JobId, CompanyId, Period)> {
    layout
        .chosen_bids()
        .map(|b| {
            (
                instance.jobs()[b.job].id(),
                instance.companies()[b.company].id(),
                b.period,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;
    use crate::model::{Company, Job};

    #[test]
    fn example_network_shape() {
        let layout = build_mlmf_network(&example1());
        let count = |f: fn(NodeKind) -> bool| layout.node_count_of(f);
        assert_eq!(count(|k| matches!(k, NodeKind::Job(_))), 5);
        assert_eq!(count(|k| matches!(k, NodeKind::JobTime { .. })), 8);
        assert_eq!(count(|k| matches!(k, NodeKind::CompanyTime { .. })), 8);
        assert_eq!(count(|k| matches!(k, NodeKind::Company(_))), 3);
        assert_eq!(layout.sink_capacities(), vec![1, 2, 5]);
        let k3: Vec<Period> = layout
            .company_time_nodes
            .keys()
            .filter(|(k, _)| *k == 2)
            .map(|&(_, t)| t)
            .collect();
        assert_eq!(k3, vec![1, 2, 3, 4, 5]);
        assert_eq!(layout.bid_arcs.len(), 12);
        let costs: Vec<i64> = layout
            .bid_arcs
            .iter()
            .map(|b| layout.network.arc(b.arc).cost)
            .collect();
        assert_eq!(costs.iter().sum::<i64>(), 20 + 30 + 40 + 25 + 10 + 20 + 20 + 25 + 25 + 30 + 20 + 20);
        // only bid arcs are priced
        let priced = layout.network.arcs().iter().filter(|a| a.cost != 0).count();
        assert_eq!(priced, 12);
    }

    #[test]
    fn example_max_flow_is_five() {
        let mut layout = build_mlmf_network(&example1());
        assert_eq!(max_flow(&mut layout.network), 5);
    }

    #[test]
    fn example_fairness_vector() {
        let res = imaxflow(&example1());
        assert_eq!(res.max_jobs, 5);
        assert_eq!(res.fairness.values(), &[1, 1, 3]);
        let caps: Vec<u32> = res.fixed_caps.values().copied().collect();
        assert_eq!(caps, vec![1, 1, 3]);
    }

    #[test]
    fn example_trace_follows_the_walkthrough() {
        // round 1: k1, k2, k3 each gain a unit (1, 2, 3); round 2: k1 retires
        // at N, k2 gains nothing (3), k3 gains (4); round 3: k3 gains (5);
        // round 4: k3 gains nothing.
        let res = imaxflow(&example1());
        assert_eq!(res.trace, vec![1, 2, 3, 3, 4, 5, 5]);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(3, vec![], vec![Company::new(CompanyId(1))]).unwrap();
        let mut layout = build_mlmf_network(&inst);
        assert_eq!(layout.network.node_count(), 3);
        assert_eq!(max_flow(&mut layout.network), 0);
        let res = imaxflow(&inst);
        assert_eq!(res.max_jobs, 0);
        assert_eq!(res.fairness.values(), &[0]);
    }

    #[test]
    fn disjoint_single_bids_give_all_ones() {
        let jobs: Vec<Job> = (1..=4).map(|j| Job::new(JobId(j), [1])).collect();
        let companies: Vec<Company> = (1..=4)
            .map(|k| Company::new(CompanyId(k)).with_capacity(1, 1).with_bid(JobId(k), 1, 10 * k))
            .collect();
        let inst = Instance::new(1, jobs, companies).unwrap();
        let res = imaxflow(&inst);
        assert_eq!(res.max_jobs, 4);
        assert_eq!(res.fairness.values(), &[1, 1, 1, 1]);
    }

    #[test]
    fn from_scratch_agrees_with_warm_start() {
        let inst = example1();
        let warm = imaxflow(&inst);
        let (cold, _) = imaxflow_with(
            &inst,
            &ImaxflowOptions {
                from_scratch: true,
                ..Default::default()
            },
        );
        assert_eq!(warm, cold);
    }

    #[test]
    fn order_changes_caps_not_vector() {
        for order in [vec![2, 1, 0], vec![1, 2, 0], vec![2, 0, 1]] {
            let (res, _) = imaxflow_with(
                &example1(),
                &ImaxflowOptions {
                    order: CompanyOrder::Explicit(order),
                    ..Default::default()
                },
            );
            assert_eq!(res.fairness.values(), &[1, 1, 3]);
        }
    }

    #[test]
    fn final_network_carries_the_fixed_caps() {
        let (res, layout) = imaxflow_with(&example1(), &ImaxflowOptions::default());
        let flows: Vec<i64> = layout.company_flows();
        let caps: Vec<i64> = res.fixed_caps.values().map(|&c| i64::from(c)).collect();
        assert_eq!(flows, caps);
        assert_eq!(layout.sink_capacities(), caps);
        assert!(layout.network.validate().is_ok());
    }
}
