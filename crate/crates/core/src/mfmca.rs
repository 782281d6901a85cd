//! Cheapest allocation with a prescribed fairness vector, and the
//! unconstrained cheapest maximum allocation.
//!
//! Given the fairness vector `phi` (sorted, `phi_1 <= ... <= phi_K`), the
//! allocation network gains `phi_K - phi_1` dummy layers. Layer `l` holds
//! `|{k : phi_k < phi_1 + l}|` zero-cost dummy jobs sharing a fresh period
//! `T + l`, and every company can take at most one dummy job per layer.
//! With all company-sink capacities set to `phi_K`, a maximum flow saturates
//! every sink arc, and stripping the dummy jobs from a minimum-cost maximum
//! flow leaves a minimum-cost allocation whose sorted counts are `phi`.

use thiserror::Error;

use crate::flow::{min_cost_max_flow_with, CycleFinder, FlowNetwork, NodeKind};
use crate::mlmf::{build_mlmf_network, flow_choices, imaxflow_with, AllocationNetwork, ImaxflowOptions, MlmfResult};
use crate::model::{sorted_counts, Allocation, FairnessVector, Instance, ModelError, Period};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("solver invariant violated: {0}")]
    Invariant(String),
}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Invariant(format!("extracted allocation rejected: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyLayer {
    pub period: Period,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyPlan {
    pub layers: Vec<DummyLayer>,
    /// Company-sink capacity shared by all companies.
    pub sink_cap: u32,
}

impl DummyPlan {
    pub fn for_fairness(fairness: &FairnessVector, periods: u32) -> Self {
        let (Some(lo), Some(hi)) = (fairness.min_value(), fairness.max_value()) else {
            return DummyPlan {
                layers: Vec::new(),
                sink_cap: 0,
            };
        };
        let layers = (1..=hi - lo)
            .map(|l| DummyLayer {
                period: periods + l,
                jobs: fairness.values().iter().filter(|&&phi| phi < lo + l).count(),
            })
            .collect();
        DummyPlan { layers, sink_cap: hi }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn dummy_jobs(&self) -> usize {
        self.layers.iter().map(|l| l.jobs).sum()
    }
}

/// Allocation network extended by dummy layers, with handles to the dummy
/// source arcs.
#[derive(Debug, Clone)]
pub struct DummyNetwork {
    pub layout: AllocationNetwork,
    pub plan: DummyPlan,
    pub dummy_source_arcs: Vec<usize>,
}

pub fn build_dummy_network(instance: &Instance, res: &MlmfResult) -> Result<DummyNetwork, SolveError> {
    if res.fairness.sum() != u64::from(res.max_jobs) {
        return Err(SolveError::InvalidInput(format!(
            "fairness vector {} does not sum to {}",
            res.fairness, res.max_jobs
        )));
    }
    if res.fairness.len() != instance.companies().len() {
        return Err(SolveError::InvalidInput(format!(
            "fairness vector has {} entries for {} companies",
            res.fairness.len(),
            instance.companies().len()
        )));
    }
    let plan = DummyPlan::for_fairness(&res.fairness, instance.periods());
    let mut layout = build_mlmf_network(instance);
    let net = &mut layout.network;
    let mut dummy_source_arcs = Vec::with_capacity(plan.dummy_jobs());
    for (l, layer) in plan.layers.iter().enumerate() {
        let company_times: Vec<usize> = (0..layout.company_nodes.len())
            .map(|k| net.add_node(NodeKind::DummyCompanyTime { layer: l, company: k }))
            .collect();
        for index in 0..layer.jobs {
            let job = net.add_node(NodeKind::DummyJob { layer: l, index });
            let job_time = net.add_node(NodeKind::DummyJobTime { layer: l, index });
            dummy_source_arcs.push(net.add_arc(FlowNetwork::SOURCE, job, 1, 0));
            net.add_arc(job, job_time, 1, 0);
            for &ct in &company_times {
                net.add_arc(job_time, ct, 1, 0);
            }
        }
        for (&ct, &company) in company_times.iter().zip(&layout.company_nodes) {
            net.add_arc(ct, company, 1, 0);
        }
    }
    for &arc in &layout.sink_arcs {
        net.set_capacity(arc, i64::from(plan.sink_cap));
    }
    Ok(DummyNetwork {
        layout,
        plan,
        dummy_source_arcs,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub finder: CycleFinder,
    pub imaxflow: ImaxflowOptions,
    /// Start cycle cancelling from a greedy cheapest-bid flow completed to
    /// a maximum flow, instead of a maximum flow grown from zero.
    pub greedy_start: bool,
}

impl SolveOptions {
    /// Howard cycle finder with a greedy starting flow.
    pub fn fast() -> Self {
        SolveOptions {
            finder: CycleFinder::Howard,
            greedy_start: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCostSolution {
    pub allocation: Allocation,
    pub cancelled: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairSolution {
    pub allocation: Allocation,
    pub mlmf: MlmfResult,
    pub plan: DummyPlan,
    /// Negative cycles cancelled in the dummy network.
    pub cancelled: usize,
}

pub fn solve_mfmca(instance: &Instance) -> Result<Allocation, SolveError> {
    solve_mfmca_with(instance, &SolveOptions::default()).map(|s| s.allocation)
}

pub fn solve_mfmca_with(instance: &Instance, options: &SolveOptions) -> Result<FairSolution, SolveError> {
    let (mlmf, _) = imaxflow_with(instance, &options.imaxflow);
    fair_allocation(instance, mlmf, options)
}

/// Second stage only, for a fairness result computed elsewhere.
pub fn fair_allocation(instance: &Instance, mlmf: MlmfResult, options: &SolveOptions) -> Result<FairSolution, SolveError> {
    let mut dummy = build_dummy_network(instance, &mlmf)?;
    if options.greedy_start {
        dummy.layout.seed_cheapest_bids();
    }
    let flow = min_cost_max_flow_with(&mut dummy.layout.network, options.finder);
    let net = &dummy.layout.network;

    let unassigned = dummy.dummy_source_arcs.iter().filter(|&&a| net.arc(a).flow == 0).count();
    if unassigned > 0 {
        return Err(SolveError::Invariant(format!(
            "{unassigned} of {} dummy jobs unassigned",
            dummy.plan.dummy_jobs()
        )));
    }
    let expected = i64::from(mlmf.max_jobs) + dummy.plan.dummy_jobs() as i64;
    if flow.value != expected {
        return Err(SolveError::Invariant(format!(
            "dummy network flow {} != {expected}",
            flow.value
        )));
    }

    let allocation = Allocation::from_choices(instance, flow_choices(instance, &dummy.layout))?;
    let counts = sorted_counts(&allocation, instance);
    if counts != mlmf.fairness {
        return Err(SolveError::Invariant(format!(
            "allocation counts {counts} differ from fairness vector {}",
            mlmf.fairness
        )));
    }
    Ok(FairSolution {
        allocation,
        mlmf,
        plan: dummy.plan,
        cancelled: flow.cancelled,
    })
}

/// Minimum-cost maximum allocation with no fairness constraint.
pub fn solve_min_cost(instance: &Instance) -> Allocation {
    solve_min_cost_with(instance, &SolveOptions::default()).allocation
}

/// Uses `finder` and `greedy_start` from the options.
pub fn solve_min_cost_with(instance: &Instance, options: &SolveOptions) -> MinCostSolution {
    let mut layout = build_mlmf_network(instance);
    if options.greedy_start {
        layout.seed_cheapest_bids();
    }
    let flow = min_cost_max_flow_with(&mut layout.network, options.finder);
    let allocation = Allocation::from_choices(instance, flow_choices(instance, &layout))
        .expect("flow on a validated network yields a valid allocation");
    debug_assert_eq!(allocation.total_cost(), flow.cost as u64);
    MinCostSolution {
        allocation,
        cancelled: flow.cancelled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;
    use crate::mlmf::imaxflow;
    use crate::model::{check_feasible, Company, CompanyId, Job, JobId};
    use std::collections::BTreeMap;

    fn plan(values: &[u32]) -> DummyPlan {
        DummyPlan::for_fairness(&FairnessVector::from_counts(values.iter().copied()), 5)
    }

    #[test]
    fn plan_for_one_one_three() {
        let p = plan(&[1, 1, 3]);
        assert_eq!(p.layer_count(), 2);
        assert_eq!(p.layers.iter().map(|l| l.jobs).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!(p.layers.iter().map(|l| l.period).collect::<Vec<_>>(), vec![6, 7]);
        assert_eq!(p.sink_cap, 3);
    }

    #[test]
    fn plan_for_flat_vector() {
        let p = plan(&[2, 2, 2]);
        assert_eq!(p.layer_count(), 0);
        assert_eq!(p.sink_cap, 2);
    }

    #[test]
    fn plan_counts_follow_the_rule() {
        // layer l counts companies with phi_k < phi_1 + l
        let p = plan(&[0, 1, 3]);
        assert_eq!(p.layers.iter().map(|l| l.jobs).collect::<Vec<_>>(), vec![1, 2, 2]);
        // every company absorbs phi_max - phi_k dummies in total
        assert_eq!(p.dummy_jobs(), 3 + 2);
    }

    #[test]
    fn example_dummy_network() {
        let inst = example1();
        let res = imaxflow(&inst);
        let d = build_dummy_network(&inst, &res).unwrap();
        assert_eq!(d.layout.sink_capacities(), vec![3, 3, 3]);
        assert_eq!(d.dummy_source_arcs.len(), 4);
        let kinds = d.layout.network.kinds();
        let dct = kinds.iter().filter(|k| matches!(k, NodeKind::DummyCompanyTime { .. })).count();
        assert_eq!(dct, 6);
    }

    #[test]
    fn inconsistent_result_is_rejected() {
        let inst = example1();
        let mut res = imaxflow(&inst);
        res.max_jobs = 4;
        assert!(matches!(build_dummy_network(&inst, &res), Err(SolveError::InvalidInput(_))));
    }

    #[test]
    fn example_fair_allocation_is_pi5() {
        let inst = example1();
        for finder in [CycleFinder::Karp, CycleFinder::Howard] {
            let sol = solve_mfmca_with(
                &inst,
                &SolveOptions {
                    finder,
                    ..Default::default()
                },
            )
            .unwrap();
            let alloc = &sol.allocation;
            assert_eq!(alloc.total_cost(), 105);
            assert_eq!(sorted_counts(alloc, &inst).values(), &[1, 1, 3]);
            let got: BTreeMap<u32, (u32, u32)> = alloc
                .assignments()
                .iter()
                .map(|(j, a)| (j.0, (a.company.0, a.period)))
                .collect();
            let pi5: BTreeMap<u32, (u32, u32)> =
                [(1, (1, 1)), (2, (3, 2)), (3, (2, 2)), (4, (3, 4)), (5, (3, 5))].into_iter().collect();
            assert_eq!(got, pi5);
        }
    }

    #[test]
    fn example_min_cost_assigns_five() {
        let inst = example1();
        let alloc = solve_min_cost(&inst);
        assert_eq!(alloc.len(), 5);
        assert!(check_feasible(&inst, &alloc).unwrap());
        assert!(alloc.total_cost() <= 105);
    }

    #[test]
    fn single_company_costs_agree() {
        let jobs = vec![Job::new(JobId(1), [1, 2]), Job::new(JobId(2), [2])];
        let k = Company::new(CompanyId(7))
            .with_capacity(1, 1)
            .with_capacity(2, 1)
            .with_bid(JobId(1), 1, 9)
            .with_bid(JobId(1), 2, 4)
            .with_bid(JobId(2), 2, 3);
        let inst = Instance::new(2, jobs, vec![k]).unwrap();
        let fair = solve_mfmca(&inst).unwrap();
        let cheap = solve_min_cost(&inst);
        assert_eq!(fair.total_cost(), cheap.total_cost());
        assert_eq!(fair.total_cost(), 12);
    }

    #[test]
    fn instance_without_jobs() {
        let inst = Instance::new(2, vec![], vec![Company::new(CompanyId(1)), Company::new(CompanyId(2))]).unwrap();
        let alloc = solve_mfmca(&inst).unwrap();
        assert!(alloc.is_empty());
        assert!(solve_min_cost(&inst).is_empty());
    }
}
