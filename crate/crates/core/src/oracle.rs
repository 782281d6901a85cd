//! Exhaustive ground truth for small instances.
//!
//! Every job independently either stays unassigned or takes one of its bids
//! at a (company, period) slot with positive capacity; a depth-first search
//! over these choices, pruned by remaining slot capacity, visits each
//! feasible allocation exactly once.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Allocation, Assignment, Company, CompanyId, Cost, FairnessVector, Instance, Job, JobId, Period};

pub const DEFAULT_GUARD: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space estimate {estimate} exceeds the guard {guard}")]
    TooLarge { estimate: u64, guard: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOptions {
    /// Upper bound on the product of per-job branching factors.
    pub guard: u64,
    /// Keep every allocation of maximum size in [`OracleReport::maximal`].
    pub collect_maximal: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            guard: DEFAULT_GUARD,
            collect_maximal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub max_jobs: u32,
    /// Leximin-greatest sorted count vector among allocations of size
    /// `max_jobs`.
    pub best_fairness: FairnessVector,
    /// Cheapest allocation of size `max_jobs` with counts `best_fairness`.
    pub min_fair_cost: u64,
    pub min_fair_witness: Allocation,
    /// Cheapest allocation of size `max_jobs`.
    pub min_cost: u64,
    pub min_cost_witness: Allocation,
    /// Feasible allocations of size `max_jobs`.
    pub maximal_count: u64,
    /// Feasible allocations of any size, the empty one included.
    pub feasible_count: u64,
    /// Fairness vectors of the allocations of size `max_jobs`.
    pub fairness_histogram: BTreeMap<FairnessVector, u64>,
    /// Filled only when requested.
    pub maximal: Vec<Allocation>,
}

/// Product over jobs of `1 + usable bids`, saturating.
pub fn search_space(instance: &Instance) -> u64 {
    let mut usable = vec![0u64; instance.jobs().len()];
    for company in instance.companies() {
        for (job, t, _) in company.bids() {
            if company.capacity_at(t) > 0 {
                usable[instance.job_position(job).expect("validated instance")] += 1;
            }
        }
    }
    usable.iter().fold(1u64, |acc, &b| acc.saturating_mul(b + 1))
}

pub fn enumerate(instance: &Instance) -> Result<OracleReport, OracleError> {
    enumerate_with(instance, &OracleOptions::default())
}

struct Choice {
    company: usize,
    period: Period,
    slot: usize,
    cost: Cost,
}

struct Search<'a> {
    choices: Vec<Vec<Choice>>,
    remaining: Vec<u32>,
    counts: Vec<u32>,
    picked: Vec<Option<usize>>,
    assigned: u32,
    cost: u64,
    collect: bool,
    instance: &'a Instance,
    best: Option<Best>,
    feasible: u64,
}

struct Best {
    jobs: u32,
    fairness: FairnessVector,
    fair_cost: u64,
    fair_witness: Vec<Option<usize>>,
    cost: u64,
    cost_witness: Vec<Option<usize>>,
    count: u64,
    histogram: BTreeMap<FairnessVector, u64>,
    all: Vec<Vec<Option<usize>>>,
}

impl Search<'_> {
    fn run(&mut self, j: usize) {
        if j == self.choices.len() {
            self.leaf();
            return;
        }
        self.picked[j] = None;
        self.run(j + 1);
        for c in 0..self.choices[j].len() {
            let (slot, company, cost) = {
                let ch = &self.choices[j][c];
                (ch.slot, ch.company, ch.cost)
            };
            if self.remaining[slot] == 0 {
                continue;
            }
            self.remaining[slot] -= 1;
            self.counts[company] += 1;
            self.assigned += 1;
            self.cost += u64::from(cost);
            self.picked[j] = Some(c);
            self.run(j + 1);
            self.picked[j] = None;
            self.cost -= u64::from(cost);
            self.assigned -= 1;
            self.counts[company] -= 1;
            self.remaining[slot] += 1;
        }
    }

    fn leaf(&mut self) {
        self.feasible += 1;
        let fairness = FairnessVector::from_counts(self.counts.iter().copied());
        match &mut self.best {
            Some(b) if b.jobs > self.assigned => {}
            Some(b) if b.jobs == self.assigned => {
                b.count += 1;
                *b.histogram.entry(fairness.clone()).or_insert(0) += 1;
                if self.cost < b.cost {
                    b.cost = self.cost;
                    b.cost_witness = self.picked.clone();
                }
                if fairness > b.fairness || (fairness == b.fairness && self.cost < b.fair_cost) {
                    b.fairness = fairness;
                    b.fair_cost = self.cost;
                    b.fair_witness = self.picked.clone();
                }
                if self.collect {
                    b.all.push(self.picked.clone());
                }
            }
            _ => {
                self.best = Some(Best {
                    jobs: self.assigned,
                    fairness: fairness.clone(),
                    fair_cost: self.cost,
                    fair_witness: self.picked.clone(),
                    cost: self.cost,
                    cost_witness: self.picked.clone(),
                    count: 1,
                    histogram: [(fairness, 1)].into_iter().collect(),
                    all: if self.collect { vec![self.picked.clone()] } else { Vec::new() },
                });
            }
        }
    }

    fn allocation(&self, picked: &[Option<usize>]) -> Allocation {
        let mut map = BTreeMap::new();
        for (j, c) in picked.iter().enumerate() {
            if let Some(c) = *c {
                let ch = &self.choices[j][c];
                map.insert(
                    self.instance.jobs()[j].id(),
                    Assignment {
                        company: self.instance.companies()[ch.company].id(),
                        period: ch.period,
                        cost: ch.cost,
                    },
                );
            }
        }
        Allocation::from_assignments(map)
    }
}

pub fn enumerate_with(instance: &Instance, options: &OracleOptions) -> Result<OracleReport, OracleError> {
    let estimate = search_space(instance);
    if estimate > options.guard {
        return Err(OracleError::TooLarge {
            estimate,
            guard: options.guard,
        });
    }
    let mut slots: BTreeMap<(usize, Period), usize> = BTreeMap::new();
    let mut remaining = Vec::new();
    let mut choices: Vec<Vec<Choice>> = (0..instance.jobs().len()).map(|_| Vec::new()).collect();
    for (k, company) in instance.companies().iter().enumerate() {
        for (job, t, cost) in company.bids() {
            let cap = company.capacity_at(t);
            if cap == 0 {
                continue;
            }
            let slot = *slots.entry((k, t)).or_insert_with(|| {
                remaining.push(cap);
                remaining.len() - 1
            });
            choices[instance.job_position(job).expect("validated instance")].push(Choice {
                company: k,
                period: t,
                slot,
                cost,
            });
        }
    }
    for list in &mut choices {
        list.sort_by_key(|c| (c.company, c.period));
    }
    let mut search = Search {
        picked: vec![None; choices.len()],
        choices,
        remaining,
        counts: vec![0; instance.companies().len()],
        assigned: 0,
        cost: 0,
        collect: options.collect_maximal,
        instance,
        best: None,
        feasible: 0,
    };
    search.run(0);
    let best = search.best.as_ref().expect("the empty allocation is always feasible");
    Ok(OracleReport {
        max_jobs: best.jobs,
        best_fairness: best.fairness.clone(),
        min_fair_cost: best.fair_cost,
        min_fair_witness: search.allocation(&best.fair_witness),
        min_cost: best.cost,
        min_cost_witness: search.allocation(&best.cost_witness),
        maximal_count: best.count,
        feasible_count: search.feasible,
        fairness_histogram: best.histogram.clone(),
        maximal: best.all.iter().map(|p| search.allocation(p)).collect(),
    })
}

/// Size limits for [`random_small_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallLimits {
    pub max_jobs: u32,
    pub max_companies: u32,
    pub max_periods: u32,
    pub max_capacity: u32,
    pub bid_probability: f64,
}

impl Default for SmallLimits {
    fn default() -> Self {
        SmallLimits {
            max_jobs: 6,
            max_companies: 4,
            max_periods: 5,
            max_capacity: 2,
            bid_probability: 0.4,
        }
    }
}

/// A random instance the oracle can exhaust: contiguous job windows, random
/// per-period capacities, random bids. Regenerates until the search space is
/// within [`DEFAULT_GUARD`].
pub fn random_small_instance(seed: u64, limits: SmallLimits) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let periods = rng.gen_range(1..=limits.max_periods);
        let job_count = rng.gen_range(0..=limits.max_jobs);
        let company_count = rng.gen_range(1..=limits.max_companies);
        let jobs: Vec<Job> = (1..=job_count)
            .map(|j| {
                let start = rng.gen_range(1..=periods);
                let end = rng.gen_range(start..=periods.min(start + 2));
                Job::new(JobId(j), start..=end)
            })
            .collect();
        let companies: Vec<Company> = (1..=company_count)
            .map(|k| {
                let mut c = Company::new(CompanyId(k));
                for t in 1..=periods {
                    let cap = rng.gen_range(0..=limits.max_capacity);
                    if cap > 0 {
                        c.set_capacity(t, cap);
                    }
                }
                for job in &jobs {
                    for &t in job.periods() {
                        if rng.gen_bool(limits.bid_probability) {
                            c.insert_bid(job.id(), t, rng.gen_range(1..=30));
                        }
                    }
                }
                c
            })
            .collect();
        let instance = Instance::new(periods, jobs, companies).expect("generated instance is valid");
        if search_space(&instance) <= DEFAULT_GUARD {
            return instance;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;
    use crate::model::{check_feasible, sorted_counts};

    #[test]
    fn example_optima() {
        let r = enumerate(&example1()).unwrap();
        assert_eq!(r.max_jobs, 5);
        assert_eq!(r.best_fairness.values(), &[1, 1, 3]);
        assert_eq!(r.min_fair_cost, 105);
        assert_eq!(r.min_fair_witness.total_cost(), 105);
        assert!(r.min_cost <= r.min_fair_cost);
        assert_eq!(r.fairness_histogram.get(&r.best_fairness), Some(&6));
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(1, vec![], vec![]).unwrap();
        let r = enumerate(&inst).unwrap();
        assert_eq!((r.max_jobs, r.min_fair_cost, r.min_cost), (0, 0, 0));
        assert!(r.best_fairness.is_empty());
        assert_eq!(r.feasible_count, 1);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let inst = example1();
        let opts = OracleOptions {
            guard: 10,
            ..Default::default()
        };
        assert!(matches!(enumerate_with(&inst, &opts), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn collected_allocations_are_distinct_and_feasible() {
        let inst = example1();
        let r = enumerate_with(
            &inst,
            &OracleOptions {
                collect_maximal: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.maximal.len() as u64, r.maximal_count);
        for (i, a) in r.maximal.iter().enumerate() {
            assert!(check_feasible(&inst, a).unwrap());
            assert_eq!(a.len(), 5);
            assert!(r.maximal[..i].iter().all(|b| b != a));
        }
        let hist_total: u64 = r.fairness_histogram.values().sum();
        assert_eq!(hist_total, r.maximal_count);
        let fair: Vec<&Allocation> = r
            .maximal
            .iter()
            .filter(|a| sorted_counts(a, &inst) == r.best_fairness)
            .collect();
        assert_eq!(fair.len(), 6);
        // the cheapest fair allocation is unique
        assert_eq!(fair.iter().filter(|a| a.total_cost() == 105).count(), 1);
        assert!(fair.iter().all(|a| a.total_cost() >= 105));
    }

    #[test]
    fn tiny_counts_by_hand() {
        // one job, two bids at one slot each: unassigned, k1, k2
        let inst = Instance::new(
            1,
            vec![Job::new(JobId(1), [1])],
            vec![
                Company::new(CompanyId(1)).with_capacity(1, 1).with_bid(JobId(1), 1, 5),
                Company::new(CompanyId(2)).with_capacity(1, 1).with_bid(JobId(1), 1, 3),
            ],
        )
        .unwrap();
        let r = enumerate(&inst).unwrap();
        assert_eq!(r.feasible_count, 3);
        assert_eq!(r.maximal_count, 2);
        assert_eq!(r.min_cost, 3);
        assert_eq!(r.best_fairness.values(), &[0, 1]);
    }

    #[test]
    fn random_instances_stay_small() {
        for seed in 0..50 {
            let inst = random_small_instance(seed, SmallLimits::default());
            assert!(inst.jobs().len() <= 6 && inst.companies().len() <= 4 && inst.periods() <= 5);
            assert!(search_space(&inst) <= DEFAULT_GUARD);
        }
        assert_eq!(
            random_small_instance(3, SmallLimits::default()),
            random_small_instance(3, SmallLimits::default())
        );
    }
}
