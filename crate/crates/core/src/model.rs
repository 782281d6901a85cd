//! Problem domain: jobs with admissible start periods, companies with
//! per-period capacities and sealed per-(job, period) bids, allocations and
//! the leximin order on sorted job counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

/// Time periods are numbered `1..=periods`.
pub type Period = u32;

/// Bid costs (compensations) are nonnegative integers.
pub type Cost = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompanyId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CompanyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance must have at least one period")]
    NoPeriods,
    #[error("job {0} has no admissible period")]
    EmptyWindow(JobId),
    #[error("job {job} admits period {period}, outside 1..={periods}")]
    PeriodOutOfRange {
        job: JobId,
        period: Period,
        periods: u32,
    },
    #[error("duplicate job id {0}")]
    DuplicateJob(JobId),
    #[error("duplicate company id {0}")]
    DuplicateCompany(CompanyId),
    #[error("company {company} declares capacity at period {period}, outside 1..={periods}")]
    CapacityOutOfRange {
        company: CompanyId,
        period: Period,
        periods: u32,
    },
    #[error("company {company} bids on unknown job {job}")]
    BidUnknownJob { company: CompanyId, job: JobId },
    #[error("company {company} bids on job {job} at period {period}, which the job does not admit")]
    BidOutsideWindow {
        company: CompanyId,
        job: JobId,
        period: Period,
    },
    #[error("allocation references unknown job {0}")]
    UnknownJob(JobId),
    #[error("allocation references unknown company {0}")]
    UnknownCompany(CompanyId),
    #[error("company {company} has no bid for job {job} at period {period}")]
    MissingBid {
        job: JobId,
        company: CompanyId,
        period: Period,
    },
    #[error("job {0} is assigned more than once")]
    JobAssignedTwice(JobId),
    #[error("fairness vectors differ in length ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    id: JobId,
    periods: Vec<Period>,
}

impl Job {
    pub fn new(id: JobId, periods: impl IntoIterator<Item = Period>) -> Self {
        let mut periods: Vec<Period> = periods.into_iter().collect();
        periods.sort_unstable();
        periods.dedup();
        Job { id, periods }
    }

    pub fn id(&self) -> JobId {
        self.id
    }

    /// Admissible start periods, ascending.
    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn admits(&self, period: Period) -> bool {
        self.periods.binary_search(&period).is_ok()
    }
}

/// A company's sealed bid: capacity per period plus a cost for every
/// (job, period) pair it is willing to serve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Company {
    id: CompanyId,
    capacity: BTreeMap<Period, u32>,
    bids: BTreeMap<(JobId, Period), Cost>,
}

impl Company {
    pub fn new(id: CompanyId) -> Self {
        Company {
            id,
            capacity: BTreeMap::new(),
            bids: BTreeMap::new(),
        }
    }

    pub fn with_capacity(mut self, period: Period, trucks: u32) -> Self {
        self.set_capacity(period, trucks);
        self
    }

    pub fn with_bid(mut self, job: JobId, period: Period, cost: Cost) -> Self {
        self.insert_bid(job, period, cost);
        self
    }

    pub fn set_capacity(&mut self, period: Period, trucks: u32) {
        self.capacity.insert(period, trucks);
    }

    /// Returns the previous cost if a bid on `(job, period)` already existed.
    pub fn insert_bid(&mut self, job: JobId, period: Period, cost: Cost) -> Option<Cost> {
        self.bids.insert((job, period), cost)
    }

    pub fn id(&self) -> CompanyId {
        self.id
    }

    /// `n_k^t`; periods without a declaration have zero capacity.
    pub fn capacity_at(&self, period: Period) -> u32 {
        self.capacity.get(&period).copied().unwrap_or(0)
    }

    /// Declared capacities keyed by period.
    pub fn capacities(&self) -> &BTreeMap<Period, u32> {
        &self.capacity
    }

    /// `N_k`, the capacity summed over all periods.
    pub fn total_capacity(&self) -> u32 {
        self.capacity.values().sum()
    }

    pub fn bid(&self, job: JobId, period: Period) -> Option<Cost> {
        self.bids.get(&(job, period)).copied()
    }

    pub fn bids(&self) -> impl Iterator<Item = (JobId, Period, Cost)> + '_ {
        self.bids.iter().map(|(&(j, t), &c)| (j, t, c))
    }

    pub fn bid_count(&self) -> usize {
        self.bids.len()
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    periods: u32,
    jobs: Vec<Job>,
    companies: Vec<Company>,
    job_index: HashMap<JobId, usize>,
    company_index: HashMap<CompanyId, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.periods == other.periods
            && self.jobs == other.jobs
            && self.companies == other.companies
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(periods: u32, jobs: Vec<Job>, companies: Vec<Company>) -> Result<Self, ModelError> {
        if periods == 0 {
            return Err(ModelError::NoPeriods);
        }
        let mut job_index = HashMap::with_capacity(jobs.len());
        for (i, job) in jobs.iter().enumerate() {
            if job.periods.is_empty() {
                return Err(ModelError::EmptyWindow(job.id));
            }
            if let Some(&p) = job.periods.iter().find(|&&p| p == 0 || p > periods) {
                return Err(ModelError::PeriodOutOfRange {
                    job: job.id,
                    period: p,
                    periods,
                });
            }
            if job_index.insert(job.id, i).is_some() {
                return Err(ModelError::DuplicateJob(job.id));
            }
        }
        let mut company_index = HashMap::with_capacity(companies.len());
        for (i, company) in companies.iter().enumerate() {
            if company_index.insert(company.id, i).is_some() {
                return Err(ModelError::DuplicateCompany(company.id));
            }
            if let Some(&p) = company.capacity.keys().find(|&&p| p == 0 || p > periods) {
                return Err(ModelError::CapacityOutOfRange {
                    company: company.id,
                    period: p,
                    periods,
                });
            }
            for (job, period, _) in company.bids() {
                let Some(&j) = job_index.get(&job) else {
                    return Err(ModelError::BidUnknownJob {
                        company: company.id,
                        job,
                    });
                };
                if !jobs[j].admits(period) {
                    return Err(ModelError::BidOutsideWindow {
                        company: company.id,
                        job,
                        period,
                    });
                }
            }
        }
        Ok(Instance {
            periods,
            jobs,
            companies,
            job_index,
            company_index,
        })
    }

    pub fn periods(&self) -> u32 {
        self.periods
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn companies(&self) -> &[Company] {
        &self.companies
    }

    pub fn job_position(&self, id: JobId) -> Option<usize> {
        self.job_index.get(&id).copied()
    }

    pub fn company_position(&self, id: CompanyId) -> Option<usize> {
        self.company_index.get(&id).copied()
    }

    pub fn company(&self, id: CompanyId) -> Option<&Company> {
        self.company_position(id).map(|i| &self.companies[i])
    }

    pub fn bid_count(&self) -> usize {
        self.companies.iter().map(Company::bid_count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub company: CompanyId,
    pub period: Period,
    pub cost: Cost,
}

/// A (possibly partial) assignment of jobs to (company, period) slots.
///
/// Unassigned jobs are allowed; maximality is the solvers' business. Each job
/// appears at most once by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation {
    assignments: BTreeMap<JobId, Assignment>,
}

impl Allocation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds an allocation from raw assignments, costs included. No
    /// validation happens here; see [`check_feasible`].
    pub fn from_assignments(assignments: BTreeMap<JobId, Assignment>) -> Self {
        Allocation { assignments }
    }

    /// Builds an allocation from `(job, company, period)` choices, pricing
    /// each with the company's bid.
    pub fn from_choices(
        instance: &Instance,
        choices: impl IntoIterator<Item = (JobId, CompanyId, Period)>,
    ) -> Result<Self, ModelError> {
        let mut assignments = BTreeMap::new();
        for (job, company, period) in choices {
            if instance.job_position(job).is_none() {
                return Err(ModelError::UnknownJob(job));
            }
            let bidder = instance
                .company(company)
                .ok_or(ModelError::UnknownCompany(company))?;
            let cost = bidder.bid(job, period).ok_or(ModelError::MissingBid {
                job,
                company,
                period,
            })?;
            let prev = assignments.insert(
                job,
                Assignment {
                    company,
                    period,
                    cost,
                },
            );
            if prev.is_some() {
                return Err(ModelError::JobAssignedTwice(job));
            }
        }
        Ok(Allocation { assignments })
    }

    pub fn assignments(&self) -> &BTreeMap<JobId, Assignment> {
        &self.assignments
    }

    pub fn get(&self, job: JobId) -> Option<&Assignment> {
        self.assignments.get(&job)
    }

    /// `Z`, the number of assigned jobs.
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn total_cost(&self) -> u64 {
        self.assignments.values().map(|a| u64::from(a.cost)).sum()
    }

    /// Jobs per company; companies without jobs are absent.
    pub fn counts(&self) -> BTreeMap<CompanyId, u32> {
        let mut counts = BTreeMap::new();
        for a in self.assignments.values() {
            *counts.entry(a.company).or_insert(0) += 1;
        }
        counts
    }
}

/// Per-company job counts sorted nondecreasingly. Greater in the leximin
/// order means fairer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FairnessVector(Vec<u32>);

impl FairnessVector {
    pub fn from_counts(counts: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = counts.into_iter().collect();
        v.sort_unstable();
        FairnessVector(v)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| u64::from(x)).sum()
    }

    pub fn min_value(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_value(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn leximin_cmp(&self, other: &FairnessVector) -> Result<Ordering, ModelError> {
        leximin_compare(self, other)
    }
}

impl fmt::Display for FairnessVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Lexicographic comparison of two sorted count vectors: the first index at
/// which they differ decides, and the larger entry there is the fairer one.
pub fn leximin_compare(a: &FairnessVector, b: &FairnessVector) -> Result<Ordering, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.0.cmp(&b.0))
}

/// Sorted job counts over every company of `instance`, zeros included.
pub fn sorted_counts(alloc: &Allocation, instance: &Instance) -> FairnessVector {
    let mut counts = vec![0u32; instance.companies().len()];
    for a in alloc.assignments.values() {
        if let Some(k) = instance.company_position(a.company) {
            counts[k] += 1;
        }
    }
    FairnessVector::from_counts(counts)
}

/// Whether `alloc` respects the capacity of every (company, period) slot and
/// every assignment is backed by a matching bid. Unknown ids are an error
/// rather than infeasibility.
pub fn check_feasible(instance: &Instance, alloc: &Allocation) -> Result<bool, ModelError> {
    for (&job, a) in &alloc.assignments {
        if instance.job_position(job).is_none() {
            return Err(ModelError::UnknownJob(job));
        }
        if instance.company_position(a.company).is_none() {
            return Err(ModelError::UnknownCompany(a.company));
        }
    }
    let mut used: HashMap<(CompanyId, Period), u32> = HashMap::new();
    for (&job, a) in &alloc.assignments {
        let company = instance.company(a.company).expect("checked above");
        if company.bid(job, a.period) != Some(a.cost) {
            return Ok(false);
        }
        let slot = used.entry((a.company, a.period)).or_insert(0);
        *slot += 1;
        if *slot > company.capacity_at(a.period) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    fn fv(v: &[u32]) -> FairnessVector {
        FairnessVector::from_counts(v.iter().copied())
    }

    fn choices(list: &[(u32, u32, u32)]) -> Vec<(JobId, CompanyId, Period)> {
        list.iter()
            .map(|&(j, k, t)| (JobId(j), CompanyId(k), t))
            .collect()
    }

    // (job, company, period) triples for allocations of the five-job worked
    // example.
    const PI1: [(u32, u32, u32); 5] = [(1, 2, 1), (2, 2, 2), (3, 3, 3), (4, 3, 4), (5, 3, 5)];
    const PI4: [(u32, u32, u32); 5] = [(1, 1, 1), (2, 2, 2), (3, 3, 3), (4, 3, 4), (5, 3, 5)];
    const PI5: [(u32, u32, u32); 5] = [(1, 1, 1), (3, 2, 2), (2, 3, 2), (4, 3, 4), (5, 3, 5)];

    #[test]
    fn pi5_is_feasible_and_costs_105() {
        let inst = example1();
        let alloc = Allocation::from_choices(&inst, choices(&PI5)).unwrap();
        assert!(check_feasible(&inst, &alloc).unwrap());
        assert_eq!(alloc.total_cost(), 105);
    }

    #[test]
    fn pi4_costs_125() {
        let inst = example1();
        let alloc = Allocation::from_choices(&inst, choices(&PI4)).unwrap();
        assert!(check_feasible(&inst, &alloc).unwrap());
        assert_eq!(alloc.total_cost(), 125);
        assert_eq!(sorted_counts(&alloc, &inst), fv(&[1, 1, 3]));
    }

    #[test]
    fn pi1_counts() {
        let inst = example1();
        let alloc = Allocation::from_choices(&inst, choices(&PI1)).unwrap();
        assert_eq!(sorted_counts(&alloc, &inst), fv(&[0, 2, 3]));
    }

    #[test]
    fn empty_allocation_is_feasible() {
        let inst = example1();
        let alloc = Allocation::empty();
        assert!(check_feasible(&inst, &alloc).unwrap());
        assert_eq!(sorted_counts(&alloc, &inst), fv(&[0, 0, 0]));
    }

    #[test]
    fn capacity_violation_is_infeasible() {
        // j2 and j3 both to k3 at t2 where n = 1.
        let inst = example1();
        let alloc = Allocation::from_choices(&inst, choices(&[(2, 3, 2), (3, 3, 2)])).unwrap();
        assert!(!check_feasible(&inst, &alloc).unwrap());
    }

    #[test]
    fn unbacked_assignment_is_infeasible() {
        let inst = example1();
        let mut raw = BTreeMap::new();
        raw.insert(
            JobId(5),
            Assignment {
                company: CompanyId(1),
                period: 5,
                cost: 1,
            },
        );
        let alloc = Allocation::from_assignments(raw);
        assert!(!check_feasible(&inst, &alloc).unwrap());
    }

    #[test]
    fn wrong_cost_is_infeasible() {
        let inst = example1();
        let mut raw = BTreeMap::new();
        raw.insert(
            JobId(1),
            Assignment {
                company: CompanyId(1),
                period: 1,
                cost: 19,
            },
        );
        assert!(!check_feasible(&inst, &Allocation::from_assignments(raw)).unwrap());
    }

    #[test]
    fn unknown_references_error() {
        let inst = example1();
        let mut raw = BTreeMap::new();
        raw.insert(
            JobId(99),
            Assignment {
                company: CompanyId(1),
                period: 1,
                cost: 20,
            },
        );
        assert_eq!(
            check_feasible(&inst, &Allocation::from_assignments(raw)),
            Err(ModelError::UnknownJob(JobId(99)))
        );
        let mut raw = BTreeMap::new();
        raw.insert(
            JobId(1),
            Assignment {
                company: CompanyId(7),
                period: 1,
                cost: 20,
            },
        );
        assert_eq!(
            check_feasible(&inst, &Allocation::from_assignments(raw)),
            Err(ModelError::UnknownCompany(CompanyId(7)))
        );
    }

    #[test]
    fn from_choices_rejects_missing_bid() {
        let inst = example1();
        let err = Allocation::from_choices(&inst, choices(&[(5, 1, 5)])).unwrap_err();
        assert!(matches!(err, ModelError::MissingBid { .. }));
    }

    #[test]
    fn leximin_examples() {
        assert_eq!(
            leximin_compare(&fv(&[1, 1, 3]), &fv(&[0, 2, 3])),
            Ok(Ordering::Greater)
        );
        assert_eq!(
            leximin_compare(&fv(&[1, 1, 3]), &fv(&[1, 1, 3])),
            Ok(Ordering::Equal)
        );
        assert_eq!(
            leximin_compare(&fv(&[0, 1, 4]), &fv(&[0, 2, 3])),
            Ok(Ordering::Less)
        );
        assert_eq!(
            leximin_compare(&fv(&[1, 1]), &fv(&[1, 1, 3])),
            Err(ModelError::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn instance_validation() {
        let job = Job::new(JobId(1), [1, 2]);
        assert_eq!(
            Instance::new(0, vec![job.clone()], vec![]),
            Err(ModelError::NoPeriods)
        );
        assert_eq!(
            Instance::new(1, vec![job.clone()], vec![]),
            Err(ModelError::PeriodOutOfRange {
                job: JobId(1),
                period: 2,
                periods: 1
            })
        );
        assert_eq!(
            Instance::new(2, vec![Job::new(JobId(1), [])], vec![]),
            Err(ModelError::EmptyWindow(JobId(1)))
        );
        let k = Company::new(CompanyId(1)).with_bid(JobId(1), 3, 5);
        assert!(matches!(
            Instance::new(3, vec![job.clone()], vec![k]),
            Err(ModelError::BidOutsideWindow { .. })
        ));
        let k = Company::new(CompanyId(1)).with_bid(JobId(2), 1, 5);
        assert!(matches!(
            Instance::new(3, vec![job.clone()], vec![k]),
            Err(ModelError::BidUnknownJob { .. })
        ));
        let k = Company::new(CompanyId(1)).with_capacity(4, 1);
        assert!(matches!(
            Instance::new(3, vec![job], vec![k]),
            Err(ModelError::CapacityOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_bid_company_is_legal() {
        let inst = Instance::new(
            1,
            vec![Job::new(JobId(1), [1])],
            vec![Company::new(CompanyId(1)), Company::new(CompanyId(2))],
        )
        .unwrap();
        assert_eq!(sorted_counts(&Allocation::empty(), &inst), fv(&[0, 0]));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn vec_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
        (1usize..6).prop_flat_map(|n| {
            (
                prop::collection::vec(0u32..5, n),
                prop::collection::vec(0u32..5, n),
                prop::collection::vec(0u32..5, n),
            )
        })
    }

    proptest! {
        #[test]
        fn leximin_is_a_total_order((a, b, c) in vec_pair()) {
            let (a, b, c) = (
                FairnessVector::from_counts(a),
                FairnessVector::from_counts(b),
                FairnessVector::from_counts(c),
            );
            let ab = leximin_compare(&a, &b).unwrap();
            prop_assert_eq!(ab.reverse(), leximin_compare(&b, &a).unwrap());
            if ab == Ordering::Equal {
                prop_assert_eq!(&a, &b);
            }
            let bc = leximin_compare(&b, &c).unwrap();
            if ab != Ordering::Less && bc != Ordering::Less {
                prop_assert_ne!(leximin_compare(&a, &c).unwrap(), Ordering::Less);
            }
        }

        #[test]
        fn sorted_counts_sum_to_assignment_count(picks in prop::collection::vec((0usize..5, 0usize..3), 0..5)) {
            let inst = crate::fixtures::example1();
            let mut raw = BTreeMap::new();
            for (j, k) in picks {
                raw.insert(JobId(j as u32 + 1), Assignment { company: CompanyId(k as u32 + 1), period: 1, cost: 0 });
            }
            let alloc = Allocation::from_assignments(raw);
            let phi = sorted_counts(&alloc, &inst);
            prop_assert_eq!(phi.sum(), alloc.len() as u64);
            prop_assert!(phi.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
