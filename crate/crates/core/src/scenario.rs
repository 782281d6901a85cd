//! Seeded random instances for the six competition/cost scenarios.
//!
//! Jobs get an earliest start `s` (period 2 or 6 with probability 1/4 each,
//! otherwise uniform over all starts that leave a full window) and admit the
//! `window` periods from `s`. Each company bids on a job with its
//! competition probability, at every admissible period, each bid with its
//! own uniformly drawn integer cost. A company's capacity at a period is a
//! uniform fraction in `[0, capacity_pct / 100]` of its bids at that period.
//!
//! Companies are split by position: in mixed competition the first half
//! (`k < companies / 2`) bids with low probability, the rest with high. With
//! heterogeneous costs the first half is cheap in the low and high
//! scenarios; in the mixed scenario the high-competition half is cheap.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Company, CompanyId, Cost, Instance, Job, JobId, Period};

pub const LOW_BID_PROBABILITY: f64 = 0.25;
pub const HIGH_BID_PROBABILITY: f64 = 0.75;
pub const HOMOGENEOUS_COSTS: (Cost, Cost) = (30, 60);
pub const CHEAP_COSTS: (Cost, Cost) = (30, 50);
pub const DEAR_COSTS: (Cost, Cost) = (40, 60);
/// Periods drawn as earliest start with extra probability mass.
pub const PEAK_STARTS: [Period; 2] = [2, 6];
pub const PEAK_PROBABILITY: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Competition {
    Low,
    High,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostModel {
    Homogeneous,
    Heterogeneous,
}

/// Whether a company flips one coin per job or one per (job, period).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum BidGranularity {
    #[default]
    PerJob,
    PerJobPeriod,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CapacityRounding {
    #[default]
    Nearest,
    Floor,
}

/// A competition regime and cost model, e.g. `high-het` or `mix-hom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub competition: Competition,
    pub costs: CostModel,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::new(Competition::Low, CostModel::Homogeneous),
        Scenario::new(Competition::Low, CostModel::Heterogeneous),
        Scenario::new(Competition::High, CostModel::Homogeneous),
        Scenario::new(Competition::High, CostModel::Heterogeneous),
        Scenario::new(Competition::Mixed, CostModel::Homogeneous),
        Scenario::new(Competition::Mixed, CostModel::Heterogeneous),
    ];

    pub const fn new(competition: Competition, costs: CostModel) -> Self {
        Scenario { competition, costs }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.competition {
            Competition::Low => "low",
            Competition::High => "high",
            Competition::Mixed => "mix",
        };
        let k = match self.costs {
            CostModel::Homogeneous => "hom",
            CostModel::Heterogeneous => "het",
        };
        write!(f, "{c}-{k}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown scenario `{0}` (expected low|high|mix followed by hom|het, e.g. high-het)")]
pub struct ScenarioParseError(pub String);

impl FromStr for Scenario {
    type Err = ScenarioParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let mut parts = lower.split(['-', '/', '_']);
        let (Some(c), Some(k), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ScenarioParseError(s.to_string()));
        };
        let competition = match c {
            "low" => Competition::Low,
            "high" => Competition::High,
            "mix" | "mixed" => Competition::Mixed,
            _ => return Err(ScenarioParseError(s.to_string())),
        };
        let costs = match k {
            "hom" | "homogeneous" => CostModel::Homogeneous,
            "het" | "heterogeneous" => CostModel::Heterogeneous,
            _ => return Err(ScenarioParseError(s.to_string())),
        };
        Ok(Scenario { competition, costs })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub capacity_pct: u32,
    pub jobs: u32,
    pub companies: u32,
    pub periods: u32,
    pub window: u32,
    pub seed: u64,
    pub bidding: BidGranularity,
    pub rounding: CapacityRounding,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("window {window} longer than {periods} periods")]
    WindowTooLong { window: u32, periods: u32 },
    #[error("capacity percentage {0} outside 1..=100")]
    CapacityPct(u32),
}

impl ScenarioConfig {
    /// 250 jobs, 50 companies, 10 periods, windows of 3.
    pub fn new(scenario: Scenario, capacity_pct: u32, seed: u64) -> Self {
        ScenarioConfig {
            scenario,
            capacity_pct,
            jobs: 250,
            companies: 50,
            periods: 10,
            window: 3,
            seed,
            bidding: BidGranularity::default(),
            rounding: CapacityRounding::default(),
        }
    }

    pub fn with_jobs(mut self, jobs: u32) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("jobs", self.jobs),
            ("companies", self.companies),
            ("periods", self.periods),
            ("window", self.window),
        ] {
            if v == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.window > self.periods {
            return Err(ConfigError::WindowTooLong {
                window: self.window,
                periods: self.periods,
            });
        }
        if !(1..=100).contains(&self.capacity_pct) {
            return Err(ConfigError::CapacityPct(self.capacity_pct));
        }
        Ok(())
    }

    /// `key value` lines describing the configuration.
    pub fn describe(&self) -> Vec<String> {
        vec![
            format!("scenario {}", self.scenario),
            format!("capacity_pct {}", self.capacity_pct),
            format!("jobs {}", self.jobs),
            format!("companies {}", self.companies),
            format!("periods {}", self.periods),
            format!("window {}", self.window),
            format!("seed {}", self.seed),
            format!(
                "bidding {}",
                match self.bidding {
                    BidGranularity::PerJob => "per-job",
                    BidGranularity::PerJobPeriod => "per-job-period",
                }
            ),
            format!(
                "rounding {}",
                match self.rounding {
                    CapacityRounding::Nearest => "nearest",
                    CapacityRounding::Floor => "floor",
                }
            ),
        ]
    }

    /// Bid probability of the company at position `k`.
    pub fn bid_probability(&self, k: u32) -> f64 {
        match self.scenario.competition {
            Competition::Low => LOW_BID_PROBABILITY,
            Competition::High => HIGH_BID_PROBABILITY,
            Competition::Mixed if k < self.companies / 2 => LOW_BID_PROBABILITY,
            Competition::Mixed => HIGH_BID_PROBABILITY,
        }
    }

    /// Inclusive cost range of the company at position `k`.
    pub fn cost_range(&self, k: u32) -> (Cost, Cost) {
        let first_half = k < self.companies / 2;
        match (self.scenario.costs, self.scenario.competition) {
            (CostModel::Homogeneous, _) => HOMOGENEOUS_COSTS,
            (CostModel::Heterogeneous, Competition::Mixed) if first_half => DEAR_COSTS,
            (CostModel::Heterogeneous, Competition::Mixed) => CHEAP_COSTS,
            (CostModel::Heterogeneous, _) if first_half => CHEAP_COSTS,
            (CostModel::Heterogeneous, _) => DEAR_COSTS,
        }
    }

    /// Probability that a job's earliest start is `t`.
    pub fn start_probability(&self, t: Period) -> f64 {
        let last = self.periods - self.window + 1;
        if t == 0 || t > last {
            return 0.0;
        }
        let peaks = PEAK_STARTS.iter().filter(|&&p| p <= last).count() as f64;
        let uniform = (1.0 - PEAK_PROBABILITY * peaks) / f64::from(last);
        uniform + if PEAK_STARTS.contains(&t) { PEAK_PROBABILITY } else { 0.0 }
    }
}

fn draw_start(rng: &mut ChaCha8Rng, config: &ScenarioConfig) -> Period {
    let last = config.periods - config.window + 1;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &p in PEAK_STARTS.iter().filter(|&&p| p <= last) {
        acc += PEAK_PROBABILITY;
        if u < acc {
            return p;
        }
    }
    rng.gen_range(1..=last)
}

/// Deterministic instance for `config`.
///
/// # Panics
/// If `config` fails [`ScenarioConfig::validate`].
pub fn generate(config: &ScenarioConfig) -> Instance {
    if let Err(e) = config.validate() {
        panic!("invalid scenario configuration: {e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let jobs: Vec<Job> = (1..=config.jobs)
        .map(|j| {
            let s = draw_start(&mut rng, config);
            Job::new(JobId(j), s..s + config.window)
        })
        .collect();

    let mut companies = Vec::with_capacity(config.companies as usize);
    for k in 0..config.companies {
        let p = config.bid_probability(k);
        let (lo, hi) = config.cost_range(k);
        let mut company = Company::new(CompanyId(k + 1));
        let mut per_period = vec![0u32; config.periods as usize + 1];
        for job in &jobs {
            let job_coin = config.bidding == BidGranularity::PerJob && rng.gen_bool(p);
            for &t in job.periods() {
                let bids = match config.bidding {
                    BidGranularity::PerJob => job_coin,
                    BidGranularity::PerJobPeriod => rng.gen_bool(p),
                };
                if bids {
                    company.insert_bid(job.id(), t, rng.gen_range(lo..=hi));
                    per_period[t as usize] += 1;
                }
            }
        }
        let top = f64::from(config.capacity_pct) / 100.0;
        for t in 1..=config.periods {
            let u = rng.gen_range(0.0..=top);
            let raw = u * f64::from(per_period[t as usize]);
            let cap = match config.rounding {
                CapacityRounding::Nearest => raw.round(),
                CapacityRounding::Floor => raw.floor(),
            } as u32;
            if cap > 0 {
                company.set_capacity(t, cap);
            }
        }
        companies.push(company);
    }
    Instance::new(config.periods, jobs, companies).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::write_instance;

    fn cfg(name: &str, pct: u32, seed: u64) -> ScenarioConfig {
        ScenarioConfig::new(name.parse().unwrap(), pct, seed)
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!("Mixed/Het".parse::<Scenario>().unwrap().to_string(), "mix-het");
        assert!("medium-hom".parse::<Scenario>().is_err());
        assert!("high".parse::<Scenario>().is_err());
    }

    #[test]
    fn same_seed_same_bytes() {
        let c = cfg("mix-het", 10, 42);
        assert_eq!(write_instance(&generate(&c)), write_instance(&generate(&c)));
        assert_ne!(
            write_instance(&generate(&c)),
            write_instance(&generate(&c.clone().with_seed(43)))
        );
    }

    #[test]
    fn bids_stay_inside_windows_and_ranges() {
        for s in Scenario::ALL {
            let c = ScenarioConfig::new(s, 10, 7).with_jobs(60);
            let inst = generate(&c);
            for (k, company) in inst.companies().iter().enumerate() {
                let (lo, hi) = c.cost_range(k as u32);
                for (job, t, cost) in company.bids() {
                    let pos = inst.job_position(job).unwrap();
                    assert!(inst.jobs()[pos].admits(t));
                    assert!((lo..=hi).contains(&cost));
                }
            }
            for job in inst.jobs() {
                assert_eq!(job.periods().len(), 3);
                assert!(*job.periods().last().unwrap() <= 10);
            }
        }
    }

    #[test]
    fn per_job_bidding_covers_every_period() {
        let inst = generate(&cfg("low-hom", 10, 3).with_jobs(80));
        for company in inst.companies() {
            for job in inst.jobs() {
                let n = job.periods().iter().filter(|&&t| company.bid(job.id(), t).is_some()).count();
                assert!(n == 0 || n == job.periods().len());
            }
        }
    }

    #[test]
    fn low_competition_bid_rate() {
        // 50 companies x 200 jobs = 10,000 coin flips
        let c = cfg("low-hom", 10, 11).with_jobs(200);
        let inst = generate(&c);
        let bidding: usize = inst
            .companies()
            .iter()
            .map(|k| inst.jobs().iter().filter(|j| k.bid(j.id(), j.periods()[0]).is_some()).count())
            .sum();
        let rate = bidding as f64 / 10_000.0;
        assert!((rate - 0.25).abs() <= 0.015, "rate {rate}");
    }

    #[test]
    fn start_time_masses() {
        let c = cfg("high-hom", 10, 5).with_jobs(10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut hist = [0u32; 11];
        for _ in 0..10_000 {
            hist[draw_start(&mut rng, &c) as usize] += 1;
        }
        for t in 1..=10u32 {
            let p = hist[t as usize] as f64 / 10_000.0;
            let expected = c.start_probability(t);
            assert!((p - expected).abs() <= 0.02, "t{t}: {p} vs {expected}");
        }
        assert!((c.start_probability(2) - 0.3125).abs() < 1e-12);
        assert!((c.start_probability(5) - 0.0625).abs() < 1e-12);
        assert_eq!(c.start_probability(9), 0.0);
    }

    #[test]
    fn mixed_split_by_position() {
        let c = cfg("mix-het", 5, 1);
        assert_eq!(c.bid_probability(0), LOW_BID_PROBABILITY);
        assert_eq!(c.bid_probability(24), LOW_BID_PROBABILITY);
        assert_eq!(c.bid_probability(25), HIGH_BID_PROBABILITY);
        assert_eq!(c.cost_range(0), DEAR_COSTS);
        assert_eq!(c.cost_range(49), CHEAP_COSTS);
        let c = cfg("low-het", 5, 1);
        assert_eq!(c.cost_range(0), CHEAP_COSTS);
        assert_eq!(c.cost_range(49), DEAR_COSTS);
    }

    #[test]
    fn capacities_bounded_by_share_of_bids() {
        for rounding in [CapacityRounding::Nearest, CapacityRounding::Floor] {
            let mut c = cfg("high-hom", 10, 8);
            c.rounding = rounding;
            let inst = generate(&c);
            for company in inst.companies() {
                for t in 1..=10 {
                    let bids = company.bids().filter(|&(_, p, _)| p == t).count() as f64;
                    let cap = f64::from(company.capacity_at(t));
                    assert!(cap <= (0.1 * bids).round());
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg("low-hom", 5, 0);
        assert!(c.validate().is_ok());
        c.window = 11;
        assert!(c.validate().is_err());
        c.window = 3;
        c.capacity_pct = 0;
        assert!(c.validate().is_err());
        c.capacity_pct = 5;
        c.jobs = 0;
        assert_eq!(c.validate(), Err(ConfigError::NotPositive("jobs")));
    }
}
