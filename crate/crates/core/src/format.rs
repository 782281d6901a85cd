//! Line-oriented text formats for instances and allocations.
//!
//! Instance grammar (one directive per line, `#` starts a comment line):
//!
//! ```text
//! periods <T>                       exactly once
//! job <id> <period> [<period> ...]  admissible start periods
//! company <id>                      opens a company block
//! cap <period> <n>                  capacity of the open company
//! bid <job-id> <period> <cost>      bid of the open company
//! ```
//!
//! Allocation output:
//!
//! ```text
//! assign <job> <company> <period> <cost>
//! total_cost <sum>
//! fairness_vector <v1> <v2> ...
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{
    Allocation, Assignment, Company, CompanyId, FairnessVector, Instance, Job, JobId, ModelError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(line: usize, what: &str, token: Option<&str>) -> Result<T, ParseError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} `{token}`")))
}

fn no_trailing<'a>(line: usize, mut rest: impl Iterator<Item = &'a str>) -> Result<(), ParseError> {
    match rest.next() {
        Some(extra) => Err(syntax(line, format!("unexpected token `{extra}`"))),
        None => Ok(()),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut periods: Option<u32> = None;
    let mut jobs: Vec<Job> = Vec::new();
    let mut companies: Vec<Company> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let keyword = tokens.next().expect("nonempty line");
        match keyword {
            "periods" => {
                if periods.is_some() {
                    return Err(syntax(line, "`periods` given twice"));
                }
                periods = Some(number(line, "period count", tokens.next())?);
                no_trailing(line, tokens)?;
            }
            "job" => {
                let id = JobId(number(line, "job id", tokens.next())?);
                let window = tokens
                    .map(|t| number(line, "period", Some(t)))
                    .collect::<Result<Vec<u32>, _>>()?;
                if window.is_empty() {
                    return Err(syntax(line, format!("job {id} lists no period")));
                }
                jobs.push(Job::new(id, window));
            }
            "company" => {
                let id = CompanyId(number(line, "company id", tokens.next())?);
                no_trailing(line, tokens)?;
                companies.push(Company::new(id));
            }
            "cap" => {
                let company = companies
                    .last_mut()
                    .ok_or_else(|| syntax(line, "`cap` outside a company block"))?;
                let period: u32 = number(line, "period", tokens.next())?;
                let trucks: u32 = number(line, "capacity", tokens.next())?;
                no_trailing(line, tokens)?;
                if company.capacities().contains_key(&period) {
                    return Err(syntax(
                        line,
                        format!("duplicate capacity for company {} at period {period}", company.id()),
                    ));
                }
                company.set_capacity(period, trucks);
            }
            "bid" => {
                let company = companies
                    .last_mut()
                    .ok_or_else(|| syntax(line, "`bid` outside a company block"))?;
                let job = JobId(number(line, "job id", tokens.next())?);
                let period: u32 = number(line, "period", tokens.next())?;
                let cost: u32 = number(line, "cost", tokens.next())?;
                no_trailing(line, tokens)?;
                if company.insert_bid(job, period, cost).is_some() {
                    return Err(syntax(
                        line,
                        format!(
                            "duplicate bid by company {} on job {job} at period {period}",
                            company.id()
                        ),
                    ));
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let periods = periods.ok_or_else(|| syntax(0, "missing `periods` line"))?;
    Ok(Instance::new(periods, jobs, companies)?)
}

/// Canonical text of `instance`; [`parse_instance`] reads it back unchanged.
pub fn write_instance(instance: &Instance) -> String {
    write_instance_with_header(instance, &[])
}

/// Like [`write_instance`], prefixed by `# `-comment lines.
pub fn write_instance_with_header(instance: &Instance, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let _ = writeln!(out, "periods {}", instance.periods());
    for job in instance.jobs() {
        let _ = write!(out, "job {}", job.id());
        for p in job.periods() {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
    }
    for company in instance.companies() {
        let _ = writeln!(out, "company {}", company.id());
        for (period, trucks) in company.capacities() {
            let _ = writeln!(out, "cap {period} {trucks}");
        }
        for (job, period, cost) in company.bids() {
            let _ = writeln!(out, "bid {job} {period} {cost}");
        }
    }
    out
}

pub fn write_allocation(alloc: &Allocation, fairness: &FairnessVector) -> String {
    let mut out = String::new();
    for (job, a) in alloc.assignments() {
        let _ = writeln!(out, "assign {job} {} {} {}", a.company, a.period, a.cost);
    }
    let _ = writeln!(out, "total_cost {}", alloc.total_cost());
    let _ = writeln!(out, "fairness_vector {fairness}");
    out
}

/// Reads the `assign` lines of an allocation; summary lines are checked for
/// syntax only.
pub fn parse_allocation(text: &str) -> Result<Allocation, ParseError> {
    let mut assignments = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match tokens.next().expect("nonempty line") {
            "assign" => {
                let job = JobId(number(line, "job id", tokens.next())?);
                let company = CompanyId(number(line, "company id", tokens.next())?);
                let period = number(line, "period", tokens.next())?;
                let cost = number(line, "cost", tokens.next())?;
                no_trailing(line, tokens)?;
                let prev = assignments.insert(
                    job,
                    Assignment {
                        company,
                        period,
                        cost,
                    },
                );
                if prev.is_some() {
                    return Err(ParseError::Invalid(ModelError::JobAssignedTwice(job)));
                }
            }
            "total_cost" => {
                let _: u64 = number(line, "total cost", tokens.next())?;
                no_trailing(line, tokens)?;
            }
            "fairness_vector" => {
                for t in tokens {
                    let _: u32 = number(line, "count", Some(t))?;
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(Allocation::from_assignments(assignments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, EXAMPLE1};

    #[test]
    fn example_fixture_shape() {
        let inst = example1();
        assert_eq!(inst.periods(), 5);
        assert_eq!(inst.jobs().len(), 5);
        assert_eq!(inst.companies().len(), 3);
        let totals: Vec<u32> = inst.companies().iter().map(|k| k.total_capacity()).collect();
        assert_eq!(totals, vec![1, 2, 5]);
        assert_eq!(inst.bid_count(), 12);
        assert_eq!(inst.company(CompanyId(3)).unwrap().bid(JobId(2), 4), Some(30));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let inst = example1();
        let text = write_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_ne!(text, EXAMPLE1);
    }

    #[test]
    fn rejects_duplicate_bid() {
        let text = "periods 1\njob 1 1\ncompany 1\ncap 1 1\nbid 1 1 5\nbid 1 1 6\n";
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 6, .. }), "{err}");
    }

    #[test]
    fn same_bid_on_two_companies_is_fine() {
        let text = "periods 1\njob 1 1\ncompany 1\nbid 1 1 5\ncompany 2\nbid 1 1 5\n";
        assert!(parse_instance(text).is_ok());
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in [
            "job 1 1\n",
            "periods 1\nperiods 2\n",
            "periods x\n",
            "periods 1\njob 1\n",
            "periods 1\ncap 1 1\n",
            "periods 1\njob 1 1\ncompany 1\nbid 1 1\n",
            "periods 1\nfoo\n",
            "periods 1 2\n",
            "periods 1\njob 1 1\ncompany 1\ncap 1 1\ncap 1 2\n",
        ] {
            assert!(parse_instance(text).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn validation_errors_surface() {
        let text = "periods 2\njob 1 1\ncompany 1\nbid 1 2 5\n";
        assert!(matches!(
            parse_instance(text),
            Err(ParseError::Invalid(ModelError::BidOutsideWindow { .. }))
        ));
    }

    #[test]
    fn allocation_text_round_trip() {
        let inst = example1();
        let alloc = Allocation::from_choices(
            &inst,
            [
                (JobId(1), CompanyId(1), 1),
                (JobId(3), CompanyId(2), 2),
                (JobId(2), CompanyId(3), 2),
            ],
        )
        .unwrap();
        let phi = crate::model::sorted_counts(&alloc, &inst);
        let text = write_allocation(&alloc, &phi);
        assert!(text.ends_with("total_cost 65\nfairness_vector 1 1 1\n"));
        assert_eq!(parse_allocation(&text).unwrap(), alloc);
    }
}
