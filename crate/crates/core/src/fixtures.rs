//! Bundled instances.

use crate::format::parse_instance;
use crate::model::Instance;

/// Text of the five-job, three-company worked example (`fixtures/example1.txt`).
pub const EXAMPLE1: &str = include_str!("../../../fixtures/example1.txt");

/// The worked example: five jobs, three companies, unit capacity in each
/// period a company bids in, giving company totals `N = (1, 2, 5)`.
pub fn example1() -> Instance {
    parse_instance(EXAMPLE1).expect("bundled fixture parses")
}
