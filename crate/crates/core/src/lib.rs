//! Fair, minimum-cost allocation of time-windowed jobs to bidding companies.
//!
//! The pipeline first finds the maximum number of assignable jobs together
//! with the max-lexmin distribution of that number over companies
//! ([`mlmf`]), then the cheapest allocation realising exactly that
//! distribution ([`mfmca`]). Both stages are network-flow computations on
//! the layered network built in [`mlmf::build_mlmf_network`].

pub mod experiments;
pub mod fixtures;
pub mod flow;
pub mod format;
pub mod mlmf;
pub mod model;
pub mod mfmca;
pub mod oracle;
pub mod scenario;
