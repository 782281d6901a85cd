//! Reference computations used to validate fairalloc.
//!
//! [`brute`] answers flow questions by exhaustive search on tiny networks;
//! instance-level ground truth lives in [`fairalloc::oracle`].

pub mod brute;
