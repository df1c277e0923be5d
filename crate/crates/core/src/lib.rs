//! Exact and randomized tools for 3-uniform set systems: storage and parsing,
//! canonical forms, forbidden-pattern detection, optimal 3-partitions,
//! isomorph-free enumeration, exact formula checks and seeded experiments.

pub mod cache;
pub mod canon;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod formulas;
pub mod partition;
pub mod patterns;
pub mod randlab;
pub mod report;
pub mod system;

pub use canon::{canonical_form, is_isomorphic, CanonicalForm};
pub use enumerate::{brute_force_count, extremal_number, generate_isofree, Predicate, SystemPredicate};
pub use error::{Error, Result};
pub use partition::{optimal_partition, Partition3};
pub use report::RunReport;
pub use system::{Triple, TripleSystem};
