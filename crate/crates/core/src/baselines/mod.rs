//! Reference algorithms: assignment rounding, iterated tour partitioning,
//! and the exact oracle.

pub mod assignment;
pub mod exact;
pub mod itp;

pub use assignment::{assignment_function, BipartiteWeights};
pub use exact::{exact_cvrp, exact_cvrp_capped, EXACT_CAP};
pub use itp::{itp_bound, itp_solve, itp_unsplittable, ItpOutcome};
