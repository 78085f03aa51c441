//! Exact truncated q-series arithmetic, eta quotients, theta functions and
//! dissection operators, plus a harness that checks the congruence families
//! for `(l,k)`- and `(l,k,r)`-regular partitions against series computed
//! mod small moduli and against brute-force partition counts.

pub mod congruences;
pub mod eta;
pub mod newman;
pub mod partitions;
pub mod qseries;
pub mod report;
pub mod theta;

pub use eta::EtaQuotient;
pub use qseries::{eta_series, pochhammer_series, Coefficient, QSeries, Ring, SeriesError};
pub use report::{Failure, Status, VerificationReport};
