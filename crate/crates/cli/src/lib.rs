//! Library side of the `regpart` command: the check suite, coefficient
//! lookup and the structured report format.

pub mod coeff;
pub mod document;
pub mod suite;
