//! Exact tools for sign-representation and rational approximation of
//! Boolean functions: threshold degree and density, certified brackets
//! for `R⁺(f, d)`, and the random hard-halfspace construction.

pub mod boolfn;
pub mod exactlp;
pub mod fourier;
pub mod hardhs;
pub mod par;
pub mod rapprox;
pub mod signrep;
