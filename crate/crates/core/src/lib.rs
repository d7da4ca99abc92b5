//! Strong-interference regimes, joint-decoding rate regions and numeric
//! verification of mutual-information inequalities for K-user interference
//! channels.

pub(crate) mod lp;
pub mod measures;
pub mod model;
pub mod regimes;
pub mod regions;
pub mod verifier;
pub mod cli;
