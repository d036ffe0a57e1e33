//! Certification and refutation of k-block-positivity through the
//! symmetry-reduced Bose-extension hierarchy on rectangular Young diagrams,
//! together with exact SDP-size formulas and brute-force tensor oracles.

pub mod complexity;
pub mod error;
pub mod linalg;
pub mod partitions;
pub mod permutation;
pub mod reduced_sdp;
pub mod symfun;
pub mod tensor_lab;
pub mod witness_search;

pub use error::{Error, Result};
pub use partitions::{Cell, Partition};
