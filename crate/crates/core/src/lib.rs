//! Finite-length reliability analysis of LT (fountain) codes over the
//! binary erasure channel.
//!
//! The crate has three layers:
//!
//! * **Codes and decoding** — [`ensemble`] samples random LT codes from a
//!   degree distribution and [`decoder`] runs structural peeling over an
//!   erasure pattern, computes maximal uncorrectable sets, enumerates
//!   stopping sets, and provides a Gaussian-elimination recoverability
//!   oracle.
//! * **Exact counting** — [`poly`] and [`genpoly`] implement sparse
//!   bivariate polynomials over big integers, coefficient extraction, and
//!   the configuration-counting recursion behind the ensemble-average
//!   erasure probability. Everything up to the final report is exact
//!   rational arithmetic; floats appear only at presentation time.
//! * **Evaluation** — [`analysis`] turns the counts into erased-edge
//!   distributions, ensemble-average bit erasure probabilities, and
//!   stopping-set probabilities; [`simulate`] estimates the same
//!   quantities empirically (Monte Carlo or exhaustive enumeration) and
//!   produces analytical-vs-empirical comparison records.
//!
//! ```
//! use flan_core::ensemble::{ideal_soliton, sample_code};
//! use flan_core::decoder::{peel_decode, ErasurePattern};
//!
//! let spec = ideal_soliton(8).unwrap();
//! let code = sample_code(8, 12, &spec, 42).unwrap();
//! let nothing_erased = ErasurePattern::new([], code.n()).unwrap();
//! let outcome = peel_decode(&code, &nothing_erased).unwrap();
//! assert_eq!(outcome.recovered.len() + outcome.residual.len(), 8);
//! ```

pub mod analysis;
pub mod decoder;
pub mod ensemble;
pub mod error;
pub mod genpoly;
pub mod poly;
pub mod rational;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use rational::Rational;
