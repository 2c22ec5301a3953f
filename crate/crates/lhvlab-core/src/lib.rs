//! Decision toolkit for nonclassical correlations of finite-dimensional
//! bipartite states under fixed, finite measurement scenarios.
//!
//! Two questions are decided with explicit certificates either way:
//!
//! * **Locality**: does a joint correlation tensor admit a mixture of
//!   deterministic strategy pairs? ([`bell::decide_bell_local`]) The local
//!   verdict carries the mixture; the nonlocal verdict carries a separating
//!   functional whose deterministic bound is verified by exhaustive sweep.
//! * **Steerability**: do the conditional states left on the trusted party
//!   admit a local hidden state model? ([`steering::decide_unsteerable`])
//!   The unsteerable verdict carries the model; the steerable verdict
//!   carries a functional with an exactly computed model bound.
//!
//! Supporting layers: dense complex linear algebra sized for small factors
//! ([`linalg`]), the quantum data model ([`quantum`]), deterministic strategy
//! enumeration ([`strategies`]), constructive steering criteria for pure
//! states ([`steering`]), and a JSON scene runner ([`scene`]) behind the
//! `lhvlab` command line tool.

pub mod bell;
pub mod error;
pub mod linalg;
pub mod quantum;
pub mod scene;
pub mod steering;
pub mod strategies;

pub use error::{Error, Result};
