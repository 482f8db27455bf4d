//! Phase-space entropies of continuous-variable quantum states.
//!
//! The crate evaluates Husimi Q-distributions for Fock states, Fock mixtures,
//! thermal states, Gaussian states and N00N states, integrates them with a
//! deterministic quadrature engine, and derives Wehrl entropies, entropic
//! uncertainty relations and the Wehrl mutual information.
//!
//! ```
//! use wehrl::{entropies, state::StateSpec, quadrature::QuadratureSpec};
//!
//! let s = entropies::wehrl_entropy(&StateSpec::Fock { n: 1 }, &QuadratureSpec::default()).unwrap();
//! assert!((s.value - 1.0 - wehrl::special::EULER_GAMMA).abs() < 1e-8);
//! ```

pub mod entropies;
pub mod error;
pub mod eur;
pub mod gaussian;
pub mod husimi;
pub mod quadrature;
pub mod special;
pub mod state;

pub use error::{Error, Result};
pub use husimi::HusimiEvaluator;
pub use quadrature::{IntegralResult, QuadratureSpec, Strategy};
pub use state::{validate, ModePartition, StateSpec, Subsystem, ValidatedState};
