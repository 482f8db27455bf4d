//! State families accepted by the toolkit and their validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceModel;

/// Tolerance on the total weight of a Fock mixture.
pub const MIXTURE_SUM_TOL: f64 = 1e-12;

/// Number of modes in subsystems A and B. Monopartite states carry `n_b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModePartition {
    pub n_a: usize,
    pub n_b: usize,
}

impl ModePartition {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self { n_a, n_b })
    }

    pub const fn single_mode() -> Self {
        Self { n_a: 1, n_b: 0 }
    }

    pub const fn one_plus_one() -> Self {
        Self { n_a: 1, n_b: 1 }
    }

    pub fn total_modes(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Length of a phase-space point, `2(N + M)`.
    pub fn phase_dim(&self) -> usize {
        2 * self.total_modes()
    }

    pub fn is_bipartite(&self) -> bool {
        self.n_b > 0
    }
}

/// One component of a Fock-state mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockWeight {
    pub n: u32,
    pub q: f64,
}

/// Which half of a bipartite system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A,
    B,
}

/// Declarative description of a state, as read from JSON.
///
/// ```json
/// {"kind": "fock", "n": 3}
/// {"kind": "fock_mixture", "weights": [{"n": 0, "q": 0.5}, {"n": 1, "q": 0.5}]}
/// {"kind": "thermal", "beta_omega": 1.0}
/// {"kind": "gaussian", "cov": [[0.5, 0.0], [0.0, 0.5]], "modes_a": 1, "modes_b": 0}
/// {"kind": "tmss", "lambda": 0.5}
/// {"kind": "noon", "excitation": 2}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Fock {
        n: u32,
    },
    FockMixture {
        weights: Vec<FockWeight>,
    },
    Thermal {
        beta_omega: f64,
    },
    /// Zero-mean Gaussian state given by its symplectic covariance matrix,
    /// rows ordered `(x_A…, p_A…, x_B…, p_B…)`.
    Gaussian {
        cov: Vec<Vec<f64>>,
        modes_a: usize,
        modes_b: usize,
    },
    #[serde(rename = "tmss")]
    TwoModeSqueezed {
        lambda: f64,
    },
    Noon {
        excitation: u32,
    },
}

impl StateSpec {
    /// The two-term mixture `q|0><0| + (1-q)|1><1|`.
    pub fn mixture01(q: f64) -> Self {
        StateSpec::FockMixture {
            weights: vec![FockWeight { n: 0, q }, FockWeight { n: 1, q: 1.0 - q }],
        }
    }
}

/// A state whose parameters passed validation. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidatedState {
    Fock(u32),
    /// `(n, weight)` pairs with distinct `n`, weights summing to one.
    FockMixture(Vec<(u32, f64)>),
    Thermal(f64),
    Gaussian(CovarianceModel),
    TwoModeSqueezed { lambda: f64, cov: CovarianceModel },
    Noon(u32),
}

impl ValidatedState {
    pub fn partition(&self) -> ModePartition {
        match self {
            ValidatedState::Fock(_) | ValidatedState::FockMixture(_) | ValidatedState::Thermal(_) => {
                ModePartition::single_mode()
            }
            ValidatedState::Gaussian(cov) => cov.partition(),
            ValidatedState::TwoModeSqueezed { .. } | ValidatedState::Noon(_) => {
                ModePartition::one_plus_one()
            }
        }
    }

    /// Back to the declarative form.
    pub fn spec(&self) -> StateSpec {
        match self {
            ValidatedState::Fock(n) => StateSpec::Fock { n: *n },
            ValidatedState::FockMixture(w) => StateSpec::FockMixture {
                weights: w.iter().map(|&(n, q)| FockWeight { n, q }).collect(),
            },
            ValidatedState::Thermal(b) => StateSpec::Thermal { beta_omega: *b },
            ValidatedState::Gaussian(cov) => {
                let p = cov.partition();
                StateSpec::Gaussian {
                    cov: cov.v_rows(),
                    modes_a: p.n_a,
                    modes_b: p.n_b,
                }
            }
            ValidatedState::TwoModeSqueezed { lambda, .. } => {
                StateSpec::TwoModeSqueezed { lambda: *lambda }
            }
            ValidatedState::Noon(n) => StateSpec::Noon { excitation: *n },
        }
    }
}

/// Checks every invariant of `spec` and resolves it into a [`ValidatedState`].
pub fn validate(spec: &StateSpec) -> Result<ValidatedState> {
    match spec {
        StateSpec::Fock { n } => Ok(ValidatedState::Fock(*n)),
        StateSpec::FockMixture { weights } => {
            let sum: f64 = weights.iter().map(|w| w.q).sum();
            let bad_weight = weights.iter().any(|w| !(w.q >= 0.0) || !w.q.is_finite());
            let mut ns: Vec<u32> = weights.iter().map(|w| w.n).collect();
            ns.sort_unstable();
            ns.dedup();
            if weights.is_empty()
                || bad_weight
                || ns.len() != weights.len()
                || (sum - 1.0).abs() > MIXTURE_SUM_TOL
            {
                return Err(Error::NonNormalizedMixture { sum });
            }
            Ok(ValidatedState::FockMixture(
                weights.iter().map(|w| (w.n, w.q)).collect(),
            ))
        }
        StateSpec::Thermal { beta_omega } => {
            if !(*beta_omega > 0.0) || !beta_omega.is_finite() {
                return Err(Error::InvalidTemperature(*beta_omega));
            }
            Ok(ValidatedState::Thermal(*beta_omega))
        }
        StateSpec::Gaussian {
            cov,
            modes_a,
            modes_b,
        } => {
            let partition = ModePartition::new(*modes_a, *modes_b)?;
            let cov = CovarianceModel::from_rows(cov, partition)?;
            Ok(ValidatedState::Gaussian(cov))
        }
        StateSpec::TwoModeSqueezed { lambda } => {
            if !(0.0..1.0).contains(lambda) {
                return Err(Error::LambdaOutOfRange(*lambda));
            }
            Ok(ValidatedState::TwoModeSqueezed {
                lambda: *lambda,
                cov: CovarianceModel::tmss(*lambda)?,
            })
        }
        StateSpec::Noon { excitation } => Ok(ValidatedState::Noon(*excitation)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_single_mode() {
        let s = validate(&StateSpec::Fock { n: 0 }).unwrap();
        assert_eq!(s.partition(), ModePartition::new(1, 0).unwrap());
        assert!(!s.partition().is_bipartite());
    }

    #[test]
    fn overweight_mixture_rejected() {
        let spec = StateSpec::FockMixture {
            weights: vec![FockWeight { n: 0, q: 0.6 }, FockWeight { n: 1, q: 0.5 }],
        };
        assert!(matches!(
            validate(&spec),
            Err(Error::NonNormalizedMixture { .. })
        ));
    }

    #[test]
    fn duplicate_and_negative_weights_rejected() {
        let dup = StateSpec::FockMixture {
            weights: vec![FockWeight { n: 2, q: 0.5 }, FockWeight { n: 2, q: 0.5 }],
        };
        assert!(validate(&dup).is_err());
        let neg = StateSpec::FockMixture {
            weights: vec![FockWeight { n: 0, q: 1.5 }, FockWeight { n: 1, q: -0.5 }],
        };
        assert!(validate(&neg).is_err());
    }

    #[test]
    fn epr_limit_rejected() {
        assert_eq!(
            validate(&StateSpec::TwoModeSqueezed { lambda: 1.0 }),
            Err(Error::LambdaOutOfRange(1.0))
        );
        assert!(validate(&StateSpec::TwoModeSqueezed { lambda: -0.1 }).is_err());
        assert!(validate(&StateSpec::TwoModeSqueezed { lambda: 0.0 }).is_ok());
    }

    #[test]
    fn temperature_must_be_positive() {
        assert!(validate(&StateSpec::Thermal { beta_omega: 0.0 }).is_err());
        assert!(validate(&StateSpec::Thermal { beta_omega: f64::NAN }).is_err());
    }

    #[test]
    fn gaussian_admissibility_checked() {
        let bad = StateSpec::Gaussian {
            cov: vec![vec![0.2, 0.0], vec![0.0, 0.2]],
            modes_a: 1,
            modes_b: 0,
        };
        assert!(matches!(
            validate(&bad),
            Err(Error::InadmissibleCovariance { .. })
        ));
    }

    #[test]
    fn json_schema() {
        let spec: StateSpec = serde_json::from_str(r#"{"kind":"tmss","lambda":0.25}"#).unwrap();
        assert_eq!(spec, StateSpec::TwoModeSqueezed { lambda: 0.25 });
        let spec: StateSpec =
            serde_json::from_str(r#"{"kind":"fock_mixture","weights":[{"n":0,"q":1.0}]}"#).unwrap();
        assert!(validate(&spec).is_ok());
        let noon = serde_json::to_string(&StateSpec::Noon { excitation: 3 }).unwrap();
        assert_eq!(noon, r#"{"kind":"noon","excitation":3}"#);
    }

    #[test]
    fn spec_roundtrip_through_validation() {
        for spec in [
            StateSpec::Fock { n: 4 },
            StateSpec::mixture01(0.3),
            StateSpec::Thermal { beta_omega: 2.0 },
            StateSpec::TwoModeSqueezed { lambda: 0.4 },
            StateSpec::Noon { excitation: 2 },
        ] {
            assert_eq!(validate(&spec).unwrap().spec(), spec);
        }
    }
}
