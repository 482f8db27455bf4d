//! Wehrl, differential, von Neumann and mutual-information entropies.
//!
//! All values are in nats. Closed forms are used wherever one exists and
//! the quadrature engine supplies the rest, or acts as a cross-check.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, CovarianceModel};
use crate::husimi::{thermal_quadrature_variance, HusimiEvaluator, MarginalDensity};
use crate::quadrature::{self, IntegralResult, QuadratureSpec};
use crate::special::{harmonic, ln_factorial, xlogx, EULER_GAMMA, LN_E_PI, LN_PI};
use crate::state::{validate, StateSpec, Subsystem, ValidatedState};

/// `ln(1e-12)`: Q_ρ above this where Q_σ has vanished breaks the support condition.
pub const LN_SUPPORT_THRESHOLD: f64 = -27.631_021_115_928_547;

/// Numerical slack granted to the Wehrl-Lieb bound `S_W ≥ N`.
pub const WEHRL_LIEB_SLACK: f64 = 1e-9;

/// Named constants shared by the entropy formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub euler_gamma: f64,
    pub ln_pi: f64,
    pub ln_e_pi: f64,
}

impl Constants {
    pub const VALUES: Constants = Constants {
        euler_gamma: EULER_GAMMA,
        ln_pi: LN_PI,
        ln_e_pi: LN_E_PI,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Self::VALUES
    }
}

/// How the reported Wehrl entropy was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WehrlMethod {
    ClosedForm,
    Quadrature,
    Both,
}

/// Entropies of a single state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub state: StateSpec,
    pub wehrl: f64,
    pub wehrl_method: WehrlMethod,
    pub differential_x: Option<f64>,
    pub differential_p: Option<f64>,
    pub von_neumann: Option<f64>,
    /// `|closed form − quadrature|` when both ran.
    pub cross_check_delta: Option<f64>,
}

/// Wehrl entropy of the Fock state `|n⟩`: `ln n! + n + 1 + nγ − n η_n`.
pub fn wehrl_fock_closed(n: u32) -> f64 {
    let nf = n as f64;
    ln_factorial(n) + nf + 1.0 + nf * EULER_GAMMA - nf * harmonic(n)
}

/// Large-n form `½(1 + ln 2πn)`. Diverges to −∞ at `n = 0`.
pub fn wehrl_fock_stirling(n: u32) -> f64 {
    0.5 * (1.0 + (2.0 * std::f64::consts::PI * n as f64).ln())
}

/// Large-n form of the homodyne entropy, `h(f_n) ≈ ½(−2 + ln 2π²n)`.
pub fn differential_entropy_fock_asymptotic(n: u32) -> f64 {
    let pi = std::f64::consts::PI;
    0.5 * (-2.0 + (2.0 * pi * pi * n as f64).ln())
}

/// `S_W = 1 − ln(1 − e^{−βω})` for the thermal state.
pub fn wehrl_thermal_closed(beta_omega: f64) -> f64 {
    1.0 - (-(-beta_omega).exp_m1()).ln()
}

/// `½ ln(2πe σ²)` for a Gaussian quadrature distribution of variance σ².
pub fn differential_entropy_thermal_closed(beta_omega: f64) -> f64 {
    let var = thermal_quadrature_variance(beta_omega);
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln()
}

/// `−∫ f ln f dx` for a homodyne density, with panel edges at its zeros.
pub fn differential_entropy_marginal(
    density: &MarginalDensity,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    quadrature::integrate_line(
        |x| -xlogx(density.value(x)),
        &density.zeros(),
        density.cutoff(),
        spec,
    )
}

/// von Neumann entropy of the states for which it has a direct expression.
pub fn von_neumann(spec: &StateSpec) -> Result<f64> {
    match validate(spec)? {
        ValidatedState::Fock(_) | ValidatedState::TwoModeSqueezed { .. } | ValidatedState::Noon(_) => {
            Ok(0.0)
        }
        ValidatedState::FockMixture(w) => Ok(-w.iter().map(|&(_, q)| xlogx(q)).sum::<f64>()),
        ValidatedState::Thermal(b) => Ok(von_neumann_thermal(b)),
        ValidatedState::Gaussian(_) => Err(Error::UnsupportedState(
            "use the symplectic spectrum in the gaussian module for general Gaussian states",
        )),
    }
}

/// `−ln(1 − e^{−βω}) + βω/(e^{βω} − 1)`.
pub fn von_neumann_thermal(beta_omega: f64) -> f64 {
    -(-(-beta_omega).exp_m1()).ln() + beta_omega / beta_omega.exp_m1()
}

/// Wehrl entropy by quadrature.
pub fn wehrl_entropy(spec: &StateSpec, qs: &QuadratureSpec) -> Result<IntegralResult> {
    let state = validate(spec)?;
    quadrature::entropy_functional(&HusimiEvaluator::from_state(&state), qs)
}

/// Wehrl entropy in closed form, where one is known.
pub fn wehrl_closed(state: &ValidatedState) -> Option<f64> {
    match state {
        ValidatedState::Fock(n) => Some(wehrl_fock_closed(*n)),
        ValidatedState::FockMixture(w) if w.iter().filter(|(_, q)| *q > 0.0).count() == 1 => w
            .iter()
            .find(|(_, q)| *q > 0.0)
            .map(|&(n, _)| wehrl_fock_closed(n)),
        ValidatedState::Thermal(b) => Some(wehrl_thermal_closed(*b)),
        ValidatedState::Gaussian(cov) | ValidatedState::TwoModeSqueezed { cov, .. } => {
            Some(gaussian::wehrl_gaussian_joint(cov))
        }
        ValidatedState::Noon(0) => Some(2.0),
        _ => None,
    }
}

/// Full single-state report. Quadrature always runs; the closed form is
/// reported when it exists.
pub fn entropy_report(spec: &StateSpec, qs: &QuadratureSpec) -> Result<EntropyReport> {
    let state = validate(spec)?;
    let numeric = quadrature::entropy_functional(&HusimiEvaluator::from_state(&state), qs)?.value;
    let closed = wehrl_closed(&state);
    let (wehrl, wehrl_method, cross_check_delta) = match closed {
        Some(c) => (c, WehrlMethod::Both, Some((c - numeric).abs())),
        None => (numeric, WehrlMethod::Quadrature, None),
    };
    let differential = match &state {
        ValidatedState::Thermal(b) => Some(differential_entropy_thermal_closed(*b)),
        ValidatedState::Fock(_) | ValidatedState::FockMixture(_) => {
            let density = MarginalDensity::from_state(&state)?;
            Some(differential_entropy_marginal(&density, qs)?.value)
        }
        _ => None,
    };
    let von_neumann = match &state {
        ValidatedState::Gaussian(cov) => Some(gaussian::von_neumann_gaussian(cov)),
        _ => Some(von_neumann(spec)?),
    };
    Ok(EntropyReport {
        state: spec.clone(),
        wehrl,
        wehrl_method,
        differential_x: differential,
        // f and g coincide for states diagonal in the number basis
        differential_p: differential,
        von_neumann,
        cross_check_delta,
    })
}

/// `∫ Q_ρ (ln Q_ρ − ln Q_σ) dμ`.
///
/// Fails with [`Error::SupportViolation`] if Q_ρ exceeds `1e-12` at a node
/// where Q_σ is below `1e-300`; the divergent value is then `+∞`.
pub fn wehrl_relative_entropy(
    q_rho: &HusimiEvaluator,
    q_sigma: &HusimiEvaluator,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    if q_rho.dim() != q_sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: q_rho.dim(),
            actual: q_sigma.dim(),
        });
    }
    let violated = AtomicBool::new(false);
    let result = quadrature::integrate_weighted(
        q_rho,
        |r, ln_rho| {
            let ln_sigma = q_sigma.ln_q(r);
            if ln_sigma < quadrature::LN_Q_FLOOR {
                if ln_rho > LN_SUPPORT_THRESHOLD {
                    violated.store(true, Ordering::Relaxed);
                }
                return 0.0;
            }
            ln_rho - ln_sigma
        },
        spec,
    );
    if violated.load(Ordering::Relaxed) {
        return Err(Error::SupportViolation);
    }
    result
}

/// Decision of the Wehrl mutual information witness at a stated tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    /// `I_W` exceeds the tolerance.
    Correlated,
    /// `I_W` is within the tolerance of zero.
    ProductWithinTolerance,
}

/// Wehrl mutual information together with the tolerance used to read it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub mutual: f64,
    pub tolerance: f64,
    pub verdict: WitnessVerdict,
}

impl WitnessReport {
    pub fn new(mutual: f64, tolerance: f64) -> Self {
        let verdict = if mutual > tolerance {
            WitnessVerdict::Correlated
        } else {
            WitnessVerdict::ProductWithinTolerance
        };
        Self {
            mutual,
            tolerance,
            verdict,
        }
    }
}

/// Every Wehrl quantity of a bipartite state, by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteEntropies {
    pub joint: f64,
    pub local_a: f64,
    pub local_b: f64,
    /// Relative-entropy route, `S_W(ρ ‖ ρ_A ⊗ ρ_B)`.
    pub mutual: f64,
    /// `S_W(ρ_A) − I_W`.
    pub conditional: f64,
    /// `|I_W − (S_W(ρ_A) + S_W(ρ_B) − S_W(ρ))|`.
    pub cross_check_delta: f64,
    /// Summed quadrature error estimates of the mutual information.
    pub error_estimate: f64,
}

/// Computes joint, local, mutual and conditional Wehrl entropies of `q`.
pub fn bipartite_entropies(q: &HusimiEvaluator, spec: &QuadratureSpec) -> Result<BipartiteEntropies> {
    if !q.partition().is_bipartite() {
        return Err(Error::NotBipartite);
    }
    let q_a = q.marginal(Subsystem::A)?;
    let q_b = q.marginal(Subsystem::B)?;
    let product = HusimiEvaluator::Product(Box::new(q_a.clone()), Box::new(q_b.clone()));
    let mutual = wehrl_relative_entropy(q, &product, spec)?;
    let joint = quadrature::entropy_functional(q, spec)?;
    let local_a = quadrature::entropy_functional(&q_a, spec)?;
    let local_b = if q_b == q_a {
        local_a
    } else {
        quadrature::entropy_functional(&q_b, spec)?
    };
    let three = local_a.value + local_b.value - joint.value;
    Ok(BipartiteEntropies {
        joint: joint.value,
        local_a: local_a.value,
        local_b: local_b.value,
        mutual: mutual.value,
        conditional: local_a.value - mutual.value,
        cross_check_delta: (mutual.value - three).abs(),
        error_estimate: mutual.error_estimate + local_a.error_estimate + local_b.error_estimate + joint.error_estimate,
    })
}

/// `S_W(A|B) = S_W(ρ_A) − S_W(ρ ‖ ρ_A ⊗ ρ_B)`.
pub fn wehrl_conditional_entropy(state: &ValidatedState, spec: &QuadratureSpec) -> Result<f64> {
    let q = HusimiEvaluator::from_state(state);
    let q_a = q.marginal(Subsystem::A)?;
    let local_a = quadrature::entropy_functional(&q_a, spec)?;
    let mutual = wehrl_relative_entropy(&q, &q.product_of_marginals()?, spec)?;
    Ok(local_a.value - mutual.value)
}

/// `I_W(A:B) = S_W(ρ ‖ ρ_A ⊗ ρ_B)`, clamped at zero against quadrature noise.
pub fn wehrl_mutual_information(state: &ValidatedState, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let q = HusimiEvaluator::from_state(state);
    let mut r = wehrl_relative_entropy(&q, &q.product_of_marginals()?, spec)?;
    r.value = r.value.max(0.0);
    Ok(r)
}

/// Mutual information read as an entanglement witness. Meaningful as such
/// for pure states only.
pub fn wehrl_witness(state: &ValidatedState, spec: &QuadratureSpec) -> Result<WitnessReport> {
    let r = wehrl_mutual_information(state, spec)?;
    let tolerance = spec.abs_tol.max(r.error_estimate).max(10.0 * spec.rel_tol);
    Ok(WitnessReport::new(r.value, tolerance))
}

/// Closed-form Wehrl mutual information of the two-mode squeezed state.
pub fn wehrl_mutual_information_tmss(lambda: f64) -> f64 {
    -(-lambda * lambda).ln_1p()
}

/// Quantum mutual information `2 S(ρ_A)` of the two-mode squeezed state,
/// with `S(ρ_A) = cosh²r ln cosh²r − sinh²r ln sinh²r`, `λ = tanh r`.
pub fn quantum_mutual_information_tmss(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let cosh2 = 1.0 / (1.0 - l2);
    let sinh2 = l2 / (1.0 - l2);
    2.0 * (xlogx(cosh2) - xlogx(sinh2))
}

/// Quantum mutual information of a N00N state: `2 ln 2`, or 0 for the
/// product state `N = 0`.
pub fn quantum_mutual_information_noon(n: u32) -> f64 {
    if n == 0 {
        0.0
    } else {
        2.0 * std::f64::consts::LN_2
    }
}

/// Closed-form bipartite Wehrl quantities of a Gaussian covariance.
pub fn gaussian_bipartite_closed(cov: &CovarianceModel) -> Result<BipartiteEntropies> {
    let w = gaussian::gaussian_witness(cov)?;
    let joint = gaussian::wehrl_gaussian_joint(cov);
    let local_a = gaussian::wehrl_gaussian_local(cov, Subsystem::A)?;
    let local_b = gaussian::wehrl_gaussian_local(cov, Subsystem::B)?;
    Ok(BipartiteEntropies {
        joint,
        local_a,
        local_b,
        mutual: w.mutual,
        conditional: w.conditional,
        cross_check_delta: (w.mutual - (local_a + local_b - joint)).abs(),
        error_estimate: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_closed_values() {
        assert_abs_diff_eq!(wehrl_fock_closed(0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wehrl_fock_closed(1), 1.0 + EULER_GAMMA, epsilon = 1e-15);
        assert_abs_diff_eq!(wehrl_fock_closed(1) + LN_PI, 2.722, epsilon = 5e-4);
        assert_abs_diff_eq!(wehrl_fock_closed(2) + LN_PI, 2.992, epsilon = 5e-4);
    }

    #[test]
    fn homodyne_asymptote_at_fifty() {
        let pi = std::f64::consts::PI;
        let oracle = -1.0 + 0.5 * (2.0 * pi * pi * 50.0).ln();
        assert_abs_diff_eq!(differential_entropy_fock_asymptotic(50), oracle, epsilon = 1e-14);
        let density = MarginalDensity::from_state(&ValidatedState::Fock(50)).unwrap();
        let h = differential_entropy_marginal(&density, &QuadratureSpec::default()).unwrap().value;
        assert_abs_diff_eq!(2.0 * h, 5.313000, epsilon = 1e-5);
        // The asymptote is approached from above and is still 0.21 away at n = 50.
        let gap = h - oracle;
        assert!(gap > 0.2 && gap < 0.22, "gap {gap}");
    }

    #[test]
    fn stirling_values() {
        assert_abs_diff_eq!(wehrl_fock_stirling(1), 1.4189, epsilon = 1e-4);
        assert_abs_diff_eq!(wehrl_fock_stirling(10), 2.5710, epsilon = 1e-3);
        for n in 5..=50 {
            assert!((wehrl_fock_closed(n) - wehrl_fock_stirling(n)).abs() < 0.05);
        }
    }

    #[test]
    fn thermal_von_neumann_against_boltzmann_sum() {
        let b: f64 = 1.0;
        let z = 1.0 / (1.0 - (-b).exp());
        let shannon: f64 = (0..400)
            .map(|n| {
                let p = (-b * n as f64).exp() / z;
                -xlogx(p)
            })
            .sum();
        assert_abs_diff_eq!(von_neumann_thermal(b), shannon, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_thermal(b), 1.0410, epsilon = 1e-3);
    }

    #[test]
    fn simple_von_neumann_values() {
        assert_eq!(von_neumann(&StateSpec::Fock { n: 7 }).unwrap(), 0.0);
        assert_abs_diff_eq!(
            von_neumann(&StateSpec::mixture01(0.5)).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn tmss_quantum_mi_matches_schmidt_series() {
        for lambda in [0.1f64, 0.5, 0.9] {
            let l2 = lambda * lambda;
            let shannon: f64 = (0..4000)
                .map(|n| -xlogx((1.0 - l2) * l2.powi(n)))
                .sum();
            assert_abs_diff_eq!(quantum_mutual_information_tmss(lambda), 2.0 * shannon, epsilon = 1e-10);
        }
        assert_eq!(quantum_mutual_information_tmss(0.0), 0.0);
    }

    #[test]
    fn disjoint_supports_flagged() {
        // a hot state reaches far beyond where the vacuum Q underflows
        let hot = HusimiEvaluator::Thermal(0.01);
        let spec = QuadratureSpec::default();
        assert_eq!(
            wehrl_relative_entropy(&hot, &HusimiEvaluator::fock(0), &spec),
            Err(Error::SupportViolation)
        );
    }

    #[test]
    fn witness_reads_product_state() {
        let state = validate(&StateSpec::TwoModeSqueezed { lambda: 0.0 }).unwrap();
        let w = wehrl_witness(&state, &QuadratureSpec::default()).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::ProductWithinTolerance);
        let state = validate(&StateSpec::TwoModeSqueezed { lambda: 0.2 }).unwrap();
        let w = wehrl_witness(&state, &QuadratureSpec::default()).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::Correlated);
    }
}
