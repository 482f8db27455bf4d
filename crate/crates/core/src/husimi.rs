//! Husimi Q-distributions, their marginals and conditionals, and the
//! homodyne marginal densities `f(x)`, `g(p)`.
//!
//! Phase-space points are real vectors `(x_A…, p_A…, x_B…, p_B…)` with
//! `α = (x + ip)/√2` per mode. Every density is normalized against
//! `d^{2n}α / π^n = d^n x d^n p / (2π)^n`.
//!
//! Evaluation goes through `ln Q` so that high Fock numbers and far tails
//! never overflow or underflow before the caller decides what to do with
//! them. `Q = 0` is reported as `ln Q = −∞`.

use crate::error::{Error, Result};
use crate::gaussian::CovarianceModel;
use crate::special::{hermite_function, ln_factorial, log_add_exp};
use crate::state::{ModePartition, Subsystem, ValidatedState};

/// Evaluable Husimi Q-distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum HusimiEvaluator {
    /// Single-mode mixture of Fock states: `(n, ln weight)` pairs.
    FockMixture(Vec<(u32, f64)>),
    /// Single-mode thermal state, parameter `βω`.
    Thermal(f64),
    /// Zero-mean Gaussian `√det C · exp(−½ rᵀ C r)`.
    Gaussian(CovarianceModel),
    /// `(|N,0⟩ + |0,N⟩)/√(2(1+δ_{0N}))` on 1+1 modes.
    Noon(u32),
    /// `Q_A(r_A) Q_B(r_B)`.
    Product(Box<HusimiEvaluator>, Box<HusimiEvaluator>),
    /// Convex combination at the level of Husimi functions.
    Mixture(Vec<(f64, HusimiEvaluator)>),
    /// `Q(α, β) / Q_B(β)` as a function of α.
    Conditional {
        joint: Box<HusimiEvaluator>,
        beta: Vec<f64>,
        ln_q_b: f64,
    },
}

impl HusimiEvaluator {
    pub fn from_state(state: &ValidatedState) -> Self {
        match state {
            ValidatedState::Fock(n) => HusimiEvaluator::FockMixture(vec![(*n, 0.0)]),
            ValidatedState::FockMixture(w) => HusimiEvaluator::FockMixture(
                w.iter().filter(|(_, q)| *q > 0.0).map(|&(n, q)| (n, q.ln())).collect(),
            ),
            ValidatedState::Thermal(b) => HusimiEvaluator::Thermal(*b),
            ValidatedState::Gaussian(cov) | ValidatedState::TwoModeSqueezed { cov, .. } => {
                HusimiEvaluator::Gaussian(cov.clone())
            }
            ValidatedState::Noon(n) => HusimiEvaluator::Noon(*n),
        }
    }

    pub fn fock(n: u32) -> Self {
        HusimiEvaluator::FockMixture(vec![(n, 0.0)])
    }

    pub fn partition(&self) -> ModePartition {
        match self {
            HusimiEvaluator::FockMixture(_) | HusimiEvaluator::Thermal(_) => {
                ModePartition::single_mode()
            }
            HusimiEvaluator::Gaussian(cov) => cov.partition(),
            HusimiEvaluator::Noon(_) => ModePartition::one_plus_one(),
            HusimiEvaluator::Product(a, b) => ModePartition {
                n_a: a.partition().total_modes(),
                n_b: b.partition().total_modes(),
            },
            HusimiEvaluator::Mixture(parts) => parts[0].1.partition(),
            HusimiEvaluator::Conditional { joint, .. } => ModePartition {
                n_a: joint.partition().n_a,
                n_b: 0,
            },
        }
    }

    /// Length of the phase-space vectors this evaluator accepts.
    pub fn dim(&self) -> usize {
        self.partition().phase_dim()
    }

    /// `ln Q(r)`, `−∞` where Q vanishes. Panics on a wrong dimension; use
    /// [`HusimiEvaluator::try_q`] for checked evaluation.
    pub fn ln_q(&self, r: &[f64]) -> f64 {
        match self {
            HusimiEvaluator::FockMixture(terms) => {
                let u = 0.5 * (r[0] * r[0] + r[1] * r[1]);
                fock_mixture_ln_q(terms, u)
            }
            HusimiEvaluator::Thermal(b) => thermal_ln_q(*b, 0.5 * (r[0] * r[0] + r[1] * r[1])),
            HusimiEvaluator::Gaussian(cov) => {
                let c = cov.c();
                let mut form = 0.0;
                for (i, ri) in r.iter().enumerate() {
                    let row: f64 = r.iter().enumerate().map(|(j, rj)| c[(i, j)] * rj).sum();
                    form += ri * row;
                }
                0.5 * cov.ln_det_c() - 0.5 * form.max(0.0)
            }
            HusimiEvaluator::Noon(n) => noon_ln_q(*n, r),
            HusimiEvaluator::Product(a, b) => {
                let k = a.dim();
                a.ln_q(&r[..k]) + b.ln_q(&r[k..])
            }
            HusimiEvaluator::Mixture(parts) => parts
                .iter()
                .map(|(t, q)| t.ln() + q.ln_q(r))
                .fold(f64::NEG_INFINITY, log_add_exp),
            HusimiEvaluator::Conditional {
                joint,
                beta,
                ln_q_b,
            } => {
                let point = join_point(joint.partition(), r, beta);
                joint.ln_q(&point) - ln_q_b
            }
        }
    }

    pub fn q(&self, r: &[f64]) -> f64 {
        self.ln_q(r).exp()
    }

    pub fn try_q(&self, r: &[f64]) -> Result<f64> {
        if r.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: r.len(),
            });
        }
        Ok(self.q(r))
    }

    /// Whether Q depends on the single-mode point only through `x² + p²`.
    pub fn is_rotation_invariant(&self) -> bool {
        match self {
            HusimiEvaluator::FockMixture(_) | HusimiEvaluator::Thermal(_) => true,
            HusimiEvaluator::Gaussian(cov) => {
                let c = cov.c();
                cov.partition() == ModePartition::single_mode()
                    && (c[(0, 0)] - c[(1, 1)]).abs() < 1e-14
                    && c[(0, 1)].abs() < 1e-14
            }
            HusimiEvaluator::Mixture(parts) => parts.iter().all(|(_, q)| q.is_rotation_invariant()),
            _ => false,
        }
    }

    /// Husimi function of the reduced state on `keep`.
    pub fn marginal(&self, keep: Subsystem) -> Result<HusimiEvaluator> {
        if !self.partition().is_bipartite() {
            return Err(Error::NotBipartite);
        }
        match self {
            HusimiEvaluator::Gaussian(cov) => Ok(HusimiEvaluator::Gaussian(cov.reduced(keep)?)),
            // Q_B = e^{-u}(u^N + N!)/(2 N!) = (Q_0 + Q_N)/2, and the same for A.
            HusimiEvaluator::Noon(0) => Ok(HusimiEvaluator::fock(0)),
            HusimiEvaluator::Noon(n) => Ok(HusimiEvaluator::FockMixture(vec![
                (0, 0.5f64.ln()),
                (*n, 0.5f64.ln()),
            ])),
            HusimiEvaluator::Product(a, b) => Ok(match keep {
                Subsystem::A => (**a).clone(),
                Subsystem::B => (**b).clone(),
            }),
            HusimiEvaluator::Mixture(parts) => Ok(HusimiEvaluator::Mixture(
                parts
                    .iter()
                    .map(|(t, q)| Ok((*t, q.marginal(keep)?)))
                    .collect::<Result<_>>()?,
            )),
            _ => Err(Error::NotBipartite),
        }
    }

    /// Product of the two local Husimi functions, `Q_A ⊗ Q_B`.
    pub fn product_of_marginals(&self) -> Result<HusimiEvaluator> {
        Ok(HusimiEvaluator::Product(
            Box::new(self.marginal(Subsystem::A)?),
            Box::new(self.marginal(Subsystem::B)?),
        ))
    }

    /// Conditional Husimi function of A given the heterodyne outcome `beta` on B.
    pub fn conditional(&self, beta: &[f64]) -> Result<HusimiEvaluator> {
        let p = self.partition();
        if !p.is_bipartite() {
            return Err(Error::NotBipartite);
        }
        if beta.len() != 2 * p.n_b {
            return Err(Error::DimensionMismatch {
                expected: 2 * p.n_b,
                actual: beta.len(),
            });
        }
        let ln_q_b = self.marginal(Subsystem::B)?.ln_q(beta);
        if !ln_q_b.is_finite() || ln_q_b < -690.0 {
            return Err(Error::ConditionOnZeroDensity);
        }
        Ok(HusimiEvaluator::Conditional {
            joint: Box::new(self.clone()),
            beta: beta.to_vec(),
            ln_q_b,
        })
    }

    /// `u = r²/2` beyond which the radial tail of Q carries less than
    /// `10^{-20}` of the mass. For bipartite states this is per subsystem.
    pub fn radial_cutoff_u(&self) -> f64 {
        let t = 20.0 * std::f64::consts::LN_10;
        match self {
            HusimiEvaluator::FockMixture(_) | HusimiEvaluator::Noon(_) => {
                let e = self.energy_scale();
                e + t + 2.0 * ((e + 1.0) * t).sqrt()
            }
            HusimiEvaluator::Thermal(_) => (self.energy_scale() + 1.0) * t,
            HusimiEvaluator::Gaussian(cov) => {
                let d = cov.dim() as f64;
                let widest = nalgebra::SymmetricEigen::new(cov.v().clone()).eigenvalues.max() + 0.5;
                widest * (t + d)
            }
            HusimiEvaluator::Product(a, b) => a.radial_cutoff_u().max(b.radial_cutoff_u()),
            HusimiEvaluator::Mixture(parts) => parts
                .iter()
                .map(|(_, q)| q.radial_cutoff_u())
                .fold(0.0, f64::max),
            HusimiEvaluator::Conditional { joint, beta, .. } => {
                let shift = 0.5 * beta.iter().map(|b| b * b).sum::<f64>();
                joint.radial_cutoff_u() + shift
            }
        }
    }

    /// Upper estimate of the Q-mass outside radius `sqrt(2 u)`.
    pub fn radial_tail_bound(&self, u: f64) -> f64 {
        match self {
            HusimiEvaluator::Thermal(_) => (-u / (self.energy_scale() + 1.0)).exp(),
            HusimiEvaluator::Gaussian(cov) => {
                let widest = nalgebra::SymmetricEigen::new(cov.v().clone()).eigenvalues.max() + 0.5;
                gamma_tail_bound(cov.dim() as f64 / 2.0, u / widest)
            }
            HusimiEvaluator::Product(a, b) => a.radial_tail_bound(u) + b.radial_tail_bound(u),
            HusimiEvaluator::Mixture(parts) => {
                parts.iter().map(|(t, q)| t * q.radial_tail_bound(u)).sum()
            }
            _ => gamma_tail_bound(self.energy_scale() + 1.0, u),
        }
    }

    /// Largest occupation scale, used to size radial cutoffs.
    pub fn energy_scale(&self) -> f64 {
        match self {
            HusimiEvaluator::FockMixture(terms) => {
                terms.iter().map(|&(n, _)| n).max().unwrap_or(0) as f64
            }
            // Q_T is exponential in u with mean 1/(1 − e^{−βω}) = n̄ + 1.
            HusimiEvaluator::Thermal(b) => 1.0 / (-(-b).exp_m1()) - 1.0,
            HusimiEvaluator::Gaussian(cov) => {
                let d = cov.dim() as f64;
                (cov.v().trace() / d - 0.5).max(0.0)
            }
            HusimiEvaluator::Noon(n) => *n as f64,
            HusimiEvaluator::Product(a, b) => a.energy_scale().max(b.energy_scale()),
            HusimiEvaluator::Mixture(parts) => parts
                .iter()
                .map(|(_, q)| q.energy_scale())
                .fold(0.0, f64::max),
            HusimiEvaluator::Conditional { joint, .. } => joint.energy_scale(),
        }
    }
}

/// Chernoff bound on the upper tail of a unit-scale Gamma(k) variable.
fn gamma_tail_bound(k: f64, u: f64) -> f64 {
    if u <= k {
        return 1.0;
    }
    (-(u - k) + k * (u / k).ln()).exp()
}

fn join_point(partition: ModePartition, alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    debug_assert_eq!(alpha.len(), 2 * partition.n_a);
    let mut point = Vec::with_capacity(alpha.len() + beta.len());
    point.extend_from_slice(alpha);
    point.extend_from_slice(beta);
    point
}

/// `ln Σ w_k u^{n_k} e^{−u} / n_k!` for `u = |α|²`.
fn fock_mixture_ln_q(terms: &[(u32, f64)], u: f64) -> f64 {
    let ln_u = u.ln();
    terms
        .iter()
        .map(|&(n, ln_w)| {
            let power = if n == 0 { 0.0 } else { n as f64 * ln_u };
            ln_w + power - u - ln_factorial(n)
        })
        .fold(f64::NEG_INFINITY, log_add_exp)
}

/// `ln Q_T = ln(1 − e^{−βω}) − u(1 − e^{−βω})`.
fn thermal_ln_q(beta_omega: f64, u: f64) -> f64 {
    let k = -(-beta_omega).exp_m1();
    k.ln() - u * k
}

fn noon_ln_q(n: u32, r: &[f64]) -> f64 {
    let (xa, pa, xb, pb) = (r[0], r[1], r[2], r[3]);
    let ua = 0.5 * (xa * xa + pa * pa);
    let ub = 0.5 * (xb * xb + pb * pb);
    let envelope = -(ua + ub);
    if n == 0 {
        return envelope;
    }
    let nf = n as f64;
    let ln_norm = -((nf + 1.0) * std::f64::consts::LN_2 + ln_factorial(n));
    let ra2 = 2.0 * ua;
    let rb2 = 2.0 * ub;
    // |(x_A + i p_A)^N + (x_B + i p_B)^N|² in polar form
    let la = 0.5 * nf * ra2.ln();
    let lb = 0.5 * nf * rb2.ln();
    let m = la.max(lb);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let dtheta = pa.atan2(xa) - pb.atan2(xb);
    let inner = (2.0 * (la - m)).exp() + (2.0 * (lb - m)).exp()
        + 2.0 * (la + lb - 2.0 * m).exp() * (nf * dtheta).cos();
    if inner <= 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_norm + envelope + 2.0 * m + inner.ln()
}

/// `Q_n(x, p) = (x² + p²)^n e^{−(x²+p²)/2} / (2^n n!)`.
pub fn q_fock(n: u32, x: f64, p: f64) -> f64 {
    fock_mixture_ln_q(&[(n, 0.0)], 0.5 * (x * x + p * p)).exp()
}

/// `Q_T(x, p) = (1/Z) exp(−(x²+p²)(1 − e^{−βω})/2 − βω/2)`, `Z = 1/(2 sinh(βω/2))`.
pub fn q_thermal(beta_omega: f64, x: f64, p: f64) -> f64 {
    thermal_ln_q(beta_omega, 0.5 * (x * x + p * p)).exp()
}

pub fn q_gaussian(cov: &CovarianceModel, r: &[f64]) -> Result<f64> {
    HusimiEvaluator::Gaussian(cov.clone()).try_q(r)
}

pub fn q_noon(n: u32, r: &[f64]) -> Result<f64> {
    HusimiEvaluator::Noon(n).try_q(r)
}

/// `f_n(x) = |ψ_n(x)|² = H_n(x)² e^{−x²} / (√π 2^n n!)`.
pub fn homodyne_marginal_fock(n: u32, x: f64) -> f64 {
    let psi = hermite_function(n, x);
    psi * psi
}

/// Thermal position density: Gaussian with `1/(2σ²) = tanh(βω/2)`.
pub fn homodyne_marginal_thermal(beta_omega: f64, x: f64) -> f64 {
    let k = (0.5 * beta_omega).tanh();
    (k / std::f64::consts::PI).sqrt() * (-k * x * x).exp()
}

/// Variance of the thermal quadrature distribution, `1/(2 tanh(βω/2))`.
pub fn thermal_quadrature_variance(beta_omega: f64) -> f64 {
    0.5 / (0.5 * beta_omega).tanh()
}

/// One-dimensional homodyne density of a single-mode diagonal state.
///
/// For states diagonal in the Fock basis `g(p)` has the same shape as
/// `f(x)`, so one density serves both quadratures.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalDensity {
    Fock(u32),
    FockMixture(Vec<(u32, f64)>),
    Thermal(f64),
}

impl MarginalDensity {
    /// Position marginal of a monopartite state.
    pub fn from_state(state: &ValidatedState) -> Result<Self> {
        match state {
            ValidatedState::Fock(n) => Ok(MarginalDensity::Fock(*n)),
            ValidatedState::FockMixture(w) => Ok(MarginalDensity::FockMixture(
                w.iter().filter(|(_, q)| *q > 0.0).cloned().collect(),
            )),
            ValidatedState::Thermal(b) => Ok(MarginalDensity::Thermal(*b)),
            _ => Err(Error::UnsupportedState(
                "homodyne marginals are defined for single-mode diagonal states",
            )),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            MarginalDensity::Fock(n) => homodyne_marginal_fock(*n, x),
            MarginalDensity::FockMixture(w) => {
                w.iter().map(|&(n, q)| q * homodyne_marginal_fock(n, x)).sum()
            }
            MarginalDensity::Thermal(b) => homodyne_marginal_thermal(*b, x),
        }
    }

    /// Half-width beyond which the density is negligible.
    pub fn cutoff(&self) -> f64 {
        // ψ_n decays like e^{−x²/2} past the turning point √(2n+1);
        // 8 extra units leave a tail below e^{−64}.
        match self {
            MarginalDensity::Fock(n) => (2.0 * *n as f64 + 1.0).sqrt() + 8.0,
            MarginalDensity::FockMixture(w) => {
                let n = w.iter().map(|&(n, _)| n).max().unwrap_or(0);
                (2.0 * n as f64 + 1.0).sqrt() + 8.0
            }
            MarginalDensity::Thermal(b) => 11.0 * thermal_quadrature_variance(*b).sqrt(),
        }
    }

    /// Points where the density touches zero inside the support.
    pub fn zeros(&self) -> Vec<f64> {
        match self {
            MarginalDensity::Fock(n) => crate::quadrature::hermite_roots(*n as usize),
            MarginalDensity::FockMixture(w) if w.len() == 1 => {
                crate::quadrature::hermite_roots(w[0].0 as usize)
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{validate, StateSpec};
    use nalgebra::DVector;
    use approx::assert_abs_diff_eq;

    /// |⟨n|α⟩|² from the coherent-state Fock expansion, evaluated directly.
    fn coherent_overlap_sq(n: u32, x: f64, p: f64) -> f64 {
        let abs2 = 0.5 * (x * x + p * p);
        let mut term = (-abs2).exp();
        for k in 1..=n {
            term *= abs2 / k as f64;
        }
        term
    }

    #[test]
    fn fock_examples() {
        assert_abs_diff_eq!(q_fock(0, 0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q_fock(1, 2f64.sqrt(), 0.0), (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(q_fock(5, 1.0, 1.0), coherent_overlap_sq(5, 1.0, 1.0), epsilon = 1e-15);
        assert_eq!(q_fock(3, 0.0, 0.0), 0.0);
        // log-space keeps large n finite
        let v = q_fock(200, 20.0, 0.0);
        assert!(v.is_finite() && v > 0.0 && v <= 1.0);
    }

    #[test]
    fn thermal_examples() {
        assert_abs_diff_eq!(q_thermal(60.0, 0.0, 0.0), 1.0, epsilon = 1e-15);
        let expected = 2.0 * 0.5f64.sinh() * (-0.5f64).exp();
        assert_abs_diff_eq!(q_thermal(1.0, 0.0, 0.0), expected, epsilon = 1e-15);
        // Boltzmann-weighted sum of Fock Husimi functions
        let (x, p) = (0.8, -1.1);
        let b: f64 = 1.0;
        let z = 1.0 / (2.0 * (0.5 * b).sinh());
        let series: f64 = (0..200)
            .map(|n| (-b * (n as f64 + 0.5)).exp() * coherent_overlap_sq(n, x, p))
            .sum::<f64>()
            / z;
        assert_abs_diff_eq!(q_thermal(b, x, p), series, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_vacuum_peak() {
        let cov = CovarianceModel::vacuum(ModePartition::one_plus_one());
        assert_abs_diff_eq!(q_gaussian(&cov, &[0.0; 4]).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            q_gaussian(&cov, &[0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tmss_matches_fock_series() {
        // |⟨αβ|ψ⟩|² with ⟨αβ|n,n⟩ = e^{−(|α|²+|β|²)/2} (α* β*)^n / n!
        let lambda: f64 = 0.5;
        let cov = CovarianceModel::tmss(lambda).unwrap();
        for r in [[0.0, 0.0, 0.0, 0.0], [0.3, -0.7, 1.1, 0.4], [1.5, 0.2, -0.9, -1.3]] {
            let alpha = num_pair(r[0], r[1]);
            let beta = num_pair(r[2], r[3]);
            let prod = (alpha.0 * beta.0 - alpha.1 * beta.1, -(alpha.0 * beta.1 + alpha.1 * beta.0));
            let mut amp = (0.0, 0.0);
            let mut term = (1.0, 0.0);
            for n in 0..200 {
                if n > 0 {
                    let t = (
                        term.0 * prod.0 - term.1 * prod.1,
                        term.0 * prod.1 + term.1 * prod.0,
                    );
                    term = (t.0 * -lambda / n as f64, t.1 * -lambda / n as f64);
                }
                amp.0 += term.0;
                amp.1 += term.1;
            }
            let abs2 = alpha.0 * alpha.0 + alpha.1 * alpha.1 + beta.0 * beta.0 + beta.1 * beta.1;
            let series = (1.0 - lambda * lambda) * (-abs2).exp() * (amp.0 * amp.0 + amp.1 * amp.1);
            assert_abs_diff_eq!(q_gaussian(&cov, &r).unwrap(), series, epsilon = 1e-13);
        }
    }

    fn num_pair(x: f64, p: f64) -> (f64, f64) {
        (x / 2f64.sqrt(), p / 2f64.sqrt())
    }

    #[test]
    fn noon_examples() {
        assert_abs_diff_eq!(q_noon(0, &[0.0; 4]).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(q_noon(1, &[1.0, 0.0, -1.0, 0.0]).unwrap(), 0.0);
        // Cartesian form (x − ip)^N (x + ip)^N ... written out for N = 2
        let r = [0.4, -1.2, 0.9, 0.3];
        let za = (r[0] * r[0] - r[1] * r[1], 2.0 * r[0] * r[1]);
        let zb = (r[2] * r[2] - r[3] * r[3], 2.0 * r[2] * r[3]);
        let s = (za.0 + zb.0, za.1 + zb.1);
        let env = (-(r.iter().map(|v| v * v).sum::<f64>()) / 2.0).exp();
        let expected = env * (s.0 * s.0 + s.1 * s.1) / (8.0 * 2.0);
        assert_abs_diff_eq!(q_noon(2, &r).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn noon_local_density_at_origin() {
        let local = HusimiEvaluator::Noon(2).marginal(Subsystem::B).unwrap();
        assert_abs_diff_eq!(local.q(&[0.0, 0.0]), 0.5, epsilon = 1e-15);
        // closed form e^{−r²/2}(r^{2N} + 2^N N!)/(2^{N+1} N!)
        let (x, p) = (1.3, 0.4);
        let r2: f64 = x * x + p * p;
        let expected = (-r2 / 2.0).exp() * (r2.powi(2) + 8.0) / 16.0;
        assert_abs_diff_eq!(local.q(&[x, p]), expected, epsilon = 1e-15);
    }

    #[test]
    fn product_gaussian_marginal_is_exact_factor() {
        let mut v = nalgebra::DMatrix::identity(4, 4) * 0.5;
        v[(0, 0)] = 0.9;
        v[(3, 3)] = 2.0;
        let cov = CovarianceModel::from_v(v, ModePartition::one_plus_one()).unwrap();
        let q = HusimiEvaluator::Gaussian(cov.clone());
        let qa = q.marginal(Subsystem::A).unwrap();
        let qb = q.marginal(Subsystem::B).unwrap();
        for r in [[0.1, 0.2, 0.3, 0.4], [-1.0, 0.5, 2.0, -0.3]] {
            assert_abs_diff_eq!(q.q(&r), qa.q(&r[..2]) * qb.q(&r[2..]), epsilon = 1e-15);
        }
    }

    #[test]
    fn reduced_gaussian_uses_schur_structure() {
        let cov = CovarianceModel::tmss(0.5).unwrap();
        let q_b = HusimiEvaluator::Gaussian(cov.clone()).marginal(Subsystem::B).unwrap();
        let schur = cov.schur_reduced_c(Subsystem::B).unwrap();
        let ln_norm = 0.5 * (cov.ln_det_c() - cov.c_a().determinant().ln());
        for r in [[0.0, 0.0], [0.7, -0.2]] {
            let v = DVector::from_column_slice(&r);
            let expected = (ln_norm - 0.5 * (v.transpose() * &schur * &v)[0]).exp();
            assert_abs_diff_eq!(q_b.q(&r), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn conditional_of_product_is_marginal() {
        let cov = CovarianceModel::vacuum(ModePartition::one_plus_one());
        let q = HusimiEvaluator::Gaussian(cov);
        let cond = q.conditional(&[0.7, -1.4]).unwrap();
        let qa = q.marginal(Subsystem::A).unwrap();
        assert_abs_diff_eq!(cond.q(&[0.3, 0.2]), qa.q(&[0.3, 0.2]), epsilon = 1e-15);
    }

    #[test]
    fn tmss_conditional_at_origin_has_form_c_a() {
        let cov = CovarianceModel::tmss(0.5).unwrap();
        let cond = HusimiEvaluator::Gaussian(cov.clone()).conditional(&[0.0, 0.0]).unwrap();
        // Gaussian division: exponent −½ αᵀ C_A α with C_A = 𝟙, normalized to det C_A^{1/2} = 1
        for a in [[0.0f64, 0.0], [0.5, 1.0], [-1.2, 0.3]] {
            let expected = (-0.5 * (a[0] * a[0] + a[1] * a[1])).exp();
            assert_abs_diff_eq!(cond.q(&a), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn conditioning_on_zero_density_fails() {
        let q = HusimiEvaluator::Gaussian(CovarianceModel::vacuum(ModePartition::one_plus_one()));
        assert_eq!(q.conditional(&[60.0, 0.0]), Err(Error::ConditionOnZeroDensity));
        assert_eq!(HusimiEvaluator::fock(1).conditional(&[0.0, 0.0]), Err(Error::NotBipartite));
    }

    #[test]
    fn mixture_is_convex_combination() {
        let state = validate(&StateSpec::mixture01(0.3)).unwrap();
        let q = HusimiEvaluator::from_state(&state);
        for (x, p) in [(0.0, 0.0), (0.4, 1.9), (-2.2, 0.1)] {
            let expected = 0.3 * q_fock(0, x, p) + 0.7 * q_fock(1, x, p);
            assert_abs_diff_eq!(q.q(&[x, p]), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn homodyne_examples() {
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        assert_abs_diff_eq!(homodyne_marginal_fock(0, 0.0), inv_sqrt_pi, epsilon = 1e-15);
        assert_eq!(homodyne_marginal_fock(1, 0.0), 0.0);
        assert_abs_diff_eq!(homodyne_marginal_thermal(80.0, 0.0), inv_sqrt_pi, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_quadrature_variance(1.0), 1.0820, epsilon = 1e-4);
        // Boltzmann-weighted sum of the Fock densities (Mehler)
        let b: f64 = 1.0;
        let z = 1.0 / (2.0 * (0.5 * b).sinh());
        for x in [0.0, 0.7, 2.3] {
            let series: f64 = (0..150)
                .map(|n| (-b * (n as f64 + 0.5)).exp() * homodyne_marginal_fock(n, x))
                .sum::<f64>()
                / z;
            assert_abs_diff_eq!(homodyne_marginal_thermal(b, x), series, epsilon = 1e-13);
        }
    }
}
