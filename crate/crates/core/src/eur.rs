//! Entropic uncertainty relations in the form with common bound `ln(eπ)`.
//!
//! | relation | left-hand side                    |
//! |----------|-----------------------------------|
//! | WL       | `S_W(ρ) + ln π`                   |
//! | BBM      | `h(f) + h(g)`                     |
//! | FL       | `h(f) + h(g) − S(ρ) + 1 − ln 2`   |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropies::{
    differential_entropy_marginal, differential_entropy_thermal_closed, von_neumann_thermal,
    wehrl_fock_closed, wehrl_thermal_closed,
};
use crate::error::{Error, Result};
use crate::husimi::{HusimiEvaluator, MarginalDensity};
use crate::quadrature::{self, QuadratureSpec};
use crate::special::{xlogx, LN_E_PI, LN_PI};
use crate::state::{validate, StateSpec, ValidatedState};

/// `1 − ln 2`.
const FL_SHIFT: f64 = 1.0 - std::f64::consts::LN_2;

/// Default number of mixture weights in a sweep.
pub const DEFAULT_MIXTURE_STEPS: usize = 51;

/// Default thermal grid: 60 log-spaced points in `[0.05, 20]`.
pub const DEFAULT_THERMAL_GRID: (f64, f64, usize) = (0.05, 20.0, 60);

/// Left-hand sides of the three relations and their deficits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EurReport {
    pub state: StateSpec,
    pub wl_lhs: f64,
    pub bbm_lhs: f64,
    pub fl_lhs: f64,
    pub bound: f64,
    pub wl_deficit: f64,
    pub bbm_deficit: f64,
    pub fl_deficit: f64,
    /// Largest `|closed form − quadrature|` over the quantities that have both.
    pub cross_check_delta: Option<f64>,
}

impl EurReport {
    fn new(state: StateSpec, wehrl: f64, bbm_lhs: f64, von_neumann: f64, delta: Option<f64>) -> Self {
        let wl_lhs = wehrl + LN_PI;
        let fl_lhs = bbm_lhs - von_neumann + FL_SHIFT;
        Self {
            state,
            wl_lhs,
            bbm_lhs,
            fl_lhs,
            bound: LN_E_PI,
            wl_deficit: wl_lhs - LN_E_PI,
            bbm_deficit: bbm_lhs - LN_E_PI,
            fl_deficit: fl_lhs - LN_E_PI,
            cross_check_delta: delta,
        }
    }

    pub fn deficits(&self) -> [f64; 3] {
        [self.wl_deficit, self.bbm_deficit, self.fl_deficit]
    }
}

/// Thermal relations from their closed forms alone.
pub fn eur_thermal_closed(beta_omega: f64) -> Result<EurReport> {
    if !(beta_omega > 0.0) || !beta_omega.is_finite() {
        return Err(Error::InvalidTemperature(beta_omega));
    }
    let bbm = 2.0 * differential_entropy_thermal_closed(beta_omega);
    Ok(EurReport::new(
        StateSpec::Thermal { beta_omega },
        wehrl_thermal_closed(beta_omega),
        bbm,
        von_neumann_thermal(beta_omega),
        None,
    ))
}

/// Relations for a monopartite Fock, Fock-mixture or thermal state.
///
/// Closed forms are used where available and checked against quadrature.
pub fn eur_report(spec: &StateSpec, qs: &QuadratureSpec) -> Result<EurReport> {
    let state = validate(spec)?;
    let q = HusimiEvaluator::from_state(&state);
    let wehrl_numeric = || quadrature::entropy_functional(&q, qs).map(|r| r.value);
    let h_numeric = || {
        let density = MarginalDensity::from_state(&state)?;
        differential_entropy_marginal(&density, qs).map(|r| r.value)
    };
    match &state {
        ValidatedState::Fock(n) => {
            let closed = wehrl_fock_closed(*n);
            let delta = (closed - wehrl_numeric()?).abs();
            Ok(EurReport::new(spec.clone(), closed, 2.0 * h_numeric()?, 0.0, Some(delta)))
        }
        ValidatedState::FockMixture(w) => {
            let shannon = -w.iter().map(|&(_, p)| xlogx(p)).sum::<f64>();
            Ok(EurReport::new(spec.clone(), wehrl_numeric()?, 2.0 * h_numeric()?, shannon, None))
        }
        ValidatedState::Thermal(b) => {
            let mut report = eur_thermal_closed(*b)?;
            let dw = (wehrl_thermal_closed(*b) - wehrl_numeric()?).abs();
            let dh = (differential_entropy_thermal_closed(*b) - h_numeric()?).abs();
            report.cross_check_delta = Some(dw.max(dh));
            Ok(report)
        }
        _ => Err(Error::UnsupportedState(
            "uncertainty relations are evaluated for single-mode Fock, mixture and thermal states",
        )),
    }
}

/// A parameter family swept for the uncertainty-relation figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SweepFamily {
    /// `|n⟩` for `n = 0…n_max`.
    Fock { n_max: u32 },
    /// `q|0⟩⟨0| + (1−q)|1⟩⟨1|` on `steps` evenly spaced `q ∈ [0, 1]`.
    Mixture01 { steps: usize },
    /// `points` log-spaced values of `βω` in `[beta_min, beta_max]`.
    Thermal {
        beta_min: f64,
        beta_max: f64,
        points: usize,
    },
}

impl SweepFamily {
    pub fn default_mixture() -> Self {
        SweepFamily::Mixture01 {
            steps: DEFAULT_MIXTURE_STEPS,
        }
    }

    pub fn default_thermal() -> Self {
        let (beta_min, beta_max, points) = DEFAULT_THERMAL_GRID;
        SweepFamily::Thermal {
            beta_min,
            beta_max,
            points,
        }
    }

    /// `(grid parameter, state)` pairs in sweep order.
    pub fn grid(&self) -> Result<Vec<(f64, StateSpec)>> {
        match *self {
            SweepFamily::Fock { n_max } => Ok((0..=n_max)
                .map(|n| (n as f64, StateSpec::Fock { n }))
                .collect()),
            SweepFamily::Mixture01 { steps } => {
                if steps < 2 {
                    return Err(Error::InvalidQuadrature("a mixture sweep needs at least 2 steps"));
                }
                Ok((0..steps)
                    .map(|k| {
                        let q = k as f64 / (steps - 1) as f64;
                        (q, StateSpec::mixture01(q))
                    })
                    .collect())
            }
            SweepFamily::Thermal {
                beta_min,
                beta_max,
                points,
            } => {
                if !(beta_min > 0.0 && beta_max >= beta_min && points >= 1) {
                    return Err(Error::InvalidTemperature(beta_min));
                }
                Ok(log_grid(beta_min, beta_max, points)
                    .into_iter()
                    .map(|b| (b, StateSpec::Thermal { beta_omega: b }))
                    .collect())
            }
        }
    }
}

/// `points` log-spaced values from `lo` to `hi`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| {
            if k == 0 {
                lo
            } else if k + 1 == points {
                hi
            } else {
                (a + (b - a) * k as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EurPoint {
    pub grid_param: f64,
    pub report: EurReport,
}

/// Evaluates `family` point by point. With `parallelism > 1` the grid
/// points are spread over threads; the output order is the grid order.
pub fn eur_sweep(family: &SweepFamily, qs: &QuadratureSpec) -> Result<Vec<EurPoint>> {
    let grid = family.grid()?;
    let point = |(param, spec): &(f64, StateSpec), inner: &QuadratureSpec| {
        eur_report(spec, inner).map(|report| EurPoint {
            grid_param: *param,
            report,
        })
    };
    if qs.parallelism <= 1 {
        return grid.iter().map(|g| point(g, qs)).collect();
    }
    let inner = qs.clone().with_parallelism(1);
    quadrature::thread_pool(qs.parallelism)
        .install(|| grid.par_iter().map(|g| point(g, &inner)).collect())
}

/// Mixture weight `q` at which the WL and BBM deficits are equal.
///
/// Scans `steps` evenly spaced weights for a sign change of
/// `wl_deficit − bbm_deficit` and bisects the first bracket down to `1e-10`.
/// Returns `None` if the difference never changes sign.
pub fn mixture_crossover(steps: usize, qs: &QuadratureSpec) -> Result<Option<f64>> {
    let diff = |q: f64| -> Result<f64> {
        let r = eur_report(&StateSpec::mixture01(q), qs)?;
        Ok(r.wl_deficit - r.bbm_deficit)
    };
    let steps = steps.max(2);
    let mut lo = 0.0;
    let mut f_lo = diff(lo)?;
    for k in 1..steps {
        let hi = k as f64 / (steps - 1) as f64;
        let f_hi = diff(hi)?;
        if f_lo == 0.0 {
            return Ok(Some(lo));
        }
        if f_lo.signum() != f_hi.signum() {
            return bisect(diff, lo, hi, f_lo, 1e-10).map(Some);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(None)
}

fn bisect<F>(f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
