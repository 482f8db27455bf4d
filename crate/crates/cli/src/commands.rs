//! One function per subcommand, each producing a [`Rendered`] result.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use wehrl::entropies::{self, bipartite_entropies, gaussian_bipartite_closed};
use wehrl::eur::{self, EurPoint, SweepFamily};
use wehrl::gaussian::{self, CovarianceModel};
use wehrl::husimi::HusimiEvaluator;
use wehrl::quadrature::{self, QuadratureSpec};
use wehrl::{ModePartition, StateSpec};

use crate::output::Rendered;
use crate::InputError;

pub const MAX_FOCK: u32 = 50;
pub const MAX_NOON: u32 = 10;

#[derive(Serialize)]
struct EurRow {
    grid_param: f64,
    wl_lhs: f64,
    bbm_lhs: f64,
    fl_lhs: f64,
    bound: f64,
    wl_deficit: f64,
    bbm_deficit: f64,
    fl_deficit: f64,
    cross_check_delta: Option<f64>,
    #[serde(flatten)]
    asymptotics: Option<Asymptotics>,
}

#[derive(Serialize)]
struct Asymptotics {
    wl_asymptote: Option<f64>,
    bbm_asymptote: Option<f64>,
}

impl EurRow {
    fn from_point(p: &EurPoint) -> Self {
        let r = &p.report;
        Self {
            grid_param: p.grid_param,
            wl_lhs: r.wl_lhs,
            bbm_lhs: r.bbm_lhs,
            fl_lhs: r.fl_lhs,
            bound: r.bound,
            wl_deficit: r.wl_deficit,
            bbm_deficit: r.bbm_deficit,
            fl_deficit: r.fl_deficit,
            cross_check_delta: r.cross_check_delta,
            asymptotics: None,
        }
    }
}

pub fn eur_fock(n_max: u32, asymptotics: bool, qs: &QuadratureSpec) -> Result<Rendered> {
    if n_max > MAX_FOCK {
        return Err(InputError(format!("--n-max must be at most {MAX_FOCK}, got {n_max}")).into());
    }
    let points = eur::eur_sweep(&SweepFamily::Fock { n_max }, qs).map_err(|e| locate_failure(e, n_max, qs))?;
    let rows: Vec<EurRow> = points
        .iter()
        .map(|p| {
            let mut row = EurRow::from_point(p);
            if asymptotics {
                let n = p.grid_param as u32;
                // both large-n forms diverge at n = 0
                let valid = n > 0;
                row.asymptotics = Some(Asymptotics {
                    wl_asymptote: valid.then(|| entropies::wehrl_fock_stirling(n) + wehrl::special::LN_PI),
                    bbm_asymptote: valid.then(|| 2.0 * entropies::differential_entropy_fock_asymptotic(n)),
                });
            }
            row
        })
        .collect();
    Rendered::table(&rows)
}

/// Re-runs the Fock points one by one to name the first failing `n`.
fn locate_failure(err: wehrl::Error, n_max: u32, qs: &QuadratureSpec) -> anyhow::Error {
    if matches!(err, wehrl::Error::ToleranceNotReached { .. }) {
        for n in 0..=n_max {
            if let Err(e) = eur::eur_report(&StateSpec::Fock { n }, qs) {
                return anyhow::Error::new(e).context(format!("Fock state n = {n}"));
            }
        }
    }
    err.into()
}

pub fn eur_mixture(steps: usize, qs: &QuadratureSpec) -> Result<Rendered> {
    if steps < 2 {
        return Err(InputError(format!("--steps must be at least 2, got {steps}")).into());
    }
    let points = eur::eur_sweep(&SweepFamily::Mixture01 { steps }, qs)?;
    let rows: Vec<EurRow> = points.iter().map(EurRow::from_point).collect();
    let crossover = eur::mixture_crossover(steps, qs)?;
    let mut rendered = Rendered::table(&rows)?;
    rendered.json["crossover_q"] = serde_json::to_value(crossover)?;
    rendered.notes.push(match crossover {
        Some(q) => format!("crossover_q,{}", crate::output::format_sig12(q)),
        None => "crossover_q,".to_string(),
    });
    Ok(rendered)
}

pub fn eur_thermal(beta_min: f64, beta_max: f64, points: usize, qs: &QuadratureSpec) -> Result<Rendered> {
    if !(beta_min > 0.0 && beta_max >= beta_min && points >= 1) {
        return Err(InputError(format!(
            "need 0 < --beta-min ≤ --beta-max and --points ≥ 1, got {beta_min}, {beta_max}, {points}"
        ))
        .into());
    }
    let family = SweepFamily::Thermal {
        beta_min,
        beta_max,
        points,
    };
    let rows: Vec<EurRow> = eur::eur_sweep(&family, qs)?.iter().map(EurRow::from_point).collect();
    Rendered::table(&rows)
}

#[derive(Serialize)]
struct TmssRow {
    lambda: f64,
    i_w_closed: f64,
    i_w_numeric: f64,
    conditional_closed: f64,
    conditional_numeric: f64,
    quantum_mi: f64,
    bound_holds: bool,
    cross_check_delta: f64,
}

pub fn bipartite_tmss(grid: &[f64], qs: &QuadratureSpec) -> Result<Rendered> {
    let mut rows = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let cov = CovarianceModel::tmss(lambda).map_err(|e| InputError(e.to_string()))?;
        let closed = gaussian_bipartite_closed(&cov)?;
        let numeric = bipartite_entropies(&HusimiEvaluator::Gaussian(cov), qs)?;
        let quantum_mi = entropies::quantum_mutual_information_tmss(lambda);
        let i_w_numeric = numeric.mutual.max(0.0);
        rows.push(TmssRow {
            lambda,
            i_w_closed: entropies::wehrl_mutual_information_tmss(lambda),
            i_w_numeric,
            conditional_closed: closed.conditional,
            conditional_numeric: numeric.conditional,
            quantum_mi,
            bound_holds: i_w_numeric <= quantum_mi + qs.abs_tol,
            cross_check_delta: (closed.mutual - numeric.mutual)
                .abs()
                .max((closed.conditional - numeric.conditional).abs()),
        });
    }
    Rendered::table(&rows)
}

#[derive(Serialize)]
struct NoonRow {
    n: u32,
    i_w: f64,
    conditional: f64,
    joint: f64,
    local: f64,
    quantum_mi: f64,
    bound_holds: bool,
    /// Relative-entropy route against the three-entropy route.
    cross_check_delta: f64,
}

pub fn bipartite_noon(n_max: u32, qs: &QuadratureSpec) -> Result<Rendered> {
    if n_max > MAX_NOON {
        return Err(InputError(format!("--n-max must be at most {MAX_NOON}, got {n_max}")).into());
    }
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let e = bipartite_entropies(&HusimiEvaluator::Noon(n), qs)
            .with_context(|| format!("N00N state N = {n}"))?;
        let quantum_mi = entropies::quantum_mutual_information_noon(n);
        let i_w = e.mutual.max(0.0);
        rows.push(NoonRow {
            n,
            i_w,
            conditional: e.conditional,
            joint: e.joint,
            local: e.local_a,
            quantum_mi,
            bound_holds: i_w <= quantum_mi + qs.abs_tol.max(e.error_estimate),
            cross_check_delta: e.cross_check_delta,
        });
    }
    Rendered::table(&rows)
}

#[derive(Serialize)]
struct GaussianReport {
    modes_a: usize,
    modes_b: usize,
    admissible: bool,
    symplectic_eigenvalues: Vec<f64>,
    wehrl_joint: f64,
    wehrl_joint_numeric: f64,
    cross_check_delta: f64,
    wehrl_local_a: Option<f64>,
    wehrl_local_b: Option<f64>,
    conditional: Option<f64>,
    mutual: Option<f64>,
    /// Partial-transpose verdict, 1+1 modes only.
    ppt_entangled: Option<bool>,
    det_c: f64,
    det_v_shifted: f64,
    uncertainty_holds: bool,
    det_c_a: Option<f64>,
    det_c_b: Option<f64>,
}

pub fn gaussian_report(path: &Path, partition: Option<(usize, usize)>, qs: &QuadratureSpec) -> Result<Rendered> {
    let rows = read_matrix(path)?;
    let d = rows.len();
    let (n_a, n_b) = partition.unwrap_or((d / 2, 0));
    let partition = ModePartition::new(n_a, n_b).map_err(|e| InputError(e.to_string()))?;
    let cov = CovarianceModel::from_rows(&rows, partition).map_err(|e| InputError(e.to_string()))?;

    let joint = gaussian::wehrl_gaussian_joint(&cov);
    let numeric = quadrature::entropy_functional(&HusimiEvaluator::Gaussian(cov.clone()), qs)?.value;
    let bipartite = partition.is_bipartite();
    let closed = if bipartite {
        Some(gaussian_bipartite_closed(&cov)?)
    } else {
        None
    };
    let ppt_entangled = if partition == ModePartition::one_plus_one() {
        let reflected = gaussian::ppt_reflect(cov.v(), partition);
        let min = gaussian::symplectic_eigenvalues(&reflected)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Some(min < 0.5 - gaussian::ADMISSIBILITY_TOL)
    } else {
        None
    };
    let report = GaussianReport {
        modes_a: n_a,
        modes_b: n_b,
        admissible: true,
        symplectic_eigenvalues: cov.symplectic_eigenvalues(),
        wehrl_joint: joint,
        wehrl_joint_numeric: numeric,
        cross_check_delta: (joint - numeric).abs(),
        wehrl_local_a: closed.map(|c| c.local_a),
        wehrl_local_b: closed.map(|c| c.local_b),
        conditional: closed.map(|c| c.conditional),
        mutual: closed.map(|c| c.mutual),
        ppt_entangled,
        det_c: cov.det_c(),
        det_v_shifted: cov.det_v_shifted(),
        uncertainty_holds: cov.det_c() <= 1.0 + gaussian::ADMISSIBILITY_TOL,
        det_c_a: bipartite.then(|| cov.c_a().determinant()),
        det_c_b: bipartite.then(|| cov.c_b().determinant()),
    };
    Rendered::record(&report)
}

/// Reads a square matrix given as a JSON array of rows or as CSV.
fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| InputError(format!("covariance JSON: {e}")))?
    } else {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        reader
            .records()
            .map(|rec| {
                let rec = rec.map_err(|e| InputError(format!("covariance CSV: {e}")))?;
                rec.iter()
                    .map(|s| s.parse::<f64>().map_err(|e| InputError(format!("covariance CSV entry {s:?}: {e}"))))
                    .collect::<Result<Vec<f64>, InputError>>()
            })
            .collect::<Result<_, _>>()?
    };
    let d = rows.len();
    if d == 0 || d % 2 == 1 || rows.iter().any(|r| r.len() != d) {
        return Err(InputError(format!("covariance must be a square matrix of even size, got {d} rows")).into());
    }
    Ok(rows)
}

pub fn entropy(state_json: &str, qs: &QuadratureSpec) -> Result<Rendered> {
    let spec: StateSpec = serde_json::from_str(state_json).map_err(|e| InputError(format!("state JSON: {e}")))?;
    wehrl::validate(&spec).map_err(|e| InputError(e.to_string()))?;
    let report = entropies::entropy_report(&spec, qs)?;
    let mut rendered = Rendered::record(&report)?;
    // the CSV form carries the state as one compact JSON cell
    if let Some(row) = rendered.rows[0].as_object_mut() {
        row.insert("state".into(), serde_json::Value::String(serde_json::to_string(&spec)?));
    }
    Ok(rendered)
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!(InputError(format!("bad grid value {s:?}"))))
        })
        .collect()
}
