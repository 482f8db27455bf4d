//! Deterministic phase-space quadrature.
//!
//! Integrals are taken against the measure `d^n x d^n p / (2π)^n`. The node
//! layout follows the symmetry of the Husimi function that weights the
//! integrand:
//!
//! | layout              | used for                                  | nodes                                  |
//! |---------------------|-------------------------------------------|----------------------------------------|
//! | radial-1d           | rotation-invariant single-mode Q          | Gauss–Legendre panels in `ρ`           |
//! | polar-2d            | general single-mode Q                     | panels in `ρ` × panels in `θ`          |
//! | polar-reduced-3d    | N00N states                               | `(max radius, ratio, phase difference)`|
//! | tensor-cartesian    | Gaussian envelopes                        | probabilists' Gauss–Hermite, whitened  |
//!
//! A result is accepted once two successive node doublings agree within
//! `max(abs_tol, rel_tol·|I|)`. Work is split into units (panels or leading
//! nodes) whose partial sums are reduced pairwise in a fixed order, so the
//! value does not depend on the number of threads.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::husimi::HusimiEvaluator;
use crate::state::Subsystem;

/// Nodes per Gauss–Legendre panel.
pub const GL_ORDER: usize = 16;

/// `ln(1e-300)`: nodes where Q falls below this contribute nothing.
pub const LN_Q_FLOOR: f64 = -690.775_527_898_213_7;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            dp = nf * (x * pn - p0) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Probabilists' Gauss–Hermite rule: `E[f(Z)] ≈ Σ w_i f(z_i)` for `Z ~ N(0, 1)`.
///
/// Golub–Welsch on the Jacobi matrix with off-diagonal `√k`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // symmetrize away eigen-solver noise
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(x, w)| (x, w / total)).unzip()
}

/// Roots of the physicists' Hermite polynomial `H_n`, ascending.
pub fn hermite_roots(n: usize) -> Vec<f64> {
    gauss_hermite(n)
        .0
        .into_iter()
        .map(|z| z / std::f64::consts::SQRT_2)
        .collect()
}

/// Node layout family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Pick from the symmetry of the weighting Husimi function.
    Auto,
    #[serde(rename = "radial-1d")]
    Radial1d,
    #[serde(rename = "polar-2d")]
    Polar2d,
    #[serde(rename = "polar-reduced-3d")]
    PolarReduced3d,
    TensorCartesian,
}

/// Integration settings. Node counts refer to the first level; each
/// escalation doubles them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub strategy: Strategy,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub cartesian_nodes_per_dim: usize,
    /// Phase-space radius override; by default sized from the state.
    pub radial_cutoff: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of node doublings.
    pub max_doublings: u32,
    pub parallelism: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            strategy: Strategy::Auto,
            radial_nodes: 400,
            angular_nodes: 128,
            cartesian_nodes_per_dim: 8,
            radial_cutoff: None,
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_doublings: 3,
            parallelism: 1,
        }
    }
}

impl QuadratureSpec {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_parallelism(mut self, threads: usize) -> Self {
        self.parallelism = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes == 0 || self.angular_nodes == 0 || self.cartesian_nodes_per_dim == 0 {
            return Err(Error::InvalidQuadrature("node counts must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidQuadrature("tolerances must be positive"));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidQuadrature("parallelism must be at least 1"));
        }
        if let Some(r) = self.radial_cutoff {
            if !(r > 0.0) {
                return Err(Error::InvalidQuadrature("radial cutoff must be positive"));
            }
        }
        Ok(())
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn radial_panels(&self, level: u32) -> usize {
        self.radial_nodes.div_ceil(GL_ORDER).max(1) << level
    }

    fn angular_panels(&self, level: u32) -> usize {
        self.angular_nodes.div_ceil(GL_ORDER).max(1) << level
    }

    fn reduced_panels(&self, level: u32) -> usize {
        (self.angular_nodes / 2).div_ceil(GL_ORDER).max(1) << level
    }
}

/// Value of an integral with its estimated error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

#[derive(Debug, Clone)]
enum Layout {
    Radial {
        cutoff: f64,
    },
    Polar {
        cutoff: f64,
    },
    /// Both radii up to `cutoff`; the integrand may depend on the phases
    /// only through `cos(order · (θ_A − θ_B))`.
    NoonReduced {
        cutoff: f64,
        order: u32,
    },
    /// `r = L z` with `L Lᵀ` the envelope covariance.
    Cartesian {
        chol: DMatrix<f64>,
        ln_jac: f64,
    },
    /// One sub-layout per mixture component, weighted by the component.
    Split(Vec<(f64, HusimiEvaluator, Layout)>),
}

impl Layout {
    fn for_evaluator(q: &HusimiEvaluator, spec: &QuadratureSpec, weighted: bool) -> Result<Self> {
        let cutoff = || -> Result<f64> {
            match spec.radial_cutoff {
                Some(r) => {
                    let tail = q.radial_tail_bound(0.5 * r * r);
                    if tail > spec.abs_tol / 10.0 {
                        return Err(Error::InvalidQuadrature(
                            "radial cutoff leaves more than abs_tol/10 of the mass outside",
                        ));
                    }
                    Ok(r)
                }
                None => Ok((2.0 * q.radial_cutoff_u()).sqrt()),
            }
        };
        let dim = q.dim();
        let strategy = match spec.strategy {
            Strategy::Auto => match q {
                _ if dim == 2 && q.is_rotation_invariant() && !matches!(q, HusimiEvaluator::Gaussian(_)) => {
                    Strategy::Radial1d
                }
                HusimiEvaluator::Noon(_) => Strategy::PolarReduced3d,
                _ if dim == 2 && !matches!(q, HusimiEvaluator::Gaussian(_) | HusimiEvaluator::Mixture(_)) => {
                    Strategy::Polar2d
                }
                _ => Strategy::TensorCartesian,
            },
            s => s,
        };
        match strategy {
            Strategy::Radial1d => {
                if dim != 2 || !q.is_rotation_invariant() {
                    return Err(Error::InvalidQuadrature(
                        "radial-1d needs a rotation-invariant single-mode density",
                    ));
                }
                Ok(Layout::Radial { cutoff: cutoff()? })
            }
            Strategy::Polar2d => {
                if dim != 2 {
                    return Err(Error::InvalidQuadrature("polar-2d needs a single-mode density"));
                }
                Ok(Layout::Polar { cutoff: cutoff()? })
            }
            Strategy::PolarReduced3d => match q {
                HusimiEvaluator::Noon(n) => Ok(Layout::NoonReduced {
                    cutoff: cutoff()?,
                    order: (*n).max(1),
                }),
                _ => Err(Error::InvalidQuadrature(
                    "polar-reduced-3d is specific to N00N states",
                )),
            },
            Strategy::TensorCartesian => match q {
                HusimiEvaluator::Gaussian(cov) => {
                    let d = cov.dim();
                    let sigma = cov.v() + DMatrix::identity(d, d) * 0.5;
                    let chol = sigma.cholesky().ok_or(Error::SingularMatrix)?.l();
                    let ln_jac = -0.5 * cov.ln_det_c();
                    Ok(Layout::Cartesian { chol, ln_jac })
                }
                HusimiEvaluator::Mixture(parts) if weighted => Ok(Layout::Split(
                    parts
                        .iter()
                        .map(|(t, c)| {
                            let sub = QuadratureSpec {
                                strategy: Strategy::TensorCartesian,
                                ..spec.clone()
                            };
                            Ok((*t, c.clone(), Layout::for_evaluator(c, &sub, true)?))
                        })
                        .collect::<Result<_>>()?,
                )),
                _ => {
                    // isotropic envelope matched to the occupation scale
                    let s2 = q.energy_scale() + 1.0;
                    let chol = DMatrix::identity(dim, dim) * s2.sqrt();
                    Ok(Layout::Cartesian {
                        chol,
                        ln_jac: 0.5 * dim as f64 * s2.ln(),
                    })
                }
            },
            Strategy::Auto => unreachable!(),
        }
    }
}

/// Nodes of one refinement level of a layout.
struct LevelNodes<'a> {
    layout: &'a Layout,
    spec: &'a QuadratureSpec,
    level: u32,
    hermite: Option<(Vec<f64>, Vec<f64>)>,
}

impl<'a> LevelNodes<'a> {
    fn new(layout: &'a Layout, spec: &'a QuadratureSpec, level: u32) -> Self {
        let hermite = match layout {
            Layout::Cartesian { .. } | Layout::Split(_) => {
                Some(gauss_hermite(spec.cartesian_nodes_per_dim << level))
            }
            _ => None,
        };
        Self {
            layout,
            spec,
            level,
            hermite,
        }
    }

    fn units(&self) -> usize {
        units_of(self.layout, self.spec, self.level)
    }

    fn node_count(&self) -> usize {
        count_of(self.layout, self.spec, self.level)
    }
}

fn units_of(layout: &Layout, spec: &QuadratureSpec, level: u32) -> usize {
    match layout {
        Layout::Radial { .. } | Layout::Polar { .. } => spec.radial_panels(level),
        Layout::NoonReduced { .. } => 2 * spec.radial_panels(level),
        Layout::Cartesian { .. } => spec.cartesian_nodes_per_dim << level,
        Layout::Split(parts) => parts.iter().map(|(_, _, l)| units_of(l, spec, level)).sum(),
    }
}

fn count_of(layout: &Layout, spec: &QuadratureSpec, level: u32) -> usize {
    let r = spec.radial_panels(level) * GL_ORDER;
    match layout {
        Layout::Radial { .. } => r,
        Layout::Polar { .. } => r * spec.angular_panels(level) * GL_ORDER,
        Layout::NoonReduced { .. } => 2 * r * (spec.reduced_panels(level) * GL_ORDER).pow(2),
        Layout::Cartesian { chol, .. } => (spec.cartesian_nodes_per_dim << level).pow(chol.nrows() as u32),
        Layout::Split(parts) => parts.iter().map(|(_, _, l)| count_of(l, spec, level)).sum(),
    }
}

/// Calls `visit(point, weight, ln_extra)` for every node of `unit`.
/// The integrand contributes `weight · exp(ln_extra) · f(point)`.
fn visit_unit(
    nodes: &LevelNodes<'_>,
    layout: &Layout,
    unit: usize,
    visit: &mut dyn FnMut(&[f64], f64, f64),
) {
    let (gl_x, gl_w) = gl_panel_rule();
    let spec = nodes.spec;
    let level = nodes.level;
    match layout {
        Layout::Radial { cutoff } => {
            let panels = spec.radial_panels(level);
            let h = cutoff / panels as f64;
            let a = unit as f64 * h;
            for (x, w) in gl_x.iter().zip(gl_w) {
                let rho = a + 0.5 * h * (x + 1.0);
                visit(&[rho, 0.0], 0.5 * h * w * rho, 0.0);
            }
        }
        Layout::Polar { cutoff } => {
            let panels = spec.radial_panels(level);
            let h = cutoff / panels as f64;
            let a = unit as f64 * h;
            let ang_panels = spec.angular_panels(level);
            let ht = 2.0 * PI / ang_panels as f64;
            for (x, w) in gl_x.iter().zip(gl_w) {
                let rho = a + 0.5 * h * (x + 1.0);
                let wr = 0.5 * h * w * rho;
                for k in 0..ang_panels {
                    let t0 = k as f64 * ht;
                    for (y, v) in gl_x.iter().zip(gl_w) {
                        let theta = t0 + 0.5 * ht * (y + 1.0);
                        let wt = 0.5 * ht * v / (2.0 * PI);
                        visit(&[rho * theta.cos(), rho * theta.sin()], wr * wt, 0.0);
                    }
                }
            }
        }
        Layout::NoonReduced { cutoff, order } => {
            let panels = spec.radial_panels(level);
            let triangle = unit / panels;
            let panel = unit % panels;
            let h = cutoff / panels as f64;
            let a = panel as f64 * h;
            let sp = spec.reduced_panels(level);
            let hs = 1.0 / sp as f64;
            let period = PI / *order as f64;
            let hd = period / sp as f64;
            // (1/2π)∫₀^{2π} g(cos(NΔ)) dΔ = (1/period) ∫₀^{period} g dΔ
            let phase_norm = 1.0 / period;
            for (x, w) in gl_x.iter().zip(gl_w) {
                let t = a + 0.5 * h * (x + 1.0);
                let wt = 0.5 * h * w;
                for ks in 0..sp {
                    for (y, v) in gl_x.iter().zip(gl_w) {
                        let s = (ks as f64 + 0.5 * (y + 1.0)) * hs;
                        let ws = 0.5 * hs * v;
                        let (ra, rb) = if triangle == 0 { (s * t, t) } else { (t, s * t) };
                        // r_A dr_A r_B dr_B = s t³ ds dt on either triangle
                        let radial = wt * ws * s * t * t * t;
                        for kd in 0..sp {
                            for (z, u) in gl_x.iter().zip(gl_w) {
                                let delta = (kd as f64 + 0.5 * (z + 1.0)) * hd;
                                let wd = 0.5 * hd * u * phase_norm;
                                let point = [ra, 0.0, rb * delta.cos(), -rb * delta.sin()];
                                visit(&point, radial * wd, 0.0);
                            }
                        }
                    }
                }
            }
        }
        Layout::Cartesian { chol, ln_jac } => {
            let (z_nodes, z_weights) = nodes.hermite.as_ref().expect("hermite rule");
            let n = z_nodes.len();
            let d = chol.nrows();
            let mut idx = vec![0usize; d];
            idx[0] = unit;
            let mut z = vec![0.0; d];
            let mut r = vec![0.0; d];
            loop {
                let mut w = 1.0;
                let mut z2 = 0.0;
                for k in 0..d {
                    z[k] = z_nodes[idx[k]];
                    w *= z_weights[idx[k]];
                    z2 += z[k] * z[k];
                }
                for i in 0..d {
                    r[i] = (0..=i).map(|j| chol[(i, j)] * z[j]).sum();
                }
                visit(&r, w, 0.5 * z2 + ln_jac);
                // odometer over dimensions 1..d
                let mut k = 1;
                while k < d {
                    idx[k] += 1;
                    if idx[k] < n {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k >= d {
                    break;
                }
            }
        }
        Layout::Split(_) => unreachable!("split layouts are dispatched per component"),
    }
}

pub(crate) fn thread_pool(threads: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = pools.lock().expect("pool cache poisoned");
    guard
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

/// Computes `f(i)` for `i in 0..count` and reduces pairwise in index order.
fn ordered_sum<F>(count: usize, parallelism: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials: Vec<f64> = if parallelism <= 1 {
        (0..count).map(&f).collect()
    } else {
        thread_pool(parallelism).install(|| (0..count).into_par_iter().map(&f).collect())
    };
    pairwise_sum(&partials)
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Runs levels `0, 1, …` until two successive values agree.
fn escalate<F>(spec: &QuadratureSpec, mut eval: F) -> Result<IntegralResult>
where
    F: FnMut(u32) -> (f64, usize),
{
    let (mut prev, mut nodes_used) = eval(0);
    let mut err = f64::INFINITY;
    for level in 1..=spec.max_doublings.max(1) {
        let (cur, n) = eval(level);
        nodes_used += n;
        if !cur.is_finite() {
            return Ok(IntegralResult {
                value: cur,
                error_estimate: 0.0,
                nodes_used,
            });
        }
        err = (cur - prev).abs() + 1e-14 * cur.abs().max(1.0);
        if err <= spec.tolerance_for(cur) {
            return Ok(IntegralResult {
                value: cur,
                error_estimate: err,
                nodes_used,
            });
        }
        prev = cur;
    }
    Err(Error::ToleranceNotReached {
        value: prev,
        error_estimate: err,
        nodes_used,
    })
}

/// `∫ Q(r) g(r, ln Q(r)) dμ` with nodes adapted to `q`.
///
/// Nodes with `Q < 1e-300` are skipped, which also realizes `0 ln 0 = 0`.
pub fn integrate_weighted<G>(q: &HusimiEvaluator, g: G, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    G: Fn(&[f64], f64) -> f64 + Sync,
{
    spec.validate()?;
    let layout = Layout::for_evaluator(q, spec, true)?;
    escalate(spec, |level| {
        let nodes = LevelNodes::new(&layout, spec, level);
        let value = match &layout {
            Layout::Split(parts) => {
                let mut offsets = Vec::with_capacity(parts.len());
                let mut total = 0;
                for (_, _, l) in parts {
                    offsets.push(total);
                    total += units_of(l, spec, level);
                }
                ordered_sum(total, spec.parallelism, |unit| {
                    let k = offsets.iter().rposition(|&o| o <= unit).unwrap();
                    let (t, component, sub) = &parts[k];
                    let mut acc = 0.0;
                    visit_unit(&nodes, sub, unit - offsets[k], &mut |r, w, ln_extra| {
                        let ln_q = q.ln_q(r);
                        if ln_q < LN_Q_FLOOR {
                            return;
                        }
                        let ln_c = component.ln_q(r);
                        acc += w * t * (ln_c + ln_extra).exp() * g(r, ln_q);
                    });
                    acc
                })
            }
            _ => ordered_sum(nodes.units(), spec.parallelism, |unit| {
                let mut acc = 0.0;
                visit_unit(&nodes, &layout, unit, &mut |r, w, ln_extra| {
                    let ln_q = q.ln_q(r);
                    if ln_q < LN_Q_FLOOR {
                        return;
                    }
                    acc += w * (ln_q + ln_extra).exp() * g(r, ln_q);
                });
                acc
            }),
        };
        (value, nodes.node_count())
    })
}

/// `∫ f(r) dμ` using the node layout adapted to the envelope `q`.
///
/// `f` should decay at least as fast as `q` does.
pub fn integrate<F>(q: &HusimiEvaluator, f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    let layout = Layout::for_evaluator(q, spec, false)?;
    escalate(spec, |level| {
        let nodes = LevelNodes::new(&layout, spec, level);
        let value = ordered_sum(nodes.units(), spec.parallelism, |unit| {
            let mut acc = 0.0;
            visit_unit(&nodes, &layout, unit, &mut |r, w, ln_extra| {
                let v = f(r);
                if v != 0.0 {
                    acc += w * ln_extra.exp() * v;
                }
            });
            acc
        });
        (value, nodes.node_count())
    })
}

/// `−∫ Q ln Q dμ`, the Wehrl entropy of `q`.
pub fn entropy_functional(q: &HusimiEvaluator, spec: &QuadratureSpec) -> Result<IntegralResult> {
    integrate_weighted(q, |_, ln_q| -ln_q, spec)
}

/// `∫ Q dμ`; one for every properly normalized Husimi function.
pub fn normalization(q: &HusimiEvaluator, spec: &QuadratureSpec) -> Result<IntegralResult> {
    integrate_weighted(q, |_, _| 1.0, spec)
}

/// `∫_{−half_width}^{half_width} f(x) dx` on Gauss–Legendre panels whose
/// boundaries include every point of `breakpoints` inside the interval.
///
/// With breakpoints present every panel is graded towards its ends, which
/// tames integrands like `f ln f` near simple zeros of `√f`.
pub fn integrate_line<F>(
    f: F,
    breakpoints: &[f64],
    half_width: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    let mut edges: Vec<f64> = std::iter::once(-half_width)
        .chain(breakpoints.iter().cloned().filter(|b| b.abs() < half_width))
        .chain(std::iter::once(half_width))
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let (gl_x, gl_w) = gl_panel_rule();
    escalate(spec, |level| {
        let h_max = 2.0 * half_width / spec.radial_panels(level) as f64;
        let mut panels = Vec::new();
        for win in edges.windows(2) {
            let m = ((win[1] - win[0]) / h_max).ceil().max(1.0) as usize;
            let h = (win[1] - win[0]) / m as f64;
            for k in 0..m {
                panels.push((win[0] + k as f64 * h, h));
            }
        }
        let graded = !breakpoints.is_empty();
        let value = ordered_sum(panels.len(), spec.parallelism, |i| {
            let (a, h) = panels[i];
            gl_x.iter()
                .zip(gl_w)
                .map(|(x, w)| {
                    let u = 0.5 * (x + 1.0);
                    if graded {
                        // x = a + h u²(3 − 2u) flattens the integrand at both panel ends
                        let jac = 6.0 * u * (1.0 - u);
                        0.5 * h * w * jac * f(a + h * u * u * (3.0 - 2.0 * u))
                    } else {
                        0.5 * h * w * f(a + h * u)
                    }
                })
                .sum()
        });
        (value, panels.len() * GL_ORDER)
    })
}

/// Local Husimi function at `kept` obtained by numerically integrating out
/// the other single-mode subsystem. Independent of the closed-form marginals.
pub fn marginal_numeric(
    q: &HusimiEvaluator,
    keep: Subsystem,
    kept: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let p = q.partition();
    if p != crate::state::ModePartition::one_plus_one() {
        return Err(Error::NotBipartite);
    }
    if kept.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: kept.len(),
        });
    }
    // any single-mode rotation-invariant envelope with the right reach will do
    let reach = HusimiEvaluator::Thermal(1.0 / (q.radial_cutoff_u() / 46.0).max(1e-3).ln_1p());
    let plane_spec = QuadratureSpec {
        strategy: Strategy::Polar2d,
        radial_cutoff: Some((2.0 * q.radial_cutoff_u()).sqrt()),
        ..spec.clone()
    };
    let result = integrate(
        &reach,
        |r| {
            let point = match keep {
                Subsystem::A => [kept[0], kept[1], r[0], r[1]],
                Subsystem::B => [r[0], r[1], kept[0], kept[1]],
            };
            q.q(&point)
        },
        &QuadratureSpec {
            radial_cutoff: None,
            ..plane_spec
        },
    )?;
    Ok(result.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::CovarianceModel;
    use crate::state::ModePartition;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        let s: f64 = w.iter().sum();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_abs_diff_eq!(m, 2.0 / 31.0, epsilon = 1e-14);
    }

    #[test]
    fn hermite_rule_moments() {
        let (z, w) = gauss_hermite(10);
        let m2: f64 = z.iter().zip(&w).map(|(z, w)| w * z * z).sum();
        let m4: f64 = z.iter().zip(&w).map(|(z, w)| w * z.powi(4)).sum();
        let m18: f64 = z.iter().zip(&w).map(|(z, w)| w * z.powi(18)).sum();
        assert_abs_diff_eq!(m2, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m4, 3.0, epsilon = 1e-12);
        // (18-1)!! = 34459425
        assert_abs_diff_eq!(m18 / 34_459_425.0, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hermite_roots_are_roots() {
        for n in [1usize, 2, 5, 12] {
            for x in hermite_roots(n) {
                let h = crate::special::hermite_function(n as u32, x);
                assert!(h.abs() < 1e-12, "H_{n}({x}) = {h}");
            }
        }
        assert!(hermite_roots(0).is_empty());
    }

    #[test]
    fn vacuum_envelope_normalization() {
        let spec = QuadratureSpec::default();
        let vac = HusimiEvaluator::fock(0);
        let r = normalization(&vac, &spec).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
        assert!(r.error_estimate.is_finite());
    }

    #[test]
    fn fock_three_normalized() {
        let r = normalization(&HusimiEvaluator::fock(3), &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn ground_state_entropy() {
        let r = entropy_functional(&HusimiEvaluator::fock(0), &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn first_excited_entropy() {
        let r = entropy_functional(&HusimiEvaluator::fock(1), &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 + crate::special::EULER_GAMMA, epsilon = 1e-8);
    }

    #[test]
    fn tmss_mutual_information_integral() {
        let q = HusimiEvaluator::Gaussian(CovarianceModel::tmss(0.5).unwrap());
        let prod = q.product_of_marginals().unwrap();
        let r = integrate_weighted(&q, |r, ln_q| ln_q - prod.ln_q(r), &QuadratureSpec::default())
            .unwrap();
        assert_abs_diff_eq!(r.value, -(0.75f64.ln()), epsilon = 1e-8);
    }

    #[test]
    fn line_integral_over_gaussian() {
        let r = integrate_line(
            |x| (-x * x).exp() / PI.sqrt(),
            &[],
            9.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let q = HusimiEvaluator::Noon(2);
        let spec = QuadratureSpec {
            radial_nodes: 64,
            angular_nodes: 32,
            max_doublings: 1,
            abs_tol: 1.0,
            ..QuadratureSpec::default()
        };
        let one = entropy_functional(&q, &spec).unwrap();
        let four = entropy_functional(&q, &spec.clone().with_parallelism(4)).unwrap();
        assert_eq!(one.value.to_bits(), four.value.to_bits());
    }

    #[test]
    fn too_small_cutoff_rejected() {
        let spec = QuadratureSpec {
            radial_cutoff: Some(2.0),
            ..QuadratureSpec::default()
        };
        assert!(matches!(
            entropy_functional(&HusimiEvaluator::fock(4), &spec),
            Err(Error::InvalidQuadrature(_))
        ));
    }

    #[test]
    fn escalation_gives_up() {
        let spec = QuadratureSpec {
            radial_nodes: 16,
            angular_nodes: 16,
            max_doublings: 1,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..QuadratureSpec::default()
        };
        let r = entropy_functional(&HusimiEvaluator::Noon(3), &spec);
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. })));
    }

    #[test]
    fn numeric_marginal_matches_closed_form() {
        let cov = CovarianceModel::tmss(0.4).unwrap();
        let q = HusimiEvaluator::Gaussian(cov);
        let closed = q.marginal(Subsystem::A).unwrap();
        let spec = QuadratureSpec::default();
        for pt in [[0.0, 0.0], [0.8, -0.4]] {
            let num = marginal_numeric(&q, Subsystem::A, &pt, &spec).unwrap();
            assert_abs_diff_eq!(num, closed.q(&pt), epsilon = 1e-9);
        }
        let _ = ModePartition::one_plus_one();
    }
}
