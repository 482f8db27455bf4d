//! Covariance-matrix algebra for zero-mean Gaussian states.
//!
//! Matrices are stored in the grouped ordering `(x_A…, p_A…, x_B…, p_B…)`
//! that phase-space points use. The symplectic spectrum is computed in the
//! per-mode interleaved ordering `(x_1, p_1, x_2, p_2, …)` with
//! `Ω = 𝟙 ⊗ J`; [`CovarianceModel::interleaved_v`] performs the permutation.
//! For a 1+1-mode system both orderings coincide.
//!
//! The Husimi precision matrix is `C = (V + ½𝟙)⁻¹`, so that
//! `Q(r) = √det C · exp(−½ rᵀ C r)` under the measure `d^{2n}r / (2π)^n`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{ModePartition, Subsystem};

/// Slack on symplectic eigenvalues below 1/2.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;
/// Relative asymmetry tolerated before a matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Both purity displays of the 1+1 normal form must hold to this precision.
pub const PURITY_TOL: f64 = 1e-9;

/// Symplectic covariance `V`, its Husimi form `C` and the mode partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModel {
    v: DMatrix<f64>,
    c: DMatrix<f64>,
    ln_det_c: f64,
    partition: ModePartition,
}

impl CovarianceModel {
    /// Builds the model from `V`, checking symmetry and admissibility.
    pub fn from_v(v: DMatrix<f64>, partition: ModePartition) -> Result<Self> {
        let dim = partition.phase_dim();
        if v.nrows() != dim || v.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.nrows().max(v.ncols()),
            });
        }
        check_symmetric(&v)?;
        let nu = symplectic_eigenvalues(&interleave(&v, partition))?;
        let min = nu.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < 0.5 - ADMISSIBILITY_TOL {
            return Err(Error::InadmissibleCovariance { min_eigenvalue: min });
        }
        let shifted = &v + DMatrix::identity(dim, dim) * 0.5;
        let chol = shifted.cholesky().ok_or(Error::SingularMatrix)?;
        let ln_det_shifted: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let mut c = chol.inverse();
        symmetrize(&mut c);
        Ok(Self {
            v,
            c,
            ln_det_c: -ln_det_shifted,
            partition,
        })
    }

    /// Builds the model from the Husimi precision matrix `C`.
    pub fn from_c(c: DMatrix<f64>, partition: ModePartition) -> Result<Self> {
        Self::from_v(v_from_c(&c)?, partition)
    }

    /// Builds the model from a row-major nested array (JSON form).
    pub fn from_rows(rows: &[Vec<f64>], partition: ModePartition) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let v = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_v(v, partition)
    }

    /// Vacuum on every mode, `V = ½𝟙`, `C = 𝟙`.
    pub fn vacuum(partition: ModePartition) -> Self {
        let d = partition.phase_dim();
        Self::from_v(DMatrix::identity(d, d) * 0.5, partition).expect("vacuum is admissible")
    }

    /// Single-mode thermal state with mean occupation `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        Self::from_v(
            DMatrix::identity(2, 2) * (nbar + 0.5),
            ModePartition::single_mode(),
        )
    }

    /// Single-mode squeezed vacuum, `x` stretched by `e^κ` and `p` by `e^{−κ}`.
    pub fn squeezed_vacuum(kappa: f64) -> Self {
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.5 * (2.0 * kappa).exp(),
            0.5 * (-2.0 * kappa).exp(),
        ]));
        Self::from_v(v, ModePartition::single_mode()).expect("squeezed vacuum is pure")
    }

    /// Two-mode squeezed vacuum: `C_A = C_B = 𝟙`, `C_M = diag(λ, −λ)`.
    pub fn tmss(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        let mut c = DMatrix::identity(4, 4);
        c[(0, 2)] = lambda;
        c[(2, 0)] = lambda;
        c[(1, 3)] = -lambda;
        c[(3, 1)] = -lambda;
        Self::from_c(c, ModePartition::one_plus_one())
    }

    pub fn partition(&self) -> ModePartition {
        self.partition
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn v_rows(&self) -> Vec<Vec<f64>> {
        self.v.row_iter().map(|r| r.iter().cloned().collect()).collect()
    }

    pub fn ln_det_c(&self) -> f64 {
        self.ln_det_c
    }

    pub fn det_c(&self) -> f64 {
        self.ln_det_c.exp()
    }

    /// `det(V + ½𝟙)`, the reciprocal of `det C`.
    pub fn det_v_shifted(&self) -> f64 {
        let d = self.dim();
        (&self.v + DMatrix::identity(d, d) * 0.5).determinant()
    }

    fn split(&self) -> usize {
        2 * self.partition.n_a
    }

    pub fn c_a(&self) -> DMatrix<f64> {
        let k = self.split();
        self.c.view((0, 0), (k, k)).into_owned()
    }

    pub fn c_b(&self) -> DMatrix<f64> {
        let k = self.split();
        let m = self.dim() - k;
        self.c.view((k, k), (m, m)).into_owned()
    }

    pub fn c_m(&self) -> DMatrix<f64> {
        let k = self.split();
        let m = self.dim() - k;
        self.c.view((0, k), (k, m)).into_owned()
    }

    pub fn v_block(&self, keep: Subsystem) -> DMatrix<f64> {
        let k = self.split();
        let m = self.dim() - k;
        match keep {
            Subsystem::A => self.v.view((0, 0), (k, k)).into_owned(),
            Subsystem::B => self.v.view((k, k), (m, m)).into_owned(),
        }
    }

    pub fn v_m(&self) -> DMatrix<f64> {
        let k = self.split();
        self.v.view((0, k), (k, self.dim() - k)).into_owned()
    }

    /// Covariance of the reduced state on `keep`, as a monopartite model.
    pub fn reduced(&self, keep: Subsystem) -> Result<Self> {
        let modes = match keep {
            Subsystem::A => self.partition.n_a,
            Subsystem::B => self.partition.n_b,
        };
        if !self.partition.is_bipartite() {
            return Err(Error::NotBipartite);
        }
        Self::from_v(self.v_block(keep), ModePartition::new(modes, 0)?)
    }

    /// Reduced Husimi precision through the Schur complement,
    /// e.g. `C_B − C_Mᵀ C_A⁻¹ C_M` when keeping B.
    pub fn schur_reduced_c(&self, keep: Subsystem) -> Result<DMatrix<f64>> {
        if !self.partition.is_bipartite() {
            return Err(Error::NotBipartite);
        }
        let (own, other, mix) = match keep {
            Subsystem::B => (self.c_b(), self.c_a(), self.c_m()),
            Subsystem::A => (self.c_a(), self.c_b(), self.c_m().transpose()),
        };
        let inv = other.try_inverse().ok_or(Error::DegenerateBlock)?;
        let mut s = own - mix.transpose() * inv * &mix;
        symmetrize(&mut s);
        Ok(s)
    }

    /// `V` permuted into per-mode `(x_i, p_i)` adjacency.
    pub fn interleaved_v(&self) -> DMatrix<f64> {
        interleave(&self.v, self.partition)
    }

    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_eigenvalues(&self.interleaved_v()).expect("validated at construction")
    }

    /// Applies `V ↦ S V Sᵀ` for a symplectic `S` given in grouped ordering.
    pub fn transform(&self, s: &DMatrix<f64>) -> Result<Self> {
        let mut v = s * &self.v * s.transpose();
        symmetrize(&mut v);
        Self::from_v(v, self.partition)
    }

    /// Squeezes one mode of one subsystem: `x ↦ e^κ x`, `p ↦ e^{−κ} p`.
    pub fn local_squeeze(&self, sub: Subsystem, mode: usize, kappa: f64) -> Result<Self> {
        let (offset, modes) = match sub {
            Subsystem::A => (0, self.partition.n_a),
            Subsystem::B => (2 * self.partition.n_a, self.partition.n_b),
        };
        if mode >= modes {
            return Err(Error::DimensionMismatch {
                expected: modes,
                actual: mode + 1,
            });
        }
        let d = self.dim();
        let mut s = DMatrix::identity(d, d);
        s[(offset + mode, offset + mode)] = kappa.exp();
        s[(offset + modes + mode, offset + modes + mode)] = (-kappa).exp();
        self.transform(&s)
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NonSymmetric(asym));
    }
    Ok(())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Grouped `(x_A…, p_A…, x_B…, p_B…)` → interleaved `(x_1, p_1, …)` permutation.
pub fn interleave_permutation(partition: ModePartition) -> Vec<usize> {
    let (n, m) = (partition.n_a, partition.n_b);
    let mut perm = Vec::with_capacity(2 * (n + m));
    for j in 0..n {
        perm.push(j);
        perm.push(n + j);
    }
    for j in 0..m {
        perm.push(2 * n + j);
        perm.push(2 * n + m + j);
    }
    perm
}

fn interleave(v: &DMatrix<f64>, partition: ModePartition) -> DMatrix<f64> {
    let perm = interleave_permutation(partition);
    DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(perm[i], perm[j])])
}

/// `Ω = 𝟙 ⊗ J` with `J = ((0, 1), (−1, 0))`, interleaved ordering.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// The symplectic form in grouped ordering for the given partition.
pub fn symplectic_form_grouped(partition: ModePartition) -> DMatrix<f64> {
    let perm = interleave_permutation(partition);
    let omega = symplectic_form(partition.total_modes());
    let d = perm.len();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(perm[i], perm[j])] = omega[(i, j)];
        }
    }
    out
}

/// `C = (V + ½𝟙)⁻¹` with admissibility checks.
pub fn c_from_v(v: &DMatrix<f64>, partition: ModePartition) -> Result<CovarianceModel> {
    CovarianceModel::from_v(v.clone(), partition)
}

/// `V = C⁻¹ − ½𝟙`.
pub fn v_from_c(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(c)?;
    let d = c.nrows();
    let chol = c.clone().cholesky().ok_or(Error::SingularMatrix)?;
    let mut v = chol.inverse() - DMatrix::identity(d, d) * 0.5;
    symmetrize(&mut v);
    Ok(v)
}

/// Symplectic eigenvalues of a positive-definite `V` in interleaved ordering,
/// sorted ascending, one per mode.
///
/// They are the moduli of the `±ν` eigenvalue pairs of `iΩV`. We obtain them
/// from the symmetric matrix `−(V^{½} Ω V^{½})²`, which has the same spectrum
/// `ν²`, each value twice.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let d = v.nrows();
    if d != v.ncols() || d % 2 != 0 || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: d + d % 2,
            actual: v.ncols(),
        });
    }
    check_symmetric(v)?;
    let eig = SymmetricEigen::new(v.clone());
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::InadmissibleCovariance { min_eigenvalue: 0.0 });
    }
    let sqrt_diag = eig.eigenvalues.map(f64::sqrt);
    let sqrt_v = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_diag) * eig.eigenvectors.transpose();
    let a = &sqrt_v * symplectic_form(d / 2) * &sqrt_v;
    let mut m = a.transpose() * &a;
    symmetrize(&mut m);
    let mut sq: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
    sq.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(sq
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Partial transposition: flips the sign of subsystem B's momenta.
pub fn ppt_reflect(v: &DMatrix<f64>, partition: ModePartition) -> DMatrix<f64> {
    let (n, m) = (partition.n_a, partition.n_b);
    let mut out = v.clone();
    for k in (2 * n + m)..(2 * n + 2 * m) {
        for j in 0..out.ncols() {
            out[(k, j)] = -out[(k, j)];
        }
        for i in 0..out.nrows() {
            out[(i, k)] = -out[(i, k)];
        }
    }
    out
}

/// `S_W = −½ ln det C + N + M`.
pub fn wehrl_gaussian_joint(cov: &CovarianceModel) -> f64 {
    -0.5 * cov.ln_det_c() + cov.partition().total_modes() as f64
}

/// Wehrl entropy of one subsystem, e.g. `−½ ln det C + ½ ln det C_A + M` for B.
pub fn wehrl_gaussian_local(cov: &CovarianceModel, keep: Subsystem) -> Result<f64> {
    let p = cov.partition();
    if !p.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    let (traced, modes) = match keep {
        Subsystem::B => (cov.c_a(), p.n_b),
        Subsystem::A => (cov.c_b(), p.n_a),
    };
    let ln_det_traced = ln_det_spd(&traced)?;
    Ok(-0.5 * cov.ln_det_c() + 0.5 * ln_det_traced + modes as f64)
}

/// Wehrl conditional entropy and mutual information of a bipartite Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWitness {
    pub conditional: f64,
    pub mutual: f64,
}

/// `S_W(A|B) = N − ½ ln det C_A` and `I_W = ½ ln(det C_A det C_B / det C)`.
pub fn gaussian_witness(cov: &CovarianceModel) -> Result<GaussianWitness> {
    let p = cov.partition();
    if !p.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    let ln_a = ln_det_spd(&cov.c_a())?;
    let ln_b = ln_det_spd(&cov.c_b())?;
    Ok(GaussianWitness {
        conditional: p.n_a as f64 - 0.5 * ln_a,
        mutual: (0.5 * (ln_a + ln_b - cov.ln_det_c())).max(0.0),
    })
}

fn ln_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or(Error::DegenerateBlock)?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Wehrl relative entropy between two zero-mean Gaussian Husimi functions:
/// `½[tr(C_σ C_ρ⁻¹) − d + ln det C_ρ − ln det C_σ]`.
pub fn gaussian_relative_entropy(rho: &CovarianceModel, sigma: &CovarianceModel) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let d = rho.dim();
    let sigma_rho = rho.v() + DMatrix::identity(d, d) * 0.5;
    let tr = (sigma.c() * sigma_rho).trace();
    Ok(0.5 * (tr - d as f64 + rho.ln_det_c() - sigma.ln_det_c()))
}

/// von Neumann entropy from the symplectic spectrum,
/// `Σ (ν+½) ln(ν+½) − (ν−½) ln(ν−½)`.
pub fn von_neumann_gaussian(cov: &CovarianceModel) -> f64 {
    cov.symplectic_eigenvalues()
        .iter()
        .map(|&nu| {
            let x = (nu - 0.5).max(0.0);
            crate::special::xlogx(x + 1.0) - crate::special::xlogx(x)
        })
        .sum()
}

/// Standard form of a 1+1-mode covariance matrix,
/// `V₀ = ((a,0,c₁,0), (0,a,0,c₂), (c₁,0,b,0), (0,c₂,0,b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl NormalFormParams {
    /// Normal form of the two-mode squeezed vacuum with `λ = tanh r`.
    pub fn tmss(r: f64) -> Self {
        let ch = (2.0 * r).cosh() / 2.0;
        let sh = (2.0 * r).sinh() / 2.0;
        Self {
            a: ch,
            b: ch,
            c1: -sh,
            c2: sh,
        }
    }

    pub fn to_v0(&self) -> DMatrix<f64> {
        let Self { a, b, c1, c2 } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, c1, 0.0, //
                0.0, a, 0.0, c2, //
                c1, 0.0, b, 0.0, //
                0.0, c2, 0.0, b,
            ],
        )
    }

    /// `(ab − c₁²)(ab − c₂²)`, equal to `det V₀`; 1/16 for pure states.
    pub fn purity_product(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.c1 * self.c1) * (ab - self.c2 * self.c2)
    }

    /// `a² + b² + 2c₁c₂`; 1/2 for pure states.
    pub fn purity_sum(&self) -> f64 {
        self.a * self.a + self.b * self.b + 2.0 * self.c1 * self.c2
    }
}

/// Outcome of the pure-state separability chain for a 1+1 normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimonVerdict {
    pub separable: bool,
    pub ppt_holds: bool,
    /// Smallest symplectic eigenvalue of the partially transposed `V₀`.
    pub reflected_min_eigenvalue: f64,
    pub purity_product: f64,
    pub purity_sum: f64,
    /// `a² + b² − 2c₁c₂`, the purity sum after reflection.
    pub reflected_purity_sum: f64,
    /// `det V_M = c₁c₂`.
    pub det_v_m: f64,
    /// `f(a) = a²(½ − a²)` after setting the vanishing coupling to zero;
    /// only evaluated when PPT holds.
    pub f_a: Option<f64>,
    pub v_m_zero: bool,
}

/// Runs the separability argument for a pure 1+1-mode Gaussian in normal form.
///
/// PPT ⇒ the reflected matrix obeys the same purity sum ⇒ `c₁c₂ = 0`
/// ⇒ `f(a) = a²(½ − a²) ≥ 1/16`, whose maximum `1/16` sits at `a = ½`
/// ⇒ `a = b = ½` and the remaining coupling vanishes, so `V_M = 0`.
pub fn simon_pure_separability(params: NormalFormParams) -> Result<SimonVerdict> {
    let purity_product = params.purity_product();
    let purity_sum = params.purity_sum();
    if !(params.a > 0.0 && params.b > 0.0) {
        return Err(Error::NotPure(format!(
            "a = {}, b = {} must be positive",
            params.a, params.b
        )));
    }
    if (purity_product - 1.0 / 16.0).abs() > PURITY_TOL {
        return Err(Error::NotPure(format!(
            "(ab - c1^2)(ab - c2^2) = {purity_product}, expected 1/16"
        )));
    }
    if (purity_sum - 0.5).abs() > PURITY_TOL {
        return Err(Error::NotPure(format!(
            "a^2 + b^2 + 2 c1 c2 = {purity_sum}, expected 1/2"
        )));
    }

    let partition = ModePartition::one_plus_one();
    let reflected = ppt_reflect(&params.to_v0(), partition);
    let reflected_min = symplectic_eigenvalues(&reflected)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let ppt_holds = reflected_min >= 0.5 - PURITY_TOL;
    let reflected_purity_sum =
        params.a * params.a + params.b * params.b - 2.0 * params.c1 * params.c2;
    let det_v_m = params.c1 * params.c2;

    let (f_a, v_m_zero) = if ppt_holds {
        // Both purity sums equal 1/2, so 4 c1 c2 vanishes; keep the larger coupling.
        let c = if params.c1.abs() >= params.c2.abs() {
            params.c1
        } else {
            params.c2
        };
        let a2 = params.a * params.a;
        let f_a = a2 * (0.5 - a2);
        // With the maximum of f at a = 1/2 the inequality f(a) ≥ 1/16 pins a = b = 1/2,
        // and ab(ab - c²) = 1/16 then forces c = 0.
        let pinned = f_a >= 1.0 / 16.0 - PURITY_TOL.sqrt();
        (Some(f_a), pinned && c.abs() < PURITY_TOL.sqrt() * 10.0)
    } else {
        (None, false)
    };

    Ok(SimonVerdict {
        separable: ppt_holds,
        ppt_holds,
        reflected_min_eigenvalue: reflected_min,
        purity_product,
        purity_sum,
        reflected_purity_sum,
        det_v_m,
        f_a,
        v_m_zero,
    })
}
