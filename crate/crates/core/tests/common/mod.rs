//! Random admissible states shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wehrl::gaussian::{symplectic_form_grouped, CovarianceModel};
use wehrl::ModePartition;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random symplectic matrix `exp(Ω H)` for a random symmetric `H`.
pub fn random_symplectic(rng: &mut impl Rng, partition: ModePartition, scale: f64) -> DMatrix<f64> {
    let d = partition.phase_dim();
    let mut h = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-scale..scale));
    h = (&h + h.transpose()) * 0.5;
    (symplectic_form_grouped(partition) * h).exp()
}

/// Pure Gaussian state `½ S Sᵀ`.
pub fn random_pure(rng: &mut impl Rng, partition: ModePartition) -> CovarianceModel {
    let s = random_symplectic(rng, partition, 0.4);
    CovarianceModel::from_v(&s * s.transpose() * 0.5, partition).expect("pure state")
}

/// Pure state plus positive semidefinite noise.
pub fn random_mixed(rng: &mut impl Rng, partition: ModePartition) -> CovarianceModel {
    let d = partition.phase_dim();
    let s = random_symplectic(rng, partition, 0.4);
    let b = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
    let mut v = &s * s.transpose() * 0.5 + &b * b.transpose() * 0.5;
    v = (&v + v.transpose()) * 0.5;
    CovarianceModel::from_v(v, partition).expect("noise keeps the state physical")
}

pub fn two_mode() -> ModePartition {
    ModePartition::one_plus_one()
}
