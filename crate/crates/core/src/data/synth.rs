//! Seeded synthetic multi-view data.
//!
//! Each (class, view) pair gets its own random linear subspace; samples
//! are unit-normalized nonnegative combinations of the subspace basis
//! plus optional Gaussian noise, clipped to [-1, 1]. The generator is
//! ChaCha20 keyed by a 64-bit seed, so datasets are reproducible.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Role, Sample, SampleSource};
use crate::error::{Error, Result};

/// Identity string recorded in report/export metadata.
pub const GENERATOR_ID: &str = "chacha20/seed64";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub num_views: usize,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub train_per_class_view: usize,
    pub test_per_class_view: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subspace_dim > self.ambient_dim {
            return Err(Error::InvalidConfig(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                self.subspace_dim, self.ambient_dim
            )));
        }
        if self.num_classes == 0
            || self.num_views == 0
            || self.ambient_dim == 0
            || self.subspace_dim == 0
            || self.train_per_class_view == 0
            || self.test_per_class_view == 0
        {
            return Err(Error::InvalidConfig(
                "all synthetic counts and dimensions must be >= 1".into(),
            ));
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise std must be finite and >= 0, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }

    /// Compact descriptor echoed into reports.
    pub fn descriptor(&self) -> String {
        format!(
            "synth:c{}v{}d{}s{}tr{}te{}n{}seed{}",
            self.num_classes,
            self.num_views,
            self.ambient_dim,
            self.subspace_dim,
            self.train_per_class_view,
            self.test_per_class_view,
            self.noise_std,
            self.seed
        )
    }
}

fn random_orthonormal_basis(rng: &mut ChaCha20Rng, dim: usize, rank: usize) -> Array2<f64> {
    let mut basis = Array2::zeros((dim, rank));
    for col in 0..rank {
        loop {
            let mut v = Array1::from_shape_fn(dim, |_| {
                let n: f64 = StandardNormal.sample(rng);
                n
            });
            // Gram-Schmidt against accepted columns.
            for prev in 0..col {
                let p = basis.column(prev);
                let proj = v.dot(&p);
                v.scaled_add(-proj, &p);
            }
            let norm = v.dot(&v).sqrt();
            if norm > 1e-8 {
                basis.column_mut(col).assign(&(v / norm));
                break;
            }
        }
    }
    basis
}

fn draw_sample(
    rng: &mut ChaCha20Rng,
    basis: &Array2<f64>,
    noise_std: f64,
    class: u32,
    view: u32,
    role: Role,
) -> Sample {
    let rank = basis.ncols();
    let vector = loop {
        let coeffs = Array1::from_shape_fn(rank, |_| rng.random_range(0.0..1.0));
        let v = basis.dot(&coeffs);
        let norm = v.dot(&v).sqrt();
        if norm > 1e-9 {
            break v / norm;
        }
    };
    let mut vector = vector;
    if noise_std > 0.0 {
        for e in vector.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *e += noise_std * n;
        }
    }
    vector.mapv_inplace(|v| v.clamp(-1.0, 1.0));
    Sample {
        vector,
        class_id: class,
        view_id: view,
        role,
        source: SampleSource::Synthetic,
    }
}

/// Generate `(train, test)` sample sets. Classes are labelled `1..=C`,
/// views `1..=M`. Deterministic for a given config.
pub fn synth_generate(config: &SynthConfig) -> Result<(Vec<Sample>, Vec<Sample>)> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 1..=config.num_classes as u32 {
        for view in 1..=config.num_views as u32 {
            let basis = random_orthonormal_basis(&mut rng, config.ambient_dim, config.subspace_dim);
            for _ in 0..config.train_per_class_view {
                train.push(draw_sample(
                    &mut rng,
                    &basis,
                    config.noise_std,
                    class,
                    view,
                    Role::Train,
                ));
            }
            for _ in 0..config.test_per_class_view {
                test.push(draw_sample(
                    &mut rng,
                    &basis,
                    config.noise_std,
                    class,
                    view,
                    Role::Test,
                ));
            }
        }
    }
    Ok((train, test))
}
