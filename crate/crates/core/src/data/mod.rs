//! Sample ingestion, synthetic generation, and train/test splitting.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};

pub mod manifest;
pub mod pgm;
pub mod synth;

pub use manifest::{
    export_dataset, load_image_vector, load_manifest, load_samples, DatasetManifest, ManifestEntry,
    DEFAULT_IMAGE_HEIGHT, DEFAULT_IMAGE_WIDTH,
};
pub use synth::{synth_generate, SynthConfig, GENERATOR_ID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleSource {
    Synthetic,
    File(PathBuf),
}

/// One vectorized grayscale patch with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub vector: Array1<f64>,
    pub class_id: u32,
    pub view_id: u32,
    pub role: Role,
    pub source: SampleSource,
}

/// Build a dictionary from the given samples (all of them; filter by
/// role first if needed).
pub fn dictionary_from_samples(samples: &[Sample]) -> Result<Dictionary> {
    let triples: Vec<(u32, u32, Array1<f64>)> = samples
        .iter()
        .map(|s| (s.class_id, s.view_id, s.vector.clone()))
        .collect();
    Dictionary::build(&triples)
}

/// Seeded train/test split, applied independently to every (class, view)
/// group: shuffle, take `train_count`, then `test_count` from the
/// remainder. Roles on the returned samples are overwritten accordingly.
pub fn split_random(
    samples: &[Sample],
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let mut groups: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        groups.entry((s.class_id, s.view_id)).or_default().push(i);
    }
    for (&(class, view), members) in &groups {
        if members.len() < train_count + test_count {
            return Err(Error::InsufficientSamples(format!(
                "class {class} view {view}: have {}, need {} train + {} test",
                members.len(),
                train_count,
                test_count
            )));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in groups.values() {
        let mut order = members.clone();
        order.shuffle(&mut rng);
        for &i in &order[..train_count] {
            let mut s = samples[i].clone();
            s.role = Role::Train;
            train.push(s);
        }
        for &i in &order[train_count..train_count + test_count] {
            let mut s = samples[i].clone();
            s.role = Role::Test;
            test.push(s);
        }
    }
    Ok((train, test))
}
