//! Dataset manifests: a UTF-8 CSV with header `path,class,view,role`
//! next to 8-bit binary graymap images.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array1;

use super::pgm::{read_pgm, resize_bilinear, write_pgm};
use super::{Role, Sample, SampleSource};
use crate::error::{Error, Result};
use crate::parallel::try_map_indices;

/// Default patch format for ingestion.
pub const DEFAULT_IMAGE_WIDTH: usize = 40;
pub const DEFAULT_IMAGE_HEIGHT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub class_id: u32,
    pub view_id: u32,
    pub role: Role,
}

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub image_width: usize,
    pub image_height: usize,
}

impl DatasetManifest {
    pub fn with_dimensions(mut self, width: usize, height: usize) -> Self {
        self.image_width = width;
        self.image_height = height;
        self
    }
}

/// Parse a manifest CSV. Relative image paths resolve against the
/// manifest's directory; target patch size defaults to 40x20.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::Ingestion {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
    if header != "path,class,view,role" {
        return Err(Error::Ingestion {
            path: path.to_path_buf(),
            reason: format!("expected header 'path,class,view,role', found '{header}'"),
        });
    }

    let mut entries = Vec::new();
    let mut seen_paths = BTreeSet::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Ingestion {
                path: path.to_path_buf(),
                reason: format!(
                    "line {}: expected 4 fields, found {}",
                    lineno + 1,
                    fields.len()
                ),
            });
        }
        let bad = |what: &str| Error::Ingestion {
            path: path.to_path_buf(),
            reason: format!("line {}: invalid {what} '{}'", lineno + 1, line),
        };
        let class_id: u32 = fields[1].parse().map_err(|_| bad("class"))?;
        let view_id: u32 = fields[2].parse().map_err(|_| bad("view"))?;
        let role = match fields[3] {
            "train" => Role::Train,
            "test" => Role::Test,
            _ => return Err(bad("role (expected train|test)")),
        };
        let entry_path = base.join(fields[0]);
        if !seen_paths.insert(entry_path.clone()) {
            return Err(Error::Ingestion {
                path: path.to_path_buf(),
                reason: format!("duplicate image path '{}'", fields[0]),
            });
        }
        entries.push(ManifestEntry {
            path: entry_path,
            class_id,
            view_id,
            role,
        });
    }
    if entries.is_empty() {
        return Err(Error::Ingestion {
            path: path.to_path_buf(),
            reason: "manifest lists no images".into(),
        });
    }

    // Every (class, view) pair that appears must have a train entry.
    let pairs: BTreeSet<(u32, u32)> = entries.iter().map(|e| (e.class_id, e.view_id)).collect();
    for (class, view) in pairs {
        if !entries
            .iter()
            .any(|e| e.class_id == class && e.view_id == view && e.role == Role::Train)
        {
            return Err(Error::Ingestion {
                path: path.to_path_buf(),
                reason: format!("class {class} view {view} has no train entry"),
            });
        }
    }

    Ok(DatasetManifest {
        entries,
        image_width: DEFAULT_IMAGE_WIDTH,
        image_height: DEFAULT_IMAGE_HEIGHT,
    })
}

/// Load one image as a row-major intensity vector in [0, 1], rescaling
/// to the requested patch size when needed.
pub fn load_image_vector(path: &Path, width: usize, height: usize) -> Result<Array1<f64>> {
    let (w, h, bytes) = read_pgm(path)?;
    let intensities: Vec<f64> = bytes.iter().map(|&b| b as f64 / 255.0).collect();
    let rescaled = resize_bilinear(&intensities, w, h, width, height);
    Ok(Array1::from_vec(rescaled))
}

/// Load every manifest entry (in parallel) into samples.
pub fn load_samples(manifest: &DatasetManifest) -> Result<Vec<Sample>> {
    try_map_indices(manifest.entries.len(), |i| {
        let entry = &manifest.entries[i];
        let vector = load_image_vector(&entry.path, manifest.image_width, manifest.image_height)?;
        Ok(Sample {
            vector,
            class_id: entry.class_id,
            view_id: entry.view_id,
            role: entry.role,
            source: SampleSource::File(entry.path.clone()),
        })
    })
}

/// Write samples out as `manifest.csv` plus one graymap per sample under
/// `images/`, mapping intensities from [-1, 1] to [0, 255]. Returns the
/// manifest path. `metadata_json`, when given, is written alongside as
/// `dataset.json`.
pub fn export_dataset(
    dir: &Path,
    samples: &[Sample],
    width: usize,
    height: usize,
    metadata_json: Option<&str>,
) -> Result<PathBuf> {
    if width * height == 0 {
        return Err(Error::InvalidConfig(
            "image dimensions must be positive".into(),
        ));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.vector.len() != width * height {
            return Err(Error::Dimension(format!(
                "sample {i} has length {}, expected {}x{} = {}",
                s.vector.len(),
                width,
                height,
                width * height
            )));
        }
    }
    let images = dir.join("images");
    fs::create_dir_all(&images)?;
    let mut rows = String::from("path,class,view,role\n");
    let mut counters: std::collections::BTreeMap<(u32, u32, Role), usize> =
        std::collections::BTreeMap::new();
    for s in samples {
        let idx = counters
            .entry((s.class_id, s.view_id, s.role))
            .and_modify(|c| *c += 1)
            .or_insert(0);
        let role = match s.role {
            Role::Train => "train",
            Role::Test => "test",
        };
        let name = format!(
            "images/c{}_v{}_{}_{:04}.pgm",
            s.class_id, s.view_id, role, idx
        );
        let bytes: Vec<u8> = s
            .vector
            .iter()
            .map(|&v| (((v + 1.0) * 0.5 * 255.0).round()).clamp(0.0, 255.0) as u8)
            .collect();
        write_pgm(&dir.join(&name), width, height, &bytes)?;
        rows.push_str(&format!("{name},{},{},{role}\n", s.class_id, s.view_id));
    }
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, rows)?;
    if let Some(meta) = metadata_json {
        fs::write(dir.join("dataset.json"), meta)?;
    }
    Ok(manifest_path)
}
