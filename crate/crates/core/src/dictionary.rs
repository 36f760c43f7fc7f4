//! Structured training dictionary.
//!
//! Columns are vectorized training samples, grouped into contiguous
//! per-class blocks and, within each class, per-view sub-blocks. All
//! columns are scaled to unit Euclidean norm at construction so that
//! per-class reconstruction residuals are comparable.

use std::collections::BTreeMap;
use std::ops::Range;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Column-normalized dictionary with class/view block structure.
///
/// Class and view identifiers are opaque labels; internally classes and
/// views are laid out in ascending label order, with ties between samples
/// of the same (class, view) broken by insertion order.
#[derive(Debug, Clone)]
pub struct Dictionary {
    data: Array2<f64>,
    class_labels: Vec<u32>,
    view_labels: Vec<u32>,
    class_blocks: Vec<Range<usize>>,
    view_blocks: Vec<Vec<Range<usize>>>,
}

impl Dictionary {
    /// Build a dictionary from `(class, view, vector)` training samples.
    ///
    /// Every class must provide at least one sample for every view that
    /// appears anywhere in the input. Columns are unit-normalized.
    pub fn build(samples: &[(u32, u32, Array1<f64>)]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        let dim = samples[0].2.len();
        if dim == 0 {
            return Err(Error::Dimension("sample vectors must be non-empty".into()));
        }
        for (idx, (class, view, v)) in samples.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Dimension(format!(
                    "sample {idx} (class {class}, view {view}) has length {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "sample {idx} (class {class}, view {view}) contains a non-finite entry"
                )));
            }
        }

        // Dense layout: classes ascending, views ascending within class,
        // insertion order within a (class, view) pair.
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by_key(|&i| (samples[i].0, samples[i].1));

        let mut class_labels: Vec<u32> = samples.iter().map(|s| s.0).collect();
        class_labels.sort_unstable();
        class_labels.dedup();
        let mut view_labels: Vec<u32> = samples.iter().map(|s| s.1).collect();
        view_labels.sort_unstable();
        view_labels.dedup();

        let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for (class, view, _) in samples {
            *counts.entry((*class, *view)).or_insert(0) += 1;
        }
        for &class in &class_labels {
            for &view in &view_labels {
                if !counts.contains_key(&(class, view)) {
                    return Err(Error::InsufficientSamples(format!(
                        "class {class} has no sample for view {view}"
                    )));
                }
            }
        }

        let total = samples.len();
        let mut data = Array2::zeros((dim, total));
        for (col, &i) in order.iter().enumerate() {
            let v = &samples[i].2;
            let norm = v.dot(v).sqrt();
            if norm == 0.0 {
                let (class, view, _) = &samples[i];
                return Err(Error::DegenerateSample(format!(
                    "sample {i} (class {class}, view {view}) is the zero vector"
                )));
            }
            let mut column = data.column_mut(col);
            for (dst, &src) in column.iter_mut().zip(v.iter()) {
                *dst = src / norm;
            }
        }

        let mut class_blocks = Vec::with_capacity(class_labels.len());
        let mut view_blocks = Vec::with_capacity(class_labels.len());
        let mut cursor = 0usize;
        for &class in &class_labels {
            let class_start = cursor;
            let mut per_view = Vec::with_capacity(view_labels.len());
            for &view in &view_labels {
                let n = counts[&(class, view)];
                per_view.push(cursor..cursor + n);
                cursor += n;
            }
            class_blocks.push(class_start..cursor);
            view_blocks.push(per_view);
        }
        debug_assert_eq!(cursor, total);

        Ok(Self {
            data,
            class_labels,
            view_labels,
            class_blocks,
            view_blocks,
        })
    }

    /// Matrix of unit-norm columns, `dim() x num_atoms()`.
    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// Length of each vectorized sample.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Total number of columns.
    pub fn num_atoms(&self) -> usize {
        self.data.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn num_views(&self) -> usize {
        self.view_labels.len()
    }

    /// Class labels in dense (ascending) order.
    pub fn class_labels(&self) -> &[u32] {
        &self.class_labels
    }

    /// View labels in dense (ascending) order.
    pub fn view_labels(&self) -> &[u32] {
        &self.view_labels
    }

    /// Dense index of a class label.
    pub fn class_index(&self, class: u32) -> Result<usize> {
        self.class_labels
            .binary_search(&class)
            .map_err(|_| Error::InvalidClass(class))
    }

    /// Column range of a class block.
    pub fn class_block(&self, class: u32) -> Result<Range<usize>> {
        Ok(self.class_blocks[self.class_index(class)?].clone())
    }

    /// Column range of one view inside one class block.
    pub fn view_block(&self, class: u32, view: u32) -> Result<Range<usize>> {
        let c = self.class_index(class)?;
        let v = self
            .view_labels
            .binary_search(&view)
            .map_err(|_| Error::InvalidInput(format!("unknown view label {view}")))?;
        Ok(self.view_blocks[c][v].clone())
    }

    /// Copy of `x` with every entry outside the class block zeroed.
    pub fn mask_class(&self, x: &Array1<f64>, class: u32) -> Result<Array1<f64>> {
        if x.len() != self.num_atoms() {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, dictionary has {} atoms",
                x.len(),
                self.num_atoms()
            )));
        }
        let block = self.class_block(class)?;
        let mut out = Array1::zeros(x.len());
        for i in block {
            out[i] = x[i];
        }
        Ok(out)
    }
}
