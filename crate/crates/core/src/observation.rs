use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// Multi-view test observation: one vectorized image per column.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewObservation {
    data: Array2<f64>,
}

impl MultiViewObservation {
    /// Wrap a `dim x num_views` matrix.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension(
                "observation must have at least one view and one pixel".into(),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "observation contains a non-finite entry".into(),
            ));
        }
        Ok(Self { data })
    }

    /// Assemble an observation from per-view vectors.
    pub fn from_views(views: &[Array1<f64>]) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::Dimension(
                "observation needs at least one view".into(),
            ));
        }
        let dim = views[0].len();
        if views.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension("views differ in length".into()));
        }
        let mut data = Array2::zeros((dim, views.len()));
        for (m, v) in views.iter().enumerate() {
            data.column_mut(m).assign(v);
        }
        Self::new(data)
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_views(&self) -> usize {
        self.data.ncols()
    }

    pub fn view(&self, m: usize) -> ArrayView1<'_, f64> {
        self.data.column(m)
    }
}
