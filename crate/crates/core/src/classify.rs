//! Residual-based class decisions.
//!
//! A class's score is the sum over views of the (unsquared) Euclidean
//! norm of the reconstruction error after masking the coefficients to
//! that class's dictionary block. The predicted class minimizes the sum;
//! ties go to the lowest class index and are recorded for diagnostics.

use ndarray::{Array1, Array2};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::jpcem::{CoefficientMatrix, DEFAULT_EPS};
use crate::observation::MultiViewObservation;
use crate::parallel::try_map_indices;
use crate::solver::{DictionarySolver, DEFAULT_INNER_TOL, DEFAULT_MAX_INNER_ITERS};

/// Outcome of one classification, including the full residual tables.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    /// Label of the winning class.
    pub predicted_class: u32,
    /// Class labels in the order used by `residuals` and
    /// `per_view_residuals` rows.
    pub class_labels: Vec<u32>,
    /// Per-class residual, summed over views.
    pub residuals: Vec<f64>,
    /// Per-class (row) and per-view (column) residuals.
    pub per_view_residuals: Array2<f64>,
    /// Labels tied with the winner (length > 1 only on exact ties).
    pub tied_classes: Vec<u32>,
    /// Coefficients the decision was computed from.
    pub coefficients: CoefficientMatrix,
}

/// Decide the class of a multi-view observation from its coefficients.
pub fn classify_multiview(
    dict: &Dictionary,
    obs: &MultiViewObservation,
    coefficients: CoefficientMatrix,
) -> Result<ClassificationResult> {
    if obs.dim() != dict.dim() {
        return Err(Error::Dimension(format!(
            "observation has {} rows, dictionary has {}",
            obs.dim(),
            dict.dim()
        )));
    }
    if coefficients.num_coefficients() != dict.num_atoms()
        || coefficients.num_views() != obs.num_views()
    {
        return Err(Error::Dimension(format!(
            "coefficients are {}x{}, expected {}x{}",
            coefficients.num_coefficients(),
            coefficients.num_views(),
            dict.num_atoms(),
            obs.num_views()
        )));
    }

    let num_classes = dict.num_classes();
    let num_views = obs.num_views();
    let mut per_view = Array2::zeros((num_classes, num_views));
    for m in 0..num_views {
        let y = obs.view(m);
        let x = coefficients.coefficients().column(m);
        for (c, &label) in dict.class_labels().iter().enumerate() {
            let block = dict.class_block(label)?;
            // Reconstruction restricted to the class block.
            let mut residual = y.to_owned();
            for j in block {
                let coeff = x[j];
                if coeff != 0.0 {
                    residual.scaled_add(-coeff, &dict.data().column(j));
                }
            }
            per_view[[c, m]] = residual.dot(&residual).sqrt();
        }
    }
    let residuals: Vec<f64> = (0..num_classes).map(|c| per_view.row(c).sum()).collect();

    let mut best = 0usize;
    for (c, &r) in residuals.iter().enumerate() {
        if r < residuals[best] {
            best = c;
        }
    }
    let tied_classes: Vec<u32> = residuals
        .iter()
        .enumerate()
        .filter(|(_, &r)| r == residuals[best])
        .map(|(c, _)| dict.class_labels()[c])
        .collect();

    Ok(ClassificationResult {
        predicted_class: dict.class_labels()[best],
        class_labels: dict.class_labels().to_vec(),
        residuals,
        per_view_residuals: per_view,
        tied_classes,
        coefficients,
    })
}

fn uniform_lasso_column(
    solver: &DictionarySolver<'_>,
    y: &Array1<f64>,
    weight: f64,
) -> Result<(Array1<f64>, bool)> {
    let problem = solver.view_problem(y)?;
    let k = problem.num_coefficients();
    let weights = Array1::from_elem(k, weight);
    let sol = problem.solve(
        &weights,
        &Array1::zeros(k),
        DEFAULT_INNER_TOL,
        DEFAULT_MAX_INNER_ITERS,
    )?;
    Ok((sol.x, sol.converged))
}

fn validate_weight(weight: f64) -> Result<()> {
    if !weight.is_finite() || weight <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "l1 penalty must be finite and > 0, got {weight}"
        )));
    }
    Ok(())
}

pub(crate) fn src_single_with(
    solver: &DictionarySolver<'_>,
    y: &Array1<f64>,
    weight: f64,
) -> Result<ClassificationResult> {
    validate_weight(weight)?;
    let (x, converged) = uniform_lasso_column(solver, y, weight)?;
    let k = x.len();
    let mut matrix = Array2::zeros((k, 1));
    matrix.column_mut(0).assign(&x);
    let mut coefficients = CoefficientMatrix::from_coefficients(matrix, DEFAULT_EPS);
    if !converged {
        coefficients = mark_unconverged(coefficients);
    }
    let obs = MultiViewObservation::from_views(std::slice::from_ref(y))?;
    classify_multiview(solver.dictionary(), &obs, coefficients)
}

pub(crate) fn src_multiview_with(
    solver: &DictionarySolver<'_>,
    obs: &MultiViewObservation,
    weight: f64,
) -> Result<ClassificationResult> {
    validate_weight(weight)?;
    let columns = try_map_indices(obs.num_views(), |m| {
        uniform_lasso_column(solver, &obs.view(m).to_owned(), weight)
    })?;
    let k = solver.dictionary().num_atoms();
    let mut matrix = Array2::zeros((k, obs.num_views()));
    let mut all_converged = true;
    for (m, (x, converged)) in columns.into_iter().enumerate() {
        matrix.column_mut(m).assign(&x);
        all_converged &= converged;
    }
    let mut coefficients = CoefficientMatrix::from_coefficients(matrix, DEFAULT_EPS);
    if !all_converged {
        coefficients = mark_unconverged(coefficients);
    }
    classify_multiview(solver.dictionary(), obs, coefficients)
}

fn mark_unconverged(c: CoefficientMatrix) -> CoefficientMatrix {
    // Rebuild with the convergence flag cleared; from_coefficients marks
    // every view converged by default.
    let eps = DEFAULT_EPS;
    let mut rebuilt = CoefficientMatrix::from_coefficients(c.coefficients().clone(), eps);
    rebuilt.set_converged(false);
    rebuilt
}

/// Plain single-view sparse-representation baseline: a uniform-weight
/// lasso (no ridge term) followed by the residual decision.
pub fn src_single_baseline(
    dict: &Dictionary,
    y: &Array1<f64>,
    weight: f64,
) -> Result<ClassificationResult> {
    let solver = DictionarySolver::new(dict, 0.0)?;
    src_single_with(&solver, y, weight)
}

/// Multi-view fusion baseline: an independent uniform-weight lasso per
/// view, residuals summed over views for the decision.
pub fn multiview_src_baseline(
    dict: &Dictionary,
    obs: &MultiViewObservation,
    weight: f64,
) -> Result<ClassificationResult> {
    let solver = DictionarySolver::new(dict, 0.0)?;
    src_multiview_with(&solver, obs, weight)
}
