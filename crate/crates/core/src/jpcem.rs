//! Joint prior and coefficient estimation.
//!
//! The outer loop alternates a weighted-lasso solve with closed-form
//! updates of the activation probability `kappa`, the per-coefficient
//! penalty `rho`, and the l1 weights `w = rho / (|x| + eps)`. Each view
//! of a multi-view observation is solved independently against the shared
//! dictionary; coupling enters only at classification time.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::observation::MultiViewObservation;
use crate::parallel::try_map_indices;
use crate::solver::{DictionarySolver, ViewProblem};

pub const DEFAULT_SIGMA: f64 = 0.018;
pub const DEFAULT_LAMBDA: f64 = 2e-5;
pub const DEFAULT_ALPHA: f64 = 1.0 / 9.0;
pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_OUTER_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_OUTER_ITERS: usize = 50;

/// Hyperparameters and stopping controls for the outer loop.
///
/// Three tolerances play distinct roles: `eps` stabilizes the update
/// formulas, `outer_tol` is the squared-difference stopping threshold on
/// successive coefficient iterates, and `inner_tol` is the stationarity
/// tolerance of the weighted-lasso solver.
#[derive(Debug, Clone, PartialEq)]
pub struct JpcemConfig {
    pub sigma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub eps: f64,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
}

impl Default for JpcemConfig {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            lambda: DEFAULT_LAMBDA,
            alpha: DEFAULT_ALPHA,
            eps: DEFAULT_EPS,
            outer_tol: DEFAULT_OUTER_TOL,
            inner_tol: crate::solver::DEFAULT_INNER_TOL,
            max_outer_iters: DEFAULT_MAX_OUTER_ITERS,
            max_inner_iters: crate::solver::DEFAULT_MAX_INNER_ITERS,
        }
    }
}

impl JpcemConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma", self.sigma),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("eps", self.eps),
            ("outer_tol", self.outer_tol),
            ("inner_tol", self.inner_tol),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest `alpha` for which the kappa range `[0, 1/(1+alpha)]` keeps
/// every penalty `rho` nonnegative (in the eps -> 0 limit).
pub fn min_alpha(sigma: f64, lambda: f64) -> f64 {
    (lambda / (2.0 * PI * sigma * sigma)).sqrt()
}

/// Activation probabilities from the current coefficients:
/// `kappa_i = |x_i| / ((1 + alpha) * max_j |x_j| + eps)`.
pub fn kappa_update(x: &Array1<f64>, alpha: f64, eps: f64) -> Array1<f64> {
    let x_max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let denom = (1.0 + alpha) * x_max + eps;
    x.mapv(|v| v.abs() / denom)
}

/// Penalty for one activation probability:
/// `rho = sigma^2 * ln(2 pi sigma^2 (1 - kappa)^2 / (lambda kappa^2 + eps))`.
pub fn rho_value(kappa: f64, sigma: f64, lambda: f64, eps: f64) -> f64 {
    let s2 = sigma * sigma;
    let numerator = 2.0 * PI * s2 * (1.0 - kappa) * (1.0 - kappa);
    let denominator = lambda * kappa * kappa + eps;
    s2 * (numerator / denominator).ln()
}

/// Elementwise [`rho_value`].
pub fn rho_update(kappa: &Array1<f64>, sigma: f64, lambda: f64, eps: f64) -> Array1<f64> {
    kappa.mapv(|k| rho_value(k, sigma, lambda, eps))
}

/// Reweighting step: `w_i = max(rho_i, 0) / (|x_i| + eps)`.
///
/// Negative penalties (possible when `alpha` is set below [`min_alpha`])
/// are clamped so the inner problem stays convex.
pub fn weight_update(rho: &Array1<f64>, x: &Array1<f64>, eps: f64) -> Array1<f64> {
    Array1::from_shape_fn(rho.len(), |i| rho[i].max(0.0) / (x[i].abs() + eps))
}

/// Per-view prior parameters at the solution, plus the hyperparameters
/// that produced them. Columns index views.
#[derive(Debug, Clone)]
pub struct PriorState {
    pub kappa: Array2<f64>,
    pub rho: Array2<f64>,
    pub weights: Array2<f64>,
    pub sigma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub eps: f64,
}

/// Estimated coefficients for every view, with soft support indicators
/// `gamma = |x| / (|x| + eps)` and per-view convergence bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    x: Array2<f64>,
    gamma: Array2<f64>,
    converged: Vec<bool>,
    outer_iters: Vec<usize>,
}

impl CoefficientMatrix {
    /// Wrap an externally computed coefficient matrix.
    pub fn from_coefficients(x: Array2<f64>, eps: f64) -> Self {
        let gamma = x.mapv(|v| v.abs() / (v.abs() + eps));
        let views = x.ncols();
        Self {
            x,
            gamma,
            converged: vec![true; views],
            outer_iters: vec![0; views],
        }
    }

    pub fn coefficients(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn support_indicators(&self) -> &Array2<f64> {
        &self.gamma
    }

    pub fn view_coefficients(&self, m: usize) -> Array1<f64> {
        self.x.column(m).to_owned()
    }

    pub fn converged_per_view(&self) -> &[bool] {
        &self.converged
    }

    /// Overwrite the convergence flag on every view.
    pub fn set_converged(&mut self, converged: bool) {
        for c in &mut self.converged {
            *c = converged;
        }
    }

    pub fn outer_iters_per_view(&self) -> &[usize] {
        &self.outer_iters
    }

    pub fn num_views(&self) -> usize {
        self.x.ncols()
    }

    pub fn num_coefficients(&self) -> usize {
        self.x.nrows()
    }
}

struct ViewOutcome {
    x: Array1<f64>,
    kappa: Array1<f64>,
    rho: Array1<f64>,
    weights: Array1<f64>,
    converged: bool,
    iters: usize,
}

fn squared_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn solve_view(problem: &ViewProblem<'_>, cfg: &JpcemConfig) -> Result<ViewOutcome> {
    let k = problem.num_coefficients();
    // Penalty positivity is guaranteed while the eps floor stays below the
    // margin of the zero crossing at kappa = 1 / (1 + alpha).
    let kappa_cap = 1.0 / (1.0 + cfg.alpha);
    let rho_margin = 2.0 * PI * cfg.sigma * cfg.sigma * (1.0 - kappa_cap) * (1.0 - kappa_cap)
        - cfg.lambda * kappa_cap * kappa_cap;
    let rho_positive_guaranteed = cfg.eps < rho_margin;

    let mut prev = Array1::<f64>::zeros(k); // x^(0)
    let mut curr = Array1::<f64>::ones(k); // x^(1), placeholder before the first solve
    let mut weights = Array1::<f64>::ones(k); // w^(0), with kappa^(0) = 0.5 implied
    let mut warm = Array1::<f64>::zeros(k);
    let mut converged = false;
    let mut iters = 0;

    loop {
        let sol = problem.solve(&weights, &warm, cfg.inner_tol, cfg.max_inner_iters)?;
        if iters == 0 {
            curr = sol.x; // replaces the all-ones placeholder; prev stays x^(0)
        } else {
            prev = std::mem::replace(&mut curr, sol.x);
        }
        let kappa = kappa_update(&curr, cfg.alpha, cfg.eps);
        let rho = rho_update(&kappa, cfg.sigma, cfg.lambda, cfg.eps);
        if rho_positive_guaranteed {
            debug_assert!(
                rho.iter().all(|&r| r > 0.0),
                "rho went nonpositive despite alpha >= min_alpha margin"
            );
        }
        weights = weight_update(&rho, &curr, cfg.eps);
        warm.assign(&curr);
        iters += 1;
        if squared_diff(&curr, &prev) <= cfg.outer_tol {
            converged = true;
            break;
        }
        if iters >= cfg.max_outer_iters {
            break;
        }
    }

    // Recompute the final prior state from the solution column; this
    // repeats the last in-loop update exactly.
    let kappa = kappa_update(&curr, cfg.alpha, cfg.eps);
    let rho = rho_update(&kappa, cfg.sigma, cfg.lambda, cfg.eps);
    Ok(ViewOutcome {
        x: curr,
        kappa,
        rho,
        weights,
        converged,
        iters,
    })
}

fn assemble(
    outcomes: Vec<ViewOutcome>,
    k: usize,
    cfg: &JpcemConfig,
) -> (CoefficientMatrix, PriorState) {
    let views = outcomes.len();
    let mut x = Array2::zeros((k, views));
    let mut gamma = Array2::zeros((k, views));
    let mut kappa = Array2::zeros((k, views));
    let mut rho = Array2::zeros((k, views));
    let mut weights = Array2::zeros((k, views));
    let mut converged = Vec::with_capacity(views);
    let mut iters = Vec::with_capacity(views);
    for (m, out) in outcomes.into_iter().enumerate() {
        gamma
            .column_mut(m)
            .assign(&out.x.mapv(|v| v.abs() / (v.abs() + cfg.eps)));
        x.column_mut(m).assign(&out.x);
        kappa.column_mut(m).assign(&out.kappa);
        rho.column_mut(m).assign(&out.rho);
        weights.column_mut(m).assign(&out.weights);
        converged.push(out.converged);
        iters.push(out.iters);
    }
    (
        CoefficientMatrix {
            x,
            gamma,
            converged,
            outer_iters: iters,
        },
        PriorState {
            kappa,
            rho,
            weights,
            sigma: cfg.sigma,
            lambda: cfg.lambda,
            alpha: cfg.alpha,
            eps: cfg.eps,
        },
    )
}

fn check_alpha(cfg: &JpcemConfig) {
    let floor = min_alpha(cfg.sigma, cfg.lambda);
    if cfg.alpha < floor {
        log::warn!(
            "alpha = {} is below the positivity floor {floor:.6}; negative penalties will be clamped",
            cfg.alpha
        );
    }
}

/// Jointly estimate prior parameters and sparse coefficients for every
/// view of an observation. Views are independent and solved in parallel.
pub fn jpcem_solve(
    dict: &Dictionary,
    obs: &MultiViewObservation,
    cfg: &JpcemConfig,
) -> Result<CoefficientMatrix> {
    Ok(jpcem_solve_with_state(dict, obs, cfg)?.0)
}

/// As [`jpcem_solve`], also returning the prior state at the solution.
pub fn jpcem_solve_with_state(
    dict: &Dictionary,
    obs: &MultiViewObservation,
    cfg: &JpcemConfig,
) -> Result<(CoefficientMatrix, PriorState)> {
    cfg.validate()?;
    let solver = DictionarySolver::new(dict, cfg.lambda)?;
    jpcem_solve_inner(&solver, obs, cfg)
}

/// Batch entry point: reuse a prebuilt [`DictionarySolver`] across many
/// observations. The solver's ridge weight must match the config.
pub fn jpcem_solve_with(
    solver: &DictionarySolver<'_>,
    obs: &MultiViewObservation,
    cfg: &JpcemConfig,
) -> Result<CoefficientMatrix> {
    cfg.validate()?;
    if solver.lambda() != cfg.lambda {
        return Err(Error::InvalidParameter(format!(
            "solver ridge weight {} differs from config lambda {}",
            solver.lambda(),
            cfg.lambda
        )));
    }
    Ok(jpcem_solve_inner(solver, obs, cfg)?.0)
}

fn jpcem_solve_inner(
    solver: &DictionarySolver<'_>,
    obs: &MultiViewObservation,
    cfg: &JpcemConfig,
) -> Result<(CoefficientMatrix, PriorState)> {
    let dict = solver.dictionary();
    if obs.dim() != dict.dim() {
        return Err(Error::Dimension(format!(
            "observation has {} rows, dictionary has {}",
            obs.dim(),
            dict.dim()
        )));
    }
    check_alpha(cfg);
    let outcomes = try_map_indices(obs.num_views(), |m| {
        let problem = solver.view_problem(&obs.view(m).to_owned())?;
        solve_view(&problem, cfg)
    })?;
    Ok(assemble(outcomes, dict.num_atoms(), cfg))
}
