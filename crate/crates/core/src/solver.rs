//! Weighted-lasso subproblem solver.
//!
//! The inner problem is `min_x ||y_hat - D_hat x||^2 + || w o |x| ||_1`
//! over the ridge-augmented system, solved by cyclic coordinate descent
//! with exact per-coordinate minimization. A support-enumeration oracle
//! (`brute_force_lasso`) provides an independent reference for small
//! instances.

use ndarray::{s, Array1, Array2};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;

pub const DEFAULT_INNER_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_INNER_ITERS: usize = 500;

/// Ridge-augmented least-squares system: `sqrt(lambda) * I` stacked under
/// the design matrix and zeros under the data vector, so that
/// `||y_hat - D_hat x||^2 == ||y - D x||^2 + lambda ||x||^2`.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    d_hat: Array2<f64>,
    y_hat: Array1<f64>,
    lambda: f64,
}

impl AugmentedSystem {
    /// Stack an arbitrary `d x K` design matrix and its data vector.
    pub fn build(design: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ridge weight must be finite and >= 0, got {lambda}"
            )));
        }
        if design.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but data vector has length {}",
                design.nrows(),
                y.len()
            )));
        }
        if design.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "augmented system inputs contain non-finite entries".into(),
            ));
        }
        let (d, k) = design.dim();
        let mut d_hat = Array2::zeros((d + k, k));
        d_hat.slice_mut(s![..d, ..]).assign(design);
        let root = lambda.sqrt();
        for i in 0..k {
            d_hat[[d + i, i]] = root;
        }
        let mut y_hat = Array1::zeros(d + k);
        y_hat.slice_mut(s![..d]).assign(y);
        Ok(Self {
            d_hat,
            y_hat,
            lambda,
        })
    }

    pub fn d_hat(&self) -> &Array2<f64> {
        &self.d_hat
    }

    pub fn y_hat(&self) -> &Array1<f64> {
        &self.y_hat
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of coefficients `K`.
    pub fn num_coefficients(&self) -> usize {
        self.d_hat.ncols()
    }
}

/// Stack the dictionary against one observation view.
pub fn augment(dict: &Dictionary, y: &Array1<f64>, lambda: f64) -> Result<AugmentedSystem> {
    AugmentedSystem::build(dict.data(), y, lambda)
}

/// Augmented system plus per-coefficient l1 weights.
#[derive(Debug, Clone)]
pub struct WeightedLassoProblem {
    system: AugmentedSystem,
    weights: Array1<f64>,
}

impl WeightedLassoProblem {
    pub fn new(system: AugmentedSystem, weights: Array1<f64>) -> Result<Self> {
        if weights.len() != system.num_coefficients() {
            return Err(Error::Dimension(format!(
                "{} weights for {} coefficients",
                weights.len(),
                system.num_coefficients()
            )));
        }
        validate_weights(&weights)?;
        Ok(Self { system, weights })
    }

    pub fn system(&self) -> &AugmentedSystem {
        &self.system
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }
}

fn validate_weights(weights: &Array1<f64>) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInput(
            "l1 weights must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

fn validate_start(x0: &Array1<f64>, k: usize) -> Result<()> {
    if x0.len() != k {
        return Err(Error::Dimension(format!(
            "warm start has length {}, expected {k}",
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "warm start contains non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Result of one weighted-lasso solve.
#[derive(Debug, Clone)]
pub struct LassoSolution {
    pub x: Array1<f64>,
    /// Whether the stationarity criterion was met within the sweep budget.
    pub converged: bool,
    /// Full coordinate sweeps performed.
    pub sweeps: usize,
    /// Final objective value.
    pub objective: f64,
    /// Objective after each sweep (index 0 is the warm-start value).
    pub objective_trace: Vec<f64>,
    /// Final max-norm subgradient residual.
    pub stationarity: f64,
}

fn soft_threshold(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

/// Cyclic coordinate descent on the Gram form of the problem.
///
/// `gram = D_hat^T D_hat`, `corr = D_hat^T y_hat`, `y_sq = ||y_hat||^2`.
/// Stationarity is the max-norm subgradient residual of
/// `||y_hat - D_hat x||^2 + sum w_i |x_i|`.
fn cd_weighted_lasso(
    gram: &Array2<f64>,
    corr: &Array1<f64>,
    y_sq: f64,
    weights: &Array1<f64>,
    x0: &Array1<f64>,
    tol: f64,
    max_sweeps: usize,
) -> LassoSolution {
    let k = corr.len();
    let mut x = x0.clone();
    // z = gram * x - corr; kept incrementally up to date.
    let mut z = if x.iter().all(|&v| v == 0.0) {
        -corr.clone()
    } else {
        gram.dot(&x) - corr
    };

    let objective = |x: &Array1<f64>, z: &Array1<f64>| -> f64 {
        let quad = x.dot(z) - corr.dot(x);
        let l1: f64 = x
            .iter()
            .zip(weights.iter())
            .map(|(xi, wi)| wi * xi.abs())
            .sum();
        y_sq + quad + l1
    };
    let residual = |x: &Array1<f64>, z: &Array1<f64>| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..k {
            let g = 2.0 * z[i];
            let w = weights[i];
            let r = if x[i] > 0.0 {
                (g + w).abs()
            } else if x[i] < 0.0 {
                (g - w).abs()
            } else {
                (g.abs() - w).max(0.0)
            };
            worst = worst.max(r);
        }
        worst
    };

    let mut trace = Vec::with_capacity(16);
    trace.push(objective(&x, &z));
    let mut converged = residual(&x, &z) <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        for i in 0..k {
            let gii = gram[[i, i]];
            let xi = x[i];
            if gii <= 0.0 {
                // Zero column: the data term ignores this coordinate.
                x[i] = 0.0;
                continue;
            }
            let partial = z[i] - gii * xi;
            let xi_new = soft_threshold(-partial, 0.5 * weights[i]) / gii;
            if xi_new != xi {
                let delta = xi_new - xi;
                // gram is symmetric, so row(i) is column i contiguously.
                for (zj, &gij) in z.iter_mut().zip(gram.row(i).iter()) {
                    *zj += gij * delta;
                }
                x[i] = xi_new;
            }
        }
        sweeps += 1;
        let obj = objective(&x, &z);
        let prev = *trace.last().unwrap();
        debug_assert!(
            obj <= prev + 1e-12 * (1.0 + prev.abs()),
            "coordinate descent objective increased: {prev} -> {obj}"
        );
        trace.push(obj);
        converged = residual(&x, &z) <= tol;
    }

    let stationarity = residual(&x, &z);
    let objective = *trace.last().unwrap();
    LassoSolution {
        x,
        converged,
        sweeps,
        objective,
        objective_trace: trace,
        stationarity,
    }
}

/// Solve a weighted-lasso problem to the stationarity tolerance.
///
/// Non-convergence within the sweep budget is reported through the
/// `converged` flag on the returned solution, not as an error.
pub fn solve_weighted_lasso(
    problem: &WeightedLassoProblem,
    x0: &Array1<f64>,
    inner_tol: f64,
    max_inner_iters: usize,
) -> Result<LassoSolution> {
    if !inner_tol.is_finite() || inner_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inner tolerance must be positive, got {inner_tol}"
        )));
    }
    if max_inner_iters == 0 {
        return Err(Error::InvalidParameter(
            "max inner iterations must be >= 1".into(),
        ));
    }
    let k = problem.system.num_coefficients();
    validate_start(x0, k)?;
    let d_hat = &problem.system.d_hat;
    let y_hat = &problem.system.y_hat;
    let gram = d_hat.t().dot(d_hat);
    let corr = d_hat.t().dot(y_hat);
    let y_sq = y_hat.dot(y_hat);
    Ok(cd_weighted_lasso(
        &gram,
        &corr,
        y_sq,
        &problem.weights,
        x0,
        inner_tol,
        max_inner_iters,
    ))
}

/// Exact minimizer by enumerating every support and sign pattern.
///
/// Reference implementation for small instances (`K <= 12`); each
/// sign-restricted smooth problem is solved by normal equations and the
/// best candidate under the true objective wins. Objective ties are
/// broken by lowest support cardinality, then lexicographic support.
pub fn brute_force_lasso(problem: &WeightedLassoProblem) -> Result<Array1<f64>> {
    let k = problem.system.num_coefficients();
    if k > 12 {
        return Err(Error::SizeLimit(format!(
            "support enumeration limited to 12 coefficients, got {k}"
        )));
    }
    let d_hat = &problem.system.d_hat;
    let y_hat = &problem.system.y_hat;
    let w = &problem.weights;

    let true_objective = |x: &Array1<f64>| -> f64 {
        let r = y_hat - &d_hat.dot(x);
        let l1: f64 = x.iter().zip(w.iter()).map(|(xi, wi)| wi * xi.abs()).sum();
        r.dot(&r) + l1
    };

    // Supports ordered by (cardinality, lexicographic index list) so the
    // first strictly better candidate encodes the tie rule.
    let mut supports: Vec<Vec<usize>> = (0u32..1 << k)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    supports.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut best_x = Array1::zeros(k);
    let mut best_obj = true_objective(&best_x);
    const TIE_TOL: f64 = 1e-12;

    for support in &supports {
        let s_len = support.len();
        if s_len == 0 {
            continue; // zero candidate already scored
        }
        let mut g_s = Array2::zeros((s_len, s_len));
        for (a, &ia) in support.iter().enumerate() {
            for (b, &ib) in support.iter().enumerate() {
                g_s[[a, b]] = d_hat.column(ia).dot(&d_hat.column(ib));
            }
        }
        let c_s: Array1<f64> = support
            .iter()
            .map(|&i| d_hat.column(i).dot(y_hat))
            .collect();
        for sign_bits in 0u32..1 << s_len {
            let rhs: Array1<f64> = (0..s_len)
                .map(|a| {
                    let sign = if sign_bits >> a & 1 == 1 { -1.0 } else { 1.0 };
                    c_s[a] - 0.5 * w[support[a]] * sign
                })
                .collect();
            let Some(x_s) = cholesky_solve(&g_s, &rhs) else {
                continue; // singular face: its minimum lies on a smaller support
            };
            let mut x = Array1::zeros(k);
            for (a, &i) in support.iter().enumerate() {
                x[i] = x_s[a];
            }
            let obj = true_objective(&x);
            if obj < best_obj - TIE_TOL {
                best_obj = obj;
                best_x = x;
            }
        }
    }
    Ok(best_x)
}

/// Value of the MAP objective
/// `||y - D x||^2 + lambda ||x||^2 + sum_i gamma_i rho_i`.
pub fn eval_objective(
    dict: &Dictionary,
    y: &Array1<f64>,
    x: &Array1<f64>,
    gamma: &Array1<f64>,
    rho: &Array1<f64>,
    lambda: f64,
) -> Result<f64> {
    let k = dict.num_atoms();
    if y.len() != dict.dim() {
        return Err(Error::Dimension(format!(
            "observation has length {}, dictionary rows {}",
            y.len(),
            dict.dim()
        )));
    }
    if x.len() != k || gamma.len() != k || rho.len() != k {
        return Err(Error::Dimension(format!(
            "coefficients/indicators/penalties must all have length {k}"
        )));
    }
    let r = y - &dict.data().dot(x);
    Ok(r.dot(&r) + lambda * x.dot(x) + gamma.dot(rho))
}

/// Shared per-dictionary solver state: the Gram matrix `D^T D + lambda I`.
///
/// One instance serves any number of concurrent view solves against the
/// same dictionary; each solve carries its own private state.
#[derive(Debug)]
pub struct DictionarySolver<'d> {
    dict: &'d Dictionary,
    gram: Array2<f64>,
    lambda: f64,
}

impl<'d> DictionarySolver<'d> {
    pub fn new(dict: &'d Dictionary, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ridge weight must be finite and >= 0, got {lambda}"
            )));
        }
        let d = dict.data();
        let mut gram = d.t().dot(d);
        for i in 0..gram.nrows() {
            gram[[i, i]] += lambda;
        }
        Ok(Self { dict, gram, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dictionary(&self) -> &Dictionary {
        self.dict
    }

    /// Bind one observation view; the correlation vector is computed once
    /// and reused across reweighted solves.
    pub fn view_problem(&self, y: &Array1<f64>) -> Result<ViewProblem<'_>> {
        if y.len() != self.dict.dim() {
            return Err(Error::Dimension(format!(
                "view has length {}, dictionary rows {}",
                y.len(),
                self.dict.dim()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "view contains non-finite entries".into(),
            ));
        }
        Ok(ViewProblem {
            gram: &self.gram,
            corr: self.dict.data().t().dot(y),
            y_sq: y.dot(y),
        })
    }
}

/// One view bound to a [`DictionarySolver`]; solve repeatedly under
/// different weights.
#[derive(Debug)]
pub struct ViewProblem<'s> {
    gram: &'s Array2<f64>,
    corr: Array1<f64>,
    y_sq: f64,
}

impl ViewProblem<'_> {
    pub fn solve(
        &self,
        weights: &Array1<f64>,
        x0: &Array1<f64>,
        inner_tol: f64,
        max_inner_iters: usize,
    ) -> Result<LassoSolution> {
        let k = self.corr.len();
        if weights.len() != k {
            return Err(Error::Dimension(format!(
                "{} weights for {k} coefficients",
                weights.len()
            )));
        }
        validate_weights(weights)?;
        validate_start(x0, k)?;
        Ok(cd_weighted_lasso(
            self.gram,
            &self.corr,
            self.y_sq,
            weights,
            x0,
            inner_tol,
            max_inner_iters,
        ))
    }

    pub fn num_coefficients(&self) -> usize {
        self.corr.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Dictionary;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn identity_dict(k: usize) -> Dictionary {
        let samples: Vec<(u32, u32, Array1<f64>)> = (0..k)
            .map(|i| {
                let mut v = Array1::zeros(k);
                v[i] = 1.0;
                (1, 1, v)
            })
            .collect();
        Dictionary::build(&samples).unwrap()
    }

    fn solve(problem: &WeightedLassoProblem) -> LassoSolution {
        let k = problem.system().num_coefficients();
        solve_weighted_lasso(problem, &Array1::zeros(k), 1e-10, 10_000).unwrap()
    }

    #[test]
    fn augment_zero_ridge() {
        let dict = identity_dict(2);
        let sys = augment(&dict, &array![1.0, 0.0], 0.0).unwrap();
        assert_eq!(sys.d_hat().dim(), (4, 2));
        assert_eq!(sys.y_hat(), &array![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(sys.d_hat().slice(s![2.., ..]), Array2::<f64>::zeros((2, 2)));
    }

    #[test]
    fn augment_sqrt_lambda_block() {
        let dict = identity_dict(2);
        let sys = augment(&dict, &array![1.0, 0.0], 4.0).unwrap();
        assert_eq!(sys.d_hat()[[2, 0]], 2.0);
        assert_eq!(sys.d_hat()[[3, 1]], 2.0);
        assert_eq!(sys.d_hat()[[2, 1]], 0.0);
    }

    #[test]
    fn augment_rejects_bad_input() {
        let dict = identity_dict(2);
        assert!(matches!(
            augment(&dict, &array![1.0, 0.0], -1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            augment(&dict, &array![1.0], 0.0),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        // ||y_hat - D_hat x||^2 == ||y - D x||^2 + lambda ||x||^2
        #[test]
        fn augmented_objective_identity(
            x0 in -3.0f64..3.0, x1 in -3.0f64..3.0,
            y0 in -2.0f64..2.0, y1 in -2.0f64..2.0,
            lambda in 0.0f64..5.0,
        ) {
            let dict = Dictionary::build(&[
                (1, 1, array![3.0, 4.0]),
                (2, 1, array![1.0, -1.0]),
            ]).unwrap();
            let y = array![y0, y1];
            let x = array![x0, x1];
            let sys = augment(&dict, &y, lambda).unwrap();
            let r_hat = sys.y_hat() - &sys.d_hat().dot(&x);
            let r = &y - &dict.data().dot(&x);
            let lhs = r_hat.dot(&r_hat);
            let rhs = r.dot(&r) + lambda * x.dot(&x);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn diagonal_soft_threshold() {
        let dict = identity_dict(2);
        let sys = augment(&dict, &array![1.0, 0.2], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, array![0.4, 0.4]).unwrap();
        let sol = solve(&problem);
        assert_abs_diff_eq!(sol.x[0], 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.x[1], 0.0, epsilon = 1e-9);
        assert!(sol.converged);
    }

    #[test]
    fn zero_weights_give_least_squares() {
        // Square invertible system: x = D_hat^{-1} y_hat.
        let design = array![[2.0, 1.0], [0.5, -1.5]];
        let y = array![1.0, 2.0];
        let sys = AugmentedSystem::build(&design, &y, 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::zeros(2)).unwrap();
        let sol = solve(&problem);
        // Solve 2x2 directly: det = -3.5.
        let det = 2.0 * -1.5 - 1.0 * 0.5;
        let expected = array![
            (-1.5 * 1.0 - 1.0 * 2.0) / det,
            (2.0 * 2.0 - 0.5 * 1.0) / det
        ];
        assert_abs_diff_eq!(sol.x[0], expected[0], epsilon = 1e-8);
        assert_abs_diff_eq!(sol.x[1], expected[1], epsilon = 1e-8);
    }

    #[test]
    fn dominating_weights_force_zero() {
        let design = array![[1.0, 0.4], [0.2, -0.9], [0.1, 0.3]];
        let y = array![0.7, -0.3, 0.2];
        let sys = AugmentedSystem::build(&design, &y, 0.0).unwrap();
        let corr = sys.d_hat().t().dot(sys.y_hat());
        let bound = 2.0 * corr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let problem = WeightedLassoProblem::new(sys, Array1::from_elem(2, bound + 0.1)).unwrap();
        let sol = solve(&problem);
        assert_eq!(sol.x, Array1::<f64>::zeros(2));
    }

    #[test]
    fn rejects_non_finite_inputs() {
        let dict = identity_dict(2);
        let sys = augment(&dict, &array![1.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            WeightedLassoProblem::new(sys.clone(), array![1.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        let problem = WeightedLassoProblem::new(sys, array![1.0, 1.0]).unwrap();
        assert!(matches!(
            solve_weighted_lasso(&problem, &array![f64::INFINITY, 0.0], 1e-8, 10),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn objective_trace_is_monotone() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (d, k) = (6, 5);
            let design = Array2::from_shape_fn((d, k), |_| rng.random_range(-1.0..1.0));
            let y = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
            let w = Array1::from_shape_fn(k, |_| rng.random_range(0.0..1.5));
            let sys = AugmentedSystem::build(&design, &y, 0.01).unwrap();
            let problem = WeightedLassoProblem::new(sys, w).unwrap();
            let sol = solve(&problem);
            for pair in sol.objective_trace.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-12, "trace increased: {pair:?}");
            }
        }
    }

    #[test]
    fn sweep_budget_exhaustion_returns_best_iterate() {
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let design = Array2::from_shape_fn((8, 6), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(8, |_| rng.random_range(-1.0..1.0));
        let sys = AugmentedSystem::build(&design, &y, 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::from_elem(6, 0.1)).unwrap();
        let sol = solve_weighted_lasso(&problem, &Array1::zeros(6), 1e-14, 1).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.sweeps, 1);
        assert!(sol.x.iter().all(|v| v.is_finite()));
        // The exhausted iterate is still the best seen (monotone descent).
        assert!(sol.objective <= sol.objective_trace[0]);
    }

    #[test]
    fn brute_force_matches_examples() {
        // Soft-threshold case.
        let dict = identity_dict(2);
        let sys = augment(&dict, &array![1.0, 0.2], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, array![0.4, 0.4]).unwrap();
        let exact = brute_force_lasso(&problem).unwrap();
        assert_abs_diff_eq!(exact[0], 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(exact[1], 0.0, epsilon = 1e-10);
        let cd = solve(&problem);
        assert_abs_diff_eq!((&cd.x - &exact).mapv(f64::abs).sum(), 0.0, epsilon = 1e-8);

        // Zero-weight invertible case.
        let design = array![[2.0, 1.0], [0.5, -1.5]];
        let sys = AugmentedSystem::build(&design, &array![1.0, 2.0], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::zeros(2)).unwrap();
        let exact = brute_force_lasso(&problem).unwrap();
        let cd = solve(&problem);
        for i in 0..2 {
            assert_abs_diff_eq!(exact[i], cd.x[i], epsilon = 1e-8);
        }

        // Dominating weights.
        let sys = AugmentedSystem::build(&design, &array![1.0, 2.0], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::from_elem(2, 100.0)).unwrap();
        assert_eq!(
            brute_force_lasso(&problem).unwrap(),
            Array1::<f64>::zeros(2)
        );
    }

    #[test]
    fn brute_force_one_dimensional_calculus() {
        // min (2 - x)^2 + |x| has minimizer x = 2 - 1/2.
        let design = array![[1.0]];
        let sys = AugmentedSystem::build(&design, &array![2.0], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, array![1.0]).unwrap();
        let x = brute_force_lasso(&problem).unwrap();
        assert_abs_diff_eq!(x[0], 1.5, epsilon = 1e-10);
    }

    #[test]
    fn brute_force_size_limit() {
        let design = Array2::from_elem((2, 13), 0.5);
        let sys = AugmentedSystem::build(&design, &array![1.0, 1.0], 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::ones(13)).unwrap();
        assert!(matches!(
            brute_force_lasso(&problem),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn solver_matches_oracle_on_random_instances() {
        // Smaller sibling of the acceptance criterion (full 200 instances
        // run in the acceptance suite).
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for trial in 0..40 {
            let d = rng.random_range(4..=8);
            let k = rng.random_range(4..=8);
            let design = Array2::from_shape_fn((d, k), |_| rng.random_range(-1.0..1.0));
            let y = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
            let w = Array1::from_shape_fn(k, |_| rng.random_range(0.0..2.0));
            let lambda = if trial % 2 == 0 {
                0.0
            } else {
                rng.random_range(0.0..0.2)
            };
            let sys = AugmentedSystem::build(&design, &y, lambda).unwrap();
            let problem = WeightedLassoProblem::new(sys, w).unwrap();
            let exact = brute_force_lasso(&problem).unwrap();
            let sol = solve(&problem);
            let gap = (&sol.x - &exact).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(gap <= 1e-6, "trial {trial}: gap {gap}");
        }
    }

    proptest! {
        // In the diagonal lambda=0 case, scaling (y_hat, D_hat) by t and
        // the weights by t^2 leaves the soft-threshold minimizer
        // x_i = soft(a y_i, w_i / 2) / a^2 unchanged.
        #[test]
        fn soft_threshold_scaling_invariance(
            y in -3.0f64..3.0,
            a in 0.5f64..2.0,
            w in 0.0f64..2.0,
            t in 0.1f64..10.0,
        ) {
            let base = soft_threshold(a * y, 0.5 * w) / (a * a);
            let scaled = soft_threshold((t * a) * (t * y), 0.5 * (t * t * w)) / (t * a * t * a);
            prop_assert!((base - scaled).abs() <= 1e-9 * (1.0 + base.abs()));
        }
    }

    #[test]
    fn zero_weight_overdetermined_matches_normal_equations() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let design = Array2::from_shape_fn((9, 4), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(9, |_| rng.random_range(-1.0..1.0));
        let sys = AugmentedSystem::build(&design, &y, 0.0).unwrap();
        let problem = WeightedLassoProblem::new(sys, Array1::zeros(4)).unwrap();
        let sol = solve(&problem);
        let gram = design.t().dot(&design);
        let rhs = design.t().dot(&y);
        let expected = cholesky_solve(&gram, &rhs).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(sol.x[i], expected[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn eval_objective_examples() {
        let dict = identity_dict(1);
        // x = 0, gamma = 0 -> ||y||^2
        let v = eval_objective(
            &dict,
            &array![2.0],
            &array![0.0],
            &array![0.0],
            &array![0.3],
            0.7,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 4.0, epsilon = 1e-15);
        // perfect fit, lambda = 0, gamma = 0 -> 0
        let v = eval_objective(
            &dict,
            &array![1.0],
            &array![1.0],
            &array![0.0],
            &array![0.3],
            0.0,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        // D = I_1, y = [1], x = [1], lambda = 0.5, gamma = [1], rho = [0.1]
        let v = eval_objective(
            &dict,
            &array![1.0],
            &array![1.0],
            &array![1.0],
            &array![0.1],
            0.5,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 0.6, epsilon = 1e-15);
        assert!(matches!(
            eval_objective(
                &dict,
                &array![1.0, 2.0],
                &array![1.0],
                &array![1.0],
                &array![0.1],
                0.5
            ),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn view_problem_matches_contract_solver() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let samples: Vec<(u32, u32, Array1<f64>)> = (0..6)
            .map(|i| {
                let v = Array1::from_shape_fn(5, |_| rng.random_range(-1.0..1.0));
                (1 + (i % 2) as u32, 1, v)
            })
            .collect();
        let dict = Dictionary::build(&samples).unwrap();
        let y = Array1::from_shape_fn(5, |_| rng.random_range(-1.0..1.0));
        let w = Array1::from_shape_fn(6, |_| rng.random_range(0.0..1.0));
        let lambda = 0.03;

        let sys = augment(&dict, &y, lambda).unwrap();
        let problem = WeightedLassoProblem::new(sys, w.clone()).unwrap();
        let a = solve_weighted_lasso(&problem, &Array1::zeros(6), 1e-10, 10_000).unwrap();

        let solver = DictionarySolver::new(&dict, lambda).unwrap();
        let view = solver.view_problem(&y).unwrap();
        let b = view.solve(&w, &Array1::zeros(6), 1e-10, 10_000).unwrap();

        for i in 0..6 {
            assert_abs_diff_eq!(a.x[i], b.x[i], epsilon = 1e-9);
        }
    }
}
