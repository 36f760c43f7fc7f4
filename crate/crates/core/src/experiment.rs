//! Experiment harness: the prior curve, accuracy-vs-views,
//! accuracy-vs-training-size, and selection-bias protocols, plus batch
//! classification over a test set.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use ndarray::Array1;

use crate::classify::{classify_multiview, src_multiview_with, src_single_with};
use crate::data::{
    dictionary_from_samples, load_manifest, load_samples, split_random, synth_generate, Sample,
    SynthConfig, GENERATOR_ID,
};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::jpcem::{jpcem_solve_with, rho_value, JpcemConfig};
use crate::observation::MultiViewObservation;
use crate::parallel::try_map_indices;
use crate::report::{ExperimentReport, MethodSummary, Record, ReportConfig};
use crate::solver::DictionarySolver;

/// Default l1 penalty for the uniform-weight baselines. Chosen by a
/// coarse sweep on noisy synthetic pools; accuracy is flat within
/// roughly a factor of two either side.
pub const DEFAULT_SRC_WEIGHT: f64 = 0.2;

/// Classification methods addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Jpcem,
    SrcSingle,
    SrcMultiview,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Jpcem, Method::SrcSingle, Method::SrcMultiview];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "jpcem" => Ok(Method::Jpcem),
            "src-single" => Ok(Method::SrcSingle),
            "src-multiview" => Ok(Method::SrcMultiview),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Jpcem => "jpcem",
            Method::SrcSingle => "src-single",
            Method::SrcMultiview => "src-multiview",
        }
    }
}

/// Parse a comma-separated method list, preserving order, rejecting
/// unknown names and duplicates.
pub fn parse_method_list(list: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = Method::from_name(name)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("empty method list".into()));
    }
    Ok(methods)
}

/// Hyperparameters shared by every method in an experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    pub jpcem: JpcemConfig,
    pub src_weight: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            jpcem: JpcemConfig::default(),
            src_weight: DEFAULT_SRC_WEIGHT,
        }
    }
}

/// A pool of labelled samples the experiments draw splits from.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<Sample>,
    descriptor: String,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, descriptor: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("dataset has no samples".into()));
        }
        let dim = samples[0].vector.len();
        if samples.iter().any(|s| s.vector.len() != dim) {
            return Err(Error::Dimension(
                "dataset samples differ in vector length".into(),
            ));
        }
        Ok(Self {
            samples,
            descriptor: descriptor.into(),
        })
    }

    /// Pool both halves of a synthetic generation.
    pub fn from_synth(config: &SynthConfig) -> Result<Self> {
        let (train, test) = synth_generate(config)?;
        let descriptor = config.descriptor();
        let samples: Vec<Sample> = train.into_iter().chain(test).collect();
        Self::new(samples, descriptor)
    }

    /// Load a manifest (at the given patch size) and pool its samples.
    pub fn from_manifest(path: &Path, width: usize, height: usize) -> Result<Self> {
        let manifest = load_manifest(path)?.with_dimensions(width, height);
        let samples = load_samples(&manifest)?;
        Self::new(samples, path.display().to_string())
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn view_labels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.samples.iter().map(|s| s.view_id).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn class_labels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.samples.iter().map(|s| s.class_id).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Smallest (class, view) group size; bounds usable split counts.
    pub fn min_group_size(&self) -> usize {
        let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for s in &self.samples {
            *counts.entry((s.class_id, s.view_id)).or_insert(0) += 1;
        }
        counts.values().copied().min().unwrap_or(0)
    }

    /// The first `count` view labels in ascending order.
    pub fn first_views(&self, count: usize) -> Result<Vec<u32>> {
        let all = self.view_labels();
        if count == 0 || count > all.len() {
            return Err(Error::InvalidParameter(format!(
                "requested {count} views, dataset has {}",
                all.len()
            )));
        }
        Ok(all[..count].to_vec())
    }
}

fn filter_views(samples: &[Sample], views: &[u32]) -> Vec<Sample> {
    samples
        .iter()
        .filter(|s| views.contains(&s.view_id))
        .cloned()
        .collect()
}

/// Pair test samples into multi-view observations: within each class,
/// the j-th test sample of every requested view forms observation j.
pub fn assemble_observations(
    test: &[Sample],
    views: &[u32],
) -> Result<Vec<(MultiViewObservation, u32)>> {
    let mut by_class: BTreeMap<u32, BTreeMap<u32, Vec<&Sample>>> = BTreeMap::new();
    for s in test {
        by_class
            .entry(s.class_id)
            .or_default()
            .entry(s.view_id)
            .or_default()
            .push(s);
    }
    let mut observations = Vec::new();
    for (&class, per_view) in &by_class {
        let lists: Vec<&Vec<&Sample>> = views
            .iter()
            .map(|v| {
                per_view.get(v).ok_or_else(|| {
                    Error::InsufficientSamples(format!(
                        "class {class} has no test samples for view {v}"
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let slots = lists.iter().map(|l| l.len()).min().unwrap_or(0);
        for j in 0..slots {
            let columns: Vec<Array1<f64>> = lists.iter().map(|l| l[j].vector.clone()).collect();
            observations.push((MultiViewObservation::from_views(&columns)?, class));
        }
    }
    if observations.is_empty() {
        return Err(Error::InsufficientSamples(
            "no test observations could be assembled".into(),
        ));
    }
    Ok(observations)
}

/// Predict a label for every observation with one method. Observations
/// are classified in parallel; predictions come back in input order.
pub fn classify_test_set(
    dict: &Dictionary,
    observations: &[(MultiViewObservation, u32)],
    method: Method,
    params: &EvalParams,
) -> Result<Vec<u32>> {
    params.jpcem.validate()?;
    let lambda = match method {
        Method::Jpcem => params.jpcem.lambda,
        _ => 0.0,
    };
    let solver = DictionarySolver::new(dict, lambda)?;
    try_map_indices(observations.len(), |i| {
        let (obs, _) = &observations[i];
        let result = match method {
            Method::Jpcem => {
                let coefficients = jpcem_solve_with(&solver, obs, &params.jpcem)?;
                classify_multiview(dict, obs, coefficients)?
            }
            Method::SrcSingle => {
                src_single_with(&solver, &obs.view(0).to_owned(), params.src_weight)?
            }
            Method::SrcMultiview => src_multiview_with(&solver, obs, params.src_weight)?,
        };
        Ok(result.predicted_class)
    })
}

/// Fraction of correct predictions.
pub fn accuracy(predictions: &[u32], truths: &[u32]) -> f64 {
    debug_assert_eq!(predictions.len(), truths.len());
    if predictions.is_empty() {
        return 0.0;
    }
    let correct = predictions
        .iter()
        .zip(truths.iter())
        .filter(|(p, t)| p == t)
        .count();
    correct as f64 / predictions.len() as f64
}

fn eval_split(
    train: &[Sample],
    test: &[Sample],
    views: &[u32],
    methods: &[Method],
    params: &EvalParams,
) -> Result<Vec<f64>> {
    let dict = dictionary_from_samples(train)?;
    let observations = assemble_observations(test, views)?;
    let truths: Vec<u32> = observations.iter().map(|(_, c)| *c).collect();
    let mut accuracies = Vec::with_capacity(methods.len());
    for &method in methods {
        let predictions = classify_test_set(&dict, &observations, method, params)?;
        accuracies.push(accuracy(&predictions, &truths));
    }
    Ok(accuracies)
}

fn method_names(methods: &[Method]) -> Vec<String> {
    methods.iter().map(|m| m.name().to_string()).collect()
}

fn base_config(params: &EvalParams, methods: &[Method]) -> ReportConfig {
    ReportConfig {
        dataset: None,
        methods: method_names(methods),
        sigma: params.jpcem.sigma,
        lambda: params.jpcem.lambda,
        alpha: params.jpcem.alpha,
        eps: params.jpcem.eps,
        outer_tol: params.jpcem.outer_tol,
        inner_tol: params.jpcem.inner_tol,
        max_outer_iters: params.jpcem.max_outer_iters,
        max_inner_iters: params.jpcem.max_inner_iters,
        src_weight: params.src_weight,
        rng: GENERATOR_ID.to_string(),
        seed: None,
        seeds: None,
        train_size: None,
        num_views: None,
        num_repeats: None,
        view_counts: None,
        train_sizes: None,
        num_points: None,
    }
}

/// Moment-matched Gaussian fit: mean and population standard deviation.
/// A single observation reports std 0 by construction.
fn moment_fit(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn summarize(methods: &[Method], records: &[Record]) -> Vec<MethodSummary> {
    methods
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let column: Vec<f64> = records.iter().map(|r| r.values[j]).collect();
            let (mean, std) = moment_fit(&column);
            MethodSummary {
                method: m.name().to_string(),
                mean,
                std,
            }
        })
        .collect()
}

fn sorted_grid(values: &[usize]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Sample the penalty-vs-activation curve on a uniform grid over (0, 1).
pub fn exp_rho_kappa(
    sigma: f64,
    lambda: f64,
    eps: f64,
    num_points: usize,
) -> Result<ExperimentReport> {
    for (name, v) in [("sigma", sigma), ("lambda", lambda), ("eps", eps)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    if num_points == 0 {
        return Err(Error::InvalidParameter("num_points must be >= 1".into()));
    }
    let start = Instant::now();
    let records: Vec<Record> = (1..=num_points)
        .map(|j| {
            let kappa = j as f64 / (num_points as f64 + 1.0);
            Record {
                x: kappa,
                values: vec![rho_value(kappa, sigma, lambda, eps)],
                seconds: 0.0,
            }
        })
        .collect();
    let mut config = base_config(&EvalParams::default(), &[]);
    config.sigma = sigma;
    config.lambda = lambda;
    config.eps = eps;
    config.num_points = Some(num_points);
    config.rng = "none".into();
    Ok(ExperimentReport {
        experiment_id: "rho-kappa".into(),
        config,
        records,
        summary: vec![],
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Accuracy as the number of views grows: one seeded split, then for
/// each view count the dictionary and observations are restricted to
/// the first views in label order.
pub fn exp_accuracy_vs_views(
    dataset: &Dataset,
    view_counts: &[usize],
    train_size: usize,
    methods: &[Method],
    seed: u64,
    params: &EvalParams,
) -> Result<ExperimentReport> {
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    let grid = sorted_grid(view_counts);
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty view-count grid".into()));
    }
    let max_views = *grid.last().unwrap();
    dataset.first_views(max_views)?; // validates the grid upfront
    let test_count = dataset
        .min_group_size()
        .checked_sub(train_size)
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Error::InsufficientSamples(format!(
                "train size {train_size} leaves no test samples (smallest group: {})",
                dataset.min_group_size()
            ))
        })?;
    let start = Instant::now();
    let (train, test) = split_random(dataset.samples(), train_size, test_count, seed)?;
    let mut records = Vec::with_capacity(grid.len());
    for &v in &grid {
        let tick = Instant::now();
        let views = dataset.first_views(v)?;
        let train_v = filter_views(&train, &views);
        let test_v = filter_views(&test, &views);
        let values = eval_split(&train_v, &test_v, &views, methods, params)?;
        records.push(Record {
            x: v as f64,
            values,
            seconds: tick.elapsed().as_secs_f64(),
        });
    }
    let summary = summarize(methods, &records);
    let mut config = base_config(params, methods);
    config.dataset = Some(dataset.descriptor().to_string());
    config.seed = Some(seed);
    config.train_size = Some(train_size);
    config.view_counts = Some(grid);
    Ok(ExperimentReport {
        experiment_id: "views".into(),
        config,
        records,
        summary,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Accuracy as the per-view training size grows, at a fixed view count.
/// All sizes share one seed, so smaller training sets are prefixes of
/// larger ones.
pub fn exp_accuracy_vs_train_size(
    dataset: &Dataset,
    train_sizes: &[usize],
    num_views: usize,
    methods: &[Method],
    seed: u64,
    params: &EvalParams,
) -> Result<ExperimentReport> {
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    let grid = sorted_grid(train_sizes);
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::InvalidParameter(
            "train sizes must be a nonempty grid of positive counts".into(),
        ));
    }
    let views = dataset.first_views(num_views)?;
    let max_size = *grid.last().unwrap();
    let test_count = dataset
        .min_group_size()
        .checked_sub(max_size)
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Error::InsufficientSamples(format!(
                "train size {max_size} leaves no test samples (smallest group: {})",
                dataset.min_group_size()
            ))
        })?;
    let start = Instant::now();
    let mut records = Vec::with_capacity(grid.len());
    for &size in &grid {
        let tick = Instant::now();
        let (train, test) = split_random(dataset.samples(), size, test_count, seed)?;
        let train_v = filter_views(&train, &views);
        let test_v = filter_views(&test, &views);
        let values = eval_split(&train_v, &test_v, &views, methods, params)?;
        records.push(Record {
            x: size as f64,
            values,
            seconds: tick.elapsed().as_secs_f64(),
        });
    }
    let summary = summarize(methods, &records);
    let mut config = base_config(params, methods);
    config.dataset = Some(dataset.descriptor().to_string());
    config.seed = Some(seed);
    config.num_views = Some(num_views);
    config.train_sizes = Some(grid);
    Ok(ExperimentReport {
        experiment_id: "train-size".into(),
        config,
        records,
        summary,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Accuracy spread over repeated random selections of the same number of
/// training samples, with a moment-matched Gaussian summary per method.
pub fn exp_selection_bias(
    dataset: &Dataset,
    num_repeats: usize,
    train_size: usize,
    num_views: usize,
    methods: &[Method],
    base_seed: u64,
    params: &EvalParams,
) -> Result<ExperimentReport> {
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    if num_repeats == 0 {
        return Err(Error::InvalidParameter("num_repeats must be >= 1".into()));
    }
    let views = dataset.first_views(num_views)?;
    let test_count = dataset
        .min_group_size()
        .checked_sub(train_size)
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Error::InsufficientSamples(format!(
                "train size {train_size} leaves no test samples (smallest group: {})",
                dataset.min_group_size()
            ))
        })?;
    let seeds: Vec<u64> = (0..num_repeats as u64).map(|r| base_seed + r).collect();
    let start = Instant::now();
    let mut records = Vec::with_capacity(num_repeats);
    for (r, &seed) in seeds.iter().enumerate() {
        let tick = Instant::now();
        let (train, test) = split_random(dataset.samples(), train_size, test_count, seed)?;
        let train_v = filter_views(&train, &views);
        let test_v = filter_views(&test, &views);
        let values = eval_split(&train_v, &test_v, &views, methods, params)?;
        records.push(Record {
            x: (r + 1) as f64,
            values,
            seconds: tick.elapsed().as_secs_f64(),
        });
    }
    let summary = summarize(methods, &records);
    let mut config = base_config(params, methods);
    config.dataset = Some(dataset.descriptor().to_string());
    config.seed = Some(base_seed);
    config.seeds = Some(seeds);
    config.train_size = Some(train_size);
    config.num_views = Some(num_views);
    config.num_repeats = Some(num_repeats);
    Ok(ExperimentReport {
        experiment_id: "selection-bias".into(),
        config,
        records,
        summary,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_synth() -> Dataset {
        Dataset::from_synth(&SynthConfig {
            num_classes: 2,
            num_views: 2,
            ambient_dim: 16,
            subspace_dim: 2,
            train_per_class_view: 6,
            test_per_class_view: 4,
            noise_std: 0.0,
            seed: 13,
        })
        .unwrap()
    }

    #[test]
    fn method_registry() {
        assert_eq!(Method::from_name("jpcem").unwrap(), Method::Jpcem);
        assert_eq!(
            Method::from_name("src-multiview").unwrap(),
            Method::SrcMultiview
        );
        let err = Method::from_name("boosting").unwrap_err();
        assert!(err.to_string().contains("jpcem"));
        assert_eq!(
            parse_method_list("jpcem, src-single").unwrap(),
            vec![Method::Jpcem, Method::SrcSingle]
        );
        assert!(parse_method_list("").is_err());
    }

    #[test]
    fn rho_kappa_curve_shape() {
        let report = exp_rho_kappa(0.018, 2e-5, 1e-18, 99).unwrap();
        assert_eq!(report.records.len(), 99);
        // Strictly decreasing over the whole grid.
        for pair in report.records.windows(2) {
            assert!(pair[1].values[0] < pair[0].values[0]);
        }
        // Grid point kappa = 0.5.
        let mid = report
            .records
            .iter()
            .find(|r| (r.x - 0.5).abs() < 1e-12)
            .unwrap();
        assert_abs_diff_eq!(mid.values[0], 1.4978e-3, epsilon = 1e-6);
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("kappa,rho\n"));
    }

    #[test]
    fn accuracy_hand_case() {
        assert_abs_diff_eq!(accuracy(&[1, 2, 2, 1], &[1, 2, 1, 2]), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(accuracy(&[3], &[3]), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_method_report_has_single_column() {
        let ds = small_synth();
        let report =
            exp_accuracy_vs_views(&ds, &[1, 2], 4, &[Method::Jpcem], 3, &EvalParams::default())
                .unwrap();
        assert_eq!(report.config.methods, vec!["jpcem"]);
        for r in &report.records {
            assert_eq!(r.values.len(), 1);
            assert!((0.0..=1.0).contains(&r.values[0]));
        }
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.records[0].x, 1.0);
        assert_eq!(report.records[1].x, 2.0);
    }

    #[test]
    fn noiseless_generous_training_is_perfect() {
        let ds = small_synth();
        let report =
            exp_accuracy_vs_views(&ds, &[2], 6, &Method::ALL, 5, &EvalParams::default()).unwrap();
        for value in &report.records[0].values {
            assert_abs_diff_eq!(*value, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn train_size_grid_is_covered_exactly() {
        let ds = small_synth();
        let report = exp_accuracy_vs_train_size(
            &ds,
            &[2, 3, 4],
            2,
            &[Method::SrcMultiview],
            1,
            &EvalParams::default(),
        )
        .unwrap();
        let xs: Vec<f64> = report.records.iter().map(|r| r.x).collect();
        assert_eq!(xs, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn selection_bias_repeats_and_moments() {
        let ds = small_synth();
        let report = exp_selection_bias(
            &ds,
            4,
            4,
            2,
            &[Method::SrcMultiview],
            100,
            &EvalParams::default(),
        )
        .unwrap();
        assert_eq!(report.records.len(), 4);
        assert_eq!(report.config.seeds, Some(vec![100, 101, 102, 103]));
        let column: Vec<f64> = report.records.iter().map(|r| r.values[0]).collect();
        let mean = column.iter().sum::<f64>() / 4.0;
        assert_abs_diff_eq!(report.summary[0].mean, mean, epsilon = 1e-15);

        // A single repeat reports std 0 by the moment convention.
        let single = exp_selection_bias(
            &ds,
            1,
            4,
            2,
            &[Method::SrcMultiview],
            100,
            &EvalParams::default(),
        )
        .unwrap();
        assert_eq!(single.summary[0].std, 0.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let ds = small_synth();
        let run = || {
            exp_selection_bias(
                &ds,
                2,
                4,
                2,
                &[Method::SrcMultiview, Method::Jpcem],
                7,
                &EvalParams::default(),
            )
            .unwrap()
        };
        assert_eq!(run().results_digest(), run().results_digest());
    }

    #[test]
    fn observation_assembly_pairs_views_per_class() {
        let ds = small_synth();
        let (_, test) = split_random(ds.samples(), 6, 4, 9).unwrap();
        let obs = assemble_observations(&test, &[1, 2]).unwrap();
        // Two classes, four test slots each.
        assert_eq!(obs.len(), 8);
        for (o, _) in &obs {
            assert_eq!(o.num_views(), 2);
        }
    }

    #[test]
    fn oversized_view_request_fails_upfront() {
        let ds = small_synth();
        assert!(exp_accuracy_vs_views(
            &ds,
            &[1, 5],
            4,
            &[Method::Jpcem],
            3,
            &EvalParams::default(),
        )
        .is_err());
    }
}
