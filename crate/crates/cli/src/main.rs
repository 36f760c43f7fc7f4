//! `mvsrc` command-line harness.
//!
//! Subcommands: `synth` (emit a synthetic dataset as manifest + graymaps),
//! `experiment rho-kappa|views|train-size|selection-bias`, and `classify`.
//! Curve data goes to CSV (stdout by default); full reports, including a
//! config echo with all seeds, go to JSON on request.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;

use mvsrc_core::classify::{multiview_src_baseline, src_single_baseline};
use mvsrc_core::data::dictionary_from_samples;
use mvsrc_core::data::{
    export_dataset, load_image_vector, load_manifest, load_samples, synth_generate, Role,
    SynthConfig, DEFAULT_IMAGE_HEIGHT, DEFAULT_IMAGE_WIDTH, GENERATOR_ID,
};
use mvsrc_core::experiment::{
    exp_accuracy_vs_train_size, exp_accuracy_vs_views, exp_rho_kappa, exp_selection_bias,
    parse_method_list, Dataset, EvalParams, Method, DEFAULT_SRC_WEIGHT,
};
use mvsrc_core::jpcem::{jpcem_solve, JpcemConfig};
use mvsrc_core::report::ExperimentReport;
use mvsrc_core::{classify_multiview, ClassificationResult, MultiViewObservation};

#[derive(Parser)]
#[command(
    name = "mvsrc",
    about = "Multi-view sparse-representation classification experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-view dataset (manifest + graymap images)
    Synth(SynthArgs),
    /// Run one of the reporting experiments
    Experiment {
        #[command(subcommand)]
        experiment: ExperimentCommand,
    },
    /// Classify one multi-view observation against a training manifest
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of target classes
    #[arg(long, default_value_t = 5)]
    classes: usize,
    /// Number of views per target
    #[arg(long, default_value_t = 5)]
    views: usize,
    /// Patch width in pixels
    #[arg(long, default_value_t = 20)]
    width: usize,
    /// Patch height in pixels
    #[arg(long, default_value_t = 10)]
    height: usize,
    /// Dimension of each (class, view) subspace
    #[arg(long = "subspace-dim", default_value_t = 4)]
    subspace_dim: usize,
    /// Training samples per view per class
    #[arg(long, default_value_t = 5)]
    train: usize,
    /// Test samples per view per class
    #[arg(long, default_value_t = 20)]
    test: usize,
    /// Additive Gaussian noise level
    #[arg(long = "noise-std", default_value_t = 0.05)]
    noise_std: f64,
    /// Generator seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct HyperArgs {
    /// Noise standard deviation of the observation model
    #[arg(long, default_value_t = 0.018)]
    sigma: f64,
    /// Slab precision / ridge weight
    #[arg(long, default_value_t = 2e-5)]
    lambda: f64,
    /// Activation-cap parameter (must stay above the positivity floor)
    #[arg(long, default_value_t = 1.0 / 9.0)]
    alpha: f64,
    /// Stabilizer inside the update formulas
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Outer-loop stopping threshold on the squared iterate difference
    #[arg(long = "outer-tol", default_value_t = 1e-6)]
    outer_tol: f64,
    /// Inner solver stationarity tolerance
    #[arg(long = "inner-tol", default_value_t = 1e-8)]
    inner_tol: f64,
    /// Outer iteration cap
    #[arg(long = "max-outer", default_value_t = 50)]
    max_outer: usize,
    /// Inner sweep cap
    #[arg(long = "max-inner", default_value_t = 500)]
    max_inner: usize,
    /// Uniform l1 penalty for the src baselines
    #[arg(long = "src-weight", default_value_t = DEFAULT_SRC_WEIGHT)]
    src_weight: f64,
}

impl HyperArgs {
    fn eval_params(&self) -> EvalParams {
        EvalParams {
            jpcem: JpcemConfig {
                sigma: self.sigma,
                lambda: self.lambda,
                alpha: self.alpha,
                eps: self.eps,
                outer_tol: self.outer_tol,
                inner_tol: self.inner_tol,
                max_outer_iters: self.max_outer,
                max_inner_iters: self.max_inner,
            },
            src_weight: self.src_weight,
        }
    }
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Manifest CSV of an on-disk dataset (otherwise a synthetic pool is used)
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Patch width for manifest ingestion
    #[arg(long, default_value_t = DEFAULT_IMAGE_WIDTH)]
    width: usize,
    /// Patch height for manifest ingestion
    #[arg(long, default_value_t = DEFAULT_IMAGE_HEIGHT)]
    height: usize,
    #[arg(long = "synth-classes", default_value_t = 5)]
    synth_classes: usize,
    #[arg(long = "synth-views", default_value_t = 5)]
    synth_views: usize,
    #[arg(long = "synth-dim", default_value_t = 200)]
    synth_dim: usize,
    #[arg(long = "synth-subspace-dim", default_value_t = 4)]
    synth_subspace_dim: usize,
    #[arg(long = "synth-train", default_value_t = 5)]
    synth_train: usize,
    #[arg(long = "synth-test", default_value_t = 20)]
    synth_test: usize,
    #[arg(long = "synth-noise-std", default_value_t = 0.05)]
    synth_noise_std: f64,
    #[arg(long = "synth-seed", default_value_t = 7)]
    synth_seed: u64,
}

impl DatasetArgs {
    fn load(&self) -> mvsrc_core::Result<Dataset> {
        match &self.manifest {
            Some(path) => Dataset::from_manifest(path, self.width, self.height),
            None => Dataset::from_synth(&SynthConfig {
                num_classes: self.synth_classes,
                num_views: self.synth_views,
                ambient_dim: self.synth_dim,
                subspace_dim: self.synth_subspace_dim,
                train_per_class_view: self.synth_train,
                test_per_class_view: self.synth_test,
                noise_std: self.synth_noise_std,
                seed: self.synth_seed,
            }),
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write curve CSV here (stdout when omitted)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Penalty-vs-activation curve on a uniform grid over (0, 1)
    RhoKappa {
        #[arg(long, default_value_t = 0.018)]
        sigma: f64,
        #[arg(long, default_value_t = 2e-5)]
        lambda: f64,
        /// Stabilizer; the default is effectively the limiting curve
        #[arg(long, default_value_t = 1e-18)]
        eps: f64,
        #[arg(long = "num-points", default_value_t = 99)]
        num_points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Accuracy vs number of views
    Views {
        #[arg(long = "min-views", default_value_t = 1)]
        min_views: usize,
        #[arg(long = "max-views", default_value_t = 5)]
        max_views: usize,
        #[arg(long = "train-size", default_value_t = 5)]
        train_size: usize,
        /// Comma-separated methods: jpcem,src-single,src-multiview
        #[arg(long, default_value = "jpcem,src-single,src-multiview")]
        methods: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Accuracy vs per-view training size
    TrainSize {
        #[arg(long = "min-size", default_value_t = 2)]
        min_size: usize,
        #[arg(long = "max-size", default_value_t = 10)]
        max_size: usize,
        #[arg(long = "num-views", default_value_t = 5)]
        num_views: usize,
        #[arg(long, default_value = "jpcem,src-single,src-multiview")]
        methods: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Accuracy distribution over repeated training selections
    SelectionBias {
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long = "train-size", default_value_t = 5)]
        train_size: usize,
        #[arg(long = "num-views", default_value_t = 5)]
        num_views: usize,
        #[arg(long, default_value = "jpcem,src-single,src-multiview")]
        methods: String,
        /// Base seed; repeat r uses seed base + r
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ClassifyArgs {
    /// Manifest whose train rows form the dictionary
    #[arg(long)]
    manifest: PathBuf,
    /// Patch width
    #[arg(long, default_value_t = DEFAULT_IMAGE_WIDTH)]
    width: usize,
    /// Patch height
    #[arg(long, default_value_t = DEFAULT_IMAGE_HEIGHT)]
    height: usize,
    /// One graymap per view, in view-label order
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Classification method
    #[arg(long, default_value = "jpcem")]
    method: String,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Write the JSON result here (stdout when omitted)
    #[arg(long)]
    json: Option<PathBuf>,
}

fn emit_report(report: &ExperimentReport, output: &OutputArgs) -> mvsrc_core::Result<()> {
    let csv = report.to_csv()?;
    match &output.csv {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &output.json {
        fs::write(path, report.to_json())?;
    }
    Ok(())
}

fn run_synth(args: &SynthArgs) -> mvsrc_core::Result<()> {
    let config = SynthConfig {
        num_classes: args.classes,
        num_views: args.views,
        ambient_dim: args.width * args.height,
        subspace_dim: args.subspace_dim,
        train_per_class_view: args.train,
        test_per_class_view: args.test,
        noise_std: args.noise_std,
        seed: args.seed,
    };
    let (train, test) = synth_generate(&config)?;
    let all: Vec<_> = train.into_iter().chain(test).collect();
    let metadata = serde_json::json!({
        "generator": GENERATOR_ID,
        "seed": config.seed,
        "classes": config.num_classes,
        "views": config.num_views,
        "width": args.width,
        "height": args.height,
        "subspace_dim": config.subspace_dim,
        "train_per_class_view": config.train_per_class_view,
        "test_per_class_view": config.test_per_class_view,
        "noise_std": config.noise_std,
        "pixel_mapping": "[-1,1] -> [0,255]",
    });
    let manifest = export_dataset(
        &args.out,
        &all,
        args.width,
        args.height,
        Some(&serde_json::to_string_pretty(&metadata).expect("metadata")),
    )?;
    eprintln!("wrote {} samples to {}", all.len(), manifest.display());
    Ok(())
}

fn classification_json(result: &ClassificationResult, method: Method) -> serde_json::Value {
    let per_class: Vec<serde_json::Value> = result
        .class_labels
        .iter()
        .zip(result.residuals.iter())
        .map(|(class, residual)| serde_json::json!({"class": class, "residual": residual}))
        .collect();
    let per_view: Vec<Vec<f64>> = (0..result.per_view_residuals.nrows())
        .map(|c| result.per_view_residuals.row(c).to_vec())
        .collect();
    let coefficients = result.coefficients.coefficients();
    let support: Vec<Vec<serde_json::Value>> = (0..coefficients.ncols())
        .map(|m| {
            coefficients
                .column(m)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(atom, &v)| serde_json::json!({"atom": atom, "coefficient": v}))
                .collect()
        })
        .collect();
    serde_json::json!({
        "method": method.name(),
        "predicted_class": result.predicted_class,
        "residuals": per_class,
        "per_view_residuals": per_view,
        "tied_classes": result.tied_classes,
        "converged_per_view": result.coefficients.converged_per_view(),
        "outer_iters_per_view": result.coefficients.outer_iters_per_view(),
        "support": support,
    })
}

fn run_classify(args: &ClassifyArgs) -> mvsrc_core::Result<()> {
    let method = Method::from_name(&args.method)?;
    let manifest = load_manifest(&args.manifest)?.with_dimensions(args.width, args.height);
    let samples = load_samples(&manifest)?;
    let train: Vec<_> = samples
        .into_iter()
        .filter(|s| s.role == Role::Train)
        .collect();
    let dict = dictionary_from_samples(&train)?;
    if args.inputs.len() != dict.num_views() {
        return Err(mvsrc_core::Error::Dimension(format!(
            "{} input views given, dictionary expects {}",
            args.inputs.len(),
            dict.num_views()
        )));
    }
    let views: Vec<Array1<f64>> = args
        .inputs
        .iter()
        .map(|p| load_image_vector(p, args.width, args.height))
        .collect::<mvsrc_core::Result<_>>()?;
    let obs = MultiViewObservation::from_views(&views)?;
    let params = args.hyper.eval_params();
    let result = match method {
        Method::Jpcem => {
            let coefficients = jpcem_solve(&dict, &obs, &params.jpcem)?;
            classify_multiview(&dict, &obs, coefficients)?
        }
        Method::SrcSingle => {
            src_single_baseline(&dict, &obs.view(0).to_owned(), params.src_weight)?
        }
        Method::SrcMultiview => multiview_src_baseline(&dict, &obs, params.src_weight)?,
    };
    let mut rendered =
        serde_json::to_string_pretty(&classification_json(&result, method)).expect("json");
    rendered.push('\n');
    match &args.json {
        Some(path) => fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn run_experiment(cmd: &ExperimentCommand) -> mvsrc_core::Result<()> {
    match cmd {
        ExperimentCommand::RhoKappa {
            sigma,
            lambda,
            eps,
            num_points,
            output,
        } => {
            let report = exp_rho_kappa(*sigma, *lambda, *eps, *num_points)?;
            emit_report(&report, output)
        }
        ExperimentCommand::Views {
            min_views,
            max_views,
            train_size,
            methods,
            seed,
            data,
            hyper,
            output,
        } => {
            let methods = parse_method_list(methods)?;
            let dataset = data.load()?;
            let counts: Vec<usize> = (*min_views..=*max_views).collect();
            let report = exp_accuracy_vs_views(
                &dataset,
                &counts,
                *train_size,
                &methods,
                *seed,
                &hyper.eval_params(),
            )?;
            emit_report(&report, output)
        }
        ExperimentCommand::TrainSize {
            min_size,
            max_size,
            num_views,
            methods,
            seed,
            data,
            hyper,
            output,
        } => {
            let methods = parse_method_list(methods)?;
            let dataset = data.load()?;
            let sizes: Vec<usize> = (*min_size..=*max_size).collect();
            let report = exp_accuracy_vs_train_size(
                &dataset,
                &sizes,
                *num_views,
                &methods,
                *seed,
                &hyper.eval_params(),
            )?;
            emit_report(&report, output)
        }
        ExperimentCommand::SelectionBias {
            repeats,
            train_size,
            num_views,
            methods,
            seed,
            data,
            hyper,
            output,
        } => {
            let methods = parse_method_list(methods)?;
            let dataset = data.load()?;
            let report = exp_selection_bias(
                &dataset,
                *repeats,
                *train_size,
                *num_views,
                &methods,
                *seed,
                &hyper.eval_params(),
            )?;
            emit_report(&report, output)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Experiment { experiment } => run_experiment(experiment),
        Command::Classify(args) => run_classify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
