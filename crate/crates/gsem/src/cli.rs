//! Command-line front end.
//!
//! Subcommands cover the full pipeline: `fit` learns a coefficient matrix,
//! `cv` runs the cross-validated AUPR evaluation, `tune` grid-searches
//! hyperparameters on validation folds, `interpret` and `export-network`
//! analyse a fitted model against disease classes, and `synth-data` writes
//! the bundled synthetic benchmark. Every command accepts `--config` with
//! a TOML file; explicit flags override file values, which override
//! defaults. Outputs are deterministic for a fixed configuration and seed.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::data::AssociationMatrix;
use crate::error::{Error, Result};
use crate::eval::{cross_validate, grid_search};
use crate::graph::{build_graph, SimilarityGraph};
use crate::interpret::{analyze, build_network, DiseaseClassMap};
use crate::io;
use crate::model::CoefficientMatrix;
use crate::solver::fit;
use crate::synth;

#[derive(Debug, Parser)]
#[command(
    name = "gsem",
    version,
    about = "Graph-regularized self-expressive models for drug-disease association prediction"
)]
pub struct Cli {
    /// TOML run configuration; explicit flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Drug-disease associations (edge list or dense 0/1 TSV).
    #[arg(long, value_name = "FILE")]
    pub associations: Option<PathBuf>,

    /// Disease-disease similarity matrix; required when alpha > 0.
    #[arg(long, value_name = "FILE")]
    pub similarity: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct HyperArgs {
    /// Graph-smoothness weight.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Ridge weight.
    #[arg(long)]
    pub beta: Option<f64>,

    /// Sparsity weight.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Diagonal suppression weight.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Similarity threshold; weights below it are dropped.
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct FitArgs {
    /// Iteration cap.
    #[arg(long)]
    pub maxiter: Option<usize>,

    /// Relative-change stopping tolerance.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Upper bound of the uniform random initialisation.
    #[arg(long)]
    pub init_bound: Option<f64>,

    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model on all data and write the coefficient matrix.
    Fit {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cross-validated AUPR evaluation over negative-to-positive ratios.
    Cv {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        fit: FitArgs,
        /// Number of cross-validation folds.
        #[arg(long)]
        folds: Option<usize>,
        /// Comma-separated negative-to-positive ratios.
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Grid-search hyperparameters by nested validation folds.
    Tune {
        #[command(flatten)]
        inputs: InputArgs,
        /// Diagonal suppression weight applied to every grid point.
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        fit: FitArgs,
        /// Number of cross-validation folds.
        #[arg(long)]
        folds: Option<usize>,
        /// TOML file with `alphas`, `betas`, `lambdas`, `taus` arrays.
        #[arg(long, value_name = "FILE")]
        grid_file: Option<PathBuf>,
        /// Negative-to-positive ratio on validation folds.
        #[arg(long)]
        validation_ratio: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Disease-similarity analysis of a fitted model against classes.
    Interpret {
        #[command(flatten)]
        inputs: InputArgs,
        /// Disease class assignments (disease, class TSV).
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
        /// Reuse a saved coefficient matrix instead of refitting.
        #[arg(long, value_name = "FILE")]
        coefficients: Option<PathBuf>,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Export the thresholded disease-similarity network.
    ExportNetwork {
        #[command(flatten)]
        inputs: InputArgs,
        /// Disease class assignments (disease, class TSV).
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
        /// Reuse a saved coefficient matrix instead of refitting.
        #[arg(long, value_name = "FILE")]
        coefficients: Option<PathBuf>,
        /// Keep edges with similarity at or above this, in [0, 1].
        #[arg(long)]
        edge_threshold: Option<f64>,
        /// Drop classes with fewer members.
        #[arg(long)]
        min_class_size: Option<usize>,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write the synthetic benchmark dataset.
    SynthData {
        /// Generator seed; the default reproduces the bundled benchmark.
        #[arg(long, default_value_t = 77)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Fit {
            inputs,
            hyper,
            fit: fit_args,
            out,
        } => {
            apply_overrides(&mut config, &inputs, &hyper, &fit_args, &out);
            config.validate()?;
            run_fit(&config)
        }
        Command::Cv {
            inputs,
            hyper,
            fit: fit_args,
            folds,
            ratios,
            out,
        } => {
            apply_overrides(&mut config, &inputs, &hyper, &fit_args, &out);
            if let Some(folds) = folds {
                config.eval.folds = folds;
            }
            if let Some(ratios) = ratios {
                config.eval.ratios = ratios;
            }
            config.validate()?;
            run_cv(&config)
        }
        Command::Tune {
            inputs,
            gamma,
            fit: fit_args,
            folds,
            grid_file,
            validation_ratio,
            out,
        } => {
            let hyper = HyperArgs {
                gamma,
                ..HyperArgs::default()
            };
            apply_overrides(&mut config, &inputs, &hyper, &fit_args, &out);
            if let Some(folds) = folds {
                config.eval.folds = folds;
            }
            if let Some(ratio) = validation_ratio {
                config.eval.validation_ratio = ratio;
            }
            if let Some(path) = grid_file {
                config.grid = load_grid_file(&path)?;
            }
            config.validate()?;
            run_tune(&config)
        }
        Command::Interpret {
            inputs,
            classes,
            coefficients,
            hyper,
            fit: fit_args,
            out,
        } => {
            apply_overrides(&mut config, &inputs, &hyper, &fit_args, &out);
            if let Some(path) = classes {
                config.paths.classes = Some(path);
            }
            if let Some(path) = coefficients {
                config.paths.coefficients = Some(path);
            }
            config.validate()?;
            run_interpret(&config)
        }
        Command::ExportNetwork {
            inputs,
            classes,
            coefficients,
            edge_threshold,
            min_class_size,
            hyper,
            fit: fit_args,
            out,
        } => {
            apply_overrides(&mut config, &inputs, &hyper, &fit_args, &out);
            if let Some(path) = classes {
                config.paths.classes = Some(path);
            }
            if let Some(path) = coefficients {
                config.paths.coefficients = Some(path);
            }
            if let Some(threshold) = edge_threshold {
                config.interpret.edge_threshold = threshold;
            }
            if let Some(size) = min_class_size {
                config.interpret.min_class_size = size;
            }
            config.validate()?;
            run_export_network(&config)
        }
        Command::SynthData { seed, out } => {
            if let Some(dir) = out.out {
                config.paths.out = Some(dir);
            }
            run_synth_data(seed, &out_dir(&config))
        }
    }
}

fn apply_overrides(
    config: &mut RunConfig,
    inputs: &InputArgs,
    hyper: &HyperArgs,
    fit_args: &FitArgs,
    out: &OutArgs,
) {
    if let Some(path) = &inputs.associations {
        config.paths.associations = Some(path.clone());
    }
    if let Some(path) = &inputs.similarity {
        config.paths.similarity = Some(path.clone());
    }
    if let Some(dir) = &out.out {
        config.paths.out = Some(dir.clone());
    }
    if let Some(alpha) = hyper.alpha {
        config.hyperparameters.alpha = alpha;
    }
    if let Some(beta) = hyper.beta {
        config.hyperparameters.beta = beta;
    }
    if let Some(lambda) = hyper.lambda {
        config.hyperparameters.lambda = lambda;
    }
    if let Some(gamma) = hyper.gamma {
        config.hyperparameters.gamma = gamma;
    }
    if let Some(tau) = hyper.tau {
        config.hyperparameters.tau = tau;
    }
    if let Some(maxiter) = fit_args.maxiter {
        config.fit.maxiter = maxiter;
    }
    if let Some(tol) = fit_args.tol {
        config.fit.tol = tol;
    }
    if let Some(bound) = fit_args.init_bound {
        config.fit.init_bound = bound;
    }
    if let Some(seed) = fit_args.seed {
        config.fit.seed = seed;
    }
}

fn load_grid_file(path: &Path) -> Result<crate::config::GridConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

fn out_dir(config: &RunConfig) -> PathBuf {
    config
        .paths
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("gsem-out"))
}

fn require<'a>(path: &'a Option<PathBuf>, what: &str, flag: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "{what} required: pass {flag} or set it in the config"
        ))
    })
}

/// Loads associations plus the similarity graph the hyperparameters call
/// for. With alpha = 0 the graph is unused, so the similarity file is
/// optional and skipped entirely when absent.
fn load_inputs(config: &RunConfig) -> Result<(AssociationMatrix, SimilarityGraph)> {
    let assoc_path = require(
        &config.paths.associations,
        "association matrix",
        "--associations",
    )?;
    if config.paths.similarity.is_none() && config.hyperparameters.alpha > 0.0 {
        return Err(Error::InvalidConfig(
            "alpha > 0 needs a similarity matrix: pass --similarity or set it in the config".into(),
        ));
    }
    let x = io::load_associations(assoc_path)?;
    let graph = match &config.paths.similarity {
        Some(path) => {
            let raw = io::load_similarity(path, x.disease_ids())?;
            build_graph(&raw, config.hyperparameters.tau)?
        }
        None => SimilarityGraph::empty(x.n_diseases()),
    };
    Ok((x, graph))
}

/// Obtains the coefficient matrix for interpretation commands: loads the
/// saved matrix when one is configured, otherwise fits on all data.
fn obtain_coefficients(
    config: &RunConfig,
    x: &AssociationMatrix,
    graph: &SimilarityGraph,
) -> Result<CoefficientMatrix> {
    match &config.paths.coefficients {
        Some(path) => io::load_coefficients(path, x.disease_ids()),
        None => {
            let result = fit(x, graph, &config.hyperparameters, &config.fit)?;
            if !result.converged {
                log::warn!(
                    "fit stopped at the iteration cap ({}); results may be loose",
                    result.iterations
                );
            }
            Ok(result.coefficients)
        }
    }
}

fn run_fit(config: &RunConfig) -> Result<()> {
    let (x, graph) = load_inputs(config)?;
    let result = fit(&x, &graph, &config.hyperparameters, &config.fit)?;
    let dir = out_dir(config);
    io::write_square_matrix(
        result.coefficients.values(),
        x.disease_ids(),
        &dir.join("coefficients.tsv"),
    )?;
    if config.hyperparameters.lambda > 0.0 {
        io::write_coefficients_sparse(
            &result.coefficients,
            x.disease_ids(),
            &dir.join("coefficients_sparse.tsv"),
        )?;
    }
    io::write_fit_summary(
        &result,
        &config.hyperparameters,
        &config.fit,
        &dir.join("fit_summary.tsv"),
    )?;
    io::write_fit_history(&result, &dir.join("fit_history.tsv"))?;
    config.write(&dir.join("resolved.toml"))?;
    println!(
        "fit: {} iterations, converged {}, objective {:.6e}",
        result.iterations,
        result.converged,
        result.objective()
    );
    Ok(())
}

fn run_cv(config: &RunConfig) -> Result<()> {
    let (x, graph) = load_inputs(config)?;
    let report = cross_validate(
        &x,
        &graph,
        &config.hyperparameters,
        &config.fit,
        config.eval.folds,
        &config.eval.ratios,
        config.fit.seed,
    )?;
    let dir = out_dir(config);
    io::write_eval_folds(&report, &dir.join("cv_folds.tsv"))?;
    io::write_eval_summary(&report, &dir.join("cv_summary.tsv"))?;
    io::write_eval_fits(&report, &dir.join("cv_fits.tsv"))?;
    config.write(&dir.join("resolved.toml"))?;
    for (ri, ratio) in report.ratios.iter().enumerate() {
        println!(
            "cv: ratio {ratio} mean AUPR {:.4} (sd {:.4})",
            report.mean(ri),
            report.sd(ri)
        );
    }
    Ok(())
}

fn run_tune(config: &RunConfig) -> Result<()> {
    let assoc_path = require(
        &config.paths.associations,
        "association matrix",
        "--associations",
    )?;
    let x = io::load_associations(assoc_path)?;
    let needs_graph = config.grid.alphas.iter().any(|&a| a > 0.0);
    let raw = match &config.paths.similarity {
        Some(path) => io::load_similarity(path, x.disease_ids())?,
        None if !needs_graph => ndarray::Array2::zeros((x.n_diseases(), x.n_diseases())),
        None => {
            return Err(Error::InvalidConfig(
                "the grid contains alpha > 0: pass --similarity or set it in the config".into(),
            ))
        }
    };
    let grid = config.grid.to_grid(config.hyperparameters.gamma);
    let result = grid_search(
        &x,
        &raw,
        &grid,
        &config.fit,
        config.eval.folds,
        config.eval.validation_ratio,
        config.fit.seed,
    )?;
    let dir = out_dir(config);
    io::write_grid_table(&result, &dir.join("grid.tsv"))?;
    io::write_best_hyperparameters(&result.best, &dir.join("best_hyperparameters.toml"))?;
    config.write(&dir.join("resolved.toml"))?;
    println!(
        "tune: best alpha {} beta {} lambda {} tau {}",
        result.best.alpha, result.best.beta, result.best.lambda, result.best.tau
    );
    Ok(())
}

fn load_class_map(config: &RunConfig, x: &AssociationMatrix) -> Result<DiseaseClassMap> {
    let classes_path = require(&config.paths.classes, "disease classes", "--classes")?;
    let known: HashSet<String> = x.disease_ids().iter().cloned().collect();
    io::load_classes(classes_path, &known)
}

fn run_interpret(config: &RunConfig) -> Result<()> {
    let (x, graph) = load_inputs(config)?;
    let classes = load_class_map(config, &x)?;
    let c = obtain_coefficients(config, &x, &graph)?;
    let analysis = analyze(&c, x.disease_ids(), &classes)?;
    let dir = out_dir(config);
    io::write_analysis(&analysis, x.disease_ids(), &dir)?;
    config.write(&dir.join("resolved.toml"))?;
    println!(
        "interpret: mean intra {:.4}, mean inter {:.4}, log10 p {:.2}",
        analysis.mean_intra(),
        analysis.mean_inter(),
        analysis.test.log10_p
    );
    Ok(())
}

fn run_export_network(config: &RunConfig) -> Result<()> {
    let (x, graph) = load_inputs(config)?;
    let classes = load_class_map(config, &x)?;
    let c = obtain_coefficients(config, &x, &graph)?;
    let analysis = analyze(&c, x.disease_ids(), &classes)?;
    let network = build_network(
        &analysis.similarity,
        x.disease_ids(),
        &classes,
        config.interpret.edge_threshold,
        config.interpret.min_class_size,
    )?;
    let dir = out_dir(config);
    io::write_network(&network, &dir.join("nodes.tsv"), &dir.join("edges.tsv"))?;
    config.write(&dir.join("resolved.toml"))?;
    println!(
        "export-network: {} nodes, {} edges",
        network.nodes.len(),
        network.edges.len()
    );
    Ok(())
}

fn run_synth_data(seed: u64, dir: &Path) -> Result<()> {
    let data = synth::benchmark_scale(seed);
    io::write_association_edges(&data.associations, &dir.join("associations.tsv"))?;
    io::write_square_matrix(
        &data.similarity,
        data.associations.disease_ids(),
        &dir.join("similarity.tsv"),
    )?;
    io::write_classes(&data.class_pairs, &dir.join("classes.tsv"))?;
    println!(
        "synth-data: {} drugs, {} diseases, {} positives",
        data.associations.n_drugs(),
        data.associations.n_diseases(),
        data.associations.n_positives()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run(["gsem", "--help"]), 0);
        assert_eq!(run(["gsem", "--version"]), 0);
        assert_eq!(run(["gsem", "fit", "--help"]), 0);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["gsem"]), 1);
        assert_eq!(run(["gsem", "no-such-command"]), 1);
        assert_eq!(run(["gsem", "fit", "--alpha", "not-a-number"]), 1);
    }

    #[test]
    fn missing_inputs_exit_one() {
        // No associations configured: an invalid-configuration error.
        assert_eq!(run(["gsem", "fit"]), 1);
    }

    #[test]
    fn missing_file_exits_two() {
        assert_eq!(
            run(["gsem", "fit", "--associations", "/no/such/file.tsv"]),
            2
        );
    }

    #[test]
    fn alpha_without_similarity_is_rejected() {
        // The associations flag resolves, so the alpha check fires first.
        assert_eq!(
            run([
                "gsem",
                "fit",
                "--alpha",
                "1.0",
                "--associations",
                "/no/such/file.tsv",
            ]),
            1
        );
    }
}
