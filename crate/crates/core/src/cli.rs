//! The `tam` command line: corpus in, models and reports out.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::corpus::{split_folds, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    category_distribution, closed_test, cross_domain_eval, cross_validate, effective_features,
    evaluate_model, format_table, jsonl_records, sign_test_reports, PrecisionReport, TableCell,
    TableRow,
};
use crate::features::{FeatureConfig, FeatureSet};
use crate::learner::{LearnerSpec, TrainedModel};
use crate::maxent::MaxEntParams;
use crate::svm::SvmParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_TRAINING: i32 = 3;

/// Process exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Argument(_) | Error::Config(_) => EXIT_USAGE,
        Error::Training { .. } => EXIT_TRAINING,
        Error::Parse { .. }
        | Error::Encoding(_)
        | Error::Descriptor { .. }
        | Error::InvalidExample(_)
        | Error::Model(_)
        | Error::Io(_)
        | Error::Serde(_) => EXIT_DATA,
    }
}

#[derive(Debug, Parser)]
#[command(name = "tam", version, about = "Tense/aspect/modality classification experiments")]
pub struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it to a file.
    Train(TrainArgs),
    /// Label a corpus with a saved model (or the baseline) and report precision.
    Eval(EvalArgs),
    /// Cross-validate one learner, or the whole method grid with --all.
    Cv(CvArgs),
    /// Train on one corpus, test on another.
    CrossDomain(CrossDomainArgs),
    /// Sign test between two feature sets and the features behind the difference.
    Analyze(AnalyzeArgs),
    /// Category occurrence rates of a corpus.
    Distribution(DistributionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Knn,
    Dlist,
    Maxent,
    Svm,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Knn => "knn",
            Method::Dlist => "dlist",
            Method::Maxent => "maxent",
            Method::Svm => "svm",
            Method::Baseline => "baseline",
        }
    }
}

fn parse_feature_set(s: &str) -> std::result::Result<FeatureSet, String> {
    s.parse::<FeatureSet>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct LearnerArgs {
    #[arg(long, value_enum, default_value = "svm")]
    pub method: Method,
    /// Feature set 1 (suffixes + tokens), 2 (suffixes) or 3 (tokens).
    /// Defaults to 2 for knn and 1 otherwise.
    #[arg(long, value_parser = parse_feature_set)]
    pub features: Option<FeatureSet>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Polynomial kernel degree (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// SVM box constant.
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Drop trailing punctuation before taking suffixes.
    #[arg(long)]
    pub strip_punctuation: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Saved model; may be omitted with --method baseline.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run the closed test (train and test on everything).
    #[arg(long)]
    pub closed: bool,
    /// Run every method × feature-set combination, open and closed, and
    /// print the precision matrix.
    #[arg(long)]
    pub all: bool,
    /// Line-delimited JSON records (stdout if absent, unless --all).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CrossDomainArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Folds for test examples that also occur in the training corpus.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long)]
    pub input: PathBuf,
    /// Feature set of the first system (its wins count as n_plus).
    #[arg(long, value_parser = parse_feature_set, default_value = "1")]
    pub features_a: FeatureSet,
    #[arg(long, value_parser = parse_feature_set, default_value = "2")]
    pub features_b: FeatureSet,
    /// Feature set searched for features over-represented where the first
    /// system wins.
    #[arg(long, value_parser = parse_feature_set, default_value = "3")]
    pub effective_features: FeatureSet,
    #[arg(long, default_value_t = 0.01)]
    pub level: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DistributionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// The fully resolved settings of a run, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: &'static str,
    pub method: Option<Method>,
    pub feature_set: Option<String>,
    pub k: Option<usize>,
    pub d: Option<u32>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub strip_punctuation: bool,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
}

impl ExperimentConfig {
    fn new(command: &'static str, inputs: &[&Path]) -> Self {
        Self {
            command,
            method: None,
            feature_set: None,
            k: None,
            d: None,
            c: None,
            strip_punctuation: false,
            folds: None,
            seed: None,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        }
    }

    fn with_learner(mut self, args: &LearnerArgs, features: FeatureSet) -> Self {
        self.method = Some(args.method);
        self.feature_set = Some(features.to_string());
        self.strip_punctuation = args.strip_punctuation;
        match args.method {
            Method::Knn => self.k = Some(args.k),
            Method::Svm => {
                self.d = Some(args.d);
                self.c = Some(args.c);
            }
            _ => {}
        }
        self
    }

    fn with_folds(mut self, folds: usize, seed: u64) -> Self {
        self.folds = Some(folds);
        self.seed = Some(seed);
        self
    }
}

impl LearnerArgs {
    fn feature_set(&self) -> FeatureSet {
        self.features.unwrap_or(match self.method {
            Method::Knn => FeatureSet::Suffix,
            _ => FeatureSet::Combined,
        })
    }

    /// Checks the combination and turns it into a learner and features.
    pub fn resolve(&self) -> Result<(LearnerSpec, FeatureConfig)> {
        let fs = self.feature_set();
        let spec = match self.method {
            Method::Knn => {
                if fs != FeatureSet::Suffix {
                    return Err(Error::Config(format!(
                        "knn needs --features 2: suffix similarity is undefined for feature set {fs}"
                    )));
                }
                LearnerSpec::Knn { k: self.k }
            }
            Method::Dlist => LearnerSpec::DecisionList,
            Method::Maxent => LearnerSpec::MaxEnt {
                params: MaxEntParams::default(),
            },
            Method::Svm => {
                if !matches!(self.d, 1 | 2) {
                    return Err(Error::Config(format!("--d must be 1 or 2, got {}", self.d)));
                }
                LearnerSpec::Svm {
                    params: SvmParams {
                        c: self.c,
                        ..SvmParams::with_degree(self.d)
                    },
                }
            }
            Method::Baseline => LearnerSpec::Baseline,
        };
        spec.check(fs)?;
        let mut features = FeatureConfig::new(fs);
        features.strip_punctuation = self.strip_punctuation;
        Ok((spec, features))
    }
}

fn check_folds(folds: usize) -> Result<()> {
    if folds < 2 {
        return Err(Error::Argument(format!("--folds must be at least 2, got {folds}")));
    }
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => train(args),
        Command::Eval(args) => eval(args),
        Command::Cv(args) => cv(args),
        Command::CrossDomain(args) => cross_domain(args),
        Command::Analyze(args) => analyze(args),
        Command::Distribution(args) => distribution(args),
    }
}

fn train(args: &TrainArgs) -> Result<()> {
    let (spec, features) = args.learner.resolve()?;
    let data = Dataset::load(&args.input)?;
    let model = TrainedModel::train(&spec, &data, features)?;
    model.save(&args.model)?;
    log::info!("wrote {} model to {}", spec, args.model.display());
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let model = match (&args.model, args.method) {
        (Some(path), None) => TrainedModel::load(path)?,
        (Some(path), Some(method)) => {
            let model = TrainedModel::load(path)?;
            if model.method() != method.name() {
                return Err(Error::Argument(format!(
                    "--method {} does not match the {} model in {}",
                    method.name(),
                    model.method(),
                    path.display()
                )));
            }
            model
        }
        (None, Some(Method::Baseline)) => TrainedModel::train(
            &LearnerSpec::Baseline,
            std::iter::empty::<&crate::corpus::Example>(),
            FeatureConfig::new(FeatureSet::Combined),
        )?,
        (None, _) => {
            return Err(Error::Argument(
                "eval needs --model unless --method baseline".into(),
            ))
        }
    };
    let data = Dataset::load(&args.input)?;
    let report = evaluate_model(&model, &data)?;

    let mut inputs: Vec<&Path> = vec![&args.input];
    if let Some(m) = &args.model {
        inputs.push(m);
    }
    let mut config = ExperimentConfig::new("eval", &inputs);
    config.method = Some(args.method.unwrap_or(method_of(model.learner())));
    config.feature_set = Some(model.features().feature_set.to_string());
    config.strip_punctuation = model.features().strip_punctuation;
    emit(args.output.as_deref(), &jsonl_records(&report, &config)?)
}

fn method_of(spec: &LearnerSpec) -> Method {
    match spec {
        LearnerSpec::Knn { .. } => Method::Knn,
        LearnerSpec::DecisionList => Method::Dlist,
        LearnerSpec::MaxEnt { .. } => Method::Maxent,
        LearnerSpec::Svm { .. } => Method::Svm,
        LearnerSpec::Baseline => Method::Baseline,
    }
}

fn cv(args: &CvArgs) -> Result<()> {
    check_folds(args.folds)?;
    if args.all {
        return cv_grid(args);
    }
    let (spec, features) = args.learner.resolve()?;
    let data = Dataset::load(&args.input)?;
    let plan = split_folds(&data, args.folds, args.seed)?;
    let config = ExperimentConfig::new("cv", &[&args.input])
        .with_learner(&args.learner, features.feature_set)
        .with_folds(args.folds, args.seed);

    let mut text = jsonl_records(&cross_validate(&spec, features, &data, &plan)?, &config)?;
    if args.closed {
        text.push_str(&jsonl_records(&closed_test(&spec, features, &data)?, &config)?);
    }
    emit(args.output.as_deref(), &text)
}

/// Rows of the method grid: k-NN for k = 1, 3, 5, 7, 9, then the decision
/// list, maximum entropy and the SVM with d = 1 and 2.
fn grid_rows(c: f64) -> Vec<LearnerSpec> {
    let mut rows: Vec<LearnerSpec> = [1, 3, 5, 7, 9].map(|k| LearnerSpec::Knn { k }).to_vec();
    rows.push(LearnerSpec::DecisionList);
    rows.push(LearnerSpec::MaxEnt {
        params: MaxEntParams::default(),
    });
    for d in [1, 2] {
        rows.push(LearnerSpec::Svm {
            params: SvmParams {
                c,
                ..SvmParams::with_degree(d)
            },
        });
    }
    rows
}

fn cv_grid(args: &CvArgs) -> Result<()> {
    let data = Dataset::load(&args.input)?;
    let plan = split_folds(&data, args.folds, args.seed)?;
    let mut records = String::new();
    let mut rows = Vec::new();
    let base_config = ExperimentConfig::new("cv", &[&args.input]).with_folds(args.folds, args.seed);

    let mut run = |spec: &LearnerSpec, fs: FeatureSet| -> Result<TableCell> {
        let mut features = FeatureConfig::new(fs);
        features.strip_punctuation = args.learner.strip_punctuation;
        let mut config = base_config.clone();
        config.method = Some(method_of(spec));
        config.feature_set = Some(fs.to_string());
        config.strip_punctuation = features.strip_punctuation;
        match spec {
            LearnerSpec::Knn { k } => config.k = Some(*k),
            LearnerSpec::Svm { params } => {
                config.d = Some(params.degree);
                config.c = Some(params.c);
            }
            _ => {}
        }
        log::info!("{spec} feature set {fs}");
        let open = cross_validate(spec, features, &data, &plan)?;
        let closed = closed_test(spec, features, &data)?;
        records.push_str(&jsonl_records(&open, &config)?);
        records.push_str(&jsonl_records(&closed, &config)?);
        Ok(TableCell {
            open: Some(open.precision()),
            closed: Some(closed.precision()),
        })
    };

    for spec in grid_rows(args.learner.c) {
        let mut cells = [TableCell::default(); 3];
        for fs in FeatureSet::ALL {
            if spec.check(fs).is_ok() {
                cells[fs.number() as usize - 1] = run(&spec, fs)?;
            }
        }
        rows.push(TableRow {
            method: spec.row_label(),
            cells,
        });
    }
    let baseline = run(&LearnerSpec::Baseline, FeatureSet::Combined)?;

    let mut table = format_table(&rows);
    table.push_str(&format!(
        "\nbaseline = {:.2}%\n",
        100.0 * baseline.open.unwrap_or(0.0)
    ));
    match &args.output {
        Some(path) => {
            std::fs::write(path, &records)?;
            emit(None, &table)
        }
        None => emit(None, &format!("{table}\n{records}")),
    }
}

fn cross_domain(args: &CrossDomainArgs) -> Result<()> {
    check_folds(args.folds)?;
    let (spec, features) = args.learner.resolve()?;
    let train = Dataset::load(&args.train)?;
    let test = Dataset::load(&args.test)?;
    let report = cross_domain_eval(&spec, features, &train, &test, args.folds, args.seed)?;
    let config = ExperimentConfig::new("cross-domain", &[&args.train, &args.test])
        .with_learner(&args.learner, features.feature_set)
        .with_folds(args.folds, args.seed);
    emit(args.output.as_deref(), &jsonl_records(&report, &config)?)
}

fn analyze(args: &AnalyzeArgs) -> Result<()> {
    check_folds(args.folds)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(Error::Argument(format!("--level must be in (0, 1), got {}", args.level)));
    }
    let system = |fs: FeatureSet| -> Result<(LearnerSpec, FeatureConfig)> {
        LearnerArgs {
            features: Some(fs),
            ..args.learner.clone()
        }
        .resolve()
    };
    let (spec_a, features_a) = system(args.features_a)?;
    let (spec_b, features_b) = system(args.features_b)?;

    let data = Dataset::load(&args.input)?;
    let plan = split_folds(&data, args.folds, args.seed)?;
    let a: PrecisionReport = cross_validate(&spec_a, features_a, &data, &plan)?;
    let b: PrecisionReport = cross_validate(&spec_b, features_b, &data, &plan)?;
    let test = sign_test_reports(&a, &b, args.level)?;

    // Examples the first system gets right and the second gets wrong.
    let flip: Vec<_> = a
        .predictions
        .iter()
        .zip(&b.predictions)
        .filter(|(x, y)| x.is_correct() && !y.is_correct())
        .map(|(x, _)| &data.examples()[x.index])
        .collect();
    let mut extractor = FeatureConfig::new(args.effective_features);
    extractor.strip_punctuation = args.learner.strip_punctuation;
    let selected = effective_features(
        flip.iter().copied(),
        data.iter(),
        &extractor.extractor(),
        args.level,
    );

    let mut config = ExperimentConfig::new("analyze", &[&args.input])
        .with_learner(&args.learner, args.features_a)
        .with_folds(args.folds, args.seed);
    config.feature_set = Some(format!("{} vs {}", args.features_a, args.features_b));

    let mut text = serde_json::to_string(&json!({
        "record": "sign-test",
        "config": config,
        "precision_a": a.precision(),
        "precision_b": b.precision(),
        "n_plus": test.n_plus,
        "n_minus": test.n_minus,
        "p_value": test.p_value,
        "level": test.level,
        "significant": test.significant,
        "exact": test.exact,
    }))?;
    text.push('\n');
    for (rank, f) in selected.iter().enumerate() {
        text.push_str(&serde_json::to_string(&json!({
            "record": "effective-feature",
            "rank": rank + 1,
            "feature": f.feature.to_string(),
            "frequency": f.frequency,
            "overall": f.overall,
            "p_value": f.p_value,
        }))?);
        text.push('\n');
    }
    emit(args.output.as_deref(), &text)
}

fn distribution(args: &DistributionArgs) -> Result<()> {
    let data = Dataset::load(&args.input)?;
    if data.is_empty() {
        return Err(Error::Argument("corpus is empty".into()));
    }
    let rates = category_distribution(&data);
    let width = rates.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    let mut text = String::new();
    for (label, rate) in rates {
        let count = data.label_counts()[&label];
        let pad = " ".repeat(width - label.chars().count());
        text.push_str(&format!("{label}{pad}  {count:>6}  {rate:.2}\n"));
    }
    emit(args.output.as_deref(), &text)
}

/// Parses `args`, runs the command and returns the exit status. Help and
/// version requests exit 0; unparsable arguments exit 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("tam: {e}");
            exit_code(&e)
        }
    }
}
