use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfam_core::baselines::{ClassifierKind, ClassifierParams};
use dfam_core::dfam::{self, DfamConfig, SignatureBuilder};
use dfam_core::eval::{DfamPipeline, FeaturePipeline};
use dfam_core::features::FeatureExtractor;
use dfam_core::hcar::{self, HcarConfig};
use dfam_core::signal::{self, SensorSubset};
use dfam_core::spectral::HashFunction;
use dfam_core::{Dataset, Placement, Recording};
use serde::Serialize;

use crate::bench;
use crate::error::{Category, Error, Result};
use crate::manifest;
use crate::model_file::{self, AnyModel, ClassifierFile};
use crate::output::{self, Prediction};
use crate::runner::{self, Protocol};
use crate::synth::{self, SynthConfig};

const EXIT_CODES: &str = "\
Exit codes:
  0   success
  2   usage: bad command line
  3   io: a file could not be read or written
  4   format: malformed CSV or JSON
  5   manifest: dataset manifest rejected (missing stream, unknown placement, rate mismatch)
  6   config: invalid parameter combination (e.g. window not a power of two)
  7   data: stream or window contents unusable
  8   model: model file corrupt, empty or unsupported
  9   protocol: bad fold count or too few subjects
  10  training: a cross-validation fold failed to train

Errors are reported on stderr as one line:
  error: category=<name> message=\"<text>\"";

#[derive(Debug, Parser)]
#[command(name = "dfam", version, about = "Dominant-frequency activity matching for phone + watch motion data")]
#[command(after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic corpus (or a single scenario recording).
    GenSynth(GenSynthArgs),
    /// Validate a dataset and print a summary.
    Validate(DataArg),
    /// Train a DFAM model or a baseline classifier.
    Train(TrainArgs),
    /// Classify every window of one recording.
    Classify(ClassifyArgs),
    /// Append the window signatures of one recording to a DFAM model file.
    Append(AppendArgs),
    /// Cross-validate a classifier on a dataset.
    Eval(EvalArgs),
    /// Measure per-stage response time on one recording.
    Bench(BenchArgs),
    /// Train the two-state detector and replay a recording through it.
    Hcar(HcarArgs),
    /// Dump baseline feature vectors as CSV.
    Features(FeaturesArgs),
}

#[derive(Debug, Args)]
struct DataArg {
    /// Manifest file, or a directory of per-subject manifest directories.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Debug, Args)]
struct Selection {
    #[arg(long)]
    subject: Option<String>,
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlacementArg {
    Any,
    #[value(name = "RR")]
    Rr,
    #[value(name = "RL")]
    Rl,
    #[value(name = "LR")]
    Lr,
    #[value(name = "LL")]
    Ll,
}

impl PlacementArg {
    fn get(self) -> Option<Placement> {
        match self {
            Self::Any => None,
            Self::Rr => Some(Placement::RR),
            Self::Rl => Some(Placement::RL),
            Self::Lr => Some(Placement::LR),
            Self::Ll => Some(Placement::LL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SensorsArg {
    Accel,
    Gyro,
    Both,
}

impl SensorsArg {
    fn get(self) -> SensorSubset {
        match self {
            Self::Accel => SensorSubset::Accel,
            Self::Gyro => SensorSubset::Gyro,
            Self::Both => SensorSubset::Both,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct DfamArgs {
    /// Window size W in samples (power of two).
    #[arg(long, default_value_t = 128)]
    window: usize,
    /// Overlap ratio r between consecutive windows, in [0, 1).
    #[arg(long, default_value_t = 0.7)]
    overlap: f64,
    /// Number of spectrum bins g.
    #[arg(long, default_value_t = 3)]
    bins: usize,
    /// Hash function H0..H8.
    #[arg(long, default_value = "H2", value_parser = parse_hash)]
    hash: HashFunction,
    #[arg(long, value_enum, default_value_t = SensorsArg::Both)]
    sensors: SensorsArg,
    #[arg(long, value_enum, default_value_t = PlacementArg::Any)]
    placement: PlacementArg,
    /// Moving-average length (odd).
    #[arg(long, default_value_t = 3)]
    filter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_hash(s: &str) -> std::result::Result<HashFunction, String> {
    s.parse().map_err(|e: dfam_core::Error| e.to_string())
}

impl DfamArgs {
    fn config(&self, sampling_hz: f64) -> Result<DfamConfig> {
        signal::validate_window_size(self.window)?;
        let cfg = DfamConfig {
            window_size: self.window,
            overlap_ratio: self.overlap,
            bins: self.bins,
            hash: self.hash,
            sampling_hz,
            streams: self.sensors.get().streams(),
            placement: self.placement.get(),
            filter_length: self.filter,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierArg {
    Dfam,
    Nb,
    Dt,
    Rf,
    Knn,
}

#[derive(Debug, Clone, Args)]
struct ClassifierArgs {
    #[arg(long, value_enum, default_value_t = ClassifierArg::Dfam)]
    classifier: ClassifierArg,
    /// Neighbours for k-NN.
    #[arg(long, default_value_t = 1)]
    neighbors: usize,
    /// Trees in a random forest.
    #[arg(long, default_value_t = 50)]
    trees: usize,
    /// Maximum tree depth; 0 means unlimited.
    #[arg(long, default_value_t = 12)]
    max_depth: usize,
}

impl ClassifierArgs {
    fn params(&self, seed: u64) -> Option<ClassifierParams> {
        let kind = match self.classifier {
            ClassifierArg::Dfam => return None,
            ClassifierArg::Nb => ClassifierKind::NaiveBayes,
            ClassifierArg::Dt => ClassifierKind::DecisionTree,
            ClassifierArg::Rf => ClassifierKind::RandomForest,
            ClassifierArg::Knn => ClassifierKind::Knn,
        };
        let mut p = ClassifierParams::new(kind);
        p.k = self.neighbors;
        p.tree_count = self.trees;
        p.max_depth = (self.max_depth > 0).then_some(self.max_depth);
        p.seed = seed;
        Some(p)
    }

    fn name(&self) -> &'static str {
        match self.classifier {
            ClassifierArg::Dfam => "dfam",
            ClassifierArg::Nb => "nb",
            ClassifierArg::Dt => "dt",
            ClassifierArg::Rf => "rf",
            ClassifierArg::Knn => "knn",
        }
    }
}

#[derive(Debug, Args)]
struct GenSynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 6)]
    activities: usize,
    #[arg(long, default_value_t = 3)]
    subjects: usize,
    /// Seconds per recording.
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = 50.0)]
    rate: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    /// Per-subject tone offset half-width in Hz.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value = "RR", value_parser = parse_placement)]
    placement: Placement,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write one recording alternating between two activities, e.g.
    /// `standing,walking+reading`, instead of a corpus.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, default_value_t = 6)]
    segments: usize,
    #[arg(long, default_value_t = 20.0)]
    segment_seconds: f64,
}

fn parse_placement(s: &str) -> std::result::Result<Placement, String> {
    s.parse().map_err(|e: dfam_core::Error| e.to_string())
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArg,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    dfam: DfamArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArg,
    #[command(flatten)]
    select: Selection,
    /// Prediction CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Majority vote over this many neighbouring windows on each side (DFAM only).
    #[arg(long, default_value_t = 0)]
    smooth: usize,
}

#[derive(Debug, Args)]
struct AppendArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArg,
    #[command(flatten)]
    select: Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Kfold,
    Loso,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArg,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Kfold)]
    protocol: ProtocolArg,
    /// Number of folds for k-fold cross-validation.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    dfam: DfamArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    /// EvalReport JSON to write.
    #[arg(long)]
    out: PathBuf,
    /// Optional confusion matrix CSV.
    #[arg(long)]
    confusion: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArg,
    #[command(flatten)]
    select: Selection,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    /// JSON-lines file, one record per repetition.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct HcarArgs {
    /// Training dataset.
    #[command(flatten)]
    data: DataArg,
    /// Dataset holding the recording to replay.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    select: Selection,
    /// S1 (movement gate) window size.
    #[arg(long, default_value_t = 64)]
    s1_window: usize,
    /// S1 training overlap ratio.
    #[arg(long, default_value_t = 0.0)]
    s1_overlap: f64,
    /// S2 settings; `--window` and `--overlap` apply to S2.
    #[command(flatten)]
    dfam: DfamArgs,
    #[arg(long, default_value_t = 10.0)]
    reset_seconds: f64,
    /// Alert JSON-lines file.
    #[arg(long)]
    out: PathBuf,
    /// Optional state-trace JSON-lines file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[command(flatten)]
    data: DataArg,
    #[command(flatten)]
    dfam: DfamArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> std::result::Result<(), CliFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return Err(CliFailure::Clap(e)),
    };
    execute(cli).map_err(CliFailure::Run)
}

#[derive(Debug)]
pub enum CliFailure {
    Clap(clap::Error),
    Run(Error),
}

impl CliFailure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Clap(e) if !e.use_stderr() => 0,
            Self::Clap(_) => Category::Usage.exit_code(),
            Self::Run(e) => e.category().exit_code(),
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSynth(a) => gen_synth(a),
        Command::Validate(a) => validate(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::Append(a) => append(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Hcar(a) => hcar_cmd(a),
        Command::Features(a) => features(a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::BadConfig(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn sampling_hz(dataset: &Dataset) -> Result<f64> {
    dataset
        .recordings
        .first()
        .and_then(|r| r.streams.first())
        .map(|s| s.sampling_hz())
        .ok_or_else(|| Error::Manifest("dataset has no recordings".into()))
}

/// Loads a dataset and applies the placement filter of `args`.
fn load(path: &Path, args: &DfamArgs) -> Result<(Dataset, DfamConfig)> {
    let all = manifest::load_dataset(path)?;
    let cfg = args.config(sampling_hz(&all)?)?;
    let ds = all.filter_placement(cfg.placement);
    if ds.is_empty() {
        return Err(Error::BadConfig("no recordings match the placement filter".into()));
    }
    Ok((ds, cfg))
}

fn gen_synth(a: GenSynthArgs) -> Result<()> {
    let mut cfg = SynthConfig {
        activities: synth::activity_names(a.activities)?,
        subjects: a.subjects,
        duration_s: a.duration,
        sampling_hz: a.rate,
        noise: a.noise,
        jitter_hz: a.jitter,
        placement: a.placement,
        seed: a.seed,
    };
    if let Some(pair) = a.scenario {
        let (first, second) = pair
            .split_once(',')
            .ok_or_else(|| Error::BadConfig("--scenario expects two comma-separated activities".into()))?;
        cfg.subjects = 1;
        let segments = synth::alternating(first.trim(), second.trim(), a.segments, a.segment_seconds);
        let (rec, bounds) = synth::write_scenario(&a.out, &cfg, &segments)?;
        return print_json(&serde_json::json!({
            "subject": rec.subject,
            "samples": rec.streams[0].len(),
            "segments": bounds.len(),
        }));
    }
    cfg.validate()?;
    let recs = synth::write_corpus(&a.out, &cfg)?;
    print_json(&serde_json::json!({
        "subjects": cfg.subjects,
        "recordings": recs.len(),
        "samples_per_stream": cfg.samples_per_recording(),
    }))
}

#[derive(Serialize)]
struct Summary {
    subjects: Vec<String>,
    recordings: usize,
    labels: Vec<String>,
    sampling_hz: f64,
    shortest_stream: usize,
}

fn validate(a: DataArg) -> Result<()> {
    let ds = manifest::load_dataset(&a.data)?;
    print_json(&Summary {
        subjects: ds.subjects(),
        recordings: ds.len(),
        labels: ds.labels().into_iter().map(|l| l.name).collect(),
        sampling_hz: sampling_hz(&ds)?,
        shortest_stream: ds
            .recordings
            .iter()
            .flat_map(|r| r.streams.iter().map(|s| s.len()))
            .min()
            .unwrap_or(0),
    })
}

fn train(a: TrainArgs) -> Result<()> {
    let (ds, cfg) = load(&a.data.data, &a.dfam)?;
    match a.classifier.params(cfg.seed) {
        None => {
            let model = dfam::train(&ds.recordings, &cfg)?;
            model_file::save_model(&a.out, &model)?;
            print_json(&serde_json::json!({ "activities": model.counts() }))
        }
        Some(params) => {
            let pipeline = FeaturePipeline::new(&cfg, params)?;
            let mut x = Vec::new();
            let mut y = Vec::new();
            for rec in &ds.recordings {
                let rows = match dfam_core::eval::Pipeline::items(&pipeline, rec) {
                    Err(dfam_core::Error::InsufficientSamples { .. }) => continue,
                    other => other?,
                };
                y.extend(std::iter::repeat_n(rec.label.name.clone(), rows.len()));
                x.extend(rows);
            }
            let fitted = dfam_core::baselines::Classifier::new(pipeline_params(&a.classifier, cfg.seed))?.fit(&x, &y)?;
            let names = pipeline.extractor().names().to_vec();
            model_file::save_classifier(&a.out, &ClassifierFile::new(cfg, names, fitted))?;
            print_json(&serde_json::json!({ "windows": x.len() }))
        }
    }
}

fn pipeline_params(args: &ClassifierArgs, seed: u64) -> ClassifierParams {
    args.params(seed).expect("baseline classifier selected")
}

fn select_recording(data: &Path, sel: &Selection) -> Result<Recording> {
    let ds = manifest::load_dataset(data)?;
    bench::select(ds.recordings, sel.subject.as_deref(), sel.label.as_deref())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let model = model_file::load_any(&a.model)?;
    let rec = select_recording(&a.data.data, &a.select)?;
    let rows = match &model {
        AnyModel::Dfam(m) => {
            let builder = SignatureBuilder::from_config(m.config())?;
            let sigs = builder.recording(&rec, &m.config().segmentation())?;
            let results = sigs
                .iter()
                .map(|s| dfam::classify(s, m))
                .collect::<dfam_core::Result<Vec<_>>>()?;
            let mut labels: Vec<String> = results.iter().map(|r| r.label.name.clone()).collect();
            if a.smooth > 0 {
                labels = dfam::majority_smooth(&labels, a.smooth);
            }
            results
                .iter()
                .zip(labels)
                .enumerate()
                .map(|(i, (r, label))| Prediction {
                    window_index: i,
                    score: r.scores.iter().find(|(n, _)| *n == label).map(|(_, s)| *s),
                    predicted: label,
                })
                .collect::<Vec<_>>()
        }
        AnyModel::Classifier(c) => {
            let cfg = &c.config;
            let extractor = FeatureExtractor::new(cfg.streams.clone(), cfg.window_size, cfg.sampling_hz)?;
            let windows = signal::segment_aligned(&rec.streams, &cfg.streams, &cfg.segmentation())?;
            let mut rows = Vec::with_capacity(windows.len());
            for (i, w) in windows.iter().enumerate() {
                let f = extractor.extract(w)?;
                let k = c.classifier.predict_index(&f.values)?;
                let score = c.classifier.posteriors(&f.values).ok().map(|p| p[k]);
                rows.push(Prediction {
                    window_index: i,
                    predicted: c.classifier.classes()[k].clone(),
                    score,
                });
            }
            rows
        }
    };
    output::write_predictions(&a.out, &rows)?;
    print_json(&serde_json::json!({ "windows": rows.len() }))
}

fn append(a: AppendArgs) -> Result<()> {
    let model = model_file::load_model(&a.model)?;
    let rec = select_recording(&a.data.data, &a.select)?;
    let cfg = model.config();
    let sigs = SignatureBuilder::from_config(cfg)?.recording(&rec, &cfg.segmentation())?;
    let count = sigs.len();
    let mut updated = model;
    for s in sigs {
        updated.append(&rec.label, s)?;
    }
    model_file::save_model(&a.model, &updated)?;
    print_json(&serde_json::json!({ "appended": count, "activities": updated.counts() }))
}

fn eval(a: EvalArgs) -> Result<()> {
    let (ds, cfg) = load(&a.data.data, &a.dfam)?;
    let protocol = match a.protocol {
        ProtocolArg::Kfold => Protocol::KFold { folds: a.k },
        ProtocolArg::Loso => Protocol::Loso,
    };
    let name = a.classifier.name();
    let params = a.classifier.params(cfg.seed);
    let work = || -> Result<_> {
        match params {
            None => runner::evaluate(&DfamPipeline::new(cfg.clone())?, name, protocol, &ds, cfg.seed),
            Some(p) => runner::evaluate(&FeaturePipeline::new(&cfg, p)?, name, protocol, &ds, cfg.seed),
        }
    };
    let report = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::BadConfig(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    output::write_report(&a.out, &report)?;
    if let Some(path) = &a.confusion {
        output::write_confusion_csv(path, &report.confusion)?;
    }
    print_json(&serde_json::json!({
        "accuracy": report.accuracy,
        "mean_fold_accuracy": report.mean_fold_accuracy,
        "test_windows": report.test_windows,
    }))
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let model = model_file::load_any(&a.model)?;
    let manifest_path = bench_manifest(&a.data.data, a.select.subject.as_deref())?;
    let records = bench::bench_response(
        &model,
        &manifest_path,
        a.select.subject.as_deref(),
        a.select.label.as_deref(),
        a.repetitions,
    )?;
    output::write_json_lines(&a.out, &records)?;
    print_json(&bench::BenchSummary::of(&records))
}

/// The manifest to read during benchmarking: `--data` itself or the one
/// belonging to `--subject`.
fn bench_manifest(data: &Path, subject: Option<&str>) -> Result<PathBuf> {
    let paths = manifest::manifest_paths(data)?;
    if paths.len() == 1 {
        return Ok(paths[0].clone());
    }
    let subject = subject.ok_or_else(|| Error::BadConfig("several manifests found; pass --subject".into()))?;
    for p in paths {
        if manifest::read_manifest(&p)?.subject == subject {
            return Ok(p);
        }
    }
    Err(Error::BadConfig(format!("no manifest for subject {subject:?}")))
}

#[derive(Serialize)]
struct HcarSummary {
    alerts: usize,
    windows: usize,
    counters: hcar::WorkCounters,
    s1_comparisons_per_window: f64,
}

fn hcar_cmd(a: HcarArgs) -> Result<()> {
    let (ds, s2) = load(&a.data.data, &a.dfam)?;
    signal::validate_window_size(a.s1_window)?;
    let s1 = DfamConfig {
        window_size: a.s1_window,
        overlap_ratio: a.s1_overlap,
        ..s2.clone()
    };
    s1.validate()?;
    let cfg = HcarConfig {
        s1,
        s2,
        reset_seconds: a.reset_seconds,
    };
    let mut detector = hcar::train_detector(&ds, &cfg)?;
    let rec = select_recording(&a.input, &a.select)?;
    let sim = hcar::simulate_recording(&mut detector, &rec)?;
    output::write_json_lines(&a.out, &sim.alerts)?;
    if let Some(path) = &a.trace {
        output::write_json_lines(path, &sim.trace)?;
    }
    print_json(&HcarSummary {
        alerts: sim.alerts.len(),
        windows: sim.trace.len(),
        counters: sim.counters,
        s1_comparisons_per_window: sim.s1_comparisons_per_window(),
    })
}

fn features(a: FeaturesArgs) -> Result<()> {
    let (ds, cfg) = load(&a.data.data, &a.dfam)?;
    let extractor = FeatureExtractor::new(cfg.streams.clone(), cfg.window_size, cfg.sampling_hz)?;
    let mut rows = Vec::new();
    for rec in &ds.recordings {
        let windows = match signal::segment_aligned(&rec.streams, &cfg.streams, &cfg.segmentation()) {
            Err(dfam_core::Error::InsufficientSamples { .. }) => continue,
            other => other?,
        };
        for w in &windows {
            let mut f = extractor.extract(w)?;
            f.label = Some(rec.label.clone());
            rows.push(f);
        }
    }
    output::write_features_csv(&a.out, extractor.names(), &rows)?;
    print_json(&serde_json::json!({ "rows": rows.len(), "features": extractor.names().len() }))
}
