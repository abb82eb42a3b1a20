use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lingprobe::analysis::{similarity_matrix, similarity_to_reference, Metric, ProbeSet};
use lingprobe::dataset::{constant_schedule, linear_schedule, synthesize, SyntheticConfig};
use lingprobe::report::{
    compare_grids, grid_gaps, render_curves, render_heatmap, CurveChart, LabeledGrid,
};
use lingprobe::{
    known_models, read_archive, run_experiment, validate_against_registry, write_archive, Error,
    ExperimentConfig, HeatmapLayers, LanguageTag, ProbeRecord, ResourceClass,
};

#[derive(Parser)]
#[command(
    name = "lingprobe",
    version,
    about = "Multilingual linear probing over stored hidden states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate probes for every (language, layer) and write the report.
    Run(RunArgs),
    /// Write a synthetic hidden-state archive.
    Synth(SynthArgs),
    /// Similarity analysis over a directory of stored probes.
    Similarity(SimilarityArgs),
    /// Compare two accuracy tables cell by cell.
    Compare(CompareArgs),
    /// Check an archive and its shape against the model registry.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config or a manifest from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Archive for one language, as CODE=PATH. Repeatable; adds to the config.
    #[arg(long = "archive", value_name = "CODE=PATH")]
    archives: Vec<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Split seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Heatmap layer slot: an index, `all` or `deepest`.
    #[arg(long)]
    layer: Option<HeatmapLayers>,
    /// Heatmap metric.
    #[arg(long)]
    metric: Option<Metric>,
    #[arg(long)]
    curve_metric: Option<Metric>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = one per core.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// SyntheticConfig as JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// `linear:FROM:TO`, `constant:VALUE` or a comma-separated list.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    direction_seed: Option<u64>,
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Noise correlation between adjacent slots.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    lang: Option<String>,
    /// Resource class for language codes outside the built-in table.
    #[arg(long, default_value = "high")]
    resource: String,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimilarityArgs {
    #[arg(long)]
    probes: PathBuf,
    #[arg(long)]
    reference: String,
    #[arg(long, default_value = "cosine")]
    metric: Metric,
    /// Heatmap layer slot: an index, `all` or `deepest`.
    #[arg(long, default_value = "deepest")]
    layer: HeatmapLayers,
    /// Output directory; without it the curves are printed as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    got: PathBuf,
    #[arg(long)]
    want: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    archive: PathBuf,
}

/// Failure with the exit code it maps to.
enum Failure {
    Config(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse { .. } | Error::Json(_) | Error::Language(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Similarity(a) => cmd_similarity(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn cmd_run(a: RunArgs) -> Outcome {
    let mut config = match &a.config {
        Some(path) => {
            let mut c = ExperimentConfig::from_json(&read_text(path)?)?;
            // Relative paths in a config file are relative to that file.
            let base = path.parent().unwrap_or(Path::new("."));
            for p in c.archive_paths.values_mut() {
                *p = absolute(&base.join(&*p));
            }
            if !c.output_dir.as_os_str().is_empty() {
                c.output_dir = base.join(&c.output_dir);
            }
            c
        }
        None => ExperimentConfig::new(BTreeMap::new(), "", "", ""),
    };
    for spec in &a.archives {
        let (code, path) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--archive expects CODE=PATH, got {spec:?}")))?;
        config
            .archive_paths
            .insert(code.to_string(), absolute(Path::new(path)));
    }
    if let Some(m) = a.model {
        config.model_name = m;
    }
    if let Some(d) = a.dataset {
        config.dataset_name = d;
    }
    if let Some(l) = a.lambda {
        config.probe.lambda = l;
    }
    if let Some(s) = a.seed {
        config.split.seed = s;
    }
    if let Some(l) = a.layer {
        config.heatmap_layers = l;
    }
    if let Some(m) = a.metric {
        config.heatmap_metric = m;
    }
    if let Some(m) = a.curve_metric {
        config.curve_metric = m;
    }
    if a.reference.is_some() {
        config.reference_language = a.reference;
    }
    if let Some(o) = a.out {
        config.output_dir = o;
    }
    if let Some(w) = a.workers {
        config.workers = w;
    }
    if config.output_dir.as_os_str().is_empty() {
        return Err(Failure::Config("no output directory (use --out)".into()));
    }

    let bundle = run_experiment(&config)?;
    println!(
        "trained {} probes ({} languages x {} slots), lambda = {}",
        bundle.probes.len(),
        bundle.probes.languages().len(),
        bundle.probes.layers().len(),
        config.probe.lambda
    );
    if let Some(gap) = &bundle.summary.gap {
        println!(
            "layer {}: high-resource mean {:.4}, low-resource mean {:.4}, gap {:.4}",
            gap.layer, gap.high_mean, gap.low_mean, gap.gap
        );
    }
    println!("report written to {}", config.output_dir.display());
    Ok(())
}

fn parse_schedule(text: &str, layers: Option<usize>) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("bad schedule {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let need_layers =
        || layers.ok_or_else(|| Failure::Config("--layers is required for this schedule".into()));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["linear", from, to] => Ok(linear_schedule(need_layers()?, num(from)?, num(to)?)),
        ["constant", v] => Ok(constant_schedule(need_layers()?, num(v)?)),
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn cmd_synth(a: SynthArgs) -> Outcome {
    let mut config = match &a.config {
        Some(path) => {
            serde_json::from_str::<SyntheticConfig>(&read_text(path)?).map_err(Error::from)?
        }
        None => {
            let schedule = a
                .schedule
                .as_deref()
                .ok_or_else(|| Failure::Config("--schedule or --config is required".into()))?;
            let schedule = parse_schedule(schedule, a.layers)?;
            let dim = a
                .dim
                .ok_or_else(|| Failure::Config("--dim is required".into()))?;
            let samples = a
                .samples
                .ok_or_else(|| Failure::Config("--samples is required".into()))?;
            SyntheticConfig::new(dim, samples, schedule)
        }
    };
    if a.config.is_some() {
        if let Some(s) = &a.schedule {
            config.separation_schedule = parse_schedule(s, a.layers.or(Some(config.num_layers)))?;
            config.num_layers = config.separation_schedule.len();
        }
        if let Some(d) = a.dim {
            config.hidden_dim = d;
        }
        if let Some(n) = a.samples {
            config.num_samples = n;
        }
    }
    if let Some(l) = a.layers {
        if l != config.separation_schedule.len() {
            return Err(Failure::Config(format!(
                "--layers {l} but the schedule has {} entries",
                config.separation_schedule.len()
            )));
        }
    }
    if let Some(s) = a.direction_seed {
        config.direction_seed = s;
    }
    if let Some(s) = a.noise_seed {
        config.noise_seed = s;
    }
    if let Some(r) = a.rho {
        config.layer_noise_correlation = r;
    }
    if let Some(code) = &a.lang {
        config.language = match LanguageTag::known(code) {
            Some(t) => t,
            None => {
                let class = match a.resource.as_str() {
                    "high" => ResourceClass::High,
                    "low" => ResourceClass::Low,
                    other => {
                        return Err(Failure::Config(format!("unknown resource class {other:?}")))
                    }
                };
                LanguageTag::new(code, code, class)?
            }
        };
    }
    if let Some(m) = a.model {
        config.model_name = m;
    }
    if let Some(d) = a.dataset {
        config.dataset_name = d;
    }

    let archive = synthesize(&config)?;
    let file = fs::File::create(&a.out)
        .map_err(|e| Failure::Check(format!("{}: {e}", a.out.display())))?;
    let bytes = write_archive(
        archive.meta(),
        archive.tensors(),
        archive.labels(),
        BufWriter::new(file),
    )?;
    println!(
        "wrote {} ({} slots x {} samples x {} dims, {bytes} bytes)",
        a.out.display(),
        config.num_layers,
        config.num_samples,
        config.hidden_dim
    );
    Ok(())
}

fn load_probe_dir(dir: &Path) -> Result<ProbeSet<f64>, Failure> {
    let entries =
        fs::read_dir(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let records = paths
        .iter()
        .map(|p| {
            ProbeRecord::from_json(&read_text(p)?)
                .map_err(|e| Failure::Check(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProbeSet::from_records(records)?)
}

fn cmd_similarity(a: SimilarityArgs) -> Outcome {
    let probes = load_probe_dir(&a.probes)?;
    let reference = probes
        .language(&a.reference)
        .cloned()
        .ok_or_else(|| Failure::Config(format!("no probes for reference {}", a.reference)))?;
    let curves = similarity_to_reference(&probes, &reference, a.metric)?;
    let Some(out) = a.out else {
        print!("{}", curves.to_csv());
        return Ok(());
    };
    fs::create_dir_all(&out).map_err(|e| Failure::Check(format!("{}: {e}", out.display())))?;
    let layers = probes.layers();
    let selected: Vec<usize> = match a.layer {
        HeatmapLayers::Deepest => layers.last().copied().into_iter().collect(),
        HeatmapLayers::All => layers,
        HeatmapLayers::Index(l) => vec![l],
    };
    let write = |name: String, text: String| {
        fs::write(out.join(&name), text).map_err(|e| Failure::Check(format!("{name}: {e}")))
    };
    for l in selected {
        let m = similarity_matrix(&probes, l, a.metric)?;
        write(format!("similarity_layer{l:03}.csv"), m.to_csv())?;
        write(format!("similarity_layer{l:03}.json"), m.to_json()?)?;
        write(format!("heatmap_layer{l:03}.svg"), render_heatmap(&m))?;
    }
    let stem = format!("similarity_to_{}", reference.code());
    write(format!("{stem}.csv"), curves.to_csv())?;
    write(format!("{stem}.json"), curves.to_json()?)?;
    write(
        "similarity_curves.svg".into(),
        render_curves(&CurveChart::from_similarity(&curves), Some(&reference))?,
    )?;
    println!("similarity report written to {}", out.display());
    Ok(())
}

fn print_gaps(label: &str, grid: &LabeledGrid) {
    for (column, gap) in grid_gaps(grid) {
        println!(
            "{label} {column}: high-resource mean {:.4}, low-resource mean {:.4}, gap {:.4}",
            gap.high_mean, gap.low_mean, gap.gap
        );
    }
}

fn cmd_compare(a: CompareArgs) -> Outcome {
    let got = LabeledGrid::parse(&read_text(&a.got)?)?;
    let want = LabeledGrid::parse(&read_text(&a.want)?)?;
    let report = compare_grids(&got, &want, a.tol)?;
    println!("{report}");
    print_gaps("got", &got);
    print_gaps("want", &want);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} cell(s) exceed tolerance {}",
            report.failures.len(),
            a.tol
        )))
    }
}

fn cmd_validate(a: ValidateArgs) -> Outcome {
    let file = fs::File::open(&a.archive)
        .map_err(|e| Failure::Config(format!("{}: {e}", a.archive.display())))?;
    let archive = read_archive(BufReader::new(file)).map_err(|e| Failure::Check(e.to_string()))?;
    let meta = archive.meta();
    println!(
        "{}: model {}, dataset {}, language {}, {} slots x {} samples x {} dims",
        a.archive.display(),
        meta.model_name,
        meta.dataset_name,
        meta.language.code(),
        meta.num_layers,
        meta.num_samples,
        meta.hidden_dim
    );
    let findings = validate_against_registry(meta, &known_models());
    if findings.is_empty() {
        println!("OK");
        return Ok(());
    }
    for f in &findings {
        println!("  {f}");
    }
    Err(Failure::Check(format!(
        "{} registry mismatch(es)",
        findings.len()
    )))
}
