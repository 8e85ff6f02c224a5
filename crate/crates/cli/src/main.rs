//! `mse`: command-line front end for minimal seed expansion clustering.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage or parameters, 3 `k` unachievable,
//! 4 certification failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mse_core::eval::generate::{generate, Kind};
use mse_core::eval::io::{load_csv, load_labels, write_csv, write_labels, CsvOptions, LabelColumn};
use mse_core::eval::metrics::{ari, nmi};
use mse_core::pipeline::{
    auto_select, default_m_grid, mse_approx_on, mse_exact_on, mse_overlap_on, ExactParams, MseRun,
    OverlapParams, DEFAULT_D_GRID,
};
use mse_core::seeding::Ladder;
use mse_core::separability::{Certifier, SeparabilityOptions};
use mse_core::{
    Clustering, Dataset, Dendrogram, DistanceMatrix, Error, ExecPolicy, ReachabilityMst,
    SparsityProfile,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "mse",
    version,
    about = "Density clustering by minimal seed expansion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV dataset into k clusters.
    Cluster(ClusterArgs),
    /// Certify a clustering: exit 0 when weakly and LM separable, 4 otherwise.
    Check(CheckArgs),
    /// Print the dendrogram of maximal clusters, or one cut of it.
    Dendrogram(DendrogramArgs),
    /// Compare two label files with ARI and NMI.
    Eval(EvalArgs),
    /// Write a synthetic benchmark dataset and its metadata sidecar.
    Generate(GenerateArgs),
    /// Pick min-size and density-ratio by Calinski-Harabasz score.
    Auto(AutoArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV of numeric features.
    #[arg(long)]
    input: PathBuf,
    /// Column holding labels (name or 0-based index); excluded from features.
    #[arg(long)]
    label_column: Option<String>,
    /// The input has no header row.
    #[arg(long)]
    no_header: bool,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Candidate-set search; recovery guarantee for separable inputs.
    Exact,
    /// Geometric ladder over A with the original greedy variant.
    Approx,
    /// Ladder search with overlap-tolerant seeding.
    Overlap,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "np")]
    n_p: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// Density-ratio stop D; `inf` disables it.
    #[arg(long, default_value = "inf", value_parser = parse_ratio)]
    density_ratio: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Sparsity order used during expansion in overlap mode.
    #[arg(long)]
    expansion_np: Option<usize>,
    /// Labels CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON run report destination.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Ground-truth labels CSV (row,label) for ARI/NMI in the report.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Labels CSV (row,label) to certify.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long = "np")]
    n_p: usize,
    /// JSON report destination; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Relative tolerance for strict comparisons.
    #[arg(long, default_value_t = 0.0)]
    rel_tol: f64,
    /// Exclude partners at exactly the local maximum's sparsity.
    #[arg(long)]
    strict_lm_partner: bool,
}

#[derive(Args)]
struct DendrogramArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "np")]
    n_p: usize,
    /// Return the ε-cut at this level.
    #[arg(long, conflicts_with = "k")]
    epsilon: Option<f64>,
    /// Return the lowest cut with exactly k clusters.
    #[arg(long)]
    k: Option<usize>,
    /// Relative slack on --epsilon, so decimal levels such as 2.01 match.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = |s: &str| s.parse::<Kind>().map_err(|e| e.to_string()))]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Noise level; per-kind default when omitted.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; metadata goes next to it as `<stem>.meta.json`.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct AutoArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "np")]
    n_p: usize,
    #[arg(long)]
    k: usize,
    /// Comma-separated min-size grid; a size-based default when omitted.
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<usize>>,
    /// Comma-separated density-ratio grid.
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    d_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2)]
    expansion_np: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run grid points one after another.
    #[arg(long)]
    sequential: bool,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number or `inf`"))?;
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("density ratio must be at least 1 (got {s})"))
    }
}

enum Failure {
    Core(Error),
    Io(io::Error),
    Usage(String),
    Uncertified,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Core(Error::Io(_)) => 1,
            Failure::Core(Error::Csv(e)) if e.is_io_error() => 1,
            Failure::Core(Error::KUnachievable { .. }) => 3,
            Failure::Uncertified => 4,
            Failure::Core(_) | Failure::Usage(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

/// JSON has no infinity; `inf` round-trips through the flag parser.
fn ratio_json(d: f64) -> Value {
    if d.is_finite() {
        json!(d)
    } else {
        json!("inf")
    }
}

fn csv_options(a: &InputArgs) -> Result<CsvOptions, Failure> {
    if !a.delimiter.is_ascii() {
        return Err(Failure::Usage(format!(
            "delimiter `{}` is not ASCII",
            a.delimiter
        )));
    }
    Ok(CsvOptions {
        header: !a.no_header,
        label_column: a.label_column.as_deref().map(LabelColumn::parse),
        delimiter: a.delimiter as u8,
    })
}

fn input_json(a: &InputArgs) -> Value {
    json!({
        "input": a.input.display().to_string(),
        "label_column": a.label_column,
        "header": !a.no_header,
        "delimiter": a.delimiter.to_string(),
    })
}

/// Name the file in I/O errors.
fn at_path(path: &Path, e: Error) -> Failure {
    match e {
        Error::Io(e) => Failure::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))),
        e => Failure::Core(e),
    }
}

fn load(a: &InputArgs) -> Result<(Dataset, Option<Vec<usize>>), Failure> {
    let data = load_csv(&a.input, &csv_options(a)?).map_err(|e| at_path(&a.input, e))?;
    Ok((data.dataset, data.labels))
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_json(path: Option<&Path>, value: &Value) -> Outcome {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn emit_labels(path: Option<&Path>, labels: &[usize]) -> Outcome {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            write_labels(&mut w, labels)?;
            w.flush()?;
        }
        None => write_labels(io::stdout().lock(), labels)?,
    }
    Ok(())
}

/// Summary lines go to stdout unless stdout already carries machine output.
fn summary(to_stderr: bool, line: &str) {
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn cluster_sizes(c: &Clustering) -> Vec<usize> {
    c.clusters().iter().map(Vec::len).collect()
}

fn run_json(run: &MseRun) -> Value {
    json!({
        "a": run.a,
        "seed_sizes": run.seed_sizes,
        "cluster_sizes": cluster_sizes(&run.clustering),
        "probes": run.probes,
        "candidates": run.candidates,
        "expansion": run.expansion,
    })
}

fn cmd_cluster(a: ClusterArgs) -> Outcome {
    let start = Instant::now();
    let (ds, column_truth) = load(&a.input)?;
    let dist = DistanceMatrix::new(&ds);
    let exact = ExactParams::new(a.n_p, a.k)
        .min_size(a.min_size)
        .density_ratio(a.density_ratio);
    let ladder = Ladder::default();
    let mut params = json!({
        "mode": match a.mode { Mode::Exact => "exact", Mode::Approx => "approx", Mode::Overlap => "overlap" },
        "np": a.n_p,
        "k": a.k,
        "min_size": a.min_size,
        "density_ratio": ratio_json(a.density_ratio),
    });
    let run = match a.mode {
        Mode::Exact => mse_exact_on(&dist, &exact)?,
        Mode::Approx => {
            params["ladder"] = json!(ladder);
            mse_approx_on(&dist, &exact, &ladder)?
        }
        Mode::Overlap => {
            let mut p = OverlapParams::new(a.n_p, a.k, a.min_size, a.density_ratio);
            if let Some(e) = a.expansion_np {
                p.expansion_n_p = e;
            }
            params["expansion_np"] = json!(p.expansion_n_p);
            params["ladder"] = json!(p.ladder);
            mse_overlap_on(&dist, &p)?
        }
    };
    let labels = run.clustering.labels();
    emit_labels(a.output.as_deref(), labels)?;

    let mut report = json!({
        "command": "cluster",
        "data": input_json(&a.input),
        "n": ds.len(),
        "dim": ds.dim(),
        "params": params,
        "run": run_json(&run),
    });
    let truth = match &a.truth {
        Some(p) => Some(load_labels(p, Some(ds.len())).map_err(|e| at_path(p, e))?),
        None => column_truth,
    };
    if let Some(t) = &truth {
        report["ari"] = json!(ari(labels, t)?);
        report["nmi"] = json!(nmi(labels, t)?);
    }
    if let Some(p) = &a.truth {
        report["truth"] = json!(p.display().to_string());
    }
    report["timing_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    if let Some(p) = &a.report {
        write_json(Some(p), &report)?;
    }
    let mut line = format!(
        "{} points, {} clusters {:?}, a = {}",
        ds.len(),
        run.clustering.k(),
        cluster_sizes(&run.clustering),
        run.a
    );
    if let Some(v) = report.get("ari") {
        line += &format!(
            ", ARI {:.4}, NMI {:.4}",
            v.as_f64().unwrap(),
            report["nmi"].as_f64().unwrap()
        );
    }
    summary(a.output.is_none(), &line);
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let (ds, _) = load(&a.input)?;
    let labels = load_labels(&a.labels, Some(ds.len())).map_err(|e| at_path(&a.labels, e))?;
    let c = Clustering::from_arbitrary_labels(&labels)?;
    let dist = DistanceMatrix::new(&ds);
    let profile = SparsityProfile::compute(&dist, a.n_p)?;
    let opts = SeparabilityOptions {
        rel_tol: a.rel_tol,
        strict_lm_partner: a.strict_lm_partner,
    };
    let r = Certifier::new(&dist, &profile)
        .with_options(opts)
        .report(&c)?;
    let mut v = serde_json::to_value(&r)?;
    v["params"] = json!({
        "data": input_json(&a.input),
        "labels": a.labels.display().to_string(),
        "np": a.n_p,
        "rel_tol": a.rel_tol,
        "strict_lm_partner": a.strict_lm_partner,
    });
    write_json(a.report.as_deref(), &v)?;
    summary(
        a.report.is_none(),
        &format!(
            "weak {}, lm {}, strong {}, alpha {}",
            r.weak.verdict, r.lm.verdict, r.strong.verdict, r.alpha
        ),
    );
    if r.weak.verdict && r.lm.verdict {
        Ok(())
    } else {
        Err(Failure::Uncertified)
    }
}

fn cut_json(eps: f64, cut: &mse_core::PartialClustering) -> Value {
    let unclustered: Vec<usize> = cut
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_none())
        .map(|(i, _)| i)
        .collect();
    json!({ "epsilon": eps, "clusters": cut.clusters(), "unclustered": unclustered })
}

fn cmd_dendrogram(a: DendrogramArgs) -> Outcome {
    let (ds, _) = load(&a.input)?;
    let dist = DistanceMatrix::new(&ds);
    let profile = SparsityProfile::compute(&dist, a.n_p)?;
    let g = Dendrogram::build(&ReachabilityMst::build(&dist, &profile));
    let v = match (a.epsilon, a.k) {
        (Some(eps), _) => {
            if !(a.rel_tol >= 0.0) {
                return Err(Failure::Usage("--rel-tol must be non-negative".into()));
            }
            cut_json(eps, &g.epsilon_cut_tol(eps, a.rel_tol))
        }
        (None, Some(k)) => match g.k_cut(k) {
            Some((eps, cut)) => cut_json(eps, &cut),
            None => {
                return Err(Error::KUnachievable {
                    k,
                    below: None,
                    above: None,
                    approximate: false,
                }
                .into())
            }
        },
        (None, None) => serde_json::to_value(g.to_tree())?,
    };
    write_json(a.output.as_deref(), &v)
}

fn cmd_eval(a: EvalArgs) -> Outcome {
    let pred = load_labels(&a.pred, None).map_err(|e| at_path(&a.pred, e))?;
    let truth = load_labels(&a.truth, Some(pred.len())).map_err(|e| at_path(&a.truth, e))?;
    write_json(
        None,
        &json!({ "ari": ari(&pred, &truth)?, "nmi": nmi(&pred, &truth)? }),
    )
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let (data, meta) = generate(a.kind, a.n, a.noise, a.seed)?;
    write_csv(&a.output, &data)?;
    let sidecar = a.output.with_extension("meta.json");
    write_json(Some(&sidecar), &serde_json::to_value(&meta)?)?;
    println!(
        "wrote {} {} points to {} and {}",
        a.n,
        a.kind,
        a.output.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_auto(a: AutoArgs) -> Outcome {
    let start = Instant::now();
    let (ds, _) = load(&a.input)?;
    let m_grid = a
        .m_grid
        .clone()
        .unwrap_or_else(|| default_m_grid(ds.len(), a.k));
    let d_grid = a.d_grid.clone().unwrap_or(DEFAULT_D_GRID.to_vec());
    let mut base = OverlapParams::new(a.n_p, a.k, 1, 2.0);
    base.expansion_n_p = a.expansion_np;
    let policy = if a.sequential {
        ExecPolicy::Sequential
    } else {
        ExecPolicy::default()
    };
    let auto = auto_select(&ds, &base, &m_grid, &d_grid, policy)?;
    emit_labels(a.output.as_deref(), auto.run.clustering.labels())?;
    let scores: Vec<Value> = auto
        .scores
        .iter()
        .map(|s| {
            json!({
                "min_size": s.min_size,
                "density_ratio": ratio_json(s.density_ratio),
                "score": s.score,
                "error": s.error,
            })
        })
        .collect();
    let report = json!({
        "command": "auto",
        "data": input_json(&a.input),
        "n": ds.len(),
        "params": {
            "np": a.n_p,
            "k": a.k,
            "expansion_np": a.expansion_np,
            "m_grid": m_grid,
            "d_grid": d_grid.iter().map(|&d| ratio_json(d)).collect::<Vec<_>>(),
        },
        "best": { "min_size": auto.best.min_size, "density_ratio": ratio_json(auto.best.density_ratio) },
        "score": auto.score,
        "run": run_json(&auto.run),
        "scores": scores,
        "timing_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    if let Some(p) = &a.report {
        write_json(Some(p), &report)?;
    }
    summary(
        a.output.is_none(),
        &format!(
            "best min_size {} density_ratio {} (Calinski-Harabasz {:.3}), clusters {:?}",
            auto.best.min_size,
            auto.best.density_ratio,
            auto.score,
            cluster_sizes(&auto.run.clustering)
        ),
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Check(a) => cmd_check(a),
        Command::Dendrogram(a) => cmd_dendrogram(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Auto(a) => cmd_auto(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Uncertified => {
                    eprintln!("certification failed: not both weakly and LM separable")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
