//! `klnn`: bias-table generation, one-shot estimation and experiment sweeps.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use klnn::bias::{KDE_DEFAULT_TRIALS, LLDE_DEFAULT_TRIALS};
use klnn::experiment::{emit_csv, emit_plot, DEFAULT_N_GRID, DEFAULT_R_GRID};
use klnn::synth::ground_truth_renyi;
use klnn::{
    bias_kde, bias_llde, estimate_j_kde, estimate_j_kde_fixed, estimate_j_klnn, estimate_j_leonenko, ground_truth,
    run_experiment, Bandwidth, BiasTable, Dataset, EstimateResult, EstimatorConfig, EstimatorKind, ExperimentSpec,
    Family, KernelFamily, KernelSpec, McConfig, Method, Truncation,
};

/// Neighbor count the shipped bias table was simulated with.
const DEFAULT_M_TRUNC: usize = 30;

#[derive(Parser, Debug)]
#[command(
    name = "klnn",
    version,
    about = "Debiased k-NN estimators of integral f^alpha and Renyi entropy"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Read flags from a `key = value` file; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for output files when no explicit path is given.
    #[arg(long, global = true, env = "KLNN_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate debiasing constants and write them as a bias table.
    BiasTable(BiasTableArgs),
    /// Estimate J_alpha (or the Renyi entropy) of a CSV sample.
    Estimate(EstimateArgs),
    /// Run a synthetic sweep against closed-form ground truth.
    Experiment(ExperimentArgs),
    /// Print the closed-form J_alpha and Renyi entropy of a synthetic family.
    GroundTruth(GroundTruthArgs),
    /// Draw a synthetic sample as CSV.
    Sample(SampleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Estimator {
    Kde,
    Llde,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Sweep {
    R,
    N,
}

#[derive(Args, Debug)]
struct BiasTableArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8,9")]
    k_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,6")]
    d_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    alpha_list: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "kde,llde")]
    estimator: Vec<Estimator>,
    /// Kernel for the kde entries.
    #[arg(long, default_value = "gaussian")]
    kernel: KernelFamily,
    /// Monte Carlo trials per entry (default 1000000 for kde, 10000 for llde).
    #[arg(long)]
    trials: Option<usize>,
    /// Neighbors in the simulated local sums.
    #[arg(long, default_value_t = DEFAULT_M_TRUNC)]
    m_trunc: usize,
    /// Merge into the existing table at the output path instead of replacing it.
    #[arg(long)]
    append: bool,
    /// Output path (default: <out-dir>/bias_table.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// CSV with one sample per row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "klnn")]
    method: Method,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Ignored by klnn, whose local weight is always Gaussian.
    #[arg(long, default_value = "gaussian")]
    kernel: KernelFamily,
    /// Bias table (default: the built-in table).
    #[arg(long)]
    bias_table: Option<PathBuf>,
    /// Report the Renyi entropy instead of J_alpha.
    #[arg(long)]
    renyi: bool,
    /// Bandwidth for kde-fixed: `silverman` or a positive number.
    #[arg(long, default_value = "silverman")]
    bandwidth: Bandwidth,
    /// Neighbors in the local sums: `bias`, `log` or a count.
    #[arg(long, default_value = "bias")]
    truncation: Truncation,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Preset experiment 1 to 4; sets family and alpha.
    #[arg(long, conflicts_with_all = ["family"])]
    experiment: Option<u32>,
    #[arg(long, requires = "alpha")]
    family: Option<Family>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "r")]
    sweep: Sweep,
    /// Correlations for an r sweep.
    #[arg(long, value_delimiter = ',')]
    r_list: Option<Vec<f64>>,
    /// Sample sizes for an n sweep.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Sample size of an r sweep.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Correlation of an n sweep.
    #[arg(long, default_value_t = 0.99999)]
    r: f64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "klnn,kde,leonenko")]
    methods: Vec<Method>,
    #[arg(long, default_value = "gaussian")]
    kernel: KernelFamily,
    #[arg(long, default_value = "silverman")]
    bandwidth: Bandwidth,
    #[arg(long, default_value = "bias")]
    truncation: Truncation,
    #[arg(long)]
    bias_table: Option<PathBuf>,
    /// Also write an SVG plot next to the CSV.
    #[arg(long)]
    plot: bool,
    /// Label for the experiment column and output file names.
    #[arg(long)]
    name: Option<String>,
    /// CSV path (default: <out-dir>/<name>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GroundTruthArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    n: usize,
    /// Trial index; selects an independent stream under the same seed.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn opt<T: ToString>(key: &'static str, v: Option<T>) -> Option<(&'static str, String)> {
    v.map(|v| (key, v.to_string()))
}

struct Run<'a> {
    cli: &'a Cli,
    threads: usize,
}

impl Run<'_> {
    fn globals(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.cli.seed.to_string()),
            ("threads", self.threads.to_string()),
            ("out-dir", self.cli.out_dir.display().to_string()),
        ]
    }

    /// Writes the run configuration as `<path>.run`.
    fn echo(&self, path: &Path, command: &str, mut pairs: Vec<(&'static str, String)>) -> Result<()> {
        pairs.extend(self.globals());
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".run");
        std::fs::write(&sidecar, config::render(command, &pairs))
            .with_context(|| format!("writing {}", Path::new(&sidecar).display()))
    }

    fn output(&self, out: &Option<PathBuf>, default_name: &str) -> PathBuf {
        out.clone().unwrap_or_else(|| self.cli.out_dir.join(default_name))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_table(path: &Option<PathBuf>) -> Result<BiasTable> {
    match path {
        Some(p) => BiasTable::load(p).with_context(|| format!("loading bias table {}", p.display())),
        None => Ok(BiasTable::builtin()?),
    }
}

fn bias_table(run: &Run, a: &BiasTableArgs) -> Result<()> {
    for &k in &a.k_list {
        if k == 0 || k > a.m_trunc {
            bail!("k = {k} must lie in 1..=m-trunc ({})", a.m_trunc);
        }
    }
    if a.d_list.contains(&0) {
        bail!("dimensions must be positive");
    }
    if a.trials == Some(0) {
        bail!("trials must be at least 1");
    }
    let path = run.output(&a.out, "bias_table.csv");
    let mut table = if a.append && path.exists() {
        BiasTable::load(&path).with_context(|| format!("loading {}", path.display()))?
    } else {
        BiasTable::new()
    };
    for &est in &a.estimator {
        let trials = a.trials.unwrap_or(match est {
            Estimator::Kde => KDE_DEFAULT_TRIALS,
            Estimator::Llde => LLDE_DEFAULT_TRIALS,
        });
        let mc = McConfig::new(trials, a.m_trunc, run.cli.seed);
        for &d in &a.d_list {
            for &alpha in &a.alpha_list {
                for &k in &a.k_list {
                    let entry = match est {
                        Estimator::Kde => bias_kde(k, d, alpha, &KernelSpec::new(a.kernel, d), mc),
                        Estimator::Llde => bias_llde(k, d, alpha, mc),
                    }
                    .with_context(|| format!("bias for k={k} d={d} alpha={alpha} {est:?}"))?;
                    eprintln!("{} bias={:.6} stderr={:.2e}", entry.key(), entry.bias, entry.stderr);
                    table.insert(entry);
                }
            }
        }
    }
    let mut w = create(&path)?;
    table.write(&mut w)?;
    w.flush()?;
    let estimators: Vec<&str> = a
        .estimator
        .iter()
        .map(|e| match e {
            Estimator::Kde => "kde",
            Estimator::Llde => "llde",
        })
        .collect();
    run.echo(
        &path,
        "bias-table",
        vec![
            ("k-list", join(&a.k_list)),
            ("d-list", join(&a.d_list)),
            ("alpha-list", join(&a.alpha_list)),
            ("estimator", estimators.join(",")),
            ("kernel", a.kernel.to_string()),
            ("m-trunc", a.m_trunc.to_string()),
            ("append", a.append.to_string()),
            ("out", path.display().to_string()),
        ]
        .into_iter()
        .chain(opt("trials", a.trials))
        .collect(),
    )
}

fn estimate(run: &Run, a: &EstimateArgs) -> Result<()> {
    if a.renyi && a.alpha == 1.0 {
        return Err(klnn::Error::AlphaOne.into());
    }
    let data = Dataset::read_csv_path(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let d = data.d();
    let result: EstimateResult = match a.method {
        Method::Kde | Method::Klnn => {
            let table = load_table(&a.bias_table)?;
            let (kernel, kind) = if a.method == Method::Kde {
                (a.kernel, EstimatorKind::Kde(a.kernel))
            } else {
                (KernelFamily::Gaussian, EstimatorKind::Llde)
            };
            let bias = table.lookup(a.k, d, a.alpha, kind)?;
            let cfg = EstimatorConfig::new(a.k, a.alpha, KernelSpec::new(kernel, d)).with_truncation(a.truncation);
            if a.method == Method::Kde {
                estimate_j_kde(&data, &cfg, bias)?
            } else {
                estimate_j_klnn(&data, &cfg, bias)?
            }
        }
        Method::Leonenko => estimate_j_leonenko(&data, a.k, a.alpha)?,
        Method::KdeFixed => estimate_j_kde_fixed(&data, &KernelSpec::new(a.kernel, d), a.alpha, a.bandwidth)?,
    };
    let result = if a.renyi { result.into_renyi()? } else { result };
    if result.regularized > 0 {
        eprintln!(
            "note: {} of {} local covariances were regularized",
            result.regularized, result.n
        );
    }
    if result.cap_hits > 0 {
        eprintln!("note: {} of {} densities hit the cap", result.cap_hits, result.n);
    }
    let text = format!(
        "method,n,d,k,alpha,value\n{},{},{},{},{},{}\n",
        result.method, result.n, result.d, result.k, result.alpha, result.value
    );
    match &a.out {
        None => io::stdout().write_all(text.as_bytes())?,
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
            run.echo(
                path,
                "estimate",
                vec![
                    ("input", a.input.display().to_string()),
                    ("method", a.method.to_string()),
                    ("k", a.k.to_string()),
                    ("alpha", a.alpha.to_string()),
                    ("kernel", a.kernel.to_string()),
                    ("renyi", a.renyi.to_string()),
                    ("bandwidth", a.bandwidth.to_string()),
                    ("truncation", a.truncation.to_string()),
                    ("out", path.display().to_string()),
                ]
                .into_iter()
                .chain(opt("bias-table", a.bias_table.as_ref().map(|p| p.display())))
                .collect(),
            )?;
        }
    }
    Ok(())
}

fn experiment_spec(run: &Run, a: &ExperimentArgs) -> Result<ExperimentSpec> {
    let (family, alpha, default_name) = match (a.experiment, a.family) {
        (Some(num), _) => {
            let preset = ExperimentSpec::preset(num)?;
            if let Some(alpha) = a.alpha.filter(|&x| x != preset.alpha) {
                bail!("experiment {num} fixes alpha = {}, got {alpha}", preset.alpha);
            }
            (preset.family, preset.alpha, preset.name)
        }
        (None, Some(family)) => {
            let alpha = a.alpha.context("--family needs --alpha")?;
            (family, alpha, format!("{family}-a{alpha}"))
        }
        (None, None) => bail!("choose a preset with --experiment or a family with --family and --alpha"),
    };
    let name = a.name.clone().unwrap_or(default_name);
    let mut spec = match a.sweep {
        Sweep::R => {
            let rs = a.r_list.clone().unwrap_or_else(|| DEFAULT_R_GRID.to_vec());
            ExperimentSpec::r_sweep(&name, family, alpha, a.n, &rs)
        }
        Sweep::N => {
            let ns = a.n_list.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
            ExperimentSpec::n_sweep(&name, family, alpha, a.r, &ns)
        }
    };
    spec.k = a.k;
    spec.trials = a.trials;
    spec.seed = run.cli.seed;
    spec.kernel = a.kernel;
    spec.bandwidth = a.bandwidth;
    spec.truncation = a.truncation;
    Ok(spec)
}

fn experiment(run: &Run, a: &ExperimentArgs) -> Result<()> {
    let spec = experiment_spec(run, a)?;
    let table = load_table(&a.bias_table)?;
    let report = run_experiment(&spec, &a.methods, &table)?;

    let path = run.output(&a.out, &format!("{}.csv", spec.name));
    let mut w = create(&path)?;
    emit_csv(&report, &mut w)?;
    w.flush()?;
    if a.plot {
        let svg = path.with_extension("svg");
        let mut w = create(&svg)?;
        emit_plot(&report, &mut w)?;
        w.flush()?;
    }
    eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
    run.echo(
        &path,
        "experiment",
        [
            opt("experiment", a.experiment),
            opt("family", a.experiment.is_none().then_some(spec.family)),
            opt("alpha", Some(spec.alpha)),
            opt("sweep", Some(format!("{:?}", a.sweep).to_lowercase())),
            opt("r-list", a.r_list.as_deref().map(join)),
            opt("n-list", a.n_list.as_deref().map(join)),
            opt("bias-table", a.bias_table.as_ref().map(|p| p.display())),
        ]
        .into_iter()
        .flatten()
        .chain([
            ("n", a.n.to_string()),
            ("r", a.r.to_string()),
            ("k", spec.k.to_string()),
            ("trials", spec.trials.to_string()),
            ("methods", join(&a.methods)),
            ("kernel", spec.kernel.to_string()),
            ("bandwidth", spec.bandwidth.to_string()),
            ("truncation", spec.truncation.to_string()),
            ("plot", a.plot.to_string()),
            ("name", spec.name.clone()),
            ("out", path.display().to_string()),
        ])
        .collect(),
    )
}

fn write_text(
    run: &Run,
    out: &Option<PathBuf>,
    text: &str,
    command: &str,
    pairs: Vec<(&'static str, String)>,
) -> Result<()> {
    match out {
        None => io::stdout().write_all(text.as_bytes())?,
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
            let mut pairs = pairs;
            pairs.push(("out", path.display().to_string()));
            run.echo(path, command, pairs)?;
        }
    }
    Ok(())
}

fn ground_truth_cmd(run: &Run, a: &GroundTruthArgs) -> Result<()> {
    if a.r.is_empty() {
        bail!("give at least one --r");
    }
    let mut text = String::from("family,alpha,r,j,renyi\n");
    for &r in &a.r {
        let j = ground_truth(a.family, a.alpha, r)?;
        let h = ground_truth_renyi(a.family, a.alpha, r)?;
        text.push_str(&format!("{},{},{},{},{}\n", a.family, a.alpha, r, j, h));
    }
    let pairs = vec![
        ("family", a.family.to_string()),
        ("alpha", a.alpha.to_string()),
        ("r", join(&a.r)),
    ];
    write_text(run, &a.out, &text, "ground-truth", pairs)
}

fn sample_cmd(run: &Run, a: &SampleArgs) -> Result<()> {
    let data = klnn::synth::sample(a.family, a.r, a.n, run.cli.seed, a.trial)?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    let pairs = vec![
        ("family", a.family.to_string()),
        ("r", a.r.to_string()),
        ("n", a.n.to_string()),
        ("trial", a.trial.to_string()),
    ];
    write_text(run, &a.out, &String::from_utf8(buf)?, "sample", pairs)
}

fn main() -> Result<()> {
    let args = config::expand_args(std::env::args_os().collect())?;
    let cli = Cli::parse_from(args);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    pool.build_global().context("starting worker threads")?;
    let run = Run {
        cli: &cli,
        threads: rayon::current_num_threads(),
    };
    match &cli.command {
        Command::BiasTable(a) => bias_table(&run, a),
        Command::Estimate(a) => estimate(&run, a),
        Command::Experiment(a) => experiment(&run, a),
        Command::GroundTruth(a) => ground_truth_cmd(&run, a),
        Command::Sample(a) => sample_cmd(&run, a),
    }
}
