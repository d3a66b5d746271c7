use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use condgraph_core::precision::{npn_skeptic, sample_covariance};
use condgraph_core::simulate::{ExpConvention, StudyReport};
use condgraph_core::{
    codec_matrix, ggm_recover, glasso, pg_select, ridge_precision, run_study, select_edges,
    symmetrize_max, CodecOptions, DataMatrix, Error, Method, ModelId, PgConfig, RankConvention,
    SelectionConfig, SimModel, StudyConfig,
};

use crate::format::{self, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "condgraph",
    version,
    about = "Dependence graphs from multivariate samples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Numeric CSV with a header row
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Seed for tie-breaking and simulation
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Threshold or glasso penalty (default 1/n for ggm)
    #[arg(long, global = true)]
    pub lambda: Option<f64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = RankArg::Ge)]
    pub rank_convention: RankArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankArg {
    Ge,
    Le,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the matrix of conditional dependence coefficients
    Estimate,
    /// Threshold the coefficient matrix into a graph
    Ggm(GgmArgs),
    /// Partial-correlation graph from a precision estimate
    Pg(PgArgs),
    /// Replication study on a synthetic model
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct GgmArgs {
    /// Comma-separated thresholds; edge counts are reported for each
    #[arg(long, value_delimiter = ',')]
    pub lambda_path: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Glasso,
    Ridge,
    SkepticGlasso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectArg {
    /// |K_ij| >= t_n
    Threshold,
    /// K_ij != 0
    Support,
}

#[derive(Debug, Args)]
pub struct PgArgs {
    #[arg(long, value_enum, default_value_t = EstimatorArg::Glasso)]
    pub estimator: EstimatorArg,
    /// Selection threshold (default 2 sqrt(log p / n))
    #[arg(long)]
    pub t_n: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Ridge added to the diagonal
    #[arg(long, default_value_t = 1e-2)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = SelectArg::Threshold)]
    pub select: SelectArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpArg {
    Rate,
    Mean,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: ModelId,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Comma-separated: ggm, glasso, glasso-npn
    #[arg(long, value_delimiter = ',', default_value = "ggm")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 100)]
    pub p: usize,
    /// How the parameter of Ex(a) is read
    #[arg(long, value_enum, default_value_t = ExpArg::Rate)]
    pub exp_convention: ExpArg,
}

/// Runs a parsed command line on a pool of `--threads` workers.
pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build()?;
    pool.install(|| dispatch(&cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Estimate => estimate(g),
        Command::Ggm(args) => ggm(g, args),
        Command::Pg(args) => pg(g, args),
        Command::Simulate(args) => simulate(g, args),
    }
}

fn codec_options(g: &GlobalArgs) -> CodecOptions {
    CodecOptions {
        seed: g.seed,
        ranks: match g.rank_convention {
            RankArg::Ge => RankConvention::Ge,
            RankArg::Le => RankConvention::Le,
        },
        ..CodecOptions::default()
    }
}

fn load(g: &GlobalArgs) -> Result<DataMatrix> {
    let path = g.input.as_deref().context("--input is required")?;
    format::read_csv(path)
}

fn emit(g: &GlobalArgs, text: &str) -> Result<()> {
    match &g.output {
        Some(path) => format::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn estimate(g: &GlobalArgs) -> Result<()> {
    let data = load(g)?;
    let m = codec_matrix(&data, &codec_options(g));
    let text = match g.format.unwrap_or(OutputFormat::CsvMatrix) {
        OutputFormat::CsvMatrix => format::dep_to_csv(&m),
        OutputFormat::JsonAdjacency => format::dep_to_json(&m),
        other => bail!("estimate writes csv-matrix or json-adjacency, not {other:?}"),
    };
    if let Some(path) = &g.output {
        format::write_atomic(
            &format::sidecar(path, ".excluded.csv"),
            format::excluded_to_csv(&m).as_bytes(),
        )?;
    }
    emit(g, &text)?;
    eprintln!(
        "{}x{} matrix, {} excluded pairs",
        m.p(),
        m.p(),
        m.excluded().len()
    );
    Ok(())
}

fn ggm(g: &GlobalArgs, args: &GgmArgs) -> Result<()> {
    let data = load(g)?;
    let lambda = g.lambda.unwrap_or(1.0 / data.n() as f64);
    let config = SelectionConfig::new(lambda, g.seed)?;
    for &l in &args.lambda_path {
        SelectionConfig::new(l, g.seed)?;
    }
    let rec = ggm_recover(&data, &config, &codec_options(g))?;
    if !args.lambda_path.is_empty() {
        let sym = symmetrize_max(&rec.coefficients);
        for &l in &args.lambda_path {
            let count = select_edges(
                &sym,
                &SelectionConfig {
                    lambda: l,
                    ..config
                },
            )
            .edge_count();
            eprintln!("lambda {l}: {count} edges");
        }
    }
    emit(
        g,
        &format::render_graph(&rec.graph, g.format.unwrap_or(OutputFormat::EdgeList)),
    )?;
    eprintln!(
        "{} edges, {} excluded pairs",
        rec.graph.edge_count(),
        rec.excluded().len()
    );
    Ok(())
}

fn pg(g: &GlobalArgs, args: &PgArgs) -> Result<()> {
    let data = load(g)?;
    let (n, p) = (data.n(), data.p());
    let mut config = PgConfig::defaults_for(n, p);
    if let Some(l) = g.lambda {
        config.lambda = l;
    }
    if let Some(t) = args.t_n {
        config.t_n = t;
    }
    config.tol = args.tol;
    config.max_iter = args.max_iter;
    config.validate()?;
    let estimate = match args.estimator {
        EstimatorArg::Glasso => glasso(&sample_covariance(&data), &config),
        EstimatorArg::SkepticGlasso => glasso(&npn_skeptic(&data), &config),
        EstimatorArg::Ridge => ridge_precision(&sample_covariance(&data), args.epsilon),
    };
    let estimate = match estimate {
        Err(e @ Error::NotConverged { .. }) => return Err(e).context("precision estimate failed"),
        other => other?,
    };
    let graph = match args.select {
        SelectArg::Threshold => pg_select(&estimate, config.t_n)?,
        SelectArg::Support => estimate.support(),
    }
    .with_names(data.names().to_vec())?;
    emit(
        g,
        &format::render_graph(&graph, g.format.unwrap_or(OutputFormat::EdgeList)),
    )?;
    eprintln!(
        "{} edges, {} iterations, KKT residual {:e}, t_n {}",
        graph.edge_count(),
        estimate.iterations,
        estimate.kkt_residual,
        config.t_n
    );
    Ok(())
}

fn simulate(g: &GlobalArgs, args: &SimulateArgs) -> Result<()> {
    if g.format.is_some() {
        bail!("simulate always writes a CSV table; drop --format");
    }
    let model = SimModel {
        id: args.model,
        p: args.p,
        n: args.n,
        seed: g.seed,
        exp: match args.exp_convention {
            ExpArg::Rate => ExpConvention::Rate,
            ExpArg::Mean => ExpConvention::Mean,
        },
    };
    let config = StudyConfig {
        lambda: g.lambda,
        codec: codec_options(g),
        ..StudyConfig::default()
    };
    let report = run_study(&model, &args.methods, args.reps, &config)?;
    if let Some(path) = &g.output {
        format::write_atomic(
            &format::sidecar(path, ".replications.csv"),
            replications_table(&report).as_bytes(),
        )?;
    }
    emit(g, &summary_table(&report))
}

pub fn summary_table(report: &StudyReport) -> String {
    let mut out = String::from("model,method,n,reps,mean_tpr,mean_fpr,sd_tpr,sd_fpr,failures\n");
    for s in &report.summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.model, s.method, s.n, s.reps, s.mean_tpr, s.mean_fpr, s.sd_tpr, s.sd_fpr, s.failures
        )
        .unwrap();
    }
    out
}

/// One line per replication and method; failed runs carry the error text.
pub fn replications_table(report: &StudyReport) -> String {
    let mut rows: Vec<(usize, Method, String)> = report
        .records
        .iter()
        .map(|r| (r.replication, r.method, format!("{},{},", r.tpr, r.fpr)))
        .chain(report.failures.iter().map(|f| {
            let msg = f.message.replace('"', "'");
            (f.replication, f.method, format!(",,\"{msg}\""))
        }))
        .collect();
    rows.sort_by_key(|r| (r.0, r.1));
    let mut out = String::from("replication,method,tpr,fpr,failure\n");
    for (r, m, rest) in rows {
        writeln!(out, "{r},{m},{rest}").unwrap();
    }
    out
}
