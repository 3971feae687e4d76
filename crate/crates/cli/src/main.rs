use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sctower::io::{self, InputKind, ParsedInput};
use sctower::pipeline::{run_pipeline, run_snapshots, Comparison, PipelineError, PipelineOptions, PipelineRun};
use sctower::rips::{pairwise_distances, DistanceMatrix, SnapshotSchedule};
use sctower::{core, ComplexMatrix, DEFAULT_EXPANSION_CAP};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sctower",
    version,
    about = "Strong-collapse persistence for Rips snapshot sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Strong-collapse a complex to its core.
    Core {
        /// Complex file, one maximal simplex per line.
        #[arg(long)]
        input: PathBuf,
        /// Core output, stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write `<vertex> <image>` lines of the retraction map.
        #[arg(long)]
        out_retraction: Option<PathBuf>,
        /// Write the sequence of removed rows and columns.
        #[arg(long)]
        out_trace: Option<PathBuf>,
    },
    /// Run the snapshot pipeline and write the persistence diagram.
    Pipeline {
        #[command(flatten)]
        config: Config,
        /// Reduce the uncollapsed snapshot filtration instead.
        #[arg(long)]
        no_collapse: bool,
        /// Diagram output, stdout when absent.
        #[arg(long)]
        out_pd: Option<PathBuf>,
        #[arg(long)]
        out_tower: Option<PathBuf>,
        #[arg(long)]
        out_stats: Option<PathBuf>,
    },
    /// Run the collapsed and uncollapsed pipelines and compare diagrams.
    Compare {
        #[command(flatten)]
        config: Config,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Points,
    Distmat,
    Complex,
}

#[derive(Debug, Args)]
struct Config {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "points")]
    format: Format,
    #[arg(long, requires_all = ["step", "end"], conflicts_with = "grades")]
    start: Option<f64>,
    #[arg(long, requires_all = ["start", "end"])]
    step: Option<f64>,
    #[arg(long, requires_all = ["start", "step"])]
    end: Option<f64>,
    /// File of snapshot grades, whitespace separated.
    #[arg(long)]
    grades: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Largest number of simplices a full expansion may produce.
    #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
    cap: usize,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            error,
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_DATA,
            error: e.into(),
        }
    }
}

fn pipeline_failure(e: PipelineError, cap: usize) -> Failure {
    if e.is_cap_exceeded() {
        Failure {
            code: EXIT_CAP,
            error: anyhow!("{e}; lower --end or raise --cap (currently {cap})"),
        }
    } else if matches!(e, PipelineError::NoWorkers) {
        Failure::usage(e.into())
    } else {
        e.into()
    }
}

/// Snapshot source resolved from a config.
enum Source {
    Metric(DistanceMatrix, SnapshotSchedule),
    /// A complex file is a single snapshot at the first grade, 0 by default.
    Complex(ComplexMatrix, f64),
}

impl Config {
    fn options(&self, collapse: bool) -> Result<PipelineOptions, Failure> {
        if self.workers == 0 {
            return Err(Failure::usage(anyhow!("--workers must be at least 1")));
        }
        Ok(PipelineOptions {
            workers: self.workers,
            collapse,
            cap: self.cap,
        })
    }

    fn schedule(&self) -> Result<Option<SnapshotSchedule>, Failure> {
        if let Some(path) = &self.grades {
            let grades = io::parse_grades(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            return Ok(Some(SnapshotSchedule::from_grades(grades)?));
        }
        match (self.start, self.step, self.end) {
            (Some(start), Some(step), Some(end)) => Ok(Some(SnapshotSchedule::uniform(start, step, end)?)),
            _ => Ok(None),
        }
    }

    fn source(&self) -> Result<Source, Failure> {
        let kind = match self.format {
            Format::Points => InputKind::Points,
            Format::Distmat => InputKind::DistMat,
            Format::Complex => InputKind::Complex,
        };
        let parsed = io::parse(kind, &read(&self.input)?).with_context(|| format!("in {}", self.input.display()))?;
        let schedule = self.schedule()?;
        let need_schedule = || Failure::usage(anyhow!("give --start, --step and --end, or --grades"));
        Ok(match parsed {
            ParsedInput::Points(p) => Source::Metric(pairwise_distances(&p)?, schedule.ok_or_else(need_schedule)?),
            ParsedInput::DistMat(d) => Source::Metric(d, schedule.ok_or_else(need_schedule)?),
            ParsedInput::Complex(m) => {
                let grade = schedule.map_or(0.0, |s| s.grades()[0]);
                Source::Complex(m, grade)
            }
        })
    }
}

impl Source {
    fn run(&self, options: PipelineOptions) -> Result<PipelineRun, PipelineError> {
        match self {
            Source::Metric(d, schedule) => run_pipeline(d, schedule, options),
            Source::Complex(m, grade) => run_snapshots(|_| m.clone(), &[*grade], options),
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_core(
    input: &Path,
    out: Option<&Path>,
    out_retraction: Option<&Path>,
    out_trace: Option<&Path>,
) -> Result<(), Failure> {
    let m = io::parse_complex(&read(input)?).with_context(|| format!("in {}", input.display()))?;
    let c = core(&m);
    write(out, &io::write_complex(&c.core))?;
    if let Some(p) = out_retraction {
        write(Some(p), &io::write_retraction(&c.retraction))?;
    }
    if let Some(p) = out_trace {
        write(Some(p), &io::write_trace(&c.trace))?;
    }
    Ok(())
}

fn cmd_pipeline(
    config: &Config,
    collapse: bool,
    out_pd: Option<&Path>,
    out_tower: Option<&Path>,
    out_stats: Option<&Path>,
) -> Result<(), Failure> {
    let options = config.options(collapse)?;
    let source = config.source()?;
    let run = source.run(options).map_err(|e| pipeline_failure(e, config.cap))?;
    write(out_pd, &io::write_diagram(&run.diagram))?;
    if let Some(p) = out_tower {
        let tower = run
            .tower
            .as_ref()
            .ok_or_else(|| Failure::usage(anyhow!("--out-tower needs a collapsed run")))?;
        write(Some(p), &io::write_tower(tower))?;
    }
    if let Some(p) = out_stats {
        write(Some(p), &io::write_stats_csv(&run.stats))?;
    }
    let t = run.timings;
    eprintln!(
        "MCT {:.6}s  AT {:.6}s  PDT {:.6}s  cells {}",
        t.collapse_max.as_secs_f64(),
        t.assembly.as_secs_f64(),
        t.reduction.as_secs_f64(),
        run.filtration_size
    );
    Ok(())
}

fn report(cmp: &Comparison) -> (String, bool) {
    let dims = cmp.dimensions();
    let mut out = String::new();
    let mut worst: f64 = 0.0;
    let mut unequal = Vec::new();
    for &k in &dims {
        let equal = cmp.equal_in(k);
        let b = cmp.bottleneck(k);
        worst = worst.max(b);
        if !equal {
            unequal.push(k);
        }
        out.push_str(&format!(
            "dim {k}: {} bottleneck {b}\n",
            if equal { "equal" } else { "differ" }
        ));
    }
    let list = |ks: &[usize]| ks.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    if unequal.is_empty() {
        out.push_str(&format!("equal in dims {}; bottleneck {worst}\n", list(&dims)));
    } else {
        out.push_str(&format!("differ in dims {}; bottleneck {worst}\n", list(&unequal)));
    }
    (out, unequal.is_empty())
}

fn cmd_compare(config: &Config) -> Result<(), Failure> {
    let options = config.options(true)?;
    let source = config.source()?;
    let collapsed = source.run(options).map_err(|e| pipeline_failure(e, config.cap))?;
    let oracle = match source.run(PipelineOptions {
        collapse: false,
        ..options
    }) {
        Ok(run) => run,
        Err(e) if e.is_cap_exceeded() => {
            println!("skipped: uncollapsed pipeline exceeds the expansion cap {}", config.cap);
            return Err(pipeline_failure(e, config.cap));
        }
        Err(e) => return Err(pipeline_failure(e, config.cap)),
    };
    let (text, equal) = report(&Comparison { collapsed, oracle });
    print!("{text}");
    if equal {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_DATA,
            error: anyhow!("diagrams differ"),
        })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Core {
            input,
            out,
            out_retraction,
            out_trace,
        } => cmd_core(&input, out.as_deref(), out_retraction.as_deref(), out_trace.as_deref()),
        Command::Pipeline {
            config,
            no_collapse,
            out_pd,
            out_tower,
            out_stats,
        } => cmd_pipeline(
            &config,
            !no_collapse,
            out_pd.as_deref(),
            out_tower.as_deref(),
            out_stats.as_deref(),
        ),
        Command::Compare { config } => cmd_compare(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
