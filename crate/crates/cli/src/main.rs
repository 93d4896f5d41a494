//! `dnadm`: compile a decision problem to DNA, simulate the bench protocol,
//! read the gel, and check the choice against the direct computation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dnadm::compiler::{compile, CompileOptions, EnzymeLibrary};
use dnadm::decision::best_options;
use dnadm::gel::{band_table, render, GelConfig, RenderFormat};
use dnadm::pipeline;
use dnadm::problem::{parse_problem, problem_to_json};
use dnadm::sampling::{random_matrix, MatrixShape};
use dnadm::Matrix;

const CANONICAL: &str = include_str!("../data/canonical.json");

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_DISAGREE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "dnadm", version, about = "DNA expected-utility decision maker")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (JSON). Defaults to the bundled three-ball problem.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// PCR cycles.
    #[arg(long, global = true, default_value_t = 5, allow_negative_numbers = true)]
    cycles: i64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Use the published strand sequences.
    #[arg(long, global = true)]
    fixture: bool,

    #[arg(long, global = true, default_value = "dnadm-out")]
    out: PathBuf,

    /// Comma-separated list of fasta, tsv, svg, text.
    #[arg(long, global = true, value_delimiter = ',', default_value = "fasta,tsv,text")]
    format: Vec<Format>,

    /// Enzyme library; `verify` defaults to extended, the rest to standard.
    #[arg(long, global = true)]
    library: Option<Library>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the encoding plan, strand FASTA and protocol.
    Compile,
    /// Simulate the protocol and read the gel.
    Run,
    /// Check the readout against the oracle on random problems.
    Verify {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Fasta,
    Tsv,
    Svg,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Library {
    Standard,
    Extended,
}

impl Cli {
    fn wants(&self, f: Format) -> bool {
        self.format.contains(&f)
    }

    fn cycles(&self) -> Result<u32> {
        if self.cycles < 0 {
            bail!("--cycles must be non-negative, got {}", self.cycles);
        }
        u32::try_from(self.cycles).context("--cycles is too large")
    }

    fn options(&self, default: Library) -> Result<CompileOptions> {
        let library = match self.library.unwrap_or(default) {
            Library::Standard => EnzymeLibrary::standard(),
            Library::Extended => EnzymeLibrary::extended(),
        };
        Ok(CompileOptions {
            library,
            seed: self.seed,
            fixture: self.fixture,
            cycles: self.cycles()?,
            ..CompileOptions::default()
        })
    }

    fn problem(&self) -> Result<Matrix> {
        let (name, text) = match &self.input {
            Some(path) => (
                path.display().to_string(),
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            ),
            None => ("bundled problem".to_string(), CANONICAL.to_string()),
        };
        parse_problem(&text).map_err(|e| anyhow::anyhow!("{name}: {e}"))
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_compile(cli: &Cli) -> Result<u8> {
    let matrix = cli.problem()?;
    let (plan, protocol) = compile(&matrix, &cli.options(Library::Standard)?)?;
    let violations = plan.validate();
    for v in &violations {
        eprintln!("warning: {v}");
    }
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    if cli.wants(Format::Text) {
        write(&cli.out, "plan.txt", &plan.to_string())?;
        write(&cli.out, "protocol.txt", &protocol.to_string())?;
    }
    if cli.wants(Format::Fasta) {
        write(&cli.out, "strands.fasta", &plan.to_fasta())?;
    }
    println!(
        "compiled {} options x {} outcomes, {} warning(s)",
        plan.option_count(),
        plan.outcome_count(),
        violations.len()
    );
    Ok(EXIT_OK)
}

fn cmd_run(cli: &Cli) -> Result<u8> {
    let matrix = cli.problem()?;
    cli.cycles()?;
    let run = pipeline::run(&matrix, &cli.options(Library::Standard)?, cli.cycles, &GelConfig::default())?;
    if let Some(note) = &run.note {
        eprintln!("warning: {note}");
    }
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    if cli.wants(Format::Tsv) {
        write(&cli.out, "bands.tsv", &band_table(&run.gel, &run.plan))?;
    }
    if cli.wants(Format::Text) {
        write(&cli.out, "report.txt", &run.report.to_string())?;
        write(&cli.out, "gel.txt", &render(&run.gel, RenderFormat::Ascii))?;
        let audit: Vec<_> = run.tubes.iter().map(|t| t.audit_json()).collect();
        write(&cli.out, "audit.json", &serde_json::to_string_pretty(&audit)?)?;
    }
    if cli.wants(Format::Svg) {
        write(&cli.out, "gel.svg", &render(&run.gel, RenderFormat::Svg))?;
    }
    if cli.wants(Format::Fasta) {
        write(&cli.out, "strands.fasta", &run.plan.to_fasta())?;
    }
    println!("{}", run.report.summary());
    Ok(if run.report.agree { EXIT_OK } else { EXIT_DISAGREE })
}

fn cmd_verify(cli: &Cli, count: usize) -> Result<u8> {
    let options = cli.options(Library::Extended)?;
    let gel = GelConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let shape = MatrixShape::default();
    let mut failed = 0;
    let mut first = None;
    for k in 0..count {
        let matrix: Matrix = random_matrix(&mut rng, &shape);
        let opts = CompileOptions {
            seed: cli.seed.wrapping_add(k as u64),
            ..options.clone()
        };
        let problem = match pipeline::run(&matrix, &opts, cli.cycles, &gel) {
            Ok(run) if run.report.chosen == best_options(&matrix) => None,
            Ok(run) => Some(run.report.summary()),
            Err(e) => Some(e.to_string()),
        };
        if let Some(reason) = problem {
            failed += 1;
            first.get_or_insert((k, reason, matrix));
        }
    }
    println!("verify: {}/{count} agree, {failed} failed", count - failed);
    match first {
        None => Ok(EXIT_OK),
        Some((k, reason, matrix)) => {
            eprintln!("first counterexample (matrix {k}): {reason}");
            println!("{}", serde_json::to_string_pretty(&problem_to_json(&matrix))?);
            Ok(EXIT_DISAGREE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    let result = match &cli.command {
        Command::Compile => cmd_compile(&cli),
        Command::Run => cmd_run(&cli),
        Command::Verify { count } => cmd_verify(&cli, *count),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
