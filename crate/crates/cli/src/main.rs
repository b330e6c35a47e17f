use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use garland::complex::parse_complex_text;
use garland::harness::report::{
    render_text, run_grid, run_instances, with_threads, Grid, Report, REPORT_VERSION,
};
use garland::harness::verify::{reproduce_published_polynomial, Status};
use garland::harness::{Budget, HarnessConfig, Instance, Session, Source};
use garland::laplace::assemble_matrix;
use garland::spectra::fmt_rational;
use garland::{BigInt, BigRational};

#[derive(Parser)]
#[command(
    name = "garland",
    version,
    about = "Exact Laplacian spectra of simplicial complexes and type-A buildings"
)]
struct Cli {
    /// Directory for cached minimal polynomials.
    #[arg(long, global = true, env = "GARLAND_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Krylov seed. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build B(l,q) and print its face counts.
    Build {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        q: u64,
        /// Write the top simplices in the ingestion text format.
        #[arg(long)]
        emit_complex: Option<PathBuf>,
    },
    /// Minimal polynomial and certified roots of one Laplacian.
    Spectrum {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        i: usize,
        /// Isolating interval width, e.g. 1e-6 or 1/1000.
        #[arg(long)]
        width: Option<String>,
        /// Write the exact matrix of the Laplacian.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run every applicable check.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Single degree; all degrees when omitted.
        #[arg(long)]
        i: Option<usize>,
        /// Use the larger size budget.
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare with the published minimal polynomial.
    Reproduce {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        i: usize,
    },
    /// Sweep a grid and write a JSON report.
    Report {
        #[arg(long, default_value = "default")]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct Target {
    #[arg(long, requires = "q", conflicts_with = "complex")]
    ell: Option<usize>,
    #[arg(long, requires = "ell")]
    q: Option<u64>,
    /// Complex file, one maximal simplex per line.
    #[arg(long)]
    complex: Option<PathBuf>,
}

impl Target {
    fn source(&self, session: &Session) -> Result<Source> {
        match (self.ell, self.q, &self.complex) {
            (Some(ell), Some(q), None) => Ok(Source::Building { ell, q }),
            (None, None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let ingested = parse_complex_text(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                Ok(session.add_complex(ingested.complex))
            }
            _ => bail!("give either --ell and --q, or --complex"),
        }
    }
}

/// Parses `a/b`, an integer, or a decimal with optional exponent, exactly.
fn parse_width(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let value = if s.contains('/') {
        garland::laplace::matrix::parse_rational(s).context("malformed fraction")?
    } else {
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().context("malformed exponent")?),
            None => (s, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits: BigInt = format!("{int}{frac}").parse().context("malformed number")?;
        let shift = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        if shift >= 0 {
            BigRational::from_integer(digits * num_pow(&ten, shift as u32))
        } else {
            BigRational::new(digits, num_pow(&ten, (-shift) as u32))
        }
    };
    if value <= BigRational::from_integer(0.into()) {
        bail!("width must be positive");
    }
    Ok(value)
}

fn num_pow(b: &BigInt, e: u32) -> BigInt {
    (0..e).fold(BigInt::from(1), |acc, _| acc * b)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, || run(&cli))
        .map_err(anyhow::Error::from)
        .and_then(|r| r)
    {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut cfg = HarnessConfig {
        seed: cli.seed,
        cache_dir: cli.cache_dir.clone(),
        ..HarnessConfig::default()
    };
    match &cli.command {
        Command::Build {
            ell,
            q,
            emit_complex,
        } => {
            cfg.budget = Budget::EXTENDED;
            let session = Session::new(cfg)?;
            let (b, build_ms) = session.building(*ell, *q)?;
            let c = &b.complex;
            println!(
                "B({ell},{q}): dimension {}, {} chambers",
                c.dim(),
                b.chamber_count()
            );
            for (i, n) in c.counts().iter().enumerate() {
                println!("  {i}-simplices: {n}");
            }
            println!("  built in {build_ms} ms");
            if let Some(path) = emit_complex {
                write_file(path, &c.to_text())?;
            }
        }
        Command::Spectrum {
            target,
            i,
            width,
            dump_matrix,
            json,
        } => {
            if let Some(w) = width {
                cfg.width = parse_width(w)?;
            }
            cfg.budget = Budget::EXTENDED;
            let session = Session::new(cfg)?;
            let inst = Instance {
                source: target.source(&session)?,
                i: *i,
            };
            if let Some(path) = dump_matrix {
                let held = session.complex(&inst.source)?;
                write_file(path, &assemble_matrix(held.complex(), *i)?.to_dump())?;
            }
            let s = session.spectrum(&inst)?;
            let r = &s.report;
            if *json {
                let rep = garland::harness::report::instance_report(&s, Vec::new(), None);
                println!("{}", serde_json::to_string_pretty(&rep)?);
            } else {
                println!("{inst}  dim {}", r.dim);
                println!("minimal polynomial: {}", r.minpoly.pretty());
                println!("roots:");
                for root in r.isolation.roots() {
                    match &root.exact {
                        Some(x) => println!("  {}", fmt_rational(x)),
                        None => println!(
                            "  ({}, {})  ~{:.9}",
                            fmt_rational(&root.lo),
                            fmt_rational(&root.hi),
                            root.value().to_f64()
                        ),
                    }
                }
                println!("m = {}  M = {}", r.m, r.big_m);
            }
        }
        Command::Verify {
            target,
            i,
            extended,
            json,
        } => {
            if *extended {
                cfg.budget = Budget::EXTENDED;
            }
            let session = Session::new(cfg)?;
            let source = target.source(&session)?;
            let degrees: Vec<usize> = match i {
                Some(i) => vec![*i],
                None => {
                    let top = session.complex(&source)?.complex().dim();
                    (0..top).collect()
                }
            };
            let instances: Vec<Instance> = degrees
                .into_iter()
                .map(|i| Instance {
                    source: source.clone(),
                    i,
                })
                .collect();
            let report = run_instances(&session, "verify", &instances)?;
            if *json {
                println!("{}", report.to_json());
            } else {
                print!("{}", render_text(&report));
            }
            if report
                .verdicts()
                .any(|v| v.status == Status::CertifiedFalse && is_theorem(&v.check))
            {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Reproduce { ell, q, i } => {
            cfg.budget = Budget::EXTENDED;
            let session = Session::new(cfg)?;
            let s = session.spectrum(&Instance::building(*ell, *q, *i))?;
            let (verdict, cmp) = reproduce_published_polynomial(&s)?;
            println!("published: {}", cmp.published.pretty());
            println!("computed:  {}", cmp.computed.pretty());
            if let Some(d) = cmp.describe_difference() {
                println!("MISMATCH: {d}");
                return Ok(ExitCode::from(1));
            }
            println!("match ({})", verdict.check);
        }
        Command::Report { grid, out } => {
            if *grid == Grid::Extended {
                cfg.budget = Budget::EXTENDED;
            }
            let session = Session::new(cfg)?;
            let report: Report = run_grid(&session, *grid)?;
            write_file(out, &report.to_json())?;
            print!("{}", render_text(&report));
            println!(
                "wrote {} ({} instances, version {REPORT_VERSION})",
                out.display(),
                report.instances.len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Checks whose failure would contradict a theorem, as opposed to hypothesis
/// checks and published-table comparisons.
fn is_theorem(check: &str) -> bool {
    !matches!(check, "vanishing-threshold" | "published-polynomial")
}
