//! `krcheck`: densities, correction coefficients, derived densities and
//! intersection numbers for Hermitian lattices at a ramified prime.

mod closed;
mod input;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ramified_kr::density::{alpha_poly_with, closed_alpha, count_series, AlphaOptions, ClosedValue, CountOptions};
use ramified_kr::kr::Analytic;
use ramified_kr::tree::{embed, enumerate_support_in, int_prim2, int_total, SUPPORT_BUDGET};

use input::{budget_override, lattice, rat, ring, TwistArg};
use verify::{Format, ShapeArg};

#[derive(Parser)]
#[command(name = "krcheck", version, about = "Exact local densities and intersection numbers at a ramified prime")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct RingArgs {
    /// Residue field size (an odd prime).
    #[arg(long, default_value_t = 3)]
    q: u64,
    #[arg(long, value_enum, default_value_t = TwistArg::One)]
    twist: TwistArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMode {
    Count,
    Poly,
    Closed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Representation counts, density polynomial, or closed-form density of `L` in `M`.
    Density {
        #[command(flatten)]
        ring: RingArgs,
        /// Target lattice `M`: `I:n:eps`, `Hni:n:i:eps`, `Hodd:e`, or Gram DSL.
        #[arg(long)]
        target: String,
        /// Represented lattice `L` in the Gram DSL.
        #[arg(long)]
        gram: String,
        /// Counting level (default: smallest safe level).
        #[arg(long)]
        d: Option<u32>,
        /// Count `M ⊥ H^j` for `j = 0..=k`.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value_t = DensityMode::Poly)]
        mode: DensityMode,
    },
    /// The matrices `A`, `B` and the correction coefficients `C`.
    Coeffs {
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i8,
    },
    /// Derived density `∂Den(L)`, or its primitive part `∂Den^{(n₁)}(L)`.
    Pden {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        gram: String,
        #[arg(long)]
        prim: Option<usize>,
    },
    /// Intersection number `Int(L)` for rank 3, or its primitive part with `--prim 2`.
    Int {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        gram: String,
        #[arg(long)]
        prim: Option<usize>,
        /// Write the support graph of the first two basis vectors as JSON.
        #[arg(long)]
        support_graph: Option<PathBuf>,
    },
    /// Compare `Int(L)` and `∂Den(L)` on a grid.
    Verify {
        #[arg(long, default_value_t = 3)]
        q: u64,
        /// Twists to sweep; repeat or comma-separate.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [TwistArg::One, TwistArg::Nonresidue])]
        twist: Vec<TwistArg>,
        #[arg(long, default_value_t = 2)]
        max_exp: i64,
        /// Unit classes from `{1, s}`.
        #[arg(long, value_delimiter = ',', default_values_t = ['1', 's'])]
        units: Vec<char>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ShapeArg::Diag, ShapeArg::HBlock])]
        shapes: Vec<ShapeArg>,
        /// Report path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Omit per-record timing so reports are byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
    },
}

fn alpha_options(d: Option<u32>) -> Result<AlphaOptions> {
    let mut opts = AlphaOptions { d, ..AlphaOptions::default() };
    if let Some(b) = budget_override()? {
        opts.budget = b;
    }
    Ok(opts)
}

fn density(ring_args: RingArgs, target: &str, gram: &str, d: Option<u32>, k: usize, mode: DensityMode) -> Result<()> {
    let cfg = ring(ring_args.q, ring_args.twist)?;
    let m = lattice(&cfg, target).context("target lattice")?;
    let l = lattice(&cfg, gram).context("represented lattice")?;
    match mode {
        DensityMode::Count => {
            let opts = alpha_options(d)?;
            let d = match d {
                Some(d) => d,
                None => ramified_kr::density::alpha::default_level(&cfg, &m, &l)?,
            };
            let series = count_series(&cfg, &m, &l, k, CountOptions::new(d).with_budget(opts.budget))?;
            for point in series {
                let c = &point.counts[0];
                println!("k={} d={} raw={} normalized={}", point.k, c.d, c.raw, rat(&c.normalized));
            }
        }
        DensityMode::Poly => {
            let p = alpha_poly_with(&cfg, &m, &l, alpha_options(d)?)?;
            println!("{}", p.pretty());
        }
        DensityMode::Closed => {
            let f = closed::formula_for(&cfg, &m, &l)?;
            let id = serde_json::to_value(&f)?.get("id").and_then(|v| v.as_str()).unwrap_or("?").to_string();
            match closed_alpha(&cfg, &f)? {
                ClosedValue::Poly(p) => println!("{id}: {}", p.pretty()),
                ClosedValue::Value(v) => println!("{id}: {}", rat(&v)),
            }
        }
    }
    Ok(())
}

fn coeffs(q: u64, n: usize, eps: i8) -> Result<()> {
    let cfg = ring(q, TwistArg::One)?;
    let t = Analytic::with_engine(&cfg).coeffs(n, eps)?;
    let row = |v: &[ramified_kr::Q]| v.iter().map(rat).collect::<Vec<_>>();
    let out = json!({
        "n": t.n,
        "eps": t.eps,
        "q": t.q,
        "A": t.a.iter().map(|r| row(r)).collect::<Vec<_>>(),
        "B": row(&t.b),
        "C": row(&t.c),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn pden(ring_args: RingArgs, gram: &str, prim: Option<usize>) -> Result<()> {
    let cfg = ring(ring_args.q, ring_args.twist)?;
    let l = lattice(&cfg, gram)?;
    let an = Analytic::with_engine(&cfg);
    let (value, how) = match prim {
        None => (an.pden(&l)?, "analytic engine".to_string()),
        Some(n1) => (an.pden_prim(&l, n1)?, format!("analytic engine, primitive split n1={n1}")),
    };
    println!("pden = {}  [{how}]", rat(&value));
    Ok(())
}

fn int(ring_args: RingArgs, gram: &str, prim: Option<usize>, graph: Option<PathBuf>) -> Result<()> {
    let cfg = ring(ring_args.q, ring_args.twist)?;
    let l = lattice(&cfg, gram)?;
    if l.rank() != 3 {
        bail!("int needs a rank-3 lattice, got rank {}", l.rank());
    }
    let amb = embed(&cfg, &l)?;
    let flat = amb.basis.select_cols(&[0, 1]);
    if let Some(path) = graph {
        let set = enumerate_support_in(&amb, &flat, SUPPORT_BUDGET)?;
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &set.to_graph())?;
    }
    match prim {
        None => {
            let r = int_total(&Analytic::with_engine(&cfg), &l)?;
            println!(
                "int = {}  [path {:?}, {} geometric terms, {} rank-2 bridge terms]",
                r.value, r.path, r.geometric_terms, r.bridge_terms
            );
        }
        Some(2) => {
            let v = int_prim2(&amb, &flat, &amb.basis.col(2))?;
            println!("int = {v}  [primitive split n1=2, lattice enumeration]");
        }
        Some(n1) => bail!("the geometric primitive part is implemented for n1 = 2, got {n1}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    q: u64,
    twists: &[TwistArg],
    max_exp: i64,
    units: &[char],
    shapes: &[ShapeArg],
    out: Option<PathBuf>,
    format: Format,
    no_timing: bool,
) -> Result<bool> {
    if let Some(u) = units.iter().find(|u| !matches!(u, '1' | 's')) {
        bail!("unit class `{u}` is not one of 1, s");
    }
    let cases = verify::grid(max_exp, units, shapes);
    let mut twists = twists.to_vec();
    twists.dedup();
    let mut records = Vec::new();
    for t in twists {
        let cfg = ring(q, t)?;
        records.extend(verify::run(&cfg, t.label(), &cases, !no_timing));
    }
    let mut sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    };
    verify::write_report(&mut *sink, &records, format)?;
    sink.flush()?;
    let (total, ok, bad, err) = verify::tally(&records);
    eprintln!("verify: {total} cases, {ok} match, {bad} mismatch, {err} errors");
    Ok(ok == total)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Density { ring, target, gram, d, k, mode } => density(ring, &target, &gram, d, k, mode).map(|_| true),
        Cmd::Coeffs { q, n, eps } => coeffs(q, n, eps).map(|_| true),
        Cmd::Pden { ring, gram, prim } => pden(ring, &gram, prim).map(|_| true),
        Cmd::Int { ring, gram, prim, support_graph } => int(ring, &gram, prim, support_graph).map(|_| true),
        Cmd::Verify { q, twist, max_exp, units, shapes, out, format, no_timing } => {
            verify_cmd(q, &twist, max_exp, &units, &shapes, out, format, no_timing)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
