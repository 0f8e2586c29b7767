//! The `mmv` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::bench::bench_run;
use super::format::{parse_document, write_document, Document};
use super::gen::{gen_planted, PlantedConfig};
use crate::codes::{selfcheck_cauchy, selfcheck_mds};
use crate::error::{Error, Result};
use crate::matrix::{matmul, nnz};
use crate::reduce::{
    allzeroes_to_inverse, kmmv_to_kaz, mcapo_to_mmv, mmv_to_allzeroes, mmv_to_inverse, mmv_to_symmetric,
};
use crate::ring::RingSpec;
use crate::verify::{self, Algorithm, Answer, Params, Side, Verdict, Witness, KW_DEFAULT_CAP};

pub const EXIT_EQUAL: i32 = 0;
pub const EXIT_NOT_EQUAL: i32 = 1;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "mmv", version, about = "Matrix multiplication verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted instance
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_ring)]
        ring: RingSpec,
        /// Number of non-zero entries planted in AB - C
        #[arg(long, default_value_t = 0)]
        s: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether AB = C for an instance file
    Verify {
        #[arg(long, value_parser = parse_alg)]
        alg: Algorithm,
        /// Sparsity bound on AB - C (defaults to the file's promise, then n^2)
        #[arg(long)]
        t: Option<u64>,
        /// Failure probability for rand-sparse, as a decimal or a fraction
        #[arg(long, value_parser = parse_eps, default_value = "1/4")]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
        /// Size cap for korec-wiedermann
        #[arg(long, default_value_t = KW_DEFAULT_CAP)]
        kw_cap: usize,
        /// Also run the exact verifier and warn about promise violations
        #[arg(long)]
        cross_check: bool,
        file: PathBuf,
    },
    /// Transform an instance between problem variants
    Reduce {
        #[arg(long, value_enum)]
        from: FromKind,
        #[arg(long, value_enum)]
        to: ToKind,
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Run a benchmark grid and print CSV
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the brute-force coding-theory oracles
    Selfcheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FromKind {
    Mmv,
    Allzeroes,
    Mcapo,
    Kmmv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ToKind {
    Allzeroes,
    Inverse,
    Symmetric,
    Mmv,
    Kaz,
}

fn parse_ring(s: &str) -> std::result::Result<RingSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_alg(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `0.25` or `1/4`.
pub fn parse_eps(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            num / den
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() && v > 0.0 && v <= 0.5 {
        Ok(v)
    } else {
        Err(format!("eps must lie in (0, 1/2], got `{s}`"))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn side_token(side: Side) -> &'static str {
    match side {
        Side::Direct => "direct",
        Side::Transpose => "transpose",
    }
}

pub fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::Entry { row, col } => format!("entry row={row} col={col}"),
        Witness::TestVector { vector, index, side, ring } => {
            let v: Vec<String> = vector.iter().map(|&x| ring.format_element(x)).collect();
            format!("test-vector side={} index={index} ring={ring} vector={}", side_token(*side), v.join(","))
        }
        Witness::ParityRow { side, row, col } => format!("parity-row side={} row={row} col={col}", side_token(*side)),
    }
}

fn report(v: &Verdict, out: &mut dyn Write) -> Result<()> {
    let answer = match v.answer {
        Answer::Equal => "Equal",
        Answer::NotEqual => "NotEqual",
    };
    writeln!(out, "answer: {answer}")?;
    if let Some(w) = &v.witness {
        writeln!(out, "witness: {}", describe_witness(w))?;
    }
    writeln!(out, "random_bits: {}", v.stats.random_bits)?;
    writeln!(out, "elem_ops: {}", v.stats.elem_ops)?;
    writeln!(out, "wall_nanos: {}", v.stats.wall_nanos)?;
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Gen { n, ring, s, seed, output } => {
            let inst = gen_planted(&PlantedConfig { n, ring, s, seed })?;
            emit(&write_document(&Document::Pair(inst)), output.as_deref(), out)?;
            Ok(EXIT_EQUAL)
        }
        Command::Verify { alg, t, eps, seed, rounds, kw_cap, cross_check, file } => {
            let inst = match parse_document(&read(&file)?)? {
                Document::Pair(i) => i,
                _ => return Err(Error::InvalidArgument("verify expects an A/B/C instance file".into())),
            };
            let params = Params { t, eps, rounds, kw_cap };
            let v = verify::run(alg, &inst, &params, seed)?;
            report(&v, out)?;
            if cross_check {
                let truth = verify::verify_exact(&inst)?;
                let diff = nnz(&matmul(&inst.a, &inst.b)?.sub(&inst.c)?).nnz as u64;
                let bound = params.sparsity(&inst);
                if alg.uses_sparsity() && diff > bound {
                    writeln!(err, "warning: promise violated: ||AB - C||_0 = {diff} exceeds t = {bound}")?;
                }
                if truth.answer != v.answer {
                    writeln!(err, "warning: {alg} disagrees with exact multiplication")?;
                }
            }
            Ok(if v.is_equal() { EXIT_EQUAL } else { EXIT_NOT_EQUAL })
        }
        Command::Reduce { from, to, output, file } => {
            let supported = matches!(
                (from, to),
                (FromKind::Mmv, ToKind::Allzeroes | ToKind::Symmetric | ToKind::Inverse)
                    | (FromKind::Allzeroes, ToKind::Inverse)
                    | (FromKind::Mcapo, ToKind::Mmv)
                    | (FromKind::Kmmv, ToKind::Kaz)
            );
            if !supported {
                return Err(Error::InvalidArgument(format!("no reduction from {from:?} to {to:?}").to_lowercase()));
            }
            let reduced = match (to, parse_document(&read(&file)?)?) {
                (ToKind::Allzeroes, Document::Pair(i)) => Document::Pair(mmv_to_allzeroes(&i)?.output),
                (ToKind::Symmetric, Document::Pair(i)) => Document::Pair(mmv_to_symmetric(&i)?.output),
                (ToKind::Inverse, Document::Pair(i)) if from == FromKind::Mmv => {
                    Document::Pair(mmv_to_inverse(&i)?.output)
                }
                (ToKind::Inverse, Document::Pair(i)) => Document::Pair(allzeroes_to_inverse(&i)?.output),
                (ToKind::Mmv, Document::Vectors(v)) => Document::Pair(mcapo_to_mmv(&v)?.output),
                (ToKind::Kaz, Document::Product(k)) => Document::Product(kmmv_to_kaz(&k)?.output),
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        col: 1,
                        msg: format!("input file does not hold a {from:?} instance").to_lowercase(),
                    })
                }
            };
            emit(&write_document(&reduced), output.as_deref(), out)?;
            Ok(EXIT_EQUAL)
        }
        Command::Bench { config, output } => {
            let csv = bench_run(&read(&config)?)?;
            emit(&csv, output.as_deref(), out)?;
            Ok(EXIT_EQUAL)
        }
        Command::Selfcheck => {
            let mut all = true;
            for p in [13, 17] {
                for report in [selfcheck_mds(p, 12, 6)?, selfcheck_cauchy(p, 6)?] {
                    let status = if report.passed() { "PASS" } else { "FAIL" };
                    writeln!(out, "{status} {} ({} cases)", report.name, report.cases)?;
                    for f in &report.failures {
                        writeln!(out, "  failed: {f}")?;
                    }
                    all &= report.passed();
                }
            }
            Ok(if all { EXIT_EQUAL } else { 70 })
        }
    }
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_EQUAL };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_parsing() {
        assert_eq!(parse_eps("1/4"), Ok(0.25));
        assert_eq!(parse_eps("0.125"), Ok(0.125));
        assert!(parse_eps("3/4").is_err());
        assert!(parse_eps("0").is_err());
        assert!(parse_eps("x").is_err());
    }

    #[test]
    fn usage_errors_exit_64() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_with_io(["mmv", "verify"], &mut o, &mut e), 64);
        assert_eq!(run_with_io(["mmv", "frobnicate"], &mut o, &mut e), 64);
        assert_eq!(run_with_io(["mmv", "verify", "--alg", "nope", "x"], &mut o, &mut e), 64);
        assert_eq!(run_with_io(["mmv", "--help"], &mut o, &mut e), 0);
    }
}
