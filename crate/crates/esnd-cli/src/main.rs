//! `esnd`: command line front end for the esnd library.
//!
//! Exit codes: 0 on success, 1 when a computation or verification fails,
//! 2 for usage errors (including malformed sequence descriptors).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use esnd::{
    density, density_to_width, enumerate, gap_catalog, gap_measure, parse_descriptor,
    sieve_count, verify, DensityBracket, GapCatalog, SSequence, TailTerms,
};

#[derive(Parser)]
#[command(
    name = "esnd",
    version,
    about = "Densities, counts and gap structure of exponentially S-numbers",
    after_help = "Sequence descriptors: finite:1,2,5 | cofinite:1,4;tail=6 | named:odd\n\
                  Named families: all, odd, pow2, squares, fibonacci, squarefree.\n\
                  Numeric flags accept scientific notation (1e6)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified density bracket for a sequence
    Density {
        /// Sequence descriptor
        #[arg(long)]
        seq: String,
        /// Target bracket width
        #[arg(long, default_value_t = 1e-8)]
        width: f64,
        /// Fix the prime bound instead of the width-driven schedule
        #[arg(long, value_parser = parse_sci_u64)]
        prime_bound: Option<u64>,
        /// Series cutoff for named families
        #[arg(long, default_value_t = 64)]
        exponent_bound: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Count members up to a limit, against the density prediction
    Count {
        #[arg(long)]
        seq: String,
        /// Count members of 1..=limit
        #[arg(long, value_parser = parse_sci_u64)]
        limit: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List all members up to a limit
    Enumerate {
        #[arg(long)]
        seq: String,
        #[arg(long, value_parser = parse_sci_u64)]
        limit: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Catalog the density gaps with defining terms up to a bound
    Gaps {
        #[arg(long, default_value_t = 6)]
        max_term: u64,
        /// Endpoint bracket width
        #[arg(long, default_value_t = 1e-9)]
        width: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Total gap length of a catalog, against the theoretical ceiling
    Measure {
        #[arg(long, default_value_t = 6)]
        max_term: u64,
        #[arg(long, default_value_t = 1e-9)]
        width: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run built-in verification suites
    Verify {
        /// lemma4, disjoint, convergence, oeis, or all
        suite: String,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_sci_u64(text: &str) -> Result<u64, String> {
    let t = text.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    // 2^53 caps the range in which f64 represents integers exactly.
    match t.parse::<f64>() {
        Ok(f) if f.is_finite() && f >= 0.0 && f == f.trunc() && f <= 9_007_199_254_740_992.0 => {
            Ok(f as u64)
        }
        _ => Err(format!("{t:?} is not a non-negative integer")),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// `ESND_THREADS=<n>` pins the worker pool; anything else is ignored
/// with a warning and the default (one thread per core) stands.
fn configure_threads() {
    let Ok(value) = std::env::var("ESND_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring ESND_THREADS={value:?}; expected a positive integer"),
    }
}

fn execute(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Density { seq, width, prime_bound, exponent_bound, out } => {
            let Some(s) = parse_seq(&seq) else { return Ok(ExitCode::from(2)) };
            run_density(&s, width, prime_bound, exponent_bound, &out)
        }
        Command::Count { seq, limit, out } => {
            let Some(s) = parse_seq(&seq) else { return Ok(ExitCode::from(2)) };
            run_count(&s, limit, &out)
        }
        Command::Enumerate { seq, limit, out } => {
            let Some(s) = parse_seq(&seq) else { return Ok(ExitCode::from(2)) };
            run_enumerate(&s, limit, &out)
        }
        Command::Gaps { max_term, width, out } => run_gaps(max_term, width, &out),
        Command::Measure { max_term, width, out } => run_measure(max_term, width, &out),
        Command::Verify { suite } => run_verify(&suite),
    }
}

fn parse_seq(text: &str) -> Option<SSequence> {
    match parse_descriptor(text) {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!(
                "descriptors: finite:1,2,5 | cofinite:1,4;tail=6 | named:odd \
                 (all, odd, pow2, squares, fibonacci, squarefree)"
            );
            None
        }
    }
}

/// Densities print with 12 significant digits.
fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 17) as usize;
    format!("{v:.decimals$}")
}

fn bracket_text(b: &DensityBracket) -> String {
    format!("{}  [{}, {}]", sig12(b.point), sig12(b.lo), sig12(b.hi))
}

fn write_output(out: &OutputArgs, content: String) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct DensityReport {
    sequence: String,
    lo: f64,
    hi: f64,
    point: f64,
    width: f64,
    target_width: f64,
    met: bool,
    prime_bound: u64,
    exponent_bound: u32,
    tail_terms: TailTerms,
}

fn run_density(
    s: &SSequence,
    width: f64,
    prime_bound: Option<u64>,
    exponent_bound: u32,
    out: &OutputArgs,
) -> anyhow::Result<ExitCode> {
    let bracket = match prime_bound {
        Some(pb) => density(s, pb, exponent_bound)?,
        None => density_to_width(s, width)?.bracket,
    };
    let met = bracket.width() <= width;
    if !met {
        eprintln!(
            "warning: reached width {:.3e} at prime bound {}, short of the target {width:.3e}",
            bracket.width(),
            bracket.prime_bound
        );
    }
    let report = DensityReport {
        sequence: s.to_string(),
        lo: bracket.lo,
        hi: bracket.hi,
        point: bracket.point,
        width: bracket.width(),
        target_width: width,
        met,
        prime_bound: bracket.prime_bound,
        exponent_bound: bracket.exponent_bound,
        tail_terms: bracket.tail_terms,
    };
    let content = match out.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            // csv rejects nested structs under headers, so the tail
            // breakdown is spliced into one flat row.
            #[derive(Serialize)]
            struct Flat<'a> {
                sequence: &'a str,
                lo: f64,
                hi: f64,
                point: f64,
                width: f64,
                target_width: f64,
                met: bool,
                prime_bound: u64,
                exponent_bound: u32,
                prime_tail_bound: f64,
                exponent_tail_bound: f64,
                rounding_bound: f64,
            }
            to_csv_row(&Flat {
                sequence: &report.sequence,
                lo: report.lo,
                hi: report.hi,
                point: report.point,
                width: report.width,
                target_width: report.target_width,
                met: report.met,
                prime_bound: report.prime_bound,
                exponent_bound: report.exponent_bound,
                prime_tail_bound: report.tail_terms.prime_tail_bound,
                exponent_tail_bound: report.tail_terms.exponent_tail_bound,
                rounding_bound: report.tail_terms.rounding_bound,
            })?
        }
        Format::Text => {
            let t = &report.tail_terms;
            format!(
                "sequence        {}\n\
                 density         {}\n\
                 width           {:.3e}  (target {:.3e}, {})\n\
                 prime bound     {}\n\
                 exponent bound  {}\n\
                 tails           prime {:.3e}   exponent {:.3e}   rounding {:.3e}\n",
                report.sequence,
                bracket_text(&bracket),
                report.width,
                report.target_width,
                if met { "met" } else { "not met" },
                report.prime_bound,
                report.exponent_bound,
                t.prime_tail_bound,
                t.exponent_tail_bound,
                t.rounding_bound,
            )
        }
    };
    write_output(out, content)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CountRow {
    sequence: String,
    x: u64,
    count: u64,
    predicted: f64,
    deviation: f64,
    uncertainty: f64,
    envelope: Option<f64>,
    ratio: Option<f64>,
}

fn run_count(s: &SSequence, limit: u64, out: &OutputArgs) -> anyhow::Result<ExitCode> {
    let report = sieve_count(s, limit)?;
    let content = match out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                sequence: String,
                #[serde(flatten)]
                report: &'a esnd::CountReport,
            }
            to_json(&Full { sequence: s.to_string(), report: &report })?
        }
        Format::Csv => to_csv_row(&CountRow {
            sequence: s.to_string(),
            x: report.x,
            count: report.count,
            predicted: report.predicted,
            deviation: report.deviation,
            uncertainty: report.uncertainty,
            envelope: report.envelope,
            ratio: report.ratio,
        })?,
        Format::Text => {
            let mut text = format!(
                "sequence   {}\n\
                 x          {}\n\
                 count      {}\n\
                 predicted  {}\n\
                 deviation  {}\n\
                 density    {}\n",
                s,
                report.x,
                report.count,
                sig12(report.predicted),
                sig12(report.deviation),
                bracket_text(&report.density),
            );
            match (report.envelope, report.ratio) {
                (Some(env), Some(ratio)) => {
                    writeln!(text, "envelope   {}", sig12(env))?;
                    writeln!(text, "ratio      {ratio:.6e}")?;
                }
                _ => writeln!(text, "envelope   n/a (needs x >= 16)")?,
            }
            text
        }
    };
    write_output(out, content)?;
    Ok(ExitCode::SUCCESS)
}

fn run_enumerate(s: &SSequence, limit: u64, out: &OutputArgs) -> anyhow::Result<ExitCode> {
    let members = enumerate(s, limit)?;
    let content = match out.format {
        Format::Json => to_json(&members)?,
        Format::Csv => {
            let mut text = String::from("n\n");
            for m in &members {
                writeln!(text, "{m}")?;
            }
            text
        }
        Format::Text => {
            let mut text = String::new();
            for m in &members {
                writeln!(text, "{m}")?;
            }
            text
        }
    };
    write_output(out, content)?;
    Ok(ExitCode::SUCCESS)
}

fn catalog_text(catalog: &GapCatalog) -> String {
    let mut text = format!(
        "gap catalog: defining terms up to {}, endpoint width {:.1e}\n\
         {} gaps, {}\n\
         total length {}\n\n",
        catalog.max_term,
        catalog.width,
        catalog.gaps.len(),
        match catalog.disjointness {
            esnd::Disjointness::Disjoint => "pairwise disjoint".to_string(),
            other => format!("NOT verified disjoint: {other:?}"),
        },
        sig12(catalog.total_length),
    );
    for g in &catalog.gaps {
        let _ = writeln!(
            text,
            "({}, {})  length {}  s1 {}  s2 {}",
            sig12(g.left.point),
            sig12(g.right.point),
            sig12(g.length),
            g.s1,
            g.s2,
        );
    }
    text
}

fn run_gaps(max_term: u64, width: f64, out: &OutputArgs) -> anyhow::Result<ExitCode> {
    let catalog = gap_catalog(max_term, width)?;
    match out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            esnd::gaps::write_catalog_csv(&catalog, &mut buf)?;
            write_output(out, String::from_utf8(buf)?)?;
        }
        Format::Json => {
            let mut buf = Vec::new();
            esnd::gaps::write_catalog_json(&catalog, &mut buf)?;
            buf.push(b'\n');
            write_output(out, String::from_utf8(buf)?)?;
        }
        Format::Text => write_output(out, catalog_text(&catalog))?,
    }
    Ok(ExitCode::SUCCESS)
}

const OPEN_QUESTION: &str =
    "open question: does the total gap length converge to the ceiling as the term bound grows?";

fn run_measure(max_term: u64, width: f64, out: &OutputArgs) -> anyhow::Result<ExitCode> {
    let measure = gap_measure(max_term, width)?;
    let content = match out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Full {
                #[serde(flatten)]
                measure: esnd::GapMeasure,
                conjecture_status: &'static str,
                conjecture: &'static str,
            }
            to_json(&Full { measure, conjecture_status: "open", conjecture: OPEN_QUESTION })?
        }
        Format::Csv => to_csv_row(&measure)?,
        Format::Text => format!(
            "gap measure: defining terms up to {}, {} gaps\n\
             total length  {}  [{}, {}]\n\
             ceiling       {}  (1 - 6/pi^2)\n\
             {}\n",
            measure.max_term,
            measure.gap_count,
            sig12(measure.total_length),
            sig12(measure.total_lo),
            sig12(measure.total_hi),
            sig12(measure.ceiling),
            OPEN_QUESTION,
        ),
    };
    write_output(out, content)?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(suite: &str) -> anyhow::Result<ExitCode> {
    let outcomes = if suite == "all" {
        verify::all_suites()
    } else {
        match verify::run_suite(suite) {
            Some(outcome) => vec![outcome],
            None => {
                eprintln!(
                    "error: unknown suite {suite:?}; expected one of {} or all",
                    verify::SUITE_NAMES.join(", ")
                );
                return Ok(ExitCode::from(2));
            }
        }
    };
    let mut all_passed = true;
    for outcome in &outcomes {
        if outcome.passed() {
            println!("suite {}: PASS ({} checks)", outcome.name, outcome.checks);
        } else {
            all_passed = false;
            println!(
                "suite {}: FAIL ({} of {} checks)",
                outcome.name,
                outcome.failures.len(),
                outcome.checks
            );
            for f in &outcome.failures {
                println!("  {f}");
            }
        }
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn to_csv_row<T: Serialize>(row: &T) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(row)?;
    w.flush()?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn scientific_notation_normalizes_to_integers() {
        assert_eq!(parse_sci_u64("1e6"), Ok(1_000_000));
        assert_eq!(parse_sci_u64(" 2.5e3 "), Ok(2_500));
        assert_eq!(parse_sci_u64("79"), Ok(79));
        assert!(parse_sci_u64("1.5").is_err());
        assert!(parse_sci_u64("-3").is_err());
        assert!(parse_sci_u64("1e30").is_err());
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.607927101854026), "0.607927101854");
        assert_eq!(sig12(2103716.0604647319), "2103716.06046");
        assert_eq!(sig12(0.0150667061517), "0.0150667061517");
    }
}
