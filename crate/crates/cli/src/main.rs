use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kkw_core::geometry::Sigma2Model;
use kkw_core::pipelines::{compute_case, inverse_symbols, CaseSpec};
use kkw_core::report::RunMeta;
use kkw_core::verify::omega_label;
use kkw_core::{
    parse_expr, run_verify, Case, Error, InstanceSource, Parsed, ReportEntry, Selector, SubbundleInstance, Theorem,
    VerificationReport,
};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser)]
#[command(name = "kkw", version, about = "Exact checks of the sub-signature Wres computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recompute a theorem and compare with the stated values.
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a Clifford or scalar expression, e.g. "trace(c(4)*c(4))".
    Trace {
        expr: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Evaluate single boundary cases.
    Cases {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data(e: Error) -> Failure {
    Failure::Data(e.to_string())
}

fn load_instance(path: &Option<PathBuf>) -> Result<Option<SubbundleInstance>, Failure> {
    let Some(p) = path else { return Ok(None) };
    let text = fs::read_to_string(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
    SubbundleInstance::from_json(&text).map(Some).map_err(data)
}

fn emit(report: &VerificationReport, format: Format, out: &Option<PathBuf>) -> Result<(), Failure> {
    let body = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn status(report: &VerificationReport) -> ExitCode {
    if report.all_match() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.cmd {
        Cmd::Verify { theorem, n, seed, instance, format, out } => {
            let sel = Selector::parse(&theorem).map_err(|_| {
                Failure::Usage(format!("unknown selector {theorem:?}; expected one of {}", Selector::NAMES.join(", ")))
            })?;
            if let Some(n) = n {
                if n != 4 && n != 6 {
                    return Err(Failure::Usage(format!("--n must be 4 or 6, got {n}")));
                }
            }
            let src = InstanceSource { seed, rank: 2, fixed: load_instance(&instance)? };
            let report = run_verify(sel, n, &src).map_err(data)?;
            emit(&report, format, &out)?;
            Ok(status(&report))
        }
        Cmd::Trace { expr, n } => {
            if !(1..=8).contains(&n) {
                return Err(Failure::Usage(format!("--n must lie in 1..=8, got {n}")));
            }
            match parse_expr(&expr, n) {
                Ok(Parsed::Scalar(p)) => println!("{p}"),
                Ok(Parsed::Clifford(c)) => println!("{c}"),
                Err(e @ Error::Syntax { .. }) => return Err(Failure::Usage(e.to_string())),
                Err(e) => return Err(data(e)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cases { theorem, case, seed, instance, format } => {
            let th = Theorem::parse(&theorem).map_err(|e| Failure::Usage(e.to_string()))?;
            let cases = match case {
                Some(c) => vec![Case::parse(&c).map_err(|e| Failure::Usage(e.to_string()))?],
                None => Case::ALL.to_vec(),
            };
            let src = InstanceSource { seed, rank: 2, fixed: load_instance(&instance)? };
            let inst = src.instance(th.n()).map_err(data)?;
            let syms = inverse_symbols(th, &inst, Sigma2Model::Lemma).map_err(data)?;
            let mut report = VerificationReport::new(RunMeta {
                selector: format!("cases:{}", th.key()),
                dimensions: vec![th.n()],
                seed: Some(seed),
                instance_digests: [(th.n().to_string(), inst.digest())].into(),
                omega_labels: [(th.n().to_string(), omega_label(th.n()))].into(),
            });
            for c in cases {
                let r = compute_case(&CaseSpec::standard(th, c), &syms).map_err(data)?;
                report.push(ReportEntry::new(r.spec.key(), r.coefficient, r.paper_value).with_notes(r.diagnostics));
            }
            emit(&report, format, &None)?;
            Ok(status(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(m)) => {
            eprintln!("data error: {m}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
