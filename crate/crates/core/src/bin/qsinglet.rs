use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsinglet::audit::{run_audit, AuditConfig, Fault};
use qsinglet::channel::{validate, KrausChannel};
use qsinglet::oneshot::{report, ChannelReport, NegativitySearch};
use qsinglet::sweep::{run_sweep, SweepSpec};
use qsinglet::tolerances::CHANNEL_TOL;
use qsinglet::{ChannelSpec, Error};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INVALID_CHANNEL: u8 = 3;

/// Optimal one-shot singlet fraction and related quantities for qubit channels.
#[derive(Parser)]
#[command(name = "qsinglet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one channel.
    Analyze(AnalyzeArgs),
    /// Tabulate quantities over a range of one channel parameter.
    Sweep(SweepArgs),
    /// Check every identity on seeded random channels.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Named constructor, e.g. amplitude_damping.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    name: Option<String>,
    /// Constructor parameter `k=v`; repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Channel JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the channel-negativity search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    name: String,
    /// The swept parameter as a bare name (`--param p`); `k=v` fixes another one.
    #[arg(long = "param", required = true)]
    params: Vec<String>,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Comma-separated column names.
    #[arg(long, value_delimiter = ',', required = true)]
    columns: Vec<String>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Where to write the first offending channel.
    #[arg(long, default_value = "audit_repro.json")]
    out: PathBuf,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    PtSign,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected k=v, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// Exit code for a library error raised while building or checking a channel.
fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidChannel(_) | Error::ParameterOutOfRange { .. } => EXIT_INVALID_CHANNEL,
        _ => EXIT_USAGE,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_text(r: &ChannelReport) -> String {
    let mut s = String::new();
    let psi: Vec<String> = r.psi0.iter().map(|z| format!("{:+.9}{:+.9}i", z[0], z[1])).collect();
    s += &format!("channel                  {}\n", r.channel);
    s += &format!("F(Lambda)                {}\n", r.f_lambda);
    s += &format!("lambda_max(Choi)         {}\n", r.lambda_max);
    if r.entanglement_breaking {
        s += "entanglement breaking    yes (F reported as 1/2)\n";
    }
    s += &format!("teleportation fidelity   {}\n", r.f_tel);
    s += &format!("optimal input psi0       [{}]\n", psi.join(", "));
    s += &format!(
        "psi0 Schmidt             ({}, {}){}\n",
        r.psi0_schmidt.coefficients[0],
        r.psi0_schmidt.coefficients[1],
        if r.psi0_degenerate { "  [degenerate]" } else { "" }
    );
    s += &format!("unital                   {} (deviation {:e})\n", r.unital.flag, r.unital.deviation);
    s += &format!("psi0 maximally entangled {} ({:?})\n", r.psi0_maximally_entangled, r.classification);
    s += &format!("F1 (pre-processed)       {}\n", r.f1);
    s += &format!("N(Choi)                  {}\n", r.n_choi);
    s += &format!("N(channel)               {} (input Schmidt {})\n", r.n_channel, r.n_channel_schmidt_lambda);
    s += &format!("F*(Choi)                 {}\n", r.fstar_choi);
    match r.locc_gap {
        Some(g) => {
            s += &format!("F(Lambda) - F*(Choi)     {g:e}{}\n", if r.locc_gap_strict { " (strict)" } else { "" })
        }
        None => s += "F(Lambda) - F*(Choi)     undefined\n",
    }
    s += "residuals\n";
    for (k, v) in &r.residuals {
        s += &format!("  {k:<28} {v:e}\n");
    }
    s
}

fn analyze(a: AnalyzeArgs) -> ExitCode {
    let spec = match (&a.name, &a.file) {
        (Some(name), _) => ChannelSpec::Named { name: name.clone(), params: a.params.iter().cloned().collect() },
        (None, Some(path)) => match ChannelSpec::read(path) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", path.display())),
        },
        (None, None) => return fail(EXIT_USAGE, "one of --name or --file is required"),
    };
    if a.file.is_some() && !a.params.is_empty() {
        return fail(EXIT_USAGE, "--param applies to --name only");
    }
    let channel: KrausChannel = match spec.build() {
        Ok(c) => c,
        Err(e) => return fail(exit_for(&e), e),
    };
    let v = validate(&channel, CHANNEL_TOL);
    if !v.ok {
        return fail(
            EXIT_INVALID_CHANNEL,
            format!(
                "not a CPTP map: trace-preservation residual {:e}, minimum Choi eigenvalue {:e}",
                v.tp_residual, v.cp_min_eigenvalue
            ),
        );
    }
    let opts = NegativitySearch { seed: a.seed, parallel: a.workers.is_some_and(|n| n > 1), ..Default::default() };
    let r = report(&channel, &opts);
    let text = match a.format {
        Format::Text => render_text(&r),
        Format::Json => match serde_json::to_string_pretty(&r) {
            Ok(j) => j + "\n",
            Err(e) => return fail(EXIT_USAGE, e),
        },
    };
    match emit(&a.out, &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn sweep(a: SweepArgs) -> ExitCode {
    let mut swept = None;
    let mut fixed = BTreeMap::new();
    for p in &a.params {
        if p.contains('=') {
            match parse_kv(p) {
                Ok((k, v)) => {
                    fixed.insert(k, v);
                }
                Err(e) => return fail(EXIT_USAGE, e),
            }
        } else if swept.replace(p.clone()).is_some() {
            return fail(EXIT_USAGE, "exactly one bare --param names the swept parameter");
        }
    }
    let Some(param) = swept else {
        return fail(EXIT_USAGE, "name the swept parameter with a bare --param, e.g. --param p");
    };
    let spec = SweepSpec {
        channel_name: a.name,
        param,
        from: a.from,
        to: a.to,
        steps: a.steps,
        columns: a.columns,
        fixed,
        seed: a.seed,
    };
    let csv = match run_sweep(&spec, a.workers) {
        Ok(csv) => csv,
        Err(e) => return fail(exit_for(&e), e),
    };
    match emit(&a.out, &csv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn audit(a: AuditArgs) -> ExitCode {
    let cfg = AuditConfig {
        seed: a.seed,
        count: a.count as usize,
        workers: a.workers,
        fault: a.inject_fault.map(|f| match f {
            FaultArg::PtSign => Fault::PartialTransposeSign,
        }),
    };
    let r = run_audit(&cfg);
    println!("audit seed={} count={}", cfg.seed, cfg.count);
    println!("{:<28} {:>10} {:>12} {:>10}  status", "check", "evaluated", "max_resid", "threshold");
    for c in &r.checks {
        println!(
            "{:<28} {:>10} {:>12.3e} {:>10.1e}  {}",
            c.name,
            c.evaluated,
            c.max_residual,
            c.threshold,
            if c.passed() { "ok" } else { "FAIL" }
        );
    }
    match &r.first_failure {
        None => {
            println!("all checks passed");
            ExitCode::SUCCESS
        }
        Some(f) => {
            let spec = ChannelSpec::from_channel(&f.channel);
            let text = serde_json::to_string_pretty(&spec).expect("channel spec serialises");
            if let Err(e) = std::fs::write(&a.out, text + "\n") {
                eprintln!("error: cannot write {}: {e}", a.out.display());
            }
            eprintln!(
                "violation: {} on channel #{} (residual {:e}); channel written to {}",
                f.check,
                f.index,
                f.residual,
                a.out.display()
            );
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            });
        }
    };
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Audit(a) => audit(a),
    }
}
