//! Command-line experiments over `heegner-core`: tables as CSV, figures as
//! gnuplot scripts, tolerance failures in `failures.json`.
//!
//! Exit status: 0 when every check passes, 1 on any failure, 2 on a usage error.

pub mod cache;
pub mod commands;
pub mod config;
pub mod ingest;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{json, Value};

use cache::Cache;
use commands::{dispatch, Run};
use config::{ExperimentConfig, UsageError};
use report::{Failure, Report};

fn value(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name("VALUE").help(help).allow_hyphen_values(true)
}

fn common(cmd: Command) -> Command {
    cmd.arg(value("config", "JSON file of flat parameters; flags override it"))
        .arg(value("out", "output directory [default: heegner-out]"))
        .arg(value("cache", "cache directory [default: .heegner-cache]"))
        .arg(Arg::new("no-cache").long("no-cache").action(ArgAction::SetTrue).help("compute everything afresh"))
        .arg(value("tol", "tolerance of the main check"))
}

fn discs(cmd: Command) -> Command {
    cmd.arg(value("D", "comma separated D, with -D fundamental"))
        .arg(value("D-range", "a:b, keeping the fundamental -D"))
}

pub fn cli() -> Command {
    let q = || value("q", "comma separated levels");
    let sub = |name: &'static str, about: &'static str| common(Command::new(name).about(about));
    Command::new("heegner")
        .about("Class groups, Heegner points, L-values and Kuznetsov kernels")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(discs(sub("classgroup", "class numbers, exponents and 2-ranks")))
        .subcommand(discs(sub("heegner", "Heegner points on X_0(q) and their coset labels")).arg(q()))
        .subcommand(discs(sub("equidist", "label counts and discrepancy of Heegner orbits")).arg(q()))
        .subcommand(discs(sub("gz-check", "Weyl sums of Eisenstein series against L-values")).arg(q()).arg(value("t", "comma separated t")))
        .subcommand(
            sub("afe-check", "approximate functional equation against direct L-values")
                .arg(value("D", "comma separated signed discriminants, 1 for zeta"))
                .arg(value("x-exponent", "X = Q^x_exponent"))
                .arg(value("A", "cutoff order")),
        )
        .subcommand(
            sub("expsum-verify", "closed forms of the twisted sums against brute force")
                .arg(value("c-max", "largest modulus c"))
                .arg(value("m-max", "largest |m|"))
                .arg(value("D", "comma separated signed discriminants")),
        )
        .subcommand(
            sub("kuznetsov-geom", "geometric side S_l of the Kuznetsov formula")
                .arg(q())
                .arg(value("D", "comma separated signed fundamental discriminants"))
                .arg(value("X", "comma separated lengths"))
                .arg(value("T", "spectral centre"))
                .arg(value("M", "spectral width"))
                .arg(value("A", "weight order"))
                .arg(value("ratio-max", "largest acceptable |S_l| l / sqrt|D|")),
        )
        .subcommand(
            discs(sub("waldspurger", "constancy of the Waldspurger ratio over class group characters"))
                .arg(value("maass", "Maass coefficient file; structure mode without it"))
                .arg(value("t", "Eisenstein parameter in structure mode"))
                .arg(value("seed", "seed of the random Plancherel vectors"))
                .arg(value("vectors", "number of Plancherel vectors"))
                .arg(value("plancherel-tol", "tolerance of the Plancherel identity")),
        )
        .subcommand(sub("selfcheck", "reduced-size run of every experiment"))
        .subcommand(
            sub("synth-maass", "write a synthetic multiplicative coefficient file")
                .arg(value("file", "output path [default: OUT/synthetic_maass.tsv]"))
                .arg(value("t", "spectral parameter in the header"))
                .arg(value("count", "number of coefficients"))
                .arg(value("seed", "seed of the prime angles")),
        )
}

/// Exit status, summary lines and failures of one invocation.
#[derive(Debug)]
pub struct RunOutcome {
    pub code: i32,
    pub lines: Vec<String>,
    pub failures: Vec<Failure>,
    pub out_dir: Option<PathBuf>,
}

impl RunOutcome {
    fn bare(code: i32) -> Self {
        RunOutcome { code, lines: Vec::new(), failures: Vec::new(), out_dir: None }
    }
}

/// Flags given on the command line, as flat config entries.
fn explicit_flags(m: &ArgMatches) -> (Option<PathBuf>, Vec<(String, Value)>) {
    let (mut file, mut flags) = (None, Vec::new());
    for id in m.ids() {
        let id = id.as_str();
        if m.value_source(id) != Some(ValueSource::CommandLine) {
            continue;
        }
        if id == "no-cache" {
            flags.push((id.to_string(), Value::Bool(true)));
            continue;
        }
        let Some(raw) = m.get_raw(id).and_then(|mut v| v.next()) else { continue };
        let s = raw.to_string_lossy().into_owned();
        if id == "config" {
            file = Some(PathBuf::from(s));
        } else {
            flags.push((id.to_string(), Value::String(s)));
        }
    }
    (file, flags)
}

pub fn run_from_args<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return RunOutcome::bare(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let (file, flags) = explicit_flags(sub);
    match ExperimentConfig::load(name, file.as_deref(), flags) {
        Ok(cfg) => run(cfg),
        Err(e) => {
            eprintln!("{e:#}");
            RunOutcome::bare(2)
        }
    }
}

/// Runs one configured command and writes its artifacts.
pub fn run(cfg: ExperimentConfig) -> RunOutcome {
    let out_dir = cfg.out_dir.clone();
    let setup = || -> anyhow::Result<(Cache, Report)> {
        let cache = match &cfg.cache_dir {
            Some(dir) => Cache::open(dir)?,
            None => Cache::disabled(),
        };
        Ok((cache, Report::new(&out_dir)?))
    };
    let (cache, mut report) = match setup() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return RunOutcome::bare(1);
        }
    };
    let (command, params) = (cfg.command.clone(), cfg.params_json());
    let result = dispatch(&mut Run { cfg, cache: &cache, report: &mut report });
    let mut code_floor = 0;
    if let Err(e) = result {
        let usage = e.downcast_ref::<UsageError>().is_some();
        if usage {
            eprintln!("{e:#}");
        } else {
            eprintln!("error: {e:#}");
        }
        let check = if usage { "usage" } else { "completed without error" };
        report.check(false, &command, check, params, json!(null), format!("{e:#}"), 0.0);
        code_floor = if usage { 2 } else { 1 };
    }
    let code = match report.finish() {
        Ok(c) => c.max(code_floor),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    RunOutcome { code, lines: report.lines, failures: report.failures, out_dir: Some(out_dir) }
}

/// Reads back a `failures.json`.
pub fn read_failures(path: &Path) -> anyhow::Result<Vec<Failure>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
