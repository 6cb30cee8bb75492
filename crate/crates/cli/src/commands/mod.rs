pub mod groups;
pub mod kuz;
pub mod lvalues;

use std::path::PathBuf;

use serde_json::{json, Value};

use crate::cache::Cache;
use crate::config::{ExperimentConfig, UsageError};
use crate::ingest::{ingest_maass, synthetic_maass};
use crate::report::Report;

/// Everything a command touches: its config, the shared cache and the single report writer.
pub struct Run<'a> {
    pub cfg: ExperimentConfig,
    pub cache: &'a Cache,
    pub report: &'a mut Report,
}

pub const COMMANDS: [&str; 10] = [
    "classgroup",
    "heegner",
    "equidist",
    "gz-check",
    "afe-check",
    "expsum-verify",
    "kuznetsov-geom",
    "waldspurger",
    "selfcheck",
    "synth-maass",
];

pub fn dispatch(run: &mut Run) -> anyhow::Result<()> {
    match run.cfg.command.as_str() {
        "classgroup" => groups::classgroup(run),
        "heegner" => groups::heegner(run),
        "equidist" => groups::equidist(run),
        "gz-check" => lvalues::gz_check(run),
        "afe-check" => lvalues::afe_check(run),
        "expsum-verify" => kuz::expsum_verify(run),
        "kuznetsov-geom" => kuz::kuznetsov_geom(run),
        "waldspurger" => lvalues::waldspurger(run),
        "selfcheck" => selfcheck(run),
        "synth-maass" => synth_maass(run),
        other => Err(UsageError(format!("unknown command {other}")).into()),
    }
}

/// Reduced-size runs of every experiment into one report.
fn selfcheck(run: &mut Run) -> anyhow::Result<()> {
    let plan: Vec<(&str, Vec<(&str, Value)>)> = vec![
        ("classgroup", vec![("D_range", json!("3:3000"))]),
        ("heegner", vec![("D", json!([23, 47, 71])), ("q", json!([2]))]),
        ("equidist", vec![("D_range", json!("1000:4000")), ("q", json!([2, 3, 5]))]),
        ("gz-check", vec![]),
        ("afe-check", vec![]),
        ("expsum-verify", vec![("c_max", json!(30)), ("m_max", json!(30))]),
        ("kuznetsov-geom", vec![("q", json!([1, 3])), ("X", json!([50]))]),
        ("waldspurger", vec![]),
    ];
    for (name, params) in plan {
        let mut cfg = ExperimentConfig::defaults(name, &run.cfg.out_dir);
        cfg.cache_dir = run.cfg.cache_dir.clone();
        for (k, v) in params {
            cfg.set(k, v);
        }
        let before = run.report.failures.len();
        let mut sub = Run { cfg, cache: run.cache, report: run.report };
        dispatch(&mut sub)?;
        let failed = run.report.failures.len() - before;
        run.report.say(format!("selfcheck {name}: {}", if failed == 0 { "pass".to_string() } else { format!("{failed} failures") }));
    }
    Ok(())
}

/// Writes a synthetic coefficient file and reads it back through the validator.
fn synth_maass(run: &mut Run) -> anyhow::Result<()> {
    let t = run.cfg.f64("t", 9.533695261353557)?;
    let count = run.cfg.u64("count", 2000)? as usize;
    let seed = run.cfg.u64("seed", 0)?;
    if count == 0 {
        return Err(UsageError("count must be positive".into()).into());
    }
    let path = match run.cfg.string("file")? {
        Some(p) => PathBuf::from(p),
        None => run.report.out_dir.join("synthetic_maass.tsv"),
    };
    let data = synthetic_maass(t, count, seed);
    std::fs::write(&path, data.render())?;
    let ok = ingest_maass(&path).is_ok();
    run.report.check(ok, "synth-maass", "ingest round trip", json!({ "t": t, "count": count, "seed": seed }), true, ok, 0.0);
    run.report.files.push(path.clone());
    run.report.say(format!("synth-maass: wrote {} coefficients to {}", count, path.display()));
    Ok(())
}
