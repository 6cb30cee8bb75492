use std::path::PathBuf;

use heegner_core::arith::{is_fundamental_discriminant, is_prime, kronecker};
use heegner_core::eisenstein::{eisenstein_waldspurger, eisenstein_waldspurger_constant, gz_kappa_expected, gz_ratio};
use heegner_core::lfun::{afe_length, afe_value, afe_zeta, dirichlet_l, plancherel_sides, waldspurger_ratio, zeta, AfeParams};
use heegner_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::groups::class_group_record;
use super::Run;
use crate::config::UsageError;
use crate::ingest::ingest_maass;
use crate::report::{gnuplot_script, num};

/// Largest `|kappa|` the identity allows.
const KAPPA_BOUND: f64 = 10.0;

pub fn gz_check(run: &mut Run) -> anyhow::Result<()> {
    let ds = run.cfg.discriminants(&[7, 23, 31, 47])?;
    let ts = run.cfg.f64_list("t", &[0.5, 1.0, 2.0])?;
    let qs = run.cfg.u64_list("q", &[1])?;
    let tol = run.cfg.f64("tol", 1e-3)?;
    for &q in &qs {
        if q != 1 && !is_prime(q) {
            return Err(UsageError(format!("level q = {q} must be 1 or prime")).into());
        }
    }
    let mut tuples: Vec<(u64, u64, f64)> = Vec::new();
    for &q in &qs {
        for &t in &ts {
            tuples.extend(ds.iter().map(|&d| (d, q, t)));
        }
    }
    let results: Vec<_> = tuples.par_iter().map(|&(d, q, t)| gz_ratio(d, q, t)).collect();
    let mut rows = Vec::new();
    let mut groups: Vec<((u64, f64), Vec<f64>)> = Vec::new();
    for (&(d, q, t), r) in tuples.iter().zip(results) {
        let params = json!({ "D": d, "q": q, "t": t });
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                run.report.check(false, "gz-check", "ratio computed", params, "finite ratio", e.to_string(), tol);
                continue;
            }
        };
        let expected = gz_kappa_expected(q, t);
        run.report.check(r.kappa.abs() <= KAPPA_BOUND, "gz-check", "|kappa| bound", params.clone(), KAPPA_BOUND, r.kappa, 0.0);
        let rel = (r.kappa / expected - 1.0).abs();
        run.report.check(rel < tol, "gz-check", "kappa matches closed form", params, expected, r.kappa, tol);
        rows.push(vec![d.to_string(), q.to_string(), num(t), num(r.weyl.re), num(r.weyl.im), num(r.rhs), num(r.kappa), num(expected)]);
        match groups.iter_mut().find(|(k, _)| *k == (q, t)) {
            Some((_, v)) => v.push(r.kappa),
            None => groups.push(((q, t), vec![r.kappa])),
        }
    }
    let mut worst: f64 = 0.0;
    for ((q, t), ks) in &groups {
        let (lo, hi) = ks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
        let mean = ks.iter().sum::<f64>() / ks.len() as f64;
        let spread = (hi - lo) / mean.abs();
        worst = worst.max(spread);
        run.report.check(spread < tol, "gz-check", "spread over D", json!({ "q": q, "t": t, "D": ds }), 0.0, spread, tol);
    }
    let header = ["D", "q", "t", "weyl_re", "weyl_im", "rhs", "kappa", "kappa_expected"];
    run.report.write_csv("gz_check.csv", &header, &rows)?;
    let plots = ["file using 1:7 with points pt 7 title 'kappa'".to_string(), "file using 1:8 with lines title 'expected'".to_string()];
    let gp = gnuplot_script("gz_check.csv", "gz_check.png", "Weyl sums of Eisenstein series", "D", "kappa", true, &plots);
    run.report.write_text("gz_check.gp", &gp)?;
    run.report.say(format!("gz-check: {} ratios, max relative spread {worst:.3e} (tolerance {tol:e})", rows.len()));
    Ok(())
}

/// Signed fundamental discriminants for `afe-check`; 1 stands for zeta.
pub fn afe_check(run: &mut Run) -> anyhow::Result<()> {
    let ds = run.cfg.i64_list("D", &[1, -3, -4, -7, -8, 5, 8, 12, 13, -23, -163])?;
    let exponent = run.cfg.f64("x_exponent", 1.2)?;
    let order = run.cfg.u64("A", 8)?;
    let tol = run.cfg.f64("tol", 1e-5)?;
    if !(1..=20).contains(&order) || !(exponent > 0.0) {
        return Err(UsageError(format!("need 1 <= A <= 20 and x_exponent > 0, got {order}, {exponent}")).into());
    }
    if let Some(d) = ds.iter().find(|&&d| d != 1 && !is_fundamental_discriminant(d)) {
        return Err(UsageError(format!("{d} is not a fundamental discriminant")).into());
    }
    let cache = run.cache;
    let results: Vec<_> = ds
        .par_iter()
        .map(|&d| -> anyhow::Result<(f64, usize, f64, f64)> {
            let q = d.unsigned_abs() as f64;
            let p = AfeParams { degree: 1, conductor: q, x: q.powf(exponent), order: order as u32 };
            let n = afe_length(&p)?;
            let value = if d == 1 {
                afe_zeta(&p)?
            } else {
                let coeffs: Vec<f64> = (1..=n as i64).map(|k| kronecker(d, k) as f64).collect();
                afe_value(&coeffs, &p)?
            };
            let oracle: f64 = cache.get_or_compute("lvalue", &format!("L(1/2, {d})"), || {
                let s = Complex64::new(0.5, 0.0);
                Ok(if d == 1 { zeta(s).re } else { dirichlet_l(s, d)?.re })
            })?;
            Ok((q, n, value, oracle))
        })
        .collect();
    let (mut rows, mut worst) = (Vec::new(), 0.0f64);
    for (&d, r) in ds.iter().zip(results) {
        let (q, n, value, oracle) = r?;
        let err = (value - oracle).abs();
        worst = worst.max(err);
        let params = json!({ "D": d, "x_exponent": exponent, "A": order });
        run.report.check(err <= tol, "afe-check", "afe matches oracle", params, oracle, value, tol);
        rows.push(vec![d.to_string(), num(q), n.to_string(), num(value), num(oracle), num(err)]);
    }
    run.report.write_csv("afe_check.csv", &["D", "conductor", "length", "afe", "oracle", "abs_error"], &rows)?;
    run.report.say(format!("afe-check: {} values, max |afe - oracle| = {worst:.3e} (tolerance {tol:e})", rows.len()));
    Ok(())
}

/// Ratio constancy over characters and discriminants.
///
/// With `--maass FILE` the ingested series is used. Without it the run is in
/// structure mode: the Plancherel identity on random vectors, and the ratio
/// pipeline on the Eisenstein series `E(z, 1/2 + it)`, whose constant is known.
pub fn waldspurger(run: &mut Run) -> anyhow::Result<()> {
    let ds = run.cfg.discriminants(&[23, 31])?;
    let tol = run.cfg.f64("tol", 1e-3)?;
    let maass = run.cfg.string("maass")?.map(PathBuf::from);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mode;
    if let Some(path) = maass {
        mode = "maass";
        let f = ingest_maass(&path).map_err(|e| UsageError(format!("{e:#}")))?;
        if f.level != 1 {
            return Err(UsageError(format!("{} has level {}, only level one is supported", path.display(), f.level)).into());
        }
        for &d in &ds {
            let rec = class_group_record(run.cache, d)?;
            for (k, chi) in rec.group.characters().iter().enumerate() {
                let out = waldspurger_ratio(&f, &rec.group, chi)?;
                if let Some(r) = out.ratio() {
                    ratios.push(r);
                }
                rows.push(vec![d.to_string(), k.to_string(), num(out.lambda_half()), out.ratio().map_or("skipped".into(), num)]);
            }
        }
    } else {
        mode = "structure";
        let t = run.cfg.f64("t", 1.0)?;
        let vectors = run.cfg.u64("vectors", 100)?;
        let plancherel_tol = run.cfg.f64("plancherel_tol", 1e-9)?;
        let mut rng = ChaCha8Rng::seed_from_u64(run.cfg.u64("seed", 6)?);
        let groups: Vec<_> = ds.iter().map(|&d| class_group_record(run.cache, d)).collect::<anyhow::Result<_>>()?;
        let mut gap: f64 = 0.0;
        for k in 0..vectors as usize {
            let g = &groups[k % groups.len()].group;
            let v: Vec<Complex64> = (0..g.h()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let (l, r) = plancherel_sides(g, &v)?;
            gap = gap.max((l - r).abs() / r);
        }
        run.report.check(gap < plancherel_tol, "waldspurger", "Plancherel identity", json!({ "D": ds, "vectors": vectors }), 0.0, gap, plancherel_tol);
        run.report.say(format!("waldspurger: Plancherel worst relative gap {gap:.3e} over {vectors} vectors"));
        let expect = eisenstein_waldspurger_constant(t);
        for (&d, rec) in ds.iter().zip(&groups) {
            for (k, chi) in rec.group.characters().iter().enumerate() {
                let out = eisenstein_waldspurger(&rec.group, chi, t)?;
                if let Some(r) = out.ratio() {
                    ratios.push(r);
                    let params = json!({ "D": d, "character": k, "t": t });
                    run.report.check((r / expect - 1.0).abs() < tol, "waldspurger", "Eisenstein ratio constant", params, expect, r, tol);
                }
                rows.push(vec![d.to_string(), k.to_string(), num(out.lambda_half()), out.ratio().map_or("skipped".into(), num)]);
            }
        }
    }
    let spread = match ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r))) {
        (lo, hi) if lo.is_finite() => (hi - lo) / (0.5 * (hi + lo)).abs(),
        _ => f64::NAN,
    };
    run.report.check(spread < tol, "waldspurger", "ratio constant over characters", json!({ "D": ds, "mode": mode }), 0.0, spread, tol);
    run.report.write_csv("waldspurger.csv", &["D", "character", "lambda_half", "ratio"], &rows)?;
    run.report.say(format!("waldspurger ({mode} mode): {} ratios, relative spread {spread:.3e} (tolerance {tol:e})", ratios.len()));
    Ok(())
}
