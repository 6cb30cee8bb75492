use heegner_core::arith::{factorize, is_fundamental_discriminant, is_prime, kloosterman_row};
use heegner_core::kuznetsov::{a_sum_closed, a_sum_with_row, abound, geometric_h_range, geometric_side, HTable, SpectralWeight};
use heegner_core::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::Run;
use crate::cache::Cache;
use crate::config::UsageError;
use crate::report::{gnuplot_script, num};

const EXPSUM_DISCS: [i64; 12] = [1, -3, -4, -7, 8, -8, -11, -15, -20, -23, 24, -24];

#[derive(Default)]
struct ExpsumTally {
    cases: u64,
    mismatches: Vec<(i64, i64, f64)>,
    bound: Vec<(i64, i64, f64)>,
    vanish: Vec<(i64, f64)>,
    worst: f64,
}

fn expsum_modulus(c: u64, ds: &[i64], m_max: i64, tol: f64) -> ExpsumTally {
    let row = kloosterman_row(c);
    let primes: Vec<u64> = factorize(c).into_iter().map(|(p, _)| p).collect();
    let mut t = ExpsumTally::default();
    for &d in ds {
        for m in -m_max..=m_max {
            let brute = a_sum_with_row(m, c, d, &row);
            let closed = a_sum_closed(m, c, d).map_or(Complex64::new(f64::NAN, 0.0), |s| s.value);
            t.cases += 1;
            let err = (closed - brute).norm() / (1.0 + brute.norm());
            t.worst = t.worst.max(if err.is_nan() { f64::INFINITY } else { err });
            if !(err <= tol) {
                t.mismatches.push((d, m, err));
            }
            let b = abound(m, c, d);
            if brute.norm() > b * (1.0 + 1e-12) {
                t.bound.push((d, m, brute.norm() / b));
            }
            if m == 0 && primes.iter().any(|&p| d % p as i64 != 0) && brute.norm() > tol {
                t.vanish.push((d, brute.norm()));
            }
        }
    }
    t
}

pub fn expsum_verify(run: &mut Run) -> anyhow::Result<()> {
    let c_max = run.cfg.u64("c_max", 60)?;
    let m_max = run.cfg.u64("m_max", 60)? as i64;
    let tol = run.cfg.f64("tol", 1e-8)?;
    let ds = run.cfg.i64_list("D", &EXPSUM_DISCS)?;
    if c_max == 0 {
        return Err(UsageError("c_max must be at least 1".into()).into());
    }
    if let Some(d) = ds.iter().find(|&&d| d != 1 && !is_fundamental_discriminant(d)) {
        return Err(UsageError(format!("{d} is not a fundamental discriminant")).into());
    }
    let cs: Vec<u64> = (1..=c_max).collect();
    let tallies: Vec<ExpsumTally> = cs.par_iter().map(|&c| expsum_modulus(c, &ds, m_max, tol)).collect();
    let (mut rows, mut cases, mut mismatches) = (Vec::new(), 0, 0);
    for (&c, t) in cs.iter().zip(&tallies) {
        cases += t.cases;
        mismatches += t.mismatches.len();
        for &(d, m, err) in &t.mismatches {
            run.report.check(false, "expsum-verify", "closed form equals brute force", json!({ "c": c, "D": d, "m": m }), 0.0, err, tol);
        }
        for &(d, m, ratio) in &t.bound {
            run.report.check(false, "expsum-verify", "size bound", json!({ "c": c, "D": d, "m": m }), 1.0, ratio, 1e-12);
        }
        for &(d, v) in &t.vanish {
            run.report.check(false, "expsum-verify", "a(0; c, D) vanishes", json!({ "c": c, "D": d }), 0.0, v, tol);
        }
        rows.push(vec![c.to_string(), t.cases.to_string(), t.mismatches.len().to_string(), t.bound.len().to_string(), t.vanish.len().to_string(), num(t.worst)]);
    }
    let header = ["c", "cases", "mismatches", "bound_violations", "nonvanishing", "max_rel_error"];
    run.report.write_csv("expsum_verify.csv", &header, &rows)?;
    run.report.say(format!("expsum-verify: {cases} cases, {mismatches} mismatches"));
    Ok(())
}

/// H table covering every `X` up to `x_max`; cached by weight and range.
pub fn h_table(cache: &Cache, w: &SpectralWeight, x_max: f64) -> anyhow::Result<HTable> {
    let (lo, hi, _) = geometric_h_range(x_max, w.t);
    let key = format!("T={:?} M={:?} A={} y=[{lo:?}, {hi:?}]", w.t, w.m, w.order);
    cache.get_or_compute("hgrid", &key, || Ok(HTable::new(w, lo, hi)?))
}

pub fn kuznetsov_geom(run: &mut Run) -> anyhow::Result<()> {
    let qs = run.cfg.u64_list("q", &[1, 3])?;
    let ds = run.cfg.i64_list("D", &[-7])?;
    let xs = run.cfg.f64_list("X", &[100.0])?;
    let t = run.cfg.f64("T", 5.0)?;
    let m = run.cfg.f64("M", 2.0)?;
    let a = run.cfg.u64("A", 4)?;
    let ratio_max = run.cfg.f64("ratio_max", 50.0)?;
    if let Some(d) = ds.iter().find(|&&d| !is_fundamental_discriminant(d)) {
        return Err(UsageError(format!("{d} is not a fundamental discriminant")).into());
    }
    if let Some(q) = qs.iter().find(|&&q| q != 1 && !is_prime(q)) {
        return Err(UsageError(format!("level q = {q} must be 1 or prime")).into());
    }
    if let Some(x) = xs.iter().find(|&&x| !(1.0..=1e5).contains(&x)) {
        return Err(UsageError(format!("X = {x} outside [1, 1e5]")).into());
    }
    let w = SpectralWeight::new(t, m, a as u32).map_err(|e| UsageError(format!("weight: {e}")))?;
    let x_max = xs.iter().cloned().fold(1.0, f64::max);
    let table = h_table(run.cache, &w, x_max)?;
    let mut tuples: Vec<(u64, i64, f64)> = Vec::new();
    for &q in &qs {
        for &d in &ds {
            tuples.extend(xs.iter().map(|&x| (q, d, x)));
        }
    }
    let results: Vec<_> = tuples.par_iter().map(|&(q, d, x)| geometric_side(q, d, x, &table)).collect();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (&(q, d, x), g) in tuples.iter().zip(results) {
        let params = json!({ "q": q, "D": d, "X": x, "T": t, "M": m, "A": a });
        match g {
            Ok(g) => {
                worst = worst.max(g.ratio);
                run.report.check(g.ratio <= ratio_max, "kuznetsov-geom", "S_l within the predicted size", params, ratio_max, g.ratio, 0.0);
                rows.push(vec![q.to_string(), d.to_string(), num(x), num(t), num(m), num(g.value), num(g.ratio)]);
            }
            Err(e) => {
                run.report.check(false, "kuznetsov-geom", "S_l computed", params, "finite value", e.to_string(), 0.0);
            }
        }
    }
    run.report.write_csv("kuznetsov_geom.csv", &["q", "D", "X", "T", "M", "S_l", "ratio"], &rows)?;
    let plots: Vec<String> = qs.iter().map(|q| format!("file using ($1=={q} ? $3 : 1/0):7 with linespoints title 'q = {q}'")).collect();
    let gp = gnuplot_script("kuznetsov_geom.csv", "kuznetsov_geom.png", "geometric side", "X", "|S_l| l / sqrt|D|", true, &plots);
    run.report.write_text("kuznetsov_geom.gp", &gp)?;
    run.report.say(format!("kuznetsov-geom: {} values, max ratio {worst:.3} (limit {ratio_max})", rows.len()));
    Ok(())
}
