use heegner_core::arith::{factorize, is_prime, kronecker};
use heegner_core::heegner::{count_labels, fricke, heegner_points_with, CosetLabel, HeegnerPoint};
use heegner_core::quadforms::{class_number_analytic, ClassGroup};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Run;
use crate::cache::Cache;
use crate::config::UsageError;
use crate::report::{gnuplot_script, num};

/// Class group plus the derived numbers the tables need; cached per `D`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassGroupRecord {
    pub group: ClassGroup,
    pub h_analytic: f64,
    pub exponent: u64,
    pub two_rank: u32,
}

pub fn class_group_record(cache: &Cache, d: u64) -> anyhow::Result<ClassGroupRecord> {
    cache.get_or_compute("classgroup", &d.to_string(), || {
        let group = ClassGroup::new(d)?;
        let orders: Vec<usize> = (0..group.h()).map(|i| group.order(i)).collect();
        let exponent = orders.iter().fold(1u64, |l, &o| lcm(l, o as u64));
        let involutions = orders.iter().filter(|&&o| o <= 2).count();
        Ok(ClassGroupRecord { h_analytic: class_number_analytic(d), exponent, two_rank: involutions.trailing_zeros(), group })
    })
}

fn lcm(a: u64, b: u64) -> u64 {
    a / heegner_core::arith::gcd(a as i64, b as i64) as u64 * b
}

/// `-D` fundamental, `D > 4` odd, `q` prime and split.
pub fn admissible(d: u64, q: u64) -> bool {
    d > 4 && d % 2 == 1 && is_prime(q) && kronecker(-(d as i64), q as i64) == 1
}

pub fn classgroup(run: &mut Run) -> anyhow::Result<()> {
    let ds = run.cfg.discriminants(&[3, 4, 7, 8, 11, 15, 19, 20, 23, 24])?;
    let tol = run.cfg.f64("tol", 1e-6)?;
    let cache = run.cache;
    let records: Vec<_> = ds.par_iter().map(|&d| class_group_record(cache, d)).collect();
    let mut rows = Vec::new();
    for (&d, rec) in ds.iter().zip(records) {
        let rec = rec?;
        let h = rec.group.h();
        let genus = factorize(d).len() as u32 - 1;
        let params = json!({ "D": d });
        let gap = (h as f64 - rec.h_analytic).abs();
        run.report.check(gap <= tol * h as f64, "classgroup", "class number formula", params.clone(), rec.h_analytic, h, tol);
        run.report.check(rec.two_rank == genus, "classgroup", "genus theory 2-rank", params, genus, rec.two_rank, 0.0);
        rows.push(vec![d.to_string(), h.to_string(), num(rec.h_analytic), rec.exponent.to_string(), rec.two_rank.to_string()]);
    }
    run.report.write_csv("classgroup.csv", &["D", "h", "h_analytic", "exponent", "two_rank"], &rows)?;
    let plots = ["file using 1:2 with points pt 7 ps 0.4".to_string(), "file using 1:3 with lines".to_string()];
    let gp = gnuplot_script("classgroup.csv", "classgroup.png", "class numbers", "D", "h(-D)", false, &plots);
    run.report.write_text("classgroup.gp", &gp)?;
    run.report.say(format!("classgroup: {} discriminants, max h = {}", rows.len(), rows.iter().map(|r| r[1].parse::<u64>().unwrap()).max().unwrap()));
    Ok(())
}

fn point_row(p: &HeegnerPoint, orbit: &str, i: usize) -> Vec<String> {
    let tau = p.tau();
    vec![
        p.d.to_string(),
        p.q.to_string(),
        orbit.to_string(),
        i.to_string(),
        p.form.a.to_string(),
        p.form.b.to_string(),
        p.form.c.to_string(),
        p.r.to_string(),
        p.class.to_string(),
        p.label.to_string(),
        num(tau.re),
        num(tau.im),
    ]
}

pub fn heegner(run: &mut Run) -> anyhow::Result<()> {
    let ds = run.cfg.discriminants(&[23])?;
    let qs = run.cfg.u64_list("q", &[2])?;
    for &d in &ds {
        for &q in &qs {
            if !admissible(d, q) {
                return Err(UsageError(format!("(D, q) = ({d}, {q}) is not admissible: need D > 4 odd and q a split prime")).into());
            }
        }
    }
    let mut rows = Vec::new();
    for &d in &ds {
        let rec = class_group_record(run.cache, d)?;
        let h = rec.group.h();
        for &q in &qs {
            let orbits = heegner_points_with(&rec.group, q)?;
            let params = json!({ "D": d, "q": q });
            for (name, pts) in ["plus", "minus"].iter().zip(&orbits) {
                let mut classes: Vec<usize> = pts.iter().map(|p| p.class).collect();
                classes.sort_unstable();
                let ok = classes == (0..h).collect::<Vec<_>>();
                run.report.check(ok, "heegner", &format!("{name} orbit is a class group torsor"), params.clone(), h, classes.len(), 0.0);
                rows.extend(pts.iter().enumerate().map(|(i, p)| point_row(p, name, i)));
            }
            // Fricke swaps the two orbits
            let mut swapped = 0;
            for p in &orbits[0] {
                let w = fricke(&rec.group, p)?;
                swapped += orbits[1].iter().any(|m| m.form == w.form) as usize;
            }
            run.report.check(swapped == h, "heegner", "Fricke swaps orbits", params, h, swapped, 0.0);
        }
    }
    let header = ["D", "q", "orbit", "index", "a", "b", "c", "r", "class", "label", "tau_re", "tau_im"];
    run.report.write_csv("heegner.csv", &header, &rows)?;
    run.report.say(format!("heegner: {} points", rows.len()));
    Ok(())
}

pub fn equidist(run: &mut Run) -> anyhow::Result<()> {
    if !run.cfg.has("D") && !run.cfg.has("D_range") {
        run.cfg.set("D_range", "5000:20000");
    }
    let ds = run.cfg.discriminants(&[])?;
    let qs = run.cfg.u64_list("q", &[2, 3, 5])?;
    if let Some(q) = qs.iter().find(|&&q| !is_prime(q)) {
        return Err(UsageError(format!("q = {q} is not prime")).into());
    }
    let tuples: Vec<(u64, u64)> = qs.iter().flat_map(|&q| ds.iter().filter(move |&&d| admissible(d, q)).map(move |&d| (d, q))).collect();
    if tuples.is_empty() {
        return Err(UsageError("no admissible (D, q) pairs in the requested ranges".into()).into());
    }
    let cache = run.cache;
    let results: Vec<_> = tuples
        .par_iter()
        .map(|&(d, q)| -> anyhow::Result<_> {
            let rec = class_group_record(cache, d)?;
            let [plus, _] = heegner_points_with(&rec.group, q)?;
            Ok((rec.group.h() as u64, count_labels(&plus, q)))
        })
        .collect();
    let (mut rows, mut trend) = (Vec::new(), Vec::new());
    for (&(d, q), res) in tuples.iter().zip(results) {
        let (h, rep) = res?;
        let total: u64 = rep.counts.iter().sum();
        run.report.check(total == h, "equidist", "label counts sum to h", json!({ "D": d, "q": q }), h, total, 0.0);
        for (label, count) in CosetLabel::all(q).iter().zip(&rep.counts) {
            rows.push(vec![d.to_string(), q.to_string(), label.to_string(), count.to_string(), num(rep.discrepancy)]);
        }
        trend.push(vec![q.to_string(), d.to_string(), h.to_string(), num(rep.discrepancy)]);
    }
    run.report.write_csv("equidist.csv", &["D", "q", "label", "count", "discrepancy"], &rows)?;
    run.report.write_csv("equidist_trend.csv", &["q", "D", "h", "discrepancy"], &trend)?;
    let plots: Vec<String> =
        qs.iter().map(|q| format!("file using ($1=={q} ? $2 : 1/0):4 with points pt 7 ps 0.4 title 'q = {q}'")).collect();
    let gp = gnuplot_script("equidist_trend.csv", "equidist_trend.png", "Heegner point equidistribution", "D", "max |N/h - 1/(q+1)|", true, &plots);
    run.report.write_text("equidist_trend.gp", &gp)?;
    let (lo, hi) = (*ds.first().unwrap() as f64, *ds.last().unwrap() as f64);
    let quarter = (hi / lo).powf(0.25);
    for &q in &qs {
        let mean = |keep: &dyn Fn(f64) -> bool| {
            let v: Vec<f64> =
                trend.iter().filter(|r| r[0] == q.to_string() && keep(r[1].parse().unwrap())).map(|r| r[3].parse::<f64>().unwrap()).collect();
            v.iter().sum::<f64>() / v.len().max(1) as f64
        };
        let (bottom, top) = (mean(&|d| d <= lo * quarter), mean(&|d| d >= hi / quarter));
        run.report.say(format!("equidist q={q}: mean discrepancy {bottom:.4} in the lowest quarter (log scale) of D, {top:.4} in the highest"));
    }
    run.report.say(format!("equidist: {} (D, q) pairs", tuples.len()));
    Ok(())
}
