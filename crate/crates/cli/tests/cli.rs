use std::fs;
use std::path::Path;
use std::time::Instant;

use heegner_cli::cache::Cache;
use heegner_cli::ingest::{ingest_maass, parse_maass, synthetic_maass};
use heegner_cli::{read_failures, run_from_args, RunOutcome};
use proptest::prelude::*;
use tempfile::TempDir;

fn heegner(args: &[&str], out: &Path) -> RunOutcome {
    let mut v = vec!["heegner"];
    v.extend_from_slice(args);
    v.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_from_args(v)
}

fn no_cache(args: &[&str], out: &Path) -> RunOutcome {
    let mut v = args.to_vec();
    v.push("--no-cache");
    heegner(&v, out)
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

/// failures.json must be empty exactly when the run passed.
fn assert_consistent(o: &RunOutcome) {
    let f = read_failures(&o.out_dir.as_ref().unwrap().join("failures.json")).unwrap();
    assert_eq!(f.is_empty(), o.code == 0, "exit {} with failures {f:?}", o.code);
    assert_eq!(f, o.failures);
}

fn write_file(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ingest_examples() {
    let dir = TempDir::new().unwrap();
    let good = synthetic_maass(9.533695261353557, 500, 3);
    let p = write_file(dir.path(), "good.tsv", &good.render());
    let series = ingest_maass(&p).unwrap();
    assert_eq!(series.len(), 500);
    assert_eq!(series.coeffs, good.coeffs);

    let mut bad = good.clone();
    bad.coeffs[0] = 0.9;
    let p = write_file(dir.path(), "norm.tsv", &bad.render());
    let e = format!("{:#}", ingest_maass(&p).unwrap_err());
    assert!(e.contains("normalization"), "{e}");

    let mut bad = good.clone();
    bad.coeffs[5] = bad.coeffs[1] * bad.coeffs[2] + 0.01;
    let p = write_file(dir.path(), "hecke.tsv", &bad.render());
    let e = format!("{:#}", ingest_maass(&p).unwrap_err());
    assert!(e.contains("Hecke check"), "{e}");
}

#[test]
fn spot_check_reaches_large_indices() {
    let mut data = synthetic_maass(1.0, 3000, 11);
    // composite indices past the exhaustive block are off by one percent
    for n in 61..=3000usize {
        if (2..n).take_while(|d| d * d <= n).any(|d| n % d == 0) {
            data.coeffs[n - 1] *= 1.01;
        }
    }
    let e = format!("{:#}", data.validate().unwrap_err());
    assert!(e.contains("Hecke check: pair"), "{e}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let cases = [
        ("# level: 1\n# t: 1.5\n# parity: even\n# count: 2\n1\t1.0\n2\tabc\n", "line 6"),
        ("# level: 1\n# t: 1.5\n# parity: sideways\n# count: 1\n1\t1.0\n", "line 3"),
        ("# level: 1\n# t: 1.5\n# parity: even\n# count: 2\n1\t1.0\n3\t0.5\n", "line 6"),
        ("# level: 1\n# t: 1.5\n# parity: even\n# count: 1\n1 1.0\n", "line 5"),
        ("# level: 1\n# t: 1.5\n# parity: even\n# count: 3\n1\t1.0\n", "count"),
        ("# level: 1\n# parity: even\n# count: 1\n1\t1.0\n", "missing 't'"),
    ];
    for (text, want) in cases {
        let e = format!("{:#}", parse_maass(text).unwrap_err());
        assert!(e.contains(want), "{want:?} not in {e:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn render_parse_round_trip(seed in 0u64..1000, count in 1usize..400, t in 0.1f64..50.0) {
        let data = synthetic_maass(t, count, seed);
        let back = parse_maass(&data.render()).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert!(back.validate().is_ok());
    }
}

#[test]
fn expsum_verify_example() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["expsum-verify", "--c-max", "60", "--m-max", "60"], dir.path());
    assert_eq!(o.code, 0);
    assert!(o.lines.iter().any(|l| l.ends_with(" 0 mismatches")), "{:?}", o.lines);
    assert_consistent(&o);
}

#[test]
fn gz_check_example() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["gz-check", "--D", "7,23,31", "--t", "1,2"], dir.path());
    assert_eq!(o.code, 0, "{:?}", o.failures);
    assert_consistent(&o);
    let rows = csv_rows(&dir.path().join("gz_check.csv"));
    assert_eq!(rows.len(), 6);
    for t in ["1.0", "2.0"] {
        let k: Vec<f64> = rows.iter().filter(|r| &r[2] == t).map(|r| r[6].parse().unwrap()).collect();
        let (lo, hi) = k.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!((hi - lo) / lo < 1e-3, "t = {t}: {k:?}");
        assert!(hi <= 10.0);
    }
    assert!(dir.path().join("gz_check.gp").exists());
}

#[test]
fn equidist_example() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["equidist", "--q", "2,3,5", "--D-range", "5000:20000"], dir.path());
    assert_eq!(o.code, 0, "{:?}", o.failures);
    assert_consistent(&o);
    let mut r = csv::Reader::from_path(dir.path().join("equidist.csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["D", "q", "label", "count", "discrepancy"]);
    let trend = csv_rows(&dir.path().join("equidist_trend.csv"));
    assert!(trend.len() > 1000);
    for q in ["2", "3", "5"] {
        assert!(trend.iter().any(|row| &row[0] == q));
    }
    let gp = fs::read_to_string(dir.path().join("equidist_trend.gp")).unwrap();
    assert!(gp.contains("equidist_trend.csv") && gp.contains("plot "));
}

#[test]
fn classgroup_cache_speedup_and_identity() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let args = ["classgroup", "--D-range", "100000:101000", "--cache", cache.to_str().unwrap()];
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let start = Instant::now();
    assert_eq!(heegner(&args, &a).code, 0);
    let cold = start.elapsed();
    let start = Instant::now();
    assert_eq!(heegner(&args, &b).code, 0);
    let warm = start.elapsed();
    assert!(warm * 5 < cold, "cold {cold:?}, warm {warm:?}");
    assert_eq!(no_cache(&args[..3], &c).code, 0);
    let read = |d: &Path| fs::read(d.join("classgroup.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn cache_schema_and_corruption() {
    let dir = TempDir::new().unwrap();
    let v1 = Cache::with_schema(dir.path(), "test-v1").unwrap();
    let x: Vec<f64> = v1.get_or_compute("k", "key", || Ok(vec![0.1, 1.0 / 3.0])).unwrap();
    let y: Vec<f64> = v1.get_or_compute("k", "key", || panic!("should be cached")).unwrap();
    assert_eq!(x, y);
    assert_eq!(v1.stats().hits, 1);

    // a schema bump never reads the old entry
    let v2 = Cache::with_schema(dir.path(), "test-v2").unwrap();
    let z: Vec<f64> = v2.get_or_compute("k", "key", || Ok(vec![2.0])).unwrap();
    assert_eq!(z, [2.0]);
    assert_eq!(v2.stats().hits, 0);

    // an old entry copied to the new address is rejected by its tag
    fs::copy(v1.path("k", "key").unwrap(), v2.path("k", "key").unwrap()).unwrap();
    let v2 = Cache::with_schema(dir.path(), "test-v2").unwrap();
    let z: Vec<f64> = v2.get_or_compute("k", "key", || Ok(vec![3.0])).unwrap();
    assert_eq!((z, v2.stats().rejected), (vec![3.0], 1));

    // corrupt entry: recomputed, then readable again
    let path = v1.path("k", "key").unwrap();
    fs::write(&path, "{\"schema\": \"test-v1\", \"value\": [0.1,").unwrap();
    let v1 = Cache::with_schema(dir.path(), "test-v1").unwrap();
    let w: Vec<f64> = v1.get_or_compute("k", "key", || Ok(vec![4.0])).unwrap();
    assert_eq!((w, v1.stats().rejected), (vec![4.0], 1));
    let w: Vec<f64> = v1.get_or_compute("k", "key", || panic!("should be cached")).unwrap();
    assert_eq!(w, [4.0]);
}

#[test]
fn tolerance_failures_are_listed() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["gz-check", "--D", "7,23", "--t", "1", "--tol", "1e-20"], dir.path());
    assert_eq!(o.code, 1);
    assert_consistent(&o);
    assert!(o.failures.iter().all(|f| f.command == "gz-check" && f.tolerance == 1e-20));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["equidist", "--D-range", "9:3"],
        vec!["equidist", "--D-range", "12:12"],
        vec!["classgroup", "--D", "12"],
        vec!["gz-check", "--tol", "-1"],
        vec!["gz-check", "--bogus"],
        vec!["heegner", "--D", "23", "--q", "5"],
        vec!["kuznetsov-geom", "--X", "1e6"],
        vec!["nonsense"],
    ] {
        let o = no_cache(&args, dir.path());
        assert_eq!(o.code, 2, "{args:?}");
        if let Some(out) = &o.out_dir {
            assert!(!read_failures(&out.join("failures.json")).unwrap().is_empty());
        }
    }
    assert_eq!(run_from_args(["heegner"]).code, 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = write_file(dir.path(), "afe.json", r#"{"command": "afe-check", "D": [-3, -4], "tol": 1e-5}"#);
    let o = no_cache(&["afe-check", "--config", cfg.to_str().unwrap(), "--D", "-7,5"], dir.path());
    assert_eq!(o.code, 0);
    let ds: Vec<String> = csv_rows(&dir.path().join("afe_check.csv")).iter().map(|r| r[0].to_string()).collect();
    assert_eq!(ds, ["-7", "5"]);
    let wrong = write_file(dir.path(), "wrong.json", r#"{"command": "gz-check"}"#);
    assert_eq!(no_cache(&["afe-check", "--config", wrong.to_str().unwrap()], dir.path()).code, 2);
}

#[test]
fn heegner_and_waldspurger_modes() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["heegner", "--D", "23,47", "--q", "2,3"], dir.path());
    assert_eq!(o.code, 0, "{:?}", o.failures);
    assert_eq!(csv_rows(&dir.path().join("heegner.csv")).len(), 2 * (3 + 5) * 2);

    let o = no_cache(&["waldspurger"], dir.path());
    assert_eq!(o.code, 0, "{:?}", o.failures);
    assert!(o.lines.iter().any(|l| l.contains("structure mode")));

    // synthetic data is multiplicative but not automorphic, so the ratio is not constant
    let file = dir.path().join("toy.tsv");
    assert_eq!(no_cache(&["synth-maass", "--file", file.to_str().unwrap(), "--count", "3000"], dir.path()).code, 0);
    let o = no_cache(&["waldspurger", "--maass", file.to_str().unwrap()], dir.path());
    assert!(o.lines.iter().any(|l| l.contains("maass mode")));
    assert_consistent(&o);
}

#[test]
fn selfcheck_passes() {
    let dir = TempDir::new().unwrap();
    let o = no_cache(&["selfcheck"], dir.path());
    assert_eq!(o.code, 0, "{:?}", o.failures);
    assert_consistent(&o);
    assert_eq!(o.lines.iter().filter(|l| l.starts_with("selfcheck ") && l.ends_with(": pass")).count(), 8);
}
