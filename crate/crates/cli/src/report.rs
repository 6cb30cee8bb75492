use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One tolerance failure, as written to `failures.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub command: String,
    pub check: String,
    pub params: Value,
    pub expected: Value,
    pub got: Value,
    pub tolerance: f64,
}

/// Collects artifacts, summary lines and failures for one run. Single writer.
pub struct Report {
    pub out_dir: PathBuf,
    pub failures: Vec<Failure>,
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
    pub quiet: bool,
}

impl Report {
    pub fn new(out_dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(out_dir).with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Report { out_dir: out_dir.to_path_buf(), failures: Vec::new(), lines: Vec::new(), files: Vec::new(), quiet: false })
    }

    pub fn say(&mut self, line: impl Into<String>) {
        let line = line.into();
        if !self.quiet {
            println!("{line}");
        }
        self.lines.push(line);
    }

    /// Records a failure unless `ok`; returns `ok`.
    pub fn check(
        &mut self,
        ok: bool,
        command: &str,
        check: &str,
        params: Value,
        expected: impl Into<Value>,
        got: impl Into<Value>,
        tolerance: f64,
    ) -> bool {
        if !ok {
            self.failures.push(Failure {
                command: command.to_string(),
                check: check.to_string(),
                params,
                expected: expected.into(),
                got: got.into(),
                tolerance,
            });
        }
        ok
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let text = serde_json::to_string_pretty(value)?;
        self.write_text(name, &(text + "\n"))
    }

    /// Writes `failures.json` and returns the exit status: 0 when empty, 1 otherwise.
    pub fn finish(&mut self) -> anyhow::Result<i32> {
        let failures = self.failures.clone();
        self.write_json("failures.json", &failures)?;
        Ok(if failures.is_empty() { 0 } else { 1 })
    }
}

/// Gnuplot script reading `csv` (comma separated, header row) and writing `png`.
pub fn gnuplot_script(csv: &str, png: &str, title: &str, xlabel: &str, ylabel: &str, logx: bool, plots: &[String]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"));
    if logx {
        s.push_str("set logscale x\n");
    }
    s.push_str(&format!("file = '{csv}'\n"));
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

/// Shortest round-trip decimal form, so reruns give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
