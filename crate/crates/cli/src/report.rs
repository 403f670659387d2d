//! Report rows, CSV emission and the JSON summary.
//!
//! CSV columns, in order: `suite,p,params,measured,skeleton,ratio,status,ms`.
//! `skeleton` and `ratio` are empty for rows without a skeleton; `ms` is 0
//! unless timing was requested.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// Skeleton comparison; never affects the exit code.
    Report,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Report => "report",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub suite: String,
    pub p: u64,
    pub params: String,
    pub measured: String,
    pub skeleton: String,
    pub ratio: String,
    pub status: Status,
    pub ms: u64,
}

impl ReportRow {
    /// An exact check: pass iff `ok`.
    pub fn check(suite: &str, p: u64, params: impl Into<String>, measured: impl fmt::Display, ok: bool) -> Self {
        Self {
            suite: suite.into(),
            p,
            params: params.into(),
            measured: measured.to_string(),
            skeleton: String::new(),
            ratio: String::new(),
            status: if ok { Status::Pass } else { Status::Fail },
            ms: 0,
        }
    }

    /// A measured value against a skeleton, report only.
    pub fn report(suite: &str, p: u64, params: impl Into<String>, measured: f64, skeleton: f64) -> Self {
        Self {
            suite: suite.into(),
            p,
            params: params.into(),
            measured: fmt_f(measured),
            skeleton: fmt_f(skeleton),
            ratio: fmt_f(measured / skeleton),
            status: Status::Report,
            ms: 0,
        }
    }

    pub fn skip(suite: &str, p: u64, params: impl Into<String>, reason: impl fmt::Display) -> Self {
        Self {
            suite: suite.into(),
            p,
            params: params.into(),
            measured: reason.to_string(),
            skeleton: String::new(),
            ratio: String::new(),
            status: Status::Skip,
            ms: 0,
        }
    }

    pub fn ratio_value(&self) -> Option<f64> {
        self.ratio.parse().ok()
    }
}

/// Shortest round-trip decimal, so rows are byte-stable.
pub fn fmt_f(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub report: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Named log-log slopes fitted over the rows; `None` when the data were
    /// insufficient.
    pub slopes: BTreeMap<String, Option<f64>>,
}

impl Report {
    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.slopes.extend(other.slopes);
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Fail)
    }

    pub fn counts(&self) -> BTreeMap<String, Counts> {
        let mut out: BTreeMap<String, Counts> = BTreeMap::new();
        for r in &self.rows {
            let c = out.entry(r.suite.clone()).or_default();
            match r.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Skip => c.skip += 1,
                Status::Report => c.report += 1,
            }
        }
        out
    }

    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["suite", "p", "params", "measured", "skeleton", "ratio", "status", "ms"])?;
        for r in &self.rows {
            wtr.write_record([
                r.suite.as_str(),
                &r.p.to_string(),
                &r.params,
                &r.measured,
                &r.skeleton,
                &r.ratio,
                &r.status.to_string(),
                &r.ms.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Summary<'a> {
            suites: BTreeMap<String, Counts>,
            slopes: &'a BTreeMap<String, Option<f64>>,
        }
        serde_json::to_value(Summary {
            suites: self.counts(),
            slopes: &self.slopes,
        })
        .expect("summary serializes")
    }

    /// Write `<name>.csv` and `<name>.summary.json` under `dir`.
    pub fn write_files(&self, dir: &Path, name: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let f = std::fs::File::create(dir.join(format!("{name}.csv")))?;
        self.write_csv(std::io::BufWriter::new(f))
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        let json = serde_json::to_string_pretty(&self.summary_json()).expect("json");
        std::fs::write(dir.join(format!("{name}.summary.json")), json + "\n")
    }
}
