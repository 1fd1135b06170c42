//! Structured check records and the run report.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
            Status::Skip => write!(f, "skip"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub degree: Option<usize>,
    pub residual: f64,
    pub worst: String,
    pub status: Status,
    pub note: String,
}

impl CheckRecord {
    pub fn measured(
        suite: &str,
        name: &str,
        degree: Option<usize>,
        residual: f64,
        worst: String,
        tol: f64,
    ) -> Self {
        CheckRecord {
            suite: suite.into(),
            name: name.into(),
            degree,
            residual,
            worst,
            status: if residual < tol { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    pub fn flag(suite: &str, name: &str, ok: bool, note: impl Into<String>) -> Self {
        CheckRecord {
            suite: suite.into(),
            name: name.into(),
            degree: None,
            residual: if ok { 0.0 } else { 1.0 },
            worst: "-".into(),
            status: if ok { Status::Pass } else { Status::Fail },
            note: note.into(),
        }
    }

    pub fn skip(suite: &str, name: &str, note: impl Into<String>) -> Self {
        CheckRecord {
            suite: suite.into(),
            name: name.into(),
            degree: None,
            residual: 0.0,
            worst: "-".into(),
            status: Status::Skip,
            note: note.into(),
        }
    }

    pub fn render(&self) -> String {
        let degree = self.degree.map_or("-".to_string(), |n| n.to_string());
        let mut line = format!(
            "check suite={} name={:?} degree={} max_residual={:.17e} worst={:?} status={}",
            self.suite, self.name, degree, self.residual, self.worst, self.status
        );
        if !self.note.is_empty() {
            line.push_str(&format!(" note={:?}", self.note));
        }
        line
    }
}

/// Order in which suites run; exit codes use 1-based positions here.
pub const SUITE_ORDER: [&str; 6] = ["hopf", "coaction", "tower", "closure", "lattice", "corep"];

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub records: Vec<CheckRecord>,
    pub delta: Option<f64>,
    pub p_weights: Option<Vec<f64>>,
    pub poincare: Option<Vec<(usize, usize)>>,
    pub seed: u64,
}

impl Report {
    pub fn push(&mut self, rec: CheckRecord) {
        self.records.push(rec);
    }

    pub fn extend(&mut self, recs: Vec<CheckRecord>) {
        self.records.extend(recs);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    /// 1-based index (in `SUITE_ORDER`) of the first suite containing a
    /// failing record; 0 when everything passes.
    pub fn exit_code(&self) -> i32 {
        for (i, suite) in SUITE_ORDER.iter().enumerate() {
            if self
                .records
                .iter()
                .any(|r| r.suite == *suite && r.status == Status::Fail)
            {
                return (i + 1) as i32;
            }
        }
        if self.all_pass() {
            0
        } else {
            (SUITE_ORDER.len() + 1) as i32
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.render());
            out.push('\n');
        }
        let n_fail = self.records.iter().filter(|r| r.status == Status::Fail).count();
        let n_skip = self.records.iter().filter(|r| r.status == Status::Skip).count();
        out.push_str(&format!(
            "summary all_pass={} checks={} failed={} skipped={} seed={}\n",
            self.all_pass(),
            self.records.len(),
            n_fail,
            n_skip,
            self.seed
        ));
        if let Some(d) = self.delta {
            out.push_str(&format!("summary delta={d:.17e}\n"));
        }
        if let Some(p) = &self.p_weights {
            let parts: Vec<String> = p.iter().map(|x| format!("{x:.17e}")).collect();
            out.push_str(&format!("summary p_weights=[{}]\n", parts.join(",")));
        }
        if let Some(series) = &self.poincare {
            let parts: Vec<String> = series.iter().map(|(_, d)| d.to_string()).collect();
            out.push_str(&format!("summary poincare=[{}]\n", parts.join(",")));
        }
        out
    }
}
