//! Tabular reports produced by theorem scans and demos.

use serde::Serialize;

use crate::operators::{Certificate, CheckStatus};
use crate::tol::Truth;

/// A named predicate and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, value: Truth) -> Self {
        Self {
            name: name.into(),
            value,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One line of a scan table. Unused columns stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScanRow {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Truth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl ScanRow {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            ..Default::default()
        }
    }

    pub fn t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn pair(mut self, pair: usize) -> Self {
        self.pair = Some(pair);
        self
    }

    pub fn verdict(mut self, v: Truth) -> Self {
        self.verdict = Some(v);
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn error(mut self, e: f64) -> Self {
        self.error = Some(e);
        self
    }

    pub fn residual(mut self, r: Option<f64>) -> Self {
        self.residual = r;
        self
    }
}

/// Result of a theorem scan: the hypotheses checked, the conclusions
/// verified, the full table and any counterexample witnesses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Which of several alternative hypothesis sets was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub hypotheses: Vec<Check>,
    pub conclusions: Vec<Check>,
    pub rows: Vec<ScanRow>,
    pub witnesses: Vec<Certificate>,
    pub notes: Vec<String>,
}

impl ScanReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Pass,
            reason: None,
            variant: None,
            hypotheses: Vec::new(),
            conclusions: Vec::new(),
            rows: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn hypothesis(&mut self, check: Check) {
        self.hypotheses.push(check);
    }

    pub fn conclusion(&mut self, check: Check) {
        self.conclusions.push(check);
    }

    /// First hypothesis that is not `True`.
    pub fn unmet_hypothesis(&self) -> Option<&Check> {
        self.hypotheses.iter().find(|h| !h.value.is_true())
    }

    /// Sets `status` from the checks: `NotApplicable` if a hypothesis is not
    /// established, otherwise the conjunction of the conclusions.
    pub fn finish(&mut self) {
        if let Some(h) = self.unmet_hypothesis() {
            self.reason = Some(format!("hypothesis unmet: {} is {}", h.name, h.value));
            self.status = CheckStatus::NotApplicable;
            return;
        }
        let all = self
            .conclusions
            .iter()
            .fold(Truth::True, |acc, c| acc.and(c.value));
        self.status = match all {
            Truth::True => CheckStatus::Pass,
            Truth::False => CheckStatus::Fail,
            Truth::Undecided => CheckStatus::Undecided,
        };
        if let Some(c) = self.conclusions.iter().find(|c| !c.value.is_true()) {
            self.reason = Some(format!("conclusion {} is {}", c.name, c.value));
        }
    }

    /// Folds a sub-scan into this report as one conclusion named `label`,
    /// which holds only if the sub-scan passed.
    pub fn absorb(&mut self, label: &str, sub: ScanReport) {
        let value = match sub.status {
            CheckStatus::Pass => Truth::True,
            CheckStatus::Undecided => Truth::Undecided,
            CheckStatus::Fail | CheckStatus::NotApplicable => Truth::False,
        };
        let mut check = Check::new(label, value);
        if let Some(reason) = sub.reason {
            check = check.with_note(reason);
        }
        self.conclusions.push(check);
        self.rows.extend(sub.rows.into_iter().map(|mut r| {
            r.check = format!("{label}: {}", r.check);
            r
        }));
        self.witnesses.extend(sub.witnesses);
        self.notes
            .extend(sub.notes.into_iter().map(|n| format!("{label}: {n}")));
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Table rows as CSV with a fixed header.
    pub fn to_csv(&self) -> String {
        fn num(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::from("check,t,lambda,pair,verdict,rho,error,residual\n");
        for r in &self.rows {
            let line = [
                csv_field(&r.check),
                num(r.t),
                num(r.lambda),
                r.pair.map(|p| p.to_string()).unwrap_or_default(),
                r.verdict.map(|v| v.to_string()).unwrap_or_default(),
                num(r.rho),
                num(r.error),
                num(r.residual),
            ]
            .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_from_checks() {
        let mut r = ScanReport::new("demo");
        r.hypothesis(Check::new("A local", Truth::True));
        r.conclusion(Check::new("T(1) local", Truth::True));
        r.finish();
        assert_eq!(r.status, CheckStatus::Pass);
        r.conclusion(Check::new("T(2) local", Truth::Undecided));
        r.finish();
        assert_eq!(r.status, CheckStatus::Undecided);
        r.conclusion(Check::new("T(3) local", Truth::False));
        r.finish();
        assert_eq!(r.status, CheckStatus::Fail);
        r.hypothesis(Check::new("B local", Truth::False));
        r.finish();
        assert_eq!(r.status, CheckStatus::NotApplicable);
        assert_eq!(r.reason.as_deref(), Some("hypothesis unmet: B local is false"));
    }

    #[test]
    fn csv_layout() {
        let mut r = ScanReport::new("demo");
        r.rows.push(ScanRow::new("local(exp(tA))").t(0.5).verdict(Truth::True));
        r.rows.push(ScanRow::new("a,b").pair(3).rho(1e-12));
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "check,t,lambda,pair,verdict,rho,error,residual");
        assert_eq!(lines[1], "local(exp(tA)),0.5,,,true,,,");
        assert_eq!(lines[2], "\"a,b\",,,3,,0.000000000001,,");
    }
}
