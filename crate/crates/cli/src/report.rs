//! Report rendering: fixed field order, floats at 17 significant
//! digits, so identical configs produce byte-identical artifacts.
//!
//! CSV columns are the same for every protocol
//! (`protocol,n,sigma,delta,entropy_ebits,coincidence_weight,oracle_entropy_ebits,rel_err`),
//! blank where not applicable, so downstream plotting sees one schema.

use ebitsim_core::json::fmt_float;
use ebitsim_core::protocol::{ProtocolKind, ProtocolOutcome, ProtocolSpec};
use ebitsim_core::Scalar;

/// Full amplitude matrices are embedded in JSON reports only up to this
/// dimension; continuous-grid kernels would dominate the file otherwise.
pub const AMPLITUDE_EMBED_LIMIT: usize = 16;

pub struct ReportRow {
    pub spec: ProtocolSpec<Scalar>,
    pub outcome: ProtocolOutcome<Scalar>,
}

impl ReportRow {
    fn widths(&self) -> (Option<Scalar>, Option<Scalar>) {
        match self.spec.kind {
            ProtocolKind::Etpd { sigma, delta, .. } => (Some(sigma), Some(delta)),
            _ => (None, None),
        }
    }

    /// One-line stdout summary: protocol, n, entropy, coincidence weight.
    pub fn summary_line(&self) -> String {
        let n = self
            .spec
            .n()
            .map_or_else(|| "-".to_string(), |n| n.to_string());
        format!(
            "{} n={} entropy_ebits={} coincidence_weight={}",
            self.spec.name(),
            n,
            fmt_float(self.outcome.report.entropy_ebits()),
            fmt_float(self.outcome.coincidence_weight),
        )
    }

    pub fn to_json_object(&self) -> String {
        let mut fields: Vec<String> = Vec::new();
        fields.push(format!("\"protocol\":\"{}\"", self.spec.name()));
        if let Some(n) = self.spec.n() {
            fields.push(format!("\"n\":{n}"));
        }
        match &self.spec.kind {
            ProtocolKind::SingleDetection { dim } => fields.push(format!("\"dim\":{dim}")),
            ProtocolKind::Etpd {
                sigma,
                delta,
                points,
                extent,
            } => {
                fields.push(format!("\"sigma\":{}", fmt_float(*sigma)));
                fields.push(format!("\"delta\":{}", fmt_float(*delta)));
                fields.push(format!("\"points\":{points}"));
                if let Some(e) = extent {
                    fields.push(format!("\"extent\":{}", fmt_float(*e)));
                }
            }
            _ => {}
        }
        fields.push(format!("\"seed\":{}", self.spec.seed));
        fields.push(format!(
            "\"entropy_ebits\":{}",
            fmt_float(self.outcome.report.entropy_ebits())
        ));
        fields.push(format!(
            "\"coincidence_weight\":{}",
            fmt_float(self.outcome.coincidence_weight)
        ));
        if let Some(oracle) = self.outcome.oracle_entropy_ebits {
            fields.push(format!("\"oracle_entropy_ebits\":{}", fmt_float(oracle)));
        }
        if let Some(rel) = self.outcome.oracle_rel_err {
            fields.push(format!("\"rel_err\":{}", fmt_float(rel)));
        }
        fields.push(format!("\"schmidt\":{}", self.outcome.report.to_json()));
        if self.outcome.amplitude.nrows() <= AMPLITUDE_EMBED_LIMIT {
            fields.push(format!("\"amplitude\":{}", self.outcome.amplitude.to_json()));
        }
        format!("{{{}}}", fields.join(","))
    }

    pub fn to_csv_record(&self) -> String {
        let (sigma, delta) = self.widths();
        let cols = [
            self.spec.name().to_string(),
            self.spec.n().map_or_else(String::new, |n| n.to_string()),
            sigma.map_or_else(String::new, fmt_float),
            delta.map_or_else(String::new, fmt_float),
            fmt_float(self.outcome.report.entropy_ebits()),
            fmt_float(self.outcome.coincidence_weight),
            self.outcome
                .oracle_entropy_ebits
                .map_or_else(String::new, fmt_float),
            self.outcome
                .oracle_rel_err
                .map_or_else(String::new, fmt_float),
        ];
        cols.join(",")
    }
}

pub const CSV_HEADER: &str =
    "protocol,n,sigma,delta,entropy_ebits,coincidence_weight,oracle_entropy_ebits,rel_err";

/// A single run renders as one JSON object; a sweep as `{"rows":[...]}`.
pub fn render_json(rows: &[ReportRow], is_sweep: bool) -> String {
    if is_sweep {
        let body: Vec<String> = rows.iter().map(ReportRow::to_json_object).collect();
        format!("{{\"rows\":[{}]}}\n", body.join(","))
    } else {
        format!("{}\n", rows[0].to_json_object())
    }
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_record());
        out.push('\n');
    }
    out
}
