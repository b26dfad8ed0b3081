//! CSV and JSON output of study records, plans and fits.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fit::RateFit;
use super::lemma::LemmaCheck;
use super::study::StudyRecord;
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;
use crate::planner::{plan_report_json, ErrorBoundReport, QuadraturePlan};
use crate::wire::RealText;

/// Column order of the records CSV.
pub const RECORD_COLUMNS: [&str; 8] = [
    "budget_N",
    "points_used",
    "estimate",
    "reference",
    "relative_error",
    "predicted_bound",
    "h",
    "lambda",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Malformed(format!("unknown output format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Emittable<'a> {
    Records(&'a [StudyRecord]),
    Plan(&'a QuadraturePlan, &'a ErrorBoundReport),
    Fit(&'a RateFit),
    Lemma(&'a [LemmaCheck]),
}

#[derive(Serialize, Deserialize)]
struct RecordDoc {
    #[serde(rename = "budget_N")]
    budget_n: u64,
    points_used: u64,
    estimate: RealText,
    reference: RealText,
    relative_error: RealText,
    predicted_bound: RealText,
    h: RealText,
    lambda: RealText,
}

impl RecordDoc {
    fn from_record(ctx: PrecisionContext, r: &StudyRecord) -> Self {
        let t = |x| RealText::from_real(ctx, x);
        RecordDoc {
            budget_n: r.budget_n,
            points_used: r.points_used,
            estimate: t(&r.estimate),
            reference: t(&r.reference),
            relative_error: t(&r.relative_error),
            predicted_bound: t(&r.predicted_bound),
            h: t(&r.h),
            lambda: t(&r.lambda),
        }
    }

    fn into_record(self, ctx: PrecisionContext) -> Result<StudyRecord> {
        Ok(StudyRecord {
            budget_n: self.budget_n,
            points_used: self.points_used,
            estimate: self.estimate.to_real(ctx)?,
            reference: self.reference.to_real(ctx)?,
            relative_error: self.relative_error.to_real(ctx)?,
            predicted_bound: self.predicted_bound.to_real(ctx)?,
            h: self.h.to_real(ctx)?,
            lambda: self.lambda.to_real(ctx)?,
        })
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Malformed(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

fn records_csv(ctx: PrecisionContext, records: &[StudyRecord]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.budget_n.to_string(),
            r.points_used.to_string(),
            ctx.format(&r.estimate),
            ctx.format(&r.reference),
            ctx.format(&r.relative_error),
            ctx.format(&r.predicted_bound),
            ctx.format(&r.h),
            ctx.format(&r.lambda),
        ])?;
    }
    finish(w)
}

fn fields_csv(rows: &[(&str, String)]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["field", "value"])?;
    for (field, value) in rows {
        w.write_record([*field, value.as_str()])?;
    }
    finish(w)
}

fn lemma_csv(ctx: PrecisionContext, checks: &[LemmaCheck]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["label", "brute", "bound", "holds", "converged"])?;
    for c in checks {
        w.write_record([
            c.label.clone(),
            ctx.format(&c.brute),
            ctx.format(&c.bound),
            c.holds.to_string(),
            c.converged.to_string(),
        ])?;
    }
    finish(w)
}

/// The text `emit` would write.
pub fn render(ctx: PrecisionContext, item: Emittable<'_>, format: OutputFormat) -> Result<String> {
    match (item, format) {
        (Emittable::Records(records), OutputFormat::Csv) => records_csv(ctx, records),
        (Emittable::Records(records), OutputFormat::Json) => {
            let docs: Vec<RecordDoc> = records
                .iter()
                .map(|r| RecordDoc::from_record(ctx, r))
                .collect();
            Ok(serde_json::to_string_pretty(&docs)? + "\n")
        }
        (Emittable::Plan(plan, report), OutputFormat::Csv) => {
            let mut rows = plan.fields(ctx);
            rows.extend(report.fields(ctx));
            fields_csv(&rows)
        }
        (Emittable::Plan(plan, report), OutputFormat::Json) => {
            Ok(plan_report_json(ctx, plan, report)? + "\n")
        }
        (Emittable::Fit(fit), OutputFormat::Csv) => fields_csv(&fit.fields(ctx)),
        (Emittable::Fit(fit), OutputFormat::Json) => {
            let doc = serde_json::json!({
                "model": fit.model.name(),
                "c": ctx.format(&fit.c),
                "logK": ctx.format(&fit.log_k),
                "residual_rms": ctx.format(&fit.residual_rms),
                "points_used": fit.points_used,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        (Emittable::Lemma(checks), OutputFormat::Csv) => lemma_csv(ctx, checks),
        (Emittable::Lemma(checks), OutputFormat::Json) => {
            let docs: Vec<_> = checks
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "label": c.label,
                        "brute": ctx.format(&c.brute),
                        "bound": ctx.format(&c.bound),
                        "holds": c.holds,
                        "converged": c.converged,
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&docs)? + "\n")
        }
    }
}

/// Writes `item` to `path`, or to stdout when `path` is `None`.
pub fn emit(
    ctx: PrecisionContext,
    item: Emittable<'_>,
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<()> {
    let text = render(ctx, item, format)?;
    match path {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// Reads records written by `render` in either format.
pub fn parse_records(ctx: PrecisionContext, text: &str) -> Result<Vec<StudyRecord>> {
    if text.trim_start().starts_with('[') {
        let docs: Vec<RecordDoc> = serde_json::from_str(text)?;
        return docs.into_iter().map(|d| d.into_record(ctx)).collect();
    }
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(RECORD_COLUMNS) {
        return Err(Error::Malformed(format!(
            "expected header `{}`",
            RECORD_COLUMNS.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let int = |i: usize| {
            row[i].trim().parse::<u64>().map_err(|_| {
                Error::Malformed(format!(
                    "column {} is not an integer: `{}`",
                    RECORD_COLUMNS[i], &row[i]
                ))
            })
        };
        let real = |i: usize| ctx.parse(&row[i]);
        out.push(StudyRecord {
            budget_n: int(0)?,
            points_used: int(1)?,
            estimate: real(2)?,
            reference: real(3)?,
            relative_error: real(4)?,
            predicted_bound: real(5)?,
            h: real(6)?,
            lambda: real(7)?,
        });
    }
    Ok(out)
}

/// Reads a records file from disk.
pub fn read_records(ctx: PrecisionContext, path: &Path) -> Result<Vec<StudyRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_records(ctx, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fit::RateModel;
    use crate::numerics::Real;

    fn record(c: PrecisionContext) -> StudyRecord {
        StudyRecord {
            budget_n: 100,
            points_used: 99,
            estimate: c.pi(),
            reference: c.pi(),
            relative_error: c.pow10_neg(70),
            predicted_bound: c.ratio(3, 7),
            h: c.ratio(1, 3),
            lambda: c.real(1),
        }
    }

    #[test]
    fn empty_records_give_header_only() {
        let c = PrecisionContext::default();
        let text = render(c, Emittable::Records(&[]), OutputFormat::Csv).unwrap();
        assert_eq!(
            text,
            "budget_N,points_used,estimate,reference,relative_error,predicted_bound,h,lambda\n"
        );
    }

    #[test]
    fn one_record_two_lines() {
        let c = PrecisionContext::default();
        let text = render(c, Emittable::Records(&[record(c)]), OutputFormat::Csv).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), 8);
        assert!(lines[1].starts_with("100,99,3.14159265358979"));
    }

    #[test]
    fn records_round_trip() {
        let c = PrecisionContext::default();
        let records = vec![record(c), record(c)];
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let text = render(c, Emittable::Records(&records), format).unwrap();
            let back = parse_records(c, &text).unwrap();
            assert_eq!(back.len(), 2);
            assert_eq!(render(c, Emittable::Records(&back), format).unwrap(), text);
        }
        assert!(parse_records(c, "a,b\n1,2\n").is_err());
    }

    #[test]
    fn fit_and_plan_tables() {
        let c = PrecisionContext::default();
        let fit = RateFit {
            model: RateModel::ExpRate,
            c: c.ratio(8, 5),
            log_k: c.real(0),
            residual_rms: c.real(0),
            points_used: 3,
        };
        let csv = render(c, Emittable::Fit(&fit), OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("field,value\nmodel,exp_rate\nc,1.6"));
        let json: serde_json::Value =
            serde_json::from_str(&render(c, Emittable::Fit(&fit), OutputFormat::Json).unwrap())
                .unwrap();
        assert_eq!(json["model"], "exp_rate");
        assert!(json["logK"].is_string());
    }

    #[test]
    fn io_errors_carry_path() {
        let c = PrecisionContext::default();
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.csv");
        match emit(
            c,
            Emittable::Records(&[]),
            OutputFormat::Csv,
            Some(&missing),
        ) {
            Err(Error::Io { path, .. }) => assert_eq!(path, missing),
            other => panic!("expected an I/O error, got {other:?}"),
        }
        let good = dir.path().join("out.csv");
        emit(
            c,
            Emittable::Records(&[record(c)]),
            OutputFormat::Csv,
            Some(&good),
        )
        .unwrap();
        let back = read_records(c, &good).unwrap();
        assert_eq!(back[0].lambda, Real::with_val(c.bits(), 1));
    }
}
