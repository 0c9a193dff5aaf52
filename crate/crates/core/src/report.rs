//! CSV and JSON emission for replicate records and summary tables.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! parsed file reproduces the in-memory values bit for bit. Readers check
//! the header against the versioned schema exactly: an unknown or missing
//! column is an error, not something to skip over.

use crate::datagen::ScenarioLabel;
use crate::error::{Error, Result};
use crate::harness::{
    CrossRecord, CrossSummaryRow, Hypothesis, LongRecord, LongSummaryRow, ModelKind,
    ReplicateRecord, SummaryTable, SUMMARY_SCHEMA_VERSION,
};

/// Schema v1 header of cross-sectional replicate records.
pub const CROSS_RECORDS_HEADER: &str =
    "beta_c,delta,replicate,model,estimate,se,p_value,ci_low,ci_high,converged,favors_active";

/// Schema v1 header of longitudinal replicate records.
pub const LONG_RECORDS_HEADER: &str =
    "scenario,hypothesis,replicate,model,estimate,se,p_value,ci_low,ci_high,converged,favors_active";

/// Schema v1 header of the cross-sectional summary.
pub const CROSS_SUMMARY_HEADER: &str = "beta_c,delta,model,n_replicates,rejection_pct,\
favor_active_given_rejection_pct,convergence_pct,mean_bias";

/// Schema v1 header of the longitudinal summary.
pub const LONG_SUMMARY_HEADER: &str = "scenario,model,n_replicates,power_pct,type1_pct,\
favor_active_under_null_pct,convergence_alt_pct,convergence_null_pct,mean_bias_alt,mean_bias_null";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn record_fields(rec: &ReplicateRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        rec.replicate,
        rec.model.as_str(),
        rec.estimate,
        rec.se,
        rec.p_value,
        rec.ci_low,
        rec.ci_high,
        format_args!("{},{}", rec.converged, rec.favors_active)
    )
}

/// Cross-sectional records as CSV text.
pub fn cross_records_csv(records: &[CrossRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CROSS_RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.beta_c,
            r.delta,
            record_fields(&r.rec)
        ));
    }
    out
}

/// Longitudinal records as CSV text.
pub fn long_records_csv(records: &[LongRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(LONG_RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.scenario.as_str(),
            r.hypothesis.as_str(),
            record_fields(&r.rec)
        ));
    }
    out
}

/// Summary rows as CSV text (either experiment kind).
pub fn summary_csv(table: &SummaryTable) -> String {
    match table {
        SummaryTable::Cross { rows, .. } => {
            let mut out = String::from(CROSS_SUMMARY_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.beta_c,
                    r.delta,
                    r.model.as_str(),
                    r.n_replicates,
                    r.rejection_pct,
                    r.favor_active_given_rejection_pct,
                    r.convergence_pct,
                    fmt_opt(r.mean_bias)
                ));
            }
            out
        }
        SummaryTable::Long { rows, .. } => {
            let mut out = String::from(LONG_SUMMARY_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.scenario.as_str(),
                    r.model.as_str(),
                    r.n_replicates,
                    r.power_pct,
                    r.type1_pct,
                    r.favor_active_under_null_pct,
                    r.convergence_alt_pct,
                    r.convergence_null_pct,
                    fmt_opt(r.mean_bias_alt),
                    fmt_opt(r.mean_bias_null)
                ));
            }
            out
        }
    }
}

/// Summary as pretty JSON (deterministic field order).
pub fn summary_json(table: &SummaryTable) -> String {
    let mut s = serde_json::to_string_pretty(table).expect("summary is serializable");
    s.push('\n');
    s
}

/// Parse a summary JSON document.
pub fn parse_summary_json(text: &str) -> Result<SummaryTable> {
    serde_json::from_str(text).map_err(|e| Error::InvalidData(format!("summary JSON: {e}")))
}

fn check_header(expected: &str, got: &str) -> Result<()> {
    if expected == got {
        return Ok(());
    }
    let exp: Vec<&str> = expected.split(',').collect();
    let have: Vec<&str> = got.split(',').collect();
    for col in &have {
        if !exp.contains(col) {
            return Err(Error::InvalidData(format!("unknown column `{col}`")));
        }
    }
    for col in &exp {
        if !have.contains(col) {
            return Err(Error::InvalidData(format!("missing column `{col}`")));
        }
    }
    Err(Error::InvalidData(
        "column order does not match the schema".into(),
    ))
}

struct LineParser<'a> {
    fields: Vec<&'a str>,
    line_no: usize,
    cursor: usize,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a str, line_no: usize, expected: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            return Err(Error::InvalidData(format!(
                "line {line_no}: expected {expected} fields, got {}",
                fields.len()
            )));
        }
        Ok(LineParser {
            fields,
            line_no,
            cursor: 0,
        })
    }

    fn next(&mut self) -> &'a str {
        let f = self.fields[self.cursor];
        self.cursor += 1;
        f
    }

    fn f64(&mut self) -> Result<f64> {
        let raw = self.next();
        raw.parse()
            .map_err(|_| Error::InvalidData(format!("line {}: bad number `{raw}`", self.line_no)))
    }

    fn opt_f64(&mut self) -> Result<Option<f64>> {
        let raw = self.next();
        if raw.is_empty() {
            Ok(None)
        } else {
            raw.parse().map(Some).map_err(|_| {
                Error::InvalidData(format!("line {}: bad number `{raw}`", self.line_no))
            })
        }
    }

    fn usize(&mut self) -> Result<usize> {
        let raw = self.next();
        raw.parse()
            .map_err(|_| Error::InvalidData(format!("line {}: bad count `{raw}`", self.line_no)))
    }

    fn bool(&mut self) -> Result<bool> {
        match self.next() {
            "true" => Ok(true),
            "false" => Ok(false),
            raw => Err(Error::InvalidData(format!(
                "line {}: bad boolean `{raw}`",
                self.line_no
            ))),
        }
    }

    fn model(&mut self) -> Result<ModelKind> {
        let raw = self.next();
        ModelKind::parse(raw).ok_or_else(|| {
            Error::InvalidData(format!("line {}: unknown model `{raw}`", self.line_no))
        })
    }
}

fn parse_record_tail(p: &mut LineParser<'_>) -> Result<ReplicateRecord> {
    Ok(ReplicateRecord {
        replicate: p.usize()?,
        model: p.model()?,
        estimate: p.f64()?,
        se: p.f64()?,
        p_value: p.f64()?,
        ci_low: p.f64()?,
        ci_high: p.f64()?,
        converged: p.bool()?,
        favors_active: p.bool()?,
    })
}

/// Replicate records of either experiment kind, detected by header.
#[derive(Debug, Clone)]
pub enum RecordsFile {
    Cross(Vec<CrossRecord>),
    Long(Vec<LongRecord>),
}

/// Parse a replicate-records CSV document (either schema).
pub fn parse_records_csv(text: &str) -> Result<RecordsFile> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidData("empty records file".into()))?;
    if header == CROSS_RECORDS_HEADER {
        let mut out = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut p = LineParser::new(line, i + 2, 11)?;
            out.push(CrossRecord {
                beta_c: p.f64()?,
                delta: p.f64()?,
                rec: parse_record_tail(&mut p)?,
            });
        }
        Ok(RecordsFile::Cross(out))
    } else if header == LONG_RECORDS_HEADER {
        let mut out = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut p = LineParser::new(line, i + 2, 11)?;
            let scenario = ScenarioLabel::parse(p.next())?;
            let hyp_raw = p.next();
            let hypothesis = Hypothesis::parse(hyp_raw).ok_or_else(|| {
                Error::InvalidData(format!("line {}: unknown hypothesis `{hyp_raw}`", i + 2))
            })?;
            out.push(LongRecord {
                scenario,
                hypothesis,
                rec: parse_record_tail(&mut p)?,
            });
        }
        Ok(RecordsFile::Long(out))
    } else {
        // surface which column is wrong against the closer schema
        let against = if header.starts_with("scenario") {
            LONG_RECORDS_HEADER
        } else {
            CROSS_RECORDS_HEADER
        };
        check_header(against, header)?;
        unreachable!("check_header rejects non-identical headers");
    }
}

/// Parse a summary CSV document (either schema).
pub fn parse_summary_csv(text: &str) -> Result<SummaryTable> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidData("empty summary file".into()))?;
    if header == CROSS_SUMMARY_HEADER {
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut p = LineParser::new(line, i + 2, 8)?;
            rows.push(CrossSummaryRow {
                beta_c: p.f64()?,
                delta: p.f64()?,
                model: p.model()?,
                n_replicates: p.usize()?,
                rejection_pct: p.f64()?,
                favor_active_given_rejection_pct: p.f64()?,
                convergence_pct: p.f64()?,
                mean_bias: p.opt_f64()?,
            });
        }
        Ok(SummaryTable::Cross {
            schema_version: SUMMARY_SCHEMA_VERSION,
            rows,
        })
    } else if header == LONG_SUMMARY_HEADER {
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut p = LineParser::new(line, i + 2, 10)?;
            rows.push(LongSummaryRow {
                scenario: ScenarioLabel::parse(p.next())?,
                model: p.model()?,
                n_replicates: p.usize()?,
                power_pct: p.f64()?,
                type1_pct: p.f64()?,
                favor_active_under_null_pct: p.f64()?,
                convergence_alt_pct: p.f64()?,
                convergence_null_pct: p.f64()?,
                mean_bias_alt: p.opt_f64()?,
                mean_bias_null: p.opt_f64()?,
            });
        }
        Ok(SummaryTable::Long {
            schema_version: SUMMARY_SCHEMA_VERSION,
            rows,
        })
    } else {
        let against = if header.starts_with("scenario") {
            LONG_SUMMARY_HEADER
        } else {
            CROSS_SUMMARY_HEADER
        };
        check_header(against, header)?;
        unreachable!("check_header rejects non-identical headers");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_cross_experiment, run_long_experiment, CrossConfig, LongConfig};
    use crate::parallel::Workers;

    fn small_cross() -> CrossConfig {
        CrossConfig {
            beta_c_grid: vec![-0.5, -1.0],
            delta_grid: vec![0.0, 0.3],
            n_per_group: 15,
            residual_var: 1.0,
            reps: 12,
            master_seed: 5,
            workers: Workers::Fixed(1),
        }
    }

    #[test]
    fn cross_records_round_trip() {
        let out = run_cross_experiment(&small_cross()).unwrap();
        let csv = cross_records_csv(&out.records);
        match parse_records_csv(&csv).unwrap() {
            RecordsFile::Cross(back) => assert_eq!(back, out.records),
            RecordsFile::Long(_) => panic!("wrong kind"),
        }
    }

    #[test]
    fn summary_round_trips_exactly() {
        let out = run_cross_experiment(&small_cross()).unwrap();
        let table = SummaryTable::Cross {
            schema_version: SUMMARY_SCHEMA_VERSION,
            rows: out.summary.clone(),
        };
        let csv = summary_csv(&table);
        assert_eq!(parse_summary_csv(&csv).unwrap(), table);
        let js = summary_json(&table);
        assert_eq!(parse_summary_json(&js).unwrap(), table);
    }

    #[test]
    fn long_records_round_trip() {
        let cfg = LongConfig {
            scenarios: vec![crate::datagen::ScenarioLabel::D],
            schedule: vec![0.0, 9.0, 18.0],
            n_per_group: 8,
            residual_var: 1.5,
            intercept_var: 2.0,
            reps: 4,
            master_seed: 2,
            workers: Workers::Fixed(1),
        };
        let out = run_long_experiment(&cfg).unwrap();
        let csv = long_records_csv(&out.records);
        match parse_records_csv(&csv).unwrap() {
            RecordsFile::Long(back) => assert_eq!(back, out.records),
            RecordsFile::Cross(_) => panic!("wrong kind"),
        }
        let table = SummaryTable::Long {
            schema_version: SUMMARY_SCHEMA_VERSION,
            rows: out.summary.clone(),
        };
        assert_eq!(parse_summary_csv(&summary_csv(&table)).unwrap(), table);
    }

    #[test]
    fn unknown_column_is_an_error_by_name() {
        let text = format!("{CROSS_RECORDS_HEADER},surprise\n");
        let err = parse_records_csv(&text).unwrap_err();
        assert!(err.to_string().contains("surprise"), "{err}");
        let text = CROSS_SUMMARY_HEADER.replace(",mean_bias", ",mean_bias,extra");
        let err = parse_summary_csv(&text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn missing_column_is_an_error_by_name() {
        let text = CROSS_RECORDS_HEADER.replace(",favors_active", "");
        let err = parse_records_csv(&text).unwrap_err();
        assert!(err.to_string().contains("favors_active"), "{err}");
    }
}
