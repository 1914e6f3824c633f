//! CSV reports and golden-file comparison.

use std::path::Path;

use ccsim_core::verify::CheckReport;

use crate::error::CliError;

pub const RUN_HEADER: [&str; 5] = ["check", "residual", "tolerance", "passed", "context"];
pub const SCAN_HEADER: [&str; 4] = ["param_value", "infidelity", "unitarity_defect", "wall_time_ms"];

/// Columns left out of golden comparisons.
const VOLATILE: [&str; 1] = ["wall_time_ms"];

/// 17 significant digits, enough to round-trip an `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub param_value: f64,
    pub infidelity: f64,
    pub unitarity_defect: f64,
    pub wall_time_ms: f64,
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn render_checks(reports: &[CheckReport]) -> String {
    write_csv(
        &RUN_HEADER,
        reports.iter().map(|r| {
            vec![
                r.name.clone(),
                float(r.residual),
                float(r.tolerance),
                r.passed.to_string(),
                r.context.clone(),
            ]
        }),
    )
}

pub fn render_scan(rows: &[ScanRow]) -> String {
    write_csv(
        &SCAN_HEADER,
        rows.iter().map(|r| {
            vec![
                float(r.param_value),
                float(r.infidelity),
                float(r.unitarity_defect),
                format!("{:.3}", r.wall_time_ms),
            ]
        }),
    )
}

fn records(text: &str) -> Result<Vec<csv::StringRecord>, String> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())
}

/// Field-by-field equality, skipping volatile columns. Returns a description
/// of the first difference.
pub fn compare_csv(actual: &str, golden: &str) -> Result<(), String> {
    let (a, g) = (records(actual)?, records(golden)?);
    if a.len() != g.len() {
        return Err(format!("{} rows, golden has {}", a.len(), g.len()));
    }
    let Some(header) = g.first() else {
        return Ok(());
    };
    if a[0] != *header {
        return Err(format!("header {:?} differs from golden {:?}", a[0], header));
    }
    let skip: Vec<bool> = header.iter().map(|h| VOLATILE.contains(&h)).collect();
    for (row, (x, y)) in a.iter().zip(&g).enumerate().skip(1) {
        if x.len() != y.len() {
            return Err(format!("row {row}: {} fields, golden has {}", x.len(), y.len()));
        }
        for (col, (u, v)) in x.iter().zip(y.iter()).enumerate() {
            if !skip[col] && u != v {
                return Err(format!("row {row}, column `{}`: {u} vs golden {v}", &header[col]));
            }
        }
    }
    Ok(())
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 0.0] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn context_with_commas_is_quoted() {
        let r = CheckReport::new("rwa", 0.5, 1.0, "a=1,b=2");
        let text = render_checks(&[r]);
        assert_eq!(
            text,
            "check,residual,tolerance,passed,context\r\nrwa,5.0000000000000000e-1,1.0000000000000000e0,true,\"a=1,b=2\"\r\n"
        );
    }

    #[test]
    fn golden_comparison_ignores_wall_time() {
        let row = |t: f64| ScanRow {
            param_value: 0.1,
            infidelity: 1e-3,
            unitarity_defect: 1e-14,
            wall_time_ms: t,
        };
        let a = render_scan(&[row(5.0)]);
        let b = render_scan(&[row(9.0)]);
        assert!(compare_csv(&a, &b).is_ok());
        let mut c = row(5.0);
        c.infidelity = 2e-3;
        assert!(compare_csv(&render_scan(&[c]), &b).unwrap_err().contains("infidelity"));
        assert!(compare_csv(&render_scan(&[]), &b).is_err());
    }
}
