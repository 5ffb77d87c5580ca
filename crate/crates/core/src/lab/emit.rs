use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::run::ScenarioReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    Json,
    Csv,
    Plotdata,
}

impl EmitFormat {
    pub fn extension(self) -> &'static str {
        match self {
            EmitFormat::Json => "json",
            EmitFormat::Csv => "csv",
            EmitFormat::Plotdata => "dat",
        }
    }
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(EmitFormat::Json),
            "csv" => Ok(EmitFormat::Csv),
            "plotdata" | "dat" => Ok(EmitFormat::Plotdata),
            _ => Err(Error::InvalidInput(format!("unknown format `{s}`"))),
        }
    }
}

/// `(sweep_value, p, j, lambda)` for every stored eigenvalue, in report order.
fn rows(report: &ScenarioReport) -> impl Iterator<Item = (f64, usize, usize, f64)> + '_ {
    report.points.iter().flat_map(|pt| {
        pt.spectra.iter().flat_map(move |s| {
            s.eigenvalues
                .iter()
                .enumerate()
                .map(move |(j, &l)| (pt.value, s.degree, j, l))
        })
    })
}

pub const CSV_HEADER: [&str; 6] = ["scenario", "sweep_param", "sweep_value", "p", "j", "lambda"];

pub fn to_csv(report: &ScenarioReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(to_err)?;
    let param = report.sweep_param.clone().unwrap_or_default();
    for (v, p, j, l) in rows(report) {
        w.write_record([
            report.scenario.clone(),
            param.clone(),
            v.to_string(),
            p.to_string(),
            j.to_string(),
            l.to_string(),
        ])
        .map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Whitespace-separated columns; one block per degree, separated by blank lines.
pub fn to_plotdata(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let param = report.sweep_param.as_deref().unwrap_or("-");
    let _ = writeln!(out, "# {} ({param})", report.scenario);
    let _ = writeln!(out, "# sweep_value p j lambda");
    let mut degrees: Vec<usize> = rows(report).map(|r| r.1).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for (k, p) in degrees.into_iter().enumerate() {
        if k > 0 {
            out.push_str("\n\n");
        }
        for (v, _, j, l) in rows(report).filter(|r| r.1 == p) {
            let _ = writeln!(out, "{v:e} {p} {j} {l:e}");
        }
    }
    out
}

pub fn render(report: &ScenarioReport, format: EmitFormat) -> Result<String> {
    match format {
        EmitFormat::Json => report.to_json(),
        EmitFormat::Csv => to_csv(report),
        EmitFormat::Plotdata => Ok(to_plotdata(report)),
    }
}

pub fn emit(report: &ScenarioReport, format: EmitFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(report, format)?)?;
    Ok(())
}
