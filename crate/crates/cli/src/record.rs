//! The sweep CSV schema. Every row carries the fully resolved parameters of
//! one grid point followed by the four outputs and a diagnostics field.
//! Parameters a scheme does not take are left empty; a failed point has
//! empty outputs and `error: ...` in `diag`.

use std::fmt;
use std::io::Write;

use welfare_core::WelfareReport;

use crate::config::Point;

pub const COLUMNS: [&str; 18] = [
    "scheme",
    "N",
    "mu",
    "beta",
    "R",
    "S",
    "T",
    "P",
    "epsilon",
    "delta",
    "a",
    "b",
    "method",
    "coop_freq",
    "gross_welfare",
    "incentive_cost",
    "net_welfare",
    "diag",
];

/// Solver-side diagnostics for one evaluated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagnostics {
    Exact {
        states: usize,
        residual: f64,
        iterations: usize,
    },
    MonteCarlo {
        samples: u64,
        coop_se: f64,
        welfare_se: f64,
        cost_se: f64,
    },
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exact {
                states,
                residual,
                iterations,
            } => write!(f, "states={states};residual={residual:e};iterations={iterations}"),
            Self::MonteCarlo {
                samples,
                coop_se,
                welfare_se,
                cost_se,
            } => write!(
                f,
                "samples={samples};se_coop={coop_se:e};se_welfare={welfare_se:e};se_cost={cost_se:e}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok {
        report: WelfareReport,
        diag: Diagnostics,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub point: Point,
    pub method: &'static str,
    pub outcome: Outcome,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Record {
    pub fn fields(&self) -> [String; 18] {
        let p = &self.point;
        let s = &p.scheme;
        let (coop, gross, cost, net, diag) = match &self.outcome {
            Outcome::Ok { report, diag } => (
                num(report.coop_frequency),
                num(report.gross_welfare_per_capita),
                num(report.incentive_cost_per_capita),
                num(report.net_welfare_per_capita),
                diag.to_string(),
            ),
            Outcome::Failed(msg) => (
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {msg}"),
            ),
        };
        [
            s.name().to_owned(),
            p.params.population.to_string(),
            num(p.params.mu),
            num(p.params.beta),
            num(p.pd.r),
            num(p.pd.s),
            num(p.pd.t),
            num(p.pd.p),
            opt(s.epsilon()),
            opt(s.delta()),
            opt(s.reward_efficiency()),
            opt(s.punishment_efficiency()),
            self.method.to_owned(),
            coop,
            gross,
            cost,
            net,
            diag,
        ]
    }
}

/// Writes the header and one row per record.
pub fn write_csv<W: Write>(out: W, records: &[Record]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}
