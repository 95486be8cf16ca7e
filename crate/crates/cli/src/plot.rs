//! Static SVG line charts from sweep CSV files.
//!
//! A plot spec is a small TOML file:
//!
//! ```toml
//! name = "peer_sweep"                 # output file stem, default "plot"
//! x = "delta"
//! y = ["coop_freq", "gross_welfare"]
//! series_by = ["scheme"]             # columns that split rows into lines
//! panel_by = "beta"                  # one file per distinct value
//! title = "Peer incentives"          # optional
//! ```
//!
//! Output is a pure function of the CSV bytes and the spec: series and
//! panels appear in first-seen order and all coordinates are printed with a
//! fixed precision.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 540.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 420.0;

const COLORS: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const DASHES: [&str; 4] = ["", "6 3", "2 2", "8 3 2 3"];

fn default_name() -> String {
    "plot".to_owned()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub x: String,
    pub y: Vec<String>,
    #[serde(default)]
    pub series_by: Vec<String>,
    pub panel_by: Option<String>,
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
}

impl PlotSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim().to_owned()))?;
        if spec.y.is_empty() {
            return Err(CliError::Config(
                "plot spec: y must list at least one column".into(),
            ));
        }
        if spec.name.is_empty()
            || !spec
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(CliError::Config(format!(
                "plot spec: name '{}' must be a plain file stem",
                spec.name
            )));
        }
        Ok(spec)
    }

    fn required_columns(&self) -> Vec<&str> {
        let mut cols = vec![self.x.as_str()];
        cols.extend(self.y.iter().map(String::as_str));
        cols.extend(self.series_by.iter().map(String::as_str));
        cols.extend(self.panel_by.as_deref());
        cols
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Series {
    label: String,
    color: usize,
    dash: usize,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
struct Panel {
    value: Option<String>,
    series: Vec<Series>,
}

#[derive(Debug, Default)]
pub struct PlotOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Renders `csv_path` according to `spec`, one SVG per panel, into `out_dir`.
pub fn plot(csv_path: &Path, spec: &PlotSpec, out_dir: &Path) -> Result<PlotOutput> {
    let bytes = std::fs::read(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let data_err = |message: String| CliError::Data {
        path: csv_path.to_owned(),
        message,
    };
    let mut out = PlotOutput::default();

    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let headers = reader
        .headers()
        .map_err(|e| data_err(e.to_string()))?
        .clone();
    let mut panels: Vec<Panel> = Vec::new();

    if headers.is_empty() {
        out.warnings.push(format!(
            "{}: empty file, writing empty axes",
            csv_path.display()
        ));
    } else {
        let col = |name: &str| headers.iter().position(|h| h == name);
        let missing: Vec<&str> = spec
            .required_columns()
            .into_iter()
            .filter(|c| col(c).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(data_err(format!("missing columns: {}", missing.join(", "))));
        }
        let x_col = col(&spec.x).unwrap();
        let y_cols: Vec<usize> = spec.y.iter().map(|c| col(c).unwrap()).collect();
        let series_cols: Vec<usize> = spec.series_by.iter().map(|c| col(c).unwrap()).collect();
        let panel_col = spec.panel_by.as_deref().map(|c| col(c).unwrap());

        let mut keys: Vec<String> = Vec::new();
        let mut rows = 0usize;
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| data_err(e.to_string()))?;
            rows += 1;
            let number = |c: usize| -> Result<Option<f64>> {
                let field = rec.get(c).unwrap_or("").trim();
                if field.is_empty() {
                    return Ok(None);
                }
                field.parse().map(Some).map_err(|_| {
                    data_err(format!(
                        "row {}: column {} is not a number: '{field}'",
                        line + 2,
                        &headers[c]
                    ))
                })
            };
            let Some(x) = number(x_col)? else { continue };

            let panel_value = panel_col.map(|c| rec.get(c).unwrap_or("").to_owned());
            let pi = match panels.iter().position(|p| p.value == panel_value) {
                Some(i) => i,
                None => {
                    panels.push(Panel {
                        value: panel_value,
                        series: Vec::new(),
                    });
                    panels.len() - 1
                }
            };

            let key: Vec<String> = series_cols
                .iter()
                .zip(&spec.series_by)
                .map(|(&c, name)| format!("{name}={}", rec.get(c).unwrap_or("")))
                .collect();
            let key = key.join(", ");
            let key_idx = match keys.iter().position(|k| *k == key) {
                Some(i) => i,
                None => {
                    keys.push(key.clone());
                    keys.len() - 1
                }
            };

            for (yi, (&c, y_name)) in y_cols.iter().zip(&spec.y).enumerate() {
                let Some(y) = number(c)? else { continue };
                let label = match (spec.y.len() > 1 || key.is_empty(), key.is_empty()) {
                    (true, true) => y_name.clone(),
                    (true, false) => format!("{y_name}, {key}"),
                    (false, _) => key.clone(),
                };
                let (color, dash) = if series_cols.is_empty() {
                    (yi, 0)
                } else {
                    (key_idx, yi)
                };
                let series = &mut panels[pi].series;
                match series.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.points.push((x, y)),
                    None => series.push(Series {
                        label,
                        color,
                        dash,
                        points: vec![(x, y)],
                    }),
                }
            }
        }
        if rows == 0 {
            out.warnings.push(format!(
                "{}: no data rows, writing empty axes",
                csv_path.display()
            ));
        }
    }

    if panels.is_empty() {
        panels.push(Panel {
            value: None,
            series: Vec::new(),
        });
    }

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    for panel in &mut panels {
        for s in &mut panel.series {
            s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        let (file, title) = match (&panel.value, &spec.panel_by) {
            (Some(v), Some(col)) => (
                format!("{}_{}_{}.svg", spec.name, sanitize(col), sanitize(v)),
                format!(
                    "{} ({col} = {v})",
                    spec.title.as_deref().unwrap_or(&spec.name)
                ),
            ),
            _ => (
                format!("{}.svg", spec.name),
                spec.title.clone().unwrap_or_else(|| spec.name.clone()),
            ),
        };
        let y_label = spec.y_label.clone().unwrap_or_else(|| spec.y.join(", "));
        let x_label = spec.x_label.as_deref().unwrap_or(&spec.x);
        let svg = render(&title, x_label, &y_label, &panel.series);
        let path = out_dir.join(file);
        std::fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
        out.files.push(path);
    }
    Ok(out)
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Axis range widened to round tick positions, and the ticks themselves.
fn nice_ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>, usize) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else if lo == 0.0 {
        (0.0, 1.0)
    } else {
        (lo - lo.abs() * 0.1, hi + hi.abs() * 0.1)
    };
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.0 {
            2.0
        } else if norm < 7.0 {
            5.0
        } else {
            10.0
        };
    let first = (lo / step + 1e-9).floor();
    let last = (hi / step - 1e-9).ceil();
    let ticks: Vec<f64> = (0..=(last - first) as i64)
        .map(|k| {
            let v = (first + k as f64) * step;
            if v.abs() < step * 1e-9 {
                0.0
            } else {
                v
            }
        })
        .collect();
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    (first * step, last * step, ticks, decimals)
}

fn render(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1, xt, xd) = nice_ticks(x0, x1);
    let (y0, y1, yt, yd) = nice_ticks(y0, y1);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );

    for &t in &xt {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="#e5e5e5"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.xd$}</text>"#,
            BOTTOM + 18.0
        );
    }
    for &t in &yt {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#e5e5e5"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.yd$}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 42.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    );

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[ser.color % COLORS.len()];
        let dash = DASHES[ser.dash % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash_attr}/>"#,
            pts.join(" ")
        );
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.6"{dash_attr}/>"#,
            RIGHT + 15.0,
            RIGHT + 40.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 46.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
