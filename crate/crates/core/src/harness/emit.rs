//! Serialization of runs: per-trial CSV, aggregate JSON, SVG figures.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use statrs::distribution::{Discrete, Poisson};

use crate::error::{Error, Result};
use crate::harness::commands::{Report, Run};
use crate::harness::svg::{heatmap, Mark, Plot};
use crate::stats::{empirical_cf_factorization, CfOptions, EnsembleSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// Parses a comma-separated format list such as `csv,json,svg`.
pub fn parse_formats(list: &str) -> Result<Vec<Format>> {
    let mut out: Vec<Format> = Vec::new();
    for f in list.split(',').filter(|s| !s.trim().is_empty()) {
        let f = f.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

/// Column names of the per-trial CSV.
pub const CSV_HEADER: [&str; 14] = [
    "trial",
    "seed",
    "L",
    "ell",
    "n_L",
    "V",
    "E",
    "Eprime",
    "eta_E_A",
    "eta_Eprime_B",
    "zeta_E_A",
    "zeta_Eprime_B",
    "subcube_counts",
    "excluded",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-sub-cube pairs `[η_p(A), η_p(B)]` as a JSON-style list.
fn subcube_list(a: &[u32], b: &[u32]) -> String {
    let items: Vec<String> = a.iter().zip(b).map(|(x, y)| format!("[{x},{y}]")).collect();
    format!("[{}]", items.join(","))
}

pub fn write_csv(samples: &[EnsembleSample], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(file);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        let m = &s.meta;
        for r in &s.records {
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                m.side.to_string(),
                opt(m.ell),
                opt(m.n_l),
                m.volume.to_string(),
                m.energy.to_string(),
                m.energy_prime.to_string(),
                r.eta_a.to_string(),
                r.eta_b.to_string(),
                opt(r.zeta_a),
                opt(r.zeta_b),
                subcube_list(&r.sub_a, &r.sub_b),
                (r.excluded as u8).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_json(report: &Report, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Figures for the run, as `(stem, svg)` pairs.
pub fn figures(run: &Run) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let report = &run.report;
    for s in &run.samples {
        let side = s.meta.side;
        if let Some(t) = report.test(&format!("poisson_counts@{side}")) {
            if let Some(lambda) = t.get("lambda") {
                out.push((format!("count_histogram_{side}"), count_histogram(s, lambda)));
            }
        }
        if let Some(t) = report.test(&format!("poisson_gaps@{side}")) {
            if let Some(rate) = t.get("rate") {
                out.push((format!("gap_ecdf_{side}"), gap_ecdf(s, rate)));
            }
        }
        if report.test(&format!("independence@{side}")).is_some() {
            if let Ok(cf) = empirical_cf_factorization(&s.eta_pairs(), &report.config.t_grid, CfOptions::default()) {
                let gaps: Vec<Vec<f64>> = cf
                    .joint
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, z)| (z - cf.marginal_1[i] * cf.marginal_2[j]).norm())
                            .collect()
                    })
                    .collect();
                out.push((
                    format!("cf_gap_{side}"),
                    heatmap(&format!("CF factorization gap, side {side}"), &cf.grid, &gaps),
                ));
            }
        }
    }
    for t in &report.tests {
        for (key, series) in &t.series {
            if series.is_empty() {
                continue;
            }
            let mut plot = Plot::new(format!("{} {}", t.name, key), "x", key.as_str())
                .mark(Mark::Whiskers {
                    bars: series.iter().map(|p| (p.x, p.ci_low, p.ci_high)).collect(),
                    color: "gray",
                })
                .mark(Mark::Dots {
                    points: series.iter().map(|p| (p.x, p.value)).collect(),
                    color: "black",
                });
            if key == "moments" {
                plot.log_y = true;
                plot.x_label = "separation".into();
                if let (Some(a), Some(b)) = (t.get("decay_intercept"), t.get("decay_slope")) {
                    plot = plot.mark(Mark::Line {
                        points: series.iter().map(|p| (p.x, (a + b * p.x).exp())).collect(),
                        color: "crimson",
                    });
                }
            } else if key == "subcube_mean" {
                plot.x_label = "|B|".into();
                if let (Some(a), Some(b)) = (t.get("intercept"), t.get("slope")) {
                    plot = plot.mark(Mark::Line {
                        points: series.iter().map(|p| (p.x, a + b * p.x)).collect(),
                        color: "crimson",
                    });
                }
            } else if key != "profile" {
                plot.x_label = "side".into();
            } else {
                plot.x_label = "energy".into();
            }
            let stem = format!("{}_{}", t.name.replace('@', "_"), key);
            out.push((stem, plot.render()));
        }
    }
    out
}

fn count_histogram(s: &EnsembleSample, lambda: f64) -> String {
    let counts: Vec<u32> = s.kept().map(|r| r.eta_a).collect();
    let n = counts.len().max(1) as f64;
    let kmax = counts.iter().copied().max().unwrap_or(0) as u64 + 2;
    let mut freq = vec![0.0; kmax as usize + 1];
    for c in counts {
        freq[c as usize] += 1.0 / n;
    }
    let pois = Poisson::new(lambda).ok();
    Plot::new(format!("Counts vs Poisson({lambda:.3}), side {}", s.meta.side), "count", "frequency")
        .mark(Mark::Bars {
            bars: freq.iter().enumerate().map(|(k, &f)| (k as f64 - 0.4, k as f64 + 0.4, f)).collect(),
            color: "steelblue",
        })
        .mark(Mark::Line {
            points: (0..=kmax)
                .map(|k| (k as f64, pois.as_ref().map_or(0.0, |p| p.pmf(k))))
                .collect(),
            color: "crimson",
        })
        .render()
}

fn gap_ecdf(s: &EnsembleSample, rate: f64) -> String {
    let mut gaps: Vec<f64> = s.kept().flat_map(|r| r.gaps.iter().copied()).collect();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len().max(1) as f64;
    let step = (gaps.len() / 400).max(1);
    let ecdf: Vec<(f64, f64)> = gaps
        .iter()
        .enumerate()
        .step_by(step)
        .map(|(i, &g)| (g, (i + 1) as f64 / n))
        .collect();
    let top = gaps.last().copied().unwrap_or(1.0);
    Plot::new(format!("Gap ECDF vs Exponential({rate:.3}), side {}", s.meta.side), "gap", "F")
        .mark(Mark::Line {
            points: ecdf,
            color: "steelblue",
        })
        .mark(Mark::Line {
            points: (0..=100)
                .map(|k| {
                    let x = top * k as f64 / 100.0;
                    (x, 1.0 - (-rate * x).exp())
                })
                .collect(),
            color: "crimson",
        })
        .render()
}

/// Writes the requested formats into `dir` and returns the paths written.
pub fn emit_report(run: &Run, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = run.report.command.name().replace('-', "_");
    let mut written = Vec::new();
    for f in formats {
        match f {
            Format::Csv => {
                let p = dir.join(format!("{stem}_trials.csv"));
                write_csv(&run.samples, &p)?;
                written.push(p);
            }
            Format::Json => {
                let p = dir.join(format!("{stem}_report.json"));
                write_json(&run.report, &p)?;
                written.push(p);
            }
            Format::Svg => {
                for (name, svg) in figures(run) {
                    let p = dir.join(format!("{stem}_{name}.svg"));
                    fs::write(&p, svg).map_err(|e| Error::io(&p, e))?;
                    written.push(p);
                }
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_lists() {
        assert_eq!(parse_formats("csv,json,svg").unwrap(), vec![Format::Csv, Format::Json, Format::Svg]);
        assert_eq!(parse_formats("json, json").unwrap(), vec![Format::Json]);
        assert!(parse_formats("csv,xml").is_err());
    }

    #[test]
    fn subcube_list_layout() {
        assert_eq!(subcube_list(&[1, 0], &[0, 2]), "[[1,0],[0,2]]");
        assert_eq!(subcube_list(&[], &[]), "[]");
    }
}
