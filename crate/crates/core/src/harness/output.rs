use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::campaign::{CampaignResult, ResultRow};
use super::config::{model_name, Algorithm};
use crate::error::Result;

/// Marker line appended to a results file when the run was interrupted.
pub const TRUNCATION_MARKER: &str = "# truncated";

pub fn write_results_csv<W: Write>(rows: &[ResultRow], truncated: bool, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["L", "p", "model", "algorithm", "trials", "failures", "rate", "ci_low", "ci_high", "seed"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    if truncated {
        writeln!(out, "{TRUNCATION_MARKER}")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a results file; returns the rows and whether it carries the
/// truncation marker.
pub fn read_results_csv<R: Read>(mut input: R) -> Result<(Vec<ResultRow>, bool)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let truncated = text.lines().any(|l| l.trim() == TRUNCATION_MARKER);
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok((rows, truncated))
}

pub fn results_to_string(result: &CampaignResult) -> Result<String> {
    let mut buf = Vec::new();
    write_results_csv(&result.rows(), result.truncated, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn two_columns(points: &[(f64, f64)]) -> String {
    points.iter().map(|(x, y)| format!("{x} {y}\n")).collect()
}

/// Plain `x y` files, one per comparison:
///
/// * `rate_<algorithm>_<model>_L<L>.dat`: `p` against the logical error rate;
/// * `ratio_<algorithm>_over_<reference>_<model>_L<L>.dat`: `p` against the
///   rate ratio, where the reference is the single-temperature decoder when
///   it ran and enhanced matching otherwise. Points where the reference never
///   failed are left out.
///
/// Returns the written paths.
pub fn write_plot_files(result: &CampaignResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for pt in &result.points {
        let model = model_name(pt.model);
        let reference =
            [Algorithm::SingleTemperature, Algorithm::EnhancedMwpm].into_iter().find(|a| pt.algorithms.contains(a));
        for s in pt.summaries() {
            files.entry(format!("rate_{}_{model}_L{}.dat", s.algorithm, pt.distance)).or_default().push((pt.p, s.rate));
            if let Some(r) = reference.filter(|&r| r != s.algorithm) {
                let name = format!("ratio_{}_over_{r}_{model}_L{}.dat", s.algorithm, pt.distance);
                let entry = files.entry(name).or_default();
                if let Some(v) = pt.ratio(s.algorithm, r) {
                    entry.push((pt.p, v));
                }
            }
        }
    }
    let mut written = Vec::new();
    for (name, mut pts) in files {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path = dir.join(name);
        fs::write(&path, two_columns(&pts))?;
        written.push(path);
    }
    Ok(written)
}

/// One row per trial and algorithm.
pub fn write_trial_log<W: Write>(result: &CampaignResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "L",
        "p",
        "trial",
        "digest",
        "true_class",
        "algorithm",
        "verdict",
        "success",
        "score_i",
        "score_x",
        "score_z",
        "score_y",
        "wall_us",
    ])?;
    for pt in &result.points {
        for rec in &pt.records {
            for o in &rec.outcomes {
                let mut row = vec![
                    pt.distance.to_string(),
                    pt.p.to_string(),
                    rec.trial.to_string(),
                    rec.digest.clone(),
                    rec.true_class.label().to_string(),
                    o.algorithm.name().to_string(),
                    o.class.label().to_string(),
                    o.success.to_string(),
                ];
                row.extend(o.scores.iter().map(f64::to_string));
                row.push(rec.wall_micros.to_string());
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
