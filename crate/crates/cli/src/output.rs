use std::path::Path;
use std::time::Instant;

use firefilter_core::filter::{FilterOutput, Observation};
use firefilter_core::io::{write_fronts_json, FrontRecord, FrontTag, RunConfig};
use firefilter_core::metrics::{burned_mask, jaccard, symmetric_difference_area};
use firefilter_core::solver::StepStats;
use firefilter_core::{Error, FrontContour, Grid, Result, RosParams};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunMeta {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub threads: usize,
    pub n_observations: Option<usize>,
    pub steps: usize,
    pub reinits: usize,
    /// Times of assimilation cycles whose update was skipped.
    pub flagged_times: Vec<f64>,
    pub wall_time_s: f64,
    pub config: RunConfig,
}

impl RunMeta {
    pub fn new(command: &'static str, config: &RunConfig, threads: usize, stats: StepStats, start: Instant) -> Self {
        RunMeta {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            threads,
            n_observations: None,
            steps: stats.steps,
            reinits: stats.reinits,
            flagged_times: Vec::new(),
            wall_time_s: start.elapsed().as_secs_f64(),
            config: config.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output serialises");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let err = |e: csv::Error| Error::format(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct EnsembleEntry<'a> {
    time_s: f64,
    params: &'a [RosParams],
    weights: &'a [f64],
}

fn skill(pred: &FrontContour, truth: &FrontContour, grid: &Grid) -> Result<(f64, f64)> {
    let a = burned_mask(pred, grid);
    let b = burned_mask(truth, grid);
    Ok((jaccard(&a, &b)?, symmetric_difference_area(&a, &b)?))
}

/// fronts.json, params.csv, ensemble.json, variance.csv and skill.csv.
pub fn write_filter_outputs(out: &FilterOutput, obs: &[Observation], grid: &Grid, dir: &Path) -> Result<()> {
    let mut fronts = Vec::new();
    for r in &out.records {
        fronts.push(FrontRecord::new(&r.forecast, FrontTag::Forecast));
        fronts.push(FrontRecord::new(&r.analysis, FrontTag::Analysis));
        for (k, m) in r.members.iter().enumerate() {
            fronts.push(FrontRecord::new(m, FrontTag::Member(k)));
        }
    }
    write_fronts_json(&fronts, &dir.join("fronts.json"))?;

    let s0 = out.initial_summary;
    let mut params = vec![vec![
        "0".into(),
        String::new(),
        s0.mean_beta.to_string(),
        s0.mean_gamma.to_string(),
        s0.std_beta.to_string(),
        s0.std_gamma.to_string(),
        String::new(),
        "false".into(),
        "false".into(),
    ]];
    params.extend(out.records.iter().map(|r| {
        vec![
            r.time.to_string(),
            r.observation.map(|k| k.to_string()).unwrap_or_default(),
            r.summary.mean_beta.to_string(),
            r.summary.mean_gamma.to_string(),
            r.summary.std_beta.to_string(),
            r.summary.std_gamma.to_string(),
            opt(r.ess),
            r.resampled.to_string(),
            r.flagged.to_string(),
        ]
    }));
    write_csv(
        &dir.join("params.csv"),
        &["time_s", "observation", "mean_beta", "mean_gamma", "std_beta", "std_gamma", "ess", "resampled", "flagged"],
        &params,
    )?;

    let ensemble: Vec<EnsembleEntry> = out
        .records
        .iter()
        .map(|r| EnsembleEntry {
            time_s: r.time,
            params: &r.params,
            weights: &r.weights,
        })
        .collect();
    write_json(&ensemble, &dir.join("ensemble.json"))?;

    let variance: Vec<Vec<String>> = out
        .records
        .iter()
        .map(|r| {
            vec![
                r.time.to_string(),
                r.variance.max.to_string(),
                r.variance.mean.to_string(),
                r.variance.front_mean.to_string(),
            ]
        })
        .collect();
    write_csv(&dir.join("variance.csv"), &["time_s", "max", "mean", "front_mean"], &variance)?;

    let mut rows = Vec::new();
    for r in &out.records {
        if let Some(k) = r.observation {
            let (fj, fs) = skill(&r.forecast, &obs[k].front, grid)?;
            let (aj, asd) = skill(&r.analysis, &obs[k].front, grid)?;
            rows.push(vec![
                r.time.to_string(),
                fj.to_string(),
                fs.to_string(),
                aj.to_string(),
                asd.to_string(),
            ]);
        }
    }
    write_csv(
        &dir.join("skill.csv"),
        &["time_s", "forecast_jaccard", "forecast_symdiff_m2", "analysis_jaccard", "analysis_symdiff_m2"],
        &rows,
    )
}
