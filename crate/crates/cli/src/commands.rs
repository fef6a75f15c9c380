use std::path::Path;
use std::time::Instant;

use firefilter_core::filter::{enkf_run, pf_run, FilterOutput};
use firefilter_core::io::{
    generate_synthetic, load_front_records, load_fronts_json, load_wind_csv, simulate_fronts, write_fronts_json,
    write_wind_csv, FrontRecord, FrontTag, RunConfig,
};
use firefilter_core::metrics::{burned_mask, jaccard, symmetric_difference_area};
use firefilter_core::{Error, Result, WindSeries};

use crate::output::{self, RunMeta};
use crate::{FilterArgs, RunArgs};

#[derive(Debug, Clone, Copy)]
pub enum Filter {
    Particle,
    Enkf,
}

fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn load_wind(config: &RunConfig, path: Option<&Path>) -> Result<WindSeries> {
    match path {
        Some(p) => load_wind_csv(p),
        None => config.wind.series(config.t_end),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn simulate(args: &RunArgs, wind: Option<&Path>, threads: usize) -> Result<()> {
    let start = Instant::now();
    let config = load_config(args)?;
    let params = config.require_params()?;
    let wind = load_wind(&config, wind)?;
    let (fronts, stats) = simulate_fronts(&config, &params, &wind, config.solver.noise_sigma)?;
    create_dir(&args.out)?;
    let records: Vec<FrontRecord> = fronts.iter().map(|f| FrontRecord::new(f, FrontTag::Forecast)).collect();
    write_fronts_json(&records, &args.out.join("fronts.json"))?;
    let meta = RunMeta::new("simulate", &config, threads, stats, start);
    output::write_json(&meta, &args.out.join("run_meta.json"))
}

pub fn filter(kind: Filter, args: &FilterArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let config = load_config(&args.run)?;
    let prior = config.effective_prior()?;
    let observations = load_fronts_json(&args.fronts)?;
    let wind = load_wind(&config, args.wind.as_deref())?;
    let run = match kind {
        Filter::Particle => pf_run,
        Filter::Enkf => enkf_run,
    };
    let out: FilterOutput = run(&config.grid, &config.ignition, &prior, &observations, &wind, &config.filter())?;
    let dir = &args.run.out;
    create_dir(dir)?;
    output::write_filter_outputs(&out, &observations, &config.grid, dir)?;
    let name = match kind {
        Filter::Particle => "pf",
        Filter::Enkf => "enkf",
    };
    let mut meta = RunMeta::new(name, &config, threads, out.stats, start);
    meta.n_observations = Some(observations.len());
    meta.flagged_times = out.flagged_times();
    output::write_json(&meta, &dir.join("run_meta.json"))
}

pub fn synth(args: &RunArgs) -> Result<()> {
    let config = load_config(args)?;
    let truth = config.require_params()?;
    let (obs, wind) = generate_synthetic(&config, &truth)?;
    create_dir(&args.out)?;
    let records: Vec<FrontRecord> = obs.iter().map(|o| FrontRecord::new(&o.front, FrontTag::Truth)).collect();
    write_fronts_json(&records, &args.out.join("truth_fronts.json"))?;
    write_wind_csv(&wind, &args.out.join("wind.csv"))?;
    output::write_json(&truth, &args.out.join("true_params.json"))
}

const TAG_PRIORITY: [Option<FrontTag>; 5] = [
    Some(FrontTag::Analysis),
    Some(FrontTag::Mean),
    Some(FrontTag::Forecast),
    Some(FrontTag::Truth),
    None,
];

pub fn score(pred: &Path, truth: &Path, config: &Path, tag: Option<&str>) -> Result<()> {
    let grid = RunConfig::load(config)?.grid;
    let predicted = load_front_records(pred)?;
    let truth = load_front_records(truth)?;
    let tag = match tag {
        Some(t) => Some(
            t.parse::<FrontTag>()
                .map_err(|e| Error::Config(format!("--tag: {e}")))?,
        ),
        None => *TAG_PRIORITY
            .iter()
            .find(|t| predicted.iter().any(|r| r.tag == **t))
            .unwrap_or(&None),
    };
    let candidates: Vec<&FrontRecord> = predicted.iter().filter(|r| r.tag == tag).collect();

    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for t in &truth {
        match candidates.iter().find(|p| (p.time_s - t.time_s).abs() <= 1e-6) {
            Some(p) => {
                let a = burned_mask(&p.front(), &grid);
                let b = burned_mask(&t.front(), &grid);
                rows.push((t.time_s, jaccard(&a, &b)?, symmetric_difference_area(&a, &b)?));
            }
            None => missing.push(t.time_s.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::format(
            pred,
            format!("no prediction within 1e-6 s of truth times {}", missing.join(", ")),
        ));
    }
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    let stdout = Path::new("<stdout>");
    let io = |e: csv::Error| Error::format(stdout, e.to_string());
    w.write_record(["time_s", "jaccard", "symdiff_m2"]).map_err(io)?;
    for (t, j, s) in rows {
        w.write_record([t.to_string(), j.to_string(), s.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(stdout, e))
}
