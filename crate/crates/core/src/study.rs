//! Batch runner for the city × period × scenario × model-class matrix.
//!
//! Inputs are validated up front. Jobs then run on a worker pool and their
//! results are merged in job-key order, so every CSV is byte-identical across
//! runs with the same configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::components::{LoadMode, OrderingSweep, VariantResults, COMPONENT_NAMES};
use crate::error::{Error, Result};
use crate::morph::{
    build_model_classes, ingest_shift_tables, morph_year, write_shift_tables, ClassKind, GcmShiftTable, Idw,
    LocalShifts, ModelClass, Period, Scenario,
};
use crate::reference::reference_cooling;
use crate::solar;
use crate::synth;
use crate::weather::{read_weather_file, write_weather_file, Location, WeatherField, WeatherFormat, WeatherYear};
use crate::zone::{simulate_year_with, AnnualResult, ArchetypeConfig, RoomArchetype, SimulationSettings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CityConfig {
    pub name: String,
    /// Baseline weather file, EPW or CSV by extension.
    pub weather: PathBuf,
    pub latitude: f64,
    pub longitude: f64,
    pub timezone: f64,
    /// Overrides the archetype's wall azimuths for this city.
    #[serde(default)]
    pub wall_azimuths: Option<[f64; 2]>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub cities: Vec<CityConfig>,
    pub periods: Vec<Period>,
    pub scenarios: Vec<Scenario>,
    pub model_classes: Vec<ClassKind>,
    pub shift_files: Vec<PathBuf>,
    #[serde(default)]
    pub idw: Idw,
    #[serde(default)]
    pub archetype: ArchetypeConfig,
    #[serde(default)]
    pub simulation: SimulationSettings,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    /// Run the eight attribution variants for every job.
    #[serde(default = "yes")]
    pub attribution: bool,
    /// Re-split baseline global irradiance with the logistic model so baseline
    /// and morphed years share one decomposition.
    #[serde(default = "yes")]
    pub resplit_baseline: bool,
}

impl StudyConfig {
    /// Reads a TOML study file; relative paths are taken from its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let mut cfg: StudyConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for c in &mut cfg.cities {
            resolve(&mut c.weather);
        }
        cfg.shift_files.iter_mut().for_each(resolve);
        resolve(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn simulation_count(&self) -> usize {
        self.cities.len() * (1 + self.periods.len() * self.scenarios.len() * self.model_classes.len())
    }

    fn archetype_for(&self, city: &CityConfig) -> Result<RoomArchetype> {
        let mut a = self.archetype.clone();
        if let Some(az) = city.wall_azimuths {
            a.wall_azimuths = az;
        }
        a.build()
            .map_err(|e| Error::Config(format!("archetype for {}: {e}", city.name)))
    }
}

/// Room and solver settings for single runs outside a study.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub archetype: ArchetypeConfig,
    pub simulation: SimulationSettings,
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Future {
    pub period: Period,
    pub scenario: Scenario,
    pub class: ClassKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobKey {
    pub city: String,
    /// `None` for the baseline year.
    pub future: Option<Future>,
}

impl JobKey {
    fn labels(&self) -> [String; 4] {
        match &self.future {
            None => [
                self.city.clone(),
                "baseline".into(),
                "baseline".into(),
                "baseline".into(),
            ],
            Some(f) => [
                self.city.clone(),
                f.period.to_string(),
                f.scenario.to_string(),
                f.class.to_string(),
            ],
        }
    }

    fn slug(&self) -> String {
        self.labels()
            .join("_")
            .to_ascii_lowercase()
            .replace(" ", "_")
            .replace(".", "")
    }
}

/// Everything a city needs, loaded and checked before any simulation.
struct PreparedCity {
    name: String,
    archetype: RoomArchetype,
    baseline: WeatherYear,
    classes: BTreeMap<(Period, Scenario), [ModelClass; 3]>,
}

#[derive(Debug, Clone)]
pub struct JobOutput {
    pub key: JobKey,
    pub annual: AnnualResult,
    /// Heating then cooling sweeps when attribution is on.
    pub attribution: Option<[OrderingSweep; 2]>,
    pub saturation_clamps: usize,
    pub monthly_dry_bulb: [f64; 12],
    pub class: Option<ModelClass>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone)]
pub struct JobFailure {
    pub key: JobKey,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub outputs: Vec<JobOutput>,
    pub failures: Vec<JobFailure>,
    pub baseline_monthly: BTreeMap<String, [f64; 12]>,
    pub output_dir: PathBuf,
    pub runtime_s: f64,
}

impl StudyReport {
    pub fn baseline(&self, city: &str) -> Option<&JobOutput> {
        self.outputs
            .iter()
            .find(|o| o.key.city == city && o.key.future.is_none())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Change {
    pub baseline: f64,
    pub future: f64,
    pub delta_kwh: f64,
    /// `None` when the baseline is zero.
    pub delta_pct: Option<f64>,
}

impl Change {
    pub fn between(baseline: f64, future: f64) -> Self {
        let delta = future - baseline;
        Self {
            baseline,
            future,
            delta_kwh: delta,
            delta_pct: (baseline != 0.0).then(|| 100.0 * delta / baseline),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeRecord {
    pub heating: Change,
    pub cooling: Change,
}

pub fn report_changes(baseline: &AnnualResult, future: &AnnualResult) -> ChangeRecord {
    ChangeRecord {
        heating: Change::between(baseline.heating_kwh, future.heating_kwh),
        cooling: Change::between(baseline.cooling_total_kwh, future.cooling_total_kwh),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the configured worker count when set.
    pub workers: Option<usize>,
    pub trace: bool,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Loads every input and builds the model classes. Any problem is an error
/// before a single simulation runs.
fn prepare(cfg: &StudyConfig) -> Result<Vec<PreparedCity>> {
    if cfg.cities.is_empty() {
        return Err(Error::Config("study has no cities".into()));
    }
    let mut names: Vec<&str> = cfg.cities.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("city names must be unique".into()));
    }
    cfg.simulation.steps_per_hour()?;
    let futures = !(cfg.periods.is_empty() || cfg.scenarios.is_empty() || cfg.model_classes.is_empty());

    let mut tables: Vec<GcmShiftTable> = Vec::new();
    for path in &cfg.shift_files {
        let file = fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        tables.extend(ingest_shift_tables(file).map_err(|e| e.in_file(path))?);
    }
    if futures {
        for &p in &cfg.periods {
            for &s in &cfg.scenarios {
                let n = tables.iter().filter(|t| t.period == p && t.scenario == s).count();
                if n < 2 {
                    return Err(Error::Config(format!("{s} {p} needs at least 2 GCM tables, found {n}")));
                }
            }
        }
    }

    cfg.cities
        .iter()
        .map(|c| {
            let archetype = cfg.archetype_for(c)?;
            let raw = read_weather_file(&c.weather)?;
            let location = Location {
                name: c.name.clone(),
                latitude: c.latitude,
                longitude: c.longitude,
                timezone: c.timezone,
                elevation: raw.location.elevation,
            };
            let year = raw.with_location(location);
            let baseline = if cfg.resplit_baseline {
                solar::resplit_year(&year)?
            } else {
                year
            };
            let mut classes = BTreeMap::new();
            if futures {
                for &p in &cfg.periods {
                    for &s in &cfg.scenarios {
                        let ensemble = tables
                            .iter()
                            .filter(|t| t.period == p && t.scenario == s)
                            .map(|t| t.localize(c.latitude, c.longitude, &cfg.idw))
                            .collect::<Result<Vec<LocalShifts>>>()?;
                        let mc = build_model_classes(&ensemble)?;
                        classes.insert((p, s), [mc.min, mc.median, mc.max]);
                    }
                }
            }
            Ok(PreparedCity {
                name: c.name.clone(),
                archetype,
                baseline,
                classes,
            })
        })
        .collect()
}

/// Parse-only check of every input referenced by the config.
pub fn validate_study(cfg: &StudyConfig) -> Result<()> {
    prepare(cfg).map(|_| ())
}

fn monthly_means(year: &WeatherYear) -> Result<[f64; 12]> {
    let mut out = [0.0; 12];
    for (m, v) in out.iter_mut().enumerate() {
        *v = year.monthly_mean(WeatherField::DryBulb, m + 1)?;
    }
    Ok(out)
}

fn class_index(kind: ClassKind) -> usize {
    match kind {
        ClassKind::Min => 0,
        ClassKind::Median => 1,
        ClassKind::Max => 2,
    }
}

fn run_job(cfg: &StudyConfig, city: &PreparedCity, key: &JobKey, trace: bool) -> Result<JobOutput> {
    let start = Instant::now();
    let (weather, clamps, class) = match key.future {
        None => (city.baseline.clone(), 0, None),
        Some(f) => {
            let class = city.classes[&(f.period, f.scenario)][class_index(f.class)].clone();
            let outcome = morph_year(&city.baseline, &class.months)?;
            (outcome.year, outcome.saturation_clamps, Some(class))
        }
    };
    let settings = SimulationSettings {
        trace: trace || cfg.simulation.trace,
        ..cfg.simulation
    };
    let (annual, attribution) = if cfg.attribution {
        let variants = VariantResults::compute(&city.archetype, &weather, &settings)?;
        let sweeps = [
            variants.all_orderings(LoadMode::Heating),
            variants.all_orderings(LoadMode::Cooling),
        ];
        (variants.full().clone(), Some(sweeps))
    } else {
        (simulate_year_with(&city.archetype, &weather, &settings)?, None)
    };
    Ok(JobOutput {
        key: key.clone(),
        annual,
        attribution,
        saturation_clamps: clamps,
        monthly_dry_bulb: monthly_means(&weather)?,
        class,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs the whole matrix and writes every output file.
pub fn run_study(cfg: &StudyConfig, options: RunOptions, config_path: Option<&Path>) -> Result<StudyReport> {
    let start = Instant::now();
    let cities = prepare(cfg)?;

    let mut jobs: Vec<(usize, JobKey)> = Vec::new();
    for (ci, c) in cities.iter().enumerate() {
        jobs.push((
            ci,
            JobKey {
                city: c.name.clone(),
                future: None,
            },
        ));
        for &period in &cfg.periods {
            for &scenario in &cfg.scenarios {
                for &class in &cfg.model_classes {
                    let future = Some(Future {
                        period,
                        scenario,
                        class,
                    });
                    jobs.push((
                        ci,
                        JobKey {
                            city: c.name.clone(),
                            future,
                        },
                    ));
                }
            }
        }
    }

    let workers = options.workers.unwrap_or(cfg.workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<std::result::Result<JobOutput, JobFailure>> = pool.install(|| {
        jobs.par_iter()
            .map(|(ci, key)| {
                run_job(cfg, &cities[*ci], key, options.trace).map_err(|e| JobFailure {
                    key: key.clone(),
                    error: e.to_string(),
                })
            })
            .collect()
    });

    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(o) => outputs.push(o),
            Err(f) => failures.push(f),
        }
    }
    let baseline_monthly = cities
        .iter()
        .map(|c| Ok((c.name.clone(), monthly_means(&c.baseline)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let report = StudyReport {
        outputs,
        failures,
        baseline_monthly,
        output_dir: cfg.output_dir.clone(),
        runtime_s: start.elapsed().as_secs_f64(),
    };
    write_outputs(cfg, &cities, &report, config_path)?;
    Ok(report)
}

fn num(v: f64) -> String {
    format!("{v:.4}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NA".into())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::from(e).in_file(path))
}

pub const RESULTS_HEADER: [&str; 9] = [
    "city",
    "period",
    "scenario",
    "model",
    "heating_kWh",
    "cooling_sensible_kWh",
    "cooling_latent_kWh",
    "cooling_total_kWh",
    "usage_hours",
];

pub fn results_row(key: &JobKey, r: &AnnualResult) -> Vec<String> {
    let mut row: Vec<String> = key.labels().to_vec();
    row.extend([
        num(r.heating_kwh),
        num(r.cooling_sensible_kwh),
        num(r.cooling_latent_kwh),
        num(r.cooling_total_kwh),
        r.usage_hours.to_string(),
    ]);
    row
}

pub fn components_header() -> Vec<String> {
    let mut h: Vec<String> = ["city", "period", "scenario", "model", "mode", "ordering"]
        .map(String::from)
        .to_vec();
    h.extend(COMPONENT_NAMES.iter().map(|c| format!("{c}_kWh")));
    h.push("total_kWh".into());
    h.extend(COMPONENT_NAMES.iter().map(|c| format!("{c}_pct")));
    h
}

pub fn components_rows(labels: &[String], sweep: &OrderingSweep) -> Vec<Vec<String>> {
    sweep
        .breakdowns
        .iter()
        .map(|b| {
            let mut row = labels.to_vec();
            row.push(b.mode.to_string());
            row.push(b.ordering.to_string());
            row.extend(b.components().map(num));
            row.push(num(b.total));
            match b.percentages() {
                Some(p) => row.extend(p.map(num)),
                None => row.extend(std::iter::repeat_n("NA".to_string(), 6)),
            }
            row
        })
        .collect()
}

fn write_trace(path: &Path, r: &AnnualResult) -> Result<()> {
    let Some(trace) = &r.trace else { return Ok(()) };
    let mut w = csv_writer(path)?;
    for h in trace {
        w.serialize(h)?;
    }
    w.flush()?;
    Ok(())
}

fn write_outputs(
    cfg: &StudyConfig,
    cities: &[PreparedCity],
    report: &StudyReport,
    config_path: Option<&Path>,
) -> Result<()> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;

    let mut results = csv_writer(&dir.join("results.csv"))?;
    results.write_record(RESULTS_HEADER)?;
    for o in &report.outputs {
        results.write_record(results_row(&o.key, &o.annual))?;
    }
    results.flush()?;

    if cfg.attribution {
        let mut comp = csv_writer(&dir.join("components.csv"))?;
        comp.write_record(components_header())?;
        let mut spread = csv_writer(&dir.join("component_spread.csv"))?;
        let mut sh: Vec<String> = ["city", "period", "scenario", "model", "mode"]
            .map(String::from)
            .to_vec();
        sh.extend(COMPONENT_NAMES.iter().map(|c| format!("{c}_spread_pp")));
        spread.write_record(&sh)?;
        let mut long = csv_writer(&dir.join("figure_components.csv"))?;
        long.write_record([
            "city",
            "period",
            "scenario",
            "model",
            "mode",
            "ordering",
            "component",
            "kWh",
            "pct",
        ])?;
        for o in &report.outputs {
            let Some(sweeps) = &o.attribution else { continue };
            let labels = o.key.labels().to_vec();
            for sweep in sweeps {
                for row in components_rows(&labels, sweep) {
                    comp.write_record(&row)?;
                }
                let mut row = labels.clone();
                row.push(sweep.breakdowns[0].mode.to_string());
                match sweep.spread {
                    Some(s) => row.extend(s.map(num)),
                    None => row.extend(std::iter::repeat_n("NA".to_string(), 6)),
                }
                spread.write_record(&row)?;
                for b in &sweep.breakdowns {
                    let pct = b.percentages();
                    for (k, name) in COMPONENT_NAMES.iter().enumerate() {
                        let mut row = labels.clone();
                        row.extend([
                            b.mode.to_string(),
                            b.ordering.to_string(),
                            name.to_string(),
                            num(b.components()[k]),
                            opt_num(pct.map(|p| p[k])),
                        ]);
                        long.write_record(&row)?;
                    }
                }
            }
        }
        comp.flush()?;
        spread.flush()?;
        long.flush()?;
    }

    // Changes against each city's baseline, plus long-format figure tables.
    let mut changes = csv_writer(&dir.join("changes.csv"))?;
    changes.write_record([
        "city",
        "period",
        "scenario",
        "model",
        "heating_baseline_kWh",
        "heating_future_kWh",
        "heating_delta_kWh",
        "heating_delta_pct",
        "cooling_baseline_kWh",
        "cooling_future_kWh",
        "cooling_delta_kWh",
        "cooling_delta_pct",
    ])?;
    let mut fig_change = csv_writer(&dir.join("figure_energy_change.csv"))?;
    fig_change.write_record([
        "city",
        "scenario",
        "period",
        "model",
        "quantity",
        "delta_kWh",
        "delta_pct",
    ])?;
    let mut fig_climate = csv_writer(&dir.join("figure_monthly_climate.csv"))?;
    fig_climate.write_record([
        "city",
        "period",
        "scenario",
        "model",
        "month",
        "dT_C",
        "companion_gcm",
        "baseline_dry_bulb_C",
        "future_dry_bulb_C",
    ])?;
    for o in &report.outputs {
        let (Some(f), Some(base)) = (o.key.future, report.baseline(&o.key.city)) else {
            continue;
        };
        let c = report_changes(&base.annual, &o.annual);
        let mut row = o.key.labels().to_vec();
        for ch in [c.heating, c.cooling] {
            row.extend([
                num(ch.baseline),
                num(ch.future),
                num(ch.delta_kwh),
                opt_num(ch.delta_pct),
            ]);
        }
        changes.write_record(&row)?;
        for (quantity, ch) in [("heating", c.heating), ("cooling", c.cooling)] {
            fig_change.write_record([
                o.key.city.clone(),
                f.scenario.to_string(),
                f.period.to_string(),
                f.class.to_string(),
                quantity.to_string(),
                num(ch.delta_kwh),
                opt_num(ch.delta_pct),
            ])?;
        }
        if let Some(class) = &o.class {
            let base_monthly = &report.baseline_monthly[&o.key.city];
            for (m, shift) in class.months.iter().enumerate() {
                let mut row = o.key.labels().to_vec();
                row.extend([
                    (m + 1).to_string(),
                    num(shift.dt),
                    class.companion_gcm[m].clone(),
                    num(base_monthly[m]),
                    num(o.monthly_dry_bulb[m]),
                ]);
                fig_climate.write_record(&row)?;
            }
        }
    }
    changes.flush()?;
    fig_change.flush()?;
    fig_climate.flush()?;

    let mut cmp = csv_writer(&dir.join("reference_comparison.csv"))?;
    cmp.write_record([
        "city",
        "usage_hours",
        "reference_usage_hours",
        "sensible",
        "reference_sensible",
        "latent",
        "reference_latent",
        "total_kWh",
        "reference_total_kWh",
    ])?;
    for c in cities {
        let Some(base) = report.baseline(&c.name) else { continue };
        let r = &base.annual;
        let reference = reference_cooling(&c.name);
        cmp.write_record([
            c.name.clone(),
            r.usage_hours.to_string(),
            reference
                .map(|x| x.usage_hours.to_string())
                .unwrap_or_else(|| "NA".into()),
            r.sensible_cell(),
            reference.map(|x| x.sensible_cell()).unwrap_or_else(|| "NA".into()),
            r.latent_cell(),
            reference.map(|x| x.latent_cell()).unwrap_or_else(|| "NA".into()),
            format!("{:.0}", r.cooling_total_kwh),
            reference
                .map(|x| format!("{:.0}", x.total))
                .unwrap_or_else(|| "NA".into()),
        ])?;
    }
    cmp.flush()?;

    if report.outputs.iter().any(|o| o.annual.trace.is_some()) {
        let tdir = dir.join("traces");
        fs::create_dir_all(&tdir).map_err(|e| Error::from(e).in_file(&tdir))?;
        for o in &report.outputs {
            write_trace(&tdir.join(format!("{}.csv", o.key.slug())), &o.annual)?;
        }
    }

    write_manifest(cfg, cities, report, config_path)
}

#[derive(Serialize)]
struct ManifestJob {
    city: String,
    period: String,
    scenario: String,
    model: String,
    status: &'static str,
    error: Option<String>,
    saturation_clamps: usize,
    warmup_days: usize,
    max_sensible_residual_w: f64,
    max_moisture_residual_w: f64,
    runtime_s: f64,
}

#[derive(Serialize)]
struct InfiltrationNote {
    city: String,
    volume_m3: f64,
    ach: f64,
    litres_per_second: f64,
    reference_litres_per_second: f64,
}

#[derive(Serialize)]
struct Manifest {
    version: &'static str,
    config_path: Option<String>,
    config_sha256: Option<String>,
    inputs: BTreeMap<String, String>,
    simulations: usize,
    failures: usize,
    attribution: bool,
    attribution_simulations: usize,
    infiltration: Vec<InfiltrationNote>,
    jobs: Vec<ManifestJob>,
    runtime_s: f64,
}

/// Flow the reference study quotes for 0.75 ACH; logged for comparison only.
const REFERENCE_INFILTRATION_LPS: f64 = 9.5;

fn write_manifest(
    cfg: &StudyConfig,
    cities: &[PreparedCity],
    report: &StudyReport,
    config_path: Option<&Path>,
) -> Result<()> {
    let mut inputs = BTreeMap::new();
    for p in cfg.cities.iter().map(|c| &c.weather).chain(&cfg.shift_files) {
        inputs.insert(p.display().to_string(), sha256_file(p)?);
    }
    let mut jobs: Vec<ManifestJob> = report
        .outputs
        .iter()
        .map(|o| {
            let [city, period, scenario, model] = o.key.labels();
            ManifestJob {
                city,
                period,
                scenario,
                model,
                status: "ok",
                error: None,
                saturation_clamps: o.saturation_clamps,
                warmup_days: o.annual.warmup_days,
                max_sensible_residual_w: o.annual.diagnostics.max_sensible_residual_w,
                max_moisture_residual_w: o.annual.diagnostics.max_moisture_residual_w,
                runtime_s: o.runtime_s,
            }
        })
        .collect();
    jobs.extend(report.failures.iter().map(|f| {
        let [city, period, scenario, model] = f.key.labels();
        ManifestJob {
            city,
            period,
            scenario,
            model,
            status: "failed",
            error: Some(f.error.clone()),
            saturation_clamps: 0,
            warmup_days: 0,
            max_sensible_residual_w: 0.0,
            max_moisture_residual_w: 0.0,
            runtime_s: 0.0,
        }
    }));
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config_path: config_path.map(|p| p.display().to_string()),
        config_sha256: config_path.map(sha256_file).transpose()?,
        inputs,
        simulations: report.outputs.len(),
        failures: report.failures.len(),
        attribution: cfg.attribution,
        attribution_simulations: if cfg.attribution { 7 * report.outputs.len() } else { 0 },
        infiltration: cities
            .iter()
            .map(|c| InfiltrationNote {
                city: c.name.clone(),
                volume_m3: c.archetype.volume(),
                ach: c.archetype.infiltration_ach,
                litres_per_second: c.archetype.infiltration_litres_per_second(),
                reference_litres_per_second: REFERENCE_INFILTRATION_LPS,
            })
            .collect(),
        jobs,
        runtime_s: report.runtime_s,
    };
    let path = cfg.output_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    fs::write(&path, text).map_err(|e| Error::from(e).in_file(&path))?;
    Ok(())
}

fn file_slug(name: &str) -> String {
    name.to_ascii_lowercase().replace(' ', "_")
}

/// Writes synthetic weather for the eight demo cities, the six-GCM shift
/// ensemble and a matching `study.toml` into `dir`. Returns the config path.
pub fn write_demo_inputs(dir: &Path, format: WeatherFormat) -> Result<PathBuf> {
    let wdir = dir.join("weather");
    let sdir = dir.join("shifts");
    for d in [&wdir, &sdir] {
        fs::create_dir_all(d).map_err(|e| Error::from(e).in_file(d))?;
    }
    let mut cities = Vec::new();
    for c in &synth::INDIAN_CITIES {
        let rel = PathBuf::from("weather").join(format!("{}.{}", file_slug(c.name), format.extension()));
        write_weather_file(&c.typical_year()?, &dir.join(&rel), format)?;
        cities.push(CityConfig {
            name: c.name.to_string(),
            weather: rel,
            latitude: c.latitude,
            longitude: c.longitude,
            timezone: 5.5,
            wall_azimuths: Some(c.wall_azimuths),
        });
    }
    let mut shift_files = Vec::new();
    for s in Scenario::ALL {
        for p in Period::ALL {
            let rel = PathBuf::from("shifts").join(format!(
                "{}_{}.csv",
                s.to_string().to_ascii_lowercase().replace('.', ""),
                p
            ));
            let path = dir.join(&rel);
            let file = fs::File::create(&path).map_err(|e| Error::from(e).in_file(&path))?;
            write_shift_tables(&synth::demo_shift_tables(s, p), file)?;
            shift_files.push(rel);
        }
    }
    let cfg = StudyConfig {
        cities,
        periods: Period::ALL.to_vec(),
        scenarios: Scenario::ALL.to_vec(),
        model_classes: ClassKind::ALL.to_vec(),
        shift_files,
        idw: Idw::default(),
        archetype: ArchetypeConfig::default(),
        simulation: SimulationSettings::default(),
        output_dir: PathBuf::from("out"),
        workers: 0,
        attribution: true,
        resplit_baseline: true,
    };
    let text = toml::to_string_pretty(&cfg).map_err(|e| Error::Config(format!("demo config: {e}")))?;
    let path = dir.join("study.toml");
    fs::write(&path, text).map_err(|e| Error::from(e).in_file(&path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn change_arithmetic() {
        let c = Change::between(2315.0, 2702.0);
        assert_abs_diff_eq!(c.delta_kwh, 387.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.delta_pct.unwrap(), 16.7171, epsilon = 1e-4);
        let same = Change::between(500.0, 500.0);
        assert_eq!((same.delta_kwh, same.delta_pct), (0.0, Some(0.0)));
        assert_eq!(Change::between(0.0, 12.0).delta_pct, None);
        assert_eq!(opt_num(None), "NA");
    }

    #[test]
    fn job_labels() {
        let k = JobKey {
            city: "New Delhi".into(),
            future: Some(Future {
                period: Period::P2060s,
                scenario: Scenario::Rcp85,
                class: ClassKind::Median,
            }),
        };
        assert_eq!(k.labels(), ["New Delhi", "2060s", "RCP8.5", "median"].map(String::from));
        assert_eq!(k.slug(), "new_delhi_2060s_rcp85_median");
    }
}
