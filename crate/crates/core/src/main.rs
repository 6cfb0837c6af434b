use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roomclim::components::{LoadMode, Ordering, VariantResults};
use roomclim::morph::{build_model_classes, ingest_shift_tables, morph_year, ClassKind, Idw, Period, Scenario};
use roomclim::solar;
use roomclim::study::{
    components_header, components_rows, results_row, run_study, validate_study, write_demo_inputs, JobKey, ModelConfig,
    RunOptions, StudyConfig, RESULTS_HEADER,
};
use roomclim::weather::{read_weather_file, write_weather_file, WeatherFormat, WeatherYear};
use roomclim::zone::{simulate_year_with, RoomArchetype};
use roomclim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "roomclim",
    version,
    about = "Room energy under present and morphed future weather"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a future weather year from a baseline and GCM shift files.
    Morph(MorphArgs),
    /// Simulate one weather year and print annual heating and cooling energy.
    Simulate(SimulateArgs),
    /// Attribute annual energy to walls, windows, infiltration and internal gains.
    Components(ComponentsArgs),
    /// Run the full city × period × scenario × model-class matrix.
    Study(StudyArgs),
    /// Parse and check every input of a study without simulating.
    Validate(ValidateArgs),
    /// Write synthetic demo weather, shift files and a study config.
    DemoData(DemoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Epw,
    Csv,
}

impl From<FormatArg> for WeatherFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Epw => WeatherFormat::Epw,
            FormatArg::Csv => WeatherFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Heating,
    Cooling,
    Both,
}

#[derive(Args)]
struct SiteArgs {
    /// Site latitude, degrees north (defaults to the weather file's).
    #[arg(long, allow_hyphen_values = true)]
    lat: Option<f64>,
    /// Site longitude, degrees east.
    #[arg(long, allow_hyphen_values = true)]
    lon: Option<f64>,
    /// Time zone, hours east of UTC.
    #[arg(long, allow_hyphen_values = true)]
    tz: Option<f64>,
}

#[derive(Args)]
struct MorphArgs {
    #[arg(long)]
    baseline: PathBuf,
    /// Shift files; every table for the chosen scenario and period is used.
    #[arg(long = "shifts", required = true, num_args = 1..)]
    shifts: Vec<PathBuf>,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long, value_parser = parse_period)]
    period: Period,
    /// Model class built from the ensemble.
    #[arg(long, value_parser = parse_class, default_value = "median")]
    class: ClassKind,
    /// Use one GCM's shifts instead of a model class.
    #[arg(long)]
    gcm: Option<String>,
    #[command(flatten)]
    site: SiteArgs,
    #[arg(long, default_value_t = 2.0)]
    idw_power: f64,
    #[arg(long, default_value_t = 4)]
    idw_neighbors: usize,
    /// Output weather file.
    #[arg(long)]
    out: PathBuf,
    /// Output format (defaults to the output file's extension).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    weather: PathBuf,
    /// TOML file with optional [archetype] and [simulation] tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    site: SiteArgs,
    /// Replace the file's beam/diffuse split with the logistic decomposition.
    #[arg(long)]
    resplit: bool,
    /// Write an hourly trace next to the results.
    #[arg(long)]
    trace: bool,
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComponentsArgs {
    #[arg(long)]
    weather: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    site: SiteArgs,
    #[arg(long)]
    resplit: bool,
    /// Element ordering such as `walls>windows>infiltration>internal`; repeatable. All six by default.
    #[arg(long)]
    ordering: Vec<String>,
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Study config to check.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Individual weather files to check.
    #[arg(long)]
    weather: Vec<PathBuf>,
    /// Individual shift files to check.
    #[arg(long)]
    shifts: Vec<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "epw")]
    format: FormatArg,
}

fn parse_scenario(s: &str) -> Result<Scenario> {
    s.parse()
}

fn parse_period(s: &str) -> Result<Period> {
    s.parse()
}

fn parse_class(s: &str) -> Result<ClassKind> {
    s.parse()
}

fn load_weather(path: &Path, site: &SiteArgs, resplit: bool) -> Result<WeatherYear> {
    let mut year = read_weather_file(path)?;
    let mut loc = year.location.clone();
    if let Some(v) = site.lat {
        loc.latitude = v;
    }
    if let Some(v) = site.lon {
        loc.longitude = v;
    }
    if let Some(v) = site.tz {
        loc.timezone = v;
    }
    year = year.with_location(loc);
    if resplit {
        year = solar::resplit_year(&year)?;
    }
    Ok(year)
}

fn load_model(config: Option<&Path>) -> Result<(RoomArchetype, ModelConfig)> {
    let cfg = match config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::default(),
    };
    Ok((cfg.archetype.build()?, cfg))
}

fn label_for(year: &WeatherYear) -> JobKey {
    JobKey {
        city: year.location.name.clone(),
        future: None,
    }
}

fn csv_out(out: Option<&Path>, name: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
            let path = dir.join(name);
            Box::new(std::fs::File::create(&path).map_err(|e| Error::from(e).in_file(&path))?)
        }
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn cmd_morph(a: MorphArgs) -> Result<ExitCode> {
    let baseline = load_weather(&a.baseline, &a.site, false)?;
    let (lat, lon) = (baseline.location.latitude, baseline.location.longitude);
    let idw = Idw {
        power: a.idw_power,
        neighbors: a.idw_neighbors,
    };
    let mut ensemble = Vec::new();
    for path in &a.shifts {
        let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        for t in ingest_shift_tables(file).map_err(|e| e.in_file(path))? {
            if t.scenario == a.scenario && t.period == a.period {
                ensemble.push(t.localize(lat, lon, &idw)?);
            }
        }
    }
    let months = match &a.gcm {
        Some(id) => {
            ensemble
                .iter()
                .find(|g| &g.gcm_id == id)
                .ok_or_else(|| Error::Config(format!("no {} {} table for GCM {id}", a.scenario, a.period)))?
                .months
        }
        None => build_model_classes(&ensemble)?.get(a.class).months,
    };
    let outcome = morph_year(&baseline, &months)?;
    let format = a
        .format
        .map(WeatherFormat::from)
        .unwrap_or_else(|| WeatherFormat::from_path(&a.out));
    write_weather_file(&outcome.year, &a.out, format)?;
    eprintln!(
        "wrote {} ({} hours clamped to saturation)",
        a.out.display(),
        outcome.saturation_clamps
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let (archetype, mut cfg) = load_model(a.config.as_deref())?;
    cfg.simulation.trace |= a.trace;
    let year = load_weather(&a.weather, &a.site, a.resplit)?;
    let r = simulate_year_with(&archetype, &year, &cfg.simulation)?;
    let mut w = csv_out(a.out.as_deref(), "results.csv")?;
    w.write_record(RESULTS_HEADER)?;
    w.write_record(results_row(&label_for(&year), &r))?;
    w.flush()?;
    if let Some(trace) = &r.trace {
        let mut t = csv_out(a.out.as_deref(), "trace.csv")?;
        for h in trace {
            t.serialize(h)?;
        }
        t.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_components(a: ComponentsArgs) -> Result<ExitCode> {
    let (archetype, cfg) = load_model(a.config.as_deref())?;
    let orderings: Vec<Ordering> = if a.ordering.is_empty() {
        Ordering::ALL.to_vec()
    } else {
        a.ordering.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let modes = match a.mode {
        ModeArg::Heating => vec![LoadMode::Heating],
        ModeArg::Cooling => vec![LoadMode::Cooling],
        ModeArg::Both => LoadMode::ALL.to_vec(),
    };
    let year = load_weather(&a.weather, &a.site, a.resplit)?;
    let variants = VariantResults::compute(&archetype, &year, &cfg.simulation)?;
    let labels = label_for(&year);
    let labels = [labels.city, "baseline".into(), "baseline".into(), "baseline".into()];
    let mut w = csv_out(a.out.as_deref(), "components.csv")?;
    w.write_record(components_header())?;
    for mode in modes {
        let mut sweep = variants.all_orderings(mode);
        sweep.breakdowns.retain(|b| orderings.contains(&b.ordering));
        for row in components_rows(&labels, &sweep) {
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_study(a: StudyArgs) -> Result<ExitCode> {
    let mut cfg = StudyConfig::load(&a.config)?;
    if let Some(out) = a.out {
        cfg.output_dir = out;
    }
    let report = run_study(
        &cfg,
        RunOptions {
            workers: a.workers,
            trace: a.trace,
        },
        Some(&a.config),
    )?;
    eprintln!(
        "{} simulations in {:.1} s, {} failed; outputs in {}",
        report.outputs.len(),
        report.runtime_s,
        report.failures.len(),
        report.output_dir.display()
    );
    for f in &report.failures {
        eprintln!("failed: {:?}: {}", f.key, f.error);
    }
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    if a.config.is_none() && a.weather.is_empty() && a.shifts.is_empty() {
        return Err(Error::Config(
            "nothing to validate; pass --config, --weather or --shifts".into(),
        ));
    }
    if let Some(path) = &a.config {
        let cfg = StudyConfig::load(path)?;
        validate_study(&cfg)?;
        eprintln!(
            "{}: ok ({} simulations planned)",
            path.display(),
            cfg.simulation_count()
        );
    }
    for path in &a.weather {
        read_weather_file(path)?;
        eprintln!("{}: ok", path.display());
    }
    for path in &a.shifts {
        let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        let tables = ingest_shift_tables(file).map_err(|e| e.in_file(path))?;
        eprintln!("{}: ok ({} tables)", path.display(), tables.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_demo(a: DemoArgs) -> Result<ExitCode> {
    let path = write_demo_inputs(&a.out, a.format.into())?;
    eprintln!("wrote demo inputs; run: roomclim study --config {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Morph(a) => cmd_morph(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Components(a) => cmd_components(a),
        Command::Study(a) => cmd_study(a),
        Command::Validate(a) => cmd_validate(a),
        Command::DemoData(a) => cmd_demo(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
