//! The `floodroute` command line.
//!
//! Machine-readable results go to standard output as one line of canonical
//! JSON. Human-readable notes and errors go to standard error. Exit codes:
//! 0 on success, 1 when the domain says no (unreachable, nothing to snap to,
//! unreadable inputs), 2 for usage errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floodroute_core::imagery::{classify_by_color, parse_rules, parse_sidecar, read_ppm, save_class_grid};
use floodroute_core::inundation::{
    connected_inundation, default_seeds, flooded_fraction, mask_to_raster, threshold_inundation,
    DEFAULT_SEED_FRACTION,
};
use floodroute_core::geo::feet_to_meters;
use floodroute_core::lodging::lodging_json;
use floodroute_core::raster::{load_ascii_grid, save_ascii_grid};
use floodroute_core::routing::route_to_geojson;
use floodroute_core::scenario::load_scenario;
use floodroute_core::to_canonical_json;
use floodroute_service::{check_point, plan_lodging, plan_route, Active, LodgingOutcome, RouteOutcome, ServiceState};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "floodroute", version, about = "Flood-aware evacuation routing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flood a DEM at a water level and write the 0/1 mask as an ASCII grid.
    Inundate(InundateArgs),
    /// Classify an RGB image (binary PPM) by color rules into a class grid.
    Classify(ClassifyArgs),
    /// Report which road edges a scenario's fused flood mask blocks.
    Overlay(OverlayArgs),
    /// Shortest passable route between two points of a scenario.
    Route(RouteArgs),
    /// Dry lodging and shelters ranked by route length from a point.
    Lodging(LodgingArgs),
    /// Run the HTTP service with a scenario preloaded.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Threshold,
    Connected,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("level").required(true).args(["level_ft", "level_m"])))]
pub struct InundateArgs {
    /// Elevation grid (ESRI ASCII).
    #[arg(long)]
    pub dem: PathBuf,
    /// Water level in feet.
    #[arg(long)]
    pub level_ft: Option<f64>,
    /// Water level in meters.
    #[arg(long)]
    pub level_m: Option<f64>,
    /// Share of the lowest valid cells used as flood seeds (connected mode).
    #[arg(long, default_value_t = DEFAULT_SEED_FRACTION)]
    pub seeds_fraction: f64,
    /// Flood every low cell, or only low cells connected to the seeds.
    #[arg(long, value_enum, default_value_t = Mode::Connected)]
    pub mode: Mode,
    /// Output mask grid.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Binary PPM image. A sibling `.hdr` file, if present, gives its geometry.
    #[arg(long)]
    pub image: PathBuf,
    /// JSON list of color rules.
    #[arg(long)]
    pub rules: PathBuf,
    /// Output class grid; the legend goes next to it as `<stem>.legend.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    /// Scenario manifest.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output report JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// Scenario manifest.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Origin as LON,LAT.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: [f64; 2],
    /// Destination as LON,LAT.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: [f64; 2],
    /// Edge id to treat as closed; repeatable.
    #[arg(long = "close", value_name = "EDGE_ID")]
    pub close: Vec<String>,
    /// Also write the route as GeoJSON.
    #[arg(long)]
    pub geojson: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LodgingArgs {
    /// Scenario manifest.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Origin as LON,LAT.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: [f64; 2],
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Scenario manifest loaded before listening.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
}

fn parse_point(text: &str) -> Result<[f64; 2], String> {
    let (lon, lat) = text.split_once(',').ok_or("expected LON,LAT")?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    check_point([num(lon)?, num(lat)?])
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

/// What a successful command prints: JSON for stdout, a note for stderr.
pub struct Output {
    pub json: Value,
    pub note: String,
}

pub fn inundate(args: &InundateArgs) -> Result<Output, CliError> {
    let level_m = match (args.level_ft, args.level_m) {
        (Some(ft), None) => feet_to_meters(ft),
        (None, Some(m)) => m,
        _ => return Err(CliError::Usage("give exactly one of --level-ft and --level-m".into())),
    };
    if !level_m.is_finite() {
        return Err(CliError::Usage(format!("water level {level_m} is not finite")));
    }
    let dem = load_ascii_grid(read(&args.dem)?.as_slice()).map_err(domain)?;
    let mask = match args.mode {
        Mode::Threshold => threshold_inundation(&dem, level_m),
        Mode::Connected => {
            let seeds = default_seeds(&dem, args.seeds_fraction).map_err(|e| match e {
                floodroute_core::inundation::InundationError::InvalidFraction(_) => CliError::Usage(e.to_string()),
                other => domain(other),
            })?;
            connected_inundation(&dem, level_m, &seeds).map_err(domain)?
        }
    };
    write_file(&args.out, save_ascii_grid(&mask_to_raster(&mask)).as_bytes())?;
    let fraction = flooded_fraction(&mask);
    Ok(Output {
        json: json!({"flooded_fraction": fraction, "flooded_cells": mask.flooded_count(), "level_m": level_m}),
        note: format!("{} of {} cells flooded at {level_m} m", mask.flooded_count(), mask.geometry().cell_count()),
    })
}

/// `seg.asc` -> `seg.legend.json`.
pub fn legend_path(out: &Path) -> PathBuf {
    out.with_extension("legend.json")
}

pub fn classify(args: &ClassifyArgs) -> Result<Output, CliError> {
    let rules_text = String::from_utf8(read(&args.rules)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let rules = parse_rules(&rules_text).map_err(|e| CliError::Usage(format!("invalid rules: {e}")))?;
    let sidecar = args.image.with_extension("hdr");
    let geometry = match fs::read_to_string(&sidecar) {
        Ok(text) => Some(parse_sidecar(&text).map_err(domain)?),
        Err(_) => None,
    };
    let image = read_ppm(&read(&args.image)?, geometry).map_err(domain)?;
    let grid = classify_by_color(&image, &rules);
    let (text, legend) = save_class_grid(&grid);
    let legend_out = legend_path(&args.out);
    write_file(&args.out, text.as_bytes())?;
    write_file(&legend_out, legend.as_bytes())?;
    let mut counts = serde_json::Map::new();
    for (code, name) in grid.legend() {
        let n = grid.classes().iter().filter(|c| *c == code).count();
        counts.insert(name.clone(), json!(n));
    }
    Ok(Output {
        json: json!({"class_counts": counts, "legend_path": legend_out.display().to_string()}),
        note: format!("classified {} pixels with {} rules", grid.classes().len(), rules.len()),
    })
}

fn active(path: &Path) -> Result<Active, CliError> {
    Ok(Active::new(load_scenario(path).map_err(domain)?))
}

pub fn overlay(args: &OverlayArgs) -> Result<Output, CliError> {
    let a = active(&args.scenario)?;
    let report = a.overlay.report();
    write_file(&args.out, to_canonical_json(&report).as_bytes())?;
    Ok(Output {
        note: format!("{} of {} edges blocked", a.overlay.blocked_count(), a.overlay.blocked.len()),
        json: report["summary"].clone(),
    })
}

pub fn route(args: &RouteArgs) -> Result<Output, CliError> {
    let a = active(&args.scenario)?;
    let closed: BTreeSet<String> = args.close.iter().cloned().collect();
    match plan_route(&a, args.from, args.to, &closed).map_err(domain)? {
        RouteOutcome::Found(route) => {
            if let Some(path) = &args.geojson {
                let text = route_to_geojson(&route, &a.scenario.graph).map_err(domain)?;
                write_file(path, text.as_bytes())?;
            }
            Ok(Output {
                note: format!(
                    "{} -> {}: {} edges, {:.0} m",
                    route.origin(),
                    route.destination(),
                    route.edge_ids.len(),
                    route.total_length_m
                ),
                json: route.summary(),
            })
        }
        RouteOutcome::Unreachable => Err(CliError::Domain("unreachable".into())),
        RouteOutcome::NoNearbyRoad => Err(CliError::Domain("no_nearby_road".into())),
    }
}

pub fn lodging(args: &LodgingArgs) -> Result<Output, CliError> {
    let a = active(&args.scenario)?;
    match plan_lodging(&a, args.from) {
        LodgingOutcome::Ranked(options) => Ok(Output {
            note: format!(
                "{} dry options, {} reachable",
                options.len(),
                options.iter().filter(|o| o.reachable).count()
            ),
            json: lodging_json(&options),
        }),
        LodgingOutcome::NoNearbyRoad => Err(CliError::Domain("no_nearby_road".into())),
    }
}

pub fn serve(args: &ServeArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let state = Arc::new(ServiceState::new());
    let snap = state.load(&args.scenario).map_err(domain)?;
    let runtime = tokio::runtime::Runtime::new().map_err(domain)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .map_err(|e| CliError::Domain(format!("cannot bind {}: {e}", args.listen)))?;
        let addr = listener.local_addr().map_err(domain)?;
        let _ = writeln!(stderr, "serving version {} on http://{addr}", snap.version);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        floodroute_service::http::serve(listener, state, shutdown).await.map_err(domain)
    })
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Inundate(a) => inundate(a),
        Command::Classify(a) => classify(a),
        Command::Overlay(a) => overlay(a),
        Command::Route(a) => route(a),
        Command::Lodging(a) => lodging(a),
        Command::Serve(a) => return serve(a, stderr).map_or_else(|e| report(e, stderr), |()| 0),
    };
    match result {
        Ok(out) => {
            let _ = stdout.write_all(to_canonical_json(&out.json).as_bytes());
            let _ = writeln!(stderr, "{}", out.note);
            0
        }
        Err(e) => report(e, stderr),
    }
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let (CliError::Usage(m) | CliError::Domain(m)) = &e;
    let _ = writeln!(stderr, "error: {m}");
    e.exit_code()
}
