//! Command-line front end. Exit codes: 0 ok, 1 grammar rejection, 2 bad
//! configuration or input, 3 simulation failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data;
use crate::dynamics::{
    cxc_units, simulate, simulate_driven, to_jsonl, BallSpec, BallState, DriveSpec, SimOptions, Trajectory,
    DEFAULT_EPS_GRAZE,
};
use crate::geometry::{SideLabel, Table, Vec2};
use crate::grammar::GrammarError;
use crate::orbits::{fagnano_on_sides, fagnano_orbit, find_periodic, Anchor, OrbitTolerance, SearchGrid};
use crate::phonetics::{format_phones, parse_phones};
use crate::render::{svg, SvgStyle};
use crate::stability::{assess, log_ladder, StabilityReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GRAMMAR: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "oral-billiards", version, about = "Polygonal billiards in the oral cavity")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG drawings (needs --out).
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true)]
    pub max_events: Option<usize>,
    /// Corner tolerance in cm.
    #[arg(long, global = true)]
    pub eps_corner: Option<f64>,
    /// Jaw hinge angle in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jaw_hinge: Option<f64>,
    #[arg(long, global = true)]
    pub velum_closed: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one trajectory and write its event log, word and CXC units.
    Simulate,
    /// Search for periodic orbits.
    Orbits,
    /// Stability radii of the configured launch, or of every orbit found.
    Stability,
    /// Validate, generate or syllabify phone sequences.
    Grammar {
        #[command(subcommand)]
        action: GrammarAction,
    },
    /// Draw the table, with the trajectory if an initial condition is given.
    Render,
}

#[derive(Subcommand, Debug)]
pub enum GrammarAction {
    /// Parse whitespace-separated symbol/M tokens.
    Validate { phones: Vec<String> },
    /// Mark each token as onset, syllabic, coda or boundary.
    Syllabify { phones: Vec<String> },
    /// Random admissible sequence.
    Generate {
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

/// Exactly one initial-condition form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitSpec {
    Side(SideInit),
    Point(PointInit),
    Fagnano(FagnanoInit),
}

/// Arc length `s` (cm) along a labelled side, angle from the side's tangent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideInit {
    pub side: String,
    pub s: f64,
    pub angle: f64,
}

/// Absolute position, heading angle from the x axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointInit {
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

/// The orthic orbit on three named sides; all of a triangle when empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FagnanoInit {
    pub fagnano: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub vertices: Vec<Vec2>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    #[serde(default = "default_period_max")]
    pub period_max: usize,
    #[serde(default)]
    pub grid: SearchGrid,
    #[serde(default)]
    pub tolerance: OrbitTolerance,
}

fn default_period_max() -> usize {
    8
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            period_max: default_period_max(),
            grid: SearchGrid::default(),
            tolerance: OrbitTolerance::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySpec {
    /// Prefix length; one period (or 8 for a plain launch) when absent.
    #[serde(default)]
    pub k: Option<usize>,
    pub samples: usize,
    pub ladder_lo: f64,
    pub ladder_hi: f64,
    pub ladder_steps: usize,
}

impl Default for StabilitySpec {
    fn default() -> Self {
        Self {
            k: None,
            samples: 32,
            ladder_lo: 1e-8,
            ladder_hi: 0.3,
            ladder_steps: 30,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Oral polygon file; the reference polygon when absent.
    #[serde(default)]
    pub polygon: Option<PathBuf>,
    /// Jaw-line length in cm for the oral polygon.
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub jaw_drop: Option<f64>,
    #[serde(default)]
    pub jaw_hinge: Option<f64>,
    #[serde(default)]
    pub velum_hinge: Option<f64>,
    #[serde(default)]
    pub velum_closed: Option<bool>,
    /// A plain convex table instead of the oral polygon.
    #[serde(default)]
    pub table: Option<TableSpec>,
    #[serde(default)]
    pub init: Option<InitSpec>,
    #[serde(default)]
    pub speed: Option<f64>,
    #[serde(default)]
    pub ball: BallSpec,
    #[serde(default)]
    pub drive: Option<DriveSpec>,
    #[serde(default)]
    pub max_events: Option<usize>,
    #[serde(default)]
    pub eps_corner: Option<f64>,
    #[serde(default)]
    pub eps_graze: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub stability: StabilitySpec,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Simulation(String),
    Grammar(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Simulation(_) => EXIT_SIMULATION,
            Failure::Grammar(_) => EXIT_GRAMMAR,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Simulation(m) | Failure::Grammar(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn sim_err(e: impl std::fmt::Display) -> Failure {
    Failure::Simulation(e.to_string())
}

/// Configuration after command-line overrides.
struct Resolved {
    cfg: RunConfig,
    table: Table,
    opts: SimOptions,
    seed: u64,
}

fn resolve(cli: &Cli) -> Result<Resolved, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            let mut cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            // Relative polygon paths are taken from the config's directory.
            if let (Some(p), Some(dir)) = (&cfg.polygon, path.parent()) {
                if p.is_relative() {
                    cfg.polygon = Some(dir.join(p));
                }
            }
            cfg
        }
        None => RunConfig::default(),
    };
    if let Some(v) = cli.max_events {
        cfg.max_events = Some(v);
    }
    if let Some(v) = cli.eps_corner {
        cfg.eps_corner = Some(v);
    }
    if let Some(v) = cli.jaw_hinge {
        cfg.jaw_hinge = Some(v);
    }
    if cli.velum_closed {
        cfg.velum_closed = Some(true);
    }
    if let Some(v) = cli.seed {
        cfg.seed = Some(v);
    }
    if let Some(e) = cfg.eps_corner {
        if !(e.is_finite() && e > 0.0) {
            return Err(config_err(format!("eps_corner must be positive, got {e}")));
        }
    }
    let eps_graze = cfg.eps_graze.unwrap_or(DEFAULT_EPS_GRAZE);
    if !(eps_graze.is_finite() && eps_graze > 0.0) {
        return Err(config_err(format!("eps_graze must be positive, got {eps_graze}")));
    }
    let table = build_table(&cfg)?;
    let opts = SimOptions {
        max_events: cfg.max_events.unwrap_or(1000),
        eps_corner: cfg.eps_corner,
        eps_graze,
    };
    let seed = cfg.seed.unwrap_or(0);
    Ok(Resolved { cfg, table, opts, seed })
}

fn build_table(cfg: &RunConfig) -> Result<Table, Failure> {
    let articulated = cfg.jaw_drop.is_some()
        || cfg.jaw_hinge.is_some()
        || cfg.velum_hinge.is_some()
        || cfg.velum_closed.is_some()
        || cfg.scale.is_some()
        || cfg.polygon.is_some();
    if let Some(t) = &cfg.table {
        if articulated {
            return Err(config_err("articulator and polygon settings apply to the oral polygon, not to `table`"));
        }
        return Table::new(t.vertices.clone(), t.labels.clone()).map_err(config_err);
    }
    let mut pc = match &cfg.polygon {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            crate::geometry::PolygonConfig::from_json(&text).map_err(config_err)?
        }
        None => data::load_polygon_config().map_err(config_err)?,
    };
    if let Some(v) = cfg.scale {
        pc.scale = Some(v);
    }
    if let Some(v) = cfg.jaw_drop {
        pc.jaw_drop = v;
    }
    if let Some(v) = cfg.jaw_hinge {
        pc.jaw_hinge = v;
    }
    if let Some(v) = cfg.velum_hinge {
        pc.velum_hinge = v;
    }
    if let Some(v) = cfg.velum_closed {
        pc.velum_closed = v;
    }
    let poly = crate::geometry::OralPolygon::from_config(&pc).map_err(config_err)?;
    Ok(poly.table().clone())
}

fn side_index(table: &Table, name: &str) -> Result<usize, Failure> {
    if let Some(i) = (0..table.sides()).find(|&i| table.label(i) == name) {
        return Ok(i);
    }
    // Accept aliases of the oral labels.
    if let Ok(l) = name.parse::<SideLabel>() {
        if let Some(i) = (0..table.sides()).find(|&i| table.label(i) == l.symbol()) {
            return Ok(i);
        }
    }
    Err(config_err(format!("no side labelled {name:?}")))
}

fn initial_state(r: &Resolved) -> Result<Option<BallState>, Failure> {
    let speed = r.cfg.speed.unwrap_or(1.0);
    if !(speed.is_finite() && speed > 0.0) {
        return Err(config_err(format!("speed must be positive, got {speed}")));
    }
    let Some(init) = &r.cfg.init else {
        return Ok(None);
    };
    Ok(Some(match init {
        InitSpec::Side(SideInit { side, s, angle }) => {
            let i = side_index(&r.table, side)?;
            let len = r.table.polygon().side_length(i);
            if !(*s >= 0.0 && *s <= len) {
                return Err(config_err(format!("s = {s} is off side {side} (length {len})")));
            }
            BallState::on_side(&r.table, i, *s, *angle, speed)
        }
        InitSpec::Point(PointInit { x, y, angle }) => BallState::new(Vec2::new(*x, *y), Vec2::from_angle(*angle), speed),
        InitSpec::Fagnano(FagnanoInit { fagnano }) => {
            let orbit = if fagnano.is_empty() {
                fagnano_orbit(&r.table)
            } else if fagnano.len() == 3 {
                let s = [
                    side_index(&r.table, &fagnano[0])?,
                    side_index(&r.table, &fagnano[1])?,
                    side_index(&r.table, &fagnano[2])?,
                ];
                fagnano_on_sides(&r.table, s)
            } else {
                return Err(config_err("fagnano takes three side labels or none"));
            }
            .map_err(config_err)?;
            let mut st = orbit.launch();
            st.speed = speed;
            st
        }
    }))
}

fn run_trajectory(r: &Resolved, init: BallState) -> Result<Trajectory, Failure> {
    match &r.cfg.drive {
        Some(d) => simulate_driven(&r.table, init, &r.cfg.ball, d, &r.opts, r.seed),
        None => simulate(&r.table, init, &r.cfg.ball, &r.opts),
    }
    .map_err(sim_err)
}

fn emit(cli: &Cli, outputs: &[(String, String)], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| config_err(format!("{}: {e}", dir.display())))?;
            for (name, body) in outputs {
                write_file(&dir.join(name), body)?;
            }
            Ok(())
        }
        None => {
            for (name, body) in outputs {
                if name.ends_with(".svg") {
                    continue;
                }
                stdout.write_all(body.as_bytes()).map_err(config_err)?;
            }
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_simulate(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let r = resolve(cli)?;
    let init = initial_state(&r)?.ok_or_else(|| config_err("simulate needs `init` in the config"))?;
    let t = run_trajectory(&r, init)?;
    let mut out: Vec<(String, String)> = vec![("events.jsonl".into(), to_jsonl(&t))];
    let mut word = t.word().join(" ");
    word.push('\n');
    out.push(("word.txt".into(), word));
    let units = if t.events.len() >= 2 { cxc_units(&t).map_err(sim_err)? } else { Vec::new() };
    out.push(("cxc.json".into(), json(&units)));
    if cli.svg {
        out.push(("trajectory.svg".into(), svg(&r.table, &[trajectory_points(&t)], &SvgStyle::default())));
    }
    emit(cli, &out, stdout)
}

fn trajectory_points(t: &Trajectory) -> Vec<Vec2> {
    let mut p = vec![t.initial.position];
    p.extend(t.path());
    p
}

fn cmd_orbits(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let r = resolve(cli)?;
    let s = &r.cfg.search;
    let found = find_periodic(&r.table, &s.grid, s.period_max, &s.tolerance);
    let records: Vec<_> = found.iter().map(|o| o.to_record()).collect();
    let mut out = vec![("orbits.json".to_string(), json(&records))];
    if cli.svg {
        for (i, o) in found.iter().enumerate() {
            let t = o.simulate_periods(1).map_err(sim_err)?;
            out.push((format!("orbit_{i:03}.svg"), svg(&r.table, &[trajectory_points(&t)], &SvgStyle::default())));
        }
    }
    emit(cli, &out, stdout)
}

fn cmd_stability(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let r = resolve(cli)?;
    let st = &r.cfg.stability;
    if st.samples == 0 || st.ladder_steps == 0 {
        return Err(config_err("stability needs samples > 0 and ladder_steps > 0"));
    }
    let ladder = log_ladder(st.ladder_lo, st.ladder_hi, st.ladder_steps);
    let mut targets: Vec<(Anchor, usize)> = Vec::new();
    match initial_state(&r)? {
        Some(init) => {
            let (side, s, angle) = boundary_phase(&r, init)?;
            targets.push((Anchor { side, s, angle }, st.k.unwrap_or(8)));
        }
        None => {
            let s = &r.cfg.search;
            for o in find_periodic(&r.table, &s.grid, s.period_max, &s.tolerance) {
                targets.push((o.anchor, st.k.unwrap_or(o.period)));
            }
        }
    }
    let mut reports: Vec<StabilityReport> = Vec::new();
    for (anchor, k) in &targets {
        reports.push(assess(&r.table, anchor, *k, &ladder, st.samples, r.seed).map_err(sim_err)?);
    }
    let mut csv = String::from("id,kind,delta,pass_rate\n");
    for rep in &reports {
        for line in rep.to_csv().lines().skip(1) {
            csv.push_str(&format!("{},{line}\n", rep.id));
        }
    }
    emit(cli, &[("stability.json".into(), json(&reports)), ("stability.csv".into(), csv)], stdout)
}

/// A launch expressed on the boundary: the first collision point and the
/// outgoing angle there.
fn boundary_phase(r: &Resolved, init: BallState) -> Result<(usize, f64, f64), Failure> {
    let poly = r.table.polygon();
    for side in 0..r.table.sides() {
        let a = poly.vertices()[side];
        let t = poly.tangent(side);
        let off = (init.position - a).dot(poly.inward_normal(side));
        let s = (init.position - a).dot(t);
        if off.abs() <= 1e-12 * r.table.diameter() && s >= 0.0 && s <= poly.side_length(side) {
            let d = init.direction;
            return Ok((side, s, d.dot(poly.inward_normal(side)).atan2(d.dot(t))));
        }
    }
    let mut opts = r.opts;
    opts.max_events = 1;
    let t = simulate(&r.table, init, &BallSpec::point(), &opts).map_err(sim_err)?;
    let e = t.events.first().ok_or_else(|| sim_err("launch reaches a corner before any collision"))?;
    Ok((e.side, e.s, e.angle(&r.table)))
}

fn cmd_render(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let r = resolve(cli)?;
    let paths = match initial_state(&r)? {
        Some(init) => vec![trajectory_points(&run_trajectory(&r, init)?)],
        None => Vec::new(),
    };
    let body = svg(&r.table, &paths, &SvgStyle::default());
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| config_err(format!("{}: {e}", dir.display())))?;
            write_file(&dir.join("render.svg"), &body)
        }
        None => stdout.write_all(body.as_bytes()).map_err(config_err),
    }
}

fn grammar_failure(e: GrammarError) -> Failure {
    match e {
        GrammarError::Phonetics(_) => Failure::Config(e.to_string()),
        other => Failure::Grammar(other.to_string()),
    }
}

fn cmd_grammar(cli: &Cli, action: &GrammarAction, stdout: &mut dyn Write) -> Result<(), Failure> {
    let inventory = data::load_inventory().map_err(config_err)?;
    let grammar = data::load_grammar().map_err(config_err)?;
    let seed = match &cli.config {
        Some(_) => resolve(cli)?.seed,
        None => cli.seed.unwrap_or(0),
    };
    let body = match action {
        GrammarAction::Validate { phones } | GrammarAction::Syllabify { phones } => {
            let text = phones.join(" ");
            let tokens = parse_phones(&text, &inventory).map_err(config_err)?;
            if let GrammarAction::Validate { .. } = action {
                json(&grammar.validate(&tokens).map_err(grammar_failure)?)
            } else {
                json(&grammar.syllabify(&tokens).map_err(grammar_failure)?)
            }
        }
        GrammarAction::Generate { count } => {
            let mut s = format_phones(&grammar.generate(seed, *count, &inventory));
            s.push('\n');
            s
        }
    };
    let name = match action {
        GrammarAction::Validate { .. } => "parse.json",
        GrammarAction::Syllabify { .. } => "roles.json",
        GrammarAction::Generate { .. } => "phones.txt",
    };
    emit(cli, &[(name.to_string(), body)], stdout)
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate => cmd_simulate(&cli, stdout),
        Command::Orbits => cmd_orbits(&cli, stdout),
        Command::Stability => cmd_stability(&cli, stdout),
        Command::Render => cmd_render(&cli, stdout),
        Command::Grammar { action } => cmd_grammar(&cli, action, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}
