//! Event-driven billiard flow on a labelled convex table.
//!
//! A flight is a straight segment between two boundary events. Each event is
//! either a specular collision with a side or a corner hit, which is where
//! the billiard map is undefined and the run ends.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{erode, GeometryError, Table, Vec2};

/// Label of the jaw line; collisions against it are the vowel slots.
pub const JAW: &str = "ʔ";

pub const DEFAULT_EPS_CORNER_REL: f64 = 1e-6;
pub const DEFAULT_EPS_GRAZE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("ray from ({x}, {y}) found no boundary intersection after event {after}")]
    Escape { after: usize, x: f64, y: f64 },
    #[error("invalid initial state: {0}")]
    InvalidInit(String),
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
    #[error("ball radius {radius} at event {index}: {source}")]
    Radius {
        index: usize,
        radius: f64,
        source: GeometryError,
    },
    #[error("ball centre left the table after radius change at event {index}")]
    RadiusReposition { index: usize },
    #[error("at least two collisions are needed for a CXC unit, got {0}")]
    TooFewEvents(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallState {
    pub position: Vec2,
    pub direction: Vec2,
    pub speed: f64,
}

impl BallState {
    pub fn new(position: Vec2, direction: Vec2, speed: f64) -> Self {
        Self {
            position,
            direction,
            speed,
        }
    }

    /// Launch from arc length `s` on `side`, at `angle` (0..π) measured from
    /// the side's tangent towards the interior.
    pub fn on_side(table: &Table, side: usize, s: f64, angle: f64, speed: f64) -> Self {
        let poly = table.polygon();
        let t = poly.tangent(side);
        let n = poly.inward_normal(side);
        Self {
            position: poly.point_on_side(side, s),
            direction: t * angle.cos() + n * angle.sin(),
            speed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    #[serde(default)]
    pub radius: f64,
    /// Radius to switch to right after the collision with this index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub radius_schedule: BTreeMap<usize, f64>,
}

impl BallSpec {
    pub fn point() -> Self {
        Self::default()
    }

    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    pub max_events: usize,
    /// Absolute corner tolerance in cm; `None` means 1e-6 × table diameter.
    pub eps_corner: Option<f64>,
    pub eps_graze: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_events: 1000,
            eps_corner: None,
            eps_graze: DEFAULT_EPS_GRAZE,
        }
    }
}

impl SimOptions {
    pub fn with_max_events(max_events: usize) -> Self {
        Self {
            max_events,
            ..Self::default()
        }
    }

    pub fn corner_tolerance(&self, table: &Table) -> f64 {
        self.eps_corner
            .unwrap_or_else(|| DEFAULT_EPS_CORNER_REL * table.diameter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub restitution: f64,
    #[serde(default)]
    pub reforce_speed: Option<f64>,
    #[serde(default)]
    pub direction_jitter: f64,
    #[serde(default)]
    pub speed_floor: f64,
}

impl DriveSpec {
    pub fn conservative() -> Self {
        Self {
            restitution: 1.0,
            reforce_speed: None,
            direction_jitter: 0.0,
            speed_floor: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.restitution > 0.0 && self.restitution <= 1.0) {
            return Err(SimError::InvalidDrive(format!(
                "restitution must lie in (0, 1], got {}",
                self.restitution
            )));
        }
        if let Some(v) = self.reforce_speed {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::InvalidDrive(format!("reforce speed {v}")));
            }
        }
        if !(self.direction_jitter.is_finite() && self.direction_jitter >= 0.0) {
            return Err(SimError::InvalidDrive(format!(
                "jitter {}",
                self.direction_jitter
            )));
        }
        if !(self.speed_floor.is_finite() && self.speed_floor >= 0.0) {
            return Err(SimError::InvalidDrive(format!("floor {}", self.speed_floor)));
        }
        Ok(())
    }

    /// Outgoing speed for a given incoming speed.
    pub fn speed_out(&self, speed_in: f64) -> f64 {
        let damped = self.restitution * speed_in;
        match self.reforce_speed {
            Some(target) => target.min(damped),
            None => damped,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionEvent {
    pub index: usize,
    pub side: usize,
    pub label: String,
    /// Arc length from the side's start vertex.
    pub s: f64,
    pub point: Vec2,
    pub incoming: Vec2,
    pub outgoing: Vec2,
    pub speed_in: f64,
    pub speed_out: f64,
    pub flight_length: f64,
    /// Time since launch.
    pub time: f64,
    pub grazing: bool,
}

impl CollisionEvent {
    /// Outgoing angle from the side tangent, in (0, π).
    pub fn angle(&self, table: &Table) -> f64 {
        let poly = table.polygon();
        let t = poly.tangent(self.side);
        let n = poly.inward_normal(self.side);
        self.outgoing.dot(n).atan2(self.outgoing.dot(t))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CornerHit {
    pub vertex: usize,
    /// Labels of the sides before and after the vertex.
    pub sides: (String, String),
    /// Name of the corner itself, if it has one (ϕ).
    pub name: Option<String>,
    pub point: Vec2,
    /// Arc-length distance from the hit point to the vertex.
    pub distance: f64,
    pub flight_length: f64,
}

impl CornerHit {
    pub fn symbol(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{}|{}", self.sides.0, self.sides.1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    MaxEvents,
    CornerHit(CornerHit),
    EnergyFloor { speed: f64 },
}

impl Termination {
    pub fn is_corner(&self) -> bool {
        matches!(self, Termination::CornerHit(_))
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::MaxEvents => f.write_str("max_events"),
            Termination::CornerHit(c) => write!(f, "corner_hit({})", c.symbol()),
            Termination::EnergyFloor { speed } => write!(f, "energy_floor({speed})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub table: Table,
    pub initial: BallState,
    pub events: Vec<CollisionEvent>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn word(&self) -> Vec<String> {
        symbol_word(self)
    }

    /// Contact points in order, starting with the launch position.
    pub fn path(&self) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(self.events.len() + 2);
        pts.push(self.initial.position);
        pts.extend(self.events.iter().map(|e| e.point));
        if let Termination::CornerHit(c) = &self.termination {
            pts.push(c.point);
        }
        pts
    }
}

/// Specular reflection of `d` in a side with inward unit normal `n`.
pub fn reflect(d: Vec2, n: Vec2) -> Vec2 {
    (d - n * (2.0 * d.dot(n))).normalized()
}

pub fn is_grazing(d: Vec2, n: Vec2, eps_graze: f64) -> bool {
    d.dot(n).abs() < eps_graze
}

#[derive(Clone, Debug, PartialEq)]
pub enum Advance {
    Collision(CollisionEvent),
    Corner(CornerHit),
}

/// Fly from `state` to the first boundary point. The returned event has
/// `index` 0 and `time` equal to the flight time; callers renumber.
pub fn advance(
    state: &BallState,
    table: &Table,
    eps_corner: f64,
    eps_graze: f64,
) -> Result<Advance, SimError> {
    let poly = table.polygon();
    let p = state.position;
    let d = state.direction;
    let mut best: Option<(f64, usize)> = None;
    for i in 0..poly.len() {
        let n = poly.inward_normal(i);
        let approach = d.dot(n);
        if approach >= 0.0 {
            continue;
        }
        let t = poly.side_distance(i, p).max(0.0) / -approach;
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, i));
        }
    }
    let escape = || SimError::Escape {
        after: 0,
        x: p.x,
        y: p.y,
    };
    let (t, side) = best.ok_or_else(escape)?;
    if !t.is_finite() {
        return Err(escape());
    }
    let (a, _) = poly.side(side);
    let len = poly.side_length(side);
    let tangent = poly.tangent(side);
    let raw = p + d * t;
    let s = (raw - a).dot(tangent).clamp(0.0, len);
    let point = a + tangent * s;
    let corner = if s < eps_corner {
        Some((side, s))
    } else if len - s < eps_corner {
        Some(((side + 1) % poly.len(), len - s))
    } else {
        None
    };
    if let Some((vertex, distance)) = corner {
        let n = poly.len();
        return Ok(Advance::Corner(CornerHit {
            vertex,
            sides: (
                table.label((vertex + n - 1) % n).to_string(),
                table.label(vertex).to_string(),
            ),
            name: table.corner_label(vertex).map(str::to_string),
            point,
            distance,
            flight_length: t,
        }));
    }
    let normal = poly.inward_normal(side);
    Ok(Advance::Collision(CollisionEvent {
        index: 0,
        side,
        label: table.label(side).to_string(),
        s,
        point,
        incoming: d,
        outgoing: reflect(d, normal),
        speed_in: state.speed,
        speed_out: state.speed,
        flight_length: t,
        time: t / state.speed,
        grazing: is_grazing(d, normal, eps_graze),
    }))
}

fn check_init(init: &BallState, table: &Table) -> Result<BallState, SimError> {
    if !(init.speed.is_finite() && init.speed > 0.0) {
        return Err(SimError::InvalidInit(format!("speed {}", init.speed)));
    }
    let n = init.direction.norm();
    if !(n.is_finite() && n > 0.0) || !init.position.is_finite() {
        return Err(SimError::InvalidInit("non-finite or zero direction".into()));
    }
    let margin = 1e-9 * table.diameter();
    if !table.polygon().contains(init.position, margin) {
        return Err(SimError::InvalidInit(format!(
            "start ({}, {}) lies outside the table",
            init.position.x, init.position.y
        )));
    }
    let mut s = *init;
    s.direction = init.direction.normalized();
    Ok(s)
}

/// Conservative billiard run.
pub fn simulate(
    table: &Table,
    init: BallState,
    ball: &BallSpec,
    opts: &SimOptions,
) -> Result<Trajectory, SimError> {
    run(table, init, ball, opts, None)
}

/// Run with restitution, optional reforcing and angular jitter.
pub fn simulate_driven(
    table: &Table,
    init: BallState,
    ball: &BallSpec,
    drive: &DriveSpec,
    opts: &SimOptions,
    seed: u64,
) -> Result<Trajectory, SimError> {
    drive.validate()?;
    run(table, init, ball, opts, Some((drive, ChaCha8Rng::seed_from_u64(seed))))
}

fn eroded(table: &Table, radius: f64, index: usize) -> Result<Table, SimError> {
    erode(table, radius).map_err(|source| SimError::Radius {
        index,
        radius,
        source,
    })
}

fn run(
    table: &Table,
    init: BallState,
    ball: &BallSpec,
    opts: &SimOptions,
    mut drive: Option<(&DriveSpec, ChaCha8Rng)>,
) -> Result<Trajectory, SimError> {
    let eps_corner = opts.corner_tolerance(table);
    let mut radius = ball.radius;
    let mut arena = eroded(table, radius, 0)?;
    let initial = check_init(&init, &arena)?;
    let mut state = initial;
    let mut events = Vec::new();
    let mut time = 0.0;
    let termination = loop {
        if events.len() >= opts.max_events {
            break Termination::MaxEvents;
        }
        let index = events.len();
        match advance(&state, &arena, eps_corner, opts.eps_graze).map_err(|e| match e {
            SimError::Escape { x, y, .. } => SimError::Escape { after: index, x, y },
            other => other,
        })? {
            Advance::Corner(c) => break Termination::CornerHit(c),
            Advance::Collision(mut ev) => {
                ev.index = index;
                time += ev.time;
                ev.time = time;
                if let Some((dr, rng)) = drive.as_mut() {
                    ev.speed_out = dr.speed_out(ev.speed_in);
                    if dr.direction_jitter > 0.0 {
                        let j = dr.direction_jitter;
                        let turn: f64 = rng.random_range(-j..=j);
                        let jittered = ev.outgoing.rotated(turn);
                        if jittered.dot(arena.polygon().inward_normal(ev.side)) > 0.0 {
                            ev.outgoing = jittered;
                        }
                    }
                }
                state = BallState {
                    position: ev.point,
                    direction: ev.outgoing,
                    speed: ev.speed_out,
                };
                let floor_hit = drive
                    .as_ref()
                    .is_some_and(|(dr, _)| ev.speed_out < dr.speed_floor);
                let speed_out = ev.speed_out;
                if let Some(&r) = ball.radius_schedule.get(&index) {
                    if r != radius {
                        let n = arena.polygon().inward_normal(ev.side);
                        state.position = ev.point + n * (r - radius);
                        radius = r;
                        arena = eroded(table, radius, index)?;
                        let margin = 1e-9 * table.diameter();
                        if !arena.polygon().contains(state.position, margin) {
                            return Err(SimError::RadiusReposition { index });
                        }
                    }
                }
                events.push(ev);
                if floor_hit {
                    break Termination::EnergyFloor { speed: speed_out };
                }
            }
        }
    };
    Ok(Trajectory {
        table: table.clone(),
        initial,
        events,
        termination,
    })
}

/// Side labels of all collisions, followed by the corner symbol if the run
/// ended in a corner.
pub fn symbol_word(t: &Trajectory) -> Vec<String> {
    let mut w: Vec<String> = t.events.iter().map(|e| e.label.clone()).collect();
    if let Termination::CornerHit(c) = &t.termination {
        w.push(c.symbol());
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CxcKind {
    /// C[ʔ]: consonant collision then jaw.
    ConsonantVowel,
    /// [ʔ]C.
    VowelConsonant,
    ConsonantConsonant,
    VowelVowel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CxcUnit {
    pub from: String,
    pub flight: f64,
    pub to: String,
    pub kind: CxcKind,
}

/// Consecutive collision pairs with the flight between them.
pub fn cxc_units(t: &Trajectory) -> Result<Vec<CxcUnit>, SimError> {
    let labels: Vec<&str> = t.events.iter().map(|e| e.label.as_str()).collect();
    let flights: Vec<f64> = t.events.iter().map(|e| e.flight_length).collect();
    cxc_units_of(&labels, &flights)
}

/// As [`cxc_units`] for a bare word; `flights[i]` is the flight ending at
/// symbol `i` (so `flights[0]` is unused).
pub fn cxc_units_of<S: AsRef<str>>(word: &[S], flights: &[f64]) -> Result<Vec<CxcUnit>, SimError> {
    if word.len() < 2 {
        return Err(SimError::TooFewEvents(word.len()));
    }
    Ok(word
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let (a, b) = (pair[0].as_ref(), pair[1].as_ref());
            let kind = match (a == JAW, b == JAW) {
                (false, true) => CxcKind::ConsonantVowel,
                (true, false) => CxcKind::VowelConsonant,
                (false, false) => CxcKind::ConsonantConsonant,
                (true, true) => CxcKind::VowelVowel,
            };
            CxcUnit {
                from: a.to_string(),
                flight: flights.get(i + 1).copied().unwrap_or(f64::NAN),
                to: b.to_string(),
                kind,
            }
        })
        .collect())
}

/// Start indices of C[ʔ]C syllable skeletons within a unit list.
pub fn cxc_syllables(units: &[CxcUnit]) -> Vec<usize> {
    units
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].kind == CxcKind::ConsonantVowel && w[1].kind == CxcKind::VowelConsonant)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Serialize)]
struct EventRecord<'a> {
    i: usize,
    side: &'a str,
    s: f64,
    x: f64,
    y: f64,
    din: [f64; 2],
    dout: [f64; 2],
    vin: f64,
    vout: f64,
    len: f64,
}

#[derive(Serialize)]
struct TerminationRecord<'a> {
    termination: &'static str,
    events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    corner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sides: Option<[&'a str; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed: Option<f64>,
}

/// One JSON object per collision, then a termination record.
pub fn write_jsonl<W: Write>(t: &Trajectory, mut out: W) -> io::Result<()> {
    for e in &t.events {
        let rec = EventRecord {
            i: e.index,
            side: &e.label,
            s: e.s,
            x: e.point.x,
            y: e.point.y,
            din: e.incoming.into(),
            dout: e.outgoing.into(),
            vin: e.speed_in,
            vout: e.speed_out,
            len: e.flight_length,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    let mut rec = TerminationRecord {
        termination: "max_events",
        events: t.events.len(),
        corner: None,
        sides: None,
        x: None,
        y: None,
        distance: None,
        speed: None,
    };
    match &t.termination {
        Termination::MaxEvents => {}
        Termination::CornerHit(c) => {
            rec.termination = "corner_hit";
            rec.corner = Some(c.symbol());
            rec.sides = Some([&c.sides.0, &c.sides.1]);
            rec.x = Some(c.point.x);
            rec.y = Some(c.point.y);
            rec.distance = Some(c.distance);
        }
        Termination::EnergyFloor { speed } => {
            rec.termination = "energy_floor";
            rec.speed = Some(*speed);
        }
    }
    serde_json::to_writer(&mut out, &rec)?;
    out.write_all(b"\n")
}

pub fn to_jsonl(t: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_jsonl(t, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
