//! Periodic orbits: the named constructions (Fagnano, displaced Fagnano,
//! perpendicular orbit of a right triangle), wedge decay towards a corner,
//! a recurrence search over phase space, and side-pair transition classes.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    reflect, simulate, BallSpec, BallState, SimError, SimOptions, Termination, Trajectory,
};
use crate::geometry::{line_intersection, GeometryError, OralPolygon, SideLabel, Table, Vec2};

/// Angular margin for acute / right-angle tests.
pub const EPS_ANGLE: f64 = 1e-9;
/// Reflection-law tolerance at constructed contact points.
pub const EPS_REFLECTION: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("expected a triangle, got {0} sides")]
    NotTriangle(usize),
    #[error("triangle is not acute: angle {angle} at vertex {vertex}")]
    NotAcute { vertex: usize, angle: f64 },
    #[error("triangle has no right angle")]
    NotRight,
    #[error("sides {0:?} must be three distinct sides of the table")]
    BadSides([usize; 3]),
    #[error("sides {0:?} are parallel or do not bound a triangle")]
    Degenerate([usize; 3]),
    #[error("orthic foot on side {side} falls outside the side (s = {s})")]
    FootOffSide { side: usize, s: f64 },
    #[error("reflection law violated on side {side} by {error} rad")]
    ReflectionLaw { side: usize, error: f64 },
    #[error("constructed orbit is obstructed: simulated word {got:?}, expected {expected:?}")]
    Obstructed {
        got: Vec<String>,
        expected: Vec<String>,
    },
    #[error("displacement {0} leaves the periodic band")]
    OutsideBand(f64),
    #[error("no closing orbit found (best closure error {0})")]
    NoClosure(f64),
    #[error("wedge angle {0} must lie in (0, π/2)")]
    BadWedge(f64),
    #[error("entry is not directed towards the wedge apex")]
    AwayFromApex,
    #[error("identical sides {0}")]
    SameSide(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A phase-space point on the boundary: a side, an arc length along it and
/// the outgoing angle from the side's tangent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub side: usize,
    pub s: f64,
    pub angle: f64,
}

impl Anchor {
    pub fn launch(&self, table: &Table) -> BallState {
        BallState::on_side(table, self.side, self.s, self.angle, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub table: Table,
    pub period: usize,
    /// Labels of one period, starting with the first collision after the anchor.
    pub word: Vec<String>,
    pub anchor: Anchor,
    pub closure_error: f64,
}

impl PeriodicOrbit {
    pub fn launch(&self) -> BallState {
        self.anchor.launch(&self.table)
    }

    pub fn canonical_word(&self) -> Vec<String> {
        canonical_word(&self.word)
    }

    pub fn simulate_periods(&self, periods: usize) -> Result<Trajectory, SimError> {
        simulate(
            &self.table,
            self.launch(),
            &BallSpec::point(),
            &SimOptions::with_max_events(periods * self.period),
        )
    }

    /// Largest closure error over `periods` consecutive periods. Fails if the
    /// run hits a corner or the word drifts.
    pub fn verify(&self, periods: usize) -> Result<f64, OrbitError> {
        let t = self.simulate_periods(periods)?;
        let word = t.word();
        let expected: Vec<String> = self.word.iter().cycle().take(periods * self.period).cloned().collect();
        if word != expected {
            return Err(OrbitError::Obstructed {
                got: word,
                expected,
            });
        }
        let mut worst: f64 = 0.0;
        for p in 1..=periods {
            let e = &t.events[p * self.period - 1];
            worst = worst.max(phase_gap(&self.table, &self.anchor, e.side, e.s, e.angle(&self.table)));
        }
        Ok(worst)
    }

    pub fn to_record(&self) -> OrbitRecord {
        OrbitRecord {
            word: self.word.clone(),
            period: self.period,
            anchor: AnchorRecord {
                side: self.table.label(self.anchor.side).to_string(),
                index: self.anchor.side,
                s: self.anchor.s,
                angle: self.anchor.angle,
            },
            closure_error: self.closure_error,
        }
    }
}

/// Catalogue entry as written by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub word: Vec<String>,
    pub period: usize,
    pub anchor: AnchorRecord,
    pub closure_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorRecord {
    pub side: String,
    pub index: usize,
    pub s: f64,
    pub angle: f64,
}

/// Distance between two boundary phase points, in cm; angles are weighted
/// by the table diameter.
fn phase_gap(table: &Table, a: &Anchor, side: usize, s: f64, angle: f64) -> f64 {
    if side != a.side {
        return f64::INFINITY;
    }
    (s - a.s).abs().max((angle - a.angle).abs() * table.diameter())
}

/// Lexicographically least rotation of the word or of its reversal.
pub fn canonical_word<S: AsRef<str>>(word: &[S]) -> Vec<String> {
    let w: Vec<&str> = word.iter().map(AsRef::as_ref).collect();
    let n = w.len();
    let mut best: Option<Vec<&str>> = None;
    let rev: Vec<&str> = w.iter().rev().copied().collect();
    for seq in [&w, &rev] {
        for r in 0..n {
            let cand: Vec<&str> = seq[r..].iter().chain(&seq[..r]).copied().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default().into_iter().map(str::to_string).collect()
}

/// Shortest prefix whose repetition gives the whole word.
pub fn primitive_root<S: AsRef<str>>(word: &[S]) -> &[S] {
    let n = word.len();
    for m in 1..n {
        if n.is_multiple_of(m) && (m..n).all(|i| word[i].as_ref() == word[i % m].as_ref()) {
            return &word[..m];
        }
    }
    word
}

/// Whether `pattern` occurs as a contiguous block of the cyclic word, read
/// in either direction.
pub fn cyclic_contains<S: AsRef<str>, P: AsRef<str>>(word: &[S], pattern: &[P]) -> bool {
    let n = word.len();
    let m = pattern.len();
    if m == 0 {
        return true;
    }
    if n == 0 {
        return false;
    }
    let at = |i: usize| word[i % n].as_ref();
    (0..n).any(|start| {
        (0..m).all(|j| at(start + j) == pattern[j].as_ref())
            || (0..m).all(|j| at(start + n * m - j) == pattern[j].as_ref())
    })
}

fn triangle_angles(v: [Vec2; 3]) -> [f64; 3] {
    let ang = |a: Vec2, b: Vec2, c: Vec2| {
        let u = b - a;
        let w = c - a;
        u.cross(w).abs().atan2(u.dot(w))
    };
    [
        ang(v[0], v[1], v[2]),
        ang(v[1], v[2], v[0]),
        ang(v[2], v[0], v[1]),
    ]
}

/// Fagnano orbit of a triangular table.
pub fn fagnano_orbit(table: &Table) -> Result<PeriodicOrbit, OrbitError> {
    if table.sides() != 3 {
        return Err(OrbitError::NotTriangle(table.sides()));
    }
    fagnano_on_sides(table, [0, 1, 2])
}

/// Fagnano orbit of the triangle cut out by the lines of three sides of a
/// convex table. The orthic feet must land on the actual sides and the
/// inscribed path must not meet any other side.
pub fn fagnano_on_sides(table: &Table, sides: [usize; 3]) -> Result<PeriodicOrbit, OrbitError> {
    let n = table.sides();
    if sides.iter().any(|&s| s >= n) || sides[0] == sides[1] || sides[1] == sides[2] || sides[0] == sides[2] {
        return Err(OrbitError::BadSides(sides));
    }
    let poly = table.polygon();
    let line = |i: usize| (poly.vertex(sides[i]), poly.tangent(sides[i]));
    // Vertex opposite line i is where the other two lines meet.
    let mut opposite = [Vec2::ZERO; 3];
    for (i, v) in opposite.iter_mut().enumerate() {
        let (p, d) = line((i + 1) % 3);
        let (q, e) = line((i + 2) % 3);
        *v = line_intersection(p, d, q, e).ok_or(OrbitError::Degenerate(sides))?;
    }
    let angles = triangle_angles(opposite);
    for (i, a) in angles.iter().enumerate() {
        if *a >= FRAC_PI_2 - EPS_ANGLE || *a <= EPS_ANGLE {
            return Err(OrbitError::NotAcute {
                vertex: i,
                angle: *a,
            });
        }
    }
    let eps = SimOptions::default().corner_tolerance(table);
    let mut feet = [Vec2::ZERO; 3];
    let mut arc = [0.0; 3];
    for i in 0..3 {
        let (a, t) = line(i);
        let s = (opposite[i] - a).dot(t);
        if s <= eps || s >= poly.side_length(sides[i]) - eps {
            return Err(OrbitError::FootOffSide { side: sides[i], s });
        }
        feet[i] = a + t * s;
        arc[i] = s;
    }
    for i in 0..3 {
        let prev = feet[(i + 2) % 3];
        let next = feet[(i + 1) % 3];
        let d_in = (feet[i] - prev).normalized();
        let d_out = (next - feet[i]).normalized();
        let r = reflect(d_in, poly.inward_normal(sides[i]));
        let err = r.cross(d_out).atan2(r.dot(d_out)).abs();
        if err > EPS_REFLECTION {
            return Err(OrbitError::ReflectionLaw {
                side: sides[i],
                error: err,
            });
        }
    }
    let d0 = (feet[1] - feet[0]).normalized();
    let t0 = poly.tangent(sides[0]);
    let n0 = poly.inward_normal(sides[0]);
    let anchor = Anchor {
        side: sides[0],
        s: arc[0],
        angle: d0.dot(n0).atan2(d0.dot(t0)),
    };
    close_orbit(table, anchor, 3)
}

/// Simulate one period from `anchor` and package the orbit.
fn close_orbit(table: &Table, anchor: Anchor, period: usize) -> Result<PeriodicOrbit, OrbitError> {
    let t = simulate(
        table,
        anchor.launch(table),
        &BallSpec::point(),
        &SimOptions::with_max_events(period),
    )?;
    let word = t.word();
    if t.events.len() != period || t.events[period - 1].side != anchor.side {
        return Err(OrbitError::Obstructed {
            got: word,
            expected: vec![table.label(anchor.side).to_string()],
        });
    }
    let last = &t.events[period - 1];
    let closure_error = phase_gap(table, &anchor, last.side, last.s, last.angle(table));
    Ok(PeriodicOrbit {
        table: table.clone(),
        period,
        word,
        anchor,
        closure_error,
    })
}

/// Closure tolerance for exact constructions.
fn construction_tol(table: &Table) -> f64 {
    1e-9 * table.diameter()
}

/// Shift the anchor by `delta` along its side, keeping the direction. Within
/// the periodic band the result closes after one or two periods of the
/// original word.
pub fn displaced_fagnano(orbit: &PeriodicOrbit, delta: f64) -> Result<PeriodicOrbit, OrbitError> {
    if delta == 0.0 {
        return Ok(orbit.clone());
    }
    let table = &orbit.table;
    let len = table.polygon().side_length(orbit.anchor.side);
    let anchor = Anchor {
        s: orbit.anchor.s + delta,
        ..orbit.anchor
    };
    if anchor.s <= 0.0 || anchor.s >= len {
        return Err(OrbitError::OutsideBand(delta));
    }
    let family = canonical_word(primitive_root(&orbit.word));
    let tol = construction_tol(table);
    for period in [orbit.period, 2 * orbit.period] {
        let Ok(candidate) = close_orbit(table, anchor, period) else {
            return Err(OrbitError::OutsideBand(delta));
        };
        if candidate.closure_error < tol {
            if canonical_word(primitive_root(&candidate.word)) != family {
                return Err(OrbitError::OutsideBand(delta));
            }
            return Ok(candidate);
        }
    }
    Err(OrbitError::OutsideBand(delta))
}

/// Periodic orbit of a right triangle launched perpendicularly from the
/// hypotenuse. Every foot point in the admissible band closes, so the search
/// keeps the closing grid point farthest from the corners.
pub fn rectangular_orbit(table: &Table) -> Result<PeriodicOrbit, OrbitError> {
    if table.sides() != 3 {
        return Err(OrbitError::NotTriangle(table.sides()));
    }
    let poly = table.polygon();
    let right = (0..3)
        .find(|&v| (poly.interior_angle(v) - FRAC_PI_2).abs() < EPS_ANGLE)
        .ok_or(OrbitError::NotRight)?;
    let hyp = (right + 1) % 3;
    let len = poly.side_length(hyp);
    let tol = construction_tol(table);
    const SAMPLES: usize = 256;
    let mut best: Option<(f64, PeriodicOrbit)> = None;
    let mut best_closure = f64::INFINITY;
    for j in 0..SAMPLES {
        let anchor = Anchor {
            side: hyp,
            s: len * (j as f64 + 0.5) / SAMPLES as f64,
            angle: FRAC_PI_2,
        };
        let Some(orbit) = (1..=6).find_map(|k| {
            close_orbit(table, anchor, k)
                .ok()
                .filter(|o| o.closure_error < tol)
        }) else {
            continue;
        };
        best_closure = best_closure.min(orbit.closure_error);
        let t = orbit.simulate_periods(1)?;
        let clearance = t
            .path()
            .iter()
            .flat_map(|p| poly.vertices().iter().map(move |v| p.distance(*v)))
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(c, _)| clearance > *c) {
            best = Some((clearance, orbit));
        }
    }
    best.map(|(_, o)| o)
        .ok_or(OrbitError::NoClosure(best_closure))
}

/// Two-sided wedge of opening `alpha` and leg length `leg`, apex at the
/// origin: sides `a` (along the x axis), `mouth` and `b`.
pub fn wedge_table(alpha: f64, leg: f64) -> Result<Table, OrbitError> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(OrbitError::BadWedge(alpha));
    }
    Ok(Table::new(
        vec![
            Vec2::ZERO,
            Vec2::new(leg, 0.0),
            Vec2::from_angle(alpha) * leg,
        ],
        ["a", "mouth", "b"],
    )?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WedgeOutcome {
    /// Collisions with the two wedge sides.
    pub bounces: usize,
    pub corner_hit: bool,
    /// Word of wedge-side collisions.
    pub word: Vec<String>,
    pub trajectory: Trajectory,
}

/// Entry from inside the mouth of a unit wedge whose unfolded straight line
/// passes at distance `miss` from the apex, so that it bounces between the
/// two sides while closing in on the corner.
pub fn wedge_entry(alpha: f64, miss: f64) -> BallState {
    let start = Vec2::from_angle(alpha / 2.0) * (0.9 * (alpha / 2.0).cos());
    let r = start.norm();
    let towards = (-start).normalized();
    // Tilt clockwise so the line leaves the apex on its left, at distance `miss`.
    BallState::new(start, towards.rotated(-(miss / r).asin()), 1.0)
}

/// Collisions in the wedge of opening `alpha` before the run either reaches
/// the apex (corner hit) or leaves through the mouth.
pub fn wedge_bounce_count(
    alpha: f64,
    entry: &BallState,
    opts: &SimOptions,
) -> Result<WedgeOutcome, OrbitError> {
    let table = wedge_table(alpha, 1.0)?;
    if entry.direction.dot(-entry.position) <= 0.0 {
        return Err(OrbitError::AwayFromApex);
    }
    let mouth = 1;
    let mut sim_opts = *opts;
    let cap = opts.max_events;
    sim_opts.max_events = 1;
    let mut state = *entry;
    let mut word = Vec::new();
    let mut events = Vec::new();
    let mut corner = None;
    // Step one collision at a time so the run stops at the mouth.
    for _ in 0..cap {
        let t = simulate(&table, state, &BallSpec::point(), &sim_opts)?;
        if let Termination::CornerHit(c) = t.termination {
            corner = Some(c);
            break;
        }
        let e = t.events[0].clone();
        if e.side == mouth {
            break;
        }
        word.push(e.label.clone());
        state = BallState::new(e.point, e.outgoing, e.speed_out);
        events.push(e);
    }
    let bounces = events.len();
    let corner_hit = corner.as_ref().is_some_and(|c| c.vertex == 0);
    let termination = match corner {
        Some(c) => Termination::CornerHit(c),
        None => Termination::MaxEvents,
    };
    for (i, e) in events.iter_mut().enumerate() {
        e.index = i;
    }
    Ok(WedgeOutcome {
        bounces,
        corner_hit,
        word,
        trajectory: Trajectory {
            table,
            initial: *entry,
            events,
            termination,
        },
    })
}

/// Phase-space sampling for [`find_periodic`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    /// Sides to launch from; all sides when empty.
    #[serde(default)]
    pub sides: Vec<usize>,
    pub s_samples: usize,
    pub angle_samples: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            sides: Vec::new(),
            s_samples: 24,
            angle_samples: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTolerance {
    /// Position tolerance relative to the table diameter.
    pub position_rel: f64,
    /// Angle tolerance in radians.
    pub angle: f64,
}

impl Default for OrbitTolerance {
    fn default() -> Self {
        Self {
            position_rel: 1e-7,
            angle: 1e-7,
        }
    }
}

struct ReturnMap<'a> {
    table: &'a Table,
    side: usize,
    k: usize,
    word: Vec<String>,
    diam: f64,
    opts: SimOptions,
}

impl ReturnMap<'_> {
    /// Scaled residual of the k-th return, if the run follows the word.
    fn residual(&self, s: f64, angle: f64) -> Option<[f64; 2]> {
        let len = self.table.polygon().side_length(self.side);
        if !(s > 0.0 && s < len && angle > 0.0 && angle < PI) {
            return None;
        }
        let init = BallState::on_side(self.table, self.side, s, angle, 1.0);
        let t = simulate(self.table, init, &BallSpec::point(), &self.opts).ok()?;
        if t.events.len() != self.k || t.events.iter().zip(&self.word).any(|(e, w)| e.label != *w) {
            return None;
        }
        let last = t.events.last()?;
        Some([(last.s - s) / self.diam, last.angle(self.table) - angle])
    }

    /// Levenberg–Marquardt on the return residual.
    fn refine(&self, mut x: [f64; 2]) -> Option<([f64; 2], [f64; 2])> {
        let mut f = self.residual(x[0], x[1])?;
        let norm2 = |r: [f64; 2]| r[0] * r[0] + r[1] * r[1];
        let mut lambda = 1e-3;
        let hs = 1e-7 * self.diam;
        let ha = 1e-7;
        for _ in 0..60 {
            if norm2(f) < 1e-30 {
                break;
            }
            let col = |dx: [f64; 2], h: f64| -> Option<[f64; 2]> {
                let fwd = self.residual(x[0] + dx[0], x[1] + dx[1]);
                match fwd {
                    Some(r) => Some([(r[0] - f[0]) / h, (r[1] - f[1]) / h]),
                    None => {
                        let r = self.residual(x[0] - dx[0], x[1] - dx[1])?;
                        Some([(f[0] - r[0]) / h, (f[1] - r[1]) / h])
                    }
                }
            };
            let j0 = col([hs, 0.0], hs)?;
            let j1 = col([0.0, ha], ha)?;
            // Normal equations (JᵀJ + λ·diag) Δ = −Jᵀf, columns j0, j1.
            let a00 = j0[0] * j0[0] + j0[1] * j0[1];
            let a01 = j0[0] * j1[0] + j0[1] * j1[1];
            let a11 = j1[0] * j1[0] + j1[1] * j1[1];
            let g0 = -(j0[0] * f[0] + j0[1] * f[1]);
            let g1 = -(j1[0] * f[0] + j1[1] * f[1]);
            let mut improved = false;
            while lambda < 1e12 {
                let mu = lambda * a00.max(a11) + 1e-300;
                let b00 = a00 + mu;
                let b11 = a11 + mu;
                let det = b00 * b11 - a01 * a01;
                if det == 0.0 {
                    lambda *= 4.0;
                    continue;
                }
                let dx = [(g0 * b11 - g1 * a01) / det, (b00 * g1 - a01 * g0) / det];
                let cand = [x[0] + dx[0], x[1] + dx[1]];
                if let Some(fc) = self.residual(cand[0], cand[1]) {
                    if norm2(fc) < norm2(f) {
                        x = cand;
                        f = fc;
                        lambda = (lambda / 3.0).max(1e-12);
                        improved = true;
                        break;
                    }
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        Some((x, f))
    }
}

fn closes(map: &ReturnMap, s: f64, angle: f64, tol: &OrbitTolerance) -> bool {
    map.residual(s, angle)
        .is_some_and(|r| r[0].abs() < tol.position_rel && r[1].abs() < tol.angle)
}

/// Slide a closing anchor to the middle of its periodic band along the side.
fn centre_in_band(map: &ReturnMap, s: f64, angle: f64, tol: &OrbitTolerance) -> f64 {
    let len = map.table.polygon().side_length(map.side);
    let probe = 1e-4 * len;
    let edge = |towards: f64| {
        let (mut inside, mut outside) = (s, towards);
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if closes(map, mid, angle, tol) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo_open = closes(map, s - probe, angle, tol);
    let hi_open = closes(map, s + probe, angle, tol);
    if !(lo_open && hi_open) {
        return s;
    }
    0.5 * (edge(0.0) + edge(len))
}

fn search_from(
    table: &Table,
    side: usize,
    s: f64,
    angle: f64,
    period_max: usize,
    tol: &OrbitTolerance,
) -> Vec<PeriodicOrbit> {
    let diam = table.diameter();
    let opts = SimOptions::with_max_events(period_max);
    let init = BallState::on_side(table, side, s, angle, 1.0);
    let Ok(t) = simulate(table, init, &BallSpec::point(), &opts) else {
        return Vec::new();
    };
    const COARSE: f64 = 0.25;
    let mut returns: Vec<(f64, usize)> = t
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.side == side)
        .map(|(i, e)| {
            let r = ((e.s - s) / diam).abs().max((e.angle(table) - angle).abs());
            (r, i + 1)
        })
        .filter(|(r, _)| *r < COARSE)
        .collect();
    returns.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut found = Vec::new();
    for &(_, k) in returns.iter().take(2) {
        let map = ReturnMap {
            table,
            side,
            k,
            word: t.events[..k].iter().map(|e| e.label.clone()).collect(),
            diam,
            opts: SimOptions::with_max_events(k),
        };
        let Some((x, f)) = map.refine([s, angle]) else {
            continue;
        };
        if !(f[0].abs() < tol.position_rel && f[1].abs() < tol.angle) {
            continue;
        }
        let s_mid = centre_in_band(&map, x[0], x[1], tol);
        let mut anchor = Anchor {
            side,
            s: s_mid,
            angle: x[1],
        };
        let mut period = k;
        // Drop to the primitive period when the anchor already closes there.
        let root = primitive_root(&map.word).len();
        if root < k {
            if let Ok(o) = close_orbit(table, anchor, root) {
                if o.closure_error < tol.position_rel * diam {
                    period = root;
                    anchor = o.anchor;
                }
            }
        }
        let Ok(orbit) = close_orbit(table, anchor, period) else {
            continue;
        };
        match orbit.verify(100) {
            Ok(err) if err < 10.0 * tol.position_rel * diam => found.push(orbit),
            _ => {}
        }
    }
    found
}

/// Grid search for periodic orbits of period at most `period_max`,
/// deduplicated by canonical word and sorted by (period, word).
pub fn find_periodic(
    table: &Table,
    grid: &SearchGrid,
    period_max: usize,
    tol: &OrbitTolerance,
) -> Vec<PeriodicOrbit> {
    let sides: Vec<usize> = if grid.sides.is_empty() {
        (0..table.sides()).collect()
    } else {
        grid.sides.iter().copied().filter(|&s| s < table.sides()).collect()
    };
    let mut starts = Vec::new();
    for &side in &sides {
        let len = table.polygon().side_length(side);
        for i in 0..grid.s_samples {
            for j in 0..grid.angle_samples {
                let s = len * (i as f64 + 0.5) / grid.s_samples as f64;
                let a = PI * (j as f64 + 0.5) / grid.angle_samples as f64;
                starts.push((side, s, a));
            }
        }
    }
    let per_start: Vec<Vec<PeriodicOrbit>> = starts
        .par_iter()
        .map(|&(side, s, a)| search_from(table, side, s, a, period_max, tol))
        .collect();
    let mut catalogue: BTreeMap<(usize, Vec<String>), PeriodicOrbit> = BTreeMap::new();
    for orbit in per_start.into_iter().flatten() {
        catalogue
            .entry((orbit.period, orbit.canonical_word()))
            .or_insert(orbit);
    }
    catalogue.into_values().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    SkipStable,
    AdjacentGlancing,
    JawMediated,
    Undefined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionClass {
    pub pair: (SideLabel, SideLabel),
    pub class: TransitionKind,
}

/// Class of a flight between two sides of the oral polygon. Roof sides
/// separated by fewer than two other roof sides give glancing flights;
/// `jaw_injected` marks those flights as rescued by an interposed jaw bounce.
pub fn classify_transition(
    poly: &OralPolygon,
    a: SideLabel,
    b: SideLabel,
    jaw_injected: bool,
) -> Result<TransitionClass, OrbitError> {
    if a == b {
        return Err(OrbitError::SameSide(a.symbol().to_string()));
    }
    let pair = (a, b);
    let class = match (poly.side_of(a), poly.side_of(b)) {
        _ if a.is_corner() || b.is_corner() => TransitionKind::Undefined,
        (Some(_), Some(_)) if a == SideLabel::Glottal || b == SideLabel::Glottal => {
            TransitionKind::SkipStable
        }
        (Some(i), Some(j)) => {
            let n = poly.side_labels().len();
            let jaw = poly.side_of(SideLabel::Glottal).expect("jaw side always present");
            // Walk the roof from i to j the way that avoids the jaw.
            let fwd = (j + n - i) % n;
            let through_jaw = (1..fwd).any(|k| (i + k) % n == jaw);
            let gap = if through_jaw { n - fwd } else { fwd };
            let between = gap - 1;
            if between >= 2 {
                TransitionKind::SkipStable
            } else if jaw_injected {
                TransitionKind::JawMediated
            } else {
                TransitionKind::AdjacentGlancing
            }
        }
        _ => TransitionKind::Undefined,
    };
    Ok(TransitionClass { pair, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_default_polygon;

    fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Table {
        Table::lettered(vec![Vec2::new(a.0, a.1), Vec2::new(b.0, b.1), Vec2::new(c.0, c.1)]).unwrap()
    }

    fn right_tri(leg_x: f64, leg_y: f64) -> Table {
        Table::new(
            vec![Vec2::ZERO, Vec2::new(leg_x, 0.0), Vec2::new(0.0, leg_y)],
            ["a", "c", "b"],
        )
        .unwrap()
    }

    #[test]
    fn canonical_word_handles_rotation_and_reversal() {
        assert_eq!(canonical_word(&["b", "a", "c"]), vec!["a", "b", "c"]);
        assert_eq!(canonical_word(&["c", "b", "a"]), vec!["a", "b", "c"]);
        assert_eq!(canonical_word::<&str>(&[]), Vec::<String>::new());
        assert_eq!(primitive_root(&["a", "b", "a", "b"]), &["a", "b"]);
        assert_eq!(primitive_root(&["a", "b", "a"]), &["a", "b", "a"]);
        assert!(cyclic_contains(&["χ", "θ", "ʔ"], &["θ", "ʔ", "χ"]));
        assert!(cyclic_contains(&["χ", "ʔ", "θ"], &["θ", "ʔ", "χ"]));
        assert!(!cyclic_contains(&["θ", "χ", "ʔ", "x"], &["θ", "ʔ", "χ"]));
    }

    #[test]
    fn equilateral_fagnano_runs_through_midpoints() {
        let t = tri((0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0));
        let o = fagnano_orbit(&t).unwrap();
        assert_eq!(o.period, 3);
        assert!(o.closure_error < 1e-12);
        assert_eq!(o.canonical_word(), vec!["a", "b", "c"]);
        let tr = o.simulate_periods(1).unwrap();
        for e in &tr.events {
            assert!((e.s - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn scalene_fagnano_matches_altitude_feet() {
        let v = [Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(1.2, 2.8)];
        let t = Table::lettered(v.to_vec()).unwrap();
        let o = fagnano_orbit(&t).unwrap();
        // Foot of the altitude from C onto AB is (Cx, 0); from A onto BC and B onto CA by projection.
        let proj = |p: Vec2, a: Vec2, b: Vec2| {
            let d = b - a;
            a + d * ((p - a).dot(d) / d.dot(d))
        };
        let feet = [
            Vec2::new(1.2, 0.0),
            proj(v[0], v[1], v[2]),
            proj(v[1], v[2], v[0]),
        ];
        let tr = o.simulate_periods(100).unwrap();
        assert_eq!(tr.events.len(), 300);
        for (i, e) in tr.events.iter().enumerate() {
            let want = feet[(i + 1) % 3];
            assert!(e.point.distance(want) < 1e-9, "event {i}");
        }
    }

    #[test]
    fn non_acute_triangle_has_no_fagnano_orbit() {
        let t = tri((0.0, 0.0), (1.0, 0.0), (0.0, 1.0));
        assert!(matches!(fagnano_orbit(&t), Err(OrbitError::NotAcute { .. })));
    }

    #[test]
    fn displaced_fagnano_stays_in_family() {
        let t = tri((0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0));
        let o = fagnano_orbit(&t).unwrap();
        assert_eq!(displaced_fagnano(&o, 0.0).unwrap(), o);
        let d = displaced_fagnano(&o, 0.05).unwrap();
        assert_eq!(d.period, 6);
        assert_eq!(canonical_word(primitive_root(&d.word)), o.canonical_word());
        let tr = d.simulate_periods(50).unwrap();
        let w = tr.word();
        assert_eq!(w.len(), 300);
        for chunk in w.chunks(6) {
            assert_eq!(chunk, d.word.as_slice());
        }
        assert!(d.verify(50).unwrap() < 1e-9);
        assert!(matches!(
            displaced_fagnano(&o, 0.5),
            Err(OrbitError::OutsideBand(_))
        ));
    }

    #[test]
    fn rectangular_orbit_closes_with_perpendicular_word() {
        for t in [right_tri(1.0, 1.0), right_tri(4.0, 3.0)] {
            let o = rectangular_orbit(&t).unwrap();
            assert!(o.closure_error < 1e-9);
            assert_eq!(o.period, 6);
            assert_eq!(
                o.canonical_word(),
                canonical_word(&["c", "b", "a", "c", "a", "b"])
            );
            assert!(o.verify(50).unwrap() < 1e-9);
        }
        let acute = tri((0.0, 0.0), (1.0, 0.0), (0.4, 0.9));
        assert_eq!(rectangular_orbit(&acute).unwrap_err(), OrbitError::NotRight);
    }

    #[test]
    fn rectangular_band_oracle() {
        // Dense grid with bisection for the edge of the closing band on the 3-4-5 hypotenuse.
        let t = right_tri(4.0, 3.0);
        let hyp = 1;
        let len = 5.0;
        let closes_at = |s: f64| {
            let a = Anchor { side: hyp, s, angle: FRAC_PI_2 };
            close_orbit(&t, a, 6).is_ok_and(|o| o.closure_error < 1e-9)
        };
        let grid: Vec<f64> = (1..1000).map(|i| len * i as f64 / 1000.0).collect();
        let closing: Vec<f64> = grid.iter().copied().filter(|s| closes_at(*s)).collect();
        assert!(!closing.is_empty());
        let o = rectangular_orbit(&t).unwrap();
        assert!(closes_at(o.anchor.s));
        assert!(o.anchor.s >= closing[0] - 0.01 && o.anchor.s <= closing[closing.len() - 1] + 0.01);
    }

    #[test]
    fn perpendicular_wedge_entries_stay_within_classical_bound() {
        let opts = SimOptions::with_max_events(10_000);
        for (alpha, bound) in [(PI / 6.0, 6), (PI / 2.5, 3)] {
            let entry = BallState::new(Vec2::new(0.5, 1e-3), Vec2::new(0.0, -1.0), 1.0);
            let out = wedge_bounce_count(alpha, &entry, &opts).unwrap();
            assert!(out.bounces <= bound, "alpha={alpha}: {}", out.bounces);
            assert!(out.bounces >= 1);
        }
        let narrow = BallState::new(Vec2::new(0.5, 1e-3), Vec2::new(0.0, -1.0), 1.0);
        let wide = wedge_bounce_count(PI / 6.0, &narrow, &opts).unwrap().bounces;
        let thin = wedge_bounce_count(PI / 64.0, &narrow, &opts).unwrap().bounces;
        assert!(thin > wide);
        let away = BallState::new(Vec2::new(0.5, 0.1), Vec2::new(1.0, 0.0), 1.0);
        assert_eq!(
            wedge_bounce_count(PI / 6.0, &away, &opts).unwrap_err(),
            OrbitError::AwayFromApex
        );
        assert!(wedge_bounce_count(PI / 2.0, &narrow, &opts).is_err());
    }

    #[test]
    fn apex_aimed_entry_alternates_then_hits_corner() {
        let opts = SimOptions::with_max_events(10_000);
        let eps = opts.corner_tolerance(&wedge_table(PI / 16.0, 1.0).unwrap());
        let out = wedge_bounce_count(PI / 16.0, &wedge_entry(PI / 16.0, 0.99 * eps), &opts).unwrap();
        assert!(out.corner_hit);
        assert!(out.bounces > 2);
        for pair in out.word.windows(2) {
            assert_ne!(pair[0], pair[1]);
        }
    }

    #[test]
    fn square_search_finds_perpendicular_and_diagonal_families() {
        let sq = Table::lettered(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        let grid = SearchGrid {
            sides: vec![],
            s_samples: 6,
            angle_samples: 24,
        };
        let found = find_periodic(&sq, &grid, 4, &OrbitTolerance::default());
        let words: Vec<Vec<String>> = found.iter().map(|o| o.canonical_word()).collect();
        assert!(words.contains(&canonical_word(&["a", "c"])));
        assert!(words.contains(&canonical_word(&["a", "b", "c", "d"])));
    }

    #[test]
    fn equilateral_search_finds_fagnano_family() {
        let t = tri((0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0));
        let found = find_periodic(&t, &SearchGrid::default(), 6, &OrbitTolerance::default());
        assert!(found
            .iter()
            .any(|o| canonical_word(primitive_root(&o.word)) == vec!["a", "b", "c"]));
    }

    #[test]
    fn transition_classes_follow_roof_distance() {
        let p = build_default_polygon(8.0).unwrap();
        use SideLabel::*;
        let c = |a, b, j| classify_transition(&p, a, b, j).unwrap().class;
        assert_eq!(c(DentalAlveolar, UvularPharyngeal, false), TransitionKind::SkipStable);
        assert_eq!(c(DentalAlveolar, AlveolarPalatal, false), TransitionKind::AdjacentGlancing);
        assert_eq!(c(DentalAlveolar, AlveolarPalatal, true), TransitionKind::JawMediated);
        assert_eq!(c(DentalAlveolar, VelarPalatal, false), TransitionKind::AdjacentGlancing);
        assert_eq!(c(DentalAlveolar, Velar, false), TransitionKind::SkipStable);
        assert_eq!(c(Glottal, AlveolarPalatal, false), TransitionKind::SkipStable);
        assert_eq!(c(Labial, Velar, false), TransitionKind::Undefined);
        for a in SideLabel::ALL {
            for b in SideLabel::ALL {
                if a != b {
                    assert_eq!(c(a, b, false), c(b, a, false));
                }
            }
        }
        assert!(classify_transition(&p, Velar, Velar, false).is_err());
    }

    #[test]
    fn oral_polygon_fagnano_triangles_exist() {
        let p = build_default_polygon(8.0).unwrap();
        let t = p.table();
        let id = |l: SideLabel| p.side_of(l).unwrap();
        for roof in [SideLabel::DentalAlveolar, SideLabel::AlveolarPalatal] {
            let o = fagnano_on_sides(t, [id(roof), id(SideLabel::Glottal), id(SideLabel::UvularPharyngeal)]).unwrap();
            assert!(cyclic_contains(&o.word, &[roof.symbol(), "ʔ", "χ"]));
            assert!(o.verify(100).unwrap() < 1e-9);
        }
    }
}
