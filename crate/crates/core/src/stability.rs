//! Symbolic stability: how far initial conditions or the table shape can be
//! pushed before the first `k` symbols of a run change.
//!
//! Kinematic perturbations move the launch point along its side and tilt the
//! launch angle. Geometric perturbations move the polygon in its
//! (2p − 4)-dimensional shape space: p − 1 interior-angle deltas (the
//! reference vertex compensates) and p − 3 relative side-length deltas (the
//! reference side keeps its length, the last two sides close the polygon).

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{simulate, BallSpec, BallState, SimError, SimOptions, JAW};
use crate::geometry::{line_intersection, GeometryError, Table, Vec2};
use crate::orbits::Anchor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("shape vector has {got} components, a {sides}-gon needs {expected}")]
    Dimension {
        sides: usize,
        expected: usize,
        got: usize,
    },
    #[error("perturbed polygon is not convex: {0}")]
    NonConvex(String),
    #[error("reference run has {got} symbols, fewer than k = {k}")]
    ReferenceTooShort { k: usize, got: usize },
    #[error("perturbed launch leaves side {side} (s = {s})")]
    LaunchOffSide { side: usize, s: f64 },
    #[error("δ ladder must be non-empty, positive and increasing")]
    BadLadder,
    #[error(transparent)]
    Simulation(#[from] SimError),
}

impl From<GeometryError> for StabilityError {
    fn from(e: GeometryError) -> Self {
        StabilityError::NonConvex(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    Kinematic,
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationSpec {
    /// Shift along the launch side (cm) and launch-angle tilt (rad).
    Kinematic { ds: f64, dtheta: f64 },
    Geometric(Vec<f64>),
}

impl PerturbationSpec {
    pub fn zero_kinematic() -> Self {
        PerturbationSpec::Kinematic {
            ds: 0.0,
            dtheta: 0.0,
        }
    }
}

pub fn shape_dimension(sides: usize) -> usize {
    2 * sides - 4
}

/// Index of the side whose length and direction are held fixed.
fn reference_side(table: &Table) -> usize {
    table.side_index(JAW).unwrap_or(0)
}

/// Apply a shape-space vector to a table. The reference side (the jaw line
/// if the table has one, else side 0) keeps its position and length.
pub fn perturb_polygon(table: &Table, g: &[f64]) -> Result<Table, StabilityError> {
    let p = table.sides();
    let dim = shape_dimension(p);
    if g.len() != dim {
        return Err(StabilityError::Dimension {
            sides: p,
            expected: dim,
            got: g.len(),
        });
    }
    if g.iter().all(|x| *x == 0.0) {
        return Ok(table.clone());
    }
    let poly = table.polygon();
    let base = reference_side(table);
    let side = |i: usize| (base + i) % p;
    // Interior angle at the start vertex of relative side i.
    let mut angles: Vec<f64> = (0..p).map(|i| poly.interior_angle(side(i))).collect();
    let mut comp = 0.0;
    for i in 1..p {
        angles[i] += g[i - 1];
        comp += g[i - 1];
    }
    angles[0] -= comp;
    if let Some(i) = angles.iter().position(|a| !(*a > 0.0 && *a < std::f64::consts::PI)) {
        return Err(StabilityError::NonConvex(format!(
            "interior angle {} at vertex {}",
            angles[i],
            side(i)
        )));
    }
    let mut lengths: Vec<f64> = (0..p).map(|i| poly.side_length(side(i))).collect();
    for i in 1..p.saturating_sub(2) {
        lengths[i] *= 1.0 + g[p - 1 + i - 1];
    }
    let phi0 = poly.tangent(side(0)).angle();
    let mut dirs = Vec::with_capacity(p);
    let mut phi = phi0;
    for (i, a) in angles.iter().enumerate() {
        if i > 0 {
            phi += std::f64::consts::PI - a;
        }
        dirs.push(Vec2::from_angle(phi));
    }
    // Solve the last two lengths so the boundary closes.
    let mut partial = Vec2::ZERO;
    for i in 0..p - 2 {
        partial = partial + dirs[i] * lengths[i];
    }
    let end = line_intersection(partial, dirs[p - 2], Vec2::ZERO, dirs[p - 1])
        .ok_or_else(|| StabilityError::NonConvex("closing sides are parallel".into()))?;
    lengths[p - 2] = (end - partial).dot(dirs[p - 2]);
    lengths[p - 1] = -end.dot(dirs[p - 1]);
    if let Some(i) = lengths.iter().position(|l| !(*l > 0.0)) {
        return Err(StabilityError::NonConvex(format!(
            "side {} would have length {}",
            side(i),
            lengths[i]
        )));
    }
    let origin = poly.vertex(side(0));
    let mut rel = vec![Vec2::ZERO; p];
    let mut at = origin;
    for i in 0..p {
        rel[side(i)] = at;
        at = at + dirs[i] * lengths[i];
    }
    let mut out = Table::new(rel, table.labels().iter().cloned())?;
    for v in 0..p {
        if let Some(name) = table.corner_label(v) {
            out = out.with_corner_label(v, name);
        }
    }
    Ok(out)
}

/// Table and launch state after applying a perturbation to an anchored run.
pub fn perturbed_launch(
    table: &Table,
    anchor: &Anchor,
    delta: &PerturbationSpec,
) -> Result<(Table, BallState), StabilityError> {
    match delta {
        PerturbationSpec::Kinematic { ds, dtheta } => {
            let s = anchor.s + ds;
            let len = table.polygon().side_length(anchor.side);
            if !(s > 0.0 && s < len) {
                return Err(StabilityError::LaunchOffSide {
                    side: anchor.side,
                    s,
                });
            }
            let a = Anchor {
                s,
                angle: anchor.angle + dtheta,
                ..*anchor
            };
            Ok((table.clone(), a.launch(table)))
        }
        PerturbationSpec::Geometric(g) => {
            let t = perturb_polygon(table, g)?;
            let frac = anchor.s / table.polygon().side_length(anchor.side);
            let a = Anchor {
                s: frac * t.polygon().side_length(anchor.side),
                ..*anchor
            };
            let launch = a.launch(&t);
            Ok((t, launch))
        }
    }
}

fn prefix(table: &Table, init: BallState, k: usize) -> Result<Vec<String>, SimError> {
    let t = simulate(table, init, &BallSpec::point(), &SimOptions::with_max_events(k))?;
    let mut w = t.word();
    w.truncate(k);
    Ok(w)
}

fn reference_prefix(table: &Table, anchor: &Anchor, k: usize) -> Result<Vec<String>, StabilityError> {
    let t = simulate(
        table,
        anchor.launch(table),
        &BallSpec::point(),
        &SimOptions::with_max_events(k),
    )?;
    if t.events.len() < k {
        return Err(StabilityError::ReferenceTooShort {
            k,
            got: t.events.len(),
        });
    }
    Ok(t.word())
}

/// Position of the first symbol that differs, or `None` when the first `k`
/// symbols agree. Invalid perturbed configurations diverge at 0.
fn divergence(
    table: &Table,
    anchor: &Anchor,
    delta: &PerturbationSpec,
    reference: &[String],
) -> Option<usize> {
    let Ok((t, init)) = perturbed_launch(table, anchor, delta) else {
        return Some(0);
    };
    let Ok(w) = prefix(&t, init, reference.len()) else {
        return Some(0);
    };
    (0..reference.len()).find(|&i| w.get(i) != Some(&reference[i]))
}

/// Whether the first `k` symbols survive the perturbation.
pub fn word_prefix_invariant(
    table: &Table,
    anchor: &Anchor,
    delta: &PerturbationSpec,
    k: usize,
) -> Result<bool, StabilityError> {
    let reference = reference_prefix(table, anchor, k)?;
    let (t, init) = perturbed_launch(table, anchor, delta)?;
    Ok(prefix(&t, init, k)? == reference)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub delta: f64,
    pub sample: usize,
    /// First symbol index that changed.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub kind: PerturbationKind,
    pub ladder: Vec<f64>,
    pub passes: Vec<usize>,
    /// Largest δ such that every sample passes at it and at every smaller rung.
    pub radius: f64,
    /// Some rung above the radius passed fully again.
    pub non_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub id: String,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    /// Dimensionless: δs = δ·diameter·u, δθ = δ·v with (u, v) a unit vector.
    pub kinematic_radius: Option<f64>,
    pub kinematic_ds_cm: Option<f64>,
    pub kinematic_dtheta: Option<f64>,
    pub geometric_radius: Option<f64>,
    pub sweeps: Vec<Sweep>,
    pub failures: Vec<Failure>,
}

impl StabilityReport {
    /// Merge the sweeps of another report for the same run.
    pub fn combine(mut self, other: StabilityReport) -> StabilityReport {
        self.kinematic_radius = self.kinematic_radius.or(other.kinematic_radius);
        self.kinematic_ds_cm = self.kinematic_ds_cm.or(other.kinematic_ds_cm);
        self.kinematic_dtheta = self.kinematic_dtheta.or(other.kinematic_dtheta);
        self.geometric_radius = self.geometric_radius.or(other.geometric_radius);
        self.sweeps.extend(other.sweeps);
        self.failures.extend(other.failures);
        self
    }

    /// `kind,delta,pass_rate` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,delta,pass_rate\n");
        for sw in &self.sweeps {
            let kind = match sw.kind {
                PerturbationKind::Kinematic => "kinematic",
                PerturbationKind::Geometric => "geometric",
            };
            for (d, n) in sw.ladder.iter().zip(&sw.passes) {
                let rate = *n as f64 / self.samples as f64;
                writeln!(out, "{kind},{d},{rate}").expect("writing to a String cannot fail");
            }
        }
        out
    }
}

/// `n` log-spaced rungs from `lo` to `hi`.
pub fn log_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn unit_directions(kind: PerturbationKind, dim: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| match kind {
            PerturbationKind::Kinematic => {
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                vec![phi.cos(), phi.sin()]
            }
            PerturbationKind::Geometric => loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-12 {
                    break v.into_iter().map(|x| x / n).collect();
                }
            },
        })
        .collect()
}

/// Empirical stability radius of the run launched from `anchor`. The same
/// sampled directions are scaled along the whole ladder.
pub fn stability_radius(
    table: &Table,
    anchor: &Anchor,
    kind: PerturbationKind,
    k: usize,
    ladder: &[f64],
    samples: usize,
    seed: u64,
) -> Result<StabilityReport, StabilityError> {
    if ladder.is_empty()
        || ladder[0] <= 0.0
        || ladder.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(StabilityError::BadLadder);
    }
    let reference = reference_prefix(table, anchor, k)?;
    let diam = table.diameter();
    let dim = shape_dimension(table.sides());
    let dirs = unit_directions(kind, dim, samples, seed);
    let perturbation = |delta: f64, u: &[f64]| match kind {
        PerturbationKind::Kinematic => PerturbationSpec::Kinematic {
            ds: delta * diam * u[0],
            dtheta: delta * u[1],
        },
        PerturbationKind::Geometric => {
            PerturbationSpec::Geometric(u.iter().map(|x| x * delta).collect())
        }
    };
    let grid: Vec<(usize, usize)> = (0..ladder.len())
        .flat_map(|r| (0..samples).map(move |s| (r, s)))
        .collect();
    let outcome: Vec<Option<usize>> = grid
        .par_iter()
        .map(|&(r, s)| divergence(table, anchor, &perturbation(ladder[r], &dirs[s]), &reference))
        .collect();
    let mut passes = vec![0; ladder.len()];
    let mut failures = Vec::new();
    for (&(r, s), out) in grid.iter().zip(&outcome) {
        match out {
            None => passes[r] += 1,
            Some(position) => failures.push(Failure {
                delta: ladder[r],
                sample: s,
                position: *position,
            }),
        }
    }
    let full = |r: usize| passes[r] == samples;
    let held = (0..ladder.len()).take_while(|&r| full(r)).count();
    let radius = if held == 0 { 0.0 } else { ladder[held - 1] };
    let non_monotone = (held..ladder.len()).any(full);
    let mut report = StabilityReport {
        id: format!("{}@{}:{:.6}:{:.6}", table.label(anchor.side), anchor.side, anchor.s, anchor.angle),
        k,
        samples,
        seed,
        kinematic_radius: None,
        kinematic_ds_cm: None,
        kinematic_dtheta: None,
        geometric_radius: None,
        sweeps: vec![Sweep {
            kind,
            ladder: ladder.to_vec(),
            passes,
            radius,
            non_monotone,
        }],
        failures,
    };
    match kind {
        PerturbationKind::Kinematic => {
            report.kinematic_radius = Some(radius);
            report.kinematic_ds_cm = Some(radius * diam);
            report.kinematic_dtheta = Some(radius);
        }
        PerturbationKind::Geometric => report.geometric_radius = Some(radius),
    }
    Ok(report)
}

/// Both sweeps with one seed.
pub fn assess(
    table: &Table,
    anchor: &Anchor,
    k: usize,
    ladder: &[f64],
    samples: usize,
    seed: u64,
) -> Result<StabilityReport, StabilityError> {
    let kin = stability_radius(table, anchor, PerturbationKind::Kinematic, k, ladder, samples, seed)?;
    let geo = stability_radius(table, anchor, PerturbationKind::Geometric, k, ladder, samples, seed)?;
    Ok(kin.combine(geo))
}
