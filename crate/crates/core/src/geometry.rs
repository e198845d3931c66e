//! Billiard tables: convex polygons with labelled sides, the articulated oral
//! polygon, and the two similarity-style transforms the dynamics relies on
//! (uniform rescaling and inward erosion for a finite ball).
//!
//! All polygons are stored counterclockwise. Side `i` runs from vertex `i` to
//! vertex `i + 1`; its inward normal is the left normal of its tangent.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used when checking strict convexity and side collapse.
const SHAPE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NonConvex(usize),
    #[error("polygon vertices must be counterclockwise")]
    Clockwise,
    #[error("polygon winds more than once (self-intersecting)")]
    SelfIntersecting,
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("expected {expected} side labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("scale {0} cm is outside the 6..=10 cm jaw-line range")]
    ScaleOutOfRange(f64),
    #[error("rescale factor must be positive and finite, got {0}")]
    BadFactor(f64),
    #[error("erosion radius must be non-negative and finite, got {0}")]
    NegativeRadius(f64),
    #[error("erosion radius {radius} collapses side {side}")]
    RadiusTooLarge { radius: f64, side: usize },
    #[error("unknown side label {0:?}")]
    UnknownLabel(String),
    #[error("oral polygon labels must run ʔ,χ,x,xⁱ,ç,θ counterclockwise: {0}")]
    LabelOrder(String),
    #[error("labial corner must be the θ/ʔ vertex ({expected}), got {got}")]
    LabialCorner { expected: usize, got: usize },
    #[error("invalid articulator setting: {0}")]
    Articulator(String),
    #[error("config: {0}")]
    Config(String),
}

/// A point or vector in the plane, in centimetres.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Rotate by +90°.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotated(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Intersection of the lines `p + t·d` and `q + u·e`; `None` when parallel.
pub fn line_intersection(p: Vec2, d: Vec2, q: Vec2, e: Vec2) -> Option<Vec2> {
    let den = d.cross(e);
    if den.abs() <= SHAPE_EPS * d.norm() * e.norm() {
        return None;
    }
    let t = (q - p).cross(e) / den;
    Some(p + d * t)
}

/// Strictly convex, counterclockwise polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        let area2: f64 = (0..n)
            .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
            .sum();
        if area2 <= 0.0 {
            return Err(GeometryError::Clockwise);
        }
        let mut turning = 0.0;
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            let e0 = b - a;
            let e1 = c - b;
            let scale = e0.norm() * e1.norm();
            if scale == 0.0 || e0.cross(e1) <= SHAPE_EPS * scale {
                return Err(GeometryError::NonConvex(i));
            }
            turning += e0.cross(e1).atan2(e0.dot(e1));
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(GeometryError::SelfIntersecting);
        }
        Ok(Self { vertices })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.len()]
    }

    /// Endpoints of side `i`.
    #[inline]
    pub fn side(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn side_length(&self, i: usize) -> f64 {
        let (a, b) = self.side(i);
        a.distance(b)
    }

    /// Unit tangent of side `i` (counterclockwise traversal).
    pub fn tangent(&self, i: usize) -> Vec2 {
        let (a, b) = self.side(i);
        (b - a).normalized()
    }

    pub fn inward_normal(&self, i: usize) -> Vec2 {
        self.tangent(i).perp()
    }

    /// Interior angle at vertex `i`, between sides `i - 1` and `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let a = self.vertex(i + n - 1);
        let b = self.vertex(i);
        let c = self.vertex(i + 1);
        let u = a - b;
        let v = c - b;
        u.cross(v).abs().atan2(u.dot(v))
    }

    pub fn interior_angles(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.interior_angle(i)).collect()
    }

    /// Counterclockwise turn from the direction of side `from` to that of side `to`, in `[0, 2π)`.
    pub fn turning_between(&self, from: usize, to: usize) -> f64 {
        let a = self.tangent(from).angle();
        let b = self.tangent(to).angle();
        (b - a).rem_euclid(2.0 * PI)
    }

    /// Opening angle of the wedge formed by the lines of two sides, on the
    /// side that contains the polygon. For adjacent sides this is the
    /// interior angle at their shared vertex; for parallel sides it is 0.
    pub fn wedge_angle(&self, i: usize, j: usize) -> f64 {
        let tau = self.turning_between(i, j);
        PI - tau.min(2.0 * PI - tau)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(*b));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        let n = self.len();
        0.5 * (0..n)
            .map(|i| self.vertex(i).cross(self.vertex(i + 1)))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let mut c = Vec2::ZERO;
        let mut a2 = 0.0;
        for i in 0..n {
            let (p, q) = self.side(i);
            let w = p.cross(q);
            a2 += w;
            c = c + (p + q) * w;
        }
        c * (1.0 / (3.0 * a2))
    }

    /// Signed distance from side `i`'s line, positive inside.
    pub fn side_distance(&self, i: usize, p: Vec2) -> f64 {
        let (a, _) = self.side(i);
        self.inward_normal(i).dot(p - a)
    }

    /// Minimum signed distance to all side lines; positive strictly inside.
    pub fn depth(&self, p: Vec2) -> f64 {
        (0..self.len())
            .map(|i| self.side_distance(i, p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Vec2, margin: f64) -> bool {
        self.depth(p) >= -margin
    }

    /// Point on side `i` at arc length `s` from its start vertex.
    pub fn point_on_side(&self, i: usize, s: f64) -> Vec2 {
        let (a, _) = self.side(i);
        a + self.tangent(i) * s
    }

    pub fn scaled(&self, k: f64) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| *v * k).collect(),
        }
    }
}

/// A billiard table: a convex polygon whose sides (and optionally corners)
/// carry symbolic labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    polygon: ConvexPolygon,
    labels: Vec<String>,
    corner_labels: Vec<Option<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(
        vertices: Vec<Vec2>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, GeometryError> {
        let polygon = ConvexPolygon::new(vertices)?;
        Self::from_polygon(polygon, labels)
    }

    pub fn from_polygon<S: Into<String>>(
        polygon: ConvexPolygon,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, GeometryError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != polygon.len() {
            return Err(GeometryError::LabelCount {
                expected: polygon.len(),
                got: labels.len(),
            });
        }
        let corner_labels = vec![None; polygon.len()];
        Ok(Self {
            polygon,
            labels,
            corner_labels,
        })
    }

    /// Table with sides labelled `a`, `b`, `c`, ... in counterclockwise order.
    pub fn lettered(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        let labels: Vec<String> = (0..n)
            .map(|i| char::from(b'a' + (i % 26) as u8).to_string())
            .collect();
        Self::new(vertices, labels)
    }

    pub fn with_corner_label(mut self, vertex: usize, label: impl Into<String>) -> Self {
        let n = self.polygon.len();
        self.corner_labels[vertex % n] = Some(label.into());
        self
    }

    #[inline]
    pub fn polygon(&self) -> &ConvexPolygon {
        &self.polygon
    }

    #[inline]
    pub fn sides(&self) -> usize {
        self.polygon.len()
    }

    #[inline]
    pub fn label(&self, side: usize) -> &str {
        &self.labels[side % self.labels.len()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn corner_label(&self, vertex: usize) -> Option<&str> {
        self.corner_labels[vertex % self.corner_labels.len()].as_deref()
    }

    pub fn side_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn diameter(&self) -> f64 {
        self.polygon.diameter()
    }

    fn with_polygon(&self, polygon: ConvexPolygon) -> Table {
        Table {
            polygon,
            labels: self.labels.clone(),
            corner_labels: self.corner_labels.clone(),
        }
    }
}

impl AsRef<Table> for Table {
    fn as_ref(&self) -> &Table {
        self
    }
}

/// Multiply every vertex by `factor` about the origin.
pub fn rescale(table: &Table, factor: f64) -> Result<Table, GeometryError> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(GeometryError::BadFactor(factor));
    }
    Ok(table.with_polygon(table.polygon.scaled(factor)))
}

/// Inward offset of every side by `radius`. The centre of a ball of that
/// radius moves as a point billiard in the result.
pub fn erode(table: &Table, radius: f64) -> Result<Table, GeometryError> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(GeometryError::NegativeRadius(radius));
    }
    if radius == 0.0 {
        return Ok(table.clone());
    }
    let poly = &table.polygon;
    let n = poly.len();
    let lines: Vec<(Vec2, Vec2)> = (0..n)
        .map(|i| {
            let (a, _) = poly.side(i);
            (a + poly.inward_normal(i) * radius, poly.tangent(i))
        })
        .collect();
    let mut vertices = Vec::with_capacity(n);
    for i in 0..n {
        let (p, d) = lines[(i + n - 1) % n];
        let (q, e) = lines[i];
        let v = line_intersection(p, d, q, e)
            .ok_or(GeometryError::RadiusTooLarge { radius, side: i })?;
        vertices.push(v);
    }
    let min_len = 1e-9 * poly.diameter();
    for i in 0..n {
        let along = (vertices[(i + 1) % n] - vertices[i]).dot(lines[i].1);
        if along <= min_len {
            return Err(GeometryError::RadiusTooLarge { radius, side: i });
        }
    }
    let eroded = ConvexPolygon::new(vertices)
        .map_err(|_| GeometryError::RadiusTooLarge { radius, side: 0 })?;
    Ok(table.with_polygon(eroded))
}

/// The seven symbols of the polygonal alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideLabel {
    /// Jaw line (and glottis).
    Glottal,
    /// Labial corner; a vertex, never a side.
    Labial,
    DentalAlveolar,
    AlveolarPalatal,
    VelarPalatal,
    Velar,
    UvularPharyngeal,
}

impl SideLabel {
    pub const ALL: [SideLabel; 7] = [
        SideLabel::Glottal,
        SideLabel::Labial,
        SideLabel::DentalAlveolar,
        SideLabel::AlveolarPalatal,
        SideLabel::VelarPalatal,
        SideLabel::Velar,
        SideLabel::UvularPharyngeal,
    ];

    /// Counterclockwise side order of the open-velum oral polygon.
    pub const SIDE_ORDER: [SideLabel; 6] = [
        SideLabel::Glottal,
        SideLabel::UvularPharyngeal,
        SideLabel::Velar,
        SideLabel::VelarPalatal,
        SideLabel::AlveolarPalatal,
        SideLabel::DentalAlveolar,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            SideLabel::Glottal => "ʔ",
            SideLabel::Labial => "ϕ",
            SideLabel::DentalAlveolar => "θ",
            SideLabel::AlveolarPalatal => "ç",
            SideLabel::VelarPalatal => "xⁱ",
            SideLabel::Velar => "x",
            SideLabel::UvularPharyngeal => "χ",
        }
    }

    pub fn place_name(self) -> &'static str {
        match self {
            SideLabel::Glottal => "glottal",
            SideLabel::Labial => "labial",
            SideLabel::DentalAlveolar => "dental-alveolar",
            SideLabel::AlveolarPalatal => "alveolar-palatal",
            SideLabel::VelarPalatal => "velar-palatal",
            SideLabel::Velar => "velar",
            SideLabel::UvularPharyngeal => "uvular-pharyngeal",
        }
    }

    pub fn is_corner(self) -> bool {
        self == SideLabel::Labial
    }
}

impl fmt::Display for SideLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for SideLabel {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // λ is the figures' spelling of the jaw line.
        Ok(match s.trim() {
            "ʔ" | "?" | "λ" => SideLabel::Glottal,
            "ϕ" | "φ" | "ɸ" | "Φ" => SideLabel::Labial,
            "θ" => SideLabel::DentalAlveolar,
            "ç" => SideLabel::AlveolarPalatal,
            "xⁱ" | "xi" | "x'" | "x^i" => SideLabel::VelarPalatal,
            "x" => SideLabel::Velar,
            "χ" => SideLabel::UvularPharyngeal,
            other => return Err(GeometryError::UnknownLabel(other.to_string())),
        })
    }
}

impl Serialize for SideLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for SideLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Positions of the two movable sides. Angles in radians, lengths in cm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Articulators {
    #[serde(default)]
    pub jaw_drop: f64,
    #[serde(default)]
    pub jaw_hinge: f64,
    #[serde(default)]
    pub velum_hinge: f64,
    #[serde(default)]
    pub velum_closed: bool,
}

impl Articulators {
    fn validate(&self) -> Result<(), GeometryError> {
        for (name, v) in [
            ("jaw_drop", self.jaw_drop),
            ("jaw_hinge", self.jaw_hinge),
            ("velum_hinge", self.velum_hinge),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(GeometryError::Articulator(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.velum_closed && self.velum_hinge != 0.0 {
            return Err(GeometryError::Articulator(
                "velum_hinge must be 0 when the velum is closed".into(),
            ));
        }
        Ok(())
    }
}

/// On-disk polygon description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub vertices: Vec<Vec2>,
    pub side_labels: Vec<SideLabel>,
    pub labial_corner: usize,
    #[serde(default)]
    pub jaw_drop: f64,
    #[serde(default)]
    pub jaw_hinge: f64,
    #[serde(default)]
    pub velum_hinge: f64,
    #[serde(default)]
    pub velum_closed: bool,
    /// Jaw-line length the neutral vertices are rescaled to, if given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl PolygonConfig {
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| GeometryError::Config(e.to_string()))
    }

    pub fn articulators(&self) -> Articulators {
        Articulators {
            jaw_drop: self.jaw_drop,
            jaw_hinge: self.jaw_hinge,
            velum_hinge: self.velum_hinge,
            velum_closed: self.velum_closed,
        }
    }
}

/// The canonical open-velum reference geometry, jaw line 8 cm.
pub const DEFAULT_POLYGON_JSON: &str = include_str!("../data/oral_polygon.json");

/// The articulated oral polygon.
///
/// Holds the neutral hexagon and the articulator setting; the current shape
/// (a hexagon, or a pentagon with the velum closed) is derived from both.
#[derive(Clone, Debug, PartialEq)]
pub struct OralPolygon {
    neutral: ConvexPolygon,
    /// Index of the ʔ side in `neutral`; the neutral order is fixed by [`SideLabel::SIDE_ORDER`].
    jaw_side: usize,
    articulators: Articulators,
    table: Table,
    side_labels: Vec<SideLabel>,
    labial_corner: usize,
}

impl OralPolygon {
    /// The reference hexagon rescaled to a jaw line of `scale` cm.
    pub fn default_with_scale(scale: f64) -> Result<Self, GeometryError> {
        let mut cfg = PolygonConfig::from_json(DEFAULT_POLYGON_JSON)?;
        cfg.scale = Some(scale);
        Self::from_config(&cfg)
    }

    pub fn from_config(cfg: &PolygonConfig) -> Result<Self, GeometryError> {
        let n = cfg.vertices.len();
        if cfg.side_labels.len() != n {
            return Err(GeometryError::LabelCount {
                expected: n,
                got: cfg.side_labels.len(),
            });
        }
        if n != 6 {
            return Err(GeometryError::Config(format!(
                "neutral oral polygon needs 6 vertices, got {n}"
            )));
        }
        let jaw_side = cfg
            .side_labels
            .iter()
            .position(|l| *l == SideLabel::Glottal)
            .ok_or_else(|| GeometryError::LabelOrder("missing ʔ".into()))?;
        for (k, expected) in SideLabel::SIDE_ORDER.iter().enumerate() {
            let got = cfg.side_labels[(jaw_side + k) % n];
            if got != *expected {
                let listed: Vec<&str> = cfg.side_labels.iter().map(|l| l.symbol()).collect();
                return Err(GeometryError::LabelOrder(listed.join(",")));
            }
        }
        // ϕ is the vertex where θ (the side before ʔ) meets ʔ.
        if cfg.labial_corner != jaw_side {
            return Err(GeometryError::LabialCorner {
                expected: jaw_side,
                got: cfg.labial_corner,
            });
        }
        let mut neutral = ConvexPolygon::new(cfg.vertices.clone())?;
        if let Some(scale) = cfg.scale {
            if !(6.0..=10.0).contains(&scale) {
                return Err(GeometryError::ScaleOutOfRange(scale));
            }
            let current = neutral.side_length(jaw_side);
            neutral = neutral.scaled(scale / current);
        }
        Self::articulate(neutral, jaw_side, cfg.articulators())
    }

    fn articulate(
        neutral: ConvexPolygon,
        jaw_side: usize,
        art: Articulators,
    ) -> Result<Self, GeometryError> {
        art.validate()?;
        let n = neutral.len();
        let idx = |k: usize| (jaw_side + k) % n;
        let jaw = idx(0);
        let chi = idx(1);
        let velum = idx(2);

        let mut lines: Vec<(Vec2, Vec2)> = (0..n)
            .map(|i| (neutral.vertex(i), neutral.tangent(i)))
            .collect();

        // Jaw: lower along the outward normal, then rotate about the ʔ/χ vertex.
        let (jp, jd) = lines[jaw];
        let lowered = jp - neutral.inward_normal(jaw) * art.jaw_drop;
        let (cp, cd) = lines[chi];
        let hinge = line_intersection(lowered, jd, cp, cd)
            .ok_or_else(|| GeometryError::Articulator("jaw parallel to χ".into()))?;
        lines[jaw] = (hinge, jd.rotated(art.jaw_hinge));

        // Velum: rotate side x about the x/xⁱ vertex, dropping its back end.
        if art.velum_hinge != 0.0 {
            let (vp, vd) = lines[velum];
            let pivot = vp + vd * neutral.side_length(velum);
            lines[velum] = (pivot, vd.rotated(-art.velum_hinge));
        }

        let mut vertices = Vec::with_capacity(n);
        for i in 0..n {
            let (p, d) = lines[(i + n - 1) % n];
            let (q, e) = lines[i];
            let v = line_intersection(p, d, q, e).ok_or_else(|| {
                GeometryError::Articulator(format!("sides {} and {} became parallel", i + n - 1, i))
            })?;
            vertices.push(v);
        }

        let mut labels: Vec<SideLabel> = (0..n)
            .map(|i| SideLabel::SIDE_ORDER[(i + n - jaw_side) % n])
            .collect();
        let labial_corner = jaw_side;
        if art.velum_closed {
            // xⁱ and x become one side: drop the vertex between them.
            let merged_vertex = idx(3);
            vertices.remove(merged_vertex);
            labels.remove(merged_vertex);
        }
        let labial_corner = if art.velum_closed && labial_corner > idx(3) {
            labial_corner - 1
        } else {
            labial_corner
        };

        let polygon = ConvexPolygon::new(vertices)?;
        let table = Table::from_polygon(polygon, labels.iter().map(|l| l.symbol()))?
            .with_corner_label(labial_corner, SideLabel::Labial.symbol());
        Ok(Self {
            neutral,
            jaw_side,
            articulators: art,
            table,
            side_labels: labels,
            labial_corner,
        })
    }

    /// Same neutral geometry with a new (absolute) articulator setting.
    pub fn apply_articulators(&self, art: Articulators) -> Result<Self, GeometryError> {
        Self::articulate(self.neutral.clone(), self.jaw_side, art)
    }

    #[inline]
    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn articulators(&self) -> Articulators {
        self.articulators
    }

    pub fn vertices(&self) -> &[Vec2] {
        self.table.polygon().vertices()
    }

    pub fn side_labels(&self) -> &[SideLabel] {
        &self.side_labels
    }

    pub fn labial_corner(&self) -> usize {
        self.labial_corner
    }

    pub fn side_of(&self, label: SideLabel) -> Option<usize> {
        self.side_labels.iter().position(|l| *l == label)
    }

    pub fn jaw_length(&self) -> f64 {
        let jaw = self.side_of(SideLabel::Glottal).expect("jaw side always present");
        self.table.polygon().side_length(jaw)
    }

    /// Wedge angle between the lines of two labelled sides.
    pub fn angle_between(&self, a: SideLabel, b: SideLabel) -> Option<f64> {
        let i = self.side_of(a)?;
        let j = self.side_of(b)?;
        Some(self.table.polygon().wedge_angle(i, j))
    }

    pub fn rescale(&self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(GeometryError::BadFactor(factor));
        }
        Ok(Self {
            neutral: self.neutral.scaled(factor),
            table: rescale(&self.table, factor)?,
            ..self.clone()
        })
    }

    /// Erodes both the neutral and the articulated shape.
    pub fn erode(&self, radius: f64) -> Result<Self, GeometryError> {
        let neutral_table = Table::from_polygon(self.neutral.clone(), vec![""; self.neutral.len()])?;
        Ok(Self {
            neutral: erode(&neutral_table, radius)?.polygon,
            table: erode(&self.table, radius)?,
            ..self.clone()
        })
    }

    pub fn to_config(&self) -> PolygonConfig {
        PolygonConfig {
            version: Some(1),
            vertices: self.neutral.vertices().to_vec(),
            side_labels: (0..6)
                .map(|i| SideLabel::SIDE_ORDER[(i + 6 - self.jaw_side) % 6])
                .collect(),
            labial_corner: self.jaw_side,
            jaw_drop: self.articulators.jaw_drop,
            jaw_hinge: self.articulators.jaw_hinge,
            velum_hinge: self.articulators.velum_hinge,
            velum_closed: self.articulators.velum_closed,
            scale: Some(self.neutral.side_length(self.jaw_side)),
        }
    }
}

impl AsRef<Table> for OralPolygon {
    fn as_ref(&self) -> &Table {
        &self.table
    }
}

/// Build the canonical oral polygon with a jaw line of `scale` cm (6 to 10).
pub fn build_default_polygon(scale: f64) -> Result<OralPolygon, GeometryError> {
    if !(6.0..=10.0).contains(&scale) {
        return Err(GeometryError::ScaleOutOfRange(scale));
    }
    OralPolygon::default_with_scale(scale)
}

/// Radius of the largest inscribed circle, by bisection on erosion feasibility
/// of the half-plane system (not of [`erode`], which also rejects side collapse).
pub fn inradius(poly: &ConvexPolygon) -> f64 {
    // Largest r for which some point has depth >= r; depth is concave, so
    // maximise it with a shrinking pattern search from the centroid.
    let mut p = poly.centroid();
    let mut best = poly.depth(p);
    let mut step = poly.diameter() / 4.0;
    while step > 1e-12 * poly.diameter() {
        let mut improved = false;
        for k in 0..16 {
            let q = p + Vec2::from_angle(k as f64 * PI / 8.0) * step;
            let d = poly.depth(q);
            if d > best {
                best = d;
                p = q;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Per-side collapse radii of an inward offset (side length over the sum of
/// half-angle cotangents at its ends), keyed by side index.
pub fn collapse_radii(poly: &ConvexPolygon) -> BTreeMap<usize, f64> {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly.interior_angle(i);
            let b = poly.interior_angle(i + 1);
            let cot = |x: f64| 1.0 / (x / 2.0).tan();
            (i, poly.side_length(i) / (cot(a) + cot(b)))
        })
        .collect()
}
