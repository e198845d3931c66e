//! The syllable grammar: a transition system over phones whose arcs are
//! labelled with a direction (toward or away from the syllabic) and a
//! phthong rule.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::CxcUnit;
use crate::geometry::SideLabel;
use crate::phonetics::{Inventory, Manner, Phone, PhoneticsError, Phthong, Place};

pub const DEFAULT_GRAMMAR_JSON: &str = include_str!("../data/grammar.json");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("empty phone sequence")]
    Empty,
    #[error("inadmissible transition at token {index}: {reason}")]
    InadmissibleTransition { index: usize, reason: String },
    #[error("no token can serve as a syllabic")]
    NoSyllabic,
    #[error("open closure at token {index}")]
    OpenClosure { index: usize },
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("grammar file: {0}")]
    Parse(String),
    #[error("unknown side symbol {0:?}")]
    UnknownSide(String),
    #[error("{words} symbols but {manners} manners")]
    LengthMismatch { words: usize, manners: usize },
    #[error(transparent)]
    Phonetics(#[from] PhoneticsError),
}

impl GrammarError {
    /// Token index the error points at, if any.
    pub fn index(&self) -> Option<usize> {
        match self {
            GrammarError::InadmissibleTransition { index, .. } | GrammarError::OpenClosure { index } => {
                Some(*index)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    /// Self-loop: the node is prolonged, neither rising nor falling.
    Level,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Level => "level",
        })
    }
}

/// How an arc constrains the phthongs at its two ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Homorganic,
    Diphthongal,
    /// Collision to collision between the roof and the jaw line.
    Flight,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrammarArc {
    pub from: Manner,
    pub to: Manner,
    pub direction: Direction,
    pub homorganic: bool,
    pub diphthongal: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flight: bool,
}

impl GrammarArc {
    pub fn kind(&self) -> ArcKind {
        if self.homorganic {
            ArcKind::Homorganic
        } else if self.diphthongal {
            ArcKind::Diphthongal
        } else if self.flight {
            ArcKind::Flight
        } else {
            ArcKind::Free
        }
    }

    /// Whether the phthongs of `a` and `b` satisfy this arc's rule.
    pub fn admits(&self, a: &Phone, b: &Phone) -> bool {
        if a.manner() != self.from || b.manner() != self.to {
            return false;
        }
        let same = a.phthong() == b.phthong();
        match self.kind() {
            ArcKind::Homorganic => same,
            ArcKind::Diphthongal => {
                !(self.from == self.to && matches!(self.from, Manner::H | Manner::V) && same)
            }
            ArcKind::Flight => (a.place() == Place::Glottal) != (b.place() == Place::Glottal),
            ArcKind::Free => true,
        }
    }
}

fn is_jaw_manner(m: Manner) -> bool {
    matches!(m, Manner::A | Manner::C | Manner::H)
}

/// The largest arc set that honours every stated prohibition.
pub fn build_default_grammar() -> Grammar {
    use Manner::*;
    let mut arcs = Vec::new();
    let arc = |from, to, direction, kind: ArcKind| GrammarArc {
        from,
        to,
        direction,
        homorganic: kind == ArcKind::Homorganic,
        diphthongal: kind == ArcKind::Diphthongal,
        flight: kind == ArcKind::Flight,
    };
    for from in Manner::ALL {
        for to in Manner::ALL {
            if from == to {
                if from.is_continuant() {
                    arcs.push(arc(from, to, Direction::Level, ArcKind::Homorganic));
                }
                if matches!(from, H | V | Closure) {
                    arcs.push(arc(from, to, Direction::Level, ArcKind::Diphthongal));
                }
                continue;
            }
            match (from, to) {
                (H, V) => {
                    arcs.push(arc(from, to, Direction::Down, ArcKind::Diphthongal));
                    continue;
                }
                (V, H) => {
                    arcs.push(arc(from, to, Direction::Up, ArcKind::Diphthongal));
                    continue;
                }
                _ => {}
            }
            let kind = if from == Closure || to == Closure || is_jaw_manner(from) == is_jaw_manner(to) {
                ArcKind::Homorganic
            } else {
                ArcKind::Flight
            };
            let up = from != A;
            let down = !matches!(to, A | P | C);
            if up {
                arcs.push(arc(from, to, Direction::Up, kind));
            }
            if down {
                arcs.push(arc(from, to, Direction::Down, kind));
            }
        }
    }
    Grammar::from_arcs(arcs).expect("default arcs are consistent")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grammar {
    arcs: Vec<GrammarArc>,
}

impl Default for Grammar {
    fn default() -> Self {
        build_default_grammar()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyllableParse {
    /// Token range `[start, end)`; a boundary token closes one span and opens the next.
    pub span: [usize; 2],
    pub onset: Vec<usize>,
    pub syllabic: usize,
    /// The syllabic and its same-node prolongations.
    pub nucleus: Vec<usize>,
    pub coda: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    /// Index of the token the arc enters.
    pub index: usize,
    pub direction: Direction,
    pub kind: ArcKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parse {
    pub syllables: Vec<SyllableParse>,
    pub boundaries: Vec<usize>,
    pub syllabics: Vec<usize>,
    pub transitions: Vec<Transition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Onset,
    Syllabic,
    Coda,
    Boundary,
}

const UP: u8 = 1;
const DOWN: u8 = 2;

fn bit(d: Direction) -> u8 {
    match d {
        Direction::Up => UP,
        Direction::Down => DOWN,
        Direction::Level => 0,
    }
}

pub fn may_be_syllabic(m: Manner) -> bool {
    !matches!(m, Manner::P | Manner::Closure)
}

pub fn may_be_boundary(m: Manner) -> bool {
    !matches!(m, Manner::A | Manner::C | Manner::P)
}

/// Node admissibility given the directions of the arcs entering and leaving it.
fn node_ok(m: Manner, inn: Option<u8>, out: Option<u8>) -> bool {
    match (inn, out) {
        (None, None) | (None, Some(DOWN)) | (Some(UP), None) | (Some(UP), Some(DOWN)) => {
            may_be_syllabic(m)
        }
        (Some(DOWN), Some(UP)) => may_be_boundary(m),
        _ => true,
    }
}

struct Node {
    start: usize,
    end: usize,
    manner: Manner,
}

impl Grammar {
    pub fn from_arcs(arcs: Vec<GrammarArc>) -> Result<Self, GrammarError> {
        let mut seen = std::collections::HashSet::new();
        for a in &arcs {
            let flags = a.homorganic as u8 + a.diphthongal as u8 + a.flight as u8;
            if flags > 1 {
                return Err(GrammarError::InvalidArc(format!(
                    "{}→{} {} carries more than one phthong rule",
                    a.from, a.to, a.direction
                )));
            }
            if a.direction == Direction::Level && a.from != a.to {
                return Err(GrammarError::InvalidArc(format!(
                    "level arc {}→{} is not a self-loop",
                    a.from, a.to
                )));
            }
            if !seen.insert(*a) {
                return Err(GrammarError::InvalidArc(format!(
                    "duplicate arc {}→{} {}",
                    a.from, a.to, a.direction
                )));
            }
        }
        Ok(Self { arcs })
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let arcs: Vec<GrammarArc> =
            serde_json::from_str(text).map_err(|e| GrammarError::Parse(e.to_string()))?;
        Self::from_arcs(arcs)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.arcs).expect("plain data");
        s.push('\n');
        s
    }

    pub fn arcs(&self) -> &[GrammarArc] {
        &self.arcs
    }

    /// Arcs admitting the transition `a → b`, homorganic first.
    pub fn admissible(&self, a: &Phone, b: &Phone) -> Vec<GrammarArc> {
        let mut v: Vec<GrammarArc> = self.arcs.iter().filter(|arc| arc.admits(a, b)).copied().collect();
        v.sort_by_key(|arc| match arc.kind() {
            ArcKind::Homorganic => 0,
            ArcKind::Flight => 1,
            ArcKind::Diphthongal => 2,
            ArcKind::Free => 3,
        });
        v
    }

    fn pick(&self, a: &Phone, b: &Phone, d: Direction) -> Option<GrammarArc> {
        self.admissible(a, b).into_iter().find(|arc| arc.direction == d)
    }

    /// Parse a phone sequence into syllables. Where arc directions are
    /// ambiguous the earliest transition prefers `down`, extending the coda.
    pub fn validate(&self, tokens: &[Phone]) -> Result<Parse, GrammarError> {
        if tokens.is_empty() {
            return Err(GrammarError::Empty);
        }
        // Per-transition direction sets; level transitions merge tokens into nodes.
        let mut dirs = Vec::with_capacity(tokens.len());
        for i in 1..tokens.len() {
            let arcs = self.admissible(&tokens[i - 1], &tokens[i]);
            if arcs.is_empty() {
                return Err(GrammarError::InadmissibleTransition {
                    index: i,
                    reason: transition_reason(&tokens[i - 1], &tokens[i]),
                });
            }
            if arcs.iter().any(|a| a.direction == Direction::Level) {
                dirs.push(None);
            } else {
                dirs.push(Some(arcs.iter().fold(0u8, |m, a| m | bit(a.direction))));
            }
        }
        if tokens[0].manner() == Manner::Closure {
            return Err(GrammarError::OpenClosure { index: 0 });
        }
        if tokens[tokens.len() - 1].manner() == Manner::Closure {
            return Err(GrammarError::OpenClosure {
                index: tokens.len() - 1,
            });
        }

        let mut nodes: Vec<Node> = vec![Node {
            start: 0,
            end: 1,
            manner: tokens[0].manner(),
        }];
        let mut edges: Vec<u8> = Vec::new();
        for (i, d) in dirs.iter().enumerate() {
            match d {
                None => nodes.last_mut().expect("nonempty").end = i + 2,
                Some(mask) => {
                    edges.push(*mask);
                    nodes.push(Node {
                        start: i + 1,
                        end: i + 2,
                        manner: tokens[i + 1].manner(),
                    });
                }
            }
        }
        let n = nodes.len();

        // feasible[j][d]: nodes j.. can be completed when node j is entered by d (0 = none).
        let mut feasible = vec![[false; 3]; n];
        for inn in 0..3u8 {
            let i = if inn == 0 { None } else { Some(inn) };
            feasible[n - 1][inn as usize] = node_ok(nodes[n - 1].manner, i, None);
        }
        for j in (0..n - 1).rev() {
            for inn in 0..3u8 {
                let i = if inn == 0 { None } else { Some(inn) };
                feasible[j][inn as usize] = [DOWN, UP].iter().any(|&out| {
                    edges[j] & out != 0 && node_ok(nodes[j].manner, i, Some(out)) && feasible[j + 1][out as usize]
                });
            }
        }
        if !feasible[0][0] {
            return Err(self.diagnose(tokens, &nodes, &edges));
        }

        let mut chosen = Vec::with_capacity(n - 1);
        let mut inn: Option<u8> = None;
        for j in 0..n - 1 {
            let out = [DOWN, UP]
                .into_iter()
                .find(|&out| {
                    edges[j] & out != 0
                        && node_ok(nodes[j].manner, inn, Some(out))
                        && feasible[j + 1][out as usize]
                })
                .expect("feasible path exists");
            chosen.push(out);
            inn = Some(out);
        }

        let mut transitions = Vec::with_capacity(tokens.len() - 1);
        let mut edge = 0;
        for i in 1..tokens.len() {
            let d = match dirs[i - 1] {
                None => Direction::Level,
                Some(_) => {
                    let d = if chosen[edge] == UP { Direction::Up } else { Direction::Down };
                    edge += 1;
                    d
                }
            };
            let arc = self.pick(&tokens[i - 1], &tokens[i], d).expect("arc exists");
            transitions.push(Transition {
                index: i,
                direction: d,
                kind: arc.kind(),
            });
        }

        let inn_of = |j: usize| if j == 0 { None } else { Some(chosen[j - 1]) };
        let out_of = |j: usize| if j + 1 == n { None } else { Some(chosen[j]) };
        let mut peaks = Vec::new();
        let mut valleys = Vec::new();
        for j in 0..n {
            match (inn_of(j), out_of(j)) {
                (None, None) | (None, Some(DOWN)) | (Some(UP), None) | (Some(UP), Some(DOWN)) => {
                    peaks.push(j)
                }
                (Some(DOWN), Some(UP)) => valleys.push(j),
                _ => {}
            }
        }
        debug_assert_eq!(peaks.len(), valleys.len() + 1);

        let mut syllables = Vec::with_capacity(peaks.len());
        for (k, &p) in peaks.iter().enumerate() {
            let start = if k == 0 { 0 } else { nodes[valleys[k - 1]].start };
            let end = if k < valleys.len() { nodes[valleys[k]].end } else { tokens.len() };
            let peak = &nodes[p];
            syllables.push(SyllableParse {
                span: [start, end],
                onset: (start..peak.start).collect(),
                syllabic: peak.start,
                nucleus: (peak.start..peak.end).collect(),
                coda: (peak.end..end).collect(),
            });
        }
        Ok(Parse {
            boundaries: valleys.iter().map(|&v| nodes[v].start).collect(),
            syllabics: syllables.iter().map(|s| s.syllabic).collect(),
            syllables,
            transitions,
        })
    }

    fn diagnose(&self, tokens: &[Phone], nodes: &[Node], edges: &[u8]) -> GrammarError {
        if tokens.iter().all(|t| !may_be_syllabic(t.manner())) {
            return GrammarError::NoSyllabic;
        }
        // Forward reachability: the first node that no prefix can enter is the culprit.
        let mut reach: Vec<Option<u8>> = vec![None];
        for (j, node) in nodes.iter().enumerate().take(nodes.len() - 1) {
            let mut next = Vec::new();
            for &inn in &reach {
                for out in [DOWN, UP] {
                    if edges[j] & out != 0 && node_ok(node.manner, inn, Some(out)) && !next.contains(&Some(out)) {
                        next.push(Some(out));
                    }
                }
            }
            if next.is_empty() {
                return GrammarError::InadmissibleTransition {
                    index: nodes[j + 1].start,
                    reason: format!(
                        "/{}/ at token {} can be neither crossed, a syllabic, nor a boundary here",
                        node.manner, node.start
                    ),
                };
            }
            reach = next;
        }
        let last = &nodes[nodes.len() - 1];
        GrammarError::InadmissibleTransition {
            index: last.start,
            reason: format!("sequence cannot end on /{}/ without a legal syllabic", last.manner),
        }
    }

    pub fn syllabify(&self, tokens: &[Phone]) -> Result<Vec<Role>, GrammarError> {
        let parse = self.validate(tokens)?;
        let mut roles = vec![Role::Onset; tokens.len()];
        for s in &parse.syllables {
            for &i in &s.nucleus {
                roles[i] = Role::Syllabic;
            }
            for &i in &s.coda {
                roles[i] = Role::Coda;
            }
        }
        for (k, &b) in parse.boundaries.iter().enumerate() {
            let end = parse.syllables[k].span[1];
            for r in roles.iter_mut().take(end).skip(b) {
                *r = Role::Boundary;
            }
        }
        Ok(roles)
    }

    /// Seeded random walk over the arc set yielding exactly `syllables`
    /// syllables under [`Grammar::validate`].
    pub fn generate(&self, seed: u64, syllables: usize, inventory: &Inventory) -> Vec<Phone> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pools = Pools::new(inventory);
        'restart: loop {
            let mut seq: Vec<Phone> = Vec::new();
            for k in 0..syllables {
                let last = k + 1 == syllables;
                let mut placed = false;
                for _ in 0..256 {
                    let Some(chunk) = self.walk(&mut rng, &pools, seq.last(), last) else {
                        continue;
                    };
                    let base = seq.len();
                    seq.extend(chunk);
                    if self.validate(&seq).is_ok_and(|p| p.syllables.len() == k + 1) {
                        placed = true;
                        break;
                    }
                    seq.truncate(base);
                }
                if !placed {
                    continue 'restart;
                }
            }
            return seq;
        }
    }

    /// One syllable's worth of tokens continuing from `prev` (a boundary),
    /// ending on a legal boundary unless it is the final syllable.
    fn walk(&self, rng: &mut ChaCha8Rng, pools: &Pools, prev: Option<&Phone>, last: bool) -> Option<Vec<Phone>> {
        let mut out = Vec::new();
        let mut cur = match prev {
            Some(p) => p.clone(),
            None => {
                let m = Manner::ALL[rng.random_range(0..7)];
                let ph = Phone::new(pools.any(rng, m)?, m).ok()?;
                out.push(ph.clone());
                ph
            }
        };
        let mut rising = true;
        let mut first = prev.is_some();
        for _ in 0..10 {
            let can_stop = cur.manner() != Manner::Closure
                && (!first || prev.is_none())
                && if last {
                    !rising || may_be_syllabic(cur.manner())
                } else {
                    !rising && may_be_boundary(cur.manner())
                };
            if can_stop && !out.is_empty() && rng.random_bool(0.35) {
                return Some(out);
            }
            let arcs: Vec<GrammarArc> = self
                .arcs
                .iter()
                .filter(|a| a.from == cur.manner())
                .filter(|a| match a.direction {
                    Direction::Level => !first,
                    Direction::Up => rising,
                    Direction::Down => !first && (!rising || may_be_syllabic(cur.manner())),
                })
                .copied()
                .collect();
            if arcs.is_empty() {
                return None;
            }
            let arc = arcs[rng.random_range(0..arcs.len())];
            let next = pools.target(rng, &cur, &arc)?;
            if arc.direction == Direction::Down {
                rising = false;
            }
            first = false;
            out.push(next.clone());
            cur = next;
        }
        None
    }
}

/// Firm phthongs grouped by place class, for the generator.
struct Pools {
    jaw: Vec<Phthong>,
    roof: Vec<Phthong>,
}

impl Pools {
    fn new(inv: &Inventory) -> Self {
        let firm = inv.entries().iter().filter(|p| !p.provisional);
        let (jaw, roof): (Vec<Phthong>, Vec<Phthong>) =
            firm.cloned().partition(|p| p.place == Place::Glottal);
        Self { jaw, roof }
    }

    fn pick(&self, rng: &mut ChaCha8Rng, jaw: bool) -> Option<Phthong> {
        let pool = if jaw { &self.jaw } else { &self.roof };
        if pool.is_empty() {
            return None;
        }
        Some(pool[rng.random_range(0..pool.len())].clone())
    }

    fn any(&self, rng: &mut ChaCha8Rng, m: Manner) -> Option<Phthong> {
        let jaw = match m {
            Manner::A | Manner::C | Manner::H => true,
            Manner::Closure => rng.random_bool(0.5),
            _ => false,
        };
        self.pick(rng, jaw)
    }

    fn target(&self, rng: &mut ChaCha8Rng, cur: &Phone, arc: &GrammarArc) -> Option<Phone> {
        let jaw_now = cur.place() == Place::Glottal;
        let ph = match arc.kind() {
            ArcKind::Homorganic => cur.phthong().clone(),
            ArcKind::Flight => self.pick(rng, !jaw_now)?,
            ArcKind::Diphthongal => {
                let jaw = match arc.to {
                    Manner::H => true,
                    Manner::V => false,
                    _ => jaw_now,
                };
                let mut p = self.pick(rng, jaw)?;
                for _ in 0..8 {
                    if &p != cur.phthong() {
                        break;
                    }
                    p = self.pick(rng, jaw)?;
                }
                p
            }
            ArcKind::Free => self.any(rng, arc.to)?,
        };
        let next = Phone::new(ph, arc.to).ok()?;
        arc.admits(cur, &next).then_some(next)
    }
}

fn transition_reason(a: &Phone, b: &Phone) -> String {
    let (ma, mb) = (a.manner(), b.manner());
    if ma == mb && a.phthong() == b.phthong() {
        format!("/{ma}/ admits no self-transition of the same phone")
    } else if ma == mb {
        format!("/{ma}/→/{mb}/ changes phthong ({} to {}) off every diphthongal arc", a.phthong().symbol, b.phthong().symbol)
    } else {
        format!("no arc from {a} to {b}")
    }
}

/// Prohibited patterns present in a parse; empty for anything `validate` returns.
pub fn violations(tokens: &[Phone], parse: &Parse) -> Vec<String> {
    let mut v = Vec::new();
    for &s in &parse.syllabics {
        if !may_be_syllabic(tokens[s].manner()) {
            v.push(format!("syllabic /{}/ at {s}", tokens[s].manner()));
        }
    }
    for &b in &parse.boundaries {
        if !may_be_boundary(tokens[b].manner()) {
            v.push(format!("boundary /{}/ at {b}", tokens[b].manner()));
        }
    }
    for t in &parse.transitions {
        let (a, b) = (&tokens[t.index - 1], &tokens[t.index]);
        let changes = a.phthong() != b.phthong();
        let roof_jaw = (a.place() == Place::Glottal) != (b.place() == Place::Glottal);
        let diphthongal = match (a.manner(), b.manner()) {
            (Manner::H, Manner::V) | (Manner::V, Manner::H) => true,
            (x, y) => x == y && matches!(x, Manner::H | Manner::V | Manner::Closure),
        };
        if changes && !diphthongal && !(roof_jaw && t.kind == ArcKind::Flight) {
            v.push(format!("phthong change off the diphthongal arcs at {}", t.index));
        }
        if a.manner() == b.manner() && !a.manner().is_continuant() && !changes {
            v.push(format!("self-transition on /{}/ at {}", a.manner(), t.index));
        }
    }
    v
}

/// Phones for a billiard word under a per-collision manner assignment.
pub fn cxc_to_phones<S: AsRef<str>>(
    word: &[S],
    manners: &[Manner],
    inventory: &Inventory,
) -> Result<Vec<Phone>, GrammarError> {
    if word.len() != manners.len() {
        return Err(GrammarError::LengthMismatch {
            words: word.len(),
            manners: manners.len(),
        });
    }
    word.iter()
        .zip(manners)
        .map(|(w, &m)| {
            let side: SideLabel = w
                .as_ref()
                .parse()
                .map_err(|_| GrammarError::UnknownSide(w.as_ref().to_string()))?;
            let ph = inventory
                .for_side(side)
                .ok_or_else(|| GrammarError::UnknownSide(w.as_ref().to_string()))?;
            Ok(Phone::new(ph.clone(), m)?)
        })
        .collect()
}

/// The collision sequence underlying a chain of CXC units.
pub fn units_word(units: &[CxcUnit]) -> Vec<String> {
    let mut w: Vec<String> = units.iter().map(|u| u.from.clone()).collect();
    if let Some(u) = units.last() {
        w.push(u.to.clone());
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonetics::parse_phones;

    fn phones(s: &str) -> Vec<Phone> {
        parse_phones(s, &Inventory::builtin()).unwrap()
    }

    #[test]
    fn shipped_grammar_matches_default() {
        assert_eq!(build_default_grammar().to_json(), DEFAULT_GRAMMAR_JSON);
        assert_eq!(Grammar::from_json(DEFAULT_GRAMMAR_JSON).unwrap(), build_default_grammar());
    }

    #[test]
    fn default_arc_set_shape() {
        use Manner::*;
        let g = build_default_grammar();
        let has = |f, t, d, k| {
            g.arcs()
                .iter()
                .any(|a| a.from == f && a.to == t && a.direction == d && a.kind() == k)
        };
        assert!(has(P, Closure, Direction::Up, ArcKind::Homorganic));
        assert!(has(H, H, Direction::Level, ArcKind::Diphthongal));
        assert!(!g.arcs().iter().any(|a| a.from == A && a.to == A && a.kind() != ArcKind::Homorganic));
        let diph: Vec<_> = g.arcs().iter().filter(|a| a.diphthongal).collect();
        assert_eq!(diph.len(), 5);
        for a in g.arcs() {
            if a.to == A || a.to == P || a.to == C {
                assert_ne!(a.direction, Direction::Down, "{a:?}");
            }
            if a.from == A {
                assert_ne!(a.direction, Direction::Up, "{a:?}");
            }
            if a.from == a.to && a.homorganic {
                assert!(a.from.is_continuant());
            }
            if a.from == a.to {
                assert!(!matches!(a.from, C | P));
            }
        }
    }

    #[test]
    fn onset_and_syllabic() {
        let p = build_default_grammar().validate(&phones("θ/P a/A")).unwrap();
        assert_eq!(p.syllables.len(), 1);
        let s = &p.syllables[0];
        assert_eq!((s.onset.clone(), s.syllabic, s.coda.clone()), (vec![0], 1, vec![]));
        assert!(p.boundaries.is_empty());
    }

    #[test]
    fn stop_does_not_repeat() {
        let e = build_default_grammar().validate(&phones("θ/P θ/P a/A")).unwrap_err();
        assert_eq!(e.index(), Some(1));
        let e = build_default_grammar().validate(&phones("θ/P θ/P")).unwrap_err();
        assert_eq!(e.index(), Some(1));
    }

    #[test]
    fn vowel_prolongs_but_does_not_glide() {
        let g = build_default_grammar();
        let p = g.validate(&phones("a/A a/A")).unwrap();
        assert_eq!(p.syllabics, vec![0]);
        assert_eq!(p.syllables[0].nucleus, vec![0, 1]);
        assert_eq!(g.validate(&phones("a/A i/A")).unwrap_err().index(), Some(1));
    }

    #[test]
    fn shared_boundary() {
        let g = build_default_grammar();
        let toks = phones("θ/P a/A θ/M i/A");
        let p = g.validate(&toks).unwrap();
        assert_eq!(p.syllables.len(), 2);
        assert_eq!(p.boundaries, vec![2]);
        let roles = g.syllabify(&toks).unwrap();
        assert_eq!(roles, vec![Role::Onset, Role::Syllabic, Role::Boundary, Role::Syllabic]);
        assert_eq!(g.syllabify(&phones("a/A")).unwrap(), vec![Role::Syllabic]);
    }

    #[test]
    fn closures_and_bare_stops() {
        let g = build_default_grammar();
        assert_eq!(g.validate(&phones("a/A θ/F θ/_")), Err(GrammarError::OpenClosure { index: 2 }));
        assert_eq!(g.validate(&phones("θ/P")), Err(GrammarError::NoSyllabic));
        assert_eq!(g.validate(&[]), Err(GrammarError::Empty));
        assert!(g.validate(&phones("θ/F θ/P")).is_err());
    }

    #[test]
    fn billiard_words_as_syllables() {
        let inv = Inventory::builtin();
        let g = build_default_grammar();
        use Manner::*;
        let t = cxc_to_phones(&["θ", "ʔ", "χ"], &[P, A, F], &inv).unwrap();
        let p = g.validate(&t).unwrap();
        assert_eq!(p.syllables.len(), 1);
        assert_eq!(p.syllables[0].coda, vec![2]);
        assert!(g.validate(&cxc_to_phones(&["θ", "ʔ"], &[P, A], &inv).unwrap()).is_ok());
        assert!(matches!(
            cxc_to_phones(&["θ", "ʔ"], &[A, P], &inv),
            Err(GrammarError::Phonetics(PhoneticsError::Incompatible { .. }))
        ));
    }

    #[test]
    fn generator_is_closed_and_seeded() {
        let inv = Inventory::builtin();
        let g = build_default_grammar();
        assert!(g.generate(0, 0, &inv).is_empty());
        for seed in 0..200 {
            let s = g.generate(seed, 3, &inv);
            let p = g.validate(&s).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(p.syllables.len(), 3);
            assert!(violations(&s, &p).is_empty());
        }
        assert_eq!(g.generate(9, 5, &inv), g.generate(9, 5, &inv));
    }

    #[test]
    fn long_generation() {
        let inv = Inventory::builtin();
        let g = build_default_grammar();
        let s = g.generate(2, 1000, &inv);
        assert_eq!(g.validate(&s).unwrap().syllables.len(), 1000);
    }

    #[test]
    fn override_rules() {
        let bad = r#"[{"from":"A","to":"F","direction":"level","homorganic":true,"diphthongal":false}]"#;
        assert!(matches!(Grammar::from_json(bad), Err(GrammarError::InvalidArc(_))));
        let both = r#"[{"from":"A","to":"F","direction":"up","homorganic":true,"diphthongal":true}]"#;
        assert!(matches!(Grammar::from_json(both), Err(GrammarError::InvalidArc(_))));
    }
}
