//! Phonetic symbol systems: places, manners, the phthongal inventory laid
//! out on a (place, frontBack, openClose) grid, phones, and prosody.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::SideLabel;

pub const DEFAULT_INVENTORY_JSON: &str = include_str!("../data/inventory.json");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhoneticsError {
    #[error("inventory: {0}")]
    Parse(String),
    #[error("cell ({place}, {front_back}, {open_close}) holds both {first} and {second}")]
    DuplicateCell {
        place: Place,
        front_back: FrontBack,
        open_close: OpenClose,
        first: String,
        second: String,
    },
    #[error("symbol {0} is non-provisional in more than one cell")]
    DuplicateSymbol(String),
    #[error("unknown manner {0:?}")]
    UnknownManner(String),
    #[error("unknown phthong {0:?}")]
    UnknownPhthong(String),
    #[error("phone token {0:?} is not of the form symbol/M")]
    BadToken(String),
    #[error("manner /{manner}/ does not conjugate with {place} phthong {symbol}")]
    Incompatible {
        symbol: String,
        place: Place,
        manner: Manner,
    },
    #[error("prosody: {0}")]
    Prosody(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    #[serde(rename = "PAL")]
    Pal,
    #[serde(rename = "VUP")]
    Vup,
    Glottal,
}

impl Place {
    pub const ALL: [Place; 3] = [Place::Pal, Place::Vup, Place::Glottal];
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Place::Pal => "PAL",
            Place::Vup => "VUP",
            Place::Glottal => "Glottal",
        })
    }
}

/// Ten ordered columns; primed values are the PAL-side mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrontBack {
    #[serde(rename = "Back'")]
    BackP,
    #[serde(rename = "BackLike'")]
    BackLikeP,
    #[serde(rename = "Central'")]
    CentralP,
    #[serde(rename = "FrontLike'")]
    FrontLikeP,
    #[serde(rename = "Front'")]
    FrontP,
    Front,
    FrontLike,
    Central,
    BackLike,
    Back,
}

impl FrontBack {
    pub const ALL: [FrontBack; 10] = [
        FrontBack::BackP,
        FrontBack::BackLikeP,
        FrontBack::CentralP,
        FrontBack::FrontLikeP,
        FrontBack::FrontP,
        FrontBack::Front,
        FrontBack::FrontLike,
        FrontBack::Central,
        FrontBack::BackLike,
        FrontBack::Back,
    ];

    pub fn is_primed(self) -> bool {
        self < FrontBack::Front
    }

    /// Reflection across the PAL/VUP seam.
    pub fn mirror(self) -> FrontBack {
        let i = FrontBack::ALL.iter().position(|v| *v == self).expect("listed");
        FrontBack::ALL[9 - i]
    }
}

impl fmt::Display for FrontBack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OpenClose {
    Close,
    CloseLike,
    CloseMid,
    Mid,
    OpenMid,
    OpenLike,
    Open,
}

impl fmt::Display for OpenClose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

/// Driving style of a collision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Manner {
    /// Vowel.
    A,
    /// Glottal stop.
    C,
    /// Plosive.
    P,
    /// Fricative.
    F,
    /// Nasal.
    M,
    /// Approximant.
    V,
    /// Semivowel.
    H,
    #[serde(rename = "□")]
    Closure,
}

impl Manner {
    pub const ALL: [Manner; 8] = [
        Manner::A,
        Manner::C,
        Manner::P,
        Manner::F,
        Manner::M,
        Manner::V,
        Manner::H,
        Manner::Closure,
    ];

    pub fn letter(self) -> &'static str {
        match self {
            Manner::A => "A",
            Manner::C => "C",
            Manner::P => "P",
            Manner::F => "F",
            Manner::M => "M",
            Manner::V => "V",
            Manner::H => "H",
            Manner::Closure => "□",
        }
    }

    pub fn is_continuant(self) -> bool {
        matches!(self, Manner::A | Manner::F | Manner::M | Manner::Closure)
    }

    pub fn compatible_with(self, place: Place) -> bool {
        match place {
            Place::Glottal => matches!(self, Manner::A | Manner::C | Manner::H | Manner::Closure),
            Place::Pal | Place::Vup => {
                matches!(self, Manner::P | Manner::F | Manner::M | Manner::V | Manner::Closure)
            }
        }
    }
}

impl fmt::Display for Manner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

impl FromStr for Manner {
    type Err = PhoneticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "A" => Manner::A,
            "C" => Manner::C,
            "P" => Manner::P,
            "F" => Manner::F,
            "M" => Manner::M,
            "V" => Manner::V,
            "H" => Manner::H,
            "□" | "_" => Manner::Closure,
            other => return Err(PhoneticsError::UnknownManner(other.to_string())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phthong {
    pub symbol: String,
    pub place: Place,
    #[serde(rename = "frontBack")]
    pub front_back: FrontBack,
    #[serde(rename = "openClose")]
    pub open_close: OpenClose,
    pub polygonal: bool,
    pub provisional: bool,
    /// Exempt from the PAL/VUP mirror check.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub asymmetric: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Phthong {
    pub fn cell(&self) -> (Place, FrontBack, OpenClose) {
        (self.place, self.front_back, self.open_close)
    }
}

/// The phthongal alphabet, in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct Inventory {
    entries: Vec<Phthong>,
    cells: BTreeMap<(Place, FrontBack, OpenClose), usize>,
}

impl Inventory {
    pub fn from_entries(entries: Vec<Phthong>) -> Result<Self, PhoneticsError> {
        let mut cells: BTreeMap<(Place, FrontBack, OpenClose), usize> = BTreeMap::new();
        let mut firm: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, p) in entries.iter().enumerate() {
            if let Some(&j) = cells.get(&p.cell()) {
                return Err(PhoneticsError::DuplicateCell {
                    place: p.place,
                    front_back: p.front_back,
                    open_close: p.open_close,
                    first: entries[j].symbol.clone(),
                    second: p.symbol.clone(),
                });
            }
            cells.insert(p.cell(), i);
            if !p.provisional && firm.insert(&p.symbol, i).is_some() {
                return Err(PhoneticsError::DuplicateSymbol(p.symbol.clone()));
            }
        }
        Ok(Self { entries, cells })
    }

    pub fn from_json(text: &str) -> Result<Self, PhoneticsError> {
        let entries: Vec<Phthong> =
            serde_json::from_str(text).map_err(|e| PhoneticsError::Parse(e.to_string()))?;
        Self::from_entries(entries)
    }

    /// The shipped inventory.
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_INVENTORY_JSON).expect("shipped inventory is valid")
    }

    /// Pretty JSON, one object per phthong, with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("plain data");
        s.push('\n');
        s
    }

    pub fn entries(&self) -> &[Phthong] {
        &self.entries
    }

    pub fn at(&self, place: Place, fb: FrontBack, oc: OpenClose) -> Option<&Phthong> {
        self.cells.get(&(place, fb, oc)).map(|&i| &self.entries[i])
    }

    /// Entry for a symbol, preferring the non-provisional cell.
    pub fn lookup(&self, symbol: &str) -> Option<&Phthong> {
        let mut hits = self.entries.iter().filter(|p| p.symbol == symbol);
        let first = hits.next()?;
        if !first.provisional {
            return Some(first);
        }
        Some(
            self.entries
                .iter()
                .find(|p| p.symbol == symbol && !p.provisional)
                .unwrap_or(first),
        )
    }

    pub fn polygonal(&self) -> Vec<&Phthong> {
        self.entries.iter().filter(|p| p.polygonal).collect()
    }

    /// Canonical phthong for a polygonal-alphabet side label.
    pub fn for_side(&self, side: SideLabel) -> Option<&Phthong> {
        self.entries
            .iter()
            .find(|p| p.polygonal && p.symbol == side.symbol())
    }

    /// Firm, symmetric PAL entries whose mirrored VUP cell is empty.
    pub fn mirror_violations(&self) -> Vec<&Phthong> {
        self.entries
            .iter()
            .filter(|p| p.place == Place::Pal && !p.provisional && !p.asymmetric)
            .filter(|p| self.at(Place::Vup, p.front_back.mirror(), p.open_close).is_none())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phone {
    phthong: Phthong,
    manner: Manner,
}

impl Phone {
    pub fn new(phthong: Phthong, manner: Manner) -> Result<Self, PhoneticsError> {
        if !manner.compatible_with(phthong.place) {
            return Err(PhoneticsError::Incompatible {
                symbol: phthong.symbol,
                place: phthong.place,
                manner,
            });
        }
        Ok(Self { phthong, manner })
    }

    /// Parse `symbol/M` against an inventory.
    pub fn parse(token: &str, inventory: &Inventory) -> Result<Self, PhoneticsError> {
        let (sym, m) = token
            .rsplit_once('/')
            .filter(|(s, m)| !s.is_empty() && !m.is_empty())
            .ok_or_else(|| PhoneticsError::BadToken(token.to_string()))?;
        let manner: Manner = m.parse()?;
        let phthong = inventory
            .lookup(sym)
            .ok_or_else(|| PhoneticsError::UnknownPhthong(sym.to_string()))?;
        Phone::new(phthong.clone(), manner)
    }

    pub fn phthong(&self) -> &Phthong {
        &self.phthong
    }

    pub fn manner(&self) -> Manner {
        self.manner
    }

    pub fn place(&self) -> Place {
        self.phthong.place
    }

    /// Same conformation: same symbol in the same cell.
    pub fn homorganic_with(&self, other: &Phone) -> bool {
        self.phthong.cell() == other.phthong.cell() && self.phthong.symbol == other.phthong.symbol
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.phthong.symbol, self.manner)
    }
}

/// Parse whitespace-separated `symbol/M` tokens.
pub fn parse_phones(text: &str, inventory: &Inventory) -> Result<Vec<Phone>, PhoneticsError> {
    text.split_whitespace()
        .map(|t| Phone::parse(t, inventory))
        .collect()
}

pub fn format_phones(phones: &[Phone]) -> String {
    phones
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Voicing {
    Voiceless,
    #[default]
    Voiced,
}

/// The six non-symbolic dimensions carried alongside a phone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Prosody {
    /// Tract-length deviation in octaves, within ±1/3.
    pub rounding: f64,
    /// dB above the local floor.
    pub loudness: f64,
    /// Seconds.
    pub duration: f64,
    pub voicing: Voicing,
    /// Semitones, if pitched.
    pub pitch: Option<f64>,
    pub nasality: bool,
}

impl Prosody {
    pub const MAX_ROUNDING: f64 = 1.0 / 3.0;

    pub fn new(
        rounding: f64,
        loudness: f64,
        duration: f64,
        voicing: Voicing,
        pitch: Option<f64>,
        nasality: bool,
    ) -> Result<Self, PhoneticsError> {
        if !(rounding.abs() <= Self::MAX_ROUNDING) {
            return Err(PhoneticsError::Prosody(format!(
                "rounding {rounding} exceeds 1/3 octave"
            )));
        }
        if !loudness.is_finite() {
            return Err(PhoneticsError::Prosody("loudness must be finite".into()));
        }
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(PhoneticsError::Prosody(format!("duration {duration}")));
        }
        if pitch.is_some_and(|p| !p.is_finite()) {
            return Err(PhoneticsError::Prosody("pitch must be finite".into()));
        }
        Ok(Self {
            rounding,
            loudness,
            duration,
            voicing,
            pitch,
            nasality,
        })
    }
}

pub fn side_to_place(side: SideLabel) -> Place {
    match side {
        SideLabel::DentalAlveolar | SideLabel::AlveolarPalatal | SideLabel::Labial => Place::Pal,
        SideLabel::VelarPalatal | SideLabel::Velar | SideLabel::UvularPharyngeal => Place::Vup,
        SideLabel::Glottal => Place::Glottal,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotClass {
    /// Jaw-line collision; filled by A or H.
    Vowel,
    /// Roof collision; filled by F, P, V or M.
    Consonant,
}

/// A phone with its conformation left open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Skeleton {
    pub class: SlotClass,
    pub place: Place,
}

pub fn word_to_skeleton(word: &[SideLabel]) -> Vec<Skeleton> {
    word.iter()
        .map(|&s| Skeleton {
            class: if s == SideLabel::Glottal {
                SlotClass::Vowel
            } else {
                SlotClass::Consonant
            },
            place: side_to_place(s),
        })
        .collect()
}
