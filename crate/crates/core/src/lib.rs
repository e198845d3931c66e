//! Polygonal billiards inside an articulatory "oral polygon", with the symbol
//! systems needed to read billiard trajectories as speech: a phthongal
//! inventory, manners of collision, and a syllable grammar.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod dynamics;
pub mod orbits;
pub mod stability;
pub mod phonetics;
pub mod grammar;
pub mod render;
pub mod data;
pub mod cli;
