//! Prediction, exact verification and rendering of the structure visible in
//! plots of quadratic residues `x² mod m`.
//!
//! Near every simple fraction `a/b` of the modulus the residues fall on a
//! small family of integer-coefficient parabolas whose vertices sit on an
//! exact rational lattice. The position of those families depends only on
//! `m` modulo small integers, and their vertices lie on a bundle of curves
//! `Y ≡ 2nX − sX² (mod 1)`.
//!
//! * [`residue`] holds the exact arithmetic primitives.
//! * [`predictor`] computes the per-fraction parameters and parabola families.
//! * [`pattern`] compares layouts of different moduli and solves for bundle lines.
//! * [`render`] rasterizes plots and writes PGM / SVG files.
//! * [`checks`] is the registry of named verification checks used by `qrpat verify`.
//! * [`cli`] implements the `qrpat` command line.

pub mod checks;
pub mod cli;
mod error;
pub mod pattern;
pub mod predictor;
pub mod render;
pub mod residue;

pub use error::{Error, Result};
pub use residue::{ExactRational, Modulus, ReducedFraction};
