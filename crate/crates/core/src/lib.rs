//! Toolkit for 2n-fold symmetric rhombus substitution tilings: edgeword
//! combinatorics, circulant expansion spectra, Kenyon tileability, de Bruijn
//! multigrids, substitution rules built from palindromic edgewords, and
//! discrete-plane (planarity) measurements.

pub mod billiard;
pub mod edgeword;
pub mod error;
pub mod kenyon;
pub mod lattice;
pub mod multigrid;
pub mod planarity;
pub mod render;
pub mod spectral;
pub mod substitution;

pub use error::{Result, RosaError};
pub use lattice::{Patch, PlacedTile, PolygonBoundary, Symmetry, TileType};
