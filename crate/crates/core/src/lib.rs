#![cfg_attr(not(feature = "std"), no_std)]
//! Refinable broken bases on nonequispaced nested knots and their
//! lifting-factored wavelet transforms.

extern crate alloc;

pub mod basis;
pub mod error;
pub mod hermite;
pub mod knots;
pub mod lifting;
pub mod linalg;
pub mod quadrature;
pub mod refinement;
pub mod smooth;
pub mod transform;

pub use basis::{BrokenBasis, GramMatrix, MomentTable, Projection, Side};
pub use error::{Error, Result};
pub use hermite::HermiteSurrogate;
pub use knots::{min_knots, KnotGrid, KnotHierarchy};
pub use smooth::{SmoothFamily, SmoothFunction, Table};
pub use lifting::{
    DetailMatrices, FinalUpdate, InteriorSplit, LiftingScheme, LiftingStep, SchemeKind, StepKind,
    WaveletFunctions,
};
pub use refinement::{JumpMatrix, RefinementMatrix};
pub use transform::{CoefficientPyramid, LevelPlan, TransformPlan};
