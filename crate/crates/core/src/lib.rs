//! Moment map, energy functional and gradient flow on the variety of
//! complex associative algebras.
//!
//! A point of `V_n` is an [`AlgebraTensor`] of structure constants in a fixed
//! orthonormal frame. The [`moment`] module builds the moment matrix `M_μ`,
//! the energy `F_n = tr M_μ² / ‖μ‖⁴` and the critical-point test
//! `M_μ = c_μ I + D_μ`; [`flow`] runs the negative gradient flow along
//! `GL(n)`-orbits; [`structure`] computes derivations, Nikolayevsky
//! derivations, radicals and the structure-theorem checks; [`tables`]
//! reproduces the two- and three-dimensional classification tables.

// dense kernels read best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cla;
pub mod exec;
pub mod flow;
pub mod moment;
pub mod rational;
pub mod sample;
pub mod structure;
pub mod tables;

pub use algebra::{catalog, AlgebraError, AlgebraTensor};
pub use cla::{CMatrix, C64};
pub use exec::Exec;

pub use flow::{flow_to_critical, FlowConfig, FlowTrace};
pub use moment::{critical_test, f_value, moment_matrix, CriticalReport, CriticalType};
