//! Finite element solver for the biharmonic wave equation
//! `u_tt + Δ(c Δu) = f` on rectangles with clamped boundary conditions.
//!
//! Space is discretized with the C¹-conforming Bogner–Fox–Schmit element on
//! uniform tensor meshes. Three time schemes are available: the continuous
//! Galerkin–Petrov methods cGP(1) (Crank–Nicolson) and cGP(2), and the
//! Galerkin–collocation method cGP-C¹(3), whose discrete solution is
//! continuously differentiable in time.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command line
//! driver live in the companion `biharmonic` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod assembly;
pub mod bfs;
pub mod cases;
mod error;
pub mod harness;
pub mod jet;
pub mod lu;
pub mod mesh;
pub mod ordering;
pub mod quadrature;
pub mod sensor;
pub mod sparse;
pub mod time;

pub use error::{Error, Result};
