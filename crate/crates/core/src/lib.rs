//! Symbolic machinery for conditional-symmetry analysis of evolution PDE
//! systems, specialized to two-component reaction-diffusion systems.
//!
//! The crate provides a small exact-arithmetic expression kernel, jet-space
//! prolongation of vector fields, generation and structural comparison of
//! determining-equation systems for graded conditional symmetries, the
//! Kirchhoff change of variables, a machine-readable catalog of known
//! conditional symmetries, and a seeded random-point numeric oracle.

pub mod symkernel;
