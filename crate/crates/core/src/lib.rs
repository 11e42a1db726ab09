//! Perceptually driven reverberation precomputation.
//!
//! The crate estimates the mean-free path of a scene from low-order specular
//! ray tracing, groups listener positions whose mean-free path differs by less
//! than the late-reverberation JND, and runs one expensive high-order decay
//! simulation per group instead of one per position. A Schroeder
//! reverberator parameterized by the resulting RT60 renders audio at runtime.
//!
//! | module | purpose |
//! |---|---|
//! | [`scene`] | mesh/material loading, BVH ray queries, closed-mesh volume and area |
//! | [`tracer`] | specular segment traces and per-band energy histograms |
//! | [`acoustics`] | mean-free path, Sabine/Eyring and decay-regression RT60 |
//! | [`metric`] | psychometric constants, JND relation, path clustering |
//! | [`dsp`] | comb/allpass reverberator, path rendering, WAV I/O |
//! | [`pipeline`] | bake files, lookup, validation suites |
//! | [`fixtures`] | procedural test scenes |

pub mod acoustics;
pub mod dsp;
mod error;
pub mod fixtures;
pub mod geometry;
pub mod metric;
pub mod pipeline;
pub mod scene;
pub mod tracer;

pub use error::{Error, ErrorKind, Result};
pub use geometry::{Aabb, Vec3};
