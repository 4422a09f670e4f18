//! Dirichlet Laplacian spectra of planar convex domains, boxes and disks,
//! Riesz means of those spectra, semiclassical inequality checks and
//! spectral shape optimization.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod geometry;
pub mod inequality;
pub mod io;
pub mod numeric;
pub mod riesz;
pub mod shape_opt;
pub mod spectrum;

pub use error::{Error, Result};
pub use geometry::{BoxDomain, ConvexPolygon, DiskDomain, Domain, GeometrySummary, Point};
pub use inequality::InequalityReport;
pub use riesz::{RieszQuery, RieszValue};
pub use shape_opt::{FamilySpec, OptimizationResult};
pub use spectrum::{Spectrum, SpectrumSource};
