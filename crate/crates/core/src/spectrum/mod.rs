//! Dirichlet spectra: the [`Spectrum`] container plus closed-form spectra of
//! boxes, disks and the equilateral triangle.

pub mod bessel;
mod disk;
mod lattice;
mod triangle;

pub use disk::disk_spectrum;
pub use lattice::{box_spectrum, box_spectrum_capped, DEFAULT_ENUMERATION_CAP};
pub use triangle::{equilateral_side_for_area, equilateral_triangle_spectrum};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::fmt_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumSource {
    Exact,
    Fem,
}

/// Sorted Dirichlet eigenvalues (repeated by multiplicity).
///
/// Every true eigenvalue strictly below `complete_below` is present; for FEM
/// spectra this holds up to the per-eigenvalue `error_bounds`. Entries at or
/// above `complete_below` may appear but are not guaranteed complete.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    error_bounds: Vec<f64>,
    complete_below: f64,
    source: SpectrumSource,
}

impl Spectrum {
    pub fn new(
        eigenvalues: Vec<f64>,
        error_bounds: Vec<f64>,
        complete_below: f64,
        source: SpectrumSource,
    ) -> Result<Self> {
        if eigenvalues.len() != error_bounds.len() {
            return Err(Error::invalid("one error bound per eigenvalue required"));
        }
        if !(complete_below > 0.0) {
            return Err(Error::invalid("completeness threshold must be positive"));
        }
        if eigenvalues.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("eigenvalues must be positive and finite"));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("eigenvalues must be sorted"));
        }
        if error_bounds.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::invalid("error bounds must be nonnegative"));
        }
        Ok(Self {
            eigenvalues,
            error_bounds,
            complete_below,
            source,
        })
    }

    /// Exact spectrum; values are sorted here.
    pub fn exact(mut eigenvalues: Vec<f64>, complete_below: f64) -> Result<Self> {
        eigenvalues.sort_by(f64::total_cmp);
        let n = eigenvalues.len();
        Self::new(eigenvalues, vec![0.0; n], complete_below, SpectrumSource::Exact)
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn error_bounds(&self) -> &[f64] {
        &self.error_bounds
    }

    #[inline]
    pub fn complete_below(&self) -> f64 {
        self.complete_below
    }

    #[inline]
    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of listed eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        self.eigenvalues.partition_point(|&l| l < lambda)
    }

    /// Number of leading entries that are certified (below `complete_below`).
    pub fn certified_len(&self) -> usize {
        self.count_below(self.complete_below)
    }

    /// `index,eigenvalue,error_bound` rows (1-based index) with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue,error_bound\n");
        for (k, (l, e)) in self.eigenvalues.iter().zip(&self.error_bounds).enumerate() {
            let _ = writeln!(s, "{},{},{}", k + 1, fmt_f64(*l), fmt_f64(*e));
        }
        s
    }
}

/// Spectrum of a disjoint union: merged values, completeness of the weakest part.
pub fn union_spectrum(parts: &[Spectrum]) -> Result<Spectrum> {
    let first = parts
        .first()
        .ok_or_else(|| Error::invalid("union of an empty list of spectra"))?;
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let mut pairs: Vec<(f64, f64)> = parts
        .iter()
        .flat_map(|s| s.eigenvalues.iter().copied().zip(s.error_bounds.iter().copied()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let complete_below = parts.iter().map(|s| s.complete_below).fold(f64::INFINITY, f64::min);
    let source = if parts.iter().any(|s| s.source == SpectrumSource::Fem) {
        SpectrumSource::Fem
    } else {
        SpectrumSource::Exact
    };
    let (eigenvalues, error_bounds) = pairs.into_iter().unzip();
    Spectrum::new(eigenvalues, error_bounds, complete_below, source)
}

/// Spectrum of the dilated domain `t * Omega`: every value scales by `t^-2`.
pub fn scale_spectrum(s: &Spectrum, t: f64) -> Result<Spectrum> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("scale factor must be positive"));
    }
    let f = 1.0 / (t * t);
    Ok(Spectrum {
        eigenvalues: s.eigenvalues.iter().map(|l| l * f).collect(),
        error_bounds: s.error_bounds.iter().map(|e| e * f).collect(),
        complete_below: s.complete_below * f,
        source: s.source,
    })
}
