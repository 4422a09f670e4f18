use std::f64::consts::PI;

use super::Spectrum;
use crate::error::{Error, Result};

/// Dirichlet eigenvalues of the equilateral triangle with the given side:
/// `16 pi^2 / (9 a^2) * (m^2 + m n + n^2)` over ordered pairs `m, n >= 1`
/// (pairs with `m != n` give the two-dimensional eigenspaces).
pub fn equilateral_triangle_spectrum(side: f64, lambda_max: f64) -> Result<Spectrum> {
    if !(side > 0.0 && lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("side and lambda_max must be positive"));
    }
    let c = 16.0 * PI * PI / (9.0 * side * side);
    let mut out = Vec::new();
    let mut m = 1u64;
    while c * ((m * m + m + 1) as f64) < lambda_max {
        let mut n = 1u64;
        loop {
            let v = c * (m * m + m * n + n * n) as f64;
            if v >= lambda_max {
                break;
            }
            out.push(v);
            n += 1;
        }
        m += 1;
    }
    Spectrum::exact(out, lambda_max)
}

/// Side length of the equilateral triangle with the given area.
pub fn equilateral_side_for_area(area: f64) -> f64 {
    (4.0 * area / 3f64.sqrt()).sqrt()
}
