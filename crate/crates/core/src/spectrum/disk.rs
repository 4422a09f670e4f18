use super::bessel::zeros_below_by;
use super::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::DiskDomain;

/// Dirichlet eigenvalues `(j_{n,s}/R)^2 < lambda_max` of a disk of radius
/// `R`. Orders `n >= 1` carry multiplicity two (cosine and sine modes).
pub fn disk_spectrum(d: &DiskDomain, lambda_max: f64) -> Result<Spectrum> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("lambda_max must be positive and finite"));
    }
    let r = d.radius();
    let limit = r * lambda_max.sqrt();
    let eig = |z: f64| (z / r) * (z / r);
    let zeros = zeros_below_by(limit, |z| eig(z) < lambda_max)?;
    let mut out = Vec::new();
    for (order, zs) in zeros.iter().enumerate() {
        for &z in zs {
            out.push(eig(z));
            if order > 0 {
                out.push(eig(z));
            }
        }
    }
    Spectrum::exact(out, lambda_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_area_disk_low_modes() {
        let d = DiskDomain::with_area(1.0).unwrap();
        let s = disk_spectrum(&d, 50.0).unwrap();
        assert_eq!(s.len(), 3);
        let j01 = 2.404_825_557_695_773;
        let j11 = 3.831_705_970_207_512;
        assert!((s.eigenvalues()[0] - j01 * j01 * PI).abs() < 1e-11);
        assert!((s.eigenvalues()[0] - 18.1684).abs() < 1e-4);
        assert!((s.eigenvalues()[1] - j11 * j11 * PI).abs() < 1e-11);
        assert_eq!(s.eigenvalues()[1], s.eigenvalues()[2]);
        assert!((s.eigenvalues()[1] - 46.1248).abs() < 1e-4);
    }

    #[test]
    fn below_ground_state_is_empty() {
        let d = DiskDomain::new(1.0).unwrap();
        assert!(disk_spectrum(&d, 5.0).unwrap().is_empty());
        assert_eq!(disk_spectrum(&d, 6.0).unwrap().len(), 1);
    }

    #[test]
    fn weyl_leading_order() {
        let d = DiskDomain::with_area(1.0).unwrap();
        let lam = 1e4;
        let n = disk_spectrum(&d, lam).unwrap().len() as f64;
        assert!((n * 4.0 * PI / lam - 1.0).abs() < 0.05);
    }
}
