use std::f64::consts::PI;

use super::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::BoxDomain;

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// Dirichlet eigenvalues of a box below `lambda_max`:
/// `pi^2 * sum_i k_i^2 / a_i^2` over `k_i >= 1`.
pub fn box_spectrum(b: &BoxDomain, lambda_max: f64) -> Result<Spectrum> {
    box_spectrum_capped(b, lambda_max, DEFAULT_ENUMERATION_CAP)
}

pub fn box_spectrum_capped(b: &BoxDomain, lambda_max: f64, cap: usize) -> Result<Spectrum> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("lambda_max must be positive and finite"));
    }
    let coef: Vec<f64> = b.sides().iter().map(|a| PI * PI / (a * a)).collect();
    let n = coef.len();
    // tail[i] = smallest possible contribution of axes i.. (all k = 1)
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + coef[i];
    }
    let mut out = Vec::new();
    let mut k = vec![1u64; n];
    let mut partial = vec![0.0; n + 1];
    if tail[0] >= lambda_max {
        return Spectrum::exact(out, lambda_max);
    }
    // Odometer over k with per-axis pruning.
    let mut axis = 0;
    loop {
        let value = partial[axis] + coef[axis] * (k[axis] * k[axis]) as f64;
        if value + tail[axis + 1] < lambda_max {
            if axis + 1 == n {
                out.push(value);
                if out.len() > cap {
                    return Err(Error::Resource(format!(
                        "box spectrum below {lambda_max} exceeds {cap} eigenvalues"
                    )));
                }
                k[axis] += 1;
            } else {
                partial[axis + 1] = value;
                axis += 1;
                k[axis] = 1;
            }
        } else {
            if axis == 0 {
                break;
            }
            axis -= 1;
            k[axis] += 1;
        }
    }
    Spectrum::exact(out, lambda_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(a: f64, b: f64, lambda: f64) -> Vec<f64> {
        let mut v = Vec::new();
        for j in 1..=60u32 {
            for k in 1..=60u32 {
                let l = PI * PI * ((j * j) as f64 / (a * a) + (k * k) as f64 / (b * b));
                if l < lambda {
                    v.push(l);
                }
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-14 * y, "{x} vs {y}");
        }
    }

    #[test]
    fn unit_square_examples() {
        let sq = BoxDomain::new(vec![1.0, 1.0]).unwrap();
        let s = box_spectrum(&sq, 50.0).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.eigenvalues()[0] - 19.739_208_802_178_716).abs() < 1e-12);
        assert!((s.eigenvalues()[1] - 49.348_022_005_446_79).abs() < 1e-12);
        assert_eq!(s.eigenvalues()[1], s.eigenvalues()[2]);
        assert!(box_spectrum(&sq, 10.0).unwrap().is_empty());
        assert_close(s.eigenvalues(), &brute(1.0, 1.0, 50.0));
    }

    #[test]
    fn elongated_box() {
        let b = BoxDomain::new(vec![2.0, 0.5]).unwrap();
        let s = box_spectrum(&b, 50.0).unwrap();
        // (1,1) and (2,1)
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues()[0] - PI * PI * 4.25).abs() < 1e-12);
        assert!((s.eigenvalues()[1] - PI * PI * 5.0).abs() < 1e-12);
        assert!((s.eigenvalues()[0] - 41.9458).abs() < 1e-4);
        assert_close(box_spectrum(&b, 500.0).unwrap().eigenvalues(), &brute(2.0, 0.5, 500.0));
    }

    #[test]
    fn strict_threshold() {
        let sq = BoxDomain::new(vec![1.0, 1.0]).unwrap();
        let l1 = 2.0 * PI * PI;
        assert_eq!(box_spectrum(&sq, l1).unwrap().len(), 0);
        assert_eq!(box_spectrum(&sq, l1 * (1.0 + 1e-15)).unwrap().len(), 1);
    }

    #[test]
    fn interval_and_cube() {
        let seg = BoxDomain::new(vec![1.0]).unwrap();
        let s = box_spectrum(&seg, 100.0).unwrap();
        assert_eq!(s.len(), 3); // pi^2 k^2 < 100 for k = 1, 2, 3
        let cube = BoxDomain::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = box_spectrum(&cube, 6.0 * PI * PI + 1.0).unwrap();
        // (1,1,1), 3 x (1,1,2)
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let sq = BoxDomain::new(vec![1.0, 1.0]).unwrap();
        let err = box_spectrum_capped(&sq, 1e5, 100).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }
}
