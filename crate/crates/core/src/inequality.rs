//! Semiclassical constants and checks of the eigenvalue inequalities:
//! Berezin, Li-Yau, Hersch-Protter, the improved (perimeter-corrected)
//! Berezin and Li-Yau bounds, and the two-term Weyl residual.
//!
//! FEM spectra are judged on the unfavourable end of their brackets, so a
//! pass holds for every spectrum consistent with the error bounds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::GeometrySummary;
use crate::io::{csv_field, fmt_f64};
use crate::riesz::{eigenvalue_sum, riesz_mean, RieszQuery};
use crate::spectrum::Spectrum;

/// `L^{gamma,n} = Gamma(gamma+1) / ((4 pi)^{n/2} Gamma(gamma+1+n/2))`.
/// `dim = 0` gives 1, the convention used for the boundary term of
/// intervals.
pub fn lt_constant(gamma: f64, dim: usize) -> f64 {
    let half = 0.5 * dim as f64;
    (ln_gamma(gamma + 1.0) - half * (4.0 * PI).ln() - ln_gamma(gamma + 1.0 + half)).exp()
}

/// `A_n = 4 pi n Gamma(n/2+1)^{2/n} / (n+2)`.
pub fn sum_constant_a(dim: usize) -> f64 {
    let n = dim as f64;
    4.0 * PI * n * (2.0 / n * ln_gamma(0.5 * n + 1.0)).exp() / (n + 2.0)
}

/// `B_n = 2 pi Gamma(n/2+1)^{1+1/n} / ((n+1) Gamma((n+1)/2))`.
pub fn sum_constant_b(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI * ((1.0 + 1.0 / n) * ln_gamma(0.5 * n + 1.0) - ln_gamma(0.5 * (n + 1.0))).exp() / (n + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiclassicalConstants {
    pub gamma: f64,
    pub dim: usize,
    pub lt_constant: f64,
    pub sum_a: f64,
    pub sum_b: f64,
}

impl SemiclassicalConstants {
    pub fn new(gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma >= 0.0) || dim == 0 {
            return Err(Error::invalid("need gamma >= 0 and dim >= 1"));
        }
        Ok(Self {
            gamma,
            dim,
            lt_constant: lt_constant(gamma, dim),
            sum_a: sum_constant_a(dim),
            sum_b: sum_constant_b(dim),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub check: &'static str,
    pub domain_id: String,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub m: Option<usize>,
    pub value: f64,
    pub bound: f64,
    /// Signed slack normalized by the bound's magnitude (for the improved
    /// checks: the empirical constant).
    pub margin: f64,
    pub passed: bool,
}

impl InequalityReport {
    pub fn with_domain(mut self, id: impl Into<String>) -> Self {
        self.domain_id = id.into();
        self
    }
}

pub const REPORT_CSV_HEADER: &str = "check,domain_id,lambda,gamma,m,value,bound,margin,passed";

pub fn report_csv(reports: &[InequalityReport]) -> String {
    let mut s = String::from(REPORT_CSV_HEADER);
    s.push('\n');
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.check,
            csv_field(&r.domain_id),
            opt(r.lambda),
            opt(r.gamma),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            fmt_f64(r.value),
            fmt_f64(r.bound),
            fmt_f64(r.margin),
            r.passed
        );
    }
    s
}

fn report(check: &'static str, value: f64, bound: f64, margin: f64, passed: bool) -> InequalityReport {
    InequalityReport {
        check,
        domain_id: String::new(),
        lambda: None,
        gamma: None,
        m: None,
        value,
        bound,
        margin,
        passed,
    }
}

/// Leading Weyl term `L^{gamma,n} |Omega| Lambda^{gamma+n/2}`.
pub fn weyl_leading(g: &GeometrySummary, q: RieszQuery) -> f64 {
    lt_constant(q.gamma, g.dim) * g.area * q.lambda.powf(q.gamma + 0.5 * g.dim as f64)
}

/// Boundary-term scale `L^{gamma,n-1} |dOmega| Lambda^{gamma+(n-1)/2}`.
fn boundary_scale(g: &GeometrySummary, q: RieszQuery) -> f64 {
    lt_constant(q.gamma, g.dim - 1) * g.perimeter * q.lambda.powf(q.gamma + 0.5 * (g.dim as f64 - 1.0))
}

/// Hersch-Protter threshold `pi^2 / (4 r^2)`.
pub fn hersch_bound(g: &GeometrySummary) -> f64 {
    PI * PI / (4.0 * g.inradius * g.inradius)
}

fn require_gamma_ge_one(q: RieszQuery) -> Result<()> {
    if q.gamma < 1.0 {
        return Err(Error::invalid(format!("gamma must be >= 1, got {}", q.gamma)));
    }
    Ok(())
}

/// `Tr(-Delta - Lambda)_-^gamma <= L^{gamma,n} |Omega| Lambda^{gamma+n/2}`.
pub fn berezin_check(s: &Spectrum, g: &GeometrySummary, q: RieszQuery) -> Result<InequalityReport> {
    require_gamma_ge_one(q)?;
    let tr = riesz_mean(s, q)?;
    let bound = weyl_leading(g, q);
    let margin = if bound > 0.0 { (bound - tr.upper) / bound } else { 0.0 };
    let mut r = report("berezin", tr.value, bound, margin, tr.upper <= bound);
    r.lambda = Some(q.lambda);
    r.gamma = Some(q.gamma);
    Ok(r)
}

/// Improved Berezin bound. Above the Hersch threshold the empirical
/// constant `(L|Omega|Lambda^{gamma+n/2} - Tr) / (L^{gamma,n-1}|dOmega|Lambda^{gamma+(n-1)/2})`
/// must be positive; at or below it the Riesz mean must vanish and no
/// constant is returned.
pub fn improved_berezin_check(
    s: &Spectrum,
    g: &GeometrySummary,
    q: RieszQuery,
) -> Result<(InequalityReport, Option<f64>)> {
    require_gamma_ge_one(q)?;
    let tr = riesz_mean(s, q)?;
    let bound = weyl_leading(g, q);
    let (mut r, c) = if q.lambda <= hersch_bound(g) {
        (
            report("improved_berezin", tr.value, 0.0, -tr.upper, tr.upper == 0.0),
            None,
        )
    } else {
        let c = (bound - tr.upper) / boundary_scale(g, q);
        (report("improved_berezin", tr.value, bound, c, c > 0.0), Some(c))
    };
    r.lambda = Some(q.lambda);
    r.gamma = Some(q.gamma);
    Ok((r, c))
}

/// `lambda_k >= A_n (k/|Omega|)^{2/n}` for every certified eigenvalue; the
/// report names the tightest `k`.
pub fn li_yau_check(s: &Spectrum, g: &GeometrySummary) -> Result<InequalityReport> {
    let n = s.certified_len();
    if n == 0 {
        return Err(Error::Contract("Li-Yau check needs a nonempty spectrum".into()));
    }
    let a = sum_constant_a(g.dim);
    let p = 2.0 / g.dim as f64;
    let mut worst: Option<InequalityReport> = None;
    for k in 1..=n {
        let lo = s.eigenvalues()[k - 1] - s.error_bounds()[k - 1];
        let bound = a * (k as f64 / g.area).powf(p);
        let margin = (lo - bound) / bound;
        if worst.as_ref().is_none_or(|w| margin < w.margin) {
            let mut r = report("li_yau", s.eigenvalues()[k - 1], bound, margin, margin >= 0.0);
            r.m = Some(k);
            worst = Some(r);
        }
    }
    Ok(worst.unwrap())
}

/// `lambda_1 >= pi^2 / (4 r^2)`.
pub fn hersch_protter_check(s: &Spectrum, g: &GeometrySummary) -> Result<InequalityReport> {
    if s.certified_len() == 0 {
        return Err(Error::Contract("Hersch-Protter check needs lambda_1".into()));
    }
    let l1 = s.eigenvalues()[0];
    let lo = l1 - s.error_bounds()[0];
    let bound = hersch_bound(g);
    let margin = (lo - bound) / bound;
    let mut r = report("hersch_protter", l1, bound, margin, margin >= 0.0);
    r.m = Some(1);
    Ok(r)
}

/// Improved Li-Yau bound; the empirical constant
/// `(mean_m - A_n (m/|Omega|)^{2/n}) / (B_n |dOmega|/|Omega| (m/|Omega|)^{1/n})`
/// must be positive.
pub fn improved_li_yau_check(s: &Spectrum, g: &GeometrySummary, m: usize) -> Result<(InequalityReport, f64)> {
    let sum = eigenvalue_sum(s, m)?;
    let n = g.dim as f64;
    let density = m as f64 / g.area;
    let bound = sum_constant_a(g.dim) * density.powf(2.0 / n);
    let mean_lo = sum.lower / m as f64;
    let scale = sum_constant_b(g.dim) * g.perimeter / g.area * density.powf(1.0 / n);
    let c = (mean_lo - bound) / scale;
    let mut r = report("improved_li_yau", sum.value / m as f64, bound, c, c > 0.0);
    r.m = Some(m);
    Ok((r, c))
}

/// `(Tr - L^{gamma,n}|Omega|Lambda^{gamma+n/2}) / Lambda^{gamma+(n-1)/2}`.
pub fn weyl_residual(s: &Spectrum, g: &GeometrySummary, q: RieszQuery) -> Result<f64> {
    require_gamma_ge_one(q)?;
    let tr = riesz_mean(s, q)?;
    Ok((tr.value - weyl_leading(g, q)) / q.lambda.powf(q.gamma + 0.5 * (g.dim as f64 - 1.0)))
}

/// Limit of [`weyl_residual`] under the two-term Weyl law:
/// `-L^{gamma,n-1} |dOmega| / 4`.
pub fn weyl_prediction(g: &GeometrySummary, gamma: f64) -> f64 {
    -0.25 * lt_constant(gamma, g.dim - 1) * g.perimeter
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Berezin,
    LiYau,
    HerschProtter,
    ImprovedBerezin,
    ImprovedLiYau,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Berezin,
        Check::LiYau,
        Check::HerschProtter,
        Check::ImprovedBerezin,
        Check::ImprovedLiYau,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.trim() {
            "berezin" => Check::Berezin,
            "liyau" | "li_yau" => Check::LiYau,
            "hersch" | "hersch_protter" => Check::HerschProtter,
            "improved_berezin" => Check::ImprovedBerezin,
            "improved_liyau" | "improved_li_yau" => Check::ImprovedLiYau,
            other => return Err(Error::invalid(format!("unknown check '{other}'"))),
        })
    }
}

/// One corpus member: an identifier, its spectrum and geometry.
pub struct CorpusEntry {
    pub id: String,
    pub spectrum: Spectrum,
    pub geometry: GeometrySummary,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub checks: Vec<Check>,
    /// Thresholds as multiples of each domain's completeness threshold,
    /// in `(0, 1]`.
    pub lambda_fractions: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Values of `m` for the improved Li-Yau check (clipped to what the
    /// spectrum certifies).
    pub ms: Vec<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            lambda_fractions: vec![0.05, 0.1, 0.25, 0.5, 0.75, 1.0],
            gammas: vec![1.0, 1.5, 2.0],
            ms: vec![1, 2, 3, 5, 10, 20, 50, 100],
        }
    }
}

/// Runs the selected checks over a corpus; rows come out in corpus order.
pub fn run_suite(corpus: &[CorpusEntry], opts: &SuiteOptions) -> Result<Vec<InequalityReport>> {
    let per_domain: Vec<Result<Vec<InequalityReport>>> = corpus
        .par_iter()
        .map(|e| {
            let mut out = Vec::new();
            let (s, g) = (&e.spectrum, &e.geometry);
            for &check in &opts.checks {
                match check {
                    Check::Berezin | Check::ImprovedBerezin => {
                        for &f in &opts.lambda_fractions {
                            for &gamma in &opts.gammas {
                                let q = RieszQuery::new(f * s.complete_below(), gamma)?;
                                out.push(if check == Check::Berezin {
                                    berezin_check(s, g, q)?
                                } else {
                                    improved_berezin_check(s, g, q)?.0
                                });
                            }
                        }
                    }
                    Check::LiYau => out.push(li_yau_check(s, g)?),
                    Check::HerschProtter => out.push(hersch_protter_check(s, g)?),
                    Check::ImprovedLiYau => {
                        let n = s.certified_len();
                        for &m in opts.ms.iter().filter(|&&m| m >= 1 && m <= n) {
                            out.push(improved_li_yau_check(s, g, m)?.0);
                        }
                    }
                }
            }
            Ok(out.into_iter().map(|r| r.with_domain(e.id.clone())).collect())
        })
        .collect();
    let mut all = Vec::new();
    for r in per_domain {
        all.extend(r?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{box_summary, disk_summary, BoxDomain, DiskDomain};
    use crate::spectrum::{box_spectrum, disk_spectrum, SpectrumSource};

    fn square() -> (Spectrum, GeometrySummary) {
        let b = BoxDomain::new(vec![1.0, 1.0]).unwrap();
        (box_spectrum(&b, 1000.0).unwrap(), box_summary(&b))
    }

    fn unit_disk() -> (Spectrum, GeometrySummary) {
        let d = DiskDomain::with_area(1.0).unwrap();
        (disk_spectrum(&d, 1000.0).unwrap(), disk_summary(&d))
    }

    fn q(l: f64, g: f64) -> RieszQuery {
        RieszQuery::new(l, g).unwrap()
    }

    #[test]
    fn constants() {
        assert!((lt_constant(1.0, 2) * 8.0 * PI - 1.0).abs() < 1e-14);
        assert!((lt_constant(0.0, 2) * 4.0 * PI - 1.0).abs() < 1e-14);
        assert!((lt_constant(1.0, 1) * 3.0 * PI / 2.0 - 1.0).abs() < 1e-14);
        assert!((lt_constant(1.0, 2) - 0.039_788_7).abs() < 1e-7);
        assert!((lt_constant(1.0, 1) - 0.212_206_6).abs() < 1e-7);
        assert_eq!(lt_constant(1.5, 0), 1.0);
        assert!((sum_constant_a(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sum_constant_b(2) - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
        assert!((sum_constant_b(2) - 2.36327).abs() < 1e-5);
        // n = 1: A_1 = 4 pi Gamma(3/2)^2 / 3 = pi^2 / 3
        assert!((sum_constant_a(1) - PI * PI / 3.0).abs() < 1e-13);
        let c = SemiclassicalConstants::new(1.0, 2).unwrap();
        assert_eq!(c.lt_constant, lt_constant(1.0, 2));
        assert!(SemiclassicalConstants::new(1.0, 0).is_err());
    }

    #[test]
    fn lt_constant_matches_direct_gamma_products() {
        // Gamma(g+1)/Gamma(g+2) = 1/(g+1) and Gamma(g+1)/Gamma(g+1+1/2) by recursion from sqrt(pi)
        for g in [0.0, 1.0, 2.0, 3.0] {
            let direct = 1.0 / (4.0 * PI * (g + 1.0));
            assert!((lt_constant(g, 2) / direct - 1.0).abs() < 1e-14);
        }
        // Gamma(2)/Gamma(5/2) = 4/(3 sqrt(pi)), Gamma(3)/Gamma(7/2) = 16/(15 sqrt(pi))
        assert!((lt_constant(1.0, 1) - 4.0 / (3.0 * PI.sqrt() * (4.0 * PI).sqrt())).abs() < 1e-15);
        assert!((lt_constant(2.0, 1) - 16.0 / (15.0 * PI.sqrt() * (4.0 * PI).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn berezin_examples() {
        let (s, g) = square();
        let r = berezin_check(&s, &g, q(50.0, 1.0)).unwrap();
        assert!(r.passed);
        assert!((r.bound - 2500.0 / (8.0 * PI)).abs() < 1e-10);
        assert!((r.value - 31.5648).abs() < 1e-4);
        assert!(r.margin > 0.0);
        let r = berezin_check(&s, &g, q(10.0, 1.0)).unwrap();
        assert!(r.passed && r.value == 0.0);
        let (s, g) = unit_disk();
        let r = berezin_check(&s, &g, q(100.0, 1.0)).unwrap();
        assert!(r.passed && r.margin > 0.0);
        assert!(berezin_check(&s, &g, q(100.0, 0.5)).is_err());
    }

    #[test]
    fn improved_berezin_examples() {
        let (s, g) = square();
        let (r, c) = improved_berezin_check(&s, &g, q(50.0, 1.0)).unwrap();
        let oracle = (2500.0 / (8.0 * PI) - 31.5648) / (2.0 / (3.0 * PI) * 4.0 * 50f64.powf(1.5));
        assert!((c.unwrap() - oracle).abs() < 1e-5);
        assert!((c.unwrap() - 0.2263).abs() < 1e-4);
        assert!(r.passed);
        let (r, c) = improved_berezin_check(&s, &g, q(9.0, 1.0)).unwrap();
        assert!(r.passed && c.is_none() && r.value == 0.0);
        let (s, g) = unit_disk();
        let (r, c) = improved_berezin_check(&s, &g, q(500.0, 1.0)).unwrap();
        let c = c.unwrap();
        assert!(r.passed && c > 0.0 && c <= 0.25, "{c}");
    }

    #[test]
    fn li_yau_examples() {
        let (s, g) = square();
        let r = li_yau_check(&s, &g).unwrap();
        assert!(r.passed);
        let r1 = li_yau_check(&Spectrum::exact(vec![s.eigenvalues()[0]], 20.0).unwrap(), &g).unwrap();
        assert!((r1.bound - 2.0 * PI).abs() < 1e-13);
        let (s, g) = unit_disk();
        assert!(li_yau_check(&s, &g).unwrap().passed);
        let b = BoxDomain::new(vec![4.0, 0.25]).unwrap();
        let r = li_yau_check(&box_spectrum(&b, 500.0).unwrap(), &box_summary(&b)).unwrap();
        // lambda_k = pi^2 (k^2/16 + 16) against 2 pi k is tightest at k = 16
        assert!(r.passed && r.m == Some(16), "{r:?}");
        assert!((r.margin - (PI - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn hersch_examples() {
        let (s, g) = square();
        let r = hersch_protter_check(&s, &g).unwrap();
        assert!(r.passed && (r.bound - PI * PI).abs() < 1e-12);
        let (s, g) = unit_disk();
        let r = hersch_protter_check(&s, &g).unwrap();
        assert!(r.passed && (r.bound - PI.powi(3) / 4.0).abs() < 1e-12);
        let b = BoxDomain::new(vec![10.0, 0.1]).unwrap();
        let r = hersch_protter_check(&box_spectrum(&b, 1000.0).unwrap(), &box_summary(&b)).unwrap();
        assert!(r.passed);
        assert!((r.value / r.bound - 1.0001).abs() < 1e-6);
        assert!(hersch_protter_check(&Spectrum::exact(vec![], 5.0).unwrap(), &g).is_err());
    }

    #[test]
    fn improved_li_yau_examples() {
        let (s, g) = square();
        let (r, c) = improved_li_yau_check(&s, &g, 1).unwrap();
        assert!(r.passed);
        let oracle = (2.0 * PI * PI - 2.0 * PI) / (4.0 * PI.sqrt() / 3.0 * 4.0);
        assert!((c - oracle).abs() < 1e-12);
        assert!((c - 1.4235).abs() < 1e-4);
        let (_, c3) = improved_li_yau_check(&s, &g, 3).unwrap();
        assert!((c3 - 1.2599).abs() < 1e-4);
        let (s, g) = unit_disk();
        assert!(improved_li_yau_check(&s, &g, 1).unwrap().1 > 0.0);
    }

    #[test]
    fn weyl_examples() {
        let (s, g) = square();
        assert!((weyl_prediction(&g, 1.0) + 2.0 / (3.0 * PI)).abs() < 1e-14);
        let r = weyl_residual(&s, &g, q(1000.0, 1.0)).unwrap();
        assert!(r < 0.0);
        // empty window: minus the scaled leading term
        let r0 = weyl_residual(&s, &g, q(10.0, 1.0)).unwrap();
        assert!((r0 + lt_constant(1.0, 2) * 10f64.sqrt()).abs() < 1e-12);
        let (_, gd) = unit_disk();
        assert!((weyl_prediction(&gd, 1.0) + lt_constant(1.0, 1) * 2.0 * PI.sqrt() / 4.0).abs() < 1e-14);
        assert!((weyl_prediction(&gd, 1.0) + 0.18807).abs() < 1e-5);
    }

    #[test]
    fn fem_brackets_are_used() {
        // a value just under the Berezin bound but with a wide bracket fails
        let g = GeometrySummary {
            area: 1.0,
            perimeter: 4.0,
            inradius: 0.5,
            width: 1.0,
            diameter: 2f64.sqrt(),
            dim: 2,
        };
        let s = Spectrum::new(vec![7.0], vec![0.0], 10.0, SpectrumSource::Fem).unwrap();
        assert!(li_yau_check(&s, &g).unwrap().passed);
        let s = Spectrum::new(vec![7.0], vec![1.0], 10.0, SpectrumSource::Fem).unwrap();
        assert!(!li_yau_check(&s, &g).unwrap().passed);
    }

    #[test]
    fn suite_and_csv() {
        let (s, g) = square();
        let corpus = vec![CorpusEntry {
            id: "square".into(),
            spectrum: s,
            geometry: g,
        }];
        let rows = run_suite(&corpus, &SuiteOptions::default()).unwrap();
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");
        assert!(rows.iter().all(|r| r.domain_id == "square"));
        let csv = report_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), REPORT_CSV_HEADER);
        assert_eq!(csv.lines().count(), rows.len() + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("berezin,square,"));
        assert!(Check::parse("nope").is_err());
        assert_eq!(Check::parse("liyau").unwrap(), Check::LiYau);
    }
}
