//! Riesz means `Tr(-Delta - Lambda)_-^gamma = sum_{lambda_k < Lambda} (Lambda - lambda_k)^gamma`,
//! eigenvalue sums, and the identities linking them.

use std::fmt::Write as _;

use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::numeric::{compensated_sum, tanh_sinh};
use crate::spectrum::Spectrum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RieszQuery {
    pub lambda: f64,
    pub gamma: f64,
}

impl RieszQuery {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { lambda, gamma })
    }
}

/// A value with a certified enclosure `lower <= value <= upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RieszValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl RieszValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            lower: value,
            upper: value,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// `(Lambda - lambda)^gamma` for `lambda < Lambda`, with `0^0 = 1`.
#[inline]
fn summand(lambda: f64, ev: f64, gamma: f64) -> f64 {
    if ev < lambda {
        let d = lambda - ev;
        if gamma == 0.0 {
            1.0
        } else if gamma == 1.0 {
            d
        } else {
            d.powf(gamma)
        }
    } else {
        0.0
    }
}

fn riesz_sum(values: impl Iterator<Item = f64>, q: RieszQuery) -> f64 {
    compensated_sum(values.map(|ev| summand(q.lambda, ev, q.gamma)))
}

/// Riesz mean of order `q.gamma` at `q.lambda`; the bracket evaluates the
/// (monotone) summand at `lambda_k -/+ error_k`.
pub fn riesz_mean(s: &Spectrum, q: RieszQuery) -> Result<RieszValue> {
    if q.lambda > s.complete_below() {
        return Err(Error::Contract(format!(
            "Riesz mean at {} above the completeness threshold {}",
            q.lambda,
            s.complete_below()
        )));
    }
    let ev = s.eigenvalues();
    let err = s.error_bounds();
    let value = riesz_sum(ev.iter().copied(), q);
    if err.iter().all(|&e| e == 0.0) {
        return Ok(RieszValue::exact(value));
    }
    let upper = riesz_sum(ev.iter().zip(err).map(|(l, e)| l - e), q);
    let lower = riesz_sum(ev.iter().zip(err).map(|(l, e)| l + e), q);
    Ok(RieszValue { value, lower, upper })
}

/// Counting function `N(lambda)`, i.e. the Riesz mean of order zero.
pub fn counting_function(s: &Spectrum, lambda: f64) -> Result<RieszValue> {
    riesz_mean(s, RieszQuery::new(lambda, 0.0)?)
}

fn require_certified(s: &Spectrum, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    if s.certified_len() < m {
        return Err(Error::Contract(format!(
            "{m} eigenvalues requested but only {} are certified",
            s.certified_len()
        )));
    }
    Ok(())
}

/// `sum_{k <= m} lambda_k` with the summed error bounds as bracket.
pub fn eigenvalue_sum(s: &Spectrum, m: usize) -> Result<RieszValue> {
    require_certified(s, m)?;
    let value = compensated_sum(s.eigenvalues()[..m].iter().copied());
    let e = compensated_sum(s.error_bounds()[..m].iter().copied());
    Ok(RieszValue {
        value,
        lower: value - e,
        upper: value + e,
    })
}

/// Both sides of `sup_{Lambda >= 0} (m Lambda - Tr(-Delta - Lambda)_-) = sum_{k<=m} lambda_k`.
///
/// The left side is concave and piecewise linear with kinks at the
/// eigenvalues, so its supremum is the largest value at the breakpoints
/// `lambda_1, ..., lambda_{m+1}`.
pub fn legendre_identity_check(s: &Spectrum, m: usize) -> Result<(f64, f64)> {
    require_certified(s, m + 1)?;
    let ev = s.eigenvalues();
    let mut sup = 0.0f64;
    for &lam in &ev[..=m] {
        let tr = riesz_sum(
            ev.iter().copied(),
            RieszQuery {
                lambda: lam,
                gamma: 1.0,
            },
        );
        sup = sup.max(m as f64 * lam - tr);
    }
    let direct = compensated_sum(ev[..m].iter().copied());
    Ok((sup, direct))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumEquivalenceReport {
    pub lambda: f64,
    /// Index of the first candidate attaining the largest `Tr^1`.
    pub riesz_argmax: usize,
    /// `N(lambda)` of that candidate.
    pub m: usize,
    /// Index of the first candidate attaining the smallest `m`-sum.
    pub sum_argmin: usize,
    pub riesz_values: Vec<f64>,
    /// `m`-sums; candidates with fewer than `m` certified eigenvalues carry a
    /// lower bound.
    pub sums: Vec<f64>,
    /// More than one candidate attains the optimum.
    pub tie: bool,
    pub passed: bool,
}

/// Relative tolerance under which objective values count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Checks that the `Tr^1` maximizer over a family also minimizes the sum
/// of its first `N(lambda)` eigenvalues. Candidates are compared in list
/// order, so ties go to the earliest entry.
pub fn sum_equivalence_check<P>(family: &[(P, Spectrum)], lambda: f64) -> Result<SumEquivalenceReport> {
    if family.is_empty() {
        return Err(Error::invalid("empty family"));
    }
    let q = RieszQuery::new(lambda, 1.0)?;
    let riesz_values = family
        .iter()
        .map(|(_, s)| riesz_mean(s, q).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let best = riesz_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let near = |a: f64, b: f64| (a - b).abs() <= TIE_TOL * a.abs().max(b.abs());
    let riesz_argmax = riesz_values.iter().position(|&v| near(v, best)).unwrap();
    let riesz_ties = riesz_values.iter().filter(|&&v| near(v, best)).count();
    let m = family[riesz_argmax].1.count_below(lambda);
    if m == 0 {
        // every Riesz mean vanishes; nothing to compare
        return Ok(SumEquivalenceReport {
            lambda,
            riesz_argmax,
            m,
            sum_argmin: 0,
            sums: vec![0.0; family.len()],
            riesz_values,
            tie: family.len() > 1,
            passed: riesz_argmax == 0,
        });
    }
    let mut sums = Vec::with_capacity(family.len());
    let mut is_bound = Vec::with_capacity(family.len());
    for (_, s) in family {
        let known = s.certified_len().min(m);
        let partial = compensated_sum(s.eigenvalues()[..known].iter().copied());
        // missing eigenvalues are at least the completeness threshold
        sums.push(partial + (m - known) as f64 * s.complete_below());
        is_bound.push(known < m);
    }
    let min = (0..family.len())
        .filter(|&i| !is_bound[i])
        .map(|i| sums[i])
        .fold(f64::INFINITY, f64::min);
    if let Some(i) = (0..family.len()).find(|&i| is_bound[i] && sums[i] <= min) {
        return Err(Error::Contract(format!(
            "candidate {i} has too few eigenvalues to rule it out as the {m}-sum minimizer"
        )));
    }
    let sum_argmin = (0..family.len()).find(|&i| near(sums[i], min)).unwrap();
    let sum_ties = (0..family.len()).filter(|&i| near(sums[i], min)).count();
    Ok(SumEquivalenceReport {
        lambda,
        riesz_argmax,
        m,
        sum_argmin,
        riesz_values,
        sums,
        tie: riesz_ties > 1 || sum_ties > 1,
        passed: riesz_argmax == sum_argmin,
    })
}

/// Quadrature tolerance of the Aizenman-Lieb check.
pub const AIZENMAN_LIEB_TOL: f64 = 1e-9;

/// Both sides of the Aizenman-Lieb identity
/// `Tr^{g2}(Lambda) = B(1+g1, g2-g1)^{-1} int_0^Lambda tau^{g2-g1-1} Tr^{g1}(Lambda - tau) dtau`.
///
/// The left side is the direct Riesz mean; the right side is integrated by
/// tanh-sinh quadrature between consecutive breakpoints `Lambda - lambda_k`.
pub fn aizenman_lieb_check(s: &Spectrum, lambda: f64, gamma1: f64, gamma2: f64) -> Result<(f64, f64)> {
    if !(gamma1 >= 0.0 && gamma2 > gamma1 && gamma2.is_finite()) {
        return Err(Error::invalid("need gamma2 > gamma1 >= 0"));
    }
    let lhs = riesz_mean(s, RieszQuery::new(lambda, gamma2)?)?.value;
    let a = gamma2 - gamma1;
    // breakpoints tau_k = Lambda - lambda_k in (0, Lambda], ascending
    // (repeated by multiplicity)
    let mut taus: Vec<f64> = s
        .eigenvalues()
        .iter()
        .filter(|&&l| l < lambda)
        .map(|&l| lambda - l)
        .collect();
    taus.reverse();
    if taus.is_empty() {
        return Ok((lhs, 0.0));
    }
    let mut pieces = Vec::with_capacity(taus.len());
    let mut lo = 0.0;
    for (j, &hi) in taus.iter().enumerate() {
        if hi <= lo {
            continue;
        }
        // on (lo, hi) the active breakpoints are taus[j..]
        let active = &taus[j..];
        let f = |tau: f64, da: f64, db: f64| -> f64 {
            let t = if lo == 0.0 { da } else { tau };
            let w = if a == 1.0 { 1.0 } else { t.powf(a - 1.0) };
            // Lambda - lambda_k - tau = (tau_k - hi) + (hi - tau)
            let tr = compensated_sum(active.iter().map(|&tk| {
                let d = (tk - hi) + db;
                if gamma1 == 0.0 {
                    1.0
                } else {
                    d.powf(gamma1)
                }
            }));
            w * tr
        };
        let qd = tanh_sinh(f, lo, hi, 1e-13);
        if !qd.converged || qd.error_estimate > AIZENMAN_LIEB_TOL * qd.value.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!(
                "quadrature on [{lo}, {hi}] missed tolerance {AIZENMAN_LIEB_TOL}"
            )));
        }
        pieces.push(qd.value);
        lo = hi;
    }
    let integral = compensated_sum(pieces);
    let rhs = integral * (-ln_beta(1.0 + gamma1, a)).exp();
    Ok((lhs, rhs))
}

/// `lambda,gamma,value,lower,upper` rows with a header.
pub fn riesz_csv(rows: &[(RieszQuery, RieszValue)]) -> String {
    let mut s = String::from("lambda,gamma,value,lower,upper\n");
    for (q, v) in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_f64(q.lambda),
            fmt_f64(q.gamma),
            fmt_f64(v.value),
            fmt_f64(v.lower),
            fmt_f64(v.upper)
        );
    }
    s
}
