//! Optimizer sweeps over increasing `Lambda` (or `m`) with warm starts.

use std::fmt::Write as _;

use super::{minimize_eigenvalue_mean, optimize_with, FamilySpec, OptimizationResult, OptimizeOptions};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::riesz::{RieszQuery, RieszValue};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StudyKey {
    Lambda(f64),
    Sum(usize),
}

#[derive(Clone, Debug)]
pub struct StudyRow {
    pub key: StudyKey,
    pub best_params: Vec<f64>,
    pub objective: RieszValue,
    pub perimeter: f64,
    pub distance_to_reference: f64,
    pub evaluations: usize,
    /// Number of restart incumbents tied with the best.
    pub incumbents: usize,
}

fn row(f: FamilySpec, key: StudyKey, r: &OptimizationResult) -> Result<StudyRow> {
    let c = f.candidate(&r.best_params)?;
    Ok(StudyRow {
        key,
        best_params: r.best_params.clone(),
        objective: r.objective,
        perimeter: c.perimeter(),
        distance_to_reference: c.distance_to_reference()?,
        evaluations: r.evaluations,
        incumbents: r.incumbents.len(),
    })
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

pub fn convergence_study(f: FamilySpec, gamma: f64, lambdas: &[f64], budget: usize) -> Result<Vec<StudyRow>> {
    convergence_study_with(f, gamma, lambdas, &OptimizeOptions::new(budget, 0))
}

/// Maximizes the Riesz mean at each `Lambda`, warm-starting from the
/// previous maximizer.
pub fn convergence_study_with(
    f: FamilySpec,
    gamma: f64,
    lambdas: &[f64],
    opts: &OptimizeOptions,
) -> Result<Vec<StudyRow>> {
    if lambdas.is_empty() || !strictly_increasing(lambdas) {
        return Err(Error::invalid("lambdas must be a nonempty strictly increasing list"));
    }
    if gamma < 1.0 {
        return Err(Error::invalid("optimization studies need gamma >= 1"));
    }
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut o = opts.clone();
    for &lambda in lambdas {
        let r = optimize_with(f, RieszQuery::new(lambda, gamma)?, &o)?;
        rows.push(row(f, StudyKey::Lambda(lambda), &r)?);
        o.start = Some(r.best_params);
    }
    Ok(rows)
}

pub fn sum_minimization_study(f: FamilySpec, ms: &[usize], budget: usize) -> Result<Vec<StudyRow>> {
    sum_minimization_study_with(f, ms, &OptimizeOptions::new(budget, 0))
}

/// Minimizes the mean of the first `m` eigenvalues for each `m`.
pub fn sum_minimization_study_with(f: FamilySpec, ms: &[usize], opts: &OptimizeOptions) -> Result<Vec<StudyRow>> {
    if ms.is_empty() || ms[0] == 0 || ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "ms must be a nonempty strictly increasing list of positive integers",
        ));
    }
    let mut rows = Vec::with_capacity(ms.len());
    let mut o = opts.clone();
    for &m in ms {
        let r = minimize_eigenvalue_mean(f, m, &o)?;
        rows.push(row(f, StudyKey::Sum(m), &r)?);
        o.start = Some(r.best_params);
    }
    Ok(rows)
}

/// Study CSV; `gamma` is blank for eigenvalue-sum studies.
pub fn study_csv(f: FamilySpec, gamma: Option<f64>, rows: &[StudyRow]) -> String {
    let mut s = String::from("lambda_or_m,family,gamma");
    for i in 1..=f.param_len() {
        let _ = write!(s, ",param_{i}");
    }
    s.push_str(",objective,objective_lo,objective_hi,perimeter,distance_to_reference,evaluations\n");
    for r in rows {
        match r.key {
            StudyKey::Lambda(l) => s.push_str(&fmt_f64(l)),
            StudyKey::Sum(m) => {
                let _ = write!(s, "{m}");
            }
        }
        let _ = write!(s, ",{f},{}", gamma.map(fmt_f64).unwrap_or_default());
        for p in &r.best_params {
            let _ = write!(s, ",{}", fmt_f64(*p));
        }
        let _ = writeln!(
            s,
            ",{},{},{},{},{},{}",
            fmt_f64(r.objective.value),
            fmt_f64(r.objective.lower),
            fmt_f64(r.objective.upper),
            fmt_f64(r.perimeter),
            fmt_f64(r.distance_to_reference),
            r.evaluations
        );
    }
    s
}
