//! Generalized symmetric eigenproblem `K x = lambda M x` (`K`, `M` positive
//! definite) on an interval of the spectrum.
//!
//! Each interval `[lo, hi)` is handled by shift-invert Lanczos on
//! `(K - sigma M)^{-1} M` with `sigma` at the interval midpoint, in the
//! `M`-inner product with full reorthogonalization. Converged Ritz pairs in
//! the interval are locked and later runs are deflated against them, so
//! repeated eigenvalues are recovered one copy per run. The run stops when
//! the number of locked pairs equals the Sturm count `nu(hi) - nu(lo)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::envelope::{rcm_order, EnvelopeLdl};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Intervals with more eigenvalues than this are split before solving.
pub const MAX_SLICE_EIGENVALUES: usize = 200;
const RITZ_TOL: f64 = 1e-11;
const MAX_RUNS: usize = 60;

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    /// `||K x - lambda M x|| / ||K x||`.
    pub residual: f64,
}

pub struct GeneralizedEigenproblem<'a> {
    k: &'a CsrMatrix,
    m: &'a CsrMatrix,
    order: Vec<usize>,
}

impl<'a> GeneralizedEigenproblem<'a> {
    pub fn new(k: &'a CsrMatrix, m: &'a CsrMatrix) -> Self {
        let order = rcm_order(k);
        Self { k, m, order }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Factors at `sigma`, nudging the shift away from (near) eigenvalues.
    fn factor_near(&self, sigma: f64) -> Result<(EnvelopeLdl, f64)> {
        let mut s = sigma;
        let mut last = None;
        for attempt in 0..8 {
            match EnvelopeLdl::factor(self.k, self.m, s, &self.order) {
                Ok(f) => return Ok((f, s)),
                Err(e) => {
                    last = Some(e);
                    s = sigma * (1.0 + 1e-7 * (attempt + 1) as f64);
                }
            }
        }
        Err(last.unwrap())
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn sturm_count(&self, sigma: f64) -> Result<usize> {
        if sigma <= 0.0 {
            return Ok(0);
        }
        Ok(self.factor_near(sigma)?.0.negative_pivots())
    }

    /// All eigenvalues below `mu`, ascending.
    pub fn eigenvalues_below(&self, mu: f64) -> Result<Vec<EigenPair>> {
        let total = self.sturm_count(mu)?;
        if total == 0 {
            return Ok(Vec::new());
        }
        let mut cuts = vec![(0.0, 0usize)];
        let slices = total.div_ceil(MAX_SLICE_EIGENVALUES * 3 / 4);
        // counts grow roughly linearly in lambda in the plane
        for s in 1..slices {
            let x = mu * s as f64 / slices as f64;
            cuts.push((x, self.sturm_count(x)?));
        }
        cuts.push((mu, total));
        let mut out = Vec::with_capacity(total);
        let mut seed = 0u64;
        let mut stack: Vec<((f64, usize), (f64, usize))> = cuts.windows(2).rev().map(|w| (w[0], w[1])).collect();
        while let Some(((lo, clo), (hi, chi))) = stack.pop() {
            let need = chi - clo;
            if need == 0 {
                continue;
            }
            if need > MAX_SLICE_EIGENVALUES && hi - lo > 1e-9 * hi {
                let mid = 0.5 * (lo + hi);
                let cm = self.sturm_count(mid)?;
                stack.push(((mid, cm), (hi, chi)));
                stack.push(((lo, clo), (mid, cm)));
                continue;
            }
            seed += 1;
            out.extend(self.solve_interval(lo, hi, need, seed)?);
        }
        out.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(out)
    }

    /// The `n` smallest eigenvalues.
    pub fn lowest(&self, n: usize, guess: f64) -> Result<Vec<EigenPair>> {
        if n > self.dim() {
            return Err(Error::invalid(format!(
                "{n} eigenvalues requested from a problem of dimension {}",
                self.dim()
            )));
        }
        let mut lo = 0.0;
        let mut mu = guess.max(f64::MIN_POSITIVE);
        loop {
            let c = self.sturm_count(mu)?;
            if c >= n {
                break;
            }
            lo = mu;
            mu *= 1.5;
        }
        // tighten the threshold so few unwanted eigenvalues are computed
        for _ in 0..6 {
            let mid = 0.5 * (lo + mu);
            if self.sturm_count(mid)? >= n {
                mu = mid;
            } else {
                lo = mid;
            }
        }
        let mut v = self.eigenvalues_below(mu)?;
        v.truncate(n);
        Ok(v)
    }

    fn solve_interval(&self, lo: f64, hi: f64, need: usize, seed: u64) -> Result<Vec<EigenPair>> {
        let sigma = if lo <= 0.0 { 0.0 } else { 0.5 * (lo + hi) };
        let (fact, sigma) = self.factor_near(sigma)?;
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // locked vectors and their M-images
        let mut x: Vec<Vec<f64>> = Vec::new();
        let mut mx: Vec<Vec<f64>> = Vec::new();
        let mut pairs = Vec::new();
        for _ in 0..MAX_RUNS {
            if pairs.len() >= need {
                break;
            }
            let remaining = need - pairs.len();
            let dim = (2 * remaining + 40).max(60).min(n - x.len());
            if dim == 0 {
                break;
            }
            let start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let (q, t, beta_last) = self.lanczos_run(&fact, start, dim, &x, &mx);
            let k = t.nrows();
            let eig = SymmetricEigen::new(t);
            for i in 0..k {
                let theta = eig.eigenvalues[i];
                if theta == 0.0 {
                    continue;
                }
                let lam = sigma + 1.0 / theta;
                if !(lam >= lo && lam < hi) {
                    continue;
                }
                let resid = (beta_last * eig.eigenvectors[(k - 1, i)]).abs();
                if resid > RITZ_TOL * theta.abs() {
                    continue;
                }
                let mut v = vec![0.0; n];
                for (j, qj) in q.iter().enumerate() {
                    let c = eig.eigenvectors[(j, i)];
                    for (a, b) in v.iter_mut().zip(qj) {
                        *a += c * b;
                    }
                }
                if let Some((v, mv)) = m_orthonormalize(self.m, v, &x, &mx) {
                    let kv = self.k.apply(&v);
                    // Rayleigh quotient; v is M-normalized
                    let value = dot(&v, &kv);
                    if !(value >= lo && value < hi) {
                        continue;
                    }
                    let r: f64 = kv
                        .iter()
                        .zip(&mv)
                        .map(|(a, b)| (a - value * b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    let residual = r / dot(&kv, &kv).sqrt();
                    pairs.push(EigenPair { value, residual });
                    x.push(v);
                    mx.push(mv);
                }
            }
        }
        if pairs.len() < need {
            return Err(Error::Numeric(format!(
                "eigensolver found {} of {need} eigenvalues in [{lo}, {hi})",
                pairs.len()
            )));
        }
        pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
        pairs.truncate(need);
        Ok(pairs)
    }

    /// Lanczos tridiagonalization of `(K - sigma M)^{-1} M` deflated
    /// against `locked`; returns the basis, `T`, and the residual
    /// coefficient `beta_k`.
    fn lanczos_run(
        &self,
        fact: &EnvelopeLdl,
        start: Vec<f64>,
        dim: usize,
        locked: &[Vec<f64>],
        locked_m: &[Vec<f64>],
    ) -> (Vec<Vec<f64>>, DMatrix<f64>, f64) {
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut mq: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut alpha = Vec::with_capacity(dim);
        let mut beta: Vec<f64> = Vec::with_capacity(dim);
        let mut w = start;
        project_out(&mut w, locked, locked_m);
        let mut last_beta = 0.0;
        let mut scale = 0.0f64;
        for j in 0..dim {
            let mw = self.m.apply(&w);
            let nrm = dot(&w, &mw).max(0.0).sqrt();
            if !(nrm > 1e-13 * scale) || nrm == 0.0 {
                // invariant subspace: the Ritz values are exact
                last_beta = 0.0;
                break;
            }
            if j > 0 {
                beta.push(nrm);
            }
            let inv = 1.0 / nrm;
            let qj: Vec<f64> = w.iter().map(|v| v * inv).collect();
            let mqj: Vec<f64> = mw.iter().map(|v| v * inv).collect();
            let mut next = mqj.clone();
            fact.solve(&mut next);
            let a = dot(&mqj, &next);
            scale = scale.max(a.abs());
            alpha.push(a);
            q.push(qj);
            mq.push(mqj);
            // full reorthogonalization; a second pass only when the first
            // removed most of the vector
            let j0 = q.len().saturating_sub(2);
            project_out(&mut next, &q[j0..], &mq[j0..]);
            let before = dot(&next, &self.m.apply(&next));
            project_out(&mut next, locked, locked_m);
            project_out(&mut next, &q, &mq);
            if dot(&next, &self.m.apply(&next)) < 0.5 * before {
                project_out(&mut next, locked, locked_m);
                project_out(&mut next, &q, &mq);
            }
            w = next;
            if j + 1 == dim {
                let mw = self.m.apply(&w);
                last_beta = dot(&w, &mw).max(0.0).sqrt();
            }
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        (q, t, last_beta)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `w -= sum_i v_i (Mv_i . w)`.
fn project_out(w: &mut [f64], v: &[Vec<f64>], mv: &[Vec<f64>]) {
    for (vi, mvi) in v.iter().zip(mv) {
        let c = dot(mvi, w);
        for (a, b) in w.iter_mut().zip(vi) {
            *a -= c * b;
        }
    }
}

/// M-orthonormalizes `v` against `x`; `None` if `v` lies (numerically) in
/// their span.
fn m_orthonormalize(m: &CsrMatrix, mut v: Vec<f64>, x: &[Vec<f64>], mx: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<f64>)> {
    let before = dot(&v, &m.apply(&v)).sqrt();
    for _ in 0..2 {
        project_out(&mut v, x, mx);
    }
    let mv = m.apply(&v);
    let after = dot(&v, &mv).sqrt();
    if !(after > 0.5 * before) {
        return None;
    }
    let inv = 1.0 / after;
    Some((
        v.iter().map(|a| a * inv).collect(),
        mv.iter().map(|a| a * inv).collect(),
    ))
}
