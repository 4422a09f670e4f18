//! Nelder-Mead simplex search (maximizing) under an evaluation budget.

use rayon::prelude::*;

use crate::error::Result;

pub(crate) struct SearchOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// Incumbent after every improvement.
    pub trace: Vec<(Vec<f64>, f64)>,
}

/// Stop when the incumbent improved by less than `STALL_TOL` (relative)
/// over the last `STALL_WINDOW` evaluations.
pub(crate) const STALL_WINDOW: usize = 50;
pub(crate) const STALL_TOL: f64 = 1e-6;

struct Tracker {
    best_x: Vec<f64>,
    best_f: f64,
    history: Vec<f64>,
    trace: Vec<(Vec<f64>, f64)>,
}

impl Tracker {
    fn record(&mut self, x: &[f64], f: f64) {
        if f > self.best_f {
            self.best_f = f;
            self.best_x = x.to_vec();
            self.trace.push((x.to_vec(), f));
        }
        self.history.push(self.best_f);
    }

    fn stalled(&self) -> bool {
        let n = self.history.len();
        if n <= STALL_WINDOW || !self.best_f.is_finite() {
            return false;
        }
        let then = self.history[n - 1 - STALL_WINDOW];
        then.is_finite() && self.best_f - then <= STALL_TOL * self.best_f.abs().max(1e-300)
    }
}

/// Maximizes `f` from the axis simplex `x0 + steps[i] e_i`. `f` may return
/// `-inf` for infeasible points.
pub(crate) fn maximize<F>(f: F, x0: &[f64], steps: &[f64], budget: usize) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let values: Vec<f64> = simplex.par_iter().map(|x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut t = Tracker {
        best_x: x0.to_vec(),
        best_f: f64::NEG_INFINITY,
        history: Vec::new(),
        trace: Vec::new(),
    };
    let mut fs = Vec::with_capacity(n + 1);
    for (x, v) in simplex.iter().zip(values) {
        t.record(x, v);
        fs.push(v);
    }
    // `None` once the budget is spent
    let eval = |x: &[f64], t: &mut Tracker| -> Result<Option<f64>> {
        if t.history.len() >= budget {
            return Ok(None);
        }
        let v = f(x)?;
        t.record(x, v);
        Ok(Some(v))
    };

    while t.history.len() < budget && !t.stalled() {
        // descending by value, ties by index
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]).then(a.cmp(&b)));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fs = idx.iter().map(|&i| fs[i]).collect();

        let spread = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < 1e-12 {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |c: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + c * (simplex[n][j] - centroid[j]))
                .collect()
        };
        let xr = along(-1.0);
        let Some(fr) = eval(&xr, &mut t)? else { break };
        if fr > fs[0] {
            let xe = along(-2.0);
            let Some(fe) = eval(&xe, &mut t)? else { break };
            if fe > fr {
                simplex[n] = xe;
                fs[n] = fe;
            } else {
                simplex[n] = xr;
                fs[n] = fr;
            }
            continue;
        }
        if fr > fs[n - 1] {
            simplex[n] = xr;
            fs[n] = fr;
            continue;
        }
        let outside = fr > fs[n];
        let xc = along(if outside { -0.5 } else { 0.5 });
        let Some(fc) = eval(&xc, &mut t)? else { break };
        if (outside && fc >= fr) || (!outside && fc > fs[n]) {
            simplex[n] = xc;
            fs[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        let room = budget - t.history.len();
        let best = simplex[0].clone();
        let shrunk: Vec<Vec<f64>> = simplex[1..]
            .iter()
            .take(room)
            .map(|v| v.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect())
            .collect();
        let vals: Vec<f64> = shrunk.par_iter().map(|x| f(x)).collect::<Result<Vec<_>>>()?;
        for (k, (x, v)) in shrunk.into_iter().zip(vals).enumerate() {
            t.record(&x, v);
            simplex[k + 1] = x;
            fs[k + 1] = v;
        }
    }
    Ok(SearchOutcome {
        x: t.best_x,
        f: t.best_f,
        evaluations: t.history.len(),
        trace: t.trace,
    })
}
