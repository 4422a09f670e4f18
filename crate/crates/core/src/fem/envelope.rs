//! Envelope (skyline) LDL^T factorization of `K - sigma M` under a reverse
//! Cuthill-McKee ordering. The inertia of `D` gives the Sturm count: the
//! number of generalized eigenvalues below `sigma`.

use std::collections::VecDeque;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee ordering of the sparsity graph of `a`;
/// `order[new] = old`.
pub fn rcm_order(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        let start = pseudo_peripheral(a, seed, &degree);
        let base = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = base;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut nbrs: Vec<usize> = a.row(v).0.iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeats breadth-first searches from the farthest minimum-degree node
/// while the eccentricity grows.
fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut start = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (depth, far) = bfs_levels(a, start);
        let cand = far.into_iter().min_by_key(|&v| (degree[v], v)).unwrap();
        if depth <= ecc {
            break;
        }
        ecc = depth;
        start = cand;
    }
    start
}

fn bfs_levels(a: &CsrMatrix, start: usize) -> (usize, Vec<usize>) {
    let n = a.dim();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut q = VecDeque::from([start]);
    let mut depth = 0;
    while let Some(v) = q.pop_front() {
        depth = depth.max(level[v]);
        for &w in a.row(v).0 {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                q.push_back(w);
            }
        }
    }
    let far = (0..n).filter(|&v| level[v] == depth).collect();
    (depth, far)
}

/// `P (K - sigma M) P^T = L D L^T` in envelope storage.
pub struct EnvelopeLdl {
    order: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    /// Row `i` holds `L[i][first[i]..i]` followed by `D[i]`.
    data: Vec<f64>,
    negative: usize,
}

impl EnvelopeLdl {
    /// Factors `K - sigma M`; `order` must be a permutation with
    /// `order[new] = old` and `K`, `M` must share a sparsity pattern.
    pub fn factor(k: &CsrMatrix, m: &CsrMatrix, sigma: f64, order: &[usize]) -> Result<Self> {
        let n = k.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in order.iter().enumerate() {
            for &c in k.row(old).0 {
                first[new] = first[new].min(inv[c]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (new, &old) in order.iter().enumerate() {
            let (kc, kv) = k.row(old);
            let (mc, mv) = m.row(old);
            for (&c, &v) in kc.iter().zip(kv) {
                let j = inv[c];
                if j <= new {
                    data[start[new] + j - first[new]] += v;
                }
            }
            for (&c, &v) in mc.iter().zip(mv) {
                let j = inv[c];
                if j <= new {
                    data[start[new] + j - first[new]] -= sigma * v;
                }
            }
        }
        let scale = (0..n)
            .map(|i| data[start[i + 1] - 1].abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut negative = 0;
        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            // First pass: w_ij = a_ij - sum_k w_ik l_jk (w = l d, not yet scaled)
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[row_i + j - fi];
                if k0 < j {
                    let wi = &data[row_i + k0 - fi..row_i + j - fi];
                    let lj = &data[start[j] + k0 - fj..start[j] + j - fj];
                    s -= dot(wi, lj);
                }
                data[row_i + j - fi] = s;
            }
            let mut d = data[row_i + i - fi];
            for j in fi..i {
                let w = data[row_i + j - fi];
                let dj = data[start[j + 1] - 1];
                let l = w / dj;
                d -= w * l;
                data[row_i + j - fi] = l;
            }
            if !(d.abs() > 1e-13 * scale) {
                return Err(Error::Numeric(format!(
                    "near-singular pivot {d:e} at row {i} for shift {sigma}"
                )));
            }
            if d < 0.0 {
                negative += 1;
            }
            data[row_i + i - fi] = d;
        }
        Ok(Self {
            order: order.to_vec(),
            first,
            start,
            data,
            negative,
        })
    }

    /// Number of negative pivots, i.e. of eigenvalues below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `(K - sigma M) x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.order.len();
        let mut y: Vec<f64> = self.order.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let l = &self.data[self.start[i]..self.start[i + 1] - 1];
            y[i] -= dot(l, &y[fi..i]);
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi /= self.data[self.start[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let l = &self.data[self.start[i]..self.start[i + 1] - 1];
            for (yj, lij) in y[fi..i].iter_mut().zip(l) {
                *yj -= lij * xi;
            }
        }
        for (new, &old) in self.order.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for t in 0..4 {
            acc[t] += a[4 * c + t] * b[4 * c + t];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for t in 4 * chunks..a.len() {
        s += a[t] * b[t];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dense(a: &CsrMatrix) -> DMatrix<f64> {
        DMatrix::from_fn(a.dim(), a.dim(), |i, j| a.get(i, j))
    }

    /// 1D Dirichlet Laplacian and mass on `n` interior nodes of `[0, 1]`.
    fn laplace_1d(n: usize) -> (CsrMatrix, CsrMatrix) {
        let h = 1.0 / (n + 1) as f64;
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for i in 0..n {
            kt.push((i, i, 2.0 / h));
            mt.push((i, i, 4.0 * h / 6.0));
            if i + 1 < n {
                for (a, b) in [(i, i + 1), (i + 1, i)] {
                    kt.push((a, b, -1.0 / h));
                    mt.push((a, b, h / 6.0));
                }
            }
        }
        (CsrMatrix::from_triplets(n, kt), CsrMatrix::from_triplets(n, mt))
    }

    #[test]
    fn rcm_is_permutation_and_tightens_band() {
        // a path graph given in scrambled order
        let n = 50;
        let perm: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let mut t = Vec::new();
        for i in 0..n {
            t.push((perm[i], perm[i], 2.0));
            if i + 1 < n {
                t.push((perm[i], perm[i + 1], -1.0));
                t.push((perm[i + 1], perm[i], -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let order = rcm_order(&a);
        let mut seen = order.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let mut inv = vec![0; n];
        for (k, &o) in order.iter().enumerate() {
            inv[o] = k;
        }
        for i in 0..n {
            for &j in a.row(i).0 {
                assert!(inv[i].abs_diff(inv[j]) <= 1);
            }
        }
    }

    #[test]
    fn solve_matches_dense() {
        let (k, m) = laplace_1d(30);
        let order = rcm_order(&k);
        let sigma = 25.0;
        let f = EnvelopeLdl::factor(&k, &m, sigma, &order).unwrap();
        let b: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x = b.clone();
        f.solve(&mut x);
        let a = dense(&k) - dense(&m) * sigma;
        let r = &a * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.norm() < 1e-10);
    }

    #[test]
    fn sturm_count_matches_dense_eigenvalues() {
        let (k, m) = laplace_1d(40);
        let order = rcm_order(&k);
        // M^{-1/2} K M^{-1/2} via Cholesky of M
        let l = dense(&m).cholesky().unwrap().l();
        let li = l.clone().try_inverse().unwrap();
        let c = &li * dense(&k) * li.transpose();
        let mut ev: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for sigma in [5.0, 50.0, 500.0, 5000.0] {
            let f = EnvelopeLdl::factor(&k, &m, sigma, &order).unwrap();
            let expect = ev.iter().filter(|&&e| e < sigma).count();
            assert_eq!(f.negative_pivots(), expect, "sigma {sigma}");
        }
    }

    #[test]
    fn singular_shift_is_reported() {
        // 1x1 problem with eigenvalue exactly 2
        let k = CsrMatrix::from_triplets(1, vec![(0, 0, 2.0)]);
        let m = CsrMatrix::from_triplets(1, vec![(0, 0, 1.0)]);
        assert!(EnvelopeLdl::factor(&k, &m, 2.0, &[0]).is_err());
    }
}
