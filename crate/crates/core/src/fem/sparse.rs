use super::mesh::TriangleMesh;

/// Compressed sparse row matrix; symmetric matrices store both triangles.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an `n x n` matrix from `(row, col, value)` triplets, summing
    /// duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }
}

/// P1 stiffness and consistent mass matrices on the interior nodes of a
/// mesh, plus the node index of every degree of freedom.
pub struct Assembly {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub dof_nodes: Vec<usize>,
}

pub fn assemble(mesh: &TriangleMesh) -> Assembly {
    let mut dof = vec![usize::MAX; mesh.nodes().len()];
    let mut dof_nodes = Vec::new();
    for (i, b) in mesh.boundary_flags().iter().enumerate() {
        if !b {
            dof[i] = dof_nodes.len();
            dof_nodes.push(i);
        }
    }
    let n = dof_nodes.len();
    let mut kt = Vec::with_capacity(9 * mesh.triangles().len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles().len());
    for t in mesh.triangles() {
        let p = t.map(|i| mesh.nodes()[i]);
        // b_i = y_j - y_k, c_i = x_k - x_j over cyclic (i, j, k)
        let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
        let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
        let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
        for i in 0..3 {
            let di = dof[t[i]];
            if di == usize::MAX {
                continue;
            }
            for j in 0..3 {
                let dj = dof[t[j]];
                if dj == usize::MAX {
                    continue;
                }
                kt.push((di, dj, (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)));
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                mt.push((di, dj, m));
            }
        }
    }
    Assembly {
        stiffness: CsrMatrix::from_triplets(n, kt),
        mass: CsrMatrix::from_triplets(n, mt),
        dof_nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::triangulate_level;
    use crate::geometry::ConvexPolygon;

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, vec![(1, 0, 2.0), (0, 0, 1.0), (1, 0, 3.0), (1, 1, 4.0)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 0), 5.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.apply(&[1.0, 1.0]), vec![1.0, 9.0]);
    }

    #[test]
    fn mass_integrates_and_stiffness_annihilates_constants() {
        // Without eliminating the boundary, sum(M) = area and K 1 = 0.
        let sq = ConvexPolygon::rectangle(2.0, 1.5).unwrap();
        let mut mesh = triangulate_level(&sq, 2);
        let n = mesh.nodes().len();
        mesh = mesh.with_boundary_flags(vec![false; n]);
        let asm = assemble(&mesh);
        let ones = vec![1.0; n];
        let m1 = asm.mass.apply(&ones);
        assert!((m1.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        for v in asm.stiffness.apply(&ones) {
            assert!(v.abs() < 1e-12);
        }
        let xs: Vec<f64> = mesh.nodes().iter().map(|p| p.x).collect();
        let kx = asm.stiffness.apply(&xs);
        let energy: f64 = xs.iter().zip(&kx).map(|(a, b)| a * b).sum();
        // int |grad x|^2 = area
        assert!((energy - 3.0).abs() < 1e-12);
    }

    #[test]
    fn interior_dofs_only() {
        let mesh = triangulate_level(&ConvexPolygon::unit_square(), 1);
        let asm = assemble(&mesh);
        assert_eq!(asm.dof_nodes.len(), mesh.interior_count());
        for i in 0..asm.stiffness.dim() {
            for j in 0..asm.stiffness.dim() {
                assert_eq!(asm.stiffness.get(i, j), asm.stiffness.get(j, i));
            }
        }
    }
}
