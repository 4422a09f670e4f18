//! Dirichlet spectra of convex polygons by P1 finite elements.
//!
//! Each solve pairs a mesh with its uniform refinement and Richardson
//! extrapolates under the `O(h^2)` eigenvalue error law:
//! `lambda = (4 fine - coarse) / 3`, reported with error bound
//! `|fine - lambda|`. Conforming elements overestimate, so a true eigenvalue
//! below `lambda_max` has a discrete counterpart below
//! `lambda_max (1 + delta)` whenever its relative error is below `delta`.

pub mod envelope;
pub mod lanczos;
pub mod mesh;
pub mod sparse;

pub use lanczos::{EigenPair, GeneralizedEigenproblem};
pub use mesh::{triangulate, triangulate_level, TriangleMesh};
pub use sparse::{assemble, CsrMatrix};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::spectrum::{Spectrum, SpectrumSource};

#[derive(Clone, Debug)]
pub struct FemOptions {
    /// Completeness margin.
    pub delta: f64,
    /// Largest admissible node count of the fine mesh.
    pub max_nodes: usize,
    /// Relative residual every reported eigenpair must meet.
    pub residual_tol: f64,
    /// Coarse refinement level; chosen from `lambda_max` when `None`.
    pub start_level: Option<usize>,
    /// Solve once at `start_level` and its refinement, without the accuracy
    /// loop. Gives objectives that are smooth in the domain.
    pub fixed_level: bool,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self {
            delta: 0.1,
            max_nodes: 200_000,
            residual_tol: 1e-8,
            start_level: None,
            fixed_level: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FemSolveReport {
    /// Longest edge of the fine mesh.
    pub mesh_size: f64,
    pub coarse_level: usize,
    pub fine_level: usize,
    pub fine_nodes: usize,
    pub dofs: usize,
    /// Fine-mesh eigenvalues below `lambda_max (1 + delta)`.
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub extrapolated: Option<Vec<f64>>,
    pub error_bounds: Vec<f64>,
    /// `log2` of successive ground-state differences over three levels.
    pub observed_order: Option<f64>,
    pub min_angle_deg: f64,
    pub quality_warning: bool,
}

/// Discrete eigenvalues of one mesh.
pub fn mesh_eigenvalues_below(mesh: &TriangleMesh, mu: f64) -> Result<Vec<EigenPair>> {
    let asm = assemble(mesh);
    if asm.dof_nodes.is_empty() {
        return Ok(Vec::new());
    }
    GeneralizedEigenproblem::new(&asm.stiffness, &asm.mass).eigenvalues_below(mu)
}

/// The `n` lowest discrete eigenvalues of one mesh.
pub fn mesh_lowest(mesh: &TriangleMesh, n: usize, guess: f64) -> Result<Vec<EigenPair>> {
    let asm = assemble(mesh);
    GeneralizedEigenproblem::new(&asm.stiffness, &asm.mass).lowest(n, guess)
}

pub fn fem_spectrum(p: &ConvexPolygon, lambda_max: f64, rel_tol: f64) -> Result<Spectrum> {
    Ok(fem_spectrum_with(p, lambda_max, rel_tol, &FemOptions::default())?.0)
}

/// Heuristic coarse level: about one mesh length per `1/sqrt(mu)` and
/// enough unknowns for the expected eigenvalue count.
fn default_start_level(p: &ConvexPolygon, mu: f64) -> usize {
    let fan = TriangleMesh::fan(p);
    let mut level = mesh::levels_for(fan.max_edge(), 1.0 / mu.sqrt());
    let weyl = p.area() * mu / (4.0 * std::f64::consts::PI);
    // interior nodes grow about 4x per level from the fan's one
    while (4f64.powi(level as i32) * p.len() as f64 / 2.0) < 4.0 * weyl + 20.0 {
        level += 1;
    }
    level.max(2)
}

pub fn fem_spectrum_with(
    p: &ConvexPolygon,
    lambda_max: f64,
    rel_tol: f64,
    opts: &FemOptions,
) -> Result<(Spectrum, FemSolveReport)> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("lambda_max must be positive and finite"));
    }
    if !(rel_tol > 0.0 && rel_tol <= 0.05) {
        return Err(Error::invalid("rel_tol must lie in (0, 0.05]"));
    }
    let mu = lambda_max * (1.0 + opts.delta);
    let mut level = opts.start_level.unwrap_or_else(|| default_start_level(p, mu));
    let mut coarse_mesh = triangulate_level(p, level);
    let mut coarse: Vec<EigenPair> = Vec::new();
    // (level, discrete ground state) for the observed-order estimate
    let mut ground: Vec<(usize, f64)> = Vec::new();
    if level > 0 {
        let m = triangulate_level(p, level - 1);
        if m.interior_count() > 0 {
            ground.push((level - 1, mesh_lowest(&m, 1, lambda_max)?[0].value));
        }
    }
    let mut offending: Option<usize> = None;
    loop {
        let fine_mesh = coarse_mesh.refine();
        if fine_mesh.nodes().len() > opts.max_nodes {
            return Err(Error::Accuracy {
                index: offending.map_or(1, |k| k + 1),
                detail: format!(
                    "tolerance {rel_tol} not met; level {} would need {} nodes, above the limit {}",
                    level + 1,
                    fine_mesh.nodes().len(),
                    opts.max_nodes
                ),
            });
        }
        let fine = mesh_eigenvalues_below(&fine_mesh, mu)?;
        if coarse.len() < fine.len().max(1) {
            coarse = mesh_lowest(&coarse_mesh, fine.len().max(1), mu)?;
        }
        if ground.last().map(|g| g.0) != Some(level) {
            ground.push((level, coarse[0].value));
        }
        if let Some(bad) = fine.iter().position(|e| !(e.residual < opts.residual_tol)) {
            return Err(Error::Numeric(format!(
                "eigenpair {} residual {:e} above tolerance",
                bad + 1,
                fine[bad].residual
            )));
        }
        let n = fine.len();
        let extrap: Vec<f64> = (0..n).map(|k| (4.0 * fine[k].value - coarse[k].value) / 3.0).collect();
        let bounds: Vec<f64> = (0..n).map(|k| (fine[k].value - extrap[k]).abs()).collect();
        offending = (0..n).find(|&k| bounds[k] > rel_tol * extrap[k]);
        if offending.is_none() || opts.fixed_level {
            if let Some(f) = fine.first() {
                ground.push((level + 1, f.value));
            }
            let observed_order = (ground.len() >= 3).then(|| {
                let g = &ground[ground.len() - 3..];
                ((g[0].1 - g[1].1) / (g[1].1 - g[2].1)).log2()
            });
            let mut pairs: Vec<(f64, f64)> = extrap.iter().copied().zip(bounds.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (values, errs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let spectrum = Spectrum::new(values, errs, lambda_max, SpectrumSource::Fem)?;
            let report = FemSolveReport {
                mesh_size: fine_mesh.max_edge(),
                coarse_level: level,
                fine_level: level + 1,
                fine_nodes: fine_mesh.nodes().len(),
                dofs: fine_mesh.interior_count(),
                eigenvalues: fine.iter().map(|e| e.value).collect(),
                residual_norms: fine.iter().map(|e| e.residual).collect(),
                extrapolated: Some(extrap),
                error_bounds: bounds,
                observed_order,
                min_angle_deg: fine_mesh.min_angle_deg(),
                quality_warning: fine_mesh.quality_warning(),
            };
            return Ok((spectrum, report));
        }
        coarse = fine;
        coarse_mesh = fine_mesh;
        level += 1;
    }
}
