//! P1 finite elements for `-Δu = f` on the unit square with homogeneous
//! Dirichlet data.

pub mod mesh;
pub mod sparse;
pub mod study;

pub use mesh::{gen_aniso_mesh, gen_uniform_mesh, Mesh, MeshQuality};
pub use sparse::{solve_cg, CgResult, CsrMatrix};
pub use study::{convergence_study, Study, StudyRow};

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Triangle;
use crate::interpolation::ErrorField;
use crate::norms::{quad_rule, sobolev_seminorm, FieldWithDerivatives};
use crate::polynomial::MultiIndex;

/// Quadrature degree of the load vector.
pub const LOAD_DEGREE: usize = 4;
/// Quadrature degree of the error integrals.
pub const ERROR_DEGREE: usize = 6;

/// Gradients of the three barycentric coordinates, `∇λ_i = (a_i, b_i)`.
fn gradients(tri: &Triangle) -> [[f64; 2]; 3] {
    tri.barycentric_coefficients().map(|c| [c[0], c[1]])
}

/// `∫_T ∇λ_i · ∇λ_j`
pub fn element_stiffness(tri: &Triangle) -> [[f64; 3]; 3] {
    let g = gradients(tri);
    let area = tri.area();
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    k
}

/// `∫_T f λ_i`
pub fn element_load(tri: &Triangle, f: &dyn FieldWithDerivatives) -> [f64; 3] {
    let rule = quad_rule(LOAD_DEGREE).expect("valid degree");
    let mut out = [0.0; 3];
    let area = tri.area();
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let fx = f.value(tri.point_at(*b));
        for i in 0..3 {
            out[i] += w * area * fx * b[i];
        }
    }
    out
}

/// Discrete system after eliminating the Dirichlet vertices.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Unknown index of each mesh vertex, `None` on the boundary.
    pub dof: Vec<Option<usize>>,
}

impl SparseSystem {
    /// Nodal vector on all mesh vertices from a vector of unknowns.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.dof.iter().map(|d| d.map_or(0.0, |i| x[i])).collect()
    }
}

fn element_contributions(
    mesh: &Mesh,
    f: &dyn FieldWithDerivatives,
) -> Vec<([[f64; 3]; 3], [f64; 3])> {
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.triangle(t);
            (element_stiffness(&tri), element_load(&tri, f))
        })
        .collect()
}

/// Stiffness matrix and load vector on every vertex, before elimination.
pub fn assemble_full(mesh: &Mesh, f: &dyn FieldWithDerivatives) -> Result<(CsrMatrix, Vec<f64>)> {
    mesh.check()?;
    let contrib = element_contributions(mesh, f);
    let nv = mesh.num_vertices();
    let mut triplets = Vec::with_capacity(9 * contrib.len());
    let mut rhs = vec![0.0; nv];
    for (tri, (k, l)) in mesh.triangles.iter().zip(&contrib) {
        for a in 0..3 {
            rhs[tri[a]] += l[a];
            for b in 0..3 {
                triplets.push((tri[a], tri[b], k[a][b]));
            }
        }
    }
    Ok((CsrMatrix::from_triplets(nv, triplets), rhs))
}

/// Assembles and drops the Dirichlet rows and columns (the boundary data is
/// zero, so no right-hand side correction is needed).
pub fn assemble(mesh: &Mesh, f: &dyn FieldWithDerivatives) -> Result<SparseSystem> {
    mesh.check()?;
    let contrib = element_contributions(mesh, f);
    let mut dof = Vec::with_capacity(mesh.num_vertices());
    let mut next = 0;
    for &b in &mesh.boundary {
        if b {
            dof.push(None);
        } else {
            dof.push(Some(next));
            next += 1;
        }
    }
    let mut triplets = Vec::with_capacity(9 * contrib.len());
    let mut rhs = vec![0.0; next];
    for (tri, (k, l)) in mesh.triangles.iter().zip(&contrib) {
        for a in 0..3 {
            let Some(i) = dof[tri[a]] else { continue };
            rhs[i] += l[a];
            for b in 0..3 {
                if let Some(j) = dof[tri[b]] {
                    triplets.push((i, j, k[a][b]));
                }
            }
        }
    }
    Ok(SparseSystem {
        matrix: CsrMatrix::from_triplets(next, triplets),
        rhs,
        dof,
    })
}

/// Conjugate gradient tolerance used by [`solve_poisson`].
pub const CG_TOL: f64 = 1e-10;

/// Nodal P1 solution on every vertex and the solver statistics.
pub fn solve_poisson(mesh: &Mesh, f: &dyn FieldWithDerivatives) -> Result<(Vec<f64>, CgResult)> {
    let sys = assemble(mesh, f)?;
    let n = sys.rhs.len();
    let res = solve_cg(&sys.matrix, &sys.rhs, CG_TOL, 20 * n.max(1))?;
    Ok((sys.expand(&res.x), res))
}

/// `(|u - u_h|_{1,2,Ω}, ‖u - u_h‖_{0,2,Ω})` for nodal P1 values `uh`.
pub fn fem_errors(mesh: &Mesh, u: &dyn FieldWithDerivatives, uh: &[f64]) -> (f64, f64) {
    let rule = quad_rule(ERROR_DEGREE).expect("valid degree");
    let parts: Vec<(f64, f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.triangle(t);
            let idx = mesh.triangles[t];
            let nodal = idx.map(|i| uh[i]);
            let g = gradients(&tri);
            let gx: f64 = (0..3).map(|i| nodal[i] * g[i][0]).sum();
            let gy: f64 = (0..3).map(|i| nodal[i] * g[i][1]).sum();
            let area = tri.area();
            let mut h1 = 0.0;
            let mut l2 = 0.0;
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let x = tri.point_at(*b);
                let uhx: f64 = (0..3).map(|i| nodal[i] * b[i]).sum();
                let ex = u.derivative(MultiIndex::new(1, 0), x) - gx;
                let ey = u.derivative(MultiIndex::new(0, 1), x) - gy;
                h1 += w * area * (ex * ex + ey * ey);
                l2 += w * area * (u.value(x) - uhx).powi(2);
            }
            (h1, l2)
        })
        .collect();
    let (h1, l2) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (h1.sqrt(), l2.sqrt())
}

/// `(Σ_K |u - I_K^1 u|^p_{m,p,K})^{1/p}` using degree-6 quadrature on each
/// element. Element contributions are summed in index order.
pub fn global_interp_error(mesh: &Mesh, u: &dyn FieldWithDerivatives, m: usize, p: f64) -> Result<f64> {
    let rule = quad_rule(ERROR_DEGREE)?;
    let parts: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.triangle(t);
            let e = ErrorField::new(u, 1, &tri)?;
            sobolev_seminorm(&e, m, p, &tri, rule)
        })
        .collect::<Result<Vec<_>>>()?;
    if p.is_infinite() {
        return Ok(parts.into_iter().fold(0.0, f64::max));
    }
    Ok(parts.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
}
