//! Triangle meshes of the unit square and the anisotropic criss-cross family.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{metrics, Point2, Triangle};

/// Largest number of rectangular cells [`gen_aniso_mesh`] will build.
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    /// Counterclockwise vertex indices.
    pub triangles: Vec<[usize; 3]>,
    /// Dirichlet marker per vertex.
    pub boundary: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshQuality {
    pub max_circumradius: f64,
    pub max_angle: f64,
    pub max_chunkiness: f64,
    pub max_diameter: f64,
}

impl Mesh {
    pub fn triangle(&self, t: usize) -> Triangle {
        let [i, j, k] = self.triangles[t];
        Triangle::new_unchecked([self.vertices[i], self.vertices[j], self.vertices[k]])
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Checks orientation, positive area, edge matching and boundary flags.
    pub fn check(&self) -> Result<()> {
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= self.vertices.len()) {
                return Err(Error::NonConforming(format!("triangle {t} has an invalid vertex index")));
            }
            let [a, b, c] = tri.map(|i| self.vertices[i]);
            if 0.5 * (b - a).cross(c - a) <= 0.0 {
                return Err(Error::NonConforming(format!("triangle {t} is degenerate or clockwise")));
            }
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                let entry = edges.entry((i.min(j), i.max(j))).or_insert((0, 0));
                if i < j {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (&(i, j), &(fwd, bwd)) in &edges {
            match (fwd, bwd) {
                (1, 1) => {}
                (1, 0) | (0, 1) => {
                    if !(self.boundary[i] && self.boundary[j]) {
                        return Err(Error::NonConforming(format!(
                            "edge ({i}, {j}) lies on the boundary but is not flagged"
                        )));
                    }
                }
                _ => {
                    return Err(Error::NonConforming(format!(
                        "edge ({i}, {j}) is shared by {} triangles",
                        fwd + bwd
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn quality(&self) -> MeshQuality {
        let mut q = MeshQuality {
            max_circumradius: 0.0,
            max_angle: 0.0,
            max_chunkiness: 0.0,
            max_diameter: 0.0,
        };
        for t in 0..self.triangles.len() {
            let m = metrics(&self.triangle(t));
            q.max_circumradius = q.max_circumradius.max(m.circumradius);
            q.max_angle = q.max_angle.max(m.theta_max);
            q.max_chunkiness = q.max_chunkiness.max(m.chunkiness);
            q.max_diameter = q.max_diameter.max(m.h_k);
        }
        q
    }

    /// Text export: `nv nt`, then `x y flag` per vertex and `i j k` per
    /// triangle.
    pub fn write_text(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.vertices.len(), self.triangles.len())?;
        for (v, b) in self.vertices.iter().zip(&self.boundary) {
            writeln!(w, "{:.16e} {:.16e} {}", v.x, v.y, u8::from(*b))?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Cell geometry of [`gen_aniso_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnisoLayout {
    pub n: usize,
    pub rows: usize,
    pub a: f64,
    pub b: f64,
}

pub fn aniso_layout(n: usize, q: f64) -> Result<AnisoLayout> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} must be at least 2")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q = {q} must be at least 1")));
    }
    let rows_f = (n as f64).powf(q).round();
    if rows_f * n as f64 > MAX_CELLS as f64 {
        return Err(Error::InvalidParameter(format!(
            "n = {n}, q = {q} needs {} cells, more than {MAX_CELLS}",
            rows_f * n as f64
        )));
    }
    let rows = rows_f as usize;
    Ok(AnisoLayout {
        n,
        rows,
        a: 1.0 / n as f64,
        b: 1.0 / rows as f64,
    })
}

/// Unit square cut into `n` columns of width `a = 1/n` and `round(n^q)` rows
/// of height `b ≈ a^q`; each cell is split into four triangles through its
/// centre. For `q > 1` the bottom and top triangles have apex angle
/// `2 atan(a/b)`, which tends to π.
pub fn gen_aniso_mesh(n: usize, q: f64) -> Result<Mesh> {
    let AnisoLayout { n, rows, a, b } = aniso_layout(n, q)?;
    let grid = (n + 1) * (rows + 1);
    let mut vertices = Vec::with_capacity(grid + n * rows);
    let mut boundary = Vec::with_capacity(grid + n * rows);
    for j in 0..=rows {
        for i in 0..=n {
            vertices.push(Point2::new(i as f64 * a, j as f64 * b));
            boundary.push(i == 0 || i == n || j == 0 || j == rows);
        }
    }
    for j in 0..rows {
        for i in 0..n {
            vertices.push(Point2::new((i as f64 + 0.5) * a, (j as f64 + 0.5) * b));
            boundary.push(false);
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(4 * n * rows);
    for j in 0..rows {
        for i in 0..n {
            let c = grid + j * n + i;
            let (p00, p10, p11, p01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([p00, p10, c]);
            triangles.push([p10, p11, c]);
            triangles.push([p11, p01, c]);
            triangles.push([p01, p00, c]);
        }
    }
    Ok(Mesh {
        vertices,
        triangles,
        boundary,
    })
}

/// Unit square split into `n × n` squares, each cut along its diagonal.
pub fn gen_uniform_mesh(n: usize) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let h = 1.0 / n as f64;
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(i as f64 * h, j as f64 * h));
            boundary.push(i == 0 || i == n || j == 0 || j == n);
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(Mesh {
        vertices,
        triangles,
        boundary,
    })
}
