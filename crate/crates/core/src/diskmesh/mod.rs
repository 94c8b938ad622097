//! Conforming triangulations of the unit disk (and of polygons read from a
//! file) with isoparametric curved boundary edges.

mod geometry;
mod io;

use std::collections::HashMap;
use std::f64::consts::PI;

use thiserror::Error;

pub use geometry::{det, edge_point, edge_tangent, ElementGeometry};
pub use io::{read_mesh, write_mesh};

pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("geometry degree must be between 1 and {max}, got {got}")]
    GeometryDegree { got: usize, max: usize },
    #[error("mesh file: {0}")]
    Format(String),
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const MAX_GEOMETRY_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// unit disk; boundary nodes live on the unit circle
    Disk,
    /// straight-sided polygon
    Polygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub triangle: usize,
    /// local edge `e` joins local vertices `e` and `(e + 1) % 3`
    pub local_edge: usize,
    pub edge: usize,
}

/// Position of a triangle inside its parent after one red refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParentLink {
    pub parent: usize,
    pub child: u8,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    domain: Domain,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// global edges with `lo < hi`
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    /// curved nodes per boundary edge, ordered from `edges[e][0]` to `edges[e][1]`
    curved_nodes: HashMap<usize, Vec<Point>>,
    geometry_degree: usize,
    parents: Option<Vec<ParentLink>>,
    level: usize,
}

/// Children of a red refinement in the parent's reference coordinates.
pub const CHILD_VERTICES: [[Point; 3]; 4] = [
    [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]],
    [[0.5, 0.0], [1.0, 0.0], [0.5, 0.5]],
    [[0.0, 0.5], [0.5, 0.5], [0.0, 1.0]],
    [[0.5, 0.5], [0.0, 0.5], [0.5, 0.0]],
];

/// Map a point from a child's reference triangle to the parent's.
pub fn child_to_parent(child: u8, xi: Point) -> Point {
    let [a, b, c] = CHILD_VERTICES[child as usize];
    let l0 = 1.0 - xi[0] - xi[1];
    [
        l0 * a[0] + xi[0] * b[0] + xi[1] * c[0],
        l0 * a[1] + xi[0] * b[1] + xi[1] * c[1],
    ]
}

/// Geometry degree paired with solution degree `p` by default.
pub fn default_geometry_degree(p: usize) -> usize {
    p.clamp(1, 4)
}

/// Six-triangle fan refined `level` times.
pub fn make_disk_mesh(level: usize, geometry_degree: usize) -> Result<Mesh, MeshError> {
    check_geometry_degree(geometry_degree)?;
    let mut vertices = vec![[0.0, 0.0]];
    for j in 0..6 {
        let t = j as f64 * PI / 3.0;
        vertices.push([t.cos(), t.sin()]);
    }
    let triangles = (0..6).map(|j| [0, 1 + j, 1 + (j + 1) % 6]).collect();
    let mut mesh = Mesh::from_parts(Domain::Disk, vertices, triangles, None, geometry_degree)?;
    for _ in 0..level {
        mesh = mesh.refine();
    }
    Ok(mesh)
}

fn check_geometry_degree(g: usize) -> Result<(), MeshError> {
    if (1..=MAX_GEOMETRY_DEGREE).contains(&g) {
        Ok(())
    } else {
        Err(MeshError::GeometryDegree {
            got: g,
            max: MAX_GEOMETRY_DEGREE,
        })
    }
}

impl Mesh {
    /// Build topology. Boundary edges are the edges with a single neighbour,
    /// unless `boundary` lists them explicitly as `(triangle, local_edge)`.
    pub fn from_parts(
        domain: Domain,
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Option<Vec<(usize, usize)>>,
        geometry_degree: usize,
    ) -> Result<Self, MeshError> {
        check_geometry_degree(geometry_degree)?;
        let nv = vertices.len();
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_count: Vec<u32> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(MeshError::Invalid(format!("triangle {t} references a missing vertex")));
            }
            let mut te = [0; 3];
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                if a == b {
                    return Err(MeshError::Invalid(format!("triangle {t} is degenerate")));
                }
                let key = [a.min(b), a.max(b)];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_count.push(0);
                    edges.len() - 1
                });
                edge_count[id] += 1;
                te[e] = id;
            }
            tri_edges.push(te);
        }
        if let Some(e) = edge_count.iter().position(|&c| c > 2) {
            return Err(MeshError::Invalid(format!(
                "edge {e} is shared by more than two triangles"
            )));
        }
        let boundary_edges = match boundary {
            Some(list) => {
                let mut out = Vec::with_capacity(list.len());
                for (t, le) in list {
                    if t >= triangles.len() || le > 2 {
                        return Err(MeshError::Invalid(format!("bad boundary edge ({t}, {le})")));
                    }
                    out.push(BoundaryEdge {
                        triangle: t,
                        local_edge: le,
                        edge: tri_edges[t][le],
                    });
                }
                out
            }
            None => {
                let mut out = Vec::new();
                for (t, te) in tri_edges.iter().enumerate() {
                    for (le, &e) in te.iter().enumerate() {
                        if edge_count[e] == 1 {
                            out.push(BoundaryEdge {
                                triangle: t,
                                local_edge: le,
                                edge: e,
                            });
                        }
                    }
                }
                out
            }
        };
        let mut mesh = Self {
            domain,
            vertices,
            triangles,
            edges,
            tri_edges,
            boundary_edges,
            curved_nodes: HashMap::new(),
            geometry_degree: if domain == Domain::Disk { geometry_degree } else { 1 },
            parents: None,
            level: 0,
        };
        mesh.build_curved_nodes();
        Ok(mesh)
    }

    fn build_curved_nodes(&mut self) {
        self.curved_nodes.clear();
        let g = self.geometry_degree;
        if self.domain != Domain::Disk || g == 1 {
            return;
        }
        for be in &self.boundary_edges {
            let [a, b] = self.edges[be.edge];
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let ta = pa[1].atan2(pa[0]);
            let mut dt = pb[1].atan2(pb[0]) - ta;
            if dt > PI {
                dt -= 2.0 * PI;
            } else if dt < -PI {
                dt += 2.0 * PI;
            }
            let nodes = (1..g)
                .map(|j| {
                    let t = ta + dt * j as f64 / g as f64;
                    [t.cos(), t.sin()]
                })
                .collect();
            self.curved_nodes.insert(be.edge, nodes);
        }
    }

    /// Uniform red refinement. New boundary vertices are projected onto the
    /// circle for disk meshes.
    pub fn refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint = vec![0usize; self.edges.len()];
        let boundary_edge: Vec<bool> = {
            let mut flags = vec![false; self.edges.len()];
            for be in &self.boundary_edges {
                flags[be.edge] = true;
            }
            flags
        };
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let mut m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            if boundary_edge[e] && self.domain == Domain::Disk {
                let r = (m[0] * m[0] + m[1] * m[1]).sqrt();
                m = [m[0] / r, m[1] / r];
            }
            midpoint[e] = vertices.len();
            vertices.push(m);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        let mut parents = Vec::with_capacity(4 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let [v0, v1, v2] = *tri;
            let te = self.tri_edges[t];
            let m01 = midpoint[te[0]];
            let m12 = midpoint[te[1]];
            let m20 = midpoint[te[2]];
            // same layout as CHILD_VERTICES
            let children = [[v0, m01, m20], [m01, v1, m12], [m20, m12, v2], [m12, m20, m01]];
            for (c, child) in children.into_iter().enumerate() {
                triangles.push(child);
                parents.push(ParentLink {
                    parent: t,
                    child: c as u8,
                });
            }
        }
        // children that touch a parent boundary edge along its halves
        let boundary = if self.domain == Domain::Polygon {
            let mut list = Vec::new();
            for be in &self.boundary_edges {
                let base = 4 * be.triangle;
                // parent edge e is split between children e and (e+1)%3, with the
                // same local edge index in both
                let (ca, la, cb, lb) = match be.local_edge {
                    0 => (0, 0, 1, 0),
                    1 => (1, 1, 2, 1),
                    _ => (2, 2, 0, 2),
                };
                list.push((base + ca, la));
                list.push((base + cb, lb));
            }
            Some(list)
        } else {
            None
        };
        let mut mesh = Mesh::from_parts(self.domain, vertices, triangles, boundary, self.geometry_degree)
            .expect("red refinement of a valid mesh is valid");
        mesh.parents = Some(parents);
        mesh.level = self.level + 1;
        mesh
    }

    pub fn with_geometry_degree(&self, g: usize) -> Result<Mesh, MeshError> {
        check_geometry_degree(g)?;
        let mut out = self.clone();
        out.geometry_degree = if self.domain == Domain::Disk { g } else { 1 };
        out.build_curved_nodes();
        Ok(out)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn geometry_degree(&self) -> usize {
        self.geometry_degree
    }

    pub fn curved_nodes(&self, edge: usize) -> Option<&[Point]> {
        self.curved_nodes.get(&edge).map(Vec::as_slice)
    }

    pub fn parents(&self) -> Option<&[ParentLink]> {
        self.parents.as_deref()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Geometry map of triangle `t`.
    pub fn element_geometry(&self, t: usize) -> ElementGeometry {
        let tri = self.triangles[t];
        let corners = [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]];
        if self.geometry_degree == 1 || self.curved_nodes.is_empty() {
            return ElementGeometry::affine(corners);
        }
        let mut curved: [Option<Vec<Point>>; 3] = [None, None, None];
        let mut any = false;
        for (le, slot) in curved.iter_mut().enumerate() {
            let e = self.tri_edges[t][le];
            if let Some(nodes) = self.curved_nodes.get(&e) {
                let mut nodes = nodes.clone();
                // stored from lo to hi; the element wants local vertex le -> le+1
                if tri[le] != self.edges[e][0] {
                    nodes.reverse();
                }
                *slot = Some(nodes);
                any = true;
            }
        }
        if any {
            ElementGeometry::curved(corners, self.geometry_degree, curved)
        } else {
            ElementGeometry::affine(corners)
        }
    }

    /// Longest straight edge (chord) over all triangles.
    pub fn mesh_size(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// `max_T h_T / min_T h_T` with `h_T` the longest chord of `T`.
    pub fn quasi_uniformity(&self) -> f64 {
        let mut hmin = f64::INFINITY;
        let mut hmax = 0.0f64;
        for tri in &self.triangles {
            let h = (0..3)
                .map(|e| dist(self.vertices[tri[e]], self.vertices[tri[(e + 1) % 3]]))
                .fold(0.0, f64::max);
            hmin = hmin.min(h);
            hmax = hmax.max(h);
        }
        hmax / hmin
    }
}

/// `meshSize` as a free function.
pub fn mesh_size(m: &Mesh) -> f64 {
    m.mesh_size()
}

pub fn refine(m: &Mesh) -> Mesh {
    m.refine()
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
