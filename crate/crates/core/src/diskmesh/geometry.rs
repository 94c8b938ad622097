use crate::femspace::basis::LagrangeBasis;

use super::Point;

const MAX_NODES: usize = 21;

/// Polynomial map from the reference triangle onto one mesh element.
#[derive(Debug, Clone)]
pub enum ElementGeometry {
    Affine {
        origin: Point,
        /// columns are `v1 - v0` and `v2 - v0`
        jac: [[f64; 2]; 2],
    },
    Curved {
        basis: LagrangeBasis,
        nodes: Vec<Point>,
    },
}

impl ElementGeometry {
    pub fn affine(corners: [Point; 3]) -> Self {
        let [a, b, c] = corners;
        Self::Affine {
            origin: a,
            jac: [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]],
        }
    }

    /// Degree-`g` Lagrange map. `curved[e]` holds the `g - 1` interior nodes of
    /// local edge `e` ordered from local vertex `e` to `e + 1`. The edge
    /// displacement `d(s) = s(1 - s) Q(s)` is extended as
    /// `λa λb Q((1 + λb - λa) / 2)`, a polynomial of degree `g` that vanishes
    /// on the other edges and whose `k`-th derivatives are `O(h^k)`.
    pub fn curved(corners: [Point; 3], g: usize, curved: [Option<Vec<Point>>; 3]) -> Self {
        let basis = LagrangeBasis::new_unchecked(g);
        let affine = Self::affine(corners);
        let ref_nodes = basis.nodes();
        let mut nodes: Vec<Point> = ref_nodes.iter().map(|&xi| affine.map(xi)).collect();
        for (e, edge_nodes) in curved.iter().enumerate() {
            let Some(list) = edge_nodes else { continue };
            let (a, b) = (corners[e], corners[(e + 1) % 3]);
            let mut points = Vec::with_capacity(g + 1);
            points.push(a);
            points.extend_from_slice(list);
            points.push(b);
            for (node, xi) in nodes.iter_mut().zip(&ref_nodes) {
                let lambda = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
                let (la, lb) = (lambda[e], lambda[(e + 1) % 3]);
                let q = edge_quotient(&points, 0.5 * (1.0 + lb - la));
                node[0] += la * lb * q[0];
                node[1] += la * lb * q[1];
            }
        }
        Self::Curved { basis, nodes }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Self::Affine { .. })
    }

    pub fn map(&self, xi: Point) -> Point {
        match self {
            Self::Affine { origin, jac } => [
                origin[0] + jac[0][0] * xi[0] + jac[0][1] * xi[1],
                origin[1] + jac[1][0] * xi[0] + jac[1][1] * xi[1],
            ],
            Self::Curved { basis, nodes } => {
                let mut v = [0.0; MAX_NODES];
                let n = nodes.len();
                basis.eval_into(xi, &mut v[..n]);
                nodes
                    .iter()
                    .zip(&v[..n])
                    .fold([0.0, 0.0], |acc, (p, w)| [acc[0] + w * p[0], acc[1] + w * p[1]])
            }
        }
    }

    /// Physical point and Jacobian `dx/dxi` (row = physical component).
    pub fn map_with_jacobian(&self, xi: Point) -> (Point, [[f64; 2]; 2]) {
        match self {
            Self::Affine { jac, .. } => (self.map(xi), *jac),
            Self::Curved { basis, nodes } => {
                let n = nodes.len();
                let mut v = [0.0; MAX_NODES];
                let mut g = [[0.0; 2]; MAX_NODES];
                basis.eval_with_grad_into(xi, &mut v[..n], &mut g[..n]);
                let mut x = [0.0; 2];
                let mut j = [[0.0; 2]; 2];
                for i in 0..n {
                    let p = nodes[i];
                    for d in 0..2 {
                        x[d] += v[i] * p[d];
                        j[d][0] += g[i][0] * p[d];
                        j[d][1] += g[i][1] * p[d];
                    }
                }
                (x, j)
            }
        }
    }

    pub fn jacobian(&self, xi: Point) -> [[f64; 2]; 2] {
        self.map_with_jacobian(xi).1
    }

    pub fn jacobian_det(&self, xi: Point) -> f64 {
        det(self.jacobian(xi))
    }

    /// `|dx/ds|` along local edge `e` parametrised by `s in [0, 1]`.
    pub fn edge_speed(&self, e: usize, s: f64) -> f64 {
        let j = self.jacobian(edge_point(e, s));
        let t = edge_tangent(e);
        let dx = j[0][0] * t[0] + j[0][1] * t[1];
        let dy = j[1][0] * t[0] + j[1][1] * t[1];
        (dx * dx + dy * dy).sqrt()
    }
}

/// `Q(s)` with `s(1 - s) Q(s)` the interpolated edge curve through equispaced
/// `points` minus its chord; interpolates at the `g - 1` interior nodes.
fn edge_quotient(points: &[Point], s: f64) -> Point {
    let g = points.len() - 1;
    let (a, b) = (points[0], points[g]);
    let mut q = [0.0; 2];
    for j in 1..g {
        let sj = j as f64 / g as f64;
        let w: f64 = (1..g)
            .filter(|&k| k != j)
            .map(|k| {
                let sk = k as f64 / g as f64;
                (s - sk) / (sj - sk)
            })
            .product::<f64>()
            / (sj * (1.0 - sj));
        let p = points[j];
        q[0] += w * (p[0] - ((1.0 - sj) * a[0] + sj * b[0]));
        q[1] += w * (p[1] - ((1.0 - sj) * a[1] + sj * b[1]));
    }
    q
}

pub fn det(j: [[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Reference point on local edge `e` (from vertex `e` to `e + 1`).
pub fn edge_point(e: usize, s: f64) -> Point {
    match e {
        0 => [s, 0.0],
        1 => [1.0 - s, s],
        _ => [0.0, 1.0 - s],
    }
}

pub fn edge_tangent(e: usize) -> Point {
    match e {
        0 => [1.0, 0.0],
        1 => [-1.0, 1.0],
        _ => [0.0, -1.0],
    }
}
