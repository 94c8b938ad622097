//! Nodal Lagrange basis on the reference triangle with vertices
//! `(0,0), (1,0), (0,1)`.
//!
//! Local ordering: the three vertices, then `p - 1` nodes on each edge
//! `e = (v_e, v_{e+1})` running from `v_e` to `v_{e+1}`, then the interior
//! nodes. Shape functions use Silvester's product form in barycentric
//! coordinates, so no Vandermonde inversion is needed.

use super::FemSpaceError;

pub const MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Vertex(usize),
    /// edge index and position `1..p` along it
    Edge(usize, usize),
    Interior,
}

#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    degree: usize,
    /// barycentric multi-indices `(a0, a1, a2)` with `a0 + a1 + a2 = p`
    indices: Vec<[usize; 3]>,
    kinds: Vec<NodeKind>,
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Result<Self, FemSpaceError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(FemSpaceError::UnsupportedDegree(degree));
        }
        Ok(Self::new_unchecked(degree))
    }

    pub(crate) fn new_unchecked(degree: usize) -> Self {
        let p = degree;
        let mut indices = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        let mut kinds = vec![NodeKind::Vertex(0), NodeKind::Vertex(1), NodeKind::Vertex(2)];
        for e in 0..3 {
            for j in 1..p {
                let mut idx = [0; 3];
                idx[e] = p - j;
                idx[(e + 1) % 3] = j;
                indices.push(idx);
                kinds.push(NodeKind::Edge(e, j));
            }
        }
        for a2 in 1..p {
            for a1 in 1..p - a2 {
                let a0 = p - a1 - a2;
                if a0 >= 1 {
                    indices.push([a0, a1, a2]);
                    kinds.push(NodeKind::Interior);
                }
            }
        }
        Self { degree, indices, kinds }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn n_interior(&self) -> usize {
        let p = self.degree;
        if p < 3 {
            0
        } else {
            (p - 1) * (p - 2) / 2
        }
    }

    /// Reference coordinates of node `i`.
    pub fn node(&self, i: usize) -> [f64; 2] {
        let p = self.degree as f64;
        let idx = self.indices[i];
        [idx[1] as f64 / p, idx[2] as f64 / p]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn eval_into(&self, xi: [f64; 2], out: &mut [f64]) {
        let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let tables = self.factor_tables(lam);
        for (o, idx) in out.iter_mut().zip(&self.indices) {
            *o = tables[0][idx[0]].0 * tables[1][idx[1]].0 * tables[2][idx[2]].0;
        }
    }

    pub fn eval(&self, xi: [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(xi, &mut out);
        out
    }

    /// Values and reference gradients.
    pub fn eval_with_grad_into(&self, xi: [f64; 2], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let t = self.factor_tables(lam);
        for ((v, g), idx) in values.iter_mut().zip(grads.iter_mut()).zip(&self.indices) {
            let (r0, d0) = t[0][idx[0]];
            let (r1, d1) = t[1][idx[1]];
            let (r2, d2) = t[2][idx[2]];
            *v = r0 * r1 * r2;
            // d lambda0 = (-1, -1), d lambda1 = (1, 0), d lambda2 = (0, 1)
            let g0 = d0 * r1 * r2;
            *g = [d1 * r0 * r2 - g0, d2 * r0 * r1 - g0];
        }
    }

    pub fn eval_with_grad(&self, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let mut v = vec![0.0; self.len()];
        let mut g = vec![[0.0; 2]; self.len()];
        self.eval_with_grad_into(xi, &mut v, &mut g);
        (v, g)
    }

    /// `R_a(lambda) = prod_{m<a} (p lambda - m) / (m + 1)` and its derivative,
    /// for `a = 0..=p` and each barycentric coordinate.
    fn factor_tables(&self, lam: [f64; 3]) -> [[(f64, f64); MAX_DEGREE + 1]; 3] {
        let p = self.degree;
        let pf = p as f64;
        let mut out = [[(0.0, 0.0); MAX_DEGREE + 1]; 3];
        for (c, &l) in lam.iter().enumerate() {
            out[c][0] = (1.0, 0.0);
            for a in 1..=p {
                let m = (a - 1) as f64;
                let (r, d) = out[c][a - 1];
                let factor = (pf * l - m) / (m + 1.0);
                out[c][a] = (r * factor, d * factor + r * pf / (m + 1.0));
            }
        }
        out
    }
}
