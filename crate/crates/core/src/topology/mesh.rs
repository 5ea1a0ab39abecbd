//! Periodic marching-tetrahedra triangulation of `h0 = 0` on the 3-torus.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::model::{phase_oracle, ModelParams, Momentum, Phase};
use crate::{tol, Error, Result};

/// Closed, oriented triangulation of the band-inversion surface.
///
/// Triangle winding follows the right-hand rule with normals pointing along
/// `∇h0` (from `h0 < 0` to `h0 > 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisMesh {
    pub vertices: Vec<Momentum>,
    pub triangles: Vec<[u32; 3]>,
    /// Grid resolution the mesh was extracted at.
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub components: usize,
    pub euler_characteristic: i64,
}

/// Axis orderings of the six Kuhn simplices of a unit cube.
const KUHN: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

const NEWTON_ITERATIONS: usize = 60;

/// Per-axis lattice offsets in cells. Distinct irrational shifts keep the
/// high-symmetry points off the lattice and avoid nodes where `h0` vanishes
/// identically (e.g. `cos α + cos(α + 2π/3) + cos(α + 4π/3) = 0` when `3 | n`).
const NODE_OFFSET: [f64; 3] = [0.5, 0.381_966_011_250_105, 0.236_067_977_499_790];

fn node_coordinate(axis: usize, i: usize, n: usize) -> f64 {
    -PI + TAU * (i as f64 + NODE_OFFSET[axis]) / n as f64
}

/// Triangulates `h0 = 0` on an `n³` periodic grid and refines every vertex
/// onto the surface with Newton steps along `∇h0`.
pub fn extract_bis_mesh(p: &ModelParams, n: usize) -> Result<BisMesh> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("mesh grid must be >= 16 (got {n})")));
    }
    if phase_oracle(p) == Phase::Boundary {
        return Err(Error::InvalidParameter(format!(
            "m_z = {} xi0 sits on a phase boundary",
            p.m_z / p.xi0
        )));
    }

    let idx = |i: usize, j: usize, k: usize| ((i % n) * n + (j % n)) * n + (k % n);
    let mut values = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                values[idx(i, j, k)] = p.h0(&Momentum::new(
                    node_coordinate(0, i, n),
                    node_coordinate(1, j, n),
                    node_coordinate(2, k, n),
                ));
            }
        }
    }
    let positive = |v: f64| v >= 0.0;
    let first = positive(values[0]);
    if values.iter().all(|&v| positive(v) == first) {
        return Err(Error::EmptyBis);
    }

    let mut builder = Builder {
        edge_vertex: HashMap::new(),
        positions: Vec::new(),
        triangles: Vec::new(),
    };

    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let base = [i, j, k];
                let cube_values: [f64; 8] = std::array::from_fn(|c| {
                    values[idx(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))]
                });
                let cube_pos = cube_values.map(positive);
                if cube_pos.iter().all(|&s| s == cube_pos[0]) {
                    continue;
                }
                for axes in KUHN {
                    let mut offset = [0usize; 3];
                    let mut corners = [[0usize; 3]; 4];
                    for (step, corner) in corners.iter_mut().enumerate() {
                        if step > 0 {
                            offset[axes[step - 1]] = 1;
                        }
                        *corner = offset;
                    }
                    let tet: [Corner; 4] = corners.map(|o| {
                        let g = [base[0] + o[0], base[1] + o[1], base[2] + o[2]];
                        Corner {
                            id: idx(g[0], g[1], g[2]),
                            pos: [
                                node_coordinate(0, g[0], n),
                                node_coordinate(1, g[1], n),
                                node_coordinate(2, g[2], n),
                            ],
                            value: values[idx(g[0], g[1], g[2])],
                        }
                    });
                    builder.polygonize(&tet);
                }
            }
        }
    }

    let mut vertices = Vec::with_capacity(builder.positions.len());
    for pos in &builder.positions {
        vertices.push(refine_vertex(p, Momentum::from_array(*pos))?);
    }
    Ok(BisMesh {
        vertices,
        triangles: builder.triangles,
        grid: n,
    })
}

#[derive(Clone, Copy)]
struct Corner {
    id: usize,
    pos: [f64; 3],
    value: f64,
}

struct Builder {
    edge_vertex: HashMap<(usize, usize), u32>,
    /// Unrefined positions, canonicalized.
    positions: Vec<[f64; 3]>,
    triangles: Vec<[u32; 3]>,
}

/// Edge crossing plus the unwrapped edge midpoint, which fixes orientation
/// from the sign pattern alone (interpolated points can coincide when a node
/// value is zero to rounding).
#[derive(Clone, Copy)]
struct EdgePoint {
    index: u32,
    mid: [f64; 3],
}

impl Builder {
    fn crossing(&mut self, a: &Corner, b: &Corner) -> EdgePoint {
        let t = a.value / (a.value - b.value);
        let key = (a.id.min(b.id), a.id.max(b.id));
        let next = self.positions.len() as u32;
        let index = *self.edge_vertex.entry(key).or_insert(next);
        if index == next {
            let local: [f64; 3] = std::array::from_fn(|d| a.pos[d] + t * (b.pos[d] - a.pos[d]));
            self.positions.push(Momentum::from_array(local).to_array());
        }
        let mid = std::array::from_fn(|d| 0.5 * (a.pos[d] + b.pos[d]));
        EdgePoint { index, mid }
    }

    fn polygonize(&mut self, tet: &[Corner; 4]) {
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..4).partition(|&c| tet[c].value >= 0.0);
        if pos.is_empty() || neg.is_empty() {
            return;
        }
        // Direction of increasing h0 inside the tetrahedron.
        let centroid = |set: &[usize]| -> [f64; 3] {
            std::array::from_fn(|d| set.iter().map(|&c| tet[c].pos[d]).sum::<f64>() / set.len() as f64)
        };
        let cp = centroid(&pos);
        let cn = centroid(&neg);
        let up = [cp[0] - cn[0], cp[1] - cn[1], cp[2] - cn[2]];

        match (pos.len(), neg.len()) {
            (1, 3) | (3, 1) => {
                let (lone, others) = if pos.len() == 1 { (pos[0], &neg) } else { (neg[0], &pos) };
                let e: Vec<EdgePoint> = others.iter().map(|&o| self.crossing(&tet[lone], &tet[o])).collect();
                self.push_oriented([e[0], e[1], e[2]], up);
            }
            (2, 2) => {
                let (a, b) = (pos[0], pos[1]);
                let (c, d) = (neg[0], neg[1]);
                let ac = self.crossing(&tet[a], &tet[c]);
                let ad = self.crossing(&tet[a], &tet[d]);
                let bd = self.crossing(&tet[b], &tet[d]);
                let bc = self.crossing(&tet[b], &tet[c]);
                // quad ac-ad-bd-bc split along ac-bd
                self.push_oriented([ac, ad, bd], up);
                self.push_oriented([ac, bd, bc], up);
            }
            _ => unreachable!(),
        }
    }

    fn push_oriented(&mut self, tri: [EdgePoint; 3], up: [f64; 3]) {
        let n = cross(sub(tri[1].mid, tri[0].mid), sub(tri[2].mid, tri[0].mid));
        let tri_idx = if dot(n, up) >= 0.0 {
            [tri[0].index, tri[1].index, tri[2].index]
        } else {
            [tri[0].index, tri[2].index, tri[1].index]
        };
        self.triangles.push(tri_idx);
    }
}

/// Newton iteration `k ← k − h0 ∇h0 / |∇h0|²` onto the surface.
pub fn refine_vertex(p: &ModelParams, mut k: Momentum) -> Result<Momentum> {
    let floor = tol::DEGENERATE_GRADIENT * p.xi0;
    for _ in 0..NEWTON_ITERATIONS {
        let h = p.h0(&k);
        let g = p.grad_h0(&k);
        let g2 = dot(g, g);
        if g2.sqrt() < floor {
            return Err(Error::DegenerateGradient(k.kx, k.ky, k.kz));
        }
        if h.abs() <= 1e-13 * p.xi0 {
            return Ok(k);
        }
        k = k.offset(g, -h / g2);
    }
    if p.h0(&k).abs() <= tol::BIS_RESIDUAL * p.xi0 {
        Ok(k)
    } else {
        Err(Error::DegenerateGradient(k.kx, k.ky, k.kz))
    }
}

impl BisMesh {
    /// Every undirected edge is shared by exactly two triangles that traverse
    /// it in opposite directions.
    pub fn check_closed(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::OpenMesh("no triangles".into()));
        }
        let mut directed: HashMap<(u32, u32), u32> = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for e in 0..3 {
                *directed.entry((t[e], t[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::OpenMesh(format!("edge ({a}, {b}) traversed {count} times in one direction")));
            }
            if directed.get(&(b, a)) != Some(&1) {
                return Err(Error::OpenMesh(format!("edge ({a}, {b}) has no opposite half-edge")));
            }
        }
        Ok(())
    }

    /// Torus-aware normal `(v1 − v0) × (v2 − v0)` of triangle `t`.
    pub fn triangle_normal(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i as usize]);
        cross(a.displacement_to(&b), a.displacement_to(&c))
    }

    /// Triangles whose normal does not point along `∇h0` at the centroid.
    pub fn orientation_violations(&self, p: &ModelParams) -> usize {
        (0..self.triangles.len())
            .filter(|&t| {
                let [a, b, c] = self.triangles[t].map(|i| self.vertices[i as usize]);
                let db = a.displacement_to(&b);
                let dc = a.displacement_to(&c);
                let centroid = a.offset([db[0] + dc[0], db[1] + dc[1], db[2] + dc[2]], 1.0 / 3.0);
                dot(self.triangle_normal(t), p.grad_h0(&centroid)) <= 0.0
            })
            .count()
    }

    pub fn max_residual(&self, p: &ModelParams) -> f64 {
        self.vertices.iter().map(|k| p.h0(k).abs()).fold(0.0, f64::max)
    }

    /// Same surface with every triangle reversed.
    pub fn flipped(&self) -> BisMesh {
        BisMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
            grid: self.grid,
        }
    }

    pub fn stats(&self) -> MeshStats {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e] as usize, t[(e + 1) % 3] as usize);
                edges.insert((a.min(b), a.max(b)));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let components = (0..self.vertices.len()).filter(|&v| find(&mut parent, v) == v).count();
        MeshStats {
            vertices: self.vertices.len(),
            triangles: self.triangles.len(),
            edges: edges.len(),
            components,
            euler_characteristic: self.vertices.len() as i64 - edges.len() as i64
                + self.triangles.len() as i64,
        }
    }
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
