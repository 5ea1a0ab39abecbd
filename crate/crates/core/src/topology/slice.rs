//! Band-inversion contours on a fixed-`kz` slice (periodic marching squares).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::model::{wrap_angle, ModelParams, Momentum};
use crate::{Error, Result};

/// One closed polyline of `h0 = 0` in the `(kx, ky)` torus. Points are
/// canonicalized into `[−π, π)` so consecutive points may straddle the seam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<[f64; 2]>,
}

/// Lattice coordinate `−π + 2πi/n`.
pub fn slice_coordinate(i: usize, n: usize) -> f64 {
    -PI + TAU * i as f64 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    /// (i, j) → (i+1, j)
    Horizontal(usize, usize),
    /// (i, j) → (i, j+1)
    Vertical(usize, usize),
}

/// Marching-squares contours of `h0 = 0` at fixed `kz` on an `n × n` lattice.
///
/// Saddle cells are resolved with the cell-centre average. Returns an empty
/// list when `h0` does not change sign on the slice.
pub fn find_bis_slice(p: &ModelParams, kz: f64, n: usize) -> Result<Vec<Contour>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("slice grid must be >= 8 (got {n})")));
    }
    let f: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| p.h0(&Momentum::new(slice_coordinate(i, n), slice_coordinate(j, n), kz)))
                .collect()
        })
        .collect();
    let val = |i: usize, j: usize| f[i % n][j % n];
    let positive = |v: f64| v >= 0.0;

    let mut point_of: HashMap<EdgeId, usize> = HashMap::new();
    let mut points: Vec<[f64; 2]> = Vec::new();
    let mut links: Vec<Vec<usize>> = Vec::new();

    let mut crossing = |e: EdgeId| -> usize {
        if let Some(&id) = point_of.get(&e) {
            return id;
        }
        let (i, j, di, dj) = match e {
            EdgeId::Horizontal(i, j) => (i, j, 1, 0),
            EdgeId::Vertical(i, j) => (i, j, 0, 1),
        };
        let fa = val(i, j);
        let fb = val(i + di, j + dj);
        let t = fa / (fa - fb);
        let step = TAU / n as f64;
        let x = slice_coordinate(i, n) + t * step * di as f64;
        let y = slice_coordinate(j, n) + t * step * dj as f64;
        let id = points.len();
        points.push([wrap_angle(x), wrap_angle(y)]);
        point_of.insert(e, id);
        id
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let s = c.map(positive);
            // e0 bottom c0-c1, e1 right c1-c2, e2 top c3-c2, e3 left c0-c3
            let edges = [
                EdgeId::Horizontal(i, j),
                EdgeId::Vertical((i + 1) % n, j),
                EdgeId::Horizontal(i, (j + 1) % n),
                EdgeId::Vertical(i, j),
            ];
            let cut = [s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]];
            let cut_edges: Vec<usize> = (0..4).filter(|&e| cut[e]).collect();
            match cut_edges.len() {
                0 => {}
                2 => segments.push((crossing(edges[cut_edges[0]]), crossing(edges[cut_edges[1]]))),
                4 => {
                    let centre = positive(c.iter().sum::<f64>() / 4.0);
                    let pairs = if s[0] == centre { [(0, 1), (2, 3)] } else { [(3, 0), (1, 2)] };
                    for (a, b) in pairs {
                        segments.push((crossing(edges[a]), crossing(edges[b])));
                    }
                }
                _ => unreachable!("a square has an even number of sign changes"),
            }
        }
    }

    links.resize(points.len(), Vec::new());
    for &(a, b) in &segments {
        links[a].push(b);
        links[b].push(a);
    }

    let mut visited = vec![false; points.len()];
    let mut contours = Vec::new();
    for start in 0..points.len() {
        if visited[start] {
            continue;
        }
        let mut chain = vec![start];
        visited[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = links[cur].iter().copied().find(|&x| x != prev && !visited[x]);
            match next {
                Some(nx) => {
                    visited[nx] = true;
                    chain.push(nx);
                    prev = cur;
                    cur = nx;
                }
                None => break,
            }
        }
        contours.push(Contour {
            points: chain.into_iter().map(|id| points[id]).collect(),
        });
    }
    Ok(contours)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_6;

    #[test]
    fn fig2_slice_is_one_closed_loop() {
        let p = ModelParams::experimental(0.86);
        let contours = find_bis_slice(&p, FRAC_PI_6, 24).unwrap();
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert!(c.points.len() >= 24);
        // Loop is closed: the last point is one cell away from the first.
        let first = c.points[0];
        let last = *c.points.last().unwrap();
        let d = wrap_angle(first[0] - last[0]).hypot(wrap_angle(first[1] - last[1]));
        assert!(d <= TAU / 24.0 * 1.5);
    }

    #[test]
    fn contour_residual_within_interpolation_error() {
        let p = ModelParams::experimental(0.86);
        let n = 24;
        let target = (p.m_z / p.xi0 - FRAC_PI_6.cos()).abs();
        let bound = 2.0 * (TAU / n as f64).powi(2);
        for c in find_bis_slice(&p, FRAC_PI_6, n).unwrap() {
            for [x, y] in c.points {
                assert!(((x.cos() + y.cos()).abs() - target).abs() <= bound);
            }
        }
    }

    #[test]
    fn trivial_slice_is_empty() {
        let p = ModelParams::experimental(4.0);
        assert!(find_bis_slice(&p, FRAC_PI_6, 24).unwrap().is_empty());
    }

    #[test]
    fn tiny_grid_rejected() {
        let p = ModelParams::experimental(0.86);
        assert!(find_bis_slice(&p, 0.0, 4).is_err());
    }

    #[test]
    fn case2_slice_through_origin_is_a_loop_around_gamma() {
        let p = ModelParams::experimental(1.3);
        let contours = find_bis_slice(&p, 0.0, 32).unwrap();
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        // cos kx + cos ky = 0.3 encloses the origin: angles around it cover the full circle.
        let mut angles: Vec<f64> = c.points.iter().map(|q| q[1].atan2(q[0])).collect();
        angles.sort_by(f64::total_cmp);
        let max_gap = angles.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(max_gap < 0.5);
    }
}
