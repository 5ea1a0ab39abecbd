//! Offset surfaces `h0 = ±δ` sampled along the surface normal.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{dot, BisMesh};
use crate::model::{ModelParams, Momentum};
use crate::{tol, Error, Result};

/// Default shell offset in units of `ξ0`.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Bracketing step along the normal path.
const WALK_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellPair {
    pub point_minus: Momentum,
    pub point_plus: Momentum,
    /// Path length between the two shell points.
    pub delta_k: f64,
    pub base_vertex: usize,
}

/// For each mesh vertex, walks along `±∇h0/|∇h0|` to `h0 = ±delta`.
///
/// `delta` is an energy in rad/s and must satisfy `0 < delta < ξ0/2`.
pub fn offset_shells(mesh: &BisMesh, p: &ModelParams, delta: f64) -> Result<Vec<ShellPair>> {
    if !(delta > 0.0 && delta < 0.5 * p.xi0) {
        return Err(Error::InvalidParameter(format!(
            "shell offset must lie in (0, xi0/2) (got {} xi0)",
            delta / p.xi0
        )));
    }
    mesh.vertices
        .par_iter()
        .enumerate()
        .map(|(v, base)| {
            let g = p.grad_h0(base);
            let norm = dot(g, g).sqrt();
            if norm < tol::DEGENERATE_GRADIENT * p.xi0 {
                return Err(Error::DegenerateGradient(base.kx, base.ky, base.kz));
            }
            let u = g.map(|c| c / norm);
            let s_plus = root_along(p, base, u, delta, 1.0).ok_or(Error::NoConvergence { vertex: v })?;
            let s_minus = root_along(p, base, u, -delta, -1.0).ok_or(Error::NoConvergence { vertex: v })?;
            Ok(ShellPair {
                point_minus: base.offset(u, s_minus),
                point_plus: base.offset(u, s_plus),
                delta_k: s_plus - s_minus,
                base_vertex: v,
            })
        })
        .collect()
}

/// Signed path length `s` (same sign as `direction`) with `h0(k + s u) = target`.
fn root_along(p: &ModelParams, k: &Momentum, u: [f64; 3], target: f64, direction: f64) -> Option<f64> {
    let f = |s: f64| p.h0(&k.offset(u, s)) - target;
    let mut lo = 0.0;
    let mut f_lo = f(lo);
    let mut hi = None;
    let steps = (FRAC_PI_2 / WALK_STEP).ceil() as usize;
    for i in 1..=steps {
        let s = direction * (i as f64 * WALK_STEP).min(FRAC_PI_2);
        let fs = f(s);
        if fs == 0.0 || fs.signum() != f_lo.signum() {
            hi = Some((s, fs));
            break;
        }
        lo = s;
        f_lo = fs;
    }
    let (mut hi, mut f_hi) = hi?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || mid == lo || mid == hi {
            lo = mid;
            f_lo = fm;
            break;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let (s, fs) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    (fs.abs() <= tol::SHELL_RESIDUAL * p.xi0).then_some(s)
}
