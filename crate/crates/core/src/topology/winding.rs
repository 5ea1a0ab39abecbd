//! Degree of the unit field over the closed BIS as a signed solid-angle sum.

use std::f64::consts::PI;

use super::field::{normalize, DynamicalField};
use super::mesh::{cross, dot, extract_bis_mesh, BisMesh};
use crate::model::{h_field, ModelParams};
use crate::{tol, Error, Result};

/// Converts the degree under `∇h0`-outward orientation into `ν3`.
/// Calibrated once so that `m_z = 1.3 ξ0` yields `−1`.
pub const ORIENTATION_SIGN: f64 = -1.0;

/// Signed solid angle of the spherical triangle `(a, b, c)` of unit vectors.
pub fn signed_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let num = dot(a, cross(b, c));
    // sorted so that any vertex permutation rounds identically
    let mut d = [dot(a, b), dot(b, c), dot(c, a)];
    d.sort_by(f64::total_cmp);
    let den = 1.0 + (d[0] + d[1] + d[2]);
    2.0 * num.atan2(den)
}

/// Raw (unrounded) `ν3` of `field` over `mesh`. Triangles touching a flagged
/// vertex are skipped.
pub fn winding_number(mesh: &BisMesh, field: &DynamicalField) -> Result<f64> {
    winding_from_units(mesh, &field.unit)
}

pub fn winding_from_units(mesh: &BisMesh, unit: &[Option<[f64; 3]>]) -> Result<f64> {
    mesh.check_closed()?;
    if unit.len() != mesh.vertices.len() {
        return Err(Error::InvalidParameter(format!(
            "field has {} vertices, mesh has {}",
            unit.len(),
            mesh.vertices.len()
        )));
    }
    let flagged = unit.iter().filter(|u| u.is_none()).count();
    if flagged as f64 >= tol::MAX_FLAGGED_FRACTION * unit.len() as f64 && flagged > 0 {
        return Err(Error::FieldGap {
            flagged,
            total: unit.len(),
        });
    }
    let mut total = 0.0;
    for t in &mesh.triangles {
        if let [Some(a), Some(b), Some(c)] = t.map(|i| unit[i as usize]) {
            total += signed_solid_angle(a, b, c);
        }
    }
    Ok(ORIENTATION_SIGN * total / (4.0 * PI))
}

/// Unit spin-orbit field `(h1, h2, h3)/|·|` at every mesh vertex.
pub fn so_field_units(mesh: &BisMesh, p: &ModelParams) -> Vec<Option<[f64; 3]>> {
    mesh.vertices
        .iter()
        .map(|k| normalize(h_field(p, k).so_field()))
        .collect()
}

/// Degree of `ĥ_so` over the extracted BIS: the equilibrium bulk invariant.
pub fn winding_number_analytic_oracle(p: &ModelParams, n: usize) -> Result<f64> {
    let mesh = extract_bis_mesh(p, n)?;
    winding_from_units(&mesh, &so_field_units(&mesh, p))
}
