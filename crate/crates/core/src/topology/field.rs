//! Dynamical spin-texture field from the slope of textures across the BIS.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shells::ShellPair;
use crate::dynamics::{time_averaged_texture_keyed, QuenchSpec, SpinTexture};
use crate::{tol, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalField {
    /// Unnormalized `g` per base vertex.
    pub g: Vec<[f64; 3]>,
    /// `ĝ = g/|g|`, or `None` where `|g| < G_FLOOR`.
    pub unit: Vec<Option<[f64; 3]>>,
    pub plus: Vec<SpinTexture>,
    pub minus: Vec<SpinTexture>,
}

impl DynamicalField {
    /// Field from raw vectors; no shell textures attached.
    pub fn from_vectors(g: Vec<[f64; 3]>) -> Self {
        let unit = g.iter().map(|v| normalize(*v)).collect();
        DynamicalField {
            g,
            unit,
            plus: Vec::new(),
            minus: Vec::new(),
        }
    }

    pub fn flagged_count(&self) -> usize {
        self.unit.iter().filter(|u| u.is_none()).count()
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// `v/|v|`, or `None` below the floor. Scaling by the largest component first
/// makes the result exactly invariant under power-of-two rescaling of `v`.
pub fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(norm >= tol::G_FLOOR) {
        return None;
    }
    let m = v[0].abs().max(v[1].abs()).max(v[2].abs());
    let w = v.map(|c| c / m);
    let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    Some(w.map(|c| c / n))
}

/// `g = −(texture(+δ) − texture(−δ)) / Δk` at every shell pair.
///
/// Noise streams are keyed `2i` (minus shell) and `2i + 1` (plus shell), so
/// results do not depend on how the work is scheduled.
pub fn dynamical_field(spec: &QuenchSpec, pairs: &[ShellPair]) -> Result<DynamicalField> {
    spec.validate()?;
    let shells: Vec<(SpinTexture, SpinTexture)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| {
            let minus = time_averaged_texture_keyed(spec, &pair.point_minus, 2 * i as u64)?;
            let plus = time_averaged_texture_keyed(spec, &pair.point_plus, 2 * i as u64 + 1)?;
            Ok((minus, plus))
        })
        .collect::<Result<_>>()?;

    let g: Vec<[f64; 3]> = shells
        .iter()
        .zip(pairs)
        .map(|((minus, plus), pair)| {
            let (m, p) = (minus.to_array(), plus.to_array());
            std::array::from_fn(|c| -(p[c] - m[c]) / pair.delta_k)
        })
        .collect();
    let mut field = DynamicalField::from_vectors(g);
    field.minus = shells.iter().map(|s| s.0).collect();
    field.plus = shells.iter().map(|s| s.1).collect();
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_floors_and_units() {
        assert!(normalize([0.0, 0.0, 0.0]).is_none());
        assert!(normalize([1e-4, 0.0, 0.0]).is_none());
        let u = normalize([3.0, -4.0, 12.0]).unwrap();
        let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_of_two_scaling_is_exact() {
        let v = [0.3, -1.7, 2.9];
        let scaled = v.map(|c| c * 1024.0);
        assert_eq!(normalize(v), normalize(scaled));
    }
}
