//! End-to-end winding-number detection for one parameter set.

use serde::{Deserialize, Serialize};

use crate::dynamics::QuenchSpec;
use crate::topology::{
    dynamical_field, extract_bis_mesh, offset_shells, so_field_units, winding_from_units,
    winding_number, BisMesh, DynamicalField, MeshStats, ShellPair,
};
use crate::{Error, Result};

/// Mesh resolution used by default for full detections.
pub const DEFAULT_MESH_GRID: usize = 48;

/// Everything measured on a non-trivial BIS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub nu3_raw: f64,
    /// Degree of the equilibrium spin-orbit field over the same mesh.
    pub analytic_oracle: f64,
    pub stats: MeshStats,
    pub mesh: BisMesh,
    pub pairs: Vec<ShellPair>,
    pub field: DynamicalField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// `h0` never changes sign: no BIS and `ν3 = 0`.
    Trivial,
    Measured(Box<Detection>),
}

impl Outcome {
    pub fn nu3_raw(&self) -> f64 {
        match self {
            Outcome::Trivial => 0.0,
            Outcome::Measured(d) => d.nu3_raw,
        }
    }

    pub fn nu3_rounded(&self) -> i64 {
        self.nu3_raw().round() as i64
    }

    pub fn analytic_oracle(&self) -> f64 {
        match self {
            Outcome::Trivial => 0.0,
            Outcome::Measured(d) => d.analytic_oracle,
        }
    }

    pub fn detection(&self) -> Option<&Detection> {
        match self {
            Outcome::Trivial => None,
            Outcome::Measured(d) => Some(d),
        }
    }
}

impl Detection {
    /// Mean `|γ̄ᵢ|` over both shells and all three components.
    pub fn mean_abs_texture(&self) -> f64 {
        let values: Vec<f64> = self
            .field
            .plus
            .iter()
            .chain(&self.field.minus)
            .flat_map(|t| t.to_array())
            .map(f64::abs)
            .collect();
        values.iter().sum::<f64>() / values.len().max(1) as f64
    }
}

/// Mesh, shells at `h0 = ±delta_over_xi0·ξ0`, dynamical field and degree.
pub fn detect_winding(spec: &QuenchSpec, mesh_grid: usize, delta_over_xi0: f64) -> Result<Outcome> {
    spec.validate()?;
    let p = &spec.params;
    let mesh = match extract_bis_mesh(p, mesh_grid) {
        Ok(m) => m,
        Err(Error::EmptyBis) => return Ok(Outcome::Trivial),
        Err(e) => return Err(e),
    };
    let pairs = offset_shells(&mesh, p, delta_over_xi0 * p.xi0)?;
    let field = dynamical_field(spec, &pairs)?;
    let nu3_raw = winding_number(&mesh, &field)?;
    let analytic_oracle = winding_from_units(&mesh, &so_field_units(&mesh, p))?;
    Ok(Outcome::Measured(Box::new(Detection {
        nu3_raw,
        analytic_oracle,
        stats: mesh.stats(),
        mesh,
        pairs,
        field,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{EvolutionMode, TimeGrid};
    use crate::model::ModelParams;

    #[test]
    fn trivial_phase_reports_zero() {
        let spec = QuenchSpec::new(ModelParams::experimental(4.0), EvolutionMode::Exact);
        assert_eq!(detect_winding(&spec, 16, 0.1).unwrap(), Outcome::Trivial);
    }

    #[test]
    fn coarse_case2_theory_pipeline() {
        let spec = QuenchSpec::new(ModelParams::experimental(1.3), EvolutionMode::Exact)
            .with_times(TimeGrid::dense());
        let out = detect_winding(&spec, 16, 0.1).unwrap();
        assert!((out.nu3_raw() + 1.0).abs() < 0.05, "{}", out.nu3_raw());
        assert_eq!(out.detection().unwrap().field.flagged_count(), 0);
    }
}
