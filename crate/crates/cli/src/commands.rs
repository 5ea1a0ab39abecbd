//! Subcommand implementations. Each returns the files it wrote.

use std::fmt::Write as _;
use std::path::PathBuf;

use aiii_quench::dynamics::{time_averaged_texture_keyed, trotter_slice, EvolutionMode};
use aiii_quench::format::fmt_sig;
use aiii_quench::model::HVector;
use aiii_quench::nmr::{compile_slice, simulate_sequence, PulseModel, PulseSequence};
use aiii_quench::pipeline::{detect_winding, Outcome};
use aiii_quench::qops::fidelity_unitary;
use aiii_quench::topology::{
    extract_bis_mesh, field_to_csv, find_bis_slice, mesh_to_off, slice_coordinate, MeshStats,
};
use aiii_quench::{model::Momentum, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{Meta, OutDir};
use crate::CliError;

pub const TEXTURES_HEADER: &str = "kx,ky,kz,g1bar,g2bar,g3bar";
pub const NOISE_HEADER: &str = "A_over_xi_so,A_rad_s,samples,nu3_raw,nu3_rounded,mean_abs_texture";

/// Time-averaged textures over the `n × n` slice at fixed `kz`, row-major in `(kx, ky)`.
pub fn textures(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.spec()?;
    let kz = cfg.kz()?;
    let n = cfg.slice_grid;
    let rows: Vec<[f64; 6]> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let k = Momentum::new(slice_coordinate(i, n), slice_coordinate(j, n), kz);
            let t = time_averaged_texture_keyed(&spec, &k, idx as u64)?;
            Ok([k.kx, k.ky, k.kz, t.g1, t.g2, t.g3])
        })
        .collect::<Result<_, Error>>()?;

    let mut body = format!("{TEXTURES_HEADER}\n");
    for r in &rows {
        writeln!(body, "{}", r.map(fmt_sig).join(",")).unwrap();
    }
    let out = OutDir::create(cfg.out_dir())?;
    let meta = Meta {
        command: "textures",
        config: cfg,
    };
    Ok(vec![out.write_text("textures.csv", &meta, &body)?])
}

#[derive(Serialize)]
struct BisReport {
    kz: f64,
    slice_grid: usize,
    contours: usize,
    contour_points: usize,
    mesh_grid: usize,
    empty: bool,
    mesh_stats: Option<MeshStats>,
    max_residual_over_xi0: Option<f64>,
    orientation_violations: Option<usize>,
}

/// Slice contours, the 3D surface as OFF, and a JSON summary.
pub fn bis(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.require_gapped()?;
    let p = cfg.params()?;
    let kz = cfg.kz()?;
    let contours = find_bis_slice(&p, kz, cfg.slice_grid)?;
    let mesh = match extract_bis_mesh(&p, cfg.mesh_grid) {
        Ok(m) => Some(m),
        Err(Error::EmptyBis) => None,
        Err(e) => return Err(e.into()),
    };

    let out = OutDir::create(cfg.out_dir())?;
    let meta = Meta { command: "bis", config: cfg };
    let mut written = Vec::new();

    let mut body = String::from("contour,point,kx,ky\n");
    for (c, contour) in contours.iter().enumerate() {
        for (i, q) in contour.points.iter().enumerate() {
            writeln!(body, "{c},{i},{},{}", fmt_sig(q[0]), fmt_sig(q[1])).unwrap();
        }
    }
    written.push(out.write_text("bis_slice.csv", &meta, &body)?);
    if let Some(m) = &mesh {
        written.push(out.write_text("bis_mesh.off", &meta, &mesh_to_off(m))?);
    }
    let report = BisReport {
        kz,
        slice_grid: cfg.slice_grid,
        contours: contours.len(),
        contour_points: contours.iter().map(|c| c.points.len()).sum(),
        mesh_grid: cfg.mesh_grid,
        empty: mesh.is_none(),
        mesh_stats: mesh.as_ref().map(|m| m.stats()),
        max_residual_over_xi0: mesh.as_ref().map(|m| m.max_residual(&p) / p.xi0),
        orientation_violations: mesh.as_ref().map(|m| m.orientation_violations(&p)),
    };
    written.push(out.write_json("bis.json", &meta, &report)?);
    Ok(written)
}

#[derive(Serialize)]
pub struct WindingReport {
    pub nu3_raw: f64,
    pub nu3_rounded: i64,
    pub analytic_oracle: f64,
    pub mesh_stats: Option<MeshStats>,
    pub flagged_vertices: usize,
    pub mean_abs_texture: Option<f64>,
    pub note: Option<String>,
}

impl WindingReport {
    fn from_outcome(outcome: &Outcome) -> Self {
        let d = outcome.detection();
        WindingReport {
            nu3_raw: outcome.nu3_raw(),
            nu3_rounded: outcome.nu3_rounded(),
            analytic_oracle: outcome.analytic_oracle(),
            mesh_stats: d.map(|d| d.stats),
            flagged_vertices: d.map_or(0, |d| d.field.flagged_count()),
            mean_abs_texture: d.map(|d| d.mean_abs_texture()),
            note: d.is_none().then(|| "EmptyBis: h0 has constant sign, nu3 = 0".to_string()),
        }
    }
}

/// Full detection: JSON report plus the per-vertex field.
pub fn winding(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.require_gapped()?;
    let outcome = detect_winding(&cfg.spec()?, cfg.mesh_grid, cfg.delta)?;
    let out = OutDir::create(cfg.out_dir())?;
    let meta = Meta {
        command: "winding",
        config: cfg,
    };
    let csv = match outcome.detection() {
        Some(d) => field_to_csv(&d.mesh, &d.field),
        None => format!("{}\n", aiii_quench::topology::FIELD_CSV_HEADER),
    };
    Ok(vec![
        out.write_json("winding.json", &meta, &WindingReport::from_outcome(&outcome))?,
        out.write_text("winding_field.csv", &meta, &csv)?,
    ])
}

/// One seeded Monte-Carlo detection per dephasing amplitude.
pub fn noise(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.require_gapped()?;
    let mut body = format!("{NOISE_HEADER}\n");
    for &a in &cfg.noise_levels {
        let level = a * cfg.xi_so;
        let spec = cfg
            .spec_with_mode(EvolutionMode::NoisyExact)?
            .with_noise(level, cfg.noise_samples);
        let outcome = detect_winding(&spec, cfg.mesh_grid, cfg.delta)?;
        let texture = outcome.detection().map_or(0.0, |d| d.mean_abs_texture());
        writeln!(
            body,
            "{},{},{},{},{},{}",
            fmt_sig(a),
            fmt_sig(level),
            cfg.noise_samples,
            fmt_sig(outcome.nu3_raw()),
            outcome.nu3_rounded(),
            fmt_sig(texture)
        )
        .unwrap();
    }
    let out = OutDir::create(cfg.out_dir())?;
    let meta = Meta { command: "noise", config: cfg };
    Ok(vec![out.write_text("noise.csv", &meta, &body)?])
}

#[derive(Serialize)]
struct PulseReport {
    h: [f64; 4],
    tau: f64,
    primitives: usize,
    total_duration: f64,
    ideal_fidelity: f64,
    finite_pulse_fidelity: f64,
}

/// Compiles one Trotter slice and reports its fidelity in both pulse models.
pub fn pulse(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let [h0, h1, h2, h3] = cfg.pulse_h;
    let h = HVector::new(h0, h1, h2, h3);
    let tau = cfg.tau_ms * 1e-3;
    let nmr = cfg.nmr();
    let seq: PulseSequence = compile_slice(&h, tau, &nmr)?;
    let target = trotter_slice(&h, tau);
    let ideal = simulate_sequence(&seq, &nmr, PulseModel::Ideal)?;
    let finite = simulate_sequence(&seq, &nmr, PulseModel::FinitePulse)?;
    let report = PulseReport {
        h: cfg.pulse_h,
        tau,
        primitives: seq.len(),
        total_duration: seq.duration(),
        ideal_fidelity: fidelity_unitary(&ideal, &target)?,
        finite_pulse_fidelity: fidelity_unitary(&finite, &target)?,
    };
    let out = OutDir::create(cfg.out_dir())?;
    let meta = Meta { command: "pulse", config: cfg };
    Ok(vec![
        out.write_text("pulse.txt", &meta, &seq.to_text())?,
        out.write_json("pulse.json", &meta, &report)?,
    ])
}
