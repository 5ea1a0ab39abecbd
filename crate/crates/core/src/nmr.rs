//! NMR realization of the quench: pulse compilation of Trotter slices,
//! sequence simulation, pseudo-pure state preparation and peak readout.
//!
//! Rotations follow `R_φ(θ) = exp(−iθ/2 (cos φ σx + sin φ σy))`; the free
//! evolution is `exp(−i (πJ/2) σz¹σz² t)` on resonance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::format::fmt_sig;
use crate::model::HVector;
use crate::qops::{expm_hermitian, pauli_tensor, DensityMatrix4, Operator4, Pauli};
use crate::{tol, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmrParams {
    /// Scalar coupling, Hz.
    pub j_hz: f64,
    /// Hard-pulse length, seconds.
    pub tau_hard: f64,
    /// Thermal polarization ratio of qubit 2 to qubit 1 (¹H vs ¹³C).
    pub gyro_ratio: f64,
}

impl Default for NmrParams {
    fn default() -> Self {
        NmrParams {
            j_hz: 215.0,
            tau_hard: 5e-6,
            gyro_ratio: 4.0,
        }
    }
}

impl NmrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.j_hz > 0.0) || !(self.tau_hard > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "J and hard-pulse length must be positive (J={}, tau'={})",
                self.j_hz, self.tau_hard
            )));
        }
        if !(self.gyro_ratio >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "polarization ratio {} < 2 admits no spatial-averaging PPS",
                self.gyro_ratio
            )));
        }
        Ok(())
    }

    /// Delay realizing `exp(−i |c| τ σz¹σz²)`: `2|c|τ / (πJ)`.
    pub fn coupling_delay(&self, coefficient: f64, tau: f64) -> f64 {
        2.0 * coefficient.abs() * tau / (PI * self.j_hz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulsePrimitive {
    /// Instantaneous rotation by `flip` about the in-plane axis at angle `phase`.
    Rotation { qubit: u8, phase: f64, flip: f64 },
    /// Free J-coupling evolution.
    JDelay { duration: f64 },
    /// Rectangular pulse of amplitude `amplitude` (Hz) and length `length`.
    HardPulse {
        qubit: u8,
        amplitude: f64,
        phase: f64,
        length: f64,
    },
    /// Idealized gradient: removes every coherence.
    GradientCrush,
}

impl PulsePrimitive {
    pub fn rot_x(qubit: u8, flip: f64) -> Self {
        PulsePrimitive::Rotation {
            qubit,
            phase: 0.0,
            flip,
        }
    }

    pub fn rot_y(qubit: u8, flip: f64) -> Self {
        PulsePrimitive::Rotation {
            qubit,
            phase: FRAC_PI_2,
            flip,
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulsePrimitive::JDelay { duration } => *duration,
            PulsePrimitive::HardPulse { length, .. } => *length,
            _ => 0.0,
        }
    }

    /// Unitary action, or `None` for the gradient crush.
    pub fn unitary(&self, nmr: &NmrParams, model: PulseModel) -> Option<Operator4> {
        match *self {
            PulsePrimitive::Rotation { qubit, phase, flip } => Some(rotation(qubit, phase, flip)),
            PulsePrimitive::JDelay { duration } => Some(coupling_evolution(nmr, duration)),
            PulsePrimitive::HardPulse {
                qubit,
                amplitude,
                phase,
                length,
            } => Some(match model {
                PulseModel::Ideal => rotation(qubit, phase, 2.0 * PI * amplitude * length),
                PulseModel::FinitePulse => {
                    let control = in_plane(qubit, phase).scale_re(PI * amplitude);
                    let coupling = pauli_tensor(Pauli::Z, Pauli::Z).scale_re(PI * nmr.j_hz / 2.0);
                    expm_hermitian(&(control + coupling), length)
                        .expect("control plus coupling Hamiltonian is Hermitian")
                }
            }),
            PulsePrimitive::GradientCrush => None,
        }
    }

    fn to_line(self) -> String {
        let deg = |x: f64| fmt_sig(x.to_degrees());
        match self {
            PulsePrimitive::Rotation { qubit, phase, flip } => {
                format!("ROT {qubit} {} {}", deg(phase), deg(flip))
            }
            PulsePrimitive::JDelay { duration } => format!("JDELAY {}", fmt_sig(duration)),
            PulsePrimitive::HardPulse {
                qubit,
                amplitude,
                phase,
                length,
            } => format!(
                "HARD {qubit} {} {} {}",
                fmt_sig(amplitude),
                deg(phase),
                fmt_sig(length)
            ),
            PulsePrimitive::GradientCrush => "CRUSH".to_string(),
        }
    }

    fn parse_line(line: &str, lineno: usize) -> Result<Self> {
        let err = |reason: &str| Error::PulseParse {
            line: lineno,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .ok_or_else(|| err("missing field"))?
                .parse::<f64>()
                .map_err(|_| err("bad number"))
        };
        let qubit = |i: usize| -> Result<u8> {
            match fields.get(i).copied() {
                Some("1") => Ok(1),
                Some("2") => Ok(2),
                _ => Err(err("qubit must be 1 or 2")),
            }
        };
        let expect_len = |n: usize| {
            if fields.len() == n {
                Ok(())
            } else {
                Err(err("wrong field count"))
            }
        };
        match fields.first().copied() {
            Some("ROT") => {
                expect_len(4)?;
                Ok(PulsePrimitive::Rotation {
                    qubit: qubit(1)?,
                    phase: num(2)?.to_radians(),
                    flip: num(3)?.to_radians(),
                })
            }
            Some("JDELAY") => {
                expect_len(2)?;
                Ok(PulsePrimitive::JDelay { duration: num(1)? })
            }
            Some("HARD") => {
                expect_len(5)?;
                Ok(PulsePrimitive::HardPulse {
                    qubit: qubit(1)?,
                    amplitude: num(2)?,
                    phase: num(3)?.to_radians(),
                    length: num(4)?,
                })
            }
            Some("CRUSH") => {
                expect_len(1)?;
                Ok(PulsePrimitive::GradientCrush)
            }
            _ => Err(err("unknown primitive")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseModel {
    /// Hard pulses are instantaneous; J evolution is suspended during them.
    Ideal,
    /// Hard pulses evolve jointly with the J coupling.
    FinitePulse,
}

/// Time-ordered list of primitives (first element acts first).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseSequence {
    pub primitives: Vec<PulsePrimitive>,
}

impl PulseSequence {
    pub fn new(primitives: Vec<PulsePrimitive>) -> Self {
        PulseSequence { primitives }
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn duration(&self) -> f64 {
        self.primitives.iter().map(PulsePrimitive::duration).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.primitives {
            let _ = writeln!(out, "{}", p.to_line());
        }
        out
    }

    /// Parses the line format written by [`PulseSequence::to_text`];
    /// blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut primitives = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            primitives.push(PulsePrimitive::parse_line(line, i + 1)?);
        }
        Ok(PulseSequence { primitives })
    }
}

fn in_plane(qubit: u8, phase: f64) -> Operator4 {
    let x = Operator4::on_qubit(qubit, &Pauli::X.matrix());
    let y = Operator4::on_qubit(qubit, &Pauli::Y.matrix());
    x.scale_re(phase.cos()) + y.scale_re(phase.sin())
}

/// `exp(−iθ/2 (cos φ σx + sin φ σy))` on one qubit.
pub fn rotation(qubit: u8, phase: f64, flip: f64) -> Operator4 {
    let half = flip / 2.0;
    Operator4::identity().scale_re(half.cos())
        + in_plane(qubit, phase).scale(Complex64::new(0.0, -half.sin()))
}

/// `exp(−i (πJ/2) σz¹σz² t)`.
pub fn coupling_evolution(nmr: &NmrParams, t: f64) -> Operator4 {
    let phi = PI * nmr.j_hz / 2.0 * t;
    let c = Complex64::from_polar(1.0, -phi);
    Operator4::from_diagonal([c, c.conj(), c.conj(), c])
}

fn checked_delay(nmr: &NmrParams, coefficient: f64, tau: f64) -> Result<f64> {
    let delay = nmr.coupling_delay(coefficient, tau);
    if delay > tol::MAX_DELAY {
        return Err(Error::DelayOverflow {
            delay,
            limit: tol::MAX_DELAY,
        });
    }
    Ok(delay)
}

/// Pulse program for one Trotter slice `e^{-iH_zx τ} e^{-iH_zz τ} e^{-iH_xy τ}`.
///
/// Emitted in time order: the qubit-1 hard pulse (xy term), the σz¹σz² delay
/// (h3; bare for h3 > 0, sandwiched by x(∓π) on qubit 2 for h3 < 0), then the
/// σz¹σx² delay (h0; sandwiched by y(∓π/2) on qubit 2 with the sandwich order
/// set by the sign of h0). Zero coefficients emit nothing.
pub fn compile_slice(h: &HVector, tau: f64, nmr: &NmrParams) -> Result<PulseSequence> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("slice length must be positive (got {tau})")));
    }
    nmr.validate()?;
    let mut seq = Vec::new();

    let r = h.h1.hypot(h.h2);
    if r > 0.0 {
        seq.push(PulsePrimitive::HardPulse {
            qubit: 1,
            amplitude: r * tau / (PI * nmr.tau_hard),
            phase: h.h2.atan2(h.h1),
            length: nmr.tau_hard,
        });
    }

    if h.h3 != 0.0 {
        let delay = PulsePrimitive::JDelay {
            duration: checked_delay(nmr, h.h3, tau)?,
        };
        if h.h3 > 0.0 {
            seq.push(delay);
        } else {
            seq.extend([PulsePrimitive::rot_x(2, -PI), delay, PulsePrimitive::rot_x(2, PI)]);
        }
    }

    if h.h0 != 0.0 {
        let delay = PulsePrimitive::JDelay {
            duration: checked_delay(nmr, h.h0, tau)?,
        };
        let s = h.h0.signum();
        seq.extend([
            PulsePrimitive::rot_y(2, -s * FRAC_PI_2),
            delay,
            PulsePrimitive::rot_y(2, s * FRAC_PI_2),
        ]);
    }
    Ok(PulseSequence::new(seq))
}

/// Propagator of a crush-free sequence.
pub fn simulate_sequence(seq: &PulseSequence, nmr: &NmrParams, model: PulseModel) -> Result<Operator4> {
    seq.primitives.iter().try_fold(Operator4::identity(), |acc, p| {
        p.unitary(nmr, model)
            .map(|u| u * acc)
            .ok_or(Error::NonUnitaryPrimitive)
    })
}

/// Runs a sequence, crushes included, on a density matrix.
pub fn apply_sequence(seq: &PulseSequence, rho: &DensityMatrix4, nmr: &NmrParams) -> DensityMatrix4 {
    seq.primitives
        .iter()
        .fold(*rho, |state, p| match p.unitary(nmr, PulseModel::Ideal) {
            Some(u) => u.conjugate(&state),
            None => state.dephase_fully(),
        })
}

/// Spatial-averaging sequence with first rotation angle `first_flip` on qubit 2:
/// `R²x(θ) → Gz → R²x(−π/4) → U(1/2J) → R²y(π/4) → Gz`.
pub fn pps_sequence_with_angle(nmr: &NmrParams, first_flip: f64) -> PulseSequence {
    PulseSequence::new(vec![
        PulsePrimitive::rot_x(2, first_flip),
        PulsePrimitive::GradientCrush,
        PulsePrimitive::rot_x(2, -FRAC_PI_4),
        PulsePrimitive::JDelay {
            duration: 1.0 / (2.0 * nmr.j_hz),
        },
        PulsePrimitive::rot_y(2, FRAC_PI_4),
        PulsePrimitive::GradientCrush,
    ])
}

/// The PPS sequence with `θ = arccos(2/ratio)`, which equalizes the single-spin
/// and two-spin populations (π/3 for a 1:4 polarization ratio).
pub fn pps_sequence(nmr: &NmrParams) -> PulseSequence {
    pps_sequence_with_angle(nmr, (2.0 / nmr.gyro_ratio).acos())
}

/// High-temperature equilibrium `I/4 + (ε/4)(σz¹ + r·σz²)`.
pub fn thermal_state(nmr: &NmrParams, eps: f64) -> DensityMatrix4 {
    let dev = pauli_tensor(Pauli::Z, Pauli::I) + pauli_tensor(Pauli::I, Pauli::Z).scale_re(nmr.gyro_ratio);
    DensityMatrix4 {
        entries: (Operator4::identity().scale_re(0.25) + dev.scale_re(eps / 4.0)).entries,
    }
}

/// Pseudo-pure state `(1−ε)/4·I + ε|00⟩⟨00|` prepared from the thermal state.
pub fn prepare_pps(nmr: &NmrParams, eps: f64) -> Result<DensityMatrix4> {
    nmr.validate()?;
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::InvalidParameter(format!(
            "polarization must lie in (0, 0.2) (got {eps})"
        )));
    }
    let rho = apply_sequence(&pps_sequence(nmr), &thermal_state(nmr, eps), nmr);
    DensityMatrix4::new(rho.entries)
}

/// Peak amplitudes of the qubit-1 spectrum plus the derived `⟨σz¹σz²⟩` readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakTable {
    /// `⟨σx ⊗ |0⟩⟨0|⟩`
    pub m0x: f64,
    pub m0y: f64,
    /// `⟨σx ⊗ |1⟩⟨1|⟩`
    pub m1x: f64,
    pub m1y: f64,
    pub sigma_x1: f64,
    pub sigma_y1: f64,
    /// `⟨M⁰x⟩ − ⟨M¹x⟩` after `R¹y(π/2)`, equal to `⟨σz¹σz²⟩` of the input.
    pub gamma3: f64,
}

fn projector_on_qubit2(bit: u8) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if bit == 0 {
        [[one, zero], [zero, zero]]
    } else {
        [[zero, zero], [zero, one]]
    }
}

fn peak(rho: &DensityMatrix4, axis: Pauli, bit: u8) -> f64 {
    use crate::qops::QuantumState;
    let op = Operator4::kron(&axis.matrix(), &projector_on_qubit2(bit));
    rho.expect_complex(&op).re
}

pub fn readout_expectations(rho: &DensityMatrix4) -> PeakTable {
    let m0x = peak(rho, Pauli::X, 0);
    let m0y = peak(rho, Pauli::Y, 0);
    let m1x = peak(rho, Pauli::X, 1);
    let m1y = peak(rho, Pauli::Y, 1);
    let mapped = rotation(1, FRAC_PI_2, FRAC_PI_2).conjugate(rho);
    PeakTable {
        m0x,
        m0y,
        m1x,
        m1y,
        sigma_x1: m0x + m1x,
        sigma_y1: m0y + m1y,
        gamma3: peak(&mapped, Pauli::X, 0) - peak(&mapped, Pauli::X, 1),
    }
}
