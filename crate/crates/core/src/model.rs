//! The chiral two-qubit Bloch Hamiltonian
//! `H(k) = h0·σz¹σx² + h1·σx¹ + h2·σy¹ + h3·σz¹σz²`
//! with `h0 = m_z − ξ0 (cos kx + cos ky + cos kz)` and `h_{1,2,3} = ξ_so sin k_{x,y,z}`.
//!
//! All energies are angular frequencies in rad/s; times are in seconds.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qops::{pauli_tensor, Operator4, Pauli, PureState4};
use crate::{tol, Error, Result};

pub const DEFAULT_XI_SO: f64 = 400.0;
pub const DEFAULT_XI0: f64 = 4.0 * DEFAULT_XI_SO;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m_z: f64,
    pub xi0: f64,
    pub xi_so: f64,
}

impl ModelParams {
    pub fn new(m_z: f64, xi0: f64, xi_so: f64) -> Result<Self> {
        if !(xi0 > 0.0 && xi0.is_finite()) || !(xi_so > 0.0 && xi_so.is_finite()) || !m_z.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "need finite m_z and positive xi0, xi_so (got m_z={m_z}, xi0={xi0}, xi_so={xi_so})"
            )));
        }
        Ok(ModelParams { m_z, xi0, xi_so })
    }

    /// Experimental couplings `ξ_so = 400`, `ξ0 = 4 ξ_so` with `m_z = ratio · ξ0`.
    pub fn experimental(mz_over_xi0: f64) -> Self {
        ModelParams {
            m_z: mz_over_xi0 * DEFAULT_XI0,
            xi0: DEFAULT_XI0,
            xi_so: DEFAULT_XI_SO,
        }
    }

    /// `h0` alone; cheaper than [`h_field`] for surface searches.
    pub fn h0(&self, k: &Momentum) -> f64 {
        self.m_z - self.xi0 * (k.kx.cos() + k.ky.cos() + k.kz.cos())
    }

    /// `∇_k h0 = ξ0 (sin kx, sin ky, sin kz)`.
    pub fn grad_h0(&self, k: &Momentum) -> [f64; 3] {
        [
            self.xi0 * k.kx.sin(),
            self.xi0 * k.ky.sin(),
            self.xi0 * k.kz.sin(),
        ]
    }
}

/// Crystal momentum on the periodic Brillouin zone, canonicalized into `[−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    // rem_euclid can return TAU itself for tiny negative inputs
    if y >= PI {
        y - TAU
    } else {
        y
    }
}

impl Momentum {
    pub fn new(kx: f64, ky: f64, kz: f64) -> Self {
        debug_assert!(kx.is_finite() && ky.is_finite() && kz.is_finite());
        Momentum {
            kx: wrap_angle(kx),
            ky: wrap_angle(ky),
            kz: wrap_angle(kz),
        }
    }

    pub fn from_array(k: [f64; 3]) -> Self {
        Self::new(k[0], k[1], k[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.kx, self.ky, self.kz]
    }

    /// `self + s·dir`, re-wrapped.
    pub fn offset(&self, dir: [f64; 3], s: f64) -> Self {
        Self::new(self.kx + s * dir[0], self.ky + s * dir[1], self.kz + s * dir[2])
    }

    /// Shortest displacement `other − self` on the torus.
    pub fn displacement_to(&self, other: &Momentum) -> [f64; 3] {
        [
            wrap_angle(other.kx - self.kx),
            wrap_angle(other.ky - self.ky),
            wrap_angle(other.kz - self.kz),
        ]
    }
}

/// Bloch coefficients `(h0, h1, h2, h3)` and the gap energy `E = |h|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HVector {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub e: f64,
}

impl HVector {
    pub fn new(h0: f64, h1: f64, h2: f64, h3: f64) -> Self {
        let e = (h0 * h0 + h1 * h1 + h2 * h2 + h3 * h3).sqrt();
        HVector { h0, h1, h2, h3, e }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.h0, self.h1, self.h2, self.h3]
    }

    /// Spin-orbit part `(h1, h2, h3)`.
    pub fn so_field(&self) -> [f64; 3] {
        [self.h1, self.h2, self.h3]
    }

    /// `Σ h_i γ_i` with `γ0 = σz¹σx²`, `γ1 = σx¹`, `γ2 = σy¹`, `γ3 = σz¹σz²`.
    pub fn operator(&self) -> Operator4 {
        let z = Complex64::new(0.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        let (a, b, c, d) = (self.h0, self.h1, self.h2, self.h3);
        // Written out from the four σ-strings; checked against the sum in tests.
        Operator4 {
            entries: [
                [r(d), r(a), Complex64::new(b, -c), z],
                [r(a), r(-d), z, Complex64::new(b, -c)],
                [Complex64::new(b, c), z, r(-d), r(-a)],
                [z, Complex64::new(b, c), r(-a), r(d)],
            ],
        }
    }
}

pub fn gamma0() -> Operator4 {
    pauli_tensor(Pauli::Z, Pauli::X)
}

pub fn gamma1() -> Operator4 {
    pauli_tensor(Pauli::X, Pauli::I)
}

pub fn gamma2() -> Operator4 {
    pauli_tensor(Pauli::Y, Pauli::I)
}

pub fn gamma3() -> Operator4 {
    pauli_tensor(Pauli::Z, Pauli::Z)
}

/// Chiral operator `σz¹σy²`, anticommuting with all four Hamiltonian terms.
pub fn chiral_operator() -> Operator4 {
    pauli_tensor(Pauli::Z, Pauli::Y)
}

pub fn h_field(p: &ModelParams, k: &Momentum) -> HVector {
    HVector::new(
        p.h0(k),
        p.xi_so * k.kx.sin(),
        p.xi_so * k.ky.sin(),
        p.xi_so * k.kz.sin(),
    )
}

pub fn hamiltonian(p: &ModelParams, k: &Momentum) -> Operator4 {
    h_field(p, k).operator()
}

/// Ground state of the `m_z → +∞` Hamiltonian, `(|00⟩ − |01⟩)/√2`.
pub fn prequench_ground_state() -> PureState4 {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState4 {
        amplitudes: [Complex64::new(a, 0.0), Complex64::new(-a, 0.0), z, z],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// Equilibrium 3D winding number.
    Winding(i32),
    /// `|m_z|` sits on a gap-closing value `ξ0` or `3ξ0`.
    Boundary,
}

/// Equilibrium phase diagram: `ν3 = 2` for `|m_z| < ξ0`, `−1` for
/// `ξ0 < |m_z| < 3ξ0`, `0` beyond.
pub fn phase_oracle(p: &ModelParams) -> Phase {
    let r = p.m_z.abs() / p.xi0;
    let eps = tol::PHASE_BOUNDARY;
    if (r - 1.0).abs() <= eps || (r - 3.0).abs() <= eps {
        Phase::Boundary
    } else if r < 1.0 {
        Phase::Winding(2)
    } else if r < 3.0 {
        Phase::Winding(-1)
    } else {
        Phase::Winding(0)
    }
}
