//! Exact two-qubit linear algebra.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 1 as the left tensor
//! factor, so `pauli_tensor(Z, X)` is `σz¹σx²`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::HVector;
use crate::{tol, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// Dense 4×4 complex operator on the two-qubit space.
#[derive(Clone, Copy, PartialEq)]
pub struct Operator4 {
    pub entries: [[Complex64; 4]; 4],
}

impl fmt::Debug for Operator4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator4[")?;
        for row in &self.entries {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Operator4 {
    pub fn zero() -> Self {
        Operator4 {
            entries: [[ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            op.entries[i][i] = ONE;
        }
        op
    }

    pub fn from_diagonal(d: [Complex64; 4]) -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            op.entries[i][i] = d[i];
        }
        op
    }

    /// Kronecker product `a ⊗ b` of two single-qubit operators.
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut op = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        op.entries[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        op
    }

    /// Embeds a single-qubit operator on `qubit` (1 or 2).
    pub fn on_qubit(qubit: u8, u: &[[Complex64; 2]; 2]) -> Self {
        let id = Pauli::I.matrix();
        match qubit {
            1 => Self::kron(u, &id),
            _ => Self::kron(&id, u),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                op.entries[i][j] = self.entries[j][i].conj();
            }
        }
        op
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut op = *self;
        op.entries
            .iter_mut()
            .flatten()
            .for_each(|z| *z *= s);
        op
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= tol::HERMITIAN
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= tol::UNITARY
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err <= tol::HERMITIAN {
            Ok(())
        } else {
            Err(Error::NotHermitian(err))
        }
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err <= tol::UNITARY {
            Ok(())
        } else {
            Err(Error::NotUnitary(err))
        }
    }

    pub fn apply(&self, psi: &PureState4) -> PureState4 {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.entries[i][j] * psi.amplitudes[j]).sum();
        }
        PureState4 { amplitudes: out }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &DensityMatrix4) -> DensityMatrix4 {
        DensityMatrix4 {
            entries: (*self * Operator4 { entries: rho.entries } * self.adjoint()).entries,
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn eigenvalues_hermitian(&self) -> Result<[f64; 4]> {
        self.ensure_hermitian()?;
        let eig = SymmetricEigen::new(self.to_nalgebra());
        let mut vals = [0.0; 4];
        vals.copy_from_slice(eig.eigenvalues.as_slice());
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    fn to_nalgebra(self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| self.entries[i][j])
    }
}

impl Mul for Operator4 {
    type Output = Operator4;

    fn mul(self, rhs: Operator4) -> Operator4 {
        let mut out = Operator4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.entries[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        out
    }
}

impl Add for Operator4 {
    type Output = Operator4;

    fn add(mut self, rhs: Operator4) -> Operator4 {
        for (a, b) in self.entries.iter_mut().flatten().zip(rhs.entries.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Operator4 {
    type Output = Operator4;

    fn sub(self, rhs: Operator4) -> Operator4 {
        self + (-rhs)
    }
}

impl Neg for Operator4 {
    type Output = Operator4;

    fn neg(self) -> Operator4 {
        self.scale_re(-1.0)
    }
}

/// Normalized two-qubit state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState4 {
    pub amplitudes: [Complex64; 4],
}

impl PureState4 {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let s = PureState4 { amplitudes };
        let n = s.norm();
        if (n - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidParameter(format!(
                "state norm {n} differs from 1"
            )));
        }
        Ok(s)
    }

    /// Basis state `|b⟩` for `b` in `0..4`.
    pub fn basis(b: usize) -> Self {
        let mut amplitudes = [ZERO; 4];
        amplitudes[b] = ONE;
        PureState4 { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &PureState4) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix4 {
        let mut entries = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix4 { entries }
    }
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    pub entries: [[Complex64; 4]; 4],
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        let op = Operator4 { entries };
        op.ensure_hermitian()?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min = op.eigenvalues_hermitian()?[0];
        if min < tol::PSD {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix4 { entries })
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4 {
            entries: Operator4::identity().scale_re(0.25).entries,
        }
    }

    pub fn as_operator(&self) -> Operator4 {
        Operator4 {
            entries: self.entries,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.as_operator().trace()
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        self.as_operator().eigenvalues_hermitian()
    }

    /// Zeroes every off-diagonal entry in the computational basis.
    pub fn dephase_fully(&self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    out.entries[i][j] = ZERO;
                }
            }
        }
        out
    }
}

/// Anything an observable can be measured on.
pub trait QuantumState {
    fn expect_complex(&self, obs: &Operator4) -> Complex64;
}

impl QuantumState for PureState4 {
    fn expect_complex(&self, obs: &Operator4) -> Complex64 {
        self.inner(&obs.apply(self))
    }
}

impl QuantumState for DensityMatrix4 {
    fn expect_complex(&self, obs: &Operator4) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for k in 0..4 {
                acc += obs.entries[i][k] * self.entries[k][i];
            }
        }
        acc
    }
}

/// `σ_a ⊗ σ_b`.
pub fn pauli_tensor(a: Pauli, b: Pauli) -> Operator4 {
    Operator4::kron(&a.matrix(), &b.matrix())
}

/// `Tr(obs ρ)` for a Hermitian observable.
pub fn expectation<S: QuantumState + ?Sized>(obs: &Operator4, state: &S) -> Result<f64> {
    obs.ensure_hermitian()?;
    let z = state.expect_complex(obs);
    debug_assert!(z.im.abs() <= tol::EXPECT_IMAG, "imaginary residue {}", z.im);
    Ok(z.re)
}

/// `e^{-iHt}` for the four-term Dirac Hamiltonian built from `h`.
///
/// The four σ-strings pairwise anticommute, so `H² = E²·I` and the exponential
/// collapses to `cos(Et)·I − i·sin(Et)/E·H`.
pub fn evolve_closed_form(h: &HVector, t: f64) -> Operator4 {
    let e = h.e;
    let et = e * t;
    let (c, s_over_e) = if et.abs() < tol::SINC_SERIES {
        (1.0 - 0.5 * et * et, t * (1.0 - et * et / 6.0))
    } else {
        (et.cos(), et.sin() / e)
    };
    let ham = h.operator();
    Operator4::identity().scale_re(c) + ham.scale(Complex64::new(0.0, -s_over_e))
}

/// Eigendecomposition of a Hermitian operator, reusable for many evolution times.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: [f64; 4],
    vectors: Matrix4<Complex64>,
}

impl Spectrum {
    pub fn new(h: &Operator4) -> Result<Self> {
        h.ensure_hermitian()?;
        let eig = SymmetricEigen::new(h.to_nalgebra());
        let mut values = [0.0; 4];
        values.copy_from_slice(eig.eigenvalues.as_slice());
        Ok(Spectrum {
            values,
            vectors: eig.eigenvectors,
        })
    }

    /// Spectral projector onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> Operator4 {
        let v = &self.vectors;
        let mut op = Operator4::zero();
        for k in (0..4).filter(|&k| keep(self.values[k])) {
            for i in 0..4 {
                for j in 0..4 {
                    op.entries[i][j] += v[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        op
    }

    /// `e^{-iHt} = V diag(e^{-iλt}) V†`.
    pub fn propagator(&self, t: f64) -> Operator4 {
        let phases: [Complex64; 4] =
            std::array::from_fn(|k| Complex64::from_polar(1.0, -self.values[k] * t));
        let v = &self.vectors;
        let mut op = Operator4::zero();
        for i in 0..4 {
            for j in 0..4 {
                op.entries[i][j] = (0..4).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum();
            }
        }
        op
    }
}

/// `e^{-iHt}` via eigendecomposition; valid for any Hermitian `H`.
pub fn expm_hermitian(h: &Operator4, t: f64) -> Result<Operator4> {
    Ok(Spectrum::new(h)?.propagator(t))
}

/// `|Tr(U†V)| / 4`.
pub fn fidelity_unitary(u: &Operator4, v: &Operator4) -> Result<f64> {
    u.ensure_unitary()?;
    v.ensure_unitary()?;
    Ok(((u.adjoint() * *v).trace().norm() / 4.0).min(1.0))
}
