//! Numeric tolerances shared by the library, its tests and the acceptance suite.

/// Hermiticity check, elementwise.
pub const HERMITIAN: f64 = 1e-12;
/// Unitarity check `U†U = I`, elementwise.
pub const UNITARY: f64 = 1e-10;
/// State normalization.
pub const NORM: f64 = 1e-12;
/// Density matrix trace.
pub const TRACE: f64 = 1e-12;
/// Smallest admissible density-matrix eigenvalue.
pub const PSD: f64 = -1e-10;
/// Imaginary residue allowed in an expectation value.
pub const EXPECT_IMAG: f64 = 1e-10;
/// Below this `|E t|` the closed-form propagator uses a series for `sin(Et)/E`.
pub const SINC_SERIES: f64 = 1e-8;
/// Relative tolerance for deciding that `T / tau` is an integer.
pub const TROTTER_INTEGER: f64 = 1e-9;
/// Closed form vs eigendecomposition propagators.
pub const PROPAGATOR_AGREEMENT: f64 = 1e-10;
/// Phase-boundary half-width in units of `xi0`.
pub const PHASE_BOUNDARY: f64 = 1e-6;
/// Vertex refinement target `|h0| <= BIS_RESIDUAL * xi0`.
pub const BIS_RESIDUAL: f64 = 1e-6;
/// Gradient magnitude below which a vertex is degenerate, in units of `xi0`.
pub const DEGENERATE_GRADIENT: f64 = 1e-9;
/// Shell root-finding target, in units of `xi0`.
pub const SHELL_RESIDUAL: f64 = 1e-6;
/// Unnormalized dynamical-field magnitude below which a vertex is flagged.
pub const G_FLOOR: f64 = 1e-3;
/// Maximum flagged-vertex fraction tolerated by the winding integral.
pub const MAX_FLAGGED_FRACTION: f64 = 0.01;
/// Longest J-coupling delay the compiler will emit, seconds.
pub const MAX_DELAY: f64 = 50e-3;

// Acceptance thresholds.

/// `|ν3 − expected|` for the theory pipeline.
pub const ACC_NU3_THEORY: f64 = 0.05;
/// `|ν3 − round(ν3)|` for the Trotter 10-point pipeline.
pub const ACC_NU3_REPLICA: f64 = 0.10;
/// Mean Trotter vs exact propagator fidelity.
pub const ACC_TROTTER_FIDELITY: f64 = 0.98;
/// Mean angle between `ĝ` and `ĥ_so` on the BIS, degrees.
pub const ACC_FIELD_ANGLE_DEG: f64 = 5.0;
/// Dynamical vs analytic winding number.
pub const ACC_ORACLE_AGREEMENT: f64 = 0.05;
/// Texture components smaller than this are exempt from the sign-flip check.
pub const ACC_SIGN_FLIP_FLOOR: f64 = 0.05;
/// Per-component texture on the BIS, 10-point average.
pub const ACC_BIS_TEXTURE_SPARSE: f64 = 0.1;
/// Per-component texture on the BIS, dense average.
pub const ACC_BIS_TEXTURE_DENSE: f64 = 0.01;
/// `1 − F` for ideal-model compiled slices.
pub const ACC_IDEAL_INFIDELITY: f64 = 1e-9;
/// Fidelity of finite-pulse compiled slices.
pub const ACC_FINITE_PULSE_FIDELITY: f64 = 0.999;
/// Relative deviation of the prepared state from the pseudo-pure form.
pub const ACC_PPS_RELATIVE: f64 = 1e-3;
/// `γ3` peak readout vs direct expectation.
pub const ACC_READOUT_IDENTITY: f64 = 1e-12;
