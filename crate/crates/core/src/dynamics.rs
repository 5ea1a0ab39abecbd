//! Quench evolution of the pre-quench ground state and spin-texture measurement.
//!
//! Four evolution modes share one entry point, [`time_averaged_texture`]:
//! exact (closed-form propagator), first-order Trotter, the compiled NMR pulse
//! sequence, and exact evolution under static random σz dephasing.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{h_field, prequench_ground_state, HVector, ModelParams, Momentum};
use crate::nmr::{compile_slice, simulate_sequence, NmrParams, PulseModel};
use crate::qops::{evolve_closed_form, pauli_tensor, Operator4, Pauli, PureState4, Spectrum};
use crate::{tol, Error, Result};

/// Trotter slice used in the experiment, seconds.
pub const DEFAULT_TAU: f64 = 2.5e-4;
pub const DEFAULT_NOISE_SAMPLES: usize = 100;
pub const DENSE_SAMPLES: usize = 1000;
/// Oscillation periods of `2E` covered by the dense average (≈ 50/E).
pub const DENSE_PERIODS: u32 = 16;

/// Evolution times 0.5 ms … 5 ms in 0.5 ms steps.
pub fn experiment_times() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.5e-3).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMode {
    Exact,
    Trotter,
    Compiled,
    NoisyExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeGrid {
    /// Explicit evolution times in seconds.
    Points(Vec<f64>),
    /// `samples` uniformly spaced times over `periods` whole periods of the
    /// local `2E` oscillation, excluding the endpoint. Approximates the
    /// infinite-time average.
    Dense { samples: usize, periods: u32 },
}

impl TimeGrid {
    pub fn experiment() -> Self {
        TimeGrid::Points(experiment_times())
    }

    pub fn dense() -> Self {
        TimeGrid::Dense {
            samples: DENSE_SAMPLES,
            periods: DENSE_PERIODS,
        }
    }

    /// Concrete times for a point with gap energy `e`.
    pub fn times_for(&self, e: f64) -> Vec<f64> {
        match self {
            TimeGrid::Points(t) => t.clone(),
            TimeGrid::Dense { samples, periods } => {
                if e <= 0.0 {
                    return vec![0.0];
                }
                let horizon = *periods as f64 * PI / e;
                (0..*samples)
                    .map(|j| j as f64 * horizon / *samples as f64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    /// Post-quench parameters.
    pub params: ModelParams,
    pub times: TimeGrid,
    pub mode: EvolutionMode,
    /// Trotter slice, seconds.
    pub tau: f64,
    /// Dephasing amplitude `A`, rad/s.
    pub noise_level: f64,
    pub noise_samples: usize,
    pub seed: u64,
    pub nmr: NmrParams,
}

impl QuenchSpec {
    pub fn new(params: ModelParams, mode: EvolutionMode) -> Self {
        QuenchSpec {
            params,
            times: TimeGrid::experiment(),
            mode,
            tau: DEFAULT_TAU,
            noise_level: 0.0,
            noise_samples: DEFAULT_NOISE_SAMPLES,
            seed: 0,
            nmr: NmrParams::default(),
        }
    }

    pub fn with_times(mut self, times: TimeGrid) -> Self {
        self.times = times;
        self
    }

    pub fn with_noise(mut self, level: f64, samples: usize) -> Self {
        self.noise_level = level;
        self.noise_samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match &self.times {
            TimeGrid::Points(t) => {
                if t.is_empty() {
                    return bad("time grid is empty".into());
                }
                if t.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return bad("evolution times must be finite and non-negative".into());
                }
                if t.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("evolution times must be strictly increasing".into());
                }
                if matches!(self.mode, EvolutionMode::Trotter | EvolutionMode::Compiled) {
                    for &time in t {
                        trotter_steps(time, self.tau)?;
                    }
                }
            }
            TimeGrid::Dense { samples, periods } => {
                if *samples == 0 || *periods == 0 {
                    return bad("dense grid needs samples > 0 and periods > 0".into());
                }
                if matches!(self.mode, EvolutionMode::Trotter | EvolutionMode::Compiled) {
                    return bad("the dense grid is not commensurate with a Trotter slice".into());
                }
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("Trotter slice must be positive (got {})", self.tau));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!("noise level must be >= 0 (got {})", self.noise_level));
        }
        if self.mode == EvolutionMode::NoisyExact && self.noise_samples == 0 {
            return bad("noisy mode needs at least one noise sample".into());
        }
        Ok(())
    }
}

/// Expectations of `γ1 = σx¹`, `γ2 = σy¹`, `γ3 = σz¹σz²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpinTexture {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl SpinTexture {
    pub fn from_array(a: [f64; 3]) -> Self {
        SpinTexture {
            g1: a[0],
            g2: a[1],
            g3: a[2],
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.g1, self.g2, self.g3]
    }

    /// Largest component magnitude.
    pub fn max_abs(&self) -> f64 {
        self.g1.abs().max(self.g2.abs()).max(self.g3.abs())
    }

    /// Reads the three textures off a pure state without forming operators.
    pub fn of_state(psi: &PureState4) -> Self {
        let a = &psi.amplitudes;
        let coh = a[0].conj() * a[2] + a[1].conj() * a[3];
        SpinTexture {
            g1: 2.0 * coh.re,
            g2: 2.0 * coh.im,
            g3: a[0].norm_sqr() - a[1].norm_sqr() - a[2].norm_sqr() + a[3].norm_sqr(),
        }
    }

    fn accumulate(&mut self, other: SpinTexture) {
        self.g1 += other.g1;
        self.g2 += other.g2;
        self.g3 += other.g3;
    }

    fn scaled(self, s: f64) -> Self {
        SpinTexture {
            g1: self.g1 * s,
            g2: self.g2 * s,
            g3: self.g3 * s,
        }
    }
}

fn mean_texture(iter: impl Iterator<Item = SpinTexture>) -> SpinTexture {
    let mut acc = SpinTexture::default();
    let mut n = 0usize;
    for t in iter {
        acc.accumulate(t);
        n += 1;
    }
    acc.scaled(1.0 / n.max(1) as f64)
}

/// Pre-quench ground state evolved for `t` under the post-quench Hamiltonian.
pub fn evolve_exact(p: &ModelParams, k: &Momentum, t: f64) -> PureState4 {
    evolve_closed_form(&h_field(p, k), t).apply(&prequench_ground_state())
}

/// Number of slices `T / tau`, rejecting non-integer ratios.
pub fn trotter_steps(time: f64, tau: f64) -> Result<usize> {
    let ratio = time / tau;
    let m = ratio.round();
    if (ratio - m).abs() > tol::TROTTER_INTEGER * m.max(1.0) {
        return Err(Error::NonIntegerTrotter { time, tau });
    }
    Ok(m as usize)
}

/// One first-order slice `e^{-iH_zx τ} e^{-iH_zz τ} e^{-iH_xy τ}`.
pub fn trotter_slice(h: &HVector, tau: f64) -> Operator4 {
    let zx = evolve_closed_form(&HVector::new(h.h0, 0.0, 0.0, 0.0), tau);
    let zz = evolve_closed_form(&HVector::new(0.0, 0.0, 0.0, h.h3), tau);
    let xy = evolve_closed_form(&HVector::new(0.0, h.h1, h.h2, 0.0), tau);
    zx * zz * xy
}

fn power(op: &Operator4, m: usize) -> Operator4 {
    (0..m).fold(Operator4::identity(), |acc, _| acc * *op)
}

/// `(e^{-iH_zx τ} e^{-iH_zz τ} e^{-iH_xy τ})^m` with `m = T/τ`.
pub fn trotter_propagator(p: &ModelParams, k: &Momentum, time: f64, tau: f64) -> Result<Operator4> {
    let m = trotter_steps(time, tau)?;
    if m == 0 {
        return Err(Error::NonIntegerTrotter { time, tau });
    }
    Ok(power(&trotter_slice(&h_field(p, k), tau), m))
}

/// Texture after evolving for `t` in the mode selected by `spec`.
///
/// In noisy mode the result is the sample mean at this single time.
pub fn spin_texture(spec: &QuenchSpec, k: &Momentum, t: f64) -> Result<SpinTexture> {
    let single = QuenchSpec {
        times: TimeGrid::Points(vec![t]),
        ..spec.clone()
    };
    time_averaged_texture(&single, k)
}

/// Mean texture over the spec's time grid.
pub fn time_averaged_texture(spec: &QuenchSpec, k: &Momentum) -> Result<SpinTexture> {
    time_averaged_texture_keyed(spec, k, 0)
}

/// As [`time_averaged_texture`]; `key` selects the noise stream in noisy mode.
pub fn time_averaged_texture_keyed(spec: &QuenchSpec, k: &Momentum, key: u64) -> Result<SpinTexture> {
    spec.validate()?;
    let h = h_field(&spec.params, k);
    let psi0 = prequench_ground_state();
    match spec.mode {
        EvolutionMode::Exact => Ok(exact_average(&h, &spec.times.times_for(h.e))),
        EvolutionMode::Trotter => {
            let slice = trotter_slice(&h, spec.tau);
            sliced_average(&slice, spec, &psi0)
        }
        EvolutionMode::Compiled => {
            let seq = compile_slice(&h, spec.tau, &spec.nmr)?;
            let slice = simulate_sequence(&seq, &spec.nmr, PulseModel::Ideal)?;
            sliced_average(&slice, spec, &psi0)
        }
        EvolutionMode::NoisyExact => dephased_texture(spec, k, key),
    }
}

fn exact_average(h: &HVector, times: &[f64]) -> SpinTexture {
    let psi0 = prequench_ground_state();
    mean_texture(
        times
            .iter()
            .map(|&t| SpinTexture::of_state(&evolve_closed_form(h, t).apply(&psi0))),
    )
}

fn sliced_average(slice: &Operator4, spec: &QuenchSpec, psi0: &PureState4) -> Result<SpinTexture> {
    let TimeGrid::Points(times) = &spec.times else {
        unreachable!("validated: sliced modes use explicit times");
    };
    let mut current = Operator4::identity();
    let mut done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let m = trotter_steps(t, spec.tau)?;
        current = power(slice, m - done) * current;
        done = m;
        out.push(SpinTexture::of_state(&current.apply(psi0)));
    }
    Ok(mean_texture(out.into_iter()))
}

/// Static dephasing offsets `(d_z1, d_z2)` for one Monte-Carlo sample.
///
/// Counter-based: the ChaCha stream is the point key and the word position is
/// derived from the sample index, so any thread may draw any sample.
pub fn noise_draw(seed: u64, key: u64, sample: usize, level: f64) -> (f64, f64) {
    if level == 0.0 {
        return (0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng.set_word_pos(sample as u128 * 4);
    let d1 = rng.random_range(-level..level);
    let d2 = rng.random_range(-level..level);
    (d1, d2)
}

/// `H(k) + d1·σz¹ + d2·σz²`.
pub fn dephased_hamiltonian(h: &HVector, d1: f64, d2: f64) -> Operator4 {
    h.operator()
        + pauli_tensor(Pauli::Z, Pauli::I).scale_re(d1)
        + pauli_tensor(Pauli::I, Pauli::Z).scale_re(d2)
}

/// Monte-Carlo mean of time-averaged textures under static σz dephasing.
///
/// With `A = 0` this is the noiseless exact average, bit for bit.
pub fn dephased_texture(spec: &QuenchSpec, k: &Momentum, key: u64) -> Result<SpinTexture> {
    if !(spec.noise_level >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be >= 0 (got {})",
            spec.noise_level
        )));
    }
    if spec.noise_samples == 0 {
        return Err(Error::InvalidParameter("noise_samples must be >= 1".into()));
    }
    let h = h_field(&spec.params, k);
    let times = spec.times.times_for(h.e);
    if spec.noise_level == 0.0 {
        return Ok(exact_average(&h, &times));
    }
    let psi0 = prequench_ground_state();
    let mut per_sample = Vec::with_capacity(spec.noise_samples);
    for sample in 0..spec.noise_samples {
        let (d1, d2) = noise_draw(spec.seed, key, sample, spec.noise_level);
        let spectrum = Spectrum::new(&dephased_hamiltonian(&h, d1, d2))?;
        per_sample.push(mean_texture(
            times
                .iter()
                .map(|&t| SpinTexture::of_state(&spectrum.propagator(t).apply(&psi0))),
        ));
    }
    Ok(mean_texture(per_sample.into_iter()))
}
