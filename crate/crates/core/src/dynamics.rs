//! Closed-form evolution of the joint atom–field state.
//!
//! In the interaction picture at exact resonance the dynamics decouple into
//! independent two-level blocks `{|+,n⟩, |−,n+m⟩}` with Rabi frequency
//! `√h(n,m)` in scaled time `T = λt`, plus `m` uncoupled ground components
//! `|−,j⟩, j < m` ("dark" components) that carry the low-lying initial
//! ground population. The dark components are constant without the Stark
//! shift and pick up the free phase `exp(i t j β₂)` with it; carrying them
//! keeps the total state normalized for any atom preparation.
//!
//! With the Stark shift (MEHA), the block diagonal is `(-nβ₁, -(n+m)β₂)` and
//! the effective frequency is `Ω_n = ½√[(nβ₁ − (n+m)β₂)² + 4λ²h(n,m)]`.
//! Note the `λ²` inside the radical: this is required for the Stark-free
//! limit β₁ = β₂ = 0 to reproduce the bare coupling `λ√h(n,m)` and fixes a
//! dimensional inconsistency in the commonly printed form of this frequency.

use num_complex::Complex64;

use crate::error::Error;
use crate::states::{AtomState, FieldState};
use crate::Result;

/// Evolution generator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// Effective hamiltonian: bare m-photon coupling.
    Eha,
    /// Modified effective hamiltonian: coupling plus the intensity-dependent
    /// dynamic Stark shift `-â†â(β₁σ̂₊σ̂₋ + β₂σ̂₋σ̂₊)`.
    Meha,
}

/// Transition order, approach and coupling parameters.
///
/// `omega0` documents the cavity frequency; the atomic frequency is tied to
/// it by exact resonance (`ω_a = m ω₀`). Neither enters the
/// interaction-picture amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub m: u32,
    pub approach: Approach,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda: f64,
    pub omega0: f64,
}

impl ModelConfig {
    pub fn eha(m: u32) -> Result<Self> {
        Self::validate(Self {
            m,
            approach: Approach::Eha,
            beta1: 0.0,
            beta2: 0.0,
            lambda: 1.0,
            omega0: 1.0,
        })
    }

    pub fn meha(m: u32, beta1: f64, beta2: f64, lambda: f64) -> Result<Self> {
        Self::validate(Self { m, approach: Approach::Meha, beta1, beta2, lambda, omega0: 1.0 })
    }

    fn validate(cfg: Self) -> Result<Self> {
        if cfg.m == 0 {
            return Err(Error::InvalidInput("transition order m must be >= 1".into()));
        }
        if !(cfg.lambda.is_finite() && cfg.lambda > 0.0) {
            return Err(Error::InvalidInput(format!("coupling lambda must be > 0, got {}", cfg.lambda)));
        }
        if !(cfg.beta1.is_finite() && cfg.beta1 >= 0.0 && cfg.beta2.is_finite() && cfg.beta2 >= 0.0) {
            return Err(Error::InvalidInput("Stark parameters must be finite and >= 0".into()));
        }
        if !(cfg.omega0.is_finite() && cfg.omega0 > 0.0) {
            return Err(Error::InvalidInput("omega0 must be > 0".into()));
        }
        Ok(cfg)
    }

    /// Atomic transition frequency under exact resonance.
    pub fn omega_a(&self) -> f64 {
        self.m as f64 * self.omega0
    }
}

/// Rising product `h(n, m) = (n+m)!/n! = Π_{j=1..m}(n+j)`, with `h(n,0) = 1`.
pub fn h(n: usize, m: u32) -> f64 {
    let mut out = 1.0;
    for j in 1..=m as u64 {
        out *= n as f64 + j as f64;
    }
    out
}

/// Table of `√h(n, m)` for `n = 0..=n_max`, validated against f64 overflow.
pub fn sqrt_h_table(n_max: usize, m: u32) -> Result<Vec<f64>> {
    let mut table = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let v = h(n, m);
        if !v.is_finite() {
            return Err(Error::Overflow { n, m });
        }
        table.push(v.sqrt());
    }
    Ok(table)
}

/// Joint atom–field state at a fixed scaled time.
///
/// `g1[n]` is the amplitude on `|+, n⟩`, `g2[n]` on `|−, n+m⟩`, and
/// `dark[j]` on `|−, j⟩` for `j < m`.
#[derive(Debug, Clone)]
pub struct JointState {
    g1: Vec<Complex64>,
    g2: Vec<Complex64>,
    dark: Vec<Complex64>,
    time: f64,
    config: ModelConfig,
}

impl JointState {
    pub(crate) fn from_parts(
        g1: Vec<Complex64>,
        g2: Vec<Complex64>,
        dark: Vec<Complex64>,
        time: f64,
        config: ModelConfig,
    ) -> Self {
        debug_assert_eq!(g1.len(), g2.len());
        debug_assert_eq!(dark.len(), config.m as usize);
        Self { g1, g2, dark, time, config }
    }

    pub fn g1(&self) -> &[Complex64] {
        &self.g1
    }

    pub fn g2(&self) -> &[Complex64] {
        &self.g2
    }

    pub fn dark(&self) -> &[Complex64] {
        &self.dark
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn n_max(&self) -> usize {
        self.g1.len() - 1
    }

    /// Total norm `Σ(|g1|² + |g2|²) + Σ|dark|²`.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for (a, b) in self.g1.iter().zip(&self.g2) {
            s += a.norm_sqr() + b.norm_sqr();
        }
        for d in &self.dark {
            s += d.norm_sqr();
        }
        s
    }

    /// The state at `T = 0` for the given preparation.
    pub fn initial(field: &FieldState, atom: &AtomState, config: &ModelConfig) -> Self {
        let m = config.m as usize;
        let n_max = field.n_max();
        let ct = atom.theta().cos();
        let st = atom.theta().sin();
        let e_phi = Complex64::from_polar(1.0, -atom.phi());
        let g1 = (0..=n_max).map(|n| Complex64::new(field.amp(n) * ct, 0.0)).collect();
        let g2 = (0..=n_max).map(|n| e_phi * (field.amp(n + m) * st)).collect();
        let dark = (0..m).map(|j| e_phi * (field.amp(j) * st)).collect();
        Self::from_parts(g1, g2, dark, 0.0, config.clone())
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
    }
    Ok(())
}

/// Dispatch on `config.approach`.
pub fn evolve(field: &FieldState, atom: &AtomState, config: &ModelConfig, t: f64) -> Result<JointState> {
    match config.approach {
        Approach::Eha => evolve_eha(field, atom, config, t),
        Approach::Meha => evolve_meha(field, atom, config, t),
    }
}

/// Closed-form amplitudes without the Stark shift:
/// `g1(n) = C_n cosθ cos(T√h) − i e^{-iφ} C_{n+m} sinθ sin(T√h)`,
/// `g2(n) = e^{-iφ} C_{n+m} sinθ cos(T√h) − i C_n cosθ sin(T√h)`,
/// dark components frozen at their initial values.
pub fn evolve_eha(field: &FieldState, atom: &AtomState, config: &ModelConfig, t: f64) -> Result<JointState> {
    if config.approach != Approach::Eha {
        return Err(Error::InvalidInput("evolve_eha requires an EHA config".into()));
    }
    check_time(t)?;
    let m = config.m as usize;
    let n_max = field.n_max();
    let w = sqrt_h_table(n_max, config.m)?;
    let ct = atom.theta().cos();
    let st = atom.theta().sin();
    let e_phi = Complex64::from_polar(1.0, -atom.phi());

    let mut g1 = Vec::with_capacity(n_max + 1);
    let mut g2 = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (sn, cs) = (t * w[n]).sin_cos();
        let a0 = field.amp(n) * ct;
        let b0 = e_phi * (field.amp(n + m) * st);
        g1.push(Complex64::new(a0 * cs, 0.0) - Complex64::i() * b0 * sn);
        g2.push(b0 * cs - Complex64::i() * (a0 * sn));
    }
    let dark = (0..m).map(|j| e_phi * (field.amp(j) * st)).collect();
    Ok(JointState::from_parts(g1, g2, dark, t, config.clone()))
}

/// Closed-form amplitudes with the dynamic Stark shift, in terms of
/// `V_n = ½[nβ₁ + (n+m)β₂]`, `δ_n = ½[nβ₁ − (n+m)β₂]` and
/// `Ω_n = √(δ_n² + λ²h(n,m))`, evaluated at the unscaled time `t = T/λ`:
///
/// `g1(n) = e^{itV_n} { a₀ cos(tΩ_n) + (i/Ω_n)[δ_n a₀ − λ√h b₀] sin(tΩ_n) }`,
/// `g2(n) = e^{itV_n} { b₀ cos(tΩ_n) − (i/Ω_n)[δ_n b₀ + λ√h a₀] sin(tΩ_n) }`,
///
/// with `a₀ = C_n cosθ`, `b₀ = e^{-iφ} C_{n+m} sinθ`. Dark components
/// rotate as `exp(i t j β₂)`.
pub fn evolve_meha(field: &FieldState, atom: &AtomState, config: &ModelConfig, t_scaled: f64) -> Result<JointState> {
    if config.approach != Approach::Meha {
        return Err(Error::InvalidInput("evolve_meha requires a MEHA config".into()));
    }
    check_time(t_scaled)?;
    let m = config.m as usize;
    let n_max = field.n_max();
    let lam = config.lambda;
    let t = t_scaled / lam;
    let ct = atom.theta().cos();
    let st = atom.theta().sin();
    let e_phi = Complex64::from_polar(1.0, -atom.phi());

    let mut g1 = Vec::with_capacity(n_max + 1);
    let mut g2 = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let hv = h(n, config.m);
        if !hv.is_finite() {
            return Err(Error::Overflow { n, m: config.m });
        }
        let nf = n as f64;
        let v = 0.5 * (nf * config.beta1 + (nf + m as f64) * config.beta2);
        let delta = 0.5 * (nf * config.beta1 - (nf + m as f64) * config.beta2);
        let omega = (delta * delta + lam * lam * hv).sqrt();
        let (sn, cs) = (t * omega).sin_cos();
        let phase = Complex64::from_polar(1.0, t * v);
        let a0 = Complex64::new(field.amp(n) * ct, 0.0);
        let b0 = e_phi * (field.amp(n + m) * st);
        let coupling = lam * hv.sqrt();
        let i_over = Complex64::i() * (sn / omega);
        g1.push(phase * (a0 * cs + i_over * (a0 * delta - b0 * coupling)));
        g2.push(phase * (b0 * cs - i_over * (b0 * delta + a0 * coupling)));
    }
    let dark = (0..m)
        .map(|j| e_phi * (field.amp(j) * st) * Complex64::from_polar(1.0, t * j as f64 * config.beta2))
        .collect();
    Ok(JointState::from_parts(g1, g2, dark, t_scaled, config.clone()))
}
