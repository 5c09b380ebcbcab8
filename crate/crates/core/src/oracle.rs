//! Independent brute-force verification of the closed-form dynamics.
//!
//! The interaction-picture generator (in scaled time) is built as an
//! explicit real symmetric matrix over the truncated joint basis and the
//! Schrödinger equation is integrated with a fixed-step classical
//! fourth-order Runge-Kutta method. Nothing here calls the closed-form
//! amplitudes; even `√h(n,m)` is recomputed locally from the product rule.
//!
//! The generator decomposes into independent 2×2 blocks
//! `{|+,n⟩, |−,n+m⟩}` plus 1×1 blocks for the uncoupled components, and the
//! integrator walks the blocks in order; this is bit-identical to stepping
//! the full state vector because the blocks do not mix.

use num_complex::Complex64;
use std::time::{Duration, Instant};

use crate::dynamics::{Approach, JointState, ModelConfig};
use crate::error::Error;
use crate::states::AtomState;
use crate::Result;

/// Norm drift allowed over a full integration.
pub const NORM_DRIFT_BUDGET: f64 = 1e-8;

/// Per-component deviation budget used when suggesting a step size.
const COMPONENT_ERROR_BUDGET: f64 = 2e-7;

/// Atom sector of a joint basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomLevel {
    Excited,
    Ground,
}

/// `(atom, n) ↔ flat = 2n + (0 for |+⟩, 1 for |−⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointBasisIndex {
    pub atom: AtomLevel,
    pub n: usize,
}

impl JointBasisIndex {
    pub fn flat(&self) -> usize {
        2 * self.n
            + match self.atom {
                AtomLevel::Excited => 0,
                AtomLevel::Ground => 1,
            }
    }

    pub fn from_flat(index: usize) -> Self {
        Self {
            atom: if index % 2 == 0 { AtomLevel::Excited } else { AtomLevel::Ground },
            n: index / 2,
        }
    }
}

/// Real symmetric generator `Ĥ_I/λ` over the joint basis, stored in banded
/// form: one coupling per 2×2 block plus two diagonals.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    n_fock_max: usize,
    m: u32,
    coupling: Vec<f64>,
    diag_plus: Vec<f64>,
    diag_minus: Vec<f64>,
}

impl HamiltonianMatrix {
    /// Number of joint basis states, `2(n_fock_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_fock_max + 1)
    }

    pub fn n_fock_max(&self) -> usize {
        self.n_fock_max
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Matrix element between flat indices.
    pub fn element(&self, i: usize, j: usize) -> f64 {
        let a = JointBasisIndex::from_flat(i);
        let b = JointBasisIndex::from_flat(j);
        if i == j {
            return match a.atom {
                AtomLevel::Excited => self.diag_plus[a.n],
                AtomLevel::Ground => self.diag_minus[a.n],
            };
        }
        let m = self.m as usize;
        match (a.atom, b.atom) {
            (AtomLevel::Excited, AtomLevel::Ground) if b.n == a.n + m => self.coupling[a.n],
            (AtomLevel::Ground, AtomLevel::Excited) if a.n == b.n + m => self.coupling[b.n],
            _ => 0.0,
        }
    }

    /// Largest block spectral radius, `max_n (|V_n| + Ω_n)` in scaled units.
    pub fn max_block_frequency(&self) -> f64 {
        let m = self.m as usize;
        let mut max = 0.0f64;
        for (n, &w) in self.coupling.iter().enumerate() {
            let d1 = self.diag_plus[n];
            let d2 = self.diag_minus[n + m];
            let freq = 0.5 * (d1 + d2).abs() + (0.25 * (d1 - d2) * (d1 - d2) + w * w).sqrt();
            max = max.max(freq);
        }
        for &d in self.diag_minus.iter().take(m) {
            max = max.max(d.abs());
        }
        max
    }

    /// The conservative step-size guideline `0.01 / max frequency`.
    pub fn guideline_dt(&self) -> f64 {
        0.01 / self.max_block_frequency().max(1.0)
    }
}

/// Builds the scaled-time generator for a field truncation `n_max`; the
/// joint basis spans Fock levels `0..=n_max+m` in both atom sectors.
///
/// EHA: couplings `√h(n,m)` only. MEHA: additionally the Stark diagonal
/// `-(n β₁)/λ` on `|+,n⟩` and `-(n β₂)/λ` on `|−,n⟩`.
pub fn build_generator(config: &ModelConfig, n_max: usize) -> Result<HamiltonianMatrix> {
    let m = config.m as usize;
    if n_max < m {
        return Err(Error::DimensionMismatch(format!(
            "generator needs n_max >= m, got n_max = {n_max}, m = {m}"
        )));
    }
    let n_fock_max = n_max + m;
    let mut coupling = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // rising product, recomputed locally
        let mut hv = 1.0f64;
        for j in 1..=m {
            hv *= (n + j) as f64;
        }
        if !hv.is_finite() {
            return Err(Error::Overflow { n, m: config.m });
        }
        coupling.push(hv.sqrt());
    }
    let (mut diag_plus, mut diag_minus) = (vec![0.0; n_fock_max + 1], vec![0.0; n_fock_max + 1]);
    if config.approach == Approach::Meha {
        for l in 0..=n_fock_max {
            diag_plus[l] = -(l as f64) * config.beta1 / config.lambda;
            diag_minus[l] = -(l as f64) * config.beta2 / config.lambda;
        }
    }
    Ok(HamiltonianMatrix { n_fock_max, m: config.m, coupling, diag_plus, diag_minus })
}

fn flatten(state: &JointState) -> Vec<Complex64> {
    let m = state.config().m as usize;
    let n_max = state.n_max();
    let dim = 2 * (n_max + m + 1);
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for (n, &a) in state.g1().iter().enumerate() {
        psi[2 * n] = a;
    }
    for (j, &d) in state.dark().iter().enumerate() {
        psi[2 * j + 1] = d;
    }
    for (n, &b) in state.g2().iter().enumerate() {
        psi[2 * (n + m) + 1] = b;
    }
    psi
}

fn unflatten(psi: &[Complex64], time: f64, config: &ModelConfig) -> JointState {
    let m = config.m as usize;
    let n_max = psi.len() / 2 - 1 - m;
    let g1 = (0..=n_max).map(|n| psi[2 * n]).collect();
    let dark = (0..m).map(|j| psi[2 * j + 1]).collect();
    let g2 = (0..=n_max).map(|n| psi[2 * (n + m) + 1]).collect();
    JointState::from_parts(g1, g2, dark, time, config.clone())
}

/// The classical-RK4 one-step map for the constant block `[[d1, w], [w, d2]]`:
/// `R = I + A + A²/2 + A³/6 + A⁴/24` with `A = -i·dt·H`. Stepping with `R`
/// is the RK4 update written as the linear operator it is; precomputing it
/// once per block avoids re-deriving the four stages every step.
fn rk4_block_matrix(d1: f64, d2: f64, w: f64, dt: f64) -> [Complex64; 4] {
    let a = [
        Complex64::new(0.0, -dt * d1),
        Complex64::new(0.0, -dt * w),
        Complex64::new(0.0, -dt * w),
        Complex64::new(0.0, -dt * d2),
    ];
    let id = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE];
    // Horner form: R = I + A(I + A/2(I + A/3(I + A/4)))
    let mut r = id;
    for divisor in [4.0, 3.0, 2.0, 1.0] {
        let scaled = [a[0] / divisor, a[1] / divisor, a[2] / divisor, a[3] / divisor];
        r = [
            id[0] + scaled[0] * r[0] + scaled[1] * r[2],
            id[1] + scaled[0] * r[1] + scaled[1] * r[3],
            id[2] + scaled[2] * r[0] + scaled[3] * r[2],
            id[3] + scaled[2] * r[1] + scaled[3] * r[3],
        ];
    }
    r
}

/// Scalar analog of [`rk4_block_matrix`] for the 1×1 blocks.
fn rk4_scalar_factor(d: f64, dt: f64) -> Complex64 {
    let z = Complex64::new(0.0, -dt * d);
    let mut r = Complex64::ONE;
    for divisor in [4.0, 3.0, 2.0, 1.0] {
        r = Complex64::ONE + z / divisor * r;
    }
    r
}

/// Integrates `i d|ψ⟩/dT = H|ψ⟩` over a span of scaled time with fixed-step
/// classical RK4 (the step count is `ceil(span/dt)`, so the effective step
/// never exceeds `dt`). Errors if the accumulated norm drift exceeds
/// [`NORM_DRIFT_BUDGET`].
pub fn integrate(h: &HamiltonianMatrix, initial: &JointState, span: f64, dt: f64) -> Result<JointState> {
    let m = h.m as usize;
    if initial.config().m != h.m || initial.n_max() + m != h.n_fock_max {
        return Err(Error::DimensionMismatch(format!(
            "generator covers levels 0..={}, state needs 0..={}",
            h.n_fock_max,
            initial.n_max() + m,
        )));
    }
    if !(span.is_finite() && span >= 0.0) {
        return Err(Error::InvalidInput(format!("span must be finite and >= 0, got {span}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if span == 0.0 {
        return Ok(initial.clone());
    }
    let steps = (span / dt).ceil() as u64;
    let dt = span / steps as f64;

    let mut psi = flatten(initial);
    let norm0 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    // coupled blocks |+,n> <-> |-,n+m>
    for n in 0..=h.n_fock_max - m {
        let (ia, ib) = (2 * n, 2 * (n + m) + 1);
        let (mut a, mut b) = (psi[ia], psi[ib]);
        if a == Complex64::ZERO && b == Complex64::ZERO {
            continue; // a zero block stays exactly zero under the linear map
        }
        let r = rk4_block_matrix(h.diag_plus[n], h.diag_minus[n + m], h.coupling[n], dt);
        for _ in 0..steps {
            (a, b) = (r[0] * a + r[1] * b, r[2] * a + r[3] * b);
        }
        psi[ia] = a;
        psi[ib] = b;
    }
    // uncoupled |-, l<m> and |+, l > n_fock_max - m>
    for l in 0..m {
        let i = 2 * l + 1;
        let mut a = psi[i];
        if a == Complex64::ZERO {
            continue;
        }
        let r = rk4_scalar_factor(h.diag_minus[l], dt);
        for _ in 0..steps {
            a *= r;
        }
        psi[i] = a;
    }
    for l in h.n_fock_max - m + 1..=h.n_fock_max {
        let i = 2 * l;
        let mut a = psi[i];
        if a == Complex64::ZERO {
            continue;
        }
        let r = rk4_scalar_factor(h.diag_plus[l], dt);
        for _ in 0..steps {
            a *= r;
        }
        psi[i] = a;
    }

    let norm1 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let drift = (norm1 - norm0).abs();
    // an unstable step can blow the norm up to inf/NaN; both must fail
    if !(drift <= NORM_DRIFT_BUDGET) {
        return Err(Error::StepSize { drift, budget: NORM_DRIFT_BUDGET });
    }
    Ok(unflatten(&psi, initial.time() + span, initial.config()))
}

/// Largest componentwise modulus difference over `g1`, `g2` and the dark
/// components.
pub fn max_deviation(a: &JointState, b: &JointState) -> Result<f64> {
    if a.n_max() != b.n_max() || a.config().m != b.config().m {
        return Err(Error::DimensionMismatch(format!(
            "states span different bases: n_max {} vs {}, m {} vs {}",
            a.n_max(),
            b.n_max(),
            a.config().m,
            b.config().m,
        )));
    }
    let mut d = 0.0f64;
    for (x, y) in a.g1().iter().zip(b.g1()) {
        d = d.max((x - y).norm());
    }
    for (x, y) in a.g2().iter().zip(b.g2()) {
        d = d.max((x - y).norm());
    }
    for (x, y) in a.dark().iter().zip(b.dark()) {
        d = d.max((x - y).norm());
    }
    Ok(d)
}

/// Step size meeting a per-component deviation budget over `span`.
///
/// RK4 phase error accumulates as `span·ω⁵·dt⁴/120` per block of frequency
/// `ω`, weighted by the block amplitude, so each occupied block demands
/// `dt ≤ (120·ε / (span·ω⁵·amp))^{1/4}`; the result is also capped at
/// `0.2/ω_max` to keep the one-step expansion sane, and tightened until the
/// predicted total norm loss `½ Σ span·amp²·ω⁶·dt⁵/72` sits well below the
/// drift budget. Unoccupied blocks are exact and impose nothing.
pub fn suggest_dt(h: &HamiltonianMatrix, initial: &JointState, span: f64) -> f64 {
    let m = h.m as usize;
    let psi = flatten(initial);
    let span = span.max(1e-6);
    let mut blocks: Vec<(f64, f64)> = Vec::new();
    for n in 0..=h.n_fock_max - m {
        let amp2 = psi[2 * n].norm_sqr() + psi[2 * (n + m) + 1].norm_sqr();
        let (d1, d2, w) = (h.diag_plus[n], h.diag_minus[n + m], h.coupling[n]);
        let omega = 0.5 * (d1 + d2).abs() + (0.25 * (d1 - d2) * (d1 - d2) + w * w).sqrt();
        blocks.push((amp2, omega));
    }
    for l in 0..m {
        blocks.push((psi[2 * l + 1].norm_sqr(), h.diag_minus[l].abs()));
    }

    let mut dt = 0.05f64;
    for &(amp2, omega) in &blocks {
        if amp2 == 0.0 || omega == 0.0 {
            continue;
        }
        let bound =
            (120.0 * COMPONENT_ERROR_BUDGET / (span * omega.powi(5) * amp2.sqrt())).powf(0.25);
        dt = dt.min(bound).min(0.2 / omega);
    }
    let drift_target = NORM_DRIFT_BUDGET / 4.0;
    let predicted_drift = |dt: f64| {
        blocks
            .iter()
            .map(|&(amp2, omega)| 0.5 * span * amp2 * omega.powi(6) * dt.powi(5) / 72.0)
            .sum::<f64>()
    };
    let drift = predicted_drift(dt);
    if drift > drift_target {
        dt *= (drift_target / drift).powf(0.2);
    }
    dt.max(1e-9)
}

/// The standard closed-form-vs-integrated comparison grid.
pub mod grid {
    use super::*;
    use crate::dynamics::evolve;
    use crate::states::{
        coherent_state, default_n_max, k_photon_coherent_state, orthogonal_even_coherent_state,
        FieldState,
    };
    use rayon::prelude::*;
    use std::f64::consts::PI;

    /// Checkpoint times of the comparison.
    pub const CHECKPOINTS: [f64; 3] = [1.0, 5.0, 20.0];

    /// Acceptance budget on the componentwise deviation.
    pub const DEVIATION_BUDGET: f64 = 1e-6;

    /// One grid configuration with its measured deviations.
    #[derive(Debug, Clone)]
    pub struct GridCase {
        pub state: String,
        pub m: u32,
        pub theta: f64,
        pub phi: f64,
        pub approach: Approach,
        pub max_deviation: f64,
        pub norm_drift: f64,
        pub dt: f64,
    }

    /// Outcome of a full grid run.
    #[derive(Debug, Clone)]
    pub struct GridReport {
        pub cases: Vec<GridCase>,
        pub elapsed: Duration,
    }

    impl GridReport {
        pub fn max_deviation(&self) -> f64 {
            self.cases.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
        }

        pub fn max_norm_drift(&self) -> f64 {
            self.cases.iter().map(|c| c.norm_drift).fold(0.0, f64::max)
        }

        pub fn within_budget(&self) -> bool {
            self.max_deviation() <= DEVIATION_BUDGET
        }
    }

    fn states_for(m: u32) -> Result<Vec<FieldState>> {
        Ok(vec![
            coherent_state(1.0, default_n_max(1.0, m))?,
            coherent_state(3.0, default_n_max(9.0, m))?,
            coherent_state(5.0, default_n_max(25.0, m))?,
            orthogonal_even_coherent_state(7.0, default_n_max(49.0, m))?,
            k_photon_coherent_state(2.0, 3, 3 * (4.0f64 + 10.0 * 5.0f64.sqrt()).ceil() as usize + m as usize + 4)?,
        ])
    }

    /// Runs the full comparison grid; `dt_override` replaces the computed
    /// per-configuration step size (used to exercise the budget-violation
    /// path).
    pub fn run_default_grid(dt_override: Option<f64>) -> Result<GridReport> {
        let start = Instant::now();
        let mut configs = Vec::new();
        for m in [1u32, 3, 4] {
            for state in states_for(m)? {
                for theta in [0.0, PI / 4.0] {
                    for phi in [0.0, PI / 3.0] {
                        for approach in [Approach::Eha, Approach::Meha] {
                            configs.push((state.clone(), m, theta, phi, approach));
                        }
                    }
                }
            }
        }
        let cases: Vec<GridCase> = configs
            .par_iter()
            .map(|(state, m, theta, phi, approach)| -> Result<GridCase> {
                let atom = AtomState::new(*theta, *phi)?;
                let cfg = match approach {
                    Approach::Eha => ModelConfig::eha(*m)?,
                    Approach::Meha => ModelConfig::meha(*m, 0.5, 0.5, 1.0)?,
                };
                let h = build_generator(&cfg, state.n_max())?;
                let initial = JointState::initial(state, &atom, &cfg);
                let total: f64 = CHECKPOINTS[CHECKPOINTS.len() - 1];
                let dt = dt_override.unwrap_or_else(|| suggest_dt(&h, &initial, total));
                let mut current = initial;
                let mut worst = 0.0f64;
                for (k, &t) in CHECKPOINTS.iter().enumerate() {
                    let span = if k == 0 { t } else { t - CHECKPOINTS[k - 1] };
                    current = integrate(&h, &current, span, dt)?;
                    let closed = evolve(state, &atom, &cfg, t)?;
                    worst = worst.max(max_deviation(&closed, &current)?);
                }
                let norm_drift = (current.norm().sqrt() - 1.0).abs();
                Ok(GridCase {
                    state: state.label().to_string(),
                    m: *m,
                    theta: *theta,
                    phi: *phi,
                    approach: *approach,
                    max_deviation: worst,
                    norm_drift,
                    dt,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridReport { cases, elapsed: start.elapsed() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_eha, evolve_meha};
    use crate::states::{coherent_state, default_n_max};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn flat_index_round_trip() {
        for (atom, n, flat) in [
            (AtomLevel::Excited, 0usize, 0usize),
            (AtomLevel::Ground, 0, 1),
            (AtomLevel::Excited, 3, 6),
            (AtomLevel::Ground, 5, 11),
        ] {
            let idx = JointBasisIndex { atom, n };
            assert_eq!(idx.flat(), flat);
            assert_eq!(JointBasisIndex::from_flat(flat), idx);
        }
    }

    #[test]
    fn generator_elements_and_block_structure() {
        let cfg = ModelConfig::eha(1).unwrap();
        let h = build_generator(&cfg, 1).unwrap();
        // single-photon coupling <+,0|H|-,1> = 1
        assert_eq!(h.element(0, 3), 1.0);
        assert_eq!(h.element(3, 0), 1.0);
        for i in 0..h.dim() {
            assert_eq!(h.element(i, i), 0.0); // EHA has no diagonal
        }

        let cfg3 = ModelConfig::eha(3).unwrap();
        let h3 = build_generator(&cfg3, 8).unwrap();
        let from = JointBasisIndex { atom: AtomLevel::Excited, n: 1 }.flat();
        let to = JointBasisIndex { atom: AtomLevel::Ground, n: 4 }.flat();
        assert_abs_diff_eq!(h3.element(from, to), 24.0f64.sqrt(), epsilon = 1e-14);

        // symmetric, and zero outside the block pattern
        for i in 0..h3.dim() {
            for j in 0..h3.dim() {
                assert_eq!(h3.element(i, j), h3.element(j, i));
                if i != j && h3.element(i, j) != 0.0 {
                    let a = JointBasisIndex::from_flat(i.min(j));
                    let b = JointBasisIndex::from_flat(i.max(j));
                    assert_eq!(a.atom, AtomLevel::Excited);
                    assert_eq!(b.atom, AtomLevel::Ground);
                    assert_eq!(b.n, a.n + 3);
                }
            }
        }
    }

    #[test]
    fn meha_diagonal_sign_and_scale() {
        let cfg = ModelConfig::meha(2, 0.6, 0.4, 2.0).unwrap();
        let h = build_generator(&cfg, 6).unwrap();
        let plus3 = JointBasisIndex { atom: AtomLevel::Excited, n: 3 }.flat();
        let minus5 = JointBasisIndex { atom: AtomLevel::Ground, n: 5 }.flat();
        assert_abs_diff_eq!(h.element(plus3, plus3), -3.0 * 0.6 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.element(minus5, minus5), -5.0 * 0.4 / 2.0, epsilon = 1e-15);

        let eha = build_generator(&ModelConfig::eha(2).unwrap(), 6).unwrap();
        for i in 0..eha.dim() {
            assert_eq!(eha.element(i, i), 0.0);
        }
    }

    #[test]
    fn zero_span_returns_initial() {
        let field = coherent_state(1.0, 20).unwrap();
        let atom = AtomState::excited();
        let cfg = ModelConfig::eha(1).unwrap();
        let h = build_generator(&cfg, 20).unwrap();
        let initial = JointState::initial(&field, &atom, &cfg);
        let out = integrate(&h, &initial, 0.0, 0.01).unwrap();
        assert_eq!(max_deviation(&initial, &out).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_rabi_half_cycle_integrated() {
        let field = coherent_state(0.0, 2).unwrap();
        let atom = AtomState::excited();
        let cfg = ModelConfig::eha(1).unwrap();
        let h = build_generator(&cfg, 2).unwrap();
        let initial = JointState::initial(&field, &atom, &cfg);
        let out = integrate(&h, &initial, FRAC_PI_2, 1e-4).unwrap();
        assert!((out.g2()[0] - num_complex::Complex64::new(0.0, -1.0)).norm() < 1e-8);
        assert!(out.g1()[0].norm() < 1e-8);
    }

    #[test]
    fn defining_comparison_against_closed_form() {
        let field = coherent_state(3.0, default_n_max(9.0, 3)).unwrap();
        let atom = AtomState::new(PI / 4.0, PI / 3.0).unwrap();
        let cfg = ModelConfig::eha(3).unwrap();
        let h = build_generator(&cfg, field.n_max()).unwrap();
        let initial = JointState::initial(&field, &atom, &cfg);
        let dt = suggest_dt(&h, &initial, 10.0);
        let integrated = integrate(&h, &initial, 10.0, dt).unwrap();
        let closed = evolve_eha(&field, &atom, &cfg, 10.0).unwrap();
        let dev = max_deviation(&closed, &integrated).unwrap();
        assert!(dev <= 1e-6, "deviation {dev} with dt {dt}");
    }

    #[test]
    fn meha_comparison_with_lambda() {
        let field = coherent_state(2.0, default_n_max(4.0, 2)).unwrap();
        let atom = AtomState::new(0.9, 2.1).unwrap();
        let cfg = ModelConfig::meha(2, 0.5, 0.25, 2.0).unwrap();
        let h = build_generator(&cfg, field.n_max()).unwrap();
        let initial = JointState::initial(&field, &atom, &cfg);
        let dt = suggest_dt(&h, &initial, 6.0);
        let integrated = integrate(&h, &initial, 6.0, dt).unwrap();
        let closed = evolve_meha(&field, &atom, &cfg, 6.0).unwrap();
        assert!(max_deviation(&closed, &integrated).unwrap() <= 1e-6);
    }

    #[test]
    fn coarse_step_trips_norm_budget() {
        let field = coherent_state(5.0, default_n_max(25.0, 3)).unwrap();
        let atom = AtomState::excited();
        let cfg = ModelConfig::eha(3).unwrap();
        let h = build_generator(&cfg, field.n_max()).unwrap();
        let initial = JointState::initial(&field, &atom, &cfg);
        let err = integrate(&h, &initial, 20.0, 0.05).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }), "got {err:?}");
    }

    #[test]
    fn deviation_detects_perturbation() {
        let field = coherent_state(1.0, 20).unwrap();
        let atom = AtomState::excited();
        let cfg = ModelConfig::eha(1).unwrap();
        let a = JointState::initial(&field, &atom, &cfg);
        assert_eq!(max_deviation(&a, &a).unwrap(), 0.0);
        let mut g1 = a.g1().to_vec();
        g1[3] += num_complex::Complex64::new(1e-3, 0.0);
        let b = JointState::from_parts(g1, a.g2().to_vec(), a.dark().to_vec(), 0.0, a.config().clone());
        assert_abs_diff_eq!(max_deviation(&a, &b).unwrap(), 1e-3, epsilon = 1e-15);

        let other = JointState::initial(&coherent_state(1.0, 22).unwrap(), &atom, &cfg);
        assert!(max_deviation(&a, &other).is_err());
    }

    #[test]
    fn generator_requires_enough_levels() {
        let cfg = ModelConfig::eha(4).unwrap();
        assert!(build_generator(&cfg, 3).is_err());
        assert!(build_generator(&cfg, 4).is_ok());
    }
}
