//! Initial field and atom states.
//!
//! Field states live on a truncated Fock grid with real amplitudes `C_n`.
//! Every constructor builds the amplitudes by multiplicative recurrences
//! (no factorials), verifies the truncation tail against a 1e-14 budget,
//! and renormalizes, so `Σ C_n² = 1` holds to machine precision afterwards.

use crate::error::Error;
use crate::Result;

/// Mass allowed beyond the truncation edge before construction fails.
pub const TAIL_BUDGET: f64 = 1e-14;

/// Occupancy allowed at the topmost retained level.
pub const EDGE_BUDGET: f64 = 1e-14;

/// A pure field state with real Fock amplitudes `C_n`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<f64>,
    label: String,
}

/// Parity branch of a coherent-state cat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

impl FieldState {
    /// Checks the tail/edge budgets for amplitudes whose untruncated norm is
    /// exactly 1 by construction, then renormalizes.
    fn finish(mut amplitudes: Vec<f64>, label: String) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite amplitude in {label}")));
        }
        let n_max = amplitudes.len() - 1;
        let edge = amplitudes[n_max] * amplitudes[n_max];
        if edge >= EDGE_BUDGET {
            return Err(Error::Truncation { n_max, tail: edge, budget: EDGE_BUDGET });
        }
        let sum = kahan_sum(amplitudes.iter().map(|a| a * a));
        let tail = (1.0 - sum).max(0.0);
        if tail > TAIL_BUDGET {
            return Err(Error::Truncation { n_max, tail, budget: TAIL_BUDGET });
        }
        let norm = sum.sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes, label })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Amplitude at level `n`, zero beyond the truncation edge.
    pub fn amp(&self, n: usize) -> f64 {
        self.amplitudes.get(n).copied().unwrap_or(0.0)
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `P(n) = C_n²`.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    /// `⟨n̂(0)⟩ = Σ n C_n²`.
    pub fn mean_photon(&self) -> f64 {
        kahan_sum(self.amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a * a))
    }

    /// True when both `max |C_n C_{n+1}|` and `max |C_n C_{n+2}|` fall below
    /// `tolerance`, i.e. the support spacing is at least 3 and the first and
    /// second field moments vanish identically under one-photon evolution
    /// from the excited atom.
    pub fn natural_phenomenon_class(&self, tolerance: f64) -> bool {
        for shift in [1usize, 2] {
            for n in 0..self.amplitudes.len().saturating_sub(shift) {
                if (self.amplitudes[n] * self.amplitudes[n + shift]).abs() > tolerance {
                    return false;
                }
            }
        }
        true
    }

    /// Minimum gap between consecutive occupied levels, if at least two
    /// levels carry more than negligible population.
    pub fn support_spacing(&self) -> Option<usize> {
        let occupied: Vec<usize> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|&(_, a)| a * a > 1e-20)
            .map(|(n, _)| n)
            .collect();
        occupied.windows(2).map(|w| w[1] - w[0]).min()
    }
}

/// Default truncation: `ceil(⟨n⟩ + 10√(⟨n⟩+1)) + m + 4`. The `+m+4` headroom
/// keeps shifted-index moment sums inside the grid.
pub fn default_n_max(mean_n: f64, m: u32) -> usize {
    (mean_n + 10.0 * (mean_n + 1.0).sqrt()).ceil() as usize + m as usize + 4
}

/// Glauber coherent state, `C_{n+1} = C_n · α/√(n+1)` from `C_0 = e^{-α²/2}`.
pub fn coherent_state(alpha: f64, n_max: usize) -> Result<FieldState> {
    check_alpha(alpha)?;
    let mut c = vec![0.0; n_max + 1];
    c[0] = (-alpha * alpha / 2.0).exp();
    for n in 0..n_max {
        c[n + 1] = c[n] * alpha / ((n + 1) as f64).sqrt();
    }
    FieldState::finish(c, format!("coherent(alpha={alpha})"))
}

/// Coherent amplitudes re-indexed onto the `|kn⟩` ladder: the j-th coherent
/// amplitude sits at Fock level `k·j`, all other levels are empty. The state
/// is returned on the plain Fock grid so the dynamics treat it uniformly.
pub fn k_photon_coherent_state(alpha: f64, k: u32, n_max: usize) -> Result<FieldState> {
    check_alpha(alpha)?;
    if k == 0 {
        return Err(Error::InvalidState("k-photon ladder needs k >= 1".into()));
    }
    let k = k as usize;
    let mut c = vec![0.0; n_max + 1];
    let mut a = (-alpha * alpha / 2.0).exp();
    let mut j = 0usize;
    while k * j <= n_max {
        c[k * j] = a;
        a *= alpha / ((j + 1) as f64).sqrt();
        j += 1;
    }
    // the tail check must see the next occupied amplitude, not an empty level
    let tail_next = a * a;
    if tail_next >= EDGE_BUDGET {
        return Err(Error::Truncation { n_max, tail: tail_next, budget: EDGE_BUDGET });
    }
    FieldState::finish(c, format!("{k}-photon coherent(alpha={alpha})"))
}

/// Orthogonal-even coherent state: `C_{2n} = B α^{2n}/√((2n)!) [1+(-1)^n]`
/// with `B = [2 cosh α² + 2 cos α²]^{-1/2}` — net support on levels 0, 4, 8, …
pub fn orthogonal_even_coherent_state(alpha: f64, n_max: usize) -> Result<FieldState> {
    check_alpha(alpha)?;
    let x = alpha * alpha;
    let b = 1.0 / (2.0 * x.cosh() + 2.0 * x.cos()).sqrt();
    if !b.is_finite() {
        return Err(Error::InvalidState(format!(
            "normalization constant not representable at alpha = {alpha}"
        )));
    }
    let mut c = vec![0.0; n_max + 1];
    let mut r = 2.0 * b;
    let mut lvl = 0usize;
    while lvl <= n_max {
        c[lvl] = r;
        let l = lvl as f64;
        r *= alpha.powi(4) / ((l + 1.0) * (l + 2.0) * (l + 3.0) * (l + 4.0)).sqrt();
        lvl += 4;
    }
    if r * r >= EDGE_BUDGET {
        return Err(Error::Truncation { n_max, tail: r * r, budget: EDGE_BUDGET });
    }
    FieldState::finish(c, format!("orthogonal-even(alpha={alpha})"))
}

/// Even or odd coherent-state cat: Poisson amplitudes restricted to one
/// parity and renormalized (`cosh`/`sinh` closed-form normalizers).
pub fn parity_coherent_state(alpha: f64, parity: Parity, n_max: usize) -> Result<FieldState> {
    check_alpha(alpha)?;
    let x = alpha * alpha;
    let (norm, start) = match parity {
        Parity::Even => (x.cosh(), 0usize),
        Parity::Odd => {
            if alpha == 0.0 {
                return Err(Error::InvalidState("odd cat of alpha = 0 is empty".into()));
            }
            (x.sinh(), 1usize)
        }
    };
    if !norm.is_finite() {
        return Err(Error::InvalidState(format!(
            "normalization constant not representable at alpha = {alpha}"
        )));
    }
    if n_max < start {
        return Err(Error::Truncation { n_max, tail: 1.0, budget: TAIL_BUDGET });
    }
    let mut c = vec![0.0; n_max + 1];
    let mut a = if start == 1 { alpha } else { 1.0 } / norm.sqrt();
    let mut lvl = start;
    while lvl <= n_max {
        c[lvl] = a;
        let l = lvl as f64;
        a *= alpha * alpha / ((l + 1.0) * (l + 2.0)).sqrt();
        lvl += 2;
    }
    if a * a >= EDGE_BUDGET {
        return Err(Error::Truncation { n_max, tail: a * a, budget: EDGE_BUDGET });
    }
    let tag = match parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    FieldState::finish(c, format!("{tag}-cat(alpha={alpha})"))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidState(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

/// Atom superposition `cos θ |+⟩ + e^{-iφ} sin θ |−⟩`, canonicalized to
/// `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)` using the global-phase equivalences
/// `(2π−θ, φ) ≡ (θ, φ+π)` and `(π−θ, φ) ≡ (θ, φ+π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    theta: f64,
    phi: f64,
}

impl AtomState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidState("atom angles must be finite".into()));
        }
        use std::f64::consts::{FRAC_PI_2, PI, TAU};
        let mut th = theta.rem_euclid(TAU);
        let mut ph = phi;
        if th > PI {
            th = TAU - th;
            ph += PI;
        }
        if th > FRAC_PI_2 {
            th = PI - th;
            ph += PI;
        }
        Ok(Self { theta: th, phi: ph.rem_euclid(TAU) })
    }

    /// Excited atom, `θ = 0`.
    pub fn excited() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_is_trivial() {
        let s = coherent_state(0.0, 4).unwrap();
        assert_eq!(s.amp(0), 1.0);
        assert!(s.amplitudes()[1..].iter().all(|&a| a == 0.0));
        assert_eq!(s.mean_photon(), 0.0);
        assert_eq!(s.photon_distribution()[0], 1.0);
    }

    #[test]
    fn coherent_alpha_one_amplitudes() {
        let s = coherent_state(1.0, default_n_max(1.0, 1)).unwrap();
        // e^{-1/2} for both C_0 and C_1
        assert_abs_diff_eq!(s.amp(0), 0.6065306597126334, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amp(1), 0.6065306597126334, epsilon = 1e-12);
        assert_abs_diff_eq!(s.photon_distribution()[0], (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn coherent_alpha_five_mean() {
        let s = coherent_state(5.0, default_n_max(25.0, 1)).unwrap();
        assert_abs_diff_eq!(s.mean_photon(), 25.0, epsilon = 1e-10);
    }

    #[test]
    fn coherent_truncation_rejected_when_too_small() {
        let err = coherent_state(5.0, 30).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn k_photon_degenerates_to_coherent_at_k_one() {
        let a = k_photon_coherent_state(1.0, 1, 20).unwrap();
        let b = coherent_state(1.0, 20).unwrap();
        for n in 0..=20 {
            assert_abs_diff_eq!(a.amp(n), b.amp(n), epsilon = 1e-15);
        }
    }

    #[test]
    fn k_photon_selection_and_spacing() {
        let s = k_photon_coherent_state(1.0, 3, 60).unwrap();
        for n in 0..=60 {
            if n % 3 != 0 {
                assert_eq!(s.amp(n), 0.0);
            }
        }
        let s2 = k_photon_coherent_state(2.0, 3, 86).unwrap();
        for n in 0..86 {
            assert_eq!(s2.amp(n) * s2.amp(n + 1), 0.0);
            if n + 2 <= 86 {
                assert_eq!(s2.amp(n) * s2.amp(n + 2), 0.0);
            }
        }
        assert!(s2.natural_phenomenon_class(1e-12));
        assert_eq!(s2.support_spacing(), Some(3));
    }

    #[test]
    fn orthogonal_even_frozen_amplitudes() {
        // oracle: direct evaluation of B and B·α^{2n}/√((2n)!)·[1+(-1)^n]
        let s = orthogonal_even_coherent_state(1.0, default_n_max(1.0, 1)).unwrap();
        assert_abs_diff_eq!(s.amp(0), 0.9797842321028611, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amp(4), 0.1999976188897210, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amp(8), 0.0048794422716003, epsilon = 1e-12);
        assert_eq!(s.amp(2), 0.0);
        assert_eq!(s.amp(6), 0.0);
        let sum: f64 = s.photon_distribution().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        // closed form x(sinh x - sin x)/(cosh x + cos x) at x = 1
        assert_abs_diff_eq!(s.mean_photon(), 0.1601866859514727, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_even_alpha_seven_class_and_spacing() {
        let s = orthogonal_even_coherent_state(7.0, default_n_max(49.0, 1)).unwrap();
        assert!(s.natural_phenomenon_class(1e-12));
        assert_eq!(s.support_spacing(), Some(4));
        assert_abs_diff_eq!(s.mean_photon(), 49.0, epsilon = 1e-9);
        for n in 0..s.n_max() {
            assert_eq!(s.amp(n) * s.amp(n + 1), 0.0);
        }
    }

    #[test]
    fn parity_cats_frozen_amplitudes() {
        let even = parity_coherent_state(1.0, Parity::Even, 24).unwrap();
        // 1/sqrt(cosh 1) and its /sqrt(2) neighbor
        assert_abs_diff_eq!(even.amp(0), 0.8050181821945921, epsilon = 1e-12);
        assert_abs_diff_eq!(even.amp(2), 0.5692338156082636, epsilon = 1e-12);
        assert_eq!(even.amp(1), 0.0);

        let odd = parity_coherent_state(1.0, Parity::Odd, 25).unwrap();
        assert_abs_diff_eq!(odd.amp(1), 0.9224522362915716, epsilon = 1e-12);
        assert_abs_diff_eq!(odd.amp(3), 0.3765895485006016, epsilon = 1e-12);
        assert_eq!(odd.amp(0), 0.0);
    }

    #[test]
    fn even_cat_of_vacuum_is_vacuum() {
        let s = parity_coherent_state(0.0, Parity::Even, 4).unwrap();
        assert_eq!(s.amp(0), 1.0);
    }

    #[test]
    fn odd_cat_of_vacuum_rejected() {
        assert!(matches!(
            parity_coherent_state(0.0, Parity::Odd, 4),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn coherent_adjacent_support_fails_class() {
        let s = coherent_state(1.0, 20).unwrap();
        assert!(!s.natural_phenomenon_class(1e-12));
    }

    #[test]
    fn truncation_edge_is_small_for_policy_sizes() {
        for (alpha, m) in [(1.0, 1u32), (5.0, 3), (7.0, 4)] {
            let s = coherent_state(alpha, default_n_max(alpha * alpha, m)).unwrap();
            let p = s.photon_distribution();
            assert!(p[s.n_max()] < 1e-14);
        }
    }

    #[test]
    fn atom_canonicalization_ranges() {
        let a = AtomState::new(0.75 * PI, 0.3).unwrap();
        assert_abs_diff_eq!(a.theta(), 0.25 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(a.phi(), 0.3 + PI, epsilon = 1e-12);

        let b = AtomState::new(-0.2, 7.0).unwrap();
        assert!(b.theta() >= 0.0 && b.theta() <= PI / 2.0);
        assert!(b.phi() >= 0.0 && b.phi() < 2.0 * PI);

        let c = AtomState::new(1.2 * PI, 0.5).unwrap();
        assert_abs_diff_eq!(c.theta(), 0.2 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(c.phi(), 0.5, epsilon = 1e-12);
    }
}
