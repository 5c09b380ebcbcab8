//! Measurable quantities: field moments, atomic inversion, quadrature and
//! amplitude-squared fluctuation factors, the rescaled factors that mirror
//! the one-photon atomic inversion, analytic predictors, and closed-form
//! cross-check paths.
//!
//! All fluctuation factors go through the one general moment engine; the
//! closed forms ([`reference_a_a2_m1`], [`reference_a2_strong`],
//! [`reference_f2_threephoton`]) are independent validation paths only.

mod revival;
mod series;

pub use revival::RevivalDetector;
pub use series::{sweep, Observable, TimeSeries};

use num_complex::Complex64;

use crate::dynamics::{evolve_eha, h, JointState, ModelConfig};
use crate::error::Error;
use crate::states::{AtomState, FieldState};
use crate::Result;

/// Which quadrature pair a fluctuation factor refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluctuationOrder {
    /// Quadratures of the field amplitude.
    Normal,
    /// Quadratures of the squared field amplitude.
    AmplitudeSquared,
}

/// X- and Y-quadrature fluctuation factors of one order.
///
/// `f = 2⟨(ΔX̂)²⟩ − ½` and `s = 2⟨(ΔŶ)²⟩ − ½` for the normal order;
/// `f = 8⟨(ΔX̂₂)²⟩ − (2⟨n̂⟩+1)`, `s` likewise for the amplitude-squared
/// order. Negative values signal squeezing; the hard floor is the vacuum
/// term itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationPair {
    pub f: f64,
    pub s: f64,
    pub order: FluctuationOrder,
}

/// Moment mass allowed in the top `max(s1,s2)` levels before the shifted
/// sums are considered unsupported by the truncation.
const HEADROOM_BUDGET: f64 = 1e-12;

fn sector_moment(amps: &[Complex64], s1: u32, s2: u32) -> Complex64 {
    let shift = s1.max(s2) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    if amps.len() <= shift {
        return acc;
    }
    for j in 0..amps.len() - shift {
        let fac = (h(j, s1) * h(j, s2)).sqrt();
        acc += amps[j + s2 as usize].conj() * amps[j + s1 as usize] * fac;
    }
    acc
}

/// Excited- and ground-sector field amplitudes on the full level grid
/// `0..=n_max+m`. The ground sector splices the dark components below the
/// `|−, n+m⟩` ladder.
fn sectors(joint: &JointState) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = joint.config().m as usize;
    let n_max = joint.n_max();
    let len = n_max + m + 1;
    let mut exc = vec![Complex64::new(0.0, 0.0); len];
    let mut gnd = vec![Complex64::new(0.0, 0.0); len];
    exc[..=n_max].copy_from_slice(joint.g1());
    gnd[..m].copy_from_slice(joint.dark());
    gnd[m..].copy_from_slice(joint.g2());
    (exc, gnd)
}

/// General moment `⟨â^{†s2}(T) â^{s1}(T)⟩`, as a ladder sum over both atom
/// sectors with the factorial ratios rewritten as rising products.
pub fn moment(joint: &JointState, s1: u32, s2: u32) -> Result<Complex64> {
    let shift = s1.max(s2) as usize;
    let n_max = joint.n_max();
    if shift > n_max {
        return Err(Error::Headroom { needed: shift, n_max });
    }
    if shift > 0 {
        // the shifted sums silently drop the top `shift` levels; make sure
        // nothing lives there
        let mut top = 0.0;
        for n in n_max + 1 - shift..=n_max {
            top += joint.g1()[n].norm_sqr() + joint.g2()[n].norm_sqr();
        }
        if top > HEADROOM_BUDGET {
            return Err(Error::Headroom { needed: shift, n_max });
        }
    }
    let (exc, gnd) = sectors(joint);
    Ok(sector_moment(&exc, s1, s2) + sector_moment(&gnd, s1, s2))
}

/// Atomic inversion `⟨σ̂z(T)⟩ = Σ(|g1|² − |g2|²) − Σ|dark|²`.
pub fn atomic_inversion(joint: &JointState) -> f64 {
    let mut s = 0.0;
    for (a, b) in joint.g1().iter().zip(joint.g2()) {
        s += a.norm_sqr() - b.norm_sqr();
    }
    for d in joint.dark() {
        s -= d.norm_sqr();
    }
    s
}

/// Mean photon number `⟨â†(T)â(T)⟩`.
pub fn mean_photon_at(joint: &JointState) -> Result<f64> {
    Ok(moment(joint, 1, 1)?.re)
}

/// Normal fluctuation factors
/// `F₁ = ⟨â†â⟩ + Re⟨â²⟩ − 2(Re⟨â⟩)²`, `S₁ = ⟨â†â⟩ − Re⟨â²⟩ − 2(Im⟨â⟩)²`.
pub fn normal_fluctuations(joint: &JointState) -> Result<FluctuationPair> {
    let a = moment(joint, 1, 0)?;
    let a2 = moment(joint, 2, 0)?;
    let n = moment(joint, 1, 1)?.re;
    Ok(FluctuationPair {
        f: n + a2.re - 2.0 * a.re * a.re,
        s: n - a2.re - 2.0 * a.im * a.im,
        order: FluctuationOrder::Normal,
    })
}

/// Amplitude-squared fluctuation factors
/// `F₂ = ⟨â†²â²⟩ + Re⟨â⁴⟩ − 2(Re⟨â²⟩)²`, `S₂ = ⟨â†²â²⟩ − Re⟨â⁴⟩ − 2(Im⟨â²⟩)²`.
pub fn squared_fluctuations(joint: &JointState) -> Result<FluctuationPair> {
    let a2 = moment(joint, 2, 0)?;
    let a4 = moment(joint, 4, 0)?;
    let n22 = moment(joint, 2, 2)?.re;
    Ok(FluctuationPair {
        f: n22 + a4.re - 2.0 * a2.re * a2.re,
        s: n22 - a4.re - 2.0 * a2.im * a2.im,
        order: FluctuationOrder::AmplitudeSquared,
    })
}

/// Quadrature variances `(⟨(ΔX̂)²⟩, ⟨(ΔŶ)²⟩)` recovered from the factors.
pub fn quadrature_variances(pair: &FluctuationPair, mean_n: f64) -> (f64, f64) {
    match pair.order {
        FluctuationOrder::Normal => ((pair.f + 0.5) / 2.0, (pair.s + 0.5) / 2.0),
        FluctuationOrder::AmplitudeSquared => {
            let vac = 2.0 * mean_n + 1.0;
            ((pair.f + vac) / 8.0, (pair.s + vac) / 8.0)
        }
    }
}

/// Rescaled cubic-transition factor `Q₁(T) = [S₁(⅔T)|_{m=3} − ⟨n̂(0)⟩]/⟨n̂(0)⟩`,
/// which mirrors the one-photon atomic inversion at time `T`.
pub fn rescaled_q1(field: &FieldState, atom: &AtomState, t: f64) -> Result<f64> {
    let nbar = field.mean_photon();
    if nbar == 0.0 {
        return Err(Error::ZeroMeanPhoton);
    }
    let cfg = ModelConfig::eha(3)?;
    let joint = evolve_eha(field, atom, &cfg, 2.0 / 3.0 * t)?;
    let pair = normal_fluctuations(&joint)?;
    Ok((pair.s - nbar) / nbar)
}

/// Amplitude-squared analog `Q₂(T) = [S₂(⅓T)|_{m=3} − ⟨n̂(0)⟩²]/⟨n̂(0)⟩²`.
pub fn rescaled_q2(field: &FieldState, atom: &AtomState, t: f64) -> Result<f64> {
    let nbar = field.mean_photon();
    if nbar == 0.0 {
        return Err(Error::ZeroMeanPhoton);
    }
    let cfg = ModelConfig::eha(3)?;
    let joint = evolve_eha(field, atom, &cfg, t / 3.0)?;
    let pair = squared_fluctuations(&joint)?;
    Ok((pair.s - nbar * nbar) / (nbar * nbar))
}

/// Exact phase-matching revival time `T_R = π/(√(n̄+s) − √n̄)`;
/// asymptotically `(2π/s)√n̄`.
pub fn revival_time(n_mean: f64, spacing: u32) -> f64 {
    debug_assert!(n_mean > 0.0 && spacing > 0);
    std::f64::consts::PI / ((n_mean + spacing as f64).sqrt() - n_mean.sqrt())
}

/// Exact proportionality factor `f(n) = [√h(n+2,m) − √h(n,m)]/(2√(n+1))`
/// between the squared-amplitude and inversion phase arguments.
pub fn f_normal_exact(n: usize, m: u32) -> f64 {
    (h(n + 2, m).sqrt() - h(n, m).sqrt()) / (2.0 * ((n + 1) as f64).sqrt())
}

/// Strong-intensity limit of the proportionality factor:
/// `(m/2)·n^{(m-3)/2}` for the normal order, twice that for the
/// amplitude-squared order.
pub fn f_asymptotic(n: usize, m: u32, order: FluctuationOrder) -> f64 {
    let base = (m as f64 / 2.0) * (n as f64).powf((m as f64 - 3.0) / 2.0);
    match order {
        FluctuationOrder::Normal => base,
        FluctuationOrder::AmplitudeSquared => 2.0 * base,
    }
}

/// Termwise L1 mismatch `Σ_n |P(n) − P(n+m)|`; small exactly when the
/// photon distribution nearly matches its m-shifted self, the coherent
/// trapping condition.
pub fn trapping_defect(state: &FieldState, m: u32) -> f64 {
    let p = state.photon_distribution();
    let m = m as usize;
    let mut acc = 0.0;
    for n in 0..p.len() {
        let shifted = if n + m < p.len() { p[n + m] } else { 0.0 };
        acc += (p[n] - shifted).abs();
    }
    acc
}

/// Direct closed-form `(⟨â(T)⟩, ⟨â²(T)⟩)` for one-photon evolution from the
/// excited atom — an independent code path from [`moment`].
pub fn reference_a_a2_m1(field: &FieldState, t: f64) -> (Complex64, Complex64) {
    let c = field.amplitudes();
    let n_max = field.n_max();
    let mut a = 0.0;
    let mut a2 = 0.0;
    for n in 0..n_max {
        let nf = n as f64;
        let w0 = (nf + 1.0).sqrt();
        let w1 = (nf + 2.0).sqrt();
        a += c[n]
            * c[n + 1]
            * w0
            * ((t * w0).cos() * (t * w1).cos()
                + ((nf + 2.0) / (nf + 1.0)).sqrt() * (t * w0).sin() * (t * w1).sin());
        if n + 2 <= n_max {
            let w2 = (nf + 3.0).sqrt();
            a2 += c[n]
                * c[n + 2]
                * ((nf + 1.0) * (nf + 2.0)).sqrt()
                * ((t * w0).cos() * (t * w2).cos()
                    + ((nf + 3.0) / (nf + 1.0)).sqrt() * (t * w0).sin() * (t * w2).sin());
        }
    }
    (Complex64::new(a, 0.0), Complex64::new(a2, 0.0))
}

/// Strong-intensity form of `⟨â²(T)⟩` for m-photon evolution from the
/// excited atom: `⟨n̂(0)⟩ Σ P(n) cos[T(√h(n+2,m) − √h(n,m))]`.
pub fn reference_a2_strong(field: &FieldState, m: u32, t: f64) -> f64 {
    let p = field.photon_distribution();
    let nbar = field.mean_photon();
    let mut acc = 0.0;
    for (n, pn) in p.iter().enumerate() {
        if *pn == 0.0 {
            continue;
        }
        acc += pn * (t * (h(n + 2, m).sqrt() - h(n, m).sqrt())).cos();
    }
    nbar * acc
}

/// Strong-intensity amplitude-squared factor for a 3-photon coherent state
/// under one-photon evolution from the excited atom:
/// `F₂(T) ≃ ⟨n̂(0)⟩² − ⟨n̂(0)⟩ Σ P(j) cos(2T√(3j+4))`, with `P(j)` the
/// occupied-ladder distribution.
pub fn reference_f2_threephoton(field: &FieldState, t: f64) -> Result<f64> {
    let p = field.photon_distribution();
    for (n, pn) in p.iter().enumerate() {
        if n % 3 != 0 && *pn > 1e-20 {
            return Err(Error::InvalidState(
                "reference_f2_threephoton needs support on the 3-photon ladder only".into(),
            ));
        }
    }
    let nbar = field.mean_photon();
    let mut acc = 0.0;
    let mut j = 0usize;
    while 3 * j < p.len() {
        let pj = p[3 * j];
        if pj != 0.0 {
            acc += pj * (2.0 * t * (3.0 * j as f64 + 4.0).sqrt()).cos();
        }
        j += 1;
    }
    Ok(nbar * nbar - nbar * acc)
}
