//! Named observables evaluated on a uniform time grid.

use rayon::prelude::*;

use crate::dynamics::{evolve, JointState, ModelConfig};
use crate::error::Error;
use crate::states::{AtomState, FieldState};
use crate::Result;

use super::{
    atomic_inversion, moment, normal_fluctuations, quadrature_variances, rescaled_q1, rescaled_q2,
    squared_fluctuations,
};

/// The registered observable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Inversion,
    MeanPhoton,
    F1,
    S1,
    F2,
    S2,
    Q1,
    Q2,
    ReA,
    ImA,
    ReA2,
    ImA2,
    UncertaintyProduct,
}

impl Observable {
    pub const ALL: [Observable; 13] = [
        Observable::Inversion,
        Observable::MeanPhoton,
        Observable::F1,
        Observable::S1,
        Observable::F2,
        Observable::S2,
        Observable::Q1,
        Observable::Q2,
        Observable::ReA,
        Observable::ImA,
        Observable::ReA2,
        Observable::ImA2,
        Observable::UncertaintyProduct,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Observable::Inversion => "inversion",
            Observable::MeanPhoton => "mean_photon",
            Observable::F1 => "F1",
            Observable::S1 => "S1",
            Observable::F2 => "F2",
            Observable::S2 => "S2",
            Observable::Q1 => "Q1",
            Observable::Q2 => "Q2",
            Observable::ReA => "Re_a",
            Observable::ImA => "Im_a",
            Observable::ReA2 => "Re_a2",
            Observable::ImA2 => "Im_a2",
            Observable::UncertaintyProduct => "uncertainty_product",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

}

/// A uniform time grid with named observable columns and a configuration
/// echo sufficient to reproduce the run.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    t: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
    metadata: Vec<(String, String)>,
}

impl TimeSeries {
    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn push_metadata(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }
}

struct PointEval<'a> {
    field: &'a FieldState,
    atom: &'a AtomState,
    config: &'a ModelConfig,
    t: f64,
    joint: Option<JointState>,
}

impl<'a> PointEval<'a> {
    fn joint(&mut self) -> Result<&JointState> {
        if self.joint.is_none() {
            self.joint = Some(evolve(self.field, self.atom, self.config, self.t)?);
        }
        Ok(self.joint.as_ref().expect("just set"))
    }

    fn value(&mut self, obs: Observable) -> Result<f64> {
        match obs {
            Observable::Q1 => rescaled_q1(self.field, self.atom, self.t),
            Observable::Q2 => rescaled_q2(self.field, self.atom, self.t),
            Observable::Inversion => Ok(atomic_inversion(self.joint()?)),
            Observable::MeanPhoton => Ok(moment(self.joint()?, 1, 1)?.re),
            Observable::F1 => Ok(normal_fluctuations(self.joint()?)?.f),
            Observable::S1 => Ok(normal_fluctuations(self.joint()?)?.s),
            Observable::F2 => Ok(squared_fluctuations(self.joint()?)?.f),
            Observable::S2 => Ok(squared_fluctuations(self.joint()?)?.s),
            Observable::ReA => Ok(moment(self.joint()?, 1, 0)?.re),
            Observable::ImA => Ok(moment(self.joint()?, 1, 0)?.im),
            Observable::ReA2 => Ok(moment(self.joint()?, 2, 0)?.re),
            Observable::ImA2 => Ok(moment(self.joint()?, 2, 0)?.im),
            Observable::UncertaintyProduct => {
                let joint = self.joint()?;
                let pair = normal_fluctuations(joint)?;
                let n = moment(joint, 1, 1)?.re;
                let (vx, vy) = quadrature_variances(&pair, n);
                Ok(vx * vy)
            }
        }
    }
}

/// Evaluates the requested observables on `steps` uniform points of
/// `[0, t_max]`. Grid points are independent and evaluated in parallel;
/// column assembly is ordered, so the output is deterministic.
pub fn sweep(
    field: &FieldState,
    atom: &AtomState,
    config: &ModelConfig,
    t_max: f64,
    steps: usize,
    observables: &[Observable],
) -> Result<TimeSeries> {
    if steps < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 steps, got {steps}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "t_max must be positive and finite for a strictly increasing grid, got {t_max}"
        )));
    }
    if observables.is_empty() {
        return Err(Error::InvalidInput("no observables requested".into()));
    }

    let dt = t_max / (steps - 1) as f64;
    let t: Vec<f64> = (0..steps).map(|i| i as f64 * dt).collect();

    let rows: Vec<Vec<f64>> = t
        .par_iter()
        .map(|&ti| {
            let mut eval = PointEval { field, atom, config, t: ti, joint: None };
            observables.iter().map(|&o| eval.value(o)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let columns = observables
        .iter()
        .enumerate()
        .map(|(k, o)| (o.name().to_string(), rows.iter().map(|r| r[k]).collect()))
        .collect();

    let mut series = TimeSeries { t, columns, metadata: Vec::new() };
    series.push_metadata("state", field.label());
    series.push_metadata("n_max", field.n_max());
    series.push_metadata("atom.theta", atom.theta());
    series.push_metadata("atom.phi", atom.phi());
    series.push_metadata("model.m", config.m);
    series.push_metadata(
        "model.approach",
        match config.approach {
            crate::dynamics::Approach::Eha => "eha",
            crate::dynamics::Approach::Meha => "meha",
        },
    );
    series.push_metadata("model.beta1", config.beta1);
    series.push_metadata("model.beta2", config.beta2);
    series.push_metadata("model.lambda", config.lambda);
    series.push_metadata("grid.t_max", t_max);
    series.push_metadata("grid.steps", steps);
    series.push_metadata(
        "observables",
        observables.iter().map(|o| o.name()).collect::<Vec<_>>().join(","),
    );
    Ok(series)
}
