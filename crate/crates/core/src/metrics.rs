//! Effective channels, SINR, rates and network objectives.
//!
//! Achieved performance is always evaluated on the true channels; the
//! `*_on_estimates` variants evaluate the same formulas on the estimated
//! channels an optimizer is allowed to see.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, CsiView};
use crate::ris::RisMatrix;
use crate::{Error, Result};

/// Transmit powers `P_j` and receiver noise power `σ²`, all in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    powers: Vec<f64>,
    noise_power: f64,
}

impl LinkBudget {
    pub fn new(powers: Vec<f64>, noise_power: f64) -> Result<Self> {
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(Error::Domain(format!(
                "noise power {noise_power} must be positive"
            )));
        }
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!(
                "transmit power {p} must be non-negative"
            )));
        }
        if !powers.iter().any(|&p| p > 0.0) {
            return Err(Error::Domain(
                "at least one transmit power must be positive".into(),
            ));
        }
        Ok(Self {
            powers,
            noise_power,
        })
    }

    pub fn uniform(users: usize, power: f64, noise_power: f64) -> Result<Self> {
        Self::new(vec![power; users], noise_power)
    }

    pub fn users(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    #[default]
    SumRate,
    MinRate,
    MinSinr,
}

impl ObjectiveKind {
    pub fn label(&self) -> &'static str {
        match self {
            ObjectiveKind::SumRate => "sum_rate",
            ObjectiveKind::MinRate => "min_rate",
            ObjectiveKind::MinSinr => "min_sinr",
        }
    }
}

/// `g_k · T · h_j`.
pub fn effective_channel(
    g: &Array1<Complex64>,
    t: &RisMatrix,
    h: &Array1<Complex64>,
) -> Result<Complex64> {
    let m = t.elements();
    for len in [g.len(), h.len()] {
        if len != m {
            return Err(Error::Dimension {
                expected: m,
                found: len,
            });
        }
    }
    Ok(g.dot(&t.matrix().dot(h)))
}

/// `g_k · T · h_j` accumulated over consecutive diagonal blocks of size
/// `block`, ignoring everything outside them. Equal to
/// [`effective_channel`] whenever `T` is block diagonal.
pub fn effective_channel_blockwise(
    g: &Array1<Complex64>,
    t: &RisMatrix,
    h: &Array1<Complex64>,
    block: usize,
) -> Result<Complex64> {
    let m = t.elements();
    if block == 0 || !m.is_multiple_of(block) {
        return Err(Error::Config(format!(
            "block size {block} does not divide {m}"
        )));
    }
    if g.len() != m || h.len() != m {
        return Err(Error::Dimension {
            expected: m,
            found: g.len().min(h.len()),
        });
    }
    Ok((0..m / block)
        .map(|u| {
            let r = u * block..(u + 1) * block;
            let tb = t.matrix().slice(s![r.clone(), r.clone()]);
            g.slice(s![r.clone()]).dot(&tb.dot(&h.slice(s![r])))
        })
        .sum())
}

/// All effective channels `c[k][j] = g_k T h_j`, row `k`, column `j`.
fn cross_channels(
    t: &RisMatrix,
    real: &ChannelRealization,
    view: CsiView,
) -> Result<Array2<Complex64>> {
    if t.elements() != real.elements() {
        return Err(Error::Dimension {
            expected: real.elements(),
            found: t.elements(),
        });
    }
    let (h, g) = real.channels(view);
    let reflected: Vec<Array1<Complex64>> = h.iter().map(|hj| t.matrix().dot(hj)).collect();
    let k = real.users();
    Ok(Array2::from_shape_fn((k, k), |(rx, tx)| {
        g[rx].dot(&reflected[tx])
    }))
}

fn check_users(real: &ChannelRealization, budget: &LinkBudget) -> Result<()> {
    if real.users() != budget.users() {
        return Err(Error::Dimension {
            expected: real.users(),
            found: budget.users(),
        });
    }
    Ok(())
}

/// Per-user SINR of every receiver, seen through `view`.
pub fn sinrs(
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
    view: CsiView,
) -> Result<Vec<f64>> {
    check_users(real, budget)?;
    let cross = cross_channels(t, real, view)?;
    let p = budget.powers();
    Ok((0..real.users())
        .map(|k| {
            let signal = p[k] * cross[(k, k)].norm_sqr();
            let interference: f64 = (0..real.users())
                .filter(|&j| j != k)
                .map(|j| p[j] * cross[(k, j)].norm_sqr())
                .sum();
            signal / (budget.noise_power() + interference)
        })
        .collect())
}

/// SINR at 1-based receiver `k`, evaluated on the true channels.
pub fn sinr(
    k: usize,
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
) -> Result<f64> {
    if k == 0 || k > real.users() {
        return Err(Error::IndexOutOfRange {
            what: "receiver",
            index: k,
            max: real.users(),
        });
    }
    Ok(sinrs(t, real, budget, CsiView::Truth)?[k - 1])
}

pub fn rate_from_sinr(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Shannon rate `log2(1 + SINR_k)` in bits/s/Hz, true channels.
pub fn user_rate(
    k: usize,
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
) -> Result<f64> {
    sinr(k, t, real, budget).map(rate_from_sinr)
}

pub fn objective_from_sinrs(kind: ObjectiveKind, sinrs: &[f64]) -> f64 {
    match kind {
        ObjectiveKind::SumRate => sinrs.iter().map(|&s| rate_from_sinr(s)).sum(),
        ObjectiveKind::MinRate => sinrs
            .iter()
            .map(|&s| rate_from_sinr(s))
            .fold(f64::INFINITY, f64::min),
        ObjectiveKind::MinSinr => sinrs.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

pub fn objective_with_view(
    kind: ObjectiveKind,
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
    view: CsiView,
) -> Result<f64> {
    sinrs(t, real, budget, view).map(|s| objective_from_sinrs(kind, &s))
}

/// Network objective on the true channels.
pub fn objective_value(
    kind: ObjectiveKind,
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
) -> Result<f64> {
    objective_with_view(kind, t, real, budget, CsiView::Truth)
}

/// Network objective on the estimated channels.
pub fn objective_on_estimates(
    kind: ObjectiveKind,
    t: &RisMatrix,
    real: &ChannelRealization,
    budget: &LinkBudget,
) -> Result<f64> {
    objective_with_view(kind, t, real, budget, CsiView::Estimate)
}
