//! Combinatorial search over RIS configurations.
//!
//! Every architecture is viewed as a vector of mixed-radix *digits*:
//!
//! | architecture  | digit          | radix        |
//! |---------------|----------------|--------------|
//! | S-RIS         | one switch     | 2            |
//! | I-RIS         | one cell       | 2^((cd)^2)   |
//! | phase shifter | one element    | 2^b          |
//!
//! The enumeration index of a configuration is the mixed-radix number with
//! digit 0 least significant. All searches break ties toward the lowest
//! index, optimize on estimated CSI, and report the truth-evaluated value
//! of the pattern they return.

mod anneal;
mod block;
mod exhaustive;
mod greedy;

use serde::{Deserialize, Serialize};

pub use anneal::simulated_annealing;
pub use block::block_coordinate_cell_search;
pub use exhaustive::exhaustive_search;
pub use greedy::greedy_flip;

use crate::channel::ChannelRealization;
use crate::metrics::{objective_on_estimates, objective_value, LinkBudget, ObjectiveKind};
use crate::ris::{
    build_matrix, Architecture, CellPattern, IRisPattern, PhaseShifterPattern, RisPattern,
    SRisPattern, CELL_ENUMERATION_CAP_BITS,
};
use crate::{Error, Result};

/// Default exhaustive-search cap, in objective evaluations.
pub const DEFAULT_MAX_EVALUATIONS: u64 = 1 << 22;
pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealingParams {
    pub initial_temperature: f64,
    /// Geometric cooling factor in (0, 1).
    pub cooling: f64,
    pub moves_per_temperature: u32,
    pub floor_temperature: f64,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling: 0.95,
            moves_per_temperature: 10,
            floor_temperature: 1e-4,
        }
    }
}

impl AnnealingParams {
    pub fn validate(&self) -> Result<()> {
        let t0 = self.initial_temperature;
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::Config(format!(
                "initial temperature {t0} must be positive"
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Config(format!(
                "cooling factor {} must lie in (0, 1)",
                self.cooling
            )));
        }
        if self.moves_per_temperature == 0 {
            return Err(Error::Config(
                "moves per temperature must be positive".into(),
            ));
        }
        let floor = self.floor_temperature;
        if !(floor > 0.0 && floor <= t0) {
            return Err(Error::Config(format!(
                "floor temperature {floor} must lie in (0, {t0}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exhaustive,
    GreedyFlip,
    BlockCoordinate,
    SimulatedAnnealing(AnnealingParams),
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::GreedyFlip => "greedy_flip",
            Method::BlockCoordinate => "block_coordinate",
            Method::SimulatedAnnealing(_) => "simulated_annealing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchBudget {
    /// Hard cap on objective evaluations; also the exhaustive-search cap.
    pub max_evaluations: u64,
    /// Greedy sweeps, block-coordinate passes or annealing temperature
    /// levels. Zero leaves the initial pattern untouched.
    pub max_iterations: u64,
    /// Largest `(cd)^2` a single cell may have for per-cell enumeration.
    pub cell_enumeration_bits: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            cell_enumeration_bits: CELL_ENUMERATION_CAP_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec {
    pub architecture: Architecture,
    pub objective: ObjectiveKind,
    pub method: Method,
    pub budget: SearchBudget,
    /// Seeds the randomized methods.
    pub seed: u64,
}

impl SearchSpec {
    pub fn new(architecture: Architecture, method: Method) -> Self {
        Self {
            architecture,
            objective: ObjectiveKind::default(),
            method,
            budget: SearchBudget::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget.max_evaluations == 0 {
            return Err(Error::Config("max_evaluations must be positive".into()));
        }
        if let Method::SimulatedAnnealing(p) = &self.method {
            p.validate()?;
        }
        if let Architecture::PhaseShifter { bits } = self.architecture {
            if bits == 0 || bits > 16 {
                return Err(Error::Config(format!(
                    "phase-shifter resolution {bits} bits must be in 1..=16"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_pattern: RisPattern,
    pub best_objective_on_estimates: f64,
    pub achieved_objective_on_truth: f64,
    /// Objective evaluations spent, counting every candidate scored.
    pub evaluations: u64,
    /// Best value after each iteration, starting with the initial pattern.
    pub trace: Vec<f64>,
}

/// Runs the method named in `spec`.
pub fn search(
    spec: &SearchSpec,
    real: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SearchResult> {
    match spec.method {
        Method::Exhaustive => exhaustive_search(spec, real, link),
        Method::GreedyFlip => greedy_flip(spec, real, link),
        Method::BlockCoordinate => block_coordinate_cell_search(spec, real, link),
        Method::SimulatedAnnealing(_) => simulated_annealing(spec, real, link),
    }
}

/// Mixed-radix view of an architecture's configuration space.
#[derive(Debug, Clone)]
pub(crate) struct SearchSpace {
    arch: Architecture,
    elements: usize,
    digits: usize,
    digit_bits: u32,
}

impl SearchSpace {
    pub(crate) fn new(arch: Architecture, elements: usize) -> Result<Self> {
        let (digits, digit_bits) = match arch {
            Architecture::SRis => (elements, 1),
            Architecture::IRis(shape) => {
                let cd = shape.size();
                (shape.cell_count(elements)?, (cd * cd) as u32)
            }
            Architecture::PhaseShifter { bits } => (elements, bits),
        };
        if digit_bits >= 64 {
            return Err(Error::CapExceeded {
                required: u128::MAX,
                cap: u128::from(u64::MAX),
            });
        }
        Ok(Self {
            arch,
            elements,
            digits,
            digit_bits,
        })
    }

    pub(crate) fn digits(&self) -> usize {
        self.digits
    }

    pub(crate) fn digit_bits(&self) -> u32 {
        self.digit_bits
    }

    pub(crate) fn radix(&self) -> u64 {
        1 << self.digit_bits
    }

    /// Total number of configurations, saturating at `u128::MAX`.
    pub(crate) fn size(&self) -> u128 {
        let bits = u64::from(self.digit_bits) * self.digits as u64;
        if bits >= 128 {
            u128::MAX
        } else {
            1u128 << bits
        }
    }

    pub(crate) fn digits_of_index(&self, mut index: u128) -> Vec<u64> {
        let radix = u128::from(self.radix());
        (0..self.digits)
            .map(|_| {
                let d = (index % radix) as u64;
                index /= radix;
                d
            })
            .collect()
    }

    pub(crate) fn decode(&self, digits: &[u64]) -> RisPattern {
        match self.arch {
            Architecture::SRis => {
                RisPattern::SRis(SRisPattern::new(digits.iter().map(|&d| d == 1).collect()))
            }
            Architecture::IRis(shape) => RisPattern::IRis(IRisPattern {
                shape,
                cells: digits
                    .iter()
                    .map(|&d| CellPattern::from_index(shape.size(), d))
                    .collect(),
            }),
            Architecture::PhaseShifter { bits } => RisPattern::PhaseShifter(PhaseShifterPattern {
                bits,
                levels: digits.iter().map(|&d| d as u32).collect(),
            }),
        }
    }

    /// The all-reflect configuration.
    pub(crate) fn initial(&self) -> Vec<u64> {
        match self.arch {
            Architecture::SRis => vec![1; self.digits],
            Architecture::IRis(shape) => {
                vec![CellPattern::identity(shape.size()).index(); self.digits]
            }
            Architecture::PhaseShifter { .. } => vec![0; self.digits],
        }
    }

    /// Single-step moves from `digits`, as `(digit, new value)` in a fixed
    /// order: every switch bit flip for binary architectures, one level up
    /// then one level down (mod 2^b) for phase shifters.
    pub(crate) fn neighbors(&self, digits: &[u64]) -> Vec<(usize, u64)> {
        match self.arch {
            Architecture::SRis | Architecture::IRis(_) => digits
                .iter()
                .enumerate()
                .flat_map(|(i, &d)| (0..self.digit_bits).map(move |b| (i, d ^ (1 << b))))
                .collect(),
            Architecture::PhaseShifter { .. } => {
                let n = self.radix();
                digits
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &d)| {
                        let up = (d + 1) % n;
                        let down = (d + n - 1) % n;
                        std::iter::once((i, up)).chain((down != up).then_some((i, down)))
                    })
                    .collect()
            }
        }
    }

    pub(crate) fn elements(&self) -> usize {
        self.elements
    }
}

/// Counts objective evaluations on estimated CSI and enforces the cap.
pub(crate) struct Evaluator<'a> {
    real: &'a ChannelRealization,
    link: &'a LinkBudget,
    objective: ObjectiveKind,
    cap: u64,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(
        spec: &SearchSpec,
        real: &'a ChannelRealization,
        link: &'a LinkBudget,
    ) -> Self {
        Self {
            real,
            link,
            objective: spec.objective,
            cap: spec.budget.max_evaluations,
            evaluations: 0,
        }
    }

    /// `None` once the evaluation cap is spent.
    pub(crate) fn evaluate(&mut self, space: &SearchSpace, digits: &[u64]) -> Result<Option<f64>> {
        if self.evaluations >= self.cap {
            return Ok(None);
        }
        let t = build_matrix(&space.decode(digits), space.elements())?;
        self.evaluations += 1;
        objective_on_estimates(self.objective, &t, self.real, self.link).map(Some)
    }

    pub(crate) fn finish(
        self,
        space: &SearchSpace,
        best: &[u64],
        best_value: f64,
        trace: Vec<f64>,
    ) -> Result<SearchResult> {
        let best_pattern = space.decode(best);
        let t = build_matrix(&best_pattern, space.elements())?;
        Ok(SearchResult {
            achieved_objective_on_truth: objective_value(self.objective, &t, self.real, self.link)?,
            best_pattern,
            best_objective_on_estimates: best_value,
            evaluations: self.evaluations,
            trace,
        })
    }
}

fn prepare<'a>(
    spec: &SearchSpec,
    real: &'a ChannelRealization,
    link: &'a LinkBudget,
) -> Result<(SearchSpace, Evaluator<'a>)> {
    spec.validate()?;
    let space = SearchSpace::new(spec.architecture, real.elements())?;
    Ok((space, Evaluator::new(spec, real, link)))
}

#[cfg(test)]
pub(crate) mod test_support {
    use ndarray::Array1;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    use crate::channel::ChannelRealization;
    use crate::rng::SimRng;

    /// Random unit-variance perfect-CSI realization.
    pub(crate) fn random_realization(
        seed: u64,
        users: usize,
        elements: usize,
    ) -> ChannelRealization {
        let mut rng = SimRng::seed_from_u64(seed);
        let mut draw = || {
            Array1::from_shape_fn(elements, |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        };
        let h = (0..users).map(|_| draw()).collect();
        let g = (0..users).map(|_| draw()).collect();
        ChannelRealization::from_truth(h, g).unwrap()
    }
}
