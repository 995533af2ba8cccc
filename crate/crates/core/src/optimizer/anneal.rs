use rand::{Rng, SeedableRng};

use super::{prepare, Method, SearchResult, SearchSpec};
use crate::channel::ChannelRealization;
use crate::metrics::LinkBudget;
use crate::rng::SimRng;
use crate::{Error, Result};

/// Simulated annealing over single-move proposals with geometric cooling.
///
/// A proposal with objective change `delta` is accepted with probability
/// `min(1, exp(delta / T))`. Returns the best configuration ever visited,
/// not the final state. Deterministic for a given `spec.seed`.
pub fn simulated_annealing(
    spec: &SearchSpec,
    real: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SearchResult> {
    let Method::SimulatedAnnealing(params) = spec.method else {
        return Err(Error::Config(format!(
            "simulated annealing invoked with method {}",
            spec.method.label()
        )));
    };
    let (space, mut eval) = prepare(spec, real, link)?;
    let mut rng = SimRng::seed_from_u64(spec.seed);

    let mut current = space.initial();
    let mut value = eval
        .evaluate(&space, &current)?
        .expect("evaluation cap is positive");
    let mut best = (current.clone(), value);
    let mut trace = vec![value];

    let mut temperature = params.initial_temperature;
    let mut levels = 0;
    'cooling: while temperature >= params.floor_temperature && levels < spec.budget.max_iterations {
        for _ in 0..params.moves_per_temperature {
            let moves = space.neighbors(&current);
            let (digit, new) = moves[rng.random_range(0..moves.len())];
            let old = std::mem::replace(&mut current[digit], new);
            let Some(candidate) = eval.evaluate(&space, &current)? else {
                current[digit] = old;
                break 'cooling;
            };
            if accept(candidate - value, temperature, &mut rng) {
                value = candidate;
                if value > best.1 {
                    best = (current.clone(), value);
                }
            } else {
                current[digit] = old;
            }
        }
        trace.push(best.1);
        temperature *= params.cooling;
        levels += 1;
    }
    eval.finish(&space, &best.0, best.1, trace)
}

/// Metropolis rule; the uniform draw is only consumed for worsening moves.
fn accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    delta >= 0.0 || rng.random::<f64>() < (delta / temperature).exp()
}
