use super::{prepare, Evaluator, SearchResult, SearchSpace, SearchSpec};
use crate::channel::ChannelRealization;
use crate::metrics::LinkBudget;
use crate::Result;

/// Steepest-ascent single-move local search from the all-reflect pattern.
///
/// Each sweep scores every neighbor and applies the one with the largest
/// strict improvement (first in move order on ties). Stops at a local
/// optimum, after `max_iterations` sweeps, or when evaluations run out.
pub fn greedy_flip(
    spec: &SearchSpec,
    real: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SearchResult> {
    let (space, mut eval) = prepare(spec, real, link)?;
    let start = space.initial();
    let (best, value, trace) = ascend(&space, &mut eval, start, spec.budget.max_iterations)?;
    eval.finish(&space, &best, value, trace)
}

/// Shared by block-coordinate initialization.
pub(crate) fn ascend(
    space: &SearchSpace,
    eval: &mut Evaluator<'_>,
    start: Vec<u64>,
    max_iterations: u64,
) -> Result<(Vec<u64>, f64, Vec<f64>)> {
    let mut current = start;
    let mut value = eval
        .evaluate(space, &current)?
        .expect("evaluation cap is positive");
    let mut trace = vec![value];

    for _ in 0..max_iterations {
        let mut best_move = None;
        let mut best_value = value;
        let mut exhausted = false;
        for (digit, new) in space.neighbors(&current) {
            let old = std::mem::replace(&mut current[digit], new);
            let scored = eval.evaluate(space, &current)?;
            current[digit] = old;
            match scored {
                Some(v) if v > best_value => {
                    best_value = v;
                    best_move = Some((digit, new));
                }
                Some(_) => {}
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        let Some((digit, new)) = best_move else {
            break;
        };
        current[digit] = new;
        value = best_value;
        trace.push(value);
        if exhausted {
            break;
        }
    }
    Ok((current, value, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{exhaustive_search, test_support::random_realization, Method};
    use crate::ris::{Architecture, CellShape};
    use ndarray::array;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn all_on_local_optimum_is_kept() {
        // all-on gives |2|^2; every single flip drops to |1|^2
        let real = ChannelRealization::from_truth(
            vec![array![c(1.0), c(1.0)]],
            vec![array![c(1.0), c(1.0)]],
        )
        .unwrap();
        let link = LinkBudget::uniform(1, 1.0, 1.0).unwrap();
        let r = greedy_flip(
            &SearchSpec::new(Architecture::SRis, Method::GreedyFlip),
            &real,
            &link,
        )
        .unwrap();
        assert_eq!(r.best_pattern.to_string(), "11");
        assert_eq!(r.evaluations, 3);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn zero_iterations_return_initial_pattern() {
        let real = random_realization(3, 2, 4);
        let link = LinkBudget::uniform(2, 1.0, 1.0).unwrap();
        for arch in [
            Architecture::SRis,
            Architecture::IRis(CellShape::new(2, 1).unwrap()),
            Architecture::PhaseShifter { bits: 2 },
        ] {
            let mut spec = SearchSpec::new(arch, Method::GreedyFlip);
            spec.budget.max_iterations = 0;
            let r = greedy_flip(&spec, &real, &link).unwrap();
            let expected = crate::ris::RisPattern::all_on(arch, 4).unwrap();
            assert_eq!(r.best_pattern, expected);
            assert_eq!(r.evaluations, 1);
        }
    }

    #[test]
    fn never_beats_exhaustive_and_trace_is_monotone() {
        let link = LinkBudget::uniform(2, 1.0, 0.1).unwrap();
        for seed in 0..100 {
            let real = random_realization(seed, 2, 4);
            for arch in [Architecture::SRis, Architecture::PhaseShifter { bits: 1 }] {
                let g =
                    greedy_flip(&SearchSpec::new(arch, Method::GreedyFlip), &real, &link).unwrap();
                let e = exhaustive_search(&SearchSpec::new(arch, Method::Exhaustive), &real, &link)
                    .unwrap();
                assert!(g.best_objective_on_estimates <= e.best_objective_on_estimates);
                assert!(g.trace.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn respects_evaluation_cap() {
        let real = random_realization(5, 2, 8);
        let link = LinkBudget::uniform(2, 1.0, 1.0).unwrap();
        let mut spec = SearchSpec::new(Architecture::SRis, Method::GreedyFlip);
        spec.budget.max_evaluations = 5;
        let r = greedy_flip(&spec, &real, &link).unwrap();
        assert!(r.evaluations <= 5);
    }
}
