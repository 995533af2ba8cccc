use super::{prepare, SearchResult, SearchSpec};
use crate::channel::ChannelRealization;
use crate::metrics::LinkBudget;
use crate::{Error, Result};

/// Scores every configuration and returns the global maximizer of the
/// objective on estimated CSI, lowest enumeration index on ties.
///
/// Refuses with [`Error::CapExceeded`] when the space is larger than
/// `spec.budget.max_evaluations`.
pub fn exhaustive_search(
    spec: &SearchSpec,
    real: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SearchResult> {
    let (space, mut eval) = prepare(spec, real, link)?;
    let size = space.size();
    let cap = u128::from(spec.budget.max_evaluations);
    if size > cap {
        return Err(Error::CapExceeded {
            required: size,
            cap,
        });
    }

    let mut best = space.digits_of_index(0);
    let mut best_value = f64::NEG_INFINITY;
    let mut trace = Vec::new();
    for index in 0..size {
        let digits = space.digits_of_index(index);
        let value = eval
            .evaluate(&space, &digits)?
            .expect("space size checked against the cap");
        if value > best_value {
            best_value = value;
            best = digits;
            trace.push(best_value);
        }
    }
    eval.finish(&space, &best, best_value, trace)
}
