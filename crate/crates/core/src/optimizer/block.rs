use super::greedy::ascend;
use super::{prepare, SearchResult, SearchSpace, SearchSpec};
use crate::channel::ChannelRealization;
use crate::metrics::LinkBudget;
use crate::ris::{Architecture, CellPattern};
use crate::{Error, Result};

/// Cyclic block-coordinate ascent over digits (I-RIS cells, or single
/// elements for S-RIS and phase shifters).
///
/// The start point is the greedy S-RIS solution embedded as diagonal cells
/// (for I-RIS) or the architecture's own greedy solution otherwise. Each
/// block update enumerates every local value with the other blocks fixed
/// and moves to the lowest-index maximizer. Passes repeat until one brings
/// no strict improvement or `max_iterations` passes have run.
pub fn block_coordinate_cell_search(
    spec: &SearchSpec,
    real: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SearchResult> {
    let (space, mut eval) = prepare(spec, real, link)?;
    let cap_bits = spec.budget.cell_enumeration_bits;
    if space.digit_bits() > cap_bits {
        return Err(Error::CapExceeded {
            required: 1u128 << space.digit_bits(),
            cap: 1u128 << cap_bits.min(127),
        });
    }
    let iterations = spec.budget.max_iterations;

    let (mut current, mut value, mut trace) = match spec.architecture {
        Architecture::IRis(shape) => {
            let sris = SearchSpace::new(Architecture::SRis, space.elements())?;
            let (bits, value, trace) = ascend(&sris, &mut eval, sris.initial(), iterations)?;
            let cd = shape.size();
            let cells = bits
                .chunks(cd)
                .map(|c| {
                    let diag: Vec<bool> = c.iter().map(|&b| b == 1).collect();
                    CellPattern::from_diagonal(&diag).index()
                })
                .collect();
            (cells, value, trace)
        }
        _ => ascend(&space, &mut eval, space.initial(), iterations)?,
    };

    'passes: for _ in 0..iterations {
        let mut improved = false;
        for block in 0..space.digits() {
            let kept = current[block];
            let mut best = (kept, f64::NEG_INFINITY);
            for local in 0..space.radix() {
                current[block] = local;
                match eval.evaluate(&space, &current)? {
                    Some(v) if v > best.1 => best = (local, v),
                    Some(_) => {}
                    None => {
                        current[block] = kept;
                        break 'passes;
                    }
                }
            }
            // the kept value is among the candidates, so best.1 >= value
            current[block] = best.0;
            if best.1 > value {
                improved = true;
            }
            value = best.1;
            trace.push(value);
        }
        if !improved {
            break;
        }
    }
    eval.finish(&space, &current, value, trace)
}
