//! Per-cell I-RIS algebra: membership, power-splitter scaling, the
//! sole-connection (hat) / shared (tilde) decomposition and passivity
//! normalization.

use ndarray::Array2;
use num_complex::Complex64;

use super::{CellPattern, CellShape};
use crate::{Error, Result};

/// Largest `(cd)^2` for which cell patterns are enumerated by default.
pub const CELL_ENUMERATION_CAP_BITS: u32 = 16;

/// 1-based indices of the cell containing 1-based element `m`.
pub fn cell_members(m: usize, shape: CellShape, elements: usize) -> Result<Vec<usize>> {
    shape.cell_count(elements)?;
    if m == 0 || m > elements {
        return Err(Error::IndexOutOfRange {
            what: "element",
            index: m,
            max: elements,
        });
    }
    let cd = shape.size();
    let u = m.div_ceil(cd);
    Ok(((u - 1) * cd + 1..=u * cd).collect())
}

/// Cell matrix with power-splitter scaling: column `m'` (one arrival
/// element) carries `1/sqrt(n)` on each of its `n` closed switches.
pub fn build_raw_cell_matrix(cell: &CellPattern) -> Array2<Complex64> {
    let cd = cell.size();
    let mut raw = Array2::zeros((cd, cd));
    for col in 0..cd {
        let fanout = (0..cd).filter(|&row| cell.get(row, col)).count();
        if fanout == 0 {
            continue;
        }
        let amplitude = 1.0 / (fanout as f64).sqrt();
        for row in (0..cd).filter(|&row| cell.get(row, col)) {
            raw[(row, col)] = Complex64::new(amplitude, 0.0);
        }
    }
    raw
}

/// Splits a raw cell matrix into `(hat, tilde)`.
///
/// An entry belongs to `hat` when it is the only nonzero of both its row
/// and its column; every other nonzero entry belongs to `tilde`.
pub fn split_hat_tilde(raw: &Array2<Complex64>) -> (Array2<Complex64>, Array2<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let nonzero = raw.mapv(|z| z != zero);
    let row_counts: Vec<usize> = nonzero
        .rows()
        .into_iter()
        .map(|r| r.iter().filter(|&&b| b).count())
        .collect();
    let col_counts: Vec<usize> = nonzero
        .columns()
        .into_iter()
        .map(|c| c.iter().filter(|&&b| b).count())
        .collect();

    let mut hat = Array2::zeros(raw.raw_dim());
    let mut tilde = Array2::zeros(raw.raw_dim());
    for ((r, c), &z) in raw.indexed_iter() {
        if z == zero {
            continue;
        }
        if row_counts[r] == 1 && col_counts[c] == 1 {
            hat[(r, c)] = z;
        } else {
            tilde[(r, c)] = z;
        }
    }
    (hat, tilde)
}

/// `tilde / ||tilde||_F`, with the zero matrix mapped to itself.
pub fn normalize_tilde(tilde: &Array2<Complex64>) -> Array2<Complex64> {
    let norm = tilde.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return tilde.clone();
    }
    tilde.mapv(|z| z / norm)
}

/// Effective passive block of one cell: `hat + normalize(tilde)`.
pub(crate) fn effective_cell_block(cell: &CellPattern) -> Array2<Complex64> {
    let (hat, tilde) = split_hat_tilde(&build_raw_cell_matrix(cell));
    hat + normalize_tilde(&tilde)
}

/// All `2^((cd)^2)` switch patterns of one cell, in enumeration-index order.
///
/// Refuses with [`Error::CapExceeded`] when `(cd)^2 > cap_bits`.
pub fn enumerate_cell_patterns(
    shape: CellShape,
    cap_bits: u32,
) -> Result<impl Iterator<Item = CellPattern>> {
    let cd = shape.size();
    let bits = (cd * cd) as u32;
    if bits > cap_bits || bits >= 64 {
        return Err(Error::CapExceeded {
            required: 1u128.checked_shl(bits).unwrap_or(u128::MAX),
            cap: 1u128 << cap_bits.min(127),
        });
    }
    Ok((0..1u64 << bits).map(move |i| CellPattern::from_index(cd, i)))
}
