//! RIS switch patterns and their effective transfer matrices.
//!
//! Three architectures are modelled:
//!
//! * **S-RIS**: one on/off switch per element, `T = diag(s)`.
//! * **I-RIS**: elements grouped into consecutive cells of `cd = c·d`
//!   elements; inside a cell every arrival element may feed any departure
//!   element through a uniform power splitter. `T` is block diagonal.
//! * **Phase shifter**: b-bit quantized phases with unit amplitude,
//!   `T = diag(exp(i 2π l_m / 2^b))`.
//!
//! Patterns serialize to compact strings (see [`RisPattern`]'s `Display`)
//! so that winning configurations in result files can be rebuilt.

mod cell;
mod matrix;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cell::{
    build_raw_cell_matrix, cell_members, enumerate_cell_patterns, normalize_tilde, split_hat_tilde,
    CELL_ENUMERATION_CAP_BITS,
};
pub use matrix::{
    build_iris_matrix, build_matrix, build_phase_shifter_matrix, build_sris_matrix, RisMatrix,
};

use crate::{Error, Result};

/// Physical cell dimensions. Only the product `c·d` enters the math.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellShape {
    pub rows: usize,
    pub cols: usize,
}

impl CellShape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!(
                "cell shape ({rows}, {cols}) must have positive dimensions"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// Number of elements per cell, `cd`.
    pub fn size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_count(&self, elements: usize) -> Result<usize> {
        let cd = self.size();
        if cd == 0 || !elements.is_multiple_of(cd) {
            return Err(Error::Config(format!(
                "M = {elements} not divisible by cd = {cd}"
            )));
        }
        Ok(elements / cd)
    }
}

impl fmt::Display for CellShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rows, self.cols)
    }
}

/// Which family of transfer matrices a pattern belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    SRis,
    IRis(CellShape),
    PhaseShifter { bits: u32 },
}

impl Architecture {
    /// Stable short name used in result files.
    pub fn label(&self) -> String {
        match self {
            Architecture::SRis => "sris".into(),
            Architecture::IRis(_) => "iris".into(),
            Architecture::PhaseShifter { bits } => format!("phase_shifter_b{bits}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SRisPattern {
    pub switches: Vec<bool>,
}

impl SRisPattern {
    pub fn new(switches: Vec<bool>) -> Self {
        Self { switches }
    }

    pub fn all_on(elements: usize) -> Self {
        Self::new(vec![true; elements])
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::Config(format!("switch value {b} is not binary"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.switches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.switches.is_empty()
    }
}

/// Switch matrix of one I-RIS cell. Entry `(row, col)` is the switch from
/// arrival element `col` to departure element `row`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellPattern {
    size: usize,
    bits: Vec<bool>,
}

impl CellPattern {
    pub fn new(size: usize, bits: Vec<bool>) -> Result<Self> {
        if size == 0 || bits.len() != size * size {
            return Err(Error::Dimension {
                expected: size * size,
                found: bits.len(),
            });
        }
        Ok(Self { size, bits })
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            bits: vec![false; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut p = Self::zeros(size);
        for i in 0..size {
            p.set(i, i, true);
        }
        p
    }

    /// Cell whose only switches are the diagonal ones given by `diag`.
    pub fn from_diagonal(diag: &[bool]) -> Self {
        let mut p = Self::zeros(diag.len());
        for (i, &on) in diag.iter().enumerate() {
            p.set(i, i, on);
        }
        p
    }

    /// Pattern with enumeration index `index`: bit `r·cd + c` of the index
    /// is the switch at `(r, c)` (row-major, least significant bit first).
    pub fn from_index(size: usize, index: u64) -> Self {
        let bits = (0..size * size).map(|b| (index >> b) & 1 == 1).collect();
        Self { size, bits }
    }

    pub fn index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .fold(0, |acc, (b, _)| acc | (1 << b))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.size + col] = on;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.size)
            .flat_map(|r| (0..self.size).map(move |c| (r, c)))
            .all(|(r, c)| r == c || !self.get(r, c))
    }

    pub fn diagonal(&self) -> Vec<bool> {
        (0..self.size).map(|i| self.get(i, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IRisPattern {
    pub shape: CellShape,
    pub cells: Vec<CellPattern>,
}

impl IRisPattern {
    pub fn new(shape: CellShape, cells: Vec<CellPattern>) -> Result<Self> {
        if let Some(c) = cells.iter().find(|c| c.size() != shape.size()) {
            return Err(Error::Dimension {
                expected: shape.size(),
                found: c.size(),
            });
        }
        Ok(Self { shape, cells })
    }

    /// All cells identity: every element reflects only into itself.
    pub fn all_on(shape: CellShape, elements: usize) -> Result<Self> {
        let n = shape.cell_count(elements)?;
        Ok(Self {
            shape,
            cells: vec![CellPattern::identity(shape.size()); n],
        })
    }

    /// The I-RIS pattern realizing the same matrix as an S-RIS pattern.
    pub fn embed_sris(shape: CellShape, sris: &SRisPattern) -> Result<Self> {
        shape.cell_count(sris.len())?;
        let cells = sris
            .switches
            .chunks(shape.size())
            .map(CellPattern::from_diagonal)
            .collect();
        Ok(Self { shape, cells })
    }

    pub fn is_diagonal(&self) -> bool {
        self.cells.iter().all(CellPattern::is_diagonal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseShifterPattern {
    pub bits: u32,
    pub levels: Vec<u32>,
}

impl PhaseShifterPattern {
    pub fn new(bits: u32, levels: Vec<u32>) -> Result<Self> {
        let p = Self { bits, levels };
        p.validate()?;
        Ok(p)
    }

    pub fn level_count(&self) -> u64 {
        1u64 << self.bits
    }

    fn validate(&self) -> Result<()> {
        if self.bits == 0 || self.bits > 16 {
            return Err(Error::Config(format!(
                "phase-shifter resolution {} bits must be in 1..=16",
                self.bits
            )));
        }
        if let Some(l) = self
            .levels
            .iter()
            .find(|&&l| u64::from(l) >= self.level_count())
        {
            return Err(Error::Config(format!(
                "phase level {l} exceeds 2^{} - 1",
                self.bits
            )));
        }
        Ok(())
    }
}

/// A configuration of any supported architecture.
///
/// Text form: S-RIS as a bit string (`"1011"`), I-RIS as `|`-separated
/// row-major bit strings per cell (`"1001|1111"` is two 2-element cells,
/// the first identity, the second fully connected), phase shifters as
/// `;`-separated level indices (`"0;3;1"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RisPattern {
    SRis(SRisPattern),
    IRis(IRisPattern),
    PhaseShifter(PhaseShifterPattern),
}

impl RisPattern {
    /// The all-reflect starting configuration of an architecture.
    pub fn all_on(arch: Architecture, elements: usize) -> Result<Self> {
        Ok(match arch {
            Architecture::SRis => RisPattern::SRis(SRisPattern::all_on(elements)),
            Architecture::IRis(shape) => RisPattern::IRis(IRisPattern::all_on(shape, elements)?),
            Architecture::PhaseShifter { bits } => {
                RisPattern::PhaseShifter(PhaseShifterPattern::new(bits, vec![0; elements])?)
            }
        })
    }

    pub fn architecture(&self) -> Architecture {
        match self {
            RisPattern::SRis(_) => Architecture::SRis,
            RisPattern::IRis(p) => Architecture::IRis(p.shape),
            RisPattern::PhaseShifter(p) => Architecture::PhaseShifter { bits: p.bits },
        }
    }

    /// Parses the text form for a known architecture.
    pub fn parse(arch: Architecture, text: &str) -> Result<Self> {
        let bits = |s: &str| -> Result<Vec<bool>> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::Config(format!("invalid switch character {other:?}"))),
                })
                .collect()
        };
        match arch {
            Architecture::SRis => Ok(RisPattern::SRis(SRisPattern::new(bits(text)?))),
            Architecture::IRis(shape) => {
                let cells = text
                    .split('|')
                    .map(|cell| CellPattern::new(shape.size(), bits(cell)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RisPattern::IRis(IRisPattern::new(shape, cells)?))
            }
            Architecture::PhaseShifter { bits } => {
                let levels = text
                    .split(';')
                    .map(|l| {
                        l.trim()
                            .parse::<u32>()
                            .map_err(|e| Error::Config(format!("invalid phase level {l:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(RisPattern::PhaseShifter(PhaseShifterPattern::new(
                    bits, levels,
                )?))
            }
        }
    }
}

fn write_bits(f: &mut fmt::Formatter<'_>, bits: &[bool]) -> fmt::Result {
    bits.iter()
        .try_for_each(|&b| f.write_str(if b { "1" } else { "0" }))
}

impl fmt::Display for RisPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RisPattern::SRis(p) => write_bits(f, &p.switches),
            RisPattern::IRis(p) => {
                for (i, cell) in p.cells.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write_bits(f, cell.bits())?;
                }
                Ok(())
            }
            RisPattern::PhaseShifter(p) => {
                let levels: Vec<String> = p.levels.iter().map(u32::to_string).collect();
                f.write_str(&levels.join(";"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cell_index_is_row_major_lsb_first() {
        let p = CellPattern::from_index(2, 0b0010);
        assert!(p.get(0, 1));
        assert_eq!(p.bits().iter().filter(|b| **b).count(), 1);
        assert_eq!(CellPattern::identity(2).index(), 0b1001);
    }

    #[test]
    fn divisibility() {
        let shape = CellShape::new(2, 2).unwrap();
        assert_eq!(shape.cell_count(32).unwrap(), 8);
        assert!(matches!(shape.cell_count(10), Err(Error::Config(_))));
        assert!(CellShape::new(0, 2).is_err());
    }

    #[test]
    fn text_forms() {
        let s = RisPattern::SRis(SRisPattern::from_bits(&[1, 0, 1, 1]).unwrap());
        assert_eq!(s.to_string(), "1011");
        let shape = CellShape::new(1, 2).unwrap();
        let i = RisPattern::IRis(IRisPattern::all_on(shape, 4).unwrap());
        assert_eq!(i.to_string(), "1001|1001");
        let ps = RisPattern::PhaseShifter(PhaseShifterPattern::new(2, vec![0, 3, 1]).unwrap());
        assert_eq!(ps.to_string(), "0;3;1");
        assert!(RisPattern::parse(Architecture::SRis, "10x").is_err());
        assert!(RisPattern::parse(Architecture::PhaseShifter { bits: 1 }, "0;2").is_err());
        assert!(RisPattern::parse(Architecture::IRis(shape), "100|1001").is_err());
    }

    #[test]
    fn embedding_uses_diagonal_cells() {
        let shape = CellShape::new(1, 2).unwrap();
        let s = SRisPattern::from_bits(&[1, 0, 0, 1]).unwrap();
        let i = IRisPattern::embed_sris(shape, &s).unwrap();
        assert!(i.is_diagonal());
        assert_eq!(i.cells[0].diagonal(), vec![true, false]);
        assert_eq!(i.cells[1].diagonal(), vec![false, true]);
    }

    fn arb_pattern() -> impl Strategy<Value = RisPattern> {
        prop_oneof![
            prop::collection::vec(any::<bool>(), 1..20)
                .prop_map(|s| RisPattern::SRis(SRisPattern::new(s))),
            (1usize..3, 1usize..3, 1usize..4).prop_flat_map(|(r, c, n)| {
                let cd = r * c;
                prop::collection::vec(prop::collection::vec(any::<bool>(), cd * cd), n).prop_map(
                    move |cells| {
                        let shape = CellShape::new(r, c).unwrap();
                        let cells = cells
                            .into_iter()
                            .map(|b| CellPattern::new(cd, b).unwrap())
                            .collect();
                        RisPattern::IRis(IRisPattern::new(shape, cells).unwrap())
                    },
                )
            }),
            (1u32..4).prop_flat_map(|b| {
                prop::collection::vec(0u32..(1 << b), 1..10).prop_map(move |l| {
                    RisPattern::PhaseShifter(PhaseShifterPattern::new(b, l).unwrap())
                })
            }),
        ]
    }

    proptest! {
        #[test]
        fn text_form_round_trips(p in arb_pattern()) {
            let parsed = RisPattern::parse(p.architecture(), &p.to_string()).unwrap();
            prop_assert_eq!(parsed, p);
        }

        #[test]
        fn cell_index_round_trips(size in 1usize..5, raw in any::<u64>()) {
            let index = raw & ((1u64 << (size * size)) - 1);
            prop_assert_eq!(CellPattern::from_index(size, index).index(), index);
        }
    }
}
