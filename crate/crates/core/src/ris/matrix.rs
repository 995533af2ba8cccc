use std::f64::consts::PI;

use ndarray::{s, Array2};
use num_complex::Complex64;

use super::cell::effective_cell_block;
use super::{Architecture, IRisPattern, PhaseShifterPattern, RisPattern, SRisPattern};
use crate::{Error, Result};

/// Dense effective transfer matrix `T` of an RIS configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RisMatrix {
    t: Array2<Complex64>,
    architecture: Architecture,
}

impl RisMatrix {
    pub fn new(t: Array2<Complex64>, architecture: Architecture) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::Dimension {
                expected: t.nrows(),
                found: t.ncols(),
            });
        }
        Ok(Self { t, architecture })
    }

    pub fn elements(&self) -> usize {
        self.t.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.t
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn zeros(elements: usize, architecture: Architecture) -> Self {
        Self {
            t: Array2::zeros((elements, elements)),
            architecture,
        }
    }
}

fn check_len(found: usize, elements: usize) -> Result<()> {
    if found != elements {
        return Err(Error::Config(format!(
            "pattern has {found} elements, RIS has {elements}"
        )));
    }
    Ok(())
}

/// `T = diag(s_1, ..., s_M)`.
pub fn build_sris_matrix(p: &SRisPattern, elements: usize) -> Result<RisMatrix> {
    check_len(p.len(), elements)?;
    let mut t = Array2::zeros((elements, elements));
    for (m, &on) in p.switches.iter().enumerate() {
        if on {
            t[(m, m)] = Complex64::new(1.0, 0.0);
        }
    }
    RisMatrix::new(t, Architecture::SRis)
}

/// Block-diagonal assembly of the per-cell `hat + tilde/||tilde||_F` blocks.
pub fn build_iris_matrix(p: &IRisPattern, elements: usize) -> Result<RisMatrix> {
    let cells = p.shape.cell_count(elements)?;
    check_len(p.cells.len(), cells)?;
    let cd = p.shape.size();
    let mut t = Array2::zeros((elements, elements));
    for (u, cell) in p.cells.iter().enumerate() {
        if cell.size() != cd {
            return Err(Error::Dimension {
                expected: cd,
                found: cell.size(),
            });
        }
        let range = u * cd..(u + 1) * cd;
        t.slice_mut(s![range.clone(), range])
            .assign(&effective_cell_block(cell));
    }
    RisMatrix::new(t, Architecture::IRis(p.shape))
}

/// `T = diag(exp(i 2π l_m / 2^b))`, unit-amplitude reflectors.
pub fn build_phase_shifter_matrix(p: &PhaseShifterPattern, elements: usize) -> Result<RisMatrix> {
    p.validate()?;
    check_len(p.levels.len(), elements)?;
    let n = p.level_count() as f64;
    let mut t = Array2::zeros((elements, elements));
    for (m, &level) in p.levels.iter().enumerate() {
        t[(m, m)] = if level == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * f64::from(level) / n)
        };
    }
    RisMatrix::new(t, Architecture::PhaseShifter { bits: p.bits })
}

pub fn build_matrix(p: &RisPattern, elements: usize) -> Result<RisMatrix> {
    match p {
        RisPattern::SRis(p) => build_sris_matrix(p, elements),
        RisPattern::IRis(p) => build_iris_matrix(p, elements),
        RisPattern::PhaseShifter(p) => build_phase_shifter_matrix(p, elements),
    }
}
