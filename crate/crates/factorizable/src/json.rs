//! JSON wire formats for matrices, unit systems, channels and traces.
//!
//! Complex numbers serialize as `[re, im]` pairs of decimal numbers; only
//! finite values are accepted. Serialization round-trips values exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteTracialAlgebra;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, TolerancePolicy};
use crate::trace::FiniteDimTrace;
use crate::units::MatrixUnitSystem;

/// A square complex matrix: `entries[i][j] = [re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl JsonMatrix {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let entries = (0..d)
            .map(|i| (0..d).map(|j| [m.at(i, j).re, m.at(i, j).im]).collect())
            .collect();
        Self { dim: d, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim {
            return Err(Error::InvalidTrace(format!(
                "matrix declares dim {} but has {} rows",
                self.dim,
                self.entries.len()
            )));
        }
        for row in &self.entries {
            if row.len() != self.dim {
                return Err(Error::InvalidTrace(format!(
                    "matrix declares dim {} but a row has {} entries",
                    self.dim,
                    row.len()
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::InvalidTrace("matrix entries must be finite".into()));
                }
            }
        }
        Ok(ComplexMatrix::from_fn(self.dim, |i, j| {
            Complex64::new(self.entries[i][j][0], self.entries[i][j][1])
        }))
    }
}

/// A matrix-unit system: `units[i][j]` is `f_ij`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonUnits {
    pub n: usize,
    pub ambient_dim: usize,
    pub units: Vec<Vec<JsonMatrix>>,
}

impl JsonUnits {
    pub fn from_system(sys: &MatrixUnitSystem) -> Self {
        let n = sys.order();
        let units = (0..n)
            .map(|i| (0..n).map(|j| JsonMatrix::from_matrix(sys.unit(i, j))).collect())
            .collect();
        Self { n, ambient_dim: sys.ambient_dim(), units }
    }

    pub fn to_system(&self) -> Result<MatrixUnitSystem> {
        if self.units.len() != self.n || self.units.iter().any(|row| row.len() != self.n) {
            return Err(Error::InvalidUnits(format!(
                "expected an {0}×{0} array of matrices",
                self.n
            )));
        }
        let mut flat = Vec::with_capacity(self.n * self.n);
        for row in &self.units {
            for m in row {
                let mat = m.to_matrix()?;
                if mat.dim() != self.ambient_dim {
                    return Err(Error::DimensionMismatch(mat.dim(), self.ambient_dim));
                }
                flat.push(mat);
            }
        }
        MatrixUnitSystem::from_units(self.n, flat)
    }
}

/// A channel represented by its Choi matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonChannel {
    pub n: usize,
    pub choi: JsonMatrix,
}

impl JsonChannel {
    pub fn from_channel(ch: &Channel) -> Self {
        Self { n: ch.n(), choi: JsonMatrix::from_matrix(ch.choi()) }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        Channel::from_choi(self.n, self.choi.to_matrix()?)
    }
}

/// A finite-dimensional trace: block data plus per-block `n×n` unit arrays,
/// `g_units[block][i][j]` and `f_units[block][i][j]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonTrace {
    pub n: usize,
    pub blocks: Vec<usize>,
    pub weights: Vec<f64>,
    pub g_units: Vec<Vec<Vec<JsonMatrix>>>,
    pub f_units: Vec<Vec<Vec<JsonMatrix>>>,
}

impl JsonTrace {
    pub fn from_trace(tr: &FiniteDimTrace) -> Result<Self> {
        let n = tr.n();
        let alg = tr.algebra();
        let split = |sys: &MatrixUnitSystem| -> Result<Vec<Vec<Vec<JsonMatrix>>>> {
            let mut blocks = Vec::with_capacity(alg.block_count());
            for b in 0..alg.block_count() {
                let mut grid = Vec::with_capacity(n);
                for i in 0..n {
                    let mut row = Vec::with_capacity(n);
                    for j in 0..n {
                        row.push(JsonMatrix::from_matrix(&alg.extract_block(sys.unit(i, j), b)?));
                    }
                    grid.push(row);
                }
                blocks.push(grid);
            }
            Ok(blocks)
        };
        Ok(Self {
            n,
            blocks: alg.block_dims().to_vec(),
            weights: alg.weights().to_vec(),
            g_units: split(tr.g_units())?,
            f_units: split(tr.f_units())?,
        })
    }

    pub fn to_trace(&self, pol: &TolerancePolicy) -> Result<FiniteDimTrace> {
        for w in &self.weights {
            if !w.is_finite() {
                return Err(Error::InvalidWeights("weights must be finite".into()));
            }
        }
        let algebra = FiniteTracialAlgebra::new(self.blocks.clone(), self.weights.clone())?;
        let assemble = |per_block: &Vec<Vec<Vec<JsonMatrix>>>, name: &str| -> Result<MatrixUnitSystem> {
            if per_block.len() != self.blocks.len() {
                return Err(Error::InvalidTrace(format!(
                    "{name}: expected one unit grid per block ({}), got {}",
                    self.blocks.len(),
                    per_block.len()
                )));
            }
            for (b, grid) in per_block.iter().enumerate() {
                if grid.len() != self.n || grid.iter().any(|row| row.len() != self.n) {
                    return Err(Error::InvalidTrace(format!(
                        "{name}: block {b} is not an {0}×{0} array",
                        self.n
                    )));
                }
            }
            let mut units = Vec::with_capacity(self.n * self.n);
            for i in 0..self.n {
                for j in 0..self.n {
                    let blocks: Vec<ComplexMatrix> = per_block
                        .iter()
                        .map(|grid| grid[i][j].to_matrix())
                        .collect::<Result<_>>()?;
                    units.push(algebra.assemble(&blocks)?);
                }
            }
            MatrixUnitSystem::from_units(self.n, units)
        };
        let g = assemble(&self.g_units, "g_units")?;
        let f = assemble(&self.f_units, "f_units")?;
        FiniteDimTrace::new(self.n, algebra, g, f, pol)
    }
}
