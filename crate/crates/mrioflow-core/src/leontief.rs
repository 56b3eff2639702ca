//! Environmentally-extended input-output analysis: technical
//! coefficients, Leontief demand solves, and footprint attribution.
//!
//! The solver never forms the dense inverse. It runs the stationary
//! iteration `x <- y + A x`, which converges whenever the spectral
//! radius of `A` is below one — guaranteed for economically meaningful
//! tables, whose column sums stay below one.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::sum::CompensatedSum;
use crate::table::{SparseMatrix, TableError, TransactionTable};

/// Column sums may exceed one by at most this before a column is
/// flagged as economically suspect.
pub const COLUMN_SUM_TOLERANCE: f64 = 1e-9;

/// Technical coefficients `A[i][j] = Z[i][j] / x[j]`: input from sector
/// `i` required per unit of output of sector `j`.
#[derive(Debug, Clone)]
pub struct TechnicalCoefficients {
    matrix: SparseMatrix,
    total_output: Vec<f64>,
    /// Columns whose total output was zero; kept as structurally empty
    /// columns so index alignment is preserved.
    zero_output_columns: Vec<usize>,
    /// Columns whose coefficient sum reaches 1 + tolerance. A solve
    /// against such a matrix may legitimately fail to converge.
    over_unit_columns: Vec<usize>,
}

impl TechnicalCoefficients {
    /// Columnwise normalization of a transaction matrix by total output.
    pub fn from_matrix(z: &SparseMatrix, total_output: &[f64]) -> Result<Self, LeontiefError> {
        if total_output.len() != z.dim() {
            return Err(LeontiefError::DimensionMismatch {
                expected: z.dim(),
                got: total_output.len(),
            });
        }
        if let Some(pos) = total_output.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(LeontiefError::InvalidTotalOutput { position: pos, value: total_output[pos] });
        }
        let factors: Vec<f64> = total_output
            .iter()
            .map(|&x| if x > 0.0 { 1.0 / x } else { 0.0 })
            .collect();
        let matrix = z.scale_columns(&factors).map_err(LeontiefError::Table)?;
        let zero_output_columns: Vec<usize> = total_output
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == 0.0)
            .map(|(j, _)| j)
            .collect();
        let over_unit_columns: Vec<usize> = matrix
            .column_sums()
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s >= 1.0 + COLUMN_SUM_TOLERANCE)
            .map(|(j, _)| j)
            .collect();
        Ok(Self { matrix, total_output: total_output.to_vec(), zero_output_columns, over_unit_columns })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn total_output(&self) -> &[f64] {
        &self.total_output
    }

    pub fn zero_output_columns(&self) -> &[usize] {
        &self.zero_output_columns
    }

    pub fn over_unit_columns(&self) -> &[usize] {
        &self.over_unit_columns
    }
}

/// Normalize a transaction table into technical coefficients.
pub fn technical_coefficients(
    table: &TransactionTable,
    total_output: &[f64],
) -> Result<TechnicalCoefficients, LeontiefError> {
    TechnicalCoefficients::from_matrix(table.cells(), total_output)
}

/// Stopping rules for the demand solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Stop when the successive-iterate infinity-norm delta falls to
    /// this fraction of the demand norm.
    pub step_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { step_tolerance: 1e-10, max_iterations: 10_000 }
    }
}

/// Solve `(I - A) x = y` for total output `x` given final demand `y`.
///
/// Uses the stationary iteration `x <- y + A x` starting from `x = y`.
/// For the iterate pair (x, x') with `x' = y + A x`, the step
/// `x' - x` equals the residual `y - (I - A) x` identically, so the
/// returned iterate satisfies `norm(residual) <= step_tolerance * norm(y)`
/// by construction (1e-10 by default, well inside the 1e-8 contract).
pub fn leontief_solve(
    coefficients: &TechnicalCoefficients,
    demand: &[f64],
    options: &SolveOptions,
) -> Result<Vec<f64>, LeontiefError> {
    let a = &coefficients.matrix;
    let n = a.dim();
    if demand.len() != n {
        return Err(LeontiefError::DimensionMismatch { expected: n, got: demand.len() });
    }
    let demand_norm = inf_norm(demand);
    let stop = options.step_tolerance * demand_norm;

    let mut x = demand.to_vec();
    let mut next = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let mut last_delta = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        a.mul_vec_into(&x, &mut ax);
        let mut delta = 0.0f64;
        let mut finite = true;
        for i in 0..n {
            let candidate = demand[i] + ax[i];
            finite &= candidate.is_finite();
            delta = delta.max((candidate - x[i]).abs());
            next[i] = candidate;
        }
        if !finite {
            // iterates overflowed: the matrix is not a contraction
            return Err(LeontiefError::NonConvergence {
                iterations: iteration,
                residual: f64::INFINITY,
            });
        }
        if delta <= stop {
            return Ok(x);
        }
        last_delta = delta;
        core::mem::swap(&mut x, &mut next);
    }
    Err(LeontiefError::NonConvergence {
        iterations: options.max_iterations,
        residual: last_delta,
    })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Total footprint and its attribution across producing sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintResult {
    /// Sum of the breakdown (equivalently, intensity dotted with the
    /// solved output vector).
    pub total: f64,
    /// Per-sector contribution, aligned to the table index.
    pub breakdown: Vec<f64>,
}

/// Footprint of satisfying final demand `y` given per-sector direct
/// emission intensity `s`: `breakdown[i] = s[i] * x[i]` for the solved
/// output `x`.
pub fn footprint(
    intensity: &[f64],
    coefficients: &TechnicalCoefficients,
    demand: &[f64],
    options: &SolveOptions,
) -> Result<FootprintResult, LeontiefError> {
    let n = coefficients.dim();
    if intensity.len() != n {
        return Err(LeontiefError::DimensionMismatch { expected: n, got: intensity.len() });
    }
    if let Some(pos) = intensity.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(LeontiefError::InvalidIntensity { position: pos, value: intensity[pos] });
    }
    let output = leontief_solve(coefficients, demand, options)?;
    let breakdown: Vec<f64> = intensity.iter().zip(&output).map(|(&s, &x)| s * x).collect();
    let mut total = CompensatedSum::new();
    for &b in &breakdown {
        total.add(b);
    }
    Ok(FootprintResult { total: total.value(), breakdown })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LeontiefError {
    DimensionMismatch { expected: usize, got: usize },
    InvalidTotalOutput { position: usize, value: f64 },
    InvalidIntensity { position: usize, value: f64 },
    NonConvergence { iterations: usize, residual: f64 },
    Table(TableError),
}

impl fmt::Display for LeontiefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Self::InvalidTotalOutput { position, value } => {
                write!(f, "total output at position {position} is invalid ({value})")
            }
            Self::InvalidIntensity { position, value } => {
                write!(f, "intensity at position {position} is invalid ({value})")
            }
            Self::NonConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            Self::Table(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LeontiefError {}
