//! Assembly of the three-point complete flux scheme and its direct solution.
//!
//! For interior node `j` the scheme reads `L^h phi_j = W^h s_j` with
//!
//! ```text
//! L^h phi_j = -a_W phi_{j-1} + a_C phi_j - a_E phi_{j+1}
//! W^h s_j   =  b_W s_{j-1}   + b_C s_j   + b_E s_{j+1}
//! ```
//!
//! The reaction part of `s = q - c phi` is moved to the left-hand side, so the
//! assembled matrix is `A = L^h + W^h diag(c)` restricted to interior nodes, and
//! known boundary values are folded into the right-hand side.

use crate::error::{Error, Result};
use crate::flux::{interface_table, numerical_flux, InterfaceCoefficients};
use crate::problem::{make_grid, Grid, ProblemSpec};
use crate::special::{ln_bernoulli, weight};
use alloc::vec;
use alloc::vec::Vec;

/// Pivots smaller than this abort the Thomas sweep.
const PIVOT_GUARD: f64 = 1e-300;
/// Relative slack used by the diagonal-dominance checks.
const DOMINANCE_TOL: f64 = 1e-12;
const PICARD_TOL: f64 = 1e-12;
const PICARD_MAX_ITER: usize = 100;

/// Stencil of one interior node, in the `L^h phi = W^h s` scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilRow {
    pub a_w: f64,
    pub a_c: f64,
    pub a_e: f64,
    pub b_w: f64,
    pub b_c: f64,
    pub b_e: f64,
}

impl StencilRow {
    /// Row for the node between interfaces `west` (`j - 1/2`) and `east` (`j + 1/2`).
    pub fn from_interfaces(west: &InterfaceCoefficients, east: &InterfaceCoefficients, h: f64) -> Self {
        StencilRow {
            a_w: west.alpha / h,
            a_c: (east.alpha + west.beta) / h,
            a_e: east.beta / h,
            b_w: west.gamma,
            b_c: 1.0 - east.gamma + west.delta,
            b_e: -east.delta,
        }
    }

    /// `L^h` applied to three consecutive values.
    #[inline]
    pub fn apply_difference(&self, west: f64, center: f64, east: f64) -> f64 {
        -self.a_w * west + self.a_c * center - self.a_e * east
    }

    /// `W^h` applied to three consecutive source values.
    #[inline]
    pub fn apply_weighting(&self, west: f64, center: f64, east: f64) -> f64 {
        self.b_w * west + self.b_c * center + self.b_e * east
    }
}

/// Stencil rows of all interior nodes `1..N-1`.
pub fn stencil_rows(spec: &ProblemSpec, grid: &Grid) -> Result<Vec<StencilRow>> {
    let table = interface_table(spec, grid)?;
    let h = grid.h();
    Ok(table
        .windows(2)
        .map(|w| StencilRow::from_interfaces(&w[0].1, &w[1].1, h))
        .collect())
}

/// Tridiagonal system over the interior unknowns. `sub[0]` and
/// `sup[n - 1]` are unused and kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        for found in [sub.len(), sup.len(), rhs.len()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        Ok(TridiagonalSystem { sub, diag, sup, rhs })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Assembles the scheme for `spec` on `grid`, folding reaction terms and
/// boundary data.
pub fn assemble(spec: &ProblemSpec, grid: &Grid) -> Result<TridiagonalSystem> {
    assemble_with_extra_source(spec, grid, None)
}

/// `extra` adds a nodal source (length `N`) on top of `q`; used to lag a
/// nonlinear source.
fn assemble_with_extra_source(
    spec: &ProblemSpec,
    grid: &Grid,
    extra: Option<&[f64]>,
) -> Result<TridiagonalSystem> {
    let rows = stencil_rows(spec, grid)?;
    let x = grid.nodes();
    let n_pts = x.len();
    let n = n_pts - 2;
    let q: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(k, &xk)| spec.source().eval(xk) + extra.map_or(0.0, |e| e[k]))
        .collect();
    let c: Vec<f64> = x.iter().map(|&xk| spec.reaction().eval(xk)).collect();

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for (i, row) in rows.iter().enumerate() {
        let j = i + 1;
        let west = -row.a_w + row.b_w * c[j - 1];
        let east = -row.a_e + row.b_e * c[j + 1];
        diag[i] = row.a_c + row.b_c * c[j];
        rhs[i] = row.apply_weighting(q[j - 1], q[j], q[j + 1]);
        if i == 0 {
            rhs[i] -= west * spec.phi_left();
        } else {
            sub[i] = west;
        }
        if i + 1 == n {
            rhs[i] -= east * spec.phi_right();
        } else {
            sup[i] = east;
        }
        if !(diag[i] > 0.0) {
            return Err(Error::NonPositiveDiagonal { row: i, value: diag[i] });
        }
    }
    TridiagonalSystem::new(sub, diag, sup, rhs)
}

/// LU factors of a tridiagonal matrix without pivoting.
struct ThomasFactors<'a> {
    sys: &'a TridiagonalSystem,
    /// Modified super-diagonal `c'_i = sup_i / pivot_i`.
    upper: Vec<f64>,
    pivots: Vec<f64>,
}

impl<'a> ThomasFactors<'a> {
    fn new(sys: &'a TridiagonalSystem) -> Result<Self> {
        let n = sys.len();
        let mut upper = vec![0.0; n];
        let mut pivots = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                sys.diag[0]
            } else {
                sys.diag[i] - sys.sub[i] * upper[i - 1]
            };
            if !(pivot.abs() >= PIVOT_GUARD) {
                return Err(Error::ZeroPivot { row: i, pivot });
            }
            pivots[i] = pivot;
            if i + 1 < n {
                upper[i] = sys.sup[i] / pivot;
            }
        }
        Ok(ThomasFactors { sys, upper, pivots })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let r = if i == 0 { rhs[0] } else { rhs[i] - self.sys.sub[i] * y[i - 1] };
            y[i] = r / self.pivots[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            y[i] -= self.upper[i] * y[i + 1];
        }
        y
    }
}

/// Solves the tridiagonal system by the Thomas algorithm (no pivoting).
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    Ok(ThomasFactors::new(sys)?.solve(&sys.rhs))
}

/// Nodal solution including the two boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Fixed-point iterations spent on a nonlinear source; 0 when the source
    /// is affine in `phi`.
    pub picard_iterations: usize,
}

impl Solution {
    /// Numerical fluxes `F_{j+1/2}` at all `N - 1` interfaces, with the full
    /// source `s(x, phi)` sampled at the solved values.
    pub fn interface_fluxes(&self, spec: &ProblemSpec) -> Result<Vec<f64>> {
        let table = interface_table(spec, &self.grid)?;
        let s = self.nodal_source(spec);
        let h = self.grid.h();
        let phi = &self.values;
        Ok(table
            .iter()
            .enumerate()
            .map(|(j, (_, ic))| numerical_flux(ic, phi[j], phi[j + 1], s[j], s[j + 1], h))
            .collect())
    }

    /// `s(x_k, phi_k)` at every node.
    pub fn nodal_source(&self, spec: &ProblemSpec) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &phi)| spec.source_at(x, phi))
            .collect()
    }
}

fn with_boundaries(spec: &ProblemSpec, interior: Vec<f64>) -> Vec<f64> {
    let mut values = Vec::with_capacity(interior.len() + 2);
    values.push(spec.phi_left());
    values.extend(interior);
    values.push(spec.phi_right());
    values
}

/// Assembles and solves on a uniform grid of `n_points` nodes.
///
/// A nonlinear source hook is handled by lagging it in `phi` until the
/// max-norm update drops below `1e-12` (at most 100 iterations).
pub fn solve(spec: &ProblemSpec, n_points: usize) -> Result<Solution> {
    let grid = make_grid(n_points)?;
    let Some(hook) = spec.nonlinear_source() else {
        let sys = assemble(spec, &grid)?;
        let values = with_boundaries(spec, thomas_solve(&sys)?);
        return Ok(Solution { grid, values, picard_iterations: 0 });
    };

    let x = grid.nodes().to_vec();
    let mut values: Vec<f64> = x
        .iter()
        .map(|&xk| spec.phi_left() + (spec.phi_right() - spec.phi_left()) * xk)
        .collect();
    let mut trace = Vec::new();
    for iteration in 1..=PICARD_MAX_ITER {
        let lagged: Vec<f64> = x.iter().zip(&values).map(|(&xk, &p)| hook(xk, p)).collect();
        let sys = assemble_with_extra_source(spec, &grid, Some(&lagged))?;
        let next = with_boundaries(spec, thomas_solve(&sys)?);
        let update = next
            .iter()
            .zip(&values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        values = next;
        trace.push(update);
        if update <= PICARD_TOL {
            return Ok(Solution { grid, values, picard_iterations: iteration });
        }
        if !update.is_finite() {
            break;
        }
    }
    Err(Error::PicardNotConverged { iterations: trace.len(), trace })
}

/// Outcome of the M-matrix sufficient conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MMatrixReport {
    pub off_diagonals_nonpositive: bool,
    pub diagonal_positive: bool,
    pub weakly_diagonally_dominant: bool,
    pub strictly_dominant_row: bool,
    pub irreducible: bool,
    /// Every row reaches a strictly dominant row through nonzero
    /// off-diagonal entries (weakly chained diagonal dominance).
    pub chained_to_strict_row: bool,
}

impl MMatrixReport {
    pub fn passes(&self) -> bool {
        self.off_diagonals_nonpositive
            && self.diagonal_positive
            && self.weakly_diagonally_dominant
            && self.strictly_dominant_row
            && self.chained_to_strict_row
    }
}

/// Checks that the assembled matrix is a weakly chained diagonally dominant
/// Z-matrix with positive diagonal (hence an M-matrix). Irreducibility is
/// reported too but not required: at extreme Péclet numbers one
/// off-diagonal underflows to zero.
pub fn m_matrix_check(sys: &TridiagonalSystem) -> MMatrixReport {
    let n = sys.len();
    let mut report = MMatrixReport {
        off_diagonals_nonpositive: true,
        diagonal_positive: true,
        weakly_diagonally_dominant: true,
        strictly_dominant_row: false,
        irreducible: true,
        chained_to_strict_row: false,
    };
    let mut reaches = vec![false; n];
    let mut stack = Vec::new();
    for i in 0..n {
        let west = if i > 0 { sys.sub[i] } else { 0.0 };
        let east = if i + 1 < n { sys.sup[i] } else { 0.0 };
        if west > 0.0 || east > 0.0 {
            report.off_diagonals_nonpositive = false;
        }
        if !(sys.diag[i] > 0.0) {
            report.diagonal_positive = false;
        }
        if (i > 0 && west == 0.0) || (i + 1 < n && east == 0.0) {
            report.irreducible = false;
        }
        let d = sys.diag[i].abs();
        let off = west.abs() + east.abs();
        if d < off - DOMINANCE_TOL * d {
            report.weakly_diagonally_dominant = false;
        }
        if d > off + DOMINANCE_TOL * d {
            report.strictly_dominant_row = true;
            reaches[i] = true;
            stack.push(i);
        }
    }
    // row i reaches row k when A[i][k] != 0; walk these edges backwards
    while let Some(k) = stack.pop() {
        if k + 1 < n && !reaches[k + 1] && sys.sub[k + 1] != 0.0 {
            reaches[k + 1] = true;
            stack.push(k + 1);
        }
        if k > 0 && !reaches[k - 1] && sys.sup[k - 1] != 0.0 {
            reaches[k - 1] = true;
            stack.push(k - 1);
        }
    }
    report.chained_to_strict_row = reaches.iter().all(|&r| r);
    report
}

/// `||A^{-1}||_inf`. For an M-matrix the inverse is non-negative and the norm
/// is `max(A^{-1} 1)`, one solve; otherwise every column is formed.
pub fn inverse_inf_norm(sys: &TridiagonalSystem) -> Result<f64> {
    if m_matrix_check(sys).passes() {
        let factors = ThomasFactors::new(sys)?;
        let ones = vec![1.0; sys.len()];
        Ok(factors.solve(&ones).into_iter().fold(0.0, f64::max))
    } else {
        inverse_inf_norm_by_columns(sys)
    }
}

/// `||A^{-1}||_inf` as the largest absolute row sum of the explicitly formed
/// inverse (`n` solves against unit vectors).
pub fn inverse_inf_norm_by_columns(sys: &TridiagonalSystem) -> Result<f64> {
    let n = sys.len();
    let factors = ThomasFactors::new(sys)?;
    let mut row_sums = vec![0.0; n];
    let mut unit = vec![0.0; n];
    for k in 0..n {
        unit[k] = 1.0;
        let column = factors.solve(&unit);
        unit[k] = 0.0;
        for (sum, v) in row_sums.iter_mut().zip(column) {
            *sum += v.abs();
        }
    }
    Ok(row_sums.into_iter().fold(0.0, f64::max))
}

/// Closed-form stability bound `-(1/b) ((1/J) ln B(J) + W(J))` with
/// `J = b / (eps + mu b)`, for constant `b != 0`. Informational only.
pub fn stability_bound(b: f64, eps_mu_b: f64) -> f64 {
    let j = b / eps_mu_b;
    -(ln_bernoulli(j) / j + weight(j)) / b
}
