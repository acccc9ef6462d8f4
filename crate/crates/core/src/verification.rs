//! Verification tools: the integral-representation flux oracle, error norms,
//! truncation error and grid-convergence studies.

use crate::assembly::{solve, stencil_rows, Solution};
use crate::error::{Error, Result};
use crate::problem::{ExactSolution, Grid, ProblemSpec};
use crate::quadrature::integrate;
use crate::special::{green_flux, GreenSide};
use alloc::string::String;
use alloc::vec::Vec;
use libm::{exp, log, round};

/// Absolute tolerance of the oracle's outer integrals.
pub const ORACLE_TOLERANCE: f64 = 1e-12;
const INNER_TOLERANCE: f64 = 1e-14;

/// Errors at or below this level are treated as round-off; no convergence
/// order is computed from them.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Step sizes of the standard refinement study.
pub const STANDARD_STEPS: [f64; 5] = [0.05, 0.025, 0.0125, 0.00625, 0.003125];

/// Homogeneous and inhomogeneous parts of the exact interface flux of the
/// local two-point problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleFlux {
    pub homogeneous: f64,
    pub inhomogeneous: f64,
}

impl OracleFlux {
    pub fn total(&self) -> f64 {
        self.homogeneous + self.inhomogeneous
    }
}

/// Evaluates the interface flux of cell `[x_j, x_{j+1}]` from its integral
/// representation
///
/// ```text
/// f_h =  (phi_j e^{-L_j} - phi_{j+1} e^{-L_{j+1}}) / <1/d, e^{-L}>
/// f_i = -<S/d, e^{-L}> / <1/d, e^{-L}>
/// ```
///
/// where `d = eps + mu b`, `L` is the running integral of `b/d` from the
/// interface and `S` the running integral of the source. Inside the cell the
/// source is evaluated at the linear interpolant of the two nodal values.
pub fn flux_oracle(
    spec: &ProblemSpec,
    grid: &Grid,
    j: usize,
    phi_left: f64,
    phi_right: f64,
) -> Result<OracleFlux> {
    let n = grid.n_interfaces();
    if j >= n {
        return Err(Error::InterfaceOutOfRange { index: j, interfaces: n });
    }
    let (xl, xr) = (grid.nodes()[j], grid.nodes()[j + 1]);
    let xm = grid.interfaces()[j];
    let h = xr - xl;

    let lambda = |x: f64| spec.advection().eval(x) / spec.effective_diffusion(x);
    let phi_lin = |x: f64| phi_left + (phi_right - phi_left) * (x - xl) / h;
    let source = |x: f64| spec.source_at(x, phi_lin(x));

    // Inner integrals; an error aborts the outer integral through NaN.
    let inner = |f: &dyn Fn(f64) -> f64, x: f64| integrate(f, xm, x, INNER_TOLERANCE).unwrap_or(f64::NAN);
    let peclet_integral = |x: f64| inner(&lambda, x);
    let source_integral = |x: f64| inner(&source, x);

    let (lam_l, lam_r) = (peclet_integral(xl), peclet_integral(xr));
    // shift so every weight e^{-L - shift} is at most about one
    let shift = (-lam_l).max(-lam_r);
    let weight = |x: f64| exp(-peclet_integral(x) - shift);

    let split = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(integrate(f, xl, xm, ORACLE_TOLERANCE)? + integrate(f, xm, xr, ORACLE_TOLERANCE)?)
    };
    let denom = split(&|x| weight(x) / spec.effective_diffusion(x))?;
    let numer = split(&|x| weight(x) * source_integral(x) / spec.effective_diffusion(x))?;
    let homogeneous = (phi_left * exp(-lam_l - shift) - phi_right * exp(-lam_r - shift)) / denom;
    let result = OracleFlux {
        homogeneous,
        inhomogeneous: -numer / denom,
    };
    if result.homogeneous.is_finite() && result.inhomogeneous.is_finite() {
        Ok(result)
    } else {
        Err(Error::QuadratureNotConverged {
            achieved: f64::NAN,
            requested: INNER_TOLERANCE,
        })
    }
}

/// `h * int_0^1 G(sigma; p) s(sigma) d sigma` with the constant-coefficient
/// flux Green's function, splitting the integral at its jump.
pub fn green_inhomogeneous_flux<F: Fn(f64) -> f64>(p: f64, h: f64, s: F) -> Result<f64> {
    let left = integrate(
        |sig| green_flux(sig, p, GreenSide::Left).unwrap_or(f64::NAN) * s(sig),
        0.0,
        0.5,
        ORACLE_TOLERANCE,
    )?;
    let right = integrate(
        |sig| green_flux(sig, p, GreenSide::Right).unwrap_or(f64::NAN) * s(sig),
        0.5,
        1.0,
        ORACLE_TOLERANCE,
    )?;
    Ok(h * (left + right))
}

/// `max_j |phi_j - phi(x_j)|`.
pub fn max_norm_error(sol: &Solution, exact: &ExactSolution) -> f64 {
    sol.grid
        .nodes()
        .iter()
        .zip(&sol.values)
        .fold(0.0, |m, (&x, &v)| m.max((v - exact.value(x)).abs()))
}

/// `tau_j = L^h phi(x_j) - W^h (L phi)(x_j)` at interior nodes, with `L` the
/// continuous advection-diffusion operator applied to the exact solution.
pub fn truncation_error(spec: &ProblemSpec, exact: &ExactSolution, grid: &Grid) -> Result<Vec<f64>> {
    let rows = stencil_rows(spec, grid)?;
    let x = grid.nodes();
    let phi: Vec<f64> = x.iter().map(|&xk| exact.value(xk)).collect();
    let l_phi: Vec<f64> = x.iter().map(|&xk| spec.apply_operator(exact, xk)).collect();
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let j = i + 1;
            row.apply_difference(phi[j - 1], phi[j], phi[j + 1])
                - row.apply_weighting(l_phi[j - 1], l_phi[j], l_phi[j + 1])
        })
        .collect())
}

/// `F_{j+1/2} - F_{j-1/2} - s_j h` at every interior node.
pub fn conservation_residuals(spec: &ProblemSpec, sol: &Solution) -> Result<Vec<f64>> {
    let fluxes = sol.interface_fluxes(spec)?;
    let s = sol.nodal_source(spec);
    let h = sol.grid.h();
    Ok(fluxes
        .windows(2)
        .enumerate()
        .map(|(i, f)| f[1] - f[0] - s[i + 1] * h)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub n_points: usize,
    pub max_error: f64,
    /// `log(e_prev / e) / log(h_prev / h)`; absent on the first row or when
    /// either error is at round-off level.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub problem_name: String,
    pub epsilon: f64,
    pub mu: f64,
    /// Sorted by decreasing `h`.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log e` against `log h`; absent when fewer than
    /// two rows or any error is at round-off level.
    pub lsq_slope: Option<f64>,
}

impl ConvergenceReport {
    /// Builds a report from raw rows, recomputing the derived orders.
    pub fn from_rows(problem_name: String, epsilon: f64, mu: f64, mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        for k in 0..rows.len() {
            rows[k].observed_order = if k == 0 {
                None
            } else {
                observed_order(rows[k - 1].h, rows[k - 1].max_error, rows[k].h, rows[k].max_error)
            };
        }
        let lsq_slope = if rows.len() >= 2 && rows.iter().all(|r| r.max_error > ROUNDOFF_FLOOR) {
            let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
            let es: Vec<f64> = rows.iter().map(|r| r.max_error).collect();
            Some(lsq_slope(&hs, &es))
        } else {
            None
        };
        ConvergenceReport {
            problem_name,
            epsilon,
            mu,
            rows,
            lsq_slope,
        }
    }

    /// True when every error is at round-off level (the scheme is exact).
    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(|r| r.max_error <= ROUNDOFF_FLOOR)
    }
}

fn observed_order(h0: f64, e0: f64, h1: f64, e1: f64) -> Option<f64> {
    if e0 <= ROUNDOFF_FLOOR || e1 <= ROUNDOFF_FLOOR {
        None
    } else {
        Some(log(e0 / e1) / log(h0 / h1))
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| log(*v)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Number of grid points for step `h`; `1/h` must be an integer.
pub fn n_points_for_step(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidStepSize { h });
    }
    let cells = 1.0 / h;
    let rounded = round(cells);
    if (cells - rounded).abs() > 1e-9 * rounded {
        return Err(Error::InvalidStepSize { h });
    }
    Ok(rounded as usize + 1)
}

/// Solves `spec` on every step in `h_list` and tabulates max-norm errors
/// against its exact solution.
pub fn convergence_study(spec: &ProblemSpec, h_list: &[f64]) -> Result<ConvergenceReport> {
    let exact = spec.exact().ok_or(Error::MissingExactSolution)?;
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let n_points = n_points_for_step(h)?;
        let sol = solve(spec, n_points)?;
        rows.push(ConvergenceRow {
            h: sol.grid.h(),
            n_points,
            max_error: max_norm_error(&sol, exact),
            observed_order: None,
        });
    }
    Ok(ConvergenceReport::from_rows(
        String::from(spec.name()),
        spec.epsilon(),
        spec.mu(),
        rows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{homogeneous_flux_const, inhomogeneous_flux_const};
    use crate::problem::{make_grid, BuiltinExample, ScalarField};

    #[test]
    fn step_sizes_must_divide_the_domain() {
        assert_eq!(n_points_for_step(0.05).unwrap(), 21);
        assert_eq!(n_points_for_step(0.003125).unwrap(), 321);
        assert!(n_points_for_step(0.3).is_err());
        assert!(n_points_for_step(0.0).is_err());
        assert!(n_points_for_step(-0.1).is_err());
    }

    #[test]
    fn oracle_matches_closed_forms_for_constant_coefficients() {
        let (eps, b, s) = (0.05, 1.0, 2.0);
        let spec = ProblemSpec::builder("c", eps).advection(b).source(s).build().unwrap();
        let grid = make_grid(11).unwrap();
        let p = b * grid.h() / eps;
        let of = flux_oracle(&spec, &grid, 4, 0.7, 0.2).unwrap();
        let fh = homogeneous_flux_const(eps, grid.h(), p, 0.7, 0.2);
        let fi = inhomogeneous_flux_const(p, s, grid.h());
        assert!((of.homogeneous - fh).abs() <= 1e-11, "{} vs {fh}", of.homogeneous);
        assert!((of.inhomogeneous - fi).abs() <= 1e-11, "{} vs {fi}", of.inhomogeneous);
        let green = green_inhomogeneous_flux(p, grid.h(), |_| s).unwrap();
        assert!((green - fi).abs() <= 1e-10);
    }

    #[test]
    fn linear_solution_has_zero_truncation_error() {
        let b = -1.5;
        let spec = ProblemSpec::builder("lin", 0.02)
            .advection(b)
            .source(b * 3.0)
            .boundary(1.0, 4.0)
            .build()
            .unwrap();
        let exact = ExactSolution::with_derivatives(
            ScalarField::from_fn(|x| 1.0 + 3.0 * x),
            ScalarField::Constant(3.0),
            ScalarField::Constant(0.0),
        );
        for n in [5, 33] {
            let tau = truncation_error(&spec, &exact, &make_grid(n).unwrap()).unwrap();
            assert!(tau.iter().all(|t| t.abs() <= 1e-10));
        }
    }

    #[test]
    fn exact_layer_has_zero_truncation_error() {
        let spec = BuiltinExample::Ex1.spec(1e-2).unwrap();
        let tau = truncation_error(&spec, spec.exact().unwrap(), &make_grid(41).unwrap()).unwrap();
        assert!(tau.iter().all(|t| t.abs() <= 1e-10), "{tau:?}");
    }

    #[test]
    fn exactness_study_flags_missing_slope() {
        let spec = BuiltinExample::Ex1.spec(1e-2).unwrap();
        let report = convergence_study(&spec, &STANDARD_STEPS).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert!(report.rows.iter().all(|r| r.max_error <= 1e-10));
        assert!(report.is_exact());
        assert_eq!(report.lsq_slope, None);
    }

    #[test]
    fn rows_sorted_and_orders_derived() {
        let spec = BuiltinExample::Ex6.spec(1e-2).unwrap();
        let report = convergence_study(&spec, &[0.0125, 0.05, 0.025]).unwrap();
        let hs: Vec<f64> = report.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, [0.05, 0.025, 0.0125]);
        assert!(report.rows[0].observed_order.is_none());
        assert!(report.rows[1..].iter().all(|r| r.observed_order.is_some()));
        assert!(report.lsq_slope.is_some());
    }

    #[test]
    fn study_needs_exact_solution() {
        let spec = ProblemSpec::builder("none", 0.1).build().unwrap();
        assert_eq!(convergence_study(&spec, &[0.1]), Err(Error::MissingExactSolution));
    }

    #[test]
    fn lsq_slope_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|v| 3.0 * v * v).collect();
        assert!((lsq_slope(&h, &e) - 2.0).abs() < 1e-12);
    }
}
