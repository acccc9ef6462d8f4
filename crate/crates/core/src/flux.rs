//! Interface Péclet data, scheme coefficients and numerical fluxes.
//!
//! For the interface between `x_j` and `x_{j+1}` the numerical flux is
//!
//! ```text
//! F = alpha phi_j - beta phi_{j+1} + h (gamma s_j + delta s_{j+1})
//! alpha = (eps_i / h) B(-P),   beta = (eps_i / h) B(P)
//! gamma = max(1/2 - W(P), 0),  delta = min(1/2 - W(P), 0)
//! ```
//!
//! with `P` the trapezoidal Péclet number of the cell and `eps_i` the
//! interface diffusion built from `W`-weighted averages.

use crate::error::{Error, Result};
use crate::problem::{Grid, ProblemSpec};
use crate::special::{bernoulli, half_minus_weight};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PecletData {
    /// `b / (eps + mu b)` at the left node.
    pub lambda_left: f64,
    pub lambda_right: f64,
    /// Trapezoidal average of `lambda`.
    pub lambda_bar: f64,
    /// `h * lambda_bar`.
    pub p_bar: f64,
    /// `W(-P) lambda_left + W(P) lambda_right`.
    pub lambda_tilde: f64,
    /// `W(-P) d_left + W(P) d_right` with `d = eps + mu b`.
    pub eps_tilde: f64,
    /// `(lambda_tilde / lambda_bar) * eps_tilde`.
    pub eps_interface: f64,
    /// Arithmetic mean of `b` at the two nodes; picks the upwind source.
    pub b_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Péclet data for interface `j` (zero-based, between nodes `j` and `j + 1`).
pub fn interface_peclet(spec: &ProblemSpec, grid: &Grid, j: usize) -> Result<PecletData> {
    let n = grid.n_interfaces();
    if j >= n {
        return Err(Error::InterfaceOutOfRange {
            index: j,
            interfaces: n,
        });
    }
    let x = grid.nodes();
    let (xl, xr) = (x[j], x[j + 1]);
    let (bl, br) = (spec.advection().eval(xl), spec.advection().eval(xr));
    let (dl, dr) = (spec.effective_diffusion(xl), spec.effective_diffusion(xr));
    if !(dl > 0.0) {
        return Err(Error::NonPositiveDiffusion { x: xl, value: dl });
    }
    if !(dr > 0.0) {
        return Err(Error::NonPositiveDiffusion { x: xr, value: dr });
    }
    let pd = peclet_from_nodes(bl, br, dl, dr, grid.h());
    if !(pd.eps_interface > 0.0) {
        return Err(Error::NonPositiveInterfaceDiffusion {
            interface: j,
            value: pd.eps_interface,
        });
    }
    Ok(pd)
}

/// Péclet data from nodal advection `b` and effective diffusion `d`.
pub fn peclet_from_nodes(bl: f64, br: f64, dl: f64, dr: f64, h: f64) -> PecletData {
    let (ll, lr) = (bl / dl, br / dr);
    let lambda_bar = 0.5 * (ll + lr);
    let p_bar = h * lambda_bar;
    // W(-P) = 1/2 + hw and W(P) = 1/2 - hw, so both weighted averages are the
    // plain means plus an hw-weighted difference. The ratio lambda_tilde /
    // lambda_bar stays finite as lambda_bar -> 0.
    let hw = half_minus_weight(p_bar);
    let ratio = if lambda_bar == 0.0 {
        1.0 + h * (ll - lr) / 12.0
    } else {
        1.0 + hw * (ll - lr) / lambda_bar
    };
    let eps_tilde = 0.5 * (dl + dr) + hw * (dl - dr);
    PecletData {
        lambda_left: ll,
        lambda_right: lr,
        lambda_bar,
        p_bar,
        lambda_tilde: lambda_bar * ratio,
        eps_tilde,
        eps_interface: ratio * eps_tilde,
        b_bar: 0.5 * (bl + br),
    }
}

pub fn interface_coefficients(pd: &PecletData, h: f64) -> InterfaceCoefficients {
    let scale = pd.eps_interface / h;
    let hw = half_minus_weight(pd.p_bar);
    InterfaceCoefficients {
        alpha: scale * bernoulli(-pd.p_bar),
        beta: scale * bernoulli(pd.p_bar),
        gamma: hw.max(0.0),
        delta: hw.min(0.0),
    }
}

/// Péclet data and coefficients for every interface of the grid.
pub fn interface_table(
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Vec<(PecletData, InterfaceCoefficients)>> {
    (0..grid.n_interfaces())
        .map(|j| {
            let pd = interface_peclet(spec, grid, j)?;
            Ok((pd, interface_coefficients(&pd, grid.h())))
        })
        .collect()
}

/// `alpha phi_left - beta phi_right + h (gamma s_left + delta s_right)`.
#[inline]
pub fn numerical_flux(
    ic: &InterfaceCoefficients,
    phi_left: f64,
    phi_right: f64,
    s_left: f64,
    s_right: f64,
    h: f64,
) -> f64 {
    ic.alpha * phi_left - ic.beta * phi_right + h * (ic.gamma * s_left + ic.delta * s_right)
}

/// Constant-coefficient homogeneous flux `(d/h) [B(-P) phi_left - B(P) phi_right]`.
pub fn homogeneous_flux_const(eps_mu_b: f64, h: f64, p: f64, phi_left: f64, phi_right: f64) -> f64 {
    eps_mu_b / h * (bernoulli(-p) * phi_left - bernoulli(p) * phi_right)
}

/// Constant-coefficient inhomogeneous flux `(1/2 - W(P)) s h`.
pub fn inhomogeneous_flux_const(p: f64, s_upwind: f64, h: f64) -> f64 {
    half_minus_weight(p) * s_upwind * h
}

/// Upwind source value: left node when `b_bar >= 0`, right node otherwise.
#[inline]
pub fn upwind_source(b_bar: f64, s_left: f64, s_right: f64) -> f64 {
    if b_bar >= 0.0 {
        s_left
    } else {
        s_right
    }
}
