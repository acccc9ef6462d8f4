//! Problem definitions, uniform grids and the built-in example library.
//!
//! A [`ProblemSpec`] describes
//!
//! ```text
//! (b phi - (eps + mu b) phi')' = s(x, phi) = q(x) - c(x) phi + g(x, phi)
//! ```
//!
//! on `(0, 1)` with Dirichlet data. For constant `b` this is
//! `-(eps + mu b) phi'' + b phi' = s`. The shifted advection term `b phi'(x - mu)`
//! of the underlying differential-difference equation enters only through the
//! effective diffusion `eps + mu b`. The reaction `c` is kept separate from the
//! source `q` so the assembly can fold it into the matrix; `g` is an optional
//! genuinely nonlinear source handled by fixed-point iteration.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};
use core::fmt;
use libm::{exp, expm1, log1p, sqrt};

/// Points used to validate `eps + mu b(x) > 0` at construction.
const DIFFUSION_SAMPLES: usize = 1001;

pub type FieldFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SourceHook = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A scalar coefficient field on `[0, 1]`.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Function(FieldFn),
}

impl ScalarField {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarField::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::Function(f) => f(x),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(v) => Some(*v),
            ScalarField::Function(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }
}

impl From<f64> for ScalarField {
    fn from(v: f64) -> Self {
        ScalarField::Constant(v)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(v) => write!(f, "Constant({v})"),
            ScalarField::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// A closed-form reference solution with optional analytic derivatives.
/// Missing derivatives are approximated by central differences.
#[derive(Clone, Debug)]
pub struct ExactSolution {
    value: ScalarField,
    first: Option<ScalarField>,
    second: Option<ScalarField>,
}

/// Step of the central first-derivative fallback.
const FD_STEP_FIRST: f64 = 1e-6;
/// Step of the five-point second-derivative fallback.
const FD_STEP_SECOND: f64 = 1e-3;

impl ExactSolution {
    pub fn new(value: ScalarField) -> Self {
        ExactSolution {
            value,
            first: None,
            second: None,
        }
    }

    pub fn with_derivatives(value: ScalarField, first: ScalarField, second: ScalarField) -> Self {
        ExactSolution {
            value,
            first: Some(first),
            second: Some(second),
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.first.is_some() && self.second.is_some()
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.value.eval(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.first {
            Some(d) => d.eval(x),
            None => {
                let h = FD_STEP_FIRST;
                (self.value(x + h) - self.value(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match &self.second {
            Some(d) => d.eval(x),
            None => {
                let h = FD_STEP_SECOND;
                let f = |k: f64| self.value(x + k * h);
                (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0))
                    / (12.0 * h * h)
            }
        }
    }
}

/// Five-point first derivative of a field.
fn central_difference(field: &ScalarField, x: f64) -> f64 {
    let h = 2e-4;
    let f = |k: f64| field.eval(x + k * h);
    (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h)
}

/// Validated problem definition. Immutable once built.
#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    epsilon: f64,
    mu: f64,
    advection: ScalarField,
    reaction: ScalarField,
    source: ScalarField,
    nonlinear: Option<SourceHook>,
    phi_left: f64,
    phi_right: f64,
    exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("mu", &self.mu)
            .field("advection", &self.advection)
            .field("reaction", &self.reaction)
            .field("source", &self.source)
            .field("nonlinear", &self.nonlinear.is_some())
            .field("phi_left", &self.phi_left)
            .field("phi_right", &self.phi_right)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn builder(name: impl Into<String>, epsilon: f64) -> ProblemBuilder {
        ProblemBuilder {
            name: name.into(),
            epsilon,
            mu: 0.0,
            advection: ScalarField::Constant(0.0),
            reaction: ScalarField::Constant(0.0),
            source: ScalarField::Constant(0.0),
            nonlinear: None,
            phi_left: 0.0,
            phi_right: 0.0,
            exact: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn advection(&self) -> &ScalarField {
        &self.advection
    }
    pub fn reaction(&self) -> &ScalarField {
        &self.reaction
    }
    pub fn source(&self) -> &ScalarField {
        &self.source
    }
    pub fn nonlinear_source(&self) -> Option<&SourceHook> {
        self.nonlinear.as_ref()
    }
    pub fn phi_left(&self) -> f64 {
        self.phi_left
    }
    pub fn phi_right(&self) -> f64 {
        self.phi_right
    }
    pub fn exact(&self) -> Option<&ExactSolution> {
        self.exact.as_ref()
    }

    /// `eps + mu b(x)`.
    #[inline]
    pub fn effective_diffusion(&self, x: f64) -> f64 {
        self.epsilon + self.mu * self.advection.eval(x)
    }

    /// Full source `q(x) - c(x) phi + g(x, phi)`.
    pub fn source_at(&self, x: f64, phi: f64) -> f64 {
        let mut s = self.source.eval(x) - self.reaction.eval(x) * phi;
        if let Some(g) = &self.nonlinear {
            s += g(x, phi);
        }
        s
    }

    /// Applies the flux divergence `(b u - (eps + mu b) u')'` to the exact
    /// solution. A variable `b` is differentiated by central differences.
    pub fn apply_operator(&self, exact: &ExactSolution, x: f64) -> f64 {
        let base = -self.effective_diffusion(x) * exact.second_derivative(x)
            + self.advection.eval(x) * exact.derivative(x);
        if self.advection.as_constant().is_some() {
            return base;
        }
        let db = central_difference(&self.advection, x);
        base + db * (exact.value(x) - self.mu * exact.derivative(x))
    }
}

pub struct ProblemBuilder {
    name: String,
    epsilon: f64,
    mu: f64,
    advection: ScalarField,
    reaction: ScalarField,
    source: ScalarField,
    nonlinear: Option<SourceHook>,
    phi_left: f64,
    phi_right: f64,
    exact: Option<ExactSolution>,
}

impl ProblemBuilder {
    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }
    pub fn advection(mut self, b: impl Into<ScalarField>) -> Self {
        self.advection = b.into();
        self
    }
    pub fn reaction(mut self, c: impl Into<ScalarField>) -> Self {
        self.reaction = c.into();
        self
    }
    pub fn source(mut self, q: impl Into<ScalarField>) -> Self {
        self.source = q.into();
        self
    }
    pub fn nonlinear_source<F>(mut self, g: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.nonlinear = Some(Arc::new(g));
        self
    }
    pub fn boundary(mut self, phi_left: f64, phi_right: f64) -> Self {
        self.phi_left = phi_left;
        self.phi_right = phi_right;
        self
    }
    pub fn exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn build(self) -> Result<ProblemSpec> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
            });
        }
        if !self.phi_left.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi_left",
                value: self.phi_left,
            });
        }
        if !self.phi_right.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi_right",
                value: self.phi_right,
            });
        }
        let spec = ProblemSpec {
            name: self.name,
            epsilon: self.epsilon,
            mu: self.mu,
            advection: self.advection,
            reaction: self.reaction,
            source: self.source,
            nonlinear: self.nonlinear,
            phi_left: self.phi_left,
            phi_right: self.phi_right,
            exact: self.exact,
        };
        for k in 0..DIFFUSION_SAMPLES {
            let x = k as f64 / (DIFFUSION_SAMPLES - 1) as f64;
            let d = spec.effective_diffusion(x);
            // written to also reject NaN
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::NonPositiveDiffusion { x, value: d });
            }
        }
        Ok(spec)
    }
}

/// `eps + mu b(x)` for `x` in `[0, 1]`.
pub fn effective_diffusion(spec: &ProblemSpec, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    let d = spec.effective_diffusion(x);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::NonPositiveDiffusion { x, value: d })
    }
}

/// Uniform grid on `[0, 1]` with `n_points` nodes and `n_points - 1` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    h: f64,
    nodes: Vec<f64>,
    interfaces: Vec<f64>,
}

impl Grid {
    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    /// Midpoints `x_{j+1/2}` between consecutive nodes.
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }
    pub fn n_interfaces(&self) -> usize {
        self.interfaces.len()
    }
}

pub fn make_grid(n_points: usize) -> Result<Grid> {
    if n_points < 3 {
        return Err(Error::TooFewPoints { n_points });
    }
    let cells = n_points - 1;
    let h = 1.0 / cells as f64;
    let mut nodes: Vec<f64> = (0..n_points).map(|j| j as f64 / cells as f64).collect();
    nodes[cells] = 1.0;
    let interfaces = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(Grid { h, nodes, interfaces })
}

/// The seven reference problems with closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinExample {
    /// `b = 1`, `mu = eps/10`, no source, layer at `x = 1`.
    Ex1,
    /// `b = 1`, `q = e^x`, homogeneous boundary data.
    Ex2,
    /// `b = -1`, `mu = eps/5`, `s = -phi`, layer at `x = 0`.
    Ex3,
    /// `b = 1`, `s = -(1 + eps) phi`.
    Ex4,
    /// `b = -1`, `q = -(1 + 2x)`, layer at `x = 0`.
    Ex5,
    /// `b = 0`, `s = x - phi`, reaction-diffusion layer at `x = 0`.
    Ex6,
    /// `b = 1/(x+1)`, `c = 1/(x+2)`, manufactured source.
    Ex7,
}

/// Default `eps` for demonstration runs of the built-in examples.
pub const DEFAULT_EPSILON: f64 = 1e-2;

impl BuiltinExample {
    pub const ALL: [BuiltinExample; 7] = [
        BuiltinExample::Ex1,
        BuiltinExample::Ex2,
        BuiltinExample::Ex3,
        BuiltinExample::Ex4,
        BuiltinExample::Ex5,
        BuiltinExample::Ex6,
        BuiltinExample::Ex7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinExample::Ex1 => "ex1",
            BuiltinExample::Ex2 => "ex2",
            BuiltinExample::Ex3 => "ex3",
            BuiltinExample::Ex4 => "ex4",
            BuiltinExample::Ex5 => "ex5",
            BuiltinExample::Ex6 => "ex6",
            BuiltinExample::Ex7 => "ex7",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// One-line description of the coefficients and boundary data.
    pub fn summary(self) -> &'static str {
        match self {
            BuiltinExample::Ex1 => "b=1, mu=0.1*eps, s=0, phi(0)=1, phi(1)=0; layer at x=1",
            BuiltinExample::Ex2 => "b=1, mu=0, s=exp(x), phi(0)=phi(1)=0; layer at x=1",
            BuiltinExample::Ex3 => "b=-1, mu=0.2*eps, s=-phi, phi(0)=phi(1)=1; layer at x=0",
            BuiltinExample::Ex4 => "b=1, mu=0, s=-(1+eps)*phi, exact exp((1+eps)(x-1)/eps)+exp(-x)",
            BuiltinExample::Ex5 => "b=-1, mu=0, s=-(1+2x), phi(0)=0, phi(1)=1; layer at x=0",
            BuiltinExample::Ex6 => "b=0, s=x-phi, exact exp(-x/sqrt(eps))+x; layer at x=0",
            BuiltinExample::Ex7 => {
                "b=1/(x+1), c=1/(x+2), manufactured s, exact exp(x)+2^(-1/eps)(x+1)^(1+1/eps)"
            }
        }
    }

    /// The shift used when none is given, as a multiple of `eps`.
    pub fn default_mu_ratio(self) -> f64 {
        match self {
            BuiltinExample::Ex1 => 0.1,
            BuiltinExample::Ex3 => 0.2,
            _ => 0.0,
        }
    }

    /// Builds the problem at `epsilon` with the default shift.
    pub fn spec(self, epsilon: f64) -> Result<ProblemSpec> {
        self.spec_with_mu(epsilon, self.default_mu_ratio() * epsilon)
    }

    /// Builds the problem with an explicit shift. Ex4's closed form only holds
    /// for `mu = 0`; with any other shift it is built without an exact
    /// solution.
    pub fn spec_with_mu(self, epsilon: f64, mu: f64) -> Result<ProblemSpec> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
            });
        }
        let eps = epsilon;
        let builder = ProblemSpec::builder(self.name(), eps).mu(mu);
        match self {
            BuiltinExample::Ex1 => {
                let d = eps + mu;
                let denom = -expm1(-1.0 / d);
                let value = move |x: f64| -expm1(-(1.0 - x) / d) / denom;
                let first = move |x: f64| -exp(-(1.0 - x) / d) / (d * denom);
                let second = move |x: f64| -exp(-(1.0 - x) / d) / (d * d * denom);
                builder
                    .advection(1.0)
                    .boundary(1.0, 0.0)
                    .exact(exact_from(value, first, second))
                    .build()
            }
            BuiltinExample::Ex2 => {
                let d = eps + mu;
                let denom = -expm1(-1.0 / d);
                let scale = 1.0 / (1.0 - d);
                let layer = move |x: f64| exp((x - 1.0) / d) / denom;
                let value = move |x: f64| {
                    let tail = (1.0 - exp(1.0 - 1.0 / d) - (1.0 - E) * exp((x - 1.0) / d)) / denom;
                    scale * (exp(x) - tail)
                };
                let first = move |x: f64| scale * (exp(x) + (1.0 - E) * layer(x) / d);
                let second = move |x: f64| scale * (exp(x) + (1.0 - E) * layer(x) / (d * d));
                builder
                    .advection(1.0)
                    .source(ScalarField::from_fn(exp))
                    .boundary(0.0, 0.0)
                    .exact(exact_from(value, first, second))
                    .build()
            }
            BuiltinExample::Ex3 => {
                // -(eps - mu) phi'' - phi' + phi = 0, roots of d m^2 + m - 1 = 0
                let d = eps - mu;
                let root = sqrt(1.0 + 4.0 * d);
                let m1 = 2.0 / (1.0 + root);
                let m2 = -(1.0 + root) / (2.0 * d);
                let denom = exp(m1) - exp(m2);
                let a1 = (1.0 - exp(m2)) / denom;
                let a2 = (exp(m1) - 1.0) / denom;
                let value = move |x: f64| a1 * exp(m1 * x) + a2 * exp(m2 * x);
                let first = move |x: f64| a1 * m1 * exp(m1 * x) + a2 * m2 * exp(m2 * x);
                let second =
                    move |x: f64| a1 * m1 * m1 * exp(m1 * x) + a2 * m2 * m2 * exp(m2 * x);
                builder
                    .advection(-1.0)
                    .reaction(1.0)
                    .boundary(1.0, 1.0)
                    .exact(exact_from(value, first, second))
                    .build()
            }
            BuiltinExample::Ex4 => {
                let k = (1.0 + eps) / eps;
                let value = move |x: f64| exp(k * (x - 1.0)) + exp(-x);
                let first = move |x: f64| k * exp(k * (x - 1.0)) - exp(-x);
                let second = move |x: f64| k * k * exp(k * (x - 1.0)) + exp(-x);
                let builder = builder
                    .advection(1.0)
                    .reaction(1.0 + eps)
                    .boundary(value(0.0), value(1.0));
                if mu == 0.0 {
                    builder.exact(exact_from(value, first, second)).build()
                } else {
                    builder.build()
                }
            }
            BuiltinExample::Ex5 => {
                let d = eps - mu;
                let denom = -expm1(-1.0 / d);
                let value = move |x: f64| {
                    x * (x + 1.0 - 2.0 * d) + (2.0 * d - 1.0) * (-expm1(-x / d)) / denom
                };
                let first = move |x: f64| {
                    2.0 * x + 1.0 - 2.0 * d + (2.0 * d - 1.0) * exp(-x / d) / (d * denom)
                };
                let second =
                    move |x: f64| 2.0 - (2.0 * d - 1.0) * exp(-x / d) / (d * d * denom);
                builder
                    .advection(-1.0)
                    .source(ScalarField::from_fn(|x| -(1.0 + 2.0 * x)))
                    .boundary(0.0, 1.0)
                    .exact(exact_from(value, first, second))
                    .build()
            }
            BuiltinExample::Ex6 => {
                let r = sqrt(eps);
                let value = move |x: f64| exp(-x / r) + x;
                let first = move |x: f64| -exp(-x / r) / r + 1.0;
                let second = move |x: f64| exp(-x / r) / eps;
                builder
                    .reaction(1.0)
                    .source(ScalarField::from_fn(|x| x))
                    .boundary(1.0, value(1.0))
                    .exact(exact_from(value, first, second))
                    .build()
            }
            BuiltinExample::Ex7 => {
                let p = 1.0 + 1.0 / eps;
                // 2^{-1/eps} (x+1)^{1+1/eps}, evaluated in log space
                let layer = move |x: f64| exp(-LN_2 / eps + p * log1p(x));
                let value = move |x: f64| exp(x) + layer(x);
                let first = move |x: f64| exp(x) + p * layer(x) / (1.0 + x);
                let second =
                    move |x: f64| exp(x) + p * (p - 1.0) * layer(x) / ((1.0 + x) * (1.0 + x));
                let b = |x: f64| 1.0 / (x + 1.0);
                let db = |x: f64| -1.0 / ((x + 1.0) * (x + 1.0));
                let c = |x: f64| 1.0 / (x + 2.0);
                let q = move |x: f64| {
                    let flux_div = -(eps + mu * b(x)) * second(x) + (b(x) - mu * db(x)) * first(x)
                        + db(x) * value(x);
                    flux_div + c(x) * value(x)
                };
                builder
                    .advection(ScalarField::from_fn(b))
                    .reaction(ScalarField::from_fn(c))
                    .source(ScalarField::from_fn(q))
                    .boundary(value(0.0), value(1.0))
                    .exact(exact_from(value, first, second))
                    .build()
            }
        }
    }
}

impl fmt::Display for BuiltinExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn exact_from<V, D1, D2>(value: V, first: D1, second: D2) -> ExactSolution
where
    V: Fn(f64) -> f64 + Send + Sync + 'static,
    D1: Fn(f64) -> f64 + Send + Sync + 'static,
    D2: Fn(f64) -> f64 + Send + Sync + 'static,
{
    ExactSolution::with_derivatives(
        ScalarField::from_fn(value),
        ScalarField::from_fn(first),
        ScalarField::from_fn(second),
    )
}

/// All seven built-in problems at [`DEFAULT_EPSILON`].
pub fn builtin_examples() -> Vec<ProblemSpec> {
    BuiltinExample::ALL
        .iter()
        .map(|e| e.spec(DEFAULT_EPSILON).expect("built-in examples are valid"))
        .collect()
}

/// Human-readable parameter summary of a spec (used by listings).
pub fn describe(spec: &ProblemSpec) -> String {
    let field = |f: &ScalarField| match f.as_constant() {
        Some(v) => format!("{v}"),
        None => "x-dependent".to_string(),
    };
    format!(
        "{}: eps={:e}, mu={:e}, b={}, c={}, q={}, phi_L={}, phi_R={}",
        spec.name(),
        spec.epsilon(),
        spec.mu(),
        field(spec.advection()),
        field(spec.reaction()),
        field(spec.source()),
        spec.phi_left(),
        spec.phi_right()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = make_grid(3).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.interfaces(), &[0.25, 0.75]);

        let g = make_grid(101).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-17);
        assert_eq!(g.nodes()[50], 0.5);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[100], 1.0);
        for w in g.nodes().windows(2) {
            assert!((w[1] - w[0] - g.h()).abs() <= 1e-15);
        }

        assert!((make_grid(21).unwrap().h() - 0.05).abs() < 1e-17);
        assert_eq!(make_grid(2), Err(Error::TooFewPoints { n_points: 2 }));
    }

    #[test]
    fn effective_diffusion_examples() {
        let s = ProblemSpec::builder("a", 0.01).mu(0.001).advection(1.0).build().unwrap();
        assert!((effective_diffusion(&s, 0.5).unwrap() - 0.011).abs() < 1e-16);
        let s = ProblemSpec::builder("b", 0.01).mu(0.002).advection(-1.0).build().unwrap();
        assert!((effective_diffusion(&s, 0.3).unwrap() - 0.008).abs() < 1e-16);
        let s = ProblemSpec::builder("c", 0.05)
            .advection(ScalarField::from_fn(|x| 7.0 * x - 3.0))
            .build()
            .unwrap();
        assert_eq!(effective_diffusion(&s, 0.7).unwrap(), 0.05);
    }

    #[test]
    fn rejects_bad_parameters() {
        let err = ProblemSpec::builder("neg", 0.01).mu(0.02).advection(-1.0).build();
        assert!(matches!(err, Err(Error::NonPositiveDiffusion { .. })));
        assert!(ProblemSpec::builder("zero", 0.0).build().is_err());
        assert!(ProblemSpec::builder("mu", 0.1).mu(-1.0).build().is_err());
        assert!(ProblemSpec::builder("bc", 0.1).boundary(f64::NAN, 0.0).build().is_err());
    }

    #[test]
    fn library_has_seven_examples_in_order() {
        let all = builtin_examples();
        assert_eq!(all.len(), 7);
        for (spec, e) in all.iter().zip(BuiltinExample::ALL) {
            assert_eq!(spec.name(), e.name());
            assert_eq!(BuiltinExample::from_name(e.name()), Some(e));
        }
        let ex1 = &all[0];
        assert_eq!((ex1.phi_left(), ex1.phi_right()), (1.0, 0.0));
        assert!((ex1.mu() - 0.001).abs() < 1e-18);
    }

    #[test]
    fn example_one_layer_value() {
        // 1 - exp(-0.01/0.011) up to the e^{-1/0.011} correction
        let ex1 = BuiltinExample::Ex1.spec_with_mu(0.01, 0.001).unwrap();
        let v = ex1.exact().unwrap().value(0.99);
        assert!((v - 0.597_109_678_470_867).abs() < 1e-12);
    }

    #[test]
    fn example_six_at_origin() {
        for eps in [1e-1, 1e-3, 1e-6] {
            let s = BuiltinExample::Ex6.spec(eps).unwrap();
            assert_eq!(s.exact().unwrap().value(0.0), 1.0);
        }
    }

    #[test]
    fn ex4_shift_drops_exact_solution() {
        assert!(BuiltinExample::Ex4.spec(0.01).unwrap().exact().is_some());
        assert!(BuiltinExample::Ex4.spec_with_mu(0.01, 0.001).unwrap().exact().is_none());
    }

    #[test]
    fn finite_difference_fallback() {
        let e = ExactSolution::new(ScalarField::from_fn(|x| libm::sin(3.0 * x)));
        assert!(!e.has_analytic_derivatives());
        let x = 0.4;
        assert!((e.derivative(x) - 3.0 * libm::cos(3.0 * x)).abs() < 1e-8);
        assert!((e.second_derivative(x) + 9.0 * libm::sin(3.0 * x)).abs() < 1e-8);
    }
}
