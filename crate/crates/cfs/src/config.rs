//! Plain-text problem files.
//!
//! One `key = value` pair per line; `#` starts a comment. Recognised keys:
//!
//! ```text
//! name      = free text (defaults to the file stem)
//! epsilon   = number
//! mu        = number
//! b, c, q   = expressions in x (zero when absent)
//! phi_left  = constant expression
//! phi_right = constant expression
//! exact     = expression in x (optional reference solution)
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use cfs_core::problem::DEFAULT_EPSILON;
use cfs_core::{ExactSolution, ProblemSpec};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError};

const KEYS: [&str; 9] = ["name", "epsilon", "mu", "b", "c", "q", "phi_left", "phi_right", "exact"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}' given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key}: {source}")]
    Expr {
        line: usize,
        key: String,
        #[source]
        source: ExprError,
    },
    #[error("line {line}: {key} must not depend on x")]
    NotConstant { line: usize, key: String },
    #[error("invalid problem: {0}")]
    Problem(#[from] cfs_core::Error),
}

/// A parsed problem file. `epsilon` and `mu` may be overridden when the problem
/// is built.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub name: String,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub b: Expr,
    pub c: Expr,
    pub q: Expr,
    pub phi_left: f64,
    pub phi_right: f64,
    pub exact: Option<Expr>,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let stem = path.file_stem().map_or_else(|| "problem".to_string(), |s| s.to_string_lossy().into_owned());
        Self::parse(&text, &stem)
    }

    pub fn parse(text: &str, default_name: &str) -> Result<Self, ConfigError> {
        let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if entries.insert(key, (line, value)).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
        }

        let expr = |key: &str| -> Result<Option<(usize, Expr)>, ConfigError> {
            entries
                .get(key)
                .map(|&(line, value)| {
                    parse(value).map(|e| (line, e)).map_err(|source| ConfigError::Expr {
                        line,
                        key: key.to_string(),
                        source,
                    })
                })
                .transpose()
        };
        let constant = |key: &str| -> Result<Option<f64>, ConfigError> {
            match expr(key)? {
                None => Ok(None),
                Some((line, e)) => e
                    .as_constant()
                    .map(Some)
                    .ok_or(ConfigError::NotConstant { line, key: key.to_string() }),
            }
        };
        let field = |key: &str| -> Result<Expr, ConfigError> { Ok(expr(key)?.map_or(Expr::Num(0.0), |(_, e)| e)) };

        Ok(ProblemConfig {
            name: entries
                .get("name")
                .map_or_else(|| default_name.to_string(), |(_, v)| v.to_string()),
            epsilon: constant("epsilon")?,
            mu: constant("mu")?,
            b: field("b")?,
            c: field("c")?,
            q: field("q")?,
            phi_left: constant("phi_left")?.unwrap_or(0.0),
            phi_right: constant("phi_right")?.unwrap_or(0.0),
            exact: expr("exact")?.map(|(_, e)| e),
        })
    }

    /// Builds the problem; explicit arguments win over the file's values.
    pub fn to_spec(&self, epsilon: Option<f64>, mu: Option<f64>) -> Result<ProblemSpec, ConfigError> {
        let eps = epsilon.or(self.epsilon).unwrap_or(DEFAULT_EPSILON);
        let mut builder = ProblemSpec::builder(self.name.clone(), eps)
            .mu(mu.or(self.mu).unwrap_or(0.0))
            .advection(self.b.clone().into_field())
            .reaction(self.c.clone().into_field())
            .source(self.q.clone().into_field())
            .boundary(self.phi_left, self.phi_right);
        if let Some(exact) = &self.exact {
            builder = builder.exact(ExactSolution::new(exact.clone().into_field()));
        }
        Ok(builder.build()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX2_LIKE: &str = "\
# advection with exponential source
name = custom
epsilon = 1e-2
b = 1
q = exp(x)   # trailing comment
phi_left = 0
phi_right = 0
";

    #[test]
    fn parses_and_builds() {
        let cfg = ProblemConfig::parse(EX2_LIKE, "file").unwrap();
        assert_eq!(cfg.name, "custom");
        assert_eq!(cfg.epsilon, Some(1e-2));
        assert_eq!(cfg.c, Expr::Num(0.0));
        let spec = cfg.to_spec(None, None).unwrap();
        assert_eq!(spec.advection().as_constant(), Some(1.0));
        assert!((spec.source().eval(1.0) - std::f64::consts::E).abs() < 1e-15);
        assert!(spec.exact().is_none());
        let spec = cfg.to_spec(Some(0.5), Some(0.1)).unwrap();
        assert_eq!((spec.epsilon(), spec.mu()), (0.5, 0.1));
    }

    #[test]
    fn default_name_and_epsilon() {
        let cfg = ProblemConfig::parse("b = -1\nexact = x\n", "stem").unwrap();
        assert_eq!(cfg.name, "stem");
        let spec = cfg.to_spec(None, None).unwrap();
        assert_eq!(spec.epsilon(), DEFAULT_EPSILON);
        assert_eq!(spec.exact().unwrap().value(0.25), 0.25);
    }

    #[test]
    fn reports_line_numbers() {
        assert!(matches!(
            ProblemConfig::parse("epsilon = 0.1\nfoo = 2\n", "f"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(
            ProblemConfig::parse("b = 1\nb = 2\n", "f"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(ProblemConfig::parse("\n\njust text\n", "f"), Err(ConfigError::Syntax { line: 3 })));
        assert!(matches!(
            ProblemConfig::parse("q = exp(x\n", "f"),
            Err(ConfigError::Expr { line: 1, .. })
        ));
        assert!(matches!(
            ProblemConfig::parse("phi_left = x\n", "f"),
            Err(ConfigError::NotConstant { line: 1, .. })
        ));
        assert!(matches!(ProblemConfig::parse("q = x\nq =\n", "f"), Err(ConfigError::Syntax { line: 2 })));
    }

    #[test]
    fn invalid_problem_surfaces_core_error() {
        let cfg = ProblemConfig::parse("epsilon = 0.01\nmu = 0.02\nb = -1\n", "f").unwrap();
        assert!(matches!(cfg.to_spec(None, None), Err(ConfigError::Problem(_))));
    }
}
