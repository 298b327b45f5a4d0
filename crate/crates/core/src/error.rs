use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One problem found while validating a domain description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    /// Boundary index the issue refers to, when it is tied to one boundary.
    pub boundary: Option<usize>,
    /// Second boundary for pairwise problems (overlap, crossing).
    pub other: Option<usize>,
    /// Approximate location of the problem, if known.
    pub location: Option<[f64; 2]>,
    pub message: String,
}

impl ValidationIssue {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            boundary: None,
            other: None,
            location: None,
            message: message.into(),
        }
    }

    pub fn on(mut self, boundary: usize) -> Self {
        self.boundary = Some(boundary);
        self
    }

    pub fn with(mut self, other: usize) -> Self {
        self.other = Some(other);
        self
    }

    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.location = Some([x, y]);
        self
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.boundary, self.other) {
            (Some(a), Some(b)) => write!(f, "boundaries {a} and {b}: ")?,
            (Some(a), None) => write!(f, "boundary {a}: ")?,
            _ => {}
        }
        f.write_str(&self.message)?;
        if let Some([x, y]) = self.location {
            write!(f, " near ({x:.6}, {y:.6})")?;
        }
        Ok(())
    }
}

/// Best candidate found by the slit-avoidance scan when no admissible start angle exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanningDiagnostics {
    pub reason: String,
    pub best_theta0: f64,
    pub intersections: usize,
    pub clearance: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical error: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },

    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("planning failure: {} (best theta0 {:.6}, {} intersections, clearance {:.3e})", .0.reason, .0.best_theta0, .0.intersections, .0.clearance)]
    Planning(PlanningDiagnostics),

    #[error("fusion failure on boundary {boundary}: {reason}")]
    Fusion { boundary: usize, reason: String },

    #[error("validation failed with {} issue(s): {}", .0.len(), join_issues(.0))]
    Validation(Vec<ValidationIssue>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Json(#[from] serde_json::Error),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Planning,
    Numerical,
    Io,
}

impl Error {
    pub fn numerical(message: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            message: message.into(),
            residual,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parameter(_)
            | Error::Geometry(_)
            | Error::Configuration(_)
            | Error::Validation(_)
            | Error::Json(_) => ErrorClass::Validation,
            Error::Planning(_) | Error::Fusion { .. } => ErrorClass::Planning,
            Error::Domain(_)
            | Error::Numerical { .. }
            | Error::Convergence(_)
            | Error::Accuracy(_) => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}
