use thiserror::Error;

/// Parameter-space location of a failed pointwise check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub x1: f64,
    pub x2: f64,
    /// Through-thickness coordinate, when the failure is volumetric.
    pub x3: Option<f64>,
    /// Node index on the tensor grid, when evaluation is grid-based.
    pub node: Option<(usize, usize)>,
}

impl Location {
    pub fn at(x1: f64, x2: f64) -> Self {
        Self { x1, x2, x3: None, node: None }
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x'=({:.6}, {:.6})", self.x1, self.x2)?;
        if let Some(x3) = self.x3 {
            write!(f, ", x3={x3:.6}")?;
        }
        if let Some((i, j)) = self.node {
            write!(f, " [node {i},{j}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("degenerate chart at {0}: |d1 y x d2 y| = {1:e}")]
    DegenerateChart(Location, f64),

    #[error("grid {n1}x{n2} too small: need at least {min} nodes per direction")]
    GridTooSmall { n1: usize, n2: usize, min: usize },

    #[error("orientation violated at {location}: {quantity} = {value:e}")]
    OrientationViolation {
        location: Location,
        quantity: &'static str,
        value: f64,
    },

    #[error("non-positive determinant {0:e}")]
    NonPositiveDeterminant(f64),

    #[error("line search step collapsed below {0:e}")]
    StepCollapsed(f64),

    #[error("thickness h={h} not admissible: h_max={h_max} ({reason})")]
    InadmissibleThickness { h: f64, h_max: f64, reason: String },

    #[error("initial state is not admissible: {0}")]
    InadmissibleInitialState(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ShellError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ShellError::InadmissibleThickness { .. } => 2,
            ShellError::OrientationViolation { .. }
            | ShellError::NonPositiveDeterminant(_)
            | ShellError::InadmissibleInitialState(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, ShellError>;
