use std::fmt;

/// Malformed or inconsistent instance document.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Input,
    ForceDirected,
    EdgeRouting,
    CrossingReduction,
    EdgeOrdering,
    EdgeNudging,
    Metrics,
}

impl Stage {
    pub const TIMED: [Stage; 6] = [
        Stage::ForceDirected,
        Stage::EdgeRouting,
        Stage::CrossingReduction,
        Stage::EdgeOrdering,
        Stage::EdgeNudging,
        Stage::Metrics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Input => "input",
            Stage::ForceDirected => "force-directed",
            Stage::EdgeRouting => "edge-routing",
            Stage::CrossingReduction => "crossing-reduction",
            Stage::EdgeOrdering => "edge-ordering",
            Stage::EdgeNudging => "edge-nudging",
            Stage::Metrics => "metrics",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A stage failed.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: ortho_core::Error,
}

impl PipelineError {
    pub fn at(stage: Stage) -> impl FnOnce(ortho_core::Error) -> PipelineError {
        move |source| PipelineError { stage, source }
    }
}
