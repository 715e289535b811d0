//! Orthogonal layout of multigraphs: pipeline, instance format, SVG output
//! and benchmark runner on top of `ortho-core`.

pub mod bench;
pub mod error;
pub mod generate;
pub mod instance;
pub mod pipeline;
pub mod solver;
pub mod svg;

pub use error::{ParseError, PipelineError, Stage};
pub use instance::{emit_instance, parse_instance, Instance};
pub use pipeline::{run_instance, run_pipeline, PipelineConfig, PipelineOutput};
