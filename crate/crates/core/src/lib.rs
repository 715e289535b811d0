//! Orthogonal layout of multigraphs.
//!
//! Vertices are drawn as axis-aligned boxes, edges as axis-aligned polylines.
//! The crate contains every stage of the layout pipeline as a standalone
//! module so stages can be swapped or driven individually:
//!
//! - [`layout`]: force-directed placement and box overlap removal
//! - [`ports`]: edge endpoints on box sides
//! - [`routing_graph`]: channels, representatives and the sparse routing grid
//! - [`routing`]: length-then-bend minimal routing and crossing reduction
//! - [`ordering`]: path order inside edge bundles
//! - [`drawing`]: boxes plus routed polylines, with structural checks
//! - [`nudging`] and [`lp`]: separation constraints and their linear programs
//! - [`metrics`]: quality measures of a finished drawing
//!
//! The crate is `no_std` and only needs `alloc`. Anything touching files,
//! clocks or third-party solvers lives in the `ortho` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod drawing;
pub mod error;
pub mod geom;
pub mod graph;
pub mod layout;
pub mod lp;
mod math;
pub mod metrics;
pub mod nudging;
pub mod ordering;
pub mod ports;
pub mod routing;
pub mod routing_graph;

pub use error::{Error, Result};
pub use geom::{BoxShape, Interval, Orientation, OrthoSegment, Point, Rect, Side};
pub use graph::{Edge, Multigraph, Vertex};
