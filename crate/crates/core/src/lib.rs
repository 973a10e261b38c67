//! Footprint grid encoding of point clouds.
//!
//! Scattered points with responses are accumulated onto regular grids: a
//! topology grid `G_o` counts how much of each point lands on each vertex, and
//! a response grid `G_u` carries the same weights times the responses.
//! Dividing the two and interpolating back recovers point-wise values.
//!
//! ```
//! use gridenc::{encode_response, encode_topology, reconstruct, Dim, PointCloud, PointCloudBatch, ResponseShift};
//!
//! let cloud = PointCloudBatch::new(
//!     Dim::Two,
//!     1,
//!     vec![PointCloud::new(vec![-0.5, 0.5, 0.25, 0.0], vec![1.0, 2.0])],
//! )?;
//! let g_o = encode_topology(&cloud, 5)?;
//! let g_u = encode_response(&cloud, 5, ResponseShift::None)?;
//! let back = reconstruct(&g_o, &g_u, &cloud)?;
//! assert!((back[0][0] - 1.0).abs() < 1e-5);
//! # Ok::<(), gridenc::Error>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod bench;
pub mod cli;
pub mod convergence;
pub mod edge;
pub mod error;
pub mod fit;
pub mod grid;
pub mod info;
pub mod io;
pub mod recovery;

pub use error::{Error, Result};
pub use grid::{
    encode_response, encode_topology, normalize_grid, reconstruct, Dim, GridFieldBatch, GridKind,
    PointCloud, PointCloudBatch, ResponseShift, ShiftRecord,
};
