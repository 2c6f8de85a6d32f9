//! Linear image osmosis: the drift-diffusion evolution
//! `∂t u = Δu − div(d u)` with no-flux boundaries, discretized on the pixel
//! grid and integrated with dimension-split implicit schemes.
//!
//! With drift built from a positive reference `v`, the evolution of any
//! positive `f` converges to `(mean(f) / mean(v)) v` while conserving the
//! mean grey value. Zeroing the drift across selected edges (a shadow
//! boundary, mosaic seams) makes the evolution remove multiplicative
//! brightness jumps across them.
//!
//! ```no_run
//! use osmofilt::{io, pipeline, FrameLayout, SchemeConfig};
//!
//! let f = io::load_image("mosaic.pgm", None)?;
//! let layout = io::load_layout("frames.json")?;
//! let cfg = SchemeConfig::new("aos", 1e3, 1e5);
//! let (u, trace) = pipeline::balance_mosaic(&f, &layout, &cfg)?;
//! io::save_image(&u, "balanced.pfm", io::ImageFormat::Pfm)?;
//! io::save_trace(&trace, "trace.csv")?;
//! # Ok::<(), osmofilt::Error>(())
//! ```

pub mod bench;
pub mod discretize;
pub mod drift;
pub mod error;
pub mod evolve;
pub mod image;
pub mod io;
pub mod layout;
pub mod pipeline;
pub mod schemes;
pub mod solvers;
pub mod stencil;

pub use discretize::{
    assemble_full, assemble_split, drift_from_reference, pr_stability_bound, zero_drift_on_mask, OsmosisOperators,
};
pub use drift::{DriftField, EdgeMask};
pub use error::{Error, Result};
pub use evolve::{analytic_steady_state, evolve, DiagnosticsTrace, SchemeConfig, StopRule, TraceRow};
pub use image::{relative_l2, Field, PositiveImage, Raster};
pub use layout::{validate_layout, Frame, FrameLayout};
pub use schemes::{registry, Scheme, SchemeRegistry, SolveCounters, Stepper};
pub use stencil::{Neighbor, StencilKind, StencilOperator};
