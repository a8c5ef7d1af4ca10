//! Certified connectivity sequences for primitive curves on the boundary
//! of a genus-g handlebody.
//!
//! The library models the boundary surface as a planar domain (a disk with
//! 2g-1 holes) whose 2g boundary circles are glued in pairs, and represents
//! curves and arcs as exact-rational polylines on that domain.  On top of
//! the geometric kernel it provides:
//!
//! * free-group words of curves and a Whitehead-move primitivity test,
//! * exact intersection numbers via bigon removal on the glued surface,
//! * arc surgery, band sums and complement pathfinding,
//! * constructions of c-connected, s-connected and p-connected sequences
//!   with machine-checkable step witnesses,
//! * brute-force enumeration of low-complexity primitive curves and
//!   connectivity checks of the resulting relation graphs.

pub mod arrangement;
pub mod cert;
pub mod chart;
pub mod connectg;
pub mod curve;
pub mod disks;
pub mod error;
pub mod freegroup;
pub mod genus2;
pub mod geom;
pub mod highgenus;
pub mod homology;
pub mod jsonq;
pub mod offset;
pub mod oracle;
pub mod relations;
pub mod router;
pub mod surgery;
pub mod tighten;

pub use chart::SurfaceChart;
pub use curve::{CurveCursor, EmbeddedCurve, PathKind, Transit};
pub use tighten::{geometric_intersection, tighten, TightenMove, Tightened};
pub use disks::DiskRep;
pub use error::{Error, Result};
pub use freegroup::Word;
pub use relations::DualPair;
