pub mod error;
pub mod expr;
pub mod fundsol;
pub mod geometry;
pub mod interval;
pub mod mfs;
pub mod oned;
pub mod quad;
pub mod taylor;
pub mod twod;

pub use error::{Error, Result};
pub use expr::{PiecewiseSource1D, SourceExpr};
pub use fundsol::{Kernel, TestFunction2D};
pub use geometry::{Point, Polygon, Triangle};
pub use interval::{Box2, Interval};
pub use taylor::{tm_from_expr, Degrees, Substitution, TaylorModel2};
pub use mfs::{MfsConfig, MfsSolution};
pub use quad::{pair_f_phi, PairingParts, QuadConfig};
pub use twod::{certify_sign, enclose_batch, enclose_point, write_batch_csv, BatchRow, EnclosureResult, SignVerdict, SignedSplit};
