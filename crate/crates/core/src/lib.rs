//! Matrix cocycles over hyperbolic shifts.
//!
//! The crate models the shift on eventually periodic sequences, locally
//! constant `GL(d, ℝ)` cocycles over it, their stable and unstable
//! holonomies, and the reconstruction of a conjugacy `P` with
//! `A(x) = P(f(x)) B(x) P(x)⁻¹` from matching periodic data.

pub mod cocycle;
pub mod error;
pub mod holonomy;
pub mod linalg;
pub mod rigidity;
pub mod symbolic;

pub use cocycle::{BunchedCocycle, BunchingMode, BunchingReport, Cocycle, WindowGenerator};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use symbolic::{Agreement, Extended, Point, ShiftSpace, Symbol};
