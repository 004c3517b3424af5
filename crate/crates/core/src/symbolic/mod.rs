//! Shift spaces: eventually periodic points, the exponential metric,
//! stable and unstable sets, the bracket and the closing construction.

mod point;
mod space;

pub(crate) use point::symbol_char;
pub use point::{Agreement, Extended, Point, Symbol, MAX_ALPHABET};
pub use space::{ClosingConstants, HyperbolicConstants, ShiftSpace, DEFAULT_ENUMERATION_CAP};
