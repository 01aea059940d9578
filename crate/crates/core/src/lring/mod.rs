//! Exact arithmetic in `Z[L, L^-1]` and in its localisation at `L^n - 1`.

mod cyclotomic;
mod laurent;
mod tate;

pub use cyclotomic::{cyclotomic, is_invertible_localised, UnitFactorization};
pub use laurent::IntLaurent;
pub(crate) use laurent::write_terms;
pub use tate::{class_gl, class_projective, class_sl, AdmissibleDenominator, TateRational};
