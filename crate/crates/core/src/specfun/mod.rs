//! Scalar special functions behind the Mittag-Leffler operator families.
//!
//! All routines are pure and safe to call concurrently.

pub mod gamma;
mod mainardi;
mod mittag_leffler;
mod oracle;

pub use mainardi::{mainardi, MainardiQuery};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_1, mittag_leffler_series, MlBranch, MlQuery, MlValue,
    CONTOUR_TOL, SERIES_PEAK_LIMIT, SERIES_TERM_TOL,
};
pub use oracle::{ml_via_mainardi_quadrature, LaplaceMode};
