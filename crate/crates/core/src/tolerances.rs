//! Numeric tolerances shared by the verification suites, the CLI defaults
//! and the acceptance tests.

/// Full-period sums against their exact value `-1`.
pub const FULL_PERIOD: f64 = 1e-9;

/// The two routes to the averaged sum.
pub const AVG_PATHS: f64 = 1e-10;

/// Relative slack allowed on proven inequalities and equalities in chain
/// reports; the chains multiply quantities of size up to `p^10`.
pub const CHAIN_REL: f64 = 1e-8;

/// Relative agreement of the character-sum side with `p^2 T_d`.
pub const ORTHOGONALITY_REL: f64 = 1e-6;

/// Direct versus completed incomplete sums, relative to `max(1, |S(I)|)`.
pub const COMPLETION: f64 = 1e-8;

/// Indicator values against `{0, 1}`.
pub const INDICATOR: f64 = 1e-9;

/// Absolute slack on majorizations of `|S(I)|`.
pub const MAJORANT_ABS: f64 = 1e-6;

/// Prefix sums against fresh evaluation.
pub const PREFIX: f64 = 1e-10;

/// Fitted exponent may exceed `23/24` by at most this much.
pub const SLOPE_MARGIN: f64 = 0.05;

/// Values compared across thread counts.
pub const THREAD_DETERMINISM: f64 = 1e-12;
