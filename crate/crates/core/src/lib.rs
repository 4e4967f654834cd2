//! Exponential sums with primitive roots modulo a prime `p`:
//!
//! `S_N(a, b, g) = sum_{x=1}^{N} e_p(a x + b_1 g_1^x + ... + b_r g_r^x)`,
//!
//! their averages over all primitive roots in one slot, incomplete versions
//! over intervals, and numerical checks of the identities and inequalities
//! that relate them.

pub mod averaged;
pub mod chain;
pub mod completion;
pub mod error;
pub mod expsum;
pub mod lemma1;
pub mod numtheory;
pub mod report;
pub mod scan;
pub mod tolerances;
pub mod verify;

pub use averaged::{check_chain, eval_avg_direct, eval_avg_u_param, AvgResult, AvgSpec};
pub use chain::{ChainReport, ChainStep, Relation};
pub use completion::{
    eval_incomplete_completed, eval_incomplete_direct, final_bound_check, geometric_tail_bound,
    indicator, CompletionReport, Interval,
};
pub use error::{Error, Result};
pub use expsum::{eval_mordell_sum, eval_prefix_sums, eval_sum, ComplexVal, RootTable, SumSpec};
pub use lemma1::{
    count_td, h_ab, h_chain_check, orthogonality_identity, td_ratio, LambdaContext, TdCount,
};
pub use numtheory::{factorize, FactoredInteger, PrimeContext};
pub use report::{fit_exponent, mordell_rhs, FitResult, ScanRecord};
