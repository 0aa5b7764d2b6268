//! Distributionally robust hypothesis testing with Sinkhorn uncertainty sets.

pub mod error;
pub mod cvar;
pub mod datagen;
pub mod diagnostics;
pub mod exact;
pub mod features;
pub mod numeric;
pub mod pipeline;
pub mod rng;
pub mod saa;
pub mod sinkhorn;

pub use error::{Error, Result};

/// The guide's chapters, compiled so that their snippets run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/concepts/uncertainty-sets.md")]
    mod uncertainty_sets {}
    #[doc = include_str!("../../../book/src/concepts/detectors.md")]
    mod detectors {}
    #[doc = include_str!("../../../book/src/concepts/saa.md")]
    mod saa {}
    #[doc = include_str!("../../../book/src/concepts/exact-solver.md")]
    mod exact_solver {}
    #[doc = include_str!("../../../book/src/concepts/cvar.md")]
    mod cvar {}
    #[doc = include_str!("../../../book/src/concepts/worst-case.md")]
    mod worst_case {}
    #[doc = include_str!("../../../book/src/usage/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/usage/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/usage/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../book/src/usage/diagnostics.md")]
    mod diagnostics {}
}
