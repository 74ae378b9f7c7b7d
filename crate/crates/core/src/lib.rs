//! Hypergraph `r`-cuts that beat the random-cut average, with every
//! guarantee checked in exact arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod cutspace;
pub mod derand;
pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod instances;
pub mod pipeline;
pub mod reduce;

pub use cutspace::{cut_metrics, expected_fraction, expected_size, Cut, CutMetrics, PartialCut};
pub use error::{Error, Result};
pub use exact::{Dyadic, Rational};
pub use hypergraph::{Hypergraph, Multigraph};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/excess.md")]
    mod excess {}
    #[doc = include_str!("../../../book/src/conditional-expectations.md")]
    mod conditional_expectations {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
