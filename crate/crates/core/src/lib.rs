//! Exact arithmetic for free Lie rings, free nilpotent groups `N_r^c`, their
//! automorphism groups, and polynomial `GL_r(Z)`-modules, together with a
//! degree-zero homological stability harness.
//!
//! All coefficients are unbounded integers.

pub mod aut;
pub mod error;
pub mod glmod;
pub mod json;
pub mod lie;
pub mod matrix;
pub mod nilgroup;
pub mod series;
pub mod stability;
pub mod verify;

pub use aut::{Endo, HomMap};
pub use error::{Error, Result};
pub use glmod::{eval_module, BasedModule, ModuleSpec};
pub use lie::{lie_apply_matrix, lie_bracket, lyndon_basis, mobius, witt_rank, LieElement, LyndonWord};
pub use matrix::IntMatrix;
pub use nilgroup::{parse_element, FreeNilpotentGroup, GroupElement};
pub use series::TruncatedSeries;
pub use stability::{snf, stability_scan, FinAbPresentation, ScanReport, SnfResult};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lyndon.md")]
    mod lyndon {}
    #[doc = include_str!("../../../book/src/nilpotent.md")]
    mod nilpotent {}
    #[doc = include_str!("../../../book/src/automorphisms.md")]
    mod automorphisms {}
    #[doc = include_str!("../../../book/src/modules.md")]
    mod modules {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
