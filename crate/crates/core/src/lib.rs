//! Two-dimensional periodic MHD in Elsässer variables with continuous data
//! assimilation, plus the diagnostics and experiment runner built on it.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod mhd;
pub mod nudging;
pub mod observation;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/spectral.md")]
mod book_spectral {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/elsasser.md")]
mod book_elsasser {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/nudging.md")]
mod book_nudging {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/diagnostics.md")]
mod book_diagnostics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
