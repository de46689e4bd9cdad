//! Quantizations of the harmonic oscillator with an inverse-square core
//! on the punctured line, together with their spectra, eigenbases,
//! propagators and caustics phenomenology.

pub mod classical;
pub mod config;
pub mod dynamics;
pub mod eigenbasis;
pub mod error;
pub mod model;
pub mod propagator;
pub mod quad;
pub mod specfun;
pub mod spectrum;

pub use error::{IsqError, Result};

// Compile and run the book's code snippets as doctests so the guide can
// never drift out of sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub struct Overview;
    #[doc = include_str!("../../../book/src/model.md")]
    pub struct Model;
    #[doc = include_str!("../../../book/src/spectrum.md")]
    pub struct Spectrum;
    #[doc = include_str!("../../../book/src/eigenstates.md")]
    pub struct Eigenstates;
    #[doc = include_str!("../../../book/src/propagator.md")]
    pub struct Propagator;
    #[doc = include_str!("../../../book/src/caustics.md")]
    pub struct Caustics;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
