//! Two-dimensional Fourier transforms of functions of bounded variation in
//! the sense of Vitali and Hardy, taken as improper Pringsheim limits, and
//! their pointwise inversion.

pub mod bv;
pub mod catalog;
pub mod engine;
pub mod error;
pub mod function;
pub mod geometry;
pub mod inversion;
pub mod kernels;
pub mod ladder;
pub mod quadrature;
pub mod stieltjes;
pub mod transform;

pub use error::{Error, Result};
pub use function::{BvFunction2, Factor};
pub use geometry::Rect2;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/variation.md")]
    mod variation {}
    #[doc = include_str!("../../../book/src/stieltjes.md")]
    mod stieltjes {}
    #[doc = include_str!("../../../book/src/transform.md")]
    mod transform {}
    #[doc = include_str!("../../../book/src/inversion.md")]
    mod inversion {}
    #[doc = include_str!("../../../book/src/lacunary.md")]
    mod lacunary {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
