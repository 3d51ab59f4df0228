//! Hard-decision decoding of Reed-Solomon product codes.
//!
//! The crate provides the component-code machinery ([`galois`], [`rscode`]),
//! the product-code word representation ([`product`]), GMD/GD row decoding
//! ([`gmd`]), the full product decoders ([`decoders`]), the stall-pattern
//! post-processing techniques ([`postproc`]), and a reproducible Monte-Carlo
//! harness over the q-ary symmetric channel ([`sim`]).

pub mod codespec;
pub mod decoders;
pub mod error;
pub mod galois;
pub mod gmd;
pub mod postproc;
pub mod product;
pub mod rscode;
pub mod selftest;
pub mod sim;

pub use error::{Error, Result};
pub use galois::{FieldElem, GfTable, Symbol};
pub use product::{ProductCode, WordMatrix};
pub use rscode::{DecodeFailure, ErasureSet, RsCode};
