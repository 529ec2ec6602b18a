//! End-versus-side hitting ratios for conformally invariant walks started at
//! the centre of an `r x 1` rectangle.

#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::manual_is_multiple_of,
    clippy::manual_div_ceil
)]

pub mod cli;
pub mod error;
pub mod hitting;
pub mod lattice;
pub mod quadrature;
pub mod scmap;
pub mod specfun;
pub mod validate;
