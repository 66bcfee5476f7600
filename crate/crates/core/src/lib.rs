//! Deep collocation solver for steady potential problems
//! `div(k grad phi) = 0` in graded 3D media.
//!
//! A small feedforward network stands in for `phi`. Input derivatives are
//! carried through the network as second-order jets and parameter gradients
//! come from a reverse sweep over those jets. Training minimizes the mean
//! square PDE and boundary residuals at sampled collocation points.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod net;
pub mod optim;
pub mod physics;
pub mod sampling;
