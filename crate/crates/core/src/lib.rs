//! Interaction indexes of variables for functions on the unit hypercube.
//!
//! The index `𝓘(f, S) = 12^{|S|} ∫ f(x) Π_{i∈S}(x_i − ½) dx` is the
//! coefficient of `Π_{i∈S} x_i` in the best least-squares multilinear
//! approximation of `f` of degree `|S|`. On multilinear functions it coincides
//! with the Banzhaf interaction index of the game of vertex values.
//!
//! Variables are numbered from 1 in text (`{1,3}`) and from 0 in the Rust API;
//! variable `i` occupies bit `i − 1` of a [`SubsetMask`].

pub mod closed_forms;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod montecarlo;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod set_function;
pub mod simplex;
pub mod spec;
pub mod stats;
pub mod subset;
pub mod table;
pub mod verify;

pub use continuous::{
    best_k_approx, interaction, interaction_table, Approximation, EstimatorKind, IntegratorConfig,
    Method,
};
pub use error::{Error, Result};
pub use poly::MultilinearPoly;
pub use scalar::{ratio, Rational, Value};
pub use set_function::SetFunction;
pub use spec::{BlackBox, FunctionSpec, Smoothness, Tabulated, Unary};
pub use subset::SubsetMask;
pub use table::{IndexValue, InteractionTable, Provenance};
