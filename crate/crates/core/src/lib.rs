//! Exact exterior calculus on polynomial charts, regular Poisson structure
//! checks, characteristic-class obstructions for foliations and explicit
//! foliated h-principle homotopies on model open manifolds.

pub mod cartan;
pub mod catalog;
pub mod charclass;
pub mod cli;
pub mod expr;
pub mod homotopy;
pub mod linalg;
pub mod poisson;
