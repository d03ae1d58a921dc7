//! Symbolic engine for the (3+1)-dimensional KdV equation built from a KdV
//! recursion operator: derivation, Lie point symmetries and their algebra,
//! the one-dimensional optimal system, similarity reductions, verification
//! of closed-form solutions and conserved vectors.

pub mod catalog;
pub mod conslaw;
pub mod expr;
pub mod hierarchy;
pub mod jetcalc;
pub mod liealg;
pub mod linalg;
pub mod reduction;
pub mod solutions;
pub mod symmetry;
