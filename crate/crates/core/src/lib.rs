//! Exact computations with logarithmic forms and derivations along the
//! hyperplane arrangement of a finite real reflection group.

pub mod coxeter;
pub mod error;
pub mod expr;
pub mod forms;
pub mod hodge;
pub mod linsolve;
pub mod locq;
pub mod matrix;
pub mod poly;
pub mod random;
pub mod rat;
pub mod relations;
pub mod saito;
pub mod serial;
pub mod verify;

pub use error::{Error, Result};
pub use locq::{Ambient, LocQ};
pub use matrix::{RatMatrix, SqMatrix};
pub use poly::{LinearForm, Monomial, Poly};
pub use rat::Rat;
