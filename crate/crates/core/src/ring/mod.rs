//! Exact coefficient arithmetic.

mod monomial;
mod product_form;
mod qpoly;
mod qrat;
mod rat;
mod scalar;

pub use monomial::Monomial;
pub use product_form::{Agreement, Direction, Expansion, ProductForm};
pub use qpoly::QPoly;
pub use qrat::QRat;
pub use rat::Rat;
pub use scalar::{QTarget, Scalar, EXACT};
