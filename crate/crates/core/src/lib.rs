//! An executable laboratory for the Gaschütz lifting phenomenon on desk-scale
//! objects: exhaustive lift counting over finite permutation groups, exact
//! finitely generated abelian group computations via Smith normal form,
//! topological generation of finite-dimensional tori decided symbolically over
//! a formal rational basis, and lifting along finite towers of quotients.
//!
//! Everything is exact: integer indices into multiplication tables, arbitrary
//! precision integers and rationals. There is no floating point anywhere in a
//! decision path.

pub mod abelian;
pub mod error;
pub mod group;
pub mod lifting;
pub mod perm;
pub mod torus;
pub mod tower;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
