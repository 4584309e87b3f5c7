//! Disjointness, bands, local operators and matrix semigroups on
//! finite-dimensional ordered vector spaces whose positive cone is a
//! polyhedral cone given by dual functionals.

pub mod catalog;
pub mod cover;
pub mod demos;
pub mod error;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod operators;
pub mod optim;
pub mod order;
pub mod report;
pub mod semigroups;
pub mod tol;

pub use cover::{canonicalize, LatticeCover};
pub use error::{Error, Result};
pub use operators::{LinOp, Verdict};
pub use order::{make_space, Band, OrderedSpace, Pattern};
pub use tol::{Tolerances, Truth};
