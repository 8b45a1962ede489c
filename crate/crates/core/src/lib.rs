//! Torus bundles over the circle, their plumbing graphs, and elliptic open
//! books built from them.
//!
//! The exact layers (`zlinalg`, `sl2z`, `plumbing`) are generic over the
//! integer type; the aliases below fix [`num_bigint::BigInt`].

pub mod fixtures;
pub mod mcg;
pub mod openbook;
pub mod pipeline;
pub mod plumbing;
pub mod scalar;
pub mod sl2z;
pub mod zlinalg;

pub use num_bigint::BigInt;

pub type Integer = BigInt;
pub type Matrix = zlinalg::IntMatrix<BigInt>;
pub type Group = zlinalg::AbelianGroup<BigInt>;
pub type Sl2 = sl2z::Sl2Matrix<BigInt>;
pub type Word = sl2z::NormalForm<BigInt>;
pub type Plumbing = plumbing::PlumbingGraph<BigInt>;

pub type Matrix64 = zlinalg::IntMatrix<i64>;
pub type Group64 = zlinalg::AbelianGroup<i64>;
pub type Sl2_64 = sl2z::Sl2Matrix<i64>;
pub type Plumbing64 = plumbing::PlumbingGraph<i64>;
