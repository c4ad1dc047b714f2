//! Exact formal models over `k[w]`.

pub mod blowup;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod fpalg;
pub mod generic;
pub mod ideal;
pub mod normal;
pub mod poly;
pub mod ratfun;
pub mod session;

pub use error::{Error, Result};
pub use field::{CoeffField, Field, Fp, Prime, Rational};
pub use poly::{Monomial, MonomialOrder, Poly, PolyRing, Ring};

pub type PolyQ = Poly<Rational>;
pub type PolyFp = Poly<Fp>;
pub type IdealQ = ideal::Ideal<Rational>;
pub type IdealFp = ideal::Ideal<Fp>;
pub type AlgebraQ = fpalg::FpAlgebra<Rational>;
pub type AlgebraFp = fpalg::FpAlgebra<Fp>;
pub type RingMapQ = fpalg::RingMap<Rational>;
pub type AtlasQ = blowup::ChartAtlas<Rational>;
pub type PointQ = generic::Point<Rational>;
