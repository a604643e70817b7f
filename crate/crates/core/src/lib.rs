//! Exact machinery for Padé approximants to binomial-product power series,
//! with an application pipeline for polynomial-factorial equations
//! `s * n! = P(x)`.
//!
//! Everything numeric is either exact (big integers, big rationals, dense
//! rational polynomials, truncated series) or a certified enclosure
//! ([`ball::Ball`], an arbitrary-precision midpoint-radius value). No plain
//! floating point enters any decision.
//!
//! Module map:
//! * [`num`], [`poly`], [`series`], [`bigfloat`], [`ball`]: the exact kernel.
//! * [`omega`]: the series `prod_{j<beta} (1 - j x)^{-1/r}`, its coefficient
//!   arithmetic and certified evaluation.
//! * [`siegel`]: small-solution solver for homogeneous integer systems.
//! * [`pade`]: initial simultaneous Padé triples for two omega series.
//! * [`operators`]: the derivation `T (d/dx + A_i)` and its divided-power
//!   variant, with the change-of-basis polynomials relating the two.
//! * [`independence`]: nonvanishing certificates (Wronskian-style determinant,
//!   low-order points, rank-3 evaluation triples).
//! * [`pipeline`]: parameter selection, approximant matrices, growth/decay
//!   property checks, and the exponent optimization.
//! * [`scan`]: factorial equation scanning, depression to zero subleading
//!   coefficient, and simultaneous-approximation witnesses.
//! * [`report`]: structured pass/fail check sets shared by the CLI.
//! * [`lemmas`]: named end-to-end checkers used by `verify-lemma`.

pub mod ball;
pub mod bigfloat;
pub mod independence;
pub mod lemmas;
pub mod num;
pub mod omega;
pub mod operators;
pub mod pade;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod scan;
pub mod series;
pub mod siegel;

pub use ball::Ball;
pub use bigfloat::BigFloat;
pub use num::{Int, Rat};
pub use poly::Poly;
pub use series::Series;
