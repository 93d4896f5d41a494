//! Compiler and deterministic simulator for a DNA-mediated expected-utility
//! decision maker.
//!
//! A decision matrix is compiled into strands, threshold ratios and a
//! digestion schedule, the bench protocol is simulated on exact
//! concentrations, and the resulting gel bands are decoded back into a choice
//! that is checked against the direct expected-utility computation.

pub mod compiler;
pub mod decision;
pub mod fasta;
pub mod gel;
pub mod pipeline;
pub mod problem;
pub mod sampling;
pub mod scalar;
pub mod strand;
pub mod wetlab;

pub use scalar::Scalar;

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::Ratio<num_bigint::BigInt>;

pub type Matrix = decision::DecisionMatrix<Rational>;
pub type MatrixF64 = decision::DecisionMatrix<f64>;
pub type Plan = compiler::EncodingPlan<Rational>;
pub type Tube = wetlab::TubeState<Rational>;
