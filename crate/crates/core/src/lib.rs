//! Exact and certified computations in imaginary cyclic sextic fields F = K k,
//! with K cyclic cubic of conductor p and k = Q(sqrt(-d)).
//!
//! The numeric core is generic over the scalar (`f32`, `f64`, or
//! `BigRational` where exact Gram matrices are needed); the aliases below fix
//! the usual choices.

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod theta;
pub mod units;
pub mod verify;

pub use cyclotomic::{CycElement, GaloisUnit};
pub use error::{Error, Result};
pub use field::{build_tower, integral_basis, roots_of_unity, subfield_order, ElementCoords, FieldTower, OrderLattice, SexticField, Subfield};
pub use lattice::{enumerate_short, enumerate_short_real, lll_reduce, ExactGram, GramMatrix, ShortVectorSet};
pub use report::{emit_report, Format, Report};
pub use scalar::{Real, Scalar};
pub use theta::{tail_bound, ArakelovPoint, SumSplit, ThetaContext, ThetaValue};
pub use units::{log_unit_lattice, LogUnitLattice, TorusPoint};
pub use verify::{run_all, scan_torus, CheckResult, ScanReport, VerifyConfig};

pub type RealGram64 = GramMatrix<f64>;
pub type RealGram32 = GramMatrix<f32>;
pub type LogUnitLattice64 = LogUnitLattice<f64>;
pub type LogUnitLattice32 = LogUnitLattice<f32>;
pub type TorusPoint64 = TorusPoint<f64>;
pub type ArakelovPoint64 = ArakelovPoint<f64>;
pub type ArakelovPoint32 = ArakelovPoint<f32>;
pub type ThetaValue64 = ThetaValue<f64>;
pub type ThetaValue32 = ThetaValue<f32>;
pub type ThetaContext64<'a> = ThetaContext<'a, f64>;
pub type ThetaContext32<'a> = ThetaContext<'a, f32>;
pub type ShortVectorSetExact = ShortVectorSet<num_rational::BigRational>;
pub type ShortVectorSet64 = ShortVectorSet<f64>;
