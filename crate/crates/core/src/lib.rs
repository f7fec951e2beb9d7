//! Gamma-matrix realizations of a commutative algebra over the tangent
//! bundle whose traces reproduce Randers and angular-metric Finsler
//! structures, together with the flat-space correspondence between algebra
//! elements and first-order Dirac-type operators.
//!
//! The crate is organized around the pipeline
//!
//! * [`metric`]: 4D pseudo-Riemannian metrics, causal classification,
//!   orthonormal frames;
//! * [`gamma`]: concrete gamma-matrix representations for any signature;
//! * [`algebra`]: the formal commutative algebra of graded generator words
//!   and its matrix evaluation;
//! * [`trace`]: numeric and symbolic trace engines that cross-validate;
//! * [`finsler`]: Randers/angular-metric reconstruction, fundamental
//!   tensors, null-cone limits and the identity audit;
//! * [`diracop`]: operator symbols and lattice finite-difference checks;
//! * [`expr`]: the expression DSL: parser, canonical printer, evaluator;
//! * [`context`]: JSON context files.
//!
//! All numeric types are generic over the scalar via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, the precision the
//! verification tolerances are stated for.

pub mod algebra;
pub mod cmatrix;
pub mod context;
pub mod diracop;
pub mod error;
pub mod expr;
pub mod finsler;
pub mod gamma;
pub mod metric;
pub mod scalar;
pub mod trace;

pub use error::{Error, ParseError, ParseErrorKind, Result};

/// `f64` aliases for the main types.
pub type Metric64 = metric::Metric4<f64>;
pub type Frame64 = metric::Frame4<f64>;
pub type Tangent64 = metric::Tangent<f64>;
pub type OneForm64 = metric::OneForm<f64>;
pub type GammaRep64 = gamma::GammaRep<f64>;
pub type CMat64 = cmatrix::CMat4<f64>;
pub type Element64 = algebra::AlgebraElement<f64>;
pub type Context64 = algebra::EvalContext<f64>;
pub type Randers64 = finsler::RandersData<f64>;
pub type TraceReport64 = trace::TraceReport<f64>;

/// `f32` aliases, for callers that trade precision for footprint.
pub type Metric32 = metric::Metric4<f32>;
pub type Tangent32 = metric::Tangent<f32>;
pub type OneForm32 = metric::OneForm<f32>;
pub type GammaRep32 = gamma::GammaRep<f32>;
pub type CMat32 = cmatrix::CMat4<f32>;
pub type Element32 = algebra::AlgebraElement<f32>;
pub type Context32 = algebra::EvalContext<f32>;
