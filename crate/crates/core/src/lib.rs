//! Numerical laboratory for the dynamics of entire functions of completely
//! regular growth.
//!
//! The crate evaluates concrete entire functions (exponential sums with
//! polynomial coefficients, Weierstrass canonical products) in log space,
//! computes their indicators and growth diagnostics, checks the analytic
//! asymptotics that drive escape criteria, builds the exceptional-disk
//! coverings used to control densities, and estimates the Lebesgue density of
//! escaping points by finite-horizon orbit classification.
//!
//! Module map:
//!
//! * [`models`]: function representations, `log|f|`, `f'/f`, zero counting.
//! * [`growth`]: proximate orders, the ε-cascade, indicators, minorants `β`
//!   and density budgets `α`.
//! * [`analytic`]: Schwarz reconstruction of `f'/f`, the `Re(zf'/f)`
//!   asymptotic, the kernel integral of canonical products.
//! * [`criteria`]: membership in the sets `A(f,β)`, `B(f,β)` and annulus
//!   densities.
//! * [`covering`]: Besicovitch, Fuchs–Macintyre and Cartan disk systems.
//! * [`dynamics`]: orbit classification, escape rasters, measure estimates.

// `!(x > y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod covering;
pub mod criteria;
pub mod dynamics;
pub mod growth;
pub mod models;
pub mod quad;
pub mod sampling;

pub use num_complex::Complex64 as Complex;

pub use analytic::{AnalyticError, CrgComparison, KernelIntegral, SectorResidual};
pub use covering::{CoveringError, Disk, DiskSet, KoebeConstants};
pub use criteria::{AnnulusSpec, DensityReport, MembershipVerdict, Thresholds};
pub use dynamics::{DynamicsError, EscapeMap, EscapeParams, MeasureReport, OrbitRecord, Verdict};
pub use growth::{DensityBudget, EpsilonCascade, GrowthError, GrowthMinorant, Indicator, ProximateOrder};
pub use models::{CanonicalProduct, EntireFunction, ExpTerm, ExponentialSum, LogEval, Model, ModelError, ZeroRule};
pub use sampling::{Region, SamplePlan, Window};
