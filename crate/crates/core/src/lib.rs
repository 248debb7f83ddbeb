//! Certification and computation of fixed points for Suzuki–Berinde type
//! contractions on finite-dimensional normed spaces.
//!
//! * [`space`]: vectors, ℓ1/ℓ2/ℓ∞ norms and the Pompeiu–Hausdorff metric on
//!   finite point sets.
//! * [`maps`]: single- and multi-valued maps and their averaged transforms
//!   `T_λ = (1 − λ)I + λT` with `λ = 1/(b + 1)`.
//! * [`conditions`]: the threshold functions `f` and `ψ` and sample-based
//!   certifiers for every implicative contraction condition.
//! * [`solver`]: Picard iteration on `T_λ` with convergence diagnostics.

pub mod conditions;
pub mod error;
pub mod maps;
pub mod solver;
pub mod space;

pub use conditions::{
    certify, f_threshold, make_pair_sample, psi_multi, psi_single, uniqueness_certify, CertificateReport,
    ConditionKind, PairSample, PairSpec, Verdict, Witness,
};
pub use error::{Error, Result};
pub use maps::{
    averaged_apply, averaged_set, fixed_point_residual, AnyMap, ContractionParams, Entry, MapSpec, Matrix,
    MultiMapSpec, SelfMap,
};
pub use solver::{apriori_bound, picard_solve, picard_solve_multi, IterationTrace, SolveConfig};
pub use space::{dist, dist_point_set, excess, hausdorff, norm, NormKind, PointSet, Vector, EPS_CMP};
