//! Exact classification of the abelian varieties in an ordinary simple
//! isogeny class over a finite field as cyclic or not.
//!
//! The pipeline works entirely in exact arithmetic:
//!
//! 1. [`weil`] validates a q-Weil polynomial `f` (root sizes via Sturm
//!    sequences, ordinariness, irreducibility).
//! 2. [`order_ideal`] models `K = Q[t]/(f)`, orders such as `Z[α, q/α]`
//!    and their fractional ideals as canonical Hermite-form lattices.
//! 3. [`icm`] enumerates the ideal class monoid of `Z[α, q/α]`.
//! 4. [`latimer`] turns each ideal class into an integer matrix class with
//!    characteristic polynomial `f` (and back).
//! 5. [`cyclicity`] evaluates the divisibility conditions on `τ(M)` and
//!    `τ(1 - M)` and cross-checks every verdict against the Smith normal
//!    form of `1 - M`.
//!
//! [`ingest`] loads externally tabulated isogeny-class data for
//! cross-validation.

pub mod cyclicity;
pub mod error;
pub mod icm;
pub mod ingest;
pub mod latimer;
pub mod linalg;
pub mod order_ideal;
pub mod poly;
pub mod weil;

pub use cyclicity::{
    classify_isogeny_class, group_structure_oracle, membership, q_stability_check,
    ClassificationSummary, CyclicityReport, IsogenyClassReport, Verdict,
};
pub use error::{Error, Refusal, Result};
pub use icm::{enumerate_icm, refine_by_sigma, Completeness, IcmClass, IcmResult};
pub use latimer::{ideal_to_matrix, matrices_conjugate, matrix_to_ideal, Conjugacy, MatrixClass};
pub use linalg::{
    cofactor_matrix, determinant, hermite_normal_form, is_unimodular, smith_normal_form, tau,
    HermiteForm, IntMatrix, SnfResult,
};
pub use order_ideal::{
    Equivalence, FieldElement, IdealLattice, NumberField, OrderDesc,
};
pub use poly::IntPoly;
pub use weil::{enumerate_weil_contexts, WeilContext, WeilFilter};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
