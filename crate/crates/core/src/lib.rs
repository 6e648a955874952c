//! Exact verification engine for the Wodzicki-residue computations of
//! sub-signature operators on manifolds with boundary.

pub mod clifford;
pub mod error;
pub mod exterior_rep;
pub mod geometry;
pub mod integrate;
pub mod lichnerowicz;
pub mod parser;
pub mod pipelines;
pub mod report;
pub mod scalar;
pub mod symbolcalc;
pub mod verify;

pub use clifford::{Clifford, CliffordElement, Generator};
pub use error::{Error, Result};
pub use geometry::{BoundaryContext, Operator, SubbundleInstance};
pub use parser::{parse_expr, Parsed};
pub use pipelines::{Case, CaseResult, CaseSpec, Theorem};
pub use report::{ReportEntry, VerificationReport};
pub use scalar::{GaussRat, Poly, Rat, RationalFn, ScalarExpr, Var};
pub use verify::{run_verify, InstanceSource, Selector};
