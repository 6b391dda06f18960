//! Finite group cohomology, symmetric cochains, Δ-groups and 3-algebras.

pub mod algebra;
pub mod cochain;
pub mod cohomology;
pub mod delta;
pub mod evaluator;
pub mod format;
pub mod group;
pub mod modular;

pub use cochain::{Cochain, CochainError, Transposition};
pub use group::{FiniteGroup, GModule, GroupError, ModuleElement, ModuleError};
pub use algebra::{AlgebraError, Scalar, SparseTrilinearSystem, StrongThreeAlgebra};
pub use cohomology::{Cohomology, CohomologyError, FiniteAbelianGroupDescriptor};
pub use delta::{DeltaError, DeltaGroup};
pub use evaluator::{EvalError, EvaluationState, LabeledTriangulation, Triangulation};
pub use format::FormatError;
