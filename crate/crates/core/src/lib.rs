//! Stratifold graphs: validation, fundamental group presentations, element
//! orders, F-group classification, obstruction analysis and spines of
//! 3-manifolds.

pub mod algebra;
pub mod analysis;
pub mod cells;
pub mod format;
pub mod graph;
pub mod presentation;
pub mod spine;

pub use algebra::{abelianization, element_order, todd_coxeter, AbelianInvariants, OrderVerdict, DEFAULT_COSET_BUDGET};
pub use analysis::{classify_fgroup, obstructions, q_graph, white_holes, FClass, Obstruction, ObstructionKind};
pub use graph::{are_isomorphic, euler_characteristic, normalize, validate, GraphError, StratifoldGraph, Violation};
pub use presentation::{natural_presentation, simplify, FSignature, GroupPresentation, Word};
pub use spine::{delta_sum, recognize, synth, ManifoldExpr, SpineError, Summand};
