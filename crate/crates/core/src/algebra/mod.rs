//! Abelian invariants, coset enumeration and element orders.

mod coset;
mod order;
mod quotients;
mod snf;

pub use coset::{group_order, todd_coxeter, CosetTable, EnumerationError, DEFAULT_COSET_BUDGET};
pub use order::{element_order, FiniteCertificate, OrderOracle, OrderVerdict, QUOTIENT_MAX_DEGREE};
pub use quotients::PermutationQuotient;
pub use snf::{abelianization, relation_matrix, smith_normal_form, AbelianInvariants, AbelianMap, IntMatrix, SmithForm};
