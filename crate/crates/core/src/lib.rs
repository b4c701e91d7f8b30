pub mod error;
pub mod expr;
pub mod poly;
mod modgcd;

pub use error::{CsaError, Result};
pub use expr::{equals, Expr, Expression};
pub use poly::{Monomial, Poly, Symbol};
pub mod jet;
pub mod parse;

pub use jet::{JetContext, SymbolRole};
pub use parse::{parse, parse_expr};
pub mod bicomplex;

pub use bicomplex::{BicomplexExpression, Unit};
pub mod system;

pub use system::{Constraint, ConstraintSet, DifferentialSystem, Equation, Kind, ScalarODE, SplitVariant};
pub mod cr;
pub mod linalg;
pub mod printed;
pub mod split;
pub mod symmetry;

pub use cr::{check_cr, check_derivative_dependence, reconstruct_base, CRReport, Condition};
pub use split::{split, split_generator, split_generators, SplitResult};
pub use symmetry::{
    classify_split_operators, closure_dimension, lie_bracket, prolong, solve_determining, symmetry_residual,
    Classification, Generator, SymmetryVerdict,
};
pub mod numeric;
