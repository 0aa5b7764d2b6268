//! Exact solution of the SAA problem.

mod bnb;
mod model;
mod oracle;

pub use bnb::{solve_bnb, solve_bnb_logged, BnbOptions, ExactSolution, ProgressRecord};
pub use model::{
    build_miecp, export_model, export_model_to_path, parse_native, AffineExpr, Cone, ExportFormat, Layout, LinearRow,
    MiecpModel, ModelHeader, Sense, VarKind, Variable,
};
pub use oracle::oracle_grid_search;
