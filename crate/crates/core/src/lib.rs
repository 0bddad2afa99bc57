//! Two-stage adaptive robust transmission expansion planning.
//!
//! The planner chooses candidate lines before uncertain generation
//! capacities and loads are revealed, then dispatches the network at least
//! cost. Uncertainty is a cardinality-budgeted set per region. The problem is
//! solved by column-and-constraint generation ([`ccg`]): a master problem over
//! the build decisions and accumulated worst-case scenarios alternates with a
//! worst-case subproblem, either the dual reformulation ([`subproblem_dual`])
//! or the KKT reformulation ([`subproblem_kkt`]). [`operation::enumerate_exact`]
//! is a brute-force oracle for small instances.

mod block;
pub mod ccg;
pub mod error;
pub mod ingest;
pub mod master;
pub mod model;
pub mod operation;
pub mod sizes;
pub mod subproblem_dual;
pub mod subproblem_kkt;

pub use error::{CoreError, Result};
