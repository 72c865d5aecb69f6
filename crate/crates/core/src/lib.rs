//! Decision procedure for Basic Logic BL via relational hypersequents
//! and linear feasibility.

pub mod axiom_check;
pub mod calculus;
pub mod formula;
pub mod hypersequent;
pub mod linfeas;
pub mod oracle;
pub mod prover;
pub mod reduction;
pub mod semantics;

pub use formula::{parse, Formula, ParseError};
pub use hypersequent::{Hypersequent, RelKind, RelationalSequent};
pub use semantics::{eval, satisfies, OmegaValue, Valuation};
