//! Construction, verification and compilation of weak-coin-flipping point
//! games, with a numerical lift of small games to explicit protocols.

pub mod numeric;
pub mod pointgame;
pub mod ladder;
pub mod validity;
pub mod compiler;
pub mod protocol;

pub use compiler::{tipg_to_sequential, CompileError, CompilerPlan};
pub use numeric::{Polynomial, Rational};
pub use pointgame::{Orientation, Point2D, PointGame, SupportFunction1D, SupportFunction2D, Tipg, Transition};
pub use protocol::{emit_protocol, extract_point_game, simulate_honest, verify_dual_feasibility, ProtocolDescription, ProtocolError};
pub use validity::{check_point_game, check_tipg, check_transition, ValidityStatus, ValidityVerdict};
