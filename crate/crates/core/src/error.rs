use thiserror::Error;

use crate::game::{ElementId, Player};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bias must be at least 1 for both players, got ({maker}:{breaker})")]
    InvalidBias { maker: u32, breaker: u32 },

    #[error("winning set #{set} contains element {element} outside a board of size {board_size}")]
    SetOutsideBoard {
        set: usize,
        element: u32,
        board_size: usize,
    },

    #[error("{got:?} tried to move but it is {expected:?}'s turn")]
    OutOfTurn { expected: Player, got: Player },

    #[error("element {0:?} is outside the board")]
    ElementOutOfRange(ElementId),

    #[error("element {0:?} is already claimed")]
    ElementClaimed(ElementId),

    #[error("element {0:?} appears twice in one move")]
    DuplicateElement(ElementId),

    #[error("{player:?} claimed {claimed} elements this turn but the bias allows {bias}")]
    Overclaim {
        player: Player,
        claimed: u32,
        bias: u32,
    },

    #[error("Breaker must claim {required} elements this turn, got {claimed}")]
    Underclaim { required: u32, claimed: u32 },

    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),

    #[error("strategy produced an illegal move at record {record}: {cause}")]
    IllegalStrategyMove { record: usize, cause: Box<Error> },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no candidate element is available")]
    NoCandidates,

    #[error("solver refused: {remaining} open elements exceed the limit of {limit}")]
    SolverLimit { remaining: usize, limit: usize },

    #[error("dual-game invariant violated: {reason}\n{trace}")]
    InvariantViolation { reason: String, trace: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
