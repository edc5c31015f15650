//! Boards, winning families and the biased Maker-Breaker state machine.

mod board;
mod family;
mod playout;
mod state;
pub mod transcript;

pub use board::{Board, BoardKind, ElementId, Vertex};
pub use family::{ExplicitFamily, ImplicitFamily, WinningFamily};
pub use playout::{play_out, GameRng, Playout, RandomStrategy, Strategy};
pub use state::{Bias, GameState, Move, Owner, Player};
pub use transcript::{MoveRecord, Outcome, Transcript, TranscriptHeader};
