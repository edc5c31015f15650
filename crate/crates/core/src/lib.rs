//! Maker-Breaker tournament games on `K_n`.
//!
//! The crate covers four closely related positional games:
//!
//! * the tournament game, where Maker claims and orients edges of `K_n` and
//!   wins by owning a copy of a goal tournament `T_k`;
//! * its reduced form, the transversal `k`-clique game on a balanced
//!   `k`-partite board, which Maker wins by owning a clique that meets every
//!   class exactly once;
//! * the biased `(2:1)` game on ordered vertex pairs whose winning sets are the
//!   labelled copies of `T_k`;
//! * the orientation game, in which both players direct edges and the goal is
//!   judged on the union of all arcs.
//!
//! Alongside the game engine the crate evaluates the potential-function
//! certificates that decide these games at scale ([`potential`], [`bounds`]),
//! solves tiny instances exactly ([`solver`]) and runs random-player Monte
//! Carlo experiments ([`random_games`]).

pub mod bounds;
pub mod error;
pub mod exact;
pub mod game;
pub mod golden;
pub mod log2real;
pub mod orientation;
pub mod potential;
pub mod random_games;
pub mod solver;
pub mod tournament;

pub use error::{Error, Result};
pub use log2real::Log2Real;
