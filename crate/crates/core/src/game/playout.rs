use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{BoardKind, GameState, Move, Outcome, Transcript};

/// Generator handed to strategies. Playouts seed it from the transcript seed,
/// so a fixed seed and fixed strategies give bit-identical transcripts.
pub type GameRng = ChaCha8Rng;

/// A move-choosing policy for one side of a Maker-Breaker game.
pub trait Strategy {
    /// Chooses the whole turn for the player to move in `state`.
    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move>;
}

impl<S: Strategy + ?Sized> Strategy for Box<S> {
    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move> {
        (**self).next_move(state, rng)
    }
}

/// Claims a uniformly random set of unclaimed elements, the full allotment.
/// On graph boards it can also pick a uniformly random direction per edge.
#[derive(Clone, Debug, Default)]
pub struct RandomStrategy {
    pub oriented: bool,
}

impl RandomStrategy {
    pub fn oriented() -> Self {
        RandomStrategy { oriented: true }
    }
}

impl Strategy for RandomStrategy {
    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move> {
        let free: Vec<_> = state.unclaimed().collect();
        let want = state.bias().of(state.turn()) - state.claimed_this_turn();
        let take = (want as usize).min(free.len());
        let mut picked: Vec<_> = sample(rng, free.len(), take)
            .into_iter()
            .map(|i| free[i])
            .collect();
        picked.sort_unstable();
        let board = state.board();
        let orientable = matches!(
            board.kind(),
            BoardKind::CompleteGraphEdges | BoardKind::ReducedKPartite
        );
        if self.oriented && orientable {
            let arcs = picked
                .iter()
                .map(|&e| {
                    let (u, v) = board.pair(e).expect("graph board element");
                    if rng.gen::<bool>() {
                        (u, v)
                    } else {
                        (v, u)
                    }
                })
                .collect();
            Ok(Move::oriented(picked, arcs))
        } else {
            Ok(Move::new(picked))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Playout {
    pub state: GameState,
    pub transcript: Transcript,
}

/// Plays `state` to the end: until the board is full, or, for explicit
/// families, until Maker completes a winning set. Implicit families are
/// judged once, on the final position.
pub fn play_out(
    mut state: GameState,
    maker: &mut dyn Strategy,
    breaker: &mut dyn Strategy,
    seed: u64,
) -> Result<Playout> {
    let mut rng = GameRng::seed_from_u64(seed);
    let tracked = state.family().as_explicit().is_some();
    loop {
        if (tracked && state.maker_wins()) || state.is_full() {
            break;
        }
        let player = state.turn();
        let strategy: &mut dyn Strategy = match player {
            crate::game::Player::Maker => maker,
            crate::game::Player::Breaker => breaker,
        };
        let record = state.history().len();
        let mv =
            strategy
                .next_move(&state, &mut rng)
                .map_err(|cause| Error::IllegalStrategyMove {
                    record,
                    cause: Box::new(cause),
                })?;
        state
            .apply_move(player, &mv)
            .map_err(|cause| Error::IllegalStrategyMove {
                record,
                cause: Box::new(cause),
            })?;
    }
    let outcome = match state.outcome() {
        Outcome::Incomplete => unreachable!("playout stops only at a decided position"),
        o => o,
    };
    let transcript = state.transcript(seed, outcome);
    Ok(Playout { state, transcript })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::game::{Board, ElementId, ExplicitFamily};

    fn game(size: usize, sets: &[&[u32]], a: u32, b: u32) -> GameState {
        let f = ExplicitFamily::from_indices(size, sets).unwrap();
        GameState::new(
            Arc::new(Board::abstract_board(size)),
            Arc::new(f.into()),
            a,
            b,
        )
        .unwrap()
    }

    struct Fixed(Vec<u32>);
    impl Strategy for Fixed {
        fn next_move(&mut self, _: &GameState, _: &mut GameRng) -> Result<Move> {
            Ok(Move::new(self.0.iter().map(|&e| ElementId(e)).collect()))
        }
    }

    #[test]
    fn singleton_family_is_won_on_the_first_move() {
        let s = game(3, &[&[0]], 1, 1);
        let p = play_out(s, &mut Fixed(vec![0]), &mut RandomStrategy::default(), 1).unwrap();
        assert_eq!(p.transcript.outcome, Outcome::MakerWin);
        assert_eq!(p.transcript.records.len(), 1);
    }

    #[test]
    fn random_playouts_are_reproducible_and_replay() {
        let s = game(12, &[&[0, 1, 2], &[3, 4, 5], &[6, 7]], 2, 1);
        let run = |seed| {
            play_out(
                s.clone(),
                &mut RandomStrategy::default(),
                &mut RandomStrategy::default(),
                seed,
            )
            .unwrap()
        };
        let (a, b) = (run(42), run(42));
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
        let replayed = GameState::replay(
            s.board().clone(),
            s.family().clone(),
            s.bias(),
            &a.transcript.records,
        )
        .unwrap();
        assert_eq!(replayed.ownership(), a.state.ownership());
    }

    #[test]
    fn illegal_strategy_move_is_reported_with_its_record() {
        let s = game(4, &[&[0, 1]], 1, 1);
        let err = play_out(s, &mut Fixed(vec![0]), &mut Fixed(vec![0]), 0).unwrap_err();
        match err {
            Error::IllegalStrategyMove { record, cause } => {
                assert_eq!(record, 1);
                assert!(matches!(*cause, Error::ElementClaimed(ElementId(0))));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn conservation_and_totality_hold_along_random_games() {
        for seed in 0..20 {
            let s = game(9, &[&[0, 1, 2], &[2, 3, 4], &[5, 6, 7, 8]], 1, 1);
            let p = play_out(
                s.clone(),
                &mut RandomStrategy::default(),
                &mut RandomStrategy::default(),
                seed,
            )
            .unwrap();
            let mut replay = s.clone();
            let mut won = false;
            for r in &p.transcript.records {
                replay
                    .apply_move(r.player, &Move::new(r.elements.clone()))
                    .unwrap();
                assert_eq!(
                    replay.maker_count() + replay.breaker_count() + replay.unclaimed_count(),
                    9
                );
                assert!(
                    !won || replay.maker_wins(),
                    "maker_wins flipped back to false"
                );
                won = replay.maker_wins();
            }
            match p.transcript.outcome {
                Outcome::MakerWin => assert!(replay.maker_wins()),
                Outcome::BreakerWin => assert!(replay.is_full() && !replay.maker_wins()),
                Outcome::Incomplete => panic!("finished game reported incomplete"),
            }
        }
    }
}
