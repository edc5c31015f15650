mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tournament_game::game::{play_out, GameState, Outcome, Player, RandomStrategy, Transcript};
use tournament_game::orientation::{play_orientation, OrientationState, RandomOrPlayer};
use tournament_game::potential::es_criterion;
use tournament_game::random_games::{
    random_playout, random_playout_transcript, TrialConfig, Variant,
};
use tournament_game::solver::{solve_mb, solve_orientation, SolverConfig, DEFAULT_OR_LIMIT};
use tournament_game::tournament::{
    contains_copy, maker_tournament_wrapper, reduced_clique_game, tournament_game, Digraph,
    Partition, Tournament,
};

use common::{es_holds_exact, mb_state, naive_contains, random_digraph};

fn random_sets(rng: &mut ChaCha8Rng, size: usize, count: usize, max_len: usize) -> Vec<Vec<u32>> {
    let mut sets = BTreeSet::new();
    for _ in 0..count {
        let len = rng.gen_range(1..=max_len.min(size));
        let mut set = BTreeSet::new();
        while set.len() < len {
            set.insert(rng.gen_range(0..size as u32));
        }
        sets.insert(set.into_iter().collect::<Vec<_>>());
    }
    sets.into_iter().collect()
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn containment_agrees_with_all_injections(
        seed in any::<u64>(), n in 1usize..=7, k in 1usize..=4, p in 0.1f64..0.9, oriented in any::<bool>()
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_digraph(n, p, oriented, &mut rng);
        let goal = Tournament::random(k, &mut rng);
        prop_assert_eq!(contains_copy(&d, &goal), naive_contains(&d, &goal));
    }

    #[test]
    fn transitive_containment_agrees_with_all_injections(
        seed in any::<u64>(), n in 1usize..=8, k in 1usize..=5, p in 0.2f64..0.9
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_digraph(n, p, true, &mut rng);
        let goal = Tournament::transitive(k);
        prop_assert_eq!(contains_copy(&d, &goal), naive_contains(&d, &goal));
    }

    #[test]
    fn canonical_code_ignores_labels(seed in any::<u64>(), k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Tournament::random(k, &mut rng);
        let relabelled = t.relabel(&shuffled(&mut rng, k)).unwrap();
        prop_assert_eq!(t.canonical_code().unwrap(), relabelled.canonical_code().unwrap());
        prop_assert_eq!(t.automorphism_count().unwrap(), relabelled.automorphism_count().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_is_deterministic_and_label_blind(
        seed in any::<u64>(), size in 1usize..=9, count in 1usize..=5, a in 1u32..=2, b in 1u32..=2
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = random_sets(&mut rng, size, count, 4);
        let perm = shuffled(&mut rng, size);
        let relabelled: Vec<Vec<u32>> = sets
            .iter()
            .map(|s| s.iter().map(|&e| perm[e as usize] as u32).collect())
            .collect();
        let first = solve_mb(&mb_state(size, &sets, a, b), SolverConfig::default()).unwrap();
        let again = solve_mb(&mb_state(size, &sets, a, b), SolverConfig::default()).unwrap();
        let other = solve_mb(&mb_state(size, &relabelled, a, b), SolverConfig::default()).unwrap();
        prop_assert_eq!(&first, &again);
        prop_assert_eq!(first.winner, other.winner);
    }

    #[test]
    fn underclaiming_never_changes_the_value(
        seed in any::<u64>(), size in 1usize..=8, count in 1usize..=4, a in 1u32..=3, b in 1u32..=2
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = random_sets(&mut rng, size, count, 4);
        let state = mb_state(size, &sets, a, b);
        let full = solve_mb(&state, SolverConfig::default()).unwrap();
        let free = solve_mb(&state, SolverConfig { underclaim: true, ..SolverConfig::default() }).unwrap();
        prop_assert_eq!(full.winner, free.winner);
    }

    #[test]
    fn criterion_matches_exact_check_and_certifies_breaker(
        seed in any::<u64>(), size in 3usize..=12, count in 1usize..=5, a in 1u32..=2, b in 1u32..=2
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = random_sets(&mut rng, size, count, 7);
        let state = mb_state(size, &sets, a, b);
        let cert = es_criterion(state.family(), a, b).unwrap();
        prop_assert!(cert.exact);
        prop_assert_eq!(cert.holds, es_holds_exact(&sets, a, b));
        if cert.holds {
            prop_assert_eq!(solve_mb(&state, SolverConfig::default()).unwrap().winner, Player::Breaker);
        }
    }

    #[test]
    fn wrapped_maker_wins_only_with_a_copy(seed in any::<u64>(), n in 3usize..=9, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let goal = Tournament::random(k, &mut rng);
        let partition = Partition::balanced(n, k).unwrap();
        let state = tournament_game(n, &goal, 1, 1).unwrap();
        let mut maker = maker_tournament_wrapper(&state, &goal, &partition, RandomStrategy::default()).unwrap();
        let playout = play_out(state, &mut maker, &mut RandomStrategy::default(), seed).unwrap();
        let d = Digraph::of_maker(&playout.state);
        if maker.inner_won() {
            prop_assert!(naive_contains(&d, &goal));
        }
        prop_assert_eq!(playout.transcript.outcome == Outcome::MakerWin, contains_copy(&d, &goal));
    }

    #[test]
    fn transcripts_round_trip_and_replay(seed in any::<u64>(), n in 3usize..=10, k in 2usize..=3) {
        prop_assume!(k <= n);
        let (state, _) = reduced_clique_game(n, k, 1, 1).unwrap();
        let (board, family, bias) = (state.board().clone(), state.family().clone(), state.bias());
        let playout = play_out(state, &mut RandomStrategy::default(), &mut RandomStrategy::default(), seed).unwrap();
        let parsed = Transcript::from_jsonl(&playout.transcript.to_jsonl()).unwrap();
        prop_assert_eq!(&parsed, &playout.transcript);
        let replayed = GameState::replay(board, family, bias, &parsed.records).unwrap();
        prop_assert_eq!(replayed.ownership(), playout.state.ownership());
        prop_assert_eq!(replayed.outcome(), playout.transcript.outcome);
    }

    #[test]
    fn orientation_transcripts_replay(seed in any::<u64>(), n in 2usize..=7) {
        let goal = Tournament::cyclic3();
        let p = play_orientation(n, &goal, &mut RandomOrPlayer, &mut RandomOrPlayer, seed).unwrap();
        let parsed = Transcript::from_jsonl(&p.transcript.to_jsonl()).unwrap();
        let replayed = OrientationState::replay(&parsed).unwrap();
        prop_assert_eq!(replayed.digraph().arcs().collect::<Vec<_>>(), p.state.digraph().arcs().collect::<Vec<_>>());
        prop_assert_eq!(replayed.outcome(&goal), p.outcome);
    }

    #[test]
    fn random_trials_are_reproducible(seed in any::<u64>(), trial in 0u64..50, k in 2usize..=5, v in 0usize..3) {
        let variant = [Variant::RandomTournament, Variant::RandomReducedClique, Variant::RandomOrientation][v];
        let config = TrialConfig::new(variant, 16, k, 1, seed);
        let won = random_playout(&config, trial).unwrap();
        prop_assert_eq!(won, random_playout(&config, trial).unwrap());
        let transcript = random_playout_transcript(&config, trial).unwrap();
        prop_assert_eq!(transcript.outcome == Outcome::MakerWin, won);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orientation_value_depends_only_on_the_goal_class(seed in any::<u64>(), n in 2usize..=4, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let goal = Tournament::random(k, &mut rng);
        let relabelled = goal.relabel(&shuffled(&mut rng, k)).unwrap();
        let state = OrientationState::new(n);
        let a = solve_orientation(&state, &goal, DEFAULT_OR_LIMIT).unwrap();
        let b = solve_orientation(&state, &relabelled, DEFAULT_OR_LIMIT).unwrap();
        prop_assert_eq!(a.winner, b.winner);
    }
}
