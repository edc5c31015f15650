//! The orientation game and the auxiliary `(2:1)` game on ordered pairs.
//!
//! In the orientation game OMaker and OBreaker alternately direct a still
//! undirected edge of `K_n`, OMaker first. OMaker wins if the final digraph,
//! made of both players' arcs, contains the goal tournament.
//!
//! The auxiliary game `H` is a `(2:1)` Maker-Breaker game on the `n(n-1)`
//! ordered pairs whose winning sets are the labelled copies of the goal.
//! [`SimulatingOBreaker`] turns any Breaker for `H` into an OBreaker: every
//! OMaker arc becomes a Maker claim in `H`, and when Breaker answers with
//! `(x, y)` OBreaker directs `y -> x`, which is recorded as a second Maker
//! claim. Breaker's choice is made after the first Maker element of the round
//! and before the second. Two invariants tie the games together and are
//! checked after every OBreaker move:
//!
//! 1. Breaker owns `(x, y)` in `H` only if Maker owns `(y, x)`;
//! 2. `u -> v` is an arc of the orientation game iff Maker owns `(u, v)`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    Board, BoardKind, ElementId, ExplicitFamily, GameRng, GameState, Move, MoveRecord, Outcome,
    Owner, Player, Transcript, TranscriptHeader, Vertex, WinningFamily,
};
use crate::log2real::Log2Real;
use crate::potential::{es_breaker_move, AliveSetView};
use crate::tournament::{contains_copy, Digraph, Tournament};

/// Largest `n^k` for which the `H` family is listed explicitly.
pub const MAX_H_ENUMERATION: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrMove {
    pub round: u32,
    pub player: Player,
    pub arc: (Vertex, Vertex),
}

/// Position of the orientation game on `K_n`.
#[derive(Clone, Debug)]
pub struct OrientationState {
    board: Arc<Board>,
    arcs: Vec<Option<(Vertex, Vertex)>>,
    turn: Player,
    round: u32,
    oriented: usize,
    history: Vec<OrMove>,
}

impl OrientationState {
    pub fn new(n: usize) -> Self {
        let board = Arc::new(Board::complete_graph(n));
        OrientationState {
            arcs: vec![None; board.size()],
            board,
            turn: Player::Maker,
            round: 1,
            oriented: 0,
            history: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.board.n()
    }

    pub fn board(&self) -> &Arc<Board> {
        &self.board
    }

    pub fn turn(&self) -> Player {
        self.turn
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn history(&self) -> &[OrMove] {
        &self.history
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn oriented_count(&self) -> usize {
        self.oriented
    }

    pub fn is_complete(&self) -> bool {
        self.oriented == self.arcs.len()
    }

    /// Direction of edge `e`, if it has been directed.
    pub fn arc(&self, e: ElementId) -> Option<(Vertex, Vertex)> {
        self.arcs[e.index()]
    }

    pub fn is_oriented(&self, u: Vertex, v: Vertex) -> bool {
        self.board
            .element(u, v)
            .is_some_and(|e| self.arcs[e.index()].is_some())
    }

    pub fn unoriented(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.board
            .elements()
            .filter(|e| self.arcs[e.index()].is_none())
    }

    /// Directs the edge `{u, v}` as `u -> v` for `player`.
    pub fn or_apply(&mut self, player: Player, (u, v): (Vertex, Vertex)) -> Result<()> {
        if player != self.turn {
            return Err(Error::OutOfTurn {
                expected: self.turn,
                got: player,
            });
        }
        let e = self.board.element(u, v).filter(|_| u != v).ok_or_else(|| {
            Error::InvalidOrientation(format!("({u},{v}) is not an edge of K_{}", self.n()))
        })?;
        if self.arcs[e.index()].is_some() {
            return Err(Error::ElementClaimed(e));
        }
        self.arcs[e.index()] = Some((u, v));
        self.oriented += 1;
        self.history.push(OrMove {
            round: self.round,
            player,
            arc: (u, v),
        });
        if player == Player::Breaker {
            self.round += 1;
        }
        self.turn = player.other();
        Ok(())
    }

    /// All arcs, both players'.
    pub fn digraph(&self) -> Digraph {
        Digraph::from_arcs(self.n(), self.arcs.iter().flatten().copied()).expect("arcs of K_n")
    }

    /// Outcome once every edge is directed.
    pub fn outcome(&self, goal: &Tournament) -> Outcome {
        if !self.is_complete() {
            Outcome::Incomplete
        } else if contains_copy(&self.digraph(), goal) {
            Outcome::MakerWin
        } else {
            Outcome::BreakerWin
        }
    }

    /// Transcript in the game format; every record carries its arc.
    pub fn transcript(&self, goal: &Tournament, seed: u64) -> Transcript {
        Transcript {
            header: TranscriptHeader {
                board: BoardKind::CompleteGraphEdges,
                n: self.n(),
                k: Some(goal.k()),
                a: 1,
                b: 1,
                board_size: self.board.size(),
                seed,
            },
            records: self
                .history
                .iter()
                .map(|m| MoveRecord {
                    round: m.round,
                    player: m.player,
                    elements: vec![self.board.element(m.arc.0, m.arc.1).expect("edge")],
                    orientation: Some(vec![m.arc]),
                })
                .collect(),
            outcome: self.outcome(goal),
        }
    }

    /// Rebuilds the position recorded in an orientation transcript.
    pub fn replay(t: &Transcript) -> Result<Self> {
        let mut s = OrientationState::new(t.header.n);
        for (i, r) in t.records.iter().enumerate() {
            let arc = match r.orientation.as_deref() {
                Some([arc]) if r.elements.len() == 1 => *arc,
                _ => {
                    return Err(Error::Parse(format!(
                        "record {i}: orientation moves carry exactly one element and one arc"
                    )))
                }
            };
            if s.board.element(arc.0, arc.1) != Some(r.elements[0]) {
                return Err(Error::Parse(format!(
                    "record {i}: arc does not match its element"
                )));
            }
            s.or_apply(r.player, arc)
                .map_err(|cause| Error::IllegalStrategyMove {
                    record: i,
                    cause: Box::new(cause),
                })?;
        }
        Ok(s)
    }
}

/// A player of the orientation game.
pub trait OrStrategy {
    fn next_arc(&mut self, state: &OrientationState, rng: &mut GameRng)
        -> Result<(Vertex, Vertex)>;

    /// Called after every move of either player, once it has been applied.
    fn after_move(&mut self, _state: &OrientationState) -> Result<()> {
        Ok(())
    }
}

impl<S: OrStrategy + ?Sized> OrStrategy for Box<S> {
    fn next_arc(
        &mut self,
        state: &OrientationState,
        rng: &mut GameRng,
    ) -> Result<(Vertex, Vertex)> {
        (**self).next_arc(state, rng)
    }

    fn after_move(&mut self, state: &OrientationState) -> Result<()> {
        (**self).after_move(state)
    }
}

/// Uniformly random undirected edge, uniformly random direction.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomOrPlayer;

impl OrStrategy for RandomOrPlayer {
    fn next_arc(
        &mut self,
        state: &OrientationState,
        rng: &mut GameRng,
    ) -> Result<(Vertex, Vertex)> {
        let free: Vec<ElementId> = state.unoriented().collect();
        if free.is_empty() {
            return Err(Error::NoCandidates);
        }
        let (u, v) = state
            .board()
            .pair(free[rng.gen_range(0..free.len())])
            .expect("edge");
        Ok(if rng.gen::<bool>() { (u, v) } else { (v, u) })
    }
}

#[derive(Clone, Debug)]
pub struct OrPlayout {
    pub state: OrientationState,
    pub transcript: Transcript,
    pub outcome: Outcome,
}

/// Plays the orientation game on `K_n` until every edge is directed.
pub fn play_orientation(
    n: usize,
    goal: &Tournament,
    omaker: &mut dyn OrStrategy,
    obreaker: &mut dyn OrStrategy,
    seed: u64,
) -> Result<OrPlayout> {
    use rand::SeedableRng;
    let mut rng = GameRng::seed_from_u64(seed);
    let mut state = OrientationState::new(n);
    while !state.is_complete() {
        let record = state.history().len();
        let player = state.turn();
        let mover: &mut dyn OrStrategy = match player {
            Player::Maker => &mut *omaker,
            Player::Breaker => &mut *obreaker,
        };
        let wrap = |cause| Error::IllegalStrategyMove {
            record,
            cause: Box::new(cause),
        };
        let arc = mover.next_arc(&state, &mut rng).map_err(wrap)?;
        state.or_apply(player, arc).map_err(wrap)?;
        omaker.after_move(&state)?;
        obreaker.after_move(&state)?;
    }
    let outcome = state.outcome(goal);
    Ok(OrPlayout {
        transcript: state.transcript(goal, seed),
        state,
        outcome,
    })
}

/// The winning sets of `H`: for every injective map of the goal's vertices
/// into `0..n`, the ordered pairs carrying the goal's arcs.
pub fn build_h_family(goal: &Tournament, n: usize) -> Result<ExplicitFamily> {
    let board = Board::ordered_pairs(n);
    let k = goal.k();
    if k > n {
        return ExplicitFamily::new(board.size(), Vec::new());
    }
    if (n as u128).pow(k as u32) > MAX_H_ENUMERATION {
        return Err(Error::Unsupported(format!(
            "n^k = {n}^{k} exceeds the enumeration limit {MAX_H_ENUMERATION}; use the analytic count"
        )));
    }
    let arcs: Vec<(usize, usize)> = goal.arcs().collect();
    let mut sets = Vec::new();
    let mut image = vec![0 as Vertex; k];
    let mut used = vec![false; n];
    fn place(
        i: usize,
        image: &mut Vec<Vertex>,
        used: &mut Vec<bool>,
        emit: &mut dyn FnMut(&[Vertex]),
    ) {
        if i == image.len() {
            emit(image);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                image[i] = v as Vertex;
                place(i + 1, image, used, emit);
                used[v] = false;
            }
        }
    }
    place(0, &mut image, &mut used, &mut |img| {
        sets.push(
            arcs.iter()
                .map(|&(a, b)| board.element(img[a], img[b]).expect("distinct vertices"))
                .collect(),
        );
    });
    ExplicitFamily::new(board.size(), sets)
}

/// Number of winning sets of `H`: `n (n-1) ... (n-k+1) / |Aut(goal)|`.
pub fn h_family_count(goal: &Tournament, n: usize) -> Result<Log2Real> {
    if goal.k() > n {
        return Ok(Log2Real::ZERO);
    }
    Ok(Log2Real::falling_factorial(n as u64, goal.k() as u64)
        / Log2Real::from_u64(goal.automorphism_count()?))
}

/// The `(2:1)` game `H` for `goal` on `K_n`.
pub fn h_game(goal: &Tournament, n: usize) -> Result<GameState> {
    let family = build_h_family(goal, n)?;
    Ok(GameState::new(
        Arc::new(Board::ordered_pairs(n)),
        Arc::new(family.into()),
        2,
        1,
    )?
    .with_goal_size(goal.k()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObreakerCertificate {
    pub n: u64,
    pub k: u64,
    /// `log2(n^k 2^{-k(k-1)/4})`; `-inf` when `k > n` and no copy exists.
    pub log2_bound: f64,
    /// The bound is at most `1/2`, so the Erdős–Selfridge OBreaker wins
    /// for every goal on `k` vertices.
    pub holds: bool,
}

pub fn obreaker_certificate(n: u64, k: u64) -> ObreakerCertificate {
    if k > n || n == 0 {
        return ObreakerCertificate {
            n,
            k,
            log2_bound: f64::NEG_INFINITY,
            holds: true,
        };
    }
    let kf = k as f64;
    let log2_bound = kf * (n as f64).log2() - kf * (kf - 1.0) / 4.0;
    ObreakerCertificate {
        n,
        k,
        log2_bound,
        holds: log2_bound <= -1.0,
    }
}

/// Chooses Breaker's element in `H` among the candidates passing `filter`.
pub trait BreakerCore {
    fn choose(&mut self, h: &GameState, filter: &dyn Fn(ElementId) -> bool) -> Result<ElementId>;
}

/// The `(2:1)` Erdős–Selfridge Breaker on `H`. A set also counts as dead
/// when it contains the reverse of a Maker element; ties go to the smallest
/// element id.
#[derive(Clone, Copy, Debug, Default)]
pub struct EsBreakerCore;

impl BreakerCore for EsBreakerCore {
    fn choose(&mut self, h: &GameState, filter: &dyn Fn(ElementId) -> bool) -> Result<ElementId> {
        let board = h.board();
        let mut view = AliveSetView::new(h)?;
        view.kill_where(|set| {
            set.iter().any(|&e| {
                let (u, v) = board.pair(e).expect("ordered pair");
                let rev = board.element(v, u).expect("reverse pair");
                h.owner(rev) == Owner::Maker
            })
        });
        es_breaker_move(&view, 2, 1, filter)
    }
}

/// One line of the dual trace: an orientation move and the `H` claims it
/// caused.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub round: u32,
    pub player: Player,
    pub arc: (Vertex, Vertex),
    pub h_maker: Vec<(Vertex, Vertex)>,
    pub h_breaker: Vec<(Vertex, Vertex)>,
}

fn trace_dump(trace: &[TraceEntry]) -> String {
    trace
        .iter()
        .map(|t| serde_json::to_string(t).expect("trace entries serialize"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Checks both simulation invariants between an orientation position and
/// the `H` position shadowing it.
pub fn check_invariants(or: &OrientationState, h: &GameState) -> std::result::Result<(), String> {
    let hb = h.board();
    for e in hb.elements() {
        let (u, v) = hb.pair(e).expect("ordered pair");
        let rev = hb.element(v, u).expect("reverse pair");
        if h.owner(e) == Owner::Breaker && h.owner(rev) != Owner::Maker {
            return Err(format!(
                "Breaker owns ({u},{v}) but Maker does not own ({v},{u})"
            ));
        }
        let edge = or.board().element(u, v).expect("edge");
        let arc_present = or.arc(edge) == Some((u, v));
        if arc_present != (h.owner(e) == Owner::Maker) {
            return Err(format!(
                "arc {u}->{v} is {} in the orientation game but Maker {} ({u},{v}) in H",
                if arc_present { "present" } else { "absent" },
                if arc_present { "does not own" } else { "owns" },
            ));
        }
    }
    Ok(())
}

/// OBreaker driven by a Breaker strategy for `H`.
#[derive(Debug)]
pub struct SimulatingOBreaker<C> {
    core: C,
    h: GameState,
    synced: usize,
    trace: Vec<TraceEntry>,
    /// Whether `H` holds an unsettled Maker claim from the latest OMaker arc.
    maker_open: bool,
}

impl<C: BreakerCore> SimulatingOBreaker<C> {
    pub fn new(goal: &Tournament, n: usize, core: C) -> Result<Self> {
        Ok(SimulatingOBreaker {
            core,
            h: h_game(goal, n)?,
            synced: 0,
            trace: Vec::new(),
            maker_open: false,
        })
    }

    /// The simulated `H` position.
    pub fn h_state(&self) -> &GameState {
        &self.h
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// Does Maker own a winning set of `H`?
    pub fn h_maker_wins(&self) -> bool {
        self.h.maker_wins()
    }

    fn pair_element(&self, (u, v): (Vertex, Vertex)) -> ElementId {
        self.h.board().element(u, v).expect("ordered pair")
    }

    fn violation(&self, reason: String) -> Error {
        Error::InvariantViolation {
            reason,
            trace: trace_dump(&self.trace),
        }
    }

    /// Feeds OMaker's new arcs into `H` as Maker claims.
    fn sync(&mut self, or: &OrientationState) -> Result<()> {
        for m in &or.history()[self.synced..] {
            if m.player == Player::Maker {
                if self.maker_open {
                    return Err(self.violation("two OMaker arcs without an OBreaker reply".into()));
                }
                let e = self.pair_element(m.arc);
                self.h.apply_partial(Player::Maker, &Move::single(e))?;
                self.maker_open = true;
                self.trace.push(TraceEntry {
                    round: m.round,
                    player: Player::Maker,
                    arc: m.arc,
                    h_maker: vec![m.arc],
                    h_breaker: Vec::new(),
                });
            }
        }
        self.synced = or.history().len();
        Ok(())
    }

    /// Closes the simulation at the end of the game and checks the
    /// invariants one last time.
    pub fn finish(&mut self, or: &OrientationState) -> Result<()> {
        self.sync(or)?;
        if self.maker_open {
            self.h.settle_turn(Player::Maker)?;
            self.maker_open = false;
        }
        check_invariants(or, &self.h).map_err(|r| self.violation(r))
    }
}

impl<C: BreakerCore> OrStrategy for SimulatingOBreaker<C> {
    fn next_arc(&mut self, or: &OrientationState, _rng: &mut GameRng) -> Result<(Vertex, Vertex)> {
        self.sync(or)?;
        if !self.maker_open {
            return Err(self.violation("OBreaker to move without a pending OMaker arc".into()));
        }
        let hb = self.h.board().clone();
        let candidate = |e: ElementId| {
            let (x, y) = hb.pair(e).expect("ordered pair");
            !or.is_oriented(x, y)
        };
        let chosen = self.core.choose(&self.h, &candidate)?;
        let (x, y) = hb.pair(chosen).expect("ordered pair");
        let reverse = self.pair_element((y, x));
        self.h.apply_move(Player::Maker, &Move::single(reverse))?;
        self.h.apply_move(Player::Breaker, &Move::single(chosen))?;
        self.maker_open = false;
        self.trace.push(TraceEntry {
            round: or.round(),
            player: Player::Breaker,
            arc: (y, x),
            h_maker: vec![(y, x)],
            h_breaker: vec![(x, y)],
        });
        Ok((y, x))
    }

    fn after_move(&mut self, or: &OrientationState) -> Result<()> {
        let last = or.history().last().copied();
        if let Some(m) = last.filter(|m| m.player == Player::Breaker) {
            self.synced = or.history().len();
            let expected = self.trace.last().map(|t| t.arc);
            if expected != Some(m.arc) {
                return Err(self.violation(format!(
                    "OBreaker played {:?} but the simulation chose {expected:?}",
                    m.arc
                )));
            }
            check_invariants(or, &self.h).map_err(|r| self.violation(r))?;
        }
        if or.is_complete() {
            self.finish(or)?;
        }
        Ok(())
    }
}

/// The wrapped Erdős–Selfridge OBreaker for `goal` on `K_n`.
pub fn es_obreaker(goal: &Tournament, n: usize) -> Result<SimulatingOBreaker<EsBreakerCore>> {
    SimulatingOBreaker::new(goal, n, EsBreakerCore)
}

/// `WinningFamily` wrapper around [`build_h_family`].
pub fn h_winning_family(goal: &Tournament, n: usize) -> Result<WinningFamily> {
    Ok(build_h_family(goal, n)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_set(h: &GameState, who: Owner) -> Vec<(Vertex, Vertex)> {
        h.owned_by(who)
            .map(|e| h.board().pair(e).unwrap())
            .collect()
    }

    #[test]
    fn or_moves_are_write_once() {
        let mut s = OrientationState::new(3);
        s.or_apply(Player::Maker, (1, 2)).unwrap();
        assert_eq!(s.arc(s.board().element(1, 2).unwrap()), Some((1, 2)));
        assert!(s.or_apply(Player::Breaker, (1, 2)).is_err());
        assert!(s.or_apply(Player::Breaker, (2, 1)).is_err());
        assert!(s.or_apply(Player::Maker, (0, 1)).is_err());
        assert!(s.or_apply(Player::Breaker, (0, 0)).is_err());
        s.or_apply(Player::Breaker, (0, 1)).unwrap();
        s.or_apply(Player::Maker, (2, 0)).unwrap();
        assert!(s.is_complete());
        assert_eq!(s.outcome(&Tournament::cyclic3()), Outcome::MakerWin);
    }

    #[test]
    fn h_family_examples() {
        assert_eq!(
            build_h_family(&Tournament::transitive(2), 3).unwrap().len(),
            6
        );
        let f = build_h_family(&Tournament::transitive(3), 3).unwrap();
        assert_eq!((f.len(), f.uniform_set_size()), (6, Some(3)));
        assert_eq!(build_h_family(&Tournament::cyclic3(), 3).unwrap().len(), 2);
        assert!(build_h_family(&Tournament::transitive(18), 4)
            .unwrap()
            .is_empty());
        assert!(build_h_family(&Tournament::transitive(8), 10).is_err());
        for (goal, n) in [(Tournament::cyclic3(), 5), (Tournament::transitive(4), 5)] {
            let listed = build_h_family(&goal, n).unwrap().len() as f64;
            assert!((h_family_count(&goal, n).unwrap().to_f64() - listed).abs() < 1e-9);
        }
    }

    #[test]
    fn certificate_examples() {
        let c = obreaker_certificate(256, 34);
        assert!(c.holds && (c.log2_bound + 8.5).abs() < 1e-12);
        for n in [4u64, 16, 256, 1 << 20] {
            let k = 2 * (n as f64).log2() as u64;
            assert!(!obreaker_certificate(n, k).holds);
        }
        assert!(obreaker_certificate(4, 18).holds);
    }

    #[test]
    fn first_round_on_the_triangle() {
        let goal = Tournament::cyclic3();
        let mut ob = es_obreaker(&goal, 3).unwrap();
        let mut or = OrientationState::new(3);
        let mut rng = <GameRng as rand::SeedableRng>::seed_from_u64(0);
        or.or_apply(Player::Maker, (1, 2)).unwrap();
        let reply = ob.next_arc(&or, &mut rng).unwrap();
        assert_eq!(reply, (1, 0));
        or.or_apply(Player::Breaker, reply).unwrap();
        ob.after_move(&or).unwrap();
        assert_eq!(pair_set(ob.h_state(), Owner::Maker), vec![(1, 0), (1, 2)]);
        assert_eq!(pair_set(ob.h_state(), Owner::Breaker), vec![(0, 1)]);
    }

    #[test]
    fn random_playouts_keep_the_invariants() {
        for goal in [Tournament::transitive(3), Tournament::cyclic3()] {
            for n in 3..=5 {
                for seed in 0..20 {
                    let mut ob = es_obreaker(&goal, n).unwrap();
                    let p = play_orientation(n, &goal, &mut RandomOrPlayer, &mut ob, seed).unwrap();
                    let h = ob.h_state();
                    let m = h.maker_count();
                    let b = h.breaker_count();
                    assert_eq!(m, p.state.edge_count());
                    assert_eq!(
                        b,
                        p.state
                            .history()
                            .iter()
                            .filter(|x| x.player == Player::Breaker)
                            .count()
                    );
                    assert_eq!(ob.h_maker_wins(), p.outcome == Outcome::MakerWin);
                    let replayed = OrientationState::replay(&p.transcript).unwrap();
                    assert_eq!(replayed.digraph(), p.state.digraph());
                }
            }
        }
    }

    #[test]
    fn broken_simulations_are_reported() {
        let goal = Tournament::cyclic3();
        let mut h = h_game(&goal, 3).unwrap();
        let or = OrientationState::new(3);
        assert!(check_invariants(&or, &h).is_ok());
        let e = h.board().element(0, 1).unwrap();
        h.apply_move(Player::Maker, &Move::single(e)).unwrap();
        assert!(check_invariants(&or, &h).unwrap_err().contains("0->1"));
        let mut or2 = OrientationState::new(3);
        or2.or_apply(Player::Maker, (0, 1)).unwrap();
        assert!(check_invariants(&or2, &h).is_ok());
        h.apply_move(
            Player::Breaker,
            &Move::single(h.board().element(2, 1).unwrap()),
        )
        .unwrap();
        assert!(check_invariants(&or2, &h)
            .unwrap_err()
            .contains("Breaker owns (2,1)"));
    }
}
