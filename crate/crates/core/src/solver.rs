//! Exact minimax for tiny instances.
//!
//! [`solve_mb`] searches a biased Maker-Breaker game over the unclaimed
//! elements that still lie in some Breaker-free winning set. Elements outside
//! every such set cannot affect the result, so they are only used to pad a
//! move to its legal size. Both players claim their full allotment of
//! relevant elements unless `underclaim` is enabled; with it, Maker may also
//! stop early, which never changes the value and exists to check exactly
//! that.
//!
//! [`solve_orientation`] searches the orientation game directly. Both
//! searches expand moves in ascending element order and memoize positions in
//! a private table, so node counts are reproducible.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    ElementId, ExplicitFamily, GameRng, GameState, Move, Owner, Player, Strategy, Vertex,
};
use crate::orientation::{OrStrategy, OrientationState};
use crate::tournament::{contains_copy, Digraph, Tournament};

pub const DEFAULT_MB_LIMIT: usize = 24;
pub const DEFAULT_OR_LIMIT: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    /// Largest number of relevant unclaimed elements accepted.
    pub limit: usize,
    /// Let Maker claim fewer than her allotment.
    pub underclaim: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            limit: DEFAULT_MB_LIMIT,
            underclaim: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    /// The side that wins under optimal play from the given position.
    pub winner: Player,
    /// A winner-preserving move for the player to move, when one is needed.
    pub principal: Option<Move>,
    pub nodes: u64,
    pub table_hits: u64,
    pub table_size: usize,
}

/// `(maker mask, breaker mask, side to move, claimed this turn)`.
type MbKey = (u64, u64, Player, u32);

struct MbSearch {
    sets: Vec<u64>,
    a: u32,
    b: u32,
    underclaim: bool,
    table: HashMap<MbKey, bool>,
    nodes: u64,
    hits: u64,
}

impl MbSearch {
    fn relevant(&self, maker: u64, breaker: u64) -> u64 {
        self.sets
            .iter()
            .filter(|&&s| s & breaker == 0)
            .fold(0, |acc, &s| acc | (s & !maker))
    }

    fn maker_complete(&self, maker: u64) -> bool {
        self.sets.iter().any(|&s| s & !maker == 0)
    }

    /// Does Maker win from this position?
    fn value(&mut self, maker: u64, breaker: u64, turn: Player, done: u32) -> bool {
        self.nodes += 1;
        if self.maker_complete(maker) {
            return true;
        }
        let rel = self.relevant(maker, breaker);
        if rel == 0 {
            return false;
        }
        if turn == Player::Maker {
            let left = self.a - done;
            // An alive set within reach this turn decides the game.
            if self
                .sets
                .iter()
                .any(|&s| s & breaker == 0 && (s & !maker).count_ones() <= left)
            {
                return true;
            }
        }
        let key = (maker, breaker, turn, done);
        if let Some(&v) = self.table.get(&key) {
            self.hits += 1;
            return v;
        }
        let v = self
            .children(maker, breaker, turn, done, rel, |_| ())
            .is_some()
            == (turn == Player::Maker);
        self.table.insert(key, v);
        v
    }

    /// Sizes of the claims the side to move may make, preferred first.
    fn claim_sizes(&self, turn: Player, done: u32, rel: u64) -> Vec<u32> {
        let avail = rel.count_ones();
        match turn {
            Player::Maker => {
                let full = (self.a - done).min(avail);
                if self.underclaim {
                    (0..=full).rev().collect()
                } else {
                    vec![full]
                }
            }
            Player::Breaker => vec![(self.b - done).min(avail)],
        }
    }

    /// Searches the moves from this position. For Maker, returns the first
    /// winning claim; for Breaker, the first claim that refutes Maker.
    fn children(
        &mut self,
        maker: u64,
        breaker: u64,
        turn: Player,
        done: u32,
        rel: u64,
        mut on_node: impl FnMut(u64),
    ) -> Option<u64> {
        let bits: Vec<u32> = (0..64).filter(|&i| rel >> i & 1 == 1).collect();
        for size in self.claim_sizes(turn, done, rel) {
            let mut found = None;
            for_each_subset(&bits, size as usize, &mut |claim| {
                if found.is_some() {
                    return;
                }
                on_node(claim);
                let maker_wins = match turn {
                    Player::Maker => self.value(maker | claim, breaker, Player::Breaker, 0),
                    Player::Breaker => self.value(maker, breaker | claim, Player::Maker, 0),
                };
                if maker_wins == (turn == Player::Maker) {
                    found = Some(claim);
                }
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Calls `f` with the mask of every `size`-subset of `bits`, in
/// lexicographic order of the sorted positions.
fn for_each_subset(bits: &[u32], size: usize, f: &mut dyn FnMut(u64)) {
    fn go(bits: &[u32], start: usize, left: usize, acc: u64, f: &mut dyn FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=bits.len() - left {
            go(bits, i + 1, left - 1, acc | 1 << bits[i], f);
        }
    }
    if size <= bits.len() {
        go(bits, 0, size, 0, f);
    }
}

/// Solves the Maker-Breaker game from `state` exactly.
///
/// Implicit families are listed first and must be enumerable.
pub fn solve_mb(state: &GameState, config: SolverConfig) -> Result<SolveResult> {
    let listed;
    let family: &ExplicitFamily = match state.family().as_explicit() {
        Some(f) => f,
        None => {
            listed = state.family().to_explicit()?;
            &listed
        }
    };
    // Local universe: unclaimed elements of Breaker-free sets.
    let mut local = vec![None; state.board().size()];
    let mut universe: Vec<ElementId> = Vec::new();
    let mut maker_done = false;
    let mut sets = Vec::new();
    for set in family.sets() {
        if set.iter().any(|&e| state.owner(e) == Owner::Breaker) {
            continue;
        }
        let mut mask = 0u64;
        for &e in set {
            if state.owner(e) == Owner::Unclaimed {
                let idx = *local[e.index()].get_or_insert_with(|| {
                    universe.push(e);
                    universe.len() - 1
                });
                if idx >= 64 {
                    return Err(Error::SolverLimit {
                        remaining: universe.len(),
                        limit: config.limit,
                    });
                }
                mask |= 1 << idx;
            }
        }
        maker_done |= mask == 0;
        sets.push(mask);
    }
    if universe.len() > config.limit {
        return Err(Error::SolverLimit {
            remaining: universe.len(),
            limit: config.limit,
        });
    }
    // Universe indices follow ascending element ids.
    let mut order: Vec<usize> = (0..universe.len()).collect();
    order.sort_by_key(|&i| universe[i]);
    let mut remap = vec![0; universe.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let sets: Vec<u64> = sets
        .iter()
        .map(|&m| {
            (0..universe.len())
                .filter(|&i| m >> i & 1 == 1)
                .fold(0, |acc, i| acc | 1 << remap[i])
        })
        .collect();
    universe.sort_unstable();

    let bias = state.bias();
    let turn = state.turn();
    let done = state.claimed_this_turn();
    let mut search = MbSearch {
        sets,
        a: bias.maker,
        b: bias.breaker,
        underclaim: config.underclaim,
        table: HashMap::new(),
        nodes: 0,
        hits: 0,
    };
    let finish = |search: &MbSearch, winner, principal| SolveResult {
        winner,
        principal,
        nodes: search.nodes,
        table_hits: search.hits,
        table_size: search.table.len(),
    };
    if maker_done || state.maker_wins() {
        return Ok(finish(&search, Player::Maker, None));
    }
    if state.is_full() {
        return Ok(finish(&search, Player::Breaker, None));
    }
    let maker_wins = search.value(0, 0, turn, done);
    let winner = if maker_wins {
        Player::Maker
    } else {
        Player::Breaker
    };
    let rel = search.relevant(0, 0);
    let mut first = None;
    let chosen = search.children(0, 0, turn, done, rel, |c| {
        first.get_or_insert(c);
    });
    // A losing side still has to move: take its first candidate claim.
    let claim = chosen.or(first).unwrap_or(0);
    let mut elements: Vec<ElementId> = (0..universe.len())
        .filter(|&i| claim >> i & 1 == 1)
        .map(|i| universe[i])
        .collect();
    let quota = bias.of(turn) - done;
    let pad_to = match turn {
        Player::Maker if config.underclaim => elements.len(),
        _ => (quota as usize).min(state.unclaimed_count()),
    };
    for e in state.unclaimed() {
        if elements.len() >= pad_to {
            break;
        }
        if local[e.index()].is_none() {
            elements.push(e);
        }
    }
    elements.sort_unstable();
    Ok(finish(&search, winner, Some(Move::new(elements))))
}

/// Edge status digit: 0 undirected, 1 directed low to high, 2 high to low.
type OrKey = (u32, Player);

struct OrSearch<'a> {
    goal: &'a Tournament,
    n: usize,
    pairs: Vec<(Vertex, Vertex)>,
    table: HashMap<OrKey, bool>,
    nodes: u64,
    hits: u64,
}

impl OrSearch<'_> {
    fn digraph(&self, status: &[u8], optimistic: bool) -> Digraph {
        let mut d = Digraph::new(self.n);
        for (&(u, v), &s) in self.pairs.iter().zip(status) {
            if s == 1 || (s == 0 && optimistic) {
                d.add_arc(u, v).expect("edge");
            }
            if s == 2 || (s == 0 && optimistic) {
                d.add_arc(v, u).expect("edge");
            }
        }
        d
    }

    fn key(status: &[u8]) -> u32 {
        status.iter().rev().fold(0, |acc, &s| acc * 3 + s as u32)
    }

    /// Does OMaker win from this position?
    fn value(&mut self, status: &mut Vec<u8>, turn: Player) -> bool {
        self.nodes += 1;
        if contains_copy(&self.digraph(status, false), self.goal) {
            return true;
        }
        if !contains_copy(&self.digraph(status, true), self.goal) {
            return false;
        }
        let key = (Self::key(status), turn);
        if let Some(&v) = self.table.get(&key) {
            self.hits += 1;
            return v;
        }
        let v = self.best(status, turn).is_some() == (turn == Player::Maker);
        self.table.insert(key, v);
        v
    }

    /// First move that wins for the side to move, edges ascending and the
    /// low-to-high direction first.
    fn best(&mut self, status: &mut Vec<u8>, turn: Player) -> Option<(Vertex, Vertex)> {
        for i in 0..status.len() {
            if status[i] != 0 {
                continue;
            }
            for dir in [1u8, 2] {
                status[i] = dir;
                let maker_wins = self.value(status, turn.other());
                status[i] = 0;
                if maker_wins == (turn == Player::Maker) {
                    let (u, v) = self.pairs[i];
                    return Some(if dir == 1 { (u, v) } else { (v, u) });
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrSolveResult {
    pub winner: Player,
    pub principal: Option<(Vertex, Vertex)>,
    pub nodes: u64,
    pub table_hits: u64,
    pub table_size: usize,
}

/// Solves the orientation game for `goal` from `state`; `limit` bounds the
/// number of undirected edges.
pub fn solve_orientation(
    state: &OrientationState,
    goal: &Tournament,
    limit: usize,
) -> Result<OrSolveResult> {
    let free = state.edge_count() - state.oriented_count();
    if free > limit || free > 20 {
        return Err(Error::SolverLimit {
            remaining: free,
            limit: limit.min(20),
        });
    }
    let board = state.board();
    let pairs: Vec<(Vertex, Vertex)> = board
        .elements()
        .map(|e| board.pair(e).expect("edge"))
        .collect();
    let mut status: Vec<u8> = board
        .elements()
        .map(|e| match state.arc(e) {
            None => 0,
            Some((u, v)) if u < v => 1,
            Some(_) => 2,
        })
        .collect();
    let mut search = OrSearch {
        goal,
        n: state.n(),
        pairs,
        table: HashMap::new(),
        nodes: 0,
        hits: 0,
    };
    let maker_wins = search.value(&mut status, state.turn());
    let winner = if maker_wins {
        Player::Maker
    } else {
        Player::Breaker
    };
    let principal = if state.is_complete() {
        None
    } else {
        search.best(&mut status, state.turn()).or_else(|| {
            let e = state.unoriented().next().expect("an undirected edge");
            board.pair(e)
        })
    };
    Ok(OrSolveResult {
        winner,
        principal,
        nodes: search.nodes,
        table_hits: search.hits,
        table_size: search.table.len(),
    })
}

/// Plays the solver's principal move for whichever side is to move.
#[derive(Clone, Copy, Debug, Default)]
pub struct OptimalMbPlayer {
    pub config: SolverConfig,
}

impl Strategy for OptimalMbPlayer {
    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move> {
        let r = solve_mb(state, self.config)?;
        Ok(r.principal.unwrap_or_default())
    }
}

/// Orientation-game player following [`solve_orientation`].
#[derive(Clone, Debug)]
pub struct OptimalOrPlayer {
    pub goal: Tournament,
    pub limit: usize,
}

impl OptimalOrPlayer {
    pub fn new(goal: Tournament) -> Self {
        OptimalOrPlayer {
            goal,
            limit: DEFAULT_OR_LIMIT,
        }
    }
}

impl OrStrategy for OptimalOrPlayer {
    fn next_arc(
        &mut self,
        state: &OrientationState,
        _rng: &mut GameRng,
    ) -> Result<(Vertex, Vertex)> {
        solve_orientation(state, &self.goal, self.limit)?
            .principal
            .ok_or(Error::NoCandidates)
    }
}
