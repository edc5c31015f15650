use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::transcript::{MoveRecord, Outcome, Transcript, TranscriptHeader};
use crate::game::{Board, BoardKind, ElementId, Vertex, WinningFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "M")]
    Maker,
    #[serde(rename = "B")]
    Breaker,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Maker => Player::Breaker,
            Player::Breaker => Player::Maker,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Owner {
    Unclaimed,
    Maker,
    Breaker,
}

impl From<Player> for Owner {
    fn from(p: Player) -> Self {
        match p {
            Player::Maker => Owner::Maker,
            Player::Breaker => Owner::Breaker,
        }
    }
}

/// Elements per round: Maker claims up to `maker`, Breaker exactly `breaker`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bias {
    pub maker: u32,
    pub breaker: u32,
}

impl Bias {
    pub fn new(maker: u32, breaker: u32) -> Result<Self> {
        if maker == 0 || breaker == 0 {
            return Err(Error::InvalidBias { maker, breaker });
        }
        Ok(Bias { maker, breaker })
    }

    pub fn of(&self, p: Player) -> u32 {
        match p {
            Player::Maker => self.maker,
            Player::Breaker => self.breaker,
        }
    }
}

/// One player's claim. `orientation`, when present, carries one directed
/// vertex pair per element, in the same order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub elements: Vec<ElementId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orientation: Option<Vec<(Vertex, Vertex)>>,
}

impl Move {
    pub fn new(elements: Vec<ElementId>) -> Self {
        Move {
            elements,
            orientation: None,
        }
    }

    pub fn single(e: ElementId) -> Self {
        Move::new(vec![e])
    }

    pub fn oriented(elements: Vec<ElementId>, arcs: Vec<(Vertex, Vertex)>) -> Self {
        Move {
            elements,
            orientation: Some(arcs),
        }
    }

    pub fn pass() -> Self {
        Move::default()
    }
}

/// Per-set Maker/Breaker hit counts for explicit families.
#[derive(Clone, Debug)]
struct SetTracker {
    maker_hits: Vec<u32>,
    breaker_hits: Vec<u32>,
    completed: usize,
}

/// State of a biased Maker-Breaker game.
///
/// A Maker turn ends when she has claimed `a` elements or chooses to stop
/// early (unclaimed allotment is not banked). A Breaker turn ends after
/// exactly `b` elements, or all remaining ones if fewer than `b` are left.
#[derive(Clone, Debug)]
pub struct GameState {
    board: Arc<Board>,
    family: Arc<WinningFamily>,
    bias: Bias,
    owner: Vec<Owner>,
    orientation: Vec<Option<(Vertex, Vertex)>>,
    turn: Player,
    round: u32,
    claimed_this_turn: u32,
    unclaimed: usize,
    maker_count: usize,
    breaker_count: usize,
    tracker: Option<SetTracker>,
    history: Vec<MoveRecord>,
    goal_size: Option<usize>,
}

impl GameState {
    pub fn new(board: Arc<Board>, family: Arc<WinningFamily>, a: u32, b: u32) -> Result<Self> {
        let bias = Bias::new(a, b)?;
        if family.board_size() != board.size() {
            return Err(Error::Domain(format!(
                "family is defined on {} elements but the board has {}",
                family.board_size(),
                board.size()
            )));
        }
        let tracker = family.as_explicit().map(|f| {
            let completed = f.sets().iter().filter(|s| s.is_empty()).count();
            SetTracker {
                maker_hits: vec![0; f.len()],
                breaker_hits: vec![0; f.len()],
                completed,
            }
        });
        let size = board.size();
        Ok(GameState {
            board,
            family,
            bias,
            owner: vec![Owner::Unclaimed; size],
            orientation: vec![None; size],
            turn: Player::Maker,
            round: 1,
            claimed_this_turn: 0,
            unclaimed: size,
            maker_count: 0,
            breaker_count: 0,
            tracker,
            history: Vec::new(),
            goal_size: None,
        })
    }

    /// Records the goal size `k` for transcript headers.
    pub fn with_goal_size(mut self, k: usize) -> Self {
        self.goal_size = Some(k);
        self
    }

    pub fn goal_size(&self) -> Option<usize> {
        self.goal_size.or(self.board.k())
    }

    pub fn board(&self) -> &Arc<Board> {
        &self.board
    }

    pub fn family(&self) -> &Arc<WinningFamily> {
        &self.family
    }

    pub fn bias(&self) -> Bias {
        self.bias
    }

    pub fn turn(&self) -> Player {
        self.turn
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn claimed_this_turn(&self) -> u32 {
        self.claimed_this_turn
    }

    pub fn owner(&self, e: ElementId) -> Owner {
        self.owner[e.index()]
    }

    pub fn ownership(&self) -> &[Owner] {
        &self.owner
    }

    pub fn orientation(&self, e: ElementId) -> Option<(Vertex, Vertex)> {
        self.orientation[e.index()]
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    pub fn unclaimed_count(&self) -> usize {
        self.unclaimed
    }

    pub fn maker_count(&self) -> usize {
        self.maker_count
    }

    pub fn breaker_count(&self) -> usize {
        self.breaker_count
    }

    pub fn is_full(&self) -> bool {
        self.unclaimed == 0
    }

    pub fn unclaimed(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.owned_by(Owner::Unclaimed)
    }

    pub fn owned_by(&self, who: Owner) -> impl Iterator<Item = ElementId> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == who)
            .map(|(i, _)| ElementId(i as u32))
    }

    /// Maker hits and Breaker hits of explicit set `i`.
    pub fn set_hits(&self, i: usize) -> Option<(u32, u32)> {
        self.tracker
            .as_ref()
            .map(|t| (t.maker_hits[i], t.breaker_hits[i]))
    }

    /// True iff Maker fully owns some winning set. Explicit families answer
    /// from incremental counters; implicit ones run the family's search.
    pub fn maker_wins(&self) -> bool {
        match (&self.tracker, self.family.as_ref()) {
            (Some(t), _) => t.completed > 0,
            (None, WinningFamily::Implicit(f)) => f.maker_contains(self),
            (None, WinningFamily::Explicit(_)) => unreachable!("explicit families are tracked"),
        }
    }

    /// Claims that settle `player`'s whole turn.
    pub fn apply_move(&mut self, player: Player, mv: &Move) -> Result<()> {
        self.claim(player, mv, true)
    }

    /// Claims part of a turn. The turn settles automatically once the
    /// allotment is used up or the board is full; otherwise call
    /// [`GameState::settle_turn`].
    pub fn apply_partial(&mut self, player: Player, mv: &Move) -> Result<()> {
        self.claim(player, mv, false)
    }

    /// Ends the current turn early (a Maker underclaim).
    pub fn settle_turn(&mut self, player: Player) -> Result<()> {
        if player != self.turn {
            return Err(Error::OutOfTurn {
                expected: self.turn,
                got: player,
            });
        }
        self.check_breaker_quota(player, 0)?;
        self.advance_turn();
        Ok(())
    }

    fn check_breaker_quota(&self, player: Player, adding: u32) -> Result<()> {
        if player == Player::Breaker {
            let total = self.claimed_this_turn + adding;
            let available = self.unclaimed as u32 + self.claimed_this_turn;
            let required = self.bias.breaker.min(available);
            if total != required {
                return Err(Error::Underclaim {
                    required,
                    claimed: total,
                });
            }
        }
        Ok(())
    }

    fn validate(&self, player: Player, mv: &Move, settle: bool) -> Result<()> {
        if player != self.turn {
            return Err(Error::OutOfTurn {
                expected: self.turn,
                got: player,
            });
        }
        for (i, &e) in mv.elements.iter().enumerate() {
            if !self.board.contains(e) {
                return Err(Error::ElementOutOfRange(e));
            }
            if self.owner[e.index()] != Owner::Unclaimed {
                return Err(Error::ElementClaimed(e));
            }
            if mv.elements[..i].contains(&e) {
                return Err(Error::DuplicateElement(e));
            }
        }
        let claimed = self.claimed_this_turn + mv.elements.len() as u32;
        let bias = self.bias.of(player);
        if claimed > bias {
            return Err(Error::Overclaim {
                player,
                claimed,
                bias,
            });
        }
        if settle {
            self.check_breaker_quota(player, mv.elements.len() as u32)?;
        }
        if let Some(arcs) = &mv.orientation {
            if arcs.len() != mv.elements.len() {
                return Err(Error::InvalidOrientation(format!(
                    "{} arcs for {} elements",
                    arcs.len(),
                    mv.elements.len()
                )));
            }
            for (&e, &(u, v)) in mv.elements.iter().zip(arcs) {
                let fits = match self.board.kind() {
                    BoardKind::Abstract => false,
                    BoardKind::OrderedPairs => self.board.pair(e) == Some((u, v)),
                    _ => u != v && self.board.element(u, v) == Some(e),
                };
                if !fits {
                    return Err(Error::InvalidOrientation(format!(
                        "arc ({u},{v}) does not match element {}",
                        e.0
                    )));
                }
            }
        }
        Ok(())
    }

    fn claim(&mut self, player: Player, mv: &Move, settle: bool) -> Result<()> {
        self.validate(player, mv, settle)?;
        let mark = Owner::from(player);
        for (i, &e) in mv.elements.iter().enumerate() {
            self.owner[e.index()] = mark;
            if let Some(arcs) = &mv.orientation {
                self.orientation[e.index()] = Some(arcs[i]);
            }
            if let (Some(t), Some(f)) = (self.tracker.as_mut(), self.family.as_explicit()) {
                for &s in f.sets_containing(e) {
                    let s = s as usize;
                    match player {
                        Player::Maker => {
                            t.maker_hits[s] += 1;
                            if t.maker_hits[s] as usize == f.sets()[s].len() {
                                t.completed += 1;
                            }
                        }
                        Player::Breaker => t.breaker_hits[s] += 1,
                    }
                }
            }
        }
        let n = mv.elements.len();
        self.unclaimed -= n;
        match player {
            Player::Maker => self.maker_count += n,
            Player::Breaker => self.breaker_count += n,
        }
        self.claimed_this_turn += n as u32;
        self.history.push(MoveRecord {
            round: self.round,
            player,
            elements: mv.elements.clone(),
            orientation: mv.orientation.clone(),
        });
        if settle || self.claimed_this_turn == self.bias.of(player) || self.unclaimed == 0 {
            self.advance_turn();
        }
        Ok(())
    }

    fn advance_turn(&mut self) {
        if self.turn == Player::Breaker {
            self.round += 1;
        }
        self.turn = self.turn.other();
        self.claimed_this_turn = 0;
    }

    /// Outcome of the position: a Maker win as soon as she owns a winning set,
    /// a Breaker win once the board is full without one.
    pub fn outcome(&self) -> Outcome {
        if self.maker_wins() {
            Outcome::MakerWin
        } else if self.is_full() {
            Outcome::BreakerWin
        } else {
            Outcome::Incomplete
        }
    }

    pub fn header(&self, seed: u64) -> TranscriptHeader {
        TranscriptHeader {
            board: self.board.kind(),
            n: self.board.n(),
            k: self.goal_size(),
            a: self.bias.maker,
            b: self.bias.breaker,
            board_size: self.board.size(),
            seed,
        }
    }

    pub fn transcript(&self, seed: u64, outcome: Outcome) -> Transcript {
        Transcript {
            header: self.header(seed),
            records: self.history.clone(),
            outcome,
        }
    }

    /// Rebuilds a state by replaying `records` from the empty position.
    /// Consecutive records of one player in one round form a single turn.
    pub fn replay(
        board: Arc<Board>,
        family: Arc<WinningFamily>,
        bias: Bias,
        records: &[MoveRecord],
    ) -> Result<Self> {
        let mut state = GameState::new(board, family, bias.maker, bias.breaker)?;
        for (i, r) in records.iter().enumerate() {
            let mv = Move {
                elements: r.elements.clone(),
                orientation: r.orientation.clone(),
            };
            let continues = records
                .get(i + 1)
                .is_some_and(|next| next.player == r.player && next.round == r.round);
            let result = if continues {
                state.apply_partial(r.player, &mv)
            } else {
                state.apply_move(r.player, &mv)
            };
            result.map_err(|cause| Error::IllegalStrategyMove {
                record: i,
                cause: Box::new(cause),
            })?;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ExplicitFamily;

    fn state(size: usize, sets: &[&[u32]], a: u32, b: u32) -> GameState {
        let family = ExplicitFamily::from_indices(size, sets).unwrap();
        GameState::new(
            Arc::new(Board::abstract_board(size)),
            Arc::new(family.into()),
            a,
            b,
        )
        .unwrap()
    }

    fn ids(v: &[u32]) -> Move {
        Move::new(v.iter().map(|&e| ElementId(e)).collect())
    }

    #[test]
    fn new_game_is_empty_with_maker_to_move() {
        let s = state(3, &[&[0, 1]], 1, 1);
        assert_eq!(s.turn(), Player::Maker);
        assert_eq!(s.unclaimed_count(), 3);
        assert!(!s.maker_wins());
    }

    #[test]
    fn ordered_pair_board_has_n_times_n_minus_one_elements() {
        let board = Arc::new(Board::ordered_pairs(4));
        let s = GameState::new(board, Arc::new(WinningFamily::empty(12)), 2, 1).unwrap();
        assert_eq!(s.board().size(), 12);
    }

    #[test]
    fn zero_bias_is_rejected() {
        let board = Arc::new(Board::abstract_board(3));
        let err = GameState::new(board, Arc::new(WinningFamily::empty(3)), 0, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidBias { .. }));
    }

    #[test]
    fn maker_may_underclaim() {
        let mut s = state(4, &[&[0, 1]], 2, 1);
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        assert_eq!(s.turn(), Player::Breaker);
        s.apply_move(Player::Breaker, &ids(&[2])).unwrap();
        s.apply_move(Player::Maker, &Move::pass()).unwrap();
        assert_eq!(s.turn(), Player::Breaker);
        assert_eq!(s.round(), 2);
    }

    #[test]
    fn illegal_moves_leave_state_unchanged() {
        let mut s = state(4, &[&[0, 1]], 2, 1);
        let err = s.apply_move(Player::Maker, &ids(&[0, 1, 2])).unwrap_err();
        assert!(matches!(err, Error::Overclaim { claimed: 3, .. }));
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        let before = s.ownership().to_vec();
        assert!(matches!(
            s.apply_move(Player::Breaker, &ids(&[0])),
            Err(Error::ElementClaimed(_))
        ));
        assert!(matches!(
            s.apply_move(Player::Maker, &ids(&[1])),
            Err(Error::OutOfTurn { .. })
        ));
        assert!(matches!(
            s.apply_move(Player::Breaker, &Move::pass()),
            Err(Error::Underclaim { .. })
        ));
        assert!(matches!(
            s.apply_move(Player::Breaker, &ids(&[9])),
            Err(Error::ElementOutOfRange(_))
        ));
        assert_eq!(s.ownership(), &before[..]);
        assert_eq!(s.history().len(), 1);
    }

    #[test]
    fn breaker_claims_what_remains_at_the_end() {
        let mut s = state(3, &[], 1, 2);
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        s.apply_move(Player::Breaker, &ids(&[1, 2])).unwrap();
        assert!(s.is_full());
        let mut s = state(2, &[], 1, 2);
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        s.apply_move(Player::Breaker, &ids(&[1])).unwrap();
        assert_eq!(s.outcome(), Outcome::BreakerWin);
    }

    #[test]
    fn win_detection_is_incremental() {
        let mut s = state(3, &[&[0, 1]], 1, 1);
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        s.apply_move(Player::Breaker, &ids(&[2])).unwrap();
        assert!(!s.maker_wins());
        s.apply_move(Player::Maker, &ids(&[1])).unwrap();
        assert!(s.maker_wins());
        assert_eq!(s.outcome(), Outcome::MakerWin);
    }

    #[test]
    fn empty_family_never_wins() {
        let mut s = state(2, &[], 1, 1);
        s.apply_move(Player::Maker, &ids(&[0])).unwrap();
        s.apply_move(Player::Breaker, &ids(&[1])).unwrap();
        assert!(!s.maker_wins());
    }

    #[test]
    fn orientation_must_match_element() {
        let board = Arc::new(Board::complete_graph(3));
        let mut s = GameState::new(board, Arc::new(WinningFamily::empty(3)), 1, 1).unwrap();
        let bad = Move::oriented(vec![ElementId(0)], vec![(0, 2)]);
        assert!(matches!(
            s.apply_move(Player::Maker, &bad),
            Err(Error::InvalidOrientation(_))
        ));
        let good = Move::oriented(vec![ElementId(0)], vec![(1, 0)]);
        s.apply_move(Player::Maker, &good).unwrap();
        assert_eq!(s.orientation(ElementId(0)), Some((1, 0)));
    }

    #[test]
    fn partial_turns_replay() {
        let mut s = state(6, &[&[0, 1, 2]], 2, 1);
        s.apply_partial(Player::Maker, &ids(&[0])).unwrap();
        s.settle_turn(Player::Maker).unwrap();
        s.apply_move(Player::Breaker, &ids(&[5])).unwrap();
        s.apply_partial(Player::Maker, &ids(&[1])).unwrap();
        assert_eq!(s.turn(), Player::Maker);
        s.apply_partial(Player::Maker, &ids(&[2])).unwrap();
        assert_eq!(s.turn(), Player::Breaker);
        let r = GameState::replay(s.board().clone(), s.family().clone(), s.bias(), s.history())
            .unwrap();
        assert_eq!(r.ownership(), s.ownership());
        assert_eq!(r.turn(), s.turn());
        assert!(r.maker_wins());
    }
}
