//! RandomMaker against RandomBreaker.
//!
//! Both players claim uniformly random unclaimed edges; in the oriented
//! variants each claim also gets a uniformly random direction. Maker moves
//! first and so ends with `ceil(total / 2)` elements. Wins are judged on the
//! final position only.
//!
//! Trial `t` of a configuration with seed `s` draws from a ChaCha8 generator
//! seeded with `s + t` (wrapping), so every trial, and every aggregate over
//! trials, is reproducible from the configuration alone.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::game::{
    Board, ElementId, GameRng, MoveRecord, Outcome, Player, Transcript, TranscriptHeader, Vertex,
};
use crate::log2real::Log2Real;
use crate::tournament::{contains_copy, has_transversal_clique, Digraph, Partition, Tournament};

/// `z` for a two-sided 95% interval.
pub const WILSON_Z: f64 = 1.959964;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Maker orients her edges at random; she wins by owning a copy of the goal.
    RandomTournament,
    /// Unoriented play on the reduced board; Maker wins with a transversal clique.
    RandomReducedClique,
    /// Both players direct edges; the goal is sought in the union of all arcs.
    RandomOrientation,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::RandomTournament => "random-tournament",
            Variant::RandomReducedClique => "random-reduced-clique",
            Variant::RandomOrientation => "random-orientation",
        }
    }

    fn oriented(self) -> bool {
        self != Variant::RandomReducedClique
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-tournament" => Ok(Variant::RandomTournament),
            "random-reduced-clique" => Ok(Variant::RandomReducedClique),
            "random-orientation" => Ok(Variant::RandomOrientation),
            _ => Err(Error::Parse(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    /// Goal for the tournament variants; the transitive `T_k` when absent.
    pub goal: Option<Tournament>,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(variant: Variant, n: usize, k: usize, trials: u64, seed: u64) -> Self {
        TrialConfig {
            variant,
            n,
            k,
            goal: None,
            trials,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("need at least one trial".into()));
        }
        if self.k == 0 || self.n < 2 {
            return Err(Error::Domain(format!(
                "need n >= 2 and k >= 1, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if self.variant == Variant::RandomReducedClique && (self.k < 2 || self.k > self.n) {
            return Err(Error::Domain(format!(
                "the reduced board needs n >= k >= 2, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if let Some(g) = &self.goal {
            if g.k() != self.k {
                return Err(Error::Domain(format!(
                    "goal has {} vertices but k = {}",
                    g.k(),
                    self.k
                )));
            }
        }
        Ok(())
    }

    fn goal(&self) -> Tournament {
        self.goal
            .clone()
            .unwrap_or_else(|| Tournament::transitive(self.k))
    }

    fn board(&self) -> Result<(Board, Option<Partition>)> {
        Ok(match self.variant {
            Variant::RandomReducedClique => {
                let (b, p) = crate::tournament::make_reduced_board(self.n, self.k)?;
                (b, Some(p))
            }
            _ => (Board::complete_graph(self.n), None),
        })
    }

    pub fn trial_seed(&self, trial_index: u64) -> u64 {
        self.seed.wrapping_add(trial_index)
    }
}

/// One claim of a random playout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pick {
    element: ElementId,
    arc: Option<(Vertex, Vertex)>,
}

/// Alternating uniform picks until the board is exhausted.
fn random_picks(board: &Board, oriented: bool, rng: &mut GameRng) -> Vec<Pick> {
    let mut pool: Vec<ElementId> = board.elements().collect();
    let mut picks = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let element = pool.swap_remove(rng.gen_range(0..pool.len()));
        let arc = oriented.then(|| {
            let (u, v) = board.pair(element).expect("graph board");
            if rng.gen::<bool>() {
                (u, v)
            } else {
                (v, u)
            }
        });
        picks.push(Pick { element, arc });
    }
    picks
}

fn judge(
    config: &TrialConfig,
    board: &Board,
    partition: Option<&Partition>,
    picks: &[Pick],
) -> bool {
    let maker = picks.iter().step_by(2);
    match config.variant {
        Variant::RandomTournament => {
            let d = Digraph::from_arcs(board.n(), maker.map(|p| p.arc.expect("oriented")))
                .expect("board arcs");
            contains_copy(&d, &config.goal())
        }
        Variant::RandomOrientation => {
            let d = Digraph::from_arcs(board.n(), picks.iter().map(|p| p.arc.expect("oriented")))
                .expect("board arcs");
            contains_copy(&d, &config.goal())
        }
        Variant::RandomReducedClique => {
            let g = Digraph::symmetric(
                board.n(),
                maker.map(|p| board.pair(p.element).expect("edge")),
            )
            .expect("board pairs");
            has_transversal_clique(&g, partition.expect("reduced board"))
        }
    }
}

/// Did RandomMaker win trial `trial_index`?
pub fn random_playout(config: &TrialConfig, trial_index: u64) -> Result<bool> {
    config.validate()?;
    let (board, partition) = config.board()?;
    let mut rng = GameRng::seed_from_u64(config.trial_seed(trial_index));
    let picks = random_picks(&board, config.variant.oriented(), &mut rng);
    Ok(judge(config, &board, partition.as_ref(), &picks))
}

/// The full record of trial `trial_index`; its outcome equals
/// [`random_playout`] for the same arguments.
pub fn random_playout_transcript(config: &TrialConfig, trial_index: u64) -> Result<Transcript> {
    config.validate()?;
    let (board, partition) = config.board()?;
    let seed = config.trial_seed(trial_index);
    let mut rng = GameRng::seed_from_u64(seed);
    let picks = random_picks(&board, config.variant.oriented(), &mut rng);
    let won = judge(config, &board, partition.as_ref(), &picks);
    let records = picks
        .iter()
        .enumerate()
        .map(|(i, p)| MoveRecord {
            round: i as u32 / 2 + 1,
            player: if i % 2 == 0 {
                Player::Maker
            } else {
                Player::Breaker
            },
            elements: vec![p.element],
            orientation: p.arc.map(|a| vec![a]),
        })
        .collect();
    Ok(Transcript {
        header: TranscriptHeader {
            board: board.kind(),
            n: config.n,
            k: Some(config.k),
            a: 1,
            b: 1,
            board_size: board.size(),
            seed,
        },
        records,
        outcome: if won {
            Outcome::MakerWin
        } else {
            Outcome::BreakerWin
        },
    })
}

/// `(n/k)^k 2^{-C(k,2)}`, the leading term of the expected number of
/// transversal `k`-cliques in RandomMaker's graph (the `1 + o(1)` factor is
/// dropped).
pub fn expected_transversal_cliques(n: u64, k: u32) -> Log2Real {
    bounds::t_f((n as f64).log2(), k)
}

/// Smallest `k` at which the expected transversal clique count drops below 1.
pub fn expectation_crossing_k(n: u64) -> u32 {
    (1..)
        .find(|&k| expected_transversal_cliques(n, k) < Log2Real::ONE)
        .expect("the count eventually drops")
}

/// Wilson score interval at 95%.
pub fn wilson_interval(wins: u64, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let p = wins as f64 / t;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    // The endpoints at 0 and 1 are exact; keep rounding from moving them.
    let lower = if wins == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let upper = if wins == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lower, upper)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub k: usize,
    pub wins: u64,
    pub trials: u64,
    pub frequency: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub variant: Variant,
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<ThresholdRow>,
    /// Smallest `k` with frequency below 1/2, when the range brackets 1/2.
    pub crossing_k: Option<usize>,
    /// The intervals on both sides of the crossing exclude 1/2.
    pub reliable: bool,
}

impl ThresholdEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,wins,trials,frequency,lower,upper\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.k, r.wins, r.trials, r.frequency, r.lower, r.upper
            ));
        }
        out
    }

    /// No adjacent increase in frequency beyond three combined standard
    /// errors.
    pub fn monotone_within_noise(&self) -> bool {
        let se2 = |r: &ThresholdRow| r.frequency * (1.0 - r.frequency) / r.trials as f64;
        self.rows
            .windows(2)
            .all(|w| w[1].frequency - w[0].frequency <= 3.0 * (se2(&w[0]) + se2(&w[1])).sqrt())
    }
}

/// Win frequencies of `base` for every `k` in `ks`. A fixed goal in `base`
/// only fits a single `k`; otherwise each row uses the transitive `T_k`.
pub fn estimate_threshold(
    base: &TrialConfig,
    ks: impl IntoIterator<Item = usize>,
) -> Result<ThresholdEstimate> {
    let mut rows = Vec::new();
    for k in ks {
        let config = TrialConfig { k, ..base.clone() };
        config.validate()?;
        let wins = (0..config.trials)
            .into_par_iter()
            .map(|t| random_playout(&config, t))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&w| w)
            .count() as u64;
        let (lower, upper) = wilson_interval(wins, config.trials);
        rows.push(ThresholdRow {
            k,
            wins,
            trials: config.trials,
            frequency: wins as f64 / config.trials as f64,
            lower,
            upper,
        });
    }
    let mut crossing_k = None;
    let mut reliable = false;
    if rows.first().is_some_and(|r| r.frequency >= 0.5) {
        if let Some(i) = rows.iter().position(|r| r.frequency < 0.5) {
            crossing_k = Some(rows[i].k);
            reliable = rows[i].upper < 0.5 && rows[i - 1].lower > 0.5;
        }
    }
    Ok(ThresholdEstimate {
        variant: base.variant,
        n: base.n,
        seed: base.seed,
        rows,
        crossing_k,
        reliable,
    })
}
