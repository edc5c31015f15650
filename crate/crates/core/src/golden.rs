//! Solved tiny instances, kept as a regression file.
//!
//! Each line of `golden/solved.jsonl` is a [`GoldenRecord`]: an instance
//! descriptor, the winner under optimal play and the solver's node count.
//! [`generate`] rebuilds the whole file from [`instances`]; the test below
//! and the `solve --golden` CLI verb both go through it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Board, ElementId, ExplicitFamily, GameState, Player, WinningFamily};
use crate::orientation::OrientationState;
use crate::solver::{solve_mb, solve_orientation, SolverConfig, DEFAULT_OR_LIMIT};
use crate::tournament::{
    enumerate_tournaments, make_reduced_board, Tournament, TransversalCliqueFamily,
};

/// The checked-in file, one record per line.
pub const GOLDEN_JSONL: &str = include_str!("../golden/solved.jsonl");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GoldenInstance {
    /// Maker-Breaker game on an abstract board with listed winning sets.
    Mb {
        label: String,
        board_size: usize,
        a: u32,
        b: u32,
        sets: Vec<Vec<u32>>,
    },
    /// Orientation game on `K_n` with the goal given by its arcs.
    Orientation {
        label: String,
        n: usize,
        k: usize,
        arcs: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub instance: GoldenInstance,
    pub winner: Player,
    pub nodes: u64,
}

fn mb(label: &str, board_size: usize, a: u32, b: u32, sets: Vec<Vec<u32>>) -> GoldenInstance {
    GoldenInstance::Mb {
        label: label.to_string(),
        board_size,
        a,
        b,
        sets,
    }
}

fn orientation(label: &str, goal: &Tournament, n: usize) -> GoldenInstance {
    GoldenInstance::Orientation {
        label: label.to_string(),
        n,
        k: goal.k(),
        arcs: goal.arcs().collect(),
    }
}

/// Triangles of `K_n` as sets of edge indices (lexicographic edge order).
fn triangle_sets(n: usize) -> Vec<Vec<u32>> {
    let board = Board::complete_graph(n);
    let edge = |u: usize, v: usize| board.element(u as u32, v as u32).expect("edge").0;
    let mut sets = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                sets.push(vec![edge(x, y), edge(x, z), edge(y, z)]);
            }
        }
    }
    sets
}

fn tic_tac_toe_lines() -> Vec<Vec<u32>> {
    let mut lines = Vec::new();
    for i in 0..3 {
        lines.push(vec![3 * i, 3 * i + 1, 3 * i + 2]);
        lines.push(vec![i, i + 3, i + 6]);
    }
    lines.push(vec![0, 4, 8]);
    lines.push(vec![2, 4, 6]);
    lines
}

fn transversal_sets(n: usize, k: usize) -> Result<(usize, Vec<Vec<u32>>)> {
    let (board, partition) = make_reduced_board(n, k)?;
    let board = Arc::new(board);
    let family = WinningFamily::Implicit(Arc::new(TransversalCliqueFamily::new(
        board.clone(),
        partition,
    )?));
    let explicit = family.to_explicit()?;
    let sets = explicit
        .sets()
        .iter()
        .map(|s| s.iter().map(|e| e.0).collect())
        .collect();
    Ok((board.size(), sets))
}

/// The fixed instance list, in file order.
pub fn instances() -> Result<Vec<GoldenInstance>> {
    let mut out = vec![
        mb("single-element", 1, 1, 1, vec![vec![0]]),
        mb("single-pair", 2, 1, 1, vec![vec![0, 1]]),
        mb("two-pairs-sharing-0", 3, 1, 1, vec![vec![0, 1], vec![0, 2]]),
        mb("tic-tac-toe", 9, 1, 1, tic_tac_toe_lines()),
        mb("tic-tac-toe-1:2", 9, 1, 2, tic_tac_toe_lines()),
        mb("k4-triangles", 6, 1, 1, triangle_sets(4)),
        mb("k4-triangles-2:1", 6, 2, 1, triangle_sets(4)),
        mb("k5-triangles", 10, 1, 1, triangle_sets(5)),
        mb("k5-triangles-1:2", 10, 1, 2, triangle_sets(5)),
        mb("k6-triangles-1:2", 15, 1, 2, triangle_sets(6)),
        mb("k6-triangles-1:3", 15, 1, 3, triangle_sets(6)),
    ];
    for (n, k, a, b) in [(6, 3, 1, 1), (7, 3, 1, 1), (7, 3, 1, 2), (8, 4, 1, 1)] {
        let (size, sets) = transversal_sets(n, k)?;
        out.push(mb(
            &format!("transversal-n{n}-k{k}-{a}:{b}"),
            size,
            a,
            b,
            sets,
        ));
    }
    out.push(orientation("transitive:2", &Tournament::transitive(2), 2));
    for n in 2..=6 {
        out.push(orientation("transitive:3", &Tournament::transitive(3), n));
        out.push(orientation("cyclic:3", &Tournament::cyclic3(), n));
    }
    for (i, goal) in enumerate_tournaments(4)?.iter().enumerate() {
        for n in 4..=6 {
            out.push(orientation(&format!("k4-class-{i}"), goal, n));
        }
    }
    Ok(out)
}

/// Solves one instance with default solver settings.
pub fn solve(instance: &GoldenInstance) -> Result<GoldenRecord> {
    let (winner, nodes) = match instance {
        GoldenInstance::Mb {
            board_size,
            a,
            b,
            sets,
            ..
        } => {
            let sets = sets
                .iter()
                .map(|s| s.iter().map(|&e| ElementId(e)).collect())
                .collect();
            let family = ExplicitFamily::new(*board_size, sets)?;
            let state = GameState::new(
                Arc::new(Board::abstract_board(*board_size)),
                Arc::new(family.into()),
                *a,
                *b,
            )?;
            let r = solve_mb(&state, SolverConfig::default())?;
            (r.winner, r.nodes)
        }
        GoldenInstance::Orientation { n, k, arcs, .. } => {
            let goal = Tournament::from_arcs(*k, arcs)?;
            let r = solve_orientation(&OrientationState::new(*n), &goal, DEFAULT_OR_LIMIT)?;
            (r.winner, r.nodes)
        }
    };
    Ok(GoldenRecord {
        instance: instance.clone(),
        winner,
        nodes,
    })
}

/// Solves every instance and renders the JSON-lines file.
pub fn generate() -> Result<String> {
    let mut text = String::new();
    for instance in instances()? {
        text.push_str(&serde_json::to_string(&solve(&instance)?)?);
        text.push('\n');
    }
    Ok(text)
}

pub fn parse(text: &str) -> Result<Vec<GoldenRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse(format!("golden line {}: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_in_file_matches_a_fresh_solve() {
        let stored = parse(GOLDEN_JSONL).unwrap();
        let fresh = parse(&generate().unwrap()).unwrap();
        assert_eq!(stored, fresh);
    }

    #[test]
    fn hand_checked_values() {
        let stored = parse(GOLDEN_JSONL).unwrap();
        let winner = |label: &str, n: Option<usize>| {
            stored
                .iter()
                .find(|r| match &r.instance {
                    GoldenInstance::Mb { label: l, .. } => l == label && n.is_none(),
                    GoldenInstance::Orientation { label: l, n: m, .. } => {
                        l == label && Some(*m) == n
                    }
                })
                .map(|r| r.winner)
                .unwrap()
        };
        assert_eq!(winner("single-element", None), Player::Maker);
        assert_eq!(winner("single-pair", None), Player::Breaker);
        assert_eq!(winner("two-pairs-sharing-0", None), Player::Maker);
        // Three in a row is a Maker win when Breaker only blocks.
        assert_eq!(winner("tic-tac-toe", None), Player::Maker);
        assert_eq!(winner("transitive:2", Some(2)), Player::Maker);
        // No copy fits on fewer vertices than the goal has.
        assert_eq!(winner("transitive:3", Some(2)), Player::Breaker);
        assert_eq!(winner("cyclic:3", Some(3)), Player::Breaker);
    }
}
