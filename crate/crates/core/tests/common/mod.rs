//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use tournament_game::game::{Board, ElementId, ExplicitFamily, GameState, Vertex};
use tournament_game::tournament::{Digraph, Tournament};

/// Tries every injection of the goal's vertices into the host.
pub fn naive_contains(d: &Digraph, goal: &Tournament) -> bool {
    let k = goal.k();
    let mut image = Vec::with_capacity(k);
    fn go(d: &Digraph, goal: &Tournament, image: &mut Vec<usize>) -> bool {
        let i = image.len();
        if i == goal.k() {
            return (0..i).all(|x| {
                (0..i).all(|y| {
                    x == y || !goal.beats(x, y) || d.has_arc(image[x] as Vertex, image[y] as Vertex)
                })
            });
        }
        for h in 0..d.n() {
            if image.contains(&h) {
                continue;
            }
            image.push(h);
            if go(d, goal, image) {
                return true;
            }
            image.pop();
        }
        false
    }
    go(d, goal, &mut image)
}

/// Random digraph on `n` vertices: each ordered pair is an arc with
/// probability `p`, and at most one direction per pair when `oriented`.
pub fn random_digraph<R: Rng>(n: usize, p: f64, oriented: bool, rng: &mut R) -> Digraph {
    let mut d = Digraph::new(n);
    for u in 0..n as Vertex {
        for v in 0..n as Vertex {
            if u == v || (oriented && d.has_arc(v, u)) {
                continue;
            }
            if rng.gen_bool(p) {
                d.add_arc(u, v).unwrap();
            }
        }
    }
    d
}

pub fn mb_state(board_size: usize, sets: &[Vec<u32>], a: u32, b: u32) -> GameState {
    let sets = sets
        .iter()
        .map(|s| s.iter().map(|&e| ElementId(e)).collect())
        .collect();
    let family = ExplicitFamily::new(board_size, sets).unwrap();
    GameState::new(
        Arc::new(Board::abstract_board(board_size)),
        Arc::new(family.into()),
        a,
        b,
    )
    .unwrap()
}

/// Exact `sum over sets of (1 + b)^{-|F| / a}` compared with `1 / (1 + b)`,
/// for `a` in {1, 2}: with `a = 2` both sides are squared after grouping
/// sets by size parity, so only integers are compared.
pub fn es_holds_exact(sets: &[Vec<u32>], a: u32, b: u32) -> bool {
    let q = 1u128 + b as u128;
    let max = sets.iter().map(Vec::len).max().unwrap_or(0) as u32;
    match a {
        // sum q^{max - |F|} < q^{max - 1}
        1 => {
            let lhs: u128 = sets.iter().map(|s| q.pow(max - s.len() as u32)).sum();
            max == 0 || lhs < q.pow(max.saturating_sub(1))
        }
        // Scaled by q^m, even sets give E and odd sets give O sqrt(q);
        // need E + O sqrt(q) < q^{m-1}, i.e. q O^2 < (q^{m-1} - E)^2.
        2 => {
            let m = max.div_ceil(2) + 1;
            let (mut even, mut odd) = (0u128, 0u128);
            for s in sets {
                let len = s.len() as u32;
                if len.is_multiple_of(2) {
                    even += q.pow(m - len / 2);
                } else {
                    odd += q.pow(m - len.div_ceil(2));
                }
            }
            let target = q.pow(m - 1);
            even < target && q * odd * odd < (target - even) * (target - even)
        }
        _ => panic!("exact check covers a in {{1, 2}}"),
    }
}
