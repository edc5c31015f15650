//! Tournaments, digraph containment and the Maker-side reductions.
//!
//! The tournament game is played on the edges of `K_n` with Maker orienting
//! every edge she claims. Two wrappers turn a clique-game Maker into a
//! tournament-game Maker:
//!
//! * [`maker_tournament_wrapper`] plays the transversal clique game on a
//!   balanced `k`-partite board and orients a cross edge between classes
//!   `i` and `j` the way the goal orients `i -> j`;
//! * [`transitive_strategy_wrapper`] plays the ordinary clique game and
//!   orients every edge from the lower to the higher vertex.
//!
//! Both run the inner strategy against a shadow game, so they accept any
//! [`Strategy`] for the inner board.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{
    Bias, Board, BoardKind, ElementId, ExplicitFamily, GameRng, GameState, ImplicitFamily, Move,
    MoveRecord, Owner, Player, Strategy, Vertex, WinningFamily,
};
use crate::log2real::Log2Real;

/// Largest `k` accepted by the permutation-based routines.
pub const MAX_CANONICAL_K: usize = 8;

/// Largest `k` accepted by [`enumerate_tournaments`].
pub const MAX_ENUMERATE_K: usize = 6;

fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

/// A tournament on vertices `0..k`: one direction per vertex pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    k: usize,
    /// Indexed by lexicographic pair `(i, j)`, `i < j`; true iff `i -> j`.
    forward: Vec<bool>,
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tournament(k={}, arcs={:?})",
            self.k,
            self.arcs().collect::<Vec<_>>()
        )
    }
}

impl Tournament {
    /// `i -> j` for every `i < j`.
    pub fn transitive(k: usize) -> Self {
        Tournament {
            k,
            forward: vec![true; k * k.saturating_sub(1) / 2],
        }
    }

    /// The directed triangle `0 -> 1 -> 2 -> 0`.
    pub fn cyclic3() -> Self {
        Self::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).expect("valid triangle")
    }

    /// Builds a tournament from exactly one arc per vertex pair.
    pub fn from_arcs(k: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let pairs = k * k.saturating_sub(1) / 2;
        let mut seen = vec![false; pairs];
        let mut forward = vec![false; pairs];
        for &(u, v) in arcs {
            if u >= k || v >= k || u == v {
                return Err(Error::Parse(format!(
                    "arc {u} {v} is not a pair of distinct vertices below {k}"
                )));
            }
            let idx = pair_index(k, u.min(v), u.max(v));
            if seen[idx] {
                return Err(Error::Parse(format!("pair {{{u},{v}}} is oriented twice")));
            }
            seen[idx] = true;
            forward[idx] = u < v;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            let (i, j) = Self::pair_at(k, missing);
            return Err(Error::Parse(format!("pair {{{i},{j}}} has no arc")));
        }
        Ok(Tournament { k, forward })
    }

    fn pair_at(k: usize, idx: usize) -> (usize, usize) {
        let mut rest = idx;
        for i in 0..k {
            let row = k - i - 1;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
        }
        unreachable!("pair index {idx} out of range for k = {k}")
    }

    /// Uniformly random tournament on `k` vertices.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        Tournament {
            k,
            forward: (0..k * k.saturating_sub(1) / 2)
                .map(|_| rng.gen())
                .collect(),
        }
    }

    /// Parses `transitive:K` or `cyclic:3`.
    pub fn named(name: &str) -> Result<Self> {
        match name.split_once(':') {
            Some(("transitive", k)) => {
                let k = k
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad vertex count in {name:?}: {e}")))?;
                Ok(Self::transitive(k))
            }
            Some(("cyclic", "3")) => Ok(Self::cyclic3()),
            _ => Err(Error::Parse(format!(
                "unknown tournament name {name:?}; expected transitive:K or cyclic:3"
            ))),
        }
    }

    /// Reads the text format: `k` on the first line, then one `i j` line per
    /// arc `i -> j`, vertices numbered from 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let k = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tournament file".into()))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let mut arcs = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => arcs.push((u, v)),
                _ => return Err(Error::Parse(format!("bad arc line {line:?}"))),
            }
        }
        Self::from_arcs(k, &arcs)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.k);
        for (u, v) in self.arcs() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// True iff `i -> j`.
    pub fn beats(&self, i: usize, j: usize) -> bool {
        assert!(
            i != j && i < self.k && j < self.k,
            "no pair ({i},{j}) in a {}-tournament",
            self.k
        );
        if i < j {
            self.forward[pair_index(self.k, i, j)]
        } else {
            !self.forward[pair_index(self.k, j, i)]
        }
    }

    /// Arcs in lexicographic pair order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.forward.len()).map(|idx| {
            let (i, j) = Self::pair_at(self.k, idx);
            if self.forward[idx] {
                (i, j)
            } else {
                (j, i)
            }
        })
    }

    pub fn out_degree(&self, v: usize) -> usize {
        (0..self.k).filter(|&u| u != v && self.beats(v, u)).count()
    }

    pub fn is_transitive(&self) -> bool {
        let mut scores: Vec<usize> = (0..self.k).map(|v| self.out_degree(v)).collect();
        scores.sort_unstable();
        scores.iter().enumerate().all(|(i, &s)| s == i)
    }

    /// Moves old vertex `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k)?;
        let mut arcs = Vec::with_capacity(self.forward.len());
        for (u, v) in self.arcs() {
            arcs.push((perm[u], perm[v]));
        }
        Self::from_arcs(self.k, &arcs)
    }

    fn adjacency(&self) -> [[bool; MAX_CANONICAL_K]; MAX_CANONICAL_K] {
        let mut adj = [[false; MAX_CANONICAL_K]; MAX_CANONICAL_K];
        for (u, v) in self.arcs() {
            adj[u][v] = true;
        }
        adj
    }

    fn check_canonical_size(&self) -> Result<()> {
        if self.k > MAX_CANONICAL_K {
            return Err(Error::Unsupported(format!(
                "canonical forms need k <= {MAX_CANONICAL_K}, got {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Minimum pair bit string over all relabelings, packed with the first
    /// pair as the most significant bit.
    pub fn canonical_code(&self) -> Result<u64> {
        self.check_canonical_size()?;
        let adj = self.adjacency();
        let mut best = u64::MAX;
        for_each_permutation(self.k, |q| {
            let code = code_under(&adj, q, self.k);
            if code < best {
                best = code;
            }
        });
        Ok(best)
    }

    pub fn canonical_form(&self) -> Result<Self> {
        let code = self.canonical_code()?;
        Ok(Self::from_code(self.k, code))
    }

    fn from_code(k: usize, code: u64) -> Self {
        let pairs = k * k.saturating_sub(1) / 2;
        Tournament {
            k,
            forward: (0..pairs)
                .map(|idx| code >> (pairs - 1 - idx) & 1 == 1)
                .collect(),
        }
    }

    /// Number of relabelings mapping the tournament onto itself.
    pub fn automorphism_count(&self) -> Result<u64> {
        self.check_canonical_size()?;
        let adj = self.adjacency();
        let identity: Vec<usize> = (0..self.k).collect();
        let own = code_under(&adj, &identity, self.k);
        let mut count = 0;
        for_each_permutation(self.k, |q| {
            if code_under(&adj, q, self.k) == own {
                count += 1;
            }
        });
        Ok(count)
    }
}

/// Bit string of the tournament whose vertex `a` is old vertex `q[a]`.
fn code_under(adj: &[[bool; MAX_CANONICAL_K]; MAX_CANONICAL_K], q: &[usize], k: usize) -> u64 {
    let mut code = 0u64;
    for a in 0..k {
        for b in a + 1..k {
            code = code << 1 | adj[q[a]][q[b]] as u64;
        }
    }
    code
}

fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    let distinct: BTreeSet<_> = perm.iter().copied().collect();
    if perm.len() != k || distinct.len() != k || perm.iter().any(|&p| p >= k) {
        return Err(Error::Domain(format!(
            "{perm:?} is not a permutation of 0..{k}"
        )));
    }
    Ok(())
}

/// Calls `f` on every permutation of `0..k` in lexicographic order.
pub fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        f(&p);
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..k)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// One representative per isomorphism class of `k`-tournaments, in canonical
/// form, sorted by canonical code.
pub fn enumerate_tournaments(k: usize) -> Result<Vec<Tournament>> {
    if k > MAX_ENUMERATE_K {
        return Err(Error::Unsupported(format!(
            "tournament enumeration needs k <= {MAX_ENUMERATE_K}, got {k}"
        )));
    }
    let pairs = k * k.saturating_sub(1) / 2;
    let mut codes = BTreeSet::new();
    for raw in 0..1u64 << pairs {
        codes.insert(Tournament::from_code(k, raw).canonical_code()?);
    }
    Ok(codes
        .into_iter()
        .map(|c| Tournament::from_code(k, c))
        .collect())
}

/// Vertex partition of `0..n` into `k` classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    class_of: Vec<u32>,
}

impl Partition {
    /// Contiguous classes; the first `n mod k` classes get one extra vertex.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!(
                "cannot split {n} vertices into {k} classes"
            )));
        }
        let (base, extra) = (n / k, n % k);
        let mut class_of = Vec::with_capacity(n);
        for c in 0..k {
            let size = base + usize::from(c < extra);
            class_of.extend(std::iter::repeat_n(c as u32, size));
        }
        Ok(Partition { k, class_of })
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.class_of[v as usize] as usize
    }

    pub fn class_labels(&self) -> &[u32] {
        &self.class_of
    }

    pub fn class(&self, c: usize) -> Vec<Vertex> {
        (0..self.n() as Vertex)
            .filter(|&v| self.class_of[v as usize] as usize == c)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

/// The reduced board: cross edges of a balanced `k`-partition of `K_n`.
pub fn make_reduced_board(n: usize, k: usize) -> Result<(Board, Partition)> {
    if k < 2 || k > n {
        return Err(Error::Domain(format!(
            "reduced board needs n >= k >= 2, got n = {n}, k = {k}"
        )));
    }
    let partition = Partition::balanced(n, k)?;
    let board = Board::reduced_k_partite(k, partition.class_labels())?;
    Ok((board, partition))
}

/// Directed graph on `0..n` stored as out- and in-neighbour bitsets.
#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    words: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
    arcs: usize,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Digraph(n={}, arcs={:?})",
            self.n,
            self.arcs().collect::<Vec<_>>()
        )
    }
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Digraph {
            n,
            words,
            out: vec![0; n * words],
            inn: vec![0; n * words],
            arcs: 0,
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut d = Digraph::new(n);
        for (u, v) in arcs {
            d.add_arc(u, v)?;
        }
        Ok(d)
    }

    /// Both directions of every edge; used for undirected clique searches.
    pub fn symmetric(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut d = Digraph::new(n);
        for (u, v) in edges {
            d.add_arc(u, v)?;
            d.add_arc(v, u)?;
        }
        Ok(d)
    }

    /// Arcs of the Maker-owned, oriented elements of a graph-board game.
    pub fn of_maker(state: &GameState) -> Self {
        let mut d = Digraph::new(state.board().n());
        for e in state.owned_by(Owner::Maker) {
            if let Some((u, v)) = state.orientation(e) {
                d.add_arc(u, v).expect("board arcs are valid");
            }
        }
        d
    }

    /// Undirected graph of Maker's elements, stored symmetrically.
    pub fn of_maker_edges(state: &GameState) -> Self {
        let board = state.board();
        Self::symmetric(
            board.n(),
            state.owned_by(Owner::Maker).filter_map(|e| board.pair(e)),
        )
        .expect("board pairs are valid")
    }

    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        let (ui, vi) = (u as usize, v as usize);
        if ui >= self.n || vi >= self.n || u == v {
            return Err(Error::Domain(format!(
                "({u},{v}) is not an arc on {} vertices",
                self.n
            )));
        }
        if !self.has_arc(u, v) {
            self.out[ui * self.words + vi / 64] |= 1 << (vi % 64);
            self.inn[vi * self.words + ui / 64] |= 1 << (ui % 64);
            self.arcs += 1;
        }
        Ok(())
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        let (u, v) = (u as usize, v as usize);
        u < self.n && v < self.n && self.out[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    fn row(bits: &[u64], words: usize, v: usize) -> &[u64] {
        &bits[v * words..(v + 1) * words]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        Self::row(&self.out, self.words, v as usize)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        Self::row(&self.inn, self.words, v as usize)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n as Vertex).flat_map(move |u| {
            (0..self.n as Vertex).filter_map(move |v| self.has_arc(u, v).then_some((u, v)))
        })
    }
}

fn bits_iter(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                w * 64 + b
            })
        })
    })
}

/// Does `d` contain a copy of `goal`, i.e. an injective vertex map sending
/// every goal arc to an arc of `d`?
///
/// Each unplaced goal vertex keeps a domain of hosts still compatible with
/// every placement so far; the vertex with the smallest domain goes next and
/// a placement that empties any domain is rejected. Initial domains require
/// the host's out- and in-degree to reach the goal vertex's.
pub fn contains_copy(d: &Digraph, goal: &Tournament) -> bool {
    let k = goal.k();
    if k == 0 {
        return true;
    }
    if k > d.n() {
        return false;
    }
    if goal.is_transitive() {
        return contains_transitive(d, k);
    }
    let words = d.words;
    let mut domains = vec![0u64; (k + 1) * k * words];
    for i in 0..k {
        let go = goal.out_degree(i);
        let gi = k - 1 - go;
        for v in 0..d.n() {
            if d.out_degree(v as Vertex) >= go && d.in_degree(v as Vertex) >= gi {
                domains[i * words + v / 64] |= 1 << (v % 64);
            }
        }
    }
    let mut search = CopySearch {
        goal,
        k,
        words,
        out: &d.out,
        inn: &d.inn,
        domains,
        placed: vec![false; k],
    };
    search.extend(0)
}

/// Transitive goals: pick the source, then recurse inside its
/// out-neighbourhood. A candidate set is dropped when a greedy colouring of
/// its underlying graph uses fewer colours than the vertices still needed,
/// since those vertices must be pairwise adjacent.
fn contains_transitive(d: &Digraph, k: usize) -> bool {
    let w = d.words;
    let und: Vec<u64> = d.out.iter().zip(&d.inn).map(|(a, b)| a | b).collect();
    let mut all = vec![0u64; w];
    for v in 0..d.n() {
        all[v / 64] |= 1 << (v % 64);
    }
    transitive_extend(&d.out, &und, w, &all, k)
}

fn transitive_extend(out: &[u64], und: &[u64], w: usize, cand: &[u64], need: usize) -> bool {
    if need == 0 {
        return true;
    }
    let size: u32 = cand.iter().map(|x| x.count_ones()).sum();
    if (size as usize) < need {
        return false;
    }
    if need == 1 {
        return true;
    }
    if greedy_colours(und, w, cand, need) < need {
        return false;
    }
    let mut next = vec![0u64; w];
    for v in bits_iter(cand) {
        let row = &out[v * w..(v + 1) * w];
        let mut count = 0;
        for x in 0..w {
            next[x] = cand[x] & row[x];
            count += next[x].count_ones() as usize;
        }
        if count + 1 >= need && transitive_extend(out, und, w, &next, need - 1) {
            return true;
        }
    }
    false
}

/// Colours used by a greedy colouring of `cand`, stopping once `cap` is hit.
fn greedy_colours(und: &[u64], w: usize, cand: &[u64], cap: usize) -> usize {
    let mut left = cand.to_vec();
    let mut queue = vec![0u64; w];
    let mut colours = 0;
    while left.iter().any(|&x| x != 0) {
        colours += 1;
        if colours >= cap {
            return colours;
        }
        queue.copy_from_slice(&left);
        while let Some(x) = queue.iter().position(|&q| q != 0) {
            let v = x * 64 + queue[x].trailing_zeros() as usize;
            left[x] &= !(1 << (v % 64));
            queue[x] &= !(1 << (v % 64));
            for (q, r) in queue.iter_mut().zip(&und[v * w..(v + 1) * w]) {
                *q &= !r;
            }
        }
    }
    colours
}

struct CopySearch<'a> {
    goal: &'a Tournament,
    k: usize,
    words: usize,
    out: &'a [u64],
    inn: &'a [u64],
    /// Level `depth` holds `k` domains of `words` words each.
    domains: Vec<u64>,
    placed: Vec<bool>,
}

impl CopySearch<'_> {
    fn domain_size(&self, depth: usize, i: usize) -> u32 {
        let at = (depth * self.k + i) * self.words;
        self.domains[at..at + self.words]
            .iter()
            .map(|x| x.count_ones())
            .sum()
    }

    fn extend(&mut self, depth: usize) -> bool {
        let (k, w) = (self.k, self.words);
        if depth == k {
            return true;
        }
        let i = (0..k)
            .filter(|&j| !self.placed[j])
            .min_by_key(|&j| self.domain_size(depth, j))
            .expect("an unplaced goal vertex remains");
        self.placed[i] = true;
        let here = depth * k * w;
        let next = here + k * w;
        for x in 0..w {
            let mut word = self.domains[here + i * w + x];
            while word != 0 {
                let h = x * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if self.narrow(here, next, i, h) && self.extend(depth + 1) {
                    return true;
                }
            }
        }
        self.placed[i] = false;
        false
    }

    /// Writes the next level's domains for placing goal vertex `i` on host
    /// `h`; false when some unplaced domain becomes empty.
    fn narrow(&mut self, here: usize, next: usize, i: usize, h: usize) -> bool {
        let w = self.words;
        for j in 0..self.k {
            if self.placed[j] {
                continue;
            }
            let row = if self.goal.beats(i, j) {
                &self.out[h * w..(h + 1) * w]
            } else {
                &self.inn[h * w..(h + 1) * w]
            };
            let mut any = 0;
            for (x, r) in row.iter().enumerate() {
                let mut v = self.domains[here + j * w + x] & r;
                if x == h / 64 {
                    v &= !(1 << (h % 64));
                }
                self.domains[next + j * w + x] = v;
                any |= v;
            }
            if any == 0 {
                return false;
            }
        }
        true
    }
}

/// Clique search over classes: one vertex per class, pairwise adjacent.
/// `g` is read through its out-neighbourhoods and should be symmetric.
pub fn has_transversal_clique(g: &Digraph, partition: &Partition) -> bool {
    let w = g.words;
    let mut classes = vec![0u64; partition.k() * w];
    for v in 0..partition.n() {
        let c = partition.class_of(v as Vertex);
        classes[c * w + v / 64] |= 1 << (v % 64);
    }
    let all = vec![u64::MAX; w];
    transversal_extend(g, &classes, partition.k(), 0, &all)
}

fn transversal_extend(g: &Digraph, classes: &[u64], k: usize, c: usize, common: &[u64]) -> bool {
    if c == k {
        return true;
    }
    let w = g.words;
    // Forward check: every remaining class still has a candidate.
    for rest in c..k {
        if !(0..w).any(|x| classes[rest * w + x] & common[x] != 0) {
            return false;
        }
    }
    let cand: Vec<u64> = (0..w).map(|x| classes[c * w + x] & common[x]).collect();
    for v in bits_iter(&cand).collect::<Vec<_>>() {
        let row = Digraph::row(&g.out, w, v);
        let next: Vec<u64> = common.iter().zip(row).map(|(a, b)| a & b).collect();
        if transversal_extend(g, classes, k, c + 1, &next) {
            return true;
        }
    }
    false
}

/// Does the symmetric graph `g` contain a `k`-clique?
pub fn has_clique(g: &Digraph, k: usize) -> bool {
    let w = g.words;
    let mut all = vec![0u64; w];
    for v in 0..g.n() {
        all[v / 64] |= 1 << (v % 64);
    }
    clique_extend(g, k, &all)
}

fn clique_extend(g: &Digraph, need: usize, cand: &[u64]) -> bool {
    if need == 0 {
        return true;
    }
    let count: usize = cand.iter().map(|x| x.count_ones() as usize).sum();
    if count < need {
        return false;
    }
    let w = g.words;
    let mut rest = cand.to_vec();
    for v in bits_iter(cand).collect::<Vec<_>>() {
        // Only later vertices: each clique is found from its smallest member.
        rest[v / 64] &= !(1 << (v % 64));
        let row = Digraph::row(&g.out, w, v);
        let next: Vec<u64> = rest.iter().zip(row).map(|(a, b)| a & b).collect();
        if clique_extend(g, need - 1, &next) {
            return true;
        }
    }
    false
}

fn edge_vertices(board: &Board, set: &[ElementId]) -> Option<BTreeSet<Vertex>> {
    let mut vs = BTreeSet::new();
    for &e in set {
        let (u, v) = board.pair(e)?;
        vs.insert(u);
        vs.insert(v);
    }
    Some(vs)
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Enumeration cap for the implicit families.
const ENUMERATE_LIMIT: u128 = 1_000_000;

/// Edge sets of the transversal `k`-cliques of a partition: one vertex per
/// class, all cross edges between them.
#[derive(Clone, Debug)]
pub struct TransversalCliqueFamily {
    board: Arc<Board>,
    partition: Partition,
}

impl TransversalCliqueFamily {
    pub fn new(board: Arc<Board>, partition: Partition) -> Result<Self> {
        if board.kind() != BoardKind::ReducedKPartite
            || board.n() != partition.n()
            || board.k() != Some(partition.k())
            || (0..board.n() as Vertex)
                .any(|v| board.class_of(v) != Some(partition.class_of(v) as u32))
        {
            return Err(Error::Domain(
                "board is not the reduced board of this partition".into(),
            ));
        }
        Ok(TransversalCliqueFamily { board, partition })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    fn set_count(&self) -> u128 {
        self.partition.sizes().iter().map(|&s| s as u128).product()
    }
}

impl ImplicitFamily for TransversalCliqueFamily {
    fn name(&self) -> String {
        format!(
            "transversal-clique(n={}, k={})",
            self.partition.n(),
            self.partition.k()
        )
    }

    fn board_size(&self) -> usize {
        self.board.size()
    }

    fn uniform_set_size(&self) -> Option<usize> {
        let k = self.partition.k();
        Some(k * (k - 1) / 2)
    }

    fn is_member(&self, set: &[ElementId]) -> bool {
        let k = self.partition.k();
        if set.len() != k * (k - 1) / 2 || set.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        let Some(vs) = edge_vertices(&self.board, set) else {
            return false;
        };
        // C(k,2) distinct edges on k vertices form the clique.
        let classes: BTreeSet<usize> = vs.iter().map(|&v| self.partition.class_of(v)).collect();
        vs.len() == k && classes.len() == k
    }

    fn enumerate(&self) -> Option<Box<dyn Iterator<Item = Vec<ElementId>> + '_>> {
        if self.set_count() > ENUMERATE_LIMIT {
            return None;
        }
        let classes: Vec<Vec<Vertex>> = (0..self.partition.k())
            .map(|c| self.partition.class(c))
            .collect();
        let total = self.set_count() as usize;
        Some(Box::new((0..total).map(move |mut idx| {
            let mut pick = Vec::with_capacity(classes.len());
            for class in classes.iter().rev() {
                pick.push(class[idx % class.len()]);
                idx /= class.len();
            }
            pick.reverse();
            let mut set = Vec::new();
            for (i, &u) in pick.iter().enumerate() {
                for &v in &pick[i + 1..] {
                    set.push(self.board.element(u, v).expect("cross edge"));
                }
            }
            set.sort_unstable();
            set
        })))
    }

    fn count(&self) -> Option<Log2Real> {
        Some(
            self.partition
                .sizes()
                .iter()
                .map(|&s| Log2Real::from_u64(s as u64))
                .fold(Log2Real::ONE, |a, b| a * b),
        )
    }

    fn maker_contains(&self, state: &GameState) -> bool {
        has_transversal_clique(&Digraph::of_maker_edges(state), &self.partition)
    }
}

/// Edge sets of all `k`-cliques of `K_n`.
#[derive(Clone, Debug)]
pub struct CliqueFamily {
    n: usize,
    k: usize,
}

impl CliqueFamily {
    pub fn new(n: usize, k: usize) -> Self {
        CliqueFamily { n, k }
    }
}

impl ImplicitFamily for CliqueFamily {
    fn name(&self) -> String {
        format!("clique(n={}, k={})", self.n, self.k)
    }

    fn board_size(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    fn uniform_set_size(&self) -> Option<usize> {
        Some(self.k * self.k.saturating_sub(1) / 2)
    }

    fn is_member(&self, set: &[ElementId]) -> bool {
        let board = Board::complete_graph(self.n);
        set.len() == self.k * self.k.saturating_sub(1) / 2
            && set.windows(2).all(|w| w[0] < w[1])
            && edge_vertices(&board, set).is_some_and(|vs| vs.len() == self.k)
    }

    fn enumerate(&self) -> Option<Box<dyn Iterator<Item = Vec<ElementId>> + '_>> {
        if self.k < 2 || binomial_u128(self.n as u128, self.k as u128) > ENUMERATE_LIMIT {
            return None;
        }
        let board = Board::complete_graph(self.n);
        let mut sets = Vec::new();
        let mut pick: Vec<Vertex> = (0..self.k as Vertex).collect();
        loop {
            let mut set = Vec::new();
            for (i, &u) in pick.iter().enumerate() {
                for &v in &pick[i + 1..] {
                    set.push(board.element(u, v).expect("edge"));
                }
            }
            set.sort_unstable();
            sets.push(set);
            let Some(i) = (0..self.k)
                .rev()
                .find(|&i| (pick[i] as usize) < self.n - self.k + i)
            else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..self.k {
                pick[j] = pick[j - 1] + 1;
            }
        }
        Some(Box::new(sets.into_iter()))
    }

    fn count(&self) -> Option<Log2Real> {
        Some(Log2Real::binomial(self.n as u64, self.k as u64))
    }

    fn maker_contains(&self, state: &GameState) -> bool {
        has_clique(&Digraph::of_maker_edges(state), self.k)
    }
}

/// Winning condition of the tournament game: Maker's oriented edges contain
/// a copy of the goal. As a family of edge sets its members are the `k`-clique
/// edge sets; which orientations win is decided by [`contains_copy`].
#[derive(Clone, Debug)]
pub struct TournamentCopyFamily {
    goal: Tournament,
    n: usize,
}

impl TournamentCopyFamily {
    pub fn new(goal: Tournament, n: usize) -> Self {
        TournamentCopyFamily { goal, n }
    }

    pub fn goal(&self) -> &Tournament {
        &self.goal
    }
}

impl ImplicitFamily for TournamentCopyFamily {
    fn name(&self) -> String {
        format!("tournament-copy(n={}, k={})", self.n, self.goal.k())
    }

    fn board_size(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    fn uniform_set_size(&self) -> Option<usize> {
        Some(self.goal.k() * self.goal.k().saturating_sub(1) / 2)
    }

    fn is_member(&self, set: &[ElementId]) -> bool {
        CliqueFamily::new(self.n, self.goal.k()).is_member(set)
    }

    fn enumerate(&self) -> Option<Box<dyn Iterator<Item = Vec<ElementId>> + '_>> {
        None
    }

    /// Labelled copies: `n (n-1) ... (n-k+1) / |Aut|`.
    fn count(&self) -> Option<Log2Real> {
        let aut = self.goal.automorphism_count().ok()?;
        Some(
            Log2Real::falling_factorial(self.n as u64, self.goal.k() as u64)
                / Log2Real::from_u64(aut),
        )
    }

    fn maker_contains(&self, state: &GameState) -> bool {
        contains_copy(&Digraph::of_maker(state), &self.goal)
    }
}

/// The tournament game on `K_n` with goal `goal`.
pub fn tournament_game(n: usize, goal: &Tournament, a: u32, b: u32) -> Result<GameState> {
    let family = TournamentCopyFamily::new(goal.clone(), n);
    Ok(GameState::new(
        Arc::new(Board::complete_graph(n)),
        Arc::new(WinningFamily::Implicit(Arc::new(family))),
        a,
        b,
    )?
    .with_goal_size(goal.k()))
}

/// Families with at most this many sets are listed by the game constructors,
/// which lets set-tracking strategies run on them.
pub const MAX_LISTED_SETS: u64 = 200_000;

/// Lists `family` when it has at most [`MAX_LISTED_SETS`] sets.
pub fn listed_if_small<F: ImplicitFamily + 'static>(family: F) -> Result<WinningFamily> {
    let small = family
        .count()
        .is_some_and(|c| c <= Log2Real::from_u64(MAX_LISTED_SETS));
    let listed = match family.enumerate() {
        Some(sets) if small => Some(sets.collect::<Vec<_>>()),
        _ => None,
    };
    Ok(match listed {
        Some(sets) => ExplicitFamily::new(family.board_size(), sets)?.into(),
        None => WinningFamily::Implicit(Arc::new(family)),
    })
}

/// The transversal clique game on the reduced board of a balanced partition.
pub fn reduced_clique_game(n: usize, k: usize, a: u32, b: u32) -> Result<(GameState, Partition)> {
    let (board, partition) = make_reduced_board(n, k)?;
    let board = Arc::new(board);
    let family = listed_if_small(TransversalCliqueFamily::new(
        board.clone(),
        partition.clone(),
    )?)?;
    let state = GameState::new(board, Arc::new(family), a, b)?;
    Ok((state, partition))
}

/// Maker strategy for a game on `K_n` that follows an inner strategy playing
/// a shadow game on a sub-board, orienting each claimed edge by a fixed rule.
///
/// Breaker claims off the shadow board, or on shadow elements already taken,
/// are replaced in the shadow game by its smallest unclaimed elements; this
/// only ever weakens the inner Maker's position. Once the shadow board is
/// full the wrapper passes.
#[derive(Debug)]
pub struct ReductionMaker<S> {
    inner: S,
    shadow: GameState,
    to_shadow: Vec<Option<ElementId>>,
    to_real: Vec<ElementId>,
    arc_of: Vec<(Vertex, Vertex)>,
    synced: usize,
}

impl<S: Strategy> ReductionMaker<S> {
    fn new(
        real: &GameState,
        shadow: GameState,
        arc_of: impl Fn(Vertex, Vertex) -> (Vertex, Vertex),
        inner: S,
    ) -> Result<Self> {
        let board = real.board();
        if board.kind() != BoardKind::CompleteGraphEdges {
            return Err(Error::Domain(
                "the reductions play on the edges of K_n".into(),
            ));
        }
        if real.bias() != shadow.bias() {
            return Err(Error::Domain("shadow and real game biases differ".into()));
        }
        let sb = shadow.board().clone();
        let mut to_shadow = vec![None; board.size()];
        let mut to_real = Vec::with_capacity(sb.size());
        let mut arcs = Vec::with_capacity(sb.size());
        for s in sb.elements() {
            let (u, v) = sb.pair(s).expect("graph board");
            let r = board.element(u, v).ok_or_else(|| {
                Error::Domain(format!("shadow edge ({u},{v}) is not on the real board"))
            })?;
            to_shadow[r.index()] = Some(s);
            to_real.push(r);
            arcs.push(arc_of(u, v));
        }
        Ok(ReductionMaker {
            inner,
            shadow,
            to_shadow,
            to_real,
            arc_of: arcs,
            synced: 0,
        })
    }

    /// The shadow game as seen by the inner strategy.
    pub fn shadow(&self) -> &GameState {
        &self.shadow
    }

    /// Has the inner strategy won its shadow game?
    pub fn inner_won(&self) -> bool {
        self.shadow.maker_wins()
    }

    /// Replays the real moves made since the last call into the shadow game.
    pub fn sync(&mut self, real: &GameState) -> Result<()> {
        let history = real.history();
        while self.synced < history.len() {
            let first = &history[self.synced];
            let mut end = self.synced + 1;
            while end < history.len()
                && history[end].player == first.player
                && history[end].round == first.round
            {
                end += 1;
            }
            let turn = &history[self.synced..end];
            self.synced = end;
            if self.shadow.is_full() {
                continue;
            }
            match first.player {
                Player::Maker => self.sync_maker(turn)?,
                Player::Breaker => self.sync_breaker(turn)?,
            }
        }
        Ok(())
    }

    fn sync_maker(&mut self, turn: &[MoveRecord]) -> Result<()> {
        let mut elements = Vec::new();
        for e in turn.iter().flat_map(|r| &r.elements) {
            let s = self.to_shadow[e.index()].ok_or_else(|| Error::InvariantViolation {
                reason: format!("Maker claimed element {} outside the shadow board", e.0),
                trace: String::new(),
            })?;
            elements.push(s);
        }
        self.shadow.apply_move(Player::Maker, &Move::new(elements))
    }

    fn sync_breaker(&mut self, turn: &[MoveRecord]) -> Result<()> {
        let quota = (self.shadow.bias().breaker as usize).min(self.shadow.unclaimed_count());
        let mut elements: Vec<ElementId> = Vec::new();
        for e in turn.iter().flat_map(|r| &r.elements) {
            if let Some(s) = self.to_shadow[e.index()] {
                if self.shadow.owner(s) == Owner::Unclaimed && !elements.contains(&s) {
                    elements.push(s);
                }
            }
        }
        let mut fill = self.shadow.unclaimed();
        while elements.len() < quota {
            let s = fill.next().expect("quota is at most the unclaimed count");
            if !elements.contains(&s) {
                elements.push(s);
            }
        }
        drop(fill);
        self.shadow
            .apply_move(Player::Breaker, &Move::new(elements))
    }
}

impl<S: Strategy> Strategy for ReductionMaker<S> {
    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move> {
        self.sync(state)?;
        if self.shadow.is_full() {
            return Ok(Move::pass());
        }
        let mv = self.inner.next_move(&self.shadow, rng)?;
        let mut elements = Vec::with_capacity(mv.elements.len());
        let mut arcs = Vec::with_capacity(mv.elements.len());
        for &s in &mv.elements {
            let r = *self
                .to_real
                .get(s.index())
                .ok_or(Error::ElementOutOfRange(s))?;
            elements.push(r);
            arcs.push(self.arc_of[s.index()]);
        }
        Ok(Move::oriented(elements, arcs))
    }
}

/// Maker for the tournament game with goal `goal`: runs `inner` on the
/// transversal clique game of `partition` and orients a cross edge between
/// classes `i` and `j` as the goal orients `i` and `j`.
pub fn maker_tournament_wrapper<S: Strategy>(
    real: &GameState,
    goal: &Tournament,
    partition: &Partition,
    inner: S,
) -> Result<ReductionMaker<S>> {
    if goal.k() != partition.k() || real.board().n() != partition.n() {
        return Err(Error::Domain(format!(
            "goal on {} vertices and partition into {} classes of {} vertices do not fit K_{}",
            goal.k(),
            partition.k(),
            partition.n(),
            real.board().n()
        )));
    }
    let board = Arc::new(Board::reduced_k_partite(
        partition.k(),
        partition.class_labels(),
    )?);
    let family = listed_if_small(TransversalCliqueFamily::new(
        board.clone(),
        partition.clone(),
    )?)?;
    let Bias { maker, breaker } = real.bias();
    let shadow = GameState::new(board, Arc::new(family), maker, breaker)?;
    ReductionMaker::new(
        real,
        shadow,
        |u, v| {
            let (cu, cv) = (partition.class_of(u), partition.class_of(v));
            if goal.beats(cu, cv) {
                (u, v)
            } else {
                (v, u)
            }
        },
        inner,
    )
}

/// Maker for the tournament game with the transitive goal on `k` vertices:
/// runs `inner` on the `k`-clique game and orients each edge low to high.
pub fn transitive_strategy_wrapper<S: Strategy>(
    real: &GameState,
    k: usize,
    inner: S,
) -> Result<ReductionMaker<S>> {
    let n = real.board().n();
    let Bias { maker, breaker } = real.bias();
    let shadow = GameState::new(
        Arc::new(Board::complete_graph(n)),
        Arc::new(listed_if_small(CliqueFamily::new(n, k))?),
        maker,
        breaker,
    )?;
    ReductionMaker::new(real, shadow, |u, v| (u.min(v), u.max(v)), inner)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::game::{play_out, RandomStrategy};

    #[test]
    fn text_format_round_trip_and_rejections() {
        let t = Tournament::cyclic3();
        assert_eq!(t.to_text(), "3\n0 1\n2 0\n1 2\n");
        assert_eq!(Tournament::parse(&t.to_text()).unwrap(), t);
        assert!(Tournament::parse("3\n0 1\n1 2\n").is_err());
        assert!(Tournament::parse("3\n0 1\n1 0\n1 2\n2 0\n").is_err());
        assert!(Tournament::parse("2\n0 0\n").is_err());
        assert!(Tournament::parse("").is_err());
        assert_eq!(
            Tournament::named("transitive:4").unwrap(),
            Tournament::transitive(4)
        );
        assert!(Tournament::named("cyclic:4").is_err());
    }

    #[test]
    fn permutations_are_complete_and_ordered() {
        let mut seen = Vec::new();
        for_each_permutation(4, |p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 24);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut one = 0;
        for_each_permutation(0, |_| one += 1);
        assert_eq!(one, 1);
    }

    #[test]
    fn automorphisms_of_triangles() {
        assert_eq!(Tournament::transitive(3).automorphism_count().unwrap(), 1);
        assert_eq!(Tournament::cyclic3().automorphism_count().unwrap(), 3);
        assert!(Tournament::transitive(3).is_transitive());
        assert!(!Tournament::cyclic3().is_transitive());
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let mut rng = GameRng::seed_from_u64(3);
        for k in 1..=6 {
            let t = Tournament::random(k, &mut rng);
            let code = t.canonical_code().unwrap();
            for _ in 0..100 {
                let mut perm: Vec<usize> = (0..k).collect();
                rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
                assert_eq!(t.relabel(&perm).unwrap().canonical_code().unwrap(), code);
            }
        }
        assert!(Tournament::transitive(9).canonical_code().is_err());
    }

    #[test]
    fn small_enumeration_counts() {
        let counts: Vec<usize> = (1..=5)
            .map(|k| enumerate_tournaments(k).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 12]);
        assert!(enumerate_tournaments(7).is_err());
    }

    #[test]
    fn partitions_are_balanced() {
        let p = Partition::balanced(10, 3).unwrap();
        assert_eq!(p.sizes(), vec![4, 3, 3]);
        assert_eq!(p.class(0), vec![0, 1, 2, 3]);
        assert!(Partition::balanced(2, 3).is_err());
    }

    #[test]
    fn reduced_board_examples() {
        let (b, p) = make_reduced_board(4, 2).unwrap();
        assert_eq!(b.size(), 4);
        assert_eq!(p.class(0), vec![0, 1]);
        let (b, _) = make_reduced_board(5, 5).unwrap();
        assert_eq!(b.size(), 10);
        let (b, _) = make_reduced_board(192, 3).unwrap();
        assert_eq!(b.size(), 12288);
        assert!(make_reduced_board(3, 4).is_err());
    }

    #[test]
    fn containment_examples() {
        let t3 = Tournament::transitive(3);
        let d = Digraph::from_arcs(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(contains_copy(&d, &t3));
        assert!(!contains_copy(&d, &Tournament::cyclic3()));
        let t2 = Tournament::transitive(2);
        assert!(!contains_copy(&Digraph::new(5), &t2));
        assert!(contains_copy(
            &Digraph::from_arcs(5, [(4, 2)]).unwrap(),
            &t2
        ));
        assert!(!contains_copy(&d, &Tournament::transitive(4)));
    }

    #[test]
    fn transversal_family_on_tiny_boards() {
        let (b, p) = make_reduced_board(4, 2).unwrap();
        let f = TransversalCliqueFamily::new(Arc::new(b), p).unwrap();
        let sets: Vec<_> = f.enumerate().unwrap().collect();
        assert_eq!(sets.len(), 4);
        assert!(sets.iter().all(|s| s.len() == 1 && f.is_member(s)));
        let (b, p) = make_reduced_board(192, 3).unwrap();
        let f = TransversalCliqueFamily::new(Arc::new(b), p).unwrap();
        assert!((f.count().unwrap().log2() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn transversal_enumeration_matches_membership() {
        let (b, p) = make_reduced_board(7, 3).unwrap();
        let f = TransversalCliqueFamily::new(Arc::new(b.clone()), p).unwrap();
        let sets: BTreeSet<_> = f.enumerate().unwrap().collect();
        assert_eq!(sets.len(), 3 * 2 * 2);
        // Every 3-subset of the board that is a member appears in the list.
        let n = b.size() as u32;
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    let s = vec![ElementId(x), ElementId(y), ElementId(z)];
                    assert_eq!(f.is_member(&s), sets.contains(&s));
                }
            }
        }
    }

    #[test]
    fn clique_family_enumeration() {
        let f = CliqueFamily::new(5, 3);
        let sets: Vec<_> = f.enumerate().unwrap().collect();
        assert_eq!(sets.len(), 10);
        assert!(sets.iter().all(|s| f.is_member(s)));
    }

    #[test]
    fn single_arc_goal_is_won_on_the_first_move() {
        let goal = Tournament::transitive(2);
        for (g, n) in [(goal.clone(), 2), (goal, 6)] {
            let real = tournament_game(n, &g, 1, 1).unwrap();
            let p = Partition::balanced(n, 2).unwrap();
            let mut maker =
                maker_tournament_wrapper(&real, &g, &p, RandomStrategy::default()).unwrap();
            let mut rng = GameRng::seed_from_u64(0);
            let mv = maker.next_move(&real, &mut rng).unwrap();
            let mut s = real.clone();
            s.apply_move(Player::Maker, &mv).unwrap();
            assert!(s.maker_wins());
        }
    }

    #[test]
    fn wrapped_random_maker_keeps_orientations_consistent() {
        for goal in [Tournament::transitive(3), Tournament::cyclic3()] {
            for seed in 0..20 {
                let real = tournament_game(9, &goal, 1, 1).unwrap();
                let p = Partition::balanced(9, 3).unwrap();
                let mut maker =
                    maker_tournament_wrapper(&real, &goal, &p, RandomStrategy::default()).unwrap();
                let out =
                    play_out(real, &mut maker, &mut RandomStrategy::oriented(), seed).unwrap();
                maker.sync(&out.state).unwrap();
                for e in out.state.owned_by(Owner::Maker) {
                    let (u, v) = out.state.orientation(e).unwrap();
                    assert!(goal.beats(p.class_of(u), p.class_of(v)));
                }
                if maker.inner_won() {
                    assert!(out.state.maker_wins());
                }
            }
        }
    }

    #[test]
    fn transitive_wrapper_orients_low_to_high() {
        let real = tournament_game(7, &Tournament::transitive(3), 1, 1).unwrap();
        let mut maker = transitive_strategy_wrapper(&real, 3, RandomStrategy::default()).unwrap();
        let out = play_out(real, &mut maker, &mut RandomStrategy::default(), 5).unwrap();
        maker.sync(&out.state).unwrap();
        for e in out.state.owned_by(Owner::Maker) {
            let (u, v) = out.state.orientation(e).unwrap();
            assert!(u < v);
        }
        assert_eq!(maker.inner_won(), out.state.maker_wins());
    }
}
