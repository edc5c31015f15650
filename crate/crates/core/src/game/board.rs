use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a board element, `0 <= id < board size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Vertex = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoardKind {
    /// Plain numbered elements with no graph structure.
    Abstract,
    /// Edges `{u, v}` of `K_n`.
    CompleteGraphEdges,
    /// Ordered pairs `(u, v)`, `u != v`.
    OrderedPairs,
    /// Edges of `K_n` whose endpoints lie in different partition classes.
    ReducedKPartite,
}

impl BoardKind {
    pub fn name(self) -> &'static str {
        match self {
            BoardKind::Abstract => "abstract",
            BoardKind::CompleteGraphEdges => "complete-graph-edges",
            BoardKind::OrderedPairs => "ordered-pairs",
            BoardKind::ReducedKPartite => "reduced-k-partite",
        }
    }
}

const NO_ELEMENT: u32 = u32::MAX;

/// Board of a Maker-Breaker game.
///
/// Element numbering is lexicographic over vertex pairs: for the undirected
/// boards element ids enumerate `(u, v)` with `u < v` in lexicographic order
/// (skipping same-class pairs on the reduced board), and for the ordered-pair
/// board they enumerate all `(u, v)` with `u != v` lexicographically.
#[derive(Clone, Debug)]
pub struct Board {
    kind: BoardKind,
    n: usize,
    size: usize,
    classes: Option<(usize, Vec<u32>)>,
    pairs: Vec<(Vertex, Vertex)>,
    lookup: Vec<u32>,
}

impl Board {
    pub fn abstract_board(size: usize) -> Self {
        Board {
            kind: BoardKind::Abstract,
            n: 0,
            size,
            classes: None,
            pairs: Vec::new(),
            lookup: Vec::new(),
        }
    }

    pub fn complete_graph(n: usize) -> Self {
        Self::from_pairs(BoardKind::CompleteGraphEdges, n, None, |u, v| u < v)
    }

    pub fn ordered_pairs(n: usize) -> Self {
        Self::from_pairs(BoardKind::OrderedPairs, n, None, |u, v| u != v)
    }

    /// Cross edges of `K_n` between distinct classes; `class_of[v] < k`.
    pub fn reduced_k_partite(k: usize, class_of: &[u32]) -> Result<Self> {
        if let Some(&c) = class_of.iter().find(|&&c| c as usize >= k) {
            return Err(Error::Domain(format!(
                "class index {c} is not below k = {k}"
            )));
        }
        let n = class_of.len();
        let classes = class_of.to_vec();
        Ok(Self::from_pairs(
            BoardKind::ReducedKPartite,
            n,
            Some((k, classes.clone())),
            |u, v| u < v && classes[u as usize] != classes[v as usize],
        ))
    }

    fn from_pairs(
        kind: BoardKind,
        n: usize,
        classes: Option<(usize, Vec<u32>)>,
        keep: impl Fn(Vertex, Vertex) -> bool,
    ) -> Self {
        let mut pairs = Vec::new();
        let mut lookup = vec![NO_ELEMENT; n * n];
        for u in 0..n as Vertex {
            for v in 0..n as Vertex {
                if keep(u, v) {
                    lookup[u as usize * n + v as usize] = pairs.len() as u32;
                    pairs.push((u, v));
                }
            }
        }
        if kind != BoardKind::OrderedPairs {
            for u in 0..n {
                for v in 0..u {
                    lookup[u * n + v] = lookup[v * n + u];
                }
            }
        }
        Board {
            kind,
            n,
            size: pairs.len(),
            classes,
            pairs,
            lookup,
        }
    }

    pub fn kind(&self) -> BoardKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Vertex count of the underlying `K_n` (zero for abstract boards).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of partition classes on a reduced board.
    pub fn k(&self) -> Option<usize> {
        self.classes.as_ref().map(|(k, _)| *k)
    }

    pub fn class_of(&self, v: Vertex) -> Option<u32> {
        self.classes.as_ref().map(|(_, c)| c[v as usize])
    }

    pub fn contains(&self, e: ElementId) -> bool {
        e.index() < self.size
    }

    /// Vertex pair behind an element (`u < v` on undirected boards).
    pub fn pair(&self, e: ElementId) -> Option<(Vertex, Vertex)> {
        self.pairs.get(e.index()).copied()
    }

    /// Element for a vertex pair. Undirected boards accept either order.
    pub fn element(&self, u: Vertex, v: Vertex) -> Option<ElementId> {
        let (u, v) = (u as usize, v as usize);
        if u >= self.n || v >= self.n {
            return None;
        }
        match self.lookup[u * self.n + v] {
            NO_ELEMENT => None,
            id => Some(ElementId(id)),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.size as u32).map(ElementId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Board::complete_graph(5).size(), 10);
        assert_eq!(Board::ordered_pairs(4).size(), 12);
        assert_eq!(Board::abstract_board(3).size(), 3);
        let b = Board::reduced_k_partite(2, &[0, 0, 1, 1]).unwrap();
        assert_eq!(b.size(), 4);
        assert!(Board::reduced_k_partite(2, &[0, 2]).is_err());
    }

    #[test]
    fn numbering_is_lexicographic() {
        let b = Board::complete_graph(4);
        let pairs: Vec<_> = b.elements().map(|e| b.pair(e).unwrap()).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(b.element(3, 1), Some(ElementId(4)));
        assert_eq!(b.element(2, 2), None);

        let o = Board::ordered_pairs(3);
        assert_eq!(o.pair(ElementId(0)), Some((0, 1)));
        assert_eq!(o.pair(ElementId(2)), Some((1, 0)));
        assert_eq!(o.element(2, 1), Some(ElementId(5)));
        assert_ne!(o.element(0, 1), o.element(1, 0));

        let r = Board::reduced_k_partite(2, &[0, 0, 1, 1]).unwrap();
        let pairs: Vec<_> = r.elements().map(|e| r.pair(e).unwrap()).collect();
        assert_eq!(pairs, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(r.element(0, 1), None);
    }
}
