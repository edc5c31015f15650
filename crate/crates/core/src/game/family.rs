use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{ElementId, GameState};
use crate::log2real::Log2Real;

/// A winning family too large (or too structured) to list set by set.
///
/// Implementations must keep the enumerator and the membership test in
/// agreement: every set yielded by [`ImplicitFamily::enumerate`] is a member.
pub trait ImplicitFamily: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn board_size(&self) -> usize;

    fn uniform_set_size(&self) -> Option<usize>;

    /// Is `set` (sorted, duplicate free) one of the winning sets?
    fn is_member(&self, set: &[ElementId]) -> bool;

    /// Enumerates every winning set as a sorted id list, or `None` when the
    /// family is too large to enumerate.
    fn enumerate(&self) -> Option<Box<dyn Iterator<Item = Vec<ElementId>> + '_>>;

    /// Exact number of winning sets, when known analytically.
    fn count(&self) -> Option<Log2Real>;

    /// `sum over sets of 2^{-|set|}`, when known analytically.
    fn potential(&self) -> Option<Log2Real> {
        let size = self.uniform_set_size()?;
        Some(self.count()? * Log2Real::pow2(-(size as f64)))
    }

    /// Does Maker's position in `state` contain a winning set?
    fn maker_contains(&self, state: &GameState) -> bool;
}

/// A listed family with a per-element membership index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitFamily {
    board_size: usize,
    sets: Vec<Vec<ElementId>>,
    containing: Vec<Vec<u32>>,
}

impl ExplicitFamily {
    /// Sorts every set, drops repeated elements and duplicate sets.
    pub fn new(board_size: usize, sets: Vec<Vec<ElementId>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(sets.len());
        for (i, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(bad) = set.iter().find(|e| e.index() >= board_size) {
                return Err(Error::SetOutsideBoard {
                    set: i,
                    element: bad.0,
                    board_size,
                });
            }
            normalized.push(set);
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut containing = vec![Vec::new(); board_size];
        for (i, set) in normalized.iter().enumerate() {
            for e in set {
                containing[e.index()].push(i as u32);
            }
        }
        Ok(ExplicitFamily {
            board_size,
            sets: normalized,
            containing,
        })
    }

    /// Convenience constructor from raw indices.
    pub fn from_indices(board_size: usize, sets: &[&[u32]]) -> Result<Self> {
        Self::new(
            board_size,
            sets.iter()
                .map(|s| s.iter().map(|&e| ElementId(e)).collect())
                .collect(),
        )
    }

    pub fn board_size(&self) -> usize {
        self.board_size
    }

    pub fn sets(&self) -> &[Vec<ElementId>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Indices of the sets containing `e`.
    pub fn sets_containing(&self, e: ElementId) -> &[u32] {
        &self.containing[e.index()]
    }

    pub fn uniform_set_size(&self) -> Option<usize> {
        let first = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == first).then_some(first)
    }
}

#[derive(Clone, Debug)]
pub enum WinningFamily {
    Explicit(ExplicitFamily),
    Implicit(Arc<dyn ImplicitFamily>),
}

impl WinningFamily {
    pub fn empty(board_size: usize) -> Self {
        WinningFamily::Explicit(ExplicitFamily::new(board_size, Vec::new()).expect("empty family"))
    }

    pub fn board_size(&self) -> usize {
        match self {
            WinningFamily::Explicit(f) => f.board_size(),
            WinningFamily::Implicit(f) => f.board_size(),
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitFamily> {
        match self {
            WinningFamily::Explicit(f) => Some(f),
            WinningFamily::Implicit(_) => None,
        }
    }

    pub fn uniform_set_size(&self) -> Option<usize> {
        match self {
            WinningFamily::Explicit(f) => f.uniform_set_size(),
            WinningFamily::Implicit(f) => f.uniform_set_size(),
        }
    }

    /// Lists an implicit family, if it can be enumerated.
    pub fn to_explicit(&self) -> Result<ExplicitFamily> {
        match self {
            WinningFamily::Explicit(f) => Ok(f.clone()),
            WinningFamily::Implicit(f) => {
                let sets = f.enumerate().ok_or_else(|| {
                    Error::Unsupported(format!("family {} is too large to enumerate", f.name()))
                })?;
                ExplicitFamily::new(f.board_size(), sets.collect())
            }
        }
    }
}

impl From<ExplicitFamily> for WinningFamily {
    fn from(f: ExplicitFamily) -> Self {
        WinningFamily::Explicit(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_indexes() {
        let f = ExplicitFamily::from_indices(4, &[&[1, 0], &[0, 1], &[2, 2, 3]]).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.sets()[0], vec![ElementId(0), ElementId(1)]);
        assert_eq!(f.sets()[1], vec![ElementId(2), ElementId(3)]);
        assert_eq!(f.sets_containing(ElementId(1)), &[0]);
        assert_eq!(f.uniform_set_size(), Some(2));
    }

    #[test]
    fn rejects_sets_outside_board() {
        let err = ExplicitFamily::from_indices(3, &[&[0, 3]]).unwrap_err();
        assert!(matches!(err, Error::SetOutsideBoard { element: 3, .. }));
    }
}
