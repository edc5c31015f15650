//! Potential functions and the strategies and criteria built on them.
//!
//! * `T(H) = sum over H of 2^{-|H|}`, the classical potential;
//! * the biased Erdős–Selfridge criterion
//!   `sum over F of (1+b)^{-|F|/a} < 1/(1+b)` and the matching Breaker rule
//!   (claim the element carrying the most surviving potential);
//! * a Maker heuristic that claims the element of largest `2^{-needs}` weight;
//! * Beck's Advanced Weak Win inequality
//!   `T(F)/|X| > p + 4p * T(F_2^p)^{1/p}` as a checkable certificate.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::game::{
    ElementId, ExplicitFamily, GameRng, GameState, Move, Owner, Player, Strategy, WinningFamily,
};
use crate::log2real::Log2Real;

/// Survivor bookkeeping for an explicit family: a set is dead once it holds
/// a Breaker element; an alive set still needs its non-Maker elements.
#[derive(Clone, Debug)]
pub struct AliveSetView<'a> {
    family: &'a ExplicitFamily,
    owner: Vec<Owner>,
    dead: Vec<bool>,
    needs: Vec<u32>,
}

impl<'a> AliveSetView<'a> {
    pub fn new(state: &'a GameState) -> Result<Self> {
        let family = state.family().as_explicit().ok_or_else(|| {
            Error::Unsupported("alive-set bookkeeping needs an explicit family".into())
        })?;
        let (dead, needs) = (0..family.len())
            .map(|i| {
                let (maker, breaker) = state.set_hits(i).expect("explicit families are tracked");
                (breaker > 0, family.sets()[i].len() as u32 - maker)
            })
            .unzip();
        Ok(AliveSetView {
            family,
            owner: state.ownership().to_vec(),
            dead,
            needs,
        })
    }

    pub fn from_ownership(family: &'a ExplicitFamily, owner: &[Owner]) -> Self {
        let mut dead = Vec::with_capacity(family.len());
        let mut needs = Vec::with_capacity(family.len());
        for set in family.sets() {
            dead.push(set.iter().any(|e| owner[e.index()] == Owner::Breaker));
            needs.push(
                set.iter()
                    .filter(|e| owner[e.index()] != Owner::Maker)
                    .count() as u32,
            );
        }
        AliveSetView {
            family,
            owner: owner.to_vec(),
            dead,
            needs,
        }
    }

    /// Marks every set matching `pred` as dead.
    pub fn kill_where(&mut self, pred: impl Fn(&[ElementId]) -> bool) {
        for (i, set) in self.family.sets().iter().enumerate() {
            if !self.dead[i] && pred(set) {
                self.dead[i] = true;
            }
        }
    }

    /// Applies a hypothetical claim to the view.
    pub fn claim(&mut self, e: ElementId, player: Player) {
        assert_eq!(
            self.owner[e.index()],
            Owner::Unclaimed,
            "element {e:?} already claimed"
        );
        self.owner[e.index()] = player.into();
        for &s in self.family.sets_containing(e) {
            match player {
                Player::Maker => self.needs[s as usize] -= 1,
                Player::Breaker => self.dead[s as usize] = true,
            }
        }
    }

    pub fn family(&self) -> &'a ExplicitFamily {
        self.family
    }

    pub fn owner(&self, e: ElementId) -> Owner {
        self.owner[e.index()]
    }

    pub fn is_dead(&self, set: usize) -> bool {
        self.dead[set]
    }

    pub fn needs(&self, set: usize) -> u32 {
        self.needs[set]
    }

    pub fn dead_count(&self) -> usize {
        self.dead.iter().filter(|&&d| d).count()
    }

    pub fn alive_count(&self) -> usize {
        self.dead.len() - self.dead_count()
    }

    pub fn unclaimed(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == Owner::Unclaimed)
            .map(|(i, _)| ElementId(i as u32))
    }

    /// Sum of `weight(needs)` over alive sets containing `e`.
    fn element_score(&self, e: ElementId, weight: &impl Fn(u32) -> f64) -> f64 {
        self.family
            .sets_containing(e)
            .iter()
            .filter(|&&s| !self.dead[s as usize])
            .map(|&s| weight(self.needs[s as usize]))
            .sum()
    }

    /// Unclaimed element of maximum score, smallest id on ties. Scores within
    /// a relative `1e-12` of each other count as tied.
    fn argmax(
        &self,
        weight: impl Fn(u32) -> f64,
        filter: &dyn Fn(ElementId) -> bool,
    ) -> Option<ElementId> {
        let mut best: Option<(ElementId, f64)> = None;
        for e in self.unclaimed().filter(|&e| filter(e)) {
            let score = self.element_score(e, &weight);
            match best {
                Some((_, b)) if score <= b + 1e-12 * b.abs() => {}
                _ => best = Some((e, score)),
            }
        }
        best.map(|(e, _)| e)
    }
}

/// Breaker's potential move in the `(a:b)` game: the unclaimed element
/// (passing `filter`) maximizing `sum over alive sets S containing it of
/// (1+b)^{-needs(S)/a}`, smallest id on ties.
pub fn es_breaker_move(
    view: &AliveSetView<'_>,
    a: u32,
    b: u32,
    filter: &dyn Fn(ElementId) -> bool,
) -> Result<ElementId> {
    let base = ((1 + b) as f64).log2() / a as f64;
    view.argmax(|needs| (-(needs as f64) * base).exp2(), filter)
        .ok_or(Error::NoCandidates)
}

/// Maker's potential heuristic: the unclaimed element maximizing
/// `sum over alive sets S containing it of 2^{-needs(S)}`.
pub fn maker_potential_move(view: &AliveSetView<'_>) -> Result<ElementId> {
    view.argmax(|needs| (-(needs as f64)).exp2(), &|_| true)
        .ok_or(Error::NoCandidates)
}

/// Maker strategy that repeatedly applies [`maker_potential_move`] for her
/// whole allotment.
#[derive(Clone, Debug, Default)]
pub struct PotentialMaker;

impl Strategy for PotentialMaker {
    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move> {
        let mut view = AliveSetView::new(state)?;
        let want = state.bias().maker - state.claimed_this_turn();
        let mut picked = Vec::new();
        for _ in 0..want.min(state.unclaimed_count() as u32) {
            let e = maker_potential_move(&view)?;
            view.claim(e, Player::Maker);
            picked.push(e);
        }
        Ok(Move::new(picked))
    }
}

/// Breaker strategy applying [`es_breaker_move`] `b` times per turn, with the
/// game's own bias as `(a:b)`.
#[derive(Clone, Debug, Default)]
pub struct PotentialBreaker;

impl Strategy for PotentialBreaker {
    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move> {
        let mut view = AliveSetView::new(state)?;
        let bias = state.bias();
        let want = bias.breaker - state.claimed_this_turn();
        let mut picked = Vec::new();
        for _ in 0..want.min(state.unclaimed_count() as u32) {
            let e = es_breaker_move(&view, bias.maker, bias.breaker, &|_| true)?;
            view.claim(e, Player::Breaker);
            picked.push(e);
        }
        Ok(Move::new(picked))
    }
}

/// `T(H) = sum over H of 2^{-|H|}`.
pub fn potential_t(family: &WinningFamily) -> Result<Log2Real> {
    match family {
        WinningFamily::Explicit(f) => Ok(size_histogram(f)
            .into_iter()
            .map(|(size, count)| Log2Real::from_u64(count) * Log2Real::pow2(-(size as f64)))
            .sum()),
        WinningFamily::Implicit(f) => f.potential().ok_or_else(|| {
            Error::Unsupported(format!("family {} has no analytic potential", f.name()))
        }),
    }
}

fn size_histogram(f: &ExplicitFamily) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    for s in f.sets() {
        *hist.entry(s.len()).or_insert(0) += 1;
    }
    hist
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EsCertificate {
    pub a: u32,
    pub b: u32,
    /// `sum over F of (1+b)^{-|F|/a}`.
    pub sum: Log2Real,
    /// `1/(1+b)`.
    pub threshold: Log2Real,
    /// Strict `sum < threshold`: Breaker wins when true.
    pub holds: bool,
    /// Whether `holds` was decided in exact arithmetic.
    pub exact: bool,
}

/// Weight `(1+b)^{-size/a}` of one set.
pub fn es_weight(size: usize, a: u32, b: u32) -> Log2Real {
    Log2Real::pow2(-(size as f64) * ((1 + b) as f64).log2() / a as f64)
}

/// Evaluates the biased Erdős–Selfridge criterion. Explicit families with
/// `a` in `{1, 2}` are decided exactly; other cases compare in log domain.
pub fn es_criterion(family: &WinningFamily, a: u32, b: u32) -> Result<EsCertificate> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidBias {
            maker: a,
            breaker: b,
        });
    }
    let threshold = Log2Real::ONE / Log2Real::from_u64((1 + b) as u64);
    let (sum, exact_verdict) = match family {
        WinningFamily::Explicit(f) => {
            let hist = size_histogram(f);
            let sum = hist
                .iter()
                .map(|(&size, &count)| Log2Real::from_u64(count) * es_weight(size, a, b))
                .sum();
            (sum, exact::es_decide(&hist, a, b))
        }
        WinningFamily::Implicit(f) => {
            let (count, size) = f.count().zip(f.uniform_set_size()).ok_or_else(|| {
                Error::Unsupported(format!(
                    "family {} needs an analytic count and uniform set size",
                    f.name()
                ))
            })?;
            (count * es_weight(size, a, b), None)
        }
    };
    Ok(EsCertificate {
        a,
        b,
        sum,
        threshold,
        holds: exact_verdict.unwrap_or(sum < threshold),
        exact: exact_verdict.is_some(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AwwcVerdict {
    pub p: u32,
    /// `T(F) / |X|`.
    pub lhs: Log2Real,
    /// `p + 4p * T(F_2^p)^{1/p}` with the supplied upper bound.
    pub rhs: Log2Real,
    pub holds: bool,
    /// `log2(lhs) - log2(rhs)`; positive when the certificate holds.
    pub margin_log2: f64,
}

/// Advanced Weak Win check `T(F)/|X| > p + 4p * (T(F_2^p))^{1/p}`.
///
/// `t_f2p_upper` may be any upper bound on the cluster potential; the right
/// side only grows with it, so a `true` verdict certifies a Maker win.
pub fn awwc_check(
    board_size: Log2Real,
    t_f: Log2Real,
    p: u32,
    t_f2p_upper: Log2Real,
) -> Result<AwwcVerdict> {
    if p < 2 {
        return Err(Error::Domain(format!(
            "cluster order p must be at least 2, got {p}"
        )));
    }
    if board_size.is_zero() {
        return Err(Error::Domain("board size must be positive".into()));
    }
    let lhs = t_f / board_size;
    let rhs = Log2Real::from_u64(p as u64)
        + Log2Real::from_u64(4 * p as u64) * t_f2p_upper.powf(1.0 / p as f64);
    Ok(AwwcVerdict {
        p,
        lhs,
        rhs,
        holds: lhs > rhs,
        margin_log2: lhs.log2() - rhs.log2(),
    })
}
