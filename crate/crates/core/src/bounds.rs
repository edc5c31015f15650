//! Closed-form certificate quantities for the reduced transversal-clique game
//! and the known bounds on the tournament-type thresholds.
//!
//! Everything is evaluated in log domain with all logarithms base 2. The main
//! chain is: choose `k` from `n` via `n >= k 2^{(k+9)/2}`; evaluate
//! `T(F) = (n/k)^k 2^{-C(k,2)}`, the board size `|X| = C(k,2)(n/k)^2`, the
//! sunflower bound `f(n,k)` and the cluster bound on `T(F_2^4)`; and finally
//! test `T(F) > 16|X|(T(F_2^4)^{1/4} + 1/4)`, which is the Advanced Weak Win
//! inequality at `p = 4`.
//!
//! Most entry points take `log2_n` rather than `n` so that the coupling
//! `n = k 2^{(k+9)/2}`, irrational for even `k`, can be evaluated exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::log2real::Log2Real;
use crate::potential::{awwc_check, AwwcVerdict};

/// Tolerance used when testing `g_j(m) <= 1` in log domain.
pub const G_TOLERANCE_LOG2: f64 = 1e-12;

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// `log2 n` on the coupling `n = k 2^{(k+9)/2}`.
pub fn coupled_log2_n(k: u32) -> f64 {
    (k as f64).log2() + (k as f64 + 9.0) / 2.0
}

/// The coupled `n` rounded down, when it fits in 64 bits.
pub fn coupled_integer_n(k: u32) -> Option<u64> {
    let log2_n = coupled_log2_n(k);
    (log2_n < 63.0).then(|| log2_n.exp2().floor() as u64)
}

/// Parameters of one certificate evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GameParameters {
    pub log2_n: f64,
    /// The integer `n` when the caller supplied one.
    pub n: Option<u64>,
    pub k: u32,
    pub p: u32,
}

impl GameParameters {
    pub fn coupled(k: u32) -> Self {
        GameParameters {
            log2_n: coupled_log2_n(k),
            n: coupled_integer_n(k),
            k,
            p: 4,
        }
    }

    pub fn integer(n: u64, k: u32) -> Result<Self> {
        if k < 2 || (n as u128) < k as u128 {
            return Err(Error::Domain(format!(
                "need n >= k >= 2, got n = {n}, k = {k}"
            )));
        }
        Ok(GameParameters {
            log2_n: (n as f64).log2(),
            n: Some(n),
            k,
            p: 4,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KOfN {
    pub n: u64,
    /// Largest `k` with `k 2^{(k+9)/2} <= n`.
    pub k: u32,
    /// `2 log n - 2 log log n - 12`.
    pub guaranteed_lower: f64,
    pub meets_lower: bool,
}

/// Largest `k` with `k 2^{(k+9)/2} <= n`, decided exactly via
/// `k^2 2^{k+9} <= n^2`.
pub fn k_of_n(n: u64) -> Result<KOfN> {
    if n < 32 {
        return Err(Error::Domain(format!("k_of_n needs n >= 32, got {n}")));
    }
    let n2 = (n as u128) * (n as u128);
    let fits = |k: u32| -> bool {
        let shift = k + 9;
        shift < 128
            && ((k as u128) * (k as u128))
                .checked_shl(shift)
                .is_some_and(|lhs| {
                    // checked_shl only guards the shift amount; check for lost bits.
                    (lhs >> shift) == (k as u128) * (k as u128) && lhs <= n2
                })
    };
    let mut k = 1;
    while fits(k + 1) {
        k += 1;
    }
    let log2_n = (n as f64).log2();
    let guaranteed_lower = 2.0 * log2_n - 2.0 * log2_n.log2() - 12.0;
    Ok(KOfN {
        n,
        k,
        guaranteed_lower,
        meets_lower: k as f64 >= guaranteed_lower,
    })
}

/// `T(F) = (n/k)^k 2^{-C(k,2)}`, also the expected number of transversal
/// `k`-cliques owned by a random Maker.
pub fn t_f(log2_n: f64, k: u32) -> Log2Real {
    assert!(k >= 1, "t_f needs k >= 1");
    let k64 = k as f64;
    Log2Real::from_log2(k64 * (log2_n - k64.log2()) - choose2(k as u64) as f64)
}

/// `|X| = C(k,2) (n/k)^2`.
pub fn reduced_board_size(log2_n: f64, k: u32) -> Result<Log2Real> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "reduced board needs k >= 2, got {k}"
        )));
    }
    let k64 = k as f64;
    Ok(Log2Real::from_u64(choose2(k as u64)) * Log2Real::from_log2(2.0 * (log2_n - k64.log2())))
}

/// Number of edges in a sunflower cluster: `4 C(k,2) - 9`.
pub fn sunflower_edge_count(k: u32) -> u64 {
    4 * choose2(k as u64) - 9
}

/// `f(n,k) = C(k,3) (n/k)^{4k-9} 2^{-4C(k,2)+9}`.
pub fn f_sunflower_bound(log2_n: f64, k: u32) -> Result<Log2Real> {
    if k < 3 {
        return Err(Error::Domain(format!(
            "sunflower bound needs k >= 3, got {k}"
        )));
    }
    let k64 = k as f64;
    Ok(Log2Real::binomial(k as u64, 3)
        * Log2Real::from_log2(
            (4.0 * k64 - 9.0) * (log2_n - k64.log2()) - 4.0 * choose2(k as u64) as f64 + 9.0,
        ))
}

/// `g_j(m) = C(jk, m-3) (k/n)^{m-3} 2^{C(m,2)-3}`.
pub fn g_j(j: u32, m: u32, log2_n: f64, k: u32) -> Result<Log2Real> {
    if !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("j must be 1, 2 or 3, got {j}")));
    }
    if m < 3 || m > k {
        return Err(Error::Domain(format!(
            "need 3 <= m <= k, got m = {m}, k = {k}"
        )));
    }
    let steps = (m - 3) as f64;
    Ok(Log2Real::binomial((j * k) as u64, (m - 3) as u64)
        * Log2Real::from_log2(
            steps * ((k as f64).log2() - log2_n) + choose2(m as u64) as f64 - 3.0,
        ))
}

/// Overlap profile `(m1, m2, m3)` of a 4-cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterSignature {
    pub m: [u32; 3],
}

impl ClusterSignature {
    pub fn new(m1: u32, m2: u32, m3: u32, k: u32) -> Result<Self> {
        let m = [m1, m2, m3];
        if m.iter().any(|&x| x < 3 || x > k) {
            return Err(Error::Domain(format!(
                "cluster signature {m:?} must satisfy 3 <= m_i <= k = {k}"
            )));
        }
        Ok(ClusterSignature { m })
    }
}

/// Upper bound on the number of clusters with signature `sig`:
/// `C(k,3) (n/k)^{4k} prod_j C(jk, m_j - 3) (k/n)^{m_j}`.
pub fn cluster_count_bound(sig: ClusterSignature, log2_n: f64, k: u32) -> Result<Log2Real> {
    ClusterSignature::new(sig.m[0], sig.m[1], sig.m[2], k)?;
    let lk = (k as f64).log2();
    let mut acc =
        Log2Real::binomial(k as u64, 3) * Log2Real::from_log2(4.0 * k as f64 * (log2_n - lk));
    for (j, &mj) in sig.m.iter().enumerate() {
        acc = acc
            * Log2Real::binomial((j as u64 + 1) * k as u64, (mj - 3) as u64)
            * Log2Real::from_log2(mj as f64 * (lk - log2_n));
    }
    Ok(acc)
}

/// Smallest possible edge count of a cluster with signature `sig`.
pub fn cluster_min_size(sig: ClusterSignature, k: u32) -> u64 {
    4 * choose2(k as u64) - sig.m.iter().map(|&m| choose2(m as u64)).sum::<u64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterBoundMode {
    /// `k^3 f(n,k)`; sound only where every `g_j(m) <= 1`.
    Lemma,
    /// `f(n,k) prod_j sum_m g_j(m)`; sound for every `k >= 3`.
    TripleSum,
}

/// Upper bound on `T(F_2^4)`.
pub fn t_f24_upper(log2_n: f64, k: u32, mode: ClusterBoundMode) -> Result<Log2Real> {
    let f = f_sunflower_bound(log2_n, k)?;
    Ok(match mode {
        ClusterBoundMode::Lemma => Log2Real::from_u64(k as u64).powi(3) * f,
        ClusterBoundMode::TripleSum => {
            let mut acc = f;
            for j in 1..=3 {
                let inner: Log2Real = (3..=k)
                    .map(|m| g_j(j, m, log2_n, k).expect("valid m"))
                    .sum();
                acc = acc * inner;
            }
            acc
        }
    })
}

/// Largest `g_j(m)` over `j in {1,2,3}` and `3 <= m <= k`.
pub fn max_g(log2_n: f64, k: u32) -> Result<(Log2Real, u32, u32)> {
    if k < 3 {
        return Err(Error::Domain(format!("g_j needs k >= 3, got {k}")));
    }
    let mut best = (Log2Real::ZERO, 0, 0);
    for j in 1..=3 {
        for m in 3..=k {
            let g = g_j(j, m, log2_n, k)?;
            if g > best.0 {
                best = (g, j, m);
            }
        }
    }
    Ok(best)
}

/// `16 |X| (T(F_2^4)^{1/4} + 1/4) / T(F)`; below 1 it certifies Maker's win
/// in the reduced game.
pub fn corollary_ratio(log2_n: f64, k: u32, mode: ClusterBoundMode) -> Result<Log2Real> {
    Ok(certificate_point(log2_n, k, mode)?.ratio)
}

/// Every quantity of the `p = 4` certificate at one `(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificatePoint {
    pub k: u32,
    pub log2_n: f64,
    pub mode: ClusterBoundMode,
    pub t_f: Log2Real,
    pub board_size: Log2Real,
    pub f_sunflower: Log2Real,
    pub t_f24_upper: Log2Real,
    pub ratio: Log2Real,
    /// Whether the cluster bound used is a proven upper bound at this `k`.
    pub cluster_bound_sound: bool,
    pub awwc: AwwcVerdict,
}

impl CertificatePoint {
    /// The ratio is below 1 and the cluster bound is sound here.
    pub fn certified(&self) -> bool {
        self.cluster_bound_sound && self.ratio < Log2Real::ONE
    }
}

pub fn certificate_point(log2_n: f64, k: u32, mode: ClusterBoundMode) -> Result<CertificatePoint> {
    if k < 3 {
        return Err(Error::Domain(format!("certificate needs k >= 3, got {k}")));
    }
    let tf = t_f(log2_n, k);
    let board_size = reduced_board_size(log2_n, k)?;
    let t24 = t_f24_upper(log2_n, k, mode)?;
    let ratio = Log2Real::from_u64(16) * board_size * (t24.powf(0.25) + Log2Real::pow2(-2.0)) / tf;
    let cluster_bound_sound = match mode {
        ClusterBoundMode::TripleSum => true,
        ClusterBoundMode::Lemma => max_g(log2_n, k)?.0.log2() <= G_TOLERANCE_LOG2,
    };
    Ok(CertificatePoint {
        k,
        log2_n,
        mode,
        t_f: tf,
        board_size,
        f_sunflower: f_sunflower_bound(log2_n, k)?,
        t_f24_upper: t24,
        ratio,
        cluster_bound_sound,
        awwc: awwc_check(board_size, tf, 4, t24)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GScanRow {
    pub k: u32,
    pub max_g_log2: f64,
    pub argmax_j: u32,
    pub argmax_m: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GScan {
    pub k_max: u32,
    pub rows: Vec<GScanRow>,
    /// Smallest `K0` with `max g_j(m) <= 1` for every `K0 <= k <= k_max`.
    pub k0: Option<u32>,
}

/// Scans `3 <= k <= k_max` on the coupling for the largest `g_j(m)`.
pub fn scan_g(k_max: u32) -> GScan {
    let rows: Vec<GScanRow> = (3..=k_max)
        .into_par_iter()
        .map(|k| {
            let (g, j, m) = max_g(coupled_log2_n(k), k).expect("k >= 3");
            GScanRow {
                k,
                max_g_log2: g.log2(),
                argmax_j: j,
                argmax_m: m,
            }
        })
        .collect();
    let mut k0 = None;
    for row in rows.iter().rev() {
        if row.max_g_log2 <= G_TOLERANCE_LOG2 {
            k0 = Some(row.k);
        } else {
            break;
        }
    }
    GScan { k_max, rows, k0 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateScan {
    pub k_max: u32,
    pub mode: ClusterBoundMode,
    pub points: Vec<CertificatePoint>,
    /// Smallest `k` whose ratio is below 1.
    pub k_star: Option<u32>,
    /// Ratio strictly decreasing on `[k_star, k_max]`.
    pub decreasing_after_k_star: bool,
    /// `ratio < 1` implies the `p = 4` weak-win check at every point.
    pub awwc_consistent: bool,
}

/// Evaluates the certificate along the coupling for `3 <= k <= k_max`.
pub fn scan_certificate(k_max: u32, mode: ClusterBoundMode) -> CertificateScan {
    let points: Vec<CertificatePoint> = (3..=k_max)
        .into_par_iter()
        .map(|k| certificate_point(coupled_log2_n(k), k, mode).expect("k >= 3"))
        .collect();
    let k_star = points.iter().find(|p| p.ratio < Log2Real::ONE).map(|p| p.k);
    let decreasing_after_k_star = match k_star {
        None => false,
        Some(ks) => points
            .windows(2)
            .filter(|w| w[0].k >= ks)
            .all(|w| w[1].ratio < w[0].ratio),
    };
    let awwc_consistent = points
        .iter()
        .all(|p| p.ratio >= Log2Real::ONE || p.awwc.holds);
    CertificateScan {
        k_max,
        mode,
        points,
        k_star,
        decreasing_after_k_star,
        awwc_consistent,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Value,
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub quantity: &'static str,
    pub kind: BoundKind,
    pub value: f64,
    /// The integer the bound translates to, when one is meaningful.
    pub integer: Option<i64>,
    /// The formula drops an `o(1)` term; only the interior value is reported.
    pub asymptotic: bool,
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: u64,
    pub log2_n: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundsReport {
    pub fn get(&self, quantity: &str, kind: BoundKind) -> Option<&BoundEntry> {
        self.entries
            .iter()
            .find(|e| e.quantity == quantity && e.kind == kind)
    }
}

/// The known bounds on `k_cl`, `k_t`, `k_o` and `k_u` at `n`.
pub fn known_bounds_report(n: u64) -> Result<BoundsReport> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "bounds report needs n >= 4, got {n}"
        )));
    }
    let l = (n as f64).log2();
    let ll = l.log2();
    let k_cl = 2.0 * l - 2.0 * ll + 2.0 * std::f64::consts::LOG2_E - 3.0;
    let k_t_lower = 2.0 * l - 2.0 * ll - 12.0;
    let k_o_upper = 4.0 * l + 2.0;
    let entry = |quantity, kind, value: f64, integer, asymptotic, source| BoundEntry {
        quantity,
        kind,
        value,
        integer,
        asymptotic,
        source,
    };
    let mut entries = vec![
        entry(
            "k_cl",
            BoundKind::Value,
            k_cl,
            Some(k_cl.floor() as i64),
            true,
            "clique game threshold, floor(2 log n - 2 log log n + 2 log e - 3 + o(1))",
        ),
        entry(
            "k_t",
            BoundKind::Upper,
            k_cl,
            Some(k_cl.floor() as i64),
            true,
            "k_t <= k_cl: a Breaker clique-game win blocks every tournament",
        ),
        entry(
            "k_t",
            BoundKind::Lower,
            k_t_lower,
            Some(k_t_lower.ceil() as i64),
            false,
            "tournament game: Maker wins for k >= 2 log n - 2 log log n - 12",
        ),
        entry(
            "k_o",
            BoundKind::Lower,
            k_t_lower,
            Some(k_t_lower.ceil() as i64),
            false,
            "k_o >= k_t",
        ),
        entry(
            "k_o",
            BoundKind::Upper,
            k_o_upper,
            Some(k_o_upper.ceil() as i64),
            false,
            "orientation game: OBreaker wins for k >= 4 log n + 2 (n large)",
        ),
        entry(
            "k_u",
            BoundKind::Lower,
            0.5 * l,
            None,
            true,
            "universal tournament game: k_u >= (1/2 - o(1)) log n",
        ),
        entry(
            "k_u",
            BoundKind::Upper,
            l,
            None,
            true,
            "universal tournament game: k_u <= (1 + o(1)) log n",
        ),
    ];
    if n >= 32 {
        let kn = k_of_n(n)?;
        entries.push(entry(
            "k_t",
            BoundKind::Lower,
            kn.k as f64,
            Some(kn.k as i64),
            false,
            "largest k with n >= k 2^{(k+9)/2}; Maker wins the reduced game there",
        ));
    }
    Ok(BoundsReport {
        n,
        log2_n: l,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TournamentCountBound {
    pub k: u32,
    /// `c(k) = 2^{C(k,2)} / k!`.
    pub c: Log2Real,
    /// `2^{C(k,2) - k log k}`, strictly below `c(k)` for `k >= 2`.
    pub weak: Log2Real,
}

/// Lower bound on the number of unlabelled `k`-tournaments.
pub fn tournament_count_lower(k: u32) -> TournamentCountBound {
    assert!(k >= 1, "tournament count needs k >= 1");
    let c2 = choose2(k as u64) as f64;
    TournamentCountBound {
        k,
        c: Log2Real::pow2(c2) / Log2Real::factorial(k as u64),
        weak: Log2Real::pow2(c2 - k as f64 * (k as f64).log2()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn k_of_n_examples() {
        assert_eq!(k_of_n(1 << 20).unwrap().k, 22);
        assert_eq!(k_of_n(32).unwrap().k, 1);
        assert_eq!(k_of_n(33).unwrap().k, 1);
        assert!(k_of_n(31).is_err());
        // k = 3: 3 * 2^6 = 192 exactly.
        assert_eq!(k_of_n(192).unwrap().k, 3);
        assert_eq!(k_of_n(191).unwrap().k, 2);
        for e in 10..=40 {
            let r = k_of_n(1u64 << e).unwrap();
            assert!(r.meets_lower, "n = 2^{e}: {r:?}");
        }
    }

    #[test]
    fn t_f_on_the_coupling() {
        assert!(close(t_f(192f64.log2(), 3).log2(), 15.0, 1e-12));
        assert!(close(t_f(10f64.log2(), 1).log2(), 10f64.log2(), 1e-15));
        for k in 1..=64 {
            assert!(close(
                t_f(coupled_log2_n(k), k).log2(),
                5.0 * k as f64,
                1e-9
            ));
        }
    }

    #[test]
    fn board_size_examples() {
        assert!(close(
            reduced_board_size(192f64.log2(), 3).unwrap().to_f64(),
            12288.0,
            1e-8
        ));
        assert!(close(
            reduced_board_size(7f64.log2(), 7).unwrap().to_f64(),
            21.0,
            1e-12
        ));
        for k in 3..60 {
            let log2_n = coupled_log2_n(k);
            let ratio = reduced_board_size(log2_n, k).unwrap() / t_f(log2_n, k);
            let bound = (2.0 * (k as f64).log2() + k as f64 + 9.0) - 5.0 * k as f64;
            assert!(ratio.log2() <= bound + 1e-9);
        }
    }

    #[test]
    fn sunflower_bound_examples() {
        assert!(close(
            f_sunflower_bound(192f64.log2(), 3).unwrap().log2(),
            15.0,
            1e-12
        ));
        assert_eq!(sunflower_edge_count(8), 103);
        assert!(f_sunflower_bound(10.0, 2).is_err());
    }

    #[test]
    fn g_anchor_and_example() {
        for k in [3, 10, 57] {
            for j in 1..=3 {
                assert_eq!(g_j(j, 3, coupled_log2_n(k), k).unwrap(), Log2Real::ONE);
                assert_eq!(g_j(j, 3, 17.25, k).unwrap(), Log2Real::ONE);
            }
        }
        let g = g_j(1, 4, coupled_log2_n(20), 20).unwrap().to_f64();
        assert!(close(g, 20.0 * (-11.5f64).exp2(), 1e-12));
        assert!(g_j(4, 3, 10.0, 5).is_err());
        assert!(g_j(1, 6, 10.0, 5).is_err());
        assert!(g_j(1, 2, 10.0, 5).is_err());
    }

    #[test]
    fn cluster_bounds() {
        let k = 9;
        let log2_n = coupled_log2_n(k);
        let sig = ClusterSignature::new(3, 3, 3, k).unwrap();
        let sunflowers = Log2Real::binomial(k as u64, 3)
            * Log2Real::from_log2((4.0 * k as f64 - 9.0) * (log2_n - (k as f64).log2()));
        assert!(close(
            cluster_count_bound(sig, log2_n, k).unwrap().log2(),
            sunflowers.log2(),
            1e-9
        ));
        assert_eq!(cluster_min_size(sig, k), sunflower_edge_count(k));
        let sig = ClusterSignature::new(4, 5, 9, k).unwrap();
        assert_eq!(cluster_min_size(sig, k), 4 * 36 - 6 - 10 - 36);
        assert!(ClusterSignature::new(2, 3, 3, k).is_err());
        assert!(ClusterSignature::new(3, 10, 3, k).is_err());
    }

    #[test]
    fn cluster_potential_bound_agrees_with_per_signature_sum() {
        // T(F_2^4(m)) <= count(m) * 2^{-min size(m)} = f * prod g_j(m_j).
        let k = 7;
        let log2_n = coupled_log2_n(k);
        let f = f_sunflower_bound(log2_n, k).unwrap();
        let mut total = Log2Real::ZERO;
        for m1 in 3..=k {
            for m2 in 3..=k {
                for m3 in 3..=k {
                    let sig = ClusterSignature::new(m1, m2, m3, k).unwrap();
                    let direct = cluster_count_bound(sig, log2_n, k).unwrap()
                        * Log2Real::pow2(-(cluster_min_size(sig, k) as f64));
                    let factored = f
                        * g_j(1, m1, log2_n, k).unwrap()
                        * g_j(2, m2, log2_n, k).unwrap()
                        * g_j(3, m3, log2_n, k).unwrap();
                    assert!(close(direct.log2(), factored.log2(), 1e-9));
                    total = total + direct;
                }
            }
        }
        let triple = t_f24_upper(log2_n, k, ClusterBoundMode::TripleSum).unwrap();
        assert!(close(total.log2(), triple.log2(), 1e-9));
    }

    #[test]
    fn small_k_examples() {
        let log2_n = 192f64.log2();
        let lemma = t_f24_upper(log2_n, 3, ClusterBoundMode::Lemma).unwrap();
        assert!(close(lemma.log2(), 27f64.log2() + 15.0, 1e-9));
        assert!(corollary_ratio(log2_n, 3, ClusterBoundMode::Lemma).unwrap() > Log2Real::ONE);
        assert!(corollary_ratio(log2_n, 3, ClusterBoundMode::TripleSum).unwrap() > Log2Real::ONE);
    }

    #[test]
    fn log_domain_matches_exact_arithmetic() {
        let cases = [
            (192u64, 3u32),
            (1000, 5),
            (4096, 8),
            (1 << 20, 16),
            (3 << 30, 24),
        ];
        for (n, k) in cases {
            let log2_n = (n as f64).log2();
            let (nn, kk) = (n, k as u64);
            let check = |approx: Log2Real, exact: num_rational::BigRational| {
                let e = Log2Real::from_ratio(&exact).log2();
                assert!(
                    (approx.log2() - e).abs() <= 1e-9 * (1.0 + e.abs()),
                    "n={n} k={k}: {} vs {e}",
                    approx.log2()
                );
            };
            check(t_f(log2_n, k), exact::t_f(nn, kk).unwrap());
            check(
                reduced_board_size(log2_n, k).unwrap(),
                exact::reduced_board_size(nn, kk).unwrap(),
            );
            check(
                f_sunflower_bound(log2_n, k).unwrap(),
                exact::f_sunflower_bound(nn, kk).unwrap(),
            );
            for j in 1..=3u32 {
                for m in 3..=k {
                    check(
                        g_j(j, m, log2_n, k).unwrap(),
                        exact::g_j(j as u64, m as u64, nn, kk).unwrap(),
                    );
                }
            }
            let sig = ClusterSignature::new(3, k.min(5), k, k).unwrap();
            check(
                cluster_count_bound(sig, log2_n, k).unwrap(),
                exact::cluster_count_bound(
                    [sig.m[0] as u64, sig.m[1] as u64, sig.m[2] as u64],
                    nn,
                    kk,
                )
                .unwrap(),
            );
        }
        for k in 1..=30 {
            let e = exact::tournament_count_lower(k as u64);
            assert!(close(
                tournament_count_lower(k).c.log2(),
                Log2Real::from_ratio(&e).log2(),
                1e-9
            ));
        }
    }

    #[test]
    fn bounds_report_at_two_to_the_twenty() {
        let r = known_bounds_report(1 << 20).unwrap();
        let kt = r.get("k_t", BoundKind::Lower).unwrap();
        assert!(close(kt.value, 19.356, 5e-4));
        let ko = r.get("k_o", BoundKind::Upper).unwrap();
        assert_eq!(ko.integer, Some(82));
        let kcl = r.get("k_cl", BoundKind::Value).unwrap();
        assert!(close(kcl.value, 31.2415, 5e-4) && kcl.asymptotic);
        assert_eq!(kcl.integer, Some(31));
        assert!(known_bounds_report(3).is_err());
    }

    #[test]
    fn lower_bounds_never_exceed_upper_bounds() {
        for e in 8..=40 {
            let r = known_bounds_report(1u64 << e).unwrap();
            for q in ["k_t", "k_o", "k_u"] {
                let upper = r.get(q, BoundKind::Upper).unwrap().value;
                for lower in r
                    .entries
                    .iter()
                    .filter(|x| x.quantity == q && x.kind == BoundKind::Lower)
                {
                    assert!(lower.value <= upper, "n = 2^{e}: {q} {lower:?} > {upper}");
                }
            }
        }
    }

    #[test]
    fn tournament_count_examples() {
        assert!(close(
            tournament_count_lower(3).c.to_f64(),
            8.0 / 6.0,
            1e-12
        ));
        assert_eq!(tournament_count_lower(1).c, Log2Real::ONE);
        for k in 2..40 {
            let t = tournament_count_lower(k);
            assert!(t.weak < t.c);
        }
    }
}
