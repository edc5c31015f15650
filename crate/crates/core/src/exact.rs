//! Exact rational evaluation of the certificate quantities.
//!
//! These routines run in big-integer arithmetic and serve two purposes:
//! deciding boundary cases that floating point cannot (strict inequalities
//! that hold with equality), and cross-validating the log-domain routines in
//! [`crate::bounds`] and [`crate::potential`] wherever `n` is an integer
//! multiple of `k` and the values stay below a few thousand bits.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::ExplicitFamily;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn int(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn small(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// `x^e` for an integer exponent of either sign.
pub fn powi(x: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = if e >= 0 { x.clone() } else { x.recip() };
    let mut e = e.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// `T(H) = sum 2^{-|H|}` exactly.
pub fn potential_t(family: &ExplicitFamily) -> BigRational {
    family
        .sets()
        .iter()
        .map(|s| pow2(-(s.len() as i64)))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

/// Exact strict test `sum_s count_s * q^{-s/a} < 1/q` with `q = 1 + b`.
/// Handles `a = 1` (rational terms) and `a = 2` (terms in `Q + Q/sqrt(q)`);
/// returns `None` for larger `a`.
pub fn es_decide(size_counts: &BTreeMap<usize, u64>, a: u32, b: u32) -> Option<bool> {
    let q = small(1 + b as u64);
    let threshold = q.recip();
    match a {
        1 => {
            let sum = size_counts
                .iter()
                .map(|(&s, &c)| small(c) * powi(&q, -(s as i64)))
                .fold(BigRational::zero(), |acc, x| acc + x);
            Some(sum < threshold)
        }
        2 => {
            // sum = rational + irrational / sqrt(q)
            let (mut rational, mut irrational) = (BigRational::zero(), BigRational::zero());
            for (&s, &c) in size_counts {
                let term = small(c) * powi(&q, -((s / 2) as i64));
                if s % 2 == 0 {
                    rational += term;
                } else {
                    irrational += term;
                }
            }
            let slack = &threshold - &rational;
            if irrational.is_zero() {
                return Some(slack.is_positive());
            }
            Some(slack.is_positive() && &irrational * &irrational / &q < &slack * &slack)
        }
        _ => None,
    }
}

fn block(n: u64, k: u64) -> Result<BigRational> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::Domain(format!(
            "exact evaluation needs k | n, got n = {n}, k = {k}"
        )));
    }
    Ok(small(n / k))
}

fn choose2(m: u64) -> i64 {
    (m * m.saturating_sub(1) / 2) as i64
}

/// `(n/k)^k * 2^{-C(k,2)}`.
pub fn t_f(n: u64, k: u64) -> Result<BigRational> {
    Ok(powi(&block(n, k)?, k as i64) * pow2(-choose2(k)))
}

/// `C(k,2) * (n/k)^2`.
pub fn reduced_board_size(n: u64, k: u64) -> Result<BigRational> {
    Ok(small(choose2(k) as u64) * powi(&block(n, k)?, 2))
}

/// `C(k,3) * (n/k)^{4k-9} * 2^{-4C(k,2)+9}`.
pub fn f_sunflower_bound(n: u64, k: u64) -> Result<BigRational> {
    Ok(int(binomial(k, 3)) * powi(&block(n, k)?, 4 * k as i64 - 9) * pow2(-4 * choose2(k) + 9))
}

/// `C(jk, m-3) * (k/n)^{m-3} * 2^{C(m,2)-3}`.
pub fn g_j(j: u64, m: u64, n: u64, k: u64) -> Result<BigRational> {
    Ok(int(binomial(j * k, m - 3)) * powi(&block(n, k)?, -(m as i64 - 3)) * pow2(choose2(m) - 3))
}

/// `C(k,3) (n/k)^{4k} prod_j C(jk, m_j-3) (k/n)^{m_j}`.
pub fn cluster_count_bound(m: [u64; 3], n: u64, k: u64) -> Result<BigRational> {
    let blk = block(n, k)?;
    let mut acc = int(binomial(k, 3)) * powi(&blk, 4 * k as i64);
    for (j, &mj) in m.iter().enumerate() {
        acc = acc * int(binomial((j as u64 + 1) * k, mj - 3)) * powi(&blk, -(mj as i64));
    }
    Ok(acc)
}

/// `2^{C(k,2)} / k!`.
pub fn tournament_count_lower(k: u64) -> BigRational {
    pow2(choose2(k)) / int(factorial(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(factorial(6), BigUint::from(720u32));
        assert_eq!(t_f(192, 3).unwrap(), small(32768));
        assert_eq!(reduced_board_size(192, 3).unwrap(), small(12288));
        assert_eq!(f_sunflower_bound(192, 3).unwrap(), small(32768));
        assert_eq!(g_j(2, 3, 192, 3).unwrap(), BigRational::one());
        assert_eq!(
            tournament_count_lower(3),
            BigRational::new(BigInt::from(4), BigInt::from(3))
        );
        assert!(t_f(10, 3).is_err());
    }

    #[test]
    fn es_decision_boundaries() {
        let hist = |pairs: &[(usize, u64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
        assert_eq!(es_decide(&hist(&[(3, 4)]), 1, 1), Some(false));
        assert_eq!(es_decide(&hist(&[(3, 3)]), 1, 1), Some(true));
        // (2:1): 2^{-1} + 2^{-3/2} * 0 ... one set of size 2 sits on the boundary.
        assert_eq!(es_decide(&hist(&[(2, 1)]), 2, 1), Some(false));
        // 2^{-3/2} + 2^{-2} = 0.6036 > 0.5.
        assert_eq!(es_decide(&hist(&[(3, 1), (4, 1)]), 2, 1), Some(false));
        // 2^{-3/2} + 2^{-3} = 0.4786 < 0.5.
        assert_eq!(es_decide(&hist(&[(3, 1), (6, 1)]), 2, 1), Some(true));
        assert_eq!(es_decide(&hist(&[(3, 1)]), 3, 1), None);
    }
}
