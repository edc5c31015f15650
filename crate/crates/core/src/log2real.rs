//! Nonnegative reals carried as base-2 logarithms.
//!
//! Certificate arithmetic routinely touches quantities such as `2^{4k^2}` that
//! overflow every fixed-width float long before the interesting regime. A
//! [`Log2Real`] stores `log2(x)` and an explicit zero, so products are sums and
//! sums use the stable form `max + log2(1 + 2^(min - max))`.
//!
//! Each primitive operation has relative error of order `1e-15` in the
//! represented value for the magnitudes used here (`|log2| < 1e6`); chains of a
//! few thousand operations stay well inside `1e-9`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Log2Real(Option<f64>);

impl Log2Real {
    pub const ZERO: Log2Real = Log2Real(None);
    pub const ONE: Log2Real = Log2Real(Some(0.0));

    /// Builds `2^log2`. `log2 = -inf` maps to zero.
    pub fn from_log2(log2: f64) -> Self {
        assert!(!log2.is_nan(), "log2 value is NaN");
        assert!(log2 != f64::INFINITY, "log2 value is +inf");
        if log2 == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Log2Real(Some(log2))
        }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(
            x >= 0.0 && x.is_finite(),
            "Log2Real needs a finite nonnegative value, got {x}"
        );
        if x == 0.0 {
            Self::ZERO
        } else {
            Log2Real(Some(x.log2()))
        }
    }

    pub fn from_u64(x: u64) -> Self {
        if x == 0 {
            Self::ZERO
        } else if x < (1 << 53) {
            Log2Real(Some((x as f64).log2()))
        } else {
            Self::from_biguint(&BigUint::from(x))
        }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        if x.is_zero() {
            return Self::ZERO;
        }
        let bits = x.bits();
        if bits <= 53 {
            let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
            return Log2Real(Some((v as f64).log2()));
        }
        // Keep the top 64 bits; the dropped tail changes log2 by < 2^-63.
        let shift = bits.saturating_sub(64);
        let top: BigUint = x >> shift;
        let top = top.iter_u64_digits().next().unwrap_or(0);
        Log2Real(Some((top as f64).log2() + shift as f64))
    }

    pub fn from_ratio(x: &BigRational) -> Self {
        assert!(!x.is_negative(), "Log2Real needs a nonnegative rational");
        if x.is_zero() {
            return Self::ZERO;
        }
        let num = Self::from_biguint(x.numer().magnitude());
        let den = Self::from_biguint(x.denom().magnitude());
        num / den
    }

    /// `2^exponent` for an integer or real exponent.
    pub fn pow2(exponent: f64) -> Self {
        Self::from_log2(exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    /// Base-2 logarithm; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        self.0.unwrap_or(f64::NEG_INFINITY)
    }

    /// Decimal value; `inf` when the magnitude overflows `f64`.
    pub fn to_f64(&self) -> f64 {
        match self.0 {
            None => 0.0,
            Some(l) => l.exp2(),
        }
    }

    /// `self^e` for real `e > 0`.
    pub fn powf(self, e: f64) -> Self {
        assert!(e > 0.0, "powf exponent must be positive");
        match self.0 {
            None => Self::ZERO,
            Some(l) => Log2Real(Some(l * e)),
        }
    }

    pub fn powi(self, e: u32) -> Self {
        if e == 0 {
            Self::ONE
        } else {
            self.powf(e as f64)
        }
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        match (self.0, other.0) {
            (_, None) => Some(self),
            (None, Some(_)) => None,
            (Some(a), Some(b)) => {
                if a < b {
                    None
                } else if a == b {
                    Some(Self::ZERO)
                } else {
                    // a + log2(1 - 2^(b-a))
                    let d = (b - a).exp2();
                    Some(Log2Real(Some(a + (-d).ln_1p() / std::f64::consts::LN_2)))
                }
            }
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Binomial coefficient `C(n, k)`; zero when `k > n`.
    pub fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return Self::ZERO;
        }
        let k = k.min(n - k);
        if k == 0 {
            return Self::ONE;
        }
        Log2Real(Some(
            log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k),
        ))
    }

    pub fn factorial(n: u64) -> Self {
        Log2Real(Some(log2_factorial(n)))
    }

    /// Falling factorial `n (n-1) ... (n-k+1)`.
    pub fn falling_factorial(n: u64, k: u64) -> Self {
        if k > n {
            return Self::ZERO;
        }
        Log2Real(Some(log2_factorial(n) - log2_factorial(n - k)))
    }
}

const FACTORIAL_TABLE: usize = 8192;

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_TABLE);
        t.push(0.0);
        // Kahan summation keeps the running error at the ulp level.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for i in 1..FACTORIAL_TABLE {
            let y = (i as f64).log2() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            t.push(sum);
        }
        t
    })
}

/// `log2(n!)`, tabulated below 8192 and via Stirling's series above.
pub fn log2_factorial(n: u64) -> f64 {
    if (n as usize) < FACTORIAL_TABLE {
        return factorial_table()[n as usize];
    }
    let x = n as f64;
    let ln = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x * x);
    ln / std::f64::consts::LN_2
}

impl Mul for Log2Real {
    type Output = Log2Real;
    // Exponents add.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => Log2Real(Some(a + b)),
            _ => Self::ZERO,
        }
    }
}

impl Div for Log2Real {
    type Output = Log2Real;
    // Exponents subtract.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        match (self.0, rhs.0) {
            (_, None) => panic!("Log2Real division by zero"),
            (None, _) => Self::ZERO,
            (Some(a), Some(b)) => Log2Real(Some(a - b)),
        }
    }
}

impl Add for Log2Real {
    type Output = Log2Real;
    fn add(self, rhs: Self) -> Self {
        match (self.0, rhs.0) {
            (None, _) => rhs,
            (_, None) => self,
            (Some(a), Some(b)) => {
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                let d = (lo - hi).exp2();
                Log2Real(Some(hi + d.ln_1p() / std::f64::consts::LN_2))
            }
        }
    }
}

impl Sum for Log2Real {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for Log2Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.0, other.0) {
            (None, None) => Some(Ordering::Equal),
            (None, Some(_)) => Some(Ordering::Less),
            (Some(_), None) => Some(Ordering::Greater),
            (Some(a), Some(b)) => a.partial_cmp(&b),
        }
    }
}

impl fmt::Display for Log2Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(l) if l.abs() < 50.0 => write!(f, "{} (2^{:.6})", l.exp2(), l),
            Some(l) => write!(f, "2^{l:.6}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Log2RealRecord {
    log2: Option<f64>,
    decimal: Option<f64>,
}

impl Serialize for Log2Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let decimal = match self.0 {
            None => Some(0.0),
            Some(l) => Some(l.exp2()).filter(|v| v.is_finite() && *v > 0.0),
        };
        Log2RealRecord {
            log2: self.0,
            decimal,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Log2Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = Log2RealRecord::deserialize(deserializer)?;
        Ok(match r.log2 {
            None => Log2Real::ZERO,
            Some(l) => Log2Real(Some(l)),
        })
    }
}
