//! Binary floating point with an arbitrary-length mantissa.
//!
//! Values are `mant · 2^exp`. Every operation takes a target precision in bits
//! and rounds the mantissa to nearest, so a chain of `k` operations carries a
//! relative error below `k · 2^-prec`.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

fn shift_round(mag: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return mag.clone();
    }
    let q: BigInt = mag >> s;
    let half_bit = (mag >> (s - 1)) & BigInt::one();
    if half_bit.is_zero() {
        q
    } else {
        q + 1
    }
}

impl BigFloat {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    /// Exact conversion of an integer.
    pub fn from_int(v: BigInt) -> Self {
        Self { mant: v, exp: 0 }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "BigFloat::from_f64 needs a finite value");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, exp) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self {
            mant: BigInt::from(m) * sign,
            exp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    /// Position of the leading bit: `|self|` lies in `[2^(top-1), 2^top)`.
    pub fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    /// Rounds the mantissa to at most `prec` bits.
    pub fn round(mut self, prec: u64) -> Self {
        let bits = self.mant.bits();
        if bits > prec {
            let s = bits - prec;
            let neg = self.is_negative();
            let mag = shift_round(&self.mant.abs(), s);
            self.mant = if neg { -mag } else { mag };
            self.exp += s as i64;
        }
        self
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Self, prec: u64) -> Self {
        Self {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .round(prec)
    }

    pub fn mul_int(&self, v: &BigInt, prec: u64) -> Self {
        Self {
            mant: &self.mant * v,
            exp: self.exp,
        }
        .round(prec)
    }

    pub fn mul_i64(&self, v: i64, prec: u64) -> Self {
        self.mul_int(&BigInt::from(v), prec)
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn div_u64(&self, d: u64, prec: u64) -> Self {
        assert!(d != 0, "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let extra = prec + 64;
        let num: BigInt = &self.mant << extra;
        Self {
            mant: num / BigInt::from(d),
            exp: self.exp - extra as i64,
        }
        .round(prec)
    }

    pub fn add(&self, other: &Self, prec: u64) -> Self {
        if self.is_zero() {
            return other.clone().round(prec);
        }
        if other.is_zero() {
            return self.clone().round(prec);
        }
        // A summand entirely below the rounding position of the other
        // cannot change the rounded result by more than one unit.
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        if big.top() - small.top() > prec as i64 + 2 {
            return big.clone().round(prec);
        }
        let e = big.exp.min(small.exp);
        let a: BigInt = &big.mant << (big.exp - e) as u64;
        let b: BigInt = &small.mant << (small.exp - e) as u64;
        Self { mant: a + b, exp: e }.round(prec)
    }

    pub fn sub(&self, other: &Self, prec: u64) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        if self.is_zero() || other.is_zero() {
            return self.mant.abs().cmp(&other.mant.abs());
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a: BigInt = self.mant.abs() << (self.exp - e) as u64;
                let b: BigInt = other.mant.abs() << (other.exp - e) as u64;
                a.cmp(&b)
            }
            o => o,
        }
    }

    /// Nearest double; saturates to ±inf outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            let neg = self.is_negative();
            let mag = shift_round(&self.mant.abs(), s);
            (if neg { -mag } else { mag }, self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        ldexp(mf, e)
    }

    /// log₂|self|, accurate to double precision.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let s = bits.saturating_sub(60);
        let top = (self.mant.abs() >> s).to_f64().unwrap_or(f64::NAN);
        top.log2() + (self.exp + s as i64) as f64
    }
}

/// `x · 2^e` without intermediate overflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}
