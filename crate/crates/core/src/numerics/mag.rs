use core::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const MAG_BITS: usize = 64;
const UP: RoundingMode = RoundingMode::Up;

/// Nonnegative upper bound with a 64-bit mantissa; every operation rounds up.
///
/// Backed by a multiprecision float so error radii never underflow, even
/// next to quantities like `exp(-2 pi n Y)` at large heights.
#[derive(Clone, Debug)]
pub struct Mag(BigFloat);

impl Mag {
    pub fn zero() -> Self {
        Mag(BigFloat::from_word(0, MAG_BITS))
    }

    /// `x` must be finite and nonnegative.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        Mag(BigFloat::from_f64(x.abs(), MAG_BITS))
    }

    pub fn from_u64(x: u64) -> Self {
        Mag(BigFloat::from_u64(x, MAG_BITS))
    }

    /// `|x|`, rounded up.
    pub fn abs_of(x: &BigFloat) -> Self {
        let mut a = x.abs();
        a.set_precision(MAG_BITS, UP).ok();
        Mag(a)
    }

    /// `|x| * 2^(1 - bits)`: bound on the rounding error of a result `x`
    /// rounded to `bits` bits.
    pub fn ulp(x: &BigFloat, bits: usize) -> Self {
        Self::abs_of(x).mul_2exp(1 - bits as i64)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Mag::from_u64(1).mul_2exp(e)
    }

    pub fn add(&self, other: &Mag) -> Mag {
        Mag(self.0.add(&other.0, MAG_BITS, UP))
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        Mag(self.0.mul(&other.0, MAG_BITS, UP))
    }

    pub fn mul_u64(&self, k: u64) -> Mag {
        self.mul(&Mag::from_u64(k))
    }

    /// Upper bound for `self / other`; `other` is treated as exact.
    pub fn div(&self, other: &Mag) -> Mag {
        Mag(self.0.div(&other.0, MAG_BITS, UP))
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.0.is_zero() || !self.is_finite() {
            return self.clone();
        }
        let mut out = self.0.clone();
        let cur = out.exponent().unwrap_or(0) as i64;
        let target = cur + e;
        if target > astro_float::EXPONENT_MAX as i64 {
            return Mag(astro_float::INF_POS);
        }
        if target < astro_float::EXPONENT_MIN as i64 {
            // Smallest positive value still bounds anything smaller.
            return Mag(BigFloat::min_positive(MAG_BITS));
        }
        out.set_exponent(target as astro_float::Exponent);
        Mag(out)
    }

    /// Upper bound on `e^x` for a real `x`.
    pub fn exp_of(x: f64) -> Mag {
        // f64 evaluation of x is taken as exact; the tiny additive slack
        // covers the rounding of the caller's f64 arithmetic.
        let mut cc = Consts::new().expect("constants cache");
        let slack = 1e-9 + x.abs() * 1e-14;
        Mag(BigFloat::from_f64(x + slack, MAG_BITS).exp(MAG_BITS, UP, &mut cc))
    }

    /// Upper bound on `e^self - 1`.
    pub fn expm1(&self) -> Mag {
        if self.0.is_zero() {
            return Mag::zero();
        }
        // e^r - 1 <= r e^r
        let mut cc = Consts::new().expect("constants cache");
        let er = self.0.exp(MAG_BITS, UP, &mut cc);
        Mag(self.0.mul(&er, MAG_BITS, UP))
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.cmp_mag(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn cmp_mag(&self, other: &Mag) -> Ordering {
        match self.0.cmp(&other.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn le_f64(&self, x: f64) -> bool {
        self.cmp_mag(&Mag::from_f64(x)) != Ordering::Greater
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_inf() && !self.0.is_nan()
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.0
    }

    /// Nearest f64 nudged upward; saturates to `f64::MAX`/`INFINITY`.
    pub fn to_f64(&self) -> f64 {
        let v = bigfloat_to_f64(&self.0);
        if v == 0.0 && !self.0.is_zero() {
            f64::MIN_POSITIVE
        } else {
            v * (1.0 + 4.0 * f64::EPSILON)
        }
    }
}

/// Truncating conversion of a multiprecision float to `f64`.
pub fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = words.last().copied().unwrap_or(0) as f64;
    let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
    // value = 0.m * 2^e with the most significant word last
    let hi = top + next / 18446744073709551616.0;
    let e = e as i64 - 64;
    let v = if e > 2000 {
        f64::INFINITY
    } else if e < -2200 {
        0.0
    } else {
        libm::ldexp(hi, e as i32)
    };
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}
