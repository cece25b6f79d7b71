use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use astro_float::{BigFloat, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::Zero;

use super::mag::{bigfloat_to_f64, Mag};
use super::PrecisionContext;
use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Complex disk: a multiprecision center and a radius bounding the total
/// error (truncation plus rounding) of the value it stands for.
#[derive(Clone)]
pub struct BallComplex {
    re: BigFloat,
    im: BigFloat,
    rad: Mag,
}

fn is_finite(x: &BigFloat) -> bool {
    !x.is_inf() && !x.is_nan()
}

/// Exact conversion of an integer, then rounding to `bits`; returns the
/// rounding error bound alongside.
fn bigint_to_float(n: &BigInt, bits: usize) -> (BigFloat, Mag) {
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return (BigFloat::from_word(0, bits), Mag::zero());
    }
    let s = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
    let words: alloc::vec::Vec<astro_float::Word> = digits.iter().map(|&d| d as astro_float::Word).collect();
    let e = (64 * words.len()) as astro_float::Exponent;
    let mut x = BigFloat::from_words(&words, s, e);
    let exact_bits = n.bits() as usize;
    if exact_bits > bits {
        x.set_precision(bits, RM).ok();
        let err = Mag::ulp(&x, bits);
        (x, err)
    } else {
        (x, Mag::zero())
    }
}

impl BallComplex {
    pub fn new(re: BigFloat, im: BigFloat, rad: Mag) -> Self {
        Self { re, im, rad }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_i64(0, ctx)
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_i64(1, ctx)
    }

    pub fn from_i64(n: i64, ctx: &PrecisionContext) -> Self {
        Self::from_int(&BigInt::from(n), ctx)
    }

    pub fn from_int(n: &BigInt, ctx: &PrecisionContext) -> Self {
        let (re, rad) = bigint_to_float(n, ctx.bits());
        Self { re, im: BigFloat::from_word(0, ctx.bits()), rad }
    }

    pub fn from_ratio(q: &BigRational, ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits();
        let (num, e1) = bigint_to_float(q.numer(), bits + 64);
        let (den, e2) = bigint_to_float(q.denom(), bits + 64);
        debug_assert!(e1.is_zero() || bits + 64 < q.numer().bits() as usize);
        let re = num.div(&den, bits, RM);
        // relative errors of numerator/denominator plus the final division
        let rel = e1.div(&Mag::abs_of(&num)).add(&e2.div(&Mag::abs_of(&den)));
        let rad = if q.numer().is_zero() {
            Mag::zero()
        } else {
            Mag::abs_of(&re).mul(&rel.mul_u64(2)).add(&Mag::ulp(&re, bits))
        };
        Self { re, im: BigFloat::from_word(0, bits), rad }
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64, ctx: &PrecisionContext) -> Self {
        Self::from_real(BigFloat::from_f64(x, ctx.bits().max(64)), ctx)
    }

    pub fn from_real(x: BigFloat, ctx: &PrecisionContext) -> Self {
        Self { re: x, im: BigFloat::from_word(0, ctx.bits()), rad: Mag::zero() }
    }

    /// The imaginary unit raised to `k`.
    pub fn i_pow(k: u32, ctx: &PrecisionContext) -> Self {
        let one = Self::one(ctx);
        one.mul_i_pow(k)
    }

    /// pi as a ball.
    pub fn pi(ctx: &PrecisionContext) -> Self {
        let p = ctx.pi();
        let rad = Mag::ulp(&p, ctx.bits());
        Self { re: p, im: BigFloat::from_word(0, ctx.bits()), rad }
    }

    /// Square root of a nonnegative rational.
    pub fn sqrt_ratio(q: &BigRational, ctx: &PrecisionContext) -> Result<Self> {
        if q < &BigRational::zero() {
            return Err(Error::Domain(alloc::format!("square root of negative {q}")));
        }
        let bits = ctx.bits();
        let x = Self::from_ratio(q, &ctx.with_precision(bits + 64)?);
        let s = x.re.sqrt(bits, RM);
        // |sqrt(x +- r) - sqrt(x)| <= r / sqrt(x); x itself is accurate to ~bits+64
        let prop = if x.rad.is_zero() || s.is_zero() { x.rad.clone() } else { x.rad.div(&Mag::abs_of(&s)).mul_u64(2) };
        let rad = Mag::ulp(&s, bits).mul_u64(2).add(&prop);
        Ok(Self { re: s, im: BigFloat::from_word(0, bits), rad })
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn radius(&self) -> &Mag {
        &self.rad
    }

    pub fn re_f64(&self) -> f64 {
        bigfloat_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        bigfloat_to_f64(&self.im)
    }

    pub fn radius_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        is_finite(&self.re) && is_finite(&self.im) && self.rad.is_finite()
    }

    fn checked(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::PrecisionExhausted(what))
        }
    }

    /// Widen the radius by `extra`.
    pub fn inflate(&self, extra: &Mag) -> Self {
        Self { re: self.re.clone(), im: self.im.clone(), rad: self.rad.add(extra) }
    }

    pub fn neg(&self) -> Self {
        Self { re: self.re.neg(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.neg(), rad: self.rad.clone() }
    }

    /// Multiply by `i^k`; exact.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        let (re, im) = match k % 4 {
            0 => (self.re.clone(), self.im.clone()),
            1 => (self.im.neg(), self.re.clone()),
            2 => (self.re.neg(), self.im.neg()),
            _ => (self.im.clone(), self.re.neg()),
        };
        Self { re, im, rad: self.rad.clone() }
    }

    /// Multiply by `2^e`; exact.
    pub fn mul_2exp(&self, e: i64) -> Self {
        fn shift(x: &BigFloat, e: i64) -> BigFloat {
            if x.is_zero() {
                return x.clone();
            }
            let mut y = x.clone();
            let cur = y.exponent().unwrap_or(0) as i64;
            y.set_exponent((cur + e) as astro_float::Exponent);
            y
        }
        Self { re: shift(&self.re, e), im: shift(&self.im, e), rad: self.rad.mul_2exp(e) }
    }

    /// Upper bound on `|z|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.center_abs_upper().add(&self.rad)
    }

    /// Upper bound on `|center|` (via `|re| + |im|` when complex).
    fn center_abs_upper(&self) -> Mag {
        if self.im.is_zero() {
            Mag::abs_of(&self.re)
        } else if self.re.is_zero() {
            Mag::abs_of(&self.im)
        } else {
            let bits = self.re.precision().unwrap_or(64).max(64);
            let n = self.re.mul(&self.re, bits, RoundingMode::Up).add(
                &self.im.mul(&self.im, bits, RoundingMode::Up),
                bits,
                RoundingMode::Up,
            );
            let s = n.sqrt(bits, RoundingMode::Up);
            Mag::abs_of(&s).add(&Mag::ulp(&s, 64))
        }
    }

    /// `|z|` as a real ball; `||z + d| - |z|| <= |d|` keeps the radius.
    pub fn abs(&self, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        if self.im.is_zero() {
            return Ok(Self { re: self.re.abs(), im: BigFloat::from_word(0, bits), rad: self.rad.clone() });
        }
        let w = bits + 64;
        let n = self.re.mul(&self.re, w, RM).add(&self.im.mul(&self.im, w, RM), w, RM);
        let s = n.sqrt(bits, RM);
        let e = Mag::ulp(&s, bits).mul_u64(4);
        Self { re: s, im: BigFloat::from_word(0, bits), rad: self.rad.add(&e) }.checked("abs")
    }

    /// Lower bound on `|z|` over the ball (zero when the ball contains 0).
    pub fn abs_lower(&self) -> f64 {
        let c = libm::hypot(self.re_f64(), self.im_f64()) * (1.0 - 4.0 * f64::EPSILON);
        (c - self.rad.to_f64()).max(0.0)
    }

    /// Center modulus as `f64`.
    pub fn abs_f64(&self) -> f64 {
        libm::hypot(self.re_f64(), self.im_f64())
    }

    pub fn add(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        let re = self.re.add(&other.re, bits, RM);
        let im = self.im.add(&other.im, bits, RM);
        let rad = self.rad.add(&other.rad).add(&Mag::ulp(&re, bits)).add(&Mag::ulp(&im, bits));
        Self { re, im, rad }.checked("add")
    }

    pub fn sub(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        self.add(&other.neg(), ctx)
    }

    pub fn mul(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        let (re, im, rounding) = if self.im.is_zero() && other.im.is_zero() {
            let re = self.re.mul(&other.re, bits, RM);
            let err = Mag::ulp(&re, bits);
            (re, BigFloat::from_word(0, bits), err)
        } else if other.im.is_zero() {
            let re = self.re.mul(&other.re, bits, RM);
            let im = self.im.mul(&other.re, bits, RM);
            let err = Mag::ulp(&re, bits).add(&Mag::ulp(&im, bits));
            (re, im, err)
        } else if self.im.is_zero() {
            let re = self.re.mul(&other.re, bits, RM);
            let im = self.re.mul(&other.im, bits, RM);
            let err = Mag::ulp(&re, bits).add(&Mag::ulp(&im, bits));
            (re, im, err)
        } else {
            let t1 = self.re.mul(&other.re, bits, RM);
            let t2 = self.im.mul(&other.im, bits, RM);
            let t3 = self.re.mul(&other.im, bits, RM);
            let t4 = self.im.mul(&other.re, bits, RM);
            let re = t1.sub(&t2, bits, RM);
            let im = t3.add(&t4, bits, RM);
            let err = Mag::ulp(&t1, bits)
                .add(&Mag::ulp(&t2, bits))
                .add(&Mag::ulp(&t3, bits))
                .add(&Mag::ulp(&t4, bits))
                .add(&Mag::ulp(&re, bits))
                .add(&Mag::ulp(&im, bits));
            (re, im, err)
        };
        // |ab - (a+da)(b+db)| <= |a| rb + |b| ra + ra rb
        let mut rad = rounding;
        if !other.rad.is_zero() {
            rad = rad.add(&self.center_abs_upper().mul(&other.rad));
        }
        if !self.rad.is_zero() {
            rad = rad.add(&other.center_abs_upper().mul(&self.rad));
            if !other.rad.is_zero() {
                rad = rad.add(&self.rad.mul(&other.rad));
            }
        }
        Self { re, im, rad }.checked("mul")
    }

    pub fn sqr(&self, ctx: &PrecisionContext) -> Result<Self> {
        self.mul(self, ctx)
    }

    pub fn pow_u(&self, mut n: u32, ctx: &PrecisionContext) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(ctx);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, ctx)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr(ctx)?;
            }
        }
        Ok(acc)
    }

    pub fn mul_int(&self, k: &BigInt, ctx: &PrecisionContext) -> Result<Self> {
        self.mul(&Self::from_int(k, ctx), ctx)
    }

    pub fn mul_ratio(&self, q: &BigRational, ctx: &PrecisionContext) -> Result<Self> {
        self.mul(&Self::from_ratio(q, ctx), ctx)
    }

    /// `1 / self`; fails when the ball contains zero.
    pub fn recip(&self, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        // |z| >= max(|re|, |im|), rounded down
        let lower = {
            let a = self.re.abs();
            let b = self.im.abs();
            let mut m = if a.cmp(&b).unwrap_or(0) >= 0 { a } else { b };
            m.set_precision(64, RoundingMode::Down).ok();
            m
        };
        let r = self.rad.as_bigfloat();
        if !(lower.cmp(r) == Some(1)) {
            return Err(Error::DivisionByZero);
        }
        let (re, im, rounding) = if self.im.is_zero() {
            let one = BigFloat::from_word(1, bits);
            let re = one.div(&self.re, bits, RM);
            let e = Mag::ulp(&re, bits);
            (re, BigFloat::from_word(0, bits), e)
        } else {
            let n = self.re.mul(&self.re, bits + 64, RM).add(&self.im.mul(&self.im, bits + 64, RM), bits + 64, RM);
            let re = self.re.div(&n, bits, RM);
            let im = self.im.div(&n, bits, RM).neg();
            let e = Mag::ulp(&re, bits).add(&Mag::ulp(&im, bits)).mul_u64(4);
            (re, im, e)
        };
        // |1/(z+d) - 1/z| <= r / (|z| (|z| - r))
        let prop = if r.is_zero() {
            Mag::zero()
        } else {
            let gap = lower.sub(r, 64, RoundingMode::Down);
            let den = lower.mul(&gap, 64, RoundingMode::Down);
            self.rad.div(&Mag::abs_of(&den))
        };
        Self { re, im, rad: rounding.add(&prop) }.checked("recip")
    }

    pub fn div(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        self.mul(&other.recip(ctx)?, ctx)
    }

    /// Complex exponential.
    pub fn exp(&self, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        let ex = ctx.with_consts(|cc| self.re.exp(bits, RM, cc));
        if !is_finite(&ex) {
            return Err(Error::PrecisionExhausted("exp overflow"));
        }
        let (re, im, rounding) = if self.im.is_zero() {
            let e = Mag::ulp(&ex, bits).mul_u64(2);
            (ex.clone(), BigFloat::from_word(0, bits), e)
        } else {
            let (c, s) = ctx.with_consts(|cc| (self.im.cos(bits, RM, cc), self.im.sin(bits, RM, cc)));
            let re = ex.mul(&c, bits, RM);
            let im = ex.mul(&s, bits, RM);
            // e^x, cos, sin each within 2 ulp, products rounded once
            let e = Mag::ulp(&ex, bits).mul_u64(10);
            (re, im, e)
        };
        let rad = if self.rad.is_zero() {
            rounding
        } else {
            // |e^(z+d) - e^z| <= |e^z| (e^|d| - 1)
            let bound = Mag::abs_of(&ex).mul(&Mag::from_f64(1.0 + 1e-12));
            rounding.add(&bound.mul(&self.rad.expm1()))
        };
        Self { re, im, rad }.checked("exp")
    }

    /// `e^{2 pi i x}` for a real `x`, reduced exactly beforehand by the caller if needed.
    pub fn exp_2pi_i(x: &BallComplex, ctx: &PrecisionContext) -> Result<Self> {
        let two_pi = Self::pi(ctx).mul_2exp(1);
        two_pi.mul(x, ctx)?.mul_i_pow(1).exp(ctx)
    }

    /// True if `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Self) -> bool {
        let d = self.center_distance_upper(other);
        d.add(&other.rad).cmp_mag(&self.rad) != Ordering::Greater
    }

    /// True if the two disks intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        let d = self.center_distance_lower(other);
        d <= self.rad.add(&other.rad).to_f64()
    }

    fn center_distance_upper(&self, other: &Self) -> Mag {
        let bits = self.re.precision().unwrap_or(64).max(other.re.precision().unwrap_or(64)) + 64;
        let dr = self.re.sub(&other.re, bits, RoundingMode::ToEven);
        let di = self.im.sub(&other.im, bits, RoundingMode::ToEven);
        Mag::abs_of(&dr).add(&Mag::abs_of(&di)).add(&Mag::ulp(&dr, bits)).add(&Mag::ulp(&di, bits))
    }

    fn center_distance_lower(&self, other: &Self) -> f64 {
        let bits = self.re.precision().unwrap_or(64).max(other.re.precision().unwrap_or(64)) + 64;
        let dr = bigfloat_to_f64(&self.re.sub(&other.re, bits, RoundingMode::ToEven));
        let di = bigfloat_to_f64(&self.im.sub(&other.im, bits, RoundingMode::ToEven));
        libm::hypot(dr, di) * (1.0 - 4.0 * f64::EPSILON)
    }

    /// Decimal rendering of the real part with `digits` significant digits.
    pub fn re_decimal(&self, digits: usize, ctx: &PrecisionContext) -> (String, Mag) {
        decimal(&self.re, digits, ctx)
    }

    pub fn im_decimal(&self, digits: usize, ctx: &PrecisionContext) -> (String, Mag) {
        decimal(&self.im, digits, ctx)
    }
}

/// Render `x` in scientific notation with `digits` significant digits,
/// together with a bound on the rendering error.
pub fn decimal(x: &BigFloat, digits: usize, ctx: &PrecisionContext) -> (String, Mag) {
    if x.is_zero() {
        return (String::from("0"), Mag::zero());
    }
    let full =
        ctx.with_consts(|cc| x.format(Radix::Dec, RoundingMode::ToEven, cc)).unwrap_or_else(|_| String::from("nan"));
    let (mant, exp) = match full.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (full.as_str(), 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let digit_str: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let kept: String = digit_str.chars().take(digits.max(1)).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let mut chars = kept.chars();
    if let Some(first) = chars.next() {
        out.push(first);
    }
    let rest: String = chars.collect();
    if !rest.is_empty() {
        out.push('.');
        out.push_str(&rest);
    }
    out.push_str(&alloc::format!("e{exp}"));
    // truncation error: one unit in the last kept place (times 10 for slack
    // on the formatter's own last digit)
    let last_place = exp - (kept.len() as i64 - 1);
    let err = pow10_upper(last_place + 1);
    (out, err)
}

fn pow10_upper(e: i64) -> Mag {
    // 10^e <= 2^(ceil(e * log2 10))
    let l2 = (e as f64 * core::f64::consts::LOG2_10).ceil() as i64 + 1;
    Mag::pow2(l2)
}

impl fmt::Debug for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} + {:e}i) +/- {:e}", self.re_f64(), self.im_f64(), self.radius_f64())
    }
}
