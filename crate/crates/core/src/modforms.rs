//! Newform q-expansions and their rigorous evaluation on the upper half-plane.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::divisor_count;
use crate::error::{Error, Result};
use crate::numerics::{BallComplex, Mag, PrecisionContext};

/// Height below which [`Newform::eval`] refuses to sum the q-expansion.
pub const DEFAULT_Y_MIN: f64 = 0.05;
/// Fewest coefficients a newform file may carry.
pub const MIN_COEFFICIENTS: usize = 10;

/// A Fourier coefficient: an exact integer, or a rounded real embedding.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Integer(BigInt),
    /// `value` carries every printed digit; the true coefficient lies within
    /// half a unit in the last place.
    Decimal {
        value: BigRational,
        digits: u32,
    },
}

impl Coefficient {
    /// Parses `[-]int[.frac][e[+-]exp]`.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let bad = || Error::InvalidNewform(format!("malformed decimal coefficient {s:?}"));
        let t = s.trim();
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int_part.is_empty() && frac.is_empty()
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits: String = [int_part, frac].concat();
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let n = if neg { -n } else { n };
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
        };
        let digits = (-scale).max(0) as u32;
        Ok(Coefficient::Decimal { value, digits })
    }

    /// The represented value (the center for decimals).
    pub fn value(&self) -> BigRational {
        match self {
            Coefficient::Integer(n) => BigRational::from_integer(n.clone()),
            Coefficient::Decimal { value, .. } => value.clone(),
        }
    }

    /// Uncertainty of a decimal entry, `0.5 * 10^-digits`.
    pub fn uncertainty(&self) -> BigRational {
        match self {
            Coefficient::Integer(_) => BigRational::zero(),
            Coefficient::Decimal { digits, .. } => {
                BigRational::new(BigInt::one(), BigInt::from(2) * num_traits::pow(BigInt::from(10), *digits as usize))
            }
        }
    }

    pub fn ball(&self, ctx: &PrecisionContext) -> BallComplex {
        match self {
            Coefficient::Integer(n) => BallComplex::from_int(n, ctx),
            Coefficient::Decimal { value, digits } => {
                let r = Mag::from_f64(0.5).div(&Mag::from_f64(libm::pow(10.0, *digits as f64)));
                BallComplex::from_ratio(value, ctx).inflate(&r)
            }
        }
    }

    fn is_one(&self) -> bool {
        match self {
            Coefficient::Integer(n) => n.is_one(),
            Coefficient::Decimal { value, .. } => value.is_one(),
        }
    }
}

/// How `|a_n|` is bounded beyond the stored coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MajorantMode {
    /// `scale * d(n) * n^((w-1)/2)`; `scale = 1` for a normalised eigenform.
    Deligne { scale: f64 },
    /// `c * n^((w-1)/2)`.
    Explicit(f64),
}

impl MajorantMode {
    pub const DELIGNE: MajorantMode = MajorantMode::Deligne { scale: 1.0 };
}

/// A cusp form given by its q-expansion `sum a_n q^n`, `n = 1..M`.
#[derive(Clone, Debug)]
pub struct Newform {
    level: u64,
    weight: u32,
    label: String,
    fricke: Option<i8>,
    coefficients: Vec<Coefficient>,
    majorant: MajorantMode,
}

impl Newform {
    /// Validated normalised newform with the Deligne majorant.
    pub fn new(
        level: u64,
        weight: u32,
        label: impl Into<String>,
        fricke: Option<i8>,
        coefficients: Vec<Coefficient>,
    ) -> Result<Self> {
        Self::with_majorant(level, weight, label, fricke, coefficients, MajorantMode::DELIGNE)
    }

    pub fn with_majorant(
        level: u64,
        weight: u32,
        label: impl Into<String>,
        fricke: Option<i8>,
        coefficients: Vec<Coefficient>,
        majorant: MajorantMode,
    ) -> Result<Self> {
        if level < 5 {
            return Err(Error::InvalidNewform(format!("level {level} < 5")));
        }
        if weight < 4 || weight % 2 != 0 {
            return Err(Error::InvalidNewform(format!("weight {weight} is not an even integer >= 4")));
        }
        if let Some(e) = fricke {
            if e != 1 && e != -1 {
                return Err(Error::InvalidNewform(format!("Fricke eigenvalue {e} is not +-1")));
            }
        }
        if coefficients.len() < MIN_COEFFICIENTS {
            return Err(Error::InvalidNewform(format!(
                "{} coefficients given, at least {MIN_COEFFICIENTS} required",
                coefficients.len()
            )));
        }
        if !coefficients[0].is_one() {
            return Err(Error::InvalidNewform("a_1 != 1 (form is not normalised)".into()));
        }
        match majorant {
            MajorantMode::Deligne { scale } | MajorantMode::Explicit(scale) if !(scale > 0.0 && scale.is_finite()) => {
                return Err(Error::InvalidNewform(format!("majorant constant {scale} must be positive")));
            }
            _ => {}
        }
        let f = Self { level, weight, label: label.into(), fricke, coefficients, majorant };
        f.check_majorant()?;
        Ok(f)
    }

    /// `lambda f + mu g`, coefficientwise; the result keeps a Deligne-type
    /// majorant scaled by `|lambda| + |mu|` and is no longer normalised.
    pub fn combine(&self, lambda: &BigRational, other: &Newform, mu: &BigRational) -> Result<Newform> {
        if self.weight != other.weight {
            return Err(Error::InvalidNewform("weights differ".into()));
        }
        let (MajorantMode::Deligne { scale: s1 }, MajorantMode::Deligne { scale: s2 }) =
            (self.majorant, other.majorant)
        else {
            return Err(Error::InvalidNewform("combinations need Deligne majorants".into()));
        };
        let m = self.coefficients.len().min(other.coefficients.len());
        let coefficients = (0..m)
            .map(|i| {
                let (a, b) = (&self.coefficients[i], &other.coefficients[i]);
                let v = lambda * a.value() + mu * b.value();
                match (a, b) {
                    (Coefficient::Integer(_), Coefficient::Integer(_)) if v.is_integer() => {
                        Coefficient::Integer(v.to_integer())
                    }
                    _ => {
                        let unc = lambda.abs() * a.uncertainty() + mu.abs() * b.uncertainty();
                        // round the combined uncertainty up to a power of ten
                        let mut digits = 60u32;
                        while digits > 0
                            && BigRational::new(
                                BigInt::one(),
                                BigInt::from(2) * num_traits::pow(BigInt::from(10), digits as usize),
                            ) < unc
                        {
                            digits -= 1;
                        }
                        Coefficient::Decimal { value: v, digits }
                    }
                }
            })
            .collect();
        let scale = to_f64_up(&lambda.abs()) * s1 + to_f64_up(&mu.abs()) * s2;
        let scale = scale * (1.0 + 1e-15);
        Ok(Newform {
            level: self.level.max(other.level),
            weight: self.weight,
            label: format!("{lambda}*{} + {mu}*{}", self.label, other.label),
            fricke: if self.fricke == other.fricke { self.fricke } else { None },
            coefficients,
            majorant: MajorantMode::Deligne { scale },
        })
    }

    fn check_majorant(&self) -> Result<()> {
        let w1 = (self.weight - 1) as usize;
        let (c, use_divisors) = match self.majorant {
            MajorantMode::Deligne { scale } => (scale, true),
            MajorantMode::Explicit(c) => (c, false),
        };
        let c = BigRational::from_float(c).ok_or_else(|| Error::InvalidNewform("majorant constant".into()))?;
        for (i, a) in self.coefficients.iter().enumerate() {
            let n = i as u64 + 1;
            // |a| <= c d(n) n^((w-1)/2), squared to stay in the rationals
            let lo = (a.value().abs() - a.uncertainty()).max(BigRational::zero());
            let d = if use_divisors { divisor_count(n) } else { 1 };
            let bound = &c * &c * BigRational::from_integer(BigInt::from(d * d) * num_traits::pow(BigInt::from(n), w1));
            if &lo * &lo > bound {
                return Err(Error::InvalidNewform(format!("a_{n} = {} exceeds its majorant", a.value())));
            }
        }
        Ok(())
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// `r = (w - 2)/2`.
    pub fn r(&self) -> u32 {
        (self.weight - 2) / 2
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fricke(&self) -> Option<i8> {
        self.fricke
    }

    pub fn majorant_mode(&self) -> MajorantMode {
        self.majorant
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coefficients
    }

    pub fn num_coefficients(&self) -> usize {
        self.coefficients.len()
    }

    /// `a_n` for `1 <= n <= M`.
    pub fn coefficient(&self, n: usize) -> Option<&Coefficient> {
        n.checked_sub(1).and_then(|i| self.coefficients.get(i))
    }

    /// Bound on `|a_n|` from the majorant mode.
    pub fn coefficient_majorant(&self, n: u64) -> f64 {
        let p = libm::pow(n as f64, (self.weight as f64 - 1.0) / 2.0);
        match self.majorant {
            MajorantMode::Deligne { scale } => scale * divisor_count(n) as f64 * p,
            MajorantMode::Explicit(c) => c * p,
        }
    }

    /// `(C, alpha)` with `|a_n| <= C n^alpha` for every `n`, using `d(n) <= 2 sqrt(n)`.
    pub(crate) fn envelope(&self) -> (f64, f64) {
        let h = (self.weight as f64 - 1.0) / 2.0;
        match self.majorant {
            MajorantMode::Deligne { scale } => (2.0 * scale, h + 0.5),
            MajorantMode::Explicit(c) => (c, h),
        }
    }

    /// Truncation of `sum_n |a_n| e^{-2 pi n y} w(n)` where the weights
    /// satisfy `w(n) <= e^{-2 pi (n - 1) y}` after normalisation.
    ///
    /// Returns the least `M'` whose envelope term `t = t(M'+1)` is below
    /// `eps/4` with ratio `rho = t(M'+2)/t(M'+1) <= 1/2`, and the tail bound
    /// `2t`. Below height `ln 2 / (2 pi)` the ratio never drops to 1/2; there
    /// the condition becomes `t / (2(1 - rho)) < eps/4` with tail `t/(1 - rho)`.
    /// The envelope is `C n^alpha e^{-2 pi (n - 1) y}`, so `eps` is relative to
    /// the size of the first term.
    pub fn truncation(&self, y: f64, eps: f64) -> Result<Truncation> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("height {y} must be positive")));
        }
        let (c, alpha) = self.envelope();
        let log_t = |n: f64| libm::log(c) + alpha * libm::log(n) - 2.0 * PI * (n - 1.0) * y;
        let target = libm::log(eps / 4.0);
        // rho(n) = t(n+1)/t(n) = (1 + 1/n)^alpha e^{-2 pi y} decreases in n,
        // so every later ratio is at most rho(n)
        let log_rho = |n: f64| alpha * libm::log1p(1.0 / n) - 2.0 * PI * y;
        // log of max(1, 1/(2(1 - rho))), or None while rho >= 1
        let log_factor = |n: f64| {
            let lr = log_rho(n);
            (lr < 0.0).then(|| (-libm::log(2.0 * -libm::expm1(lr))).max(0.0))
        };
        let mut m = 0usize;
        let factor = loop {
            let n = (m + 1) as f64;
            if let Some(f) = log_factor(n) {
                if log_t(n) + f < target {
                    break f;
                }
            }
            m += 1;
            if m > 100_000_000 {
                return Err(Error::Domain(format!("no truncation point at height {y}")));
            }
        };
        let tail = Mag::exp_of(log_t((m + 1) as f64) + factor + core::f64::consts::LN_2);
        if m > self.coefficients.len() {
            return Err(Error::InsufficientCoefficients { required: m, available: self.coefficients.len() });
        }
        Ok(Truncation { terms: m, tail })
    }

    /// `f(z) = sum a_n e^{2 pi i n z}` with a rigorous tail bound.
    pub fn eval(&self, z: &BallComplex, ctx: &PrecisionContext) -> Result<BallComplex> {
        self.eval_with_floor(z, DEFAULT_Y_MIN, ctx)
    }

    pub fn eval_with_floor(&self, z: &BallComplex, y_min: f64, ctx: &PrecisionContext) -> Result<BallComplex> {
        let y_lo = z.im_f64() - z.radius_f64();
        if !(y_lo >= y_min) {
            return Err(Error::BelowHeight { im: z.im_f64(), y_min });
        }
        // absolute eps: relative to the first term e^{-2 pi y}
        let rel = ctx.target_eps() * libm::exp(2.0 * PI * y_lo);
        let trunc = self.truncation(y_lo, rel.min(0.25))?;
        let q = BallComplex::exp_2pi_i(z, ctx)?;
        let mut qn = q.clone();
        let mut acc = BallComplex::zero(ctx);
        for n in 1..=trunc.terms {
            let a = &self.coefficients[n - 1];
            if !matches!(a, Coefficient::Integer(x) if x.is_zero()) {
                acc = acc.add(&qn.mul(&a.ball(ctx), ctx)?, ctx)?;
            }
            if n < trunc.terms {
                qn = qn.mul(&q, ctx)?;
            }
        }
        // tail relative to e^{-2 pi y_lo}
        let scale = Mag::exp_of(-2.0 * PI * y_lo);
        Ok(acc.inflate(&trunc.tail.mul(&scale)))
    }
}

/// Number of summed terms and bound on the omitted ones.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub terms: usize,
    pub tail: Mag,
}

fn to_f64_up(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::INFINITY) * (1.0 + 1e-15)
}
