//! Heegner line integrals and the Abel–Jacobi coset representative.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::isogeny::CMPoint;
use crate::modforms::{Coefficient, Newform, DEFAULT_Y_MIN};
use crate::numerics::{BallComplex, Mag, PrecisionContext};

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `c_s = sum_j (-1)^{r-j} C(r, j) (2j)!/(2j - s)!` for `s = 0..=2r`.
pub fn kernel_coefficients(r: u32) -> Vec<BigInt> {
    let mut c = alloc::vec![BigInt::zero(); 2 * r as usize + 1];
    for j in 0..=r {
        let sign = if (r - j) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let base = &sign * binomial(r, j);
        for s in 0..=2 * j {
            c[s as usize] += &base * factorial(2 * j) / factorial(2 * j - s);
        }
    }
    c
}

/// Extra working bits that absorb the cancellation in the alternating
/// closed form: its terms exceed the result by up to `(2 pi n Y)^r`.
fn guard_bits(r: u32, ay: f64) -> usize {
    let lost = if ay > 1.0 { r as f64 * libm::log2(ay) } else { 0.0 };
    libm::ceil(lost) as usize + 16
}

/// `E(r, n, Y) = int_Y^inf (y^2 - Y^2)^r e^{-2 pi n y} dy`, by the closed form
/// `e^{-aY} sum_s c_s Y^{2r-s} a^{-(s+1)}` with `a = 2 pi n`.
pub fn kernel_integral(r: u32, n: u64, y: &BallComplex, ctx: &PrecisionContext) -> Result<BallComplex> {
    if n == 0 {
        return Err(Error::Domain("kernel index n must be positive".into()));
    }
    if y.re_f64() + y.radius_f64() < 0.0 || !y.is_real() {
        return Err(Error::Domain(format!("kernel height {} must be real and nonnegative", y.re_f64())));
    }
    let ay = 2.0 * PI * n as f64 * y.re_f64().max(0.0);
    let wctx = ctx.with_precision(ctx.bits() + guard_bits(r, ay))?;
    let a = BallComplex::pi(&wctx).mul_2exp(1).mul_int(&BigInt::from(n), &wctx)?;
    let inv_a = a.recip(&wctx)?;
    let coeffs = kernel_coefficients(r);
    // powers Y^0..Y^{2r} and a^{-1}..a^{-(2r+1)}
    let mut y_pow = Vec::with_capacity(2 * r as usize + 1);
    y_pow.push(BallComplex::one(&wctx));
    for i in 1..=2 * r as usize {
        y_pow.push(y_pow[i - 1].mul(y, &wctx)?);
    }
    let mut sum = BallComplex::zero(&wctx);
    let mut a_pow = inv_a.clone();
    for (s, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let term = y_pow[2 * r as usize - s].mul(&a_pow, &wctx)?.mul_int(c, &wctx)?;
            sum = sum.add(&term, &wctx)?;
        }
        a_pow = a_pow.mul(&inv_a, &wctx)?;
    }
    let decay = a.mul(y, &wctx)?.neg().exp(&wctx)?;
    sum.mul(&decay, &wctx)
}

/// `Y = v sqrt(d_K)` for `tau' = u + v sqrt(-d_K)`.
pub fn height(point: &CMPoint, ctx: &PrecisionContext) -> Result<BallComplex> {
    let d = BigRational::from_integer(point.value.d_k().into());
    BallComplex::sqrt_ratio(&d, ctx)?.mul_ratio(point.value.v(), ctx)
}

/// `e^{2 pi i n x}` with `n x` reduced modulo 1 exactly first.
pub fn phase(n: u64, x: &BigRational, ctx: &PrecisionContext) -> Result<BallComplex> {
    let num = x.numer() * BigInt::from(n);
    let den = x.denom();
    let frac = BigRational::new(num.mod_floor(den), den.clone());
    if frac.is_zero() {
        return Ok(BallComplex::one(ctx));
    }
    BallComplex::exp_2pi_i(&BallComplex::from_ratio(&frac, ctx), ctx)
}

/// `sum_n a_n e^{2 pi i n X} E(r, n, Y)` for `tau' = X + iY`, with the index
/// of the last summed term. The tail is bounded through `E(r,n,Y) <=
/// e^{-2 pi (n-1) Y} E(r,1,Y)`; `ctx.target_eps()` is relative to `E(r,1,Y)`.
pub fn fourier_sum(f: &Newform, point: &CMPoint, ctx: &PrecisionContext) -> Result<(BallComplex, usize)> {
    let y = height(point, ctx)?;
    let y_lo = (y.re_f64() - y.radius_f64()) * (1.0 - 1e-12);
    if !(y_lo >= DEFAULT_Y_MIN) {
        return Err(Error::BelowHeight { im: y.re_f64(), y_min: DEFAULT_Y_MIN });
    }
    let r = f.r();
    let trunc = f.truncation(y_lo, ctx.target_eps())?;
    let x = point.value.u();
    let mut acc = BallComplex::zero(ctx);
    let mut e1 = None;
    for n in 1..=trunc.terms {
        let a = &f.coefficients()[n - 1];
        if matches!(a, Coefficient::Integer(z) if z.is_zero()) && n > 1 {
            continue;
        }
        let e = kernel_integral(r, n as u64, &y, ctx)?;
        let term = phase(n as u64, x, ctx)?.mul(&e, ctx)?.mul(&a.ball(ctx), ctx)?;
        acc = acc.add(&term, ctx)?;
        if n == 1 {
            e1 = Some(e);
        }
    }
    let e1 = match e1 {
        Some(e) => e,
        None => kernel_integral(r, 1, &y, ctx)?,
    };
    Ok((acc.inflate(&trunc.tail.mul(&e1.abs_upper())), trunc.terms))
}

/// `int_{i inf}^{tau'} (z - tau')^r (z - conj tau')^r f(z) dz` along the
/// vertical line through `tau'`, i.e. `-i (-1)^r sum_n a_n e^{2 pi i n X} E(r,n,Y)`.
pub fn heegner_line_integral(f: &Newform, point: &CMPoint, ctx: &PrecisionContext) -> Result<BallComplex> {
    if f.level() != point.level.unwrap_or(f.level()) {
        return Err(Error::Precondition(format!(
            "newform level {} differs from the level structure's N = {}",
            f.level(),
            point.level.unwrap_or(0)
        )));
    }
    let (sum, _) = fourier_sum(f, point, ctx)?;
    // -i (-1)^r = i^{3 + 2r}
    Ok(sum.mul_i_pow(3 + 2 * f.r()))
}

/// `m_{k,k'} = (2N)^k k! 2^{k'} k'!`.
pub fn m_kk(level: u64, k: u32, k_prime: u32) -> BigInt {
    num_traits::pow(BigInt::from(2 * level), k as usize)
        * factorial(k)
        * num_traits::pow(BigInt::from(2), k_prime as usize)
        * factorial(k_prime)
}

/// The prefactor `(-2 sqrt(-d_K))^r d_phi^k (2 pi i)^{r+1} m_{k,k}^2 / (tau' - conj tau')^r`.
///
/// With `Im tau' = v sqrt(d_K)` every `sqrt(d_K)` cancels, leaving
/// `i^{i_power} * rational * pi^{pi_power}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AJConstant {
    pub i_power: u32,
    pub rational: BigRational,
    pub pi_power: u32,
}

impl AJConstant {
    pub fn value(&self, ctx: &PrecisionContext) -> Result<BallComplex> {
        let pi = BallComplex::pi(ctx).pow_u(self.pi_power, ctx)?;
        Ok(pi.mul_ratio(&self.rational, ctx)?.mul_i_pow(self.i_power))
    }
}

/// `d_phi` is the isogeny degree; `v` is `Im tau' / sqrt(d_K)`.
pub fn aj_constant(level: u64, d_phi: u64, r: u32, v: &BigRational) -> Result<AJConstant> {
    if !v.is_positive() {
        return Err(Error::Domain(format!("Im tau' must be positive, got v = {v}")));
    }
    let k = 2 * r;
    let m = m_kk(level, k, k);
    // (-1)^r i^{r+1} 2^{r+1} d_phi^k m^2 / v^r pi^{r+1}
    let mut rational = BigRational::from_integer(
        num_traits::pow(BigInt::from(2), r as usize + 1) * num_traits::pow(BigInt::from(d_phi), k as usize) * &m * &m,
    ) / num_traits::pow(v.clone(), r as usize);
    if r % 2 == 1 {
        rational = -rational;
    }
    Ok(AJConstant { i_power: (r + 1) % 4, rational, pi_power: r + 1 })
}

#[derive(Clone, Debug)]
pub struct AJResult {
    pub integral: BallComplex,
    pub constant: AJConstant,
    pub representative: BallComplex,
    pub label: String,
    pub point: CMPoint,
    pub r: u32,
    pub level: u64,
    pub m_kk: BigInt,
    /// Number of Fourier terms summed.
    pub terms: usize,
}

/// `constant * integral` for a point whose isogeny sends `t` to `1/N`.
pub fn aj_representative(f: &Newform, point: &CMPoint, ctx: &PrecisionContext) -> Result<AJResult> {
    point.check_normalization()?;
    let level = point.level.expect("checked by normalisation");
    if level != f.level() {
        return Err(Error::Precondition(format!("newform level {} != N = {level}", f.level())));
    }
    let r = f.r();
    let constant = aj_constant(level, point.degree, r, point.value.v())?;
    let (sum, terms) = fourier_sum(f, point, ctx)?;
    let integral = sum.mul_i_pow(3 + 2 * r);
    let representative = constant.value(ctx)?.mul(&integral, ctx)?;
    Ok(AJResult {
        integral,
        constant,
        representative,
        label: f.label().into(),
        point: point.clone(),
        r,
        level,
        m_kk: m_kk(level, 2 * r, 2 * r),
        terms,
    })
}

/// `|sum_{n>=2} a_n e^{2 pi i n X} E(r,n,Y)| / E(r,1,Y)`: the relative distance
/// of the representative from its leading term.
pub fn relative_deviation(f: &Newform, point: &CMPoint, ctx: &PrecisionContext) -> Result<(f64, Mag)> {
    let (sum, _) = fourier_sum(f, point, ctx)?;
    let y = height(point, ctx)?;
    let e1 = kernel_integral(f.r(), 1, &y, ctx)?;
    let lead = phase(1, point.value.u(), ctx)?.mul(&e1, ctx)?;
    let rest = sum.sub(&lead, ctx)?.div(&e1, ctx)?;
    Ok((rest.abs_f64(), rest.radius().clone()))
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
