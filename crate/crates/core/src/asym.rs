//! Asymptotics of the representatives along the pq-family: the improper
//! integral `I`, the leading term `J`, the polynomial `P` and the relative
//! error bound.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::aj::{aj_representative, binomial, factorial, kernel_coefficients, m_kk, phase, to_f64};
use crate::error::{Error, Result};
use crate::isogeny::{tau_pq_t, CMPoint, LevelStructure, P1Point};
use crate::modforms::Newform;
use crate::numerics::{BallComplex, PrecisionContext};
use crate::primes::{IndexPair, IndexSet};
use crate::quadfield::ImagQuadField;

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `(gamma, kappa)`: `(pq, 1)` for `beta = inf`, `(p/q, q)` otherwise.
pub fn gamma_kappa(p: u64, q: u64, beta: P1Point) -> (BigRational, u64) {
    match beta {
        P1Point::Infinity => (rat(p) * rat(q), 1),
        P1Point::Finite(_) => (BigRational::new(p.into(), q.into()), q),
    }
}

/// `Re tau^t_{p,q,beta}` from the level-structure entries:
/// `s pq` or `(s + beta) p/q` with `s = (ac|tau|^2 - b c d_K + b d - d_K/2)/|c tau + d|^2`.
pub fn x_formula(field: &ImagQuadField, ls: &LevelStructure, p: u64, q: u64, beta: P1Point) -> BigRational {
    let dk = field.d_k();
    let tau_norm = rat(dk * (dk + 1) / 4);
    let (a, b, c, d) = (rat(ls.a), rat(ls.b), rat(ls.c), rat(ls.d));
    let m = rat(ls.cd_norm(field));
    let s = (&a * &c * tau_norm - &b * &c * rat(dk) + &b * &d - BigRational::new(dk.into(), 2.into())) / m;
    match beta {
        P1Point::Infinity => s * rat(p) * rat(q),
        P1Point::Finite(bt) => (s + rat(bt)) * BigRational::new(p.into(), q.into()),
    }
}

/// `Y = gamma sqrt(d_K) / (2 |c tau + d|^2)`.
pub fn y_formula(d_k: u64, cd_norm: &BigInt, gamma: &BigRational, ctx: &PrecisionContext) -> Result<BallComplex> {
    let scale = gamma / rat(cd_norm * 2);
    BallComplex::sqrt_ratio(&rat(d_k), ctx)?.mul_ratio(&scale, ctx)
}

/// Extra bits absorbing the cancellation of the alternating sums at height `y`.
fn guard(r: u32, y: f64) -> usize {
    let ay = 2.0 * core::f64::consts::PI * y;
    let lost = if ay > 1.0 { r as f64 * libm::log2(ay) } else { 0.0 };
    libm::ceil(lost) as usize + 16
}

/// `e^{-gamma pi sqrt(d_K) / |c tau + d|^2}`.
fn decay(d_k: u64, cd_norm: &BigInt, gamma: &BigRational, ctx: &PrecisionContext) -> Result<BallComplex> {
    let y = y_formula(d_k, cd_norm, gamma, ctx)?;
    BallComplex::pi(ctx).mul(&y, ctx)?.mul_2exp(1).neg().exp(ctx)
}

/// The integral `I = int_Y^inf (y^2 - Y^2)^r e^{-2 pi y} dy` as the double sum
/// over `j, s` in the variables `gamma` and `sqrt(d_K)/(2|c tau + d|^2)`.
pub fn i_closed_gamma(
    d_k: u64,
    cd_norm: &BigInt,
    r: u32,
    gamma: &BigRational,
    ctx: &PrecisionContext,
) -> Result<BallComplex> {
    if !gamma.is_positive() {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    let k = 2 * r;
    let y_est = to_f64(gamma) * libm::sqrt(d_k as f64) / (2.0 * cd_norm.to_f64().unwrap_or(f64::NAN));
    let w = ctx.with_precision(ctx.bits() + guard(r, y_est))?;
    let h = BallComplex::sqrt_ratio(&rat(d_k), &w)?.mul_ratio(&BigRational::new(BigInt::one(), cd_norm * 2), &w)?;
    let inv = BallComplex::pi(&w).mul_ratio(&(gamma * rat(2)), &w)?.recip(&w)?;
    let mut h_pow = alloc::vec![BallComplex::one(&w)];
    let mut inv_pow = alloc::vec![BallComplex::one(&w)];
    for i in 1..=(k as usize + 1) {
        h_pow.push(h_pow[i - 1].mul(&h, &w)?);
        inv_pow.push(inv_pow[i - 1].mul(&inv, &w)?);
    }
    let mut sum = BallComplex::zero(&w);
    for j in 0..=r {
        let sign: BigInt = if (r - j) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for s in 0..=2 * j {
            let coeff = &sign * binomial(r, j) * factorial(2 * j) / factorial(2 * j - s);
            let term = h_pow[(k - s) as usize].mul(&inv_pow[s as usize + 1], &w)?.mul_int(&coeff, &w)?;
            sum = sum.add(&term, &w)?;
        }
    }
    let lead = num_traits::pow(gamma.clone(), k as usize + 1);
    sum.mul_ratio(&lead, &w)?.mul(&decay(d_k, cd_norm, gamma, &w)?, ctx)
}

pub fn i_closed(
    field: &ImagQuadField,
    ls: &LevelStructure,
    r: u32,
    p: u64,
    q: u64,
    beta: P1Point,
    ctx: &PrecisionContext,
) -> Result<BallComplex> {
    let (gamma, _) = gamma_kappa(p, q, beta);
    i_closed_gamma(field.d_k(), &ls.cd_norm(field), r, &gamma, ctx)
}

/// `P(X) = sum_s c_s (sqrt(d_K)/(2|c tau + d|^2))^{k-s} (2 pi)^{-(s+1)} X^{k-s}`,
/// normalised so that `I = e^{-gamma pi sqrt(d_K)/|c tau + d|^2} P(gamma)`.
#[derive(Clone, Debug)]
pub struct PPolynomial {
    pub r: u32,
    pub d_k: u64,
    pub cd_norm: BigInt,
    /// Entry `s` is `(R_s, odd)`: the coefficient of `X^{k-s}` is
    /// `R_s sqrt(d_K)^{odd} (2 pi)^{-(s+1)}` with `R_s` rational.
    pub coeffs: Vec<(BigRational, bool)>,
}

pub fn p_polynomial(field: &ImagQuadField, ls: &LevelStructure, r: u32) -> PPolynomial {
    let k = 2 * r;
    let dk = field.d_k();
    let cd_norm = ls.cd_norm(field);
    let two_m: BigInt = &cd_norm * 2;
    let coeffs = kernel_coefficients(r)
        .into_iter()
        .enumerate()
        .map(|(s, c)| {
            let e = k as usize - s;
            let num = c * num_traits::pow(BigInt::from(dk), e / 2);
            (BigRational::new(num, num_traits::pow(two_m.clone(), e)), e % 2 == 1)
        })
        .collect();
    PPolynomial { r, d_k: dk, cd_norm, coeffs }
}

impl PPolynomial {
    pub fn degree(&self) -> u32 {
        2 * self.r
    }

    /// Coefficient of `X^deg`.
    pub fn coefficient(&self, deg: u32, ctx: &PrecisionContext) -> Result<BallComplex> {
        if deg > self.degree() {
            return Ok(BallComplex::zero(ctx));
        }
        let s = (self.degree() - deg) as usize;
        let (ref rs, odd) = self.coeffs[s];
        let two_pi = BallComplex::pi(ctx).mul_2exp(1);
        let mut c = two_pi.pow_u(s as u32 + 1, ctx)?.recip(ctx)?.mul_ratio(rs, ctx)?;
        if odd {
            c = c.mul(&BallComplex::sqrt_ratio(&rat(self.d_k), ctx)?, ctx)?;
        }
        Ok(c)
    }

    /// `P(x)`, at extra working precision when the terms cancel.
    pub fn eval(&self, x: &BigRational, ctx: &PrecisionContext) -> Result<BallComplex> {
        let m = self.cd_norm.to_f64().unwrap_or(f64::NAN);
        let y_est = to_f64(x).abs() * libm::sqrt(self.d_k as f64) / (2.0 * m);
        let w = ctx.with_precision(ctx.bits() + guard(self.r, y_est))?;
        let xb = BallComplex::from_ratio(x, &w);
        let mut acc = BallComplex::zero(&w);
        for deg in (0..=self.degree()).rev() {
            acc = acc.mul(&xb, &w)?.add(&self.coefficient(deg, &w)?, &w)?;
        }
        acc.mul(&BallComplex::one(ctx), ctx)
    }
}

/// `J = i^{i_power} e^{2 pi i x} * magnitude`, kept apart so the size and
/// the phase do not interact.
#[derive(Clone, Debug)]
pub struct JValue {
    pub i_power: u32,
    pub x: BigRational,
    pub magnitude: BallComplex,
}

impl JValue {
    pub fn value(&self, ctx: &PrecisionContext) -> Result<BallComplex> {
        Ok(phase(1, &self.x, ctx)?.mul(&self.magnitude, ctx)?.mul_i_pow(self.i_power))
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticDatum {
    pub p: u64,
    pub q: u64,
    pub beta: P1Point,
    pub gamma: BigRational,
    pub kappa: u64,
    pub x: BigRational,
    pub y: BallComplex,
    pub i: BallComplex,
    pub j: JValue,
    pub point: CMPoint,
}

/// `2^{k+1} |c tau + d|^k (pq)^r kappa^k m_{k,k}^2`, the rational part of `|J|/I`.
pub fn j_prefactor(level: u64, cd_norm: &BigInt, r: u32, p: u64, q: u64, kappa: u64) -> BigInt {
    let k = 2 * r as usize;
    let m = m_kk(level, 2 * r, 2 * r);
    num_traits::pow(BigInt::from(2), k + 1)
        * num_traits::pow(cd_norm.clone(), r as usize)
        * num_traits::pow(BigInt::from(p) * BigInt::from(q), r as usize)
        * num_traits::pow(BigInt::from(kappa), k)
        * &m
        * &m
}

fn check_beta(q: u64, beta: P1Point) -> Result<()> {
    match beta {
        P1Point::Finite(b) if b >= q => Err(Error::Precondition(format!("beta = {b} is not in P^1(F_{q})"))),
        _ => Ok(()),
    }
}

pub fn datum(
    field: &ImagQuadField,
    ls: &LevelStructure,
    r: u32,
    p: u64,
    q: u64,
    beta: P1Point,
    ctx: &PrecisionContext,
) -> Result<AsymptoticDatum> {
    IndexSet::new(*field, *ls)?.check(IndexPair { p, q })?;
    check_beta(q, beta)?;
    let point = tau_pq_t(field, ls, p, q, beta)?;
    let (gamma, kappa) = gamma_kappa(p, q, beta);
    let cd_norm = ls.cd_norm(field);
    let x = x_formula(field, ls, p, q, beta);
    let y = y_formula(field.d_k(), &cd_norm, &gamma, ctx)?;
    let i = i_closed_gamma(field.d_k(), &cd_norm, r, &gamma, ctx)?;
    let pre = j_prefactor(ls.level, &cd_norm, r, p, q, kappa);
    let magnitude = BallComplex::pi(ctx).pow_u(r + 1, ctx)?.mul_int(&pre, ctx)?.mul(&i, ctx)?;
    Ok(AsymptoticDatum {
        p,
        q,
        beta,
        gamma,
        kappa,
        x: x.clone(),
        y,
        i,
        j: JValue { i_power: r % 4, x, magnitude },
        point,
    })
}

/// `|J_{p,q,inf} / J_{p,q,beta}| = q^{-k} P(pq)/P(p/q) e^{-pi sqrt(d_K) p (q^2 - 1)/(q |c tau + d|^2)}`.
pub fn ratio_j(
    field: &ImagQuadField,
    ls: &LevelStructure,
    r: u32,
    p: u64,
    q: u64,
    beta: P1Point,
    ctx: &PrecisionContext,
) -> Result<BallComplex> {
    if beta.is_infinity() {
        return Err(Error::Precondition("the ratio needs a finite beta".into()));
    }
    check_beta(q, beta)?;
    let poly = p_polynomial(field, ls, r);
    let num = poly.eval(&(rat(p) * rat(q)), ctx)?;
    let den = poly.eval(&BigRational::new(p.into(), q.into()), ctx)?;
    if den.re_f64() - den.radius_f64() <= 0.0 {
        return Err(Error::Domain(format!("P(p/q) = {} is not positive", den.re_f64())));
    }
    let cd_norm = ls.cd_norm(field);
    // gamma_inf - gamma_beta = p (q^2 - 1)/q
    let dgamma = BigRational::new(BigInt::from(p) * (BigInt::from(q) * q - 1), q.into());
    let e = decay(field.d_k(), &cd_norm, &dgamma, ctx)?;
    let qk = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(q), 2 * r as usize));
    num.div(&den, ctx)?.mul(&e, ctx)?.mul_ratio(&qk, ctx)
}

/// The same ratio from two assembled data.
pub fn ratio_j_direct(
    field: &ImagQuadField,
    ls: &LevelStructure,
    r: u32,
    p: u64,
    q: u64,
    beta: P1Point,
    ctx: &PrecisionContext,
) -> Result<BallComplex> {
    let inf = datum(field, ls, r, p, q, P1Point::Infinity, ctx)?;
    let fin = datum(field, ls, r, p, q, beta, ctx)?;
    inf.j.magnitude.div(&fin.j.magnitude, ctx)
}

/// An upper bound for `sup_{Im z >= y} |f(z) - e^{2 pi i z}| e^{4 pi Im z}`,
/// i.e. `sum_{n>=2} |a_n| e^{-2 pi (n-2) y}`, with stored coefficients
/// followed by the majorant envelope.
pub fn cusp_constant(f: &Newform, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("height {y} must be positive")));
    }
    let q = libm::exp(-2.0 * core::f64::consts::PI * y);
    let mut acc = 0.0;
    let mut w = 1.0;
    for n in 2..=f.num_coefficients() {
        let a = &f.coefficients()[n - 1];
        let abs = to_f64(&a.value()).abs() + to_f64(&a.uncertainty());
        acc += abs * w;
        w *= q;
    }
    let (c, alpha) = f.envelope();
    let mut n = f.num_coefficients() as u64 + 1;
    loop {
        let t = c * libm::pow(n as f64, alpha) * libm::exp(-2.0 * core::f64::consts::PI * (n as f64 - 2.0) * y);
        let rho = libm::pow((n + 1) as f64 / n as f64, alpha) * q;
        if rho < 0.9 && t < 1e-20 * acc.max(f64::MIN_POSITIVE) {
            acc += t / (1.0 - rho);
            break;
        }
        acc += t;
        n += 1;
    }
    Ok(acc * (1.0 + 1e-12))
}

/// `c e^{-gamma pi sqrt(d_K)/|c tau + d|^2}`, rounded up.
pub fn lem_est_bound(
    field: &ImagQuadField,
    ls: &LevelStructure,
    p: u64,
    q: u64,
    beta: P1Point,
    c_majorant: f64,
) -> f64 {
    let (gamma, _) = gamma_kappa(p, q, beta);
    let m = ls.cd_norm(field).to_f64().unwrap_or(f64::NAN);
    let e = -to_f64(&gamma) * core::f64::consts::PI * libm::sqrt(field.d_k() as f64) / m;
    c_majorant * libm::exp(e) * (1.0 + 1e-12)
}

/// One line of a sweep: the datum, the representative, and the relative
/// error against the bound.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub datum: AsymptoticDatum,
    pub aj: BallComplex,
    /// `|AJ - J| / |J|` as a ball.
    pub rel_err: BallComplex,
    pub bound: f64,
}

impl SweepRow {
    /// Upper end of the relative error.
    pub fn rel_err_upper(&self) -> f64 {
        self.rel_err.abs_upper().to_f64()
    }

    pub fn within_bound(&self) -> bool {
        self.rel_err_upper() <= self.bound
    }
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_row(
    f: &Newform,
    field: &ImagQuadField,
    ls: &LevelStructure,
    p: u64,
    q: u64,
    beta: P1Point,
    c_majorant: f64,
    ctx: &PrecisionContext,
) -> Result<SweepRow> {
    let d = datum(field, ls, f.r(), p, q, beta, ctx)?;
    let aj = aj_representative(f, &d.point, ctx)?.representative;
    let j = d.j.value(ctx)?;
    let rel_err = aj.sub(&j, ctx)?.div(&j, ctx)?;
    let bound = lem_est_bound(field, ls, p, q, beta, c_majorant);
    Ok(SweepRow { datum: d, aj, rel_err, bound })
}

impl AsymptoticDatum {
    /// `gamma` as a float.
    pub fn gamma_f64(&self) -> f64 {
        to_f64(&self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aj::kernel_integral;

    fn setup() -> (ImagQuadField, LevelStructure) {
        (ImagQuadField::new(11).unwrap(), LevelStructure::from_t(1, 1, 5).unwrap())
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192, 1e-40).unwrap()
    }

    #[test]
    fn gamma_kappa_table() {
        assert_eq!(gamma_kappa(13, 7, P1Point::Infinity), (rat(91), 1));
        assert_eq!(gamma_kappa(13, 7, P1Point::Finite(3)), (BigRational::new(13.into(), 7.into()), 7));
    }

    #[test]
    fn y_at_gamma_91() {
        let (k, ls) = setup();
        let c = ctx();
        let y = y_formula(11, &ls.cd_norm(&k), &rat(91), &c).unwrap();
        let want = 91.0 * libm::sqrt(11.0) / 46.0;
        assert!((y.re_f64() - want).abs() < 1e-13 * want);
    }

    #[test]
    fn x_and_y_match_the_point() {
        let (k, ls) = setup();
        let c = ctx();
        for (p, q) in [(61, 41), (71, 41), (131, 61)] {
            for beta in P1Point::all(q).take(5) {
                let pt = tau_pq_t(&k, &ls, p, q, beta).unwrap();
                assert_eq!(&x_formula(&k, &ls, p, q, beta), pt.value.u());
                let d = datum(&k, &ls, 1, p, q, beta, &c).unwrap();
                assert!(d.y.overlaps(&crate::aj::height(&pt, &c).unwrap()));
                assert_eq!(d.gamma, pt.gamma_scale);
                assert_eq!(d.kappa, pt.kappa);
            }
        }
    }

    #[test]
    fn i_closed_matches_kernel() {
        let (k, _) = setup();
        let c = ctx();
        let m = BigInt::from(23);
        for r in 0..=4 {
            for g in [rat(1), BigRational::new(13.into(), 7.into()), rat(91), rat(2501)] {
                let i = i_closed_gamma(k.d_k(), &m, r, &g, &c).unwrap();
                let y = y_formula(11, &m, &g, &c).unwrap();
                let e = kernel_integral(r, 1, &y, &c).unwrap();
                assert!(i.overlaps(&e), "r={r} gamma={g}");
                let rel = i.sub(&e, &c).unwrap().div(&e, &c).unwrap().abs_f64();
                assert!(rel < 4e-40, "r={r} gamma={g} rel={rel}");
            }
        }
        // r = 0: e^{-2 pi Y}/(2 pi)
        let g = rat(3);
        let y = 3.0 * libm::sqrt(11.0) / 46.0;
        let i = i_closed_gamma(11, &m, 0, &g, &c).unwrap();
        let want = libm::exp(-2.0 * core::f64::consts::PI * y) / (2.0 * core::f64::consts::PI);
        assert!((i.re_f64() - want).abs() < 1e-14 * want);
    }

    #[test]
    fn p_polynomial_identity() {
        let (k, ls) = setup();
        let c = ctx();
        let m = ls.cd_norm(&k);
        let p0 = p_polynomial(&k, &ls, 0);
        let want = 1.0 / (2.0 * core::f64::consts::PI);
        assert!((p0.eval(&rat(5), &c).unwrap().re_f64() - want).abs() < 1e-15);
        for r in 1..=3 {
            let poly = p_polynomial(&k, &ls, r);
            assert_eq!(poly.degree(), 2 * r);
            for g in [rat(2), BigRational::new(41.into(), 3.into()), rat(150), rat(4000)] {
                let lhs = poly.eval(&g, &c).unwrap().mul(&decay(11, &m, &g, &c).unwrap(), &c).unwrap();
                let rhs = i_closed_gamma(11, &m, r, &g, &c).unwrap();
                assert!(lhs.overlaps(&rhs), "r={r} g={g}");
            }
        }
    }

    #[test]
    fn ratio_closed_vs_direct() {
        let (k, ls) = setup();
        let c = ctx();
        for (p, q, b) in [(61u64, 41u64, 0u64), (71, 41, 7), (211, 61, 3)] {
            let beta = P1Point::Finite(b);
            let a = ratio_j(&k, &ls, 1, p, q, beta, &c).unwrap();
            let d = ratio_j_direct(&k, &ls, 1, p, q, beta, &c).unwrap();
            let rel = a.sub(&d, &c).unwrap().div(&d, &c).unwrap().abs_f64();
            assert!(rel < 1e-30, "rel={rel}");
        }
        assert!(ratio_j(&k, &ls, 1, 61, 41, P1Point::Infinity, &c).is_err());
    }

    #[test]
    fn datum_rejects_invalid() {
        let (k, ls) = setup();
        let c = ctx();
        assert!(matches!(datum(&k, &ls, 1, 47, 41, P1Point::Infinity, &c), Err(Error::Normalization { .. })));
        assert!(datum(&k, &ls, 1, 61, 41, P1Point::Finite(41), &c).is_err());
        assert!(datum(&k, &ls, 1, 41, 61, P1Point::Infinity, &c).is_err());
    }

    #[test]
    fn j_is_consistent() {
        let (k, ls) = setup();
        let c = ctx();
        let d = datum(&k, &ls, 1, 61, 41, P1Point::Finite(2), &c).unwrap();
        let pre = j_prefactor(5, &BigInt::from(23), 1, 61, 41, 41);
        let back = d.j.magnitude.div(&d.i, &c).unwrap().div(&BallComplex::pi(&c).sqr(&c).unwrap(), &c).unwrap();
        assert!(back.contains(&BallComplex::from_int(&pre, &c)));
        let v = d.j.value(&c).unwrap();
        assert!((v.abs_f64() / d.j.magnitude.abs_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_decays() {
        let (k, ls) = setup();
        let b1 = lem_est_bound(&k, &ls, 421, 41, P1Point::Finite(1), 5.0);
        let b2 = lem_est_bound(&k, &ls, 821, 41, P1Point::Finite(1), 5.0);
        assert!(b2 < b1 && b1 < 5.0);
        let want = 5.0 * libm::exp(-91.0 * core::f64::consts::PI * libm::sqrt(11.0) / 23.0);
        let got = lem_est_bound(&k, &ls, 91, 1, P1Point::Infinity, 5.0);
        assert!((got - want).abs() < 1e-11 * want);
    }
}
