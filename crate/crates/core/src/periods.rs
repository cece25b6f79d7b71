//! Period functionals `(2 pi i)^{k+1} int_0^{i inf} P(z) f(z) dz`, split at
//! the Fricke fixed point `i/sqrt(N)`.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::aj::factorial;
use crate::error::{Error, Result};
use crate::modforms::{Coefficient, Newform};
use crate::numerics::{BallComplex, PrecisionContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cusp {
    Zero,
    Infinity,
}

#[derive(Clone, Debug)]
pub struct CuspFunctional {
    /// Coefficients `c_0, c_1, ...` of `P`.
    pub poly: Vec<BigInt>,
    pub alpha: Cusp,
    pub beta: Cusp,
    pub value: BallComplex,
}

/// `int_{Y0}^inf y^m e^{-2 pi n y} dy = e^{-a Y0} sum_s m!/(m-s)! Y0^{m-s} a^{-(s+1)}`, `a = 2 pi n`.
pub fn monomial_kernel(m: u32, n: u64, y0: &BallComplex, ctx: &PrecisionContext) -> Result<BallComplex> {
    if n == 0 {
        return Err(Error::Domain("kernel index n must be positive".into()));
    }
    if !y0.is_real() || y0.re_f64() - y0.radius_f64() <= 0.0 {
        return Err(Error::Domain(format!("lower limit {} must be positive", y0.re_f64())));
    }
    let a = BallComplex::pi(ctx).mul_2exp(1).mul_int(&BigInt::from(n), ctx)?;
    let inv_a = a.recip(ctx)?;
    let mut sum = BallComplex::zero(ctx);
    let mut a_pow = inv_a.clone();
    for s in 0..=m {
        let term = y0.pow_u(m - s, ctx)?.mul(&a_pow, ctx)?.mul_int(&(factorial(m) / factorial(m - s)), ctx)?;
        sum = sum.add(&term, ctx)?;
        a_pow = a_pow.mul(&inv_a, ctx)?;
    }
    sum.mul(&a.mul(y0, ctx)?.neg().exp(ctx)?, ctx)
}

/// The `Q` with `int_0^{i/sqrt N} P f dz = int_{i/sqrt N}^{i inf} Q f dz`:
/// `Q(w) = -eps N^{k/2} w^k P(-1/(N w))`. An involution on polynomials of
/// degree at most `k`.
pub fn fricke_transform(poly: &[BigRational], level: u64, k: u32, eps: i8) -> Result<Vec<BigRational>> {
    if poly.len() > k as usize + 1 {
        return Err(Error::Precondition(format!("deg P = {} exceeds k = {k}", poly.len() - 1)));
    }
    let n = BigRational::from_integer(level.into());
    let r = (k / 2) as i32;
    let mut out = alloc::vec![BigRational::zero(); k as usize + 1];
    for (j, c) in poly.iter().enumerate() {
        // c_j (-1)^j N^{k/2 - j} w^{k-j}
        let mut v = c * pow_i(&n, r - j as i32);
        if (j % 2 == 1) != (eps < 0) {
            v = -v;
        }
        out[k as usize - j] = -v;
    }
    Ok(out)
}

fn pow_i(x: &BigRational, e: i32) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `int_{i Y0}^{i inf} Q(z) f(z) dz = i sum_m Q_m i^m sum_n a_n K(m, n, Y0)`.
pub fn upper_integral(
    f: &Newform,
    poly: &[BigRational],
    y0: &BallComplex,
    ctx: &PrecisionContext,
) -> Result<BallComplex> {
    let y_lo = (y0.re_f64() - y0.radius_f64()) * (1.0 - 1e-12);
    let trunc = f.truncation(y_lo, ctx.target_eps())?;
    let mut total = BallComplex::zero(ctx);
    for (m, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut acc = BallComplex::zero(ctx);
        let mut k1 = None;
        for n in 1..=trunc.terms {
            let a = &f.coefficients()[n - 1];
            if matches!(a, Coefficient::Integer(z) if z.is_zero()) && n > 1 {
                continue;
            }
            let kern = monomial_kernel(m as u32, n as u64, y0, ctx)?;
            acc = acc.add(&kern.mul(&a.ball(ctx), ctx)?, ctx)?;
            if n == 1 {
                k1 = Some(kern);
            }
        }
        // K(m, n, Y0) <= e^{-2 pi (n-1) Y0} K(m, 1, Y0)
        let k1 = match k1 {
            Some(k) => k,
            None => monomial_kernel(m as u32, 1, y0, ctx)?,
        };
        acc = acc.inflate(&trunc.tail.mul(&k1.abs_upper()));
        total = total.add(&acc.mul_ratio(c, ctx)?.mul_i_pow(m as u32 + 1), ctx)?;
    }
    Ok(total)
}

/// `(2 pi i)^{k+1}`.
fn prefactor(k: u32, ctx: &PrecisionContext) -> Result<BallComplex> {
    Ok(BallComplex::pi(ctx).mul_2exp(1).pow_u(k + 1, ctx)?.mul_i_pow((k + 1) % 4))
}

/// `1/sqrt(N)`.
pub fn split_height(level: u64, ctx: &PrecisionContext) -> Result<BallComplex> {
    BallComplex::sqrt_ratio(&BigRational::new(BigInt::one(), level.into()), ctx)
}

/// The two halves `(2 pi i)^{k+1} U(P)` and `(2 pi i)^{k+1} U(Q)` of the functional.
pub fn j_functional_parts(
    f: &Newform,
    poly: &[BigRational],
    ctx: &PrecisionContext,
) -> Result<(BallComplex, BallComplex)> {
    let eps = f.fricke().ok_or(Error::FrickeRequired)?;
    let k = f.weight() - 2;
    let tilde = fricke_transform(poly, f.level(), k, eps)?;
    let y0 = split_height(f.level(), ctx)?;
    let pre = prefactor(k, ctx)?;
    let upper = upper_integral(f, poly, &y0, ctx)?.mul(&pre, ctx)?;
    let lower = upper_integral(f, &tilde, &y0, ctx)?.mul(&pre, ctx)?;
    Ok((upper, lower))
}

pub fn j_functional(f: &Newform, poly: &[BigInt], ctx: &PrecisionContext) -> Result<CuspFunctional> {
    let k = f.weight() - 2;
    if poly.len() > k as usize + 1 {
        return Err(Error::Precondition(format!("deg P = {} exceeds k = {k}", poly.len() - 1)));
    }
    let rat: Vec<BigRational> = poly.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let (upper, lower) = j_functional_parts(f, &rat, ctx)?;
    Ok(CuspFunctional { poly: poly.to_vec(), alpha: Cusp::Zero, beta: Cusp::Infinity, value: upper.add(&lower, ctx)? })
}

/// Whether `value / (2 pi i)^{k+1}` is expected real (`Some(true)`) or
/// imaginary (`Some(false)`) for real `a_n`: only when every monomial of `P`
/// has the same parity.
pub fn parity_class(poly: &[BigInt]) -> Option<bool> {
    let mut parity = None;
    for (m, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let odd = m % 2 == 1;
        match parity {
            None => parity = Some(odd),
            Some(p) if p != odd => return None,
            _ => {}
        }
    }
    // z^m contributes i^{m+1} times a real number
    Some(parity.unwrap_or(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aj::kernel_integral;
    use crate::modforms::Coefficient;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(160, 1e-30).unwrap()
    }

    // eta(z)^4 eta(5z)^4 = q prod (1 - q^n)^4 (1 - q^{5n})^4
    fn eta_form(terms: usize) -> Newform {
        let mut c = alloc::vec![0i64; terms];
        c[0] = 1;
        for n in 1..terms {
            for (step, times) in [(n, 4), (5 * n, 4)] {
                if step >= terms {
                    continue;
                }
                for _ in 0..times {
                    for i in (step..terms).rev() {
                        c[i] -= c[i - step];
                    }
                }
            }
        }
        let coeffs = c.into_iter().map(|x| Coefficient::Integer(x.into())).collect();
        Newform::new(5, 4, "eta", Some(1), coeffs).unwrap()
    }

    fn rats(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn eta_coefficients() {
        let f = eta_form(12);
        let want = [1, -4, 2, 8, -5, -8, 6, 0, -23, 20, 32, 16];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(f.coefficients()[i].value(), BigRational::from_integer((*w).into()));
        }
    }

    #[test]
    fn kernel_special_values() {
        let c = ctx();
        let pi = core::f64::consts::PI;
        let y = BallComplex::from_f64(0.7, &c);
        let k0 = monomial_kernel(0, 3, &y, &c).unwrap();
        let want = libm::exp(-6.0 * pi * 0.7) / (6.0 * pi);
        assert!((k0.re_f64() - want).abs() < 1e-15 * want);
        let k1 = monomial_kernel(1, 1, &BallComplex::one(&c), &c).unwrap();
        let want = libm::exp(-2.0 * pi) * (1.0 / (2.0 * pi) + 1.0 / (4.0 * pi * pi));
        assert!((k1.re_f64() - want).abs() < 1e-15 * want);
    }

    #[test]
    fn kernel_reassembles_e() {
        // (y^2 - Y^2)^r = sum_i C(r,i) (-Y^2)^{r-i} y^{2i}
        let c = ctx();
        for r in 0..=3u32 {
            for (n, yv) in [(1u64, 0.3), (2, 1.0), (5, 2.5)] {
                let y = BallComplex::from_f64(yv, &c);
                let mut acc = BallComplex::zero(&c);
                for i in 0..=r {
                    let mut t = monomial_kernel(2 * i, n, &y, &c).unwrap();
                    t = t
                        .mul(&y.pow_u(2 * (r - i), &c).unwrap(), &c)
                        .unwrap()
                        .mul_int(&crate::aj::binomial(r, i), &c)
                        .unwrap();
                    if (r - i) % 2 == 1 {
                        t = t.neg();
                    }
                    acc = acc.add(&t, &c).unwrap();
                }
                let e = kernel_integral(r, n, &y, &c).unwrap();
                assert!(acc.overlaps(&e), "r={r} n={n} y={yv}");
            }
        }
    }

    #[test]
    fn fricke_is_an_involution() {
        for eps in [1i8, -1] {
            for p in [rats(&[1]), rats(&[0, 1]), rats(&[3, -2, 7]), rats(&[1, 2, 3, 4, 5])] {
                let t = fricke_transform(&p, 5, 4, eps).unwrap();
                let mut back = fricke_transform(&t, 5, 4, eps).unwrap();
                back.truncate(p.len());
                assert_eq!(back, p);
            }
        }
        assert!(fricke_transform(&rats(&[1, 1, 1, 1, 1, 1]), 5, 4, 1).is_err());
    }

    #[test]
    fn splitting_twice_gives_the_same_value() {
        let c = ctx();
        let f = eta_form(200);
        let p = rats(&[2, -1, 3]);
        let (u, l) = j_functional_parts(&f, &p, &c).unwrap();
        let t = fricke_transform(&p, 5, 2, 1).unwrap();
        let (u2, l2) = j_functional_parts(&f, &t, &c).unwrap();
        assert!(u.overlaps(&l2) && l.overlaps(&u2));
    }

    #[test]
    fn linear_and_symmetric() {
        let c = ctx();
        let f = eta_form(200);
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let a = j_functional(&f, &big(&[1, 0, 2]), &c).unwrap().value;
        let b = j_functional(&f, &big(&[0, 3]), &c).unwrap().value;
        let s = j_functional(&f, &big(&[1, 3, 2]), &c).unwrap().value;
        assert!(s.overlaps(&a.add(&b, &c).unwrap()));
        let pre = prefactor(2, &c).unwrap();
        // even monomials only: value / (2 pi i)^3 is imaginary
        let na = a.div(&pre, &c).unwrap();
        assert!(na.re_f64().abs() <= na.radius_f64() + 1e-40);
        let nb = b.div(&pre, &c).unwrap();
        assert!(nb.im_f64().abs() <= nb.radius_f64() + 1e-40);
        assert_eq!(parity_class(&big(&[1, 0, 2])), Some(false));
        assert_eq!(parity_class(&big(&[0, 3])), Some(true));
        assert_eq!(parity_class(&big(&[1, 3])), None);
    }

    #[test]
    fn fricke_required() {
        let c = ctx();
        let f = eta_form(50);
        let g = Newform::new(5, 4, "x", None, f.coefficients().to_vec()).unwrap();
        assert!(matches!(j_functional(&g, &[BigInt::one()], &c), Err(Error::FrickeRequired)));
    }
}
