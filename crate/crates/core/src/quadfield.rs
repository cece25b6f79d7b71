//! Exact arithmetic in an imaginary quadratic field `K = Q(sqrt(-d_K))`.

use alloc::format;
use alloc::string::ToString;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, is_squarefree, kronecker, prime_factors};
use crate::error::{Error, Result};

/// True iff `-d_k` is a fundamental discriminant.
pub fn is_fundamental(d_k: u64) -> bool {
    match d_k % 4 {
        3 => is_squarefree(d_k),
        0 => {
            let m = d_k / 4;
            (m % 4 == 1 || m % 4 == 2) && is_squarefree(m)
        }
        _ => false,
    }
}

/// The field `Q(sqrt(-d_K))` with `-d_K` a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ImagQuadField {
    d_k: u64,
}

impl ImagQuadField {
    pub fn new(d_k: u64) -> Result<Self> {
        if !is_fundamental(d_k) {
            return Err(Error::NotFundamental { d_k });
        }
        Ok(Self { d_k })
    }

    pub fn d_k(&self) -> u64 {
        self.d_k
    }

    /// Half the number of units of the maximal order.
    pub fn u_k(&self) -> u64 {
        match self.d_k {
            3 => 3,
            4 => 2,
            _ => 1,
        }
    }

    /// `tau = (-d_K + sqrt(-d_K)) / 2`, a generator of the maximal order.
    pub fn tau(&self) -> FieldElement {
        FieldElement::new(
            BigRational::new(-BigInt::from(self.d_k), BigInt::from(2)),
            BigRational::new(BigInt::one(), BigInt::from(2)),
            self.d_k,
        )
    }

    pub fn element(&self, u: BigRational, v: BigRational) -> FieldElement {
        FieldElement::new(u, v, self.d_k)
    }

    pub fn rational(&self, u: BigRational) -> FieldElement {
        FieldElement::new(u, BigRational::zero(), self.d_k)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        self.rational(BigRational::from_integer(n.into()))
    }

    pub fn splitting_type(&self, q: u64) -> Result<Splitting> {
        splitting_type(q, self.d_k)
    }

    /// Conductor of the order attached to a primitive form of this field.
    ///
    /// Fails when the form's discriminant is `-c^2 D` for a fundamental
    /// `-D` other than `-d_K`; the error names that fundamental part.
    pub fn conductor_of_quadratic(&self, form: &Quadratic) -> Result<BigInt> {
        let disc = form.discriminant();
        if !disc.is_negative() || !form.is_primitive() || !form.a.is_positive() {
            return Err(Error::Precondition(format!("form {form} is not a primitive positive definite quadratic")));
        }
        let minus_d = -BigInt::from(self.d_k);
        let (quot, rem) = disc.div_rem(&minus_d);
        if rem.is_zero() {
            let c = quot.sqrt();
            if &c * &c == quot {
                return Ok(c);
            }
        }
        Err(Error::NotInField { disc: describe_discriminant(&disc), d_k: self.d_k })
    }

    pub fn conductor(&self, x: &FieldElement) -> Result<BigInt> {
        self.conductor_of_quadratic(&minimal_quadratic(x)?)
    }
}

/// `"D = -c^2 * d"` with the fundamental part found by trial division when
/// feasible, otherwise just `D`.
fn describe_discriminant(disc: &BigInt) -> alloc::string::String {
    match disc.abs().to_u64() {
        Some(n) if n < 1u64 << 50 => {
            let (d0, c) = fundamental_part(n);
            format!("{disc} = -{c}^2 * {d0}")
        }
        _ => disc.to_string(),
    }
}

/// Writes `n = c^2 * d0` with `-d0` fundamental (n must be 0 or 3 mod 4).
pub fn fundamental_part(n: u64) -> (u64, u64) {
    let mut d0 = n;
    let mut c = 1u64;
    for p in prime_factors(n) {
        while d0 % (p * p) == 0 {
            let cand = d0 / (p * p);
            // keep the factor 4 when removing it would leave -d0 = 2, 3 mod 4
            if p == 2 && cand % 4 != 3 && cand % 4 != 0 {
                break;
            }
            d0 = cand;
            c *= p;
        }
    }
    (d0, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        })
    }
}

/// Decomposition type of an odd prime `q` in `Q(sqrt(-d_k))`.
pub fn splitting_type(q: u64, d_k: u64) -> Result<Splitting> {
    if q % 2 == 0 || !is_prime(q) {
        return Err(Error::Precondition(format!("q = {q} is not an odd prime")));
    }
    Ok(match kronecker(-(d_k as i64), q) {
        0 => Splitting::Ramified,
        1 => Splitting::Split,
        _ => Splitting::Inert,
    })
}

/// Every prime dividing `level` splits in `Q(sqrt(-d_k))`.
pub fn heegner_hypothesis(d_k: u64, level: u64) -> Result<bool> {
    if !is_fundamental(d_k) {
        return Err(Error::NotFundamental { d_k });
    }
    if crate::arith::gcd(d_k, level) != 1 {
        return Err(Error::Precondition(format!("gcd(N = {level}, d_K = {d_k}) != 1")));
    }
    Ok(prime_factors(level).into_iter().all(|p| kronecker(-(d_k as i64), p) == 1))
}

/// The ideal `(N, (b + sqrt(-d_K))/2)` of norm `N` with cyclic quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicIdeal {
    pub level: u64,
    pub b: u64,
}

impl CyclicIdeal {
    /// Whether `(c tau + d)/N` is killed by this ideal, i.e. lies in the
    /// `N`-torsion subgroup it cuts out of `C / O_K`.
    pub fn annihilates(&self, field: &ImagQuadField, c: i64, d: i64) -> bool {
        // tau = (-b + sqrt)/2 + (b - d_K)/2 and the first term lies in the
        // conjugate ideal, which is N times the inverse of this one.
        let n = self.level as i128;
        let shift = (self.b as i128 - field.d_k() as i128) / 2;
        (c as i128 * shift + d as i128).rem_euclid(n) == 0
    }
}

/// Least `b` in `[0, 2N)` with `b^2 = -d_K (mod 4N)`.
pub fn find_cyclic_ideal(d_k: u64, level: u64) -> Result<CyclicIdeal> {
    if level < 5 {
        return Err(Error::Precondition(format!("level N = {level} must be at least 5")));
    }
    if !heegner_hypothesis(d_k, level)? {
        return Err(Error::HeegnerHypothesis { d_k, level });
    }
    let m = 4 * level as u128;
    let target = (m - (d_k as u128 % m)) % m;
    (0..2 * level)
        .find(|&b| (b as u128 * b as u128) % m == target)
        .map(|b| CyclicIdeal { level, b })
        .ok_or(Error::HeegnerHypothesis { d_k, level })
}

/// `u + v sqrt(-d_K)` with rational `u, v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    u: BigRational,
    v: BigRational,
    d_k: u64,
}

impl FieldElement {
    pub fn new(u: BigRational, v: BigRational, d_k: u64) -> Self {
        Self { u, v, d_k }
    }

    pub fn u(&self) -> &BigRational {
        &self.u
    }

    pub fn v(&self) -> &BigRational {
        &self.v
    }

    pub fn d_k(&self) -> u64 {
        self.d_k
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.u.clone(), -self.v.clone(), self.d_k)
    }

    /// `u^2 + d_K v^2`.
    pub fn norm(&self) -> BigRational {
        &self.u * &self.u + BigRational::from_integer(self.d_k.into()) * &self.v * &self.v
    }

    /// `2u`.
    pub fn trace(&self) -> BigRational {
        &self.u + &self.u
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.u * k, &self.v * k, self.d_k)
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n_inv = n.recip();
        Ok(self.conj().scale(&n_inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.d_k, other.d_k, "elements of different fields");
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt(-{})", self.u, self.v, self.d_k)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement::new(&self.u + &rhs.u, &self.v + &rhs.v, self.d_k)
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement::new(&self.u - &rhs.u, &self.v - &rhs.v, self.d_k)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let d = BigRational::from_integer(self.d_k.into());
        FieldElement::new(&self.u * &rhs.u - d * &self.v * &rhs.v, &self.u * &rhs.v + &self.v * &rhs.u, self.d_k)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(-self.u.clone(), -self.v.clone(), self.d_k)
    }
}

/// Integral quadratic `A X^2 + B X + C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Quadratic {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Primitive integral quadratic with positive leading coefficient that
/// vanishes at `x`.
pub fn minimal_quadratic(x: &FieldElement) -> Result<Quadratic> {
    if x.is_rational() {
        return Err(Error::RationalElement);
    }
    // X^2 - 2u X + (u^2 + d v^2)
    let b = -x.trace();
    let c = x.norm();
    let den = b.denom().lcm(c.denom());
    let a = den.clone();
    let b = b.numer() * (&den / b.denom());
    let c = c.numer() * (&den / c.denom());
    let g = a.gcd(&b).gcd(&c);
    Ok(Quadratic { a: a / &g, b: b / &g, c: c / &g })
}

/// Conductor of a primitive positive definite form, with the fundamental
/// discriminant `-d_K` recovered from the form itself.
pub fn conductor_of_quadratic(form: &Quadratic) -> Result<(u64, BigInt)> {
    let disc = form.discriminant();
    let n = disc
        .abs()
        .to_u64()
        .filter(|&n| n < 1u64 << 62)
        .ok_or_else(|| Error::Precondition(format!("discriminant {disc} too large to factor")))?;
    if !disc.is_negative() {
        return Err(Error::Precondition(format!("form {form} is not definite")));
    }
    let (d0, _) = fundamental_part(n);
    let field = ImagQuadField::new(d0)?;
    Ok((d0, field.conductor_of_quadratic(form)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn k11() -> ImagQuadField {
        ImagQuadField::new(11).unwrap()
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [3, 4, 7, 8, 11, 19, 20, 24, 43, 163] {
            assert!(is_fundamental(d), "{d}");
        }
        for d in [1, 2, 12, 16, 27, 44, 99] {
            assert!(!is_fundamental(d), "{d}");
        }
        assert!(matches!(ImagQuadField::new(12), Err(Error::NotFundamental { d_k: 12 })));
        assert_eq!(ImagQuadField::new(3).unwrap().u_k(), 3);
        assert_eq!(ImagQuadField::new(4).unwrap().u_k(), 2);
        assert_eq!(k11().u_k(), 1);
    }

    #[test]
    fn tau_satisfies_its_quadratic() {
        for d in [3u64, 4, 7, 11, 20, 23] {
            let k = ImagQuadField::new(d).unwrap();
            let t = k.tau();
            let lhs = &(&t * &t) + &t.scale(&BigRational::from_integer(d.into()));
            let lhs = &lhs + &k.rational(BigRational::new((d * (d + 1)).into(), 4.into()));
            assert!(lhs.is_zero(), "d = {d}");
        }
        assert_eq!(k11().tau().norm(), BigRational::from_integer(33.into()));
    }

    #[test]
    fn heegner_and_ideal() {
        assert!(heegner_hypothesis(11, 5).unwrap());
        assert!(!heegner_hypothesis(3, 5).unwrap());
        assert!(heegner_hypothesis(4, 5).unwrap());
        assert_eq!(find_cyclic_ideal(11, 5).unwrap().b, 3);
        assert_eq!(find_cyclic_ideal(4, 5).unwrap().b, 4);
        assert!(matches!(find_cyclic_ideal(3, 5), Err(Error::HeegnerHypothesis { .. })));
        assert!(find_cyclic_ideal(7, 4).is_err());
        assert!(find_cyclic_ideal(11, 11).is_err());
    }

    #[test]
    fn ideal_annihilation() {
        let k = k11();
        let n = find_cyclic_ideal(11, 5).unwrap();
        assert!(!n.annihilates(&k, 1, 1));
        assert!(n.annihilates(&k, 1, 4));
        let conj = CyclicIdeal { level: 5, b: 7 };
        assert!(conj.annihilates(&k, 1, 2));
    }

    #[test]
    fn splitting() {
        assert_eq!(splitting_type(7, 11).unwrap(), Splitting::Inert);
        assert_eq!(splitting_type(3, 11).unwrap(), Splitting::Split);
        assert_eq!(splitting_type(11, 11).unwrap(), Splitting::Ramified);
        assert!(splitting_type(9, 11).is_err());
        assert!(splitting_type(2, 11).is_err());
    }

    #[test]
    fn minimal_polynomials_and_conductors() {
        let k = k11();
        let t = k.tau();
        assert_eq!(minimal_quadratic(&t).unwrap(), Quadratic::new(1, 11, 33));
        let t7 = t.scale(&q(7, 1));
        assert_eq!(minimal_quadratic(&t7).unwrap(), Quadratic::new(1, 77, 1617));
        let t_7 = t.scale(&q(1, 7));
        assert_eq!(minimal_quadratic(&t_7).unwrap(), Quadratic::new(49, 77, 33));
        assert_eq!(k.conductor_of_quadratic(&Quadratic::new(49, 77, 33)).unwrap(), 7.into());
        assert_eq!(k.conductor_of_quadratic(&Quadratic::new(1, 11, 33)).unwrap(), 1.into());
        assert_eq!(conductor_of_quadratic(&Quadratic::new(49, 77, 33)).unwrap(), (11, 7.into()));
        assert!(minimal_quadratic(&k.integer(3)).is_err());
    }

    #[test]
    fn foreign_discriminant_is_reported() {
        let k = k11();
        // X^2 + X + 2 has discriminant -7
        let err = k.conductor_of_quadratic(&Quadratic::new(1, 1, 2)).unwrap_err();
        match err {
            Error::NotInField { disc, d_k: 11 } => assert!(disc.contains("* 7"), "{disc}"),
            e => panic!("{e:?}"),
        }
        // -28 = -1^2 * 28? no: 4 * -7
        assert_eq!(fundamental_part(28), (7, 2));
        assert_eq!(fundamental_part(16), (4, 2));
        assert_eq!(fundamental_part(32), (8, 2));
        assert_eq!(fundamental_part(99), (11, 3));
    }

    #[test]
    fn gamma_tau_for_unit_level_structure() {
        // (tau)/(tau + 1) style element: gamma = (1, 0; 1, 1)
        let k = k11();
        let t = k.tau();
        let den = &t + &k.integer(1);
        let g = t.div(&den).unwrap();
        assert_eq!(g.u(), &q(55, 46));
        assert_eq!(g.v(), &q(1, 46));
        assert_eq!(den.norm(), q(23, 1));
        let form = minimal_quadratic(&g).unwrap();
        assert_eq!(form.a, 23.into());
        assert_eq!(k.conductor_of_quadratic(&form).unwrap(), 1.into());
    }

    fn elem() -> impl Strategy<Value = FieldElement> {
        (-1000i64..1000, 1i64..50, -1000i64..1000, 1i64..50)
            .prop_map(|(a, b, c, d)| FieldElement::new(q(a, b), q(c, d), 11))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn norm_is_multiplicative(x in elem(), y in elem()) {
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }
    }

    proptest! {
        #[test]
        fn minimal_quadratic_vanishes(x in elem()) {
            prop_assume!(!x.is_rational());
            let f = minimal_quadratic(&x).unwrap();
            let val = &(&x * &x).scale(&BigRational::from_integer(f.a.clone()))
                + &x.scale(&BigRational::from_integer(f.b.clone()));
            let val = &val + &FieldElement::new(BigRational::from_integer(f.c.clone()), BigRational::zero(), 11);
            prop_assert!(val.is_zero());
            prop_assert!(f.is_primitive() && f.a.is_positive());
        }
    }
}
