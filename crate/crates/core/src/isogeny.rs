//! Cyclic `q`- and `pq`-isogenies out of `C/O_K` and their CM points.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{ext_gcd, gcd, gcd_i64, inv_mod, is_prime};
use crate::error::{Error, Result};
use crate::quadfield::{FieldElement, ImagQuadField, Splitting};

/// A point of `P^1(F_q)`; finite points use the least nonnegative residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1Point {
    Finite(u64),
    Infinity,
}

impl P1Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, P1Point::Infinity)
    }

    /// `P^1(F_q)` in the order `0, 1, ..., q-1, inf`.
    pub fn all(q: u64) -> impl Iterator<Item = P1Point> {
        (0..q).map(P1Point::Finite).chain(core::iter::once(P1Point::Infinity))
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(b) => write!(f, "{b}"),
            P1Point::Infinity => f.write_str("inf"),
        }
    }
}

impl core::str::FromStr for P1Point {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "oo" => Ok(P1Point::Infinity),
            _ => s.parse::<u64>().map(P1Point::Finite).map_err(|_| Error::Precondition(format!("bad P^1 point {s:?}"))),
        }
    }
}

/// The torsion point `t = (c tau + d)/N` together with a completion
/// `(a, b; c, d)` in `SL_2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelStructure {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub level: u64,
}

impl LevelStructure {
    /// Completes `(c, d)` to a matrix of determinant 1.
    ///
    /// `c = 1` gives `(1, d-1; 1, d)`. Otherwise `d` is first moved by
    /// the smallest multiple of `N` making it coprime to `c`, then `b` is
    /// taken of least absolute value, then `a`.
    pub fn from_t(c: i64, d: i64, level: u64) -> Result<Self> {
        if level < 5 {
            return Err(Error::Precondition(format!("level N = {level} must be at least 5")));
        }
        let n = level as i64;
        if c.rem_euclid(n) == 0 {
            return Err(Error::Precondition(format!("c = {c} is 0 mod N = {level}")));
        }
        if gcd(gcd_i64(c, d), level) != 1 {
            return Err(Error::Precondition(format!("gcd(c, d, N) != 1 for (c, d) = ({c}, {d})")));
        }
        if c == 1 {
            return Ok(Self { a: 1, b: d - 1, c, d, level });
        }
        let d = (0..)
            .flat_map(|k: i64| [d + k * n, d - k * n])
            .find(|&dd| gcd_i64(c, dd) == 1)
            .expect("gcd(c, d, N) = 1 leaves a unit in the progression");
        // x d + y c = 1, so (a, b) = (x, -y) + t (c, d)
        let (_, x, y) = ext_gcd(d, c);
        let (a0, b0) = (x, -y);
        let best = if d == 0 {
            // c = +-1; b is fixed and a = a0 + t c can be made 0
            (0, b0)
        } else {
            let t0 = Integer::div_floor(&-b0, &d);
            [t0 - 1, t0, t0 + 1, t0 + 2]
                .into_iter()
                .map(|t| (a0 + t * c, b0 + t * d))
                .min_by_key(|&(a, b)| (b.unsigned_abs(), a.unsigned_abs(), a < 0))
                .expect("nonempty")
        };
        let (a, b) = best;
        debug_assert_eq!(a as i128 * d as i128 - b as i128 * c as i128, 1);
        Ok(Self { a, b, c, d, level })
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    /// `|c tau + d|^2`.
    pub fn cd_norm(&self, field: &ImagQuadField) -> BigInt {
        let ctd = &field.tau().scale(&int(self.c)) + &field.integer(self.d);
        ctd.norm().to_integer()
    }

    /// `gamma(tau) = (a tau + b)/(c tau + d)`, computed by field division.
    pub fn gamma_tau(&self, field: &ImagQuadField) -> FieldElement {
        let tau = field.tau();
        let num = &tau.scale(&int(self.a)) + &field.integer(self.b);
        let den = &tau.scale(&int(self.c)) + &field.integer(self.d);
        num.div(&den).expect("c tau + d is nonzero")
    }

    /// `gamma(tau) = tau/|c tau+d|^2 + (ac|tau|^2 - b c d_K + b d)/|c tau+d|^2`.
    pub fn gamma_tau_expanded(&self, field: &ImagQuadField) -> FieldElement {
        let dk = BigInt::from(field.d_k());
        let tau_norm = BigInt::from(field.d_k() * (field.d_k() + 1) / 4);
        let (a, b, c, d) = (BigInt::from(self.a), BigInt::from(self.b), BigInt::from(self.c), BigInt::from(self.d));
        let m = self.cd_norm(field);
        let shift = &a * &c * tau_norm - &b * &c * dk + &b * &d;
        let inv_m = BigRational::new(BigInt::one(), m);
        &field.tau().scale(&inv_m) + &field.rational(BigRational::from_integer(shift) * inv_m)
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn check_odd_prime(name: &str, x: u64) -> Result<()> {
    if x % 2 == 0 || !is_prime(x) {
        return Err(Error::Precondition(format!("{name} = {x} is not an odd prime")));
    }
    Ok(())
}

fn check_beta(beta: P1Point, q: u64) -> Result<()> {
    match beta {
        P1Point::Finite(b) if b >= q => Err(Error::Precondition(format!("beta = {b} is not reduced mod {q}"))),
        _ => Ok(()),
    }
}

/// A CM point `tau' = u + v sqrt(-d_K)` in the upper half-plane, with the
/// bookkeeping of the isogeny that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CMPoint {
    pub value: FieldElement,
    /// Degree of the isogeny, `q` or `pq`.
    pub degree: u64,
    pub conductor: BigInt,
    pub kappa: u64,
    /// `Im(value) = gamma_scale * sqrt(d_K) / (2 |c tau + d|^2)`.
    pub gamma_scale: BigRational,
    pub beta: P1Point,
    pub p: Option<u64>,
    pub q: u64,
    /// `|c tau + d|^2`; 1 for the untwisted points.
    pub cd_norm: BigInt,
    /// The isogeny sends `t` to `multiplier / N`; `None` without a level structure.
    pub multiplier: Option<u64>,
    pub level: Option<u64>,
}

impl CMPoint {
    /// The normalisation `t -> 1/N`, independent of `r`.
    pub fn check_normalization(&self) -> Result<()> {
        match (self.multiplier, self.level) {
            (Some(m), Some(n)) if m % n == 1 % n => Ok(()),
            (Some(m), Some(n)) => Err(Error::Normalization { multiplier: m, level: n }),
            _ => Err(Error::Precondition("CM point carries no level structure".into())),
        }
    }
}

/// `q tau` for `beta = inf`, `(tau + beta)/q` otherwise.
pub fn tau_q_beta(field: &ImagQuadField, q: u64, beta: P1Point) -> Result<CMPoint> {
    check_odd_prime("q", q)?;
    check_beta(beta, q)?;
    if field.d_k() % q == 0 {
        return Err(Error::Ramified { q });
    }
    let tau = field.tau();
    let qq = int(q as i64);
    let (value, gamma_scale, kappa) = match beta {
        P1Point::Infinity => (tau.scale(&qq), qq, 1),
        P1Point::Finite(b) => {
            let v = &tau + &field.integer(b as i64);
            (v.scale(&qq.recip()), qq.recip(), q)
        }
    };
    let conductor = field.conductor(&value)?;
    Ok(CMPoint {
        value,
        degree: q,
        conductor,
        kappa,
        gamma_scale,
        beta,
        p: None,
        q,
        cd_norm: BigInt::one(),
        multiplier: None,
        level: None,
    })
}

/// `q gamma(tau)` for `beta = inf`, `(gamma(tau) + beta)/q` otherwise.
pub fn tau_t(field: &ImagQuadField, ls: &LevelStructure, q: u64, beta: P1Point) -> Result<CMPoint> {
    check_odd_prime("q", q)?;
    check_beta(beta, q)?;
    if ls.c.rem_euclid(q as i64) == 0 {
        return Err(Error::Precondition(format!("q = {q} divides c = {}", ls.c)));
    }
    if field.d_k() % q == 0 {
        return Err(Error::Ramified { q });
    }
    let g = ls.gamma_tau(field);
    let qq = int(q as i64);
    let (value, gamma_scale, kappa, multiplier) = match beta {
        P1Point::Infinity => (g.scale(&qq), qq, 1, q),
        P1Point::Finite(b) => {
            let v = &g + &field.integer(b as i64);
            (v.scale(&qq.recip()), qq.recip(), q, 1)
        }
    };
    let conductor = field.conductor(&value)?;
    Ok(CMPoint {
        value,
        degree: q,
        conductor,
        kappa,
        gamma_scale,
        beta,
        p: None,
        q,
        cd_norm: ls.cd_norm(field),
        multiplier: Some(multiplier % ls.level),
        level: Some(ls.level),
    })
}

/// `p tau^t_{q,beta}`.
pub fn tau_pq_t(field: &ImagQuadField, ls: &LevelStructure, p: u64, q: u64, beta: P1Point) -> Result<CMPoint> {
    check_odd_prime("p", p)?;
    if p == q {
        return Err(Error::Precondition(format!("p = q = {p}")));
    }
    let base = tau_t(field, ls, q, beta)?;
    if ls.level % q == 0 {
        return Err(Error::Precondition(format!("q = {q} divides N = {}", ls.level)));
    }
    let cd_norm = &base.cd_norm;
    let bad = [
        (ls.c.unsigned_abs() % p == 0, "c"),
        (field.d_k() % p == 0, "d_K"),
        (ls.level % p == 0, "N"),
        ((cd_norm % BigInt::from(p)).is_zero(), "|c tau + d|^2"),
    ];
    if let Some((_, what)) = bad.iter().find(|(hit, _)| *hit) {
        return Err(Error::Precondition(format!("p = {p} divides {what}")));
    }
    let pp = int(p as i64);
    let value = base.value.scale(&pp);
    let conductor = field.conductor(&value)?;
    let multiplier = match beta {
        P1Point::Infinity => (p as u128 * q as u128 % ls.level as u128) as u64,
        P1Point::Finite(_) => p % ls.level,
    };
    Ok(CMPoint {
        value,
        degree: p * q,
        conductor,
        kappa: base.kappa,
        gamma_scale: base.gamma_scale * pp,
        beta,
        p: Some(p),
        q,
        cd_norm: base.cd_norm,
        multiplier: Some(multiplier),
        level: Some(ls.level),
    })
}

/// The `beta'` with `psi^t_{q,beta}` isomorphic to `phi_{q,beta'}`.
pub fn kernel_match(ls: &LevelStructure, q: u64, beta: P1Point) -> Result<P1Point> {
    check_beta(beta, q)?;
    let c_inv = inv_mod(ls.c, q).ok_or_else(|| Error::Precondition(format!("q = {q} divides c = {}", ls.c)))?;
    let r = |x: i128| x.rem_euclid(q as i128) as u64;
    Ok(match beta {
        P1Point::Infinity => P1Point::Finite(r(c_inv as i128 * ls.d as i128)),
        P1Point::Finite(b) => {
            let lead = r(ls.a as i128 + ls.c as i128 * b as i128);
            if lead == 0 {
                P1Point::Infinity
            } else {
                let inv = inv_mod(lead as i64, q).expect("q prime") as i128;
                P1Point::Finite(r(inv * (ls.b as i128 + ls.d as i128 * b as i128)))
            }
        }
    })
}

/// The `q + 1` points `tau_{q,beta}` and their conductors.
#[derive(Clone, Debug)]
pub struct IsogenyCensus {
    pub q: u64,
    pub splitting: Splitting,
    pub points: Vec<(P1Point, BigInt)>,
    /// Number of points of conductor 1 and of conductor `q`.
    pub maximal: usize,
    pub conductor_q: usize,
    /// `(q + 1)/u_K` when `q` is inert and `u_K` divides `q + 1`.
    pub class_count: Option<u64>,
}

pub fn enumerate_isogeny_classes(field: &ImagQuadField, q: u64) -> Result<IsogenyCensus> {
    let splitting = field.splitting_type(q)?;
    if splitting == Splitting::Ramified {
        return Err(Error::Ramified { q });
    }
    let points =
        P1Point::all(q).map(|b| tau_q_beta(field, q, b).map(|pt| (b, pt.conductor))).collect::<Result<Vec<_>>>()?;
    let qb = BigInt::from(q);
    let maximal = points.iter().filter(|(_, c)| c.is_one()).count();
    let conductor_q = points.iter().filter(|(_, c)| *c == qb).count();
    let u = field.u_k();
    let class_count = (splitting == Splitting::Inert && (q + 1) % u == 0).then(|| (q + 1) / u);
    Ok(IsogenyCensus { q, splitting, points, maximal, conductor_q, class_count })
}

/// Conductor as a machine integer, for reporting.
pub fn conductor_u64(pt: &CMPoint) -> Option<u64> {
    if pt.conductor.is_zero() {
        None
    } else {
        pt.conductor.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k11() -> ImagQuadField {
        ImagQuadField::new(11).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn completion_rules() {
        let ls = LevelStructure::from_t(1, 1, 5).unwrap();
        assert_eq!((ls.a, ls.b, ls.c, ls.d), (1, 0, 1, 1));
        let ls = LevelStructure::from_t(1, 4, 5).unwrap();
        assert_eq!((ls.a, ls.b), (1, 3));
        for (c, d) in [(2, 1), (3, 2), (2, 4), (4, 0), (-3, 7), (6, 9), (12, 5)] {
            let ls = LevelStructure::from_t(c, d, 5).unwrap();
            assert_eq!(ls.det(), 1, "({c}, {d})");
            assert_eq!(ls.c, c);
            assert_eq!((ls.d - d).rem_euclid(5), 0);
        }
        assert!(LevelStructure::from_t(5, 1, 5).is_err());
        assert!(LevelStructure::from_t(0, 1, 5).is_err());
        assert!(LevelStructure::from_t(1, 1, 4).is_err());
        assert!(LevelStructure::from_t(3, 3, 6).is_err());
    }

    #[test]
    fn gamma_tau_two_routes() {
        let k = k11();
        for (c, d) in [(1, 1), (2, 1), (3, 4), (1, 0), (-2, 3)] {
            let ls = LevelStructure::from_t(c, d, 5).unwrap();
            assert_eq!(ls.gamma_tau(&k), ls.gamma_tau_expanded(&k), "({c}, {d})");
        }
        let ls = LevelStructure::from_t(1, 1, 5).unwrap();
        assert_eq!(ls.cd_norm(&k), 23.into());
        let g = ls.gamma_tau(&k);
        assert_eq!((g.u().clone(), g.v().clone()), (q(55, 46), q(1, 46)));
    }

    #[test]
    fn untwisted_points() {
        let k = k11();
        let inf = tau_q_beta(&k, 7, P1Point::Infinity).unwrap();
        assert_eq!(inf.value, k.tau().scale(&q(7, 1)));
        assert_eq!(inf.conductor, 7.into());
        let zero = tau_q_beta(&k, 7, P1Point::Finite(0)).unwrap();
        assert_eq!(zero.value, k.tau().scale(&q(1, 7)));
        assert_eq!(zero.conductor, 7.into());
        assert!(matches!(tau_q_beta(&k, 11, P1Point::Infinity), Err(Error::Ramified { q: 11 })));
        assert!(tau_q_beta(&k, 7, P1Point::Finite(7)).is_err());
    }

    #[test]
    fn census() {
        let k = k11();
        let c7 = enumerate_isogeny_classes(&k, 7).unwrap();
        assert_eq!(c7.points.len(), 8);
        assert_eq!(c7.conductor_q, 8);
        assert_eq!(c7.class_count, Some(8));
        let c3 = enumerate_isogeny_classes(&k, 3).unwrap();
        assert_eq!(c3.maximal, 2);
        assert_eq!(c3.conductor_q, 2);
        let k3 = ImagQuadField::new(3).unwrap();
        let c = enumerate_isogeny_classes(&k3, 7).unwrap();
        assert_eq!(c.points.len(), 8);
        assert_eq!(c.class_count, None); // 7 splits in Q(sqrt(-3))
        let c5 = enumerate_isogeny_classes(&k3, 5).unwrap();
        assert_eq!(c5.class_count, Some(2));
        assert!(matches!(enumerate_isogeny_classes(&k, 11), Err(Error::Ramified { .. })));
    }

    #[test]
    fn kernel_table() {
        let ls = LevelStructure::from_t(1, 1, 5).unwrap();
        assert_eq!(kernel_match(&ls, 7, P1Point::Infinity).unwrap(), P1Point::Finite(1));
        assert_eq!(kernel_match(&ls, 7, P1Point::Finite(6)).unwrap(), P1Point::Infinity);
        assert_eq!(kernel_match(&ls, 7, P1Point::Finite(2)).unwrap(), P1Point::Finite(3));
        let ls7 = LevelStructure::from_t(7, 1, 5).unwrap();
        assert!(kernel_match(&ls7, 7, P1Point::Infinity).is_err());
    }

    #[test]
    fn twisted_points() {
        let k = k11();
        let ls = LevelStructure::from_t(1, 1, 5).unwrap();
        let g = ls.gamma_tau(&k);
        let pt = tau_pq_t(&k, &ls, 29, 7, P1Point::Infinity).unwrap();
        assert_eq!(pt.value, g.scale(&q(203, 1)));
        assert_eq!(pt.conductor, 203.into());
        assert_eq!((pt.kappa, pt.gamma_scale.clone()), (1, q(203, 1)));
        let pt0 = tau_pq_t(&k, &ls, 29, 7, P1Point::Finite(0)).unwrap();
        assert_eq!(pt0.value, g.scale(&q(29, 7)));
        assert_eq!((pt0.kappa, pt0.gamma_scale.clone()), (7, q(29, 7)));
        assert_eq!(pt0.conductor, 203.into());
        // Im = gamma sqrt(d)/(2 |c tau + d|^2)
        assert_eq!(pt0.value.v(), &(q(29, 7) / q(2 * 23, 1)));
        assert!(tau_pq_t(&k, &ls, 23, 7, P1Point::Infinity).is_err());
        assert!(tau_pq_t(&k, &ls, 5, 7, P1Point::Infinity).is_err());
    }

    #[test]
    fn normalization_multiplier() {
        let k = k11();
        let ls = LevelStructure::from_t(1, 1, 5).unwrap();
        assert!(tau_pq_t(&k, &ls, 61, 41, P1Point::Infinity).unwrap().check_normalization().is_ok());
        assert!(tau_pq_t(&k, &ls, 61, 41, P1Point::Finite(3)).unwrap().check_normalization().is_ok());
        let bad = tau_pq_t(&k, &ls, 29, 7, P1Point::Finite(3)).unwrap();
        assert!(matches!(bad.check_normalization(), Err(Error::Normalization { multiplier: 4, level: 5 })));
        assert!(tau_t(&k, &ls, 41, P1Point::Finite(0)).unwrap().check_normalization().is_ok());
        assert!(tau_q_beta(&k, 7, P1Point::Infinity).unwrap().check_normalization().is_err());
    }
}
