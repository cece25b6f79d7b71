//! The prime pairs `(p, q)` indexing the explicit cycles, and the `q`
//! searches of the rank argument.

use alloc::format;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::arith::{gcd, inv_mod, is_prime, kronecker};
use crate::error::{Error, Result};
use crate::isogeny::LevelStructure;
use crate::quadfield::{ImagQuadField, Splitting};

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = alloc::vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Residues `r mod d_K` coprime to `d_K` with `(-d_K | r) = -1`: an odd
/// prime is inert exactly when it falls in one of these classes.
pub fn inert_residues(d_k: u64) -> Vec<u64> {
    (1..d_k).filter(|&r| gcd(r, d_k) == 1 && kronecker(-(d_k as i64), r) == -1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexPair {
    pub p: u64,
    pub q: u64,
}

/// Membership test for the set of admissible pairs attached to a level
/// structure: `p > q` odd primes prime to `c d_K |c tau + d|^2`, `q` inert,
/// `p = q = 1 (mod N)`.
#[derive(Clone, Debug)]
pub struct IndexSet {
    pub field: ImagQuadField,
    pub ls: LevelStructure,
    /// `c d_K |c tau + d|^2`.
    pub bad: u64,
}

impl IndexSet {
    pub fn new(field: ImagQuadField, ls: LevelStructure) -> Result<Self> {
        if !crate::quadfield::heegner_hypothesis(field.d_k(), ls.level)? {
            return Err(Error::HeegnerHypothesis { d_k: field.d_k(), level: ls.level });
        }
        let norm =
            ls.cd_norm(&field).to_u64().ok_or_else(|| Error::Precondition("|c tau + d|^2 exceeds 64 bits".into()))?;
        let bad = (ls.c.unsigned_abs() as u128 * field.d_k() as u128 * norm as u128)
            .try_into()
            .map_err(|_| Error::Precondition("c d_K |c tau + d|^2 exceeds 64 bits".into()))?;
        Ok(Self { field, ls, bad })
    }

    /// Conditions on a single prime shared by `p` and `q`.
    pub fn admissible(&self, x: u64) -> bool {
        x % 2 == 1 && is_prime(x) && gcd(x, self.bad) == 1 && x % self.ls.level == 1 % self.ls.level
    }

    pub fn admissible_q(&self, q: u64) -> bool {
        self.admissible(q) && self.field.splitting_type(q).ok() == Some(Splitting::Inert)
    }

    pub fn contains(&self, pair: IndexPair) -> bool {
        pair.p > pair.q && self.admissible(pair.p) && self.admissible_q(pair.q)
    }

    /// Reason a pair is rejected, for error messages.
    pub fn check(&self, pair: IndexPair) -> Result<()> {
        let n = self.ls.level;
        let fail = |why: &str| Err(Error::Precondition(format!("(p, q) = ({}, {}): {why}", pair.p, pair.q)));
        if pair.p <= pair.q {
            return fail("need p > q");
        }
        for (name, x) in [("p", pair.p), ("q", pair.q)] {
            if x % 2 == 0 || !is_prime(x) {
                return fail(&format!("{name} is not an odd prime"));
            }
            if gcd(x, self.bad) != 1 {
                return fail(&format!("{name} divides c d_K |c tau + d|^2 = {}", self.bad));
            }
            if x % n != 1 % n {
                return Err(Error::Normalization { multiplier: x % n, level: n });
            }
        }
        if !self.admissible_q(pair.q) {
            return fail("q is not inert");
        }
        Ok(())
    }

    /// Least admissible `q`.
    pub fn smallest_q(&self) -> u64 {
        (3..).step_by(2).find(|&q| self.admissible_q(q)).expect("Dirichlet")
    }

    /// Every admissible pair with `q < p <= limit`, ordered by `(q, p)`.
    pub fn index_stream(&self, limit: u64) -> Vec<IndexPair> {
        let primes = sieve(limit);
        let ps: Vec<u64> = primes.iter().copied().filter(|&x| self.admissible(x)).collect();
        let mut out = Vec::new();
        for &q in ps.iter().filter(|&&q| self.admissible_q(q)) {
            out.extend(ps.iter().filter(|&&p| p > q).map(|&p| IndexPair { p, q }));
        }
        out
    }

    /// Admissible `p > q` in increasing order, starting at `from`.
    pub fn p_stream(&self, q: u64, from: u64) -> impl Iterator<Item = u64> + '_ {
        (from.max(q + 1)..).filter(move |&p| self.admissible(p))
    }
}

/// Outcome of the `q` search for a fixed auxiliary prime `ell`.
#[derive(Clone, Debug)]
pub struct QSearch {
    pub ell: u64,
    /// `N d_K ell`.
    pub modulus: u64,
    /// Classes mod `modulus` meeting `q = 1 (N)`, `q inert`, `q = -1 (ell)`.
    pub residues: Vec<u64>,
    pub primes: Vec<u64>,
    /// Whether `ell > 6 N d_K`, the size used in the rank argument.
    pub exceeds_rank_bound: bool,
}

/// The first `count` primes `q` with `q = 1 (mod N)`, `q` inert,
/// `q = -1 (mod ell)` and `q` prime to `c d_K |c tau + d|^2`.
pub fn theorem_q_search(set: &IndexSet, ell: u64, count: usize) -> Result<QSearch> {
    let n = set.ls.level;
    let d_k = set.field.d_k();
    if !is_prime(ell) {
        return Err(Error::Precondition(format!("ell = {ell} is not prime")));
    }
    if gcd(ell, n * d_k) != 1 || gcd(n, d_k) != 1 {
        return Err(Error::Precondition(format!("N = {n}, d_K = {d_k}, ell = {ell} are not pairwise coprime")));
    }
    if set.field.u_k() % ell == 0 {
        return Err(Error::Precondition(format!("ell = {ell} divides u_K")));
    }
    let modulus = n
        .checked_mul(d_k)
        .and_then(|m| m.checked_mul(ell))
        .ok_or_else(|| Error::Precondition("N d_K ell exceeds 64 bits".into()))?;
    let mut residues: Vec<u64> =
        inert_residues(d_k).into_iter().map(|r| crt(&[(1 % n, n), (r, d_k), (ell - 1, ell)])).collect();
    residues.sort_unstable();
    let mut primes = Vec::with_capacity(count);
    'outer: for block in 0u64.. {
        for &r in &residues {
            let Some(q) = block.checked_mul(modulus).and_then(|b| b.checked_add(r)) else {
                break 'outer;
            };
            if primes.len() == count {
                break 'outer;
            }
            if q > 2 && set.admissible_q(q) && (q + 1) % ell == 0 {
                primes.push(q);
            }
        }
        if residues.is_empty() {
            break;
        }
    }
    Ok(QSearch { ell, modulus, residues, primes, exceeds_rank_bound: ell > 6 * n * d_k })
}

/// Chinese remainder for pairwise coprime moduli.
fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, mi) in parts {
        // x + m t = r (mod mi)
        let inv = inv_mod((m % mi as u128) as i64, mi).expect("coprime moduli") as u128;
        let diff = (r as u128 + mi as u128 - x % mi as u128) % mi as u128;
        let t = diff * inv % mi as u128;
        x += m * t;
        m *= mi as u128;
    }
    (x % m) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> IndexSet {
        let k = ImagQuadField::new(11).unwrap();
        IndexSet::new(k, LevelStructure::from_t(1, 1, 5).unwrap()).unwrap()
    }

    #[test]
    fn sieve_small() {
        assert_eq!(sieve(30), alloc::vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(sieve(1).is_empty());
    }

    #[test]
    fn inert_classes_mod_11() {
        // squares mod 11 are 1,3,4,5,9; -11 = 0, so (-11|r) = (r|11)
        assert_eq!(inert_residues(11), alloc::vec![2, 6, 7, 8, 10]);
    }

    #[test]
    fn pairs() {
        let s = set();
        assert_eq!(s.bad, 11 * 23);
        assert_eq!(s.smallest_q(), 41);
        let pairs = s.index_stream(400);
        assert!(!pairs.is_empty());
        assert!(pairs.windows(2).all(|w| (w[0].q, w[0].p) < (w[1].q, w[1].p)));
        for pr in &pairs {
            assert!(s.contains(*pr) && s.check(*pr).is_ok());
        }
        assert!(!s.contains(IndexPair { p: 47, q: 41 })); // 47 = 2 mod 5
        assert!(matches!(s.check(IndexPair { p: 47, q: 41 }), Err(Error::Normalization { multiplier: 2, .. })));
        assert!(!s.admissible(23));
    }

    #[test]
    fn q_search_for_ell_13() {
        let s = set();
        let out = theorem_q_search(&s, 13, 3).unwrap();
        assert_eq!(out.primes.len(), 3);
        assert_eq!(out.modulus, 5 * 11 * 13);
        assert!(!out.exceeds_rank_bound);
        for &q in &out.primes {
            assert!(is_prime(q) && q % 5 == 1 && (q + 1) % 13 == 0);
            assert_eq!(crate::quadfield::splitting_type(q, 11).unwrap(), Splitting::Inert);
        }
        assert!(out.primes.windows(2).all(|w| w[0] < w[1]));
        assert!(theorem_q_search(&s, 11, 3).is_err());
        assert!(theorem_q_search(&s, 15, 3).is_err());
    }
}
