use alloc::format;
use core::cell::RefCell;
use core::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{Error, Result};

/// Working precision and requested absolute accuracy.
///
/// Carries a constants cache (pi, ln 2, ...) for the transcendental
/// functions, so a context is `Send` but not `Sync`; clone one per thread.
pub struct PrecisionContext {
    bits: usize,
    target_eps: f64,
    consts: RefCell<Consts>,
}

impl PrecisionContext {
    pub const DEFAULT_BITS: usize = 128;
    pub const MIN_BITS: usize = 53;

    pub fn new(bits: usize, target_eps: f64) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidContext(format!("bits = {bits} < {}", Self::MIN_BITS)));
        }
        if !(target_eps > 0.0) || !target_eps.is_finite() {
            return Err(Error::InvalidContext(format!("target_eps = {target_eps} must be positive")));
        }
        // 2^(1 - bits) underflows f64 past ~1075 bits, in which case every
        // positive eps is admissible.
        let floor = libm::ldexp(1.0, 1 - bits as i32);
        if target_eps < floor {
            return Err(Error::InvalidContext(format!(
                "target_eps = {target_eps:e} is below the rounding floor 2^(1-{bits})"
            )));
        }
        let consts = Consts::new().map_err(|_| Error::PrecisionExhausted("constants cache"))?;
        Ok(Self { bits, target_eps, consts: RefCell::new(consts) })
    }

    /// Context with `target_eps = 2^(16 - bits)`.
    pub fn with_bits(bits: usize) -> Result<Self> {
        Self::new(bits, libm::ldexp(1.0, 16 - bits as i32).max(f64::MIN_POSITIVE))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn target_eps(&self) -> f64 {
        self.target_eps
    }

    /// Same precision, different accuracy target.
    pub fn with_target_eps(&self, target_eps: f64) -> Result<Self> {
        Self::new(self.bits, target_eps)
    }

    /// Same accuracy target at a different precision.
    pub fn with_precision(&self, bits: usize) -> Result<Self> {
        Self::new(bits, self.target_eps)
    }

    pub(crate) fn pi(&self) -> BigFloat {
        self.consts.borrow_mut().pi(self.bits, RoundingMode::ToEven)
    }

    pub(crate) fn with_consts<R>(&self, f: impl FnOnce(&mut Consts) -> R) -> R {
        f(&mut self.consts.borrow_mut())
    }
}

impl Clone for PrecisionContext {
    fn clone(&self) -> Self {
        Self::new(self.bits, self.target_eps).expect("cloning a validated context")
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BITS, 1e-30).expect("default context is valid")
    }
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext").field("bits", &self.bits).field("target_eps", &self.target_eps).finish()
    }
}
