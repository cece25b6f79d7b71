use alloc::vec::Vec;

use astro_float::{BigFloat, RoundingMode};

use super::{BallComplex, Mag, PrecisionContext};
use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Gauss–Legendre order used on every panel.
pub const DEFAULT_ORDER: usize = 20;
/// Panel budget before giving up with `ToleranceNotMet`.
pub const DEFAULT_MAX_PANELS: usize = 1 << 14;

/// Upper end of an integration interval.
#[derive(Clone, Debug)]
pub enum UpperLimit {
    Finite(BigFloat),
    /// `+inf`, truncated at `cutoff`; the caller bounds the remainder
    /// through the `tail_bound` argument of [`quad_adaptive`].
    Infinite {
        cutoff: BigFloat,
    },
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<BigFloat>,
    weights: Vec<BallComplex>,
}

impl GaussLegendre {
    pub fn new(order: usize, ctx: &PrecisionContext) -> Self {
        let p = ctx.bits() + 32;
        let one = BigFloat::from_word(1, p);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 1..=order {
            let guess = libm::cos(core::f64::consts::PI * (i as f64 - 0.25) / (order as f64 + 0.5));
            let mut x = BigFloat::from_f64(guess, p);
            let mut dp = one.clone();
            for _ in 0..8 {
                let (pm, d) = legendre_with_derivative(order, &x, p);
                let step = pm.div(&d, p, RM);
                x = x.sub(&step, p, RM);
                dp = d;
            }
            let (_, d) = legendre_with_derivative(order, &x, p);
            if !d.is_zero() {
                dp = d;
            }
            // w = 2 / ((1 - x^2) P'(x)^2)
            let one_minus = one.sub(&x.mul(&x, p, RM), p, RM);
            let denom = one_minus.mul(&dp.mul(&dp, p, RM), p, RM);
            let w = BigFloat::from_word(2, p).div(&denom, ctx.bits(), RM);
            let rad = Mag::ulp(&w, ctx.bits()).mul_u64(4);
            nodes.push(x);
            weights.push(BallComplex::new(w, BigFloat::from_word(0, ctx.bits()), rad));
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `int_a^b g` by this rule; nodes are treated as exact points.
    pub fn apply<F>(&self, g: &mut F, a: &BigFloat, b: &BigFloat, ctx: &PrecisionContext) -> Result<BallComplex>
    where
        F: FnMut(&BallComplex) -> Result<BallComplex>,
    {
        let p = ctx.bits() + 32;
        let two = BigFloat::from_word(2, p);
        let c = a.add(b, p, RM).div(&two, p, RM);
        let h = b.sub(a, p, RM).div(&two, p, RM);
        let mut acc = BallComplex::zero(ctx);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            let x = c.add(&h.mul(t, p, RM), p, RM);
            let gx = g(&BallComplex::from_real(x, ctx))?;
            acc = acc.add(&gx.mul(w, ctx)?, ctx)?;
        }
        let h_ball = BallComplex::from_real(h.clone(), ctx);
        let mut h_ball = h_ball;
        // h itself was rounded at bits + 32
        h_ball = h_ball.inflate(&Mag::ulp(&h, p));
        acc.mul(&h_ball, ctx)
    }
}

fn legendre_with_derivative(n: usize, x: &BigFloat, p: usize) -> (BigFloat, BigFloat) {
    let mut p0 = BigFloat::from_word(1, p);
    let mut p1 = x.clone();
    for j in 1..n {
        let jj = BigFloat::from_u64(j as u64, p);
        let two_j1 = BigFloat::from_u64(2 * j as u64 + 1, p);
        let next = two_j1.mul(x, p, RM).mul(&p1, p, RM).sub(&jj.mul(&p0, p, RM), p, RM).div(
            &BigFloat::from_u64(j as u64 + 1, p),
            p,
            RM,
        );
        p0 = p1;
        p1 = next;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let nn = BigFloat::from_u64(n as u64, p);
    let num = nn.mul(&x.mul(&p1, p, RM).sub(&p0, p, RM), p, RM);
    let den = x.mul(x, p, RM).sub(&BigFloat::from_word(1, p), p, RM);
    (p1, num.div(&den, p, RM))
}

struct Panel {
    a: BigFloat,
    b: BigFloat,
    whole: BallComplex,
}

/// Adaptive bisection quadrature of `g` over `[a, upper)`.
///
/// Each panel is integrated once whole and once as two halves; the center
/// difference is the panel's error estimate. A panel is accepted once its
/// estimate drops below its share of `ctx.target_eps`. The returned ball
/// carries the accepted estimates, the integrand radii and `tail_bound`.
pub fn quad_adaptive<F>(
    mut g: F,
    a: &BigFloat,
    upper: &UpperLimit,
    tail_bound: &Mag,
    ctx: &PrecisionContext,
) -> Result<BallComplex>
where
    F: FnMut(&BallComplex) -> Result<BallComplex>,
{
    quad_adaptive_with(&mut g, a, upper, tail_bound, DEFAULT_ORDER, DEFAULT_MAX_PANELS, ctx)
}

pub fn quad_adaptive_with<F>(
    g: &mut F,
    a: &BigFloat,
    upper: &UpperLimit,
    tail_bound: &Mag,
    order: usize,
    max_panels: usize,
    ctx: &PrecisionContext,
) -> Result<BallComplex>
where
    F: FnMut(&BallComplex) -> Result<BallComplex>,
{
    let b = match upper {
        UpperLimit::Finite(b) | UpperLimit::Infinite { cutoff: b } => b.clone(),
    };
    let p = ctx.bits() + 32;
    let total_len = crate::numerics::bigfloat_to_f64(&b.sub(a, p, RM));
    if !(total_len >= 0.0) {
        return Err(Error::Domain(alloc::format!("empty or reversed interval (length {total_len})")));
    }
    if total_len == 0.0 {
        return Ok(BallComplex::zero(ctx).inflate(tail_bound));
    }
    let rule = GaussLegendre::new(order, ctx);
    let tol = ctx.target_eps();
    let two = BigFloat::from_word(2, p);

    let whole = rule.apply(g, a, &b, ctx)?;
    let mut stack = alloc::vec![Panel { a: a.clone(), b: b.clone(), whole }];
    let mut acc = BallComplex::zero(ctx);
    let mut est_total = Mag::zero();
    let mut panels = 0usize;

    while let Some(panel) = stack.pop() {
        panels += 1;
        let mid = panel.a.add(&panel.b, p, RM).div(&two, p, RM);
        let left = rule.apply(g, &panel.a, &mid, ctx)?;
        let right = rule.apply(g, &mid, &panel.b, ctx)?;
        let halves = left.add(&right, ctx)?;
        let diff = halves.sub(&panel.whole, ctx)?;
        // center-to-center distance; the radii are already inside `halves`
        let est = BallComplex::new(diff.re().clone(), diff.im().clone(), Mag::zero()).abs_upper();
        let len = crate::numerics::bigfloat_to_f64(&panel.b.sub(&panel.a, p, RM));
        let share = tol * (len / total_len);
        if est.le_f64(share) {
            acc = acc.add(&halves, ctx)?;
            est_total = est_total.add(&est);
            continue;
        }
        if panels + stack.len() >= max_panels {
            let pending = stack.iter().fold(est.to_f64(), |s, pnl| s + pnl.whole.radius_f64());
            return Err(Error::ToleranceNotMet { achieved: est_total.to_f64() + pending });
        }
        // depth-first, left panel processed first
        stack.push(Panel { a: mid.clone(), b: panel.b, whole: right });
        stack.push(Panel { a: panel.a, b: mid, whole: left });
    }
    Ok(acc.inflate(&est_total).inflate(tail_bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(eps: f64) -> PrecisionContext {
        PrecisionContext::new(128, eps).unwrap()
    }

    fn bf(x: f64) -> BigFloat {
        BigFloat::from_f64(x, 192)
    }

    #[test]
    fn constant_on_unit_interval() {
        let c = ctx(1e-25);
        let one = BallComplex::one(&c);
        let r = quad_adaptive(|_| Ok(one.clone()), &bf(0.0), &UpperLimit::Finite(bf(1.0)), &Mag::zero(), &c).unwrap();
        assert!(r.overlaps(&one));
        assert!((r.re_f64() - 1.0).abs() < 1e-20);
        assert!(r.radius_f64() < 1e-20);
    }

    #[test]
    fn decaying_exponential_to_infinity() {
        let c = ctx(1e-30);
        let two_pi = BallComplex::pi(&c).mul_2exp(1);
        // tail: int_T^inf e^{-2 pi y} = e^{-2 pi T} / (2 pi) < e^{-2 pi T}
        let cutoff = 14.0;
        let tail = Mag::exp_of(-2.0 * core::f64::consts::PI * cutoff);
        let r = quad_adaptive(
            |y| two_pi.mul(y, &c)?.neg().exp(&c),
            &bf(0.0),
            &UpperLimit::Infinite { cutoff: bf(cutoff) },
            &tail,
            &c,
        )
        .unwrap();
        let expected = two_pi.recip(&c).unwrap();
        assert!(r.overlaps(&expected), "{r:?} vs {expected:?}");
        assert!(r.radius_f64() < 1e-28);
    }

    #[test]
    fn halving_tolerance_does_not_grow_radius() {
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let eps = 1e-12 / libm::pow(2.0, k as f64 * 4.0);
            let c = ctx(eps);
            let r = quad_adaptive(
                |y| {
                    let s = y.sqr(&c)?;
                    s.neg().exp(&c)
                },
                &bf(-1.0),
                &UpperLimit::Finite(bf(3.0)),
                &Mag::zero(),
                &c,
            )
            .unwrap();
            assert!(r.radius_f64() <= prev, "radius grew at step {k}");
            prev = r.radius_f64();
        }
    }

    #[test]
    fn budget_exhaustion_reports_best_radius() {
        let c = ctx(1e-35);
        let mut g = |y: &BallComplex| y.sqr(&c)?.mul_i_pow(1).mul_2exp(9).exp(&c);
        let err =
            quad_adaptive_with(&mut g, &bf(0.0), &UpperLimit::Finite(bf(40.0)), &Mag::zero(), 4, 8, &c).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { achieved } if achieved > 0.0));
    }
}
