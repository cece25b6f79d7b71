use astro_float::BigFloat;
use heegner_core::aj::{heegner_line_integral, kernel_integral};
use heegner_core::asym::i_closed_gamma;
use heegner_core::isogeny::{enumerate_isogeny_classes, tau_pq_t, tau_q_beta, LevelStructure, P1Point};
use heegner_core::modforms::{Coefficient, Newform};
use heegner_core::numerics::{quad_adaptive, BallComplex, Mag, PrecisionContext, UpperLimit};
use heegner_core::quadfield::{FieldElement, ImagQuadField, Splitting};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Whether `z` lies in `Z + Z t`.
fn in_lattice(z: &FieldElement, t: &FieldElement) -> bool {
    let y = z.v() / t.v();
    let x = z.u() - &y * t.u();
    x.is_integer() && y.is_integer()
}

/// Index of `{x in O_K : x L in L}` in `O_K` for `L = Z + Z t`, by direct search.
fn multiplier_ring_conductor(field: &ImagQuadField, t: &FieldElement, limit: u64) -> u64 {
    let omega = field.tau();
    (1..=limit)
        .find(|&f| {
            let w = omega.scale(&BigRational::from_integer(f.into()));
            in_lattice(&w, t) && in_lattice(&(&w * t), t)
        })
        .expect("conductor below limit")
}

fn eta_form(terms: usize) -> Newform {
    let mut c = vec![0i64; terms];
    c[0] = 1;
    for n in 1..terms {
        for step in [n, 5 * n] {
            if step >= terms {
                continue;
            }
            for _ in 0..4 {
                for i in (step..terms).rev() {
                    c[i] -= c[i - step];
                }
            }
        }
    }
    let coeffs = c.into_iter().map(|x| Coefficient::Integer(x.into())).collect();
    Newform::new(5, 4, "eta", Some(1), coeffs).unwrap()
}

#[test]
fn q_point_conductors_match_multiplier_rings() {
    for d_k in [3u64, 4, 7, 8, 11, 19, 20, 23, 24, 31] {
        let field = ImagQuadField::new(d_k).unwrap();
        for q in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            if d_k % q == 0 {
                continue;
            }
            for beta in P1Point::all(q) {
                let pt = tau_q_beta(&field, q, beta).unwrap();
                let want = multiplier_ring_conductor(&field, &pt.value, 1000);
                assert_eq!(pt.conductor, BigInt::from(want), "d_K={d_k} q={q} beta={beta}");
            }
        }
    }
}

#[test]
fn pq_point_conductors_match_multiplier_rings() {
    let field = ImagQuadField::new(11).unwrap();
    let ls = LevelStructure::from_t(1, 1, 5).unwrap();
    for (p, q) in [(61u64, 41u64), (71, 41), (101, 61), (131, 101)] {
        for beta in P1Point::all(q).step_by(7).chain([P1Point::Infinity]) {
            let pt = tau_pq_t(&field, &ls, p, q, beta).unwrap();
            let want = multiplier_ring_conductor(&field, &pt.value, 20_000);
            assert_eq!(pt.conductor, BigInt::from(want), "p={p} q={q} beta={beta}");
            assert_eq!(want, p * q);
        }
    }
}

#[test]
fn census_for_small_primes() {
    let field = ImagQuadField::new(11).unwrap();
    for q in (3u64..=101).filter(|&q| heegner_core::arith::is_prime(q) && q != 11) {
        let c = enumerate_isogeny_classes(&field, q).unwrap();
        assert_eq!(c.points.len() as u64, q + 1);
        match c.splitting {
            Splitting::Inert => assert_eq!(c.conductor_q as u64, q + 1, "q={q}"),
            Splitting::Split => {
                assert_eq!(c.maximal, 2, "q={q}");
                assert_eq!(c.conductor_q as u64, q - 1, "q={q}");
            }
            Splitting::Ramified => unreachable!(),
        }
    }
}

#[test]
fn balls_contain_higher_precision_values() {
    let lo = PrecisionContext::new(128, 1e-25).unwrap();
    let hi = PrecisionContext::new(256, 1e-50).unwrap();
    for r in 0..=4 {
        for y in ["3/10", "1", "7/2", "12"] {
            let y: BigRational = y.parse().unwrap();
            let a = kernel_integral(r, 3, &BallComplex::from_ratio(&y, &lo), &lo).unwrap();
            let b = kernel_integral(r, 3, &BallComplex::from_ratio(&y, &hi), &hi).unwrap();
            assert!(a.contains(&BallComplex::new(b.re().clone(), b.im().clone(), heegner_core::numerics::Mag::zero())));
            let g = &y * BigRational::from_integer(7.into());
            let a = i_closed_gamma(11, &BigInt::from(23), r, &g, &lo).unwrap();
            let b = i_closed_gamma(11, &BigInt::from(23), r, &g, &hi).unwrap();
            assert!(a.overlaps(&b) && b.radius_f64() <= a.radius_f64());
        }
    }
    let f = eta_form(300);
    let field = ImagQuadField::new(11).unwrap();
    let ls = LevelStructure::from_t(1, 1, 5).unwrap();
    for beta in [P1Point::Infinity, P1Point::Finite(0), P1Point::Finite(17)] {
        let pt = tau_pq_t(&field, &ls, 61, 41, beta).unwrap();
        let a = heegner_line_integral(&f, &pt, &lo).unwrap();
        let b = heegner_line_integral(&f, &pt, &hi).unwrap();
        assert!(a.overlaps(&b));
        assert!(b.radius_f64() <= a.radius_f64());
    }
}

#[test]
fn lattice_membership_helper() {
    let field = ImagQuadField::new(7).unwrap();
    let t = field.tau();
    assert!(in_lattice(&field.integer(3), &t));
    assert!(in_lattice(&(&t * &t), &t));
    let half = field.rational(BigRational::new(BigInt::one(), 2.into()));
    assert!(!in_lattice(&half, &t));
}

#[test]
fn kernel_closed_form_matches_quadrature() {
    let ctx = PrecisionContext::new(128, 1e-30).unwrap();
    let qctx = PrecisionContext::new(128, 1e-36).unwrap();
    let span = 16.0;
    for r in 0..=4u32 {
        for n in [1u64, 2, 5] {
            let a = BallComplex::pi(&ctx).mul_2exp(1).mul_int(&BigInt::from(n), &ctx).unwrap();
            for y in [0.3, 1.0, 3.5] {
                let yf = BigFloat::from_f64(y, 160);
                let yb = BallComplex::from_real(yf.clone(), &ctx);
                let y2 = yb.sqr(&ctx).unwrap();
                // e^{a Y} E over [Y, Y + span]; the rest is below (Y+span)^{2r} e^{-a span}/a
                let g = |t: &BallComplex| {
                    t.sqr(&qctx)?
                        .sub(&y2, &qctx)?
                        .pow_u(r, &qctx)?
                        .mul(&a.mul(&t.sub(&yb, &qctx)?, &qctx)?.neg().exp(&qctx)?, &qctx)
                };
                let top = y + span;
                let a_f = 2.0 * std::f64::consts::PI * n as f64;
                let tail = Mag::from_f64(top.powi(2 * r as i32) * (-a_f * span).exp() / a_f * 2.0);
                let scaled =
                    quad_adaptive(g, &yf, &UpperLimit::Infinite { cutoff: BigFloat::from_f64(top, 160) }, &tail, &qctx)
                        .unwrap();
                let quad = scaled.mul(&a.mul(&yb, &ctx).unwrap().neg().exp(&ctx).unwrap(), &ctx).unwrap();
                let closed = kernel_integral(r, n, &yb, &ctx).unwrap();
                let rel = closed.sub(&quad, &ctx).unwrap().div(&quad, &ctx).unwrap().abs_f64();
                assert!(rel <= 10.0 * ctx.target_eps(), "r={r} n={n} Y={y}: {rel:e}");
                assert!(closed.overlaps(&quad));
            }
        }
    }
}
