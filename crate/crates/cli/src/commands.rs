use heegner_core::aj::aj_representative;
use heegner_core::asym::{cusp_constant, gamma_kappa, lem_est_bound, sweep_row};
use heegner_core::isogeny::{enumerate_isogeny_classes, kernel_match, tau_pq_t, tau_t, LevelStructure, P1Point};
use heegner_core::numerics::PrecisionContext;
use heegner_core::periods::j_functional;
use heegner_core::primes::{theorem_q_search, IndexSet};
use heegner_core::quadfield::ImagQuadField;
use heegner_core::Error as CoreError;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::cli::{AjArgs, FieldArgs, IsogArgs, PeriodsArgs, PrimesArgs, SweepArgs};
use crate::error::{CliError, Result};
use crate::newform_file::load_newform;
use crate::output::{complex_cells, real_cell, ConfigKey, Report};
use crate::RunConfig;

fn parse_beta(s: &str) -> Result<P1Point> {
    s.parse().map_err(|_| CliError::parse("isogeny", format!("beta {s:?} is neither a residue nor `inf`")))
}

fn setup(field: &FieldArgs, level: u64) -> Result<(ImagQuadField, LevelStructure)> {
    let k = ImagQuadField::new(field.d_k)?;
    if !heegner_core::quadfield::heegner_hypothesis(field.d_k, level)? {
        return Err(CoreError::HeegnerHypothesis { d_k: field.d_k, level }.into());
    }
    Ok((k, LevelStructure::from_t(field.c, field.d, level)?))
}

fn base_key(cfg: &RunConfig, command: &str) -> ConfigKey {
    let mut key = ConfigKey::default();
    key.push("command", command).push("prec", cfg.prec).push("eps", format!("{:e}", cfg.eps));
    key
}

fn field_key(key: &mut ConfigKey, f: &FieldArgs) {
    key.push("dk", f.d_k).push("c", f.c).push("d", f.d);
}

pub fn cmd_aj(cfg: &RunConfig, a: &AjArgs) -> Result<Report> {
    let nf = load_newform(&a.newform)?;
    let f = &nf.newform;
    let (field, ls) = setup(&a.field, f.level())?;
    let beta = parse_beta(&a.beta)?;
    let point = match a.p {
        Some(p) => tau_pq_t(&field, &ls, p, a.q, beta)?,
        None => tau_t(&field, &ls, a.q, beta)?,
    };
    let ctx = cfg.ctx()?;
    let res = aj_representative(f, &point, &ctx)?;

    let mut key = base_key(cfg, "aj");
    field_key(&mut key, &a.field);
    key.push("newform", &nf.sha256)
        .push("p", a.p.map_or("-".into(), |p| p.to_string()))
        .push("q", a.q)
        .push("beta", beta);
    let mut report = Report::new(
        "aj",
        key,
        &[
            "label",
            "p",
            "q",
            "beta",
            "r",
            "Re",
            "Im",
            "radius",
            "|value|",
            "N",
            "X",
            "v",
            "conductor",
            "constant",
            "terms",
            "integral_re",
            "integral_im",
            "integral_rad",
        ],
    );
    report.note("m_kk", &res.m_kk);
    let c = &res.constant;
    let (ir, ii, irad) = complex_cells(&res.integral, &ctx);
    let (ar, ai, arad) = complex_cells(&res.representative, &ctx);
    let (abs, _) = real_cell(&res.representative.abs(&ctx)?, &ctx);
    report.rows.push(vec![
        res.label.clone(),
        a.p.map_or("-".into(), |p| p.to_string()),
        a.q.to_string(),
        beta.to_string(),
        res.r.to_string(),
        ar,
        ai,
        arad,
        abs,
        res.level.to_string(),
        point.value.u().to_string(),
        point.value.v().to_string(),
        point.conductor.to_string(),
        format!("i^{}*{}*pi^{}", c.i_power, c.rational, c.pi_power),
        res.terms.to_string(),
        ir,
        ii,
        irad,
    ]);
    Ok(report)
}

pub fn cmd_isog(cfg: &RunConfig, a: &IsogArgs) -> Result<Report> {
    let field = ImagQuadField::new(a.d_k)?;
    let census = enumerate_isogeny_classes(&field, a.q)?;
    let ls = LevelStructure::from_t(a.c, a.d, a.level)?;
    let mut key = base_key(cfg, "isog");
    key.push("dk", a.d_k).push("q", a.q).push("c", a.c).push("d", a.d).push("level", a.level);
    let mut report = Report::new("isog", key, &["q", "beta", "conductor", "beta'", "u", "v"]);
    report.note("splitting", format!("{:?}", census.splitting).to_lowercase());
    report.note("maximal", census.maximal);
    report.note("conductor_q", census.conductor_q);
    if let Some(h) = census.class_count {
        report.note("classes", h);
    }
    for (beta, cond) in &census.points {
        let pt = heegner_core::isogeny::tau_q_beta(&field, a.q, *beta)?;
        // undefined when q | c
        let matched = kernel_match(&ls, a.q, *beta).map_or("-".into(), |b| b.to_string());
        report.rows.push(vec![
            a.q.to_string(),
            beta.to_string(),
            cond.to_string(),
            matched,
            pt.value.u().to_string(),
            pt.value.v().to_string(),
        ]);
    }
    Ok(report)
}

pub fn cmd_sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<Report> {
    let nf = load_newform(&a.newform)?;
    let f = &nf.newform;
    let (field, ls) = setup(&a.field, f.level())?;
    let set = IndexSet::new(field, ls)?;
    let q = match a.q {
        Some(q) if !set.admissible_q(q) => {
            return Err(CoreError::Precondition(format!("q = {q} is not an admissible inert prime")).into())
        }
        Some(q) => q,
        None => set.smallest_q(),
    };
    let beta = parse_beta(&a.beta)?;
    if !(a.gamma_min > 0.0 && a.gamma_min <= a.gamma_max) {
        return Err(CliError::parse("cli", format!("bad gamma range [{}, {}]", a.gamma_min, a.gamma_max)));
    }
    let (lo, hi) = match beta {
        P1Point::Infinity => (a.gamma_min / q as f64, a.gamma_max / q as f64),
        P1Point::Finite(_) => (a.gamma_min * q as f64, a.gamma_max * q as f64),
    };
    let (lo, hi) = (lo.ceil().max(0.0) as u64, hi.floor() as u64);
    let mut ps: Vec<u64> = set.p_stream(q, lo).take_while(|&p| p <= hi).collect();
    if let Some(m) = a.max_rows {
        ps.truncate(m);
    }

    let mut key = base_key(cfg, "sweep");
    field_key(&mut key, &a.field);
    key.push("newform", &nf.sha256)
        .push("q", q)
        .push("beta", beta)
        .push("gamma_min", a.gamma_min)
        .push("gamma_max", a.gamma_max)
        .push("max_rows", a.max_rows.map_or("-".into(), |m| m.to_string()));
    let mut report = Report::new(
        "sweep",
        key,
        &[
            "p",
            "q",
            "beta",
            "gamma",
            "kappa",
            "X",
            "Y",
            "I",
            "|J|",
            "|AJ|",
            "rel_err",
            "bound",
            "rel_err_upper",
            "within_bound",
            "Y_rad",
            "I_rad",
            "|J|_rad",
            "|AJ|_rad",
        ],
    );
    let Some(&p_first) = ps.first() else {
        return Ok(report);
    };
    let m_f = ls.cd_norm(&field).to_f64().unwrap_or(f64::NAN);
    let y_of = |p: u64| {
        let (g, _) = gamma_kappa(p, q, beta);
        g.to_f64().unwrap_or(f64::NAN) * (field.d_k() as f64).sqrt() / (2.0 * m_f)
    };
    let c_majorant = cusp_constant(f, y_of(p_first) * (1.0 - 1e-12))?;
    // resolve the smallest bound with room to spare
    let p_last = *ps.last().expect("nonempty");
    let smallest = lem_est_bound(&field, &ls, p_last, q, beta, c_majorant);
    let eps = cfg.eps.min(smallest * 1e-10);
    let bits = cfg.prec.max((-eps.log2()).ceil() as usize + 64);
    PrecisionContext::new(bits, eps)?;
    report.note("q", q);
    report.note("c_majorant", format!("{c_majorant:.6e}"));
    report.note("working_bits", bits);
    report.note("working_eps", format!("{eps:.3e}"));

    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| CliError::Io(e.to_string()))?;
    let rows: Vec<Result<Vec<String>>> = pool.install(|| {
        ps.par_iter()
            .map_init(
                || PrecisionContext::new(bits, eps),
                |ctx, &p| {
                    let ctx = ctx.as_ref().map_err(|e| CliError::Core(e.clone()))?;
                    let row = sweep_row(f, &field, &ls, p, q, beta, c_majorant, ctx)?;
                    let d = &row.datum;
                    let (y, y_rad) = real_cell(&d.y, ctx);
                    let (i, i_rad) = real_cell(&d.i, ctx);
                    let (j, j_rad) = real_cell(&d.j.magnitude, ctx);
                    let aj_abs = row.aj.abs(ctx)?;
                    let (aj, aj_rad) = real_cell(&aj_abs, ctx);
                    let rel = row.rel_err.abs(ctx)?;
                    let (rel_s, _) = rel.re_decimal(6, ctx);
                    Ok(vec![
                        p.to_string(),
                        q.to_string(),
                        beta.to_string(),
                        d.gamma.to_string(),
                        d.kappa.to_string(),
                        d.x.to_string(),
                        y,
                        i,
                        j,
                        aj,
                        rel_s,
                        format!("{:.6e}", row.bound),
                        format!("{:.6e}", row.rel_err_upper()),
                        row.within_bound().to_string(),
                        y_rad,
                        i_rad,
                        j_rad,
                        aj_rad,
                    ])
                },
            )
            .collect()
    });
    for r in rows {
        report.rows.push(r?);
    }
    Ok(report)
}

pub fn cmd_primes(cfg: &RunConfig, a: &PrimesArgs) -> Result<Report> {
    let (field, ls) = setup(&a.field, a.level)?;
    let set = IndexSet::new(field, ls)?;
    let mut key = base_key(cfg, "primes");
    field_key(&mut key, &a.field);
    key.push("level", a.level);
    let mut report;
    match a.ell {
        Some(ell) => {
            key.push("ell", ell).push("count", a.count);
            let out = theorem_q_search(&set, ell, a.count)?;
            report = Report::new("primes", key, &["q"]);
            report.note("ell", ell);
            report.note("modulus", out.modulus);
            report.note("classes", out.residues.len());
            report.note("exceeds_rank_bound", out.exceeds_rank_bound);
            report.rows = out.primes.iter().map(|q| vec![q.to_string()]).collect();
        }
        None => {
            key.push("limit", a.limit);
            report = Report::new("primes", key, &["p", "q"]);
            report.rows =
                set.index_stream(a.limit).into_iter().map(|pr| vec![pr.p.to_string(), pr.q.to_string()]).collect();
        }
    }
    report.plain = true;
    Ok(report)
}

pub fn parse_poly(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<BigInt>()
                .map_err(|_| CliError::parse("periods", format!("bad coefficient {c:?} in {s:?}")))
        })
        .collect()
}

pub fn cmd_periods(cfg: &RunConfig, a: &PeriodsArgs) -> Result<Report> {
    let nf = load_newform(&a.newform)?;
    let poly = parse_poly(&a.poly)?;
    let ctx = cfg.ctx()?;
    let j = j_functional(&nf.newform, &poly, &ctx)?;
    let mut key = base_key(cfg, "periods");
    key.push("newform", &nf.sha256).push("poly", &a.poly);
    let mut report = Report::new("periods", key, &["label", "poly", "re", "im", "radius"]);
    let (re, im, rad) = complex_cells(&j.value, &ctx);
    let poly_s = poly.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    report.rows.push(vec![nf.newform.label().to_string(), poly_s, re, im, rad]);
    Ok(report)
}
