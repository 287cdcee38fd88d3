//! One PASS/FAIL line per acceptance criterion. Budgets are wall-clock seconds.

mod common;

use std::time::{Duration, Instant};

use formconn::connection::split_connection;
use formconn::matrix::pairing;
use formconn::moduli::{assemble_global, coadjoint_fixes, in_isotropy_group, moment_map, orbit_dimensions};
use formconn::toral::{ad_kernel_dim, graded_ad_solve, tame_corestriction};
use formconn::{
    orbit_equivalent, CMat, Field, FormalConnection, FormalType, LMat, OneForm, ParahoricContext, Scalar, Series,
    Stratum, TorusData,
};
use num_integer::Integer;
use rand::Rng;

const BUDGET_SLOPE: u64 = 30;
const BUDGET_DUALITY: u64 = 5;
const BUDGET_CORES: u64 = 30;
const BUDGET_DIAG: u64 = 60;
const BUDGET_WEYL: u64 = 60;
const BUDGET_FUND: u64 = 30;
const BUDGET_SPLIT: u64 = 60;
const BUDGET_MODULI: u64 = 30;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn mono(c: i64, k: i64) -> Series {
    Series::monomial(Scalar::from_int(c), k)
}

fn slope_corpus() -> Check {
    let witten = LMat::from_rows(vec![vec![Series::zero(), mono(1, -3)], vec![mono(1, -2), Series::zero()]]);
    let c = FormalConnection::new(witten, &OneForm::dt(), Field::Q);
    let s = ok(c.slope())?;
    ensure!(s.slope == (3, 2), "Witten slope {:?}", s.slope);
    let mut corpus = vec![c.m.clone()];
    let mut rng = common::rng(19);
    for i in 0..31 {
        corpus.push(common::random_matrix(&mut rng, 1 + i % 4, -6, 0.25));
    }
    for m in &corpus {
        let got = ok(FormalConnection::from_dt_over_t(m.clone(), Field::QI).slope())?.slope;
        let oracle = common::katz_slope(m, 48).ok_or("growth oracle did not stabilize")?;
        ensure!(got == oracle, "slope {got:?} vs oracle {oracle:?}");
    }
    Ok(format!("{} connections, Witten 3/2", corpus.len()))
}

fn graded_basis(p: &ParahoricContext, d: i64) -> Vec<LMat> {
    p.graded_positions(d)
        .into_iter()
        .map(|(a, b, c)| {
            let mut x = LMat::zero(p.n());
            x.set(a, b, Series::t_pow(c));
            x
        })
        .collect()
}

fn duality() -> Check {
    let nu = OneForm::dt_over_t();
    let mut pairs = 0;
    for n in 1..=3 {
        for e in [1, n] {
            let p = if e == 1 { ParahoricContext::maximal(n) } else { ParahoricContext::iwahori(n) };
            for s in -3..=3 {
                for d1 in s..s + 2 * e as i64 {
                    for d2 in 1 - s..1 - s + 2 * e as i64 {
                        for x in graded_basis(&p, d1) {
                            for y in graded_basis(&p, d2) {
                                ensure!(ok(pairing(&x, &y, &nu))?.is_zero(), "n={n} e={e} s={s}: P^s not orthogonal to P^(1-s)");
                                pairs += 1;
                            }
                        }
                    }
                }
                let bx = graded_basis(&p, s);
                let by = graded_basis(&p, -s);
                ensure!(bx.len() == by.len(), "graded pieces of unequal size");
                let rows = bx
                    .iter()
                    .map(|x| by.iter().map(|y| pairing(x, y, &nu)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>();
                ensure!(!CMat::from_rows(ok(rows)?).det().is_zero(), "n={n} e={e} s={s}: degenerate graded pairing");
            }
        }
    }
    Ok(format!("{pairs} orthogonal pairs"))
}

fn toral_realization(x: &LMat, t: TorusData) -> Result<LMat, String> {
    let p = ok(tame_corestriction(x, t))?;
    let mut acc = LMat::zero(t.n());
    for (j, s) in p.blocks.iter().enumerate() {
        for (d, c) in s.terms() {
            acc = acc.add(&t.block_monomial(j, d).scale(c));
        }
    }
    Ok(acc)
}

fn corestriction() -> Check {
    let mut rng = common::rng(101);
    let nu = OneForm::dt_over_t();
    for _ in 0..200 {
        let e = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=4 / e);
        let t = TorusData::new(e, m);
        let ctx = t.context();
        let l = rng.gen_range(-4..=3);
        let x = common::element_of(&mut rng, &ctx, l, 4, 0.5);
        let px = toral_realization(&x, t)?;
        // idempotent, and the identity on the torus
        ensure!(toral_realization(&px, t)? == px, "not idempotent");
        // preserves the filtration
        ensure!(ok(ctx.contains(&px, l))?, "filtration not preserved");
        // bimodule map over the torus
        let j = rng.gen_range(0..m);
        let d = rng.gen_range(-2..=2);
        let z = t.block_monomial(j, d);
        ensure!(toral_realization(&z.mul(&x), t)? == z.mul(&px), "not left linear");
        ensure!(toral_realization(&x.mul(&z), t)? == px.mul(&z), "not right linear");
        // orthogonal: the kernel pairs to zero with the torus
        let diff = x.sub(&px);
        for j in 0..m {
            for s in -6..=6 {
                ensure!(ok(pairing(&t.block_monomial(j, s), &diff, &nu))?.is_zero(), "kernel not orthogonal");
            }
        }
    }
    // ad solve succeeds exactly once the toral part is removed
    for _ in 0..50 {
        let a = common::formal_type(&mut rng, 4, 5);
        let t = a.torus();
        let ctx = t.context();
        let l = rng.gen_range(1..=4);
        let y = common::element_of(&mut rng, &ctx, l - a.r, 1, 0.6);
        let y = y.sub(&toral_realization(&y, t)?);
        let x = ok(graded_ad_solve(&a.toral(), a.r, &y, l))?;
        let resid = x.commutator(&a.realize()).sub(&y);
        ensure!(ok(ctx.contains(&resid, l - a.r + 1))?, "ad solve residual too large");
    }
    for n in 1..=6usize {
        for r in 0..n as i64 {
            for l in -2..=2 {
                let k = ad_kernel_dim(n, r, l);
                ensure!((k == 1) == (r.gcd(&(n as i64)) == 1), "kernel dimension n={n} r={r}: {k}");
            }
        }
    }
    Ok("200 projections, 50 solves, kernels n<=6".into())
}

fn diagonalize_uniqueness() -> Check {
    let mut rng = common::rng(7);
    for _ in 0..50 {
        let a = common::formal_type(&mut rng, 4, 5);
        let ctx = a.torus().context();
        let p = common::unipotent(&mut rng, &ctx, 1, 3);
        let c = ok(FormalConnection::from_dt_over_t(a.realize(), Field::Q).gauge(&p, 40))?;
        let d = ok(c.diagonalize(0))?;
        ensure!(d.formal_type == a, "recovered {:?} from {:?}", d.formal_type, a);
    }
    Ok("50 formal types".into())
}

fn weyl_round_trip() -> Check {
    let mut rng = common::rng(5);
    for _ in 0..50 {
        let a = common::formal_type(&mut rng, 4, 4);
        let w = common::weyl(&mut rng, &a);
        let wm = ok(w.gauge_matrix(a.e, Field::Q))?;
        let c = ok(FormalConnection::from_dt_over_t(a.realize(), Field::Q).gauge(&wm, 60))?;
        let d = ok(c.diagonalize(0))?;
        let found = ok(orbit_equivalent(&a, &d.formal_type, Field::Q))?.witness;
        ensure!(found.as_ref() == Some(&w), "expected {w:?}, found {found:?}");
        // with an extra P^1 gauge the block order may change, the orbit may not
        let p = common::unipotent(&mut rng, &a.torus().context(), 1, 2);
        let d = ok(ok(c.gauge(&p, 60))?.diagonalize(0))?;
        ensure!(ok(orbit_equivalent(&a, &d.formal_type, Field::Q))?.witness.is_some(), "perturbed input left the orbit");
    }
    Ok("50 pairs".into())
}

fn brute_fundamental(s: &Stratum) -> Result<bool, String> {
    let mut pw = LMat::identity(s.n());
    for m in 1..=s.n() as i64 {
        pw = pw.mul(&s.beta);
        if ok(s.p.contains(&pw, 1 - s.r * m))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fundamental_oracle() -> Check {
    let mut rng = common::rng(13);
    let mut yes = 0;
    for i in 0..500 {
        let n = 1 + i % 4;
        let p = common::random_chain(&mut rng, n);
        let r = rng.gen_range(0..=5);
        let density = [0.2, 0.5, 0.9][rng.gen_range(0..3)];
        let beta = common::element_of(&mut rng, &p, -r, 2, density);
        let s = ok(Stratum::new(p, r, beta))?;
        let got = ok(s.is_fundamental())?;
        ensure!(got == brute_fundamental(&s)?, "disagreement on {s:?}");
        yes += got as usize;
    }
    Ok(format!("500 strata, {yes} fundamental"))
}

fn splitting() -> Check {
    let mut rng = common::rng(71);
    let mut done = 0;
    while done < 20 {
        let a = common::formal_type(&mut rng, 4, 4);
        if a.m < 2 {
            continue;
        }
        let t = a.torus();
        let ctx = t.context();
        let p = common::unipotent(&mut rng, &ctx, 1, 3);
        let c = ok(FormalConnection::from_dt_over_t(a.realize(), Field::Q).gauge(&p, 40))?;
        let parts: Vec<Vec<usize>> = (0..a.m).map(|j| t.block(j)).collect();
        let digits = a.r + 2 * a.e as i64 + 2;
        let (_, s) = ok(split_connection(&c, &ctx, a.r, &parts, digits))?;
        let mut off = s.m.clone();
        for idx in &parts {
            for &x in idx {
                for &y in idx {
                    off.set(x, y, Series::zero());
                }
            }
        }
        ensure!(ok(ctx.contains(&off, 1 - a.r + digits))?, "off-diagonal blocks too large for {a:?}");
        let types = parts
            .iter()
            .map(|idx| FormalConnection::from_dt_over_t(s.m.select(idx), Field::Q).diagonalize(0).map(|d| d.formal_type))
            .collect::<Result<Vec<_>, _>>();
        let sum = ok(FormalType::direct_sum(&ok(types)?))?;
        ensure!(ok(orbit_equivalent(&sum, &a, Field::Q))?.witness.is_some(), "blocks do not recover {a:?}");
        done += 1;
    }
    Ok("20 split connections".into())
}

fn moduli() -> Check {
    let mut rng = common::rng(23);
    for i in 0..40 {
        let cfg = common::random_config(&mut rng, 1 + i % 3, 1 + i % 3, i % 2 == 0, 3);
        let asm = ok(assemble_global(&cfg, Field::Q, 4))?;
        for e in &cfg.entries {
            ensure!(ok(asm.global.principal_part(&e.part.point))? == e.part, "principal part at {} not recovered", e.part.point);
        }
        ensure!(moment_map(&cfg).is_zero(), "moment map nonzero");
    }
    let (mut members, mut others) = (0, 0);
    while members + others < 100 {
        let a = common::formal_type(&mut rng, 3, 4);
        if a.r < 2 {
            continue;
        }
        let i = rng.gen_range(1..=a.r / 2);
        let (p, perturbed) = common::isotropy_sample(&mut rng, &a, i);
        let member = ok(in_isotropy_group(&a, &p, i))?;
        ensure!(member == ok(coadjoint_fixes(&a, &p, i))?, "isotropy test disagrees with the coadjoint action");
        ensure!(member != perturbed, "isotropy test misclassified a sample");
        if member {
            members += 1;
        } else {
            others += 1;
        }
    }
    for _ in 0..20 {
        let a = common::formal_type(&mut rng, 4, 4);
        let d = ok(orbit_dimensions(&a, a.r + 2))?;
        ensure!(d.dim_m_tilde - d.dim_m == 2 * a.m as i64, "dimension gap for {a:?}");
    }
    Ok(format!("40 configs, {members}+{others} isotropy samples, 20 dimensions"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 8] = [
        ("slope oracle equivalence", BUDGET_SLOPE, slope_corpus),
        ("duality suite", BUDGET_DUALITY, duality),
        ("tame corestriction", BUDGET_CORES, corestriction),
        ("diagonalization uniqueness", BUDGET_DIAG, diagonalize_uniqueness),
        ("Weyl orbit round trip", BUDGET_WEYL, weyl_round_trip),
        ("fundamental test oracle", BUDGET_FUND, fundamental_oracle),
        ("splitting contract", BUDGET_SPLIT, splitting),
        ("moduli layer", BUDGET_MODULI, moduli),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let res = match res {
            Ok(_) if took > Duration::from_secs(*budget) => Err(format!("over budget ({budget} s)")),
            r => r,
        };
        match res {
            Ok(info) => println!("criterion {}: PASS  {name} ({info}; {:.1} s)", k + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} ({:.1} s)", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
