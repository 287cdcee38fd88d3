#![allow(dead_code)]

use formconn::lattice::ParahoricContext;
use formconn::toral::TorusData;
use formconn::moduli::{GlobalConfig, Point, PrincipalPart};
use formconn::{CMat, Field, FormalType, LMat, Scalar, Series, WeylElement};
use num_integer::Integer;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut impl Rng, lo: i64, hi: i64) -> Scalar {
    Scalar::from_int(rng.gen_range(lo..=hi))
}

pub fn frac(rng: &mut impl Rng) -> Scalar {
    Scalar::from_frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn nonzero(rng: &mut impl Rng, lo: i64, hi: i64) -> Scalar {
    loop {
        let x = rng.gen_range(lo..=hi);
        if x != 0 {
            return Scalar::from_int(x);
        }
    }
}

/// A random valid formal type with `n <= max_n`, `1 <= r <= max_r`.
pub fn formal_type(rng: &mut impl Rng, max_n: usize, max_r: i64) -> FormalType {
    loop {
        let e = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=max_n / e);
        let r = rng.gen_range(1..=max_r);
        if (r as usize).gcd(&e) != 1 {
            continue;
        }
        let coeffs: Vec<Vec<Scalar>> = (0..m)
            .map(|_| {
                let mut c = vec![nonzero(rng, -4, 4)];
                for _ in 0..r - 1 {
                    c.push(small(rng, -3, 3));
                }
                c.push(frac(rng));
                c
            })
            .collect();
        let a = FormalType::new(e, m, r, coeffs).unwrap();
        if a.validate(Field::Q).valid {
            return a;
        }
    }
}

/// A random element of `P^k` (homogeneous pieces of degree `k..k+span`).
pub fn element_of(rng: &mut impl Rng, ctx: &ParahoricContext, k: i64, span: i64, density: f64) -> LMat {
    let mut x = LMat::zero(ctx.n());
    for d in k..k + span {
        for (a, b, c) in ctx.graded_positions(d) {
            if rng.gen_bool(density) {
                let v = small(rng, -2, 2);
                if !v.is_zero() {
                    let s = x.get(a, b).add(&Series::monomial(v, c));
                    x.set(a, b, s);
                }
            }
        }
    }
    x
}

/// A random element of the group `P^k` for `k >= 1`: `1 + X`.
pub fn unipotent(rng: &mut impl Rng, ctx: &ParahoricContext, k: i64, span: i64) -> LMat {
    LMat::identity(ctx.n()).add(&element_of(rng, ctx, k, span, 0.5))
}

pub fn weyl(rng: &mut impl Rng, a: &FormalType) -> WeylElement {
    let mut perm: Vec<usize> = (0..a.m).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let galois = (0..a.m)
        .map(|_| {
            let ok: Vec<usize> = (0..a.e).filter(|&g| Field::Q.zeta_power(a.e, g as i64).is_some()).collect();
            ok[rng.gen_range(0..ok.len())]
        })
        .collect();
    let translation = (0..a.m).map(|_| rng.gen_range(-3..=3)).collect();
    WeylElement { perm, galois, translation }
}

pub fn torus_of(a: &FormalType) -> TorusData {
    a.torus()
}

/// Slope by growth of `min_k ord(nabla_tau^i e_k)`: estimate from the last half of
/// `n_iter` iterations, snap to a fraction with denominator at most `n`, then
/// require `W_i + sigma * i` to stay within a fixed band.
pub fn katz_slope(m: &LMat, n_iter: usize) -> Option<(i64, i64)> {
    let n = m.n();
    let window = 60;
    let mut w = vec![0i64; n_iter + 1];
    let mut vs: Vec<Vec<Series>> = (0..n)
        .map(|k| (0..n).map(|i| if i == k { Series::one() } else { Series::zero() }).collect())
        .collect();
    for i in 1..=n_iter {
        let mut best = i64::MAX;
        for v in vs.iter_mut() {
            let mv = m.mul_vec(v);
            let next: Vec<Series> = v.iter().zip(mv).map(|(a, b)| a.tau().add(&b)).collect();
            match next.iter().filter_map(|s| s.order()).min() {
                Some(lo) => {
                    *v = next.iter().map(|s| s.truncate(lo + window)).collect();
                    best = best.min(lo);
                }
                None => *v = next,
            }
        }
        if best == i64::MAX {
            // every basis vector is flat: no growth at all
            return Some((0, 1));
        }
        w[i] = best;
    }
    let half = n_iter / 2;
    let est = -((w[n_iter] - w[half]) as f64) / half as f64;
    let mut snap = (0i64, 1i64);
    let mut err = f64::MAX;
    for q in 1..=n as i64 {
        let p = (est * q as f64).round() as i64;
        let d = (est - p as f64 / q as f64).abs();
        if d < err - 1e-12 {
            err = d;
            snap = (p, q);
        }
    }
    let (p, q) = snap;
    let g = p.gcd(&q).max(1);
    let (p, q) = (p / g, q / g);
    // bounded: q*W_i + p*i stays within a band independent of i
    let vals: Vec<i64> = (half..=n_iter).map(|i| q * w[i] + p * i as i64).collect();
    let spread = vals.iter().max().unwrap() - vals.iter().min().unwrap();
    if spread <= 2 * q * (n as i64 + 1) {
        Some((p.max(0), q))
    } else {
        None
    }
}

/// Random connection matrix with entry orders in `[lo, 1]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize, lo: i64, density: f64) -> LMat {
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let mut terms: Vec<(i64, Scalar)> = Vec::new();
                    for k in lo..=1 {
                        if rng.gen_bool(density) {
                            terms.push((k, small(rng, -3, 3)));
                        }
                    }
                    Series::from_terms(&terms, None)
                })
                .collect()
        })
        .collect();
    LMat::from_rows(rows)
}

/// A random configuration satisfying the residue theorem: distinct integer points,
/// optionally infinity, polar parts of order at most `max_pole`.
pub fn random_config(rng: &mut impl Rng, n: usize, points: usize, infinity: bool, max_pole: i64) -> GlobalConfig {
    let mut xs: Vec<i64> = Vec::new();
    while xs.len() < points {
        let x = rng.gen_range(-5..=5);
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let mut pts: Vec<Point> = xs.into_iter().map(|x| Point::Finite(Scalar::from_int(x))).collect();
    if infinity {
        pts.push(Point::Infinity);
    }
    let count = pts.len();
    let mut total = CMat::zeros(n, n);
    let mut parts = Vec::new();
    for (i, pt) in pts.into_iter().enumerate() {
        let top = rng.gen_range(1..=max_pole);
        let mut m = LMat::zero(n);
        for a in 0..n {
            for b in 0..n {
                let terms: Vec<(i64, Scalar)> = (-top..=-2).map(|k| (k, small(rng, -2, 2))).collect();
                let res = if i + 1 == count {
                    -total.get(a, b)
                } else {
                    small(rng, -3, 3)
                };
                let mut all = terms;
                all.push((-1, res));
                m.set(a, b, Series::from_terms(&all, None));
            }
        }
        total = total.add(&m.coeff_matrix(-1).unwrap());
        parts.push(PrincipalPart::new(pt, m).unwrap());
    }
    GlobalConfig::from_parts(parts)
}

/// A random `p` in `P^i`: `tau * q` with `tau` in `T^i` and `q` in `P^{r+1-i}`, and
/// with probability one half an extra factor with a non-toral degree-`d` term,
/// `i <= d <= r - i`.  Returns whether the extra factor was added.
pub fn isotropy_sample(rng: &mut impl Rng, a: &FormalType, i: i64) -> (LMat, bool) {
    let t = a.torus();
    let ctx = t.context();
    let n = a.n();
    let mut tau = LMat::identity(n);
    for d in i..=a.r {
        for j in 0..a.m {
            tau = tau.add(&t.block_monomial(j, d).scale(&small(rng, -2, 2)));
        }
    }
    let q = LMat::identity(n).add(&element_of(rng, &ctx, a.r + 1 - i, 3, 0.5));
    let mut p = tau.mul(&q);
    let d = rng.gen_range(i..=a.r - i);
    // a single matrix unit is toral only on the diagonal when e = 1
    let pos: Vec<_> = ctx.graded_positions(d).into_iter().filter(|(x, y, _)| a.e > 1 || x != y).collect();
    let perturbed = !pos.is_empty() && rng.gen_bool(0.5);
    if perturbed {
        let (x0, y0, c0) = pos[rng.gen_range(0..pos.len())];
        let mut y = LMat::zero(n);
        y.set(x0, y0, Series::monomial(nonzero(rng, -2, 2), c0));
        p = p.mul(&LMat::identity(n).add(&y));
    }
    (p, perturbed)
}

/// A standard chain on a random composition of `n` (no empty blocks).
pub fn random_chain(rng: &mut impl Rng, n: usize) -> ParahoricContext {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let b = rng.gen_range(1..=left);
        blocks.push(b);
        left -= b;
    }
    ParahoricContext::standard(&blocks).unwrap()
}

/// Largest `r` with `X L^i` inside `L^{i+r}` for every `i`, computed from the
/// lattices `L^i = span{ t^{ceil((i - lambda_k)/e)} e_k }` directly.
pub fn brute_filtration_degree(ctx: &ParahoricContext, x: &LMat) -> Option<i64> {
    let e = ctx.e() as i64;
    let lam: Vec<i64> = ctx.levels().iter().map(|&l| l as i64).collect();
    let ceil = |a: i64| -(-a).div_euclid(e);
    let mut best: Option<i64> = None;
    for i in 0..e {
        for a in 0..ctx.n() {
            for b in 0..ctx.n() {
                if let Some(o) = x.get(a, b).order() {
                    let bound = e * (o + ceil(i - lam[b])) - i + lam[a];
                    best = Some(best.map_or(bound, |v: i64| v.min(bound)));
                }
            }
        }
    }
    best
}
