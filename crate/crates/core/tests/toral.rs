mod common;

use formconn::matrix::pairing;
use formconn::toral::{ad_kernel_dim, graded_ad_solve, tame_corestriction, varpi_power};
use formconn::{LMat, OneForm, Scalar, Series, ToralElement, TorusData};
use num_integer::Integer;
use proptest::prelude::*;

fn random_toral(rng: &mut impl rand::Rng, t: TorusData, lo: i64, hi: i64) -> ToralElement {
    let coeffs: Vec<Vec<Scalar>> = (0..t.m).map(|_| (lo..=hi).map(|_| common::small(rng, -3, 3)).collect()).collect();
    ToralElement::from_coeffs(t, lo, &coeffs)
}

fn random_torus(rng: &mut impl rand::Rng) -> TorusData {
    let e = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4 / e);
    TorusData::new(e, m)
}

#[test]
fn corestriction_examples() {
    let mut rng = common::rng(3);
    for _ in 0..20 {
        let t = random_torus(&mut rng);
        let z = random_toral(&mut rng, t, -3, 2);
        let back = tame_corestriction(&z.realize(), t).unwrap();
        for j in 0..t.m {
            for d in -3..=2 {
                assert_eq!(back.coeff(j, d).unwrap(), z.coeff(j, d).unwrap());
            }
        }
    }
    // off-block matrices vanish
    let t = TorusData::new(2, 2);
    let mut x = LMat::zero(4);
    x.set(0, 2, Series::t_pow(-1));
    x.set(3, 1, Series::t_pow(2));
    assert!(tame_corestriction(&x, t).unwrap().blocks.iter().all(|b| b.is_exact_zero()));
    // [[0,1],[0,0]] against the ramified torus: (1/2) varpi_E and nothing else
    let mut x = LMat::zero(2);
    x.set(0, 1, Series::one());
    let p = tame_corestriction(&x, TorusData::new(2, 1)).unwrap();
    let terms: Vec<(i64, Scalar)> = p.blocks[0].terms().map(|(k, c)| (k, c.clone())).collect();
    assert_eq!(terms, vec![(1, Scalar::from_frac(1, 2))]);
}

fn toral_realization(x: &LMat, t: TorusData) -> LMat {
    let p = tame_corestriction(x, t).unwrap();
    let mut acc = LMat::zero(t.n());
    for (j, s) in p.blocks.iter().enumerate() {
        for (d, c) in s.terms() {
            acc = acc.add(&t.block_monomial(j, d).scale(c));
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corestriction_preserves_filtration(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let t = random_torus(&mut rng);
        let ctx = t.context();
        let l = rand::Rng::gen_range(&mut rng, -4..=3);
        let x = common::element_of(&mut rng, &ctx, l, 4, 0.5);
        prop_assert!(ctx.contains(&toral_realization(&x, t), l).unwrap());
    }

    #[test]
    fn corestriction_is_orthogonal_projection(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let t = random_torus(&mut rng);
        let ctx = t.context();
        let x = common::element_of(&mut rng, &ctx, -3, 7, 0.5);
        let diff = x.sub(&toral_realization(&x, t));
        let nu = OneForm::dt_over_t();
        for j in 0..t.m {
            for s in -6..=6 {
                prop_assert!(pairing(&t.block_monomial(j, s), &diff, &nu).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn corestriction_commutes_with_normalizer_fragment(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let t = random_torus(&mut rng);
        let ctx = t.context();
        let x = common::element_of(&mut rng, &ctx, -2, 5, 0.5);
        // block permutation
        let mut perm: Vec<usize> = (0..t.m).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rand::Rng::gen_range(&mut rng, 0..=i));
        }
        let mut pm = LMat::zero(t.n());
        for (j, &k) in perm.iter().enumerate() {
            for a in 0..t.e {
                pm.set(k * t.e + a, j * t.e + a, Series::one());
            }
        }
        let conj = pm.mul(&x).mul(&pm.transpose());
        prop_assert_eq!(toral_realization(&conj, t), pm.mul(&toral_realization(&x, t)).mul(&pm.transpose()));
        // per-block varpi_E monomials
        let s: Vec<i64> = (0..t.m).map(|_| rand::Rng::gen_range(&mut rng, -2..=2)).collect();
        let parts: Vec<Vec<usize>> = (0..t.m).map(|j| t.block(j)).collect();
        let d = LMat::assemble(t.n(), &parts, &s.iter().map(|&k| varpi_power(t.e, k)).collect::<Vec<_>>());
        let dinv = LMat::assemble(t.n(), &parts, &s.iter().map(|&k| varpi_power(t.e, -k)).collect::<Vec<_>>());
        let conj = d.mul(&x).mul(&dinv);
        prop_assert_eq!(toral_realization(&conj, t), toral_realization(&x, t));
    }

    #[test]
    fn ad_solve_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = common::formal_type(&mut rng, 4, 5);
        let t = a.torus();
        let ctx = t.context();
        let l = rand::Rng::gen_range(&mut rng, 1..=4);
        let y = common::element_of(&mut rng, &ctx, l - a.r, 2, 0.6);
        let x = graded_ad_solve(&a.toral(), a.r, &y, l).unwrap();
        prop_assert!(ctx.contains(&x, l).unwrap());
        let resid = x.commutator(&a.realize()).add(&toral_realization(&ctx.homogeneous_part(&y, l - a.r).unwrap(), t)).sub(&y);
        prop_assert!(ctx.contains(&resid, l - a.r + 1).unwrap());
        prop_assert!(toral_realization(&x, t).is_exact_zero());
    }
}

#[test]
fn ad_solve_examples() {
    // toral targets need no correction
    let t = TorusData::new(2, 1);
    let xi = ToralElement::from_coeffs(t, -1, &[vec![Scalar::one()]]);
    let y = varpi_power(2, 2);
    assert!(graded_ad_solve(&xi, 1, &y, 3).unwrap().is_exact_zero());
    // diag(y0, -y0) varpi^{l-1}: solution diag(x0, x0 - y0) varpi^l with x0 = y0/2
    for l in 1..=3 {
        let y = LMat::diag(&[Series::constant(Scalar::from_int(4)), Series::constant(Scalar::from_int(-4))]).mul(&varpi_power(2, l - 1));
        let x = graded_ad_solve(&xi, 1, &y, l).unwrap();
        let expect = LMat::diag(&[Series::constant(Scalar::from_int(2)), Series::constant(Scalar::from_int(-2))]).mul(&varpi_power(2, l));
        assert_eq!(x, expect);
    }
    // split torus: [X, diag(a, b)/t] = [[0, y], [0, 0]] t^{l-1} gives X_01 = y/(b - a)
    let t = TorusData::new(1, 2);
    let xi = ToralElement::from_coeffs(t, -1, &[vec![Scalar::from_int(5)], vec![Scalar::from_int(2)]]);
    let mut y = LMat::zero(2);
    y.set(0, 1, Series::monomial(Scalar::from_int(6), 1));
    let x = graded_ad_solve(&xi, 1, &y, 2).unwrap();
    let mut expect = LMat::zero(2);
    expect.set(0, 1, Series::monomial(Scalar::from_int(-2), 2));
    assert_eq!(x, expect);
}

#[test]
fn kernel_dimension_is_gcd() {
    // [D varpi^l, varpi^{-r}] = (D - shift^r D) varpi^{l-r}: the kernel is the
    // shift-invariant diagonals, one dimension per orbit of i -> i + r mod n
    for n in 1..=6usize {
        for r in 0..n as i64 {
            for l in -3..=3 {
                let k = ad_kernel_dim(n, r, l);
                assert_eq!(k, r.gcd(&(n as i64)) as usize, "n={n} r={r} l={l}");
                assert_eq!(k == 1, r.gcd(&(n as i64)) == 1);
            }
        }
    }
}
