mod common;

use formconn::moduli::*;
use formconn::{CMat, Error, Field, FormalConnection, FormalType, LMat, Scalar, Series};

fn fin(x: i64) -> Point {
    Point::Finite(Scalar::from_int(x))
}

fn residue_part(pt: Point, r: &CMat) -> PrincipalPart {
    let m = LMat::from_fn(r.rows(), |a, b| Series::monomial(r.get(a, b).clone(), -1));
    PrincipalPart::new(pt, m).unwrap()
}

#[test]
fn two_point_partial_fractions() {
    let r = CMat::from_ints(&[&[1, 2], &[0, -1]]);
    let cfg = GlobalConfig::from_parts(vec![residue_part(fin(0), &r), residue_part(fin(1), &r.scale(&Scalar::from_int(-1)))]);
    let asm = assemble_global(&cfg, Field::Q, 5).unwrap();
    assert_eq!(asm.global.poles[0], (Scalar::zero(), vec![(1, r.clone())]));
    assert_eq!(asm.global.poles[1], (Scalar::one(), vec![(1, r.scale(&Scalar::from_int(-1)))]));
    // independent oracle at z = 2: R/2 - R/1 = -R/2
    let at2 = asm.global.local_expansion(&fin(2), 1).coeff_matrix(0).unwrap();
    assert_eq!(at2, r.scale(&Scalar::from_frac(-1, 2)));
    assert!(moment_map(&cfg).is_zero());
}

#[test]
fn residue_violation_and_duplicates() {
    let r = CMat::from_ints(&[&[1, 0], &[0, 2]]);
    let cfg = GlobalConfig::from_parts(vec![residue_part(fin(0), &r), residue_part(fin(1), &r)]);
    assert!(matches!(assemble_global(&cfg, Field::Q, 4), Err(Error::ResidueNonzero(_))));
    assert_eq!(moment_map(&cfg), r.scale(&Scalar::from_int(2)));
    let neg = r.scale(&Scalar::from_int(-1));
    let cfg = GlobalConfig::from_parts(vec![residue_part(fin(3), &r), residue_part(fin(3), &neg)]);
    assert!(matches!(assemble_global(&cfg, Field::Q, 4), Err(Error::DuplicatePoints(_))));
}

#[test]
fn infinity_gives_polynomial_part() {
    // N = -2 w^{-3} dw at infinity is 2 z dz
    let m = LMat::from_fn(1, |_, _| Series::monomial(Scalar::from_int(-2), -3));
    let cfg = GlobalConfig::from_parts(vec![PrincipalPart::new(Point::Infinity, m).unwrap()]);
    let asm = assemble_global(&cfg, Field::Q, 4).unwrap();
    assert_eq!(asm.global.poly, vec![CMat::zeros(1, 1), CMat::from_ints(&[&[2]])]);
}

#[test]
fn random_round_trips() {
    let mut rng = common::rng(23);
    for i in 0..40 {
        let cfg = common::random_config(&mut rng, 1 + i % 3, 1 + i % 3, i % 2 == 0, 3);
        let asm = assemble_global(&cfg, Field::Q, 4).unwrap();
        for e in &cfg.entries {
            assert_eq!(asm.global.principal_part(&e.part.point).unwrap(), e.part);
        }
        assert!(moment_map(&cfg).is_zero());
        // the remaining points are regular
        let extra = fin(11);
        let pp = asm.global.principal_part(&extra).unwrap();
        assert!(pp.part.is_exact_zero());
    }
}

#[test]
fn framing_examples() {
    let a = FormalType::new(1, 2, 2, vec![
        vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(3)],
        vec![Scalar::from_int(-1), Scalar::from_int(2), Scalar::from_int(0)],
    ])
    .unwrap();
    let c = FormalConnection::from_dt_over_t(a.realize(), Field::Q);
    assert!(check_framing(&CMat::identity(2), &c, &a).unwrap());
    // leading term kept, lower terms arbitrary
    let mut m = a.realize();
    m.set(0, 1, Series::monomial(Scalar::from_int(5), -1));
    let c2 = FormalConnection::from_dt_over_t(m, Field::Q);
    assert!(check_framing(&CMat::identity(2), &c2, &a).unwrap());
    // a constant gauge mixing the eigenlines breaks the leading term
    let g = CMat::from_ints(&[&[1, 1], &[0, 1]]);
    assert!(!check_framing(&g, &c, &a).unwrap());
    // swapping the eigenlines frames the swapped type instead
    let s = CMat::from_ints(&[&[0, 1], &[1, 0]]);
    assert!(!check_framing(&s, &c, &a).unwrap());
}

#[test]
fn orbit_dimension_identities() {
    let one = FormalType::new(1, 1, 3, vec![vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero()]]).unwrap();
    let d = orbit_dimensions(&one, 5).unwrap();
    assert_eq!((d.dim_o, d.dim_m), (0, 0));
    let mut rng = common::rng(31);
    for _ in 0..20 {
        let a = common::formal_type(&mut rng, 4, 4);
        for ell in [a.r + 1, a.r + 4] {
            let d = orbit_dimensions(&a, ell).unwrap();
            let (n, e, m, r) = (a.n() as i64, a.e as i64, a.m as i64, a.r);
            assert_eq!(d.dim_o as i64, (r + 1) * (e * m * m - m));
            assert_eq!(d.dim_o1 as i64, r * (e * m * m - m));
            assert_eq!(d.dim_o, d.dim_o_rank);
            // the truncation level cancels
            assert_eq!(d.dim_m, n * n - e * m * m + d.dim_o as i64);
            assert_eq!(d.dim_m_tilde - d.dim_m, 2 * m);
        }
    }
    let zero = FormalType::new(1, 2, 0, vec![vec![Scalar::zero()], vec![Scalar::from_frac(1, 2)]]).unwrap();
    assert!(matches!(orbit_dimensions(&zero, 3), Err(Error::UnsupportedDepth(_))));
}

#[test]
fn regular_singular_orbits() {
    let e = [Scalar::from_frac(1, 2), Scalar::from_frac(1, 3), Scalar::from_frac(1, 2)];
    assert_eq!(regular_singular_orbit_dim(&e).unwrap(), 9 - 5);
    assert!(regular_singular_orbit_dim(&[Scalar::zero(), Scalar::one()]).is_err());
}

#[test]
fn isotropy_matches_peeling() {
    let mut rng = common::rng(37);
    let (mut members, mut others) = (0, 0);
    while members + others < 100 {
        let a = common::formal_type(&mut rng, 3, 4);
        if a.r < 2 {
            continue;
        }
        let i = rand::Rng::gen_range(&mut rng, 1..=a.r / 2);
        let (p, perturbed) = common::isotropy_sample(&mut rng, &a, i);
        let fixed = coadjoint_fixes(&a, &p, i).unwrap();
        let member = in_isotropy_group(&a, &p, i).unwrap();
        assert_eq!(fixed, member, "{a:?} i={i}");
        assert_eq!(member, !perturbed);
        if member {
            members += 1;
        } else {
            others += 1;
        }
    }
    assert!(members > 20 && others > 20);
}

#[test]
fn gauge_agrees_with_coadjoint_on_p1() {
    use formconn::connection::unipotent_inverse;
    let mut rng = common::rng(41);
    for _ in 0..30 {
        let a = common::formal_type(&mut rng, 3, 4);
        let ctx = a.torus().context();
        let p = common::unipotent(&mut rng, &ctx, 1, 3);
        let c = FormalConnection::from_dt_over_t(a.realize(), Field::Q).gauge(&p, 20).unwrap();
        let x = p.sub(&LMat::identity(a.n()));
        let ad = p.mul(&a.realize()).mul(&unipotent_inverse(&x, a.r + 6));
        assert!(ctx.contains(&c.m.sub(&ad), 1).unwrap());
    }
}

#[test]
fn framings_have_trivial_stabilizer() {
    // g fixes the framed tuple iff g_i g^{-1} = g_i for all i; the linearized
    // condition g_i X = 0 has only the zero solution
    let mut rng = common::rng(43);
    for _ in 0..10 {
        let g = loop {
            let rows = (0..3).map(|_| (0..3).map(|_| common::small(&mut rng, -2, 2)).collect()).collect();
            let g = CMat::from_rows(rows);
            if !g.det().is_zero() {
                break g;
            }
        };
        assert!(g.kernel().is_empty());
    }
}
