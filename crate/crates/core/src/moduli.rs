//! Global connections on the projective line assembled from principal parts,
//! framings, moment maps and dimension counts for the moduli spaces.
//!
//! A principal part at a finite point `x` is written in the local coordinate
//! `t = z - x` against `dt`; at infinity the coordinate is `w = 1/z` against `dw`.
//! Only polar terms are kept.

use std::fmt;

use crate::connection::{unipotent_inverse, FormalConnection};
use crate::error::{Error, Result};
use crate::formal::FormalType;
use crate::laurent::{OneForm, Series};
use crate::matrix::{CMat, LMat};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(Scalar),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(x) => write!(f, "{x}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    pub point: Point,
    /// Exact, with every term of order `<= -1`.
    pub part: LMat,
}

impl PrincipalPart {
    pub fn new(point: Point, part: LMat) -> Result<PrincipalPart> {
        for s in part.entries() {
            if !s.is_exact() {
                return Err(Error::InvalidInput("principal parts must be exact".into()));
            }
            if s.top().is_some_and(|k| k >= 0) {
                return Err(Error::InvalidInput("principal parts carry polar terms only".into()));
            }
        }
        Ok(PrincipalPart { point, part })
    }

    /// Polar part of a local expansion.
    pub fn of(point: Point, local: &LMat) -> Result<PrincipalPart> {
        let n = local.n();
        let mut part = LMat::zero(n);
        for a in 0..n {
            for b in 0..n {
                let s = local.get(a, b);
                let terms: Vec<(i64, Scalar)> = match s.order() {
                    Some(lo) => (lo..0).map(|k| Ok((k, s.coeff(k)?))).collect::<Result<_>>()?,
                    None if s.is_exact_zero() || s.val_bound().is_some_and(|v| v >= 0) => Vec::new(),
                    None => return Err(Error::precision("polar part is undetermined", 0)),
                };
                part.set(a, b, Series::from_terms(&terms, None));
            }
        }
        Ok(PrincipalPart { point, part })
    }

    pub fn n(&self) -> usize {
        self.part.n()
    }

    /// Coefficient of `t^{-1}`.
    pub fn residue(&self) -> CMat {
        self.part.coeff_matrix(-1).expect("principal parts are exact")
    }

    pub fn pole_order(&self) -> i64 {
        self.part.min_order().map_or(0, |k| -k)
    }
}

#[derive(Clone, Debug)]
pub struct ConfigEntry {
    pub part: PrincipalPart,
    pub formal_type: Option<FormalType>,
    pub framing: Option<CMat>,
}

#[derive(Clone, Debug)]
pub struct GlobalConfig {
    pub entries: Vec<ConfigEntry>,
}

impl GlobalConfig {
    pub fn from_parts(parts: Vec<PrincipalPart>) -> GlobalConfig {
        GlobalConfig {
            entries: parts.into_iter().map(|part| ConfigEntry { part, formal_type: None, framing: None }).collect(),
        }
    }

    pub fn n(&self) -> Option<usize> {
        self.entries.first().map(|e| e.part.n())
    }
}

/// `M(z) dz` in partial fractions: `sum_x sum_k C_{x,k} (z - x)^{-k} + sum_j P_j z^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalConnection {
    pub n: usize,
    /// `(x, [(k, C_{x,k})])` with `k >= 1`.
    pub poles: Vec<(Scalar, Vec<(i64, CMat)>)>,
    /// `P_j` for `j = 0, 1, ...`.
    pub poly: Vec<CMat>,
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub global: GlobalConnection,
    /// Local expansion at each entry, against `dt` in the local coordinate.
    pub local: Vec<FormalConnection>,
}

/// `(1 + c u)^{-k}` to absolute precision `prec` in `u`.
fn binomial_series(c: &Scalar, k: i64, prec: i64) -> Series {
    let mut terms = Vec::new();
    let mut coef = Scalar::one();
    for i in 0..prec.max(0) {
        terms.push((i, coef.clone()));
        // coefficient of u^{i+1}: coef * (-(k + i)) / (i + 1) * c
        coef = &(&coef * &Scalar::from_frac(-(k + i), i + 1)) * c;
    }
    Series::from_terms(&terms, Some(prec.max(0)))
}

fn const_times(m: &CMat, s: &Series) -> LMat {
    LMat::from_fn(m.rows(), |a, b| s.scale(&m.get(a, b)))
}

impl GlobalConnection {
    /// Expansion at `point` to absolute precision `prec` in the local coordinate.
    pub fn local_expansion(&self, point: &Point, prec: i64) -> LMat {
        let n = self.n;
        let mut acc = LMat::from_fn(n, |_, _| Series::zero_to(prec));
        match point {
            Point::Finite(x) => {
                for (y, terms) in &self.poles {
                    let d = x - y;
                    for (k, c) in terms {
                        let s = if d.is_zero() {
                            Series::t_pow(-k)
                        } else {
                            // (t + d)^{-k} = d^{-k} (1 + t/d)^{-k}
                            let dinv = d.inv().unwrap();
                            binomial_series(&dinv, *k, prec).scale(&dinv.powi(*k).unwrap())
                        };
                        acc = acc.add(&const_times(c, &s));
                    }
                }
                for (j, p) in self.poly.iter().enumerate() {
                    // (t + x)^j
                    let mut terms = Vec::new();
                    let mut coef = Scalar::one();
                    for i in 0..=j as i64 {
                        terms.push((i, &coef * &x.pow((j as i64 - i) as u32)));
                        coef = &coef * &Scalar::from_frac(j as i64 - i, i + 1);
                    }
                    acc = acc.add(&const_times(p, &Series::from_terms(&terms, None)));
                }
            }
            Point::Infinity => {
                // dz = -dw / w^2
                for (y, terms) in &self.poles {
                    for (k, c) in terms {
                        // (z - y)^{-k} dz = -w^{k-2} (1 - y w)^{-k} dw
                        let s = binomial_series(&-y, *k, prec - k + 2).shift(k - 2).neg();
                        acc = acc.add(&const_times(c, &s));
                    }
                }
                for (j, p) in self.poly.iter().enumerate() {
                    acc = acc.add(&const_times(p, &Series::t_pow(-(j as i64) - 2).neg()));
                }
            }
        }
        acc.truncate(prec)
    }

    pub fn principal_part(&self, point: &Point) -> Result<PrincipalPart> {
        PrincipalPart::of(point.clone(), &self.local_expansion(point, 1))
    }
}

/// The rational connection with exactly the given principal parts.
pub fn assemble_global(cfg: &GlobalConfig, field: Field, prec: i64) -> Result<Assembly> {
    let n = cfg.n().ok_or_else(|| Error::InvalidInput("empty configuration".into()))?;
    for (i, e) in cfg.entries.iter().enumerate() {
        if e.part.n() != n {
            return Err(Error::ShapeMismatch("principal parts differ in size".into()));
        }
        if cfg.entries[..i].iter().any(|o| o.part.point == e.part.point) {
            return Err(Error::DuplicatePoints(e.part.point.to_string()));
        }
    }
    let total = moment_map(cfg);
    if !total.is_zero() {
        return Err(Error::ResidueNonzero(format!("{total:?}")));
    }
    let mut poles = Vec::new();
    let mut poly = Vec::new();
    for e in &cfg.entries {
        let pp = &e.part;
        let top = pp.pole_order();
        match &pp.point {
            Point::Finite(x) => {
                let terms = (1..=top)
                    .map(|k| (k, pp.part.coeff_matrix(-k).unwrap()))
                    .filter(|(_, c)| !c.is_zero())
                    .collect::<Vec<_>>();
                poles.push((x.clone(), terms));
            }
            Point::Infinity => {
                // N_k w^{-k} dw = -N_k z^{k-2} dz for k >= 2
                poly = (2..=top).map(|k| pp.part.coeff_matrix(-k).unwrap().scale(&Scalar::from_int(-1))).collect();
            }
        }
    }
    while poly.last().is_some_and(|p: &CMat| p.is_zero()) {
        poly.pop();
    }
    let global = GlobalConnection { n, poles, poly };
    let local = cfg
        .entries
        .iter()
        .map(|e| FormalConnection::new(global.local_expansion(&e.part.point, prec), &OneForm::dt(), field))
        .collect();
    Ok(Assembly { global, local })
}

/// Whether `g` carries `c` into the stratum induced by `a`.
pub fn check_framing(g: &CMat, c: &FormalConnection, a: &FormalType) -> Result<bool> {
    let ginv = g.inverse().ok_or(Error::SingularGauge)?;
    let gc = c.gauge_with(&LMat::from_const(g, 0), &LMat::from_const(&ginv, 0));
    let ctx = a.torus().context();
    if gc.n() != ctx.n() {
        return Err(Error::ShapeMismatch("formal type and connection differ in size".into()));
    }
    if !ctx.contains(&gc.m, -a.r)? {
        return Ok(false);
    }
    ctx.contains(&gc.m.sub(&a.realize()), 1 - a.r)
}

/// Sum of the residues of the principal parts.
pub fn moment_map(cfg: &GlobalConfig) -> CMat {
    let n = cfg.n().unwrap_or(0);
    cfg.entries.iter().fold(CMat::zeros(n, n), |acc, e| acc.add(&e.part.residue()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDimensions {
    pub n: usize,
    pub e: usize,
    pub m: usize,
    pub r: i64,
    pub ell: i64,
    /// `dim P/P^{r+1}`.
    pub dim_p_quot: usize,
    /// `dim T(o)/T^{(r+1)}`.
    pub dim_t_quot: usize,
    /// `dim gl_n(o)/P`, i.e. `dim G/P`.
    pub dim_flag: usize,
    pub dim_o: usize,
    /// Rank of `X -> [X, A]` from `P/P^{r+1}` to `P^{-r}/P^1`.
    pub dim_o_rank: usize,
    pub dim_o1: usize,
    /// `2 dim G/G^ell`.
    pub cotangent: i64,
    /// `-2 dim P/G^ell`.
    pub reduction: i64,
    pub dim_m: i64,
    pub dim_m_tilde: i64,
}

pub fn orbit_dimensions(a: &FormalType, ell: i64) -> Result<OrbitDimensions> {
    if a.r == 0 {
        return Err(Error::UnsupportedDepth("depth 0 uses the regular singular orbit".into()));
    }
    if ell < a.r + 1 {
        return Err(Error::InvalidInput(format!("truncation must be at least {}", a.r + 1)));
    }
    let ctx = a.torus().context();
    let n = a.n();
    let r = a.r;
    let dim_p_quot: usize = (0..=r).map(|d| ctx.graded_dim(d)).sum();
    let dim_p1_quot: usize = (1..=r).map(|d| ctx.graded_dim(d)).sum();
    // the torus has one coordinate per block in each degree
    let dim_t_quot = (r as usize + 1) * a.m;
    let dim_t1_quot = r as usize * a.m;
    let dim_flag = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| ctx.min_entry_order(x, y, 0) > 0)
        .count();
    let dim_o = dim_p_quot - dim_t_quot;
    let dim_o1 = dim_p1_quot - dim_t1_quot;

    let ar = a.realize();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for d in 0..=r {
        for (x, y, c) in ctx.graded_positions(d) {
            let mut xm = LMat::zero(n);
            xm.set(x, y, Series::t_pow(c));
            let br = xm.commutator(&ar);
            let mut row = Vec::new();
            for k in -r..=0 {
                row.extend(ctx.graded_vector(&br, k)?);
            }
            rows.push(row);
        }
    }
    let dim_o_rank = CMat::from_rows(rows).rank();

    let nn = (n * n) as i64;
    let cotangent = 2 * ell * nn;
    let reduction = -2 * (ell * nn - dim_flag as i64);
    let dim_m = cotangent + dim_o as i64 + reduction;
    Ok(OrbitDimensions {
        n,
        e: a.e,
        m: a.m,
        r,
        ell,
        dim_p_quot,
        dim_t_quot,
        dim_flag,
        dim_o,
        dim_o_rank,
        dim_o1,
        cotangent,
        reduction,
        dim_m,
        dim_m_tilde: dim_m + 2 * a.m as i64,
    })
}

/// Orbit dimension of a non-resonant semisimple residue with these eigenvalues.
pub fn regular_singular_orbit_dim(eigs: &[Scalar]) -> Result<usize> {
    for (i, a) in eigs.iter().enumerate() {
        for b in &eigs[i + 1..] {
            let d = a - b;
            if !d.is_zero() && d.is_integer() {
                return Err(Error::NotRegular(format!("eigenvalues {a} and {b} differ by an integer")));
            }
        }
    }
    let n = eigs.len();
    let mut seen: Vec<(&Scalar, usize)> = Vec::new();
    for a in eigs {
        match seen.iter_mut().find(|(b, _)| *b == a) {
            Some(s) => s.1 += 1,
            None => seen.push((a, 1)),
        }
    }
    Ok(n * n - seen.iter().map(|(_, k)| k * k).sum::<usize>())
}

fn unipotent_part(a: &FormalType, p: &LMat, i: i64) -> Result<LMat> {
    let x = p.sub(&LMat::identity(p.n()));
    if !a.torus().context().contains(&x, i)? {
        return Err(Error::InvalidInput(format!("element is not in P^{i}")));
    }
    Ok(x)
}

fn inverse_precision(a: &FormalType) -> i64 {
    a.r + 4
}

/// Whether `Ad(p) A = A` as functionals on `P^i/P^{r+1}`, for `p` in `P^i`, `i >= 1`.
pub fn coadjoint_fixes(a: &FormalType, p: &LMat, i: i64) -> Result<bool> {
    let x = unipotent_part(a, p, i)?;
    let pinv = unipotent_inverse(&x, inverse_precision(a));
    let ar = a.realize();
    let moved = p.mul(&ar).mul(&pinv).sub(&ar);
    a.torus().context().contains(&moved, 1 - i)
}

/// Whether `p` in `P^i` lies in `T^i P^{r+1-i}`, by peeling off toral factors degree by degree.
pub fn in_isotropy_group(a: &FormalType, p: &LMat, i: i64) -> Result<bool> {
    let x = unipotent_part(a, p, i)?;
    let t = a.torus();
    let ctx = t.context();
    let n = p.n();
    let abs = inverse_precision(a);
    let mut cur = LMat::identity(n).add(&x);
    for d in i..=a.r - i {
        let xd = ctx.homogeneous_part(&cur.sub(&LMat::identity(n)), d)?;
        let mut toral = LMat::zero(n);
        for j in 0..t.m {
            let c = crate::toral::toral_coeff(&xd, t, j, d)?;
            toral = toral.add(&t.block_monomial(j, d).scale(&c));
        }
        if !xd.sub(&toral).is_exact_zero() {
            return Ok(false);
        }
        cur = unipotent_inverse(&toral, abs).mul(&cur).truncate(abs);
    }
    ctx.contains(&cur.sub(&LMat::identity(n)), a.r + 1 - i)
}
