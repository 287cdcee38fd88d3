//! Formal connections `d + M dt/t`: gauge action, strata, slope, splitting and
//! diagonalization.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::formal::FormalType;
use crate::lattice::ParahoricContext;
use crate::laurent::{OneForm, Series};
use crate::matrix::{CMat, LMat};
use crate::poly::Poly;
use crate::scalar::{Field, Scalar};
use crate::strata::Stratum;
use crate::toral::{graded_ad_solve, toral_coeff, ToralElement, TorusData};

/// A connection, stored as its matrix against `dt/t` (that is, `[nabla_tau]`
/// for `tau = t d/dt`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConnection {
    pub m: LMat,
    pub field: Field,
}

#[derive(Clone, Debug)]
pub struct SlopeResult {
    /// `(p, q)` with slope `p/q` in lowest terms.
    pub slope: (i64, i64),
    /// `g` with `g . C` in standard position for `stratum`.
    pub gauge: LMat,
    pub conn: FormalConnection,
    /// A fundamental stratum contained in `g . C` (depth 0 when regular singular).
    pub stratum: Stratum,
    /// Successive bounds found by the reduction, as `p/q` strings.
    pub trace: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct DiagonalizationResult {
    /// `p` with `p . C = A_rep` modulo `P_T^{digits+1}`.
    pub gauge: LMat,
    pub a_rep: ToralElement,
    pub formal_type: FormalType,
    /// Whether the input was already in torus position.
    pub direct: bool,
}

impl FormalConnection {
    /// From a matrix taken against the one-form `nu`.
    pub fn new(matrix: LMat, nu: &OneForm, field: Field) -> FormalConnection {
        let u = nu.relative_to_dt_over_t();
        FormalConnection { m: matrix.scale_series(&u), field }
    }

    pub fn from_dt_over_t(m: LMat, field: Field) -> FormalConnection {
        FormalConnection { m, field }
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    /// The matrix against another one-form.
    pub fn matrix_for(&self, nu: &OneForm, rel_cap: i64) -> Result<LMat> {
        let u = nu.relative_to_dt_over_t().inv(rel_cap)?;
        Ok(self.m.scale_series(&u))
    }

    /// `g . M = g M g^{-1} - tau(g) g^{-1}`.
    pub fn gauge(&self, g: &LMat, rel_cap: i64) -> Result<FormalConnection> {
        let ginv = g.inverse(rel_cap)?;
        Ok(self.gauge_with(g, &ginv))
    }

    /// Gauge transformation with a known inverse.
    pub fn gauge_with(&self, g: &LMat, ginv: &LMat) -> FormalConnection {
        let m = g.mul(&self.m).mul(ginv).sub(&g.tau().mul(ginv));
        FormalConnection { m, field: self.field }
    }

    /// The stratum `(P, r, [nabla_tau])` with `r` minimal.
    pub fn contained_stratum(&self, p: &ParahoricContext) -> Result<Stratum> {
        let r = match p.filtration_degree(&self.m)? {
            Some(d) => (-d).max(0),
            None => 0,
        };
        Stratum::new(p.clone(), r, self.m.clone())
    }

    pub fn slope(&self) -> Result<SlopeResult> {
        slope(self)
    }

    pub fn diagonalize(&self, digits: i64) -> Result<DiagonalizationResult> {
        diagonalize(self, digits)
    }
}

type Rat = (i64, i64);

fn rat(p: i64, q: i64) -> Rat {
    let g = p.gcd(&q).max(1);
    let s = if q < 0 { -1 } else { 1 };
    (s * p / g, s * q / g)
}

fn rat_lt(a: Rat, b: Rat) -> bool {
    (a.0 as i128) * (b.1 as i128) < (b.0 as i128) * (a.1 as i128)
}

fn rat_str(a: Rat) -> String {
    if a.1 == 1 {
        a.0.to_string()
    } else {
        format!("{}/{}", a.0, a.1)
    }
}

/// Support edges `(a, b, w)` with `w` the t-order of `M_ab` (or its precision
/// when no digit is known to be nonzero).
fn support_edges(m: &LMat) -> Vec<(usize, usize, i64)> {
    let n = m.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if let Some(v) = m.get(a, b).val_bound() {
                out.push((a, b, v));
            }
        }
    }
    out
}

/// Minimum cycle mean by Karp's algorithm; `None` for an acyclic graph.
fn min_cycle_mean(n: usize, edges: &[(usize, usize, i64)]) -> Option<Rat> {
    const INF: i64 = i64::MAX / 4;
    let mut d = vec![vec![INF; n]; n + 1];
    d[0] = vec![0; n];
    for k in 1..=n {
        for &(a, b, w) in edges {
            if d[k - 1][a] < INF {
                let v = d[k - 1][a] + w;
                if v < d[k][b] {
                    d[k][b] = v;
                }
            }
        }
    }
    let mut best: Option<Rat> = None;
    for v in 0..n {
        if d[n][v] >= INF {
            continue;
        }
        let mut worst: Option<Rat> = None;
        for k in 0..n {
            if d[k][v] >= INF {
                continue;
            }
            let c = rat(d[n][v] - d[k][v], (n - k) as i64);
            if worst.is_none_or(|w| rat_lt(w, c)) {
                worst = Some(c);
            }
        }
        if let Some(w) = worst {
            if best.is_none_or(|b| rat_lt(w, b)) {
                best = Some(w);
            }
        }
    }
    best
}

/// Integer potentials `W` with `W_b - W_a <= q*w_ab - p` on every edge.
fn potentials(n: usize, edges: &[(usize, usize, i64)], mu: Rat) -> Vec<i64> {
    let mut dist = vec![0i64; n];
    for _ in 0..=n {
        let mut changed = false;
        for &(a, b, w) in edges {
            let v = dist[a] + mu.1 * w - mu.0;
            if v < dist[b] {
                dist[b] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn monomial_diag(exps: &[i64]) -> LMat {
    LMat::diag(&exps.iter().map(|&c| Series::t_pow(c)).collect::<Vec<_>>())
}

fn perm_matrix(order: &[usize]) -> LMat {
    // new index k holds old index order[k]; as a gauge g, (g v)_k = v_{order[k]}
    let n = order.len();
    let mut g = LMat::zero(n);
    for (k, &old) in order.iter().enumerate() {
        g.set(k, old, Series::one());
    }
    g
}

/// The slope, together with a gauge to standard position and a fundamental
/// stratum there.
pub fn slope(c: &FormalConnection) -> Result<SlopeResult> {
    let n = c.n();
    let mut cur = c.clone();
    let mut total = LMat::identity(n);
    let mut trace = Vec::new();
    let max_steps = 4 * n * n + 8;
    for _ in 0..max_steps {
        let edges = support_edges(&cur.m);
        let mu = min_cycle_mean(n, &edges);
        let mu = match mu {
            Some(mu) if mu.0 < 0 => mu,
            _ => {
                trace.push("0".into());
                return regular_singular_position(cur, total, trace);
            }
        };
        trace.push(rat_str((-mu.0, mu.1)));
        let w = potentials(n, &edges, mu);
        let q = mu.1;
        let mut b = CMat::zeros(n, n);
        for &(i, j, _) in &edges {
            let num = mu.0 - w[i] + w[j];
            if num.rem_euclid(q) == 0 {
                b.set(i, j, cur.m.get(i, j).coeff(num / q)?);
            }
        }
        if !b.is_nilpotent() {
            // standard position: weight q*c_k + lambda_k = W_k
            let cexp: Vec<i64> = w.iter().map(|x| x.div_euclid(q)).collect();
            let levels: Vec<usize> = w.iter().map(|x| x.rem_euclid(q) as usize).collect();
            let ctx = ParahoricContext::from_levels(q as usize, levels)?;
            let order = ctx.standard_order();
            let g = perm_matrix(&order).mul(&monomial_diag(&cexp));
            let ginv = monomial_diag(&cexp.iter().map(|x| -x).collect::<Vec<_>>()).mul(&perm_matrix(&order).transpose());
            let next = cur.gauge_with(&g, &ginv);
            total = g.mul(&total);
            let ctx = ctx.restrict(&order);
            let stratum = Stratum::new(ctx, -mu.0, next.m.clone())?;
            return Ok(SlopeResult { slope: (-mu.0, q), gauge: total, conn: next, stratum, trace });
        }
        // shear along the kernel filtration of the nilpotent leading term
        let g0 = kernel_filtration_basis(&b, &w, q);
        let g0inv = g0.inverse().ok_or(Error::SingularGauge)?;
        let big = LMat::from_fn(n, |i, j| {
            let x = g0.get(i, j);
            if x.is_zero() {
                Series::zero()
            } else {
                Series::monomial(x.clone(), (w[j] - w[i]) / q)
            }
        });
        let big_inv = LMat::from_fn(n, |i, j| {
            let x = g0inv.get(i, j);
            if x.is_zero() {
                Series::zero()
            } else {
                Series::monomial(x.clone(), (w[j] - w[i]) / q)
            }
        });
        // new basis f = e * big, so the gauge is big^{-1}
        cur = cur.gauge_with(&big_inv, &big);
        total = big_inv.mul(&total);
    }
    Err(Error::precision("slope reduction did not terminate", 0))
}

/// Columns: a basis adapted to `ker B ⊂ ker B^2 ⊂ ...` inside each class of
/// `W mod q`.
fn kernel_filtration_basis(b: &CMat, w: &[i64], q: i64) -> CMat {
    let n = b.rows();
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    let mut classes: Vec<i64> = w.iter().map(|x| x.rem_euclid(q)).collect();
    classes.sort();
    classes.dedup();
    let mut powers = vec![CMat::identity(n)];
    for _ in 0..n {
        let last = powers.last().unwrap().mul(b);
        powers.push(last);
    }
    for cls in classes {
        let idx: Vec<usize> = (0..n).filter(|&k| w[k].rem_euclid(q) == cls).collect();
        let mut chosen: Vec<Vec<Scalar>> = Vec::new();
        for bj in powers.iter().skip(1) {
            let sub = bj.select(&(0..n).collect::<Vec<_>>(), &idx);
            for v in sub.kernel() {
                let mut trial = chosen.clone();
                trial.push(v.clone());
                if CMat::from_columns(&trial).rank() == trial.len() {
                    chosen = trial;
                }
            }
            if chosen.len() == idx.len() {
                break;
            }
        }
        for v in chosen {
            let mut full = vec![Scalar::zero(); n];
            for (p, &k) in idx.iter().enumerate() {
                full[k] = v[p].clone();
            }
            cols.push(full);
        }
    }
    // reorder columns so that column positions match the classes of the rows
    // they replace: each class keeps its own index set
    let mut g = CMat::zeros(n, n);
    let mut slot: Vec<usize> = Vec::new();
    let mut by_class: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for k in 0..n {
        by_class.entry(w[k].rem_euclid(q)).or_default().push(k);
    }
    for idx in by_class.values() {
        slot.extend(idx.iter().copied());
    }
    for (col, k) in cols.into_iter().zip(slot) {
        for (i, x) in col.into_iter().enumerate() {
            g.set(i, k, x);
        }
    }
    g
}

/// Regular singular case: gauge into `gl_n(o)` by integer potentials.
fn regular_singular_position(cur: FormalConnection, total: LMat, trace: Vec<String>) -> Result<SlopeResult> {
    let n = cur.n();
    let edges = support_edges(&cur.m);
    let w = potentials(n, &edges, (0, 1));
    let g = monomial_diag(&w);
    let ginv = monomial_diag(&w.iter().map(|x| -x).collect::<Vec<_>>());
    let next = cur.gauge_with(&g, &ginv);
    let total = g.mul(&total);
    let stratum = Stratum::new(ParahoricContext::maximal(n), 0, next.m.clone())?;
    Ok(SlopeResult { slope: (0, 1), gauge: total, conn: next, stratum, trace })
}

/// `(1 + X)^{-1}` for `X` in `P^1`, known modulo `t^abs`.
pub fn unipotent_inverse(x: &LMat, abs: i64) -> LMat {
    let n = x.n();
    let mut acc = LMat::identity(n);
    let mut term = LMat::identity(n);
    let neg = x.neg();
    loop {
        term = term.mul(&neg).truncate(abs);
        if term.val_bound().is_none_or(|v| v >= abs) {
            break;
        }
        acc = acc.add(&term);
    }
    acc.add(&LMat::from_fn(n, |_, _| Series::zero_to(abs))).truncate(abs)
}

/// Gauge by `1 + X` keeping absolute precision `abs` (the pole order of the
/// connection is added internally).
fn gauge_unipotent(c: &FormalConnection, x: &LMat, abs: i64) -> (FormalConnection, LMat) {
    let pole = c.m.val_bound().map_or(0, |v| (-v).max(0));
    let g = LMat::identity(c.n()).add(x);
    let ginv = unipotent_inverse(x, abs + pole);
    let mut next = c.gauge_with(&g, &ginv);
    next.m = next.m.truncate(abs);
    (next, g)
}

/// Kill the off-diagonal blocks (for `partition`) of a connection containing a
/// stratum `(P, r, beta)` whose leading term is block diagonal.
pub fn split_connection(
    c: &FormalConnection,
    p: &ParahoricContext,
    r: i64,
    partition: &[Vec<usize>],
    digits: i64,
) -> Result<(LMat, FormalConnection)> {
    let n = c.n();
    let mut part_of = vec![usize::MAX; n];
    for (k, idx) in partition.iter().enumerate() {
        for &i in idx {
            part_of[i] = k;
        }
    }
    if part_of.contains(&usize::MAX) {
        return Err(Error::InvalidInput("partition does not cover the basis".into()));
    }
    if !p.contains(&c.m, -r)? {
        return Err(Error::NotSplit("connection does not lie in P^{-r}".into()));
    }
    let e = p.e() as i64;
    let abs = (digits - r).div_euclid(e) + 2;
    let mut cur = FormalConnection { m: c.m.truncate(abs.max(1)), field: c.field };
    let mut total = LMat::identity(n);
    let lead = p.homogeneous_part(&cur.m, -r)?;
    let off = |a: usize, b: usize| part_of[a] != part_of[b];
    for (a, b, cc) in p.graded_positions(-r) {
        if off(a, b) && !lead.get(a, b).coeff(cc)?.is_zero() {
            return Err(Error::NotSplit("leading term is not block diagonal".into()));
        }
    }
    for k in 1..=digits {
        let d = -r + k;
        let target: Vec<Scalar> = p
            .graded_positions(d)
            .into_iter()
            .map(|(a, b, cc)| {
                if off(a, b) {
                    cur.m.get(a, b).coeff(cc).map(|x| -x)
                } else {
                    Ok(Scalar::zero())
                }
            })
            .collect::<Result<_>>()?;
        if target.iter().all(|x| x.is_zero()) {
            continue;
        }
        let unknowns: Vec<(usize, usize, i64)> =
            p.graded_positions(k).into_iter().filter(|&(a, b, _)| off(a, b)).collect();
        let op = |x: &LMat| {
            let mut y = x.commutator(&lead);
            if r == 0 {
                y = y.sub(&x.tau());
            }
            Ok(y)
        };
        let sol = crate::toral::graded_solve(p, k, d, &unknowns, op, &target, &[])?
            .ok_or_else(|| Error::NotSplit(format!("no solution at degree {d}")))?;
        let mut x = LMat::zero(n);
        for ((a, b, cc), v) in unknowns.iter().zip(sol) {
            if !v.is_zero() {
                x.set(*a, *b, Series::monomial(v, *cc));
            }
        }
        let (next, g) = gauge_unipotent(&cur, &x, abs);
        cur = next;
        total = g.mul(&total).truncate(abs);
    }
    Ok((total, cur))
}

/// Degree `-r` homogeneous part is `c_j varpi^{-r}` on each block with regular
/// leading data; returns `(r, c_j)`.
fn torus_position(m: &LMat, t: TorusData) -> Result<Option<(i64, Vec<Scalar>)>> {
    let ctx = t.context();
    let r = match ctx.filtration_degree(m)? {
        Some(d) => (-d).max(0),
        None => 0,
    };
    let e = t.e as i64;
    if (r > 0 && r.gcd(&e) != 1) || (r == 0 && t.e != 1) {
        return Ok(None);
    }
    let lead = ctx.homogeneous_part(m, -r)?;
    let cs: Vec<Scalar> = (0..t.m).map(|j| toral_coeff(&lead, t, j, -r)).collect::<Result<_>>()?;
    let toral = ToralElement::from_coeffs(t, -r, &cs.iter().map(|c| vec![c.clone()]).collect::<Vec<_>>());
    if toral.realize() != lead {
        return Ok(None);
    }
    if r > 0 {
        let pows: Vec<Scalar> = cs.iter().map(|c| c.pow(t.e as u32)).collect();
        if cs.iter().any(|c| c.is_zero()) {
            return Ok(None);
        }
        for i in 0..t.m {
            for j in i + 1..t.m {
                if pows[i] == pows[j] {
                    return Ok(None);
                }
            }
        }
    } else {
        for i in 0..t.m {
            for j in i + 1..t.m {
                if (&cs[i] - &cs[j]).is_integer() {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some((r, cs)))
}

/// Bring a connection with a regular fundamental stratum into torus position.
fn to_torus_position(c: &FormalConnection) -> Result<(FormalConnection, LMat, TorusData)> {
    let n = c.n();
    let sr = slope(c)?;
    let st = sr.stratum.clone();
    let rep = st.regularity(c.field)?;
    if !rep.regular {
        return Err(Error::NotRegular(rep.reason.unwrap_or_default()));
    }
    let e = rep.e;
    let t = TorusData::new(e, n / e);
    let p = &st.p;
    let mut f = CMat::zeros(n, n);
    if st.r == 0 {
        let res = st.beta.coeff_matrix(0)?;
        for (j, a) in rep.roots.iter().enumerate() {
            let v = res.sub(&CMat::identity(n).scale(a)).kernel();
            for (i, x) in v[0].iter().enumerate() {
                f.set(i, j, x.clone());
            }
        }
    } else {
        let y = st.beta.pow(e).shift(st.r);
        for lvl in 0..e {
            let idx = p.indices_at_level(lvl);
            let yl = p.levi_block(&y, lvl)?;
            for (j, a) in rep.roots.iter().enumerate() {
                let ker = yl.sub(&CMat::identity(idx.len()).scale(a)).kernel();
                if ker.len() != 1 {
                    return Err(Error::NotRegular("Levi eigenspace is not a line".into()));
                }
                let col = j * e + (e - 1 - lvl);
                for (q, x) in ker[0].iter().enumerate() {
                    f.set(idx[q], col, x.clone());
                }
            }
        }
    }
    let finv = f.inverse().ok_or(Error::SingularGauge)?;
    let g = LMat::from_const(&finv, 0);
    let mut cur = sr.conn.gauge_with(&g, &LMat::from_const(&f, 0));
    let mut total = g.mul(&sr.gauge);
    if st.r > 0 {
        // rescale inside each block so the leading term becomes c_j varpi^{-r}
        let ctx = t.context();
        let lead = ctx.homogeneous_part(&cur.m, -st.r)?;
        let mut d = vec![Scalar::one(); n];
        for j in 0..t.m {
            let blk = t.block(j);
            let target_of = |b: usize| -> Result<(usize, Scalar)> {
                for &a in &blk {
                    let v = lead.get(a, b);
                    if let Some(k) = v.order() {
                        return Ok((a, v.coeff(k)?));
                    }
                }
                Err(Error::NotRegular("leading term is not a block shift".into()))
            };
            let mut prod = Scalar::one();
            for &b in &blk {
                prod = &prod * &target_of(b)?.1;
            }
            let cands = Poly::monomial(e, Scalar::one()).sub(&Poly::constant(prod.clone())).split_roots(c.field).0;
            let cj = cands
                .into_iter()
                .map(|(x, _)| x)
                .find(|x| x.pow(e as u32) == prod)
                .ok_or_else(|| Error::NonsplitField(format!("no {e}-th root of {prod}")))?;
            let cinv = cj.inv().unwrap();
            let mut b = blk[0];
            for _ in 0..e {
                let (a, kappa) = target_of(b)?;
                if a == blk[0] {
                    break;
                }
                d[a] = &(&kappa * &d[b]) * &cinv;
                b = a;
            }
        }
        let dm = LMat::diag(&d.iter().map(|x| Series::constant(x.clone())).collect::<Vec<_>>());
        let dinv = LMat::diag(&d.iter().map(|x| Series::constant(x.inv().unwrap())).collect::<Vec<_>>());
        cur = cur.gauge_with(&dinv, &dm);
        total = dinv.mul(&total);
    }
    Ok((cur, total, t))
}

/// Gauge to a toral representative of the formal type, correct through toral
/// degree `digits` (at least 0).
pub fn diagonalize(c: &FormalConnection, digits: i64) -> Result<DiagonalizationResult> {
    let n = c.n();
    let digits = digits.max(0);
    if c.m.is_exact_zero() {
        let t = TorusData::new(1, n);
        return Ok(DiagonalizationResult {
            gauge: LMat::identity(n),
            a_rep: ToralElement::zero(t),
            formal_type: FormalType::new(1, n, 0, vec![vec![Scalar::zero()]; n])?,
            direct: true,
        });
    }
    let mut direct = None;
    for e in (1..=n).filter(|e| n % e == 0) {
        let t = TorusData::new(e, n / e);
        if let Some((r, _)) = torus_position(&c.m, t)? {
            direct = Some((t, r));
            break;
        }
    }
    let (start, gauge0, t, is_direct) = match direct {
        Some((t, _)) => (c.clone(), LMat::identity(n), t, true),
        None => {
            let (cur, g, t) = to_torus_position(c)?;
            (cur, g, t, false)
        }
    };
    let (r, _) = torus_position(&start.m, t)?
        .ok_or_else(|| Error::NotRegular("could not reach torus position".into()))?;
    let e = t.e as i64;
    let abs = digits.div_euclid(e) + 2;
    let mut cur = FormalConnection { m: start.m.truncate(abs), field: c.field };
    let mut total = gauge0;
    if r == 0 {
        let res = cur.m.coeff_matrix(0)?;
        for dd in 1..abs {
            let y = cur.m.coeff_matrix(dd)?;
            let mut x = LMat::zero(n);
            for a in 0..n {
                for b in 0..n {
                    let v = y.get(a, b);
                    if v.is_zero() {
                        continue;
                    }
                    let den = &(&Scalar::from_int(dd) + res.get(a, a)) - res.get(b, b);
                    x.set(a, b, Series::monomial(-(v / &den), dd));
                }
            }
            let (next, g) = gauge_unipotent(&cur, &x, abs);
            cur = next;
            total = g.mul(&total);
        }
    } else {
        for d in (-r + 1)..=digits {
            if d >= 1 {
                let mut x = LMat::zero(n);
                let mut any = false;
                for j in 0..t.m {
                    let y = toral_coeff(&cur.m, t, j, d)?;
                    if !y.is_zero() {
                        any = true;
                        let alpha = &(&y * &Scalar::from_int(e)) / &Scalar::from_int(d);
                        x = x.add(&t.block_monomial(j, d).scale(&alpha));
                    }
                }
                if any {
                    let (next, g) = gauge_unipotent(&cur, &x, abs);
                    cur = next;
                    total = g.mul(&total);
                }
            }
            let mut low = Vec::new();
            for j in 0..t.m {
                let cs: Vec<Scalar> = (-r..d).map(|k| toral_coeff(&cur.m, t, j, k)).collect::<Result<_>>()?;
                low.push(cs);
            }
            let xi = ToralElement::from_coeffs(t, -r, &low);
            let y = cur.m.sub(&xi.realize());
            let x = graded_ad_solve(&xi, r, &y, d + r)?;
            if x.is_exact_zero() {
                continue;
            }
            let (next, g) = gauge_unipotent(&cur, &x.neg(), abs);
            cur = next;
            total = g.mul(&total);
        }
    }
    let hi = if r == 0 { 0 } else { digits };
    let coeffs: Vec<Vec<Scalar>> = (0..t.m)
        .map(|j| (-r..=hi).map(|k| toral_coeff(&cur.m, t, j, k)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let a_rep = ToralElement {
        torus: t,
        blocks: coeffs.iter().map(|cs| Series::from_coeffs(-r, cs.clone(), Some(hi + 1))).collect(),
    };
    let ft = FormalType::new(t.e, t.m, r, coeffs.iter().map(|cs| cs[..=r as usize].to_vec()).collect())?;
    Ok(DiagonalizationResult { gauge: total.truncate(abs), a_rep, formal_type: ft, direct: is_direct })
}
