//! Uniform maximal tori in block-diagonal position, the tame corestriction and
//! the graded equation solver.
//!
//! The torus `T = (E^x)^m` with `E = F(varpi_E)`, `varpi_E^e = t`, sits block
//! diagonally; `varpi_E` acts on each block as the Iwahori uniformizer of `gl_e`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::ParahoricContext;
use crate::laurent::Series;
use crate::matrix::{CMat, LMat};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusData {
    pub e: usize,
    pub m: usize,
}

/// `sum_d c_{j,d} varpi_E^d` on each block `j`, stored as a series in `varpi_E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToralElement {
    pub torus: TorusData,
    pub blocks: Vec<Series>,
}

/// `varpi^s` for the Iwahori uniformizer of `gl_e`.
pub fn varpi_power(e: usize, s: i64) -> LMat {
    let ei = e as i64;
    let q = s.div_euclid(ei);
    let z = s.rem_euclid(ei) as usize;
    let mut m = LMat::zero(e);
    for i in 0..e {
        if i + z < e {
            m.set(i, i + z, Series::t_pow(q));
        } else {
            m.set(i, i + z - e, Series::t_pow(q + 1));
        }
    }
    m
}

impl TorusData {
    pub fn new(e: usize, m: usize) -> TorusData {
        assert!(e > 0 && m > 0);
        TorusData { e, m }
    }

    pub fn n(&self) -> usize {
        self.e * self.m
    }

    pub fn context(&self) -> ParahoricContext {
        ParahoricContext::torus(self.e, self.m)
    }

    pub fn block(&self, j: usize) -> Vec<usize> {
        (j * self.e..(j + 1) * self.e).collect()
    }

    /// `varpi_E^s` on block `j`, zero elsewhere.
    pub fn block_monomial(&self, j: usize, s: i64) -> LMat {
        let mut m = LMat::zero(self.n());
        let b = varpi_power(self.e, s);
        for a in 0..self.e {
            for c in 0..self.e {
                m.set(j * self.e + a, j * self.e + c, b.get(a, c).clone());
            }
        }
        m
    }

    /// `varpi_E^s` on every block.
    pub fn varpi_power(&self, s: i64) -> LMat {
        let parts: Vec<Vec<usize>> = (0..self.m).map(|j| self.block(j)).collect();
        let b = varpi_power(self.e, s);
        LMat::assemble(self.n(), &parts, &vec![b; self.m])
    }
}

impl ToralElement {
    pub fn zero(torus: TorusData) -> ToralElement {
        ToralElement { torus, blocks: vec![Series::zero(); torus.m] }
    }

    /// From per-block coefficient vectors starting at degree `d0`.
    pub fn from_coeffs(torus: TorusData, d0: i64, coeffs: &[Vec<Scalar>]) -> ToralElement {
        ToralElement {
            torus,
            blocks: coeffs.iter().map(|c| Series::from_coeffs(d0, c.clone(), None)).collect(),
        }
    }

    pub fn coeff(&self, j: usize, d: i64) -> Result<Scalar> {
        self.blocks[j].coeff(d)
    }

    pub fn add(&self, o: &ToralElement) -> ToralElement {
        ToralElement {
            torus: self.torus,
            blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Keep degrees below `d` (exactly).
    pub fn truncated_below(&self, d: i64) -> ToralElement {
        ToralElement {
            torus: self.torus,
            blocks: self
                .blocks
                .iter()
                .map(|s| {
                    let terms: Vec<(i64, Scalar)> =
                        s.terms().filter(|(k, _)| *k < d).map(|(k, a)| (k, a.clone())).collect();
                    Series::from_terms(&terms, None)
                })
                .collect(),
        }
    }

    /// The matrix in `gl_n(F)`.
    pub fn realize(&self) -> LMat {
        let t = self.torus;
        let ctx = t.context();
        let mut m = LMat::zero(t.n());
        for (j, s) in self.blocks.iter().enumerate() {
            for (d, c) in s.terms() {
                m = m.add(&t.block_monomial(j, d).scale(c));
            }
            if let Some(p) = s.prec() {
                for a in t.block(j) {
                    for b in t.block(j) {
                        let o = ctx.min_entry_order(a, b, p);
                        m.set(a, b, m.get(a, b).add(&Series::zero_to(o)));
                    }
                }
            }
        }
        m
    }
}

/// `(1/e) [t^0] Tr(varpi^{-s} X_jj)`, the degree-`s` toral coordinate of block `j`.
pub fn toral_coeff(x: &LMat, t: TorusData, j: usize, s: i64) -> Result<Scalar> {
    let e = t.e as i64;
    let q = (-s).div_euclid(e);
    let z = (-s).rem_euclid(e) as usize;
    let base = j * t.e;
    let mut acc = Scalar::zero();
    for i in 0..t.e {
        // row i of varpi^{-s} has its entry in column col with t-power q + delta
        let (col, delta) = if i + z < t.e { (i + z, 0) } else { (i + z - t.e, 1) };
        acc += &x.get(base + col, base + i).coeff(-q - delta)?;
    }
    Ok(acc / Scalar::from_int(e))
}

/// The tame corestriction `pi_t(X)` (against `dt/t`).
pub fn tame_corestriction(x: &LMat, t: TorusData) -> Result<ToralElement> {
    if x.n() != t.n() {
        return Err(Error::ShapeMismatch("matrix and torus differ in size".into()));
    }
    let iw = ParahoricContext::iwahori(t.e);
    let mut blocks = Vec::with_capacity(t.m);
    for j in 0..t.m {
        let xb = x.select(&t.block(j));
        let Some(lo) = iw.degree_lower_bound(&xb) else {
            blocks.push(Series::zero());
            continue;
        };
        let exact = xb.entries().iter().all(|s| s.is_exact());
        let hi = if exact {
            let top = xb.entries().iter().filter_map(|s| s.top()).max().unwrap_or(0);
            Some(t.e as i64 * (top + 1))
        } else {
            None
        };
        let mut terms = Vec::new();
        let mut prec = None;
        let mut s = lo;
        loop {
            if hi.is_some_and(|h| s >= h) {
                break;
            }
            match toral_coeff(x, t, j, s) {
                Ok(c) => terms.push((s, c)),
                Err(Error::InsufficientPrecision { .. }) => {
                    prec = Some(s);
                    break;
                }
                Err(e) => return Err(e),
            }
            s += 1;
        }
        blocks.push(Series::from_terms(&terms, prec));
    }
    Ok(ToralElement { torus: t, blocks })
}

/// Solve a linear equation between graded pieces: find `X` homogeneous of
/// degree `x_deg`, supported on `unknowns`, with `op(X)` having degree-`y_deg`
/// coordinates `target` and every functional in `constraints` vanishing on the
/// coordinates of `X`. Returns the coordinates of one solution.
pub fn graded_solve(
    ctx: &ParahoricContext,
    x_deg: i64,
    y_deg: i64,
    unknowns: &[(usize, usize, i64)],
    op: impl Fn(&LMat) -> Result<LMat>,
    target: &[Scalar],
    constraints: &[Vec<Scalar>],
) -> Result<Option<Vec<Scalar>>> {
    let rows_eq = target.len();
    let rows = rows_eq + constraints.len();
    let mut a = CMat::zeros(rows, unknowns.len());
    for (k, &(i, j, c)) in unknowns.iter().enumerate() {
        let mut basis = LMat::zero(ctx.n());
        basis.set(i, j, Series::t_pow(c));
        debug_assert_eq!(ctx.entry_degree(i, j, c), x_deg);
        let img = ctx.graded_vector(&op(&basis)?, y_deg)?;
        for (r, v) in img.into_iter().enumerate() {
            a.set(r, k, v);
        }
        for (r, f) in constraints.iter().enumerate() {
            a.set(rows_eq + r, k, f[k].clone());
        }
    }
    let mut b = target.to_vec();
    b.resize(rows, Scalar::zero());
    Ok(a.solve(&b))
}

/// Check that `xi` has a regular leading term at degree `-r` and return it.
fn regular_leading(xi: &ToralElement, r: i64) -> Result<Vec<Scalar>> {
    let t = xi.torus;
    let e = t.e as i64;
    if r > 0 && r.gcd(&e) != 1 {
        return Err(Error::GcdViolation(r.gcd(&e)));
    }
    if r == 0 && e != 1 {
        return Err(Error::GcdViolation(e));
    }
    let lead: Vec<Scalar> = (0..t.m).map(|j| xi.coeff(j, -r)).collect::<Result<_>>()?;
    if r > 0 {
        if lead.iter().any(|c| c.is_zero()) {
            return Err(Error::NotRegular("leading coefficient vanishes".into()));
        }
        let pows: Vec<Scalar> = lead.iter().map(|c| c.pow(t.e as u32)).collect();
        for i in 0..pows.len() {
            for j in i + 1..pows.len() {
                if pows[i] == pows[j] {
                    return Err(Error::NotRegular("leading coefficients not distinct".into()));
                }
            }
        }
    }
    Ok(lead)
}

/// Constraint rows `psi_d^j = 0` on the coordinates of `unknowns`.
pub fn toral_constraints(t: TorusData, d: i64, unknowns: &[(usize, usize, i64)]) -> Result<Vec<Vec<Scalar>>> {
    let mut rows = vec![vec![Scalar::zero(); unknowns.len()]; t.m];
    for (k, &(i, j, c)) in unknowns.iter().enumerate() {
        let mut basis = LMat::zero(t.n());
        basis.set(i, j, Series::t_pow(c));
        for (b, row) in rows.iter_mut().enumerate() {
            row[k] = toral_coeff(&basis, t, b, d)?;
        }
    }
    Ok(rows)
}

/// Solve `[X, xi] = Y - pi_t(Y)` modulo `P^{l-r+1}` with `X` homogeneous of degree
/// `l` and `pi_t(X) = 0`, on the torus chain.
pub fn graded_ad_solve(xi: &ToralElement, r: i64, y: &LMat, l: i64) -> Result<LMat> {
    let t = xi.torus;
    let lead = regular_leading(xi, r)?;
    let ctx = t.context();
    if !ctx.contains(y, l - r)? {
        let actual = ctx.filtration_degree(y)?.unwrap_or(l - r);
        return Err(Error::NotInFiltration { wanted: l - r, actual });
    }
    let xi_lead = ToralElement::from_coeffs(t, -r, &lead.iter().map(|c| vec![c.clone()]).collect::<Vec<_>>())
        .realize();
    let mut toral = LMat::zero(t.n());
    for j in 0..t.m {
        let c = toral_coeff(y, t, j, l - r)?;
        toral = toral.add(&t.block_monomial(j, l - r).scale(&c));
    }
    let target = ctx.graded_vector(&y.sub(&toral), l - r)?;
    let unknowns = ctx.graded_positions(l);
    let cons = toral_constraints(t, l, &unknowns)?;
    let sol = graded_solve(&ctx, l, l - r, &unknowns, |x| Ok(x.commutator(&xi_lead)), &target, &cons)?
        .ok_or_else(|| Error::NotRegular("graded ad equation has no solution".into()))?;
    Ok(ctx.from_graded_vector(l, &sol))
}

/// Dimension of the kernel of `X -> [X, varpi^{-r}]` on `P^l/P^{l+1}` for the
/// Iwahori subalgebra of `gl_n`.
pub fn ad_kernel_dim(n: usize, r: i64, l: i64) -> usize {
    let ctx = ParahoricContext::iwahori(n);
    let xi = varpi_power(n, -r);
    let pos = ctx.graded_positions(l);
    let rows = ctx.graded_positions(l - r).len();
    let mut a = CMat::zeros(rows, pos.len());
    for (k, &(i, j, c)) in pos.iter().enumerate() {
        let mut basis = LMat::zero(n);
        basis.set(i, j, Series::t_pow(c));
        let img = ctx.graded_vector(&basis.commutator(&xi), l - r).expect("exact input");
        for (row, v) in img.into_iter().enumerate() {
            a.set(row, k, v);
        }
    }
    pos.len() - a.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varpi_powers_compose() {
        for e in 1..5 {
            let w = varpi_power(e, 1);
            assert_eq!(w.pow(e), LMat::identity(e).shift(1));
            assert_eq!(varpi_power(e, 3).mul(&varpi_power(e, -3)), LMat::identity(e));
            assert_eq!(ParahoricContext::iwahori(e).varpi().unwrap(), w);
        }
    }

    #[test]
    fn corestriction_is_identity_on_torus() {
        let t = TorusData::new(3, 2);
        let z = ToralElement::from_coeffs(
            t,
            -2,
            &[vec![Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(5)], vec![Scalar::from_int(-1), Scalar::zero(), Scalar::from_frac(1, 2)]],
        );
        assert_eq!(tame_corestriction(&z.realize(), t).unwrap(), z);
    }

    #[test]
    fn kernel_dimension_small() {
        assert_eq!(ad_kernel_dim(2, 1, 0), 1);
        assert_eq!(ad_kernel_dim(4, 2, 3), 2);
    }
}
