//! Strata `(P, r, beta)`: characteristic polynomials, the fundamental test,
//! gcd reduction, leading-term splitting and regularity.
//!
//! Representatives are always taken against `dt/t`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::ParahoricContext;
use crate::laurent::OneForm;
use crate::matrix::{CMat, LMat};
use crate::poly::Poly;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub p: ParahoricContext,
    pub r: i64,
    pub beta: LMat,
}

/// Basis change and pieces produced by [`Stratum::split`].
#[derive(Clone, Debug)]
pub struct StratumSplit {
    /// `g` with `Ad(g) beta` block diagonal modulo `P^{1-r}`; constant.
    pub gauge: LMat,
    /// `Ad(g) beta`.
    pub beta: LMat,
    /// Basis indices of each piece, in basis order.
    pub partition: Vec<Vec<usize>>,
    /// Root of the characteristic polynomial carried by each piece.
    pub roots: Vec<Scalar>,
    pub parts: Vec<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub regular: bool,
    pub reason: Option<String>,
    /// Period of the reduced chain.
    pub e: usize,
    /// Number of torus blocks, `n / e`.
    pub m: usize,
    /// Depth of the reduced stratum.
    pub r: i64,
    pub phi: Poly,
    /// Roots of `phi` (r > 0) or eigenvalues of the residue (r = 0), sorted.
    pub roots: Vec<Scalar>,
    pub pure: bool,
}

impl Stratum {
    pub fn new(p: ParahoricContext, r: i64, beta: LMat) -> Result<Stratum> {
        if r < 0 {
            return Err(Error::InvalidInput("stratum depth must be nonnegative".into()));
        }
        if p.n() != beta.n() {
            return Err(Error::ShapeMismatch("representative and chain differ in size".into()));
        }
        if !p.contains(&beta, -r)? {
            let actual = p.filtration_degree(&beta)?.unwrap_or(-r);
            return Err(Error::NotInFiltration { wanted: -r, actual });
        }
        Ok(Stratum { p, r, beta })
    }

    /// Build from a representative taken against `nu` of order `-1`.
    pub fn with_nu(p: ParahoricContext, r: i64, beta: LMat, nu: &OneForm) -> Result<Stratum> {
        if nu.ord() != -1 {
            return Err(Error::InvalidInput("representatives need ord(nu) = -1".into()));
        }
        let u = nu.relative_to_dt_over_t();
        Stratum::new(p, r, beta.scale_series(&u))
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    fn gcd(&self) -> usize {
        (self.r as usize).gcd(&self.p.e())
    }

    /// `r / e` in lowest terms.
    pub fn slope(&self) -> (i64, i64) {
        let e = self.p.e() as i64;
        let g = self.r.gcd(&e);
        (self.r / g, e / g)
    }

    /// The stratum on the sub-chain `L'^j = L^{jg}`, `g = gcd(r, e)`.
    pub fn reduce(&self) -> Stratum {
        let g = self.gcd();
        if g == 1 {
            return self.clone();
        }
        Stratum { p: self.p.coarsen(g), r: self.r / g as i64, beta: self.beta.clone() }
    }

    /// `t^r beta^e` for a reduced stratum: an element of `P`.
    fn y_tilde(&self) -> LMat {
        self.beta.pow(self.p.e()).shift(self.r)
    }

    fn levi_char_poly(p: &ParahoricContext, y: &LMat) -> Result<Poly> {
        let mut phi = Poly::one();
        for lvl in 0..p.e() {
            if p.indices_at_level(lvl).is_empty() {
                continue;
            }
            phi = phi.mul(&p.levi_block(y, lvl)?.charpoly());
        }
        Ok(phi)
    }

    /// Characteristic polynomial of `y = beta^{e/g} t^{r/g}` in `P'/P'^1`.
    pub fn char_poly(&self) -> Result<Poly> {
        let s = self.reduce();
        Stratum::levi_char_poly(&s.p, &s.y_tilde())
    }

    pub fn is_fundamental(&self) -> Result<bool> {
        let phi = self.char_poly()?;
        Ok(phi != Poly::monomial(self.n(), Scalar::one()))
    }

    /// Whether `beta` induces isomorphisms on every graded piece.
    pub fn is_strongly_uniform(&self) -> Result<bool> {
        let g = self.p.graded_component(&self.beta, -self.r)?;
        Ok(g.maps.iter().all(|m| m.rows() == m.cols() && m.rank() == m.rows()))
    }

    /// Split the leading term along the generalized eigenspaces of `y`.
    pub fn split(&self, field: Field) -> Result<StratumSplit> {
        let g = self.gcd();
        if g != 1 {
            return Err(Error::GcdViolation(g as i64));
        }
        let y = self.y_tilde();
        let phi = Stratum::levi_char_poly(&self.p, &y)?;
        let roots = phi.roots(field)?;
        if roots.len() < 2 {
            return Err(Error::Irreducible);
        }
        let n = self.n();
        let mut g0 = CMat::zeros(n, n);
        let mut label = vec![0usize; n];
        for lvl in 0..self.p.e() {
            let idx = self.p.indices_at_level(lvl);
            if idx.is_empty() {
                continue;
            }
            let yl = self.p.levi_block(&y, lvl)?;
            let b = idx.len();
            let mut cols: Vec<(usize, Vec<Scalar>)> = Vec::new();
            for (j, (a, _)) in roots.iter().enumerate() {
                let shifted = yl.sub(&CMat::identity(b).scale(a));
                for v in shifted.pow(b).kernel() {
                    cols.push((j, v));
                }
            }
            if cols.len() != b {
                return Err(Error::NonsplitField("Levi block does not split".into()));
            }
            for (p, (j, v)) in cols.into_iter().enumerate() {
                label[idx[p]] = j;
                for (q, x) in v.into_iter().enumerate() {
                    g0.set(idx[q], idx[p], x);
                }
            }
        }
        let g0inv = g0.inverse().ok_or(Error::SingularGauge)?;
        let gauge = LMat::from_const(&g0inv, 0);
        let beta = gauge.mul(&self.beta).mul(&LMat::from_const(&g0, 0));
        let partition: Vec<Vec<usize>> =
            (0..roots.len()).map(|j| (0..n).filter(|&k| label[k] == j).collect()).collect();
        let parts = partition
            .iter()
            .map(|idx| Stratum { p: self.p.restrict(idx), r: self.r, beta: beta.select(idx) })
            .collect();
        Ok(StratumSplit {
            gauge,
            beta,
            partition,
            roots: roots.into_iter().map(|(a, _)| a).collect(),
            parts,
        })
    }

    /// Regularity of the reduced stratum, with its torus data.
    pub fn regularity(&self, field: Field) -> Result<RegularityReport> {
        let s = self.reduce();
        let n = s.n();
        let e = s.p.e();
        let fail = |reason: &str, phi: Poly, roots: Vec<Scalar>| RegularityReport {
            regular: false,
            reason: Some(reason.to_string()),
            e,
            m: n / e,
            r: s.r,
            phi,
            roots,
            pure: false,
        };
        if s.r == 0 {
            let res = s.beta.coeff_matrix(0)?;
            let phi = res.charpoly();
            let roots = phi.roots(field)?;
            let vals: Vec<Scalar> = roots.iter().map(|(a, _)| a.clone()).collect();
            if roots.iter().any(|(_, k)| *k > 1) {
                return Ok(fail("repeated residue eigenvalue", phi, vals));
            }
            for (i, a) in vals.iter().enumerate() {
                for b in &vals[i + 1..] {
                    if (a - b).is_integer() {
                        return Ok(fail("residue eigenvalues differ by an integer", phi, vals));
                    }
                }
            }
            return Ok(RegularityReport {
                regular: true,
                reason: None,
                e: 1,
                m: n,
                r: 0,
                phi,
                roots: vals,
                pure: n == 1,
            });
        }
        let y = s.y_tilde();
        let phi = Stratum::levi_char_poly(&s.p, &y)?;
        let roots = phi.roots(field)?;
        let vals: Vec<Scalar> = roots.iter().map(|(a, _)| a.clone()).collect();
        if !s.p.is_uniform() {
            return Ok(fail("lattice chain is not uniform", phi, vals));
        }
        if vals.iter().any(|a| a.is_zero()) {
            return Ok(fail("characteristic polynomial has a zero root", phi, vals));
        }
        if roots.iter().any(|(_, k)| *k != e) {
            return Ok(fail("leading data repeats across blocks", phi, vals));
        }
        for lvl in 0..e {
            let yl = s.p.levi_block(&y, lvl)?;
            let b = yl.rows();
            let mut acc = CMat::identity(b);
            for a in &vals {
                acc = acc.mul(&yl.sub(&CMat::identity(b).scale(a)));
            }
            if !acc.is_zero() {
                return Ok(fail("leading term is not semisimple", phi, vals));
            }
        }
        Ok(RegularityReport {
            regular: true,
            reason: None,
            e,
            m: n / e,
            r: s.r,
            phi,
            pure: vals.len() == 1,
            roots: vals,
        })
    }
}
