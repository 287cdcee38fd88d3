//! Standard lattice chains, parahoric filtrations and their graded pieces.
//!
//! A chain is stored through a level vector: basis vector `e_k` sits at level
//! `lambda_k` in `[0, e)`, and `t^c e_k` has weight `c*e + lambda_k`. The lattice
//! `L^i` is spanned by the vectors of weight at least `i`, so `L^0 = o^n` and
//! `dim L^i/L^{i+1}` is the number of basis vectors at level `i`.

use crate::error::{Error, Result};
use crate::laurent::Series;
use crate::matrix::{CMat, LMat};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParahoricContext {
    e: usize,
    levels: Vec<usize>,
}

/// The image of an element of `P^r` in `P^r/P^{r+1}`: one constant matrix per
/// source level `i`, mapping the level-`i` coordinates to level `(i+r) mod e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedEndo {
    pub r: i64,
    pub maps: Vec<CMat>,
}

impl GradedEndo {
    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

impl ParahoricContext {
    /// Chain with arbitrary level assignment.
    pub fn from_levels(e: usize, levels: Vec<usize>) -> Result<ParahoricContext> {
        if e == 0 || levels.is_empty() {
            return Err(Error::EmptyComposition);
        }
        if levels.iter().any(|&l| l >= e) {
            return Err(Error::InvalidInput(format!("levels must lie in [0, {e})")));
        }
        Ok(ParahoricContext { e, levels })
    }

    /// The standard chain for a composition `(b_0, ..., b_{e-1})` of `n`.
    ///
    /// Basis vectors are grouped by level, highest level first, so the
    /// parahoric is block upper triangular modulo `t`.
    pub fn standard(blocks: &[usize]) -> Result<ParahoricContext> {
        if blocks.is_empty() || blocks.iter().sum::<usize>() == 0 {
            return Err(Error::EmptyComposition);
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidInput("composition parts must be positive".into()));
        }
        let e = blocks.len();
        let mut levels = Vec::new();
        for lvl in (0..e).rev() {
            levels.extend(std::iter::repeat_n(lvl, blocks[lvl]));
        }
        Ok(ParahoricContext { e, levels })
    }

    /// `GL_n(o)`.
    pub fn maximal(n: usize) -> ParahoricContext {
        ParahoricContext { e: 1, levels: vec![0; n] }
    }

    /// The Iwahori chain, upper triangular modulo `t`.
    pub fn iwahori(n: usize) -> ParahoricContext {
        ParahoricContext { e: n, levels: (0..n).rev().collect() }
    }

    /// Chain of the standard torus with `m` blocks of size `e`: each block is an
    /// Iwahori chain of `gl_e`.
    pub fn torus(e: usize, m: usize) -> ParahoricContext {
        let levels = (0..m).flat_map(|_| (0..e).rev()).collect();
        ParahoricContext { e, levels }
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> usize {
        self.levels[k]
    }

    /// `(dim L^0/L^1, ..., dim L^{e-1}/L^e)`.
    pub fn blocks(&self) -> Vec<usize> {
        let mut b = vec![0; self.e];
        for &l in &self.levels {
            b[l] += 1;
        }
        b
    }

    pub fn is_uniform(&self) -> bool {
        let b = self.blocks();
        b.iter().all(|&x| x == b[0])
    }

    /// Whether the basis is grouped by level in descending order.
    pub fn is_standard(&self) -> bool {
        self.levels.windows(2).all(|w| w[0] >= w[1]) && !self.blocks().contains(&0)
    }

    /// Basis indices at a level, in basis order.
    pub fn indices_at_level(&self, lvl: usize) -> Vec<usize> {
        (0..self.n()).filter(|&k| self.levels[k] == lvl).collect()
    }

    /// `dim P^r/P^{r+1}`.
    pub fn graded_dim(&self, r: i64) -> usize {
        let b = self.blocks();
        let e = self.e as i64;
        (0..self.e).map(|i| b[i] * b[(i as i64 + r).rem_euclid(e) as usize]).sum()
    }

    /// Filtration degree contributed by `t^c` in entry `(a, b)`.
    pub fn entry_degree(&self, a: usize, b: usize, c: i64) -> i64 {
        self.e as i64 * c + self.levels[a] as i64 - self.levels[b] as i64
    }

    /// Smallest t-order entry `(a, b)` may have inside `P^d`.
    pub fn min_entry_order(&self, a: usize, b: usize, d: i64) -> i64 {
        div_ceil(d - self.levels[a] as i64 + self.levels[b] as i64, self.e as i64)
    }

    /// The uniformizer `varpi_P` (a generator of `P^1` with `varpi^e = t`),
    /// available for uniform chains. It sends the j-th vector of level `l` to the
    /// j-th vector of level `l+1`, and level `e-1` to `t` times level 0.
    pub fn varpi(&self) -> Option<LMat> {
        if !self.is_uniform() {
            return None;
        }
        let by_level: Vec<Vec<usize>> = (0..self.e).map(|l| self.indices_at_level(l)).collect();
        let mut m = LMat::zero(self.n());
        for l in 0..self.e {
            for (j, &src) in by_level[l].iter().enumerate() {
                if l + 1 < self.e {
                    m.set(by_level[l + 1][j], src, Series::one());
                } else {
                    m.set(by_level[0][j], src, Series::t_pow(1));
                }
            }
        }
        Some(m)
    }

    /// The largest `r` with `X` in `P^r`; `None` for the exact zero matrix.
    pub fn filtration_degree(&self, x: &LMat) -> Result<Option<i64>> {
        let n = self.n();
        let mut known: Option<i64> = None;
        let mut uncertain: Option<i64> = None;
        for a in 0..n {
            for b in 0..n {
                let s = x.get(a, b);
                match s.order() {
                    Some(o) => {
                        let d = self.entry_degree(a, b, o);
                        known = Some(known.map_or(d, |k| k.min(d)));
                    }
                    None => {
                        if let Some(p) = s.prec() {
                            let d = self.entry_degree(a, b, p);
                            uncertain = Some(uncertain.map_or(d, |k| k.min(d)));
                        }
                    }
                }
            }
        }
        match (known, uncertain) {
            (k, None) => Ok(k),
            (Some(k), Some(u)) if k < u => Ok(Some(k)),
            (k, Some(u)) => Err(Error::precision(
                "filtration degree not determined by the known digits",
                k.unwrap_or(u) - u + 1,
            )),
        }
    }

    /// A guaranteed lower bound for the filtration degree (`None`: exact zero).
    pub fn degree_lower_bound(&self, x: &LMat) -> Option<i64> {
        let n = self.n();
        let mut best: Option<i64> = None;
        for a in 0..n {
            for b in 0..n {
                if let Some(v) = x.get(a, b).val_bound() {
                    let d = self.entry_degree(a, b, v);
                    best = Some(best.map_or(d, |k| k.min(d)));
                }
            }
        }
        best
    }

    /// Whether `X` lies in `P^r`; errors when the known digits cannot decide.
    pub fn contains(&self, x: &LMat, r: i64) -> Result<bool> {
        if self.degree_lower_bound(x).is_none_or(|d| d >= r) {
            return Ok(true);
        }
        match self.filtration_degree(x) {
            Ok(d) => Ok(d.is_none_or(|d| d >= r)),
            Err(_) => {
                let n = self.n();
                for a in 0..n {
                    for b in 0..n {
                        if let Some(o) = x.get(a, b).order() {
                            if self.entry_degree(a, b, o) < r {
                                return Ok(false);
                            }
                        }
                    }
                }
                Err(Error::precision("membership in the filtration is undetermined", 1))
            }
        }
    }

    /// Positions `(a, b, c)` with `e*c + lambda_a - lambda_b = d`, the coordinates
    /// of `P^d/P^{d+1}`.
    pub fn graded_positions(&self, d: i64) -> Vec<(usize, usize, i64)> {
        let n = self.n();
        let e = self.e as i64;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let num = d - self.levels[a] as i64 + self.levels[b] as i64;
                if num.rem_euclid(e) == 0 {
                    out.push((a, b, div_floor(num, e)));
                }
            }
        }
        out
    }

    /// Coordinates of the degree-`d` homogeneous part of `X`.
    pub fn graded_vector(&self, x: &LMat, d: i64) -> Result<Vec<Scalar>> {
        self.graded_positions(d)
            .into_iter()
            .map(|(a, b, c)| x.get(a, b).coeff(c))
            .collect()
    }

    /// The homogeneous matrix of degree `d` with the given coordinates.
    pub fn from_graded_vector(&self, d: i64, v: &[Scalar]) -> LMat {
        let mut m = LMat::zero(self.n());
        for ((a, b, c), x) in self.graded_positions(d).into_iter().zip(v) {
            if !x.is_zero() {
                m.set(a, b, Series::monomial(x.clone(), c));
            }
        }
        m
    }

    /// Degree-`d` homogeneous part of `X` as a matrix.
    pub fn homogeneous_part(&self, x: &LMat, d: i64) -> Result<LMat> {
        Ok(self.from_graded_vector(d, &self.graded_vector(x, d)?))
    }

    /// The image of `X` in `P^r/P^{r+1}`.
    pub fn graded_component(&self, x: &LMat, r: i64) -> Result<GradedEndo> {
        if !self.contains(x, r)? {
            let actual = self.filtration_degree(x)?.unwrap_or(r);
            return Err(Error::NotInFiltration { wanted: r, actual });
        }
        let e = self.e as i64;
        let maps = (0..self.e)
            .map(|i| {
                let src = self.indices_at_level(i);
                let tgt = self.indices_at_level((i as i64 + r).rem_euclid(e) as usize);
                let mut m = CMat::zeros(tgt.len(), src.len());
                for (p, &a) in tgt.iter().enumerate() {
                    for (q, &b) in src.iter().enumerate() {
                        let c = div_floor(r - self.levels[a] as i64 + self.levels[b] as i64, e);
                        m.set(p, q, x.get(a, b).coeff(c)?);
                    }
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GradedEndo { r, maps })
    }

    /// A homogeneous representative of a graded element.
    pub fn lift(&self, g: &GradedEndo) -> LMat {
        let e = self.e as i64;
        let mut m = LMat::zero(self.n());
        for (i, map) in g.maps.iter().enumerate() {
            let src = self.indices_at_level(i);
            let tgt = self.indices_at_level((i as i64 + g.r).rem_euclid(e) as usize);
            for (p, &a) in tgt.iter().enumerate() {
                for (q, &b) in src.iter().enumerate() {
                    let x = map.get(p, q);
                    if !x.is_zero() {
                        let c = div_floor(g.r - self.levels[a] as i64 + self.levels[b] as i64, e);
                        m.set(a, b, Series::monomial(x.clone(), c));
                    }
                }
            }
        }
        m
    }

    /// Constant-term Levi block of `X` at a level (rows and columns of that level).
    pub fn levi_block(&self, x: &LMat, lvl: usize) -> Result<CMat> {
        let idx = self.indices_at_level(lvl);
        let mut m = CMat::zeros(idx.len(), idx.len());
        for (p, &a) in idx.iter().enumerate() {
            for (q, &b) in idx.iter().enumerate() {
                m.set(p, q, x.get(a, b).coeff(0)?);
            }
        }
        Ok(m)
    }

    /// The chain restricted to a subset of basis vectors, same period.
    pub fn restrict(&self, idx: &[usize]) -> ParahoricContext {
        ParahoricContext { e: self.e, levels: idx.iter().map(|&k| self.levels[k]).collect() }
    }

    /// The sub-chain `L'^j = L^{jg}` for `g | e`.
    pub fn coarsen(&self, g: usize) -> ParahoricContext {
        assert!(g > 0 && self.e % g == 0);
        ParahoricContext { e: self.e / g, levels: self.levels.iter().map(|l| l / g).collect() }
    }

    /// Permutation putting the basis in standard order (levels descending,
    /// stable), as a list `perm` with new index `k` holding old index `perm[k]`.
    pub fn standard_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by_key(|&k| std::cmp::Reverse(self.levels[k]));
        idx
    }

    /// Whether a (square) constant-coefficient-exact matrix lies in the group `P`.
    pub fn contains_unit(&self, g: &LMat, rel_cap: i64) -> Result<bool> {
        if !self.contains(g, 0)? {
            return Ok(false);
        }
        let gi = match g.inverse(rel_cap) {
            Ok(h) => h,
            Err(Error::SingularGauge) => return Ok(false),
            Err(e) => return Err(e),
        };
        self.contains(&gi, 0)
    }
}
