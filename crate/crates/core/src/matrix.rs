//! Constant matrices over the base field and square matrices of Laurent series.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::{OneForm, Series};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Dense rectangular matrix over the base field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CMat {
    rows: usize,
    cols: usize,
    d: Vec<Scalar>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> CMat {
        CMat { rows, cols, d: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> CMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut d = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            d.extend(row);
        }
        CMat { rows: r, cols: c, d }
    }

    pub fn from_ints(rows: &[&[i64]]) -> CMat {
        CMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn diag(v: &[Scalar]) -> CMat {
        let mut m = CMat::zeros(v.len(), v.len());
        for (k, a) in v.iter().enumerate() {
            m.set(k, k, a.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.d[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: Scalar) {
        self.d[i * self.cols + j] = a;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.d[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<Scalar>]) -> CMat {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = CMat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, a) in col.iter().enumerate() {
                m.set(i, j, a.clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|a| a.is_zero())
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        assert_eq!(self.cols, o.rows);
        let mut m = CMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = a * b;
                    m.d[i * o.cols + j] += &v;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                let mut s = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s += &(self.get(i, j) * x);
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, a: &Scalar) -> CMat {
        CMat { rows: self.rows, cols: self.cols, d: self.d.iter().map(|x| x * a).collect() }
    }

    pub fn transpose(&self) -> CMat {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn pow(&self, k: usize) -> CMat {
        let mut out = CMat::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (CMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.d.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b` (free variables set to zero), if consistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = CMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<CMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = CMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().unwrap();
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn trace(&self) -> Scalar {
        let mut s = Scalar::zero();
        for k in 0..self.rows.min(self.cols) {
            s += self.get(k, k);
        }
        s
    }

    /// Monic characteristic polynomial `det(X - A)` (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> Poly {
        let n = self.rows;
        let mut c = vec![Scalar::zero(); n + 1];
        c[n] = Scalar::one();
        let mut m = CMat::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            m = next;
            let am = self.mul(&m);
            c[n - k] = -(am.trace() / Scalar::from_int(k as i64));
        }
        Poly::new(c)
    }

    pub fn is_nilpotent(&self) -> bool {
        let n = self.rows;
        self.charpoly() == Poly::monomial(n, Scalar::one())
    }

    /// `p(A)` by Horner.
    pub fn eval_poly(&self, p: &Poly) -> CMat {
        let n = self.rows;
        let mut acc = CMat::zeros(n, n);
        for a in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for k in 0..n {
                let v = acc.get(k, k) + a;
                acc.set(k, k, v);
            }
        }
        acc
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CMat {
        let mut m = CMat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|a| a.to_string()).collect();
            write!(f, "{}", r.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Square matrix of Laurent series, an element of gl_n(F).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LMat {
    n: usize,
    e: Vec<Series>,
}

impl LMat {
    pub fn zero(n: usize) -> LMat {
        LMat { n, e: vec![Series::zero(); n * n] }
    }

    pub fn identity(n: usize) -> LMat {
        let mut m = LMat::zero(n);
        for k in 0..n {
            m.set(k, k, Series::one());
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Series) -> LMat {
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(f(i, j));
            }
        }
        LMat { n, e }
    }

    pub fn from_rows(rows: Vec<Vec<Series>>) -> LMat {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            e.extend(r);
        }
        LMat { n, e }
    }

    /// The constant matrix `c` times `t^k`.
    pub fn from_const(c: &CMat, k: i64) -> LMat {
        assert_eq!(c.rows(), c.cols());
        LMat::from_fn(c.rows(), |i, j| Series::monomial(c.get(i, j).clone(), k))
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(v: &[Series]) -> LMat {
        let mut m = LMat::zero(v.len());
        for (k, s) in v.iter().enumerate() {
            m.set(k, k, s.clone());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Series) {
        self.e[i * self.n + j] = s;
    }

    pub fn entries(&self) -> &[Series] {
        &self.e
    }

    pub fn map(&self, f: impl Fn(&Series) -> Series) -> LMat {
        LMat { n: self.n, e: self.e.iter().map(f).collect() }
    }

    pub fn add(&self, o: &LMat) -> LMat {
        LMat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &LMat) -> LMat {
        LMat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> LMat {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, a: &Scalar) -> LMat {
        self.map(|x| x.scale(a))
    }

    pub fn scale_series(&self, s: &Series) -> LMat {
        self.map(|x| x.mul(s))
    }

    /// Multiply every entry by `t^k`.
    pub fn shift(&self, k: i64) -> LMat {
        self.map(|x| x.shift(k))
    }

    pub fn mul(&self, o: &LMat) -> LMat {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Series::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                e.push(acc);
            }
        }
        LMat { n, e }
    }

    pub fn mul_vec(&self, v: &[Series]) -> Vec<Series> {
        (0..self.n)
            .map(|i| {
                let mut acc = Series::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if a.is_exact_zero() || x.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(x));
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> LMat {
        let mut out = LMat::identity(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, o: &LMat) -> LMat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> Series {
        let mut acc = Series::zero();
        for k in 0..self.n {
            acc = acc.add(self.get(k, k));
        }
        acc
    }

    /// Entrywise `t d/dt`.
    pub fn tau(&self) -> LMat {
        self.map(|x| x.tau())
    }

    pub fn truncate(&self, abs: i64) -> LMat {
        self.map(|x| x.truncate(abs))
    }

    /// Smallest order among entries with a known nonzero coefficient.
    pub fn min_order(&self) -> Option<i64> {
        self.e.iter().filter_map(|x| x.order()).min()
    }

    /// Lower bound for every entry's valuation (`None`: exact zero matrix).
    pub fn val_bound(&self) -> Option<i64> {
        self.e.iter().filter_map(|x| x.val_bound()).min()
    }

    /// Smallest absolute precision among entries (`None`: exact).
    pub fn prec(&self) -> Option<i64> {
        self.e.iter().filter_map(|x| x.prec()).min()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_exact_zero())
    }

    pub fn is_zero_known(&self) -> bool {
        self.e.iter().all(|x| x.is_zero_known())
    }

    /// The constant matrix of `t^k` coefficients.
    pub fn coeff_matrix(&self, k: i64) -> Result<CMat> {
        let mut m = CMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).coeff(k)?);
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> LMat {
        LMat::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Principal sub-matrix on an index list.
    pub fn select(&self, idx: &[usize]) -> LMat {
        LMat::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    /// Block-diagonal assembly placing `blocks[k]` on `parts[k]`.
    pub fn assemble(n: usize, parts: &[Vec<usize>], blocks: &[LMat]) -> LMat {
        let mut m = LMat::zero(n);
        for (idx, b) in parts.iter().zip(blocks) {
            for (a, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    m.set(i, j, b.get(a, c).clone());
                }
            }
        }
        m
    }

    /// Equality on commonly known digits.
    pub fn eq_to_precision(&self, o: &LMat) -> bool {
        self.e.iter().zip(&o.e).all(|(a, b)| a.eq_to_precision(b))
    }

    /// Matrix inverse by Gauss-Jordan elimination with minimal-valuation pivots.
    pub fn inverse(&self, rel_cap: i64) -> Result<LMat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = LMat::identity(n);
        for col in 0..n {
            let mut best: Option<(usize, i64)> = None;
            for r in col..n {
                if let Some(v) = a.get(r, col).order() {
                    if best.is_none_or(|(_, bv)| v < bv) {
                        best = Some((r, v));
                    }
                }
            }
            let (p, _) = best.ok_or(Error::SingularGauge)?;
            if p != col {
                for j in 0..n {
                    a.e.swap(p * n + j, col * n + j);
                    inv.e.swap(p * n + j, col * n + j);
                }
            }
            let pinv = a.get(col, col).inv(rel_cap)?;
            for j in 0..n {
                let x = a.get(col, j).mul(&pinv);
                a.set(col, j, x);
                let y = inv.get(col, j).mul(&pinv);
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let x = a.get(r, j).sub(&f.mul(a.get(col, j)));
                    a.set(r, j, x);
                    let y = inv.get(r, j).sub(&f.mul(inv.get(col, j)));
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Debug for LMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.n {
            let r: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `<A, B>_nu = Res(Tr(AB) nu)`.
pub fn pairing(a: &LMat, b: &LMat, nu: &OneForm) -> Result<Scalar> {
    a.mul(b).trace().residue(nu)
}
