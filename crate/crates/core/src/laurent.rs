//! Truncated Laurent series over the base field.
//!
//! A [`Series`] knows its coefficients below an absolute precision bound
//! (`None` means the series is exact, i.e. a Laurent polynomial). Every
//! operation propagates the bound by the usual t-adic rules, so results
//! never claim digits they do not have.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Operations that invent digits (inversion) refuse to go below this many.
pub const MIN_DIGITS: i64 = 4;

/// Default number of t-adic digits kept above the most negative order.
pub const DEFAULT_DIGITS: i64 = 24;

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// Laurent series `sum c_k t^k` known modulo `t^prec`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    start: i64,
    c: Vec<Scalar>,
    prec: Option<i64>,
}

impl Series {
    fn normalized(mut start: i64, mut c: Vec<Scalar>, prec: Option<i64>) -> Series {
        if let Some(p) = prec {
            let keep = (p - start).clamp(0, c.len() as i64) as usize;
            c.truncate(keep);
        }
        let lead = c.iter().position(|x| !x.is_zero());
        match lead {
            None => {
                c.clear();
                start = 0;
            }
            Some(k) => {
                if k > 0 {
                    c.drain(..k);
                    start += k as i64;
                }
                while c.last().is_some_and(|x| x.is_zero()) {
                    c.pop();
                }
            }
        }
        Series { start, c, prec }
    }

    /// The exact zero.
    pub fn zero() -> Series {
        Series { start: 0, c: vec![], prec: None }
    }

    /// Zero known modulo `t^prec`.
    pub fn zero_to(prec: i64) -> Series {
        Series { start: 0, c: vec![], prec: Some(prec) }
    }

    pub fn one() -> Series {
        Series::constant(Scalar::one())
    }

    pub fn constant(a: Scalar) -> Series {
        Series::monomial(a, 0)
    }

    /// Exact `a t^k`.
    pub fn monomial(a: Scalar, k: i64) -> Series {
        Series::normalized(k, vec![a], None)
    }

    /// Exact `t^k`.
    pub fn t_pow(k: i64) -> Series {
        Series::monomial(Scalar::one(), k)
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms(terms: &[(i64, Scalar)], prec: Option<i64>) -> Series {
        if terms.is_empty() {
            return match prec {
                Some(p) => Series::zero_to(p),
                None => Series::zero(),
            };
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut c = vec![Scalar::zero(); (hi - lo + 1) as usize];
        for (k, a) in terms {
            c[(k - lo) as usize] += a;
        }
        Series::normalized(lo, c, prec)
    }

    /// Coefficients `c[0..]` starting at exponent `start`.
    pub fn from_coeffs(start: i64, c: Vec<Scalar>, prec: Option<i64>) -> Series {
        Series::normalized(start, c, prec)
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn order(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Absolute precision: exponents at or above it are unknown. `None` is exact.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.c.is_empty() && self.prec.is_none()
    }

    /// No nonzero coefficient is known (exact zero or zero to precision).
    pub fn is_zero_known(&self) -> bool {
        self.c.is_empty()
    }

    /// Lower bound for the true valuation (`None` means the exact zero).
    pub fn val_bound(&self) -> Option<i64> {
        if self.c.is_empty() {
            self.prec
        } else {
            Some(self.start)
        }
    }

    /// Number of known digits above the order (`None` when exact).
    pub fn relative_precision(&self) -> Option<i64> {
        let p = self.prec?;
        Some(p - self.val_bound().unwrap_or(p))
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.c.first()
    }

    /// Coefficient of `t^k`, if known.
    pub fn coeff_known(&self, k: i64) -> Option<Scalar> {
        if self.prec.is_some_and(|p| k >= p) {
            return None;
        }
        if k < self.start || k >= self.start + self.c.len() as i64 {
            return Some(Scalar::zero());
        }
        Some(self.c[(k - self.start) as usize].clone())
    }

    /// Coefficient of `t^k`, or `INSUFFICIENT_PRECISION`.
    pub fn coeff(&self, k: i64) -> Result<Scalar> {
        self.coeff_known(k).ok_or_else(|| {
            Error::precision(format!("coefficient of t^{k} is beyond the known window"), k + 1)
        })
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(move |(k, a)| (self.start + k as i64, a))
    }

    /// Highest exponent carrying a nonzero known coefficient.
    pub fn top(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.start + self.c.len() as i64 - 1)
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let prec = min_opt(self.prec, o.prec);
        if self.c.is_empty() {
            return Series::normalized(o.start, o.c.clone(), prec);
        }
        if o.c.is_empty() {
            return Series::normalized(self.start, self.c.clone(), prec);
        }
        let lo = self.start.min(o.start);
        let hi = self.top().unwrap().max(o.top().unwrap());
        let hi = match prec {
            Some(p) => hi.min(p - 1),
            None => hi,
        };
        if hi < lo {
            return Series::normalized(0, vec![], prec);
        }
        let mut c = vec![Scalar::zero(); (hi - lo + 1) as usize];
        for (k, a) in self.c.iter().enumerate() {
            let idx = self.start + k as i64 - lo;
            if idx >= c.len() as i64 {
                break;
            }
            c[idx as usize] += a;
        }
        for (k, a) in o.c.iter().enumerate() {
            let idx = o.start + k as i64 - lo;
            if idx >= c.len() as i64 {
                break;
            }
            c[idx as usize] += a;
        }
        Series::normalized(lo, c, prec)
    }

    pub fn neg(&self) -> Series {
        Series {
            start: self.start,
            c: self.c.iter().map(|a| -a).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: &Scalar) -> Series {
        if a.is_zero() {
            return match self.prec {
                Some(p) => Series::zero_to(p),
                None => Series::zero(),
            };
        }
        Series {
            start: self.start,
            c: self.c.iter().map(|x| x * a).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series::normalized(self.start + k, self.c.clone(), self.prec.map(|p| p + k))
    }

    /// Product with precision `min(v(a) + N_b, v(b) + N_a)` in absolute terms.
    pub fn mul(&self, o: &Series) -> Series {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Series::zero();
        }
        let prec = min_opt(
            add_opt(self.val_bound(), o.prec),
            add_opt(o.val_bound(), self.prec),
        );
        if self.c.is_empty() || o.c.is_empty() {
            return Series::normalized(0, vec![], prec);
        }
        let lo = self.start + o.start;
        let mut len = self.c.len() + o.c.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - lo).max(0) as usize);
        }
        let mut c = vec![Scalar::zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                c[i + j] += &(a * b);
            }
        }
        Series::normalized(lo, c, prec)
    }

    /// Multiplicative inverse. Exact monomials invert exactly; otherwise the
    /// result carries `min(relative precision, rel_cap)` digits.
    pub fn inv(&self, rel_cap: i64) -> Result<Series> {
        let v = self.order().ok_or(Error::ZeroLeading)?;
        if self.prec.is_none() && self.c.len() == 1 {
            return Ok(Series::monomial(self.c[0].inv().unwrap(), -v));
        }
        let n = match self.relative_precision() {
            Some(r) => r.min(rel_cap),
            None => rel_cap,
        };
        if n < MIN_DIGITS {
            return Err(Error::precision(
                format!("inverse would keep only {n} digits"),
                MIN_DIGITS,
            ));
        }
        let a0inv = self.c[0].inv().unwrap();
        let mut b: Vec<Scalar> = Vec::with_capacity(n as usize);
        b.push(a0inv.clone());
        for k in 1..n as usize {
            let mut s = Scalar::zero();
            for j in 1..=k.min(self.c.len() - 1) {
                if self.c[j].is_zero() {
                    continue;
                }
                s += &(&self.c[j] * &b[k - j]);
            }
            b.push(-(&s * &a0inv));
        }
        Ok(Series::normalized(-v, b, Some(-v + n)))
    }

    /// Forget everything at or above `t^abs`.
    pub fn truncate(&self, abs: i64) -> Series {
        let prec = Some(match self.prec {
            Some(p) => p.min(abs),
            None => abs,
        });
        Series::normalized(self.start, self.c.clone(), prec)
    }

    /// `t d/dt`.
    pub fn tau(&self) -> Series {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, a)| a * &Scalar::from_int(self.start + k as i64))
            .collect();
        Series::normalized(self.start, c, self.prec)
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Series {
        self.tau().shift(-1)
    }

    /// Residue of `self * nu`.
    pub fn residue(&self, nu: &OneForm) -> Result<Scalar> {
        self.mul(nu.coefficient()).coeff(-1)
    }

    /// Equality on the digits both sides know.
    pub fn eq_to_precision(&self, o: &Series) -> bool {
        let p = min_opt(self.prec, o.prec);
        let d = self.sub(o);
        match p {
            Some(p) => d.truncate(p).is_zero_known(),
            None => d.is_zero_known(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms()
            .map(|(k, a)| {
                let coef = if a.is_real() { a.to_string() } else { format!("({a})") };
                match k {
                    0 => coef,
                    _ => format!("{coef}*t^{k}"),
                }
            })
            .collect();
        if let Some(p) = self.prec {
            parts.push(format!("O(t^{p})"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A one-form `nu = f dt` with `f` a nonzero Laurent series.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneForm {
    f: Series,
}

impl OneForm {
    pub fn new(f: Series) -> Result<OneForm> {
        if f.order().is_none() {
            return Err(Error::InvalidInput("one-form coefficient must be nonzero".into()));
        }
        Ok(OneForm { f })
    }

    /// `dt/t`.
    pub fn dt_over_t() -> OneForm {
        OneForm { f: Series::t_pow(-1) }
    }

    /// `dt`.
    pub fn dt() -> OneForm {
        OneForm { f: Series::one() }
    }

    /// `dt / t^k`.
    pub fn dt_over_t_pow(k: i64) -> OneForm {
        OneForm { f: Series::t_pow(-k) }
    }

    pub fn coefficient(&self) -> &Series {
        &self.f
    }

    /// `ord(dt/t^l) = -l`, which is the t-order of `f`.
    pub fn ord(&self) -> i64 {
        self.f.order().unwrap()
    }

    pub fn is_dt_over_t(&self) -> bool {
        self.f == Series::t_pow(-1)
    }

    /// The series `u = t f` with `nu = u dt/t`.
    pub fn relative_to_dt_over_t(&self) -> Series {
        self.f.shift(1)
    }
}
