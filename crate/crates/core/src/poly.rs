//! Univariate polynomials over the base field, with exact root extraction.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{convergents, Field, Scalar};
use num_rational::BigRational;
use num_traits::Zero;

/// Dense polynomial, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut c: Vec<Scalar>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn one() -> Poly {
        Poly::constant(Scalar::one())
    }

    pub fn constant(a: Scalar) -> Poly {
        Poly::new(vec![a])
    }

    pub fn x() -> Poly {
        Poly::new(vec![Scalar::zero(), Scalar::one()])
    }

    /// `X - a`.
    pub fn linear(a: &Scalar) -> Poly {
        Poly::new(vec![-a, Scalar::one()])
    }

    pub fn monomial(k: usize, a: Scalar) -> Poly {
        let mut c = vec![Scalar::zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.c.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn lead(&self) -> Scalar {
        self.c.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().inv().expect("nonzero lead");
        self.scale(&l)
    }

    pub fn scale(&self, a: &Scalar) -> Poly {
        Poly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Scalar::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division `self = q*d + r`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().inv().unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Scalar::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let f = &r[k] * &inv;
            if f.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                let sub = &f * dj;
                r[k - dd + j] -= &sub;
            }
            q[k - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * &Scalar::from_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Roots lying in `field` with multiplicities, plus the monic cofactor
    /// that has no roots in the field.
    pub fn split_roots(&self, field: Field) -> (Vec<(Scalar, usize)>, Poly) {
        let mut rest = self.monic();
        let mut roots: Vec<(Scalar, usize)> = Vec::new();
        if rest.degree().unwrap_or(0) == 0 {
            return (roots, rest);
        }
        let sf = rest.squarefree_part();
        for cand in candidate_roots(&sf, field) {
            if roots.iter().any(|(r, _)| *r == cand) {
                continue;
            }
            let lin = Poly::linear(&cand);
            let mut mult = 0;
            loop {
                let (q, r) = rest.divrem(&lin);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((cand, mult));
            }
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        (roots, rest)
    }

    /// All roots with multiplicity; fails unless the polynomial splits over `field`.
    pub fn roots(&self, field: Field) -> Result<Vec<(Scalar, usize)>> {
        let (roots, rest) = self.split_roots(field);
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::NonsplitField(format!(
                "factor {rest} has no roots in {}",
                field.name()
            )));
        }
        Ok(roots)
    }

    /// Factored text form when the polynomial splits, e.g. `(X-1)^2*X`.
    pub fn factored(&self, field: Field) -> Option<String> {
        let roots = self.roots(field).ok()?;
        if roots.is_empty() {
            return Some("1".into());
        }
        let parts: Vec<String> = roots
            .iter()
            .map(|(a, m)| {
                let base = if a.is_zero() {
                    "X".to_string()
                } else {
                    format!("(X-({a}))")
                };
                if *m == 1 {
                    base
                } else {
                    format!("{base}^{m}")
                }
            })
            .collect();
        Some(parts.join("*"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (k, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let coef = if a.is_real() {
                a.to_string()
            } else {
                format!("({a})")
            };
            let t = match k {
                0 => coef,
                _ => {
                    let x = if k == 1 { "X".to_string() } else { format!("X^{k}") };
                    if a.is_one() {
                        x
                    } else if *a == -Scalar::one() {
                        format!("-{x}")
                    } else {
                        format!("{coef}*{x}")
                    }
                }
            };
            terms.push(t);
        }
        let mut s = terms.join("+");
        s = s.replace("+-", "-");
        write!(f, "{s}")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn mul(self, o: C64) -> C64 {
        C64 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 {
            re: (self.re * o.re + self.im * o.im) / d,
            im: (self.im * o.re - self.re * o.im) / d,
        }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Floating-point root approximations (Aberth iteration) turned into exact
/// candidates through continued fractions. Candidates are only hints: every
/// one is verified exactly by the caller.
fn candidate_roots(p: &Poly, field: Field) -> Vec<Scalar> {
    let d = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return vec![],
    };
    let mut out = Vec::new();
    if p.coeff(0).is_zero() {
        out.push(Scalar::zero());
    }
    let c: Vec<C64> = p
        .monic()
        .coeffs()
        .iter()
        .map(|a| {
            let (re, im) = a.to_f64_pair();
            C64 { re, im }
        })
        .collect();
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return out;
    }
    let eval = |z: C64| -> (C64, C64) {
        let mut v = C64 { re: 0.0, im: 0.0 };
        let mut dv = C64 { re: 0.0, im: 0.0 };
        for a in c.iter().rev() {
            dv = dv.mul(z).add(v);
            v = v.mul(z).add(*a);
        }
        (v, dv)
    };
    let bound = 1.0 + c[..d].iter().map(|z| z.abs()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            C64 { re: 0.5 * bound * ang.cos(), im: 0.5 * bound * ang.sin() }
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let (v, dv) = eval(z[k]);
            if v.abs() == 0.0 {
                continue;
            }
            let ratio = v.div(dv);
            let mut s = C64 { re: 0.0, im: 0.0 };
            for j in 0..d {
                if j != k {
                    s = s.add(C64 { re: 1.0, im: 0.0 }.div(z[k].sub(z[j])));
                }
            }
            let denom = C64 { re: 1.0, im: 0.0 }.sub(ratio.mul(s));
            let step = ratio.div(denom);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] = z[k].sub(step);
                moved = moved.max(step.abs() / (1.0 + z[k].abs()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for w in z {
        let res = pick(w.re);
        let ims = if w.im.abs() < 1e-7 * (1.0 + w.re.abs()) {
            vec![BigRational::zero()]
        } else if field == Field::Q {
            continue;
        } else {
            pick(w.im)
        };
        'outer: for a in &res {
            for b in &ims {
                let s = Scalar::new(a.clone(), b.clone());
                if p.eval(&s).is_zero() {
                    out.push(s);
                    break 'outer;
                }
            }
        }
    }
    out
}

fn pick(x: f64) -> Vec<BigRational> {
    let mut c = convergents(x, 10_000_000);
    c.reverse();
    c.truncate(6);
    if x.abs() < 1e-9 {
        c.insert(0, BigRational::zero());
    }
    c
}
