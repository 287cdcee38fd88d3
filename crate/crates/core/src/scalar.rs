//! Exact base-field scalars.
//!
//! Every scalar is stored as a Gaussian rational `re + im*i`. Sessions over
//! the rationals simply never produce a nonzero imaginary part; [`Field`]
//! decides which values are admissible and which roots may be taken.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Base field of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Field {
    /// The rationals.
    #[default]
    Q,
    /// The Gaussian rationals Q(i).
    QI,
}

impl Field {
    pub fn contains(self, x: &Scalar) -> bool {
        match self {
            Field::Q => x.im.is_zero(),
            Field::QI => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Q => "Q",
            Field::QI => "Q(i)",
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        match s.trim() {
            "Q" | "q" => Ok(Field::Q),
            "Q(i)" | "QI" | "Qi" | "q(i)" => Ok(Field::QI),
            other if other.starts_with("Q(zeta") => Err(Error::NonsplitField(format!(
                "{other} is not available; use Q or Q(i)"
            ))),
            other => Err(Error::Parse(format!("unknown field {other:?}"))),
        }
    }

    /// A primitive `e`-th root of unity in the field, if there is one.
    pub fn root_of_unity(self, e: usize) -> Option<Scalar> {
        match (self, e) {
            (_, 1) => Some(Scalar::one()),
            (_, 2) => Some(-Scalar::one()),
            (Field::QI, 4) => Some(Scalar::i()),
            _ => None,
        }
    }

    /// `exp(2 pi i g / e)` when it lies in the field.
    pub fn zeta_power(self, e: usize, g: i64) -> Option<Scalar> {
        let ei = e as i64;
        let g = g.rem_euclid(ei);
        let d = num_integer::gcd(g, ei);
        let k = (ei / d) as usize;
        self.root_of_unity(k).map(|z| z.pow((g / d) as u32))
    }
}

/// An element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for elements of Z (imaginary part zero, integral real part).
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Norm `re^2 + im^2`.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar::from_rational(self.re.recip()));
        }
        let n = self.norm();
        Some(Scalar {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn powi(&self, k: i64) -> Option<Scalar> {
        if k >= 0 {
            Some(self.pow(k as u32))
        } else {
            self.inv().map(|x| x.pow((-k) as u32))
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Deterministic total order: lexicographic on
    /// (real numerator, real denominator, imaginary numerator, imaginary denominator).
    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        self.re
            .numer()
            .cmp(other.re.numer())
            .then_with(|| self.re.denom().cmp(other.re.denom()))
            .then_with(|| self.im.numer().cmp(other.im.numer()))
            .then_with(|| self.im.denom().cmp(other.im.denom()))
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Canonical text form of a rational: `p` or `p/q` in lowest terms.
pub fn rational_to_string(q: &BigRational) -> String {
    fmt_rational(q)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = fmt_rational(&self.im.abs());
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{im_abs}*i");
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*i", fmt_rational(&self.re), sign, im_abs)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

fn parse_imag(s: &str) -> Result<BigRational> {
    // s is the part carrying the i, sign included.
    let body = s.trim().strip_suffix('i').ok_or_else(|| Error::Parse(format!("bad imaginary part {s:?}")))?;
    let body = body.trim().strip_suffix('*').unwrap_or(body).trim();
    match body {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        b => parse_rational(b),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q+r/s*i`, `p/q-r/s*i`, `r/s*i`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Scalar> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if !t.ends_with('i') {
            return Ok(Scalar::from_rational(parse_rational(&t)?));
        }
        // Split at the last sign that is not at position 0.
        let bytes = t.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if bytes[k] == b'+' || bytes[k] == b'-' {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re = parse_rational(&t[..k])?;
                let im = parse_imag(&t[k..])?;
                Ok(Scalar { re, im })
            }
            None => Ok(Scalar {
                re: BigRational::zero(),
                im: parse_imag(&t)?,
            }),
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if o.im.is_zero() && self.im.is_zero() {
            return Scalar::from_rational(&self.re + &o.re);
        }
        Scalar {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        if o.im.is_zero() && self.im.is_zero() {
            return Scalar::from_rational(&self.re - &o.re);
        }
        Scalar {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() {
            if o.im.is_zero() {
                return Scalar::from_rational(&self.re * &o.re);
            }
            return Scalar {
                re: &self.re * &o.re,
                im: &self.re * &o.im,
            };
        }
        if o.im.is_zero() {
            return Scalar {
                re: &self.re * &o.re,
                im: &self.im * &o.re,
            };
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        let inv = o.inv().expect("division by zero scalar");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
pub(crate) fn convergents(x: f64, max_den: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 || k2 <= 0 {
            break;
        }
        out.push(BigRational::new(BigInt::from(h2), BigInt::from(k2)));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = y - a;
        if frac.abs() < 1e-13 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "3", "-7/2", "1/2+3/4*i", "1/2-3/4*i", "2*i", "-i", "i", "5-i"] {
            let x: Scalar = s.parse().unwrap();
            let y: Scalar = x.to_string().parse().unwrap();
            assert_eq!(x, y, "{s}");
        }
        assert_eq!("-i".parse::<Scalar>().unwrap(), -Scalar::i());
        assert_eq!("1/2-3/4*i".parse::<Scalar>().unwrap().to_string(), "1/2-3/4*i");
        assert_eq!("4/6".parse::<Scalar>().unwrap().to_string(), "2/3");
    }

    #[test]
    fn gaussian_arithmetic() {
        let a = Scalar::gaussian((1, 2), (1, 1));
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert_eq!(Scalar::i().pow(2), -Scalar::one());
        assert!(Field::Q.root_of_unity(4).is_none());
        assert_eq!(Field::QI.root_of_unity(4).unwrap().pow(4), Scalar::one());
    }

    #[test]
    fn convergents_find_simple_fractions() {
        let c = convergents(-7.0 / 3.0, 1000);
        assert!(c.contains(&BigRational::new((-7).into(), 3.into())));
    }
}
