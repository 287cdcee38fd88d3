//! Formal types, the affine Weyl group action and orbit equivalence.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::laurent::Series;
use crate::matrix::{CMat, LMat};
use crate::scalar::{Field, Scalar};
use crate::strata::Stratum;
use crate::toral::{varpi_power, ToralElement, TorusData};

/// `A = sum_{j,d} a_{j,d} varpi_E^d eps_j` for `-r <= d <= 0`; `coeffs[j][k]` holds
/// `a_{j, k - r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalType {
    pub e: usize,
    pub m: usize,
    pub r: i64,
    pub coeffs: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    /// Block `j` moves to position `perm[j]`.
    pub perm: Vec<usize>,
    /// Galois twist `varpi_E -> zeta^g varpi_E` on block `j`, modulo `e`.
    pub galois: Vec<usize>,
    /// `deg_E s_j` of the translation part.
    pub translation: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSearch {
    pub witness: Option<WeylElement>,
    /// Set when Galois twists were skipped for lack of roots of unity.
    pub warning: Option<String>,
}

impl FormalType {
    pub fn new(e: usize, m: usize, r: i64, coeffs: Vec<Vec<Scalar>>) -> Result<FormalType> {
        if e == 0 || m == 0 || r < 0 {
            return Err(Error::InvalidInput("formal type needs e, m >= 1 and r >= 0".into()));
        }
        if coeffs.len() != m || coeffs.iter().any(|c| c.len() != r as usize + 1) {
            return Err(Error::ShapeMismatch(format!("expected {m} blocks of {} coefficients", r + 1)));
        }
        Ok(FormalType { e, m, r, coeffs })
    }

    pub fn n(&self) -> usize {
        self.e * self.m
    }

    pub fn torus(&self) -> TorusData {
        TorusData::new(self.e, self.m)
    }

    /// `a_{j,d}`.
    pub fn coeff(&self, j: usize, d: i64) -> &Scalar {
        &self.coeffs[j][(d + self.r) as usize]
    }

    pub fn toral(&self) -> ToralElement {
        ToralElement::from_coeffs(self.torus(), -self.r, &self.coeffs)
    }

    /// The matrix `A_nu` against `dt/t`.
    pub fn realize(&self) -> LMat {
        self.toral().realize()
    }

    pub fn stratum(&self) -> Result<Stratum> {
        Stratum::new(self.torus().context(), self.r, self.realize())
    }

    /// Direct sum of formal types with the same `e` and `r`.
    pub fn direct_sum(parts: &[FormalType]) -> Result<FormalType> {
        let first = parts.first().ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
        if parts.iter().any(|p| p.e != first.e || p.r != first.r) {
            return Err(Error::ShapeMismatch("summands differ in e or r".into()));
        }
        let coeffs: Vec<Vec<Scalar>> = parts.iter().flat_map(|p| p.coeffs.clone()).collect();
        FormalType::new(first.e, coeffs.len(), first.r, coeffs)
    }

    pub fn validate(&self, field: Field) -> Validation {
        let mut diag = Vec::new();
        if self.coeffs.iter().flatten().any(|a| !field.contains(a)) {
            diag.push(format!("coefficients outside {}", field.name()));
        }
        if self.r > 0 {
            let g = (self.r as usize).gcd(&self.e);
            if g != 1 {
                diag.push(format!("gcd(r, e) = {g}"));
            }
            let lead: Vec<&Scalar> = (0..self.m).map(|j| self.coeff(j, -self.r)).collect();
            if lead.iter().any(|a| a.is_zero()) {
                diag.push("a leading coefficient vanishes".into());
            }
            let pows: Vec<Scalar> = lead.iter().map(|a| a.pow(self.e as u32)).collect();
            for i in 0..self.m {
                for j in i + 1..self.m {
                    if pows[i] == pows[j] {
                        diag.push(format!("blocks {i} and {j} have the same leading data"));
                    }
                }
            }
        } else {
            if self.e != 1 {
                diag.push("depth 0 requires e = 1".into());
            }
            for i in 0..self.m {
                for j in i + 1..self.m {
                    if (&self.coeffs[i][0] - &self.coeffs[j][0]).is_integer() {
                        diag.push(format!("blocks {i} and {j} differ by an integer"));
                    }
                }
            }
        }
        if diag.is_empty() {
            match self.stratum().and_then(|s| s.regularity(field)) {
                Ok(rep) if rep.regular => {}
                Ok(rep) => diag.push(format!(
                    "induced stratum is not regular: {}",
                    rep.reason.unwrap_or_default()
                )),
                Err(e) => diag.push(format!("induced stratum: {e}")),
            }
        }
        Validation { valid: diag.is_empty(), diagnostics: diag }
    }

    fn check_shape(&self, w: &WeylElement) -> Result<()> {
        if w.perm.len() != self.m || w.galois.len() != self.m || w.translation.len() != self.m {
            return Err(Error::ShapeMismatch(format!("Weyl element for {} blocks", w.perm.len())));
        }
        Ok(())
    }

    /// The action `Perm o Gal o Trans`.
    pub fn weyl_act(&self, w: &WeylElement, field: Field) -> Result<FormalType> {
        self.check_shape(w)?;
        let twists: Vec<Scalar> = w
            .galois
            .iter()
            .map(|&g| {
                field.zeta_power(self.e, g as i64).ok_or_else(|| {
                    Error::NonsplitField(format!("twist {g} needs roots of unity of order {} outside {}", self.e, field.name()))
                })
            })
            .collect::<Result<_>>()?;
        let e = Scalar::from_int(self.e as i64);
        let mut out = vec![Vec::new(); self.m];
        for j in 0..self.m {
            let mut c = self.coeffs[j].clone();
            let last = c.len() - 1;
            c[last] = &c[last] - &(Scalar::from_int(w.translation[j]) / e.clone());
            for (k, a) in c.iter_mut().enumerate() {
                let d = k as i64 - self.r;
                let tw = twists[j].powi(d).expect("root of unity is a unit");
                *a = &*a * &tw;
            }
            out[w.perm[j]] = c;
        }
        Ok(FormalType { e: self.e, m: self.m, r: self.r, coeffs: out })
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Find `w` with `weyl_act(w, a) = b`.
pub fn orbit_equivalent(a: &FormalType, b: &FormalType, field: Field) -> Result<OrbitSearch> {
    if a.n() != b.n() {
        return Err(Error::ShapeMismatch("formal types of different rank".into()));
    }
    let none = OrbitSearch { witness: None, warning: None };
    if a.e != b.e || a.m != b.m || a.r != b.r {
        return Ok(none);
    }
    let twists: Vec<usize> = (0..a.e).filter(|&g| field.zeta_power(a.e, g as i64).is_some()).collect();
    let warning = (twists.len() < a.e).then(|| {
        format!(
            "WARNING: {} lacks primitive {}-th roots of unity; Galois twists restricted to {:?}",
            field.name(),
            a.e,
            twists
        )
    });
    let e = Scalar::from_int(a.e as i64);
    let mut galois_choices: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..a.m {
        galois_choices = galois_choices
            .into_iter()
            .flat_map(|g| {
                twists.iter().map(move |&x| {
                    let mut h = g.clone();
                    h.push(x);
                    h
                })
            })
            .collect();
    }
    for perm in permutations(a.m) {
        let mut translation = Vec::with_capacity(a.m);
        for j in 0..a.m {
            let diff = &(a.coeff(j, 0) - b.coeff(perm[j], 0)) * &e;
            if !diff.is_integer() {
                break;
            }
            translation.push(diff.re().to_integer().try_into().unwrap_or(i64::MAX));
        }
        if translation.len() < a.m {
            continue;
        }
        for galois in &galois_choices {
            let w = WeylElement { perm: perm.clone(), galois: galois.clone(), translation: translation.clone() };
            if &a.weyl_act(&w, field)? == b {
                return Ok(OrbitSearch { witness: Some(w), warning });
            }
        }
    }
    Ok(OrbitSearch { witness: None, warning })
}

impl WeylElement {
    pub fn identity(m: usize) -> WeylElement {
        WeylElement { perm: (0..m).collect(), galois: vec![0; m], translation: vec![0; m] }
    }

    pub fn is_identity(&self) -> bool {
        *self == WeylElement::identity(self.perm.len())
    }

    /// `self * o`: apply `o` first.
    pub fn compose(&self, o: &WeylElement, e: usize) -> WeylElement {
        let m = o.perm.len();
        WeylElement {
            perm: (0..m).map(|j| self.perm[o.perm[j]]).collect(),
            galois: (0..m).map(|j| (o.galois[j] + self.galois[o.perm[j]]) % e).collect(),
            translation: (0..m).map(|j| o.translation[j] + self.translation[o.perm[j]]).collect(),
        }
    }

    pub fn inverse(&self, e: usize) -> WeylElement {
        let m = self.perm.len();
        let mut inv = WeylElement::identity(m);
        for j in 0..m {
            let p = self.perm[j];
            inv.perm[p] = j;
            inv.galois[p] = (e - self.galois[j] % e) % e;
            inv.translation[p] = -self.translation[j];
        }
        inv
    }

    /// A gauge transformation realizing the action: `Perm * Gal * Trans`, with
    /// translation by `varpi_E^{s_j}` and the Galois twist by conjugation with
    /// `diag(1, zeta^{-g}, zeta^{-2g}, ...)` on each block.
    pub fn gauge_matrix(&self, e: usize, field: Field) -> Result<LMat> {
        let m = self.perm.len();
        let n = e * m;
        let t = TorusData::new(e, m);
        let parts: Vec<Vec<usize>> = (0..m).map(|j| t.block(j)).collect();
        let trans: Vec<LMat> = self.translation.iter().map(|&s| varpi_power(e, s)).collect();
        let trans = LMat::assemble(n, &parts, &trans);
        let mut gal = vec![Series::zero(); n];
        for j in 0..m {
            let z = field
                .zeta_power(e, self.galois[j] as i64)
                .ok_or_else(|| Error::NonsplitField(format!("twist needs roots of unity of order {e}")))?;
            for i in 0..e {
                gal[j * e + i] = Series::constant(z.powi(-(i as i64)).unwrap());
            }
        }
        let gal = LMat::diag(&gal);
        let mut perm = LMat::zero(n);
        for j in 0..m {
            for p in 0..e {
                perm.set(self.perm[j] * e + p, j * e + p, Series::one());
            }
        }
        Ok(perm.mul(&gal).mul(&trans))
    }
}

/// Half the sum of the positive coroots of `gl_e` for the upper triangular
/// order: `diag((e-1)/2, (e-3)/2, ..., -(e-1)/2)`. It satisfies
/// `tau(varpi^s) = (s/e) varpi^s - (1/e) [H, varpi^s]`.
pub fn h_constant(e: usize) -> CMat {
    let v: Vec<Scalar> = (0..e).map(|i| Scalar::from_frac(e as i64 - 1 - 2 * i as i64, 2)).collect();
    CMat::diag(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ft(e: usize, r: i64, c: &[&[i64]]) -> FormalType {
        let coeffs = c.iter().map(|v| v.iter().map(|&x| Scalar::from_int(x)).collect()).collect();
        FormalType::new(e, c.len(), r, coeffs).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(ft(1, 1, &[&[1, 0], &[2, 0]]).validate(Field::Q).valid);
        assert!(!ft(1, 0, &[&[0], &[1]]).validate(Field::Q).valid);
        assert!(ft(2, 3, &[&[1, 0, 2, 0]]).validate(Field::Q).valid);
    }

    #[test]
    fn translation_shifts_residue() {
        let a = ft(2, 1, &[&[1, 3]]);
        let w = WeylElement { perm: vec![0], galois: vec![0], translation: vec![2] };
        let b = a.weyl_act(&w, Field::Q).unwrap();
        assert_eq!(b.coeffs[0][1], Scalar::from_int(2));
    }

    #[test]
    fn block_swap_is_found() {
        let a = ft(1, 1, &[&[1, 0], &[2, 0]]);
        let b = ft(1, 1, &[&[2, 0], &[1, 0]]);
        let w = orbit_equivalent(&a, &b, Field::Q).unwrap().witness.unwrap();
        assert_eq!(w.perm, vec![1, 0]);
    }

    #[test]
    fn h_identity() {
        for e in 1..5 {
            let h = LMat::from_const(&h_constant(e), 0);
            for s in -3..4 {
                let w = varpi_power(e, s);
                let rhs = w
                    .scale(&Scalar::from_frac(s, e as i64))
                    .sub(&h.commutator(&w).scale(&Scalar::from_frac(1, e as i64)));
                assert_eq!(w.tau(), rhs);
            }
        }
    }
}
