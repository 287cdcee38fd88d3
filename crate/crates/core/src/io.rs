//! JSON reading and writing for series, matrices, connections, formal types,
//! Weyl elements and global configurations.
//!
//! Keys come out sorted (serde_json's default map), so output bytes are stable.

use serde_json::{json, Map, Value};

use crate::connection::FormalConnection;
use crate::error::{Error, Result};
use crate::formal::{FormalType, WeylElement};
use crate::laurent::{OneForm, Series};
use crate::matrix::{CMat, LMat};
use crate::moduli::{ConfigEntry, GlobalConfig, GlobalConnection, OrbitDimensions, Point, PrincipalPart};
use crate::scalar::{Field, Scalar};
use crate::strata::{RegularityReport, Stratum};
use crate::toral::ToralElement;

pub const SCHEMA_VERSION: u64 = 1;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing key {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))
}

fn as_int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| perr(format!("{what} must be an integer")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| perr(format!("{what} must be a nonnegative integer")))
}

pub fn parse_scalar(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => n.as_i64().map(Scalar::from_int).ok_or_else(|| perr(format!("non-integer number {n}"))),
        _ => Err(perr("coefficient must be a string or integer")),
    }
}

pub fn scalar_json(a: &Scalar) -> Value {
    Value::String(a.to_string())
}

fn parse_terms(v: &Value) -> Result<Vec<(i64, Scalar)>> {
    as_array(v, "series")?
        .iter()
        .map(|p| {
            let pair = as_array(p, "term")?;
            if pair.len() != 2 {
                return Err(perr("term must be [exponent, coefficient]"));
            }
            Ok((as_int(&pair[0], "exponent")?, parse_scalar(&pair[1])?))
        })
        .collect()
}

/// `[[k, "c"], ...]` (exact) or `{"terms": [...], "prec": N}`.
pub fn parse_series(v: &Value) -> Result<Series> {
    match v {
        Value::Array(_) => Ok(Series::from_terms(&parse_terms(v)?, None)),
        Value::Object(_) => {
            let prec = match v.get("prec") {
                Some(Value::Null) | None => None,
                Some(p) => Some(as_int(p, "prec")?),
            };
            Ok(Series::from_terms(&parse_terms(field_of(v, "terms")?)?, prec))
        }
        _ => Err(perr("series must be a list of terms or an object")),
    }
}

pub fn series_json(s: &Series) -> Value {
    let terms: Vec<Value> = s.terms().map(|(k, c)| json!([k, c.to_string()])).collect();
    match s.prec() {
        None => Value::Array(terms),
        Some(p) => json!({ "terms": terms, "prec": p }),
    }
}

pub fn parse_matrix(v: &Value) -> Result<LMat> {
    let rows = as_array(v, "matrix")?;
    let n = rows.len();
    let parsed = rows
        .iter()
        .map(|r| {
            let r = as_array(r, "matrix row")?;
            if r.len() != n {
                return Err(perr("matrix must be square"));
            }
            r.iter().map(parse_series).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if n == 0 {
        return Err(perr("empty matrix"));
    }
    Ok(LMat::from_rows(parsed))
}

pub fn matrix_json(m: &LMat) -> Value {
    Value::Array((0..m.n()).map(|a| Value::Array((0..m.n()).map(|b| series_json(m.get(a, b))).collect())).collect())
}

pub fn parse_cmat(v: &Value) -> Result<CMat> {
    let rows = as_array(v, "constant matrix")?
        .iter()
        .map(|r| as_array(r, "row")?.iter().map(parse_scalar).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(perr("constant matrix must be square and nonempty"));
    }
    Ok(CMat::from_rows(rows))
}

pub fn cmat_json(m: &CMat) -> Value {
    Value::Array((0..m.rows()).map(|a| Value::Array((0..m.cols()).map(|b| scalar_json(&m.get(a, b))).collect())).collect())
}

/// `"dt"`, `"dt/t"`, or `{"order": k, "coeffs": [u_0, u_1, ...]}` for
/// `nu = t^k (u_0 + u_1 t + ...) dt`.
pub fn parse_nu(v: &Value) -> Result<OneForm> {
    match v {
        Value::String(s) => match s.trim() {
            "dt" => Ok(OneForm::dt()),
            "dt/t" => Ok(OneForm::dt_over_t()),
            other => Err(perr(format!("unknown one-form {other:?}"))),
        },
        Value::Object(_) => {
            let k = as_int(field_of(v, "order")?, "order")?;
            let coeffs = match v.get("coeffs") {
                None => vec![Scalar::one()],
                Some(c) => as_array(c, "coeffs")?.iter().map(parse_scalar).collect::<Result<_>>()?,
            };
            if coeffs.first().is_none_or(|c| c.is_zero()) {
                return Err(perr("one-form unit must have a nonzero constant term"));
            }
            OneForm::new(Series::from_coeffs(k, coeffs, None))
        }
        _ => Err(perr("nu must be a string or object")),
    }
}

pub fn nu_json(nu: &OneForm) -> Value {
    if nu.is_dt_over_t() {
        return json!("dt/t");
    }
    if *nu == OneForm::dt() {
        return json!("dt");
    }
    let f = nu.coefficient();
    let k = nu.ord();
    let top = f.top().unwrap_or(k);
    let coeffs: Vec<Value> = (k..=top).map(|i| scalar_json(&f.coeff_known(i).unwrap_or_else(Scalar::zero))).collect();
    json!({ "order": k, "coeffs": coeffs })
}

/// A parsed `.conn.json` document.
#[derive(Clone, Debug)]
pub struct ConnFile {
    pub field: Field,
    pub nu: OneForm,
    pub matrix: LMat,
}

impl ConnFile {
    pub fn connection(&self) -> FormalConnection {
        FormalConnection::new(self.matrix.clone(), &self.nu, self.field)
    }
}

/// `{n, field, nu, matrix}`; `field` and `nu` fall back to the given defaults.
pub fn parse_conn(v: &Value, field: Option<Field>, nu: Option<&OneForm>) -> Result<ConnFile> {
    let matrix = parse_matrix(field_of(v, "matrix")?)?;
    if let Some(n) = v.get("n") {
        if as_usize(n, "n")? != matrix.n() {
            return Err(perr("n does not match the matrix size"));
        }
    }
    let field = match (field, v.get("field")) {
        (Some(f), _) => f,
        (None, Some(f)) => Field::parse(f.as_str().ok_or_else(|| perr("field must be a string"))?)?,
        (None, None) => Field::Q,
    };
    let nu = match (nu, v.get("nu")) {
        (Some(n), _) => n.clone(),
        (None, Some(n)) => parse_nu(n)?,
        (None, None) => OneForm::dt_over_t(),
    };
    for s in matrix.entries() {
        if s.terms().any(|(_, c)| !field.contains(c)) {
            return Err(Error::NonsplitField(format!("coefficient outside {}", field.name())));
        }
    }
    Ok(ConnFile { field, nu, matrix })
}

pub fn conn_json(m: &LMat, nu: &OneForm, field: Field) -> Value {
    json!({ "n": m.n(), "field": field.name(), "nu": nu_json(nu), "matrix": matrix_json(m) })
}

pub fn parse_formal_type(v: &Value) -> Result<FormalType> {
    let coeffs = as_array(field_of(v, "coeffs")?, "coeffs")?
        .iter()
        .map(|r| as_array(r, "block coefficients")?.iter().map(parse_scalar).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    FormalType::new(
        as_usize(field_of(v, "e")?, "e")?,
        as_usize(field_of(v, "m")?, "m")?,
        as_int(field_of(v, "r")?, "r")?,
        coeffs,
    )
}

pub fn formal_type_json(a: &FormalType) -> Value {
    let coeffs: Vec<Value> = a.coeffs.iter().map(|c| Value::Array(c.iter().map(scalar_json).collect())).collect();
    json!({ "e": a.e, "m": a.m, "r": a.r, "coeffs": coeffs })
}

pub fn parse_weyl(v: &Value) -> Result<WeylElement> {
    let list = |key: &str| -> Result<Vec<i64>> {
        as_array(field_of(v, key)?, key)?.iter().map(|x| as_int(x, key)).collect()
    };
    let perm = list("perm")?;
    let galois = list("galois")?;
    if perm.iter().chain(&galois).any(|&x| x < 0) {
        return Err(perr("perm and galois entries must be nonnegative"));
    }
    Ok(WeylElement {
        perm: perm.into_iter().map(|x| x as usize).collect(),
        galois: galois.into_iter().map(|x| x as usize).collect(),
        translation: list("translation")?,
    })
}

pub fn weyl_json(w: &WeylElement) -> Value {
    json!({ "perm": w.perm, "galois": w.galois, "translation": w.translation })
}

pub fn toral_json(x: &ToralElement) -> Value {
    let blocks: Vec<Value> = x
        .blocks
        .iter()
        .map(|s| Value::Array(s.terms().map(|(d, c)| json!([d, c.to_string()])).collect()))
        .collect();
    json!({ "e": x.torus.e, "m": x.torus.m, "blocks": blocks })
}

pub fn stratum_json(s: &Stratum) -> Value {
    let blocks: Vec<usize> = s.p.blocks();
    json!({ "blocks": blocks, "r": s.r, "beta": matrix_json(&s.beta), "nu": "dt/t" })
}

pub fn regularity_json(rep: &RegularityReport, field: Field) -> Value {
    json!({
        "regular": rep.regular,
        "reason": rep.reason,
        "e": rep.e,
        "m": rep.m,
        "r": rep.r,
        "phi": rep.phi.factored(field).unwrap_or_else(|| rep.phi.to_string()),
        "roots": rep.roots.iter().map(scalar_json).collect::<Vec<_>>(),
        "pure": rep.pure,
    })
}

pub fn parse_point(v: &Value) -> Result<Point> {
    match v {
        Value::String(s) if matches!(s.trim(), "inf" | "infinity" | "oo") => Ok(Point::Infinity),
        _ => Ok(Point::Finite(parse_scalar(v)?)),
    }
}

pub fn point_json(p: &Point) -> Value {
    match p {
        Point::Infinity => json!("inf"),
        Point::Finite(x) => scalar_json(x),
    }
}

/// Polar part of `g^{-1} (A/t) g`, the connection framed by `g` at the point.
fn part_from_type(a: &FormalType, framing: Option<&CMat>) -> Result<LMat> {
    let local = a.realize().shift(-1);
    match framing {
        None => Ok(local),
        Some(g) => {
            let ginv = g.inverse().ok_or(Error::SingularGauge)?;
            Ok(LMat::from_const(&ginv, 0).mul(&local).mul(&LMat::from_const(g, 0)))
        }
    }
}

/// `{entries: [{point, part | formal_type, framing?}]}`.  At infinity a formal
/// type is read in the coordinate `w = 1/z` against `dw`.
pub fn parse_config(v: &Value) -> Result<GlobalConfig> {
    let entries = as_array(field_of(v, "entries")?, "entries")?
        .iter()
        .map(|e| {
            let point = parse_point(field_of(e, "point")?)?;
            let framing = e.get("framing").map(parse_cmat).transpose()?;
            let formal_type = e.get("formal_type").map(parse_formal_type).transpose()?;
            let local = match (e.get("part"), &formal_type) {
                (Some(p), _) => parse_matrix(p)?,
                (None, Some(a)) => part_from_type(a, framing.as_ref())?,
                (None, None) => return Err(perr("entry needs a part or a formal_type")),
            };
            let part = PrincipalPart::of(point, &local)?;
            Ok(ConfigEntry { part, formal_type, framing })
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(perr("configuration has no entries"));
    }
    Ok(GlobalConfig { entries })
}

/// Partial fractions: `{poles: [{point, terms: [{order, coeff}]}], polynomial: [...]}`.
pub fn global_json(g: &GlobalConnection) -> Value {
    let poles: Vec<Value> = g
        .poles
        .iter()
        .map(|(x, terms)| {
            let t: Vec<Value> = terms.iter().map(|(k, c)| json!({ "order": k, "coeff": cmat_json(c) })).collect();
            json!({ "point": scalar_json(x), "terms": t })
        })
        .collect();
    let poly: Vec<Value> = g.poly.iter().map(cmat_json).collect();
    json!({ "n": g.n, "poles": poles, "polynomial": poly, "form": "dz" })
}

pub fn dimensions_json(d: &OrbitDimensions) -> Value {
    json!({
        "n": d.n, "e": d.e, "m": d.m, "r": d.r, "ell": d.ell,
        "dim_P_mod_P_r1": d.dim_p_quot,
        "dim_T_mod_T_r1": d.dim_t_quot,
        "dim_G_mod_P": d.dim_flag,
        "dim_O": d.dim_o,
        "dim_O_rank": d.dim_o_rank,
        "dim_O1": d.dim_o1,
        "summand_cotangent": d.cotangent,
        "summand_orbit": d.dim_o,
        "summand_reduction": d.reduction,
        "dim_M": d.dim_m,
        "dim_M_tilde": d.dim_m_tilde,
    })
}

/// Wrap a payload with the schema version.
pub fn document(kind: &str, mut body: Map<String, Value>) -> Value {
    body.insert("schema_version".into(), json!(SCHEMA_VERSION));
    body.insert("kind".into(), json!(kind));
    Value::Object(body)
}

pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let s = Series::from_terms(&[(-2, Scalar::from_frac(3, 2)), (1, "1/2-i".parse().unwrap())], Some(4));
        assert_eq!(parse_series(&series_json(&s)).unwrap(), s);
        let e = Series::from_terms(&[(0, Scalar::from_int(-7))], None);
        assert_eq!(series_json(&e), json!([[0, "-7"]]));
        assert_eq!(parse_series(&series_json(&e)).unwrap(), e);
    }

    #[test]
    fn conn_round_trip() {
        let v: Value = serde_json::from_str(
            r#"{"n": 2, "field": "Q", "nu": "dt", "matrix": [[[], [[-3, "1"]]], [[[-2, 1]], []]]}"#,
        )
        .unwrap();
        let c = parse_conn(&v, None, None).unwrap();
        assert_eq!(c.nu, OneForm::dt());
        let back = conn_json(&c.matrix, &c.nu, c.field);
        let again = parse_conn(&back, None, None).unwrap();
        assert_eq!(again.matrix, c.matrix);
    }

    #[test]
    fn nu_forms() {
        let v = json!({"order": -2, "coeffs": ["2", "1"]});
        let nu = parse_nu(&v).unwrap();
        assert_eq!(nu.ord(), -2);
        assert_eq!(parse_nu(&nu_json(&nu)).unwrap(), nu);
        assert!(parse_nu(&json!("dz")).is_err());
    }
}
