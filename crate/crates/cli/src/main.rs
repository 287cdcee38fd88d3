//! `formconn`: slopes, strata, formal types and global assembly from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use formconn::io::{self, ConnFile};
use formconn::moduli::{self, Point};
use formconn::{orbit_equivalent, Error, Field, FormalConnection, OneForm, Result, DEFAULT_DIGITS};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "formconn", version, about = "Formal meromorphic connections: slopes, formal types, moduli")]
struct Cli {
    /// Coefficient field: Q or Q(i). Overrides the file.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Absolute t-adic precision applied to inputs (at least 8).
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(8..))]
    prec: Option<i64>,
    /// One-form the matrix is taken against: dt/t, dt, or a JSON object {order, coeffs}.
    #[arg(long, global = true)]
    nu: Option<String>,
    /// Toral degrees beyond 0 to compute when diagonalizing.
    #[arg(long, global = true, default_value_t = 0)]
    digits: i64,
    /// Emit a JSON document instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the slope of a connection.
    Slope { file: PathBuf },
    /// Report the fundamental stratum, its reduction and regularity.
    Analyze { file: PathBuf },
    /// Gauge to a toral representative and print the formal type.
    Diagonalize { file: PathBuf },
    /// Decide formal isomorphism of two connections.
    Isomorphic { a: PathBuf, b: PathBuf },
    /// Assemble a global connection on the projective line.
    Moduli {
        config: PathBuf,
        /// Truncation level for the dimension count (default r + 1).
        #[arg(long)]
        ell: Option<i64>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::InsufficientPrecision { .. } => 3,
        Error::ResidueNonzero(_)
        | Error::DuplicatePoints(_)
        | Error::ShapeMismatch(_)
        | Error::InvalidInput(_)
        | Error::NotInFiltration { .. }
        | Error::EmptyComposition => 4,
        _ => 5,
    }
}

struct Session {
    field: Option<Field>,
    prec: Option<i64>,
    nu: Option<OneForm>,
    digits: i64,
    json: bool,
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl Session {
    fn load(&self, path: &Path) -> Result<ConnFile> {
        let mut c = io::parse_conn(&read_json(path)?, self.field, self.nu.as_ref())?;
        if let Some(p) = self.prec {
            c.matrix = c.matrix.truncate(p);
        }
        Ok(c)
    }

    fn emit(&self, kind: &str, body: Map<String, Value>, text: String) {
        if self.json {
            println!("{}", io::to_canonical_string(&io::document(kind, body)));
        } else {
            println!("{text}");
        }
    }
}

fn rat(p: i64, q: i64) -> String {
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("bodies are objects"),
    }
}

fn cmd_slope(s: &Session, file: &Path) -> Result<()> {
    let c = s.load(file)?.connection();
    let res = c.slope()?;
    let text = rat(res.slope.0, res.slope.1);
    s.emit("slope", obj(json!({ "slope": text, "stratum": io::stratum_json(&res.stratum) })), text.clone());
    Ok(())
}

fn cmd_analyze(s: &Session, file: &Path) -> Result<()> {
    let cf = s.load(file)?;
    let c = cf.connection();
    let res = c.slope()?;
    let st = &res.stratum;
    let red = st.reduce();
    let mut body = obj(json!({
        "slope": rat(res.slope.0, res.slope.1),
        "stratum": io::stratum_json(st),
        "reduction_trace": res.trace,
        "reduced": { "e": red.p.e(), "r": red.r, "blocks": red.p.blocks() },
    }));
    let mut lines = vec![format!("slope {}", rat(res.slope.0, res.slope.1))];
    lines.push(format!("stratum e={} r={} blocks={:?}", st.p.e(), st.r, st.p.blocks()));
    if let Ok(naive) = c.contained_stratum(&formconn::ParahoricContext::maximal(c.n())) {
        if let Ok(f) = naive.is_fundamental() {
            body.insert("maximal_stratum".into(), json!({ "r": naive.r, "fundamental": f }));
            if !f {
                lines.push(format!(
                    "maximal-parahoric stratum r={} is not fundamental; reduction trace {}",
                    naive.r,
                    res.trace.join(" -> ")
                ));
            }
        }
    }
    match st.is_fundamental() {
        Ok(f) => {
            body.insert("fundamental".into(), json!(f));
            lines.push(format!("fundamental {f}"));
        }
        Err(e) => {
            body.insert("fundamental".into(), json!(e.code()));
        }
    }
    let phi = st.char_poly()?;
    let phi_text = phi.factored(cf.field).unwrap_or_else(|| phi.to_string());
    lines.push(format!("phi {phi_text}"));
    body.insert("phi".into(), json!(phi_text));
    match st.regularity(cf.field) {
        Ok(rep) => {
            lines.push(format!(
                "regular {} e={} m={} r={} pure={}{}",
                rep.regular,
                rep.e,
                rep.m,
                rep.r,
                rep.pure,
                rep.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default()
            ));
            body.insert("regularity".into(), io::regularity_json(&rep, cf.field));
        }
        Err(e) => {
            lines.push(format!("regularity undetermined: {e}"));
            body.insert("regularity".into(), json!({ "error": e.code(), "message": e.to_string() }));
        }
    }
    match c.diagonalize(s.digits) {
        Ok(d) => {
            let t = d.formal_type.torus();
            lines.push(format!("torus e={} m={}", t.e, t.m));
            body.insert("torus".into(), json!({ "e": t.e, "m": t.m }));
            body.insert("formal_type".into(), io::formal_type_json(&d.formal_type));
        }
        Err(e) => {
            body.insert("torus".into(), json!({ "error": e.code(), "message": e.to_string() }));
        }
    }
    s.emit("analyze", body, lines.join("\n"));
    Ok(())
}

fn cmd_diagonalize(s: &Session, file: &Path) -> Result<()> {
    let cf = s.load(file)?;
    let d = cf.connection().diagonalize(s.digits)?;
    let a = &d.formal_type;
    let text = format!(
        "formal type e={} m={} r={}\n{}",
        a.e,
        a.m,
        a.r,
        a.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| format!(
                "  block {j}: {}",
                c.iter().enumerate().map(|(k, x)| format!("{x} w^{}", k as i64 - a.r)).collect::<Vec<_>>().join(" + ")
            ))
            .collect::<Vec<_>>()
            .join("\n")
    );
    let body = obj(json!({
        "formal_type": io::formal_type_json(a),
        "gauge": io::matrix_json(&d.gauge),
        "representative": io::toral_json(&d.a_rep),
        "identity_gauge": d.direct,
    }));
    s.emit("diagonalize", body, text);
    Ok(())
}

fn cmd_isomorphic(s: &Session, a: &Path, b: &Path) -> Result<()> {
    let ca = s.load(a)?;
    let cb = s.load(b)?;
    let field = if ca.field == Field::QI || cb.field == Field::QI { Field::QI } else { Field::Q };
    let na = FormalConnection::new(ca.matrix.clone(), &ca.nu, field);
    let nb = FormalConnection::new(cb.matrix.clone(), &cb.nu, field);
    let verdict = |yes: bool, w: Value, reason: Option<String>, warning: Option<String>| {
        let text = match (&reason, yes) {
            (_, true) => format!("yes\nwitness {}", serde_json::to_string(&w).unwrap()),
            (Some(r), false) => format!("no ({r})"),
            (None, false) => "no".to_string(),
        };
        let body = obj(json!({ "isomorphic": yes, "witness": w, "reason": reason, "warning": warning }));
        s.emit("isomorphic", body, text);
    };
    if na.n() != nb.n() {
        verdict(false, Value::Null, Some("ranks differ".into()), None);
        return Ok(());
    }
    let (sa, sb) = (na.slope()?.slope, nb.slope()?.slope);
    if sa != sb {
        verdict(false, Value::Null, Some(format!("slopes {} and {}", rat(sa.0, sa.1), rat(sb.0, sb.1))), None);
        return Ok(());
    }
    let da = na.diagonalize(s.digits)?;
    let db = nb.diagonalize(s.digits)?;
    let found = orbit_equivalent(&da.formal_type, &db.formal_type, field)?;
    match found.witness {
        Some(w) => verdict(true, io::weyl_json(&w), None, found.warning),
        None => verdict(false, Value::Null, Some("formal types lie in different orbits".into()), found.warning),
    }
    Ok(())
}

fn cmd_moduli(s: &Session, path: &Path, ell: Option<i64>) -> Result<()> {
    let cfg = io::parse_config(&read_json(path)?)?;
    let field = s.field.unwrap_or(Field::QI);
    let prec = s.prec.unwrap_or(DEFAULT_DIGITS);
    let mm = moduli::moment_map(&cfg);
    let mut lines = Vec::new();
    let asm = moduli::assemble_global(&cfg, field, prec)?;
    lines.push(format!("global connection with {} finite poles, polynomial degree {}", asm.global.poles.len(), asm.global.poly.len() as i64 - 1));
    lines.push(format!("moment map: {}", if mm.is_zero() { "0".to_string() } else { format!("{mm:?}") }));
    let mut entries = Vec::new();
    for (e, local) in cfg.entries.iter().zip(&asm.local) {
        let mut ent = obj(json!({
            "point": io::point_json(&e.part.point),
            "principal_part": io::matrix_json(&e.part.part),
            "residue": io::cmat_json(&e.part.residue()),
        }));
        if let Some(a) = &e.formal_type {
            ent.insert("formal_type".into(), io::formal_type_json(a));
            // framings are checked against the local connection taken against dt/t
            let g = e.framing.clone().unwrap_or_else(|| formconn::CMat::identity(a.n()));
            let ok = moduli::check_framing(&g, local, a)?;
            ent.insert("framing_compatible".into(), json!(ok));
            if a.r == 0 {
                let eig: Vec<_> = (0..a.m).map(|j| a.coeff(j, 0).clone()).collect();
                match moduli::regular_singular_orbit_dim(&eig) {
                    Ok(d) => ent.insert("dimensions".into(), json!({ "dim_O": d })),
                    Err(err) => ent.insert("dimensions".into(), json!({ "error": err.code(), "message": err.to_string() })),
                };
            } else {
                let d = moduli::orbit_dimensions(a, ell.unwrap_or(a.r + 1).max(a.r + 1))?;
                lines.push(format!(
                    "point {}: dim O = {}, dim M = {}, dim M~ = {}",
                    e.part.point, d.dim_o, d.dim_m, d.dim_m_tilde
                ));
                ent.insert("dimensions".into(), io::dimensions_json(&d));
            }
            let pt = match &e.part.point {
                Point::Infinity => "inf".to_string(),
                Point::Finite(x) => x.to_string(),
            };
            lines.push(format!("point {pt}: framing compatible {ok}"));
        }
        entries.push(Value::Object(ent));
    }
    let body = obj(json!({
        "global": io::global_json(&asm.global),
        "moment_map": io::cmat_json(&mm),
        "entries": entries,
    }));
    s.emit("moduli", body, lines.join("\n"));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let field = cli.field.as_deref().map(Field::parse).transpose()?;
    let nu = match cli.nu.as_deref() {
        None => None,
        Some(t) if t.trim_start().starts_with('{') => {
            let v: Value = serde_json::from_str(t).map_err(|e| Error::Parse(format!("--nu: {e}")))?;
            Some(io::parse_nu(&v)?)
        }
        Some(t) => Some(io::parse_nu(&json!(t))?),
    };
    let s = Session { field, prec: cli.prec, nu, digits: cli.digits, json: cli.json };
    match &cli.cmd {
        Cmd::Slope { file } => cmd_slope(&s, file),
        Cmd::Analyze { file } => cmd_analyze(&s, file),
        Cmd::Diagonalize { file } => cmd_diagonalize(&s, file),
        Cmd::Isomorphic { a, b } => cmd_isomorphic(&s, a, b),
        Cmd::Moduli { config, ell } => cmd_moduli(&s, config, *ell),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("formconn: {e}");
            if let Error::InsufficientPrecision { needed, .. } = &e {
                eprintln!("hint: supply input known through precision {} or more", needed);
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
