//! `hypsum` — exact evaluation and certification of reciprocal hyperbolic
//! series, and the companion tables, decompositions, and scans.
//!
//! Exit codes: 0 on success, 1 on domain errors (inadmissible parity, missing
//! registry point, failed certification), 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use hypsum_core::bigfloat::BF;
use hypsum_core::bootstrap::{certify_registry, derive_gaussian_registry, label_for_z};
use hypsum_core::closedform::q_from_string;
use hypsum_core::cmdata::{load_default, CMPoint, Registry};
use hypsum_core::decompose::{decompose_roman, lower_to_qm, QMDecomposition};
use hypsum_core::evaluator::{evaluate_hyperbolic, evaluate_series};
use hypsum_core::hecke::{e2_cubic, psi_polynomial, TransformationPolynomial};
use hypsum_core::lucas::{
    f468_check, indep_scan, zeta_direct, zeta_via_lemma, LucasParams, SeqKind,
};
use hypsum_core::numeric::verify_closedform;
use hypsum_core::qseries::{roman_direct, Family};
use hypsum_core::quasimod::{Level, QMPoly};
use hypsum_core::{format_q, q_pow, Error, Result};

#[derive(Parser)]
#[command(
    name = "hypsum",
    version,
    about = "Exact values of reciprocal hyperbolic series at CM points"
)]
struct Cli {
    /// Emit machine-readable JSON instead of the human rendering
    #[arg(long, global = true)]
    json: bool,
    /// Registry JSON path (overrides the HYPSUM_REGISTRY environment variable)
    #[arg(long, global = true, value_name = "PATH")]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a series family at a CM point as an exact closed form
    Evaluate(EvaluateArgs),
    /// Print the central-factorial decomposition of a series family
    Decompose(DecomposeArgs),
    /// Expand the defining series on the half-integral q-grid
    Qexpand(QexpandArgs),
    /// Certify a closed form against direct high-precision summation
    Verify(VerifyArgs),
    /// Print the CM value registry, or re-derive it from the seed values
    CmTable(CmTableArgs),
    /// Transformation polynomial of a form under z ↦ 2z, or its derivatives
    Modpoly(ModpolyArgs),
    /// Generalized Fibonacci/Lucas zeta values, directly or via the identity
    Fib(FibArgs),
    /// Scan the two inequality families for vanishing triples
    IndepCheck(IndepCheckArgs),
    /// q-coefficients of the exceptional-weight power product f₄²f₆⁻⁴f₈²
    F468(F468Args),
}

#[derive(Args)]
struct EvaluateArgs {
    /// Family numeral: I, II, …, VIII
    #[arg(long)]
    family: String,
    /// Exponent of the hyperbolic function (s ≥ 1)
    #[arg(long)]
    s: u32,
    /// Power weight n^p in the numerator
    #[arg(long)]
    p: u32,
    /// Registry point label, e.g. "i", "i/2", "(1+i)/4"
    #[arg(long, conflicts_with = "z")]
    point: Option<String>,
    /// Raw coordinates "x,b√d" (e.g. "0,1/2" or "1/4,1/4√1")
    #[arg(long)]
    z: Option<String>,
    /// Multiply by 2^s: the literal cosech/sech sum instead of the series
    #[arg(long)]
    hyperbolic: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    p: u32,
    /// Also lower the auxiliary series to Eisenstein-type derivatives
    #[arg(long)]
    qm: bool,
}

#[derive(Args)]
struct QexpandArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    p: u32,
    /// Number of w-grid coefficients (q-exponent step 1/2)
    #[arg(long, default_value_t = 40)]
    terms: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    p: u32,
    #[arg(long, conflicts_with = "z")]
    point: Option<String>,
    #[arg(long)]
    z: Option<String>,
    /// Working precision in bits
    #[arg(long, default_value_t = 256)]
    bits: u32,
    /// Relative tolerance, e.g. 1e-40
    #[arg(long, default_value = "1e-40")]
    eps: String,
}

#[derive(Args)]
struct CmTableArgs {
    /// Re-derive the Gaussian registry from the three seed values and
    /// write it (to --registry if given, else stdout)
    #[arg(long)]
    bootstrap: bool,
}

#[derive(Args)]
struct ModpolyArgs {
    /// Form name: E2, E4, E6, Delta (level 1) or G, H (level 4)
    #[arg(long)]
    form: String,
    /// Transformation degree (the z ↦ nz coset polynomial)
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Print D^N of the form as a generator polynomial instead
    #[arg(long, default_value_t = 0, value_name = "N")]
    derive: usize,
}

#[derive(Args)]
struct FibArgs {
    /// Sequence kind: U (Fibonacci-like) or V (Lucas-like)
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    s: u32,
    /// Parameter pair: "fibonacci" (αβ = −1) or "pell" (αβ = 1)
    #[arg(long, default_value = "fibonacci")]
    params: String,
    /// Sum the defining sequence directly (default)
    #[arg(long, conflicts_with = "lemma")]
    direct: bool,
    /// Evaluate through the series identity and report the residual
    #[arg(long)]
    lemma: bool,
    #[arg(long, default_value_t = 192)]
    bits: u32,
    #[arg(long, default_value = "1e-40")]
    eps: String,
}

#[derive(Args)]
struct IndepCheckArgs {
    /// Scan bound: all triples with s₃ < smax
    #[arg(long, default_value_t = 300)]
    smax: u32,
}

#[derive(Args)]
struct F468Args {
    /// Number of q-coefficients to print
    #[arg(long, default_value_t = 3)]
    terms: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Evaluate(a) => cmd_evaluate(cli, a),
        Cmd::Decompose(a) => cmd_decompose(cli, a),
        Cmd::Qexpand(a) => cmd_qexpand(cli, a),
        Cmd::Verify(a) => cmd_verify(cli, a),
        Cmd::CmTable(a) => cmd_cm_table(cli, a),
        Cmd::Modpoly(a) => cmd_modpoly(cli, a),
        Cmd::Fib(a) => cmd_fib(cli, a),
        Cmd::IndepCheck(a) => cmd_indep_check(cli, a),
        Cmd::F468(a) => cmd_f468(cli, a),
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn parse_family(s: &str) -> Result<Family> {
    Family::from_name(s.trim()).ok_or_else(|| {
        Error::Invalid(format!(
            "unknown family {s:?}; expected a numeral I through VIII"
        ))
    })
}

fn parse_kind(s: &str) -> Result<SeqKind> {
    match s.trim() {
        "U" | "u" => Ok(SeqKind::U),
        "V" | "v" => Ok(SeqKind::V),
        _ => Err(Error::Invalid(format!(
            "unknown sequence kind {s:?}; expected U or V"
        ))),
    }
}

/// Parse "x,b√d" (also accepts "b*sqrt(d)" and plain "b" for d = 1).
fn parse_z(spec: &str) -> Result<(Q, Q, u32)> {
    let bad = || Error::Invalid(format!("malformed --z {spec:?}; expected \"x,b√d\""));
    let (xs, ys) = spec.split_once(',').ok_or_else(bad)?;
    let x = q_from_string(xs.trim())?;
    let ys = ys.trim();
    let (bs, d) = if let Some((b, d)) = ys.split_once('√') {
        (b.trim().to_string(), d.trim().parse::<u32>().map_err(|_| bad())?)
    } else if let Some(pos) = ys.to_ascii_lowercase().find("sqrt") {
        let b = ys[..pos].trim_end_matches('*').trim();
        let d = ys[pos + 4..].trim_start_matches('(').trim_end_matches(')').trim();
        (b.to_string(), d.parse::<u32>().map_err(|_| bad())?)
    } else {
        (ys.to_string(), 1)
    };
    let b = if bs.is_empty() {
        Q::one()
    } else {
        q_from_string(&bs)?
    };
    Ok((x, b, d))
}

/// Decimal string ("1e-40", "2.5", "-1.25e3") to an exact rational.
fn parse_decimal(s: &str) -> Result<Q> {
    let bad = || Error::Invalid(format!("malformed decimal {s:?}"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (
            &s[..i],
            s[i + 1..].parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s, 0),
    };
    let (mant, neg) = match mant.strip_prefix('-') {
        Some(m) => (m, true),
        None => (mant.strip_prefix('+').unwrap_or(mant), false),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n = digits.parse::<BigInt>().map_err(|_| bad())?;
    let mut q = Q::new(n, BigInt::from(10).pow(frac_part.len() as u32));
    q *= q_pow(&Q::from(BigInt::from(10)), exp);
    if neg {
        q = -q;
    }
    Ok(q)
}

fn load_registry(cli: &Cli) -> Result<Registry> {
    match &cli.registry {
        Some(path) => Registry::load(path),
        None => load_default(),
    }
}

/// Resolve --point / --z to a registry point (evaluation needs d = 1).
fn resolve_point<'r>(
    reg: &'r Registry,
    point: &Option<String>,
    z: &Option<String>,
) -> Result<&'r CMPoint> {
    match (point, z) {
        (Some(label), _) => reg.get(label.trim()),
        (None, Some(spec)) => {
            let (x, b, d) = parse_z(spec)?;
            reg.find_by_z(&x, &b, d).ok_or_else(|| Error::MissingPoint {
                point: if d == 1 {
                    label_for_z(&x, &b)
                } else {
                    format!("{},{}√{}", format_q(&x), format_q(&b), d)
                },
                what: "a registry entry".to_string(),
            })
        }
        (None, None) => Err(Error::Invalid(
            "a point is required: pass --point LABEL or --z \"x,b√d\"".into(),
        )),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

// ---------------------------------------------------------------------------
// Rendering helpers for structures without a core rendering
// ---------------------------------------------------------------------------

fn qm_poly_json(p: &QMPoly) -> Value {
    let gens = p.level.generator_names();
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!([[m.0, m.1, m.2], format_q(c)]))
        .collect();
    json!({
        "level": match p.level { Level::One => 1, Level::Four => 4 },
        "generators": gens,
        "terms": terms,
    })
}

fn qm_argument(scale: &Q, shift: i8) -> String {
    let z = if scale.is_one() {
        "z".to_string()
    } else if scale.is_integer() {
        format!("{}z", scale)
    } else if scale.numer().is_one() {
        format!("z/{}", scale.denom())
    } else {
        format!("{}z", format_q(scale))
    };
    match shift.cmp(&0) {
        std::cmp::Ordering::Equal => z,
        std::cmp::Ordering::Greater => format!("{z} + {}/4", shift),
        std::cmp::Ordering::Less => format!("{z} - {}/4", -shift),
    }
}

fn qm_decomposition_render(d: &QMDecomposition) -> String {
    let mut parts = Vec::new();
    for t in &d.terms {
        let mut s = format!("({})", t.coeff.render());
        if t.deriv_order > 0 {
            s.push_str(&format!(" * D^{}", t.deriv_order));
        }
        s.push_str(&format!(
            "[{}]({})",
            t.poly.render(),
            qm_argument(&t.arg_scale, t.shift)
        ));
        if !t.constant_part.is_zero() {
            s.push_str(&format!(" + {}", format_q(&t.constant_part)));
        }
        parts.push(s);
    }
    format!(
        "{}_{}^{} = {}",
        d.family.name(),
        d.s,
        d.p,
        parts.join("  +  ")
    )
}

fn qm_decomposition_json(d: &QMDecomposition) -> Value {
    let terms: Vec<Value> = d
        .terms
        .iter()
        .map(|t| {
            json!({
                "coeff": t.coeff.render(),
                "deriv_order": t.deriv_order,
                "poly": qm_poly_json(&t.poly),
                "arg_scale": format_q(&t.arg_scale),
                "shift_quarters": t.shift,
                "constant_part": format_q(&t.constant_part),
            })
        })
        .collect();
    json!({ "terms": terms })
}

fn transformation_polynomial_json(p: &TransformationPolynomial) -> Value {
    let coeffs: Vec<Value> = p.coeffs.iter().map(qm_poly_json).collect();
    json!({
        "n": p.n,
        "k": p.k,
        "degree": p.degree,
        "coeffs": coeffs,
    })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_evaluate(cli: &Cli, a: &EvaluateArgs) -> Result<ExitCode> {
    let family = parse_family(&a.family)?;
    let reg = load_registry(cli)?;
    let point = resolve_point(&reg, &a.point, &a.z)?;
    if point.d != 1 {
        return Err(Error::Invalid(format!(
            "point {} has d = {}; evaluation needs a Gaussian point (d = 1)",
            point.label, point.d
        )));
    }
    let value = if a.hyperbolic {
        evaluate_hyperbolic(&reg, family, a.s, a.p, &point.x, &point.b)?
    } else {
        evaluate_series(&reg, family, a.s, a.p, &point.x, &point.b)?
    };
    if cli.json {
        print_json(&json!({
            "family": family.name(),
            "s": a.s,
            "p": a.p,
            "point": point.label,
            "hyperbolic": a.hyperbolic,
            "value": value.to_json(),
            "rendered": value.render(),
        }));
    } else {
        let what = if a.hyperbolic {
            format!("2^{} · {}_{}^{}", a.s, family.name(), a.s, a.p)
        } else {
            format!("{}_{}^{}", family.name(), a.s, a.p)
        };
        println!("{} at z = {}", what, point.label);
        println!("  = {}", value.render());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose(cli: &Cli, a: &DecomposeArgs) -> Result<ExitCode> {
    let family = parse_family(&a.family)?;
    let d = decompose_roman(family, a.s, a.p)?;
    let qm = if a.qm { Some(lower_to_qm(&d)?) } else { None };
    if cli.json {
        let terms: Vec<Value> = d
            .terms
            .iter()
            .map(|t| {
                json!({
                    "coeff": format_q(&t.coeff),
                    "deriv_order": t.deriv_order,
                    "series": format!("{}_{}", t.base.name(), t.index),
                    "arg_scale": t.arg_scale,
                })
            })
            .collect();
        let mut out = json!({
            "family": family.name(),
            "s": a.s,
            "p": a.p,
            "prefactor": format_q(&d.prefactor),
            "terms": terms,
            "rendered": d.render(),
        });
        if let Some(qm) = &qm {
            out["quasimodular"] = qm_decomposition_json(qm);
        }
        print_json(&out);
    } else {
        println!("{}", d.render());
        if let Some(qm) = &qm {
            println!("{}", qm_decomposition_render(qm));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_qexpand(cli: &Cli, a: &QexpandArgs) -> Result<ExitCode> {
    let family = parse_family(&a.family)?;
    if a.s == 0 {
        return Err(Error::Invalid("the exponent s must be at least 1".into()));
    }
    let series = roman_direct(family, a.s, a.p, a.terms);
    let two = BigInt::from(2);
    let coeffs: Vec<(String, String)> = series
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| {
            (
                format_q(&Q::new(BigInt::from(w), two.clone())),
                format_q(c),
            )
        })
        .collect();
    if cli.json {
        let pairs: Vec<Value> = coeffs
            .iter()
            .map(|(e, v)| json!([e, v]))
            .collect();
        print_json(&json!({
            "family": family.name(),
            "s": a.s,
            "p": a.p,
            "w_step": "1/2",
            "coeffs": pairs,
        }));
    } else {
        println!(
            "{}_{}^{}(q) to q^{} (step 1/2):",
            family.name(),
            a.s,
            a.p,
            format_q(&Q::new(BigInt::from(a.terms), two))
        );
        for (e, v) in &coeffs {
            println!("  q^{e}: {v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<ExitCode> {
    let family = parse_family(&a.family)?;
    let reg = load_registry(cli)?;
    let point = resolve_point(&reg, &a.point, &a.z)?;
    if point.d != 1 {
        return Err(Error::Invalid(format!(
            "point {} has d = {}; verification needs a Gaussian point (d = 1)",
            point.label, point.d
        )));
    }
    let eps_q = parse_decimal(&a.eps)?;
    if !eps_q.is_positive() {
        return Err(Error::Invalid("--eps must be positive".into()));
    }
    let eps = BF::from_q(&eps_q, a.bits);
    let value = evaluate_series(&reg, family, a.s, a.p, &point.x, &point.b)?;
    let report = verify_closedform(
        &value, family, a.s, a.p, &point.x, &point.b, a.bits, &eps,
    )?;
    if cli.json {
        let mut v = serde_json::to_value(&report).expect("serializable");
        v["family"] = json!(family.name());
        v["s"] = json!(a.s);
        v["p"] = json!(a.p);
        v["point"] = json!(point.label);
        print_json(&v);
    } else {
        println!(
            "{}_{}^{} at z = {}: residual {} (tail bound {}, tolerance {}, {} bits)",
            family.name(),
            a.s,
            a.p,
            point.label,
            report.residual,
            report.tail_bound,
            report.tolerance,
            report.bits
        );
        println!("{}", if report.ok { "certified" } else { "FAILED" });
    }
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_cm_table(cli: &Cli, a: &CmTableArgs) -> Result<ExitCode> {
    if a.bootstrap {
        let (reg, log) = derive_gaussian_registry(256)?;
        let tol = BF::from_q(&Q::new(BigInt::one(), BigInt::from(10).pow(40)), 256);
        let certified = certify_registry(&reg, 256, &tol)?;
        if let Some(path) = &cli.registry {
            reg.save(path)?;
            if cli.json {
                print_json(&json!({
                    "wrote": path.display().to_string(),
                    "points_written": reg.points.len(),
                    "derivation_steps": log.len(),
                    "certified_values": certified.len(),
                }));
            } else {
                for line in &log {
                    println!("derive: {line}");
                }
                println!(
                    "wrote {} ({} points, {} certified values)",
                    path.display(),
                    reg.points.len(),
                    certified.len()
                );
            }
        } else if cli.json {
            print_json(&reg.to_json());
        } else {
            for line in &log {
                println!("derive: {line}");
            }
            println!("{}", serde_json::to_string_pretty(&reg.to_json()).unwrap());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let reg = load_registry(cli)?;
    if cli.json {
        print_json(&reg.to_json());
    } else {
        for (label, p) in &reg.points {
            let y = if p.d == 1 {
                format_q(&p.b)
            } else {
                format!("{}√{}", format_q(&p.b), p.d)
            };
            println!("z = {label}  (x = {}, y = {y})", format_q(&p.x));
            for (key, value) in &p.values {
                println!("  {:3} = {}", key.as_str(), value.render());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_modpoly(cli: &Cli, a: &ModpolyArgs) -> Result<ExitCode> {
    let form = a.form.trim();
    if a.derive > 0 {
        let poly = match form {
            "E2" => QMPoly::e2(Level::One),
            "E4" => QMPoly::e4(),
            "E6" => QMPoly::e6(),
            "G" => QMPoly::g(),
            "H" => QMPoly::h(),
            _ => {
                return Err(Error::Invalid(format!(
                    "unknown form {form:?}; expected E2, E4, E6, G, or H"
                )))
            }
        };
        let derived = poly.derive_n(a.derive);
        if cli.json {
            print_json(&json!({
                "form": form,
                "derive": a.derive,
                "poly": qm_poly_json(&derived),
                "rendered": derived.render(),
            }));
        } else {
            println!("D^{} {} = {}", a.derive, form, derived.render());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let psi = match form {
        "E2" => {
            if a.n != 2 {
                return Err(Error::Invalid(
                    "the weight-2 cubic is only available for n = 2".into(),
                ));
            }
            e2_cubic()?
        }
        "E4" => psi_polynomial(&QMPoly::e4(), a.n, 4)?,
        "E6" => psi_polynomial(&QMPoly::e6(), a.n, 6)?,
        "G" => {
            if a.n != 2 {
                return Err(Error::Invalid(
                    "the level-4 quadratics are only available for n = 2".into(),
                ));
            }
            // X = G(2z) satisfies X² − G·X + 4H
            TransformationPolynomial {
                n: 2,
                k: 2,
                degree: 2,
                coeffs: vec![
                    QMPoly::one(Level::Four),
                    QMPoly::g().scale(&-Q::one()),
                    QMPoly::h().scale(&Q::from(BigInt::from(4))),
                ],
            }
        }
        "H" => {
            // X = H(2z) satisfies X² + (H/2 − G²/16)·X + H²/16
            if a.n != 2 {
                return Err(Error::Invalid(
                    "the level-4 quadratics are only available for n = 2".into(),
                ));
            }
            let half = Q::new(BigInt::one(), BigInt::from(2));
            let sixteenth = Q::new(BigInt::one(), BigInt::from(16));
            TransformationPolynomial {
                n: 2,
                k: 4,
                degree: 2,
                coeffs: vec![
                    QMPoly::one(Level::Four),
                    QMPoly::h()
                        .scale(&half)
                        .sub(&QMPoly::g().mul(&QMPoly::g()).scale(&sixteenth)),
                    QMPoly::h().mul(&QMPoly::h()).scale(&sixteenth),
                ],
            }
        }
        _ => {
            return Err(Error::Invalid(format!(
                "unknown form {form:?}; expected E2, E4, E6, G, or H"
            )))
        }
    };
    if cli.json {
        let mut v = transformation_polynomial_json(&psi);
        v["form"] = json!(form);
        v["rendered"] = json!(psi.render());
        print_json(&v);
    } else {
        println!("{}", psi.render());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fib(cli: &Cli, a: &FibArgs) -> Result<ExitCode> {
    let kind = parse_kind(&a.kind)?;
    let params = match a.params.trim().to_ascii_lowercase().as_str() {
        "fibonacci" | "fib" => LucasParams::fibonacci(),
        "pell" => LucasParams::pell_unit(),
        other => {
            return Err(Error::Invalid(format!(
                "unknown parameter pair {other:?}; expected fibonacci or pell"
            )))
        }
    };
    let eps_q = parse_decimal(&a.eps)?;
    if !eps_q.is_positive() {
        return Err(Error::Invalid("--eps must be positive".into()));
    }
    let eps = BF::from_q(&eps_q, a.bits);
    let kind_name = match kind {
        SeqKind::U => "U",
        SeqKind::V => "V",
    };
    if a.lemma {
        let out = zeta_via_lemma(&params, kind, a.p, a.s, a.bits, &eps)?;
        if cli.json {
            print_json(&json!({
                "kind": kind_name,
                "p": a.p,
                "s": a.s,
                "params": a.params.trim().to_ascii_lowercase(),
                "mode": "lemma",
                "lemma": out.lemma.to_decimal(50),
                "direct": out.direct.to_decimal(50),
                "residual": out.residual.to_decimal(8),
                "tail_bound": out.tail_bound.to_decimal(8),
                "bits": a.bits,
            }));
        } else {
            println!("ζ^{}_{}({}) [{}]", a.p, kind_name, a.s, a.params.trim());
            println!("  identity : {}", out.lemma.to_decimal(50));
            println!("  direct   : {}", out.direct.to_decimal(50));
            println!(
                "  residual {} (tail bound {})",
                out.residual.to_decimal(8),
                out.tail_bound.to_decimal(8)
            );
        }
    } else {
        let out = zeta_direct(&params, kind, a.p, a.s, a.bits, &eps)?;
        if cli.json {
            print_json(&json!({
                "kind": kind_name,
                "p": a.p,
                "s": a.s,
                "params": a.params.trim().to_ascii_lowercase(),
                "mode": "direct",
                "value": out.value.to_decimal(50),
                "tail_bound": out.tail_bound.to_decimal(8),
                "terms": out.terms,
                "bits": a.bits,
            }));
        } else {
            println!(
                "ζ^{}_{}({}) [{}] = {}",
                a.p,
                kind_name,
                a.s,
                a.params.trim(),
                out.value.to_decimal(50)
            );
            println!(
                "  ({} terms, tail bound {})",
                out.terms,
                out.tail_bound.to_decimal(8)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_indep_check(cli: &Cli, a: &IndepCheckArgs) -> Result<ExitCode> {
    let report = indep_scan(a.smax)?;
    if cli.json {
        print_json(&serde_json::to_value(&report).expect("serializable"));
    } else {
        if report.first_family.is_empty() {
            println!("first family: no exceptions");
        } else {
            let list: Vec<String> = report
                .first_family
                .iter()
                .map(|(a, b, c)| format!("({a},{b},{c})"))
                .collect();
            println!("exceptions: [{}] (family 1)", list.join(", "));
        }
        if report.second_family.is_empty() {
            println!("second family: no exceptions");
        } else {
            let list: Vec<String> = report
                .second_family
                .iter()
                .map(|(a, b, c)| format!("({a},{b},{c})"))
                .collect();
            println!("exceptions: [{}] (family 2)", list.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_f468(cli: &Cli, a: &F468Args) -> Result<ExitCode> {
    if a.terms < 3 {
        return Err(Error::Invalid(
            "--terms must be at least 3 (coefficients q⁰, q¹, q²)".into(),
        ));
    }
    let coeffs = f468_check(a.terms);
    let rendered: Vec<String> = coeffs.iter().map(format_q).collect();
    if cli.json {
        print_json(&json!({
            "terms": a.terms,
            "coeffs": rendered,
        }));
    } else {
        println!("f4^2 · f6^-4 · f8^2:");
        for (m, c) in rendered.iter().enumerate() {
            println!("  q^{m}: {c}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
