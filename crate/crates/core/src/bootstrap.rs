//! Bootstrapping exact CM values: the transformation polynomial of a
//! generator, evaluated at a point whose values are already known, is a
//! univariate polynomial over `K` whose roots are (rescaled) values at the
//! neighbouring points `2z₀`, `z₀/2`, `(z₀+1)/2`. Solving exactly and
//! matching roots to points by certified numerics extends the registry one
//! step; iterating from the seeds at `z = i` rebuilds the whole Gaussian
//! table.
//!
//! Conventions: a weight-`k` value is stored as `c·Ω^k` and solved for in
//! `Ω^k`-units, which makes every polynomial coefficient a plain `KElem`.
//! The quasiperiod enters through the `E₂`-combinations
//! `2E₂(2z)−E₂(z)`, `½E₂(z/2)−E₂(z)`, `½E₂((z+1)/2)−E₂(z)`, in which the
//! `3/(π·Im)` anomalies cancel, so the cubic they satisfy has coefficients
//! `−¾E₄(z₀)`, `−¼E₆(z₀)` and its roots are the same combinations of `E₂*`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigfloat::{BF, CF};
use crate::closedform::ClosedForm;
use crate::cmdata::{CMPoint, Registry, ValueKey};
use crate::field::KElem;
use crate::hecke::{e2_cubic, psi_polynomial};
use crate::numeric::{
    e2_star_numeric, eisenstein_numeric, kelem_numeric, nome, nome_half, omega_numeric,
    qseries_numeric,
};
use crate::quasimod::QMPoly;
use crate::qseries::{gen_g, gen_h};
use crate::{Error, Q, Result};

/// Which generator's transformation polynomial drives a bootstrap step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetForm {
    E4,
    E6,
    /// The cubic satisfied by the three `E₂`-combinations listed in the
    /// module docs; assignments are unpacked back to `E₂*` values.
    E2Comb,
    G,
    H,
}

impl TargetForm {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetForm::E4 => "E4",
            TargetForm::E6 => "E6",
            TargetForm::E2Comb => "E2comb",
            TargetForm::G => "G",
            TargetForm::H => "H",
        }
    }

    pub fn parse(s: &str) -> Option<TargetForm> {
        [
            TargetForm::E4,
            TargetForm::E6,
            TargetForm::E2Comb,
            TargetForm::G,
            TargetForm::H,
        ]
        .into_iter()
        .find(|t| t.as_str().eq_ignore_ascii_case(s))
    }
}

/// One derived value, ready to be inserted into a registry.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub label: String,
    pub x: Q,
    pub b: Q,
    pub key: ValueKey,
    pub value: ClosedForm,
}

/// Canonical label for a Gaussian point `z = x + b·i` (with `x` already
/// reduced into `(−1/2, 1/2]`): `i`, `2i`, `i/2`, `(1+2i)/2`, `(-1+i)/4`, …
pub fn label_for_z(x: &Q, b: &Q) -> String {
    let den = x.denom().lcm(b.denom());
    let nx = (x * Q::from(den.clone())).to_integer();
    let nb = (b * Q::from(den.clone())).to_integer();
    let one = BigInt::one();
    if nx.is_zero() {
        let num = if nb == one {
            "i".to_string()
        } else {
            format!("{nb}i")
        };
        if den.is_one() {
            num
        } else {
            format!("{num}/{den}")
        }
    } else {
        let ipart = if nb == one {
            "i".to_string()
        } else {
            format!("{nb}i")
        };
        if den.is_one() {
            format!("{nx}+{ipart}")
        } else {
            format!("({nx}+{ipart})/{den}")
        }
    }
}

/// Reduce the real part into the fundamental strip `(−1/2, 1/2]`; integer
/// translations do not move any stored value.
pub fn reduce_x(x: &Q) -> Q {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    x - Q::from((x - half).ceil().to_integer())
}

/// Extract the coefficient of a value that must be exactly `c·Ω^w`.
fn omega_part(cf: &ClosedForm, w: u32, what: &str) -> Result<KElem> {
    let c = cf.coeff(w, 0);
    if &ClosedForm::term(c.clone(), w, 0) != cf {
        return Err(Error::Invalid(format!(
            "{what}: expected a pure Ω^{w} value, got {cf}"
        )));
    }
    Ok(c)
}

/// Evaluate an `E₂`-free level-1 coefficient polynomial on Ω-normalized
/// generator values.
fn eval_level1(p: &QMPoly, e4: &KElem, e6: &KElem) -> Result<KElem> {
    let mut acc = KElem::zero();
    for (&(a, b, c), q) in p.terms() {
        if a != 0 {
            return Err(Error::Invalid(
                "transformation coefficient involves E2".into(),
            ));
        }
        acc = &acc + &(&e4.powi(b as i64) * &e6.powi(c as i64)).scale(q);
    }
    Ok(acc)
}

/// Same for a level-4 coefficient polynomial in `G`, `H`.
fn eval_level4(p: &QMPoly, g: &KElem, h: &KElem) -> Result<KElem> {
    let mut acc = KElem::zero();
    for (&(a, b, c), q) in p.terms() {
        if a != 0 {
            return Err(Error::Invalid(
                "transformation coefficient involves E2".into(),
            ));
        }
        acc = &acc + &(&g.powi(b as i64) * &h.powi(c as i64)).scale(q);
    }
    Ok(acc)
}

/// Verified synthetic division of a monic polynomial (given by its
/// non-leading coefficients) by `(x − r)`; `None` if the remainder is
/// nonzero.
fn divide_out_root(coeffs: &[KElem], r: &KElem) -> Option<Vec<KElem>> {
    let mut out = Vec::with_capacity(coeffs.len().saturating_sub(1));
    let mut acc = KElem::one();
    for (i, ci) in coeffs.iter().enumerate() {
        acc = &(&acc * r) + ci;
        if i + 1 == coeffs.len() {
            if !acc.is_zero() {
                return None;
            }
        } else {
            out.push(acc.clone());
        }
    }
    Some(out)
}

/// Rational root candidates of a monic cubic with rational coefficients:
/// substituting `x = y/L` (`L` = common denominator) makes the polynomial
/// integer and monic, so rational roots are integers dividing the constant
/// term. Returns an empty list when a coefficient is irrational.
fn rational_root_candidates(coeffs: &[KElem]) -> Result<Vec<KElem>> {
    let mut qs = Vec::new();
    for k in coeffs {
        match k.as_q() {
            Some(q) => qs.push(q),
            None => return Ok(Vec::new()),
        }
    }
    let mut l = BigInt::one();
    for q in &qs {
        l = l.lcm(q.denom());
    }
    let lq = Q::from(l.clone());
    let mut candidates = vec![KElem::zero()];
    let c3 = (&qs[2] * &lq * &lq * &lq).to_integer();
    if !c3.is_zero() {
        let n = c3
            .abs()
            .to_i128()
            .filter(|n| *n <= 1_000_000_000_000)
            .ok_or_else(|| Error::Invalid("rational-root search bound exceeded".into()))?;
        let mut divs: Vec<i128> = Vec::new();
        let mut d = 1i128;
        while d * d <= n {
            if n % d == 0 {
                divs.push(d);
                divs.push(n / d);
            }
            d += 1;
        }
        candidates.clear();
        for d in divs {
            for sg in [1i128, -1] {
                candidates.push(KElem::from_q(Q::new(
                    BigInt::from(sg * d),
                    l.clone(),
                )));
            }
        }
    }
    Ok(candidates)
}

/// All roots (with multiplicity) of a monic polynomial of degree ≤ 3 over
/// `K`, given its non-leading coefficients and any roots known in advance.
/// Known roots are peeled off by verified division — a non-root "known"
/// value is reported as a registry inconsistency, not papered over.
pub fn solve_monic(coeffs: &[KElem], known: &[KElem], what: &str) -> Result<Vec<KElem>> {
    if coeffs.is_empty() || coeffs.len() > 3 {
        return Err(Error::Invalid("only degrees 1–3 are solvable here".into()));
    }
    let mut rem = coeffs.to_vec();
    let mut roots: Vec<KElem> = Vec::new();
    for r in known {
        if rem.is_empty() {
            break;
        }
        match divide_out_root(&rem, r) {
            Some(qt) => {
                roots.push(r.clone());
                rem = qt;
            }
            None => {
                return Err(Error::Registry(format!(
                    "stored value for {what} is not a root of its transformation polynomial"
                )))
            }
        }
    }
    'cubic: while rem.len() == 3 {
        for r in rational_root_candidates(&rem)? {
            if let Some(qt) = divide_out_root(&rem, &r) {
                roots.push(r);
                rem = qt;
                continue 'cubic;
            }
        }
        return Err(Error::NotInField(format!(
            "cubic for {what} has no rational root and no seeded satellite value"
        )));
    }
    match rem.len() {
        0 => {}
        1 => roots.push(-&rem[0]),
        2 => {
            let four = Q::from(BigInt::from(4));
            let disc = &(&rem[0] * &rem[0]) - &rem[1].scale(&four);
            let s = disc.sqrt().ok_or_else(|| {
                Error::NotInField(format!(
                    "discriminant of the {what} step, {}, has no square root in K",
                    disc.render()
                ))
            })?;
            let half = Q::new(BigInt::one(), BigInt::from(2));
            roots.push((&s - &rem[0]).scale(&half));
            roots.push((-&(&s + &rem[0])).scale(&half));
        }
        _ => unreachable!(),
    }
    Ok(roots)
}

/// The three neighbours reached by one degree-2 step from `z₀`, with the
/// rescaling a root of the transformation polynomial carries relative to the
/// plain value at that neighbour (`f(2z₀)` vs `2^{−k}f(z₀/2)` etc.).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Satellite {
    Double,
    Half,
    HalfShift,
}

impl Satellite {
    const ALL: [Satellite; 3] = [Satellite::Double, Satellite::Half, Satellite::HalfShift];

    fn coords(self, x0: &Q, y0: &Q) -> (Q, Q) {
        let two = Q::from(BigInt::from(2));
        match self {
            Satellite::Double => (reduce_x(&(x0 * &two)), y0 * &two),
            Satellite::Half => (reduce_x(&(x0 / &two)), y0 / &two),
            Satellite::HalfShift => (reduce_x(&((x0 + Q::one()) / &two)), y0 / &two),
        }
    }
}

/// Cached numeric context for root matching.
struct NumCtx {
    bits: u32,
    omega: BF,
    eps: BF,
}

impl NumCtx {
    fn new(bits: u32) -> Self {
        NumCtx {
            bits,
            omega: omega_numeric(bits),
            eps: BF::epsilon(bits, bits.saturating_sub(64)),
        }
    }

    /// Direct numeric value of a generator at `z = x + iy`, divided by
    /// `Ω^weight` so it is comparable with Ω-normalized roots.
    fn normalized_value(&self, key: ValueKey, x: &Q, y: &Q) -> Result<CF> {
        let yb = BF::from_q(y, self.bits);
        let raw = match key {
            ValueKey::E4 => eisenstein_numeric(4, &nome(x, &yb, self.bits), &self.eps)?,
            ValueKey::E6 => eisenstein_numeric(6, &nome(x, &yb, self.bits), &self.eps)?,
            ValueKey::E2Star => e2_star_numeric(x, y, self.bits, &self.eps)?,
            ValueKey::G | ValueKey::H => {
                let v = nome_half(x, &yb, self.bits);
                let mut len = 128usize;
                loop {
                    let series = if key == ValueKey::G {
                        gen_g(len)
                    } else {
                        gen_h(len)
                    };
                    // coefficients are divisor sums: |c_n| ≤ 4n² covers both
                    match qseries_numeric(&series, 4, 2, &v, &self.eps) {
                        Ok(val) => break val,
                        Err(e) => {
                            if len >= (1 << 15) {
                                return Err(e);
                            }
                        }
                    }
                    len *= 2;
                }
            }
        };
        let om = self.omega.powi(key.weight());
        Ok(raw.mul_bf(&om.recip()))
    }

    /// Match a numeric target against the exact roots: exactly one distinct
    /// root may lie within the relative tolerance `2⁻³²`.
    fn match_root(&self, roots: &[KElem], target: &CF, what: &str) -> Result<usize> {
        let mut scale = 1.0f64;
        for r in roots {
            let (re, im) = r.approx();
            scale = scale.max(re.hypot(im));
        }
        let scale_i = (scale.ceil() as i64).max(1);
        let tol = BF::epsilon(self.bits, 32).scale_q(&Q::from(BigInt::from(scale_i)));
        let tol2 = tol.mul(&tol);
        let mut hit: Option<usize> = None;
        for (idx, r) in roots.iter().enumerate() {
            let d2 = kelem_numeric(r, self.bits).sub(target).abs2();
            if d2.le(&tol2) {
                match hit {
                    Some(prev) if roots[prev] != *r => {
                        return Err(Error::AmbiguousRoot {
                            what: what.to_string(),
                        })
                    }
                    Some(_) => {}
                    None => hit = Some(idx),
                }
            }
        }
        hit.ok_or(Error::NoMatchingRoot {
            what: what.to_string(),
        })
    }
}

/// One bootstrap step: evaluate the degree-`n` transformation polynomial of
/// `target` at the seeded point, solve it over `K`, and assign the roots to
/// the neighbouring points by certified numeric matching (at least 128 bits;
/// relative separation `2⁻³²`). Only `n = 2` is implemented — it is the only
/// step the Gaussian chain needs.
pub fn cm_bootstrap(
    reg: &Registry,
    seed_label: &str,
    target: TargetForm,
    n: u32,
    bits: u32,
) -> Result<Vec<Assignment>> {
    if n != 2 {
        return Err(Error::Invalid(format!(
            "only the degree-2 bootstrap step is implemented (asked for n = {n})"
        )));
    }
    if bits < 128 {
        return Err(Error::Invalid(
            "root matching needs at least 128 working bits".into(),
        ));
    }
    let p0 = reg.get(seed_label)?;
    if p0.d != 1 {
        return Err(Error::Invalid(
            "the bootstrap chain runs in the Gaussian registry (d = 1)".into(),
        ));
    }
    let ctx = NumCtx::new(bits);
    match target {
        TargetForm::E4 | TargetForm::E6 => {
            let (gen, key, k) = if target == TargetForm::E4 {
                (QMPoly::e4(), ValueKey::E4, 4u32)
            } else {
                (QMPoly::e6(), ValueKey::E6, 6u32)
            };
            let psi = psi_polynomial(&gen, 2, k)?;
            let e4v = omega_part(p0.value(ValueKey::E4)?, 4, "E4 seed")?;
            let e6v = omega_part(p0.value(ValueKey::E6)?, 6, "E6 seed")?;
            let coeffs: Vec<KElem> = (1..=3)
                .map(|j| eval_level1(&psi.coeffs[j], &e4v, &e6v))
                .collect::<Result<_>>()?;
            step_three_satellites(
                reg,
                p0,
                &ctx,
                &coeffs,
                key,
                &format!("{} from {seed_label}", key.as_str()),
                // root ↔ value maps for weight k
                &|sat, v| match sat {
                    Satellite::Double => v.clone(),
                    _ => v.scale(&Q::new(BigInt::one(), BigInt::from(2).pow(k))),
                },
                &|sat, root| match sat {
                    Satellite::Double => root.clone(),
                    _ => root.scale(&Q::from(BigInt::from(2).pow(k))),
                },
                k,
            )
        }
        TargetForm::E2Comb => {
            let cubic = e2_cubic()?;
            let e4v = omega_part(p0.value(ValueKey::E4)?, 4, "E4 seed")?;
            let e6v = omega_part(p0.value(ValueKey::E6)?, 6, "E6 seed")?;
            let coeffs: Vec<KElem> = (1..=3)
                .map(|j| eval_level1(&cubic.coeffs[j], &e4v, &e6v))
                .collect::<Result<_>>()?;
            let e20 = omega_part(p0.value(ValueKey::E2Star)?, 2, "E2star seed")?;
            let half = Q::new(BigInt::one(), BigInt::from(2));
            let two = Q::from(BigInt::from(2));
            step_three_satellites(
                reg,
                p0,
                &ctx,
                &coeffs,
                ValueKey::E2Star,
                &format!("E2-combination from {seed_label}"),
                &|sat, v| match sat {
                    Satellite::Double => &v.scale(&two) - &e20,
                    _ => &v.scale(&half) - &e20,
                },
                &|sat, root| match sat {
                    Satellite::Double => (root + &e20).scale(&half),
                    _ => (root + &e20).scale(&two),
                },
                2,
            )
        }
        TargetForm::G | TargetForm::H => {
            // Quadratics on Γ₀(4), fixed data checked against q-expansions by
            // `verify_level4_psi`: X²−G(z)X+4H(z) and
            // X²+(−G(z)²/16+H(z)/2)X+H(z)²/16.
            let (key, k, a1, a2) = if target == TargetForm::G {
                (
                    ValueKey::G,
                    1u32,
                    QMPoly::g().scale(&-Q::one()),
                    QMPoly::h().scale(&Q::from(BigInt::from(4))),
                )
            } else {
                let sixteenth = Q::new(BigInt::one(), BigInt::from(16));
                let a1 = QMPoly::h()
                    .scale(&Q::new(BigInt::one(), BigInt::from(2)))
                    .sub(&QMPoly::g().mul(&QMPoly::g()).scale(&sixteenth));
                let a2 = QMPoly::h().mul(&QMPoly::h()).scale(&sixteenth);
                (ValueKey::H, 2u32, a1, a2)
            };
            let gv = omega_part(p0.value(ValueKey::G)?, 1, "G seed")?;
            let hv = omega_part(p0.value(ValueKey::H)?, 2, "H seed")?;
            let coeffs = vec![eval_level4(&a1, &gv, &hv)?, eval_level4(&a2, &gv, &hv)?];
            let what = format!("{} from {seed_label}", key.as_str());
            let (sx, sy) = Satellite::Double.coords(&p0.x, &p0.b);
            let mut known = Vec::new();
            if let Some(p) = reg.find_by_z(&sx, &sy, 1) {
                if let Ok(v) = p.value(key) {
                    known.push(omega_part(v, k, &what)?);
                }
            }
            let roots = solve_monic(&coeffs, &known, &what)?;
            let target_num = ctx.normalized_value(key, &sx, &sy)?;
            let idx = ctx.match_root(&roots, &target_num, &what)?;
            Ok(vec![Assignment {
                label: label_for_z(&sx, &sy),
                x: sx,
                b: sy,
                key,
                value: ClosedForm::term(roots[idx].clone(), k, 0),
            }])
        }
    }
}

/// Shared core of the three-satellite (cubic) steps: peel known roots, solve,
/// match each satellite numerically, convert roots back to plain values.
#[allow(clippy::too_many_arguments)]
fn step_three_satellites(
    reg: &Registry,
    p0: &CMPoint,
    ctx: &NumCtx,
    coeffs: &[KElem],
    key: ValueKey,
    what: &str,
    value_to_root: &dyn Fn(Satellite, &KElem) -> KElem,
    root_to_value: &dyn Fn(Satellite, &KElem) -> KElem,
    weight: u32,
) -> Result<Vec<Assignment>> {
    let mut known = Vec::new();
    for sat in Satellite::ALL {
        let (sx, sy) = sat.coords(&p0.x, &p0.b);
        if let Some(p) = reg.find_by_z(&sx, &sy, 1) {
            if let Ok(v) = p.value(key) {
                known.push(value_to_root(sat, &omega_part(v, weight, what)?));
            }
        }
    }
    let roots = solve_monic(coeffs, &known, what)?;
    let mut out = Vec::new();
    for sat in Satellite::ALL {
        let (sx, sy) = sat.coords(&p0.x, &p0.b);
        let direct = ctx.normalized_value(key, &sx, &sy)?;
        let target = value_to_root_numeric(sat, &direct, ctx, p0, key, weight)?;
        let label = label_for_z(&sx, &sy);
        let idx = ctx.match_root(&roots, &target, &format!("{what} → {label}"))?;
        out.push(Assignment {
            label,
            x: sx,
            b: sy,
            key,
            value: ClosedForm::term(root_to_value(sat, &roots[idx]), weight, 0),
        });
    }
    Ok(out)
}

/// Numeric mirror of `value_to_root`: build the root value a satellite's
/// direct numeric value corresponds to. For `E₄`/`E₆` this is rescaling; for
/// the `E₂`-combination it also subtracts the (exact) seed.
fn value_to_root_numeric(
    sat: Satellite,
    direct: &CF,
    ctx: &NumCtx,
    p0: &CMPoint,
    key: ValueKey,
    weight: u32,
) -> Result<CF> {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    match key {
        ValueKey::E2Star => {
            let e20 = omega_part(p0.value(ValueKey::E2Star)?, 2, "E2star seed")?;
            let seed = kelem_numeric(&e20, ctx.bits);
            Ok(match sat {
                Satellite::Double => direct.scale_q(&Q::from(BigInt::from(2))).sub(&seed),
                _ => direct.scale_q(&half).sub(&seed),
            })
        }
        _ => Ok(match sat {
            Satellite::Double => direct.clone(),
            _ => direct.scale_q(&Q::new(BigInt::one(), BigInt::from(2).pow(weight))),
        }),
    }
}

/// Insert assignments into the registry. A clash with an existing value is a
/// hard error; agreement is logged as a confirmation.
pub fn apply_assignments(reg: &mut Registry, assignments: &[Assignment]) -> Result<Vec<String>> {
    let mut log = Vec::new();
    for a in assignments {
        let label = match reg.find_by_z(&a.x, &a.b, 1) {
            Some(p) => p.label.clone(),
            None => {
                reg.insert(CMPoint::new(&a.label, a.x.clone(), a.b.clone(), 1)?);
                a.label.clone()
            }
        };
        let point = reg.get_mut(&label)?;
        match point.values.get(&a.key) {
            Some(existing) if *existing != a.value => {
                return Err(Error::Registry(format!(
                    "bootstrap disagrees with stored {}({label})",
                    a.key.as_str()
                )));
            }
            Some(_) => log.push(format!("confirmed {}({label})", a.key.as_str())),
            None => {
                log.push(format!("assigned {}({label}) = {}", a.key.as_str(), a.value));
                point.set_value(a.key, a.value.clone());
            }
        }
    }
    Ok(log)
}

/// Gaussian-rational complex arithmetic for Möbius maps: `z = x + iy`.
fn moebius(gamma: [i64; 4], x: &Q, y: &Q) -> (Q, Q) {
    let [a, b, c, d] = gamma.map(|v| Q::from(BigInt::from(v)));
    let (nx, ny) = (&a * x + &b, &a * y);
    let (dx, dy) = (&c * x + &d, &c * y);
    let norm = &dx * &dx + &dy * &dy;
    (
        (&nx * &dx + &ny * &dy) / &norm,
        (&ny * &dx - &nx * &dy) / &norm,
    )
}

/// `j(γ, z) = cz + d` as an exact element of `Q(i) ⊂ K`.
fn cocycle(gamma: [i64; 4], x: &Q, y: &Q) -> KElem {
    let c = Q::from(BigInt::from(gamma[2]));
    let d = Q::from(BigInt::from(gamma[3]));
    &KElem::from_q(&c * x + d) + &KElem::i().scale(&(&c * y))
}

/// Transport the `E₂*`, `E₄`, `E₆` values of a point along `γ ∈ SL₂(ℤ)`:
/// `f(γz) = (cz+d)^k f(z)`, exactly (the completed `E₂*` is weight-2 without
/// anomaly). `G`, `H` are not moved — they are only `Γ₀(4)`-modular.
pub fn transport_sl2(reg: &Registry, from_label: &str, gamma: [i64; 4]) -> Result<Vec<Assignment>> {
    let det = gamma[0] * gamma[3] - gamma[1] * gamma[2];
    if det != 1 {
        return Err(Error::Invalid(format!(
            "transport needs a unimodular matrix (det = {det})"
        )));
    }
    let p0 = reg.get(from_label)?;
    if p0.d != 1 {
        return Err(Error::Invalid("transport runs in the Gaussian registry".into()));
    }
    let (wx, wy) = moebius(gamma, &p0.x, &p0.b);
    let wx = reduce_x(&wx);
    if !wy.is_positive() {
        return Err(Error::Invalid("transported point left the upper half-plane".into()));
    }
    let j = cocycle(gamma, &p0.x, &p0.b);
    let label = label_for_z(&wx, &wy);
    let mut out = Vec::new();
    for key in [ValueKey::E2Star, ValueKey::E4, ValueKey::E6] {
        if let Ok(v) = p0.value(key) {
            out.push(Assignment {
                label: label.clone(),
                x: wx.clone(),
                b: wy.clone(),
                key,
                value: v.scale_k(&j.powi(key.weight() as i64)),
            });
        }
    }
    Ok(out)
}

/// Extract `E₂*(z₀)` at a fixed point of a determinant-2 matrix `η`. Writing
/// the `η`-coset root of the `E₂`-cubic via the quasimodular transformation
/// law gives `root = (2j⁻² − 1)·E₂(z₀) − (6/(πi))·c·j⁻¹` with `j = cz₀+d`;
/// at a fixed point with `2j⁻² ≠ 1` the anomalous part must cancel the
/// `3/(π·Im z₀)` of `E₂`, which is checked exactly in `Q(i)`, leaving
/// `root = (2j⁻²−1)·E₂*(z₀)`. The root itself is found by solving the cubic
/// (which needs only `E₄(z₀)`, `E₆(z₀)`) and matching `(2j⁻²−1)E₂*(z₀)`
/// numerically.
pub fn e2_fixed_point_extract(
    reg: &Registry,
    label: &str,
    eta: [i64; 4],
    bits: u32,
) -> Result<ClosedForm> {
    let det = eta[0] * eta[3] - eta[1] * eta[2];
    if det != 2 {
        return Err(Error::Invalid(format!(
            "fixed-point extraction needs det 2 (got {det})"
        )));
    }
    let p0 = reg.get(label)?;
    if p0.d != 1 {
        return Err(Error::Invalid("extraction runs in the Gaussian registry".into()));
    }
    let (wx, wy) = moebius(eta, &p0.x, &p0.b);
    if wx != p0.x || wy != p0.b {
        return Err(Error::Invalid(format!(
            "{label} is not a fixed point of the given matrix"
        )));
    }
    let j = cocycle(eta, &p0.x, &p0.b);
    let jinv2 = j.powi(-2);
    let kappa = &jinv2.scale(&Q::from(BigInt::from(2))) - &KElem::one();
    if kappa.is_zero() {
        return Err(Error::Invalid(
            "degenerate fixed point: 2j⁻² = 1 carries no information".into(),
        ));
    }
    // Anomaly cancellation: (2j⁻²−1)·(3/y₀) = −6i·c/j must hold in Q(i).
    let three_over_y = Q::from(BigInt::from(3)) / &p0.b;
    let lhs = kappa.scale(&three_over_y);
    let rhs = -&(&KElem::i().scale(&Q::from(BigInt::from(6 * eta[2]))) * &j.powi(-1));
    if lhs != rhs {
        return Err(Error::Invalid(
            "quasimodular anomaly does not cancel at this fixed point".into(),
        ));
    }
    let cubic = e2_cubic()?;
    let e4v = omega_part(p0.value(ValueKey::E4)?, 4, "E4 seed")?;
    let e6v = omega_part(p0.value(ValueKey::E6)?, 6, "E6 seed")?;
    let coeffs: Vec<KElem> = (1..=3)
        .map(|jj| eval_level1(&cubic.coeffs[jj], &e4v, &e6v))
        .collect::<Result<_>>()?;
    let what = format!("E2star({label}) fixed-point extraction");
    let roots = solve_monic(&coeffs, &[], &what)?;
    let ctx = NumCtx::new(bits);
    let e2s = ctx.normalized_value(ValueKey::E2Star, &p0.x, &p0.b)?;
    let target = e2s.mul(&kelem_numeric(&kappa, bits));
    let idx = ctx.match_root(&roots, &target, &what)?;
    let value = &roots[idx] * &kappa.inv();
    Ok(ClosedForm::term(value, 2, 0))
}

/// Fill `G(z)` and `H(z)` from the quasiperiod bridges
/// `3G(z)² = 4E₂(4z) − E₂(z)` and `16H(z) = 2E₂(2z) − E₂(z) − G(z)²`
/// (in both, the `3/(π·Im)` anomalies cancel, so `E₂` may be read as `E₂*`).
/// Needs `E₂*` at `z`, `2z`, `4z`; the square root's sign is fixed by a
/// numeric match against the q-expansion of `G`.
pub fn g_h_from_bridges(reg: &Registry, label: &str, bits: u32) -> Result<Vec<Assignment>> {
    let p0 = reg.get(label)?;
    let two = Q::from(BigInt::from(2));
    let four = Q::from(BigInt::from(4));
    let e_at = |mult: &Q| -> Result<KElem> {
        let x = reduce_x(&(&p0.x * mult));
        let y = &p0.b * mult;
        let p = reg
            .find_by_z(&x, &y, 1)
            .ok_or_else(|| Error::MissingPoint {
                point: label_for_z(&x, &y),
                what: format!("E2star for the G/H bridge at {label}"),
            })?;
        omega_part(p.value(ValueKey::E2Star)?, 2, "bridge E2star")
    };
    let e1 = e_at(&Q::one())?;
    let e2 = e_at(&two)?;
    let e4 = e_at(&four)?;
    let third = Q::new(BigInt::one(), BigInt::from(3));
    let g_sq = (&e4.scale(&four) - &e1).scale(&third);
    let g_root = g_sq.sqrt().ok_or_else(|| {
        Error::NotInField(format!("G({label})² = {} has no square root in K", g_sq.render()))
    })?;
    let ctx = NumCtx::new(bits);
    let g_direct = ctx.normalized_value(ValueKey::G, &p0.x, &p0.b)?;
    let g = if ctx
        .match_root(&[g_root.clone()], &g_direct, &format!("G({label}) sign"))
        .is_ok()
    {
        g_root
    } else {
        let neg = -&g_root;
        ctx.match_root(
            &[neg.clone()],
            &g_direct,
            &format!("G({label}) sign"),
        )?;
        neg
    };
    let sixteenth = Q::new(BigInt::one(), BigInt::from(16));
    let h = (&(&e2.scale(&two) - &e1) - &g_sq).scale(&sixteenth);
    Ok(vec![
        Assignment {
            label: p0.label.clone(),
            x: p0.x.clone(),
            b: p0.b.clone(),
            key: ValueKey::G,
            value: ClosedForm::term(g, 1, 0),
        },
        Assignment {
            label: p0.label.clone(),
            x: p0.x.clone(),
            b: p0.b.clone(),
            key: ValueKey::H,
            value: ClosedForm::term(h, 2, 0),
        },
    ])
}

/// Rebuild the whole Gaussian registry from the seeds `E₄(i) = 12Ω⁴`,
/// `E₆(i) = 0` (and `E₂*(i)`, itself re-derived from the fixed point of
/// `(z−1)/(z+1)`). Returns the registry and a derivation log. The step from
/// `4i` towards `8i` is attempted like any other; if its discriminant had no
/// square root in `K` the chain would record that and carry on without the
/// `8i` row.
pub fn derive_gaussian_registry(bits: u32) -> Result<(Registry, Vec<String>)> {
    let mut reg = Registry::new();
    let mut log = Vec::new();
    let mut seed = CMPoint::new("i", Q::zero(), Q::one(), 1)?;
    seed.set_value(
        ValueKey::E4,
        ClosedForm::term(KElem::from_i64(12), 4, 0),
    );
    seed.set_value(ValueKey::E6, ClosedForm::zero());
    reg.insert(seed);
    let e2i = e2_fixed_point_extract(&reg, "i", [1, -1, 1, 1], bits)?;
    log.push(format!("E2star(i) = {} (fixed point of (z−1)/(z+1))", e2i));
    reg.get_mut("i")?.set_value(ValueKey::E2Star, e2i);

    for z0 in ["i", "2i", "i/2", "4i"] {
        for target in [TargetForm::E4, TargetForm::E6, TargetForm::E2Comb] {
            match cm_bootstrap(&reg, z0, target, 2, bits) {
                Ok(asg) => log.extend(apply_assignments(&mut reg, &asg)?),
                Err(Error::NotInField(msg)) => {
                    log.push(format!(
                        "step {} at {z0} skipped (outside K): {msg}",
                        target.as_str()
                    ));
                }
                Err(e) => return Err(e),
            }
        }
    }
    // The (±1+i)/4 pair sits on the SL₂(ℤ)-orbit of 2i: −1/(z∓2) maps 2i
    // there with cocycle 2i∓2.
    for gamma in [[0, -1, 1, -2], [0, -1, 1, 2]] {
        let asg = transport_sl2(&reg, "2i", gamma)?;
        log.extend(apply_assignments(&mut reg, &asg)?);
    }
    // G/H: bridges where E₂* is known at z, 2z, 4z; one quadratic step for 2i.
    for z in ["i", "i/2", "i/4"] {
        let asg = g_h_from_bridges(&reg, z, bits)?;
        log.extend(apply_assignments(&mut reg, &asg)?);
    }
    for target in [TargetForm::G, TargetForm::H] {
        let asg = cm_bootstrap(&reg, "i", target, 2, bits)?;
        log.extend(apply_assignments(&mut reg, &asg)?);
    }
    Ok((reg, log))
}

/// Numerically certify every stored value of a Gaussian registry against the
/// defining q-expansions: `|closed-form − series| ≤ tol` per value (absolute,
/// in the embedding; the values compared are `Ω`-normalized, all of moderate
/// height). Returns one log line per checked value.
pub fn certify_registry(reg: &Registry, bits: u32, tol: &BF) -> Result<Vec<String>> {
    let ctx = NumCtx::new(bits);
    let tol2 = tol.mul(tol);
    let mut log = Vec::new();
    let labels: Vec<String> = reg.to_json()["points"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|p| p["label"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    for label in labels {
        let p = reg.get(&label)?;
        for key in ValueKey::ALL {
            let Ok(v) = p.value(key) else { continue };
            let exact = kelem_numeric(&omega_part(v, key.weight(), "certify")?, bits);
            let direct = ctx.normalized_value(key, &p.x, &p.b)?;
            let d2 = exact.sub(&direct).abs2();
            if !d2.le(&tol2) {
                return Err(Error::Registry(format!(
                    "numeric certification failed for {}({label})",
                    key.as_str()
                )));
            }
            log.push(format!("certified {}({label})", key.as_str()));
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn ksq(a: Q, b: Q) -> KElem {
        KElem::from_sqrt2_pair(a, b)
    }

    fn chain() -> &'static (Registry, Vec<String>) {
        static CHAIN: OnceLock<(Registry, Vec<String>)> = OnceLock::new();
        CHAIN.get_or_init(|| derive_gaussian_registry(160).unwrap())
    }

    fn val(reg: &Registry, label: &str, key: ValueKey) -> KElem {
        omega_part(
            reg.get(label).unwrap().value(key).unwrap(),
            key.weight(),
            "test",
        )
        .unwrap()
    }

    #[test]
    fn e4_cubic_at_i_factors_with_double_root() {
        let psi = psi_polynomial(&QMPoly::e4(), 2, 4).unwrap();
        let e4 = KElem::from_i64(12);
        let e6 = KElem::zero();
        let coeffs: Vec<KElem> = (1..=3)
            .map(|j| eval_level1(&psi.coeffs[j], &e4, &e6).unwrap())
            .collect();
        assert_eq!(coeffs[0].as_q().unwrap(), q(-27, 2));
        assert_eq!(coeffs[1].as_q().unwrap(), q(297, 16));
        assert_eq!(coeffs[2].as_q().unwrap(), q(3267, 16));
        let mut roots: Vec<Q> = solve_monic(&coeffs, &[], "test")
            .unwrap()
            .into_iter()
            .map(|r| r.as_q().unwrap())
            .collect();
        roots.sort();
        assert_eq!(roots, vec![q(-3, 1), q(33, 4), q(33, 4)]);
    }

    #[test]
    fn quadratic_without_tower_root_is_rejected() {
        // x² − 3 has no root in K (√3 ∉ Q(i, 2^{1/4}))
        let err = solve_monic(&[KElem::zero(), KElem::from_i64(-3)], &[], "test").unwrap_err();
        assert!(matches!(err, Error::NotInField(_)));
    }

    #[test]
    fn chain_reproduces_published_e_rows() {
        let (reg, log) = chain();
        assert_eq!(val(reg, "i", ValueKey::E2Star), KElem::zero());
        assert_eq!(val(reg, "i", ValueKey::E4), KElem::from_i64(12));
        assert_eq!(val(reg, "i", ValueKey::E6), KElem::zero());
        assert_eq!(val(reg, "2i", ValueKey::E2Star), KElem::from_q(q(3, 2)));
        assert_eq!(val(reg, "2i", ValueKey::E4), KElem::from_q(q(33, 4)));
        assert_eq!(val(reg, "2i", ValueKey::E6), KElem::from_q(q(189, 8)));
        assert_eq!(val(reg, "i/2", ValueKey::E2Star), KElem::from_i64(-6));
        assert_eq!(val(reg, "i/2", ValueKey::E4), KElem::from_i64(132));
        assert_eq!(val(reg, "i/2", ValueKey::E6), KElem::from_i64(-1512));
        assert_eq!(
            val(reg, "4i", ValueKey::E2Star),
            ksq(q(9, 8), q(3, 4))
        );
        assert_eq!(val(reg, "4i", ValueKey::E4), ksq(q(273, 64), q(45, 16)));
        assert_eq!(
            val(reg, "4i", ValueKey::E6),
            ksq(q(6237, 512), q(2079, 256))
        );
        assert_eq!(
            val(reg, "i/4", ValueKey::E2Star),
            ksq(q(-18, 1), q(-12, 1))
        );
        assert_eq!(val(reg, "i/4", ValueKey::E4), ksq(q(1092, 1), q(720, 1)));
        assert_eq!(
            val(reg, "i/4", ValueKey::E6),
            ksq(q(-49896, 1), q(-33264, 1))
        );
        // the (±1+i)/4 pair via transport from 2i
        let mi = |n: i64| KElem::i().scale(&q(n, 1));
        assert_eq!(val(reg, "(1+i)/4", ValueKey::E2Star), mi(-12));
        assert_eq!(val(reg, "(1+i)/4", ValueKey::E4), KElem::from_i64(-528));
        assert_eq!(val(reg, "(1+i)/4", ValueKey::E6), mi(12096));
        assert_eq!(val(reg, "(-1+i)/4", ValueKey::E2Star), mi(12));
        assert_eq!(val(reg, "(-1+i)/4", ValueKey::E4), KElem::from_i64(-528));
        assert_eq!(val(reg, "(-1+i)/4", ValueKey::E6), mi(-12096));
        // byproduct rows are the √2-conjugates of their partners
        assert_eq!(
            val(reg, "(1+2i)/2", ValueKey::E4),
            ksq(q(273, 4), q(-45, 1))
        );
        assert_eq!(
            val(reg, "(2+i)/4", ValueKey::E4),
            ksq(q(1092, 1), q(-720, 1))
        );
        assert_eq!(val(reg, "(1+i)/2", ValueKey::E4), KElem::from_i64(-48));
        assert_eq!(val(reg, "(1+i)/2", ValueKey::E6), KElem::zero());
        assert_eq!(val(reg, "(1+i)/2", ValueKey::E2Star), KElem::zero());
        // the chain revisits earlier points and must confirm, never clash
        assert!(log.iter().any(|l| l == "confirmed E4(i)"));
        assert!(log.iter().any(|l| l == "confirmed E2star(2i)"));
    }

    #[test]
    fn chain_reproduces_published_g_h_rows() {
        let (reg, _) = chain();
        let t = KElem::t();
        assert_eq!(val(reg, "i", ValueKey::G), ksq(Q::one(), q(1, 2)));
        assert_eq!(val(reg, "i", ValueKey::H), ksq(q(3, 32), q(-1, 16)));
        assert_eq!(val(reg, "i/2", ValueKey::G), KElem::from_i64(2));
        assert_eq!(val(reg, "i/2", ValueKey::H), KElem::from_q(q(1, 8)));
        assert_eq!(val(reg, "i/4", ValueKey::G), ksq(q(2, 1), Q::one()));
        assert_eq!(val(reg, "i/4", ValueKey::H), ksq(Q::zero(), q(1, 2)));
        // G(2i) = 2^{-1} + 2^{-3/2} + 2^{-1/4}
        let expected_g2i = &ksq(q(1, 2), q(1, 4)) + &t.powi(3).scale(&q(1, 2));
        assert_eq!(val(reg, "2i", ValueKey::G), expected_g2i);
        // H(2i) = (2^{1/4} − 1)⁴ / 128
        let expected_h2i = (&t - &KElem::one()).powi(4).scale(&q(1, 128));
        assert_eq!(val(reg, "2i", ValueKey::H), expected_h2i);
    }

    #[test]
    fn eight_i_row_lands_in_the_tower() {
        let (reg, _) = chain();
        let t = KElem::t();
        let expected_e4 = &ksq(q(2193, 1024), q(405, 256))
            + &(&t.scale(&q(225, 128)) + &t.powi(3).scale(&q(135, 128)));
        assert_eq!(val(reg, "8i", ValueKey::E4), expected_e4);
        let expected_e2 = &ksq(q(21, 32), q(9, 16))
            + &(&t.scale(&q(3, 8)) + &t.powi(3).scale(&q(3, 8)));
        assert_eq!(val(reg, "8i", ValueKey::E2Star), expected_e2);
        assert!(reg.get("8i").unwrap().value(ValueKey::E6).is_ok());
        // and its Galois partner across √2 ↦ −√2, 2^{1/4} ↦ −2^{1/4}
        let expected_partner = &ksq(q(2193, 64), q(405, 16))
            + &(&t.scale(&q(-225, 8)) + &t.powi(3).scale(&q(-135, 8)));
        assert_eq!(val(reg, "(1+4i)/2", ValueKey::E4), expected_partner);
    }

    #[test]
    fn bridges_hold_as_exact_closed_forms() {
        let (reg, _) = chain();
        let three = Q::from(BigInt::from(3));
        let sixteen = Q::from(BigInt::from(16));
        for (z, z2, z4) in [("i", "2i", "4i"), ("i/2", "i", "2i"), ("i/4", "i/2", "i")] {
            let g = reg.get(z).unwrap().value(ValueKey::G).unwrap().clone();
            let h = reg.get(z).unwrap().value(ValueKey::H).unwrap().clone();
            let e_z = reg.get(z).unwrap().value(ValueKey::E2Star).unwrap().clone();
            let e_2z = reg.get(z2).unwrap().value(ValueKey::E2Star).unwrap().clone();
            let e_4z = reg.get(z4).unwrap().value(ValueKey::E2Star).unwrap().clone();
            let lhs = g.mul(&g).scale_q(&three);
            let rhs = e_4z.scale_q(&Q::from(BigInt::from(4))).sub(&e_z);
            assert!(lhs.sub(&rhs).is_zero(), "3G² bridge fails at {z}");
            let lhs = h.scale_q(&sixteen);
            let rhs = e_2z
                .scale_q(&Q::from(BigInt::from(2)))
                .sub(&e_z)
                .sub(&g.mul(&g));
            assert!(lhs.sub(&rhs).is_zero(), "16H bridge fails at {z}");
        }
    }

    #[test]
    fn fixed_point_extraction_rederives_the_seed() {
        let (reg, _) = chain();
        let e2i = e2_fixed_point_extract(reg, "i", [1, -1, 1, 1], 160).unwrap();
        assert!(e2i.is_zero());
        // determinant must be 2
        assert!(matches!(
            e2_fixed_point_extract(reg, "i", [1, 0, 0, 1], 160),
            Err(Error::Invalid(_))
        ));
        // the matrix must actually fix the point
        assert!(matches!(
            e2_fixed_point_extract(reg, "2i", [1, -1, 1, 1], 160),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn transport_requires_unimodular_matrix() {
        let (reg, _) = chain();
        assert!(matches!(
            transport_sl2(reg, "2i", [2, 0, 0, 1]),
            Err(Error::Invalid(_))
        ));
        // transporting i along (z−1)/(z+1)-like maps keeps values consistent:
        // γ = (1,0;1,1) sends i to (1+i)/2 with cocycle i+1
        let asg = transport_sl2(reg, "i", [1, 0, 1, 1]).unwrap();
        for a in &asg {
            assert_eq!(a.label, "(1+i)/2");
            let stored = reg.get("(1+i)/2").unwrap().value(a.key).unwrap();
            assert_eq!(&a.value, stored, "transport clashes at {}", a.key.as_str());
        }
    }

    #[test]
    fn corrupted_stored_value_is_not_papered_over() {
        let (reg, _) = chain();
        let mut bad = reg.clone();
        bad.get_mut("2i")
            .unwrap()
            .set_value(ValueKey::E4, ClosedForm::term(KElem::from_i64(9), 4, 0));
        // at seed 2i the satellite i is still correct, but the corrupted
        // coefficient polynomial no longer has it as a root
        let err = cm_bootstrap(&bad, "2i", TargetForm::E4, 2, 160).unwrap_err();
        assert!(matches!(err, Error::Registry(_) | Error::NoMatchingRoot { .. }));
    }

    #[test]
    fn bootstrap_rejects_unsupported_degree_and_precision() {
        let (reg, _) = chain();
        assert!(matches!(
            cm_bootstrap(reg, "i", TargetForm::E4, 3, 160),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            cm_bootstrap(reg, "i", TargetForm::E4, 2, 64),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn certification_at_256_bits() {
        let (reg, _) = chain();
        let tol = BF::from_q(
            &Q::new(BigInt::one(), BigInt::from(10).pow(40)),
            256,
        );
        let log = certify_registry(reg, 256, &tol).unwrap();
        // 12 points × the values each carries: 3 E-values everywhere, G/H on 4
        assert_eq!(log.len(), 12 * 3 + 4 * 2);
    }

    #[test]
    fn shipped_registry_equals_derivation() {
        let (reg, _) = chain();
        let shipped: serde_json::Value =
            serde_json::from_str(crate::cmdata::SHIPPED_REGISTRY_JSON).unwrap();
        let shipped_reg = Registry::from_json(&shipped).unwrap();
        assert_eq!(
            shipped_reg.to_json(),
            reg.to_json(),
            "shipped gaussian_registry.json is stale; regenerate it"
        );
    }

    #[test]
    #[ignore]
    fn regenerate_shipped_registry() {
        let (reg, _) = chain();
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/gaussian_registry.json");
        reg.save(&path).unwrap();
    }
}
