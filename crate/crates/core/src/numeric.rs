//! Numeric verification: defining-series summation with certified tails,
//! Dedekind-eta and Ω evaluation, `ClosedForm` embedding, Eisenstein values
//! from q-expansions, and the Ω-free ratio checks for the non-Gaussian rows.
//!
//! Everything works in fixed-point at a caller-chosen bit count; comparisons
//! against a tolerance are the caller's business (reports carry decimal
//! strings). The tail bounds are geometric majorants: beyond the cutoff the
//! term ratio is at most `ρ·((m₀+1)/m₀)^p < 1`, so the tail is dominated by a
//! geometric series summed in closed form.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bigfloat::{exp, pi, BF, CF};
use crate::closedform::ClosedForm;
use crate::cmdata::OtherDiscRow;
use crate::field::KElem;
use crate::qseries::{Family, QSeries};
use crate::tables::{bernoulli, sigma};
use crate::{Error, Q, Result, Z};

/// `v = e^{πiz}` (the half-nome) for `z = x + iy`.
pub fn nome_half(x: &Q, y: &BF, bits: u32) -> CF {
    let p = pi(bits);
    let re = p.mul(y).neg();
    let im = p.mul(&BF::from_q(x, bits));
    exp(&CF::new(re, im), bits)
}

/// `q = e^{2πiz}` for `z = x + iy`.
pub fn nome(x: &Q, y: &BF, bits: u32) -> CF {
    nome_half(x, y, bits).powi(2)
}

/// Dedekind eta via the pentagonal-number series:
/// `η(z) = q^{1/24} Σ_{k∈ℤ} (−1)^k q^{k(3k−1)/2}`.
pub fn eta_numeric(x: &Q, y: &BF, bits: u32) -> CF {
    let twentyfourth = Q::new(BigInt::from(1), BigInt::from(24));
    let q24 = {
        let p = pi(bits);
        let re = p.mul(y).scale_q(&(&twentyfourth * Q::from(BigInt::from(2)))).neg();
        let im = p
            .mul(&BF::from_q(x, bits))
            .scale_q(&(&twentyfourth * Q::from(BigInt::from(2))));
        exp(&CF::new(re, im), bits)
    };
    let q = q24.powi(24);
    let tiny = BF::new(Z::from(1) << 8, bits); // 2^{8-bits}
    let mut acc = CF::one(bits);
    let mut k = 1u32;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        let t = q.powi(e1).add(&q.powi(e2));
        let t = if k % 2 == 1 { t.neg() } else { t };
        acc = acc.add(&t);
        if t.re.abs().add(&t.im.abs()).le(&tiny) {
            break;
        }
        k += 1;
        assert!(k < 10_000, "eta series failed to converge");
    }
    q24.mul(&acc)
}

/// `Ω = η(i)²` numerically.
pub fn omega_numeric(bits: u32) -> BF {
    let e = eta_numeric(&Q::zero(), &BF::one(bits), bits);
    debug_assert!(e.im.is_zero());
    e.re.mul(&e.re)
}

/// The lemniscatic cross-check `Ω = 1/(√2 · AGM(1, √2))`.
pub fn omega_agm(bits: u32) -> BF {
    let sqrt2 = BF::from_i64(2, bits).sqrt();
    let mut a = BF::one(bits);
    let mut b = sqrt2.clone();
    let eps = BF::new(Z::from(1) << 8, bits);
    for _ in 0..64 {
        if a.sub(&b).abs().le(&eps) {
            break;
        }
        let a2 = a.add(&b).shr(1);
        let b2 = a.mul(&b).sqrt();
        a = a2;
        b = b2;
    }
    a.mul(&sqrt2).recip()
}

/// Embed a field element as a complex number (`2^{1/4}` chosen positive real).
pub fn kelem_numeric(k: &KElem, bits: u32) -> CF {
    let t = BF::from_i64(2, bits).sqrt().sqrt();
    let c = k.tower_coeffs();
    let mut re = BF::zero(bits);
    let mut im = BF::zero(bits);
    for a in 0..4u32 {
        let ta = t.powi(a);
        re = re.add(&ta.scale_q(&c[a as usize]));
        im = im.add(&ta.scale_q(&c[(a + 4) as usize]));
    }
    CF::new(re, im)
}

/// Evaluate a closed form `Σ c · Ω^a · π^b` numerically with `Ω = η(i)²`.
pub fn closedform_numeric(cf: &ClosedForm, bits: u32) -> CF {
    let omega = omega_numeric(bits);
    let pival = pi(bits);
    let mut acc = CF::zero(bits);
    for ((om, pw), coeff) in cf.ordered_terms() {
        let mut t = kelem_numeric(&coeff, bits).mul_bf(&omega.powi(om));
        debug_assert!(pw <= 0);
        if pw < 0 {
            t = CF::new(
                t.re.div(&pival.powi((-pw) as u32)),
                t.im.div(&pival.powi((-pw) as u32)),
            );
        }
        acc = acc.add(&t);
    }
    acc
}

fn family_shape(f: Family) -> (bool, bool, bool) {
    // (odd base, plus denominator, alternating)
    match f {
        Family::One => (false, false, false),
        Family::Two => (false, true, false),
        Family::Three => (true, false, false),
        Family::Four => (true, true, false),
        Family::Five => (false, false, true),
        Family::Six => (false, true, true),
        Family::Seven => (true, false, true),
        Family::Eight => (true, true, true),
    }
}

/// Literal partial sum of the defining series, `n = 1..=n_max`, in the
/// half-nome variable `v = q^{1/2}`.
pub fn sum_with_cutoff(f: Family, s: u32, p: u32, v: &CF, n_max: usize) -> CF {
    let (odd, plus, alt) = family_shape(f);
    let bits = v.bits();
    let one = CF::one(bits);
    let num_step = v.powi(2 * s);
    let den_step = v.powi(4);
    let mut num = if odd { v.powi(s) } else { num_step.clone() };
    let mut den = if odd { v.powi(2) } else { den_step.clone() };
    let mut acc = CF::zero(bits);
    for n in 1..=n_max {
        let idx = if odd { 2 * n as u64 - 1 } else { n as u64 };
        let d = if plus { one.add(&den) } else { one.sub(&den) };
        let idx_pow = BF::from_q(&Q::from(BigInt::from(idx).pow(p)), bits);
        let t = num.mul_bf(&idx_pow).div(&d.powi(s));
        acc = if alt && n % 2 == 0 {
            acc.sub(&t)
        } else {
            acc.add(&t)
        };
        num = num.mul(&num_step);
        den = den.mul(&den_step);
    }
    acc
}

/// Certified bound on `|Σ_{n > n_last} term(n)|` from the geometric majorant
/// `|term| ≤ C·idx^p·ρ^idx` (`ρ = r^{2s}` on the integer grid, `ρ = r^s` on
/// the odd grid, `C = (1−r^{2·grid})^{−s}`, `r = |v|`).
pub fn tail_bound_after(f: Family, s: u32, p: u32, r: &BF, n_last: usize) -> Result<BF> {
    let (odd, _, _) = family_shape(f);
    let bits = r.bits();
    let one = BF::one(bits);
    if !r.lt(&one) || r.is_negative() {
        return Err(Error::Invalid("series nome must satisfy |q| < 1".into()));
    }
    let (rho, gap, m0) = if odd {
        (r.powi(s), r.powi(2), 2 * n_last as u64 + 1)
    } else {
        (r.powi(2 * s), r.powi(4), n_last as u64 + 1)
    };
    let cbig = one.sub(&gap);
    if !BF::zero(bits).lt(&cbig) {
        return Err(Error::Invalid("series nome too close to 1".into()));
    }
    let c = cbig.recip().powi(s);
    // term-ratio majorant beyond the cutoff
    let ratio_q = Q::new(BigInt::from(m0 + 1), BigInt::from(m0));
    let rho_hat = rho.mul(&BF::from_q(&ratio_q, bits).powi(p));
    if !rho_hat.lt(&one) {
        return Err(Error::Invalid(
            "cutoff too small for a contracting tail ratio; extend the partial sum".into(),
        ));
    }
    let m0_pow = BF::from_q(&Q::from(BigInt::from(m0).pow(p)), bits);
    let lead = c.mul(&m0_pow).mul(&rho.powi(m0 as u32));
    Ok(lead.div(&one.sub(&rho_hat)))
}

#[derive(Clone, Debug)]
pub struct SumOutcome {
    pub value: CF,
    pub tail_bound: BF,
    pub terms: usize,
}

/// Sum the defining series at `z = x + iy` (series nome `q = e^{2πiz}`) with
/// the tail certified below `eps`.
pub fn sum_defining_series(
    f: Family,
    s: u32,
    p: u32,
    x: &Q,
    y: &BF,
    bits: u32,
    eps: &BF,
) -> Result<SumOutcome> {
    let v = nome_half(x, y, bits);
    sum_defining_series_at(f, s, p, &v, eps)
}

/// Sum the defining series at an explicit half-nome `v` (the series variable
/// is `q = v²`, which may be any algebraic or floating value with `|q| < 1`),
/// with the tail certified below `eps`.
pub fn sum_defining_series_at(f: Family, s: u32, p: u32, v: &CF, eps: &BF) -> Result<SumOutcome> {
    assert!(s >= 1, "the series exponent must be positive");
    let bits = v.bits();
    if eps.le(&BF::epsilon(bits, bits - 32)) {
        return Err(Error::Invalid(format!(
            "requested tolerance is below the resolution of {bits}-bit arithmetic"
        )));
    }
    let r = v.abs();
    let mut n_max = 8usize;
    loop {
        match tail_bound_after(f, s, p, &r, n_max) {
            Ok(b) if b.le(eps) => {
                let value = sum_with_cutoff(f, s, p, &v, n_max);
                return Ok(SumOutcome {
                    value,
                    tail_bound: b,
                    terms: n_max,
                });
            }
            Ok(_) | Err(_) if n_max < 2_000_000 => n_max *= 2,
            Ok(_) => {
                return Err(Error::Invalid(
                    "tail does not certify below eps at any feasible cutoff".into(),
                ))
            }
            Err(e) => return Err(e),
        }
    }
}

/// `E_k` from its q-expansion `1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ`, with the cutoff
/// chosen so the certified tail sits below `eps`.
pub fn eisenstein_numeric(k: u32, q: &CF, eps: &BF) -> Result<CF> {
    let bits = q.bits();
    let r = q.abs();
    let one = BF::one(bits);
    if !r.lt(&one) {
        return Err(Error::Invalid("|q| must be below 1".into()));
    }
    let factor = Q::from(BigInt::from(2 * k as i64)) / bernoulli(k as usize);
    let factor_abs = BF::from_q(&factor, bits).abs();
    // pick a cutoff: σ_{k−1}(n) ≤ n^k, so the tail after N is at most
    // factor · Σ_{n>N} n^k rⁿ
    let mut n_max = 8usize;
    loop {
        let ratio_q = Q::new(BigInt::from(n_max as u64 + 2), BigInt::from(n_max as u64 + 1));
        let rho_hat = r.mul(&BF::from_q(&ratio_q, bits).powi(k));
        if rho_hat.lt(&one) {
            let m0 = n_max as u64 + 1;
            let lead = BF::from_q(&Q::from(BigInt::from(m0).pow(k)), bits)
                .mul(&r.powi(m0 as u32))
                .mul(&factor_abs);
            let bound = lead.div(&one.sub(&rho_hat));
            if bound.le(eps) {
                break;
            }
        }
        n_max *= 2;
        if n_max > 1_000_000 {
            return Err(Error::Invalid("Eisenstein tail does not certify".into()));
        }
    }
    let mut acc = CF::zero(bits);
    let mut qn = CF::one(bits);
    for n in 1..=n_max {
        qn = qn.mul(q);
        let c = Q::from(sigma(k - 1, n as u64));
        acc = acc.add(&qn.mul_bf(&BF::from_q(&c, bits)));
    }
    Ok(CF::one(bits).sub(&acc.scale_q(&factor)))
}

/// Numerically evaluate an exact expansion on the `w`-grid (`Σ_w c_w v^w` in
/// the half-nome `v`), with a certified tail bound assuming the dropped
/// coefficients obey `|c_w| ≤ C·(w+1)^p` beyond the stored length. Errors if
/// the stored series is too short to push that bound below `eps`.
pub fn qseries_numeric(s: &QSeries, c_bound: u32, p_bound: u32, v: &CF, eps: &BF) -> Result<CF> {
    let bits = v.bits();
    let one = BF::one(bits);
    let r = v.abs();
    if !r.lt(&one) {
        return Err(Error::Invalid("series evaluation needs |v| < 1".into()));
    }
    let len = s.len();
    if len < 2 {
        return Err(Error::Invalid("series too short to evaluate".into()));
    }
    // Beyond w = len − 1 the term is at most C(w+1)^p r^w and the term ratio
    // is at most ((len+1)/len)^p · r.
    let ratio_q = Q::new(BigInt::from(len as u64 + 1), BigInt::from(len as u64));
    let rho_hat = r.mul(&BF::from_q(&ratio_q, bits).powi(p_bound));
    if !rho_hat.lt(&one) {
        return Err(Error::Invalid(
            "series too short: tail ratio not below 1".into(),
        ));
    }
    let lead = BF::from_q(&Q::from(BigInt::from(len as u64 + 1).pow(p_bound)), bits)
        .mul(&r.powi(len as u32))
        .mul(&BF::from_i64(c_bound as i64, bits));
    let tail = lead.div(&one.sub(&rho_hat));
    if eps.lt(&tail) {
        return Err(Error::Invalid(format!(
            "series too short: tail bound {} exceeds target accuracy",
            tail.to_decimal(6)
        )));
    }
    let mut acc = CF::zero(bits);
    let mut vp = CF::one(bits);
    for w in 0..len {
        let c = s.coeff_w(w);
        if !c.is_zero() {
            acc = acc.add(&vp.scale_q(&c));
        }
        vp = vp.mul(v);
    }
    Ok(acc)
}

/// `E₂*(z) = E₂(z) − 3/(π·Im z)` at `z = x + iy` with rational `y > 0`.
pub fn e2_star_numeric(x: &Q, y: &Q, bits: u32, eps: &BF) -> Result<CF> {
    let yb = BF::from_q(y, bits);
    let q = nome(x, &yb, bits);
    let e2 = eisenstein_numeric(2, &q, eps)?;
    let corr = pi(bits).mul(&yb).recip().scale_q(&Q::from(BigInt::from(3)));
    Ok(e2.sub(&CF::from_bf(corr)))
}

/// JSON-facing residual report.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub residual: String,
    pub bits: u32,
    pub tail_bound: String,
    pub tolerance: String,
    pub ok: bool,
}

/// Compare a closed form against the literal series at `z = x + iy`
/// (rational `y`), reporting the relative residual.
pub fn verify_closedform(
    closed: &ClosedForm,
    f: Family,
    s: u32,
    p: u32,
    x: &Q,
    y: &Q,
    bits: u32,
    eps: &BF,
) -> Result<VerifyReport> {
    let yb = BF::from_q(y, bits);
    let summed = sum_defining_series(f, s, p, x, &yb, bits, &eps.shr(8))?;
    let lhs = closedform_numeric(closed, bits);
    let denom = summed.value.abs();
    let resid = if denom.is_zero() {
        lhs.sub(&summed.value).abs()
    } else {
        lhs.sub(&summed.value).abs().div(&denom)
    };
    let ok = resid.le(eps);
    Ok(VerifyReport {
        residual: resid.to_decimal(60),
        bits,
        tail_bound: summed.tail_bound.to_decimal(60),
        tolerance: eps.to_decimal(60),
        ok,
    })
}

/// Outcome of the Ω-free ratio checks on one other-discriminant row.
#[derive(Clone, Debug, Serialize)]
pub struct RatioOutcome {
    pub label: String,
    /// (check name, residual decimal)
    pub checks: Vec<(String, String)>,
    pub ok: bool,
}

/// Check a non-Gaussian table row numerically. With the column normalizations
/// `v₂ = |D|^{1/2}E₂*/Ω²`, `v₄ = E₄/Ω⁴`, `v₆ = E₆/(|D|^{1/2}Ω⁶)`, the
/// Ω-cancelling combinations are `E₆²/E₄³ = |D|·v₆²/v₄³` and
/// `(E₂*)³/E₆ = v₂³/(|D|²·v₆)`; degenerate (zero) columns are checked for
/// vanishing directly.
pub fn ratio_check_row(row: &OtherDiscRow, bits: u32, tol: &BF) -> Result<RatioOutcome> {
    let y = BF::from_q(&row.y_sq_q(), bits).sqrt();
    let q = {
        let p = pi(bits);
        let re = p.mul(&y).scale_q(&Q::from(BigInt::from(2))).neg();
        let im = p
            .mul(&BF::from_q(&row.x_q(), bits))
            .scale_q(&Q::from(BigInt::from(2)));
        exp(&CF::new(re, im), bits)
    };
    let eps = tol.shr(16);
    let e4 = eisenstein_numeric(4, &q, &eps)?;
    let e6 = eisenstein_numeric(6, &q, &eps)?;
    let e2 = eisenstein_numeric(2, &q, &eps)?;
    let pival = pi(bits);
    let e2s = e2.sub(&CF::from_bf(
        BF::from_i64(3, bits).div(&pival.mul(&y)),
    ));
    let absd = Q::from(BigInt::from(row.abs_d));
    let mut checks: Vec<(String, String)> = Vec::new();
    let mut all_ok = true;
    let mut push = |name: &str, resid: BF, all_ok: &mut bool| {
        if !resid.le(tol) {
            *all_ok = false;
        }
        checks.push((name.to_string(), resid.to_decimal(40)));
    };
    if row.v4 != 0 {
        let claim = &absd * Q::new(BigInt::from(row.v6).pow(2), BigInt::from(row.v4).pow(3));
        let got = e6.powi(2).div(&e4.powi(3));
        let resid = got.sub(&CF::from_bf(BF::from_q(&claim, bits))).abs();
        push("E6^2/E4^3", resid, &mut all_ok);
    } else {
        push("E4 vanishes", e4.abs(), &mut all_ok);
    }
    if row.v2 != 0 && row.v6 != 0 {
        let claim = Q::new(
            BigInt::from(row.v2).pow(3),
            BigInt::from(row.abs_d).pow(2) * BigInt::from(row.v6),
        );
        let got = e2s.powi(3).div(&e6);
        let resid = got.sub(&CF::from_bf(BF::from_q(&claim, bits))).abs();
        push("E2*^3/E6", resid, &mut all_ok);
    } else if row.v2 == 0 {
        push("E2* vanishes", e2s.abs(), &mut all_ok);
    }
    Ok(RatioOutcome {
        label: row.label.to_string(),
        checks,
        ok: all_ok,
    })
}
