//! Closed-form values: finite sums `Σ c · Ω^a · π^{-b}` with coefficients in
//! `K = Q(i, 2^{1/4})`, where `Ω` is the lemniscatic period
//! `Γ(1/4)² / (4 π^{3/2}) = η(i)²`.
//!
//! Terms are kept in a canonical order (decreasing `Ω`-exponent, then
//! increasing `π`-exponent, i.e. decreasing powers of `1/π`), which fixes the
//! display and serialization byte-for-byte.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::field::{KElem, THETA_MIN_POLY};
use crate::{Error, Q, Result};

/// Exponent key: `(omega_exp, pi_exp)` with `omega_exp ≥ 0`, `pi_exp ≤ 0`.
pub type Expo = (u32, i32);

/// A closed form `Σ c_{a,b} Ω^a π^b` (`b ≤ 0`) over `K`.
#[derive(Clone, PartialEq, Default)]
pub struct ClosedForm {
    terms: BTreeMap<Expo, KElem>,
}

impl ClosedForm {
    pub fn zero() -> Self {
        ClosedForm {
            terms: BTreeMap::new(),
        }
    }

    /// A single term `coeff · Ω^{omega} · π^{pi}`.
    pub fn term(coeff: KElem, omega: u32, pi: i32) -> Self {
        assert!(pi <= 0, "positive powers of π are not representable");
        let mut cf = ClosedForm::zero();
        if !coeff.is_zero() {
            cf.terms.insert((omega, pi), coeff);
        }
        cf
    }

    pub fn from_k(coeff: KElem) -> Self {
        Self::term(coeff, 0, 0)
    }

    pub fn from_q(x: Q) -> Self {
        Self::from_k(KElem::from_q(x))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at `(omega, pi)` (zero if absent).
    pub fn coeff(&self, omega: u32, pi: i32) -> KElem {
        self.terms
            .get(&(omega, pi))
            .cloned()
            .unwrap_or_else(KElem::zero)
    }

    /// Iterate terms in canonical display order:
    /// decreasing `omega`, then increasing `pi` (most negative first).
    pub fn ordered_terms(&self) -> Vec<(Expo, KElem)> {
        let mut v: Vec<(Expo, KElem)> = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        v.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        v
    }

    fn insert_add(&mut self, key: Expo, val: KElem) {
        if val.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                let s = &*c + &val;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(key, val);
            }
        }
    }

    pub fn add(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert_add(*k, v.clone());
        }
        out
    }

    pub fn neg(&self) -> ClosedForm {
        ClosedForm {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, -v))
                .collect(),
        }
    }

    pub fn sub(&self, other: &ClosedForm) -> ClosedForm {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.insert_add((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    pub fn scale_k(&self, s: &KElem) -> ClosedForm {
        if s.is_zero() {
            return ClosedForm::zero();
        }
        ClosedForm {
            terms: self.terms.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn scale_q(&self, s: &Q) -> ClosedForm {
        self.scale_k(&KElem::from_q(s.clone()))
    }

    /// Multiply by `π^{-k}` (shift all `pi` exponents down by `k`).
    pub fn mul_pi_inv(&self, k: i32) -> ClosedForm {
        assert!(k >= 0);
        ClosedForm {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a, b - k), v.clone()))
                .collect(),
        }
    }

    /// Multiply by `Ω^k`.
    pub fn mul_omega(&self, k: u32) -> ClosedForm {
        ClosedForm {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a + k, b), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ClosedForm {
        let mut acc = ClosedForm::from_q(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Render in canonical human-readable form, e.g.
    /// `(2/315)*Omega^12 + (1/15)*Omega^8*pi^-2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((omega, pi), coeff) in self.ordered_terms() {
            let mut factors = Vec::new();
            factors.push(format!("({})", coeff.render()));
            if omega != 0 {
                factors.push(format!("Omega^{omega}"));
            }
            if pi != 0 {
                factors.push(format!("pi^{pi}"));
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// One serialized term: exponents plus the coefficient on the power basis of
/// `θ = 2^{1/4} + i` (eight rationals as strings, ascending powers).
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermDto {
    pub omega: u32,
    pub pi: i32,
    pub coeff: Vec<String>,
}

/// Description of the coefficient field: the minimal polynomial of the
/// primitive element `θ` (ascending integer coefficients) and a numeric
/// embedding so consumers can pick the right root.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FieldDto {
    pub min_poly: Vec<i64>,
    pub embedding: EmbeddingDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EmbeddingDto {
    pub re: String,
    pub im: String,
    pub prec_bits: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ClosedFormDto {
    pub terms: Vec<TermDto>,
    pub field: FieldDto,
}

/// Decimal expansion of `2^{1/4}` with `bits` bits of precision.
fn two_fourth_root_decimal(bits: u32) -> String {
    // r ≈ 2^{1/4} · 2^{2S}: isqrt(isqrt(2 · 2^{8S}) · 2^{2S})
    let s = bits as usize;
    let r1 = (BigInt::from(2) << (8 * s)).sqrt(); // √2 · 2^{4S}
    let r2 = (r1 << (2 * s)).sqrt(); // 2^{1/4} · 2^{3S}  (≈, floor)
    // now r2 / 2^{3S}; emit with `digits` decimal places
    let digits = (bits as f64 * 0.30103) as usize + 1;
    let scaled = r2 * BigInt::from(10).pow(digits as u32) >> (3 * s);
    let st = scaled.to_string();
    let (int_part, frac_part) = st.split_at(st.len() - digits);
    format!("{}.{}", if int_part.is_empty() { "0" } else { int_part }, frac_part)
}

pub fn field_dto() -> FieldDto {
    const PREC: u32 = 128;
    FieldDto {
        min_poly: THETA_MIN_POLY.to_vec(),
        embedding: EmbeddingDto {
            re: two_fourth_root_decimal(PREC),
            im: "1.0".to_string(),
            prec_bits: PREC,
        },
    }
}

fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_from_string(s: &str) -> Result<Q> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Invalid(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(num, den))
        }
        None => Ok(Q::from(parse_int(s)?)),
    }
}

impl ClosedForm {
    pub fn to_dto(&self) -> ClosedFormDto {
        let terms = self
            .ordered_terms()
            .into_iter()
            .map(|((omega, pi), coeff)| TermDto {
                omega,
                pi,
                coeff: coeff.to_power_basis().iter().map(q_to_string).collect(),
            })
            .collect();
        ClosedFormDto {
            terms,
            field: field_dto(),
        }
    }

    pub fn from_dto(dto: &ClosedFormDto) -> Result<ClosedForm> {
        if dto.field.min_poly != THETA_MIN_POLY.to_vec() {
            return Err(Error::Invalid(
                "closed form uses an unexpected coefficient field".into(),
            ));
        }
        let mut cf = ClosedForm::zero();
        for t in &dto.terms {
            if t.coeff.len() != 8 {
                return Err(Error::Invalid(format!(
                    "coefficient vector has {} entries (want 8)",
                    t.coeff.len()
                )));
            }
            if t.pi > 0 {
                return Err(Error::Invalid("positive power of π in closed form".into()));
            }
            let mut p = [
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
            ];
            for (k, s) in t.coeff.iter().enumerate() {
                p[k] = q_from_string(s)?;
            }
            cf.insert_add((t.omega, t.pi), KElem::from_power_basis(&p));
        }
        Ok(cf)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_dto()).expect("closed form serialization cannot fail")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ClosedForm> {
        let dto: ClosedFormDto = serde_json::from_value(v.clone())?;
        Self::from_dto(&dto)
    }
}
