//! Central-factorial decomposition of the eight series families.
//!
//! Each admissible `(family, s, p)` is written as a finite combination of
//! derivatives of the sixteen auxiliary Lambert-type series, with central
//! factorial numbers as coefficients: sixteen parity cases in all (two per
//! family). The decomposition is then *lowered*: every auxiliary series is
//! reduced to `A`/`G`/`N`-type series at rescaled arguments, and those are
//! bridged to Eisenstein polynomials in the quasimodular generators, leaving
//! a sum of terms `coeff · (D^j P)(q^scale · phase)` plus rational constants
//! that an evaluator can compute exactly at CM points.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::field::KElem;
use crate::qseries::{roman_direct, zucker_series, Family, QSeries, Zucker};
use crate::quasimod::{ramanujan_e, twisted_eisen_poly, QMPoly};
use crate::tables::{bernoulli, bernoulli_chi4, factorial, t_even, t_odd};
use crate::{q_pow, Error, Q, Result};

/// One term `coeff · D^{deriv_order} X_{index} (q^{arg_scale})` of a
/// decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompTerm {
    pub coeff: Q,
    pub deriv_order: usize,
    pub base: Zucker,
    pub index: u32,
    pub arg_scale: u32,
}

/// A decomposed series: `(family)_s^p = prefactor · Σ terms`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub family: Family,
    pub s: u32,
    pub p: u32,
    pub prefactor: Q,
    pub terms: Vec<DecompTerm>,
}

/// Parity admissibility of `(family, s, p)`: which of the sixteen cases the
/// pair falls into, if any.
pub fn admissible(family: Family, s: u32, p: u32) -> bool {
    if s == 0 {
        return false;
    }
    let se = s % 2 == 0;
    let pe = p % 2 == 0;
    match family {
        Family::One | Family::Three | Family::Five => se == pe,
        Family::Two | Family::Four | Family::Six => pe,
        Family::Seven => se != pe,
        Family::Eight => !pe,
    }
}

fn two_pow(e: i64) -> Q {
    q_pow(&Q::from(BigInt::from(2)), e)
}

/// Decompose `(family)_s^p` into derivatives of auxiliary series.
/// Inadmissible parities are an error.
pub fn decompose_roman(family: Family, s: u32, p: u32) -> Result<Decomposition> {
    if !admissible(family, s, p) {
        return Err(Error::NotDecomposable {
            family: family.name().to_string(),
            s: s as usize,
            p: p as usize,
            reason: "the (s, p) parity combination has no central-factorial expansion".into(),
        });
    }
    let mut terms: Vec<DecompTerm> = Vec::new();
    let mut push = |coeff: Q, deriv: usize, base: Zucker, index: i64, scale: u32| {
        if !coeff.is_zero() && index >= 0 {
            terms.push(DecompTerm {
                coeff,
                deriv_order: deriv,
                base,
                index: index as u32,
                arg_scale: scale,
            });
        }
    };
    let se = s % 2 == 0;
    let sig = (s / 2) as i64; // σ: s = 2σ or s = 2σ+1
    let pi = (p / 2) as i64; // π: p = 2π or p = 2π+1
    let prefactor: Q;
    match (family, se) {
        (Family::One, true) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::A, 2 * pi - 2 * r + 1, 2);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::A, 2 * r - 2 * pi - 1, 2);
            }
        }
        (Family::One, false) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 0..=pi {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * r) as usize, Zucker::C, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi + 1) as usize, Zucker::F, 2 * r - 2 * pi - 1, 1);
            }
        }
        (Family::Two, true) => {
            let sign = if (sig - 1) % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::L, 2 * pi - 2 * r + 1, 2);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::B, 2 * r - 2 * pi - 1, 2);
            }
        }
        (Family::Two, false) => {
            let sign = if sig % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 0..=(pi - 1) {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * r) as usize, Zucker::N, 2 * pi - 2 * r, 1);
            }
            for r in pi.max(0)..=sig {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi) as usize, Zucker::G, 2 * r - 2 * pi, 1);
            }
        }
        (Family::Three, true) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::F, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::C, 2 * r - 2 * pi - 1, 1);
            }
        }
        (Family::Three, false) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 0..=pi {
                push(t_odd(sig as usize, r as usize), (2 * r) as usize, Zucker::H, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                let c = two_pow(2 * pi + 1 - 2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi + 1) as usize, Zucker::H, 2 * r - 2 * pi - 1, 1);
            }
        }
        (Family::Four, true) => {
            let sign = if (sig - 1) % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::Q, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::D, 2 * r - 2 * pi - 1, 1);
            }
        }
        (Family::Four, false) => {
            let sign = if sig % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 0..=(pi - 1) {
                push(t_odd(sig as usize, r as usize), (2 * r) as usize, Zucker::T, 2 * pi - 2 * r, 1);
            }
            for r in pi.max(0)..=sig {
                let c = two_pow(2 * pi - 2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi) as usize, Zucker::J, 2 * r - 2 * pi, 1);
            }
        }
        (Family::Five, true) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::B, 2 * pi - 2 * r + 1, 2);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::L, 2 * r - 2 * pi - 1, 2);
            }
        }
        (Family::Five, false) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 0..=pi {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * r) as usize, Zucker::D, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi + 1) as usize, Zucker::Q, 2 * r - 2 * pi - 1, 1);
            }
        }
        (Family::Six, true) => {
            let sign = if (sig - 1) % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::M, 2 * pi - 2 * r + 1, 2);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi) as usize, Zucker::M, 2 * r - 2 * pi - 1, 2);
            }
        }
        (Family::Six, false) => {
            let sign = if sig % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 0..=(pi - 1) {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * r) as usize, Zucker::P, 2 * pi - 2 * r, 1);
            }
            for r in pi.max(0)..=sig {
                let c = two_pow(-2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi) as usize, Zucker::R, 2 * r - 2 * pi, 1);
            }
        }
        (Family::Seven, true) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::G, 2 * pi - 2 * r + 2, 1);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi + 1) as usize, Zucker::N, 2 * r - 2 * pi - 2, 1);
            }
        }
        (Family::Seven, false) => {
            prefactor = Q::one() / Q::from(factorial((s - 1) as usize));
            for r in 0..=(pi - 1) {
                push(t_odd(sig as usize, r as usize), (2 * r) as usize, Zucker::J, 2 * pi - 2 * r, 1);
            }
            for r in pi.max(0)..=sig {
                let c = two_pow(2 * pi - 2 * r) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi) as usize, Zucker::T, 2 * r - 2 * pi, 1);
            }
        }
        (Family::Eight, true) => {
            let sign = if (sig - 1) % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 1..=pi {
                push(t_even(sig as usize, r as usize), (2 * r - 1) as usize, Zucker::R, 2 * pi - 2 * r + 2, 1);
            }
            for r in (pi + 1)..=sig {
                push(t_even(sig as usize, r as usize), (2 * pi + 1) as usize, Zucker::P, 2 * r - 2 * pi - 2, 1);
            }
        }
        (Family::Eight, false) => {
            let sign = if sig % 2 == 0 { Q::one() } else { -Q::one() };
            prefactor = sign / Q::from(factorial((s - 1) as usize));
            for r in 0..=pi {
                push(t_odd(sig as usize, r as usize), (2 * r) as usize, Zucker::U, 2 * pi - 2 * r + 1, 1);
            }
            for r in (pi + 1)..=sig {
                let c = two_pow(2 * pi - 2 * r + 1) * t_odd(sig as usize, r as usize);
                push(c, (2 * pi + 1) as usize, Zucker::U, 2 * r - 2 * pi - 1, 1);
            }
        }
    }
    Ok(Decomposition {
        family,
        s,
        p,
        prefactor,
        terms,
    })
}

impl Decomposition {
    /// Expand the right-hand side as an exact q-series (the independent
    /// auxiliary-series route; used to check against the defining expansion).
    pub fn to_qseries(&self, nterms: usize) -> QSeries {
        let mut acc = QSeries::zero(nterms);
        for t in &self.terms {
            let base = zucker_series(t.base, t.index, nterms)
                .derive_n(t.deriv_order)
                .v_scale(t.arg_scale as usize);
            acc = &acc + &base.scale(&t.coeff);
        }
        acc.scale(&self.prefactor)
    }

    /// Human-readable rendering, e.g.
    /// `I_8^4 = (1/5040) * [ (-36)*D^1 A_3(q^2) + ... ]`.
    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut s = format!("({})", crate::format_q(&t.coeff));
            if t.deriv_order > 0 {
                s.push_str(&format!("*D^{}", t.deriv_order));
            }
            s.push_str(&format!(" {}_{}", t.base.name(), t.index));
            s.push_str(match t.arg_scale {
                1 => "(q)",
                2 => "(q^2)",
                _ => "(q^?)",
            });
            terms.push(s);
        }
        format!(
            "{}_{}^{} = ({}) * [ {} ]",
            self.family.name(),
            self.s,
            self.p,
            crate::format_q(&self.prefactor),
            terms.join(" + ")
        )
    }
}

// ---------------------------------------------------------------------------
// Lowering to quasimodular polynomials
// ---------------------------------------------------------------------------

/// One lowered term. Its value at a point `z` is
/// `coeff · ( arg_scale^{deriv_order} · (D^{deriv_order} poly)(arg_scale·z + shift/4)
///           + constant_part )`,
/// where `shift ∈ {-1, 0, +1}`. The `arg_scale^{deriv}` factor and the
/// `1/arg_scale^{deriv}` folded into `coeff` cancel; they are kept separate so
/// that the stored coefficient matches the substitute-then-differentiate
/// convention.
#[derive(Clone)]
pub struct QMTerm {
    pub coeff: KElem,
    pub deriv_order: usize,
    pub poly: QMPoly,
    pub arg_scale: Q,
    pub shift: i8,
    pub constant_part: Q,
}

/// A fully lowered decomposition (prefactor folded into the coefficients).
#[derive(Clone)]
pub struct QMDecomposition {
    pub family: Family,
    pub s: u32,
    pub p: u32,
    pub terms: Vec<QMTerm>,
}

/// A bridged base series: `series = constant + poly` as q-series.
struct Bridge {
    constant: Q,
    poly: QMPoly,
}

/// `A_m = B_{m+1}/(2(m+1)) · (1 - E_{m+1})`, level 1, odd `m`.
fn a_bridge(m: u32) -> Result<Bridge> {
    assert!(m % 2 == 1, "A-bridge needs an odd index");
    let k = (m + 1) as usize;
    let b = bernoulli(k) / Q::from(BigInt::from(2 * k as u64));
    let poly = ramanujan_e(k)?.scale(&-b.clone());
    Ok(Bridge { constant: b, poly })
}

/// `G_m = E_{m+1}^{1,χ} + B_{m+1,χ}/(2(m+1))`, level 4, even `m`.
fn g_bridge(m: u32) -> Result<Bridge> {
    assert!(m % 2 == 0, "G-bridge needs an even index");
    let k = (m + 1) as usize;
    let c = bernoulli_chi4(k) / Q::from(BigInt::from(2 * k as u64));
    Ok(Bridge {
        constant: c,
        poly: twisted_eisen_poly(k, false)?,
    })
}

/// `N_m = E_{m+1}^{χ,1}` for even `m ≥ 2`; `N_0 = E_1^{χ,1} - 1/4`.
fn n_bridge(m: u32) -> Result<Bridge> {
    assert!(m % 2 == 0, "N-bridge needs an even index");
    let k = (m + 1) as usize;
    let constant = if m == 0 {
        Q::new(BigInt::from(-1), BigInt::from(4))
    } else {
        Q::zero()
    };
    Ok(Bridge {
        constant,
        poly: twisted_eisen_poly(k, true)?,
    })
}

/// A piece of a reduced auxiliary series: `piece_coeff · Base_m(q^{scale})`,
/// possibly with a `±1/4` shift of the argument (for the χ-twist).
struct Piece {
    coeff: KElem,
    scale: Q,
    shift: i8,
    kind: BridgeKind,
}

#[derive(Clone, Copy, PartialEq)]
enum BridgeKind {
    A,
    G,
    N,
}

/// Express `X_m(q^c)` as bridged pieces.
fn zucker_pieces(kind: Zucker, m: u32, c: &Q) -> Vec<Piece> {
    let k1 = |co: Q, scale: Q, kind: BridgeKind| Piece {
        coeff: KElem::from_q(co),
        scale,
        shift: 0,
        kind,
    };
    let two = Q::from(BigInt::from(2));
    let c2 = c * &two;
    let c4 = &c2 * &two;
    let ch = c / &two;
    let p = |e: i64| q_pow(&two, e);
    let mi = m as i64;
    match kind {
        Zucker::A => vec![k1(Q::one(), c.clone(), BridgeKind::A)],
        Zucker::B => vec![
            k1(Q::one(), c.clone(), BridgeKind::A),
            k1(-p(mi + 1), c2, BridgeKind::A),
        ],
        Zucker::C => vec![
            k1(Q::one(), c.clone(), BridgeKind::A),
            k1(-Q::one(), c2, BridgeKind::A),
        ],
        Zucker::D => vec![
            k1(p(mi + 1), c4, BridgeKind::A),
            k1(-(p(mi + 1) + Q::one()), c2, BridgeKind::A),
            k1(Q::one(), c.clone(), BridgeKind::A),
        ],
        Zucker::F => vec![
            k1(Q::one(), c.clone(), BridgeKind::A),
            k1(-p(mi), c2, BridgeKind::A),
        ],
        Zucker::H => vec![
            k1(p(mi), c2, BridgeKind::A),
            k1(-(p(mi) + Q::one()), c.clone(), BridgeKind::A),
            k1(Q::one(), ch, BridgeKind::A),
        ],
        Zucker::L => vec![
            k1(Q::one(), c.clone(), BridgeKind::A),
            k1(-two.clone(), c2, BridgeKind::A),
        ],
        Zucker::M => vec![
            k1(p(mi + 2), c4, BridgeKind::A),
            k1(-(p(mi + 1) + two.clone()), c2, BridgeKind::A),
            k1(Q::one(), c.clone(), BridgeKind::A),
        ],
        Zucker::Q => vec![
            k1(p(mi + 1), c4, BridgeKind::A),
            k1(-(p(mi) + two.clone()), c2, BridgeKind::A),
            k1(Q::one(), c.clone(), BridgeKind::A),
        ],
        Zucker::U => {
            // U_m(q^c) = (A_m ⊗ χ)(q^{c/2})
            //          = (1/2i) [A_m(w + 1/4) - A_m(w - 1/4)], w = (c/2)·z
            let half_over_i = KElem::i().scale(&Q::new(BigInt::from(-1), BigInt::from(2)));
            vec![
                Piece {
                    coeff: half_over_i.clone(),
                    scale: ch.clone(),
                    shift: 1,
                    kind: BridgeKind::A,
                },
                Piece {
                    coeff: -&half_over_i,
                    scale: ch,
                    shift: -1,
                    kind: BridgeKind::A,
                },
            ]
        }
        Zucker::G => vec![k1(Q::one(), c.clone(), BridgeKind::G)],
        Zucker::N => vec![k1(Q::one(), c.clone(), BridgeKind::N)],
        Zucker::J => vec![
            k1(Q::one(), ch, BridgeKind::G),
            k1(-Q::one(), c.clone(), BridgeKind::G),
        ],
        Zucker::P => vec![
            k1(Q::one(), c.clone(), BridgeKind::N),
            k1(-p(mi + 1), c2, BridgeKind::N),
        ],
        Zucker::R => vec![
            k1(Q::one(), c.clone(), BridgeKind::G),
            k1(-two.clone(), c2, BridgeKind::G),
        ],
        Zucker::T => vec![
            k1(Q::one(), ch, BridgeKind::N),
            k1(-p(mi), c.clone(), BridgeKind::N),
        ],
    }
}

/// Lower a decomposition to quasimodular-generator terms.
pub fn lower_to_qm(d: &Decomposition) -> Result<QMDecomposition> {
    let mut terms = Vec::new();
    for t in &d.terms {
        let c = Q::from(BigInt::from(t.arg_scale));
        let pieces = zucker_pieces(t.base, t.index, &c);
        for piece in pieces {
            let bridge = match piece.kind {
                BridgeKind::A => a_bridge(t.index)?,
                BridgeKind::G => g_bridge(t.index)?,
                BridgeKind::N => n_bridge(t.index)?,
            };
            // The decomposition derives before substituting q -> q^c, so a
            // reduction piece at relative scale u = piece.scale/c picks up a
            // chain-rule factor u^j; rewriting as
            // coeff * piece.scale^j * (D^j P)(q^piece.scale) leaves 1/c^j.
            let inv_scale_pow = q_pow(&c, -(t.deriv_order as i64));
            let coeff = piece
                .coeff
                .scale(&(&t.coeff * &d.prefactor * inv_scale_pow));
            let constant_part = if t.deriv_order == 0 {
                bridge.constant
            } else {
                Q::zero()
            };
            terms.push(QMTerm {
                coeff,
                deriv_order: t.deriv_order,
                poly: bridge.poly,
                arg_scale: piece.scale,
                shift: piece.shift,
                constant_part,
            });
        }
    }
    Ok(QMDecomposition {
        family: d.family,
        s: d.s,
        p: d.p,
        terms,
    })
}

impl QMDecomposition {
    /// Expand the lowered form as an exact q-series. Shifted (`±1/4`) terms
    /// are required to come in conjugate pairs realizing the χ-twist; they
    /// are combined via the coefficient-wise twist.
    pub fn to_qseries(&self, nterms: usize) -> QSeries {
        // work at doubled length: scales < 1 shrink exponents
        let work = 2 * nterms;
        let mut acc = QSeries::zero(work);
        let mut used = vec![false; self.terms.len()];
        for (i, t) in self.terms.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let base = t
                .poly
                .to_qseries(work)
                .derive_n(t.deriv_order)
                .scale(&q_pow(&t.arg_scale, t.deriv_order as i64));
            match t.shift {
                0 => {
                    let coeff = t
                        .coeff
                        .as_q()
                        .expect("unshifted lowered terms have rational coefficients");
                    let val = &base.v_scale_q(&t.arg_scale)
                        + &QSeries::constant(t.constant_part.clone(), work);
                    acc = &acc + &val.scale(&coeff);
                }
                sh => {
                    // find the partner with the opposite shift
                    let j = self
                        .terms
                        .iter()
                        .enumerate()
                        .position(|(j, u)| {
                            !used[j]
                                && u.shift == -sh
                                && u.deriv_order == t.deriv_order
                                && u.arg_scale == t.arg_scale
                                && u.poly == t.poly
                                && u.coeff == -&t.coeff
                        })
                        .expect("shifted terms must come in conjugate pairs");
                    used[j] = true;
                    // c₊ f(w+1/4) - c₊ f(w-1/4) = (2i c₊) · (f ⊗ χ)(w),
                    // with c₊ the coefficient of the +1/4 term
                    let c_plus = if sh > 0 { &t.coeff } else { &self.terms[j].coeff };
                    let factor = (&KElem::i().scale(&Q::from(BigInt::from(2))) * c_plus)
                        .as_q()
                        .expect("twist pair weights are purely imaginary");
                    let val = base.twist_chi4().v_scale_q(&t.arg_scale);
                    acc = &acc + &val.scale(&factor);
                }
            }
        }
        acc.truncated(nterms)
    }

    /// The same value seen through the substitution `q ↦ q²`: every argument
    /// scale doubles and each coefficient absorbs the inverse chain-rule
    /// power `2^{-deriv_order}`, so evaluating the result at `z/2` reproduces
    /// this decomposition's value at `z`, and its q-series is this one's with
    /// all exponents doubled.
    pub fn v2_rescale(&self) -> QMDecomposition {
        let two = Q::from(BigInt::from(2));
        let terms = self
            .terms
            .iter()
            .map(|t| QMTerm {
                coeff: t.coeff.scale(&crate::q_pow(&two, -(t.deriv_order as i64))),
                deriv_order: t.deriv_order,
                poly: t.poly.clone(),
                arg_scale: &t.arg_scale * &two,
                shift: t.shift,
                constant_part: t.constant_part.clone(),
            })
            .collect();
        QMDecomposition {
            family: self.family,
            s: self.s,
            p: self.p,
            terms,
        }
    }
}


#[cfg(test)]
mod coverage_probe {
    use super::*;
    use crate::qseries::Family;

    #[test]
    #[ignore]
    fn print_required_points() {
        use std::collections::BTreeSet;
        let mut by_family: std::collections::BTreeMap<String, BTreeSet<String>> = Default::default();
        for f in Family::ALL {
            for s in 1..=5u32 {
                for p in 0..=5u32 {
                    if !admissible(f, s, p) {
                        continue;
                    }
                    let d = decompose_roman(f, s, p).unwrap();
                    let qm = lower_to_qm(&d).unwrap();
                    for t in &qm.terms {
                        let lv = format!("{:?}", t.poly.level);
                        by_family
                            .entry(format!("{} {}", f.name(), if s % 2 == 0 { "even" } else { "odd" }))
                            .or_default()
                            .insert(format!("lvl={lv} scale={} shift={}", crate::format_q(&t.arg_scale), t.shift));
                    }
                }
            }
        }
        for (k, v) in by_family {
            println!("{k}:");
            for e in v {
                println!("   {e}");
            }
        }
    }
}
