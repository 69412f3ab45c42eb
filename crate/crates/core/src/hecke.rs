//! Hecke operators on q-expansions and transformation polynomials.
//!
//! A weight-k form `f` on `Γ₀(N)` has, for `n` coprime to `N`, a monic
//! degree-`ψ(n)` polynomial whose roots are the coset transforms of `f`; its
//! coefficients are modular forms computable by a recurrence driven by the
//! modified Hecke operators `T_n* = Σ_{d²|n} μ(d) d^{k−2} T_{n/d²}`. This
//! module implements the operators on exact q-series, the coefficient
//! recurrence with generator recognition, the `Φ`/`Ψ` rescaling, the special
//! weight-2 cubic built from explicit coset roots of `2E₂(2z) − E₂(z)`, and a
//! substitution check of the two quadratic polynomials satisfied by `G(2z)`
//! and `H(2z)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::qseries::{eisenstein, gen_g, gen_h, QSeries};
use crate::quasimod::{express_in_generators, Level, QMPoly};
use crate::tables::chi4;
use crate::{q_pow, Error, Q, Result};

/// Dirichlet character for the Hecke action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Character {
    Trivial,
    Chi4,
}

impl Character {
    pub fn value(self, d: u32) -> i64 {
        match self {
            Character::Trivial => 1,
            Character::Chi4 => chi4(d as i64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeVariant {
    /// The classical operator `T_n`.
    T,
    /// `T_n* = Σ_{d²|n} μ(d) d^{k−2} T_{n/d²}`.
    TStar,
}

fn mobius(n: u32) -> i64 {
    let mut n = n;
    let mut mu = 1i64;
    let mut p = 2u32;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn qlen_of(f: &QSeries) -> usize {
    f.len().div_ceil(2)
}

/// Apply a Hecke operator to a q-integral series.
/// `a_m(T_n f) = Σ_{d | gcd(n,m)} χ(d) d^{k−1} a_{nm/d²}` (with `gcd(n,0)=n`),
/// which extends the prime rule `a_m(T_p f) = a_{mp} + χ(p) p^{k−1} a_{m/p}`
/// multiplicatively. Errors if `f` is too short for the requested output.
pub fn hecke_t(
    f: &QSeries,
    n: u32,
    k: u32,
    character: Character,
    variant: HeckeVariant,
    out_qterms: usize,
) -> Result<QSeries> {
    assert!(n >= 1);
    match variant {
        HeckeVariant::T => {
            let need = n as usize * (out_qterms.max(1) - 1) + 1;
            if qlen_of(f) < need {
                return Err(Error::Invalid(format!(
                    "series has {} q-terms but T_{n} needs {need} to produce {out_qterms}",
                    qlen_of(f)
                )));
            }
            for j in (1..f.len()).step_by(2) {
                if !f.coeff_w(j).is_zero() {
                    return Err(Error::Invalid(
                        "Hecke operators act on integer-exponent q-series only".into(),
                    ));
                }
            }
            let mut out = vec![Q::zero(); 2 * out_qterms - 1];
            for m in 0..out_qterms {
                let mut acc = Q::zero();
                for d in 1..=n {
                    if n % d != 0 {
                        continue;
                    }
                    if m != 0 && (m as u32) % d != 0 {
                        continue;
                    }
                    let chi = character.value(d);
                    if chi == 0 {
                        continue;
                    }
                    let weight_factor = Q::from(BigInt::from(chi))
                        * q_pow(&Q::from(BigInt::from(d)), (k as i64) - 1);
                    let idx = (n as usize) * m / (d as usize * d as usize);
                    acc += weight_factor * f.coeff_q(idx);
                }
                out[2 * m] = acc;
            }
            Ok(QSeries::from_coeffs(out))
        }
        HeckeVariant::TStar => {
            let mut acc: Option<QSeries> = None;
            let mut d = 1u32;
            while d * d <= n {
                if n % (d * d) == 0 {
                    let mu = mobius(d);
                    if mu != 0 {
                        let part = hecke_t(f, n / (d * d), k, character, HeckeVariant::T, out_qterms)?;
                        let w = Q::from(BigInt::from(mu))
                            * q_pow(&Q::from(BigInt::from(d)), (k as i64) - 2);
                        let part = part.scale(&w);
                        acc = Some(match acc {
                            None => part,
                            Some(a) => &a + &part,
                        });
                    }
                }
                d += 1;
            }
            Ok(acc.expect("d=1 always contributes"))
        }
    }
}

/// The monic polynomial `X^d + a_1 X^{d−1} + … + a_d` satisfied by the coset
/// transforms of a form, with coefficients recognized as generator
/// polynomials.
#[derive(Clone, Debug)]
pub struct TransformationPolynomial {
    pub n: u32,
    pub k: u32,
    pub degree: u32,
    /// `coeffs[j]` is `a_j`; `coeffs[0] = 1`.
    pub coeffs: Vec<QMPoly>,
}

impl TransformationPolynomial {
    /// Substitute a q-series for `X` and expand the coefficients; returns the
    /// residual series (zero iff the argument is a root).
    pub fn eval_at_series(&self, x: &QSeries, nterms: usize) -> QSeries {
        // Horner from the top: (…(a₀·x + a₁)·x + …)·x + a_d
        let mut acc = QSeries::zero(nterms);
        for j in 0..=self.degree as usize {
            acc = &acc + &self.coeffs[j].to_qseries(nterms);
            if j < self.degree as usize {
                acc = &acc * x;
            }
        }
        acc
    }

    pub fn render(&self) -> String {
        let d = self.degree as usize;
        let mut parts = vec![format!("X^{d}")];
        for j in 1..=d {
            let c = &self.coeffs[j];
            if c.is_zero() {
                continue;
            }
            let xpow = match d - j {
                0 => String::new(),
                1 => "*X".into(),
                e => format!("*X^{e}"),
            };
            parts.push(format!("({}){xpow}", c.render()));
        }
        parts.join(" + ")
    }
}

/// Degree of the transformation polynomial: `n ∏_{p|n} (1 + 1/p)`.
fn psi_degree(n: u32) -> u32 {
    let mut d = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            d = d / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        d = d / m * (m + 1);
    }
    d
}

/// Compute the transformation polynomial of a level-1 form of weight `k` by
/// the Hecke recurrence
/// `a_j = −(1/j) Σ_{r=1}^{j} n^{1−kr} T_n*(gʳ) a_{j−r}`,
/// recognizing every coefficient in the generator ring (weight `j·k`, no E₂).
pub fn psi_polynomial(g: &QMPoly, n: u32, k: u32) -> Result<TransformationPolynomial> {
    if g.level != Level::One {
        return Err(Error::Invalid(
            "the coefficient recurrence requires a form of level coprime to n".into(),
        ));
    }
    if g.homogeneous_weight() != Some(k) {
        return Err(Error::Invalid(format!(
            "form is not homogeneous of weight {k}"
        )));
    }
    let d = psi_degree(n);
    // working q-precision: enough for recognition at the top weight
    let out_q = 16 + 4 * (d as usize) * (k as usize);
    let in_q = n as usize * (out_q - 1) + 1;
    let gq = g.to_qseries(2 * in_q);
    // T_n*(g^r) for r = 1..d
    let mut tg: Vec<QSeries> = Vec::new();
    let mut gpow = gq.clone();
    for r in 1..=d {
        tg.push(hecke_t(
            &gpow,
            n,
            k * r,
            Character::Trivial,
            HeckeVariant::TStar,
            out_q,
        )?);
        if r < d {
            gpow = &gpow * &gq;
        }
    }
    let wlen = 2 * out_q - 1;
    let mut a: Vec<QSeries> = vec![QSeries::one(wlen)];
    let mut coeffs: Vec<QMPoly> = vec![QMPoly::one(Level::One)];
    for j in 1..=d {
        let mut acc = QSeries::zero(wlen);
        for r in 1..=j {
            let scalar = q_pow(&Q::from(BigInt::from(n)), 1 - (k * r) as i64);
            acc = &acc + &(&tg[(r - 1) as usize] * &a[(j - r) as usize]).scale(&scalar);
        }
        let aj = acc.scale(&(-Q::one() / Q::from(BigInt::from(j))));
        let poly = express_in_generators(&aj, Level::One, j * k, false).map_err(|e| {
            Error::Invalid(format!(
                "coefficient a_{j} not recognized in the generator ring: {e}"
            ))
        })?;
        a.push(aj);
        coeffs.push(poly);
    }
    Ok(TransformationPolynomial {
        n,
        k,
        degree: d,
        coeffs,
    })
}

/// The weight-2 cubic for `2E₂(2z) − E₂(z)`. The Hecke recurrence does not
/// apply (the form lives on `Γ₀(2)`, sharing a factor with n = 2), so the
/// polynomial is built from the explicit coset roots
/// `{2E₂(2z) − E₂(z), ½E₂(z/2) − E₂(z), ½E₂((z+1)/2) − E₂(z)}`
/// via elementary symmetric functions, then recognized in generators.
pub fn e2_cubic() -> Result<TransformationPolynomial> {
    let qn = 60usize;
    let wlen = 2 * qn;
    let e2 = eisenstein(2, wlen);
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    let r1 = &e2.v_scale(2).scale(&Q::from(BigInt::from(2))) - &e2;
    // the half-argument series needs a doubled expansion to fill the grid
    let e2_half = eisenstein(2, 2 * wlen).v_scale_q(&half).truncated(wlen);
    let r2 = &e2_half.scale(&half) - &e2;
    // E₂((z+1)/2): the z ↦ z+1 shift flips the sign of odd powers of q^{1/2}
    let e2_half_shift = QSeries::from_coeffs(
        e2_half
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect(),
    );
    let r3 = &e2_half_shift.scale(&half) - &e2;
    let s1 = &(&r1 + &r2) + &r3;
    let s2 = &(&(&r1 * &r2) + &(&r1 * &r3)) + &(&r2 * &r3);
    let s3 = &(&r1 * &r2) * &r3;
    if !s1.is_zero_series() {
        return Err(Error::Invalid(
            "coset-root sum of the weight-2 cubic is not zero".into(),
        ));
    }
    let a2 = express_in_generators(&s2, Level::One, 4, false)?;
    let a3 = express_in_generators(&s3.scale(&-Q::one()), Level::One, 6, false)?;
    Ok(TransformationPolynomial {
        n: 2,
        k: 2,
        degree: 3,
        coeffs: vec![QMPoly::one(Level::One), QMPoly::zero(Level::One), a2, a3],
    })
}

/// Rescale `Ψ ↦ Φ`: `b_j = χʲ(n) n^{kj/2} a_j` (trivial character here).
pub fn phi_from_psi(psi: &TransformationPolynomial) -> Result<TransformationPolynomial> {
    scale_coeffs(psi, 1)
}

/// Inverse rescaling `Φ ↦ Ψ`.
pub fn psi_from_phi(phi: &TransformationPolynomial) -> Result<TransformationPolynomial> {
    scale_coeffs(phi, -1)
}

fn scale_coeffs(p: &TransformationPolynomial, dir: i64) -> Result<TransformationPolynomial> {
    let mut coeffs = Vec::with_capacity(p.coeffs.len());
    for (j, c) in p.coeffs.iter().enumerate() {
        let e = (p.k as i64) * (j as i64);
        if e % 2 != 0 {
            return Err(Error::Invalid(
                "half-integral rescaling power; polynomial weights must be even".into(),
            ));
        }
        let f = q_pow(&Q::from(BigInt::from(p.n)), dir * e / 2);
        coeffs.push(c.scale(&f));
    }
    Ok(TransformationPolynomial {
        n: p.n,
        k: p.k,
        degree: p.degree,
        coeffs,
    })
}

/// Check, as exact q-series to `n_qterms`, that `G(2z)` satisfies
/// `X² − G(z)X + 4H(z)` and `H(2z)` satisfies
/// `X² + (−G(z)²/16 + H(z)/2)X + H(z)²/16`.
/// These quadratics live on `Γ₀(4)` where the coprimality hypothesis of the
/// coefficient recurrence fails, so they are verified rather than derived.
pub fn verify_level4_psi(n_qterms: usize) -> Result<()> {
    let wlen = 2 * n_qterms;
    let g = gen_g(wlen);
    let h = gen_h(wlen);
    let g2 = g.v_scale(2).truncated(wlen);
    let h2 = h.v_scale(2).truncated(wlen);
    let four = Q::from(BigInt::from(4));
    let resid_g = &(&(&g2 * &g2) - &(&g * &g2)) + &h.scale(&four);
    if let Some(w) = resid_g.order() {
        return Err(Error::Invalid(format!(
            "G-quadratic residual begins at q^{}",
            w / 2
        )));
    }
    let sixteenth = Q::new(BigInt::from(1), BigInt::from(16));
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    let mid = &h.scale(&half) - &(&g * &g).scale(&sixteenth);
    let resid_h = &(&(&h2 * &h2) + &(&mid * &h2)) + &(&h * &h).scale(&sixteenth);
    if let Some(w) = resid_h.order() {
        return Err(Error::Invalid(format!(
            "H-quadratic residual begins at q^{}",
            w / 2
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasimod::ramanujan_e;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn eisenstein_eigenvalues() {
        let n = 40;
        let e4 = eisenstein(4, 4 * n);
        let t2 = hecke_t(&e4, 2, 4, Character::Trivial, HeckeVariant::T, n).unwrap();
        assert!(t2.agrees_with(&e4.scale(&q(9, 1)), 2 * n - 1));
        let e8 = eisenstein(8, 4 * n);
        let t2 = hecke_t(&e8, 2, 8, Character::Trivial, HeckeVariant::T, n).unwrap();
        assert!(t2.agrees_with(&e8.scale(&q(129, 1)), 2 * n - 1));
        // squarefree n: T* = T
        let ts = hecke_t(&e4, 2, 4, Character::Trivial, HeckeVariant::TStar, n).unwrap();
        let t = hecke_t(&e4, 2, 4, Character::Trivial, HeckeVariant::T, n).unwrap();
        assert!(ts.agrees_with(&t, 2 * n - 1));
        // T₄* = T₄ − 2^{k−2}: on E₄ the eigenvalue is σ₃(4) − 4 = 73 − 4 = 69
        let e4 = eisenstein(4, 16 * n);
        let ts4 = hecke_t(&e4, 4, 4, Character::Trivial, HeckeVariant::TStar, n).unwrap();
        assert!(ts4.agrees_with(&e4.scale(&q(69, 1)), 2 * n - 1));
    }

    #[test]
    fn hecke_needs_enough_terms() {
        let e4 = eisenstein(4, 20);
        assert!(hecke_t(&e4, 2, 4, Character::Trivial, HeckeVariant::T, 40).is_err());
    }

    #[test]
    fn psi2_e4_frozen_coefficients() {
        let psi = psi_polynomial(&QMPoly::e4(), 2, 4).unwrap();
        assert_eq!(psi.degree, 3);
        let e4 = QMPoly::e4();
        let e6 = QMPoly::e6();
        assert_eq!(psi.coeffs[1], e4.scale(&q(-9, 8)));
        assert_eq!(psi.coeffs[2], e4.mul(&e4).scale(&q(33, 256)));
        let a3 = e4
            .mul(&e4)
            .mul(&e4)
            .scale(&q(121, 1024))
            .add(&e6.mul(&e6).scale(&q(-125, 1024)));
        assert_eq!(psi.coeffs[3], a3);
    }

    #[test]
    fn psi2_e6_frozen_coefficients() {
        let psi = psi_polynomial(&QMPoly::e6(), 2, 6).unwrap();
        assert_eq!(psi.degree, 3);
        let e4 = QMPoly::e4();
        let e6 = QMPoly::e6();
        assert_eq!(psi.coeffs[1], e6.scale(&q(-33, 32)));
        let e4cube = e4.mul(&e4).mul(&e4);
        let a2 = e6
            .mul(&e6)
            .scale(&q(1452, 4096))
            .add(&e4cube.scale(&q(-1323, 4096)));
        assert_eq!(psi.coeffs[2], a2);
        let a3 = e6
            .mul(&e6)
            .mul(&e6)
            .scale(&q(-1331, 32768))
            .add(&e6.mul(&e4cube).scale(&q(1323, 32768)));
        assert_eq!(psi.coeffs[3], a3);
    }

    #[test]
    fn e2_cubic_frozen_coefficients() {
        let psi = e2_cubic().unwrap();
        assert_eq!(psi.degree, 3);
        assert!(psi.coeffs[1].is_zero());
        assert_eq!(psi.coeffs[2], QMPoly::e4().scale(&q(-3, 4)));
        assert_eq!(psi.coeffs[3], QMPoly::e6().scale(&q(-1, 4)));
    }

    #[test]
    fn e2_cubic_annihilates_its_integral_root() {
        // 2E₂(2z) − E₂(z) is a root of X³ − (3/4)E₄X − (1/4)E₆
        let n = 40;
        let wlen = 2 * n;
        let e2 = eisenstein(2, wlen);
        let r1 = &e2.v_scale(2).scale(&q(2, 1)) - &e2;
        let resid = &(&(&r1 * &r1) * &r1)
            - &(&(&eisenstein(4, wlen).scale(&q(3, 4)) * &r1)
                + &eisenstein(6, wlen).scale(&q(1, 4)));
        assert!(resid.is_zero_series());
    }

    #[test]
    fn newton_consistency_of_power_sums() {
        // Power sums recovered from Ψ's coefficients by Newton's identities
        // match n^{1−kr} T_n*(gʳ) as q-series, 30 q-terms deep.
        let qn = 30usize;
        let wlen = 2 * qn;
        for (g, k) in [(QMPoly::e4(), 4u32), (QMPoly::e6(), 6u32)] {
            let psi = psi_polynomial(&g, 2, k).unwrap();
            let d = psi.degree as usize;
            // e_j = (−1)^j a_j as q-series
            let e: Vec<QSeries> = (0..=d)
                .map(|j| {
                    let s = psi.coeffs[j].to_qseries(wlen);
                    if j % 2 == 1 {
                        s.scale(&-Q::one())
                    } else {
                        s
                    }
                })
                .collect();
            let gq = g.to_qseries(2 * (2 * qn));
            let mut gpow = gq.clone();
            let mut p: Vec<QSeries> = Vec::new();
            for r in 1..=d {
                // Newton: p_r = e₁p_{r−1} − e₂p_{r−2} + … + (−1)^{r−1} r e_r
                let mut acc = QSeries::zero(wlen);
                for i in 1..r {
                    let sgn = if (i - 1) % 2 == 0 { Q::one() } else { -Q::one() };
                    acc = &acc + &(&e[i] * &p[r - i - 1]).scale(&sgn);
                }
                let sgn = if (r - 1) % 2 == 0 { Q::one() } else { -Q::one() };
                acc = &acc + &e[r].scale(&(sgn * Q::from(BigInt::from(r))));
                let claimed = hecke_t(&gpow, 2, k * r as u32, Character::Trivial, HeckeVariant::TStar, qn)
                    .unwrap()
                    .scale(&q_pow(&q(2, 1), 1 - (k as i64) * (r as i64)));
                assert!(
                    acc.agrees_with(&claimed, 2 * qn - 1),
                    "power sum p_{r} mismatch at weight {k}"
                );
                p.push(acc);
                if r < d {
                    gpow = &gpow * &gq;
                }
            }
        }
    }

    #[test]
    fn phi_rescaling_and_round_trip() {
        let psi = psi_polynomial(&QMPoly::e4(), 2, 4).unwrap();
        let phi = phi_from_psi(&psi).unwrap();
        // b₁ = 2^{k/2} a₁ = 4·(−9/8) E₄ = −(9/2) E₄
        assert_eq!(phi.coeffs[1], QMPoly::e4().scale(&q(-9, 2)));
        let back = psi_from_phi(&phi).unwrap();
        for j in 0..=3 {
            assert_eq!(back.coeffs[j], psi.coeffs[j]);
        }
    }

    #[test]
    fn level4_quadratics_hold() {
        verify_level4_psi(50).unwrap();
    }

    #[test]
    fn corrupted_level4_constant_fails_at_q1() {
        // replacing 4H by 5H must break the G-quadratic already at q¹
        let n = 50;
        let wlen = 2 * n;
        let g = gen_g(wlen);
        let h = gen_h(wlen);
        let g2 = g.v_scale(2).truncated(wlen);
        let resid = &(&(&g2 * &g2) - &(&g * &g2)) + &h.scale(&q(5, 1));
        assert_eq!(resid.order(), Some(2), "first failing coefficient at q^1");
    }

    #[test]
    fn psi_rejects_bad_input() {
        // inhomogeneous form
        let bad = QMPoly::e4().add(&QMPoly::one(Level::One));
        assert!(psi_polynomial(&bad, 2, 4).is_err());
        // wrong claimed weight
        assert!(psi_polynomial(&QMPoly::e4(), 2, 6).is_err());
    }

    #[test]
    fn eval_at_series_detects_roots() {
        // E₄(2z) is a root of Ψ₂^{E₄|V₂} after the Φ-rescaling of the
        // variable… more directly: Φ's roots include 2^k·(coset values); here
        // just check the residual machinery: Ψ(E₄(2z)) with the 2^{-k} scaled
        // variable convention vanishes, i.e. f(2z) is a root of Ψ itself.
        let n = 30;
        let wlen = 2 * n;
        let psi = psi_polynomial(&QMPoly::e4(), 2, 4).unwrap();
        let root = ramanujan_e(4).unwrap().to_qseries(2 * wlen).v_scale(2).truncated(wlen);
        let resid = psi.eval_at_series(&root, wlen);
        assert!(resid.is_zero_series(), "E₄(2z) must annihilate Ψ₂");
        let not_root = ramanujan_e(4).unwrap().to_qseries(wlen);
        assert!(!psi.eval_at_series(&not_root, wlen).is_zero_series());
    }
}
