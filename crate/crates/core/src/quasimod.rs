//! Polynomials in quasimodular generators and their derivation calculus.
//!
//! Two generator systems are supported:
//! - level 1: `E2, E4, E6` (weights 2, 4, 6), with
//!   `D E2 = (E2² - E4)/12`, `D E4 = (E2 E4 - E6)/3`, `D E6 = (E2 E6 - E4²)/2`;
//! - level 4: `E2, G, H` (weights 2, 1, 2), where `G = θ₃²` and
//!   `H = Σ_{n odd} σ₁(n) qⁿ` generate the even ring `⊕ M_k(Γ₀(4), χ^k)`, with
//!   `D E2 = E2²/12 - G⁴/12 - (56/3) G²H - (64/3) H²`,
//!   `D G = G E2/12 - G³/12 + (20/3) G H`,
//!   `D H = H E2/6 + (5/6) G²H - (8/3) H²`.
//!
//! The same derivation is also realized on the quotient coordinates
//! `x = E4 E2^{-2}, y = E6 E2^{-3}` (level 1) and
//! `x = G E2^{-1/2}, y = H E2^{-1}` (level 4) by first-order differential
//! operators `∂_k`; the two

//! descriptions are cross-checked against each other in the tests.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use crate::qseries::{eisenstein, eisenstein_twisted, gen_g, gen_h, QSeries};
use crate::{Error, Q, Result};

/// Generator system selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    One,
    Four,
}

impl Level {
    /// Weight of the monomial `g1^a g2^b g3^c` where `(g1,g2,g3)` is
    /// `(E2,E4,E6)` at level 1 and `(E2,G,H)` at level 4.
    pub fn monomial_weight(self, m: (u32, u32, u32)) -> u32 {
        match self {
            Level::One => 2 * m.0 + 4 * m.1 + 6 * m.2,
            Level::Four => 2 * m.0 + m.1 + 2 * m.2,
        }
    }

    pub fn generator_names(self) -> [&'static str; 3] {
        match self {
            Level::One => ["E2", "E4", "E6"],
            Level::Four => ["E2", "G", "H"],
        }
    }
}

/// A polynomial in the three generators of one level, exact rational
/// coefficients. Keys are exponent triples `(a, b, c)`.
#[derive(Clone, PartialEq)]
pub struct QMPoly {
    pub level: Level,
    terms: BTreeMap<(u32, u32, u32), Q>,
}

impl QMPoly {
    pub fn zero(level: Level) -> Self {
        QMPoly {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(level: Level, c: Q) -> Self {
        let mut p = Self::zero(level);
        if !c.is_zero() {
            p.terms.insert((0, 0, 0), c);
        }
        p
    }

    pub fn one(level: Level) -> Self {
        Self::constant(level, Q::one())
    }

    pub fn monomial(level: Level, m: (u32, u32, u32), c: Q) -> Self {
        let mut p = Self::zero(level);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The generator `E2` (either level).
    pub fn e2(level: Level) -> Self {
        Self::monomial(level, (1, 0, 0), Q::one())
    }

    /// Level-1 `E4`.
    pub fn e4() -> Self {
        Self::monomial(Level::One, (0, 1, 0), Q::one())
    }

    /// Level-1 `E6`.
    pub fn e6() -> Self {
        Self::monomial(Level::One, (0, 0, 1), Q::one())
    }

    /// Level-4 `G`.
    pub fn g() -> Self {
        Self::monomial(Level::Four, (0, 1, 0), Q::one())
    }

    /// Level-4 `H`.
    pub fn h() -> Self {
        Self::monomial(Level::Four, (0, 0, 1), Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: (u32, u32, u32)) -> Q {
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    fn insert_add(&mut self, m: (u32, u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &QMPoly) -> QMPoly {
        assert_eq!(self.level, other.level, "mixed-level arithmetic");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> QMPoly {
        QMPoly {
            level: self.level,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &QMPoly) -> QMPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QMPoly) -> QMPoly {
        assert_eq!(self.level, other.level, "mixed-level arithmetic");
        let mut out = QMPoly::zero(self.level);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_add((m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &Q) -> QMPoly {
        if s.is_zero() {
            return QMPoly::zero(self.level);
        }
        QMPoly {
            level: self.level,
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> QMPoly {
        let mut acc = QMPoly::one(self.level);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The common weight of all monomials, if homogeneous.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let w = self.level.monomial_weight(*it.next()?);
        for m in it {
            if self.level.monomial_weight(*m) != w {
                return None;
            }
        }
        Some(w)
    }

    /// Derivative of one generator as a polynomial.
    fn gen_derivative(level: Level, idx: usize) -> QMPoly {
        let q = |n: i64, d: i64| Q::new(BigInt::from(n), BigInt::from(d));
        match (level, idx) {
            (Level::One, 0) => {
                // DE2 = (E2² - E4)/12
                QMPoly::monomial(level, (2, 0, 0), q(1, 12))
                    .add(&QMPoly::monomial(level, (0, 1, 0), q(-1, 12)))
            }
            (Level::One, 1) => {
                // DE4 = (E2 E4 - E6)/3
                QMPoly::monomial(level, (1, 1, 0), q(1, 3))
                    .add(&QMPoly::monomial(level, (0, 0, 1), q(-1, 3)))
            }
            (Level::One, 2) => {
                // DE6 = (E2 E6 - E4²)/2
                QMPoly::monomial(level, (1, 0, 1), q(1, 2))
                    .add(&QMPoly::monomial(level, (0, 2, 0), q(-1, 2)))
            }
            (Level::Four, 0) => {
                // DE2 = E2²/12 - G⁴/12 - (56/3) G²H - (64/3) H²
                QMPoly::monomial(level, (2, 0, 0), q(1, 12))
                    .add(&QMPoly::monomial(level, (0, 4, 0), q(-1, 12)))
                    .add(&QMPoly::monomial(level, (0, 2, 1), q(-56, 3)))
                    .add(&QMPoly::monomial(level, (0, 0, 2), q(-64, 3)))
            }
            (Level::Four, 1) => {
                // DG = G E2/12 - G³/12 + (20/3) G H
                QMPoly::monomial(level, (1, 1, 0), q(1, 12))
                    .add(&QMPoly::monomial(level, (0, 3, 0), q(-1, 12)))
                    .add(&QMPoly::monomial(level, (0, 1, 1), q(20, 3)))
            }
            (Level::Four, 2) => {
                // DH = H E2/6 + (5/6) G²H - (8/3) H²
                QMPoly::monomial(level, (1, 0, 1), q(1, 6))
                    .add(&QMPoly::monomial(level, (0, 2, 1), q(5, 6)))
                    .add(&QMPoly::monomial(level, (0, 0, 2), q(-8, 3)))
            }
            _ => unreachable!(),
        }
    }

    /// The derivation `D = q d/dq` via the closed system on the generators.
    pub fn derive(&self) -> QMPoly {
        let mut out = QMPoly::zero(self.level);
        let d0 = Self::gen_derivative(self.level, 0);
        let d1 = Self::gen_derivative(self.level, 1);
        let d2 = Self::gen_derivative(self.level, 2);
        for (&(a, b, c), coef) in &self.terms {
            // product rule on g1^a g2^b g3^c
            let parts = [(a, &d0, (1u32, 0u32, 0u32)), (b, &d1, (0, 1, 0)), (c, &d2, (0, 0, 1))];
            for (e, dgen, unit) in parts {
                if e == 0 {
                    continue;
                }
                let lowered = (a - unit.0, b - unit.1, c - unit.2);
                let base = QMPoly::monomial(self.level, lowered, coef * Q::from(BigInt::from(e)));
                out = out.add(&base.mul(dgen));
            }
        }
        out
    }

    pub fn derive_n(&self, n: usize) -> QMPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derive();
        }
        p
    }

    /// The weight-`k` Serre derivative `ϑf = Df - (k/12) E2 f`; requires a
    /// homogeneous input. Maps modular forms to modular forms (no `E2`).
    pub fn serre_theta(&self) -> Result<QMPoly> {
        let k = self.homogeneous_weight().ok_or_else(|| {
            Error::Invalid("serre_theta requires a homogeneous polynomial".into())
        })?;
        let e2f = QMPoly::e2(self.level).mul(self);
        Ok(self
            .derive()
            .sub(&e2f.scale(&Q::new(BigInt::from(k), BigInt::from(12)))))
    }

    /// Expand to an exact q-series with `nterms` w-coefficients.
    pub fn to_qseries(&self, nterms: usize) -> QSeries {
        let gens: [QSeries; 3] = match self.level {
            Level::One => [
                eisenstein(2, nterms),
                eisenstein(4, nterms),
                eisenstein(6, nterms),
            ],
            Level::Four => [eisenstein(2, nterms), gen_g(nterms), gen_h(nterms)],
        };
        let mut acc = QSeries::zero(nterms);
        for (&(a, b, c), coef) in &self.terms {
            let m = &(&gens[0].pow(a) * &gens[1].pow(b)) * &gens[2].pow(c);
            acc = &acc + &m.scale(coef);
        }
        acc
    }

    /// Render with explicit generator names, canonical monomial order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = self.level.generator_names();
        let mut parts = Vec::new();
        for (&(a, b, c), coef) in self.terms.iter().rev() {
            let mut factors = vec![format!("({})", crate::format_q(coef))];
            for (e, n) in [(a, names[0]), (b, names[1]), (c, names[2])] {
                match e {
                    0 => {}
                    1 => factors.push(n.to_string()),
                    _ => factors.push(format!("{n}^{e}")),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Enumerate the exponent triples of weight `w` (quasimodular when
/// `allow_e2`, otherwise only the modular generators).
pub fn weight_basis(level: Level, w: u32, allow_e2: bool) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    let max_a = if allow_e2 { w / 2 } else { 0 };
    for a in 0..=max_a {
        let (wb, wc) = match level {
            Level::One => (4u32, 6u32),
            Level::Four => (1u32, 2u32),
        };
        let rem_after_a = match w.checked_sub(2 * a) {
            Some(r) => r,
            None => continue,
        };
        for b in 0..=(rem_after_a / wb) {
            let r = rem_after_a - wb * b;
            if r % wc == 0 {
                out.push((a, b, r / wc));
            }
        }
    }
    out
}

/// Express a q-series as a polynomial of homogeneous weight `w` in the
/// generators of `level`. `allow_e2` admits quasimodular combinations.
///
/// The linear system is taken overdetermined (`2·basis + 10` q-coefficients)
/// and every remaining row is checked, so a wrong weight or a series outside
/// the graded piece is reported as an error rather than fitted.
pub fn express_in_generators(
    target: &QSeries,
    level: Level,
    w: u32,
    allow_e2: bool,
) -> Result<QMPoly> {
    let basis = weight_basis(level, w, allow_e2);
    if basis.is_empty() {
        return Err(Error::Invalid(format!(
            "no generator monomials of weight {w} at this level"
        )));
    }
    let rows = 2 * basis.len() + 10;
    let need_w = 2 * rows; // q-coefficients 0..rows on the w-grid
    if target.len() < need_w {
        return Err(Error::Invalid(format!(
            "need {need_w} w-terms to express weight-{w} series, have {}",
            target.len()
        )));
    }
    // check the target is q-integral
    for k in (1..need_w).step_by(2) {
        if !target.coeff_w(k).is_zero() {
            return Err(Error::Invalid(
                "series with half-integral exponents cannot lie in the generator ring".into(),
            ));
        }
    }
    let cols: Vec<QSeries> = basis
        .iter()
        .map(|&m| QMPoly::monomial(level, m, Q::one()).to_qseries(need_w))
        .collect();
    // Solve the first `basis.len()` independent rows, then verify the rest.
    let n = basis.len();
    let mut aug: Vec<Vec<Q>> = Vec::new();
    let mut used_rows = Vec::new();
    let mut rank = 0usize;
    for r in 0..rows {
        if rank == n {
            break;
        }
        let mut row: Vec<Q> = cols.iter().map(|c| c.coeff_q(r)).collect();
        row.push(target.coeff_q(r));
        // try to eliminate with existing pivots; accept if it adds rank
        let mut work = aug.clone();
        work.push(row.clone());
        if matrix_rank(&work, n) > rank {
            aug.push(row);
            used_rows.push(r);
            rank += 1;
        }
    }
    if rank < n {
        return Err(Error::Invalid(format!(
            "generator monomials of weight {w} are not independent to this precision"
        )));
    }
    let mut solve = aug.clone();
    let sol = crate::field::solve_gauss(&mut solve)
        .ok_or_else(|| Error::Invalid("linear system is singular".into()))?;
    // verify all rows, not just the solved ones
    for r in 0..rows {
        let mut acc = Q::zero();
        for (j, c) in cols.iter().enumerate() {
            acc += c.coeff_q(r) * &sol[j];
        }
        if acc != target.coeff_q(r) {
            return Err(Error::Invalid(format!(
                "series is not a weight-{w} generator polynomial (mismatch at q^{r})"
            )));
        }
    }
    let mut p = QMPoly::zero(level);
    for (j, m) in basis.iter().enumerate() {
        p.insert_add(*m, sol[j].clone());
    }
    Ok(p)
}

/// Rank of the rational matrix given as rows (first `ncols` entries of each
/// row are the matrix; any extra entries are ignored).
fn matrix_rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r[..ncols].to_vec()).collect();
    let mut rank = 0;
    for col in 0..ncols {
        let piv = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        let pv = m[rank][col].clone();
        for x in m[rank].iter_mut() {
            *x /= pv.clone();
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in 0..ncols {
                    let s = &m[rank][k] * &f;
                    m[r][k] -= s;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// The level-1 Eisenstein series `E_k` as a generator polynomial: `E2` for
/// `k = 2`, and a polynomial in `E4, E6` for even `4 ≤ k ≤ 20` (computed by
/// expressing the q-expansion on the weight-`k` monomial basis, cached).
pub fn ramanujan_e(k: usize) -> Result<QMPoly> {
    if k == 2 {
        return Ok(QMPoly::e2(Level::One));
    }
    if k < 4 || k % 2 == 1 || k > 20 {
        return Err(Error::Invalid(format!(
            "ramanujan_e supports even weights 2..=20, got {k}"
        )));
    }
    static CACHE: Mutex<Option<BTreeMap<usize, QMPoly>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(BTreeMap::new);
    if let Some(p) = map.get(&k) {
        return Ok(p.clone());
    }
    let basis_len = weight_basis(Level::One, k as u32, false).len();
    let need = 2 * (2 * basis_len + 10);
    let series = eisenstein(k, need);
    let p = express_in_generators(&series, Level::One, k as u32, false)?;
    map.insert(k, p.clone());
    Ok(p)
}

/// The odd-weight twisted Eisenstein series as a level-4 generator
/// polynomial: `E_k^{1,χ}` (`phi_is_chi4 = true` side trivial-first) or
/// `E_k^{χ,1}`, for odd `k ≥ 1`. For `k = 1` both equal `G/4`.
pub fn twisted_eisen_poly(k: usize, psi_is_chi4: bool) -> Result<QMPoly> {
    if k % 2 == 0 {
        return Err(Error::Invalid("twisted Eisenstein weight must be odd".into()));
    }
    if k == 1 {
        return Ok(QMPoly::g().scale(&Q::new(BigInt::one(), BigInt::from(4))));
    }
    let basis_len = weight_basis(Level::Four, k as u32, false).len();
    let need = 2 * (2 * basis_len + 10);
    let series = eisenstein_twisted(k, psi_is_chi4, !psi_is_chi4, need);
    express_in_generators(&series, Level::Four, k as u32, false)
}

// ---------------------------------------------------------------------------
// Quotient-coordinate derivation
// ---------------------------------------------------------------------------

/// A polynomial in the quotient coordinates `(x, y)` with rational
/// coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct XYPoly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl XYPoly {
    pub fn zero() -> Self {
        XYPoly {
            terms: BTreeMap::new(),
        }
    }
    pub fn one() -> Self {
        Self::monomial(0, 0, Q::one())
    }
    pub fn monomial(i: u32, j: u32, c: Q) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((i, j), c);
        }
        p
    }
    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }
    fn insert_add(&mut self, m: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }
    pub fn add(&self, o: &XYPoly) -> XYPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(*m, c.clone());
        }
        out
    }
    pub fn mul(&self, o: &XYPoly) -> XYPoly {
        let mut out = XYPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.insert_add((m1.0 + m2.0, m1.1 + m2.1), c1 * c2);
            }
        }
        out
    }
    pub fn scale(&self, s: &Q) -> XYPoly {
        if s.is_zero() {
            return XYPoly::zero();
        }
        XYPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }
    pub fn dx(&self) -> XYPoly {
        let mut out = XYPoly::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.insert_add((i - 1, j), c * Q::from(BigInt::from(i)));
            }
        }
        out
    }
    pub fn dy(&self) -> XYPoly {
        let mut out = XYPoly::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.insert_add((i, j - 1), c * Q::from(BigInt::from(j)));
            }
        }
        out
    }

    /// Substitute the coordinate q-series for `(x, y)` and multiply by
    /// `E2^{epow2/2}` (half-integral powers allowed via the formal square
    /// root). Used to compare both derivation descriptions.
    pub fn to_qseries(&self, level: Level, epow2: i32, nterms: usize) -> QSeries {
        let e2 = eisenstein(2, nterms);
        let (x, y) = match level {
            Level::One => (
                &eisenstein(4, nterms) * &e2.inv().pow(2),
                &eisenstein(6, nterms) * &e2.inv().pow(3),
            ),
            Level::Four => {
                let e2_sqrt_inv = e2.sqrt_unit().inv();
                (
                    &gen_g(nterms) * &e2_sqrt_inv,
                    &gen_h(nterms) * &e2.inv(),
                )
            }
        };
        let mut acc = QSeries::zero(nterms);
        for (&(i, j), c) in &self.terms {
            let m = &x.pow(i) * &y.pow(j);
            acc = &acc + &m.scale(c);
        }
        // multiply by E2^{epow2/2}
        let half_steps = epow2.unsigned_abs();
        let e2_half = e2.sqrt_unit();
        let factor = e2_half.pow(half_steps);
        if epow2 >= 0 {
            &acc * &factor
        } else {
            &acc * &factor.inv()
        }
    }
}

/// The first-order operator `∂_k` realizing `D` on the quotient coordinates:
/// if `f` is homogeneous of weight `k` and `F = f · E2^{-k/2}` in `(x, y)`,
/// then `Df = E2^{k/2+1} · ∂_k F`.
pub fn partial_k(level: Level, k: i64, f: &XYPoly) -> XYPoly {
    let q = |n: i64, d: i64| Q::new(BigInt::from(n), BigInt::from(d));
    match level {
        Level::One => {
            // ∂_k = k(1-x)/24 + ((x² + x - 2y)/6) ∂x + ((xy - 2x² + y)/4) ∂y
            let scal = XYPoly::monomial(0, 0, q(k, 24)).add(&XYPoly::monomial(1, 0, q(-k, 24)));
            let cx = XYPoly::monomial(2, 0, q(1, 6))
                .add(&XYPoly::monomial(1, 0, q(1, 6)))
                .add(&XYPoly::monomial(0, 1, q(-1, 3)));
            let cy = XYPoly::monomial(1, 1, q(1, 4))
                .add(&XYPoly::monomial(2, 0, q(-1, 2)))
                .add(&XYPoly::monomial(0, 1, q(1, 4)));
            scal.mul(f).add(&cx.mul(&f.dx())).add(&cy.mul(&f.dy()))
        }
        Level::Four => {
            // ∂_k = k(-x⁴/24 - (28/3)x²y - (32/3)y² + 1/24)
            //     + (x⁵/24 + (28/3)x³y - x³/12 + (32/3)xy² + (20/3)xy + x/24) ∂x
            //     + (x⁴y/12 + (56/3)x²y² + (5/6)x²y + (64/3)y³ - (8/3)y² + y/12) ∂y
            let scal = XYPoly::monomial(4, 0, q(-k, 24))
                .add(&XYPoly::monomial(2, 1, q(-28 * k, 3)))
                .add(&XYPoly::monomial(0, 2, q(-32 * k, 3)))
                .add(&XYPoly::monomial(0, 0, q(k, 24)));
            let cx = XYPoly::monomial(5, 0, q(1, 24))
                .add(&XYPoly::monomial(3, 1, q(28, 3)))
                .add(&XYPoly::monomial(3, 0, q(-1, 12)))
                .add(&XYPoly::monomial(1, 2, q(32, 3)))
                .add(&XYPoly::monomial(1, 1, q(20, 3)))
                .add(&XYPoly::monomial(1, 0, q(1, 24)));
            let cy = XYPoly::monomial(4, 1, q(1, 12))
                .add(&XYPoly::monomial(2, 2, q(56, 3)))
                .add(&XYPoly::monomial(2, 1, q(5, 6)))
                .add(&XYPoly::monomial(0, 3, q(64, 3)))
                .add(&XYPoly::monomial(0, 2, q(-8, 3)))
                .add(&XYPoly::monomial(0, 1, q(1, 12)));
            scal.mul(f).add(&cx.mul(&f.dx())).add(&cy.mul(&f.dy()))
        }
    }
}
