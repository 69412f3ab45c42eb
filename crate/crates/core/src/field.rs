//! Exact arithmetic in the degree-8 number field `K = Q(i, 2^{1/4})`.
//!
//! Every CM value we manipulate on the Gaussian lattice chain (`i`, `2i`,
//! `i/2`, `4i`, `i/4`, `(±1+i)/4`, …) lies in this single field. Elements are
//! stored on the tower basis `t^a i^b` (`a = 0..3`, `b = 0..1`) with
//! `t = 2^{1/4}`, `t⁴ = 2`, `i² = -1`; the flat index is `a + 4b`.
//!
//! Square roots are computed by descending the tower
//! `Q ⊂ Q(√2) ⊂ Q(t) ⊂ K`: in each quadratic step `B(√d)/B`, an element
//! `a + b√d` is a square iff its norm `a² - b²d` is a square `n` in `B` and
//! `(a ± n)/2` is a square in `B` (both signs are tried), which recurses down
//! to rational square roots.
//!
//! The serialization basis is the power basis of `θ = 2^{1/4} + i`, whose
//! minimal polynomial is `x⁸ + 4x⁶ + 2x⁴ + 28x² + 1`; conversion matrices
//! between the two bases are computed once and cached.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::Q;

/// Coefficients of the minimal polynomial of `θ = 2^{1/4} + i` in ascending
/// order (degree 8, monic).
pub const THETA_MIN_POLY: [i64; 9] = [1, 0, 28, 0, 2, 0, 4, 0, 1];

/// An element of `K = Q(i, 2^{1/4})` on the tower basis `t^a i^b`
/// (flat index `a + 4b`).
#[derive(Clone, PartialEq, Eq)]
pub struct KElem {
    c: [Q; 8],
}

fn zeros() -> [Q; 8] {
    [
        Q::zero(),
        Q::zero(),
        Q::zero(),
        Q::zero(),
        Q::zero(),
        Q::zero(),
        Q::zero(),
        Q::zero(),
    ]
}

impl KElem {
    pub fn zero() -> Self {
        KElem { c: zeros() }
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(x: Q) -> Self {
        let mut c = zeros();
        c[0] = x;
        KElem { c }
    }

    pub fn from_i64(x: i64) -> Self {
        Self::from_q(Q::from(BigInt::from(x)))
    }

    /// `i`.
    pub fn i() -> Self {
        let mut c = zeros();
        c[4] = Q::one();
        KElem { c }
    }

    /// `t = 2^{1/4}`.
    pub fn t() -> Self {
        let mut c = zeros();
        c[1] = Q::one();
        KElem { c }
    }

    /// `√2 = t²`.
    pub fn sqrt2() -> Self {
        let mut c = zeros();
        c[2] = Q::one();
        KElem { c }
    }

    /// Build from the 8 tower coefficients (index `a + 4b` ↦ `t^a i^b`).
    pub fn from_tower(c: [Q; 8]) -> Self {
        KElem { c }
    }

    /// Tower coefficients (index `a + 4b` ↦ `t^a i^b`).
    pub fn tower_coeffs(&self) -> &[Q; 8] {
        &self.c
    }

    /// Rational multiples: `x + y√2` as an element.
    pub fn from_sqrt2_pair(x: Q, y: Q) -> Self {
        let mut c = zeros();
        c[0] = x;
        c[2] = y;
        KElem { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// True when the element lies in `Q` (only the constant coordinate).
    pub fn is_rational(&self) -> bool {
        self.c.iter().skip(1).all(|x| x.is_zero())
    }

    /// The rational value, if rational.
    pub fn as_q(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// True when the element is fixed by `i ↦ -i` (no imaginary coordinates).
    pub fn is_real(&self) -> bool {
        self.c[4..].iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut c = zeros();
        for (k, x) in self.c.iter().enumerate() {
            c[k] = x * s;
        }
        KElem { c }
    }

    /// Complex conjugation `i ↦ -i` (the real embedding of `t` is fixed).
    pub fn conj(&self) -> Self {
        let mut c = self.c.clone();
        for x in c[4..].iter_mut() {
            *x = -x.clone();
        }
        KElem { c }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        // Solve M_x · y = e0 where M_x is multiplication by self.
        let mut mat: Vec<[Q; 8]> = Vec::with_capacity(8);
        for j in 0..8 {
            let mut e = zeros();
            e[j] = Q::one();
            let col = self * &KElem { c: e };
            mat.push(col.c);
        }
        // mat[j] is the j-th column; build rows for elimination.
        let mut aug: Vec<Vec<Q>> = (0..8)
            .map(|r| {
                let mut row: Vec<Q> = (0..8).map(|j| mat[j][r].clone()).collect();
                row.push(if r == 0 { Q::one() } else { Q::zero() });
                row
            })
            .collect();
        let sol = solve_gauss(&mut aug).expect("field element has invertible multiplication matrix");
        let mut c = zeros();
        c.clone_from_slice(&sol[..8]);
        KElem { c }
    }

    /// Approximate complex embedding with `t ↦ 2^{1/4} > 0` (primary real
    /// branch), as `(re, im)` in `f64`. Diagnostics only.
    pub fn approx(&self) -> (f64, f64) {
        let t = 2f64.powf(0.25);
        let mut re = 0.0;
        let mut im = 0.0;
        for a in 0..4 {
            let ta = t.powi(a as i32);
            re += q_to_f64(&self.c[a]) * ta;
            im += q_to_f64(&self.c[a + 4]) * ta;
        }
        (re, im)
    }

    /// Exact square root in `K`, if one exists. The returned root is
    /// normalized: if it is real (in the `i ↦ -i` sense) its primary real
    /// embedding is nonnegative; otherwise its imaginary embedding part is
    /// positive (or zero with positive real part).
    pub fn sqrt(&self) -> Option<KElem> {
        let nested = K8::from_flat(&self.c);
        let root = nested.sqrt()?;
        let mut out = KElem { c: root.to_flat() };
        // Deterministic sign normalization via the primary embedding.
        let (re, im) = out.approx();
        let neg = if im.abs() > 1e-12 {
            im < 0.0
        } else {
            re < 0.0
        };
        if neg {
            out = -&out;
        }
        Some(out)
    }

    /// Power with integer exponent (negative via `inv`).
    pub fn powi(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = KElem::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        acc
    }

    /// Coefficients on the power basis `1, θ, …, θ⁷` of `θ = 2^{1/4} + i`.
    pub fn to_power_basis(&self) -> [Q; 8] {
        let inv = &power_basis_matrices().1;
        mat_vec(inv, &self.c)
    }

    /// Build from power-basis coefficients.
    pub fn from_power_basis(p: &[Q; 8]) -> Self {
        let fwd = &power_basis_matrices().0;
        KElem { c: mat_vec(fwd, p) }
    }

    /// Render as a human-readable exact expression, e.g.
    /// `3/2 + 1/4*sqrt2 - 2^(3/4)*i`.
    pub fn render(&self) -> String {
        // order: rational, sqrt2, 2^(1/4), 2^(3/4); real block then i block
        const ORDER: [(usize, &str); 4] = [(0, ""), (2, "sqrt2"), (1, "2^(1/4)"), (3, "2^(3/4)")];
        let mut parts: Vec<(bool, String)> = Vec::new(); // (negative, body)
        for (block, suffix) in [(0usize, ""), (4usize, "i")] {
            for &(a, radical) in ORDER.iter() {
                let coef = &self.c[block + a];
                if coef.is_zero() {
                    continue;
                }
                let neg = coef.is_negative();
                let abs = coef.abs();
                let mut factors: Vec<String> = Vec::new();
                let coef_is_one = abs.is_one();
                let has_symbol = !radical.is_empty() || !suffix.is_empty();
                if !coef_is_one || !has_symbol {
                    factors.push(format_q(&abs));
                }
                if !radical.is_empty() {
                    factors.push(radical.to_string());
                }
                if !suffix.is_empty() {
                    factors.push(suffix.to_string());
                }
                parts.push((neg, factors.join("*")));
            }
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (neg, body)) in parts.iter().enumerate() {
            if k == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(body);
        }
        out
    }
}

fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Add for &KElem {
    type Output = KElem;
    fn add(self, rhs: &KElem) -> KElem {
        let mut c = zeros();
        for k in 0..8 {
            c[k] = &self.c[k] + &rhs.c[k];
        }
        KElem { c }
    }
}

impl Sub for &KElem {
    type Output = KElem;
    fn sub(self, rhs: &KElem) -> KElem {
        let mut c = zeros();
        for k in 0..8 {
            c[k] = &self.c[k] - &rhs.c[k];
        }
        KElem { c }
    }
}

impl Neg for &KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        let mut c = zeros();
        for k in 0..8 {
            c[k] = -self.c[k].clone();
        }
        KElem { c }
    }
}

impl Mul for &KElem {
    type Output = KElem;
    fn mul(self, rhs: &KElem) -> KElem {
        let mut c = zeros();
        for a1 in 0..4 {
            for b1 in 0..2 {
                let x = &self.c[a1 + 4 * b1];
                if x.is_zero() {
                    continue;
                }
                for a2 in 0..4 {
                    for b2 in 0..2 {
                        let y = &rhs.c[a2 + 4 * b2];
                        if y.is_zero() {
                            continue;
                        }
                        let mut v = x * y;
                        let mut a = a1 + a2;
                        if a >= 4 {
                            a -= 4;
                            v *= Q::from(BigInt::from(2));
                        }
                        let b = b1 + b2;
                        if b >= 2 {
                            v = -v;
                        }
                        c[a + 4 * (b % 2)] += v;
                    }
                }
            }
        }
        KElem { c }
    }
}

impl Div for &KElem {
    type Output = KElem;
    fn div(self, rhs: &KElem) -> KElem {
        self * &rhs.inv()
    }
}

/// Gaussian elimination on an augmented `n × (n+1)` system; returns the
/// solution vector or `None` if singular.
pub fn solve_gauss(aug: &mut [Vec<Q>]) -> Option<Vec<Q>> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let pv = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= pv.clone();
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for k in col..=n {
                    let sub = &aug[col][k] * &f;
                    aug[r][k] -= sub;
                }
            }
        }
    }
    Some((0..n).map(|r| aug[r][n].clone()).collect())
}

// ---------------------------------------------------------------------------
// Nested tower representation used for square roots
// ---------------------------------------------------------------------------

/// `a + b√2` over `Q`.
#[derive(Clone, PartialEq)]
struct Q2 {
    a: Q,
    b: Q,
}

impl Q2 {
    fn zero() -> Self {
        Q2 {
            a: Q::zero(),
            b: Q::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
    fn sub(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
    fn mul(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a * &o.a + &(&self.b * &o.b) * &Q::from(BigInt::from(2)),
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
    fn scale(&self, s: &Q) -> Q2 {
        Q2 {
            a: &self.a * s,
            b: &self.b * s,
        }
    }
    fn inv(&self) -> Q2 {
        // (a - b√2) / (a² - 2b²)
        let n = &self.a * &self.a - &(&self.b * &self.b) * &Q::from(BigInt::from(2));
        assert!(!n.is_zero());
        Q2 {
            a: &self.a / &n,
            b: -&self.b / &n,
        }
    }
    fn sqrt(&self) -> Option<Q2> {
        if self.is_zero() {
            return Some(Q2::zero());
        }
        if self.b.is_zero() {
            if let Some(r) = sqrt_q(&self.a) {
                return Some(Q2 { a: r, b: Q::zero() });
            }
            // (v√2)² = 2v² = a
            let half = &self.a / &Q::from(BigInt::from(2));
            if let Some(v) = sqrt_q(&half) {
                return Some(Q2 { a: Q::zero(), b: v });
            }
            return None;
        }
        // norm = a² - 2b² must be a rational square n; u² = (a ± n)/2
        let norm = &self.a * &self.a - &(&self.b * &self.b) * &Q::from(BigInt::from(2));
        let n = sqrt_q(&norm)?;
        for sign in [1i64, -1] {
            let cand = (&self.a + &(Q::from(BigInt::from(sign)) * &n)) / Q::from(BigInt::from(2));
            if let Some(u) = sqrt_q(&cand) {
                if !u.is_zero() {
                    let v = &self.b / &(&u * &Q::from(BigInt::from(2)));
                    return Some(Q2 { a: u, b: v });
                }
            }
        }
        None
    }
}

/// `e + f·t` over `Q(√2)`, with `t² = √2`.
#[derive(Clone, PartialEq)]
struct Q4 {
    e: Q2,
    f: Q2,
}

impl Q4 {
    fn zero() -> Self {
        Q4 {
            e: Q2::zero(),
            f: Q2::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.e.is_zero() && self.f.is_zero()
    }
    fn gen_square() -> Q2 {
        Q2 {
            a: Q::zero(),
            b: Q::one(),
        } // √2
    }
    fn add(&self, o: &Q4) -> Q4 {
        Q4 {
            e: self.e.add(&o.e),
            f: self.f.add(&o.f),
        }
    }
    fn sub(&self, o: &Q4) -> Q4 {
        Q4 {
            e: self.e.sub(&o.e),
            f: self.f.sub(&o.f),
        }
    }
    fn mul(&self, o: &Q4) -> Q4 {
        // (e1 + f1 t)(e2 + f2 t) = e1e2 + f1f2 √2 + (e1f2 + f1e2) t
        Q4 {
            e: self.e.mul(&o.e).add(&self.f.mul(&o.f).mul(&Self::gen_square())),
            f: self.e.mul(&o.f).add(&self.f.mul(&o.e)),
        }
    }
    fn scale_q(&self, s: &Q) -> Q4 {
        Q4 {
            e: self.e.scale(s),
            f: self.f.scale(s),
        }
    }
    fn inv(&self) -> Q4 {
        // (e - f t)/(e² - f²√2)
        let n = self.e.mul(&self.e).sub(&self.f.mul(&self.f).mul(&Self::gen_square()));
        assert!(!n.is_zero());
        let ninv = n.inv();
        Q4 {
            e: self.e.mul(&ninv),
            f: self.f.mul(&ninv).scale(&-Q::one()),
        }
    }
    fn sqrt(&self) -> Option<Q4> {
        if self.is_zero() {
            return Some(Q4::zero());
        }
        let d = Self::gen_square();
        if self.f.is_zero() {
            if let Some(r) = self.e.sqrt() {
                return Some(Q4 {
                    e: r,
                    f: Q2::zero(),
                });
            }
            // (v t)² = v² √2 = e  →  v² = e/√2
            let target = self.e.mul(&d.inv());
            if let Some(v) = target.sqrt() {
                return Some(Q4 {
                    e: Q2::zero(),
                    f: v,
                });
            }
            return None;
        }
        let norm = self.e.mul(&self.e).sub(&self.f.mul(&self.f).mul(&d));
        let n = norm.sqrt()?;
        for sign in [1i64, -1] {
            let signed = if sign > 0 { n.clone() } else { n.scale(&-Q::one()) };
            let cand = self.e.add(&signed).scale(&Q::new(BigInt::one(), BigInt::from(2)));
            if let Some(u) = cand.sqrt() {
                if !u.is_zero() {
                    let v = self.f.mul(&u.scale(&Q::from(BigInt::from(2))).inv());
                    return Some(Q4 { e: u, f: v });
                }
            }
        }
        None
    }
}

/// `re + im·i` over `Q(t)`.
#[derive(Clone)]
struct K8 {
    re: Q4,
    im: Q4,
}

impl K8 {
    fn from_flat(c: &[Q; 8]) -> K8 {
        let part = |off: usize| Q4 {
            e: Q2 {
                a: c[off].clone(),
                b: c[off + 2].clone(),
            },
            f: Q2 {
                a: c[off + 1].clone(),
                b: c[off + 3].clone(),
            },
        };
        K8 {
            re: part(0),
            im: part(4),
        }
    }
    fn to_flat(&self) -> [Q; 8] {
        let mut c = zeros();
        for (off, part) in [(0usize, &self.re), (4usize, &self.im)] {
            c[off] = part.e.a.clone();
            c[off + 2] = part.e.b.clone();
            c[off + 1] = part.f.a.clone();
            c[off + 3] = part.f.b.clone();
        }
        c
    }
    fn sqrt(&self) -> Option<K8> {
        if self.im.is_zero() {
            if let Some(r) = self.re.sqrt() {
                return Some(K8 {
                    re: r,
                    im: Q4::zero(),
                });
            }
            // (v i)² = -v² = re  →  v² = -re
            let target = self.re.scale_q(&-Q::one());
            if let Some(v) = target.sqrt() {
                return Some(K8 {
                    re: Q4::zero(),
                    im: v,
                });
            }
            return None;
        }
        // u² - v² = re, 2uv = im; (u²+v²)² = re² + im²
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let n = norm.sqrt()?;
        for sign in [1i64, -1] {
            let signed = if sign > 0 {
                n.clone()
            } else {
                n.scale_q(&-Q::one())
            };
            let cand = self.re.add(&signed).scale_q(&Q::new(BigInt::one(), BigInt::from(2)));
            if let Some(u) = cand.sqrt() {
                if !u.is_zero() {
                    let v = self.im.mul(&u.scale_q(&Q::from(BigInt::from(2))).inv());
                    return Some(K8 { re: u, im: v });
                }
            }
        }
        None
    }
}

/// Exact square root of a rational, if it is a perfect square.
pub fn sqrt_q(x: &Q) -> Option<Q> {
    if x.is_zero() {
        return Some(Q::zero());
    }
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Q::new(ns, ds))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Power-basis conversion
// ---------------------------------------------------------------------------

type Mat8 = [[Q; 8]; 8];

fn mat_vec(m: &Mat8, v: &[Q; 8]) -> [Q; 8] {
    let mut out = zeros();
    for r in 0..8 {
        for k in 0..8 {
            if !m[r][k].is_zero() && !v[k].is_zero() {
                out[r] += &m[r][k] * &v[k];
            }
        }
    }
    out
}

/// `(P, P⁻¹)` where column `j` of `P` holds the tower coordinates of `θ^j`.
fn power_basis_matrices() -> &'static (Mat8, Mat8) {
    static CELL: OnceLock<(Mat8, Mat8)> = OnceLock::new();
    CELL.get_or_init(|| {
        let theta = &KElem::t() + &KElem::i();
        let mut p: Mat8 = std::array::from_fn(|_| zeros());
        let mut pw = KElem::one();
        for j in 0..8 {
            for r in 0..8 {
                p[r][j] = pw.c[r].clone();
            }
            if j < 7 {
                pw = &pw * &theta;
            }
        }
        // invert by solving P X = I column by column
        let mut inv: Mat8 = std::array::from_fn(|_| zeros());
        for col in 0..8 {
            let mut aug: Vec<Vec<Q>> = (0..8)
                .map(|r| {
                    let mut row: Vec<Q> = p[r].to_vec();
                    row.push(if r == col { Q::one() } else { Q::zero() });
                    row
                })
                .collect();
            let sol = solve_gauss(&mut aug)
                .expect("theta is a primitive element: power basis is invertible");
            for r in 0..8 {
                inv[r][col] = sol[r].clone();
            }
        }
        (p, inv)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn basic_arithmetic() {
        let t = KElem::t();
        let i = KElem::i();
        // t⁴ = 2
        assert_eq!(t.powi(4), KElem::from_i64(2));
        // i² = -1
        assert_eq!(&i * &i, KElem::from_i64(-1));
        // (t + i)(t - i) = t² + 1
        let prod = &(&t + &i) * &(&t - &i);
        let want = &KElem::sqrt2() + &KElem::one();
        assert_eq!(prod, want);
    }

    #[test]
    fn inverse_roundtrip() {
        let samples = [
            &(&KElem::t() + &KElem::i()) + &KElem::from_q(q(3, 7)),
            KElem::sqrt2(),
            &KElem::from_i64(5) - &KElem::t().powi(3),
            &KElem::i().scale(&q(-2, 3)) + &KElem::t().scale(&q(1, 5)),
        ];
        for x in samples {
            let y = x.inv();
            assert_eq!(&x * &y, KElem::one(), "inv fails for {x}");
        }
    }

    #[test]
    fn theta_min_poly_vanishes() {
        let theta = &KElem::t() + &KElem::i();
        let mut acc = KElem::zero();
        for (j, c) in THETA_MIN_POLY.iter().enumerate() {
            if *c != 0 {
                acc = &acc + &theta.powi(j as i64).scale(&Q::from(BigInt::from(*c)));
            }
        }
        assert!(acc.is_zero(), "min poly of theta should vanish, got {acc}");
    }

    #[test]
    fn power_basis_roundtrip() {
        let samples = [
            KElem::one(),
            KElem::t(),
            KElem::i(),
            &(&KElem::sqrt2() + &KElem::i().scale(&q(5, 3))) * &KElem::t(),
            &KElem::t().powi(3).scale(&q(-7, 2)) + &KElem::from_q(q(22, 7)),
        ];
        for x in &samples {
            let p = x.to_power_basis();
            let back = KElem::from_power_basis(&p);
            assert_eq!(&back, x);
        }
        // θ itself must be (0,1,0,...) in the power basis
        let theta = &KElem::t() + &KElem::i();
        let p = theta.to_power_basis();
        assert_eq!(p[1], Q::one());
        for (k, c) in p.iter().enumerate() {
            if k != 1 {
                assert!(c.is_zero());
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        // √2 = t²
        let r = KElem::sqrt2().sqrt().expect("sqrt2 is a square");
        assert_eq!(&r * &r, KElem::sqrt2());
        // √(2√2) = 2^{3/4} = t³
        let x = KElem::sqrt2().scale(&q(2, 1));
        let r = x.sqrt().expect("2√2 is a square");
        assert_eq!(&r * &r, x);
        assert_eq!(r, KElem::t().powi(3));
        // √(4 + 3√2) = 2^{1/4}(1 + √2) = t + t³
        let x = KElem::from_sqrt2_pair(q(4, 1), q(3, 1));
        let r = x.sqrt().expect("4+3√2 is a square");
        assert_eq!(&r * &r, x);
        assert_eq!(r, &KElem::t() + &KElem::t().powi(3));
        // √(6 + 4√2) = 2 + √2
        let x = KElem::from_sqrt2_pair(q(6, 1), q(4, 1));
        let r = x.sqrt().expect("6+4√2 is a square");
        assert_eq!(r, KElem::from_sqrt2_pair(q(2, 1), q(1, 1)));
        // √(-1) = i
        let r = KElem::from_i64(-1).sqrt().expect("-1 is a square");
        assert_eq!(&r * &r, KElem::from_i64(-1));
        // √(-2√2) = t³ i
        let x = KElem::sqrt2().scale(&q(-2, 1));
        let r = x.sqrt().expect("-2√2 is a square in K");
        assert_eq!(&r * &r, x);
        // 2i = (1+i)²: mixed real/imaginary input
        let x = KElem::i().scale(&q(2, 1));
        let r = x.sqrt().expect("2i is a square");
        assert_eq!(&r * &r, x);
        // rational square with huge coefficients
        let x = KElem::from_q(q(1521, 4)); // (39/2)²
        assert_eq!(x.sqrt().unwrap(), KElem::from_q(q(39, 2)));
    }

    #[test]
    fn sqrt_rejects_non_squares() {
        for bad in [
            KElem::from_i64(3),
            KElem::from_i64(5),
            KElem::from_sqrt2_pair(q(1, 1), q(1, 1)),
            &KElem::t() + &KElem::one(),
        ] {
            assert!(bad.sqrt().is_none(), "{bad} should not be a square in K");
        }
    }

    #[test]
    fn sqrt_of_squares_roundtrip() {
        // x² is always a square, across mixed elements
        let samples = [
            &KElem::t() + &KElem::i(),
            &KElem::from_sqrt2_pair(q(1, 2), q(-3, 1)) + &KElem::i().scale(&q(7, 5)),
            &KElem::t().powi(3) - &KElem::i().scale(&q(1, 3)),
            KElem::from_q(q(-4, 9)),
        ];
        for x in &samples {
            let sq = x * x;
            let r = sq.sqrt().unwrap_or_else(|| panic!("({x})² should be a square"));
            assert_eq!(&r * &r, sq, "sqrt of ({x})² mismatch");
        }
    }

    #[test]
    fn render_formats() {
        assert_eq!(KElem::zero().render(), "0");
        assert_eq!(KElem::from_q(q(-3, 2)).render(), "-3/2");
        assert_eq!(KElem::i().render(), "i");
        assert_eq!(KElem::t().render(), "2^(1/4)");
        let x = &KElem::from_sqrt2_pair(q(3, 2), q(1, 4)) - &KElem::i().scale(&q(2, 1));
        assert_eq!(x.render(), "3/2 + 1/4*sqrt2 - 2*i");
        let y = KElem::t().powi(3).scale(&q(-1, 1));
        assert_eq!(y.render(), "-2^(3/4)");
    }

    #[test]
    fn conj_and_real_predicates() {
        let x = &KElem::t() + &KElem::i();
        assert!(!x.is_real());
        assert!(x.conj() == &KElem::t() - &KElem::i());
        let pure = KElem::from_sqrt2_pair(q(1, 1), q(2, 1));
        assert!(pure.is_real());
        assert_eq!(pure.conj(), pure);
        // x · x̄ is real
        let n = &x * &x.conj();
        assert!(n.is_real());
    }
}
