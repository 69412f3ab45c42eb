//! Exact evaluation of reciprocal hyperbolic-function series.
//!
//! The library evaluates eight families of series of the shape
//! `Σ n^p / sinh^s(n π c)` (and the sech / odd-index / alternating variants)
//! in closed form: each admissible `(family, s, p)` is rewritten as a finite
//! combination of derivatives of Eisenstein-type q-series, which are in turn
//! polynomials in the quasimodular generators. At CM points such as
//! `q = e^{-π}` the generators take algebraic multiples of powers of the
//! lemniscatic period `Ω` and `1/π`, so the whole sum collapses to an exact
//! closed form over a number field, verified against high-precision numerics.
//!
//! Module map:
//! - [`tables`]: Bernoulli numbers, central factorial numbers, divisor sums.
//! - [`qseries`]: exact q-expansions on the half-integral grid, Eisenstein
//!   series, eta quotients, and the sixteen auxiliary lambert-type series.
//! - [`field`]: arithmetic in `Q(i, 2^{1/4})`, including square roots.
//! - [`closedform`]: closed forms `Σ c · Ω^a · π^{-b}` with field coefficients.
//! - [`quasimod`]: polynomials in quasimodular generators and their
//!   derivation/theta-operator calculus at levels 1 and 4.
//! - [`decompose`]: central-factorial decomposition of the eight families
//!   into derivatives of the auxiliary series, and lowering to generators.
//! - [`hecke`]: Hecke operators and modular polynomials for the generators.
//! - [`bigfloat`]: fixed-point big-float arithmetic with certified helpers.
//! - [`numeric`]: high-precision numeric evaluation (η, direct series sums).
//! - [`cmdata`]: the registry of CM points and their exact generator values.
//! - [`bootstrap`]: deriving new CM values as roots of modular polynomials.
//! - [`evaluator`]: exact evaluation of decompositions at CM points.
//! - [`lucas`]: zeta-like sums over generalized Fibonacci/Lucas sequences.

pub mod bigfloat;
pub mod bootstrap;
pub mod closedform;
pub mod cmdata;
pub mod decompose;
pub mod evaluator;
pub mod field;
pub mod hecke;
pub mod lucas;
pub mod numeric;
pub mod qseries;
pub mod quasimod;
pub mod tables;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exact rational scalar used throughout.
pub type Q = num_rational::BigRational;
/// Exact integer scalar.
pub type Z = BigInt;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series ({family}, s={s}, p={p}) is not covered by the decomposition theorem: {reason}")]
    NotDecomposable {
        family: String,
        s: usize,
        p: usize,
        reason: String,
    },
    #[error("no registered CM values for point {point} (needed for {what})")]
    MissingPoint { point: String, what: String },
    #[error("value is not in the working field: {0}")]
    NotInField(String),
    #[error("no root of the modular polynomial matches {what} at the required precision")]
    NoMatchingRoot { what: String },
    #[error("root matching is ambiguous for {what}: candidates too close together")]
    AmbiguousRoot { what: String },
    #[error("registry error: {0}")]
    Registry(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Integer power with nonnegative exponent.
pub fn int_pow(base: &BigInt, exp: i64) -> BigInt {
    assert!(exp >= 0, "int_pow: negative exponent");
    let mut acc = BigInt::one();
    let mut b = base.clone();
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Rational power with arbitrary integer exponent (base must be nonzero for
/// negative exponents).
pub fn q_pow(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        Q::new(
            int_pow(base.numer(), exp),
            int_pow(base.denom(), exp),
        )
    } else {
        assert!(!base.is_zero(), "q_pow: zero base with negative exponent");
        Q::new(
            int_pow(base.denom(), -exp),
            int_pow(base.numer(), -exp),
        )
    }
}

/// Canonical rational rendering: `n` or `n/d`.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    acc
}
