//! Fixed-point high-precision arithmetic.
//!
//! A `BF` holds `mant · 2^{−bits}` with a per-value binary scale; all binary
//! operations require matching scales (callers pick a working precision and
//! stick to it, typically target bits plus a guard margin). Complex numbers
//! are rectangular pairs. This is deliberately minimal: ring operations,
//! square roots, `exp`, and π are everything the numeric verifier needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Q, Z};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BF {
    mant: Z,
    bits: u32,
}

impl BF {
    pub fn new(mant: Z, bits: u32) -> Self {
        BF { mant, bits }
    }

    pub fn zero(bits: u32) -> Self {
        BF {
            mant: Z::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        BF {
            mant: Z::from(1) << bits,
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        BF {
            mant: Z::from(v) << bits,
            bits,
        }
    }

    pub fn from_q(v: &Q, bits: u32) -> Self {
        let num = v.numer() << bits;
        BF {
            mant: num.div_floor(v.denom()),
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mant(&self) -> &Z {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BF {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        BF {
            mant: -&self.mant,
            bits: self.bits,
        }
    }

    pub fn add(&self, o: &BF) -> Self {
        assert_eq!(self.bits, o.bits);
        BF {
            mant: &self.mant + &o.mant,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &BF) -> Self {
        assert_eq!(self.bits, o.bits);
        BF {
            mant: &self.mant - &o.mant,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &BF) -> Self {
        assert_eq!(self.bits, o.bits);
        BF {
            mant: (&self.mant * &o.mant) >> self.bits,
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &BF) -> Self {
        assert_eq!(self.bits, o.bits);
        assert!(!o.mant.is_zero(), "division by zero");
        BF {
            mant: ((&self.mant) << self.bits).div_floor(&o.mant),
            bits: self.bits,
        }
    }

    pub fn recip(&self) -> Self {
        BF::one(self.bits).div(self)
    }

    /// Multiply by a small rational without changing scale.
    pub fn scale_q(&self, r: &Q) -> Self {
        BF {
            mant: (&self.mant * r.numer()).div_floor(r.denom()),
            bits: self.bits,
        }
    }

    pub fn shr(&self, k: u32) -> Self {
        BF {
            mant: &self.mant >> k,
            bits: self.bits,
        }
    }

    pub fn shl(&self, k: u32) -> Self {
        BF {
            mant: &self.mant << k,
            bits: self.bits,
        }
    }

    /// `2^{−k}` at this scale: the natural epsilon for comparisons.
    pub fn epsilon(bits: u32, k: u32) -> Self {
        assert!(k <= bits);
        BF {
            mant: Z::from(1) << (bits - k),
            bits,
        }
    }

    pub fn sqrt(&self) -> Self {
        assert!(
            !self.mant.is_negative(),
            "square root of a negative number"
        );
        BF {
            mant: ((&self.mant) << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = BF::one(self.bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn lt(&self, o: &BF) -> bool {
        assert_eq!(self.bits, o.bits);
        self.mant < o.mant
    }

    pub fn le(&self, o: &BF) -> bool {
        assert_eq!(self.bits, o.bits);
        self.mant <= o.mant
    }

    /// Re-scale to a different bit count (rounding toward −∞ when shrinking).
    pub fn with_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            BF {
                mant: (&self.mant) << (bits - self.bits),
                bits,
            }
        } else {
            BF {
                mant: (&self.mant) >> (self.bits - bits),
                bits,
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        // good enough for diagnostics; large values may saturate
        let approx = (&self.mant >> self.bits.saturating_sub(64)).to_f64().unwrap_or(f64::NAN);
        approx / 2f64.powi(self.bits.min(64) as i32)
    }

    /// Decimal rendering with `digits` fractional digits, truncated.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.mant.is_negative();
        let v = self.mant.abs();
        let int_part = (&v) >> self.bits;
        let mask = (Z::from(1) << self.bits) - 1;
        let frac = v & mask;
        let scaled: Z = (frac * Z::from(10).pow(digits)) >> self.bits;
        let mut fs = scaled.to_string();
        while (fs.len() as u32) < digits {
            fs.insert(0, '0');
        }
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{fs}")
        }
    }
}

/// Parse a decimal string (optionally scientific, e.g. `1e-40`, `0.5`, `-3.25e2`).
pub fn parse_decimal(s: &str, bits: u32) -> Option<BF> {
    let s = s.trim();
    let (mant_str, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, body) = match mant_str.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, mant_str.strip_prefix('+').unwrap_or(mant_str)),
    };
    let (int_str, frac_str) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    let digits: String = format!("{int_str}{frac_str}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let m: Z = digits.parse().ok()?;
    let ten_exp = exp - frac_str.len() as i32;
    let mant = if ten_exp >= 0 {
        (m * Z::from(10).pow(ten_exp as u32)) << bits
    } else {
        (m << bits).div_floor(&Z::from(10).pow((-ten_exp) as u32))
    };
    Some(BF::new(Z::from(sign) * mant, bits))
}

/// π by Machin's formula `π = 16 atan(1/5) − 4 atan(1/239)`.
pub fn pi(bits: u32) -> BF {
    let guard = bits + 32;
    fn atan_inv(x: u64, bits: u32) -> Z {
        // atan(1/x) = Σ (−1)^k / ((2k+1) x^{2k+1})
        let x2 = Z::from(x) * Z::from(x);
        let mut term = (Z::from(1) << bits).div_floor(&Z::from(x));
        let mut acc = Z::zero();
        let mut k = 0u32;
        while !term.is_zero() {
            let contrib = term.div_floor(&Z::from(2 * k + 1));
            if k % 2 == 0 {
                acc += contrib;
            } else {
                acc -= contrib;
            }
            term = term.div_floor(&x2);
            k += 1;
        }
        acc
    }
    let v = atan_inv(5, guard) * Z::from(16) - atan_inv(239, guard) * Z::from(4);
    BF::new(v >> 32, bits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CF {
    pub re: BF,
    pub im: BF,
}

impl CF {
    pub fn new(re: BF, im: BF) -> Self {
        assert_eq!(re.bits(), im.bits());
        CF { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        CF::new(BF::zero(bits), BF::zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        CF::new(BF::one(bits), BF::zero(bits))
    }

    pub fn from_bf(re: BF) -> Self {
        let bits = re.bits();
        CF::new(re, BF::zero(bits))
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn add(&self, o: &CF) -> CF {
        CF::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &CF) -> CF {
        CF::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> CF {
        CF::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> CF {
        CF::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &CF) -> CF {
        CF::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn mul_bf(&self, s: &BF) -> CF {
        CF::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn scale_q(&self, r: &Q) -> CF {
        CF::new(self.re.scale_q(r), self.im.scale_q(r))
    }

    pub fn div(&self, o: &CF) -> CF {
        let d = o.abs2();
        let n = self.mul(&o.conj());
        CF::new(n.re.div(&d), n.im.div(&d))
    }

    pub fn abs2(&self) -> BF {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> BF {
        self.abs2().sqrt()
    }

    pub fn powi(&self, e: u32) -> CF {
        let bits = self.bits();
        let mut acc = CF::one(bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Complex exponential by argument halving plus Taylor summation.
pub fn exp(z: &CF, bits: u32) -> CF {
    let work = bits + 64;
    let z = CF::new(z.re.with_bits(work), z.im.with_bits(work));
    // halve until |z| < 2^{−8}
    let threshold = BF::epsilon(work, 16); // compare |z|² < 2^{−16}
    let mut halvings = 0u32;
    let mut w = z;
    while threshold.lt(&w.abs2()) {
        w = CF::new(w.re.shr(1), w.im.shr(1));
        halvings += 1;
        assert!(halvings < 4096, "exponential argument too large");
    }
    // Taylor
    let stop = BF::epsilon(work, work - 8);
    let mut acc = CF::one(work);
    let mut term = CF::one(work);
    let mut n = 1u64;
    loop {
        term = term.mul(&w);
        term = CF::new(
            BF::new(term.re.mant().div_floor(&Z::from(n)), work),
            BF::new(term.im.mant().div_floor(&Z::from(n)), work),
        );
        acc = acc.add(&term);
        if term.re.abs().add(&term.im.abs()).le(&stop) {
            break;
        }
        n += 1;
        assert!(n < 10_000, "exp Taylor series failed to converge");
    }
    for _ in 0..halvings {
        acc = acc.mul(&acc);
    }
    CF::new(acc.re.with_bits(bits), acc.im.with_bits(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";
    const SQRT2_50: &str = "1.41421356237309504880168872420969807856967187537694";
    const E_50: &str = "2.71828182845904523536028747135266249775724709369995";

    #[test]
    fn pi_digits() {
        let p = pi(256);
        assert_eq!(&p.to_decimal(50)[..45], &PI_50[..45]);
    }

    #[test]
    fn sqrt_two_digits() {
        let two = BF::from_i64(2, 256);
        assert_eq!(&two.sqrt().to_decimal(50)[..45], &SQRT2_50[..45]);
    }

    #[test]
    fn exp_one_digits() {
        let e = exp(&CF::one(256), 256);
        assert_eq!(&e.re.to_decimal(50)[..45], &E_50[..45]);
        assert!(e.im.is_zero());
    }

    #[test]
    fn exp_i_pi_is_minus_one() {
        let bits = 256;
        let p = pi(bits);
        let v = exp(&CF::new(BF::zero(bits), p), bits);
        let eps = BF::epsilon(bits, bits - 16);
        assert!(v.re.add(&BF::one(bits)).abs().lt(&eps));
        assert!(v.im.abs().lt(&eps));
    }

    #[test]
    fn arithmetic_round_trips() {
        let bits = 192;
        let a = BF::from_q(&Q::new(BigInt::from(355), BigInt::from(113)), bits);
        let b = BF::from_q(&Q::new(BigInt::from(-7), BigInt::from(3)), bits);
        let back = a.mul(&b).div(&b);
        assert!(back.sub(&a).abs().lt(&BF::epsilon(bits, bits - 8)));
        assert_eq!(BF::from_q(&Q::new(BigInt::from(1), BigInt::from(8)), bits).to_decimal(3), "0.125");
        assert_eq!(BF::from_i64(-3, bits).to_decimal(2), "-3.00");
    }

    #[test]
    fn decimal_parsing() {
        let bits = 192;
        let x = parse_decimal("1e-40", bits).unwrap();
        let y = BF::from_q(
            &Q::new(BigInt::from(1), BigInt::from(10).pow(40)),
            bits,
        );
        assert!(x.sub(&y).abs().le(&BF::epsilon(bits, bits - 4)));
        let z = parse_decimal("-3.25e2", bits).unwrap();
        assert_eq!(z.to_decimal(2), "-325.00");
        assert_eq!(parse_decimal("0.5", bits).unwrap().to_decimal(1), "0.5");
        assert!(parse_decimal("abc", bits).is_none());
    }

    #[test]
    fn complex_division() {
        let bits = 192;
        let a = CF::new(BF::from_i64(3, bits), BF::from_i64(4, bits));
        let b = CF::new(BF::from_i64(1, bits), BF::from_i64(-2, bits));
        let c = a.div(&b).mul(&b);
        assert!(c.sub(&a).abs().lt(&BF::epsilon(bits, bits - 8)));
        let sq = CF::new(BF::zero(bits), BF::one(bits)).powi(2);
        assert!(sq.re.add(&BF::one(bits)).abs().lt(&BF::epsilon(bits, bits - 8)));
    }

    use num_bigint::BigInt;
}
