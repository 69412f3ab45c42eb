//! The registry of CM points with exact generator values.
//!
//! Each point stores `z = x + b·√−d` with positive imaginary part, plus a
//! partial map of exact values (as [`ClosedForm`]s) for `E₂*`, `E₄`, `E₆`,
//! `G`, `H`, where `E₂*(z) = E₂(z) − 3/(π·Im z)`. The Gaussian (`d = 1`)
//! registry ships as JSON and is re-derivable from the three seed values at
//! `z = i`. A separate static table carries the other-discriminant rows used
//! for Ω-free ratio checks (their periods live in different imaginary
//! quadratic fields, so only ratios are portable).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::closedform::{q_from_string, ClosedForm, ClosedFormDto};
use crate::field::KElem;
use crate::{format_q, Error, Q, Result};

/// Which stored generator value is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValueKey {
    E2Star,
    E4,
    E6,
    G,
    H,
}

impl ValueKey {
    pub const ALL: [ValueKey; 5] = [
        ValueKey::E2Star,
        ValueKey::E4,
        ValueKey::E6,
        ValueKey::G,
        ValueKey::H,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValueKey::E2Star => "E2star",
            ValueKey::E4 => "E4",
            ValueKey::E6 => "E6",
            ValueKey::G => "G",
            ValueKey::H => "H",
        }
    }

    pub fn parse(s: &str) -> Option<ValueKey> {
        ValueKey::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Modular weight of the generator; the Ω-exponent of a stored value.
    pub fn weight(self) -> u32 {
        match self {
            ValueKey::E2Star => 2,
            ValueKey::E4 => 4,
            ValueKey::E6 => 6,
            ValueKey::G => 1,
            ValueKey::H => 2,
        }
    }
}

/// A CM point `z = x + b·√−d` with its known exact values.
#[derive(Clone, PartialEq)]
pub struct CMPoint {
    pub label: String,
    pub x: Q,
    pub b: Q,
    pub d: u32,
    pub values: BTreeMap<ValueKey, ClosedForm>,
}

impl CMPoint {
    pub fn new(label: &str, x: Q, b: Q, d: u32) -> Result<Self> {
        if !b.is_positive() {
            return Err(Error::Registry(format!(
                "point {label}: imaginary part must be positive"
            )));
        }
        Ok(CMPoint {
            label: label.to_string(),
            x,
            b,
            d,
            values: BTreeMap::new(),
        })
    }

    /// `Im z` as an exact field element; only rational for `d = 1`.
    pub fn y_exact(&self) -> Result<KElem> {
        match self.d {
            1 => Ok(KElem::from_q(self.b.clone())),
            2 => Ok(KElem::sqrt2().scale(&self.b)),
            _ => Err(Error::NotInField(format!(
                "Im z of point {} involves sqrt({})",
                self.label, self.d
            ))),
        }
    }

    pub fn value(&self, key: ValueKey) -> Result<&ClosedForm> {
        self.values.get(&key).ok_or_else(|| Error::MissingPoint {
            point: self.label.clone(),
            what: key.as_str().to_string(),
        })
    }

    pub fn set_value(&mut self, key: ValueKey, v: ClosedForm) {
        self.values.insert(key, v);
    }

    /// The full quasiperiod `E₂(z) = E₂*(z) + 3/(π·Im z)` as a `ClosedForm`.
    pub fn e2_full(&self) -> Result<ClosedForm> {
        let star = self.value(ValueKey::E2Star)?;
        let y = self.y_exact()?;
        let pi_term = ClosedForm::term(y.inv().scale(&Q::from(BigInt::from(3))), 0, -1);
        Ok(star.add(&pi_term))
    }
}

/// A keyed collection of CM points.
#[derive(Clone, Default, PartialEq)]
pub struct Registry {
    pub points: BTreeMap<String, CMPoint>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn insert(&mut self, p: CMPoint) {
        self.points.insert(p.label.clone(), p);
    }

    pub fn get(&self, label: &str) -> Result<&CMPoint> {
        self.points.get(label).ok_or_else(|| Error::MissingPoint {
            point: label.to_string(),
            what: "registry entry".to_string(),
        })
    }

    pub fn get_mut(&mut self, label: &str) -> Result<&mut CMPoint> {
        self.points.get_mut(label).ok_or_else(|| Error::MissingPoint {
            point: label.to_string(),
            what: "registry entry".to_string(),
        })
    }

    /// Find a point by exact coordinates.
    pub fn find_by_z(&self, x: &Q, b: &Q, d: u32) -> Option<&CMPoint> {
        self.points
            .values()
            .find(|p| &p.x == x && &p.b == b && p.d == d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<PointDto> = self
            .points
            .values()
            .map(|p| PointDto {
                label: p.label.clone(),
                x: format_q(&p.x),
                b: format_q(&p.b),
                d: p.d,
                values: p
                    .values
                    .iter()
                    .map(|(k, v)| (k.as_str().to_string(), v.to_dto()))
                    .collect(),
            })
            .collect();
        serde_json::to_value(RegistryDto { points }).expect("registry serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Registry> {
        let dto: RegistryDto = serde_json::from_value(v.clone())?;
        let mut reg = Registry::new();
        for pd in &dto.points {
            let x = q_from_string(&pd.x)?;
            let b = q_from_string(&pd.b)?;
            let mut point = CMPoint::new(&pd.label, x, b, pd.d)?;
            for (ks, cfd) in &pd.values {
                let key = ValueKey::parse(ks).ok_or_else(|| {
                    Error::Registry(format!("unknown value key {ks} at point {}", pd.label))
                })?;
                point.set_value(key, ClosedForm::from_dto(cfd)?);
            }
            reg.insert(point);
        }
        Ok(reg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Registry> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Registry(format!("cannot read {}: {e}", path.display())))?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        Registry::from_json(&v)
    }
}

#[derive(Serialize, Deserialize)]
struct PointDto {
    label: String,
    x: String,
    b: String,
    d: u32,
    values: BTreeMap<String, ClosedFormDto>,
}

#[derive(Serialize, Deserialize)]
struct RegistryDto {
    points: Vec<PointDto>,
}

/// Environment variable naming the registry file; a compiled-in copy of the
/// shipped Gaussian registry is the fallback.
pub const REGISTRY_ENV: &str = "HYPSUM_REGISTRY";

pub const SHIPPED_REGISTRY_JSON: &str = include_str!("../data/gaussian_registry.json");

/// Resolve the registry path from the environment, if set.
pub fn registry_path_from_env() -> Option<PathBuf> {
    std::env::var_os(REGISTRY_ENV).map(PathBuf::from)
}

/// Load the registry named by `$HYPSUM_REGISTRY`, or the shipped one.
pub fn load_default() -> Result<Registry> {
    match registry_path_from_env() {
        Some(p) => Registry::load(&p),
        None => {
            let v: serde_json::Value = serde_json::from_str(SHIPPED_REGISTRY_JSON)?;
            Registry::from_json(&v)
        }
    }
}

/// One row of the other-discriminant value table. The columns are the
/// Ω_K-normalized quantities
/// `v₂ = |D|^{1/2}·E₂*(z)/Ω_K²`, `v₄ = E₄(z)/Ω_K⁴`, `v₆ = E₆(z)/(|D|^{1/2}·Ω_K⁶)`;
/// only Ω_K-free ratios of these are verified numerically.
#[derive(Clone, Copy, Debug)]
pub struct OtherDiscRow {
    pub label: &'static str,
    /// real part of z
    pub x: (i64, i64),
    /// (Im z)², rational
    pub y_sq: (i64, i64),
    pub abs_d: u32,
    pub v2: i64,
    pub v4: i64,
    pub v6: i64,
}

impl OtherDiscRow {
    pub fn x_q(&self) -> Q {
        Q::new(BigInt::from(self.x.0), BigInt::from(self.x.1))
    }

    pub fn y_sq_q(&self) -> Q {
        Q::new(BigInt::from(self.y_sq.0), BigInt::from(self.y_sq.1))
    }
}

pub const OTHER_DISC_ROWS: [OtherDiscRow; 8] = [
    OtherDiscRow { label: "(1+sqrt(-3))/2", x: (1, 2), y_sq: (3, 4), abs_d: 3, v2: 0, v4: 0, v6: 24 },
    OtherDiscRow { label: "(1+sqrt(-7))/2", x: (1, 2), y_sq: (7, 4), abs_d: 7, v2: 3, v4: 15, v6: 27 },
    // v2 = 4 here: the value forced by (E₂*)³/E₆ = 1/28 at this point (both
    // by direct series evaluation and by the Chowla–Selberg period), i.e.
    // E₂*(√−2) = √2·Ω_K².
    OtherDiscRow { label: "sqrt(-2)", x: (0, 1), y_sq: (2, 1), abs_d: 8, v2: 4, v4: 20, v6: 28 },
    OtherDiscRow { label: "(1+sqrt(-11))/2", x: (1, 2), y_sq: (11, 4), abs_d: 11, v2: 8, v4: 32, v6: 56 },
    OtherDiscRow { label: "(1+sqrt(-19))/2", x: (1, 2), y_sq: (19, 4), abs_d: 19, v2: 24, v4: 96, v6: 216 },
    OtherDiscRow { label: "(1+sqrt(-43))/2", x: (1, 2), y_sq: (43, 4), abs_d: 43, v2: 144, v4: 960, v6: 4536 },
    OtherDiscRow { label: "(1+sqrt(-67))/2", x: (1, 2), y_sq: (67, 4), abs_d: 67, v2: 456, v4: 5280, v6: 46872 },
    OtherDiscRow {
        label: "(1+sqrt(-163))/2",
        x: (1, 2),
        y_sq: (163, 4),
        abs_d: 163,
        v2: 8688,
        v4: 640320,
        v6: 40133016,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn omega_term(c: Q, omega: u32) -> ClosedForm {
        ClosedForm::term(KElem::from_q(c), omega, 0)
    }

    #[test]
    fn e2_full_at_unit_point_is_three_over_pi() {
        let mut p = CMPoint::new("i", Q::zero(), Q::one(), 1).unwrap();
        p.set_value(ValueKey::E2Star, ClosedForm::default());
        let e2 = p.e2_full().unwrap();
        assert_eq!(e2.coeff(0, -1).as_q().unwrap(), q(3, 1));
        assert_eq!(e2.ordered_terms().len(), 1);
    }

    #[test]
    fn e2_full_reinstates_the_pi_part() {
        let mut p = CMPoint::new("2i", Q::zero(), q(2, 1), 1).unwrap();
        p.set_value(ValueKey::E2Star, omega_term(q(3, 2), 2));
        let e2 = p.e2_full().unwrap();
        assert_eq!(e2.coeff(2, 0).as_q().unwrap(), q(3, 2));
        assert_eq!(e2.coeff(0, -1).as_q().unwrap(), q(3, 2));
        // quarter-height point: 3/(π/4) = 12/π
        let mut p = CMPoint::new("i/4", Q::zero(), q(1, 4), 1).unwrap();
        p.set_value(ValueKey::E2Star, ClosedForm::default());
        assert_eq!(p.e2_full().unwrap().coeff(0, -1).as_q().unwrap(), q(12, 1));
    }

    #[test]
    fn registry_round_trip_and_canonical_order() {
        let mut reg = Registry::new();
        let mut p1 = CMPoint::new("i", Q::zero(), Q::one(), 1).unwrap();
        p1.set_value(ValueKey::E4, omega_term(q(12, 1), 4));
        p1.set_value(ValueKey::E6, ClosedForm::default());
        let mut p2 = CMPoint::new("2i", Q::zero(), q(2, 1), 1).unwrap();
        p2.set_value(ValueKey::E2Star, omega_term(q(3, 2), 2));
        reg.insert(p2);
        reg.insert(p1);
        let json = reg.to_json();
        let back = Registry::from_json(&json).unwrap();
        assert!(back == reg);
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), serde_json::to_string(&json).unwrap());
        // file round trip
        let dir = std::env::temp_dir().join("hypsum-registry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("reg.json");
        reg.save(&path).unwrap();
        let loaded = Registry::load(&path).unwrap();
        assert!(loaded == reg);
    }

    #[test]
    fn bad_points_are_rejected() {
        assert!(CMPoint::new("bad", Q::zero(), q(-1, 1), 1).is_err());
        let mut reg = Registry::new();
        reg.insert(CMPoint::new("i", Q::zero(), Q::one(), 1).unwrap());
        assert!(reg.get("missing").is_err());
        assert!(reg.get("i").unwrap().value(ValueKey::G).is_err());
    }

    #[test]
    fn other_discriminant_rows_are_well_formed() {
        assert_eq!(OTHER_DISC_ROWS.len(), 8);
        let mut labels: Vec<&str> = OTHER_DISC_ROWS.iter().map(|r| r.label).collect();
        labels.dedup();
        assert_eq!(labels.len(), 8);
        for r in &OTHER_DISC_ROWS {
            assert!(r.y_sq_q().is_positive());
            // |D| = 4·y² for x=0 points, 4·y² + … consistency: y² = |D|/4 exactly
            assert_eq!(r.y_sq_q() * q(4, 1), Q::from(BigInt::from(r.abs_d)));
        }
        assert_eq!(OTHER_DISC_ROWS[7].v6, 40_133_016);
        assert_eq!(OTHER_DISC_ROWS[2].v4, 20);
    }
}
