//! Values in U(1), either exact roots of unity `e^{2πi p/q}` or floating angles.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular tolerance used when comparing approximate phases.
pub const PHASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseRepr", into = "PhaseRepr")]
pub enum PhaseValue {
    /// `e^{2πi num/den}` with `0 <= num < den` in lowest terms.
    Exact { num: u64, den: u64 },
    /// `e^{i angle}` with `angle` in `[0, 2π)`.
    Approx { angle: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PhaseRepr {
    Exact { num: i64, den: u64 },
    Approx { angle: f64 },
}

impl TryFrom<PhaseRepr> for PhaseValue {
    type Error = String;

    fn try_from(r: PhaseRepr) -> std::result::Result<Self, String> {
        match r {
            PhaseRepr::Exact { num, den } => {
                if den == 0 {
                    Err("phase denominator must be positive".into())
                } else {
                    Ok(PhaseValue::exact(num, den))
                }
            }
            PhaseRepr::Approx { angle } if angle.is_finite() => Ok(PhaseValue::from_angle(angle)),
            PhaseRepr::Approx { .. } => Err("phase angle must be finite".into()),
        }
    }
}

impl From<PhaseValue> for PhaseRepr {
    fn from(p: PhaseValue) -> Self {
        match p {
            PhaseValue::Exact { num, den } => PhaseRepr::Exact { num: num as i64, den },
            PhaseValue::Approx { angle } => PhaseRepr::Approx { angle },
        }
    }
}

impl Default for PhaseValue {
    fn default() -> Self {
        PhaseValue::ONE
    }
}

impl PhaseValue {
    pub const ONE: PhaseValue = PhaseValue::Exact { num: 0, den: 1 };

    /// `e^{2πi num/den}`, reduced modulo 1 and to lowest terms.
    pub fn exact(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let p = num.rem_euclid(den as i64) as u64;
        if p == 0 {
            return PhaseValue::ONE;
        }
        let g = p.gcd(&den);
        PhaseValue::Exact { num: p / g, den: den / g }
    }

    pub fn from_angle(angle: f64) -> Self {
        PhaseValue::Approx { angle: angle.rem_euclid(TAU) }
    }

    pub fn from_complex(z: C64) -> Self {
        PhaseValue::from_angle(z.arg())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PhaseValue::Exact { .. })
    }

    /// Fraction of a full turn, in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        match *self {
            PhaseValue::Exact { num, den } => num as f64 / den as f64,
            PhaseValue::Approx { angle } => angle / TAU,
        }
    }

    pub fn angle(&self) -> f64 {
        self.turns() * TAU
    }

    pub fn to_complex(&self) -> C64 {
        match *self {
            PhaseValue::Exact { num, den } => {
                // exact values for the common quarter turns
                match (num * 4) % den == 0 {
                    true => match (num * 4) / den {
                        0 => C64::new(1.0, 0.0),
                        1 => C64::new(0.0, 1.0),
                        2 => C64::new(-1.0, 0.0),
                        _ => C64::new(0.0, -1.0),
                    },
                    false => C64::from_polar(1.0, self.angle()),
                }
            }
            PhaseValue::Approx { angle } => C64::from_polar(1.0, angle),
        }
    }

    pub fn mul(&self, other: &PhaseValue) -> PhaseValue {
        match (*self, *other) {
            (PhaseValue::Exact { num: a, den: b }, PhaseValue::Exact { num: c, den: d }) => {
                let l = b.lcm(&d);
                let n = (a as u128 * (l / b) as u128 + c as u128 * (l / d) as u128) % l as u128;
                PhaseValue::exact(n as i64, l)
            }
            _ => PhaseValue::from_angle(self.angle() + other.angle()),
        }
    }

    pub fn inv(&self) -> PhaseValue {
        match *self {
            PhaseValue::Exact { num, den } => PhaseValue::exact(-(num as i64), den),
            PhaseValue::Approx { angle } => PhaseValue::from_angle(-angle),
        }
    }

    pub fn div(&self, other: &PhaseValue) -> PhaseValue {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> PhaseValue {
        match *self {
            PhaseValue::Exact { num, den } => {
                let n = (num as i128 * k as i128).rem_euclid(den as i128);
                PhaseValue::exact(n as i64, den)
            }
            PhaseValue::Approx { angle } => PhaseValue::from_angle(angle * k as f64),
        }
    }

    /// Angular distance on the circle, in radians.
    pub fn distance(&self, other: &PhaseValue) -> f64 {
        let t = (self.turns() - other.turns()).rem_euclid(1.0);
        t.min(1.0 - t) * TAU
    }

    pub fn approx_eq(&self, other: &PhaseValue, tol: f64) -> bool {
        match (self, other) {
            (PhaseValue::Exact { .. }, PhaseValue::Exact { .. }) => self == other,
            _ => self.distance(other) <= tol,
        }
    }

    pub fn is_one(&self, tol: f64) -> bool {
        self.approx_eq(&PhaseValue::ONE, tol)
    }

    /// Nearest root of unity `e^{2πi p/max_den}`, provided the angular error is below `tol`.
    pub fn snap(&self, max_den: u64, tol: f64) -> Result<PhaseValue> {
        match *self {
            PhaseValue::Exact { den, .. } if max_den % den == 0 => Ok(*self),
            _ => {
                let scaled = self.turns() * max_den as f64;
                let p = scaled.round() as i64;
                let snapped = PhaseValue::exact(p, max_den);
                let err = self.distance(&snapped);
                if err < tol {
                    Ok(snapped)
                } else {
                    Err(Error::Snap { angle: self.angle(), max_den, tol })
                }
            }
        }
    }

    /// Denominator for exact values.
    pub fn denominator(&self) -> Option<u64> {
        match *self {
            PhaseValue::Exact { den, .. } => Some(den),
            PhaseValue::Approx { .. } => None,
        }
    }
}

impl fmt::Display for PhaseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhaseValue::Exact { num: 0, .. } => write!(f, "1"),
            PhaseValue::Exact { num, den } => write!(f, "e(2πi·{num}/{den})"),
            PhaseValue::Approx { angle } => write!(f, "e(i·{angle:.12})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_reduction() {
        assert_eq!(PhaseValue::exact(2, 4), PhaseValue::Exact { num: 1, den: 2 });
        assert_eq!(PhaseValue::exact(-1, 4), PhaseValue::Exact { num: 3, den: 4 });
        assert_eq!(PhaseValue::exact(8, 4), PhaseValue::ONE);
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = PhaseValue::exact(1, 4);
        let b = PhaseValue::exact(1, 6);
        let p = a.mul(&b);
        assert_eq!(p, PhaseValue::exact(5, 12));
        assert_eq!(a.mul(&a.inv()), PhaseValue::ONE);
        assert_eq!(a.pow(4), PhaseValue::ONE);
    }

    #[test]
    fn snapping() {
        let p = PhaseValue::from_angle(std::f64::consts::PI + 1e-9);
        assert_eq!(p.snap(4, 1e-6).unwrap(), PhaseValue::exact(1, 2));
        let q = PhaseValue::from_angle(0.3);
        assert!(q.snap(4, 1e-6).is_err());
    }

    #[test]
    fn json_forms() {
        let v: Vec<PhaseValue> = serde_json::from_str(r#"[{"num":3,"den":6},{"angle":7.0}]"#).unwrap();
        assert_eq!(v[0], PhaseValue::exact(1, 2));
        assert!(matches!(v[1], PhaseValue::Approx { .. }));
        assert_eq!(serde_json::to_string(&v[0]).unwrap(), r#"{"num":1,"den":2}"#);
        assert!(serde_json::from_str::<PhaseValue>(r#"{"num":1,"den":0}"#).is_err());
    }

    proptest! {
        #[test]
        fn exact_matches_float(a in -50i64..50, b in 1u64..30, c in -50i64..50, d in 1u64..30) {
            let x = PhaseValue::exact(a, b);
            let y = PhaseValue::exact(c, d);
            let exact = x.mul(&y).to_complex();
            let float = x.to_complex() * y.to_complex();
            prop_assert!((exact - float).norm() < 1e-12);
        }
    }
}
