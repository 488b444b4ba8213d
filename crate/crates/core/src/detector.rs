//! Finite subgroups standing in for the compact groups U(1) and SO(3).
//!
//! SO(3) is probed through the order-4 subgroup `{e, R_x(π), R_y(π), R_z(π)}`,
//! realized as `exp(iπS_α)` in a spin representation and laid out as the
//! catalog `Z2xZ2` (element 1 = `R_x`, 2 = `R_y`, 3 = `R_z`). U(1) is probed
//! through a cyclic subgroup `Z_n` acting as `diag(e^{2πi q_k g/n})`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{frobenius, identity, spin_matrices, unitary_exp, CMatrix};
use crate::projrep::{extract_multiplier, MultiplierRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectorKind {
    U1,
    SO3,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorKind::U1 => write!(f, "u1"),
            DetectorKind::SO3 => write!(f, "so3"),
        }
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u1" => Ok(DetectorKind::U1),
            "so3" => Ok(DetectorKind::SO3),
            other => Err(Error::Validation(format!("unknown detector '{other}' (expected so3 or u1)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompactDetectorSpec {
    kind: DetectorKind,
    subgroup: Arc<FiniteGroup>,
    realizations: Vec<CMatrix>,
}

impl CompactDetectorSpec {
    /// π-rotations about x, y, z in the spin `two_s / 2` representation.
    pub fn so3(two_s: usize) -> Self {
        let (sx, sy, sz) = spin_matrices(two_s);
        let realizations = vec![identity(two_s + 1), unitary_exp(&sx, PI), unitary_exp(&sy, PI), unitary_exp(&sz, PI)];
        let subgroup = Arc::new(FiniteGroup::catalog("Z2xZ2").expect("catalog"));
        CompactDetectorSpec { kind: DetectorKind::SO3, subgroup, realizations }
    }

    /// `Z_n ⊂ U(1)` acting on a site whose basis states carry integer charges `charges`.
    pub fn u1(n: usize, charges: &[i64]) -> Result<Self> {
        let subgroup = Arc::new(FiniteGroup::cyclic(n)?);
        let d = charges.len();
        let realizations = (0..n)
            .map(|g| {
                CMatrix::from_fn(d, d, |i, j| {
                    if i == j {
                        C64::from_polar(1.0, 2.0 * PI * (charges[i] * g as i64) as f64 / n as f64)
                    } else {
                        C64::default()
                    }
                })
            })
            .collect();
        Ok(CompactDetectorSpec { kind: DetectorKind::U1, subgroup, realizations })
    }

    /// Build from explicit realizations, checking they form a projective representation.
    pub fn new(kind: DetectorKind, subgroup: Arc<FiniteGroup>, realizations: Vec<CMatrix>) -> Result<Self> {
        let spec = CompactDetectorSpec { kind, subgroup, realizations };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    pub fn subgroup(&self) -> &Arc<FiniteGroup> {
        &self.subgroup
    }

    pub fn realizations(&self) -> &[CMatrix] {
        &self.realizations
    }

    /// The realizations as a multiplier representation (fails if they are not one).
    pub fn validate(&self) -> Result<MultiplierRep> {
        extract_multiplier(self.subgroup.clone(), self.realizations.clone())
    }

    /// Whether the realizations satisfy the group law exactly (to `tol`).
    pub fn is_linear(&self, tol: f64) -> bool {
        let g = &self.subgroup;
        g.elements().all(|a| {
            g.elements().all(|b| {
                frobenius(&(&self.realizations[a] * &self.realizations[b] - &self.realizations[g.mul(a, b)])) < tol
            })
        })
    }
}
