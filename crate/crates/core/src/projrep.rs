//! Multiplier (projective) unitary representations `u(g)u(h) = μ(g,h) u(gh)`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cohomology::{check_cocycle, Cocycle};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{frobenius, identity, kron, unitarity_defect, CMatrix};
use crate::phase::PhaseValue;

/// Unitarity tolerance for stored representation matrices.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `|μ| = 1` and on the multiplier residual during extraction.
pub const EXTRACTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct MultiplierRep {
    group: Arc<FiniteGroup>,
    matrices: Vec<CMatrix>,
    multiplier: Cocycle,
}

/// JSON form: `{"group": str, "dim": d, "matrices": [[[ [re,im] ]]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepJson {
    pub group: String,
    pub dim: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Validation("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// `μ(g,h) = tr(u(g)u(h)u(gh)†)/dim`, checked against `|μ| = 1` and the full residual.
pub fn extract_multiplier(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>) -> Result<MultiplierRep> {
    extract_with_tol(group, matrices, EXTRACTION_TOL)
}

pub(crate) fn extract_with_tol(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>, tol: f64) -> Result<MultiplierRep> {
    let n = group.order();
    if matrices.len() != n {
        return Err(Error::Validation(format!("{} matrices for a group of order {n}", matrices.len())));
    }
    let dim = matrices[0].nrows();
    if dim == 0 {
        return Err(Error::Validation("zero-dimensional representation".into()));
    }
    for (g, u) in matrices.iter().enumerate() {
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::Validation(format!("matrix for element {g} is not {dim}x{dim}")));
        }
        let defect = unitarity_defect(u);
        if defect > tol {
            return Err(Error::Validation(format!("matrix for element {g} is not unitary (defect {defect:e})")));
        }
    }
    let e = group.identity();
    if frobenius(&(&matrices[e] - identity(dim))) > tol {
        return Err(Error::Validation("u(e) is not the identity".into()));
    }
    let mut table = vec![vec![PhaseValue::ONE; n]; n];
    for g in 0..n {
        for h in 0..n {
            let gh = group.mul(g, h);
            let prod = &matrices[g] * &matrices[h];
            let z = (&prod * matrices[gh].adjoint()).trace() / dim as f64;
            if (z.norm() - 1.0).abs() > tol {
                return Err(Error::Validation(format!(
                    "u({g})u({h}) is not proportional to u({gh}): |μ| = {}",
                    z.norm()
                )));
            }
            let mu = z / z.norm();
            let residual = frobenius(&(prod - &matrices[gh] * mu));
            if residual > tol {
                return Err(Error::Validation(format!("multiplier residual {residual:e} at ({g}, {h})")));
            }
            table[g][h] = PhaseValue::from_complex(mu);
        }
    }
    let multiplier = Cocycle::new(group.clone(), table)?;
    debug_assert!(check_cocycle(&multiplier).is_empty());
    Ok(MultiplierRep { group, matrices, multiplier })
}

impl MultiplierRep {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn multiplier(&self) -> &Cocycle {
        &self.multiplier
    }

    /// Largest deviation from `u(g)u(h) = μ(g,h)u(gh)` over all pairs.
    pub fn residual(&self) -> f64 {
        let g = &self.group;
        let mut worst: f64 = 0.0;
        for a in g.elements() {
            for b in g.elements() {
                let lhs = &self.matrices[a] * &self.matrices[b];
                let rhs = &self.matrices[g.mul(a, b)] * self.multiplier.get(a, b).to_complex();
                worst = worst.max(frobenius(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Multiply `u(g)` by `λ(g)`; the multiplier changes by the coboundary `dλ`.
    pub fn regauge(&self, lambda: &[PhaseValue]) -> Result<MultiplierRep> {
        let mats = self.matrices.iter().zip(lambda).map(|(u, l)| u * l.to_complex()).collect();
        extract_multiplier(self.group.clone(), mats)
    }

    /// `u(g) -> V u(g) V†` for a unitary `V`.
    pub fn basis_change(&self, v: &CMatrix) -> Result<MultiplierRep> {
        let mats = self.matrices.iter().map(|u| v * u * v.adjoint()).collect();
        extract_multiplier(self.group.clone(), mats)
    }

    /// Dimension of the commutant `{X : X u(g) = u(g) X}`; 1 iff irreducible.
    pub fn commutant_dimension(&self) -> usize {
        let d = self.dim();
        let eye = identity(d);
        let blocks: Vec<CMatrix> =
            self.matrices.iter().map(|u| kron(&eye, u) - kron(&u.transpose(), &eye)).collect();
        let mut stacked = CMatrix::zeros(d * d * blocks.len(), d * d);
        for (k, b) in blocks.iter().enumerate() {
            stacked.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(b);
        }
        let svd = stacked.svd(false, false);
        svd.singular_values.iter().filter(|&&s| s < 1e-8).count()
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            group: self.group.name().to_string(),
            dim: self.dim(),
            matrices: self.matrices.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn from_json(j: &RepJson, group: Arc<FiniteGroup>) -> Result<Self> {
        let mats = j.matrices.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>>>()?;
        if mats.iter().any(|m| m.nrows() != j.dim) {
            return Err(Error::Validation(format!("matrices do not match dim {}", j.dim)));
        }
        extract_multiplier(group, mats)
    }
}

/// Elementwise Kronecker product; the multiplier is the product cocycle.
pub fn rep_tensor(a: &MultiplierRep, b: &MultiplierRep) -> Result<MultiplierRep> {
    if !a.group.same_table(&b.group) {
        return Err(Error::GroupMismatch(a.group.name().into(), b.group.name().into()));
    }
    let matrices = a.matrices.iter().zip(&b.matrices).map(|(x, y)| kron(x, y)).collect();
    let multiplier = a.multiplier.product(&b.multiplier)?;
    Ok(MultiplierRep { group: a.group.clone(), matrices, multiplier })
}

/// Entrywise complex conjugate; the multiplier is the conjugate cocycle.
pub fn rep_conjugate(a: &MultiplierRep) -> MultiplierRep {
    MultiplierRep {
        group: a.group.clone(),
        matrices: a.matrices.iter().map(|u| u.map(|z| z.conj())).collect(),
        multiplier: a.multiplier.inverse(),
    }
}

/// The μ-twisted regular representation `v(g) e_k = μ(g,k) e_{gk}` of dimension `|G|`.
pub fn regular_projective_rep(mu: &Cocycle) -> Result<MultiplierRep> {
    if !mu.is_exact() {
        return Err(Error::Validation("regular projective representation needs an exact cocycle".into()));
    }
    if !mu.is_normalized() {
        return Err(Error::Validation("regular projective representation needs a normalized cocycle".into()));
    }
    if let Some(&(a, b, c)) = check_cocycle(mu).first() {
        return Err(Error::NotCocycle(a, b, c));
    }
    let group = mu.group().clone();
    let n = group.order();
    let matrices = (0..n)
        .map(|g| {
            let mut v = CMatrix::zeros(n, n);
            for k in 0..n {
                v[(group.mul(g, k), k)] = mu.get(g, k).to_complex();
            }
            v
        })
        .collect();
    Ok(MultiplierRep { group, matrices, multiplier: mu.clone() })
}

/// Wrap matrices with a known exact multiplier after verifying it.
pub fn with_multiplier(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>, multiplier: Cocycle) -> Result<MultiplierRep> {
    let rep = MultiplierRep { group, matrices, multiplier };
    let residual = rep.residual();
    if residual > EXTRACTION_TOL {
        return Err(Error::Validation(format!("matrices do not realize the given multiplier (residual {residual:e})")));
    }
    Ok(rep)
}

/// Pauli assignment on `Z2xZ2`: `(0,0) -> 1, (1,0) -> X, (0,1) -> Z, (1,1) -> XZ`.
pub fn pauli_rep() -> MultiplierRep {
    let group = Arc::new(FiniteGroup::catalog("Z2xZ2").expect("catalog"));
    let (x, _, z) = crate::linalg::pauli();
    let mats = vec![identity(2), x.clone(), z.clone(), &x * &z];
    extract_multiplier(group, mats).expect("Pauli matrices form a projective representation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{classify, compute_h2};
    use crate::linalg::{random_unitary, spin_matrices, unitary_exp};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_multiplier() {
        let p = pauli_rep();
        assert!(check_cocycle(p.multiplier()).is_empty());
        let class = classify(p.multiplier()).unwrap();
        assert!(!class.is_trivial());
        let beta = p.multiplier().bicharacter();
        assert!(beta[1][2].approx_eq(&PhaseValue::exact(1, 2), 1e-12));
        assert_eq!(p.commutant_dimension(), 1);
    }

    #[test]
    fn linear_rep_has_trivial_multiplier() {
        let g = Arc::new(FiniteGroup::catalog("Z2xZ2").unwrap());
        let diag = |a: f64, b: f64| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0)]));
        let lin = extract_multiplier(g, vec![identity(2), diag(1.0, -1.0), diag(-1.0, 1.0), diag(-1.0, -1.0)]).unwrap();
        assert!(lin.multiplier().table().iter().flatten().all(|p| p.is_one(1e-12)));
    }

    #[test]
    fn spin_half_rotations_are_projective() {
        let g = Arc::new(FiniteGroup::catalog("Z2xZ2").unwrap());
        let (sx, sy, sz) = spin_matrices(1);
        let mats = vec![identity(2), unitary_exp(&sx, std::f64::consts::PI), unitary_exp(&sy, std::f64::consts::PI), unitary_exp(&sz, std::f64::consts::PI)];
        let rep = extract_multiplier(g, mats).unwrap();
        assert!(!classify(rep.multiplier()).unwrap().is_trivial());
    }

    #[test]
    fn non_projective_input_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        assert!(extract_multiplier(g.clone(), vec![identity(3), u]).is_err());
        let not_unitary = identity(2) * C64::new(2.0, 0.0);
        assert!(extract_multiplier(g, vec![identity(2), not_unitary]).is_err());
    }

    #[test]
    fn tensor_and_conjugate_classes() {
        let p = pauli_rep();
        assert!(classify(rep_tensor(&p, &p).unwrap().multiplier()).unwrap().is_trivial());
        assert!(classify(rep_tensor(&p, &rep_conjugate(&p)).unwrap().multiplier()).unwrap().is_trivial());
        let cc = rep_conjugate(&rep_conjugate(&p));
        for (a, b) in cc.matrices().iter().zip(p.matrices()) {
            assert!(frobenius(&(a - b)) < 1e-15);
        }
        let one = extract_multiplier(p.group().clone(), vec![identity(1); 4]).unwrap();
        assert_eq!(classify(rep_tensor(&p, &one).unwrap().multiplier()).unwrap(), classify(p.multiplier()).unwrap());
        assert_eq!(classify(rep_conjugate(&p).multiplier()).unwrap(), classify(p.multiplier()).unwrap());
    }

    #[test]
    fn gauge_covariance() {
        let p = pauli_rep();
        let class = classify(p.multiplier()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut lambda: Vec<PhaseValue> = (0..4).map(|_| PhaseValue::from_angle(rng.gen::<f64>() * 6.3)).collect();
            lambda[0] = PhaseValue::ONE;
            let r = p.regauge(&lambda).unwrap();
            let expected = p.multiplier().product(&Cocycle::coboundary(p.group().clone(), &lambda).unwrap()).unwrap();
            assert!(r.multiplier().approx_eq(&expected, 1e-9));
            // regauged multipliers are not roots of unity; remove the gauge by re-fixing u(g) phases
            let fixed = fix_phases(&r);
            assert_eq!(classify(fixed.multiplier()).unwrap(), class);
        }
    }

    fn fix_phases(r: &MultiplierRep) -> MultiplierRep {
        let mats = r
            .matrices()
            .iter()
            .map(|u| {
                let det = u.determinant();
                u * C64::from_polar(1.0, -det.arg() / u.nrows() as f64)
            })
            .collect();
        extract_multiplier(r.group().clone(), mats).unwrap()
    }

    #[test]
    fn regular_rep_roundtrip() {
        for name in ["Z2xZ2", "Z3xZ3", "D4", "Z2xZ2xZ2", "Z4xZ2"] {
            let g = Arc::new(FiniteGroup::catalog(name).unwrap());
            let h2 = Arc::new(compute_h2(g.clone()).unwrap());
            for class in h2.all_classes() {
                let v = regular_projective_rep(class.representative()).unwrap();
                let extracted = extract_multiplier(g.clone(), v.matrices().to_vec()).unwrap();
                assert_eq!(h2.classify(extracted.multiplier()).unwrap(), class);
            }
        }
        let trivial = regular_projective_rep(&Cocycle::trivial(Arc::new(FiniteGroup::cyclic(3).unwrap()))).unwrap();
        for m in trivial.matrices() {
            assert!(m.iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0)));
        }
    }

    #[test]
    fn json_roundtrip() {
        let p = pauli_rep();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back = MultiplierRep::from_json(&serde_json::from_str(&j).unwrap(), p.group().clone()).unwrap();
        assert!(back.multiplier().approx_eq(p.multiplier(), 1e-12));
    }
}
