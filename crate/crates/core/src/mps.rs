//! Uniform matrix product states with an on-site group action.
//!
//! A tensor is stored as `d` matrices `A^i` of size `D×D`; the state is
//! `Σ tr(… A^{i_1} A^{i_2} …) |… i_1 i_2 …⟩`. The on-site action of an operator
//! `O` is `(O·A)^i = Σ_j O_ij A^j`. The (twisted) transfer map is
//! `E_O(X) = Σ_ij O_ij A^j X (A^i)†`, whose dense matrix in column-major
//! vectorization is `Σ_ij O_ij conj(A^i) ⊗ A^j`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detector::{CompactDetectorSpec, DetectorKind};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{
    eigenvalues_by_modulus, frobenius, hermitian_eigen, hermitian_function, identity, kron, random_matrix,
    unitarity_defect, CMatrix,
};

/// Tolerance for left-canonical form and on-site representation checks.
pub const CANONICAL_TOL: f64 = 1e-10;
/// Minimal relative spectral gap of the transfer map for injectivity.
pub const INJECTIVITY_GAP: f64 = 1e-6;
/// Relative gap below which Schmidt values are merged into one block.
pub const SCHMIDT_BLOCK_TOL: f64 = 1e-8;
/// Largest `d^n` accepted by [`finite_chain_vector`] (`d = 4`, `n = 12`).
pub const CHAIN_VECTOR_GUARD: usize = 1 << 24;

const START_SEED: u64 = 0x7f4a_7c15;

#[derive(Clone, Copy, Debug)]
pub struct IterationOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { max_iterations: 10_000, tolerance: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct SymmetricMPS {
    label: String,
    tensor: Vec<CMatrix>,
    group: Arc<FiniteGroup>,
    onsite: Vec<CMatrix>,
    detector: Option<DetectorKind>,
    canonical: bool,
    injective: bool,
}

#[derive(Clone, Debug)]
pub struct TransferFixedPoint {
    pub eigenvalue: C64,
    pub left: CMatrix,
    pub right: CMatrix,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    /// Non-increasing, summing to one.
    pub values: Vec<f64>,
    /// Half-open index ranges of (numerically) equal values.
    pub blocks: Vec<std::ops::Range<usize>>,
}

impl SymmetricMPS {
    /// Validate shapes and that `onsite` is a unitary linear representation of `group`.
    pub fn new(label: impl Into<String>, tensor: Vec<CMatrix>, group: Arc<FiniteGroup>, onsite: Vec<CMatrix>) -> Result<Self> {
        let d = tensor.len();
        if d == 0 {
            return Err(Error::Validation("tensor has no physical components".into()));
        }
        let bond = tensor[0].nrows();
        if bond == 0 || tensor.iter().any(|a| a.nrows() != bond || a.ncols() != bond) {
            return Err(Error::Validation("tensor components must all be DxD with D >= 1".into()));
        }
        if onsite.len() != group.order() {
            return Err(Error::Validation(format!("{} on-site matrices for a group of order {}", onsite.len(), group.order())));
        }
        for (g, u) in onsite.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::Validation(format!("on-site matrix {g} is not {d}x{d}")));
            }
            if unitarity_defect(u) > CANONICAL_TOL {
                return Err(Error::Validation(format!("on-site matrix {g} is not unitary")));
            }
        }
        for a in group.elements() {
            for b in group.elements() {
                if frobenius(&(&onsite[a] * &onsite[b] - &onsite[group.mul(a, b)])) > CANONICAL_TOL {
                    return Err(Error::Validation(format!("on-site action is not a linear representation at ({a}, {b})")));
                }
            }
        }
        Ok(SymmetricMPS { label: label.into(), tensor, group, onsite, detector: None, canonical: false, injective: false })
    }

    /// Use the realizations of a compact-group detector as the on-site action.
    pub fn with_detector(label: impl Into<String>, tensor: Vec<CMatrix>, spec: &CompactDetectorSpec) -> Result<Self> {
        let mut m = SymmetricMPS::new(label, tensor, spec.subgroup().clone(), spec.realizations().to_vec())?;
        m.detector = Some(spec.kind());
        Ok(m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn phys_dim(&self) -> usize {
        self.tensor.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.tensor[0].nrows()
    }

    pub fn tensor(&self) -> &[CMatrix] {
        &self.tensor
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn onsite(&self) -> &[CMatrix] {
        &self.onsite
    }

    pub fn detector(&self) -> Option<DetectorKind> {
        self.detector
    }

    pub fn set_detector(&mut self, kind: Option<DetectorKind>) {
        self.detector = kind;
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    /// Same state in another virtual basis: `A^i -> V A^i V†`.
    pub fn rotate_virtual(&self, v: &CMatrix) -> SymmetricMPS {
        let mut out = self.clone();
        out.tensor = self.tensor.iter().map(|a| v * a * v.adjoint()).collect();
        out
    }

    /// `E_O(X) = Σ_ij O_ij A^j X (A^i)†`; `None` is the identity operator.
    pub fn apply_transfer(&self, x: &CMatrix, op: Option<&CMatrix>) -> CMatrix {
        let bond = self.bond_dim();
        let mut out = CMatrix::zeros(bond, bond);
        match op {
            None => {
                for a in &self.tensor {
                    out += a * x * a.adjoint();
                }
            }
            Some(o) => {
                for (i, ai) in self.tensor.iter().enumerate() {
                    let mut acted = CMatrix::zeros(bond, bond);
                    for (j, aj) in self.tensor.iter().enumerate() {
                        let w = o[(i, j)];
                        if w != C64::default() {
                            acted += aj * w;
                        }
                    }
                    out += acted * x * ai.adjoint();
                }
            }
        }
        out
    }

    /// The adjoint map `Y -> Σ_ij conj(O_ij) (A^j)† Y A^i`.
    pub fn apply_transfer_adjoint(&self, y: &CMatrix, op: Option<&CMatrix>) -> CMatrix {
        let bond = self.bond_dim();
        let mut out = CMatrix::zeros(bond, bond);
        match op {
            None => {
                for a in &self.tensor {
                    out += a.adjoint() * y * a;
                }
            }
            Some(o) => {
                for (i, ai) in self.tensor.iter().enumerate() {
                    let mut acted = CMatrix::zeros(bond, bond);
                    for (j, aj) in self.tensor.iter().enumerate() {
                        let w = o[(i, j)].conj();
                        if w != C64::default() {
                            acted += aj.adjoint() * w;
                        }
                    }
                    out += acted * y * ai;
                }
            }
        }
        out
    }

    /// Dense `D²×D²` matrix of `E_O` (column-major vectorization).
    pub fn transfer_matrix(&self, op: Option<&CMatrix>) -> CMatrix {
        let bond = self.bond_dim();
        let mut t = CMatrix::zeros(bond * bond, bond * bond);
        for (i, ai) in self.tensor.iter().enumerate() {
            let ci = ai.map(|z| z.conj());
            for (j, aj) in self.tensor.iter().enumerate() {
                let w = match op {
                    None => {
                        if i == j {
                            C64::new(1.0, 0.0)
                        } else {
                            continue;
                        }
                    }
                    Some(o) => o[(i, j)],
                };
                if w != C64::default() {
                    t += kron(&ci, aj) * w;
                }
            }
        }
        t
    }

    /// Transfer-map eigenvalues by descending modulus.
    pub fn transfer_spectrum(&self) -> Vec<C64> {
        eigenvalues_by_modulus(&self.transfer_matrix(None))
    }

    /// Leading eigenvalue simple and separated from the rest by a relative gap.
    pub fn check_injective(&self) -> Result<()> {
        let spec = self.transfer_spectrum();
        let lead = spec[0].norm();
        if lead <= f64::EPSILON {
            return Err(Error::NonInjective("transfer map is nilpotent".into()));
        }
        if let Some(second) = spec.get(1) {
            let gap = (lead - second.norm()) / lead;
            if gap <= INJECTIVITY_GAP {
                return Err(Error::NonInjective(format!(
                    "leading transfer eigenvalue is degenerate (|λ1| = {lead:.3e}, |λ2| = {:.3e})",
                    second.norm()
                )));
            }
        }
        Ok(())
    }

    /// Left-canonical form `Σ_i (A^i)† A^i = 1` with unit leading eigenvalue.
    pub fn canonicalize(&self) -> Result<SymmetricMPS> {
        self.check_injective()?;
        let opts = IterationOptions::default();
        let bond = self.bond_dim();
        let (eta, l, _) = leading_eigen(|y| self.apply_transfer_adjoint(y, None), bond, None, opts, || {
            self.transfer_matrix(None).adjoint()
        })?;
        let eta = eta.re;
        if eta <= 0.0 {
            return Err(Error::NonInjective("leading transfer eigenvalue is not positive".into()));
        }
        let l = hermitian_phase_fix(&l);
        let l = &l * C64::new(bond as f64 / l.trace().re, 0.0);
        let (vals, _) = hermitian_eigen(&l);
        if vals.last().copied().unwrap_or(0.0) <= 1e-14 {
            return Err(Error::NonInjective("left fixed point is not positive definite".into()));
        }
        let sqrt_l = hermitian_function(&l, f64::sqrt);
        let inv_sqrt_l = hermitian_function(&l, |x| 1.0 / x.sqrt());
        let scale = C64::new(1.0 / eta.sqrt(), 0.0);
        let mut out = self.clone();
        out.tensor = self.tensor.iter().map(|a| &sqrt_l * a * &inv_sqrt_l * scale).collect();
        out.canonical = true;
        out.injective = true;
        let defect = out.left_canonical_defect();
        if defect > CANONICAL_TOL {
            return Err(Error::NonConvergence { iterations: opts.max_iterations, residual: defect });
        }
        Ok(out)
    }

    /// `‖Σ_i (A^i)† A^i − 1‖_F`.
    pub fn left_canonical_defect(&self) -> f64 {
        frobenius(&(self.apply_transfer_adjoint(&identity(self.bond_dim()), None) - identity(self.bond_dim())))
    }

    fn require_canonical(&self) -> Result<()> {
        if self.canonical {
            Ok(())
        } else {
            Err(Error::NotCanonical)
        }
    }

    /// Right fixed point `Σ_i A^i r (A^i)† = r` of a canonical state, Hermitian with unit trace.
    pub fn right_fixed_point(&self) -> Result<CMatrix> {
        self.require_canonical()?;
        let fp = transfer_fixed_point(self, None)?;
        Ok(fp.right)
    }

    /// Blocked tensor of `k` consecutive sites, `A^{(i_1…i_k)} = A^{i_1}…A^{i_k}`.
    pub fn blocked(&self, k: usize) -> Result<SymmetricMPS> {
        if k == 0 {
            return Err(Error::Validation("cannot block zero sites".into()));
        }
        let d = self.phys_dim();
        let mut tensor = self.tensor.clone();
        let mut onsite = self.onsite.clone();
        for _ in 1..k {
            tensor = tensor.iter().flat_map(|a| self.tensor.iter().map(move |b| a * b)).collect();
            onsite = onsite.iter().zip(&self.onsite).map(|(u, v)| kron(u, v)).collect();
        }
        debug_assert_eq!(tensor.len(), d.pow(k as u32));
        let mut out = SymmetricMPS::new(format!("{}^{k}", self.label), tensor, self.group.clone(), onsite)?;
        out.detector = self.detector;
        Ok(out)
    }

    /// Number of sites per tensor is not tracked; callers blocking sites must scale distances.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        let r = self.right_fixed_point()?;
        Ok(self.apply_transfer(&r, Some(op)).trace())
    }
}

/// Make an eigenmatrix of a positive map Hermitian with positive trace.
fn hermitian_phase_fix(m: &CMatrix) -> CMatrix {
    let t = m.trace();
    let phase = if t.norm() > 0.0 { t.conj() / t.norm() } else { C64::new(1.0, 0.0) };
    let m = m * phase;
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Leading eigenpair of a linear map on `D×D` matrices.
///
/// Power iteration from a fixed pseudo-random start; if it stalls (for instance
/// because two eigenvalues share the leading modulus), shifted inverse iteration
/// at the leading eigenvalue of the dense matrix finishes the job.
fn leading_eigen(
    apply: impl Fn(&CMatrix) -> CMatrix,
    bond: usize,
    start: Option<CMatrix>,
    opts: IterationOptions,
    dense: impl Fn() -> CMatrix,
) -> Result<(C64, CMatrix, f64)> {
    let mut x = start.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
        random_matrix(bond, bond, &mut rng)
    });
    x /= C64::new(frobenius(&x), 0.0);
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let y = apply(&x);
        let lambda = inner(&x, &y);
        residual = frobenius(&(&y - &x * lambda));
        if residual < opts.tolerance {
            return Ok((lambda, x, residual));
        }
        let norm = frobenius(&y);
        if norm < 1e-300 {
            return Ok((C64::default(), x, 0.0));
        }
        x = y / C64::new(norm, 0.0);
    }
    inverse_iteration(&dense(), bond, opts).ok_or(Error::NonConvergence { iterations: opts.max_iterations, residual })
}

fn inverse_iteration(t: &CMatrix, bond: usize, opts: IterationOptions) -> Option<(C64, CMatrix, f64)> {
    let lead = *eigenvalues_by_modulus(t).first()?;
    let n = t.nrows();
    let shift = lead + C64::new(1e-10 * lead.norm().max(1.0), 0.0);
    let lu = (t - CMatrix::identity(n, n) * shift).lu();
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v = random_matrix(n, 1, &mut rng);
    for _ in 0..50 {
        let w = lu.solve(&v)?;
        let norm = frobenius(&w);
        v = w / C64::new(norm, 0.0);
        let tv = t * &v;
        let lambda = (v.adjoint() * &tv)[(0, 0)];
        let residual = frobenius(&(&tv - &v * lambda));
        if residual < opts.tolerance.max(1e-11) {
            let x = CMatrix::from_column_slice(bond, bond, v.as_slice());
            return Some((lambda, x, residual));
        }
    }
    None
}

/// Leading eigenpair of the (optionally twisted) transfer map of a canonical state.
pub fn transfer_fixed_point(m: &SymmetricMPS, twist: Option<&CMatrix>) -> Result<TransferFixedPoint> {
    transfer_fixed_point_with(m, twist, IterationOptions::default())
}

pub fn transfer_fixed_point_with(m: &SymmetricMPS, twist: Option<&CMatrix>, opts: IterationOptions) -> Result<TransferFixedPoint> {
    m.require_canonical()?;
    if let Some(t) = twist {
        if t.nrows() != m.phys_dim() || t.ncols() != m.phys_dim() {
            return Err(Error::Validation("twist must be a dxd matrix".into()));
        }
    }
    let bond = m.bond_dim();
    let (lambda, right, residual) =
        leading_eigen(|x| m.apply_transfer(x, twist), bond, None, opts, || m.transfer_matrix(twist))?;
    let (_, left, _) = leading_eigen(|y| m.apply_transfer_adjoint(y, twist), bond, None, opts, || {
        m.transfer_matrix(twist).adjoint()
    })?;
    let (left, right) = if twist.is_none() {
        let l = hermitian_phase_fix(&left);
        let l = &l * C64::new(bond as f64 / l.trace().re, 0.0);
        let r = hermitian_phase_fix(&right);
        let norm = inner(&l, &r).re;
        (l, r / C64::new(norm, 0.0))
    } else {
        let norm = inner(&left, &right);
        if norm.norm() > 1e-12 {
            (left, right / norm)
        } else {
            (left, right)
        }
    };
    Ok(TransferFixedPoint { eigenvalue: lambda, left, right, residual })
}

/// `⟨A_0 B_r⟩ − ⟨A_0⟩⟨B_r⟩` for `r >= 1`.
pub fn connected_correlation(m: &SymmetricMPS, op_a: &CMatrix, op_b: &CMatrix, r: usize) -> Result<C64> {
    if r == 0 {
        return Err(Error::Validation("separation must be at least 1".into()));
    }
    let rho = m.right_fixed_point()?;
    let mut x = m.apply_transfer(&rho, Some(op_b));
    let eb = x.trace();
    for _ in 1..r {
        x = m.apply_transfer(&x, None);
    }
    let ab = m.apply_transfer(&x, Some(op_a)).trace();
    let ea = m.apply_transfer(&rho, Some(op_a)).trace();
    Ok(ab - ea * eb)
}

/// Half-infinite bipartition spectrum: eigenvalues of the right fixed point of a canonical state.
pub fn schmidt_spectrum(m: &SymmetricMPS) -> Result<SchmidtSpectrum> {
    let r = m.right_fixed_point()?;
    let (vals, _) = hermitian_eigen(&r);
    Ok(spectrum_from_values(vals))
}

pub(crate) fn spectrum_from_values(vals: Vec<f64>) -> SchmidtSpectrum {
    let vals: Vec<f64> = vals.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = vals.iter().sum();
    let values: Vec<f64> = vals.iter().map(|v| v / total).collect();
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || (values[start] - values[i]).abs() > SCHMIDT_BLOCK_TOL * values[start].max(f64::MIN_POSITIVE);
        if split {
            blocks.push(start..i);
            start = i;
        }
    }
    SchmidtSpectrum { values, blocks }
}

/// Right fixed point eigenbasis: Schmidt values (descending) and the matching columns.
pub fn schmidt_basis(m: &SymmetricMPS) -> Result<(SchmidtSpectrum, CMatrix)> {
    let r = m.right_fixed_point()?;
    let (vals, vecs) = hermitian_eigen(&r);
    Ok((spectrum_from_values(vals), vecs))
}

/// Explicit `d^n` coefficient vector `c(i_1…i_n) = l^T A^{i_1}…A^{i_n} r`, normalized.
/// Index `i_1` is the most significant digit.
pub fn finite_chain_vector(m: &SymmetricMPS, n_sites: usize, left: &[C64], right: &[C64]) -> Result<Vec<C64>> {
    let d = m.phys_dim();
    let bond = m.bond_dim();
    if n_sites == 0 || n_sites > 12 || d > 4 || d.checked_pow(n_sites as u32).map_or(true, |s| s > CHAIN_VECTOR_GUARD) {
        return Err(Error::Guard(format!("finite chains need 1 <= n <= 12 and d <= 4 (got n = {n_sites}, d = {d})")));
    }
    if left.len() != bond || right.len() != bond {
        return Err(Error::Validation("boundary vectors must have the bond dimension".into()));
    }
    // rows: partial configurations; each row is a bond-space row vector
    let mut partial: Vec<Vec<C64>> = vec![left.to_vec()];
    for _ in 0..n_sites {
        let mut next = Vec::with_capacity(partial.len() * d);
        for row in &partial {
            for a in &m.tensor {
                let v: Vec<C64> = (0..bond).map(|c| (0..bond).map(|k| row[k] * a[(k, c)]).sum()).collect();
                next.push(v);
            }
        }
        partial = next;
    }
    let mut psi: Vec<C64> = partial.iter().map(|row| row.iter().zip(right).map(|(a, b)| a * b).sum()).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::Validation("boundary vectors project the chain onto zero".into()));
    }
    for z in &mut psi {
        *z /= norm;
    }
    Ok(psi)
}

/// `⟨ψ| O_i O'_j |ψ⟩` for a chain vector with `n` sites of dimension `d` (sites `i != j`).
pub fn chain_two_point(psi: &[C64], d: usize, n: usize, i: usize, op_i: &CMatrix, j: usize, op_j: &CMatrix) -> C64 {
    let stride = |s: usize| d.pow((n - 1 - s) as u32);
    let (si, sj) = (stride(i), stride(j));
    let mut total = C64::default();
    for (idx, amp) in psi.iter().enumerate() {
        if *amp == C64::default() {
            continue;
        }
        let (a, b) = ((idx / si) % d, (idx / sj) % d);
        let base = idx - a * si - b * sj;
        for a2 in 0..d {
            for b2 in 0..d {
                let w = op_i[(a2, a)] * op_j[(b2, b)];
                if w != C64::default() {
                    total += psi[base + a2 * si + b2 * sj].conj() * w * amp;
                }
            }
        }
    }
    total
}

/// `⟨ψ| O_i |ψ⟩` for a chain vector.
pub fn chain_one_point(psi: &[C64], d: usize, n: usize, i: usize, op: &CMatrix) -> C64 {
    let si = d.pow((n - 1 - i) as u32);
    let mut total = C64::default();
    for (idx, amp) in psi.iter().enumerate() {
        let a = (idx / si) % d;
        let base = idx - a * si;
        for a2 in 0..d {
            let w = op[(a2, a)];
            if w != C64::default() {
                total += psi[base + a2 * si].conj() * w * amp;
            }
        }
    }
    total
}

/// Stack two states: physical and bond Kronecker products, tensor on-site action.
pub fn stack_states(a: &SymmetricMPS, b: &SymmetricMPS) -> Result<SymmetricMPS> {
    if !a.group.same_table(&b.group) {
        return Err(Error::GroupMismatch(a.group.name().into(), b.group.name().into()));
    }
    let tensor = a.tensor.iter().flat_map(|x| b.tensor.iter().map(move |y| kron(x, y))).collect();
    let onsite = a.onsite.iter().zip(&b.onsite).map(|(u, v)| kron(u, v)).collect();
    let mut out = SymmetricMPS::new(format!("{}⊗{}", a.label, b.label), tensor, a.group.clone(), onsite)?;
    out.detector = if a.detector == b.detector { a.detector } else { None };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_unitary, spin_matrices};

    fn aklt() -> SymmetricMPS {
        let s = |x: f64| x.sqrt();
        let plus = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s(2.0 / 3.0), 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let zero = CMatrix::from_row_slice(2, 2, &[c(-s(1.0 / 3.0), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s(1.0 / 3.0), 0.0)]);
        let minus = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(-s(2.0 / 3.0), 0.0), c(0.0, 0.0)]);
        SymmetricMPS::with_detector("aklt", vec![plus, zero, minus], &CompactDetectorSpec::so3(2)).unwrap()
    }

    #[test]
    fn aklt_canonical_form_and_fixed_point() {
        let m = aklt().canonicalize().unwrap();
        assert!(m.left_canonical_defect() < 1e-10);
        let r = m.right_fixed_point().unwrap();
        assert!(frobenius(&(r - identity(2) * c(0.5, 0.0))) < 1e-10);
        let spec = schmidt_spectrum(&m).unwrap();
        assert!((spec.values[0] - 0.5).abs() < 1e-10 && (spec.values[1] - 0.5).abs() < 1e-10);
        assert_eq!(spec.blocks, vec![0..2]);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tensor: Vec<CMatrix> = (0..3).map(|_| random_matrix(4, 4, &mut rng)).collect();
        let g = Arc::new(FiniteGroup::cyclic(1).unwrap());
        let m = SymmetricMPS::new("random", tensor, g, vec![identity(3)]).unwrap();
        let once = m.canonicalize().unwrap();
        assert!(once.left_canonical_defect() < 1e-10);
        let twice = once.canonicalize().unwrap();
        for (a, b) in once.tensor().iter().zip(twice.tensor()) {
            assert!(frobenius(&(a - b)) < 1e-10);
        }
        let spec = schmidt_spectrum(&once).unwrap();
        assert!((spec.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(spec.values[0] >= 1.0 / 16.0);
    }

    #[test]
    fn canonical_state_expectations_are_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let tensor: Vec<CMatrix> = (0..2).map(|_| random_matrix(3, 3, &mut rng)).collect();
        let g = Arc::new(FiniteGroup::cyclic(1).unwrap());
        let m = SymmetricMPS::new("random", tensor, g, vec![identity(2)]).unwrap();
        let can = m.canonicalize().unwrap();
        let (x, _, z) = crate::linalg::pauli();
        // general-gauge formula ⟨X_0 Z_1⟩ = ⟨l, E_X(E_Z(r))⟩ / (η² ⟨l, r⟩)
        let opts = IterationOptions::default();
        let (eta, r, _) = leading_eigen(|y| m.apply_transfer(y, None), 3, None, opts, || m.transfer_matrix(None)).unwrap();
        let (_, l, _) =
            leading_eigen(|y| m.apply_transfer_adjoint(y, None), 3, None, opts, || m.transfer_matrix(None).adjoint()).unwrap();
        let raw = inner(&l, &m.apply_transfer(&m.apply_transfer(&r, Some(&z)), Some(&x))) / (eta * eta * inner(&l, &r));
        let rc = can.right_fixed_point().unwrap();
        let canonical = can.apply_transfer(&can.apply_transfer(&rc, Some(&z)), Some(&x)).trace();
        assert!((raw - canonical).norm() < 1e-8);
    }

    #[test]
    fn non_injective_is_refused() {
        let a0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let a1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let g = Arc::new(FiniteGroup::cyclic(1).unwrap());
        let ghz = SymmetricMPS::new("ghz", vec![a0, a1], g, vec![identity(2)]).unwrap();
        assert!(matches!(ghz.canonicalize(), Err(Error::NonInjective(_))));
    }

    #[test]
    fn twisted_fixed_points() {
        let m = aklt().canonicalize().unwrap();
        let fp = transfer_fixed_point(&m, None).unwrap();
        assert!((fp.eigenvalue - c(1.0, 0.0)).norm() < 1e-10);
        assert!(frobenius(&(fp.left.clone() - identity(2) * fp.left[(0, 0)])) < 1e-10);
        assert!((inner(&fp.left, &fp.right) - c(1.0, 0.0)).norm() < 1e-10);
        for u in m.onsite() {
            let t = transfer_fixed_point(&m, Some(u)).unwrap();
            assert!((t.eigenvalue.norm() - 1.0).abs() < 1e-8);
        }
        let p = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]));
        let t = transfer_fixed_point(&m, Some(&p)).unwrap();
        assert!(t.eigenvalue.norm() < 1.0 - 1e-3);
        assert!(t.residual < 1e-9);
    }

    #[test]
    fn aklt_correlations_decay_by_one_third() {
        let m = aklt().canonicalize().unwrap();
        let (_, _, sz) = spin_matrices(2);
        let mut prev = connected_correlation(&m, &sz, &sz, 1).unwrap().norm();
        for r in 2..=10 {
            let cur = connected_correlation(&m, &sz, &sz, r).unwrap().norm();
            assert!((cur / prev - 1.0 / 3.0).abs() < 1e-6);
            prev = cur;
        }
        let spec = m.transfer_spectrum();
        assert!((spec[1].norm() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn finite_chain_matches_transfer_values() {
        let m = aklt().canonicalize().unwrap();
        let (_, _, sz) = spin_matrices(2);
        let exact = connected_correlation(&m, &sz, &sz, 2).unwrap().re;
        let mut errors = Vec::new();
        for n in [4usize, 6, 8, 10] {
            let psi = finite_chain_vector(&m, n, &[c(1.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            let i = n / 2 - 1;
            let val = chain_two_point(&psi, 3, n, i, &sz, i + 2, &sz)
                - chain_one_point(&psi, 3, n, i, &sz) * chain_one_point(&psi, 3, n, i + 2, &sz);
            errors.push((val.re - exact).abs());
        }
        assert!(errors[2] < 1e-3);
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
        assert!(finite_chain_vector(&m, 13, &[c(1.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn rotation_preserves_spectrum() {
        let m = aklt().canonicalize().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_unitary(2, &mut rng);
        let rotated = m.rotate_virtual(&v);
        assert!(rotated.left_canonical_defect() < 1e-10);
        let s = schmidt_spectrum(&rotated).unwrap();
        assert!((s.values[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn product_state() {
        let g = Arc::new(FiniteGroup::cyclic(1).unwrap());
        let m = SymmetricMPS::new("p", vec![identity(1) * c(0.6, 0.0), identity(1) * c(0.0, 0.8)], g, vec![identity(2)])
            .unwrap()
            .canonicalize()
            .unwrap();
        let (x, _, z) = crate::linalg::pauli();
        assert!(connected_correlation(&m, &x, &z, 1).unwrap().norm() < 1e-12);
        assert_eq!(schmidt_spectrum(&m).unwrap().values, vec![1.0]);
        let psi = finite_chain_vector(&m, 3, &[c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap();
        assert!((psi[0] - c(0.216, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn stacking_dimensions() {
        let a = aklt();
        let s = stack_states(&a, &a).unwrap();
        assert_eq!((s.phys_dim(), s.bond_dim()), (9, 4));
        assert_eq!(s.detector(), Some(DetectorKind::SO3));
    }
}
