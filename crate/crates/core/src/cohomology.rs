//! Two-cocycles over U(1) for finite groups and the group `H²(G, U(1))`.
//!
//! Exact computations work with cochains valued in `N`-th roots of unity,
//! `N = |G|`, written additively as exponent vectors in `Z_N^{N²}` indexed by
//! `(g, h) -> g·N + h`. Every class has such a representative. Two such
//! cocycles are cohomologous in `U(1)` iff they differ by `dν` for some `ν`
//! valued in `N²`-th roots, which is why coboundaries are computed over `Z_{N²}`
//! and then divided by `N`.

use std::collections::HashSet;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::phase::{PhaseValue, PHASE_TOL};
use crate::zmod::{self, Howell, Track, ZMat};

/// Angular tolerance when snapping numerically extracted phases to roots of unity.
pub const SNAP_TOL: f64 = 1e-6;

/// Largest group order accepted by [`compute_h2`].
pub const H2_ORDER_GUARD: usize = 64;

/// Largest search space accepted by [`brute_force_h2`].
pub const BRUTE_FORCE_GUARD: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    table: Vec<Vec<PhaseValue>>,
}

/// A cochain `ν` with `dν(g,h) = ν(g)ν(h)/ν(gh)` equal to a given cocycle.
#[derive(Clone, Debug, PartialEq)]
pub struct CoboundaryWitness {
    pub nu: Vec<PhaseValue>,
}

/// JSON form: `{"group": str, "phases": [[phase]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CocycleJson {
    pub group: String,
    pub phases: Vec<Vec<PhaseValue>>,
}

impl Cocycle {
    pub fn new(group: Arc<FiniteGroup>, table: Vec<Vec<PhaseValue>>) -> Result<Self> {
        let n = group.order();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("cocycle table must be {n}x{n}")));
        }
        Ok(Cocycle { group, table })
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Cocycle { group, table: vec![vec![PhaseValue::ONE; n]; n] }
    }

    /// Cocycle `e^{2πi x(g,h)/modulus}` from an exponent vector indexed `g·n + h`.
    pub fn from_exponents(group: Arc<FiniteGroup>, exps: &[u64], modulus: u64) -> Self {
        let n = group.order();
        assert_eq!(exps.len(), n * n);
        let table = (0..n)
            .map(|g| (0..n).map(|h| PhaseValue::exact(exps[g * n + h] as i64, modulus)).collect())
            .collect();
        Cocycle { group, table }
    }

    /// The coboundary `dν(g,h) = ν(g)ν(h)/ν(gh)`.
    pub fn coboundary(group: Arc<FiniteGroup>, nu: &[PhaseValue]) -> Result<Self> {
        let n = group.order();
        if nu.len() != n {
            return Err(Error::Validation(format!("cochain has {} values for order {n}", nu.len())));
        }
        let table = (0..n)
            .map(|g| (0..n).map(|h| nu[g].mul(&nu[h]).div(&nu[group.mul(g, h)])).collect())
            .collect();
        Ok(Cocycle { group, table })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn table(&self) -> &[Vec<PhaseValue>] {
        &self.table
    }

    pub fn get(&self, g: usize, h: usize) -> PhaseValue {
        self.table[g][h]
    }

    pub fn is_exact(&self) -> bool {
        self.table.iter().flatten().all(PhaseValue::is_exact)
    }

    pub fn is_normalized(&self) -> bool {
        let e = self.group.identity();
        self.group.elements().all(|g| self.table[e][g].is_one(PHASE_TOL) && self.table[g][e].is_one(PHASE_TOL))
    }

    fn check_group(&self, other: &Cocycle) -> Result<()> {
        if self.group.same_table(&other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(self.group.name().into(), other.group.name().into()))
        }
    }

    pub fn product(&self, other: &Cocycle) -> Result<Cocycle> {
        self.check_group(other)?;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.mul(y)).collect())
            .collect();
        Ok(Cocycle { group: self.group.clone(), table })
    }

    pub fn inverse(&self) -> Cocycle {
        let table = self.table.iter().map(|r| r.iter().map(PhaseValue::inv).collect()).collect();
        Cocycle { group: self.group.clone(), table }
    }

    /// Snap every entry to a root of unity of order dividing `max_den`.
    pub fn snap(&self, max_den: u64, tol: f64) -> Result<Cocycle> {
        let table = self
            .table
            .iter()
            .map(|r| r.iter().map(|p| p.snap(max_den, tol)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Cocycle { group: self.group.clone(), table })
    }

    /// Least common multiple of the entry denominators (exact cocycles only).
    pub fn denominator(&self) -> Option<u64> {
        self.table.iter().flatten().try_fold(1u64, |acc, p| p.denominator().map(|d| acc.lcm(&d)))
    }

    /// The antisymmetric bicharacter `β(g,h) = μ(g,h)/μ(h,g)`; a class invariant for abelian groups.
    pub fn bicharacter(&self) -> Vec<Vec<PhaseValue>> {
        let n = self.group.order();
        (0..n).map(|g| (0..n).map(|h| self.table[g][h].div(&self.table[h][g])).collect()).collect()
    }

    pub fn approx_eq(&self, other: &Cocycle, tol: f64) -> bool {
        self.group.same_table(&other.group)
            && self.table.iter().flatten().zip(other.table.iter().flatten()).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn to_json(&self) -> CocycleJson {
        CocycleJson { group: self.group.name().to_string(), phases: self.table.clone() }
    }

    pub fn from_json(j: &CocycleJson, group: Arc<FiniteGroup>) -> Result<Self> {
        Cocycle::new(group, j.phases.clone())
    }
}

/// Every triple `(g,h,k)` at which `μ(h,k)μ(g,hk) = μ(gh,k)μ(g,h)` fails.
///
/// Exact tables are compared exactly; anything approximate within [`PHASE_TOL`].
pub fn check_cocycle(mu: &Cocycle) -> Vec<(usize, usize, usize)> {
    let g = &mu.group;
    let t = &mu.table;
    let mut out = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            let ab = g.mul(a, b);
            for c in g.elements() {
                let lhs = t[b][c].mul(&t[a][g.mul(b, c)]);
                let rhs = t[ab][c].mul(&t[a][b]);
                if !lhs.approx_eq(&rhs, PHASE_TOL) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn require_cocycle(mu: &Cocycle) -> Result<()> {
    match check_cocycle(mu).first() {
        Some(&(a, b, c)) => Err(Error::NotCocycle(a, b, c)),
        None => Ok(()),
    }
}

/// Divide out the constant coboundary `μ(e,e)`; for a cocycle `μ(e,g) = μ(g,e) = μ(e,e)`.
pub fn normalize(mu: &Cocycle) -> Result<Cocycle> {
    require_cocycle(mu)?;
    let e = mu.group.identity();
    let c = mu.table[e][e];
    let table = mu.table.iter().map(|r| r.iter().map(|x| x.div(&c)).collect()).collect();
    Ok(Cocycle { group: mu.group.clone(), table })
}

/// Snap approximate entries; exact entries pass through unchanged.
fn exact_form(mu: &Cocycle, max_den: u64) -> Result<Cocycle> {
    if mu.is_exact() {
        Ok(mu.clone())
    } else {
        mu.snap(max_den, SNAP_TOL)
    }
}

/// `(δν)(g,h) = ν(g) + ν(h) - ν(gh)` as an `n² × n` matrix over `Z_m`.
fn coboundary_matrix(g: &FiniteGroup, m: u64) -> ZMat {
    let n = g.order();
    let mut d = ZMat::zeros(n * n, n, m);
    for a in 0..n {
        for b in 0..n {
            let r = a * n + b;
            d.add_signed(r, a, 1);
            d.add_signed(r, b, 1);
            d.add_signed(r, g.mul(a, b), -1);
        }
    }
    d
}

/// Row `(g,h,k)` of the cocycle-condition map on exponent vectors.
fn cocycle_row(g: &FiniteGroup, a: usize, b: usize, c: usize, m: u64) -> Vec<u64> {
    let n = g.order();
    let mut row = vec![0i64; n * n];
    row[b * n + c] += 1;
    row[g.mul(a, b) * n + c] -= 1;
    row[a * n + g.mul(b, c)] += 1;
    row[a * n + b] -= 1;
    row.into_iter().map(|x| x.rem_euclid(m as i64) as u64).collect()
}

/// Integer exponents `a` and common denominator `l` with `μ(g,h) = e^{2πi a(g,h)/l}`.
fn exponents(mu: &Cocycle, l: u64) -> Vec<u64> {
    mu.table
        .iter()
        .flatten()
        .map(|p| match *p {
            PhaseValue::Exact { num, den } => num * (l / den),
            PhaseValue::Approx { .. } => unreachable!("exact cocycle expected"),
        })
        .collect()
}

/// A witness `ν` with `dν = μ`, if `μ` is a coboundary.
///
/// Approximate entries are first snapped to roots of unity of order dividing `2|G|`.
pub fn is_coboundary(mu: &Cocycle) -> Result<Option<CoboundaryWitness>> {
    require_cocycle(mu)?;
    let n = mu.group.order() as u64;
    let mu = exact_form(mu, 2 * n)?;
    let l = mu.denominator().expect("exact").lcm(&n);
    let m = l * n;
    let a = exponents(&mu, l);
    let rhs: Vec<u64> = a.iter().map(|&x| (x * n) % m).collect();
    let d1 = coboundary_matrix(&mu.group, m);
    Ok(zmod::solve(&d1, &rhs).map(|b| {
        let nu: Vec<PhaseValue> = b.iter().map(|&x| PhaseValue::exact(x as i64, m)).collect();
        debug_assert_eq!(Cocycle::coboundary(mu.group.clone(), &nu).unwrap(), mu);
        CoboundaryWitness { nu }
    }))
}

/// Whether two cocycles on the same group differ by a coboundary.
pub fn cohomologous(a: &Cocycle, b: &Cocycle) -> Result<bool> {
    Ok(is_coboundary(&a.product(&b.inverse())?)?.is_some())
}

/// `H²(G, U(1)) ≅ Z_{d_1} × ... × Z_{d_k}` with `d_1 | d_2 | ... | d_k`, together with
/// canonical generator cocycles and the data needed to classify cocycles.
#[derive(Clone, Debug)]
pub struct H2Group {
    group: Arc<FiniteGroup>,
    divisors: Vec<u64>,
    /// Generator exponent vectors over `Z_N`, each the canonical representative of its class.
    generators: Vec<Vec<u64>>,
    /// Coboundaries valued in `N`-th roots, in Howell form.
    boundaries: Howell,
}

/// A class in `H²(G, U(1))`.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    h2: Arc<H2Group>,
    coords: Vec<u64>,
    representative: Cocycle,
}

impl PartialEq for CohomologyClass {
    fn eq(&self, other: &Self) -> bool {
        self.h2.group.same_table(&other.h2.group) && self.coords == other.coords
    }
}

impl Eq for CohomologyClass {}

/// Compute `H²(G, U(1))` by linear algebra over `Z_N`, `N = |G|`.
pub fn compute_h2(group: Arc<FiniteGroup>) -> Result<H2Group> {
    let n = group.order();
    if n > H2_ORDER_GUARD {
        return Err(Error::Guard(format!("compute_h2 accepts groups of order <= {H2_ORDER_GUARD}, got {n}")));
    }
    let big_n = n as u64;
    let cells = n * n;

    // Z: kernel of the cocycle map, via the Howell form of its (streamed) rows.
    let mut rowspace = Howell::empty(cells, big_n);
    rowspace.extend(
        (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))).map(|(a, b, c)| cocycle_row(&group, a, b, c, big_n)),
    );
    let rows: Vec<Vec<u64>> = rowspace.basis().cloned().collect();
    let mut relations = ZMat::zeros(rows.len().max(1), cells, big_n);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            relations.set(i, j, v);
        }
    }
    let snf = zmod::smith(&relations, Track { right: true, right_inv: true, ..Default::default() });
    let q = snf.right.as_ref().unwrap();
    let q_inv = snf.right_inv.as_ref().unwrap();
    // cocycle generators z_t of order e_t
    let mut z_gens: Vec<(u64, Vec<u64>, usize)> = Vec::new();
    for t in 0..cells {
        let d = snf.diag.get(t).copied().unwrap_or(0);
        let e = d.gcd(&big_n);
        if e > 1 {
            let scale = big_n / e;
            let col = q.column(t).iter().map(|&x| (x * scale) % big_n).collect();
            z_gens.push((e, col, t));
        }
    }
    let z_coords = |x: &[u64]| -> Vec<u64> {
        let y = q_inv.mul_vec(x);
        z_gens
            .iter()
            .map(|&(e, _, t)| {
                let scale = big_n / e;
                debug_assert_eq!(y[t] % scale, 0, "vector is not a cocycle");
                (y[t] / scale) % e
            })
            .collect()
    };

    // B: coboundaries landing in N-th roots: columns of δ mod N, plus δk/N for k in ker(δ mod N).
    let d1 = coboundary_matrix(&group, big_n);
    let mut b_gens: Vec<Vec<u64>> = (0..n).map(|j| d1.column(j)).collect();
    for k in zmod::kernel(&d1) {
        let mut v = vec![0i64; cells];
        for a in 0..n {
            for b in 0..n {
                v[a * n + b] = k[a] as i64 + k[b] as i64 - k[group.mul(a, b)] as i64;
            }
        }
        b_gens.push(v.iter().map(|&x| (x / n as i64).rem_euclid(n as i64) as u64).collect());
    }
    let boundaries = Howell::new(&b_gens, cells, big_n);

    // Quotient Z / B in z-coordinates.
    let r = z_gens.len();
    let mut rel_cols: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut c = vec![0u64; r];
            c[i] = z_gens[i].0 % big_n;
            c
        })
        .collect();
    rel_cols.extend(b_gens.iter().map(|b| z_coords(b)));
    let mut cyclic: Vec<(u64, Vec<u64>)> = Vec::new();
    if r > 0 {
        let mut rel = ZMat::zeros(r, rel_cols.len(), big_n);
        for (j, col) in rel_cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                rel.set(i, j, v);
            }
        }
        let snf = zmod::smith(&rel, Track { left: true, left_inv: true, ..Default::default() });
        let p_inv = snf.left_inv.as_ref().unwrap();
        for i in 0..r {
            let o = snf.diag.get(i).copied().unwrap_or(0).gcd(&big_n);
            if o > 1 {
                let c = p_inv.column(i);
                let mut x = vec![0u64; cells];
                for (t, &ct) in c.iter().enumerate() {
                    for (xv, &zv) in x.iter_mut().zip(&z_gens[t].1) {
                        *xv = ((*xv as u128 + ct as u128 * zv as u128) % big_n as u128) as u64;
                    }
                }
                cyclic.push((o, x));
            }
        }
    }

    let (divisors, gens) = invariant_factors(&cyclic, big_n);
    let generators = gens.iter().map(|g| boundaries.reduce(g)).collect();
    Ok(H2Group { group, divisors, generators, boundaries })
}

fn prime_powers(mut x: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            let mut q = 1;
            while x % p == 0 {
                x /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if x > 1 {
        out.push((x, x));
    }
    out
}

/// Regroup a direct sum of cyclic groups (order, generator) into invariant-factor form.
fn invariant_factors(cyclic: &[(u64, Vec<u64>)], m: u64) -> (Vec<u64>, Vec<Vec<u64>>) {
    let scale = |v: &[u64], k: u64| -> Vec<u64> { v.iter().map(|&x| ((x as u128 * k as u128) % m as u128) as u64).collect() };
    let mut by_prime: std::collections::BTreeMap<u64, Vec<(u64, Vec<u64>)>> = Default::default();
    for (o, g) in cyclic {
        for (p, q) in prime_powers(*o) {
            by_prime.entry(p).or_default().push((q, scale(g, o / q)));
        }
    }
    let k = by_prime.values().map(Vec::len).max().unwrap_or(0);
    for list in by_prime.values_mut() {
        list.sort_by(|a, b| b.0.cmp(&a.0));
    }
    let len = cyclic.first().map_or(0, |c| c.1.len());
    let mut divisors = Vec::new();
    let mut gens = Vec::new();
    for j in 0..k {
        let mut d = 1;
        let mut g = vec![0u64; len];
        for list in by_prime.values() {
            if let Some((q, v)) = list.get(j) {
                d *= q;
                for (a, b) in g.iter_mut().zip(v) {
                    *a = (*a + b) % m;
                }
            }
        }
        divisors.push(d);
        gens.push(g);
    }
    divisors.reverse();
    gens.reverse();
    (divisors, gens)
}

impl H2Group {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Invariant factors `d_1 | d_2 | ...`; empty for the trivial group.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn order(&self) -> u64 {
        self.divisors.iter().product()
    }

    /// Canonical generator cocycles, one per invariant factor.
    pub fn generators(&self) -> Vec<Cocycle> {
        let n = self.group.order() as u64;
        self.generators.iter().map(|g| Cocycle::from_exponents(self.group.clone(), g, n)).collect()
    }

    /// Every class, enumerated by coordinates in mixed radix.
    pub fn all_classes(self: &Arc<Self>) -> Vec<CohomologyClass> {
        let total = self.order();
        (0..total)
            .map(|mut code| {
                let coords = self
                    .divisors
                    .iter()
                    .map(|&d| {
                        let c = code % d;
                        code /= d;
                        c
                    })
                    .collect();
                self.class_from_coords(coords)
            })
            .collect()
    }

    /// The class `Π γ_j^{coords_j}` and its canonical representative.
    pub fn class_from_coords(self: &Arc<Self>, coords: Vec<u64>) -> CohomologyClass {
        assert_eq!(coords.len(), self.divisors.len());
        let n = self.group.order() as u64;
        let cells = self.group.order().pow(2);
        let mut x = vec![0u64; cells];
        let coords: Vec<u64> = coords.iter().zip(&self.divisors).map(|(c, d)| c % d).collect();
        for (c, g) in coords.iter().zip(&self.generators) {
            for (a, b) in x.iter_mut().zip(g) {
                *a = (*a + c * b) % n;
            }
        }
        let representative = Cocycle::from_exponents(self.group.clone(), &self.boundaries.reduce(&x), n);
        CohomologyClass { h2: self.clone(), coords, representative }
    }

    /// Class of a cocycle; approximate entries are snapped to roots of order dividing `2|G|`.
    pub fn classify(self: &Arc<Self>, mu: &Cocycle) -> Result<CohomologyClass> {
        self.classify_with(mu, 2 * self.group.order() as u64)
    }

    /// Class of a cocycle, snapping approximate entries to roots of order dividing `max_den`.
    pub fn classify_with(self: &Arc<Self>, mu: &Cocycle, max_den: u64) -> Result<CohomologyClass> {
        if !mu.group.same_table(&self.group) {
            return Err(Error::GroupMismatch(mu.group.name().into(), self.group.name().into()));
        }
        require_cocycle(mu)?;
        let mu = normalize(&exact_form(mu, max_den)?)?;
        let n = self.group.order() as u64;
        let l = mu.denominator().expect("exact").lcm(&n);
        let m = l * n;
        let cells = self.group.order().pow(2);
        let k = self.generators.len();
        // Solve N a = δb + l Σ_j k_j Γ_j  (mod l N).
        let d1 = coboundary_matrix(&self.group, m);
        let mut sys = ZMat::zeros(cells, self.group.order() + k, m);
        for i in 0..cells {
            for j in 0..self.group.order() {
                sys.set(i, j, d1.get(i, j));
            }
            for (j, g) in self.generators.iter().enumerate() {
                sys.set(i, self.group.order() + j, (l * g[i]) % m);
            }
        }
        let rhs: Vec<u64> = exponents(&mu, l).iter().map(|&a| (a * n) % m).collect();
        let sol = zmod::solve(&sys, &rhs)
            .ok_or_else(|| Error::Classification("cocycle not in the span of the H² generators".into()))?;
        let coords = sol[self.group.order()..].to_vec();
        Ok(self.class_from_coords(coords))
    }

    pub fn trivial_class(self: &Arc<Self>) -> CohomologyClass {
        self.class_from_coords(vec![0; self.divisors.len()])
    }
}

impl CohomologyClass {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn divisors(&self) -> &[u64] {
        &self.h2.divisors
    }

    pub fn h2(&self) -> &Arc<H2Group> {
        &self.h2
    }

    /// Canonical representative: lexicographically smallest exponent vector in its coset.
    pub fn representative(&self) -> &Cocycle {
        &self.representative
    }

    pub fn is_trivial(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// `β(g,h) = μ(g,h)/μ(h,g)` of the representative, for abelian groups.
    pub fn fingerprint(&self) -> Option<Vec<Vec<PhaseValue>>> {
        self.h2.group.is_abelian().then(|| self.representative.bicharacter())
    }

    pub fn compose(&self, other: &CohomologyClass) -> Result<CohomologyClass> {
        if !self.h2.group.same_table(&other.h2.group) {
            return Err(Error::GroupMismatch(self.h2.group.name().into(), other.h2.group.name().into()));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(self.h2.class_from_coords(coords))
    }

    pub fn inverse(&self) -> CohomologyClass {
        let coords = self.coords.iter().zip(&self.h2.divisors).map(|(&c, &d)| (d - c) % d).collect();
        self.h2.class_from_coords(coords)
    }
}

/// Class of a cocycle, computing `H²` of its group on the way.
pub fn classify(mu: &Cocycle) -> Result<CohomologyClass> {
    let h2 = Arc::new(compute_h2(mu.group.clone())?);
    h2.classify(mu)
}

/// Number of cohomology classes among cochains valued in `root_order`-th roots,
/// by exhaustive enumeration. Independent of the linear-algebra pipeline.
pub fn brute_force_h2(group: &FiniteGroup, root_order: u64) -> Result<usize> {
    let n = group.order();
    let cells = n * n;
    let r = root_order;
    if r == 0 {
        return Err(Error::Validation("root order must be positive".into()));
    }
    let space = (r as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    // cohomologous R-root cocycles differ by dν with ν valued in lcm(R,N)·N-th roots
    let m = r.lcm(&(n as u64)) * n as u64;
    let nu_space = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > BRUTE_FORCE_GUARD || nu_space > BRUTE_FORCE_GUARD {
        return Err(Error::Guard(format!("brute force over {space} cochains exceeds {BRUTE_FORCE_GUARD}")));
    }

    let is_cocycle = |x: &[u64]| {
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    let lhs = x[b * n + c] + x[a * n + group.mul(b, c)];
                    let rhs = x[group.mul(a, b) * n + c] + x[a * n + b];
                    (lhs + r - rhs % r) % r == 0
                })
            })
        })
    };
    let mut cocycles: HashSet<Vec<u64>> = HashSet::new();
    let mut x = vec![0u64; cells];
    loop {
        if is_cocycle(&x) {
            cocycles.insert(x.clone());
        }
        // odometer increment
        let mut i = 0;
        while i < cells {
            x[i] += 1;
            if x[i] < r {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == cells {
            break;
        }
    }

    let mut boundaries: HashSet<Vec<u64>> = HashSet::new();
    let mut nu = vec![0u64; n];
    let ratio = m / r;
    loop {
        let d: Vec<u64> = (0..cells)
            .map(|idx| {
                let (a, b) = (idx / n, idx % n);
                (nu[a] + nu[b] + m - nu[group.mul(a, b)]) % m
            })
            .collect();
        if d.iter().all(|&v| v % ratio == 0) {
            boundaries.insert(d.iter().map(|&v| v / ratio).collect());
        }
        let mut i = 0;
        while i < n {
            nu[i] += 1;
            if nu[i] < m {
                break;
            }
            nu[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }

    let mut orbits = 0;
    while let Some(seed) = cocycles.iter().next().cloned() {
        orbits += 1;
        for b in &boundaries {
            let y: Vec<u64> = seed.iter().zip(b).map(|(s, t)| (s + t) % r).collect();
            cocycles.remove(&y);
        }
        cocycles.remove(&seed);
    }
    Ok(orbits)
}
