//! Finite groups given by multiplication tables.
//!
//! Elements are the indices `0..order`, and the identity is always element 0.
//! Catalog element orderings:
//!
//! - `Zn`: element `k` is the residue `k`.
//! - products such as `Z2xZ2`, `Z2xZ2xZ2` or `Z3xZ3`: mixed radix with the
//!   first factor varying fastest, so in `Z2xZ2` the elements are
//!   `(0,0), (1,0), (0,1), (1,1)`.
//! - `D4`: element `a + 4b` is `r^a s^b`, with `s r s = r^{-1}`.
//! - `Q8`: `1, -1, i, -i, j, -j, k, -k`.
//! - `S3`: permutations of `{0,1,2}` in lexicographic order of their images,
//!   composed as `(στ)(x) = σ(τ(x))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EXHAUSTIVE_ASSOCIATIVITY_ORDER: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

/// JSON form: `{"name": str, "order": n, "mult": [[int]], "identity": 0}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub name: String,
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    /// Validate a multiplication table whose identity is element 0.
    pub fn from_table(name: impl Into<String>, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(Error::Validation("group table is empty".into()));
        }
        for (a, row) in mult.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!("row {a} has length {} (expected {n})", row.len())));
            }
            if let Some(b) = row.iter().position(|&x| x >= n) {
                return Err(Error::Validation(format!("table not closed: {a}*{b} = {} >= {n}", row[b])));
            }
        }
        for g in 0..n {
            if mult[0][g] != g || mult[g][0] != g {
                return Err(Error::Validation(format!("element 0 is not an identity (fails at {g})")));
            }
        }
        let mut inv = vec![0; n];
        for g in 0..n {
            match mult[g].iter().position(|&x| x == 0) {
                Some(h) if mult[h][g] == 0 => inv[g] = h,
                _ => return Err(Error::Validation(format!("element {g} has no two-sided inverse"))),
            }
        }
        let group = FiniteGroup { name: name.into(), mult, inv };
        group.check_associativity()?;
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order();
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                Err(Error::NonAssociative { a, b, c })
            } else {
                Ok(())
            }
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_ORDER {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn from_json(j: &GroupJson) -> Result<Self> {
        if j.identity != 0 {
            return Err(Error::Validation("identity must be element 0".into()));
        }
        if j.order != j.mult.len() {
            return Err(Error::Validation(format!("order {} does not match table size {}", j.order, j.mult.len())));
        }
        Self::from_table(j.name.clone(), j.mult.clone())
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { name: self.name.clone(), order: self.order(), mult: self.mult.clone(), identity: 0 }
    }

    /// Build a catalog group by name: `Z1`, `Zn`, `Z2xZ2`, `Z2xZ2xZ2` (alias `Z2^3`),
    /// general products of cyclic groups such as `Z3xZ3`, `D4`, `Q8`, `S3`.
    pub fn catalog(name: &str) -> Result<Self> {
        let key = name.trim();
        match name.trim() {
            "D4" => return Self::dihedral(4),
            "Q8" => return Self::quaternion(),
            "S3" => return Self::symmetric3(),
            "Z2^3" | "Z2xZ2xZ2" => return Self::cyclic_product(&[2, 2, 2]),
            _ => {}
        }
        let factors: Option<Vec<usize>> = key
            .split('x')
            .map(|f| f.strip_prefix('Z').and_then(|n| n.parse::<usize>().ok()).filter(|&n| n >= 1))
            .collect();
        match factors {
            Some(f) if !f.is_empty() => Self::cyclic_product(&f),
            _ => Err(Error::Validation(format!("unknown catalog group '{name}'"))),
        }
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::cyclic_product(&[n])
    }

    pub fn cyclic_product(factors: &[usize]) -> Result<Self> {
        if factors.iter().any(|&f| f == 0) {
            return Err(Error::Validation("cyclic factor of order 0".into()));
        }
        let order: usize = factors.iter().product();
        let digits = |mut x: usize| -> Vec<usize> {
            factors
                .iter()
                .map(|&f| {
                    let d = x % f;
                    x /= f;
                    d
                })
                .collect()
        };
        let index = |ds: &[usize]| -> usize {
            let mut idx = 0;
            for (i, &f) in factors.iter().enumerate().rev() {
                idx = idx * f + ds[i];
            }
            idx
        };
        let mult = (0..order)
            .map(|a| {
                let da = digits(a);
                (0..order)
                    .map(|b| {
                        let db = digits(b);
                        let sum: Vec<usize> = (0..factors.len()).map(|i| (da[i] + db[i]) % factors[i]).collect();
                        index(&sum)
                    })
                    .collect()
            })
            .collect();
        let name = factors.iter().map(|f| format!("Z{f}")).collect::<Vec<_>>().join("x");
        Self::from_table(name, mult)
    }

    /// Dihedral group of order `2n`; element `a + n*b` is `r^a s^b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        let order = 2 * n;
        let mult = (0..order)
            .map(|x| {
                let (a, b) = (x % n, x / n);
                (0..order)
                    .map(|y| {
                        let (c, d) = (y % n, y / n);
                        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        rot + n * (b ^ d)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(format!("D{n}"), mult)
    }

    pub fn quaternion() -> Result<Self> {
        // (sign, unit) with unit 0=1, 1=i, 2=j, 3=k
        let decode = |x: usize| -> (i32, usize) { (if x % 2 == 0 { 1 } else { -1 }, x / 2) };
        let encode = |s: i32, u: usize| -> usize { 2 * u + usize::from(s < 0) };
        let unit_mul = |a: usize, b: usize| -> (i32, usize) {
            match (a, b) {
                (0, u) | (u, 0) => (1, u),
                (a, b) if a == b => (-1, 0),
                (1, 2) => (1, 3),
                (2, 3) => (1, 1),
                (3, 1) => (1, 2),
                (2, 1) => (-1, 3),
                (3, 2) => (-1, 1),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        let mult = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (sx, ux) = decode(x);
                        let (sy, uy) = decode(y);
                        let (s, u) = unit_mul(ux, uy);
                        encode(sx * sy * s, u)
                    })
                    .collect()
            })
            .collect();
        Self::from_table("Q8", mult)
    }

    pub fn symmetric3() -> Result<Self> {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mult = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| {
                        let (s, t) = (perms[a], perms[b]);
                        find([s[t[0]], s[t[1]], s[t[2]]])
                    })
                    .collect()
            })
            .collect();
        Self::from_table("S3", mult)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Whether `other` has an identical multiplication table (names may differ).
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        self.mult == other.mult
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALOG: [&str; 9] = ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z2^3", "D4", "Q8", "S3"];

    #[test]
    fn catalog_groups_validate() {
        for name in CATALOG {
            let g = FiniteGroup::catalog(name).unwrap();
            for a in g.elements() {
                assert_eq!(g.inv(g.inv(a)), a, "{name}");
                assert_eq!(g.mul(a, g.inv(a)), 0);
            }
        }
    }

    #[test]
    fn z2xz2_elements_self_inverse() {
        let g = FiniteGroup::catalog("Z2xZ2").unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.elements().all(|a| g.inv(a) == a));
        assert!(g.is_abelian());
    }

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::catalog("Z1").unwrap();
        assert_eq!(g.table(), &[vec![0]]);
    }

    #[test]
    fn explicit_s3_table() {
        let table = vec![
            vec![0, 1, 2, 3, 4, 5],
            vec![1, 0, 4, 5, 2, 3],
            vec![2, 3, 0, 1, 5, 4],
            vec![3, 2, 5, 4, 0, 1],
            vec![4, 5, 1, 0, 3, 2],
            vec![5, 4, 3, 2, 1, 0],
        ];
        let g = FiniteGroup::from_table("S3", table).unwrap();
        assert_eq!(g.order(), 6);
        let involutions = g.elements().filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(involutions, 3);
        assert!(!g.is_abelian());
        assert!(g.same_table(&FiniteGroup::catalog("S3").unwrap()));
    }

    #[test]
    fn nonabelian_catalog_element_orders() {
        let d4 = FiniteGroup::catalog("D4").unwrap();
        let mut orders: Vec<usize> = d4.elements().map(|g| d4.element_order(g)).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 2, 2, 2, 2, 4, 4]);
        let q8 = FiniteGroup::catalog("Q8").unwrap();
        let mut orders: Vec<usize> = q8.elements().map(|g| q8.element_order(g)).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 4, 4, 4, 4, 4, 4]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            FiniteGroup::from_table("bad", vec![vec![0, 1], vec![1, 2]]),
            Err(Error::Validation(_))
        ));
        // a Latin square with identity 0 that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match FiniteGroup::from_table("loop", t) {
            Err(Error::NonAssociative { a, b, c }) => assert!(a < 5 && b < 5 && c < 5),
            other => panic!("expected associativity failure, got {other:?}"),
        }
        assert!(FiniteGroup::catalog("Y7").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = FiniteGroup::catalog("D4").unwrap();
        let j = serde_json::to_string(&g.to_json()).unwrap();
        let back: GroupJson = serde_json::from_str(&j).unwrap();
        assert_eq!(FiniteGroup::from_json(&back).unwrap(), g);
    }
}
