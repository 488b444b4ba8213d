//! Linear algebra over `Z/mZ`: Smith normal form with unimodular transforms,
//! kernels, linear solves and Howell normal forms of submodules.
//!
//! All row/column operations are unimodular over `Z`, so the same transforms
//! work for any modulus dividing `m`.

use num_integer::Integer;

/// Dense row-major matrix with entries reduced into `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    rows: usize,
    cols: usize,
    m: u64,
    data: Vec<u64>,
}

impl ZMat {
    pub fn zeros(rows: usize, cols: usize, m: u64) -> Self {
        assert!(m >= 1);
        ZMat { rows, cols, m, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, m: u64) -> Self {
        let mut z = Self::zeros(n, n, m);
        for i in 0..n {
            z.set(i, i, 1);
        }
        z
    }

    pub fn from_rows(rows: &[Vec<i64>], m: u64) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut z = Self::zeros(r, c, m);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                z.set_signed(i, j, v as i128);
            }
        }
        z
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.m;
    }

    #[inline]
    pub fn set_signed(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v.rem_euclid(self.m as i128) as u64;
    }

    /// Add `v` (possibly negative) to entry `(i, j)`.
    pub fn add_signed(&mut self, i: usize, j: usize, v: i128) {
        let cur = self.get(i, j) as i128;
        self.set_signed(i, j, cur + v);
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let m = self.m as u128;
        (0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    let a = self.get(i, j);
                    if a != 0 && xj != 0 {
                        acc = (acc + a as u128 * (xj as u128 % m)) % m;
                    }
                }
                acc as u64
            })
            .collect()
    }

    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.cols, other.rows);
        let mut out = ZMat::zeros(self.rows, other.cols, self.m);
        let m = self.m as u128;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = (out.get(i, j) as u128 + a as u128 * b as u128) % m;
                        out.data[i * out.cols + j] = v as u64;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row_a, row_b <- k00 row_a + k01 row_b, k10 row_a + k11 row_b`.
    fn row_op(&mut self, a: usize, b: usize, k: [[i128; 2]; 2]) {
        let m = self.m as i128;
        for j in 0..self.cols {
            let (x, y) = (self.get(a, j) as i128, self.get(b, j) as i128);
            if x == 0 && y == 0 {
                continue;
            }
            let nx = (k[0][0] * x + k[0][1] * y).rem_euclid(m);
            let ny = (k[1][0] * x + k[1][1] * y).rem_euclid(m);
            self.data[a * self.cols + j] = nx as u64;
            self.data[b * self.cols + j] = ny as u64;
        }
    }

    /// `col_a, col_b <- k00 col_a + k01 col_b, k10 col_a + k11 col_b`.
    fn col_op(&mut self, a: usize, b: usize, k: [[i128; 2]; 2]) {
        let m = self.m as i128;
        for i in 0..self.rows {
            let (x, y) = (self.get(i, a) as i128, self.get(i, b) as i128);
            if x == 0 && y == 0 {
                continue;
            }
            let nx = (k[0][0] * x + k[0][1] * y).rem_euclid(m);
            let ny = (k[1][0] * x + k[1][1] * y).rem_euclid(m);
            self.data[i * self.cols + a] = nx as u64;
            self.data[i * self.cols + b] = ny as u64;
        }
    }
}

/// Which unimodular transforms to accumulate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Track {
    pub left: bool,
    pub left_inv: bool,
    pub right: bool,
    pub right_inv: bool,
}

/// `left * A * right = diag(diag)` modulo `m`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub modulus: u64,
    /// Diagonal entries, length `min(rows, cols)`; zero past the last pivot.
    pub diag: Vec<u64>,
    pub rows: usize,
    pub cols: usize,
    pub left: Option<ZMat>,
    pub left_inv: Option<ZMat>,
    pub right: Option<ZMat>,
    pub right_inv: Option<ZMat>,
}

/// Extended gcd: `(g, s, t)` with `s a + t b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of a unit modulo `m`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| s.rem_euclid(m as i128) as u64)
}

fn inverse_coeffs(k: [[i128; 2]; 2]) -> [[i128; 2]; 2] {
    [[k[1][1], -k[1][0]], [-k[0][1], k[0][0]]]
}

pub fn smith(a: &ZMat, track: Track) -> Smith {
    let m = a.m;
    let (rows, cols) = (a.rows, a.cols);
    let mut a = a.clone();
    let mut left = track.left.then(|| ZMat::identity(rows, m));
    let mut left_inv = track.left_inv.then(|| ZMat::identity(rows, m));
    let mut right = track.right.then(|| ZMat::identity(cols, m));
    let mut right_inv = track.right_inv.then(|| ZMat::identity(cols, m));
    let n = rows.min(cols);
    let mut diag = vec![0u64; n];

    let row_step = |a: &mut ZMat, l: &mut Option<ZMat>, li: &mut Option<ZMat>, t: usize, i: usize, k| {
        a.row_op(t, i, k);
        if let Some(p) = l.as_mut() {
            p.row_op(t, i, k);
        }
        if let Some(p) = li.as_mut() {
            p.col_op(t, i, inverse_coeffs(k));
        }
    };
    let col_step = |a: &mut ZMat, r: &mut Option<ZMat>, ri: &mut Option<ZMat>, t: usize, j: usize, k| {
        a.col_op(t, j, k);
        if let Some(q) = r.as_mut() {
            q.col_op(t, j, k);
        }
        if let Some(q) = ri.as_mut() {
            q.row_op(t, j, inverse_coeffs(k));
        }
    };
    let reduce_coeffs = |piv: u64, b: u64| -> [[i128; 2]; 2] {
        let (p, b) = (piv as i128, b as i128);
        if b % p == 0 {
            [[1, 0], [-(b / p), 1]]
        } else {
            let (g, s, t) = ext_gcd(p, b);
            [[s, t], [-b / g, p / g]]
        }
    };

    for t in 0..n {
        // pivot: nonzero entry generating the largest ideal
        let mut best: Option<(u64, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a.get(i, j);
                if v != 0 {
                    let g = v.gcd(&m);
                    if best.map_or(true, |(bg, _, _)| g < bg) {
                        best = Some((g, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if let Some(p) = left.as_mut() {
            p.swap_rows(t, pi);
        }
        if let Some(p) = left_inv.as_mut() {
            p.swap_cols(t, pi);
        }
        a.swap_cols(t, pj);
        if let Some(q) = right.as_mut() {
            q.swap_cols(t, pj);
        }
        if let Some(q) = right_inv.as_mut() {
            q.swap_rows(t, pj);
        }
        loop {
            for i in t + 1..rows {
                let b = a.get(i, t);
                if b != 0 {
                    let k = reduce_coeffs(a.get(t, t), b);
                    row_step(&mut a, &mut left, &mut left_inv, t, i, k);
                }
            }
            for j in t + 1..cols {
                let b = a.get(t, j);
                if b != 0 {
                    let k = reduce_coeffs(a.get(t, t), b);
                    col_step(&mut a, &mut right, &mut right_inv, t, j, k);
                }
            }
            let clean = (t + 1..rows).all(|i| a.get(i, t) == 0) && (t + 1..cols).all(|j| a.get(t, j) == 0);
            if clean {
                break;
            }
        }
        diag[t] = a.get(t, t);
    }
    Smith { modulus: m, diag, rows, cols, left, left_inv, right, right_inv }
}

impl Smith {
    /// Order of the cyclic factor `Z_m / (d_t)` contributed by row `t` of the cokernel.
    pub fn cokernel_order(&self, t: usize) -> u64 {
        let d = self.diag.get(t).copied().unwrap_or(0);
        d.gcd(&self.modulus)
    }
}

/// Generators of `{x : A x = 0 mod m}`.
pub fn kernel(a: &ZMat) -> Vec<Vec<u64>> {
    let s = smith(a, Track { right: true, ..Default::default() });
    let q = s.right.as_ref().unwrap();
    let m = a.m;
    let mut gens = Vec::new();
    for t in 0..a.cols {
        let d = s.diag.get(t).copied().unwrap_or(0);
        let factor = m / d.gcd(&m);
        let col: Vec<u64> = q.column(t).iter().map(|&v| ((v as u128 * factor as u128) % m as u128) as u64).collect();
        if col.iter().any(|&v| v != 0) {
            gens.push(col);
        }
    }
    gens
}

/// One solution of `A x = b mod m`, if any exists.
pub fn solve(a: &ZMat, b: &[u64]) -> Option<Vec<u64>> {
    assert_eq!(b.len(), a.rows);
    let m = a.m;
    let s = smith(a, Track { left: true, right: true, ..Default::default() });
    let c = s.left.as_ref().unwrap().mul_vec(b);
    let n = a.rows.min(a.cols);
    let mut y = vec![0u64; a.cols];
    for t in 0..a.rows {
        if t >= n {
            if c[t] != 0 {
                return None;
            }
            continue;
        }
        let d = s.diag[t];
        let g = d.gcd(&m);
        if c[t] % g != 0 {
            return None;
        }
        if d == 0 {
            continue;
        }
        let mg = m / g;
        let u = inv_mod((d / g) % mg, mg)?;
        y[t] = (((c[t] / g) as u128 * u as u128) % mg as u128) as u64;
    }
    Some(s.right.as_ref().unwrap().mul_vec(&y))
}

/// Howell normal form of a submodule of `(Z/mZ)^n`: at most one row per leading
/// column, leading entries divide `m`, entries above leading positions reduced,
/// and every module element vanishing on the first `j` coordinates is spanned by
/// the rows leading after `j`. Reduction against it yields the lexicographically
/// smallest representative of a coset.
#[derive(Clone, Debug)]
pub struct Howell {
    m: u64,
    n: usize,
    /// `rows[c]` is the row with leading column `c`.
    rows: Vec<Option<Vec<u64>>>,
}

impl Howell {
    pub fn new(generators: &[Vec<u64>], n: usize, m: u64) -> Self {
        let mut h = Howell { m, n, rows: vec![None; n] };
        let mut queue: Vec<Vec<u64>> = generators.iter().map(|g| g.iter().map(|&x| x % m).collect()).collect();
        while let Some(v) = queue.pop() {
            h.insert(v, &mut queue);
        }
        h.reduce_above();
        h
    }

    /// Empty submodule of `(Z/mZ)^n`.
    pub fn empty(n: usize, m: u64) -> Self {
        Howell { m, n, rows: vec![None; n] }
    }

    /// Add generators one at a time, so large generating sets can be streamed.
    pub fn extend<I: IntoIterator<Item = Vec<u64>>>(&mut self, generators: I) {
        let mut queue = Vec::new();
        for g in generators {
            queue.push(g.into_iter().map(|x| x % self.m).collect());
            while let Some(v) = queue.pop() {
                self.insert(v, &mut queue);
            }
        }
        self.reduce_above();
    }

    pub fn width(&self) -> usize {
        self.n
    }

    fn scale(&self, v: &[u64], k: u64) -> Vec<u64> {
        v.iter().map(|&x| ((x as u128 * k as u128) % self.m as u128) as u64).collect()
    }

    fn axpy(&self, v: &mut [u64], k: i128, w: &[u64]) {
        let m = self.m as i128;
        for (x, &y) in v.iter_mut().zip(w) {
            *x = ((*x as i128 + k * y as i128).rem_euclid(m)) as u64;
        }
    }

    /// Multiply by a unit so the entry at `c` becomes `gcd(v[c], m)`.
    fn normalize(&self, v: &mut Vec<u64>, c: usize) {
        let a = v[c];
        let g = a.gcd(&self.m);
        let mg = self.m / g;
        if mg == 1 {
            return;
        }
        // find unit u with a*u = g mod m: u = (a/g)^{-1} mod (m/g), lifted to a unit mod m
        let base = inv_mod((a / g) % mg, mg).expect("a/g is a unit mod m/g");
        let mut u = base;
        while u.gcd(&self.m) != 1 {
            u += mg;
        }
        *v = self.scale(v, u);
    }

    fn insert(&mut self, mut v: Vec<u64>, queue: &mut Vec<Vec<u64>>) {
        for c in 0..self.n {
            if v[c] == 0 {
                continue;
            }
            match self.rows[c].take() {
                None => {
                    self.normalize(&mut v, c);
                    let ann = self.scale(&v, self.m / v[c]);
                    self.rows[c] = Some(v);
                    if ann.iter().any(|&x| x != 0) {
                        queue.push(ann);
                    }
                    return;
                }
                Some(b) => {
                    let (p, x) = (b[c] as i128, v[c] as i128);
                    if x % p == 0 {
                        self.axpy(&mut v, -(x / p), &b);
                        self.rows[c] = Some(b);
                    } else {
                        let (g, s, t) = ext_gcd(p, x);
                        let mut w: Vec<u64> = vec![0; self.n];
                        self.axpy(&mut w, s, &b);
                        self.axpy(&mut w, t, &v);
                        debug_assert_eq!(w[c] as i128, g % self.m as i128);
                        // b and v now reduce to the new pivot row; requeue both
                        queue.push(b);
                        queue.push(v);
                        self.insert(w, queue);
                        return;
                    }
                }
            }
        }
    }

    fn reduce_above(&mut self) {
        for c in (0..self.n).rev() {
            let Some(row) = self.rows[c].clone() else { continue };
            for r in 0..c {
                if let Some(mut above) = self.rows[r].take() {
                    let q = above[c] / row[c];
                    if q != 0 {
                        self.axpy(&mut above, -(q as i128), &row);
                    }
                    self.rows[r] = Some(above);
                }
            }
        }
    }

    /// Canonical (lexicographically smallest) representative of `v + span`.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.m).collect();
        for c in 0..self.n {
            if let Some(row) = &self.rows[c] {
                let q = v[c] / row[c];
                if q != 0 {
                    self.axpy(&mut v, -(q as i128), row);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Number of elements in the submodule.
    pub fn size(&self) -> u128 {
        self.rows.iter().flatten().enumerate().fold(1u128, |acc, (_, r)| {
            let lead = r.iter().position(|&x| x != 0).unwrap();
            acc * (self.m / r[lead]) as u128
        })
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.rows.iter().flatten()
    }
}
