//! Small dense exact linear algebra over the rationals.
//!
//! Everything here is sized for crystallographic data (n ≤ 8 or so), so the
//! implementations favor clarity and exactness over asymptotics.

use num::{One, Signed, Zero};

use crate::error::CoreError;
use crate::{Int, Rat};

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for RatMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RatMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[Vec<Int>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * other.at(k, j);
                    *out.at_mut(i, j) += term;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    acc += self.at(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.denom().is_one())
    }

    pub fn to_int_rows(&self) -> Option<Vec<Vec<Int>>> {
        if !self.is_integral() {
            return None;
        }
        Some(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.at(i, j).numer().clone()).collect())
                .collect(),
        )
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let tmp = self.at(p, j).clone();
                    *self.at_mut(p, j) = self.at(r, j).clone();
                    *self.at_mut(r, j) = tmp;
                }
            }
            let inv = self.at(r, c).recip();
            for j in 0..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.at(i, j) - &f * self.at(r, j);
                        *self.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                det = -det;
                for j in 0..n {
                    let tmp = m.at(p, j).clone();
                    *m.at_mut(p, j) = m.at(c, j).clone();
                    *m.at_mut(c, j) = tmp;
                }
            }
            det *= m.at(c, c);
            let inv = m.at(c, c).recip();
            for i in c + 1..n {
                if !m.at(i, c).is_zero() {
                    let f = m.at(i, c) * &inv;
                    for j in c..n {
                        let v = m.at(i, j) - &f * m.at(c, j);
                        *m.at_mut(i, j) = v;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self, CoreError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return Err(CoreError::SingularMatrix);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(inv)
    }

    /// Basis of the right kernel {x : Mx = 0}, one vector per row of output.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, f).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Does `Mx = b` admit a rational solution?
    pub fn solvable(&self, b: &[Rat]) -> bool {
        assert_eq!(self.rows, b.len());
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.rref();
        !pivots.contains(&self.cols)
    }

    /// LDLᵀ factorization of a symmetric positive definite matrix:
    /// returns (d, u) with q(x) = Σᵢ dᵢ (xᵢ + Σ_{j>i} u\[i\]\[j\] xⱼ)².
    pub fn ldlt(&self) -> Result<(Vec<Rat>, Vec<Vec<Rat>>), CoreError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut d = vec![Rat::zero(); n];
        let mut u = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            d[i] = a.at(i, i).clone();
            if !d[i].is_positive() {
                return Err(CoreError::DimensionMismatch(
                    "quadratic form is not positive definite".into(),
                ));
            }
            for j in i + 1..n {
                u[i][j] = a.at(i, j) / &d[i];
            }
            for r in i + 1..n {
                for c in i + 1..n {
                    let v = a.at(r, c) - a.at(r, i) * a.at(i, c) / &d[i];
                    *a.at_mut(r, c) = v;
                }
            }
        }
        Ok((d, u))
    }
}

/// Does the integer column span of `cols` contain `target`?
///
/// Forward elimination over ℤ with extended gcd column combinations; exact.
pub fn int_lattice_contains(cols: &[Vec<Int>], target: &[Int]) -> bool {
    let k = target.len();
    assert!(cols.iter().all(|c| c.len() == k));
    let mut active: Vec<Vec<Int>> = cols.to_vec();
    let mut t = target.to_vec();
    for r in 0..k {
        // Combine columns until at most one has a nonzero entry in row r.
        loop {
            let nz: Vec<usize> = (0..active.len())
                .filter(|&i| !active[i][r].is_zero())
                .collect();
            if nz.len() <= 1 {
                break;
            }
            let (i, j) = (nz[0], nz[1]);
            let (a, b) = (active[i][r].clone(), active[j][r].clone());
            let e = num::Integer::extended_gcd(&a, &b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (qa, qb) = (&a / &g, &b / &g);
            let col_i: Vec<Int> = (0..k)
                .map(|s| &x * &active[i][s] + &y * &active[j][s])
                .collect();
            let col_j: Vec<Int> = (0..k)
                .map(|s| &qb * &active[i][s] - &qa * &active[j][s])
                .collect();
            active[i] = col_i;
            active[j] = col_j;
        }
        let pivot = (0..active.len()).find(|&i| !active[i][r].is_zero());
        match pivot {
            Some(i) => {
                let g = active[i][r].clone();
                let (q, rem) = num::Integer::div_rem(&t[r], &g);
                if !rem.is_zero() {
                    return false;
                }
                for s in 0..k {
                    t[s] = &t[s] - &q * &active[i][s];
                }
                active.swap_remove(i);
            }
            None => {
                if !t[r].is_zero() {
                    return false;
                }
            }
        }
    }
    t.iter().all(|x| x.is_zero())
}

/// Least common multiple of all denominators in a slice of rationals.
pub fn common_denominator(xs: &[Rat]) -> Int {
    xs.iter().fold(Int::one(), |acc, x| num::Integer::lcm(&acc, x.denom()))
}
