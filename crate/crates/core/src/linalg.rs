//! Dense exact linear algebra over [`Scalar`].

use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

/// Row echelon data: reduced matrix plus pivot columns.
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Scalar> = rows.into_iter().flat_map(|row| {
            assert_eq!(row.len(), c, "ragged rows");
            row
        }).collect();
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect())
    }

    pub fn from_columns(cols: &[Vec<Scalar>]) -> Matrix {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].clone();
            }
        }
        m
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut m = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        m[(i, j)] += &p;
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn pow(&self, k: u32) -> Matrix {
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m[(row, col)].inv();
            for c in col..m.cols {
                let v = &m[(row, c)] * &inv;
                m[(row, c)] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for c in col..m.cols {
                    if m[(row, c)].is_zero() {
                        continue;
                    }
                    let v = &m[(r, c)] - &(&f * &m[(row, c)]);
                    m[(r, c)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -&matrix[(r, f)];
                }
                v
            })
            .collect()
    }

    /// Some solution of `self x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = matrix[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Scalar::one();
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = matrix[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Scalar::zero();
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = &det * &pivot;
            let inv = pivot.inv();
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = &m[(r, col)] * &inv;
                for c in col..n {
                    let v = &m[(r, c)] - &(&f * &m[(col, c)]);
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(x I - M)`, coefficients low degree first.
    pub fn charpoly(&self) -> Vec<Scalar> {
        // Faddeev-LeVerrier.
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let mut t = self.mul(&mk);
            let c_prev = coeffs[n - k + 1].clone();
            for i in 0..n {
                t[(i, i)] += &c_prev;
            }
            mk = t;
            let am = self.mul(&mk);
            let mut tr = Scalar::zero();
            for i in 0..n {
                tr += &am[(i, i)];
            }
            coeffs[n - k] = &(-tr) * &Scalar::frac(1, k as i64);
        }
        coeffs
    }
}

/// Rank of a list of vectors.
pub fn rank_of_vectors(vs: &[Vec<Scalar>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Matrix::from_rows(vs.to_vec()).rank()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    let mut all = basis.to_vec();
    let r0 = rank_of_vectors(&all);
    all.push(v.to_vec());
    rank_of_vectors(&all) == r0
}

/// Row-echelon accumulator for sparse vectors: rows are reduced against the
/// pivots found so far and kept when independent.
#[derive(Default)]
pub struct SparseEchelon {
    pivots: std::collections::HashMap<usize, std::collections::BTreeMap<usize, Scalar>>,
}

impl SparseEchelon {
    pub fn new() -> SparseEchelon {
        SparseEchelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Insert a row; returns whether it was independent of earlier rows.
    pub fn insert(&mut self, mut row: std::collections::BTreeMap<usize, Scalar>) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&c, lead)) = row.iter().find(|(c, _)| self.pivots.contains_key(c)).map(|(c, v)| (c, v.clone())) else {
                break;
            };
            let piv = &self.pivots[&c];
            for (k, v) in piv {
                let e = row.entry(*k).or_insert_with(Scalar::zero);
                *e -= &(&lead * v);
                if e.is_zero() {
                    row.remove(k);
                }
            }
        }
        let Some((&c, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv();
        for v in row.values_mut() {
            *v *= &inv;
        }
        self.pivots.insert(c, row);
        true
    }
}

/// Solves `M x = b` for `M` given by sparse rows over `ncols` unknowns.
/// Free unknowns are set to zero; `None` when the system is inconsistent.
pub fn sparse_solve(rows: impl IntoIterator<Item = (std::collections::BTreeMap<usize, Scalar>, Scalar)>, ncols: usize) -> Option<Vec<Scalar>> {
    let mut e = SparseEchelon::new();
    for (mut row, b) in rows {
        if !b.is_zero() {
            row.insert(ncols, b);
        }
        e.insert(row);
    }
    if e.pivots.contains_key(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    let mut cols: Vec<usize> = e.pivots.keys().copied().collect();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    for c in cols {
        let row = &e.pivots[&c];
        let mut v = row.get(&ncols).cloned().unwrap_or_else(Scalar::zero);
        for (k, a) in row.range(c + 1..ncols) {
            v -= &(a * &x[*k]);
        }
        x[c] = v;
    }
    Some(x)
}

/// Rank of a matrix given by sparse rows.
pub fn sparse_rank(rows: impl IntoIterator<Item = std::collections::BTreeMap<usize, Scalar>>) -> usize {
    let mut e = SparseEchelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Evaluate a polynomial (coefficients low first) at a square matrix.
pub fn poly_at_matrix(coeffs: &[Scalar], m: &Matrix) -> Matrix {
    let mut acc = Matrix::zeros(m.rows, m.cols);
    for c in coeffs.iter().rev() {
        acc = acc.mul(m);
        for i in 0..m.rows {
            acc[(i, i)] += c;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_solve() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(|x| x.is_zero()));
        let b = vec![Scalar::int(6), Scalar::int(12), Scalar::int(2)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        assert!(m.solve(&[Scalar::int(1), Scalar::int(0), Scalar::int(0)]).is_none());
    }

    #[test]
    fn sparse_solve_matches_dense() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let rows = |b: &[i64]| -> Vec<(std::collections::BTreeMap<usize, Scalar>, Scalar)> {
            (0..3).map(|i| ((0..3).map(|j| (j, m[(i, j)].clone())).collect(), Scalar::int(b[i]))).collect()
        };
        let x = sparse_solve(rows(&[6, 12, 2]), 3).unwrap();
        assert_eq!(m.apply(&x), vec![Scalar::int(6), Scalar::int(12), Scalar::int(2)]);
        assert!(sparse_solve(rows(&[1, 0, 0]), 3).is_none());
    }

    #[test]
    fn det_inverse_charpoly() {
        let m = Matrix::from_ints(&[&[2, 1], &[1, 3]]);
        assert_eq!(m.det(), Scalar::int(5));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.charpoly(), vec![Scalar::int(5), Scalar::int(-5), Scalar::int(1)]);
        assert!(poly_at_matrix(&m.charpoly(), &m).is_zero());
    }
}
