//! Small dense/sparse complex linear algebra helpers: LU solve, nullspace,
//! Gram-Schmidt rank, hermitian Jacobi eigendecomposition.

use std::collections::BTreeMap;

use num_complex::Complex64;

pub type C64 = Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, a: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self[(i, k)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += v * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Solve self * x = b by partial-pivot LU. Returns None if singular
    /// relative to `tol`.
    pub fn solve(&self, b: &[C64], tol: f64) -> Option<Vec<C64>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.a.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .max_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            if piv_abs < tol {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                let xv = x[col];
                x[r] -= f * xv;
            }
        }
        for col in (0..n).rev() {
            let mut v = x[col];
            for j in col + 1..n {
                v -= a[col * n + j] * x[j];
            }
            x[col] = v / a[col * n + col];
        }
        Some(x)
    }

    /// Inverse via LU column solves.
    pub fn inverse(&self, tol: f64) -> Option<Mat> {
        let n = self.rows;
        let mut out = Mat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e, tol)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Some(out)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) < tol
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.cols + j]
    }
}

/// Basis of the nullspace of the stacked row system, by Gaussian
/// elimination with the given pivot tolerance.
pub fn nullspace(rows: &[Vec<C64>], ncols: usize, tol: f64) -> Vec<Vec<C64>> {
    let mut a: Vec<Vec<C64>> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    for r in &a {
        assert_eq!(r.len(), ncols);
    }
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let piv = (rank..a.len())
            .filter(|&r| a[r][col].norm() > tol)
            .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()));
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let d = a[rank][col];
        for j in 0..ncols {
            a[rank][j] /= d;
        }
        for r in 0..a.len() {
            if r == rank {
                continue;
            }
            let f = a[r][col];
            if f.norm() <= tol * 1e-3 {
                continue;
            }
            for j in 0..ncols {
                let v = a[rank][j];
                a[r][j] -= f * v;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == ncols {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![C64::new(0.0, 0.0); ncols];
        v[free] = C64::new(1.0, 0.0);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Two-pass modified Gram-Schmidt over sparse vectors with a caller-supplied
/// inner product; vectors whose residual norm falls below `rank_tol` are
/// dropped. Returns the orthonormal family.
pub fn gram_schmidt<K, F>(vecs: &[BTreeMap<K, C64>], ip: F, rank_tol: f64) -> Vec<BTreeMap<K, C64>>
where
    K: Ord + Clone,
    F: Fn(&BTreeMap<K, C64>, &BTreeMap<K, C64>) -> C64,
{
    let mut ortho: Vec<BTreeMap<K, C64>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for _pass in 0..2 {
            for u in &ortho {
                let c = ip(&w, u);
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                for (k, uv) in u {
                    *w.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) -= c * uv;
                }
            }
        }
        let nrm = ip(&w, &w).re.max(0.0).sqrt();
        if nrm <= rank_tol {
            continue;
        }
        let inv = C64::new(1.0 / nrm, 0.0);
        let w: BTreeMap<K, C64> = w
            .into_iter()
            .map(|(k, c)| (k, c * inv))
            .filter(|(_, c)| c.norm() > 1e-300)
            .collect();
        ortho.push(w);
    }
    ortho
}

/// Standard (unweighted) sparse inner product <x,y> = sum x_k conj(y_k).
pub fn dot<K: Ord>(x: &BTreeMap<K, C64>, y: &BTreeMap<K, C64>) -> C64 {
    let (small, big, conj_small) = if x.len() <= y.len() { (x, y, false) } else { (y, x, true) };
    let mut acc = C64::new(0.0, 0.0);
    for (k, v) in small {
        if let Some(w) = big.get(k) {
            acc += if conj_small { w * v.conj() } else { v * w.conj() };
        }
    }
    acc
}

/// Rank of a sparse column family under the standard inner product.
pub fn rank<K: Ord + Clone>(vecs: &[BTreeMap<K, C64>], rank_tol: f64) -> usize {
    gram_schmidt(vecs, dot::<K>, rank_tol).len()
}

/// Eigendecomposition of a hermitian matrix by cyclic complex Jacobi
/// rotations. Returns (eigenvalues, unitary of column eigenvectors).
pub fn hermitian_eig(m: &Mat, tol: f64) -> (Vec<f64>, Mat) {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.clone();
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off < tol * 1e-4 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() < tol * 1e-6 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Unitarize the 2x2 block [app, apq; apq*, aqq].
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                let sp = phase * s;
                // Columns rotate: col_p' = c col_p - conj(sp) col_q ; col_q' = sp col_p + c col_q
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * sp.conj();
                    a[(i, q)] = aip * sp + aiq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * sp;
                    a[(q, j)] = apj * sp.conj() + aqj * c;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * c;
                }
            }
        }
    }
    let eig = (0..n).map(|i| a[(i, i)].re).collect();
    (eig, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solve_roundtrip() {
        let mut m = Mat::zeros(3, 3);
        m[(0, 0)] = c(2.0, 0.0);
        m[(0, 1)] = c(1.0, -1.0);
        m[(1, 0)] = c(0.0, 1.0);
        m[(1, 1)] = c(3.0, 0.0);
        m[(1, 2)] = c(1.0, 0.0);
        m[(2, 2)] = c(-1.0, 2.0);
        let x = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.25, -1.0)];
        let b: Vec<C64> = (0..3).map(|i| (0..3).map(|j| m[(i, j)] * x[j]).sum()).collect();
        let solved = m.solve(&b, 1e-12).unwrap();
        for (u, v) in solved.iter().zip(&x) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn nullspace_of_rank_one() {
        // x + y + z = 0 twice: kernel dim 2
        let rows = vec![vec![c(1.0, 0.0); 3], vec![c(1.0, 0.0); 3]];
        let ns = nullspace(&rows, 3, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: C64 = v.iter().sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eig_diagonalizes() {
        let mut m = Mat::zeros(3, 3);
        m[(0, 0)] = c(2.0, 0.0);
        m[(1, 1)] = c(-1.0, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.3, 0.7);
        m[(1, 0)] = c(0.3, -0.7);
        m[(1, 2)] = c(0.0, -0.2);
        m[(2, 1)] = c(0.0, 0.2);
        let (eig, u) = hermitian_eig(&m, 1e-12);
        // m u = u diag(eig)
        let mu = m.mul(&u);
        let mut ud = u.clone();
        for i in 0..3 {
            for j in 0..3 {
                ud[(i, j)] *= c(eig[j], 0.0);
            }
        }
        assert!(mu.max_abs_diff(&ud) < 1e-8);
        // unitary
        assert!(u.adjoint().mul(&u).max_abs_diff(&Mat::identity(3)) < 1e-8);
    }

    #[test]
    fn gs_rank_counts_independent_vectors() {
        let mut v1 = BTreeMap::new();
        v1.insert(0usize, c(1.0, 0.0));
        let mut v2 = BTreeMap::new();
        v2.insert(0usize, c(2.0, 0.0));
        let mut v3 = BTreeMap::new();
        v3.insert(1usize, c(0.0, 1.0));
        assert_eq!(rank(&[v1, v2, v3], 1e-8), 2);
    }
}
