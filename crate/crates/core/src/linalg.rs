//! Dense complex matrices, LU factorization with partial pivoting and a
//! LINPACK-style 1-norm reciprocal condition estimator.
//!
//! Everything here operates on small systems (the attachment solves are
//! `(m1+1) x (m1+1)`, the global assembly is `2P x 2P` at desk scale), so
//! plain dense elimination is used throughout.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0_f64;
        for j in 0..self.cols {
            let mut sum = 0.0;
            for i in 0..self.rows {
                sum += self[(i, j)].norm();
            }
            best = best.max(sum);
        }
        best
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transposed(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conjugated(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors of a square matrix, `P A = L U` with partial pivoting.
#[derive(Clone, Debug)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
    singular: bool,
    a_norm_one: f64,
}

impl LuFactors {
    /// Factor `a` (must be square). A zero pivot marks the factorization
    /// singular; `rcond_one` then reports 0 and solves are meaningless.
    pub fn compute(a: &CMatrix) -> LuFactors {
        assert_eq!(a.rows(), a.cols(), "LU requires a square matrix");
        let n = a.rows();
        let mut lu = a.data.clone();
        let mut pivots: Vec<usize> = (0..n).collect();
        let mut singular = n == 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = lu[i * n + k].norm();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let pivot = lu[k * n + k];
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                singular = true;
                continue;
            }
            for i in (k + 1)..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in (k + 1)..n {
                    let sub = m * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        LuFactors {
            n,
            lu,
            pivots,
            singular,
            a_norm_one: a.norm_one(),
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
        }
        // L y = P b (unit lower triangular)
        for i in 1..n {
            let row = &self.lu[i * n..i * n + i];
            let acc: Complex64 = row.iter().zip(&b[..i]).map(|(l, x)| l * x).sum();
            b[i] -= acc;
        }
        // U x = y
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let acc: Complex64 = row.iter().zip(&b[i + 1..]).map(|(u, x)| u * x).sum();
            b[i] = (b[i] - acc) / self.lu[i * n + i];
        }
    }

    /// Solve `A^H x = b` in place (conjugate transpose).
    pub fn solve_conj_transpose_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A = P^T L U, so A^H = U^H L^H P; solve U^H w = b, L^H z = w, x = P^T z.
        for i in 0..n {
            let acc: Complex64 = b[..i]
                .iter()
                .enumerate()
                .map(|(j, x)| self.lu[j * n + i].conj() * x)
                .sum();
            b[i] = (b[i] - acc) / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let acc: Complex64 = b[i + 1..]
                .iter()
                .enumerate()
                .map(|(j, x)| self.lu[(i + 1 + j) * n + i].conj() * x)
                .sum();
            b[i] -= acc;
        }
        for k in (0..n).rev() {
            b.swap(k, self.pivots[k]);
        }
    }

    /// Solve with every column of `b` as a right-hand side, in place.
    pub fn solve_columns_in_place(&self, b: &mut CMatrix) {
        assert_eq!(b.rows(), self.n);
        let cols = b.cols();
        let mut col = vec![Complex64::new(0.0, 0.0); self.n];
        for j in 0..cols {
            for i in 0..self.n {
                col[i] = b[(i, j)];
            }
            self.solve_in_place(&mut col);
            for i in 0..self.n {
                b[(i, j)] = col[i];
            }
        }
    }

    /// Reciprocal 1-norm condition estimate, `1 / (|A|_1 |A^-1|_1)`, in [0, 1].
    pub fn rcond_one(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        if self.singular || self.a_norm_one == 0.0 || !self.a_norm_one.is_finite() {
            return 0.0;
        }
        let inv_est = self.inverse_norm_one_estimate();
        if !inv_est.is_finite() || inv_est == 0.0 {
            return 0.0;
        }
        (1.0 / (self.a_norm_one * inv_est)).min(1.0)
    }

    // Hager's estimator for |A^-1|_1: a few solves with A and A^H, plus the
    // alternating-vector safeguard. Returns a lower bound of the true norm.
    fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        self.solve_in_place(&mut x);
        let mut est = norm_one_vec(&x);
        if n > 1 {
            let mut xi: Vec<Complex64> = x.iter().map(csign).collect();
            self.solve_conj_transpose_in_place(&mut xi);
            let mut best = argmax_abs(&xi);
            for _ in 0..5 {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[best] = Complex64::new(1.0, 0.0);
                self.solve_in_place(&mut v);
                let new_est = norm_one_vec(&v);
                if new_est.is_nan() || new_est <= est {
                    break;
                }
                est = new_est;
                let mut xi2: Vec<Complex64> = v.iter().map(csign).collect();
                self.solve_conj_transpose_in_place(&mut xi2);
                let j = argmax_abs(&xi2);
                if j == best {
                    break;
                }
                best = j;
            }
        }
        let mut alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = 1.0 + i as f64 / (n.max(2) - 1) as f64;
                Complex64::new(if i % 2 == 0 { t } else { -t }, 0.0)
            })
            .collect();
        self.solve_in_place(&mut alt);
        est.max(2.0 * norm_one_vec(&alt) / (3.0 * n as f64))
    }
}

fn norm_one_vec(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

fn csign(z: &Complex64) -> Complex64 {
    let mag = z.norm();
    if mag == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / mag
    }
}

fn argmax_abs(v: &[Complex64]) -> usize {
    let mut best = 0;
    let mut mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > mag {
            mag = m;
            best = i;
        }
    }
    best
}
