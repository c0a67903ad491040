//! Dense Hermitian eigenvalue helpers: Householder reduction to a real
//! symmetric tridiagonal matrix, Sturm-sequence bisection for the extreme
//! eigenvalues, and inverse iteration for a residual check.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub(crate) struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }
}

/// Real symmetric tridiagonal matrix unitarily similar to a Hermitian input.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

pub(crate) fn tridiagonalize(a: &CMatrix) -> Tridiagonal {
    let n = a.n;
    let mut m = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = libm::sqrt((k + 1..n).map(|i| m.at(i, k).norm_sqr()).sum());
        if norm == 0.0 {
            continue;
        }
        let x0 = m.at(k + 1, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| m.at(i, k)).collect();
        v[0] -= alpha;
        let vn: f64 = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        let len = n - k - 1;
        // p = A v on the trailing block
        let p: Vec<Complex64> = (0..len)
            .map(|i| (0..len).map(|j| m.at(k + 1 + i, k + 1 + j) * v[j]).sum())
            .collect();
        let kk: Complex64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                *m.at_mut(k + 1 + i, k + 1 + j) -= 2.0 * upd;
            }
        }
        for i in k + 1..n {
            *m.at_mut(i, k) = Complex64::new(0.0, 0.0);
            *m.at_mut(k, i) = Complex64::new(0.0, 0.0);
        }
        *m.at_mut(k + 1, k) = alpha;
        *m.at_mut(k, k + 1) = alpha.conj();
    }
    Tridiagonal {
        diag: (0..n).map(|i| m.at(i, i).re).collect(),
        off: (0..n.saturating_sub(1)).map(|i| m.at(i + 1, i).norm()).collect(),
    }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1] } else { 0.0 } + if i + 1 < n { self.off[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `(λ_min, λ_max)` of a Hermitian matrix.
pub(crate) fn extreme_eigenvalues(a: &CMatrix) -> (f64, f64) {
    if a.n == 0 {
        return (0.0, 0.0);
    }
    let t = tridiagonalize(a);
    (t.eigenvalue(0), t.eigenvalue(a.n - 1))
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
fn solve(a: &CMatrix, b: &[Complex64]) -> Vec<Complex64> {
    let n = a.n;
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))
            .unwrap();
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let mut d = m[col * n + col];
        if d.norm() == 0.0 {
            d = Complex64::new(1e-300, 0.0);
            m[col * n + col] = d;
        }
        for i in col + 1..n {
            let factor = m[i * n + col] / d;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[i * n + j] -= factor * v;
            }
            let xv = x[col];
            x[i] -= factor * xv;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    x
}

/// `‖Av − λv‖/‖v‖` for an eigenvector estimate from inverse iteration.
pub(crate) fn eigen_residual(a: &CMatrix, lambda: f64) -> f64 {
    let n = a.n;
    if n == 0 {
        return 0.0;
    }
    let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let shift = lambda + 1e-13 * scale;
    let shifted = CMatrix::from_fn(n, |i, j| {
        a.at(i, j) - if i == j { Complex64::new(shift, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * libm::sin(i as f64 + 1.0), 0.3 * libm::cos(3.0 * i as f64)))
        .collect();
    for _ in 0..3 {
        v = solve(&shifted, &v);
        let norm: f64 = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if !(norm.is_finite() && norm > 0.0) {
            return f64::INFINITY;
        }
        v.iter_mut().for_each(|z| *z /= norm);
    }
    let av = a.mul_vec(&v);
    libm::sqrt(av.iter().zip(&v).map(|(x, y)| (x - lambda * y).norm_sqr()).sum())
}
