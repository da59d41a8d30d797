//! Eigenvalues of real symmetric matrices.
//!
//! Small matrices use cyclic Jacobi rotations; larger ones are reduced to
//! tridiagonal form by Householder reflections and finished with implicit QL.

use crate::error::{Error, Result};
use crate::real::Real;

/// Dimension up to which Jacobi rotations are used.
pub const JACOBI_MAX_DIM: usize = 64;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Wraps row-major data, checking symmetry to `tol` relative to the
    /// largest entry.
    pub fn from_rows(n: usize, data: Vec<T>, tol: T) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::domain(
                "matrix data length",
                "n * n",
                data.len() as f64,
            ));
        }
        let m = SymmetricMatrix { n, data };
        let asym = m.max_asymmetry();
        if asym > tol * m.max_abs().max(T::min_positive_value()) {
            return Err(Error::NotSymmetric {
                asymmetry: asym.as_f64(),
            });
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn scale(&mut self, s: T) {
        for x in &mut self.data {
            *x = *x * s;
        }
    }
}

/// All eigenvalues, in ascending order.
pub fn symmetric_eigenvalues<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let mut ev = if m.dim() <= JACOBI_MAX_DIM {
        jacobi(m)?
    } else {
        let (d, e) = householder_tridiagonal(m);
        tridiagonal_ql(d, e)?
    };
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

/// Eigenvalues in descending order, with tiny negative round-off (down to
/// `-1e-10` times the largest) clamped to zero. Anything more negative is an error.
pub fn eigen_spectrum<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let mut ev = symmetric_eigenvalues(m)?;
    ev.reverse();
    let top = ev.first().map(|x| x.abs()).unwrap_or(T::zero());
    let floor = -T::lit(1e-10) * top.max(T::one());
    for x in &mut ev {
        if *x < T::zero() {
            if *x < floor {
                return Err(Error::NotPsd {
                    eigenvalue: x.as_f64(),
                });
            }
            *x = T::zero();
        }
    }
    Ok(ev)
}

fn jacobi<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let n = m.dim();
    let mut a = m.clone();
    let max_sweeps = 50 * n.max(1);
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..i {
                off = off + a.get(i, j) * a.get(i, j);
            }
        }
        let diag = (0..n).fold(T::zero(), |s, i| s + a.get(i, i) * a.get(i, i));
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            return Ok((0..n).map(|i| a.get(i, i)).collect());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, T::zero());
                a.set(q, p, T::zero());
            }
        }
    }
    Err(Error::NoConvergence { sweeps: max_sweeps })
}

/// Householder reduction to tridiagonal form. Returns the diagonal and the
/// subdiagonal (`e[0]` unused, zero).
fn householder_tridiagonal<T: Real>(m: &SymmetricMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = m.dim();
    let mut a: Vec<Vec<T>> = m.rows().map(|r| r.to_vec()).collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + a[i][k].abs());
            if scale == T::zero() {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] = a[i][k] / scale;
                    h = h + a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[i][l] = f - g;
                let mut ff = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g = g + a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    ff = ff + e[j] * a[i][j];
                }
                let hh = ff / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] = a[j][k] - (f * e[k] + g * a[i][k]);
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[i][i];
    }
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
fn tridiagonal_ql<T: Real>(mut d: Vec<T>, mut e: Vec<T>) -> Result<Vec<T>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let max_iter = 50 * n;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence { sweeps: max_iter });
            }
            let two = T::lit(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let rr = (d[i] - g) * s + two * c * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - b;
            }
            if early {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}

/// Exposes the Householder + QL path regardless of dimension.
pub fn eigenvalues_tridiagonal_ql<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let (d, e) = householder_tridiagonal(m);
    let mut ev = tridiagonal_ql(d, e)?;
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

/// Exposes the Jacobi path regardless of dimension.
pub fn eigenvalues_jacobi<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let mut ev = jacobi(m)?;
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}
