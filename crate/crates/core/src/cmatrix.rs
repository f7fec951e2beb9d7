//! Fixed-size 4×4 kernels: complex matrices for the gamma calculus and real
//! symmetric matrices for metric work (Jacobi eigendecomposition, inversion).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::scalar::Real;

pub type CVec4<T> = [Complex<T>; 4];

/// Dense complex 4×4 matrix, row major.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CMat4<T> {
    pub e: [[Complex<T>; 4]; 4],
}

impl<T: Real> CMat4<T> {
    pub fn zero() -> Self {
        Self {
            e: [[Complex::new(T::zero(), T::zero()); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_fn(|i, j| self.e[i][j] * c)
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        self.e[0][0] + self.e[1][1] + self.e[2][2] + self.e[3][3]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(|i, j| self.e[j][i].conj())
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> T {
        let mut m = T::zero();
        for row in &self.e {
            for z in row {
                let a = z.norm();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    pub fn mat_vec(&self, v: &CVec4<T>) -> CVec4<T> {
        let mut out = [Complex::new(T::zero(), T::zero()); 4];
        for i in 0..4 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..4 {
                acc = acc + self.e[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Integer matrix power by repeated multiplication (exponents stay tiny).
    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// Determinant by Laplace expansion along the first row.
    pub fn det(&self) -> Complex<T> {
        let minor = |r: usize, c: usize| -> Complex<T> {
            let mut rows = [0usize; 3];
            let mut cols = [0usize; 3];
            let mut k = 0;
            for i in 0..4 {
                if i != r {
                    rows[k] = i;
                    k += 1;
                }
            }
            k = 0;
            for j in 0..4 {
                if j != c {
                    cols[k] = j;
                    k += 1;
                }
            }
            let m = |a: usize, b: usize| self.e[rows[a]][cols[b]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        let mut det = Complex::new(T::zero(), T::zero());
        let mut sign = T::one();
        for c in 0..4 {
            det = det + self.e[0][c] * minor(0, c).scale(sign);
            sign = -sign;
        }
        det
    }
}

impl<T: Real> Add for CMat4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j] + rhs.e[i][j])
    }
}

impl<T: Real> Sub for CMat4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j] - rhs.e[i][j])
    }
}

impl<T: Real> Neg for CMat4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.e[i][j])
    }
}

impl<T: Real> Mul for CMat4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.e[i][k];
                for j in 0..4 {
                    out.e[i][j] = out.e[i][j] + a * rhs.e[k][j];
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for CMat4<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.e[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.e[i][j]
    }
}

impl<T: Real> fmt::Display for CMat4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.e {
            write!(f, "[")?;
            for (j, z) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Serializes as nested `[re, im]` pairs, the debug wire format used by the
/// CLI for representations and matrix-valued results.
impl<T: Real + Serialize> Serialize for CMat4<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(4))?;
        for i in 0..4 {
            let row: Vec<[T; 2]> = (0..4).map(|j| [self.e[i][j].re, self.e[i][j].im]).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

/// Dense real 4×4 matrix, row major.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RMat4<T> {
    pub e: [[T; 4]; 4],
}

impl<T: Real> RMat4<T> {
    pub fn zero() -> Self {
        Self {
            e: [[T::zero(); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = T::one();
        }
        m
    }

    pub fn diagonal(d: [T; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = d[i];
        }
        m
    }

    pub fn from_rows(rows: [[T; 4]; 4]) -> Self {
        Self { e: rows }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[j][i];
            }
        }
        m
    }

    pub fn mat_mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.e[i][k];
                for j in 0..4 {
                    out.e[i][j] = out.e[i][j] + a * rhs.e[k][j];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[T; 4]) -> [T; 4] {
        let mut out = [T::zero(); 4];
        for i in 0..4 {
            let mut acc = T::zero();
            for j in 0..4 {
                acc = acc + self.e[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn column(&self, j: usize) -> [T; 4] {
        [self.e[0][j], self.e[1][j], self.e[2][j], self.e[3][j]]
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.e {
            for v in row {
                if v.abs() > m {
                    m = v.abs();
                }
            }
        }
        m
    }

    pub fn max_diff(&self, rhs: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let d = (self.e[i][j] - rhs.e[i][j]).abs();
                if d > m {
                    m = d;
                }
            }
        }
        m
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in &mut out.e {
            for v in row {
                *v = *v * s;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] = out.e[i][j] + rhs.e[i][j];
            }
        }
        out
    }

    pub fn det(&self) -> T {
        // LU with partial pivoting; robust enough for metric bookkeeping.
        let mut a = self.e;
        let mut det = T::one();
        for col in 0..4 {
            let mut piv = col;
            for r in col + 1..4 {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col] == T::zero() {
                return T::zero();
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det = det * a[col][col];
            for r in col + 1..4 {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] = a[r][c] - f * a[col][c];
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse with partial pivoting. `None` when singular to
    /// working precision.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.e;
        let mut inv = Self::identity().e;
        for col in 0..4 {
            let mut piv = col;
            for r in col + 1..4 {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col] == T::zero() {
                return None;
            }
            a.swap(piv, col);
            inv.swap(piv, col);
            let d = a[col][col];
            for c in 0..4 {
                a[col][c] = a[col][c] / d;
                inv[col][c] = inv[col][c] / d;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    if f != T::zero() {
                        for c in 0..4 {
                            a[r][c] = a[r][c] - f * a[col][c];
                            inv[r][c] = inv[r][c] - f * inv[col][c];
                        }
                    }
                }
            }
        }
        Some(Self { e: inv })
    }
}

/// Cyclic-sweep Jacobi eigendecomposition for a symmetric matrix. Returns
/// `(eigenvalues, eigenvectors)` with eigenvectors as columns, so
/// `a = v · diag(λ) · vᵀ`. Converges in a handful of sweeps at this size.
pub fn sym_eigen<T: Real>(a: &RMat4<T>) -> ([T; 4], RMat4<T>) {
    let mut m = a.e;
    let mut v = RMat4::<T>::identity().e;
    let half = T::of(0.5);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..4 {
            for j in i + 1..4 {
                off = off + m[i][j] * m[i][j];
            }
        }
        let scale = {
            let mut s = T::zero();
            for i in 0..4 {
                s = s + m[i][i].abs();
            }
            s.max(T::one())
        };
        if off.sqrt() <= T::epsilon() * scale {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if m[p][q].abs() <= T::epsilon() * scale * T::of(1e-2) {
                    continue;
                }
                let theta = half * ((T::of(2.0) * m[p][q]).atan2(m[q][q] - m[p][p]));
                let (s, c) = theta.sin_cos();
                for k in 0..4 {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..4 {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..4 {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals = [m[0][0], m[1][1], m[2][2], m[3][3]];
    (vals, RMat4 { e: v })
}

pub fn dot4<T: Real>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn cvec_sub<T: Real>(a: &CVec4<T>, b: &CVec4<T>) -> CVec4<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn cvec_max_norm<T: Real>(a: &CVec4<T>) -> T {
    let mut m = T::zero();
    for z in a {
        let n = z.norm();
        if n > m {
            m = n;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    type C64 = Complex<f64>;

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = CMat4::<f64>::from_fn(|i, j| C64::new((i * 4 + j) as f64, (i + j) as f64 * 0.5));
        let id = CMat4::<f64>::identity();
        assert_eq!(a * id, a);
        assert_eq!(id * a, a);
    }

    #[test]
    fn det_of_diagonal() {
        let d = CMat4::<f64>::from_fn(|i, j| {
            if i == j {
                C64::new((i + 1) as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let det = d.det();
        assert!((det.re - 24.0).abs() < 1e-12 && det.im.abs() < 1e-12);
    }

    #[test]
    fn real_inverse_roundtrip() {
        let a = RMat4::from_rows([
            [2.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, -1.0, 0.0],
            [0.0, -1.0, 4.0, 1.0],
            [0.5, 0.0, 1.0, -2.0],
        ]);
        let inv = a.inverse().unwrap();
        let prod = a.mat_mul(&inv);
        assert!(prod.max_diff(&RMat4::identity()) < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_symmetric_matrix() {
        let a = RMat4::from_rows([
            [-1.0, 0.3, 0.1, 0.0],
            [0.3, 2.0, -0.2, 0.4],
            [0.1, -0.2, 1.5, 0.2],
            [0.0, 0.4, 0.2, 0.8],
        ]);
        let (vals, vecs) = sym_eigen(&a);
        let recon = vecs
            .mat_mul(&RMat4::diagonal(vals))
            .mat_mul(&vecs.transpose());
        assert!(recon.max_diff(&a) < 1e-12);
        // Columns orthonormal.
        let vtv = vecs.transpose().mat_mul(&vecs);
        assert!(vtv.max_diff(&RMat4::identity()) < 1e-12);
    }
}
