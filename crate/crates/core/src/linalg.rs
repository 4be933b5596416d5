//! Small dense complex matrices with LU factorisation (partial pivoting).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square `N × N` complex matrix stored row-major on the stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[Complex64; N]; N]);

pub type Matrix4 = CMatrix<4>;
pub type Matrix8 = CMatrix<8>;

impl<const N: usize> Default for CMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        CMatrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diagonal(d: [Complex64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn diagonal(&self) -> [Complex64; N] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..N)
            .map(|j| (0..N).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu<N>> {
        Lu::factor(*self)
    }

    pub fn determinant(&self) -> Complex64 {
        match Lu::factor(*self) {
            Ok(lu) => lu.determinant(),
            Err(_) => ZERO,
        }
    }

    /// Inverse together with the 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
    pub fn inverse_with_condition(&self) -> Result<(Self, f64)> {
        let inv = self.lu()?.inverse();
        let cond = self.norm_one() * inv.norm_one();
        if !cond.is_finite() {
            return Err(Error::NearSingular { condition: cond });
        }
        Ok((inv, cond))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_condition().map(|(m, _)| m)
    }
}

/// LU decomposition `P·A = L·U` with row pivoting, packed in one matrix.
#[derive(Debug, Clone, Copy)]
pub struct Lu<const N: usize> {
    packed: CMatrix<N>,
    perm: [usize; N],
    parity: f64,
}

impl<const N: usize> Lu<N> {
    fn factor(mut a: CMatrix<N>) -> Result<Self> {
        let mut perm: [usize; N] = std::array::from_fn(|i| i);
        let mut parity = 1.0;
        let scale = a.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::NearSingular {
                condition: f64::INFINITY,
            });
        }
        for k in 0..N {
            let (p, pivot) = (k..N)
                .map(|i| (i, a.0[i][k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= scale * f64::EPSILON * 1e-4 {
                return Err(Error::NearSingular {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                a.0.swap(p, k);
                perm.swap(p, k);
                parity = -parity;
            }
            let inv_pivot = ONE / a.0[k][k];
            for i in (k + 1)..N {
                let factor = a.0[i][k] * inv_pivot;
                a.0[i][k] = factor;
                for j in (k + 1)..N {
                    let u = a.0[k][j];
                    a.0[i][j] -= factor * u;
                }
            }
        }
        Ok(Lu {
            packed: a,
            perm,
            parity,
        })
    }

    pub fn determinant(&self) -> Complex64 {
        (0..N).fold(Complex64::new(self.parity, 0.0), |d, i| d * self.packed.0[i][i])
    }

    pub fn solve(&self, b: &[Complex64; N]) -> [Complex64; N] {
        let lu = &self.packed.0;
        let mut x: [Complex64; N] = std::array::from_fn(|i| b[self.perm[i]]);
        for i in 0..N {
            for j in 0..i {
                let l = lu[i][j];
                x[i] -= l * x[j];
            }
        }
        for i in (0..N).rev() {
            for j in (i + 1)..N {
                let u = lu[i][j];
                x[i] -= u * x[j];
            }
            x[i] /= lu[i][i];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix<N> {
        let mut inv = CMatrix::zeros();
        for col in 0..N {
            let mut e = [ZERO; N];
            e[col] = ONE;
            let x = self.solve(&e);
            for row in 0..N {
                inv.0[row][col] = x[row];
            }
        }
        inv
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random<const N: usize>(rng: &mut StdRng) -> CMatrix<N> {
        let mut m = CMatrix::<N>::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            // diagonally weighted so that the sample is well conditioned
            m.0[i][i] += Complex64::new(3.0, 0.0);
        }
        m
    }

    #[test]
    fn identity_inverts_to_identity() {
        let inv = Matrix4::identity().inverse().unwrap();
        assert_eq!(inv, Matrix4::identity());
    }

    #[test]
    fn random_inverse_residual() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random::<4>(&mut rng);
            let (inv, cond) = a.inverse_with_condition().unwrap();
            assert!(cond < 1e3);
            let r = inv * a - Matrix4::identity();
            assert!(r.max_abs() < 1e-12, "{}", r.max_abs());
            let r = a * inv - Matrix4::identity();
            assert!(r.max_abs() < 1e-12);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let mut a = Matrix4::zeros();
        a[(0, 1)] = ONE;
        a[(1, 0)] = ONE;
        a[(2, 3)] = Complex64::new(0.0, 2.0);
        a[(3, 2)] = Complex64::new(-1.0, 0.0);
        let inv = a.inverse().unwrap();
        assert!((inv * a - Matrix4::identity()).max_abs() < 1e-15);
        assert!((a.determinant() - Complex64::new(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_of_triangular_is_diagonal_product() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut a = random::<8>(&mut rng);
        for i in 0..8 {
            for j in 0..i {
                a.0[i][j] = ZERO;
            }
        }
        let expected = a.diagonal().iter().product::<Complex64>();
        assert!((a.determinant() - expected).norm() < 1e-10 * expected.norm());
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = Matrix4::identity();
        a.0[3] = a.0[2];
        assert!(matches!(a.inverse(), Err(Error::NearSingular { .. })));
    }
}
