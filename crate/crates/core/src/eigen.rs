//! Dense symmetric eigendecomposition, delegated to `nalgebra` at the native
//! precision of the scalar type.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column-major: eigenvector `j` occupies `vectors[j*n..(j+1)*n]`.
    pub vectors: Vec<T>,
    pub n: usize,
}

impl<T> SymmetricEigen<T> {
    pub fn vector(&self, j: usize) -> &[T] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }
}

/// Scalars with a dense symmetric eigensolver.
pub trait DenseEigen: Sized {
    /// Decomposes the symmetric row-major `n x n` matrix `a`.
    fn symmetric_eigen(a: &[Self], n: usize) -> Result<SymmetricEigen<Self>>;
}

macro_rules! dense_eigen {
    ($t:ty) => {
        impl DenseEigen for $t {
            fn symmetric_eigen(a: &[$t], n: usize) -> Result<SymmetricEigen<$t>> {
                if a.len() != n * n {
                    return Err(Error::DimensionMismatch { expected: n * n, actual: a.len() });
                }
                if n == 0 {
                    return Ok(SymmetricEigen { values: Vec::new(), vectors: Vec::new(), n });
                }
                let m = DMatrix::from_row_slice(n, n, a);
                let eig = nalgebra::SymmetricEigen::try_new(m, <$t>::EPSILON, 60 * n)
                    .ok_or(Error::NoConvergence)?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
                let mut values = Vec::with_capacity(n);
                let mut vectors = Vec::with_capacity(n * n);
                for &j in &order {
                    values.push(eig.eigenvalues[j]);
                    let mut col: Vec<$t> = eig.eigenvectors.column(j).iter().copied().collect();
                    // Sign convention: the first entry of maximal magnitude is positive.
                    let mut pivot = 0;
                    for i in 1..n {
                        if col[i].abs() > col[pivot].abs() {
                            pivot = i;
                        }
                    }
                    if col[pivot] < 0.0 {
                        col.iter_mut().for_each(|x| *x = -*x);
                    }
                    vectors.extend(col);
                }
                Ok(SymmetricEigen { values, vectors, n })
            }
        }
    };
}

dense_eigen!(f32);
dense_eigen!(f64);
