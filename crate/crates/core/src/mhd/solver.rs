use crate::scalar::Scalar;
use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

/// Square sparse matrix in coordinate form with merged duplicates, stored
/// column by column with increasing row indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CooMatrix<S: Scalar> {
    pub n: usize,
    pub entries: Vec<(usize, usize, S)>,
}

impl<S: Scalar> CooMatrix<S> {
    /// Sums duplicate entries in a fixed order so that the result does not
    /// depend on how the triplets were produced.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, S)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (c, r));
        let mut entries: Vec<(usize, usize, S)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        Self { n, entries }
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        let mut y = vec![S::zero(); self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}

/// Direct solver for the linearized step systems.
pub trait LinearSolver<S: Scalar>: Send + Sync {
    fn solve(&self, matrix: &CooMatrix<S>, rhs: &[S]) -> Result<Vec<S>, String>;
}

/// Sparse LU factorization with partial pivoting.
#[derive(Clone, Copy, Debug, Default)]
pub struct SparseLu;

macro_rules! sparse_lu {
    ($t:ty) => {
        impl LinearSolver<$t> for SparseLu {
            fn solve(&self, matrix: &CooMatrix<$t>, rhs: &[$t]) -> Result<Vec<$t>, String> {
                let n = matrix.n;
                if rhs.len() != n {
                    return Err(format!("right-hand side has length {} for a system of size {n}", rhs.len()));
                }
                if n == 0 {
                    return Ok(Vec::new());
                }
                let triplets: Vec<Triplet<usize, usize, $t>> =
                    matrix.entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
                let a =
                    SparseColMat::<usize, $t>::try_new_from_triplets(n, n, &triplets).map_err(|e| format!("{e:?}"))?;
                let lu = a.sp_lu().map_err(|e| format!("{e:?}"))?;
                let b = Mat::<$t>::from_fn(n, 1, |i, _| rhs[i]);
                let x = lu.solve(&b);
                let out: Vec<$t> = (0..n).map(|i| x[(i, 0)]).collect();
                if out.iter().any(|v| !v.is_finite()) {
                    return Err("factorization produced non-finite values (singular system)".into());
                }
                Ok(out)
            }
        }
    };
}

sparse_lu!(f32);
sparse_lu!(f64);
