//! Dense complex vectors and matrices small enough (at most 16x16) that
//! Gram-Schmidt is the right tool.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::NumericsError;

/// Conditioning estimate below which a set of interference channels is
/// treated as rank deficient.
pub const RANK_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Hermitian inner product `self^H other`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        inner(&self.0, &other.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_row_major(
        rows: usize,
        cols: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::Dimension("matrix data length != rows * cols"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[ComplexVector]) -> Result<Self, NumericsError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(NumericsError::Dimension("column length != rows"));
            }
            for i in 0..rows {
                m.data[i * m.cols + j] = c.0[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> ComplexVector {
        ComplexVector((0..self.rows).map(|i| self.get(i, col)).collect())
    }

    /// `self^H v`.
    pub fn adjoint_mul(&self, v: &ComplexVector) -> Result<ComplexVector, NumericsError> {
        if v.len() != self.rows {
            return Err(NumericsError::Dimension("adjoint_mul operand length"));
        }
        Ok(ComplexVector(
            (0..self.cols)
                .map(|j| {
                    (0..self.rows)
                        .map(|i| self.get(i, j).conj() * v.0[i])
                        .sum()
                })
                .collect(),
        ))
    }

    fn column_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn subtract_projection(v: &mut [Complex64], q: &[Complex64]) {
    let c = inner(q, v);
    for (vi, qi) in v.iter_mut().zip(q) {
        *vi -= c * qi;
    }
}

/// Scratch space for repeated zero-forcing projections of one dimension.
#[derive(Debug, Clone, Default)]
pub struct ZfWorkspace {
    basis: Vec<Complex64>,
}

impl ZfWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes the unit vector along `(I - H H†) h` into `out`, where the
    /// `n_cols` columns of `H` are stored contiguously in `columns`.
    ///
    /// Returns the norm of the projection before normalization.
    pub fn project(
        &mut self,
        h: &[Complex64],
        columns: &[Complex64],
        n_cols: usize,
        out: &mut [Complex64],
    ) -> Result<f64, NumericsError> {
        let dim = h.len();
        if out.len() != dim || columns.len() != dim * n_cols {
            return Err(NumericsError::Dimension("zf_project operand sizes"));
        }
        if n_cols >= dim && n_cols > 0 {
            return Err(NumericsError::Dimension(
                "zero forcing needs more antennas than nulled users",
            ));
        }

        // Orthonormal basis of span(H) by Gram-Schmidt with one
        // reorthogonalization pass.
        self.basis.clear();
        self.basis.extend_from_slice(columns);
        let mut conditioning = f64::INFINITY;
        for j in 0..n_cols {
            let (done, rest) = self.basis.split_at_mut(j * dim);
            let col = &mut rest[..dim];
            let original = libm::sqrt(norm_sqr(col));
            if !(original > 0.0) || !original.is_finite() {
                return Err(NumericsError::RankDeficient { estimate: 0.0 });
            }
            for _ in 0..2 {
                for p in 0..j {
                    subtract_projection(col, &done[p * dim..(p + 1) * dim]);
                }
            }
            let residual = libm::sqrt(norm_sqr(col));
            conditioning = conditioning.min(residual / original);
            if conditioning < RANK_THRESHOLD {
                return Err(NumericsError::RankDeficient {
                    estimate: conditioning,
                });
            }
            for z in col.iter_mut() {
                *z /= residual;
            }
        }

        out.copy_from_slice(h);
        let h_norm = libm::sqrt(norm_sqr(h));
        for _ in 0..2 {
            for p in 0..n_cols {
                subtract_projection(out, &self.basis[p * dim..(p + 1) * dim]);
            }
        }
        let norm = libm::sqrt(norm_sqr(out));
        if !(norm > RANK_THRESHOLD * h_norm) {
            return Err(NumericsError::RankDeficient {
                estimate: if h_norm > 0.0 { norm / h_norm } else { 0.0 },
            });
        }
        for z in out.iter_mut() {
            *z /= norm;
        }
        Ok(norm)
    }
}

/// Unit vector along `(I - H H†) h`: the direction of `h` with every column
/// of `H` projected out.
///
/// To null a user whose channel is the row vector `g`, pass `conj(g)` as a
/// column; then `g · w = 0` for the returned `w`.
pub fn zf_project(h: &ComplexVector, interference: &ComplexMatrix) -> Result<ComplexVector, NumericsError> {
    if interference.rows() != h.len() {
        return Err(NumericsError::Dimension("H must have as many rows as h"));
    }
    let mut out = ComplexVector::zeros(h.len());
    ZfWorkspace::new().project(
        h.as_slice(),
        &interference.column_major(),
        interference.cols(),
        &mut out.0,
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_interference_normalizes() {
        let h = ComplexVector(vec![c(3.0, 0.0), c(0.0, 4.0)]);
        let w = zf_project(&h, &ComplexMatrix::zeros(2, 0)).unwrap();
        assert!((w.0[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((w.0[1] - c(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn orthogonal_input_is_unchanged() {
        let h = ComplexVector(vec![c(0.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)]);
        let col = ComplexVector(vec![c(2.0, -1.0), c(0.0, 0.0), c(0.5, 0.0)]);
        let hm = ComplexMatrix::from_columns(3, &[col]).unwrap();
        let w = zf_project(&h, &hm).unwrap();
        let expected = 1.0 / libm::sqrt(2.0);
        assert!((w.0[1] - c(expected, expected)).norm() < 1e-15);
        assert!(w.0[0].norm() < 1e-15 && w.0[2].norm() < 1e-15);
    }

    #[test]
    fn rank_deficiency_detected() {
        let h = ComplexVector(vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)]);
        let col = ComplexVector(vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0)]);
        let hm = ComplexMatrix::from_columns(3, &[col.clone(), col]).unwrap();
        assert!(matches!(
            zf_project(&h, &hm),
            Err(NumericsError::RankDeficient { .. })
        ));
        // h inside span(H).
        let col = ComplexVector(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let hm = ComplexMatrix::from_columns(2, &[col]).unwrap();
        let h = ComplexVector(vec![c(0.0, 2.0), c(0.0, 0.0)]);
        assert!(zf_project(&h, &hm).is_err());
    }

    #[test]
    fn too_many_columns_rejected() {
        let h = ComplexVector(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let hm = ComplexMatrix::zeros(2, 2);
        assert!(matches!(zf_project(&h, &hm), Err(NumericsError::Dimension(_))));
    }
}
