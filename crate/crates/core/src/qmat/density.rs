use serde::{Deserialize, Serialize};

use super::linalg::min_eigenvalue;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Hermitian, PSD, unit-trace matrix over a list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        check_dims(&dims, &mat)?;
        if !mat.is_finite() {
            return Err(Error::numerical("state has non-finite entries"));
        }
        let herm = mat.hermiticity_defect();
        if herm > tol::STATE {
            return Err(Error::numerical(format!("state is not Hermitian (defect {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::STATE || tr.im.abs() > tol::STATE {
            return Err(Error::numerical(format!("state trace is {tr}, expected 1")));
        }
        let lmin = min_eigenvalue(&mat);
        if lmin < -tol::STATE {
            return Err(Error::numerical(format!(
                "state is not positive semidefinite (min eigenvalue {lmin:.3e})"
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Normalizes a nonzero PSD operator to unit trace, then validates.
    pub fn from_unnormalized(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::numerical("operator has non-positive trace"));
        }
        Self::new(dims, mat.scale_real(1.0 / tr))
    }

    pub fn from_pure(dims: Vec<usize>, psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::numerical("zero state vector"));
        }
        Self::new(dims, ComplexMatrix::outer(psi).scale_real(1.0 / norm))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let dim: usize = dims.iter().product();
        let mat = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
        Self { dims, mat }
    }

    /// Skips validation; for outputs of operations that preserve the invariants.
    pub(crate) fn new_unchecked(dims: Vec<usize>, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Shared local dimension, if all subsystems agree.
    pub fn local_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Convex combination p·self + (1−p)·other.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::usage("cannot mix states with different dims"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::usage(format!("mixing weight {p} outside [0,1]")));
        }
        let mut m = self.mat.scale_real(p);
        m.add_scaled(&other.mat, C64::new(1.0 - p, 0.0));
        Ok(Self::new_unchecked(self.dims.clone(), m))
    }

    /// Tensor product of states.
    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new_unchecked(dims, super::matrix::kron(&self.mat, &other.mat))
    }

    /// Reduced state on the subsystems in `keep` (kept in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        if keep.is_empty() {
            return Err(Error::usage("partial_trace needs at least one kept subsystem"));
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= n) {
            return Err(Error::usage(format!("invalid subsystem set {keep:?} for {n} parties")));
        }
        let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();
        let kdims: Vec<usize> = keep_sorted.iter().map(|&k| self.dims[k]).collect();
        let tdims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let kd: usize = kdims.iter().product();
        let td: usize = tdims.iter().product();
        let strides = strides(&self.dims);

        let full_index = |kidx: usize, tidx: usize| -> usize {
            let mut idx = 0;
            let mut r = kidx;
            for (pos, &party) in keep_sorted.iter().enumerate().rev() {
                idx += (r % kdims[pos]) * strides[party];
                r /= kdims[pos];
            }
            let mut r = tidx;
            for (pos, &party) in traced.iter().enumerate().rev() {
                idx += (r % tdims[pos]) * strides[party];
                r /= tdims[pos];
            }
            idx
        };

        let mut out = ComplexMatrix::zeros(kd, kd);
        for i in 0..kd {
            for j in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..td {
                    acc += self.mat[(full_index(i, t), full_index(j, t))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self::new_unchecked(kdims, out))
    }

    /// Transpose on one subsystem; the result may fail positivity.
    pub fn partial_transpose(&self, party: usize) -> Result<ComplexMatrix> {
        let n = self.dims.len();
        if party >= n {
            return Err(Error::usage(format!("party {party} out of range for {n} parties")));
        }
        let dp = self.dims[party];
        let stride = strides(&self.dims)[party];
        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let ip = (i / stride) % dp;
            for j in 0..dim {
                let jp = (j / stride) % dp;
                // swap the party's row and column digits
                let ni = i + (jp * stride) - (ip * stride);
                let nj = j + (ip * stride) - (jp * stride);
                out[(ni, nj)] = self.mat[(i, j)];
            }
        }
        Ok(out)
    }
}

fn check_dims(dims: &[usize], mat: &ComplexMatrix) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::usage(format!("subsystem dims must each be >= 2, got {dims:?}")));
    }
    let dim: usize = dims.iter().product();
    if dim > 256 {
        return Err(Error::usage(format!("total dimension {dim} exceeds 256")));
    }
    if mat.rows() != dim || mat.cols() != dim {
        return Err(Error::usage(format!(
            "matrix is {}x{}, dims {dims:?} need {dim}x{dim}",
            mat.rows(),
            mat.cols()
        )));
    }
    Ok(())
}

/// Row-major strides of a multi-index over `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Serializable raw form: subsystem dims plus row-major real and imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RawState {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl RawState {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix().as_slice();
        Self {
            dims: rho.dims().to_vec(),
            re: m.iter().map(|z| z.re).collect(),
            im: m.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.re.len() != self.im.len() {
            return Err(Error::usage("re and im arrays differ in length"));
        }
        let dim: usize = self.dims.iter().product();
        let data = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        DensityMatrix::new(self.dims.clone(), ComplexMatrix::from_row_major(dim, dim, data)?)
    }
}
