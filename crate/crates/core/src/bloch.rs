//! Generalized Gell-Mann basis, Bloch tensors, correlation matrices and
//! sector lengths.
//!
//! Basis normalization is tr[λᵢλⱼ] = d·δᵢⱼ with λ₀ = 𝟙. Ordering of the
//! traceless elements: symmetric off-diagonal (j<k lexicographic), then
//! antisymmetric off-diagonal (same order, −i at (j,k)), then diagonal by
//! increasing rank. For d=2 this gives (𝟙, X, Y, Z).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, C64};
use crate::tol;

/// One basis element in sparse form: (row, col, value).
pub type SparseEntries = Vec<(usize, usize, C64)>;

#[derive(Debug, Clone)]
pub struct GellMannBasis {
    d: usize,
    sparse: Vec<SparseEntries>,
}

impl GellMannBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::usage("Gell-Mann basis needs d >= 2"));
        }
        let df = d as f64;
        // off-diagonal elements have two unit entries; scale to tr λ² = d
        let off = (df / 2.0).sqrt();
        let mut sparse = Vec::with_capacity(d * d);
        sparse.push((0..d).map(|i| (i, i, C64::new(1.0, 0.0))).collect());
        for j in 0..d {
            for k in j + 1..d {
                sparse.push(vec![(j, k, C64::new(off, 0.0)), (k, j, C64::new(off, 0.0))]);
            }
        }
        for j in 0..d {
            for k in j + 1..d {
                sparse.push(vec![(j, k, C64::new(0.0, -off)), (k, j, C64::new(0.0, off))]);
            }
        }
        for l in 1..d {
            let lf = l as f64;
            // diag(1,…,1,−l,0,…) has squared norm l(l+1)
            let s = (df / (lf * (lf + 1.0))).sqrt();
            let mut e: SparseEntries = (0..l).map(|i| (i, i, C64::new(s, 0.0))).collect();
            e.push((l, l, C64::new(-lf * s, 0.0)));
            sparse.push(e);
        }
        Ok(Self { d, sparse })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.sparse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sparse.is_empty()
    }

    pub fn sparse(&self, i: usize) -> &SparseEntries {
        &self.sparse[i]
    }

    pub fn matrix(&self, i: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.d, self.d);
        for &(r, c, v) in &self.sparse[i] {
            m[(r, c)] = v;
        }
        m
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|i| self.matrix(i)).collect()
    }
}

/// Free-function constructor.
pub fn gellmann_basis(d: usize) -> Result<GellMannBasis> {
    GellMannBasis::new(d)
}

/// Real coefficients α over tuples of basis indices, flattened with the first
/// party as the most significant digit (base d²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochTensor {
    pub dims: Vec<usize>,
    pub alpha: Vec<f64>,
}

impl BlochTensor {
    pub fn d(&self) -> usize {
        self.dims[0]
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// Flattened position of an index tuple.
    pub fn position(&self, idx: &[usize]) -> usize {
        let b = self.d() * self.d();
        idx.iter().fold(0, |acc, &i| acc * b + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.alpha[self.position(idx)]
    }

    /// Index tuple of a flattened position.
    pub fn tuple(&self, mut pos: usize) -> Vec<usize> {
        let b = self.d() * self.d();
        let mut idx = vec![0; self.n()];
        for k in (0..self.n()).rev() {
            idx[k] = pos % b;
            pos /= b;
        }
        idx
    }
}

fn homogeneous_dim(rho: &DensityMatrix) -> Result<usize> {
    rho.local_dim()
        .ok_or_else(|| Error::usage(format!("subsystems must share one local dimension, got {:?}", rho.dims())))
}

/// α_{i₁…iₙ} = tr(ρ λ_{i₁}⊗…⊗λ_{iₙ}).
pub fn decompose(rho: &DensityMatrix) -> Result<BlochTensor> {
    let d = homogeneous_dim(rho)?;
    let basis = GellMannBasis::new(d)?;
    decompose_with(rho, &basis)
}

pub fn decompose_with(rho: &DensityMatrix, basis: &GellMannBasis) -> Result<BlochTensor> {
    let d = homogeneous_dim(rho)?;
    if basis.d() != d {
        return Err(Error::usage("basis dimension does not match the state"));
    }
    let n = rho.n_parties();
    let b = d * d;
    let total = b.pow(n as u32);
    let m = rho.matrix();
    let mut alpha = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for pos in 0..total {
        let mut r = pos;
        for k in (0..n).rev() {
            idx[k] = r % b;
            r /= b;
        }
        let v = trace_against_product(m, basis, &idx, d);
        if v.im.abs() > tol::STATE {
            return Err(Error::numerical(format!("Bloch coefficient has imaginary part {:.3e}", v.im)));
        }
        alpha.push(v.re);
    }
    Ok(BlochTensor {
        dims: rho.dims().to_vec(),
        alpha,
    })
}

// tr(ρ Λ) = Σ ρ[a,b] Λ[b,a], walking the sparse entries of each factor.
fn trace_against_product(m: &ComplexMatrix, basis: &GellMannBasis, idx: &[usize], d: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut stack: Vec<(usize, usize, usize, C64)> = vec![(0, 0, 0, C64::new(1.0, 0.0))];
    while let Some((depth, row, col, val)) = stack.pop() {
        if depth == idx.len() {
            // Λ[row, col] = val contributes ρ[col, row]·val
            acc += m[(col, row)] * val;
            continue;
        }
        for &(r, c, v) in basis.sparse(idx[depth]) {
            stack.push((depth + 1, row * d + r, col * d + c, val * v));
        }
    }
    acc
}

/// ρ = d⁻ⁿ Σ α λ⊗…⊗λ, validated as a state.
pub fn reconstruct(t: &BlochTensor) -> Result<DensityMatrix> {
    let d = t.d();
    let n = t.n();
    let b = d * d;
    if t.alpha.len() != b.pow(n as u32) {
        return Err(Error::usage("Bloch tensor has the wrong number of coefficients"));
    }
    if (t.alpha[0] - 1.0).abs() > tol::STATE {
        return Err(Error::usage("Bloch tensor must have alpha_0...0 = 1"));
    }
    let basis = GellMannBasis::new(d)?;
    let dim = d.pow(n as u32);
    let mut m = ComplexMatrix::zeros(dim, dim);
    let norm = 1.0 / (dim as f64);
    for (pos, &a) in t.alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let idx = t.tuple(pos);
        let mut stack: Vec<(usize, usize, usize, C64)> = vec![(0, 0, 0, C64::new(a * norm, 0.0))];
        while let Some((depth, row, col, val)) = stack.pop() {
            if depth == n {
                m[(row, col)] += val;
                continue;
            }
            for &(r, c, v) in basis.sparse(idx[depth]) {
                stack.push((depth + 1, row * d + r, col * d + c, val * v));
            }
        }
    }
    DensityMatrix::new(t.dims.clone(), m)
}

/// Two-body block t_{ij}, 1 ≤ i,j ≤ d²−1, of a bipartite state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub d: usize,
    pub t: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn new(d: usize, t: DMatrix<f64>) -> Result<Self> {
        let k = d * d - 1;
        if t.nrows() != k || t.ncols() != k {
            return Err(Error::usage(format!(
                "correlation matrix must be {k}x{k} for d={d}, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        Ok(Self { d, t })
    }
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    if rho.n_parties() != 2 {
        return Err(Error::usage(format!(
            "correlation matrix needs exactly 2 parties, got {}",
            rho.n_parties()
        )));
    }
    let alpha = decompose(rho)?;
    Ok(correlation_from_tensor(&alpha))
}

pub fn correlation_from_tensor(alpha: &BlochTensor) -> CorrelationMatrix {
    let d = alpha.d();
    let k = d * d - 1;
    let t = DMatrix::from_fn(k, k, |i, j| alpha.get(&[i + 1, j + 1]));
    CorrelationMatrix { d, t }
}

/// Sector lengths A₀…Aₙ with per-party one-body parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorVector {
    pub n: usize,
    pub d: usize,
    pub a: Vec<f64>,
    pub one_body_parts: Vec<f64>,
}

impl SectorVector {
    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }
}

pub fn sector_lengths(rho: &DensityMatrix) -> Result<SectorVector> {
    let alpha = decompose(rho)?;
    Ok(sectors_from_tensor(&alpha))
}

pub fn sectors_from_tensor(alpha: &BlochTensor) -> SectorVector {
    let n = alpha.n();
    let d = alpha.d();
    let mut a = vec![0.0; n + 1];
    let mut one = vec![0.0; n];
    for (pos, &v) in alpha.alpha.iter().enumerate() {
        let idx = alpha.tuple(pos);
        let support: Vec<usize> = (0..n).filter(|&k| idx[k] != 0).collect();
        let w = v * v;
        a[support.len()] += w;
        if support.len() == 1 {
            one[support[0]] += w;
        }
    }
    SectorVector {
        n,
        d,
        a,
        one_body_parts: one,
    }
}

/// Σ α² over index tuples whose support is exactly `subset` (bitmask over parties).
pub fn support_weight(alpha: &BlochTensor, mask: u32) -> f64 {
    let n = alpha.n();
    alpha
        .alpha
        .iter()
        .enumerate()
        .filter(|(pos, _)| {
            let idx = alpha.tuple(*pos);
            (0..n).all(|k| (idx[k] != 0) == (mask >> k & 1 == 1))
        })
        .map(|(_, v)| v * v)
        .sum()
}

pub fn subset_mask(subset: &[usize], n: usize) -> Result<u32> {
    if subset.is_empty() {
        return Err(Error::usage("subset must be nonempty"));
    }
    let mut mask = 0u32;
    for &k in subset {
        if k >= n {
            return Err(Error::usage(format!("party {k} out of range for {n} parties")));
        }
        mask |= 1 << k;
    }
    Ok(mask)
}

/// Second moment R^(2) on `subset` for an all-qubit state: 3^{−|S|} Σ α² over
/// tuples supported exactly on S.
pub fn qubit_second_moments(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    if rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::usage("qubit_second_moments needs an all-qubit state"));
    }
    let mask = subset_mask(subset, rho.n_parties())?;
    let alpha = decompose(rho)?;
    Ok(support_weight(&alpha, mask) / 3f64.powi(mask.count_ones() as i32))
}
