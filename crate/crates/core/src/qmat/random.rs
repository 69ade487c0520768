//! Seeded randomness: Haar unitaries and random-state samplers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::matrix::{kron, kron_vec, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// (master seed, stream index). Streams with the same path are bit-identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPath {
    pub seed: u64,
    pub stream: u64,
}

impl SeedPath {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone)]
pub struct UnitarySample {
    pub dim: usize,
    pub mat: ComplexMatrix,
    pub seed_path: SeedPath,
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary drawn from a fresh stream.
pub fn haar_unitary(d: usize, path: SeedPath) -> Result<UnitarySample> {
    if d < 2 {
        return Err(Error::usage("haar_unitary needs d >= 2"));
    }
    let mut rng = path.rng();
    Ok(UnitarySample {
        dim: d,
        mat: haar_unitary_with(d, &mut rng),
        seed_path: path,
    })
}

/// Ginibre matrix, QR, then phase-fix Q by the signs of diag(R).
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let z = DMatrix::<C64>::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    ComplexMatrix::from_fn(d, d, |i, j| {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Uniformly random pure state of dimension `dim`.
pub fn random_pure_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random mixed state G·G†/tr from a square Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(dims.to_vec(), m.scale_real(1.0 / tr))
}

/// Random pure state as a density matrix.
pub fn random_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let v = random_pure_vector(dim, rng);
    DensityMatrix::new_unchecked(dims.to_vec(), ComplexMatrix::outer(&v))
}

/// Weights drawn uniformly from the simplex.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Mixture of `terms` fully product pure states.
pub fn random_product_mixture<R: Rng + ?Sized>(dims: &[usize], terms: usize, rng: &mut R) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let weights = dirichlet_weights(terms.max(1), rng);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for &w in &weights {
        let mut psi = vec![C64::new(1.0, 0.0)];
        for &d in dims {
            psi = kron_vec(&psi, &random_pure_vector(d, rng));
        }
        m.add_scaled(&ComplexMatrix::outer(&psi), C64::new(w, 0.0));
    }
    DensityMatrix::new_unchecked(dims.to_vec(), m)
}

/// Random fully separable state with between 1 and 8 product terms.
pub fn random_separable<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let terms = rng.random_range(1..=8);
    random_product_mixture(dims, terms, rng)
}

/// Mixture of states that are product across the split `group | rest`,
/// each side an arbitrary pure state.
pub fn random_split_mixture<R: Rng + ?Sized>(
    dims: &[usize],
    group: &[usize],
    terms: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = dims.len();
    if group.is_empty() || group.len() >= n || group.iter().any(|&g| g >= n) {
        return Err(Error::usage(format!("invalid bipartition group {group:?}")));
    }
    let rest: Vec<usize> = (0..n).filter(|k| !group.contains(k)).collect();
    let ga: usize = group.iter().map(|&k| dims[k]).product();
    let gb: usize = rest.iter().map(|&k| dims[k]).product();
    let mut order: Vec<usize> = group.to_vec();
    order.extend(&rest);
    let weights = dirichlet_weights(terms.max(1), rng);
    let dim: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for &w in &weights {
        let a = ComplexMatrix::outer(&random_pure_vector(ga, rng));
        let b = ComplexMatrix::outer(&random_pure_vector(gb, rng));
        let block = kron(&a, &b);
        let permuted = permute_subsystems(&block, &order.iter().map(|&k| dims[k]).collect::<Vec<_>>(), &order);
        m.add_scaled(&permuted, C64::new(w, 0.0));
    }
    Ok(DensityMatrix::new_unchecked(dims.to_vec(), m))
}

/// Reorders an operator whose tensor factors are listed in `order` (as party
/// labels, with dims `ordered_dims`) back into ascending party order.
pub fn permute_subsystems(m: &ComplexMatrix, ordered_dims: &[usize], order: &[usize]) -> ComplexMatrix {
    let n = order.len();
    let mut dims = vec![0; n];
    for (pos, &party) in order.iter().enumerate() {
        dims[party] = ordered_dims[pos];
    }
    let src_strides = super::density::strides(ordered_dims);
    let dst_strides = super::density::strides(&dims);
    let dim = m.rows();
    // map destination index -> source index
    let map: Vec<usize> = (0..dim)
        .map(|idx| {
            let mut src = 0;
            for (pos, &party) in order.iter().enumerate() {
                let digit = (idx / dst_strides[party]) % dims[party];
                src += digit * src_strides[pos];
            }
            src
        })
        .collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| m[(map[i], map[j])])
}

/// Local unitary U₁⊗…⊗Uₙ with independent Haar factors.
pub fn random_local_unitary<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(1);
    for &d in dims {
        u = kron(&u, &haar_unitary_with(d, rng));
    }
    u
}

/// U ρ U†
pub fn conjugate(rho: &DensityMatrix, u: &ComplexMatrix) -> DensityMatrix {
    let m = u.matmul(rho.matrix()).matmul(&u.adjoint());
    DensityMatrix::new_unchecked(rho.dims().to_vec(), m)
}
