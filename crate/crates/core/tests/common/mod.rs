//! Independent reference implementations used to check the library.
//!
//! Everything here works on plain nalgebra matrices with explicit index
//! loops, and shares no code with the crate beyond type conversions.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rmom::qmat::{ComplexMatrix, DensityMatrix};

pub type M = DMatrix<C>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(m: &ComplexMatrix) -> M {
    M::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn to_state(dims: &[usize], m: &M) -> DensityMatrix {
    let cm = ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    DensityMatrix::new(dims.to_vec(), cm).expect("oracle state is valid")
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn kron(a: &M, b: &M) -> M {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    M::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn kron_all(ms: &[M]) -> M {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, m| kron(&acc, m))
}

fn digits(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = x % dims[k];
        x /= dims[k];
    }
    out
}

fn undigits(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Reduced matrix on `keep` (ascending) by summing matching traced digits.
pub fn partial_trace(rho: &M, dims: &[usize], keep: &[usize]) -> M {
    let kd: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let n: usize = kd.iter().product();
    let total: usize = dims.iter().product();
    let mut out = M::zeros(n, n);
    for r in 0..total {
        let rd = digits(r, dims);
        for c in 0..total {
            let cd = digits(c, dims);
            let traced_equal = (0..dims.len()).filter(|k| !keep.contains(k)).all(|k| rd[k] == cd[k]);
            if traced_equal {
                let rk: Vec<usize> = keep.iter().map(|&k| rd[k]).collect();
                let ck: Vec<usize> = keep.iter().map(|&k| cd[k]).collect();
                out[(undigits(&rk, &kd), undigits(&ck, &kd))] += rho[(r, c)];
            }
        }
    }
    out
}

pub fn partial_transpose(rho: &M, dims: &[usize], party: usize) -> M {
    let total: usize = dims.iter().product();
    M::from_fn(total, total, |r, c| {
        let mut rd = digits(r, dims);
        let mut cd = digits(c, dims);
        std::mem::swap(&mut rd[party], &mut cd[party]);
        rho[(undigits(&rd, dims), undigits(&cd, dims))]
    })
}

pub fn eigenvalues(h: &M) -> Vec<f64> {
    let sym = (h + h.adjoint()) * C::new(0.5, 0.0);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn trace_norm(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Generalized Gell-Mann matrices with tr(λᵢλⱼ) = d δᵢⱼ: identity, then for
/// each pair j<k the symmetric and antisymmetric ones, then the diagonal ones.
pub fn gell_mann(d: usize) -> Vec<M> {
    let s = (d as f64 / 2.0).sqrt();
    let mut out = vec![M::identity(d, d)];
    let mut sym = Vec::new();
    let mut anti = Vec::new();
    for j in 0..d {
        for k in (j + 1)..d {
            let mut a = M::zeros(d, d);
            a[(j, k)] = C::new(s, 0.0);
            a[(k, j)] = C::new(s, 0.0);
            sym.push(a);
            let mut b = M::zeros(d, d);
            b[(j, k)] = C::new(0.0, -s);
            b[(k, j)] = C::new(0.0, s);
            anti.push(b);
        }
    }
    out.extend(sym);
    out.extend(anti);
    for l in 1..d {
        let f = (d as f64 / (l * (l + 1)) as f64).sqrt();
        let mut m = M::zeros(d, d);
        for k in 0..l {
            m[(k, k)] = C::new(f, 0.0);
        }
        m[(l, l)] = C::new(-(l as f64) * f, 0.0);
        out.push(m);
    }
    out
}

/// All coefficients tr(ρ λ_{i1}⊗…⊗λ_{in}) with their index tuples.
pub fn bloch_coefficients(rho: &M, n: usize, d: usize) -> Vec<(Vec<usize>, f64)> {
    let basis = gell_mann(d);
    let k = d * d;
    let mut out = Vec::new();
    for pos in 0..k.pow(n as u32) {
        let idx = digits(pos, &vec![k; n]);
        let op = kron_all(&idx.iter().map(|&i| basis[i].clone()).collect::<Vec<_>>());
        out.push((idx, (rho * op).trace().re));
    }
    out
}

/// Sector lengths A₀…Aₙ by brute-force traces.
pub fn sector_lengths(rho: &M, n: usize, d: usize) -> Vec<f64> {
    let mut a = vec![0.0; n + 1];
    for (idx, v) in bloch_coefficients(rho, n, d) {
        a[idx.iter().filter(|&&i| i != 0).count()] += v * v;
    }
    a
}

/// One-body sector part of party `k`.
pub fn one_body(rho: &M, n: usize, d: usize, k: usize) -> f64 {
    bloch_coefficients(rho, n, d)
        .into_iter()
        .filter(|(idx, _)| idx.iter().enumerate().all(|(j, &i)| (i != 0) == (j == k)))
        .map(|(_, v)| v * v)
        .sum()
}

pub fn correlation(rho: &M, d: usize) -> DMatrix<f64> {
    let basis = gell_mann(d);
    let k = d * d - 1;
    DMatrix::from_fn(k, k, |i, j| (rho * kron(&basis[i + 1], &basis[j + 1])).trace().re)
}

/// S-moments written out term by term:
/// S2 = V Σ t², S4 = W [2 Σ_{ijkl} t_ij t_il t_kj t_kl + (Σ t²)²].
pub fn s_moments_literal(t: &DMatrix<f64>, d: usize) -> (f64, f64) {
    let dm = d as f64 - 1.0;
    let v = 1.0 / (dm * dm);
    let w = 1.0 / (3.0 * dm.powi(4));
    let n = t.nrows();
    let sum2: f64 = t.iter().map(|x| x * x).sum();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    quad += t[(i, j)] * t[(i, l)] * t[(k, j)] * t[(k, l)];
                }
            }
        }
    }
    (v * sum2, w * (2.0 * quad + sum2 * sum2))
}

/// R_{(ij),(kl)} = ρ_{(ik),(jl)} for a da×db state.
pub fn realign(rho: &M, da: usize, db: usize) -> M {
    let mut r = M::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    r[(i * da + j, k * db + l)] = rho[(i * db + k, j * db + l)];
                }
            }
        }
    }
    r
}

pub fn purity(rho: &M) -> f64 {
    (rho * rho).trace().re
}

pub fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<C> {
    DVector::from_fn(n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        C::new(a, b)
    })
}

pub fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<C> {
    let v = gaussian_vector(n, rng);
    let norm = v.norm();
    v / C::new(norm, 0.0)
}

pub fn projector(v: &DVector<C>) -> M {
    v * v.adjoint()
}

/// Ginibre-distributed mixed state G G† / tr.
pub fn random_mixed<R: Rng>(dim: usize, rng: &mut R) -> M {
    let g = M::from_fn(dim, dim, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        C::new(a, b)
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Convex mixture of 1..=8 product pure states.
pub fn random_product_mixture<R: Rng>(dims: &[usize], rng: &mut R) -> M {
    let total: usize = dims.iter().product();
    let terms = rng.random_range(1..=8);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let wsum: f64 = weights.iter().sum();
    let mut m = M::zeros(total, total);
    for w in weights {
        let parts: Vec<M> = dims.iter().map(|&d| projector(&unit_vector(d, rng))).collect();
        m += kron_all(&parts) * C::new(w / wsum, 0.0);
    }
    m
}

/// Three-qubit pure state |a⟩ on party `lone` times |b⟩ on the other two
/// (in ascending order), assembled amplitude by amplitude.
pub fn split_pure(lone: usize, a: &DVector<C>, b: &DVector<C>) -> DVector<C> {
    let rest: Vec<usize> = (0..3).filter(|&k| k != lone).collect();
    DVector::from_fn(8, |x, _| {
        let ds = digits(x, &[2, 2, 2]);
        a[ds[lone]] * b[ds[rest[0]] * 2 + ds[rest[1]]]
    })
}

/// Mixture of 1..=8 random pure states, all product across `lone | rest`.
pub fn random_fixed_bisep<R: Rng>(lone: usize, rng: &mut R) -> M {
    let terms = rng.random_range(1..=8);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let wsum: f64 = weights.iter().sum();
    let mut m = M::zeros(8, 8);
    for w in weights {
        let v = split_pure(lone, &unit_vector(2, rng), &unit_vector(4, rng));
        m += projector(&v) * C::new(w / wsum, 0.0);
    }
    m
}

/// Random orthogonal matrix from the QR of a real Gaussian matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

// Weingarten calculus for the fourth moment of a Haar unitary, used to check
// the moment-matching observables exactly.

fn perms4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn cycle_type(p: &[usize; 4]) -> Vec<usize> {
    let mut seen = [false; 4];
    let mut out = Vec::new();
    for i in 0..4 {
        if seen[i] {
            continue;
        }
        let (mut j, mut len) = (i, 0);
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Character of each S₄ irrep (partitions 4, 31, 22, 211, 1111) on a class.
fn characters(ct: &[usize]) -> [f64; 5] {
    match ct {
        [1, 1, 1, 1] => [1.0, 3.0, 2.0, 3.0, 1.0],
        [2, 1, 1] => [1.0, 1.0, 0.0, -1.0, -1.0],
        [2, 2] => [1.0, -1.0, 2.0, -1.0, 1.0],
        [3, 1] => [1.0, 0.0, -1.0, 0.0, 1.0],
        [4] => [1.0, -1.0, 0.0, 1.0, -1.0],
        _ => unreachable!(),
    }
}

fn schur_dims(d: f64) -> [f64; 5] {
    [
        d * (d + 1.0) * (d + 2.0) * (d + 3.0) / 24.0,
        d * (d + 1.0) * (d + 2.0) * (d - 1.0) / 8.0,
        d * d * (d + 1.0) * (d - 1.0) / 12.0,
        d * (d + 1.0) * (d - 1.0) * (d - 2.0) / 8.0,
        d * (d - 1.0) * (d - 2.0) * (d - 3.0) / 24.0,
    ]
}

fn weingarten(p: &[usize; 4], d: usize) -> f64 {
    let ch = characters(&cycle_type(p));
    let s = schur_dims(d as f64);
    let irrep_dims = [1.0, 3.0, 2.0, 3.0, 1.0];
    (0..5).filter(|&k| s[k] != 0.0).map(|k| irrep_dims[k] * irrep_dims[k] * ch[k] / s[k]).sum::<f64>() / 576.0
}

fn power_sum(ev: &[f64], p: &[usize; 4]) -> f64 {
    cycle_type(p).iter().map(|&l| ev.iter().map(|x| x.powi(l as i32)).sum::<f64>()).product()
}

/// E[(tr U M U† X)⁴] over Haar U for diagonal M and X given by eigenvalues.
pub fn haar_fourth_moment(m: &[f64], x: &[f64]) -> f64 {
    let d = m.len();
    let ps = perms4();
    let mut acc = 0.0;
    for s in &ps {
        for t in &ps {
            let mut tinv = [0; 4];
            for (i, &v) in t.iter().enumerate() {
                tinv[v] = i;
            }
            let comp = [s[tinv[0]], s[tinv[1]], s[tinv[2]], s[tinv[3]]];
            acc += weingarten(&comp, d) * power_sum(m, s) * power_sum(x, t);
        }
    }
    acc
}

/// Minimum of Στ⁴ subject to Στ² = s, Στ ≤ c, τ ≥ 0 in n variables.
///
/// Every local minimizer lies on some face {τᵢ = 0 for z coordinates}. On a
/// face with n' free coordinates either Στ ≤ c is slack (then the flat vector
/// is optimal) or it is tight, and the feasible set is the sphere
/// τ = (c/n')·1 + ρu, u ⊥ 1, |u| = 1. The tight case is minimized by
/// Riemannian gradient descent from random feasible starts, keeping every
/// iterate nonnegative.
pub fn min_sum4_numeric(s: f64, c: f64, n: usize, starts: usize, seed: u64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let mut r = rng(seed);
    let mut best = f64::INFINITY;
    for np in 1..=n {
        let nf = np as f64;
        if (s * nf).sqrt() <= c {
            best = best.min(s * s / nf);
        }
        let rho2 = s - c * c / nf;
        if np < 2 || rho2 < 0.0 {
            continue;
        }
        let rho = rho2.sqrt();
        let centre = c / nf;
        let to_tau = |u: &[f64]| -> Vec<f64> { u.iter().map(|x| centre + rho * x).collect() };
        let normalize = |v: &mut Vec<f64>| -> bool {
            let mean = v.iter().sum::<f64>() / nf;
            v.iter_mut().for_each(|x| *x -= mean);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-300 {
                return false;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            true
        };
        let f = |u: &[f64]| -> f64 { to_tau(u).iter().map(|t| t.powi(4)).sum() };
        let feasible = |u: &[f64]| to_tau(u).iter().all(|&t| t >= 0.0);
        for _ in 0..starts {
            let mut u = Vec::new();
            for _try in 0..1000 {
                let mut v: Vec<f64> = (0..np).map(|_| r.random::<f64>()).collect();
                if normalize(&mut v) && feasible(&v) {
                    u = v;
                    break;
                }
            }
            if u.is_empty() {
                continue;
            }
            let mut fu = f(&u);
            let mut step = 0.1;
            for _ in 0..20_000 {
                let tau = to_tau(&u);
                let mut g: Vec<f64> = tau.iter().map(|t| 4.0 * rho * t.powi(3)).collect();
                let gm = g.iter().sum::<f64>() / nf;
                g.iter_mut().for_each(|x| *x -= gm);
                let gu: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
                g.iter_mut().zip(&u).for_each(|(x, ui)| *x -= gu * ui);
                let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if gn < 1e-14 {
                    break;
                }
                let mut moved = false;
                while step > 1e-18 {
                    let mut v: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
                    if normalize(&mut v) && feasible(&v) {
                        let fv = f(&v);
                        if fv < fu {
                            u = v;
                            fu = fv;
                            step *= 2.0;
                            moved = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            best = best.min(fu);
        }
    }
    best
}

/// Property-test settings: `cases` runs, no regression files on disk.
pub fn prop_config(cases: u32) -> proptest::prelude::ProptestConfig {
    proptest::prelude::ProptestConfig {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
