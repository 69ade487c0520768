//! Moments of randomized local measurements.
//!
//! The analytic S-moments follow from the singular values τ of the
//! correlation matrix: S⁽²⁾ = VΣτ², S⁽⁴⁾ = W[2Στ⁴ + (Στ²)²] with
//! V = 1/(d−1)², W = 1/(3(d−1)⁴). The observable M_d makes the Haar-unitary
//! moments R⁽ʳ⁾ proportional to them, so they can be estimated by sampling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{correlation_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::qmat::{
    haar_unitary_with, kron, real_singular_values, ComplexMatrix, DensityMatrix, SeedPath, C64,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentSource {
    Analytic,
    MonteCarlo {
        samples: usize,
        std_err_s2: f64,
        std_err_s4: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub s2: f64,
    pub s4: f64,
    pub d: usize,
    pub source: MomentSource,
}

pub fn v_factor(d: usize) -> f64 {
    let dm = d as f64 - 1.0;
    1.0 / (dm * dm)
}

pub fn w_factor(d: usize) -> f64 {
    let dm = d as f64 - 1.0;
    1.0 / (3.0 * dm.powi(4))
}

/// Analytic moments from a correlation matrix, via its singular values.
pub fn s_moments(t: &CorrelationMatrix) -> Result<MomentPair> {
    let k = t.d * t.d - 1;
    if t.t.nrows() != k || t.t.ncols() != k {
        return Err(Error::usage(format!("correlation matrix must be {k}x{k} for d={}", t.d)));
    }
    s_moments_from_singvals(&real_singular_values(&t.t), t.d)
}

pub fn s_moments_from_singvals(tau: &[f64], d: usize) -> Result<MomentPair> {
    if d < 2 {
        return Err(Error::usage("moments need d >= 2"));
    }
    if tau.len() > d * d - 1 {
        return Err(Error::usage(format!("at most {} singular values for d={d}", d * d - 1)));
    }
    if let Some(&bad) = tau.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::usage(format!("singular values must be non-negative, got {bad}")));
    }
    let sum2: f64 = tau.iter().map(|x| x * x).sum();
    let sum4: f64 = tau.iter().map(|x| x.powi(4)).sum();
    Ok(MomentPair {
        s2: v_factor(d) * sum2,
        s4: w_factor(d) * (2.0 * sum4 + sum2 * sum2),
        d,
        source: MomentSource::Analytic,
    })
}

/// Analytic moments of a bipartite state.
pub fn state_moments(rho: &DensityMatrix) -> Result<MomentPair> {
    s_moments(&correlation_matrix(rho)?)
}

/// n!! for n ≥ −1, in log space.
fn ln_double_factorial(n: i64) -> f64 {
    let mut acc = 0.0;
    let mut k = n;
    while k > 1 {
        acc += (k as f64).ln();
        k -= 2;
    }
    acc
}

/// ln Γ(n/2) for a positive integer n.
fn ln_gamma_half(n: u64) -> f64 {
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x+1) = xΓ(x)
    let (mut x, mut acc) = if n % 2 == 0 { (1.0, 0.0) } else { (0.5, 0.5 * std::f64::consts::PI.ln()) };
    let target = n as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Normalization making S⁽ʳ⁾ = 1 on pure products when moments are written
/// as unnormalized integrals over two unit spheres in ℝ^{d²−1}.
pub fn normalization_n(r: u32, d: usize) -> Result<f64> {
    if r != 2 && r != 4 {
        return Err(Error::usage(format!("normalization defined for r in {{2,4}}, got {r}")));
    }
    if d < 2 {
        return Err(Error::usage("normalization needs d >= 2"));
    }
    let dd = (d * d) as i64;
    let r = r as i64;
    let ln_num = 2.0 * ln_double_factorial(dd + r - 3);
    let ln_den = r as f64 * (d as f64 - 1.0).ln() + 2.0 * ln_double_factorial(r - 1) + 2.0 * ln_double_factorial(dd - 3);
    let n = (dd - 1) as f64;
    let ln_sphere = ln_gamma_half((dd - 1) as u64) - 2f64.ln() - 0.5 * n * std::f64::consts::PI.ln();
    Ok((ln_num - ln_den + 2.0 * ln_sphere).exp())
}

/// Surface area of the unit sphere in ℝ^{d²−1}.
pub fn sphere_area(d: usize) -> f64 {
    let n = (d * d - 1) as u64;
    (2f64.ln() + 0.5 * n as f64 * std::f64::consts::PI.ln() - ln_gamma_half(n)).exp()
}

/// Prefactor (V for r=2, W for r=4) implied by N(r,d) once the sphere
/// integrals of monomials are carried out.
pub fn implied_prefactor(r: u32, d: usize) -> Result<f64> {
    let big_n = normalization_n(r, d)?;
    let n = (d * d - 1) as f64;
    let area = sphere_area(d);
    let (odd, rising) = match r {
        2 => (1.0, n),
        _ => (3.0, n * (n + 2.0)),
    };
    Ok(big_n * area * area * odd / (rising * rising))
}

/// Diagonal observable whose Haar moments reproduce the S-moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentObservable {
    pub d: usize,
    pub eigenvalues: Vec<f64>,
    pub y: f64,
}

fn even_poly_diff(d: f64, y: f64) -> f64 {
    let p1 = d * (d + 2.0).powi(2) / 32.0 - (d + 2.0).powi(2) / 4.0 * y + (d + 1.0) * (d + 6.0) / 4.0 * y * y
        - 2.0 * d * y.powi(3)
        + (d - 1.0) * y.powi(4);
    let q = d * d + 3.0 * d + 3.0;
    let p2 = q * d / 32.0 - q / 4.0 * y + (d * d + 8.0 * d + 2.0) / 4.0 * y * y - (3.0 * d - 4.0) * y.powi(3)
        + (3.0 * d - 7.0) / 2.0 * y.powi(4)
        + (3.0 * d / 32.0 - 0.75 * y + 0.5 * y * y - 2.0 * y.powi(3) + 3.0 * (d - 1.0) / d * y.powi(4)) / (d - 1.0);
    p1 - p2
}

/// Real roots of the even-dimension matching condition, ascending.
pub fn even_roots(d: usize) -> Vec<f64> {
    let df = d as f64;
    let f = |y: f64| even_poly_diff(df, y);
    let (lo, hi, steps) = (-20.0, 20.0, 40_000);
    let h = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=steps {
        let b = lo + k as f64 * h;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm == 0.0 || (r - l) < 1e-15 {
                    l = m;
                    r = m;
                    break;
                }
                if fl * fm < 0.0 {
                    r = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            roots.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    roots
}

fn odd_observable(d: usize) -> MomentObservable {
    let df = d as f64;
    let y = 0.5 * (1.0 - (1.0 + (df + 3.0 + (df.powi(3) + 3.0 * df * df + df + 3.0).sqrt()) / (df - 2.0)).sqrt());
    let u = (2.0 * y - 1.0).powi(2);
    let den = ((df - 1.0) * (u + df)).sqrt();
    let ap = (df - 2.0 * y + 1.0) / den;
    let am = (-df - 2.0 * y + 1.0) / den;
    let beta = -((df - 1.0) * u / (u + df)).sqrt();
    let half = (d - 1) / 2;
    let mut ev = vec![ap; half];
    ev.push(beta);
    ev.extend(std::iter::repeat_n(am, half));
    MomentObservable { d, eigenvalues: ev, y }
}

fn even_eigenvalues(d: usize, y: f64) -> Vec<f64> {
    let df = d as f64;
    let den = (df.powi(3) + 4.0 * df * df * (y - 1.0) * y - 4.0 * df * (y - 1.0).powi(2)).sqrt();
    let ap = (2.0 * df - 4.0 * (y - 1.0)) / den;
    let am = (-2.0 * df - 4.0 * (y - 1.0)) / den;
    let beta = (2.0 * df * (2.0 * y - 1.0) - 4.0 * (y - 1.0)) / den;
    let mut ev = vec![ap; (d - 2) / 2];
    ev.push(beta);
    ev.extend(std::iter::repeat_n(am, d / 2));
    ev
}

fn even_observable(d: usize) -> Result<MomentObservable> {
    let roots = even_roots(d);
    let y = *roots
        .first()
        .ok_or_else(|| Error::numerical(format!("no real root for the d={d} observable")))?;
    // The eigenvalue expressions must be evaluated at the reflected root 1−y;
    // evaluating them at y itself breaks the fourth-moment matching.
    let mut ev = even_eigenvalues(d, 1.0 - y);
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical(format!("observable for d={d} is not finite")));
    }
    let norm2: f64 = ev.iter().map(|x| x * x).sum();
    let s = (d as f64 / norm2).sqrt();
    ev.iter_mut().for_each(|x| *x *= s);
    Ok(MomentObservable { d, eigenvalues: ev, y })
}

pub fn moment_observable(d: usize) -> Result<MomentObservable> {
    match d {
        0 | 1 => Err(Error::usage("observable needs d >= 2")),
        2 => Ok(MomentObservable {
            d,
            eigenvalues: vec![1.0, -1.0],
            y: f64::NAN,
        }),
        d if d > 16 => Err(Error::usage("observable supported for d <= 16")),
        d if d % 2 == 1 => Ok(odd_observable(d)),
        d => even_observable(d),
    }
}

/// The d=3 values α±/γ and 2β/γ with β = −√(7+2√15), γ = 2√(5+√15), α± = ±3−β.
pub fn qutrit_observable_closed_form() -> [f64; 3] {
    let s15 = 15f64.sqrt();
    let beta = -(7.0 + 2.0 * s15).sqrt();
    let gamma = 2.0 * (5.0 + s15).sqrt();
    [(3.0 - beta) / gamma, 2.0 * beta / gamma, (-3.0 - beta) / gamma]
}

/// S⁽²⁾ = (d+1)²R⁽²⁾, S⁽⁴⁾ = (d+1)²(d²+1)²/(9(d−1)²)·R⁽⁴⁾.
pub fn r_to_s_factors(d: usize) -> (f64, f64) {
    let df = d as f64;
    let f2 = (df + 1.0).powi(2);
    let f4 = f2 * (df * df + 1.0).powi(2) / (9.0 * (df - 1.0).powi(2));
    (f2, f4)
}

pub fn r_to_s(r2: f64, r4: f64, d: usize) -> Result<MomentPair> {
    if d < 2 {
        return Err(Error::usage("conversion needs d >= 2"));
    }
    let (f2, f4) = r_to_s_factors(d);
    Ok(MomentPair {
        s2: f2 * r2,
        s4: f4 * r4,
        d,
        source: MomentSource::Analytic,
    })
}

/// Number of batches used for Monte Carlo standard errors.
pub const MC_BATCHES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub r: u32,
    pub mean: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McMoments {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub batches: usize,
    pub estimates: Vec<MomentEstimate>,
}

impl McMoments {
    pub fn get(&self, r: u32) -> Option<&MomentEstimate> {
        self.estimates.iter().find(|e| e.r == r)
    }

    /// Converted S-moments; needs both r=2 and r=4 estimates.
    pub fn to_s_moments(&self) -> Result<MomentPair> {
        let (e2, e4) = match (self.get(2), self.get(4)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::usage("conversion needs r=2 and r=4 estimates")),
        };
        let (f2, f4) = r_to_s_factors(self.d);
        Ok(MomentPair {
            s2: f2 * e2.mean,
            s4: f4 * e4.mean,
            d: self.d,
            source: MomentSource::MonteCarlo {
                samples: self.samples,
                std_err_s2: f2 * e2.std_err,
                std_err_s4: f4 * e4.std_err,
            },
        })
    }
}

/// tr[ρ (A⊗B)] = Σ ρ_{(ik),(jl)} A_{ji} B_{lk}
fn local_expectation(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, d: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            let aji = a[(j, i)];
            for k in 0..d {
                let row = i * d + k;
                let mut inner = C64::new(0.0, 0.0);
                for l in 0..d {
                    inner += rho[(row, j * d + l)] * b[(l, k)];
                }
                acc += aji * inner;
            }
        }
    }
    acc.re
}

fn rotated(diag: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    u.matmul(diag).matmul(&u.adjoint())
}

/// Monte Carlo estimates of R⁽ʳ⁾ = E[tr(ρ U_A M U_A† ⊗ U_B M U_B†)ʳ].
///
/// Samples are split into [`MC_BATCHES`] batches, each drawn from its own
/// stream (seed, batch). Batches run in parallel and are reduced in index
/// order, so results do not depend on the thread count.
pub fn mc_moments(
    rho: &DensityMatrix,
    obs: &MomentObservable,
    r_list: &[u32],
    samples: usize,
    seed: u64,
) -> Result<McMoments> {
    let d = match rho.dims() {
        [a, b] if a == b => *a,
        dims => return Err(Error::usage(format!("Monte Carlo moments need a d x d state, got {dims:?}"))),
    };
    if obs.d != d {
        return Err(Error::usage(format!("observable has d={}, state has d={d}", obs.d)));
    }
    if samples < MC_BATCHES {
        return Err(Error::usage(format!("need at least {MC_BATCHES} samples, got {samples}")));
    }
    if r_list.is_empty() || r_list.iter().any(|&r| r == 0 || r > 8) {
        return Err(Error::usage(format!("moment orders must be in 1..=8, got {r_list:?}")));
    }
    let mut orders = r_list.to_vec();
    orders.sort_unstable();
    orders.dedup();

    let diag = ComplexMatrix::from_real_diagonal(&obs.eigenvalues);
    let m = rho.matrix();
    let base = samples / MC_BATCHES;
    let extra = samples % MC_BATCHES;

    let batch_sums: Vec<Vec<f64>> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let count = base + usize::from(b < extra);
            let mut rng = SeedPath::new(seed, b as u64).rng();
            let mut sums = vec![0.0; orders.len()];
            for _ in 0..count {
                let ua = haar_unitary_with(d, &mut rng);
                let ub = haar_unitary_with(d, &mut rng);
                let x = local_expectation(m, &rotated(&diag, &ua), &rotated(&diag, &ub), d);
                for (s, &r) in sums.iter_mut().zip(&orders) {
                    *s += x.powi(r as i32);
                }
            }
            sums
        })
        .collect();

    let estimates = orders
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let total: f64 = batch_sums.iter().map(|s| s[k]).sum();
            let mean = total / samples as f64;
            let means: Vec<f64> = batch_sums
                .iter()
                .enumerate()
                .map(|(b, s)| s[k] / (base + usize::from(b < extra)) as f64)
                .collect();
            let mbar = means.iter().sum::<f64>() / MC_BATCHES as f64;
            let var = means.iter().map(|x| (x - mbar).powi(2)).sum::<f64>() / (MC_BATCHES - 1) as f64;
            MomentEstimate {
                r,
                mean,
                std_err: (var / MC_BATCHES as f64).sqrt(),
            }
        })
        .collect();

    Ok(McMoments {
        d,
        samples,
        seed,
        batches: MC_BATCHES,
        estimates,
    })
}

fn pauli_matrix(i: usize) -> ComplexMatrix {
    let (z, o, j) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let data = match i {
        1 => vec![z, o, o, z],
        2 => vec![z, -j, j, z],
        _ => vec![o, z, z, -o],
    };
    ComplexMatrix::from_row_major(2, 2, data).expect("2x2")
}

/// Exact second moment on `subset` for qubits, from squared Pauli correlators
/// of the reduced state (the Pauli group is a unitary 2-design).
pub fn pauli_r2(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    if rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::usage("pauli_r2 needs an all-qubit state"));
    }
    let reduced = rho.partial_trace(subset)?;
    let k = subset.len();
    let mut total = 0.0;
    for code in 0..3usize.pow(k as u32) {
        let mut op = ComplexMatrix::identity(1);
        let mut c = code;
        for _ in 0..k {
            op = kron(&op, &pauli_matrix(c % 3 + 1));
            c /= 3;
        }
        total += reduced.matrix().trace_product(&op).re.powi(2);
    }
    Ok(total / 3f64.powi(k as i32))
}
