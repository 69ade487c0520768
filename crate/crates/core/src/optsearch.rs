//! Random-restart local optimization: the biseparability conjecture scan and
//! the PPT lower boundary of the moment plane.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::GellMannBasis;
use crate::error::{Error, Result};
use crate::qmat::{hermitian_eigenvalues, ComplexMatrix, DensityMatrix, SeedPath, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub evaluations: u64,
    pub direction: Direction,
    /// Free-form description of the winning configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Central-difference step for numerical gradients.
    pub grad_step: f64,
    /// Evaluation budget, gradients included.
    pub max_evals: u64,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grad_step: 1e-6,
            max_evals: 10_000,
            tol: 1e-8,
        }
    }
}

struct Counted<'a, F> {
    f: &'a F,
    evals: u64,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::numerical(format!("objective is not finite ({v})")));
        }
        Ok(v)
    }

    fn grad(&mut self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut xp = x.to_vec();
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            let xi = xp[i];
            xp[i] = xi + h;
            let fp = self.eval(&xp)?;
            xp[i] = xi - h;
            let fm = self.eval(&xp)?;
            xp[i] = xi;
            g[i] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quasi-Newton (BFGS) descent from `x0` with default options and gradient tolerance `tol`.
pub fn local_minimize<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], tol: f64) -> Result<OptResult> {
    local_minimize_with(
        f,
        x0,
        &MinimizeOptions {
            tol,
            ..MinimizeOptions::default()
        },
    )
}

pub fn local_minimize_with<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &MinimizeOptions) -> Result<OptResult> {
    let n = x0.len();
    let mut obj = Counted { f, evals: 0 };
    let mut x = x0.to_vec();
    let mut fx = obj.eval(&x)?;
    let grad_cost = 2 * n as u64;
    let finish = |x: Vec<f64>, fx: f64, evals: u64| OptResult {
        best_value: fx,
        best_params: x,
        restarts: 1,
        seed: 0,
        evaluations: evals,
        direction: Direction::Minimize,
        detail: None,
    };
    if n == 0 {
        return Ok(finish(x, fx, obj.evals));
    }
    if obj.evals + grad_cost > opts.max_evals {
        return Ok(finish(x, fx, obj.evals));
    }
    let mut g = obj.grad(&x, opts.grad_step)?;
    // inverse Hessian approximation, row-major
    let mut h = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = scale;
        }
    };
    reset(&mut h, 1.0);
    let mut first = true;

    while dot(&g, &g).sqrt() >= opts.tol {
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            reset(&mut h, 1.0);
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        // backtracking line search with the Armijo condition
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            if obj.evals + 1 > opts.max_evals {
                break;
            }
            let xt: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let ft = obj.eval(&xt)?;
            if ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((xt, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        if obj.evals + grad_cost > opts.max_evals {
            x = xn;
            fx = fnew;
            break;
        }
        let gn = obj.grad(&xn, opts.grad_step)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            if first {
                reset(&mut h, sy / dot(&y, &y));
                first = false;
            }
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let stalled = (fx - fnew).abs() <= 1e-16 * fx.abs().max(1e-300) && alpha < 1e-10;
        x = xn;
        fx = fnew;
        g = gn;
        if stalled {
            break;
        }
    }
    Ok(finish(x, fx, obj.evals))
}

/// Runs `restarts` local searches from `init`-drawn points, each on its own
/// stream (seed, stream_base + i). The extremal result wins; ties go to the
/// lowest stream.
pub fn multistart<F, I>(
    f: &F,
    init: &I,
    restarts: usize,
    seed: u64,
    stream_base: u64,
    direction: Direction,
    opts: &MinimizeOptions,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    I: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<f64> + Sync,
{
    if restarts == 0 {
        return Err(Error::usage("need at least one restart"));
    }
    let sign = match direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let signed = |x: &[f64]| sign * f(x);
    let runs: Vec<Result<OptResult>> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeedPath::new(seed, stream_base + i as u64).rng();
            let x0 = init(&mut rng);
            local_minimize_with(&signed, &x0, opts)
        })
        .collect();
    let mut best: Option<OptResult> = None;
    let mut evals = 0;
    for run in runs {
        let run = run?;
        evals += run.evaluations;
        if best.as_ref().is_none_or(|b| run.best_value < b.best_value) {
            best = Some(run);
        }
    }
    let mut best = best.expect("restarts > 0");
    best.best_value *= sign;
    best.restarts = restarts;
    best.seed = seed;
    best.evaluations = evals;
    best.direction = direction;
    Ok(best)
}

/// Three-qubit bipartition X|YZ, labelled by the lone party X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bipartition {
    AvsBC,
    BvsAC,
    CvsAB,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Bipartition::AvsBC, Bipartition::BvsAC, Bipartition::CvsAB];

    pub fn lone(self) -> usize {
        match self {
            Bipartition::AvsBC => 0,
            Bipartition::BvsAC => 1,
            Bipartition::CvsAB => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bipartition::AvsBC => "A|BC",
            Bipartition::BvsAC => "B|AC",
            Bipartition::CvsAB => "C|AB",
        }
    }
}

/// One pure term u⊗v across a bipartition, with mixture weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BisepTerm {
    pub cut: Bipartition,
    /// State of the lone qubit.
    pub single: [C64; 2],
    /// State of the other two qubits, in ascending party order.
    pub pair: [C64; 4],
    pub weight: f64,
}

impl BisepTerm {
    /// Normalized three-qubit vector with party A as the most significant bit.
    pub fn vector(&self) -> [C64; 8] {
        let lone = self.cut.lone();
        let others: Vec<usize> = (0..3).filter(|&k| k != lone).collect();
        let mut v = [C64::new(0.0, 0.0); 8];
        let mut norm = 0.0;
        for (idx, slot) in v.iter_mut().enumerate() {
            let bit = |party: usize| (idx >> (2 - party)) & 1;
            let pair_idx = bit(others[0]) * 2 + bit(others[1]);
            *slot = self.single[bit(lone)] * self.pair[pair_idx];
            norm += slot.norm_sqr();
        }
        let s = 1.0 / norm.sqrt();
        v.iter_mut().for_each(|z| *z *= s);
        v
    }
}

fn marginal(v: &[C64; 8], party: usize) -> [[C64; 2]; 2] {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    let shift = 2 - party;
    for i in 0..8 {
        for j in 0..8 {
            // same bits outside `party`
            if (i ^ j) & !(1 << shift) != 0 {
                continue;
            }
            m[(i >> shift) & 1][(j >> shift) & 1] += v[i] * v[j].conj();
        }
    }
    m
}

/// A₂+A₃−3(1+A₁) = 8(1 + tr ρ² − Σ_X tr ρ_X²) for a mixture of biseparable terms.
pub fn mixture_objective(terms: &[BisepTerm]) -> f64 {
    let wsum: f64 = terms.iter().map(|t| t.weight).sum();
    let vs: Vec<[C64; 8]> = terms.iter().map(|t| t.vector()).collect();
    let ms: Vec<[[[C64; 2]; 2]; 3]> = vs.iter().map(|v| [marginal(v, 0), marginal(v, 1), marginal(v, 2)]).collect();
    let mut purity = 0.0;
    let mut marg = 0.0;
    for k in 0..terms.len() {
        for l in 0..terms.len() {
            let w = terms[k].weight * terms[l].weight / (wsum * wsum);
            let ov: C64 = vs[k].iter().zip(&vs[l]).map(|(a, b)| a.conj() * b).sum();
            purity += w * ov.norm_sqr();
            for x in 0..3 {
                let (a, b) = (&ms[k][x], &ms[l][x]);
                let mut tr = C64::new(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        tr += a[i][j] * b[j][i];
                    }
                }
                marg += w * tr.re;
            }
        }
    }
    8.0 * (1.0 + purity - marg)
}

/// Parameters per mixture term: 4 reals for the lone qubit, 8 for the pair, 1 weight.
pub const PARAMS_PER_TERM: usize = 13;

pub fn decode_terms(cuts: &[Bipartition], x: &[f64]) -> Vec<BisepTerm> {
    cuts.iter()
        .enumerate()
        .map(|(k, &cut)| {
            let p = &x[k * PARAMS_PER_TERM..(k + 1) * PARAMS_PER_TERM];
            BisepTerm {
                cut,
                single: [C64::new(p[0], p[1]), C64::new(p[2], p[3])],
                pair: [
                    C64::new(p[4], p[5]),
                    C64::new(p[6], p[7]),
                    C64::new(p[8], p[9]),
                    C64::new(p[10], p[11]),
                ],
                weight: p[12] * p[12],
            }
        })
        .collect()
}

/// All multisets of `r` bipartitions (cuts in non-decreasing order).
pub fn cut_assignments(r: usize) -> Vec<Vec<Bipartition>> {
    let mut out = Vec::new();
    for na in 0..=r {
        for nb in 0..=(r - na) {
            let nc = r - na - nb;
            let mut v = vec![Bipartition::AvsBC; na];
            v.extend(std::iter::repeat_n(Bipartition::BvsAC, nb));
            v.extend(std::iter::repeat_n(Bipartition::CvsAB, nc));
            out.push(v);
        }
    }
    out
}

/// Maximizes A₂+A₃−3(1+A₁) over mixtures of up to `max_terms` pure states,
/// each product across some bipartition, for every assignment of cuts.
/// A positive result would contradict the conjectured bound for mixtures
/// across different bipartitions.
pub fn bisep_conjecture_scan(max_terms: usize, restarts: usize, seed: u64) -> Result<OptResult> {
    bisep_conjecture_scan_with(max_terms, restarts, seed, &MinimizeOptions::default())
}

pub fn bisep_conjecture_scan_with(
    max_terms: usize,
    restarts: usize,
    seed: u64,
    opts: &MinimizeOptions,
) -> Result<OptResult> {
    if max_terms == 0 || max_terms > 8 {
        return Err(Error::usage(format!("max_terms must be in 1..=8, got {max_terms}")));
    }
    let mut best: Option<(OptResult, Vec<Bipartition>)> = None;
    let mut evals = 0;
    let mut stream_base = 0u64;
    for r in 1..=max_terms {
        for cuts in cut_assignments(r) {
            let f = |x: &[f64]| mixture_objective(&decode_terms(&cuts, x));
            let dim = r * PARAMS_PER_TERM;
            let init = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
            };
            let res = multistart(&f, &init, restarts, seed, stream_base, Direction::Maximize, opts)?;
            stream_base += restarts as u64;
            evals += res.evaluations;
            if best.as_ref().is_none_or(|(b, _)| res.best_value > b.best_value) {
                best = Some((res, cuts));
            }
        }
    }
    let (mut res, cuts) = best.expect("at least one assignment");
    res.evaluations = evals;
    res.restarts = restarts;
    res.detail = Some(cuts.iter().map(|c| c.label()).collect::<Vec<_>>().join(","));
    Ok(res)
}

/// Normalized square ρ = H²/tr H² of the Hermitian matrix whose upper
/// triangle is filled from `x` (diagonal reals, then re/im pairs).
pub fn hermitian_square_state(x: &[f64], dims: &[usize]) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let mut h = ComplexMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        h[(i, i)] = C64::new(x[k], 0.0);
        k += 1;
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let z = C64::new(x[k], x[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    let sq = h.matmul(&h);
    let tr = sq.trace().re;
    // keep the state valid even for the all-zero parameter vector
    if !(tr > 0.0) {
        return DensityMatrix::maximally_mixed(dims.to_vec());
    }
    let mut m = sq.scale_real(1.0 / tr);
    // symmetrize away rounding so the result is Hermitian to the last bit
    let adj = m.adjoint();
    m.add_scaled(&adj, C64::new(1.0, 0.0));
    DensityMatrix::new_unchecked(dims.to_vec(), m.scale_real(0.5))
}

/// (S⁽²⁾, S⁽⁴⁾) using Στ² = ‖T‖²_F and Στ⁴ = ‖TᵀT‖²_F, no SVD.
pub fn moments_gram(rho: &DensityMatrix, basis: &GellMannBasis) -> (f64, f64) {
    let d = basis.d();
    let k = d * d - 1;
    let m = rho.matrix();
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = C64::new(0.0, 0.0);
            for &(r1, c1, v1) in basis.sparse(i + 1) {
                for &(r2, c2, v2) in basis.sparse(j + 1) {
                    // Λ[(r1 r2),(c1 c2)] contributes ρ[(c1 c2),(r1 r2)]
                    acc += m[(c1 * d + c2, r1 * d + r2)] * v1 * v2;
                }
            }
            t[i * k + j] = acc.re;
        }
    }
    let sum2: f64 = t.iter().map(|x| x * x).sum();
    let mut sum4 = 0.0;
    for a in 0..k {
        for b in 0..k {
            let g: f64 = (0..k).map(|i| t[i * k + a] * t[i * k + b]).sum();
            sum4 += g * g;
        }
    }
    let dm = d as f64 - 1.0;
    let v = 1.0 / (dm * dm);
    let w = 1.0 / (3.0 * dm.powi(4));
    (v * sum2, w * (2.0 * sum4 + sum2 * sum2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptBoundary {
    pub d: usize,
    pub s2_grid: Vec<f64>,
    /// Minimum S⁽⁴⁾ found per grid point; NaN when no restart met the constraints.
    pub ppt_min: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub evaluations: u64,
}

/// Penalty weight schedule: starts at 10³, ×10 per round, five rounds.
pub const PENALTY_START: f64 = 1e3;
pub const PENALTY_ROUNDS: usize = 5;
/// Constraint slack accepted when reporting a minimum.
pub const PPT_FEASIBILITY: f64 = 1e-4;

/// Minimum S⁽⁴⁾ over PPT states at each target S⁽²⁾, by penalized
/// minimization over normalized squares of Hermitian matrices.
pub fn ppt_s4_boundary(s2_grid: &[f64], d: usize, restarts: usize, seed: u64) -> Result<PptBoundary> {
    ppt_s4_boundary_with(s2_grid, d, restarts, seed, &MinimizeOptions::default())
}

pub fn ppt_s4_boundary_with(
    s2_grid: &[f64],
    d: usize,
    restarts: usize,
    seed: u64,
    opts: &MinimizeOptions,
) -> Result<PptBoundary> {
    if !(2..=4).contains(&d) {
        return Err(Error::usage(format!("PPT boundary supported for d in 2..=4, got {d}")));
    }
    let hi = (d as f64 + 1.0) / (d as f64 - 1.0);
    if let Some(bad) = s2_grid.iter().find(|&&s| !(0.0..=hi).contains(&s)) {
        return Err(Error::usage(format!("s2={bad} outside [0, {hi}]")));
    }
    if restarts == 0 {
        return Err(Error::usage("need at least one restart"));
    }
    let basis = GellMannBasis::new(d)?;
    let dims = [d, d];
    let nparams = (d * d) * (d * d);
    let mut ppt_min = Vec::with_capacity(s2_grid.len());
    let mut evaluations = 0;
    for (gi, &target) in s2_grid.iter().enumerate() {
        let runs: Vec<Result<(f64, u64)>> = (0..restarts)
            .into_par_iter()
            .map(|i| {
                let stream = (gi * restarts + i) as u64;
                let mut rng = SeedPath::new(seed, stream).rng();
                let mut x: Vec<f64> = (0..nparams).map(|_| rng.random_range(-1.0..1.0)).collect();
                let mut evals = 0;
                let mut mu = PENALTY_START;
                for _ in 0..PENALTY_ROUNDS {
                    let f = |p: &[f64]| {
                        let rho = hermitian_square_state(p, &dims);
                        let (s2, s4) = moments_gram(&rho, &basis);
                        let neg: f64 = hermitian_eigenvalues(&rho.partial_transpose(1).expect("bipartite"))
                            .iter()
                            .filter(|&&e| e < 0.0)
                            .map(|e| e * e)
                            .sum();
                        s4 + mu * ((s2 - target).powi(2) + neg)
                    };
                    let res = local_minimize_with(&f, &x, opts)?;
                    evals += res.evaluations;
                    x = res.best_params;
                    mu *= 10.0;
                }
                let rho = hermitian_square_state(&x, &dims);
                let (s2, s4) = moments_gram(&rho, &basis);
                let lmin = hermitian_eigenvalues(&rho.partial_transpose(1)?)[0];
                let feasible = (s2 - target).abs() <= PPT_FEASIBILITY && lmin >= -PPT_FEASIBILITY;
                Ok((if feasible { s4 } else { f64::NAN }, evals))
            })
            .collect();
        let mut best = f64::NAN;
        for run in runs {
            let (v, e) = run?;
            evaluations += e;
            if !v.is_nan() && (best.is_nan() || v < best) {
                best = v;
            }
        }
        ppt_min.push(best);
    }
    Ok(PptBoundary {
        d,
        s2_grid: s2_grid.to_vec(),
        ppt_min,
        restarts,
        seed,
        evaluations,
    })
}
