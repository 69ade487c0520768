//! Sector-length separability criteria and state-space polytopes.

use serde::{Deserialize, Serialize};

use crate::bloch::SectorVector;
use crate::error::{Error, Result};
use crate::qmat::{kron_vec, DensityMatrix, C64};
use crate::tol;

/// Outcome of an inequality `lhs ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub name: String,
    pub lhs: f64,
    pub bound: f64,
    pub violated: bool,
}

impl CriterionVerdict {
    pub fn new(name: &str, lhs: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            bound,
            violated: lhs - bound > tol::CRITERION,
        }
    }

    pub fn gap(&self) -> f64 {
        self.lhs - self.bound
    }
}

fn require_three(s: &SectorVector) -> Result<()> {
    if s.n != 3 || s.a.len() != 4 {
        return Err(Error::usage(format!("criterion needs three parties, got {}", s.n)));
    }
    Ok(())
}

/// A₃ ≤ d−1 + (2d−3)/3·A₁ + (d−3)/3·A₂ (fully separable three-qudit states).
pub fn full_sep_test(s: &SectorVector, d: usize) -> Result<CriterionVerdict> {
    require_three(s)?;
    let df = d as f64;
    let bound = df - 1.0 + (2.0 * df - 3.0) / 3.0 * s.a[1] + (df - 3.0) / 3.0 * s.a[2];
    Ok(CriterionVerdict::new("full_sep", s.a[3], bound))
}

/// A₂+A₃ ≤ (d³−2)/2·(1+A₁) (states biseparable for a fixed bipartition).
pub fn bisep_test(s: &SectorVector, d: usize) -> Result<CriterionVerdict> {
    require_three(s)?;
    let df = d as f64;
    let bound = (df.powi(3) - 2.0) / 2.0 * (1.0 + s.a[1]);
    Ok(CriterionVerdict::new("bisep", s.a[2] + s.a[3], bound))
}

/// Older three-qubit bounds A₃ ≤ 1 (full separability) and A₃ ≤ 3 (biseparability).
pub fn legacy_sector_tests(s: &SectorVector) -> Result<Vec<CriterionVerdict>> {
    require_three(s)?;
    if s.d != 2 {
        return Err(Error::usage("legacy sector bounds are for qubits"));
    }
    Ok(vec![
        CriterionVerdict::new("legacy_full_sep", s.a[3], 1.0),
        CriterionVerdict::new("legacy_bisep", s.a[3], 3.0),
    ])
}

/// Facet slacks of the three-qubit polytope; each is ≤ 0 inside.
pub fn three_qubit_facets(a1: f64, a2: f64, a3: f64) -> [f64; 4] {
    [
        0.0 - a1.min(a2).min(a3),
        a1 - a2 + a3 - 1.0,
        a2 - 3.0,
        a1 + a2 - 3.0 * (1.0 + a3),
    ]
}

pub fn three_qubit_polytope_member(a1: f64, a2: f64, a3: f64) -> bool {
    three_qubit_facets(a1, a2, a3).iter().all(|&f| f <= tol::CRITERION)
}

pub fn two_qudit_polytope_member(a1a: f64, a1b: f64, a2: f64, d: usize) -> bool {
    let dm = d as f64 - 1.0;
    let t = tol::CRITERION;
    let in_range = |x: f64, hi: f64| x >= -t && x <= hi + t;
    in_range(a1a, dm)
        && in_range(a1b, dm)
        && in_range(a2, dm * (dm + 2.0))
        && a1a + a1b + a2 <= dm * (dm + 2.0) + t
        && dm * dm - dm * (a1a + a1b) + a2 >= -t
}

/// A₂ ≤ d−1 + min{(d−1)A₁^A − A₁^B, (d−1)A₁^B − A₁^A}.
pub fn purity_sep_test(a1a: f64, a1b: f64, a2: f64, d: usize) -> CriterionVerdict {
    let dm = d as f64 - 1.0;
    let bound = dm + (dm * a1a - a1b).min(dm * a1b - a1a);
    CriterionVerdict::new("purity_sep", a2, bound)
}

/// A₂ ≤ (d−1)², the older two-qudit bound.
pub fn legacy_two_qudit_test(a2: f64, d: usize) -> CriterionVerdict {
    let dm = d as f64 - 1.0;
    CriterionVerdict::new("legacy_two_qudit", a2, dm * dm)
}

/// F(ρ) = 1 + tr ρ² − Σ_X tr ρ_X² over the single-party marginals of a
/// three-party state. For qubits A₂+A₃−3(1+A₁) = 8F.
pub fn purity_gap_three(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_parties() != 3 {
        return Err(Error::usage("purity gap needs three parties"));
    }
    let mut f = 1.0 + rho.purity();
    for k in 0..3 {
        f -= rho.partial_trace(&[k])?.purity();
    }
    Ok(f)
}

/// Two pure biseparable three-qubit states, one product across A|BC and one
/// across AB|C.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Sample {
    pub a: [C64; 2],
    pub bc: [C64; 4],
    pub ab: [C64; 4],
    pub c: [C64; 2],
}

impl Rank2Sample {
    pub fn psi(&self) -> Vec<C64> {
        normalize(kron_vec(&self.a, &self.bc))
    }

    pub fn phi(&self) -> Vec<C64> {
        normalize(kron_vec(&self.ab, &self.c))
    }
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// F of the mixture p|Ψ⟩⟨Ψ| + (1−p)|Φ⟩⟨Φ|; expected ≤ 0.
pub fn rank2_bisep_gap(sample: &Rank2Sample, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage(format!("mixing weight {p} outside [0,1]")));
    }
    let psi = DensityMatrix::from_pure(vec![2, 2, 2], &sample.psi())?;
    let phi = DensityMatrix::from_pure(vec![2, 2, 2], &sample.phi())?;
    purity_gap_three(&psi.mix(&phi, p)?)
}

/// Locates the switch point of a monotone predicate on [lo, hi] to `tol`.
/// `pred(lo)` and `pred(hi)` must differ.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> Result<f64> {
    let at_lo = pred(lo);
    if at_lo == pred(hi) {
        return Err(Error::numerical(format!("predicate does not change sign on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
