//! Entanglement detectors and the moment-plane witness.

mod region;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use region::{general_region_min, min_sum4_support, region_curve, sep_region, RegionCurve, TwoLevel};

use crate::bloch::correlation_matrix;
use crate::error::{Error, Result};
use crate::moments::{s_moments, MomentPair};
use crate::qmat::{min_eigenvalue, trace_norm, real_trace_norm, ComplexMatrix, DensityMatrix};
use crate::tol;

fn bipartite_dims(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        dims => Err(Error::usage(format!("detector needs a bipartite state, got dims {dims:?}"))),
    }
}

fn equal_dims(rho: &DensityMatrix) -> Result<usize> {
    match bipartite_dims(rho)? {
        (a, b) if a == b => Ok(a),
        (a, b) => Err(Error::usage(format!("detector needs equal local dims, got {a}x{b}"))),
    }
}

/// Minimum eigenvalue of the partial transpose on the second party.
pub fn ppt_test(rho: &DensityMatrix) -> Result<f64> {
    bipartite_dims(rho)?;
    Ok(min_eigenvalue(&rho.partial_transpose(1)?))
}

/// Realigned matrix R_{(ij),(kl)} = ρ_{(ik),(jl)}.
pub fn realign(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let (da, db) = bipartite_dims(rho)?;
    let m = rho.matrix();
    Ok(ComplexMatrix::from_fn(da * da, db * db, |row, col| {
        let (i, j) = (row / da, row % da);
        let (k, l) = (col / db, col % db);
        m[(i * db + k, j * db + l)]
    }))
}

/// Trace norm of the realigned matrix; separable states give ≤ 1.
pub fn ccnr_test(rho: &DensityMatrix) -> Result<f64> {
    equal_dims(rho)?;
    Ok(trace_norm(&realign(rho)?))
}

/// Trace norm of the correlation matrix; separable states give ≤ d−1.
pub fn dv_test(rho: &DensityMatrix) -> Result<f64> {
    equal_dims(rho)?;
    Ok(real_trace_norm(&correlation_matrix(rho)?.t))
}

/// tr ρ² − min(tr ρ_A², tr ρ_B²); separable states give ≤ 0.
pub fn purity_test(rho: &DensityMatrix) -> Result<f64> {
    bipartite_dims(rho)?;
    let pa = rho.partial_trace(&[0])?.purity();
    let pb = rho.partial_trace(&[1])?.purity();
    Ok(rho.purity() - pa.min(pb))
}

/// Whether (s2, s4) lies in the separable region, up to [`tol::REGION`].
pub fn in_sep_region(s2: f64, s4: f64, d: usize) -> Result<bool> {
    if s2 > 1.0 + tol::REGION {
        return Ok(false);
    }
    let (lo, hi) = sep_region(s2.clamp(0.0, 1.0), d)?;
    Ok(s4 >= lo - tol::REGION && s4 <= hi + tol::REGION)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SeparableConsistent,
    Entangled,
    BoundEntangledCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub state_label: String,
    pub d: usize,
    pub ppt_min_eig: f64,
    pub ccnr_norm: f64,
    pub dv_norm: f64,
    pub purity_gap: f64,
    pub moments: MomentPair,
    pub sep_region_s4: Option<(f64, f64)>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub overall: Verdict,
}

impl DetectionReport {
    pub fn is_ppt(&self) -> bool {
        self.ppt_min_eig >= -tol::STATE
    }

    pub fn moments_detect(&self) -> bool {
        self.verdicts.get("moments") != Some(&Verdict::SeparableConsistent)
    }
}

pub fn moment_witness(rho: &DensityMatrix) -> Result<DetectionReport> {
    moment_witness_labeled(rho, "state")
}

/// Runs every detector and labels each violation. Violations of a
/// non-PPT criterion by a PPT state are bound-entanglement candidates.
pub fn moment_witness_labeled(rho: &DensityMatrix, label: &str) -> Result<DetectionReport> {
    let d = equal_dims(rho)?;
    let ppt = ppt_test(rho)?;
    let ccnr = ccnr_test(rho)?;
    let dv = dv_test(rho)?;
    let purity = purity_test(rho)?;
    let moments = s_moments(&correlation_matrix(rho)?)?;
    let inside = in_sep_region(moments.s2, moments.s4, d)?;
    let sep_bounds = if moments.s2 <= 1.0 { Some(sep_region(moments.s2, d)?) } else { None };

    let is_ppt = ppt >= -tol::STATE;
    let flag = |violated: bool| match (violated, is_ppt) {
        (false, _) => Verdict::SeparableConsistent,
        (true, true) => Verdict::BoundEntangledCandidate,
        (true, false) => Verdict::Entangled,
    };
    let mut verdicts = BTreeMap::new();
    verdicts.insert(
        "ppt".to_string(),
        if is_ppt { Verdict::SeparableConsistent } else { Verdict::Entangled },
    );
    verdicts.insert("ccnr".to_string(), flag(ccnr > 1.0 + tol::CRITERION));
    verdicts.insert("dv".to_string(), flag(dv > d as f64 - 1.0 + tol::CRITERION));
    verdicts.insert("purity".to_string(), flag(purity > tol::CRITERION));
    verdicts.insert("moments".to_string(), flag(!inside));

    let overall = if !is_ppt {
        Verdict::Entangled
    } else if verdicts.values().any(|v| *v != Verdict::SeparableConsistent) {
        Verdict::BoundEntangledCandidate
    } else {
        Verdict::SeparableConsistent
    };
    Ok(DetectionReport {
        state_label: label.to_string(),
        d,
        ppt_min_eig: ppt,
        ccnr_norm: ccnr,
        dv_norm: dv,
        purity_gap: purity,
        moments,
        sep_region_s4: sep_bounds,
        verdicts,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statezoo::{bell, isotropic};

    #[test]
    fn bell_is_flagged_everywhere() {
        let r = moment_witness(&bell()).unwrap();
        assert!((r.ppt_min_eig + 0.5).abs() < 1e-12);
        assert!((r.ccnr_norm - 2.0).abs() < 1e-12);
        assert!((r.dv_norm - 3.0).abs() < 1e-12);
        assert!((r.purity_gap - 0.5).abs() < 1e-12);
        assert_eq!(r.overall, Verdict::Entangled);
        assert!(r.verdicts.values().all(|v| *v == Verdict::Entangled));
    }

    #[test]
    fn maximally_mixed_is_consistent() {
        let r = moment_witness(&DensityMatrix::maximally_mixed(vec![3, 3])).unwrap();
        assert_eq!(r.overall, Verdict::SeparableConsistent);
        assert!(r.moments.s2.abs() < 1e-15 && r.moments.s4.abs() < 1e-15);
    }

    #[test]
    fn isotropic_dv_scales_linearly() {
        for d in [2, 3, 4] {
            let p = 0.37;
            let v = dv_test(&isotropic(p, d).unwrap()).unwrap();
            assert!((v - p * (d * d - 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn non_bipartite_inputs_are_rejected() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        assert!(ppt_test(&rho).is_err());
        assert!(moment_witness(&rho).is_err());
        let rect = DensityMatrix::maximally_mixed(vec![2, 3]);
        assert!(ccnr_test(&rect).is_err());
        assert!(ppt_test(&rect).is_ok());
    }
}
