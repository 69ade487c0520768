//! Boundaries of the (S⁽²⁾, S⁽⁴⁾) plane.
//!
//! For separable states the correlation singular values obey Στ ≤ d−1, so the
//! separable region at fixed S⁽²⁾ is obtained by extremizing Στ⁴ under
//! Στ² = S⁽²⁾(d−1)², Στ ≤ d−1, τ ≥ 0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::w_factor;

/// Extremal Στ⁴ candidate: k entries at `a`, m entries at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevel {
    pub k: usize,
    pub a: f64,
    pub m: usize,
    pub b: f64,
}

impl TwoLevel {
    pub fn sum4(&self) -> f64 {
        self.k as f64 * self.a.powi(4) + self.m as f64 * self.b.powi(4)
    }
}

/// Minimizer of Στ⁴ over the separable feasible set, by enumerating the
/// stationary supports (one or two nonzero levels).
pub fn min_sum4_support(s2: f64, d: usize) -> Result<TwoLevel> {
    check_sep_domain(s2, d)?;
    let c = d as f64 - 1.0;
    let s = s2 * c * c;
    let n = d * d - 1;
    if s == 0.0 {
        return Ok(TwoLevel { k: n, a: 0.0, m: 0, b: 0.0 });
    }
    let mut best: Option<TwoLevel> = None;
    let mut consider = |cand: TwoLevel| {
        if best.is_none_or(|b| cand.sum4() < b.sum4()) {
            best = Some(cand);
        }
    };
    // one level: trace constraint inactive or just touching
    for k in 1..=n {
        let kf = k as f64;
        if s * kf <= c * c * (1.0 + 1e-12) {
            consider(TwoLevel { k, a: (s / kf).sqrt(), m: 0, b: 0.0 });
        }
    }
    // two levels with the trace constraint active
    for k in 1..n {
        for m in 1..=(n - k) {
            let (kf, mf) = (k as f64, m as f64);
            let disc = kf * mf * ((kf + mf) * s - c * c);
            if disc < 0.0 {
                continue;
            }
            let a = (c * kf + disc.sqrt()) / (kf * (kf + mf));
            let b = (c - kf * a) / mf;
            if b < -1e-15 || b > a {
                continue;
            }
            consider(TwoLevel { k, a, m, b: b.max(0.0) });
        }
    }
    best.ok_or_else(|| Error::numerical(format!("no feasible support at s2={s2}, d={d}")))
}

fn check_sep_domain(s2: f64, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::usage("region needs d >= 2"));
    }
    if !(0.0..=1.0 + 1e-12).contains(&s2) {
        return Err(Error::usage(format!("separable region is defined for 0 <= s2 <= 1, got {s2}")));
    }
    Ok(())
}

/// (min, max) of S⁽⁴⁾ over separable states with the given S⁽²⁾.
pub fn sep_region(s2: f64, d: usize) -> Result<(f64, f64)> {
    let support = min_sum4_support(s2, d)?;
    let c = d as f64 - 1.0;
    let s = s2.min(1.0) * c * c;
    let min = w_factor(d) * (2.0 * support.sum4() + s * s);
    Ok((min, s2 * s2))
}

/// S⁽⁴⁾ lower bound over all states: s2²(d²+1)/(3(d²−1)).
pub fn general_region_min(s2: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::usage("region needs d >= 2"));
    }
    let df = d as f64;
    let hi = (df + 1.0) / (df - 1.0);
    if !(0.0..=hi + 1e-12).contains(&s2) {
        return Err(Error::usage(format!("general region is defined for 0 <= s2 <= {hi}, got {s2}")));
    }
    Ok(s2 * s2 * (df * df + 1.0) / (3.0 * (df * df - 1.0)))
}

/// Sampled region boundaries; separable entries are `None` where s2 > 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    pub d: usize,
    pub s2_grid: Vec<f64>,
    pub sep_min: Vec<Option<f64>>,
    pub sep_max: Vec<Option<f64>>,
    pub gen_min: Vec<f64>,
    pub ppt_min: Option<Vec<f64>>,
}

pub fn region_curve(s2_grid: &[f64], d: usize) -> Result<RegionCurve> {
    let rows: Vec<Result<(Option<(f64, f64)>, f64)>> = s2_grid
        .par_iter()
        .map(|&s2| {
            let gen = general_region_min(s2, d)?;
            let sep = if s2 <= 1.0 { Some(sep_region(s2, d)?) } else { None };
            Ok((sep, gen))
        })
        .collect();
    let mut curve = RegionCurve {
        d,
        s2_grid: s2_grid.to_vec(),
        sep_min: Vec::with_capacity(s2_grid.len()),
        sep_max: Vec::with_capacity(s2_grid.len()),
        gen_min: Vec::with_capacity(s2_grid.len()),
        ppt_min: None,
    };
    for row in rows {
        let (sep, gen) = row?;
        curve.sep_min.push(sep.map(|x| x.0));
        curve.sep_max.push(sep.map(|x| x.1));
        curve.gen_min.push(gen);
    }
    Ok(curve)
}
