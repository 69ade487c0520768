//! Data behind the figures and tables, as long-format CSV.

use std::f64::consts::FRAC_PI_2;

use super::commands::gw_scan_csv;
use super::format::{g15, Csv};
use super::{parse_grid, OutputFormat, RunConfig};
use crate::bloch::{sector_lengths, SectorVector};
use crate::detect::{general_region_min, sep_region};
use crate::error::{Error, Result};
use crate::moments::{even_roots, moment_observable, state_moments};
use crate::optsearch::ppt_s4_boundary;
use crate::polytope::{bisect, bisep_test, full_sep_test, legacy_sector_tests, purity_sep_test, legacy_two_qudit_test, CriterionVerdict};
use crate::qmat::DensityMatrix;
use crate::statezoo::{
    bisep_family_coefficients, bisep_family, chessboard, cross_hatch, ghz, horodecki_3x3, isotropic, maximally_mixed,
    noisy_ghz_w, piani_4x4, product_zero, sep_family, upb_tiles, w_state, ChessboardParams,
};

pub const FIGURE_NAMES: &[&str] = &[
    "fig1", "fig2", "figS1", "figS2", "figS3", "figS4", "figS5", "figS6", "figS7", "table1", "table2",
];

fn is_region(name: &str) -> bool {
    matches!(name, "fig2" | "figS6" | "figS7")
}

pub(super) fn normalize(cfg: &mut RunConfig) -> Result<()> {
    let name = cfg
        .name
        .clone()
        .ok_or_else(|| Error::usage(format!("figure needs --name, one of {}", FIGURE_NAMES.join(", "))))?;
    if !FIGURE_NAMES.contains(&name.as_str()) {
        return Err(Error::usage(format!("unknown figure '{name}', expected one of {}", FIGURE_NAMES.join(", "))));
    }
    if cfg.format == Some(OutputFormat::Json) {
        return Err(Error::usage("figure data is written as CSV"));
    }
    cfg.format = Some(OutputFormat::Csv);
    if cfg.ppt && !is_region(&name) {
        return Err(Error::usage("--ppt applies to fig2, figS6 and figS7"));
    }
    let default_grid = match name.as_str() {
        "fig1" => Some("0:1:101"),
        "fig2" | "figS7" => Some("0:1:201"),
        "figS6" => Some("0:2:201"),
        "figS1" | "figS2" => Some("0:1:11"),
        "figS3" => Some("0:1:41"),
        "figS4" => Some("0:1:101"),
        _ => None,
    };
    match default_grid {
        Some(g) => {
            cfg.grid.get_or_insert_with(|| g.to_string());
        }
        None if cfg.grid.is_some() => return Err(Error::usage(format!("{name} takes no --grid"))),
        None => {}
    }
    match name.as_str() {
        "figS4" => {
            cfg.d.get_or_insert(100);
        }
        "figS2" => {
            cfg.d.get_or_insert(8);
        }
        _ if cfg.d.is_some() => return Err(Error::usage(format!("{name} takes no --d"))),
        _ => {}
    }
    if cfg.ppt {
        cfg.restarts.get_or_insert(10);
        cfg.seed.get_or_insert(0);
    }
    Ok(())
}

pub(super) fn run(cfg: &RunConfig) -> Result<String> {
    let name = cfg.name.as_deref().expect("normalized");
    let grid = cfg.grid.as_deref().map(parse_grid).transpose()?;
    match name {
        "fig1" => fig1(cfg, &unit(grid)?),
        "fig2" => region_figure(cfg, 3, &grid.expect("normalized")),
        "figS6" => region_figure(cfg, 3, &grid.expect("normalized")),
        "figS7" => region_figure(cfg, 4, &grid.expect("normalized")),
        "figS1" => fig_s1(cfg, &unit(grid)?),
        "figS2" => fig_s2(cfg, &unit(grid)?),
        "figS3" => gw_scan_csv(cfg, &unit(grid)?),
        "figS4" => fig_s4(cfg, &unit(grid)?),
        "figS5" => fig_s5(cfg),
        "table1" => table(cfg, &table1_rows()?),
        "table2" => table(cfg, &table2_rows()?),
        _ => unreachable!("checked in normalize"),
    }
}

/// Grids used as mixing parameters must stay inside [0, 1].
fn unit(grid: Option<Vec<f64>>) -> Result<Vec<f64>> {
    let g = grid.expect("normalized");
    if g.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::usage("this figure needs a grid inside [0, 1]"));
    }
    Ok(g)
}

fn sectors3(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let s = sector_lengths(rho)?;
    Ok([s.a[1], s.a[2], s.a[3]])
}

/// Three-qubit sector coordinates of the noisy GHZ, noisy W and GHZ-W lines
/// and of a few reference states.
fn fig1(cfg: &RunConfig, grid: &[f64]) -> Result<String> {
    let mut csv = Csv::new(&cfg.to_json(), &["series", "param", "a1", "a2", "a3"]);
    let mut push = |series: &str, param: Option<f64>, a: [f64; 3]| {
        csv.row(&[series.to_string(), param.map(g15).unwrap_or_default(), g15(a[0]), g15(a[1]), g15(a[2])]);
    };
    for &t in grid {
        push("noisy_ghz", Some(t), sectors3(&noisy_ghz_w(t, 0.0)?)?);
    }
    for &t in grid {
        push("noisy_w", Some(t), sectors3(&noisy_ghz_w(0.0, t)?)?);
    }
    for &t in grid {
        push("ghz_w_line", Some(t), sectors3(&noisy_ghz_w(t, 1.0 - t)?)?);
    }
    push("ghz", None, sectors3(&ghz())?);
    push("w", None, sectors3(&w_state())?);
    push("maximally_mixed", None, sectors3(&maximally_mixed(2, 3)?)?);
    push("product", None, sectors3(&product_zero(2, 3)?)?);
    Ok(csv.finish())
}

fn moments_of(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let m = state_moments(rho)?;
    Ok((m.s2, m.s4))
}

/// Region boundaries as `series,param,s2,s4` rows followed by state points.
fn region_figure(cfg: &RunConfig, d: usize, grid: &[f64]) -> Result<String> {
    let mut csv = Csv::new(&cfg.to_json(), &["series", "param", "s2", "s4"]);
    let mut push = |series: &str, param: Option<f64>, s2: f64, s4: f64| {
        csv.row(&[series.to_string(), param.map(g15).unwrap_or_default(), g15(s2), g15(s4)]);
    };
    let sep: Vec<(f64, (f64, f64))> = grid
        .iter()
        .filter(|&&s| s <= 1.0)
        .map(|&s| sep_region(s, d).map(|r| (s, r)))
        .collect::<Result<_>>()?;
    for &(s2, (lo, _)) in &sep {
        push("sep_min", None, s2, lo);
    }
    for &(s2, (_, hi)) in &sep {
        push("sep_max", None, s2, hi);
    }
    for &s2 in grid {
        push("gen_min", None, s2, general_region_min(s2, d)?);
    }
    if cfg.ppt {
        let b = ppt_s4_boundary(grid, d, cfg.restarts.expect("normalized"), cfg.seed.expect("normalized"))?;
        for (&s2, &s4) in grid.iter().zip(&b.ppt_min) {
            push("ppt_min", None, s2, s4);
        }
    }
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let (s2, s4) = moments_of(&isotropic(p, d)?)?;
        push("isotropic", Some(p), s2, s4);
    }
    if d == 3 {
        let points = [
            ("cross_hatch", cross_hatch()),
            ("chessboard", chessboard(ChessboardParams::default())?),
            ("upb_tiles", upb_tiles()),
        ];
        for (name, rho) in points {
            let (s2, s4) = moments_of(&rho)?;
            push(name, None, s2, s4);
        }
        for k in 1..=10 {
            let p = 3.0 + k as f64 / 10.0;
            let (s2, s4) = moments_of(&horodecki_3x3(p)?)?;
            push("horodecki", Some(p), s2, s4);
        }
    } else if d == 4 {
        let (s2, s4) = moments_of(&piani_4x4())?;
        push("piani", None, s2, s4);
    }
    Ok(csv.finish())
}

/// Biseparable saturating family in the (A1, A3) plane; the grid is mapped
/// onto p ∈ [1/2, 1] and onto each p's admissible window for a.
fn fig_s1(cfg: &RunConfig, grid: &[f64]) -> Result<String> {
    let mut csv = Csv::new(&cfg.to_json(), &["series", "p", "a", "a1", "a2", "a3"]);
    for (series, sign) in [("d_plus", 1.0), ("d_minus", -1.0)] {
        for &u in grid {
            let p = 0.5 + 0.5 * u;
            let lo = (1.0 - 1.0 / (2.0 * p)).max(0.0).sqrt();
            let hi = (1.0 / (2.0 * p)).sqrt().min(std::f64::consts::FRAC_1_SQRT_2);
            for &v in grid {
                let a = lo + v * (hi - lo);
                bisep_family_coefficients(p, a, sign)?;
                let s = sectors3(&bisep_family(p, a, sign)?)?;
                csv.row(&[series.to_string(), g15(p), g15(a), g15(s[0]), g15(s[1]), g15(s[2])]);
            }
        }
    }
    Ok(csv.finish())
}

fn two_party(s: &SectorVector) -> (f64, f64, f64) {
    (s.one_body_parts[0], s.one_body_parts[1], s.a[2])
}

/// Separable two-qudit family covering the top faces of the separable
/// polytope; the grid is mapped onto p ∈ [1/d, 1] and θ ∈ [0, π/2].
fn fig_s2(cfg: &RunConfig, grid: &[f64]) -> Result<String> {
    let d = cfg.d.expect("normalized");
    if !(2..=16).contains(&d) {
        return Err(Error::usage("figS2 needs 2 <= d <= 16"));
    }
    let mut csv = Csv::new(&cfg.to_json(), &["series", "p", "theta", "a1a", "a1b", "a2"]);
    let pmin = 1.0 / d as f64;
    for (series, swap) in [("direct", false), ("swapped", true)] {
        for &u in grid {
            let p = pmin + u * (1.0 - pmin);
            for &v in grid {
                let theta = v * FRAC_PI_2;
                let (a1a, a1b, a2) = two_party(&sector_lengths(&sep_family(p, theta, d, swap)?)?);
                csv.row(&[series.to_string(), g15(p), g15(theta), g15(a1a), g15(a1b), g15(a2)]);
            }
        }
    }
    Ok(csv.finish())
}

/// Symmetric slice A1^A = A1^B = A1 of the two-qudit state space: the
/// boundaries of all states and the separable and older bounds on A2. The
/// grid is mapped onto A1 ∈ [0, d−1].
fn fig_s4(cfg: &RunConfig, grid: &[f64]) -> Result<String> {
    let d = cfg.d.expect("normalized");
    if d < 2 {
        return Err(Error::usage("figS4 needs d >= 2"));
    }
    let dm = d as f64 - 1.0;
    let mut csv = Csv::new(&cfg.to_json(), &["series", "a1", "a2"]);
    let mut push = |series: &str, a1: f64, a2: f64| csv.row(&[series.to_string(), g15(a1), g15(a2)]);
    for &u in grid {
        let a1 = u * dm;
        push("all_upper", a1, dm * (dm + 2.0) - 2.0 * a1);
    }
    for &u in grid {
        let a1 = u * dm;
        push("all_lower", a1, (2.0 * dm * a1 - dm * dm).max(0.0));
    }
    for &u in grid {
        let a1 = u * dm;
        push("sep_upper", a1, bound_of(&purity_sep_test(a1, a1, 0.0, d)));
    }
    for &u in grid {
        let a1 = u * dm;
        push("legacy_upper", a1, bound_of(&legacy_two_qudit_test(0.0, d)));
    }
    Ok(csv.finish())
}

fn bound_of(v: &CriterionVerdict) -> f64 {
    v.bound
}

/// Roots y of the matching condition for each d, and which one is used.
fn fig_s5(cfg: &RunConfig) -> Result<String> {
    let mut csv = Csv::new(&cfg.to_json(), &["d", "y", "selected"]);
    for d in 3..=16usize {
        let chosen = moment_observable(d)?.y;
        let roots = if d % 2 == 1 { vec![chosen] } else { even_roots(d) };
        for y in roots {
            let sel = if y == chosen { "1" } else { "0" };
            csv.row(&[d.to_string(), g15(y), sel.to_string()]);
        }
    }
    Ok(csv.finish())
}

/// One threshold row: criterion, state family, mixing parameter at which the
/// criterion starts or stops being violated.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub criterion: &'static str,
    pub family: &'static str,
    pub threshold: f64,
}

const BISECT_TOL: f64 = 1e-12;

type Test = fn(&SectorVector) -> Result<bool>;

fn full_sep_violated(s: &SectorVector) -> Result<bool> {
    Ok(full_sep_test(s, 2)?.violated)
}

fn bisep_violated(s: &SectorVector) -> Result<bool> {
    Ok(bisep_test(s, 2)?.violated)
}

fn legacy_full_violated(s: &SectorVector) -> Result<bool> {
    Ok(legacy_sector_tests(s)?[0].violated)
}

fn legacy_bisep_violated(s: &SectorVector) -> Result<bool> {
    Ok(legacy_sector_tests(s)?[1].violated)
}

fn ghz_line(t: f64) -> Result<SectorVector> {
    sector_lengths(&noisy_ghz_w(t, 0.0)?)
}

fn w_line(t: f64) -> Result<SectorVector> {
    sector_lengths(&noisy_ghz_w(0.0, t)?)
}

fn ghz_w_line(t: f64) -> Result<SectorVector> {
    sector_lengths(&noisy_ghz_w(t, 1.0 - t)?)
}

/// Smallest mixing parameter from which `test` is violated on [0, 1].
fn onset(family: fn(f64) -> Result<SectorVector>, test: Test) -> Result<f64> {
    let pred = |t: f64| family(t).and_then(|s| test(&s)).unwrap_or(false);
    bisect(0.0, 1.0, BISECT_TOL, pred)
}

/// Interval on which `test` is not violated, for a family violated at both ends.
fn window(family: fn(f64) -> Result<SectorVector>, test: Test) -> Result<(f64, f64)> {
    let pred = |t: f64| family(t).and_then(|s| test(&s)).unwrap_or(true);
    let n = 1000;
    let inside: Vec<usize> = (0..=n).filter(|&k| !pred(k as f64 / n as f64)).collect();
    let (first, last) = match (inside.first(), inside.last()) {
        (Some(&a), Some(&b)) if a > 0 && b < n => (a, b),
        _ => return Err(Error::numerical("criterion has no interior non-violation window")),
    };
    let h = 1.0 / n as f64;
    let lo = bisect((first - 1) as f64 * h, first as f64 * h, BISECT_TOL, pred)?;
    let hi = bisect(last as f64 * h, (last + 1) as f64 * h, BISECT_TOL, pred)?;
    Ok((lo, hi))
}

/// Full-separability thresholds for the noisy GHZ and noisy W states.
pub fn table1_rows() -> Result<Vec<ThresholdRow>> {
    Ok(vec![
        ThresholdRow { criterion: "full_sep", family: "noisy_ghz", threshold: onset(ghz_line, full_sep_violated)? },
        ThresholdRow { criterion: "full_sep", family: "noisy_w", threshold: onset(w_line, full_sep_violated)? },
        ThresholdRow {
            criterion: "legacy_full_sep",
            family: "noisy_ghz",
            threshold: onset(ghz_line, legacy_full_violated)?,
        },
        ThresholdRow { criterion: "legacy_full_sep", family: "noisy_w", threshold: onset(w_line, legacy_full_violated)? },
    ])
}

/// Biseparability thresholds, including the non-violation window on the
/// GHZ-W line (parameter g, with w = 1 − g).
pub fn table2_rows() -> Result<Vec<ThresholdRow>> {
    let (lo, hi) = window(ghz_w_line, bisep_violated)?;
    let (llo, lhi) = window(ghz_w_line, legacy_bisep_violated)?;
    Ok(vec![
        ThresholdRow { criterion: "bisep", family: "noisy_ghz", threshold: onset(ghz_line, bisep_violated)? },
        ThresholdRow { criterion: "bisep", family: "noisy_w", threshold: onset(w_line, bisep_violated)? },
        ThresholdRow { criterion: "bisep", family: "ghz_w_line_lower", threshold: lo },
        ThresholdRow { criterion: "bisep", family: "ghz_w_line_upper", threshold: hi },
        ThresholdRow { criterion: "legacy_bisep", family: "noisy_ghz", threshold: onset(ghz_line, legacy_bisep_violated)? },
        ThresholdRow { criterion: "legacy_bisep", family: "noisy_w", threshold: onset(w_line, legacy_bisep_violated)? },
        ThresholdRow { criterion: "legacy_bisep", family: "ghz_w_line_lower", threshold: llo },
        ThresholdRow { criterion: "legacy_bisep", family: "ghz_w_line_upper", threshold: lhi },
    ])
}

fn table(cfg: &RunConfig, rows: &[ThresholdRow]) -> Result<String> {
    let mut csv = Csv::new(&cfg.to_json(), &["criterion", "family", "threshold"]);
    for r in rows {
        csv.row(&[r.criterion.to_string(), r.family.to_string(), g15(r.threshold)]);
    }
    Ok(csv.finish())
}
