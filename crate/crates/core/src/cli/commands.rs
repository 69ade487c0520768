use serde::Serialize;

use super::figures;
use super::format::{g15, opt_g15, Csv};
use super::{parse_grid, CommandKind, OutputFormat, Output, RunConfig};
use crate::bloch::{sector_lengths, SectorVector};
use crate::detect::{moment_witness_labeled, region_curve, DetectionReport};
use crate::error::{Error, Result};
use crate::moments::{mc_moments, moment_observable, state_moments, McMoments, MomentObservable, MomentPair};
use crate::optsearch::{bisep_conjecture_scan, ppt_s4_boundary, OptResult};
use crate::polytope::{
    bisep_test, full_sep_test, legacy_sector_tests, legacy_two_qudit_test, purity_sep_test, three_qubit_facets,
    three_qubit_polytope_member, two_qudit_polytope_member, CriterionVerdict,
};
use crate::qmat::DensityMatrix;
use crate::statezoo::{noisy_ghz_w, StateSpec};

/// Best value above which a conjecture scan counts as a counterexample.
pub const CONJECTURE_THRESHOLD: f64 = 1e-6;

const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_MAX_TERMS: usize = 8;
const DEFAULT_CONJECTURE_RESTARTS: usize = 50;
const DEFAULT_PPT_RESTARTS: usize = 10;

fn require_state(cfg: &RunConfig) -> Result<&StateSpec> {
    cfg.state
        .as_ref()
        .ok_or_else(|| Error::usage("this command needs --state NAME or --file PATH"))
}

fn only_json(cfg: &RunConfig) -> Result<()> {
    match cfg.format {
        Some(OutputFormat::Csv) => Err(Error::usage("this command only writes JSON")),
        _ => Ok(()),
    }
}

/// Fills every defaulted field so the embedded config is complete.
pub(super) fn normalize(mut cfg: RunConfig) -> Result<RunConfig> {
    match cfg.command {
        CommandKind::Analyze => {
            require_state(&cfg)?;
            only_json(&cfg)?;
            cfg.format = Some(OutputFormat::Json);
        }
        CommandKind::Region => {
            cfg.d.get_or_insert(3);
            cfg.grid.get_or_insert_with(|| "0:1:101".to_string());
            if cfg.ppt {
                cfg.restarts.get_or_insert(DEFAULT_PPT_RESTARTS);
                cfg.seed.get_or_insert(0);
            }
            cfg.format.get_or_insert(OutputFormat::Csv);
        }
        CommandKind::Mc => {
            require_state(&cfg)?;
            only_json(&cfg)?;
            cfg.r.get_or_insert_with(|| vec![2, 4]);
            cfg.samples.get_or_insert(DEFAULT_SAMPLES);
            cfg.seed.get_or_insert(0);
            cfg.format = Some(OutputFormat::Json);
        }
        CommandKind::Sector => {
            if cfg.scan_gw {
                if cfg.state.is_some() {
                    return Err(Error::usage("--scan-gw takes no state"));
                }
                cfg.grid.get_or_insert_with(|| "0:1:21".to_string());
                if cfg.format == Some(OutputFormat::Json) {
                    return Err(Error::usage("--scan-gw writes CSV"));
                }
                cfg.format = Some(OutputFormat::Csv);
            } else {
                require_state(&cfg)?;
                only_json(&cfg)?;
                cfg.format = Some(OutputFormat::Json);
            }
        }
        CommandKind::Conjecture => {
            only_json(&cfg)?;
            cfg.max_terms.get_or_insert(DEFAULT_MAX_TERMS);
            cfg.restarts.get_or_insert(DEFAULT_CONJECTURE_RESTARTS);
            cfg.seed.get_or_insert(0);
            cfg.format = Some(OutputFormat::Json);
        }
        CommandKind::Figure => figures::normalize(&mut cfg)?,
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a RunConfig,
    result: T,
}

fn json_output<T: Serialize>(cfg: &RunConfig, result: T, exit_code: i32) -> Result<Output> {
    let mut text = serde_json::to_string_pretty(&Envelope { config: cfg, result })?;
    text.push('\n');
    Ok(Output { text, exit_code })
}

fn csv_output(text: String) -> Output {
    Output { text, exit_code: 0 }
}

pub(super) fn run(cfg: &RunConfig) -> Result<Output> {
    match cfg.command {
        CommandKind::Analyze => json_output(cfg, analyze(cfg)?, 0),
        CommandKind::Region => region(cfg),
        CommandKind::Mc => json_output(cfg, mc(cfg)?, 0),
        CommandKind::Sector if cfg.scan_gw => Ok(csv_output(scan_gw(cfg)?)),
        CommandKind::Sector => json_output(cfg, sector(cfg)?, 0),
        CommandKind::Conjecture => {
            let res = conjecture(cfg)?;
            let code = if res.best_value > CONJECTURE_THRESHOLD { 3 } else { 0 };
            json_output(cfg, res, code)
        }
        CommandKind::Figure => Ok(csv_output(figures::run(cfg)?)),
    }
}

fn analyze(cfg: &RunConfig) -> Result<DetectionReport> {
    let spec = require_state(cfg)?;
    let rho = spec.resolve()?;
    moment_witness_labeled(&rho, &spec.label())
}

fn region(cfg: &RunConfig) -> Result<Output> {
    let d = cfg.d.expect("normalized");
    let grid = parse_grid(cfg.grid.as_deref().expect("normalized"))?;
    let mut curve = region_curve(&grid, d)?;
    if cfg.ppt {
        let b = ppt_s4_boundary(&grid, d, cfg.restarts.expect("normalized"), cfg.seed.expect("normalized"))?;
        curve.ppt_min = Some(b.ppt_min);
    }
    if cfg.format == Some(OutputFormat::Json) {
        return json_output(cfg, curve, 0);
    }
    let mut cols = vec!["s2", "s4_sep_min", "s4_sep_max", "s4_gen_min"];
    if cfg.ppt {
        cols.push("s4_ppt_min");
    }
    let mut csv = Csv::new(&cfg.to_json(), &cols);
    for (i, &s2) in grid.iter().enumerate() {
        let mut row = vec![
            g15(s2),
            opt_g15(curve.sep_min[i]),
            opt_g15(curve.sep_max[i]),
            g15(curve.gen_min[i]),
        ];
        if let Some(p) = &curve.ppt_min {
            row.push(g15(p[i]));
        }
        csv.row(&row);
    }
    Ok(csv_output(csv.finish()))
}

#[derive(Debug, Serialize)]
pub struct McReport {
    pub state_label: String,
    pub observable: MomentObservable,
    pub estimates: McMoments,
    pub s_moments: Option<MomentPair>,
    pub analytic: MomentPair,
}

fn mc(cfg: &RunConfig) -> Result<McReport> {
    let spec = require_state(cfg)?;
    let rho = spec.resolve()?;
    let d = match rho.dims() {
        [a, b] if a == b => *a,
        dims => return Err(Error::usage(format!("mc needs a d x d state, got dims {dims:?}"))),
    };
    let obs = moment_observable(d)?;
    let r = cfg.r.as_deref().expect("normalized");
    let est = mc_moments(&rho, &obs, r, cfg.samples.expect("normalized"), cfg.seed.expect("normalized"))?;
    let s_moments = if est.get(2).is_some() && est.get(4).is_some() {
        Some(est.to_s_moments()?)
    } else {
        None
    };
    Ok(McReport {
        state_label: spec.label(),
        observable: obs,
        estimates: est,
        s_moments,
        analytic: state_moments(&rho)?,
    })
}

#[derive(Debug, Serialize)]
pub struct Facets {
    pub nonnegativity: f64,
    pub a1_minus_a2_plus_a3: f64,
    pub a2_upper: f64,
    pub a1_plus_a2_vs_a3: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum SectorReport {
    ThreeParty {
        state_label: String,
        sectors: SectorVector,
        #[serde(skip_serializing_if = "Option::is_none")]
        facets: Option<Facets>,
        #[serde(skip_serializing_if = "Option::is_none")]
        in_polytope: Option<bool>,
        criteria: Vec<CriterionVerdict>,
    },
    TwoParty {
        state_label: String,
        sectors: SectorVector,
        in_polytope: bool,
        criteria: Vec<CriterionVerdict>,
    },
}

/// Sector lengths plus every applicable sector criterion.
pub fn sector_report(rho: &DensityMatrix, label: &str) -> Result<SectorReport> {
    let s = sector_lengths(rho)?;
    match s.n {
        3 => {
            let mut criteria = vec![full_sep_test(&s, s.d)?, bisep_test(&s, s.d)?];
            let (facets, in_polytope) = if s.d == 2 {
                criteria.extend(legacy_sector_tests(&s)?);
                let f = three_qubit_facets(s.a[1], s.a[2], s.a[3]);
                (
                    Some(Facets {
                        nonnegativity: f[0],
                        a1_minus_a2_plus_a3: f[1],
                        a2_upper: f[2],
                        a1_plus_a2_vs_a3: f[3],
                    }),
                    Some(three_qubit_polytope_member(s.a[1], s.a[2], s.a[3])),
                )
            } else {
                (None, None)
            };
            Ok(SectorReport::ThreeParty {
                state_label: label.to_string(),
                sectors: s,
                facets,
                in_polytope,
                criteria,
            })
        }
        2 => {
            let (a1a, a1b, a2) = (s.one_body_parts[0], s.one_body_parts[1], s.a[2]);
            Ok(SectorReport::TwoParty {
                state_label: label.to_string(),
                in_polytope: two_qudit_polytope_member(a1a, a1b, a2, s.d),
                criteria: vec![purity_sep_test(a1a, a1b, a2, s.d), legacy_two_qudit_test(a2, s.d)],
                sectors: s,
            })
        }
        n => Err(Error::usage(format!("sector criteria need two or three parties, got {n}"))),
    }
}

fn sector(cfg: &RunConfig) -> Result<SectorReport> {
    let spec = require_state(cfg)?;
    sector_report(&spec.resolve()?, &spec.label())
}

fn flag(v: &CriterionVerdict) -> String {
    if v.violated { "1" } else { "0" }.to_string()
}

/// Noisy GHZ-W plane: every grid pair with g + w ≤ 1.
pub(super) fn gw_scan_csv(cfg: &RunConfig, grid: &[f64]) -> Result<String> {
    let mut csv = Csv::new(
        &cfg.to_json(),
        &[
            "g",
            "w",
            "a1",
            "a2",
            "a3",
            "full_sep_violated",
            "bisep_violated",
            "legacy_full_sep_violated",
            "legacy_bisep_violated",
        ],
    );
    for &g in grid {
        for &w in grid {
            if g + w > 1.0 + 1e-12 {
                continue;
            }
            let s = sector_lengths(&noisy_ghz_w(g, w.min(1.0 - g).max(0.0))?)?;
            let legacy = legacy_sector_tests(&s)?;
            csv.row(&[
                g15(g),
                g15(w),
                g15(s.a[1]),
                g15(s.a[2]),
                g15(s.a[3]),
                flag(&full_sep_test(&s, 2)?),
                flag(&bisep_test(&s, 2)?),
                flag(&legacy[0]),
                flag(&legacy[1]),
            ]);
        }
    }
    Ok(csv.finish())
}

fn scan_gw(cfg: &RunConfig) -> Result<String> {
    let grid = parse_grid(cfg.grid.as_deref().expect("normalized"))?;
    if grid.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::usage("g-w scan grid must lie in [0, 1]"));
    }
    gw_scan_csv(cfg, &grid)
}

fn conjecture(cfg: &RunConfig) -> Result<OptResult> {
    bisep_conjecture_scan(
        cfg.max_terms.expect("normalized"),
        cfg.restarts.expect("normalized"),
        cfg.seed.expect("normalized"),
    )
}
