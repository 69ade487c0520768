//! Named states: GHZ/W families, isotropic states, bound-entangled examples
//! and the families saturating the sector-length criteria.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    hermitian_eigenvalues, kron, kron_vec, permute_subsystems, ComplexMatrix, DensityMatrix, RawState, C64,
};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn basis_vector(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![re(0.0); dim];
    v[k] = re(1.0);
    v
}

/// (|00⟩+|11⟩+…)/√d
pub fn max_entangled_vector(d: usize) -> Vec<C64> {
    let mut v = vec![re(0.0); d * d];
    let s = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        v[k * d + k] = re(s);
    }
    v
}

/// |Φ⁺_d⟩⟨Φ⁺_d|
pub fn phi_plus(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::usage("phi_plus needs d >= 2"));
    }
    DensityMatrix::from_pure(vec![d, d], &max_entangled_vector(d))
}

pub fn bell() -> DensityMatrix {
    phi_plus(2).expect("d=2 is valid")
}

pub fn ghz_vector() -> Vec<C64> {
    let mut v = vec![re(0.0); 8];
    v[0] = re(FRAC_1_SQRT_2);
    v[7] = re(FRAC_1_SQRT_2);
    v
}

pub fn w_vector() -> Vec<C64> {
    let s = 1.0 / 3f64.sqrt();
    let mut v = vec![re(0.0); 8];
    v[1] = re(s);
    v[2] = re(s);
    v[4] = re(s);
    v
}

pub fn ghz() -> DensityMatrix {
    DensityMatrix::from_pure(vec![2, 2, 2], &ghz_vector()).expect("valid pure state")
}

pub fn w_state() -> DensityMatrix {
    DensityMatrix::from_pure(vec![2, 2, 2], &w_vector()).expect("valid pure state")
}

/// g·GHZ + w·W + (1−g−w)·𝟙/8
pub fn noisy_ghz_w(g: f64, w: f64) -> Result<DensityMatrix> {
    if !(g >= 0.0 && w >= 0.0 && g + w <= 1.0 + 1e-12) {
        return Err(Error::usage(format!("noisy GHZ-W needs g,w >= 0 and g+w <= 1, got g={g}, w={w}")));
    }
    let mut m = ComplexMatrix::outer(&ghz_vector()).scale_real(g);
    m.add_scaled(&ComplexMatrix::outer(&w_vector()), re(w));
    m.add_scaled(&ComplexMatrix::identity(8), re((1.0 - g - w) / 8.0));
    DensityMatrix::new(vec![2, 2, 2], m)
}

/// p·Φ⁺_d + (1−p)·𝟙/d²
pub fn isotropic(p: f64, d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::usage("isotropic needs d >= 2"));
    }
    let lo = -1.0 / ((d * d - 1) as f64);
    if !(p >= lo - 1e-12 && p <= 1.0 + 1e-12) {
        return Err(Error::usage(format!("isotropic weight p={p} outside [{lo}, 1]")));
    }
    let n = (d * d) as f64;
    let mut m = ComplexMatrix::outer(&max_entangled_vector(d)).scale_real(p);
    m.add_scaled(&ComplexMatrix::identity(d * d), re((1.0 - p) / n));
    DensityMatrix::new(vec![d, d], m)
}

pub fn maximally_mixed(d: usize, n: usize) -> Result<DensityMatrix> {
    if d < 2 || n == 0 {
        return Err(Error::usage("maximally_mixed needs d >= 2 and n >= 1"));
    }
    Ok(DensityMatrix::maximally_mixed(vec![d; n]))
}

/// |0…0⟩⟨0…0| on n parties of dimension d.
pub fn product_zero(d: usize, n: usize) -> Result<DensityMatrix> {
    if d < 2 || n == 0 {
        return Err(Error::usage("product needs d >= 2 and n >= 1"));
    }
    let dim = d.pow(n as u32);
    DensityMatrix::from_pure(vec![d; n], &basis_vector(dim, 0))
}

/// Edge |i,j;k,l⟩ = (|ij⟩ − |kl⟩)/√2, labels 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEdge {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl GridEdge {
    pub const fn new(i: usize, j: usize, k: usize, l: usize) -> Self {
        Self { i, j, k, l }
    }
}

pub const CROSS_HATCH_EDGES: [GridEdge; 4] = [
    GridEdge::new(1, 1, 2, 3),
    GridEdge::new(2, 1, 3, 3),
    GridEdge::new(1, 2, 3, 1),
    GridEdge::new(1, 3, 3, 2),
];

/// Uniform mixture of grid edges on d⊗d.
pub fn grid_state(edges: &[GridEdge], d: usize) -> Result<DensityMatrix> {
    if edges.is_empty() {
        return Err(Error::usage("grid state needs at least one edge"));
    }
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for e in edges {
        let labels = [e.i, e.j, e.k, e.l];
        if labels.iter().any(|&x| x == 0 || x > d) {
            return Err(Error::usage(format!("grid edge {e:?} has labels outside 1..={d}")));
        }
        let a = (e.i - 1) * d + (e.j - 1);
        let b = (e.k - 1) * d + (e.l - 1);
        if a == b {
            return Err(Error::usage(format!("grid edge {e:?} joins a vertex to itself")));
        }
        let mut v = vec![re(0.0); d * d];
        v[a] = re(FRAC_1_SQRT_2);
        v[b] = re(-FRAC_1_SQRT_2);
        m.add_scaled(&ComplexMatrix::outer(&v), re(1.0 / edges.len() as f64));
    }
    DensityMatrix::new(vec![d, d], m)
}

pub fn cross_hatch() -> DensityMatrix {
    grid_state(&CROSS_HATCH_EDGES, 3).expect("fixed edges are valid")
}

/// Parameters of the 3⊗3 chessboard family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChessboardParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub m: f64,
    pub n: f64,
}

impl Default for ChessboardParams {
    /// The extremal PPT entangled instance m=n=b=−3/5, a=3/5, c=−d=6/5.
    fn default() -> Self {
        Self {
            a: 0.6,
            b: -0.6,
            c: 1.2,
            d: -1.2,
            m: -0.6,
            n: -0.6,
        }
    }
}

pub fn chessboard(p: ChessboardParams) -> Result<DensityMatrix> {
    if p.m == 0.0 || p.n == 0.0 {
        return Err(Error::usage("chessboard needs nonzero m and n"));
    }
    let s = p.a * p.c / p.n;
    let t = p.a * p.d / p.m;
    let vs: [[f64; 9]; 4] = [
        [p.m, 0.0, s, 0.0, p.n, 0.0, 0.0, 0.0, 0.0],
        [0.0, p.a, 0.0, p.b, 0.0, p.c, 0.0, 0.0, 0.0],
        [p.n, 0.0, 0.0, 0.0, -p.m, 0.0, t, 0.0, 0.0],
        [0.0, p.b, 0.0, -p.a, 0.0, 0.0, 0.0, p.d, 0.0],
    ];
    let mut m = ComplexMatrix::zeros(9, 9);
    for v in &vs {
        let v: Vec<C64> = v.iter().map(|&x| re(x)).collect();
        m.add_scaled(&ComplexMatrix::outer(&v), re(1.0));
    }
    DensityMatrix::from_unnormalized(vec![3, 3], m)
}

/// The five Tiles product vectors on 3⊗3.
pub fn tiles_vectors() -> [Vec<C64>; 5] {
    let e = |k| basis_vector(3, k);
    let diff = |a: usize, b: usize| -> Vec<C64> {
        let mut v = vec![re(0.0); 3];
        v[a] = re(FRAC_1_SQRT_2);
        v[b] = re(-FRAC_1_SQRT_2);
        v
    };
    let s = 1.0 / 3f64.sqrt();
    let flat = vec![re(s); 3];
    [
        kron_vec(&e(0), &diff(0, 1)),
        kron_vec(&diff(0, 1), &e(2)),
        kron_vec(&e(2), &diff(1, 2)),
        kron_vec(&diff(1, 2), &e(0)),
        kron_vec(&flat, &flat),
    ]
}

/// (𝟙 − Σ|ψᵢ⟩⟨ψᵢ|)/4 over the Tiles basis.
pub fn upb_tiles() -> DensityMatrix {
    let mut m = ComplexMatrix::identity(9);
    for v in tiles_vectors() {
        m.add_scaled(&ComplexMatrix::outer(&v), re(-1.0));
    }
    DensityMatrix::new(vec![3, 3], m.scale_real(0.25)).expect("Tiles complement is a valid state")
}

/// σ(p) = (2Ψ⁺ + p·σ₊ + (5−p)·σ₋)/7 on 3⊗3, 2 ≤ p ≤ 5.
pub fn horodecki_3x3(p: f64) -> Result<DensityMatrix> {
    if !(2.0..=5.0).contains(&p) {
        return Err(Error::usage(format!("Horodecki parameter p={p} outside [2, 5]")));
    }
    let mut m = ComplexMatrix::outer(&max_entangled_vector(3)).scale_real(2.0 / 7.0);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        m[(i * 3 + j, i * 3 + j)] += re(p / 21.0);
    }
    for (i, j) in [(1, 0), (2, 1), (0, 2)] {
        m[(i * 3 + j, i * 3 + j)] += re((5.0 - p) / 21.0);
    }
    DensityMatrix::new(vec![3, 3], m)
}

/// Minimum eigenvalue of (𝟙⊗Λ)ρ for the non-decomposable map Λ that
/// flips off-diagonal signs and adds a cyclically shifted diagonal.
pub fn horodecki_map_min_eig(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [3, 3] {
        return Err(Error::usage("the map diagnostic needs a 3x3 state"));
    }
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(9, 9);
    for a in 0..3 {
        for b in 0..3 {
            // block X = ρ[(a,·),(b,·)]
            let x = |i: usize, j: usize| m[(a * 3 + i, b * 3 + j)];
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = if i == j { x(i, j) } else { -x(i, j) };
                    if i == j {
                        v += x((i + 1) % 3, (i + 1) % 3);
                    }
                    out[(a * 3 + i, b * 3 + j)] = v;
                }
            }
        }
    }
    Ok(hermitian_eigenvalues(&out)[0])
}

pub fn pauli(i: usize) -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    let data = match i {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z],
        3 => vec![o, z, z, -o],
        _ => panic!("Pauli index {i} out of range"),
    };
    ComplexMatrix::from_row_major(2, 2, data).expect("2x2")
}

/// (1/6)(P₀₂+P₁₁+P₂₃+P₃₁+P₃₂+P₃₃) on AA′|BB′, P_ij from (𝟙⊗σᵢ⊗σⱼ)|Ψ⁺₄⟩.
pub fn piani_4x4() -> DensityMatrix {
    let psi = max_entangled_vector(4);
    let mut m = ComplexMatrix::zeros(16, 16);
    for (i, j) in [(0, 2), (1, 1), (2, 3), (3, 1), (3, 2), (3, 3)] {
        let op = kron(&ComplexMatrix::identity(4), &kron(&pauli(i), &pauli(j)));
        let v: Vec<C64> = (0..16).map(|r| (0..16).map(|c| op[(r, c)] * psi[c]).sum()).collect();
        m.add_scaled(&ComplexMatrix::outer(&v), re(1.0 / 6.0));
    }
    DensityMatrix::new(vec![4, 4], m).expect("mixture of orthogonal projectors")
}

/// Same state assembled from Bell projectors on AB and A′B′, then regrouped.
pub fn piani_from_bell_pairs() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    let bell = |v: [f64; 4]| ComplexMatrix::outer(&v.iter().map(|&x| re(x * s)).collect::<Vec<_>>());
    let phi_p = bell([1.0, 0.0, 0.0, 1.0]);
    let phi_m = bell([1.0, 0.0, 0.0, -1.0]);
    let psi_p = bell([0.0, 1.0, 1.0, 0.0]);
    let psi_m = bell([0.0, 1.0, -1.0, 0.0]);
    let terms = [
        (&phi_p, &psi_m),
        (&psi_p, &psi_p),
        (&psi_m, &phi_m),
        (&phi_m, &psi_p),
        (&phi_m, &psi_m),
        (&phi_m, &phi_m),
    ];
    let mut m = ComplexMatrix::zeros(16, 16);
    for (ab, apbp) in terms {
        // factor order A,B,A′,B′ → parties A=0, A′=1, B=2, B′=3
        let block = permute_subsystems(&kron(ab, apbp), &[2, 2, 2, 2], &[0, 2, 1, 3]);
        m.add_scaled(&block, re(1.0 / 6.0));
    }
    DensityMatrix::new(vec![4, 4], m).expect("mixture of orthogonal projectors")
}

/// Biseparable three-qubit state p|0⟩⟨0|⊗ψ + (1−p)|1⟩⟨1|⊗φ saturating
/// A₂+A₃ = 3(1+A₁). `d_sign` selects the sign of φ's |11⟩ amplitude.
pub fn bisep_family(p: f64, a: f64, d_sign: f64) -> Result<DensityMatrix> {
    let (b, c, d) = bisep_family_coefficients(p, a, d_sign)?;
    let psi = [re(a), re(0.0), re(0.0), re(b)];
    let phi = [re(c), re(0.0), re(0.0), re(d)];
    let mut m = kron(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), &ComplexMatrix::outer(&psi)).scale_real(p);
    m.add_scaled(
        &kron(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0]), &ComplexMatrix::outer(&phi)),
        re(1.0 - p),
    );
    DensityMatrix::new(vec![2, 2, 2], m)
}

/// (b, c, d) for the biseparable saturating family.
pub fn bisep_family_coefficients(p: f64, a: f64, d_sign: f64) -> Result<(f64, f64, f64)> {
    const SLACK: f64 = 1e-12;
    if !(0.5 - SLACK..=1.0 + SLACK).contains(&p) {
        return Err(Error::usage(format!("bisep family needs 1/2 <= p <= 1, got {p}")));
    }
    if d_sign != 1.0 && d_sign != -1.0 {
        return Err(Error::usage("d_sign must be +1 or -1"));
    }
    let lo = (1.0 - 1.0 / (2.0 * p)).max(0.0).sqrt();
    let hi = (1.0 / (2.0 * p)).sqrt().min(FRAC_1_SQRT_2);
    if !(a >= lo - SLACK && a <= hi + SLACK) {
        return Err(Error::usage(format!("a={a} outside the window [{lo}, {hi}] for p={p}")));
    }
    let b = (1.0 - a * a).max(0.0).sqrt();
    let c = if (1.0 - p).abs() < SLACK {
        // second branch carries no weight
        0.0
    } else {
        ((2.0 * p * a * a - 1.0) / (2.0 * (p - 1.0))).clamp(0.0, 1.0).sqrt()
    };
    let d = d_sign * (1.0 - c * c).max(0.0).sqrt();
    Ok((b, c, d))
}

/// Separable two-qudit state p|00⟩⟨00| + q Σⱼ |j⟩⟨j|⊗|θ₀ⱼ⟩⟨θ₀ⱼ| with
/// q=(1−p)/(d−1), |θ₀ⱼ⟩ = cos θ|0⟩ + sin θ|j⟩. `swap` exchanges the parties.
pub fn sep_family(p: f64, theta: f64, d: usize, swap: bool) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::usage("sep family needs d >= 2"));
    }
    let df = d as f64;
    if !(p >= 1.0 / df - 1e-12 && p <= 1.0 + 1e-12) {
        return Err(Error::usage(format!("sep family needs 1/d <= p <= 1, got {p}")));
    }
    if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::usage(format!("sep family needs 0 <= theta <= pi/2, got {theta}")));
    }
    let q = (1.0 - p) / (df - 1.0);
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    m[(0, 0)] = re(p);
    for j in 1..d {
        let mut th = vec![re(0.0); d];
        th[0] = re(theta.cos());
        th[j] = re(theta.sin());
        let proj_j = ComplexMatrix::outer(&basis_vector(d, j));
        let proj_th = ComplexMatrix::outer(&th);
        let term = if swap { kron(&proj_th, &proj_j) } else { kron(&proj_j, &proj_th) };
        m.add_scaled(&term, re(q));
    }
    DensityMatrix::new(vec![d, d], m)
}

/// Named state with real parameters, or a raw matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Raw(RawState),
}

impl StateSpec {
    pub fn named(name: &str) -> Self {
        StateSpec::Named {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        if let StateSpec::Named { params, .. } = &mut self {
            params.insert(key.to_string(), value);
        }
        self
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Named { name, .. } => name.clone(),
            StateSpec::Raw(_) => "raw".to_string(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Raw(raw) => raw.to_state(),
            StateSpec::Named { name, params } => resolve_named(name, params),
        }
    }
}

/// Names accepted by [`StateSpec::resolve`].
pub const STATE_NAMES: &[&str] = &[
    "bell",
    "phi_plus",
    "ghz",
    "w",
    "noisy_ghz_w",
    "isotropic",
    "maximally_mixed",
    "product",
    "cross_hatch",
    "chessboard",
    "upb_tiles",
    "horodecki",
    "piani",
    "bisep_family",
    "sep_family",
];

fn resolve_named(name: &str, params: &BTreeMap<String, f64>) -> Result<DensityMatrix> {
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    let dim = |default: usize| -> Result<usize> {
        let d = get("d", default as f64);
        if d.fract() != 0.0 || d < 2.0 || d > 16.0 {
            return Err(Error::usage(format!("parameter d={d} must be an integer in 2..=16")));
        }
        Ok(d as usize)
    };
    let count = |k: &str, default: usize| -> Result<usize> {
        let v = get(k, default as f64);
        if v.fract() != 0.0 || !(1.0..=8.0).contains(&v) {
            return Err(Error::usage(format!("parameter {k}={v} must be an integer in 1..=8")));
        }
        Ok(v as usize)
    };
    match name {
        "bell" => Ok(bell()),
        "phi_plus" => phi_plus(dim(2)?),
        "ghz" => Ok(ghz()),
        "w" | "w_state" => Ok(w_state()),
        "noisy_ghz_w" => noisy_ghz_w(get("g", 0.0), get("w", 0.0)),
        "isotropic" => isotropic(get("p", 0.5), dim(3)?),
        "maximally_mixed" => maximally_mixed(dim(2)?, count("n", 2)?),
        "product" => product_zero(dim(2)?, count("n", 2)?),
        "cross_hatch" => Ok(cross_hatch()),
        "chessboard" => {
            let def = ChessboardParams::default();
            chessboard(ChessboardParams {
                a: get("a", def.a),
                b: get("b", def.b),
                c: get("c", def.c),
                d: get("d", def.d),
                m: get("m", def.m),
                n: get("n", def.n),
            })
        }
        "upb_tiles" | "upb" => Ok(upb_tiles()),
        "horodecki" | "horodecki_3x3" => horodecki_3x3(get("p", 3.5)),
        "piani" | "piani_4x4" => Ok(piani_4x4()),
        "bisep_family" => bisep_family(get("p", 1.0), get("a", FRAC_1_SQRT_2), get("sign", 1.0)),
        "sep_family" => sep_family(
            get("p", 1.0),
            get("theta", 0.0),
            dim(3)?,
            get("swap", 0.0) != 0.0,
        ),
        other => Err(Error::usage(format!(
            "unknown state '{other}'; known states: {}",
            STATE_NAMES.join(", ")
        ))),
    }
}
