//! Benchmark circuit families.
//!
//! Every generator is a pure function of `(family, n_qubits, params, seed)`;
//! all randomness comes from one `ChaCha8Rng` seeded with `seed`, drawn in a
//! fixed order.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, haar_unitary, Gate};
use crate::linalg::{Mat2, Mat4, C64, I, ONE, ZERO};
use crate::rdm::eig4_hermitian;
use crate::state::check_qubits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Brickwork1D,
    Brickwork2D,
    HaarPairs,
    QAOA,
    RFIM,
    UCCSD,
    TFIM,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Brickwork1D,
        Family::Brickwork2D,
        Family::HaarPairs,
        Family::QAOA,
        Family::RFIM,
        Family::UCCSD,
        Family::TFIM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Brickwork1D => "Brickwork1D",
            Family::Brickwork2D => "Brickwork2D",
            Family::HaarPairs => "HaarPairs",
            Family::QAOA => "QAOA",
            Family::RFIM => "RFIM",
            Family::UCCSD => "UCCSD",
            Family::TFIM => "TFIM",
        }
    }

    /// Layers, rounds or Trotter steps used when `FamilyParams::depth` is unset.
    pub fn default_depth(self) -> usize {
        match self {
            Family::Brickwork1D | Family::RFIM | Family::TFIM => 5,
            Family::Brickwork2D => 4,
            Family::HaarPairs | Family::QAOA => 3,
            Family::UCCSD => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let found = match lower.as_str() {
            "brickwork" | "brickwork1d" | "bw" => Family::Brickwork1D,
            "brickwork2d" | "bw2d" => Family::Brickwork2D,
            "haar" | "haarpairs" => Family::HaarPairs,
            "qaoa" => Family::QAOA,
            "rfim" => Family::RFIM,
            "uccsd" => Family::UCCSD,
            "tfim" => Family::TFIM,
            _ => return Err(Error::InvalidParams(format!("unknown circuit family {s:?}"))),
        };
        Ok(found)
    }
}

/// Which disordered-Ising construction to emit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RfimVariant {
    /// Trotter steps of `ZZ`, `X` and random-`Z` sublayers.
    #[default]
    Sublayer,
    /// Brickwork of `exp(-i dt (J ZZ + h_i X_i + h_j X_j))` with `h ~ U[0, h_max]`.
    Brickwork,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    /// Layers (brickwork, Haar), rounds (QAOA) or Trotter steps (RFIM, TFIM, UCCSD).
    pub depth: Option<usize>,
    /// Lattice shape for `Brickwork2D`; when unset the most square factorization is used.
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub coupling_j: f64,
    pub field_h0: f64,
    pub disorder_w: f64,
    pub dt: f64,
    pub rfim_variant: RfimVariant,
    pub h_max: f64,
    pub qaoa_perturbation: f64,
    pub singles_scale: f64,
    pub doubles_scale: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            depth: None,
            rows: None,
            cols: None,
            coupling_j: 1.0,
            field_h0: 1.0,
            disorder_w: 2.0,
            dt: 0.2,
            rfim_variant: RfimVariant::Sublayer,
            h_max: 0.1,
            qaoa_perturbation: 0.05,
            singles_scale: 0.3,
            doubles_scale: 0.05,
        }
    }
}

impl FamilyParams {
    pub fn with_depth(depth: usize) -> Self {
        Self {
            depth: Some(depth),
            ..Self::default()
        }
    }

    pub fn depth_for(&self, family: Family) -> usize {
        self.depth.unwrap_or_else(|| family.default_depth())
    }

    fn check(&self) -> Result<()> {
        let reals = [
            ("coupling_j", self.coupling_j),
            ("field_h0", self.field_h0),
            ("disorder_w", self.disorder_w),
            ("dt", self.dt),
            ("h_max", self.h_max),
            ("qaoa_perturbation", self.qaoa_perturbation),
            ("singles_scale", self.singles_scale),
            ("doubles_scale", self.doubles_scale),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        for (name, v) in [
            ("disorder_w", self.disorder_w),
            ("h_max", self.h_max),
            ("qaoa_perturbation", self.qaoa_perturbation),
            ("singles_scale", self.singles_scale),
            ("doubles_scale", self.doubles_scale),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub family: Family,
    pub n_qubits: usize,
    pub seed: u64,
    pub params: FamilyParams,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Self {
        Self {
            family: Family::Brickwork1D,
            n_qubits,
            seed: 0,
            params: FamilyParams::default(),
            gates,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_qubits(self.n_qubits)?;
        for g in &self.gates {
            g.validate(self.n_qubits)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    /// Parses and validates a circuit document.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

pub fn generate_circuit(family: Family, n_qubits: usize, params: &FamilyParams, seed: u64) -> Result<Circuit> {
    check_qubits(n_qubits)?;
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = params.depth_for(family);
    let gates = match family {
        Family::Brickwork1D => brickwork_1d(n_qubits, depth, &mut rng),
        Family::Brickwork2D => {
            let (rows, cols) = lattice_shape(n_qubits, params)?;
            brickwork_2d(rows, cols, depth, &mut rng)
        }
        Family::HaarPairs => haar_pairs(n_qubits, depth, &mut rng),
        Family::QAOA => qaoa(n_qubits, depth, params.qaoa_perturbation, &mut rng)?,
        Family::RFIM => match params.rfim_variant {
            RfimVariant::Sublayer => ising_sublayers(n_qubits, depth, params, true, &mut rng),
            RfimVariant::Brickwork => rfim_brickwork(n_qubits, depth, params, &mut rng)?,
        },
        Family::TFIM => ising_sublayers(n_qubits, depth, params, false, &mut rng),
        Family::UCCSD => uccsd(n_qubits, depth, params, &mut rng)?,
    };
    let circuit = Circuit {
        family,
        n_qubits,
        seed,
        params: params.clone(),
        gates,
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Nearest-neighbour pairs of brickwork layer `layer` (1-based): odd layers start at 0.
pub fn brickwork_pairs(n_qubits: usize, layer: usize) -> Vec<(usize, usize)> {
    let start = if layer % 2 == 1 { 0 } else { 1 };
    (start..n_qubits.saturating_sub(1))
        .step_by(2)
        .map(|q| (q, q + 1))
        .collect()
}

fn brickwork_1d(n: usize, depth: usize, rng: &mut ChaCha8Rng) -> Vec<Gate> {
    let mut out = Vec::new();
    for layer in 1..=depth {
        for (a, b) in brickwork_pairs(n, layer) {
            out.push(Gate::two(a, b, haar_unitary(rng)));
        }
    }
    out
}

fn lattice_shape(n: usize, params: &FamilyParams) -> Result<(usize, usize)> {
    match (params.rows, params.cols) {
        (Some(r), Some(c)) if r * c == n && r >= 1 && c >= 1 => Ok((r, c)),
        (Some(r), None) if r >= 1 && n % r == 0 => Ok((r, n / r)),
        (None, Some(c)) if c >= 1 && n % c == 0 => Ok((n / c, c)),
        (None, None) => {
            let r = (1..=n).filter(|r| n % r == 0 && r * r <= n).max().unwrap_or(1);
            Ok((r, n / r))
        }
        _ => Err(Error::InvalidParams(format!(
            "lattice {:?}x{:?} does not factor {n} qubits",
            params.rows, params.cols
        ))),
    }
}

/// Pairs of 2D brickwork layer `layer` (0-based) on a `rows x cols` lattice, qubit `r*cols + c`.
///
/// Even layers are horizontal and odd layers vertical; the offset alternates every two layers.
pub fn brickwork_2d_pairs(rows: usize, cols: usize, layer: usize) -> Vec<(usize, usize)> {
    let offset = (layer / 2) % 2;
    let mut out = Vec::new();
    if layer % 2 == 0 {
        for r in 0..rows {
            for c in (offset..cols.saturating_sub(1)).step_by(2) {
                out.push((r * cols + c, r * cols + c + 1));
            }
        }
    } else {
        for r in (offset..rows.saturating_sub(1)).step_by(2) {
            for c in 0..cols {
                out.push((r * cols + c, (r + 1) * cols + c));
            }
        }
    }
    out
}

fn brickwork_2d(rows: usize, cols: usize, depth: usize, rng: &mut ChaCha8Rng) -> Vec<Gate> {
    let mut out = Vec::new();
    for layer in 0..depth {
        for (a, b) in brickwork_2d_pairs(rows, cols, layer) {
            out.push(Gate::two(a, b, haar_unitary(rng)));
        }
    }
    out
}

fn haar_pairs(n: usize, depth: usize, rng: &mut ChaCha8Rng) -> Vec<Gate> {
    let mut out = Vec::new();
    let mut qubits: Vec<usize> = (0..n).collect();
    for _ in 0..depth {
        qubits.shuffle(rng);
        for pair in qubits.chunks_exact(2) {
            out.push(Gate::two(pair[0], pair[1], haar_unitary(rng)));
        }
    }
    out
}

/// Unperturbed one-term Fourier angles `(γ_k, β_k)` for rounds `k = 1..=p`.
pub fn qaoa_angles(p: usize) -> Vec<(f64, f64)> {
    (1..=p)
        .map(|k| {
            let arg = (2 * k - 1) as f64 * PI / (4 * p) as f64;
            (PI / 4.0 * arg.sin(), PI / 4.0 * arg.cos())
        })
        .collect()
}

fn qaoa(n: usize, p: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Gate>> {
    let edges = random_3regular_graph(n, rng)?;
    let mut out: Vec<Gate> = (0..n).map(|q| Gate::one(q, gates::hadamard())).collect();
    for (gamma0, beta0) in qaoa_angles(p) {
        let gamma = gamma0 + perturbation(eps, rng);
        let beta = beta0 + perturbation(eps, rng);
        for &(a, b) in &edges {
            out.push(Gate::two(a, b, gates::exp_izz(gamma / 2.0)));
        }
        for q in 0..n {
            out.push(Gate::one(q, gates::exp_ix(-beta)));
        }
    }
    Ok(out)
}

fn perturbation(eps: f64, rng: &mut ChaCha8Rng) -> f64 {
    if eps > 0.0 {
        rng.random_range(-eps..eps)
    } else {
        0.0
    }
}

/// Simple 3-regular graph from the pairing model; edges are `(lo, hi)` sorted ascending.
pub fn random_3regular_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::InvalidParams(format!(
            "a 3-regular graph needs an even vertex count of at least 4, got {n}"
        )));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| [v; 3]).collect();
    'retry: loop {
        points.shuffle(rng);
        let mut edges = BTreeSet::new();
        for pair in points.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !edges.insert((a, b)) {
                continue 'retry;
            }
        }
        return Ok(edges.into_iter().collect());
    }
}

/// Open-chain Ising Trotter steps; RFIM adds the random longitudinal sublayer.
fn ising_sublayers(n: usize, depth: usize, params: &FamilyParams, disorder: bool, rng: &mut ChaCha8Rng) -> Vec<Gate> {
    let w = params.disorder_w;
    let fields: Vec<f64> = if disorder {
        (0..n)
            .map(|_| if w > 0.0 { rng.random_range(-w..=w) } else { 0.0 })
            .collect()
    } else {
        Vec::new()
    };
    let dt = params.dt;
    let mut out = Vec::new();
    for _ in 0..depth {
        for q in 0..n.saturating_sub(1) {
            out.push(Gate::two(q, q + 1, gates::exp_izz(params.coupling_j * dt)));
        }
        for q in 0..n {
            out.push(Gate::one(q, gates::exp_ix(params.field_h0 * dt)));
        }
        for (q, delta) in fields.iter().enumerate() {
            out.push(Gate::one(q, gates::exp_iz(delta * dt)));
        }
    }
    out
}

fn rfim_brickwork(n: usize, depth: usize, params: &FamilyParams, rng: &mut ChaCha8Rng) -> Result<Vec<Gate>> {
    let h_max = params.h_max;
    let fields: Vec<f64> = (0..n)
        .map(|_| if h_max > 0.0 { rng.random_range(0.0..=h_max) } else { 0.0 })
        .collect();
    let zz = gates::pauli_z().kron(&gates::pauli_z());
    let xi = gates::pauli_x().kron(&Mat2::identity());
    let ix = Mat2::identity().kron(&gates::pauli_x());
    let mut out = Vec::new();
    for layer in 1..=depth {
        for (a, b) in brickwork_pairs(n, layer) {
            let mut h = Mat4::zeros();
            for r in 0..4 {
                for c in 0..4 {
                    h[(r, c)] = zz[(r, c)] * params.coupling_j + xi[(r, c)] * fields[a] + ix[(r, c)] * fields[b];
                }
            }
            out.push(Gate::two(a, b, exp_hermitian(&h, -params.dt)?));
        }
    }
    Ok(out)
}

/// `exp(i t H)` for Hermitian `H` via its eigendecomposition.
fn exp_hermitian(h: &Mat4, t: f64) -> Result<Mat4> {
    let (v, evals) = eig4_hermitian(h)?;
    let phases = Mat4::from_diagonal(std::array::from_fn(|i| C64::from_polar(1.0, t * evals[i])));
    Ok(v * phases * v.dagger())
}

// Pauli-string algebra for the Jordan-Wigner compilation.

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// `a * b = phase * c`.
fn pauli_mul(a: Pauli, b: Pauli) -> (C64, Pauli) {
    use Pauli::*;
    const I_C: C64 = crate::linalg::I;
    match (a, b) {
        (I, p) | (p, I) => (ONE, p),
        (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
        (X, Y) => (I_C, Z),
        (Y, X) => (-I_C, Z),
        (Y, Z) => (I_C, X),
        (Z, Y) => (-I_C, X),
        (Z, X) => (I_C, Y),
        (X, Z) => (-I_C, Y),
    }
}

/// Linear combination of Pauli strings.
#[derive(Clone, Debug, Default)]
struct PauliSum(BTreeMap<Vec<Pauli>, C64>);

impl PauliSum {
    fn ladder(n: usize, p: usize, create: bool) -> Self {
        let sign = if create { -1.0 } else { 1.0 };
        let mut sum = PauliSum::default();
        for (op, coef) in [(Pauli::X, C64::new(0.5, 0.0)), (Pauli::Y, C64::new(0.0, 0.5 * sign))] {
            let mut s = vec![Pauli::I; n];
            for q in s.iter_mut().take(p) {
                *q = Pauli::Z;
            }
            s[p] = op;
            sum.0.insert(s, coef);
        }
        sum
    }

    fn mul(&self, rhs: &PauliSum) -> PauliSum {
        let mut out = PauliSum::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &rhs.0 {
                let mut coef = ca * cb;
                let s: Vec<Pauli> = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| {
                        let (ph, p) = pauli_mul(x, y);
                        coef *= ph;
                        p
                    })
                    .collect();
                *out.0.entry(s).or_insert(ZERO) += coef;
            }
        }
        out.0.retain(|_, c| c.norm() > 1e-14);
        out
    }

    fn adjoint(&self) -> PauliSum {
        PauliSum(self.0.iter().map(|(s, c)| (s.clone(), c.conj())).collect())
    }

    fn sub(&self, rhs: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (s, c) in &rhs.0 {
            *out.0.entry(s.clone()).or_insert(ZERO) -= c;
        }
        out.0.retain(|_, c| c.norm() > 1e-14);
        out
    }
}

/// Hermitian Pauli decomposition `H = Σ h_P P` with `T - T† = i H`.
fn excitation_terms(n: usize, creators: &[usize], annihilators: &[usize]) -> Vec<(Vec<Pauli>, f64)> {
    let mut t = PauliSum(BTreeMap::from([(vec![Pauli::I; n], ONE)]));
    for &p in creators {
        t = t.mul(&PauliSum::ladder(n, p, true));
    }
    for &p in annihilators {
        t = t.mul(&PauliSum::ladder(n, p, false));
    }
    let anti = t.sub(&t.adjoint());
    anti.0
        .into_iter()
        .map(|(s, c)| {
            let h = c * -I;
            debug_assert!(h.im.abs() < 1e-12);
            (s, h.re)
        })
        .collect()
}

/// Gates for `exp(i φ P)`: basis change, CNOT parity cascade, `exp(iφZ)` on the last
/// support qubit, then uncompute.
fn exp_pauli_string(string: &[Pauli], phi: f64, out: &mut Vec<Gate>) {
    let support: Vec<usize> = (0..string.len()).filter(|&q| string[q] != Pauli::I).collect();
    let Some(&last) = support.last() else {
        return;
    };
    let h = gates::hadamard();
    let to_z_y = h * gates::s_gate().dagger();
    let change: Vec<(usize, Mat2)> = support
        .iter()
        .filter_map(|&q| match string[q] {
            Pauli::X => Some((q, h)),
            Pauli::Y => Some((q, to_z_y)),
            _ => None,
        })
        .collect();
    for &(q, m) in &change {
        out.push(Gate::one(q, m));
    }
    for w in support.windows(2) {
        out.push(Gate::two(w[0], w[1], gates::cnot()));
    }
    out.push(Gate::one(last, gates::exp_iz(phi)));
    for w in support.windows(2).rev() {
        out.push(Gate::two(w[0], w[1], gates::cnot()));
    }
    for &(q, m) in change.iter().rev() {
        out.push(Gate::one(q, m.dagger()));
    }
}

/// Gates for `exp(θ (T - T†))` with `T = a†_{c0} a†_{c1}.. a_{a0} a_{a1}..`.
fn excitation_gates(n: usize, creators: &[usize], annihilators: &[usize], theta: f64, out: &mut Vec<Gate>) {
    for (string, h) in excitation_terms(n, creators, annihilators) {
        exp_pauli_string(&string, theta * h, out);
    }
}

/// Trotterized UCCSD from the half-filling reference with qubits `0..N/2` occupied.
fn uccsd(n: usize, depth: usize, params: &FamilyParams, rng: &mut ChaCha8Rng) -> Result<Vec<Gate>> {
    if n < 2 {
        return Err(Error::InvalidParams("UCCSD needs at least 2 qubits".into()));
    }
    let n_occ = n / 2;
    let occ: Vec<usize> = (0..n_occ).collect();
    let virt: Vec<usize> = (n_occ..n).collect();
    let draw = |scale: f64, rng: &mut ChaCha8Rng| if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 };
    let mut singles = Vec::new();
    for &i in &occ {
        for &a in &virt {
            singles.push((i, a, draw(params.singles_scale, rng)));
        }
    }
    let mut doubles = Vec::new();
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    doubles.push((i, j, a, b, draw(params.doubles_scale, rng)));
                }
            }
        }
    }
    let mut out: Vec<Gate> = occ.iter().map(|&q| Gate::one(q, gates::pauli_x())).collect();
    for _ in 0..depth {
        for &(i, a, theta) in &singles {
            excitation_gates(n, &[a], &[i], theta, &mut out);
        }
        for &(i, j, a, b, theta) in &doubles {
            excitation_gates(n, &[a, b], &[j, i], theta, &mut out);
        }
    }
    Ok(out)
}
