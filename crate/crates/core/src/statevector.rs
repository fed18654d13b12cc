//! Statevector simulation of the X, CNOT, Ry and controlled-Ry gate set.
//!
//! Basis index bit `n - 1 - q` holds qubit `q`, so qubit 0 is the most
//! significant bit and `|10⟩` has index 2.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum};

/// Normalized complex amplitudes over `2ⁿ` basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS as usize {
            return Err(Error::Domain(format!("unsupported register size {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be a power of two (at least 2);
    /// normalization is not enforced here.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &[Complex64]) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies a 2x2 unitary to `target`, restricted to basis states where
    /// every bit in `control_mask` is set.
    fn apply_single(&mut self, target: usize, control_mask: usize, m: [[Complex64; 2]; 2]) {
        let t = self.bit(target);
        for b in 0..self.amplitudes.len() {
            if b & t != 0 || b & control_mask != control_mask {
                continue;
            }
            let a0 = self.amplitudes[b];
            let a1 = self.amplitudes[b | t];
            self.amplitudes[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[b | t] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn swap_target(&mut self, target: usize, control_mask: usize) {
        let t = self.bit(target);
        for b in 0..self.amplitudes.len() {
            if b & t == 0 && b & control_mask == control_mask {
                self.amplitudes.swap(b, b | t);
            }
        }
    }

    /// Applies a gate whose angle is bound.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            GateOp::X { target } => self.swap_target(target, 0),
            GateOp::Cnot { control, target } => {
                let mask = self.bit(control);
                self.swap_target(target, mask)
            }
            GateOp::Ry { target, angle } => {
                let theta = angle.value()?;
                self.apply_single(target, 0, ry_matrix(theta))
            }
            GateOp::Cry {
                control,
                target,
                angle,
            } => {
                let theta = angle.value()?;
                let mask = self.bit(control);
                self.apply_single(target, mask, ry_matrix(theta))
            }
        }
        Ok(())
    }
}

/// Free-function form of [`StateVector::basis`].
pub fn init_basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
    StateVector::basis(n_qubits, index)
}

/// `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// A rotation angle: either a constant or a slot in the parameter vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param(usize),
}

impl Angle {
    fn value(self) -> Result<f64> {
        match self {
            Angle::Fixed(theta) => Ok(theta),
            Angle::Param(slot) => Err(Error::UnboundParameter { slot }),
        }
    }

    fn bind(self, theta: &[f64]) -> Angle {
        match self {
            Angle::Param(slot) => Angle::Fixed(theta[slot]),
            fixed => fixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    X { target: usize },
    Cnot { control: usize, target: usize },
    Ry { target: usize, angle: Angle },
    Cry { control: usize, target: usize, angle: Angle },
}

impl GateOp {
    pub fn ry(target: usize, slot: usize) -> Self {
        GateOp::Ry {
            target,
            angle: Angle::Param(slot),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Cnot { control, target }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GateOp::X { .. } => "X",
            GateOp::Cnot { .. } => "CNOT",
            GateOp::Ry { .. } => "RY",
            GateOp::Cry { .. } => "CRY",
        }
    }

    pub fn angle(&self) -> Option<Angle> {
        match *self {
            GateOp::Ry { angle, .. } | GateOp::Cry { angle, .. } => Some(angle),
            _ => None,
        }
    }

    fn qubits(&self) -> (Option<usize>, usize) {
        match *self {
            GateOp::X { target } | GateOp::Ry { target, .. } => (None, target),
            GateOp::Cnot { control, target } | GateOp::Cry { control, target, .. } => {
                (Some(control), target)
            }
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let (control, target) = self.qubits();
        if target >= n_qubits || control.is_some_and(|c| c >= n_qubits) {
            return Err(Error::InvalidCircuit(format!(
                "{} acts outside a {n_qubits}-qubit register",
                self.kind()
            )));
        }
        if control == Some(target) {
            return Err(Error::InvalidCircuit(format!(
                "{} control and target coincide on qubit {target}",
                self.kind()
            )));
        }
        if let Some(Angle::Fixed(theta)) = self.angle() {
            if !theta.is_finite() {
                return Err(Error::InvalidCircuit(format!("non-finite angle {theta}")));
            }
        }
        Ok(())
    }

    fn bind(&self, theta: &[f64]) -> GateOp {
        match *self {
            GateOp::Ry { target, angle } => GateOp::Ry {
                target,
                angle: angle.bind(theta),
            },
            GateOp::Cry {
                control,
                target,
                angle,
            } => GateOp::Cry {
                control,
                target,
                angle: angle.bind(theta),
            },
            other => other,
        }
    }
}

/// Returns `g|s⟩`.
pub fn apply_gate(s: &StateVector, g: &GateOp) -> Result<StateVector> {
    let mut out = s.clone();
    out.apply(g)?;
    Ok(out)
}

/// Ordered gate list with free rotation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    free_parameter_count: usize,
}

impl Circuit {
    /// The parameter count is one past the highest slot referenced; every
    /// slot below it must be used.
    pub fn new(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit("empty register".into()));
        }
        for op in &ops {
            op.validate(n_qubits)?;
        }
        let slots: Vec<usize> = ops
            .iter()
            .filter_map(|op| match op.angle() {
                Some(Angle::Param(slot)) => Some(slot),
                _ => None,
            })
            .collect();
        let free_parameter_count = slots.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; free_parameter_count];
        for &slot in &slots {
            used[slot] = true;
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(format!(
                "parameter slot {unused} is never used"
            )));
        }
        Ok(Self {
            n_qubits,
            ops,
            free_parameter_count,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn free_parameter_count(&self) -> usize {
        self.free_parameter_count
    }

    pub fn count_kind(&self, kind: &str) -> usize {
        self.ops.iter().filter(|op| op.kind() == kind).count()
    }

    /// `U(θ)|s0⟩`.
    pub fn run(&self, theta: &[f64], s0: &StateVector) -> Result<StateVector> {
        if theta.len() != self.free_parameter_count {
            return Err(Error::Arity {
                expected: self.free_parameter_count,
                found: theta.len(),
            });
        }
        if s0.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: s0.n_qubits(),
            });
        }
        let mut state = s0.clone();
        for op in &self.ops {
            state.apply(&op.bind(theta))?;
        }
        Ok(state)
    }

    pub fn to_file(&self) -> CircuitFile {
        CircuitFile {
            n_qubits: self.n_qubits,
            ops: self.ops.iter().map(OpRecord::from).collect(),
        }
    }

    pub fn from_file(file: &CircuitFile) -> Result<Self> {
        let ops = file
            .ops
            .iter()
            .map(GateOp::try_from)
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.n_qubits, ops)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// Free-function form of [`Circuit::run`].
pub fn run_circuit(c: &Circuit, theta: &[f64], s0: &StateVector) -> Result<StateVector> {
    c.run(theta, s0)
}

/// On-disk circuit: `{"n_qubits": 2, "ops": [{"kind": "RY", "target": 0, "param": 0}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub ops: Vec<OpRecord>,
}

/// One gate; `param` names a free-parameter slot, `angle` a bound constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpRecord {
    pub kind: String,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl From<&GateOp> for OpRecord {
    fn from(op: &GateOp) -> Self {
        let (control, target) = op.qubits();
        let (param, angle) = match op.angle() {
            Some(Angle::Param(slot)) => (Some(slot), None),
            Some(Angle::Fixed(theta)) => (None, Some(theta)),
            None => (None, None),
        };
        OpRecord {
            kind: op.kind().to_string(),
            target,
            control,
            param,
            angle,
        }
    }
}

impl TryFrom<&OpRecord> for GateOp {
    type Error = Error;

    fn try_from(rec: &OpRecord) -> Result<Self> {
        let kind = rec.kind.to_ascii_uppercase();
        let angle = || match (rec.param, rec.angle) {
            (Some(slot), None) => Ok(Angle::Param(slot)),
            (None, Some(theta)) => Ok(Angle::Fixed(theta)),
            _ => Err(Error::InvalidCircuit(format!(
                "{kind} needs exactly one of \"param\" or \"angle\""
            ))),
        };
        let control = || {
            rec.control
                .ok_or_else(|| Error::InvalidCircuit(format!("{kind} needs a \"control\"")))
        };
        let target = rec.target;
        match kind.as_str() {
            "X" => Ok(GateOp::X { target }),
            "CNOT" => Ok(GateOp::Cnot {
                control: control()?,
                target,
            }),
            "RY" => Ok(GateOp::Ry {
                target,
                angle: angle()?,
            }),
            "CRY" => Ok(GateOp::Cry {
                control: control()?,
                target,
                angle: angle()?,
            }),
            other => Err(Error::InvalidCircuit(format!("unknown gate kind {other}"))),
        }
    }
}

/// Shot-sampled energy estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShotEstimate {
    pub value: f64,
    /// Empirical standard error of `value`.
    pub std_error: f64,
}

/// Measurement-basis change so that a Z-basis readout yields the eigenvalue
/// of the given factor: `U† Z U = P`.
///
/// X uses `Ry(-π/2)`; Y uses `Rx(π/2) = [[1, -i], [-i, 1]]/√2`.
fn measurement_rotation(p: Pauli) -> Option<[[Complex64; 2]; 2]> {
    match p {
        Pauli::I | Pauli::Z => None,
        Pauli::X => Some(ry_matrix(-std::f64::consts::FRAC_PI_2)),
        Pauli::Y => {
            let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
            let m = Complex64::new(0.0, -FRAC_1_SQRT_2);
            Some([[r, m], [m, r]])
        }
    }
}

/// Estimates `⟨s|H|s⟩` by sampling `shots` bitstrings per Pauli term.
///
/// Each term is measured in its own rotated basis with an independent
/// ChaCha stream (stream index = term index) seeded by `seed`, so the
/// result is a pure function of its inputs. Outcome counts are drawn as a
/// multinomial over basis states.
pub fn sample_state_expectation(
    state: &StateVector,
    h: &PauliSum,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::Domain("shot count must be at least 1".into()));
    }
    if h.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            found: state.n_qubits(),
        });
    }
    let mut value = 0.0;
    let mut variance = 0.0;
    for (index, (coeff, string)) in h.terms().iter().enumerate() {
        if string.is_identity() {
            value += coeff;
            continue;
        }
        let mut rotated = state.clone();
        for (q, p) in string.factors().iter().enumerate() {
            if let Some(m) = measurement_rotation(*p) {
                rotated.apply_single(q, 0, m);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let counts = multinomial(&rotated.probabilities(), shots, &mut rng)?;
        let support = string.support_mask();
        let plus: u64 = counts
            .iter()
            .enumerate()
            .filter(|(b, _)| (b & support).count_ones() % 2 == 0)
            .map(|(_, n)| n)
            .sum();
        let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
        let term_se_sq = if shots > 1 {
            (1.0 - mean * mean).max(0.0) / (shots - 1) as f64
        } else {
            1.0
        };
        value += coeff * mean;
        variance += coeff * coeff * term_se_sq;
    }
    Ok(ShotEstimate {
        value,
        std_error: variance.sqrt(),
    })
}

/// Runs the circuit at `theta` from `|0…0⟩` and samples the energy.
pub fn sample_expectation(
    c: &Circuit,
    theta: &[f64],
    h: &PauliSum,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    let state = c.run(theta, &StateVector::basis(c.n_qubits(), 0)?)?;
    sample_state_expectation(&state, h, shots, seed)
}

/// Multinomial counts via sequential conditional binomials.
fn multinomial(probabilities: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let total: f64 = probabilities.iter().sum();
    let mut remaining_mass = total;
    let mut remaining = shots;
    let mut counts = vec![0; probabilities.len()];
    let last = probabilities.len() - 1;
    for (i, p) in probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining;
            break;
        }
        let conditional = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, conditional)
            .map_err(|e| Error::Domain(format!("binomial sampling: {e}")))?
            .sample(rng);
        counts[i] = draw;
        remaining -= draw;
        remaining_mass -= p;
    }
    Ok(counts)
}
