//! The variational loop: bind parameters, prepare the trial state, measure
//! the energy, and let the classical optimizer update the parameters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_ansatz, AnsatzSpec};
use crate::error::{Error, Result};
use crate::optimizer::{minimize, OptimizationTrace, OptimizerOptions};
use crate::oracle::eigensystem;
use crate::pauli::PauliSum;
use crate::statevector::{sample_state_expectation, Circuit, StateVector};

/// Relative slack allowed below the exact ground energy.
pub const VARIATIONAL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Measurement {
    /// Statevector inner product.
    #[default]
    Exact,
    /// Per-term sampling with the given shot count and seed.
    Shots { shots: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub ground_energy: f64,
    pub optimal_parameters: Vec<f64>,
    pub trace: OptimizationTrace,
    pub oracle_energy: f64,
    pub absolute_gap: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Weight of the optimized state in the exact ground eigenspace.
    pub ground_state_fidelity: f64,
}

/// Lowest energy reachable by any state, with slack for rounding.
pub fn variational_floor(oracle_energy: f64) -> f64 {
    oracle_energy - VARIATIONAL_SLACK * oracle_energy.abs().max(1.0)
}

/// Mixes the base seed with the parameter bits so that the sampled
/// objective is a deterministic function of θ.
fn evaluation_seed(seed: u64, theta: &[f64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    theta
        .iter()
        .fold(splitmix(seed), |acc, t| splitmix(acc ^ t.to_bits()))
}

fn energy(
    h: &PauliSum,
    circuit: &Circuit,
    start: &StateVector,
    theta: &[f64],
    measurement: Measurement,
) -> Result<f64> {
    let state = circuit.run(theta, start)?;
    match measurement {
        Measurement::Exact => h.expectation(&state),
        Measurement::Shots { shots, seed } => {
            Ok(sample_state_expectation(&state, h, shots, evaluation_seed(seed, theta))?.value)
        }
    }
}

/// Runs the variational loop from `|0…0⟩` and compares with exact
/// diagonalization.
///
/// With exact measurement every trace entry is checked against the
/// variational bound; a violation means a sign or convention bug and is
/// reported as [`Error::VariationalBound`].
pub fn vqe_minimize(
    h: &PauliSum,
    spec: &AnsatzSpec,
    opts: &OptimizerOptions,
    measurement: Measurement,
) -> Result<VqeResult> {
    if h.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits,
            found: h.n_qubits(),
        });
    }
    if let Measurement::Shots { shots: 0, .. } = measurement {
        return Err(Error::Domain("shot count must be at least 1".into()));
    }
    let circuit = build_ansatz(spec)?;
    let start = StateVector::basis(spec.n_qubits, 0)?;

    let exact = eigensystem(&h.to_dense_matrix()?)?;
    let oracle_energy = exact.ground_energy();

    let objective = |theta: &[f64]| {
        // the circuit, register and Hamiltonian were validated above
        energy(h, &circuit, &start, theta, measurement).unwrap_or(f64::NAN)
    };
    let found = minimize(objective, &spec.initial_angles, opts)?;

    if measurement == Measurement::Exact {
        let floor = variational_floor(oracle_energy);
        if let Some(bad) = found.trace.entries.iter().find(|e| e.best_objective < floor) {
            return Err(Error::VariationalBound {
                energy: bad.best_objective,
                ground: oracle_energy,
            });
        }
    }

    let state = circuit.run(&found.parameters, &start)?;
    let degeneracy_tol = 1e-8 * h.coefficient_norm().max(1.0);
    let ground_state_fidelity = exact
        .values
        .iter()
        .zip(&exact.vectors)
        .take_while(|(v, _)| *v - oracle_energy <= degeneracy_tol)
        .map(|(_, vec): (_, &Vec<Complex64>)| state.fidelity(vec))
        .sum();

    Ok(VqeResult {
        ground_energy: found.value,
        absolute_gap: (found.value - oracle_energy).abs(),
        optimal_parameters: found.parameters,
        trace: found.trace,
        oracle_energy,
        evaluations: found.evaluations,
        converged: found.converged,
        ground_state_fidelity,
    })
}
