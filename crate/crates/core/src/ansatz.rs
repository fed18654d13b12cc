//! Hardware-efficient trial circuits built from Ry layers and CNOT chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Circuit, GateOp};

/// Gate arrangement of a trial circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// Two spins: Ry on both, CNOT(0→1), Ry on both. Four parameters.
    #[serde(rename = "ab_fig2", alias = "ab")]
    Ab,
    /// Three spins: Ry on all, CNOT(0→1), CNOT(1→2), Ry on all. Six parameters.
    #[serde(rename = "ab2_fig4", alias = "ab2")]
    Ab2,
    /// `layers` repetitions of [Ry on every qubit, CNOT chain].
    #[serde(rename = "layered")]
    Layered(usize),
}

impl Layout {
    pub fn parameter_count(self, n_qubits: usize) -> usize {
        match self {
            Layout::Ab => 4,
            Layout::Ab2 => 6,
            Layout::Layered(layers) => layers * n_qubits,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub layout: Layout,
    pub initial_angles: Vec<f64>,
}

impl AnsatzSpec {
    /// Spec with every initial angle set to 1 rad.
    pub fn new(n_qubits: usize, layout: Layout) -> Result<Self> {
        let mut spec = Self {
            n_qubits,
            layout,
            initial_angles: Vec::new(),
        };
        spec.initial_angles = default_initial_parameters(&spec);
        spec.validate()?;
        Ok(spec)
    }

    pub fn ab() -> Self {
        Self::new(2, Layout::Ab).expect("fixed two-qubit layout")
    }

    pub fn ab2() -> Self {
        Self::new(3, Layout::Ab2).expect("fixed three-qubit layout")
    }

    pub fn layered(n_qubits: usize, layers: usize) -> Result<Self> {
        Self::new(n_qubits, Layout::Layered(layers))
    }

    pub fn with_initial_angles(mut self, angles: Vec<f64>) -> Result<Self> {
        self.initial_angles = angles;
        self.validate()?;
        Ok(self)
    }

    pub fn parameter_count(&self) -> usize {
        self.layout.parameter_count(self.n_qubits)
    }

    pub fn validate(&self) -> Result<()> {
        let required_qubits = match self.layout {
            Layout::Ab => Some(2),
            Layout::Ab2 => Some(3),
            Layout::Layered(_) => None,
        };
        if let Some(q) = required_qubits {
            if self.n_qubits != q {
                return Err(Error::Validation(format!(
                    "{:?} layout needs {q} qubits, got {}",
                    self.layout, self.n_qubits
                )));
            }
        }
        if self.n_qubits == 0 {
            return Err(Error::Validation("ansatz needs at least one qubit".into()));
        }
        if self.layout == Layout::Layered(0) {
            return Err(Error::Validation("layered ansatz needs at least one layer".into()));
        }
        if self.initial_angles.len() != self.parameter_count() {
            return Err(Error::Validation(format!(
                "{} initial angles for {} parameters",
                self.initial_angles.len(),
                self.parameter_count()
            )));
        }
        Ok(())
    }
}

fn ry_layer(n_qubits: usize, first_slot: usize) -> impl Iterator<Item = GateOp> {
    (0..n_qubits).map(move |q| GateOp::ry(q, first_slot + q))
}

fn cnot_chain(n_qubits: usize) -> impl Iterator<Item = GateOp> {
    (1..n_qubits).map(|q| GateOp::cnot(q - 1, q))
}

pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n_qubits;
    let ops: Vec<GateOp> = match spec.layout {
        Layout::Ab | Layout::Ab2 => ry_layer(n, 0)
            .chain(cnot_chain(n))
            .chain(ry_layer(n, n))
            .collect(),
        Layout::Layered(layers) => (0..layers)
            .flat_map(|l| ry_layer(n, l * n).chain(cnot_chain(n)))
            .collect(),
    };
    Circuit::new(n, ops)
}

/// One radian per free parameter.
pub fn default_initial_parameters(spec: &AnsatzSpec) -> Vec<f64> {
    vec![1.0; spec.parameter_count()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{minimize, OptimizerOptions};
    use crate::statevector::StateVector;

    fn kinds(c: &Circuit) -> Vec<&'static str> {
        c.ops().iter().map(|op| op.kind()).collect()
    }

    #[test]
    fn two_spin_layout() {
        let c = build_ansatz(&AnsatzSpec::ab()).unwrap();
        assert_eq!(kinds(&c), ["RY", "RY", "CNOT", "RY", "RY"]);
        assert_eq!(c.free_parameter_count(), 4);
        assert_eq!(c.ops()[2], GateOp::cnot(0, 1));
    }

    #[test]
    fn three_spin_layout() {
        let c = build_ansatz(&AnsatzSpec::ab2()).unwrap();
        assert_eq!(c.count_kind("RY"), 6);
        assert_eq!(c.count_kind("CNOT"), 2);
        assert_eq!(c.free_parameter_count(), 6);
        assert_eq!(&c.ops()[3..5], &[GateOp::cnot(0, 1), GateOp::cnot(1, 2)]);
    }

    #[test]
    fn zero_angles_leave_ground_untouched() {
        let spec = AnsatzSpec::layered(2, 1).unwrap();
        let c = build_ansatz(&spec).unwrap();
        let s0 = StateVector::basis(2, 0).unwrap();
        assert_eq!(c.run(&[0.0, 0.0], &s0).unwrap(), s0);
    }

    #[test]
    fn default_angles() {
        assert_eq!(default_initial_parameters(&AnsatzSpec::ab()), vec![1.0; 4]);
        assert_eq!(default_initial_parameters(&AnsatzSpec::ab2()), vec![1.0; 6]);
        assert_eq!(default_initial_parameters(&AnsatzSpec::layered(3, 2).unwrap()), vec![1.0; 6]);
    }

    #[test]
    fn inconsistent_specs_rejected() {
        assert!(AnsatzSpec::new(3, Layout::Ab).is_err());
        assert!(AnsatzSpec::new(2, Layout::Ab2).is_err());
        assert!(AnsatzSpec::layered(2, 0).is_err());
        assert!(AnsatzSpec::ab().with_initial_angles(vec![1.0; 3]).is_err());
    }

    #[test]
    fn deterministic_construction() {
        let spec = AnsatzSpec::layered(3, 4).unwrap();
        assert_eq!(build_ansatz(&spec).unwrap(), build_ansatz(&spec).unwrap());
    }

    #[test]
    fn layout_json_names() {
        assert_eq!(serde_json::to_string(&Layout::Ab).unwrap(), "\"ab_fig2\"");
        assert_eq!(serde_json::to_string(&Layout::Layered(3)).unwrap(), "{\"layered\":3}");
        assert_eq!(serde_json::from_str::<Layout>("\"ab2_fig4\"").unwrap(), Layout::Ab2);
    }

    #[test]
    fn two_spin_ansatz_reaches_mixed_eigenstates() {
        // cosθ|01⟩ ± sinθ|10⟩ and the product states must all be reachable.
        let c = build_ansatz(&AnsatzSpec::ab()).unwrap();
        let s0 = StateVector::basis(2, 0).unwrap();
        let theta_mix = 0.5 * (1.64_f64).atan2(33.017);
        let (cs, sn) = (theta_mix.cos(), theta_mix.sin());
        let targets: [[f64; 4]; 6] = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, cs, sn, 0.0],
            [0.0, cs, -sn, 0.0],
            [0.0, -sn, cs, 0.0],
            [0.0, sn, cs, 0.0],
        ];
        for target in targets {
            let amps: Vec<_> = target.iter().map(|&x| num_complex::Complex64::new(x, 0.0)).collect();
            let infidelity = |theta: &[f64]| 1.0 - c.run(theta, &s0).unwrap().fidelity(&amps);
            let best = [[0.3, 0.7, -0.2, 0.4], [1.0, 1.0, 1.0, 1.0], [2.0, -1.0, 0.5, 1.5]]
                .iter()
                .map(|start| {
                    let opts = OptimizerOptions { tolerance: 1e-14, ..OptimizerOptions::default() };
                    minimize(infidelity, start, &opts).unwrap().value
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-8, "target {target:?}: infidelity {best}");
        }
    }
}
