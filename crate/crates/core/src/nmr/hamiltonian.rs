//! Spin Hamiltonians as Pauli sums.
//!
//! For spin ½, `I_z = Z/2` and `I(i)·I(j) = (XX + YY + ZZ)/4`, so
//! `-Σ νᵢ I_z(i) + Σ_{i<j} J_ij I(i)·I(j)` maps to `-(νᵢ/2) Zᵢ` terms plus
//! `(J_ij/4)(XᵢXⱼ + YᵢYⱼ + ZᵢZⱼ)` for every coupled pair.

use super::{SpinSystemParams, SystemKind};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Builds the Hamiltonian of `nus.len()` spins. `couplings` must be a
/// symmetric matrix with zero diagonal. Zero coefficients are omitted, so
/// terms appear as: Zeeman terms by spin, then XX, YY, ZZ for each pair
/// `i < j` in row order.
pub fn build_general_hamiltonian(nus: &[f64], couplings: &[Vec<f64>]) -> Result<PauliSum> {
    let n = nus.len();
    if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
        return Err(Error::Validation(format!(
            "coupling matrix must be {n}x{n}"
        )));
    }
    for i in 0..n {
        if couplings[i][i] != 0.0 {
            return Err(Error::Validation(format!(
                "self-coupling J[{i}][{i}] = {} must be zero",
                couplings[i][i]
            )));
        }
        for j in i + 1..n {
            let (a, b) = (couplings[i][j], couplings[j][i]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                return Err(Error::Validation(format!(
                    "couplings are not symmetric: J[{i}][{j}] = {a}, J[{j}][{i}] = {b}"
                )));
            }
        }
    }

    let mut h = PauliSum::new(n)?;
    for (i, &nu) in nus.iter().enumerate() {
        if nu != 0.0 {
            h.add_term(-nu / 2.0, PauliString::on_qubits(n, &[i], Pauli::Z)?)?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let coupling = couplings[i][j];
            if coupling == 0.0 {
                continue;
            }
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                h.add_term(coupling / 4.0, PauliString::on_qubits(n, &[i, j], p)?)?;
            }
        }
    }
    Ok(h)
}

/// Two coupled spins A (qubit 0) and B (qubit 1).
pub fn build_ab_hamiltonian(p: &SpinSystemParams) -> Result<PauliSum> {
    p.expect_kind(SystemKind::Ab)?;
    build_general_hamiltonian(
        &[p.nu_a, p.nu_b],
        &[vec![0.0, p.j_ab], vec![p.j_ab, 0.0]],
    )
}

/// Spin A (qubit 0) coupled equally to two B spins (qubits 1, 2); the B–B
/// coupling is zero.
pub fn build_ab2_hamiltonian(p: &SpinSystemParams) -> Result<PauliSum> {
    p.expect_kind(SystemKind::Ab2)?;
    let j = p.j_ab;
    build_general_hamiltonian(
        &[p.nu_a, p.nu_b, p.nu_b],
        &[vec![0.0, j, j], vec![j, 0.0, 0.0], vec![j, 0.0, 0.0]],
    )
}
