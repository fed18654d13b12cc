//! NMR spin-system analysis for AB and AB2 systems.
//!
//! Convention: `|0⟩ = |α⟩` with `I_z = +½`, so a Larmor term `-ν I_z`
//! becomes `-(ν/2) Z`. Qubit 0 is nucleus A.

mod extraction;
mod hamiltonian;
mod spectrum;

pub use extraction::{
    ab_forward_lines, ab_mixing_angle, extract_ab2_params, extract_ab_params,
    DEFAULT_CONSISTENCY_TOLERANCE,
};
pub use hamiltonian::{build_ab2_hamiltonian, build_ab_hamiltonian, build_general_hamiltonian};
pub use spectrum::{
    ab2_analytic_spectrum, ab2_symmetrized_basis, ab2_symmetrized_matrix, ab_analytic_spectrum,
    AnalyticSpectrum, Eigenpair,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "AB", alias = "ab")]
    Ab,
    #[serde(rename = "AB2", alias = "ab2")]
    Ab2,
}

impl SystemKind {
    /// Lines consumed by parameter extraction.
    pub fn line_count(self) -> usize {
        match self {
            SystemKind::Ab => 4,
            SystemKind::Ab2 => 8,
        }
    }

    pub fn n_spins(self) -> usize {
        match self {
            SystemKind::Ab => 2,
            SystemKind::Ab2 => 3,
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AB" => Ok(SystemKind::Ab),
            "AB2" => Ok(SystemKind::Ab2),
            other => Err(Error::Validation(format!("unknown spin system {other}"))),
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SystemKind::Ab => "AB",
            SystemKind::Ab2 => "AB2",
        })
    }
}

/// Measured line positions, highest frequency first.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumLines {
    kind: SystemKind,
    frequencies: Vec<f64>,
}

impl SpectrumLines {
    /// Lines must be finite, match the system's count, and never increase.
    /// Coincident lines are allowed (they occur at zero coupling).
    pub fn new(kind: SystemKind, frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.len() != kind.line_count() {
            return Err(Error::Validation(format!(
                "{kind} needs {} lines, got {}",
                kind.line_count(),
                frequencies.len()
            )));
        }
        if let Some(bad) = frequencies.iter().find(|f| !f.is_finite()) {
            return Err(Error::Validation(format!("line position {bad} is not finite")));
        }
        if let Some(i) = frequencies.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Ordering(format!(
                "lines must be listed in descending order, but f{} = {} < f{} = {}",
                i + 1,
                frequencies[i],
                i + 2,
                frequencies[i + 1]
            )));
        }
        Ok(Self { kind, frequencies })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `f_k`, counted from 1.
    fn f(&self, k: usize) -> f64 {
        self.frequencies[k - 1]
    }
}

/// Larmor frequencies and coupling of an AB or AB2 system, with the derived
/// quantities that parametrize its eigenstates. All values in Hz or rad.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystemParams {
    pub kind: SystemKind,
    pub nu_a: f64,
    pub nu_b: f64,
    pub j_ab: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_mix: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_minus: Option<f64>,
}

impl SpinSystemParams {
    /// AB parameters with `C = ½√(J² + (ν_A − ν_B)²)` and the mixing angle
    /// (absent when ν_A = ν_B and J = 0).
    pub fn ab(nu_a: f64, nu_b: f64, j_ab: f64) -> Self {
        let c_value = 0.5 * j_ab.hypot(nu_a - nu_b);
        let theta_mix = (nu_a != nu_b || j_ab != 0.0).then(|| 0.5 * j_ab.atan2(nu_a - nu_b));
        Self {
            kind: SystemKind::Ab,
            nu_a,
            nu_b,
            j_ab,
            c_value: Some(c_value),
            theta_mix,
            c_plus: None,
            c_minus: None,
            theta_plus: None,
            theta_minus: None,
        }
    }

    /// AB2 parameters with
    /// `C± = ½√((ν_A − ν_B ∓ J/2)² + 2J²)` and `tan 2θ± = √2 J / (ν_A − ν_B ∓ J/2)`.
    pub fn ab2(nu_a: f64, nu_b: f64, j_ab: f64) -> Self {
        let sqrt2_j = std::f64::consts::SQRT_2 * j_ab;
        let d_plus = nu_a - nu_b - j_ab / 2.0;
        let d_minus = nu_a - nu_b + j_ab / 2.0;
        Self {
            kind: SystemKind::Ab2,
            nu_a,
            nu_b,
            j_ab,
            c_value: None,
            theta_mix: None,
            c_plus: Some(0.5 * d_plus.hypot(sqrt2_j)),
            c_minus: Some(0.5 * d_minus.hypot(sqrt2_j)),
            theta_plus: Some(0.5 * sqrt2_j.atan2(d_plus)),
            theta_minus: Some(0.5 * sqrt2_j.atan2(d_minus)),
        }
    }

    pub fn new(kind: SystemKind, nu_a: f64, nu_b: f64, j_ab: f64) -> Self {
        match kind {
            SystemKind::Ab => Self::ab(nu_a, nu_b, j_ab),
            SystemKind::Ab2 => Self::ab2(nu_a, nu_b, j_ab),
        }
    }

    fn expect_kind(&self, kind: SystemKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Validation(format!(
                "expected {kind} parameters, got {}",
                self.kind
            )));
        }
        if ![self.nu_a, self.nu_b, self.j_ab].iter().all(|x| x.is_finite()) {
            return Err(Error::Validation("spin parameters must be finite".into()));
        }
        Ok(())
    }
}
