//! Hamiltonians as real-weighted sums of Pauli strings.
//!
//! A string acts on a statevector through bit masks: X and Y flip bits, Z
//! and Y contribute a sign on set bits, and every Y adds a factor of `i`.
//! The dense expansion builds tensor products of the 2x2 factor matrices
//! instead, so the two paths check each other.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::HermitianMatrix;
use crate::statevector::StateVector;

/// Largest register expanded to a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// 2x2 matrix in the computational basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Validation(format!("unknown Pauli factor '{other}'"))),
        }
    }
}

/// Tensor product of single-qubit Paulis; factor 0 acts on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
    flip_mask: usize,
    sign_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Validation("a Pauli string needs at least one factor".into()));
        }
        let n = factors.len();
        let mut flip_mask = 0;
        let mut sign_mask = 0;
        let mut y_count = 0;
        for (q, p) in factors.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip_mask |= bit,
                Pauli::Y => {
                    flip_mask |= bit;
                    sign_mask |= bit;
                    y_count += 1;
                }
                Pauli::Z => sign_mask |= bit,
            }
        }
        Ok(Self {
            factors,
            flip_mask,
            sign_mask,
            y_count,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// `p` on the listed qubits, identity elsewhere.
    pub fn on_qubits(n_qubits: usize, qubits: &[usize], p: Pauli) -> Result<Self> {
        let mut factors = vec![Pauli::I; n_qubits];
        for &q in qubits {
            if q >= n_qubits {
                return Err(Error::Validation(format!("qubit {q} out of range for {n_qubits} qubits")));
            }
            factors[q] = p;
        }
        Self::new(factors)
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    /// Bits flipped by the string (X and Y factors).
    pub fn flip_mask(&self) -> usize {
        self.flip_mask
    }

    /// Bits whose eigenvalue enters after a basis change to Z (non-identity factors).
    pub fn support_mask(&self) -> usize {
        self.flip_mask | self.sign_mask
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// Phase acquired by basis state `b`: `P|b⟩ = phase(b) |b ⊕ flip⟩`.
    fn phase(&self, b: usize) -> Complex64 {
        let base = match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (b & self.sign_mask).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    fn check_register(&self, s: &StateVector) -> Result<()> {
        if s.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: s.n_qubits(),
            });
        }
        Ok(())
    }

    /// `⟨s|P|s⟩` without normalization checks.
    fn braket(&self, amps: &[Complex64]) -> Complex64 {
        amps.iter()
            .enumerate()
            .map(|(b, a)| amps[b ^ self.flip_mask].conj() * self.phase(b) * a)
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

/// Returns `P|s⟩`.
pub fn apply_pauli_string(p: &PauliString, s: &StateVector) -> Result<StateVector> {
    p.check_register(s)?;
    let amps = s.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (b, a) in amps.iter().enumerate() {
        out[b ^ p.flip_mask] = p.phase(b) * a;
    }
    StateVector::from_amplitudes(out)
}

/// Real-weighted sum of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Validation("a Hamiltonian needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            terms: Vec::new(),
        })
    }

    pub fn add_term(&mut self, coeff: f64, string: PauliString) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: string.n_qubits(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::Validation(format!("coefficient {coeff} is not finite")));
        }
        self.terms.push((coeff, string));
        Ok(())
    }

    pub fn with_term(mut self, coeff: f64, string: &str) -> Result<Self> {
        self.add_term(coeff, string.parse()?)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// `Σ cᵢ ⟨s|Pᵢ|s⟩` for a normalized state.
    pub fn expectation(&self, s: &StateVector) -> Result<f64> {
        Ok(self.expectation_complex(s)?.re)
    }

    pub(crate) fn expectation_complex(&self, s: &StateVector) -> Result<Complex64> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: s.n_qubits(),
            });
        }
        let norm_sq = s.norm_sqr();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(self
            .terms
            .iter()
            .map(|(c, p)| p.braket(s.amplitudes()) * *c)
            .sum())
    }

    /// Dense `2ⁿ x 2ⁿ` matrix built from tensor products of factor matrices.
    pub fn to_dense_matrix(&self) -> Result<HermitianMatrix> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                n_qubits: self.n_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut total = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (coeff, string) in &self.terms {
            let product = string
                .factors()
                .iter()
                .fold(vec![Complex64::new(1.0, 0.0)], |acc, p| kron(&acc, &p.matrix()));
            for (t, x) in total.iter_mut().zip(&product) {
                *t += x * coeff;
            }
        }
        HermitianMatrix::new(dim, total)
    }

    pub fn to_file(&self) -> HamiltonianFile {
        HamiltonianFile {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(coeff, p)| TermRecord {
                    coeff: *coeff,
                    paulis: p.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &HamiltonianFile) -> Result<Self> {
        let mut sum = Self::new(file.n_qubits)?;
        for term in &file.terms {
            sum.add_term(term.coeff, term.paulis.parse()?)?;
        }
        Ok(sum)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// Kronecker product of a square row-major matrix with a 2x2 factor.
fn kron(acc: &[Complex64], factor: &[[Complex64; 2]; 2]) -> Vec<Complex64> {
    let d = (acc.len() as f64).sqrt().round() as usize;
    let out_dim = 2 * d;
    let mut out = vec![Complex64::new(0.0, 0.0); out_dim * out_dim];
    for i in 0..d {
        for j in 0..d {
            let a = acc[i * d + j];
            for (r, row) in factor.iter().enumerate() {
                for (c, f) in row.iter().enumerate() {
                    out[(2 * i + r) * out_dim + 2 * j + c] = a * f;
                }
            }
        }
    }
    out
}

/// On-disk Hamiltonian: `{"n_qubits": 2, "terms": [{"coeff": -1.0, "paulis": "ZI"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub n_qubits: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: f64,
    pub paulis: String,
}

/// Free-function form of [`PauliSum::expectation`].
pub fn expectation(h: &PauliSum, s: &StateVector) -> Result<f64> {
    h.expectation(s)
}
