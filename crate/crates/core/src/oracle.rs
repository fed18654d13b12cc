//! Exact diagonalization of small Hermitian matrices.
//!
//! A complex Hermitian `H = A + iB` is embedded into the real symmetric
//! matrix `[[A, -B], [B, A]]` of twice the dimension, diagonalized by cyclic
//! Jacobi rotations, and the doubled spectrum is collapsed back. Each
//! eigenvalue of `H` appears twice in the embedding; the two real
//! eigenvectors `(x, y)` and `(-y, x)` both map to the complex eigenvector
//! `x + iy` up to a phase.
//!
//! The solver has no numerical-library dependency so it can serve as an
//! independent reference for the variational results.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Largest accepted matrix dimension.
pub const MAX_DIMENSION: usize = 4096;

/// Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// matrix norm.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Dense complex matrix that is Hermitian by construction (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates `M = M†` entrywise to 1e-12, scaled by the largest entry when
    /// that exceeds one.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Validation(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let tol = HERMITIAN_TOLERANCE * scale;
        for row in 0..dim {
            for col in row..dim {
                let upper = entries[row * dim + col];
                let lower = entries[col * dim + row];
                if (upper - lower.conj()).norm() > tol {
                    return Err(Error::NotHermitian { row, col });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|row| {
                self.entries[row * self.dim..(row + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(m, x)| m * x)
                    .sum()
            })
            .collect()
    }

    /// `v† M v`, real for Hermitian `M`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(mv, x)| x.conj() * mv)
            .sum::<Complex64>()
            .re
    }

    /// Expresses the matrix in a new basis: entry `(i, j)` of the result is
    /// `⟨u_i|M|u_j⟩`, where `u_i` are the given rows.
    pub fn change_basis(&self, rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Validation(format!(
                "basis must hold {0} vectors of length {0}",
                self.dim
            )));
        }
        let images: Vec<Vec<Complex64>> = rows.iter().map(|u| self.apply(u)).collect();
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for ui in rows {
            for mu in &images {
                entries.push(ui.iter().zip(mu).map(|(a, b)| a.conj() * b).sum());
            }
        }
        Self::new(self.dim, entries)
    }
}

/// Result of a real symmetric Jacobi diagonalization.
#[derive(Debug, Clone)]
pub struct JacobiOutcome {
    /// Eigenvalues in the order of the columns of `vectors` (unsorted).
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector for `values[k]`.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm before the first sweep and after each sweep.
    pub off_norms: Vec<f64>,
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix (row-major).
pub fn symmetric_jacobi(mut a: Vec<f64>, n: usize) -> Result<JacobiOutcome> {
    assert_eq!(a.len(), n * n);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_THRESHOLD * norm;
    let mut off = off_diagonal_norm(&a, n);
    let mut off_norms = vec![off];
    let mut sweeps = 0;

    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a, n);
        off_norms.push(off);
    }

    Ok(JacobiOutcome {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: v,
        sweeps,
        off_norms,
    })
}

/// Eigenvalues in ascending order with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
    pub sweeps: usize,
}

impl Eigensystem {
    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigensystem(m: &HermitianMatrix) -> Result<Eigensystem> {
    let n = m.dim();
    if n > MAX_DIMENSION {
        return Err(Error::Domain(format!(
            "matrix dimension {n} exceeds {MAX_DIMENSION}"
        )));
    }
    if n == 0 {
        return Ok(Eigensystem {
            values: vec![],
            vectors: vec![],
            sweeps: 0,
        });
    }

    let big = 2 * n;
    let mut embedded = vec![0.0; big * big];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            embedded[i * big + j] = z.re;
            embedded[(i + n) * big + (j + n)] = z.re;
            embedded[i * big + (j + n)] = -z.im;
            embedded[(i + n) * big + j] = z.im;
        }
    }
    let jacobi = symmetric_jacobi(embedded, big)?;

    let mut order: Vec<usize> = (0..big).collect();
    order.sort_by(|&a, &b| jacobi.values[a].total_cmp(&jacobi.values[b]));

    let to_complex = |col: usize| -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                Complex64::new(
                    jacobi.vectors[i * big + col],
                    jacobi.vectors[(i + n) * big + col],
                )
            })
            .collect()
    };

    // Degenerate eigenvalues of the embedding form clusters of 2k real
    // vectors spanning a k-dimensional complex eigenspace. Pivoted
    // Gram-Schmidt picks k orthonormal complex vectors from each cluster.
    let cluster_tol = 1e-10 * m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < big {
        let mut end = start + 1;
        while end < big
            && jacobi.values[order[end]] - jacobi.values[order[end - 1]] <= cluster_tol
        {
            end += 1;
        }
        let cluster = &order[start..end];
        if !cluster.len().is_multiple_of(2) {
            return Err(Error::NoConvergence {
                sweeps: jacobi.sweeps,
            });
        }
        let mut candidates: Vec<Vec<Complex64>> = cluster.iter().map(|&c| to_complex(c)).collect();
        let first_new = vectors.len();
        for pick in 0..cluster.len() / 2 {
            for cand in candidates.iter_mut() {
                for accepted in &vectors[first_new..] {
                    let overlap: Complex64 =
                        accepted.iter().zip(cand.iter()).map(|(a, c)| a.conj() * c).sum();
                    for (c, a) in cand.iter_mut().zip(accepted) {
                        *c -= overlap * a;
                    }
                }
            }
            let (best, _) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, vector_norm(c)))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let mut chosen = candidates.swap_remove(best);
            let norm = vector_norm(&chosen);
            chosen.iter_mut().for_each(|z| *z /= norm);
            fix_phase(&mut chosen);
            values.push(jacobi.values[cluster[2 * pick]]);
            vectors.push(chosen);
        }
        start = end;
    }

    Ok(Eigensystem {
        values,
        vectors,
        sweeps: jacobi.sweeps,
    })
}

fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotates the global phase so the largest-magnitude component is real and
/// positive.
fn fix_phase(v: &mut [Complex64]) {
    let mut pivot = Complex64::new(0.0, 0.0);
    for z in v.iter() {
        if z.norm() > pivot.norm() * (1.0 + 1e-12) {
            pivot = *z;
        }
    }
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Minimum eigenvalue of the Hamiltonian's dense matrix.
pub fn ground_energy(h: &PauliSum) -> Result<f64> {
    Ok(ground_state(h)?.0)
}

/// Minimum eigenvalue and its eigenvector.
pub fn ground_state(h: &PauliSum) -> Result<(f64, Vec<Complex64>)> {
    let eig = eigensystem(&h.to_dense_matrix()?)?;
    let vector = eig.vectors.into_iter().next().unwrap_or_default();
    Ok((eig.values[0], vector))
}
