//! Closed-form eigenvalues and eigenvectors of the AB and AB2 Hamiltonians.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use super::{build_ab2_hamiltonian, SpinSystemParams, SystemKind};
use crate::error::Result;
use crate::oracle::HermitianMatrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenpair {
    pub label: String,
    pub energy: f64,
    /// Real amplitudes in the computational basis, qubit 0 most significant.
    pub state: Vec<f64>,
}

/// Energy levels sorted from lowest to highest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticSpectrum {
    pub levels: Vec<Eigenpair>,
}

impl AnalyticSpectrum {
    fn sorted(mut levels: Vec<Eigenpair>) -> Self {
        levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Self { levels }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn ground(&self) -> &Eigenpair {
        &self.levels[0]
    }
}

fn level(label: &str, energy: f64, amplitudes: &[(usize, f64)], dim: usize) -> Eigenpair {
    let mut state = vec![0.0; dim];
    for &(index, amp) in amplitudes {
        state[index] += amp;
    }
    Eigenpair {
        label: label.to_string(),
        energy,
        state,
    }
}

/// Levels of `mean + [[-d, b], [b, d]]` in the basis `(u, v)`:
/// the lower one is `cos θ·u − sin θ·v`, the upper `sin θ·u + cos θ·v`,
/// with `θ = ½·atan2(b, d)`.
fn mixed_pair(
    labels: [&str; 2],
    mean: f64,
    d: f64,
    b: f64,
    u: &[(usize, f64)],
    v: &[(usize, f64)],
    dim: usize,
) -> [Eigenpair; 2] {
    let theta = if d == 0.0 && b == 0.0 { 0.0 } else { 0.5 * b.atan2(d) };
    let (c, s) = (theta.cos(), theta.sin());
    let half_split = d.hypot(b);
    let combine = |a: f64, bb: f64| -> Vec<(usize, f64)> {
        u.iter()
            .map(|&(i, x)| (i, a * x))
            .chain(v.iter().map(|&(i, x)| (i, bb * x)))
            .collect()
    };
    [
        level(labels[0], mean - half_split, &combine(c, -s), dim),
        level(labels[1], mean + half_split, &combine(s, c), dim),
    ]
}

/// The four AB levels: `|00⟩` and `|11⟩` at `∓(ν_A + ν_B)/2 + J/4`, and the
/// mixed pair at `−J/4 ∓ C`.
pub fn ab_analytic_spectrum(p: &SpinSystemParams) -> Result<AnalyticSpectrum> {
    p.expect_kind(SystemKind::Ab)?;
    let (a, b, j) = (p.nu_a, p.nu_b, p.j_ab);
    let sum = (a + b) / 2.0;
    let [lower, upper] = mixed_pair(
        ["mixed-", "mixed+"],
        -j / 4.0,
        (a - b) / 2.0,
        j / 2.0,
        &[(0b01, 1.0)],
        &[(0b10, 1.0)],
        4,
    );
    Ok(AnalyticSpectrum::sorted(vec![
        level("|00>", -sum + j / 4.0, &[(0b00, 1.0)], 4),
        lower,
        upper,
        level("|11>", sum + j / 4.0, &[(0b11, 1.0)], 4),
    ]))
}

const R: f64 = FRAC_1_SQRT_2;

/// The eight AB2 levels. Total `m = ±3/2` states are unmixed, the two states
/// antisymmetric under B-spin exchange decouple at `∓ν_A/2`, and each
/// `m = ±½` sector mixes one symmetric B state with one A-flipped state.
pub fn ab2_analytic_spectrum(p: &SpinSystemParams) -> Result<AnalyticSpectrum> {
    p.expect_kind(SystemKind::Ab2)?;
    let (a, b, j) = (p.nu_a, p.nu_b, p.j_ab);
    let coupling = j * R; // J/√2
    let plus = mixed_pair(
        ["m=+1/2 lower", "m=+1/2 upper"],
        0.5 * (-b - j / 2.0),
        (a - b - j / 2.0) / 2.0,
        coupling,
        &[(0b001, R), (0b010, R)],
        &[(0b100, 1.0)],
        8,
    );
    let minus = mixed_pair(
        ["m=-1/2 lower", "m=-1/2 upper"],
        0.5 * (b - j / 2.0),
        (a - b + j / 2.0) / 2.0,
        coupling,
        &[(0b011, 1.0)],
        &[(0b101, R), (0b110, R)],
        8,
    );
    let mut levels = vec![
        level("|000>", -a / 2.0 - b + j / 2.0, &[(0b000, 1.0)], 8),
        level("|111>", a / 2.0 + b + j / 2.0, &[(0b111, 1.0)], 8),
        level("antisymmetric m=+1/2", -a / 2.0, &[(0b001, R), (0b010, -R)], 8),
        level("antisymmetric m=-1/2", a / 2.0, &[(0b101, R), (0b110, -R)], 8),
    ];
    levels.extend(plus);
    levels.extend(minus);
    Ok(AnalyticSpectrum::sorted(levels))
}

/// Rows of the AB2 basis adapted to B-spin exchange, grouped by total m:
/// `|000⟩`, `(|001⟩−|010⟩)/√2`, `(|001⟩+|010⟩)/√2`, `|100⟩`, `|011⟩`,
/// `(|101⟩+|110⟩)/√2`, `(|101⟩−|110⟩)/√2`, `|111⟩`.
pub fn ab2_symmetrized_basis() -> Vec<Vec<f64>> {
    let row = |amps: &[(usize, f64)]| {
        let mut r = vec![0.0; 8];
        for &(i, x) in amps {
            r[i] = x;
        }
        r
    };
    vec![
        row(&[(0b000, 1.0)]),
        row(&[(0b001, R), (0b010, -R)]),
        row(&[(0b001, R), (0b010, R)]),
        row(&[(0b100, 1.0)]),
        row(&[(0b011, 1.0)]),
        row(&[(0b101, R), (0b110, R)]),
        row(&[(0b101, R), (0b110, -R)]),
        row(&[(0b111, 1.0)]),
    ]
}

/// The AB2 Hamiltonian in [`ab2_symmetrized_basis`]; block diagonal with
/// blocks of size 1, 1, 2, 2, 1, 1.
pub fn ab2_symmetrized_matrix(p: &SpinSystemParams) -> Result<HermitianMatrix> {
    let dense = build_ab2_hamiltonian(p)?.to_dense_matrix()?;
    let rows: Vec<Vec<Complex64>> = ab2_symmetrized_basis()
        .into_iter()
        .map(|r| r.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        .collect();
    dense.change_basis(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::build_ab_hamiltonian;
    use crate::oracle::eigensystem;
    use proptest::prelude::*;

    fn as_complex(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    /// ‖Hv − Ev‖ for every level, plus orthonormality of the level set.
    fn check_eigenpairs(h: &HermitianMatrix, spectrum: &AnalyticSpectrum, tol: f64) {
        for l in &spectrum.levels {
            let v = as_complex(&l.state);
            let hv = h.apply(&v);
            let residual: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * l.energy).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual < tol, "{}: residual {residual}", l.label);
        }
        for (i, a) in spectrum.levels.iter().enumerate() {
            for (k, b) in spectrum.levels.iter().enumerate() {
                let dot: f64 = a.state.iter().zip(&b.state).map(|(x, y)| x * y).sum();
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "<{}|{}> = {dot}", a.label, b.label);
            }
        }
    }

    fn oracle_values(h: &HermitianMatrix) -> Vec<f64> {
        eigensystem(h).unwrap().values
    }

    #[test]
    fn two_spin_levels() {
        let p = SpinSystemParams::ab(2094.007, 2060.99, 1.64);
        let s = ab_analytic_spectrum(&p).unwrap();
        let e = s.energies();
        let expected = [-2077.0885, -16.93885, 16.11885, 2077.9085];
        for (got, want) in e.iter().zip(expected) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
        let h = build_ab_hamiltonian(&p).unwrap().to_dense_matrix().unwrap();
        check_eigenpairs(&h, &s, 1e-9);
        assert_eq!(s.ground().label, "|00>");
    }

    #[test]
    fn two_spin_mixing_state_signs() {
        let p = SpinSystemParams::ab(13.0, 10.0, 3.0);
        let s = ab_analytic_spectrum(&p).unwrap();
        let lower = s.levels.iter().find(|l| l.label == "mixed-").unwrap();
        let (c, sn) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
        assert!((lower.state[1] - c).abs() < 1e-15 && (lower.state[2] + sn).abs() < 1e-15);
    }

    #[test]
    fn three_spin_levels() {
        let p = SpinSystemParams::ab2(1492.6, 1481.84, 8.2);
        let s = ab2_analytic_spectrum(&p).unwrap();
        assert!((s.ground().energy - -2224.04).abs() < 1e-9);
        let h = build_ab2_hamiltonian(&p).unwrap().to_dense_matrix().unwrap();
        check_eigenpairs(&h, &s, 1e-9);
        let oracle = oracle_values(&h);
        for (a, o) in s.energies().iter().zip(&oracle) {
            assert!((a - o).abs() < 1e-9 * 2224.04);
        }
    }

    #[test]
    fn antisymmetric_levels_ignore_coupling() {
        for j in [0.0, 3.0, 50.0] {
            let s = ab2_analytic_spectrum(&SpinSystemParams::ab2(200.0, 150.0, j)).unwrap();
            let e: Vec<f64> = s
                .levels
                .iter()
                .filter(|l| l.label.starts_with("antisymmetric"))
                .map(|l| l.energy)
                .collect();
            assert_eq!(e, vec![-100.0, 100.0]);
        }
    }

    #[test]
    fn symmetrized_matrix_blocks() {
        let (a, b, j) = (1492.6, 1481.84, 8.2);
        let m = ab2_symmetrized_matrix(&SpinSystemParams::ab2(a, b, j)).unwrap();
        let sector = [0, 1, 1, 1, 2, 2, 2, 3];
        for r in 0..8 {
            for c in 0..8 {
                let z = m.get(r, c);
                assert!(z.im.abs() < 1e-12);
                let coupled = sector[r] == sector[c] && !(r == 1 || c == 1 || r == 6 || c == 6) || r == c;
                if !coupled {
                    assert!(z.re.abs() < 1e-9, "({r},{c}) = {}", z.re);
                }
            }
        }
        let tol = 1e-9;
        assert!((m.get(0, 0).re - (-a / 2.0 - b + j / 2.0)).abs() < tol);
        assert!((m.get(1, 1).re - (-a / 2.0)).abs() < tol);
        assert!((m.get(2, 2).re - (-a / 2.0)).abs() < tol);
        assert!((m.get(3, 3).re - (a / 2.0 - b - j / 2.0)).abs() < tol);
        assert!((m.get(2, 3).re - j * R).abs() < tol);
        assert!((m.get(4, 4).re - (-a / 2.0 + b - j / 2.0)).abs() < tol);
        assert!((m.get(5, 5).re - a / 2.0).abs() < tol);
        assert!((m.get(4, 5).re - j * R).abs() < tol);
        assert!((m.get(6, 6).re - a / 2.0).abs() < tol);
        assert!((m.get(7, 7).re - (a / 2.0 + b + j / 2.0)).abs() < tol);
    }

    #[test]
    fn symmetrized_basis_is_orthonormal() {
        let rows = ab2_symmetrized_basis();
        for (i, u) in rows.iter().enumerate() {
            for (k, v) in rows.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!((dot - if i == k { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(ab_analytic_spectrum(&SpinSystemParams::ab2(1.0, 2.0, 3.0)).is_err());
        assert!(ab2_analytic_spectrum(&SpinSystemParams::ab(1.0, 2.0, 3.0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn two_spin_closed_form_matches_oracle(
            a in -3000.0..3000.0f64, b in -3000.0..3000.0f64, j in -50.0..50.0f64
        ) {
            let p = SpinSystemParams::ab(a, b, j);
            let s = ab_analytic_spectrum(&p).unwrap();
            let h = build_ab_hamiltonian(&p).unwrap().to_dense_matrix().unwrap();
            let scale = a.abs().max(b.abs()).max(j.abs()).max(1.0);
            check_eigenpairs(&h, &s, 1e-9 * scale);
            for (x, y) in s.energies().iter().zip(oracle_values(&h)) {
                prop_assert!((x - y).abs() <= 1e-8 * scale);
            }
        }

        #[test]
        fn three_spin_closed_form_matches_oracle(
            a in -3000.0..3000.0f64, b in -3000.0..3000.0f64, j in -50.0..50.0f64
        ) {
            let p = SpinSystemParams::ab2(a, b, j);
            let s = ab2_analytic_spectrum(&p).unwrap();
            let h = build_ab2_hamiltonian(&p).unwrap().to_dense_matrix().unwrap();
            let scale = a.abs().max(b.abs()).max(j.abs()).max(1.0);
            check_eigenpairs(&h, &s, 1e-9 * scale);
            for (x, y) in s.energies().iter().zip(oracle_values(&h)) {
                prop_assert!((x - y).abs() <= 1e-8 * scale);
            }
        }
    }
}
