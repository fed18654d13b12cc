//! Spin parameters from measured line positions, and the inverse map for AB.

use super::{SpectrumLines, SpinSystemParams, SystemKind};
use crate::error::{Error, Result};

/// Allowed disagreement between the two spacing estimates of J (and of 2C), Hz.
pub const DEFAULT_CONSISTENCY_TOLERANCE: f64 = 0.02;

fn expect_kind(lines: &SpectrumLines, kind: SystemKind) -> Result<()> {
    if lines.kind() != kind {
        return Err(Error::Validation(format!(
            "expected {kind} lines, got {}",
            lines.kind()
        )));
    }
    Ok(())
}

/// AB parameters from four lines `f₁ ≥ f₂ ≥ f₃ ≥ f₄`.
///
/// J averages `f₁ − f₂` and `f₃ − f₄`; C averages `(f₁ − f₃)/2` and
/// `(f₂ − f₄)/2`. Then `ν_A + ν_B = f₁ + f₄` and
/// `ν_A − ν_B = √(4C² − J²)`, with `ν_A ≥ ν_B`.
pub fn extract_ab_params(lines: &SpectrumLines, tolerance: f64) -> Result<SpinSystemParams> {
    expect_kind(lines, SystemKind::Ab)?;
    let f = |k| lines.f(k);

    let (j_upper, j_lower) = (f(1) - f(2), f(3) - f(4));
    if (j_upper - j_lower).abs() > tolerance {
        return Err(Error::SpacingMismatch {
            what: "J",
            first: j_upper,
            second: j_lower,
            tolerance,
        });
    }
    let (c_outer, c_inner) = ((f(1) - f(3)) / 2.0, (f(2) - f(4)) / 2.0);
    if (c_outer - c_inner).abs() > tolerance {
        return Err(Error::SpacingMismatch {
            what: "C",
            first: c_outer,
            second: c_inner,
            tolerance,
        });
    }
    let j = (j_upper + j_lower) / 2.0;
    let c = (c_outer + c_inner) / 2.0;

    // 4C² − J² = (2C − J)(2C + J); factored to avoid cancellation.
    let discriminant = (2.0 * c - j) * (2.0 * c + j);
    if discriminant < 0.0 {
        return Err(Error::InconsistentSpectrum(format!(
            "4C² − J² = {discriminant} is negative (C = {c} Hz, J = {j} Hz)"
        )));
    }
    let difference = discriminant.sqrt();
    let sum = f(1) + f(4);
    Ok(SpinSystemParams::ab(
        (sum + difference) / 2.0,
        (sum - difference) / 2.0,
        j,
    ))
}

/// `θ = ½·atan2(J, ν_A − ν_B)`, so `tan 2θ = J / (ν_A − ν_B)`.
pub fn ab_mixing_angle(p: &SpinSystemParams) -> Result<f64> {
    p.expect_kind(SystemKind::Ab)?;
    if p.nu_a == p.nu_b && p.j_ab == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(0.5 * p.j_ab.atan2(p.nu_a - p.nu_b))
}

/// The four AB line positions: `½(ν_A + ν_B) ± C ± J/2`, highest first.
pub fn ab_forward_lines(p: &SpinSystemParams) -> Result<SpectrumLines> {
    p.expect_kind(SystemKind::Ab)?;
    let j = p.j_ab.abs();
    let c = 0.5 * j.hypot(p.nu_a - p.nu_b);
    let mid = (p.nu_a + p.nu_b) / 2.0;
    SpectrumLines::new(
        SystemKind::Ab,
        vec![
            mid + c + j / 2.0,
            mid + c - j / 2.0,
            mid - c + j / 2.0,
            mid - c - j / 2.0,
        ],
    )
}

/// AB2 parameters from eight lines: `ν_A = f₃`, `ν_B = (f₅ + f₇)/2`,
/// `J = ((f₁ − f₄) + (f₆ − f₈))/3`.
pub fn extract_ab2_params(lines: &SpectrumLines) -> Result<SpinSystemParams> {
    expect_kind(lines, SystemKind::Ab2)?;
    let f = |k| lines.f(k);
    Ok(SpinSystemParams::ab2(
        f(3),
        (f(5) + f(7)) / 2.0,
        ((f(1) - f(4)) + (f(6) - f(8))) / 3.0,
    ))
}
