//! Classical minimizers for the variational loop.
//!
//! [`Method::NelderMead`] is derivative-free. [`Method::ParamShiftGd`] is
//! gradient descent driven by [`parameter_shift_gradient`], with step
//! halving whenever a step fails to decrease the objective.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Step multiplier after an accepted gradient step.
const STEP_GROWTH: f64 = 1.25;
const MAX_BACKTRACKS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[value(alias = "nelder_mead")]
    NelderMead,
    #[value(alias = "param_shift_gd")]
    ParamShiftGd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub method: Method,
    pub max_iterations: usize,
    /// Simplex objective spread (Nelder-Mead) or gradient norm (descent).
    pub tolerance: f64,
    /// Initial descent step, radians per unit gradient.
    pub step_size: f64,
    /// Edge length of the initial simplex, radians.
    pub simplex_scale: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            method: Method::NelderMead,
            max_iterations: 5000,
            tolerance: 1e-10,
            step_size: 1e-3,
            simplex_scale: 0.1,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Validation(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be at least 1".into()));
        }
        let positive = |x: f64| x > 0.0;
        if !positive(self.step_size) || !positive(self.simplex_scale) {
            return Err(Error::Validation("step_size and simplex_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Objective evaluations so far.
    pub evaluations: usize,
    pub best_objective: f64,
    pub parameters: Vec<f64>,
}

/// One record per iteration, starting with the initial point at iteration 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OptimizationTrace {
    pub entries: Vec<TraceEntry>,
}

impl OptimizationTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `iteration,evaluations,energy_hz,theta_0,...,theta_{p-1}`
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let width = self.entries.first().map_or(0, |e| e.parameters.len());
        write!(out, "iteration,evaluations,energy_hz")?;
        for i in 0..width {
            write!(out, ",theta_{i}")?;
        }
        writeln!(out)?;
        for e in &self.entries {
            write!(out, "{},{},{}", e.iteration, e.evaluations, e.best_objective)?;
            for p in &e.parameters {
                write!(out, ",{p}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub parameters: Vec<f64>,
    pub value: f64,
    pub trace: OptimizationTrace,
    pub evaluations: usize,
    /// False when the iteration cap was reached first.
    pub converged: bool,
}

/// Counts evaluations and turns NaN/∞ into an error carrying the point.
struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { theta: x.to_vec() })
        }
    }
}

/// Minimizes `objective` starting from `theta0`.
pub fn minimize<F>(objective: F, theta0: &[f64], opts: &OptimizerOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    opts.validate()?;
    let mut f = Counted {
        f: objective,
        evaluations: 0,
    };
    match opts.method {
        Method::NelderMead => nelder_mead(&mut f, theta0, opts),
        Method::ParamShiftGd => gradient_descent(&mut f, theta0, opts),
    }
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<F>,
    theta0: &[f64],
    opts: &OptimizerOptions,
) -> Result<Minimum> {
    let n = theta0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((theta0.to_vec(), f.eval(theta0)?));
    for i in 0..n {
        let mut x = theta0.to_vec();
        x[i] += opts.simplex_scale;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let spread = |s: &[(Vec<f64>, f64)]| s[s.len() - 1].1 - s[0].1;
    sort(&mut simplex);

    let mut trace = OptimizationTrace::default();
    let record = |trace: &mut OptimizationTrace, iteration, evaluations, s: &[(Vec<f64>, f64)]| {
        trace.entries.push(TraceEntry {
            iteration,
            evaluations,
            best_objective: s[0].1,
            parameters: s[0].0.clone(),
        })
    };
    record(&mut trace, 0, f.evaluations, &simplex);

    let mut converged = n == 0 || spread(&simplex) < opts.tolerance;
    let mut iteration = 0;
    while !converged && iteration < opts.max_iterations {
        iteration += 1;
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = toward(REFLECTION);
        let fr = f.eval(&reflected)?;
        let mut replacement = None;
        if fr < simplex[0].1 {
            let expanded = toward(REFLECTION * EXPANSION);
            let fe = f.eval(&expanded)?;
            replacement = Some(if fe < fr { (expanded, fe) } else { (reflected, fr) });
        } else if fr < simplex[n - 1].1 {
            replacement = Some((reflected, fr));
        } else if fr < worst.1 {
            let outside = toward(REFLECTION * CONTRACTION);
            let fo = f.eval(&outside)?;
            if fo <= fr {
                replacement = Some((outside, fo));
            }
        } else {
            let inside = toward(-CONTRACTION);
            let fi = f.eval(&inside)?;
            if fi < worst.1 {
                replacement = Some((inside, fi));
            }
        }

        match replacement {
            Some(vertex) => simplex[n] = vertex,
            None => {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, v)| b + SHRINK * (v - b))
                        .collect();
                    let v = f.eval(&x)?;
                    *vertex = (x, v);
                }
            }
        }
        sort(&mut simplex);
        record(&mut trace, iteration, f.evaluations, &simplex);
        converged = spread(&simplex) < opts.tolerance;
    }

    let (parameters, value) = simplex.swap_remove(0);
    Ok(Minimum {
        parameters,
        value,
        trace,
        evaluations: f.evaluations,
        converged,
    })
}

fn gradient_descent<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<F>,
    theta0: &[f64],
    opts: &OptimizerOptions,
) -> Result<Minimum> {
    let mut theta = theta0.to_vec();
    let mut value = f.eval(&theta)?;
    let mut step = opts.step_size;
    let mut trace = OptimizationTrace::default();
    trace.entries.push(TraceEntry {
        iteration: 0,
        evaluations: f.evaluations,
        best_objective: value,
        parameters: theta.clone(),
    });

    let mut converged = false;
    let mut iteration = 0;
    while iteration < opts.max_iterations {
        let mut gradient = vec![0.0; theta.len()];
        for (i, g) in gradient.iter_mut().enumerate() {
            *g = shift_component(f, &theta, i)?;
        }
        let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < opts.tolerance {
            converged = true;
            break;
        }
        iteration += 1;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = theta.iter().zip(&gradient).map(|(t, g)| t - step * g).collect();
            let fc = f.eval(&candidate)?;
            if fc < value {
                theta = candidate;
                value = fc;
                step *= STEP_GROWTH;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        trace.entries.push(TraceEntry {
            iteration,
            evaluations: f.evaluations,
            best_objective: value,
            parameters: theta.clone(),
        });
        if !accepted {
            // no descent along the gradient at machine resolution
            converged = true;
            break;
        }
    }

    Ok(Minimum {
        parameters: theta,
        value,
        trace,
        evaluations: f.evaluations,
        converged,
    })
}

fn shift_component<F: Fn(&[f64]) -> f64>(f: &mut Counted<F>, theta: &[f64], i: usize) -> Result<f64> {
    let mut shifted = theta.to_vec();
    shifted[i] = theta[i] + FRAC_PI_2;
    let plus = f.eval(&shifted)?;
    shifted[i] = theta[i] - FRAC_PI_2;
    let minus = f.eval(&shifted)?;
    Ok((plus - minus) / 2.0)
}

/// `∂E/∂θᵢ = [E(θ + π/2 eᵢ) − E(θ − π/2 eᵢ)] / 2`.
///
/// Exact when each parameter enters the circuit through a single Ry
/// rotation. A parameter feeding a controlled rotation or several gates
/// needs a wider shift rule.
pub fn parameter_shift_gradient<F>(objective: F, theta: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            shifted[i] = theta[i] + FRAC_PI_2;
            let plus = objective(&shifted);
            shifted[i] = theta[i] - FRAC_PI_2;
            let minus = objective(&shifted);
            shifted[i] = theta[i];
            (plus - minus) / 2.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{Circuit, GateOp, StateVector};
    use crate::pauli::PauliSum;

    fn bowl(x: &[f64]) -> f64 {
        (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2)
    }

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let m = minimize(bowl, &[0.0, 0.0], &OptimizerOptions::default()).unwrap();
        assert!(m.converged);
        assert!(m.value <= 1e-8);
        assert!((m.parameters[0] - 1.0).abs() < 1e-4 && (m.parameters[1] + 2.0).abs() < 1e-4);
        assert_eq!(m.value, bowl(&m.parameters));
    }

    #[test]
    fn nelder_mead_one_dimensional_cosine() {
        let m = minimize(|x: &[f64]| x[0].cos(), &[1.0], &OptimizerOptions::default()).unwrap();
        assert!((m.value + 1.0).abs() < 1e-6);
    }

    #[test]
    fn gradient_descent_quadratic_bowl() {
        let opts = OptimizerOptions {
            method: Method::ParamShiftGd,
            step_size: 0.1,
            tolerance: 1e-8,
            ..OptimizerOptions::default()
        };
        // The shift rule is exact for sinusoids, not quadratics; on a bowl it
        // is still a descent direction pointing at the minimum.
        let m = minimize(bowl, &[0.0, 0.0], &opts).unwrap();
        assert!(m.value <= 1e-8, "{}", m.value);
    }

    #[test]
    fn gradient_descent_cosine() {
        let opts = OptimizerOptions {
            method: Method::ParamShiftGd,
            step_size: 0.5,
            tolerance: 1e-9,
            ..OptimizerOptions::default()
        };
        let m = minimize(|x: &[f64]| x[0].cos(), &[1.0], &opts).unwrap();
        assert!((m.value + 1.0).abs() < 1e-12);
        assert!(m.converged);
    }

    #[test]
    fn trace_is_monotone_and_counts_evaluations() {
        let m = minimize(bowl, &[3.0, 3.0], &OptimizerOptions::default()).unwrap();
        let entries = &m.trace.entries;
        assert_eq!(entries[0].iteration, 0);
        assert_eq!(entries[0].evaluations, 3);
        assert!(entries.windows(2).all(|w| w[1].best_objective <= w[0].best_objective));
        assert!(entries.windows(2).all(|w| w[1].evaluations > w[0].evaluations));
        assert_eq!(entries.last().unwrap().evaluations, m.evaluations);
    }

    #[test]
    fn iteration_cap_is_respected() {
        let opts = OptimizerOptions { max_iterations: 5, ..OptimizerOptions::default() };
        let m = minimize(bowl, &[10.0, 10.0], &opts).unwrap();
        assert!(!m.converged);
        assert_eq!(m.trace.len(), 6);
    }

    #[test]
    fn nan_objective_reports_point() {
        let err = minimize(|x: &[f64]| if x[0] > 0.05 { f64::NAN } else { x[0] }, &[0.0], &OptimizerOptions::default());
        match err {
            Err(Error::NonFinite { theta }) => assert!(theta[0] > 0.05),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_options() {
        let opts = OptimizerOptions { tolerance: 0.0, ..OptimizerOptions::default() };
        assert!(minimize(bowl, &[0.0, 0.0], &opts).is_err());
        let opts = OptimizerOptions { max_iterations: 0, ..OptimizerOptions::default() };
        assert!(minimize(bowl, &[0.0, 0.0], &opts).is_err());
    }

    #[test]
    fn deterministic_traces() {
        let a = minimize(bowl, &[0.3, -0.7], &OptimizerOptions::default()).unwrap();
        let b = minimize(bowl, &[0.3, -0.7], &OptimizerOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let m = minimize(bowl, &[0.0, 0.0], &OptimizerOptions { max_iterations: 2, ..OptimizerOptions::default() }).unwrap();
        let csv = m.trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iteration,evaluations,energy_hz,theta_0,theta_1");
        assert_eq!(lines.count(), m.trace.len());
    }

    fn z_energy(theta: &[f64]) -> f64 {
        let c = Circuit::new(1, vec![GateOp::ry(0, 0)]).unwrap();
        let h = PauliSum::new(1).unwrap().with_term(1.0, "Z").unwrap();
        h.expectation(&c.run(theta, &StateVector::basis(1, 0).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn shift_rule_on_single_rotation() {
        assert!(parameter_shift_gradient(z_energy, &[0.0])[0].abs() < 1e-15);
        let h = 1e-5;
        let x = std::f64::consts::FRAC_PI_2;
        let central = (z_energy(&[x + h]) - z_energy(&[x - h])) / (2.0 * h);
        let shift = parameter_shift_gradient(z_energy, &[x])[0];
        assert!((central + 1.0).abs() < 1e-9);
        assert!((shift - central).abs() < 1e-9);
    }

    #[test]
    fn shift_rule_constant_objective() {
        assert_eq!(parameter_shift_gradient(|_: &[f64]| 4.2, &[0.1, 0.2, 0.3]), vec![0.0; 3]);
    }
}
