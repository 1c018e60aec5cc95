//! Fixed-step integration, sinusoidal parameter drives, and trajectory
//! recording shared by every model in this crate.
//!
//! All states are flat `[f64; N]` vectors; the model modules provide typed
//! views on top of them. Time is always reconstructed as `t0 + n * dt` with
//! integer `n` so that a million steps do not accumulate float drift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sinusoidally modulated parameter: `base * (1 + amplitude * sin(frequency * t))`.
///
/// Used for both the light-matter coupling of the cavity models and the
/// spin-spin interaction of the collective-spin model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    /// Static value of the driven parameter.
    pub base: f64,
    /// Dimensionless modulation amplitude, >= 0.
    pub amplitude: f64,
    /// Angular drive frequency, > 0 whenever `amplitude > 0`.
    pub frequency: f64,
}

impl DriveSpec {
    pub fn new(base: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        if !(base.is_finite() && amplitude.is_finite() && frequency.is_finite()) {
            return Err(Error::Config("drive parameters must be finite".into()));
        }
        if amplitude < 0.0 {
            return Err(Error::Config(format!(
                "drive amplitude must be >= 0, got {amplitude}"
            )));
        }
        if amplitude > 0.0 && frequency <= 0.0 {
            return Err(Error::Config(format!(
                "drive frequency must be > 0 when amplitude > 0, got {frequency}"
            )));
        }
        Ok(Self { base, amplitude, frequency })
    }

    /// Undriven parameter (amplitude 0).
    pub fn constant(base: f64) -> Self {
        Self { base, amplitude: 0.0, frequency: 1.0 }
    }

    /// Instantaneous drive value `base * (1 + A sin(w_d t))`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            self.base
        } else {
            self.base * (1.0 + self.amplitude * (self.frequency * t).sin())
        }
    }

    /// Drive period `2 pi / w_d`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.frequency
    }

    /// Amplitudes above 1 are allowed but lie outside the sweep regime
    /// used throughout this crate; callers may want to warn.
    pub fn outside_sweep_regime(&self) -> bool {
        self.amplitude > 1.0
    }
}

/// Fixed-step integration setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Time step, in units of the inverse fast frequency of the model.
    pub dt: f64,
    /// End time of the run (start is 0).
    pub t_final: f64,
    /// Record every `stride`-th step.
    pub stride: usize,
    /// Any state component exceeding this magnitude truncates the run
    /// and flags the trajectory as diverged.
    pub divergence_cutoff: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_final: 1000.0, stride: 10, divergence_cutoff: 1e6 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!(
                "t_final must be > 0, got {}",
                self.t_final
            )));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be a positive integer".into()));
        }
        if !(self.divergence_cutoff > 1.0) {
            return Err(Error::Config(format!(
                "divergence_cutoff must be > 1, got {}",
                self.divergence_cutoff
            )));
        }
        Ok(())
    }

    /// Number of RK4 steps in a run starting at `t0`.
    pub fn n_steps(&self, t0: f64) -> u64 {
        // The +1e-9 guards against 999999.9999... flooring one step short.
        ((self.t_final - t0) / self.dt + 1e-9).floor() as u64
    }

    /// Time between recorded samples.
    pub fn sample_dt(&self) -> f64 {
        self.dt * self.stride as f64
    }
}

/// Where and why a run was truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    /// Step index at which the cutoff (or a non-finite value) was hit.
    pub step: u64,
    /// Offending state component.
    pub component: usize,
    /// Value of that component (may be infinite or NaN).
    pub value: f64,
}

/// Uniformly sampled time series of flat state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model_id: String,
    pub t0: f64,
    pub dt: f64,
    pub stride: usize,
    /// Components per sample.
    pub ncomp: usize,
    /// Row-major samples, `n_samples * ncomp` entries.
    pub data: Vec<f64>,
    /// Set when the run was truncated; samples up to the truncation are kept.
    pub diverged: Option<Divergence>,
}

impl Trajectory {
    pub fn n_samples(&self) -> usize {
        self.data.len() / self.ncomp
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        &self.data[k * self.ncomp..(k + 1) * self.ncomp]
    }

    /// Time of sample `k`, exact in index arithmetic.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + (k * self.stride) as f64 * self.dt
    }

    pub fn sample_dt(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.ncomp)
    }

    /// One component as a column vector.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.samples().map(|s| s[i]).collect()
    }
}

/// One classical fourth-order Runge-Kutta step.
///
/// Fails with the offending component index if any stage derivative is
/// non-finite.
pub fn rk4_step<const N: usize>(
    rhs: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    y: &[f64; N],
    t: f64,
    dt: f64,
) -> Result<[f64; N]> {
    let k1 = check_finite(rhs(t, y))?;
    let mut stage = [0.0; N];
    for i in 0..N {
        stage[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = check_finite(rhs(t + 0.5 * dt, &stage))?;
    for i in 0..N {
        stage[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = check_finite(rhs(t + 0.5 * dt, &stage))?;
    for i in 0..N {
        stage[i] = y[i] + dt * k3[i];
    }
    let k4 = check_finite(rhs(t + dt, &stage))?;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[inline]
fn check_finite<const N: usize>(k: [f64; N]) -> Result<[f64; N]> {
    for (i, v) in k.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { component: i });
        }
    }
    Ok(k)
}

/// Integrate `rhs` from `y0` at `t = 0`, recording every `stride`-th state.
///
/// A component exceeding `divergence_cutoff` (or going non-finite) truncates
/// the run: samples recorded so far are kept and the trajectory carries a
/// [`Divergence`] flag.
pub fn integrate<const N: usize>(
    mut rhs: impl FnMut(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    config: &IntegratorConfig,
    model_id: &str,
) -> Result<Trajectory> {
    config.validate()?;
    let t0 = 0.0;
    let n_steps = config.n_steps(t0);
    if n_steps == 0 {
        return Err(Error::Config(format!(
            "zero-length run: t_final {} shorter than one step",
            config.t_final
        )));
    }
    let n_samples = (n_steps / config.stride as u64 + 1) as usize;
    let mut data = Vec::with_capacity(n_samples * N);
    data.extend_from_slice(&y0);

    let mut y = y0;
    let mut diverged = None;
    let mut rhs_fn = |t: f64, s: &[f64; N]| rhs(t, s);
    for step in 1..=n_steps {
        let t = t0 + (step - 1) as f64 * config.dt;
        match rk4_step(&mut rhs_fn, &y, t, config.dt) {
            Ok(next) => y = next,
            Err(Error::NonFinite { component }) => {
                diverged = Some(Divergence { step, component, value: f64::NAN });
                break;
            }
            Err(e) => return Err(e),
        }
        if let Some(i) = breach(&y, config.divergence_cutoff) {
            diverged = Some(Divergence { step, component: i, value: y[i] });
            break;
        }
        if step % config.stride as u64 == 0 {
            data.extend_from_slice(&y);
        }
    }

    Ok(Trajectory {
        model_id: model_id.to_string(),
        t0,
        dt: config.dt,
        stride: config.stride,
        ncomp: N,
        data,
        diverged,
    })
}

#[inline]
fn breach<const N: usize>(y: &[f64; N], cutoff: f64) -> Option<usize> {
    y.iter().position(|v| !v.is_finite() || v.abs() > cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drive_value_constant_and_quarter_period() {
        let d = DriveSpec::new(0.5, 0.0, 3.0).unwrap();
        assert_eq!(d.value(7.7), 0.5);
        let d = DriveSpec::new(1.0, 0.5, std::f64::consts::TAU).unwrap();
        assert!((d.value(0.25) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn drive_rejects_zero_frequency_with_modulation() {
        assert!(DriveSpec::new(1.0, 0.5, 0.0).is_err());
        assert!(DriveSpec::new(1.0, -0.1, 1.0).is_err());
        assert!(DriveSpec::new(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn drive_flags_amplitudes_above_one() {
        let d = DriveSpec::new(1.0, 1.5, 1.0).unwrap();
        assert!(d.outside_sweep_regime());
        assert!(!DriveSpec::constant(1.0).outside_sweep_regime());
    }

    #[test]
    fn rk4_zero_rhs_keeps_state() {
        let y = [1.0, -2.0, 3.5];
        let mut rhs = |_t: f64, _y: &[f64; 3]| [0.0; 3];
        let out = rk4_step(&mut rhs, &y, 0.0, 0.1).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn rk4_exponential_step_matches_closed_form() {
        let mut rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let out = rk4_step(&mut rhs, &[1.0], 0.0, 0.1).unwrap();
        // One RK4 step of y' = y from 1: truncated exponential series.
        assert!((out[0] - 1.10517083333).abs() < 1e-9);
        assert!((out[0] - (0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_harmonic_half_turn() {
        // x'' = -x integrated to t = pi flips the sign of x.
        let n = 3142;
        let dt = std::f64::consts::PI / n as f64;
        let mut y = [1.0, 0.0];
        let mut rhs = |_t: f64, s: &[f64; 2]| [s[1], -s[0]];
        for k in 0..n {
            y = rk4_step(&mut rhs, &y, k as f64 * dt, dt).unwrap();
        }
        assert!((y[0] + 1.0).abs() < 1e-9, "x(pi) = {}", y[0]);
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn rk4_reports_nonfinite_stage_component() {
        let mut rhs = |_t: f64, y: &[f64; 2]| [y[0], 1.0 / (y[1] - y[1])];
        match rk4_step(&mut rhs, &[1.0, 1.0], 0.0, 0.1) {
            Err(Error::NonFinite { component }) => assert_eq!(component, 1),
            other => panic!("expected non-finite signal, got {other:?}"),
        }
    }

    #[test]
    fn integrate_matches_composed_steps() {
        let cfg = IntegratorConfig {
            dt: 0.05,
            t_final: 0.5,
            stride: 1,
            divergence_cutoff: 1e6,
        };
        let rhs = |t: f64, y: &[f64; 2]| [y[1], -y[0] + 0.1 * t];
        let traj = integrate(rhs, [1.0, 0.0], &cfg, "probe").unwrap();
        assert_eq!(traj.n_samples(), 11);

        let mut y = [1.0, 0.0];
        let mut rhs_m = rhs;
        for k in 0..10 {
            y = rk4_step(&mut rhs_m, &y, k as f64 * 0.05, 0.05).unwrap();
        }
        assert_eq!(traj.sample(10), &y[..]);
    }

    #[test]
    fn integrate_rejects_zero_length_run() {
        let cfg = IntegratorConfig { t_final: -1.0, ..Default::default() };
        let err = integrate(|_t, _y: &[f64; 1]| [0.0], [0.0], &cfg, "x");
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn integrate_truncates_on_cutoff() {
        let cfg = IntegratorConfig {
            dt: 0.01,
            t_final: 100.0,
            stride: 10,
            divergence_cutoff: 1e3,
        };
        let traj = integrate(|_t, y: &[f64; 1]| [y[0]], [1.0], &cfg, "exp").unwrap();
        let div = traj.diverged.expect("must diverge");
        assert_eq!(div.component, 0);
        // e^t crosses 1e3 near t = 6.9.
        assert!((div.step as f64 * 0.01 - 6.9).abs() < 0.1);
        // Samples up to the truncation are preserved and finite.
        assert!(traj.n_samples() > 60);
        assert!(traj.data.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn sample_times_use_index_arithmetic() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_final: 2.0,
            stride: 7,
            divergence_cutoff: 1e6,
        };
        let traj = integrate(|_t, _y: &[f64; 1]| [0.0], [0.0], &cfg, "x").unwrap();
        for k in 0..traj.n_samples() {
            assert_eq!(traj.time(k), (k * 7) as f64 * 1e-3);
        }
    }

    #[test]
    fn integration_is_deterministic() {
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_final: 10.0,
            stride: 10,
            divergence_cutoff: 1e6,
        };
        let rhs = |t: f64, y: &[f64; 2]| [y[1], -(1.0 + 0.3 * (2.0 * t).sin()) * y[0]];
        let a = integrate(rhs, [0.01, 0.0], &cfg, "m").unwrap();
        let b = integrate(rhs, [0.01, 0.0], &cfg, "m").unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        // Endpoint error on the harmonic oscillator shrinks ~16x per halving.
        let err_at = |dt: f64| {
            let n = (std::f64::consts::PI / dt).round() as usize;
            let dt = std::f64::consts::PI / n as f64;
            let mut y = [1.0, 0.0];
            let mut rhs = |_t: f64, s: &[f64; 2]| [s[1], -s[0]];
            for k in 0..n {
                y = rk4_step(&mut rhs, &y, k as f64 * dt, dt).unwrap();
            }
            ((y[0] + 1.0).powi(2) + y[1].powi(2)).sqrt()
        };
        let errs = [err_at(1e-2), err_at(5e-3), err_at(2.5e-3)];
        for pair in errs.windows(2) {
            let factor = pair[0] / pair[1];
            assert!(
                (14.0..=18.0).contains(&factor),
                "convergence factor {factor} outside [14, 18]"
            );
        }
    }
}
