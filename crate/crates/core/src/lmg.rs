//! Semiclassical open Lipkin-Meshkov-Glick model with tunable anisotropy:
//! equations of motion on the unit Bloch sphere, steady states, critical
//! coupling, natural frequency, isotropic-limit closed forms, and the map
//! from microscopic dissipation channels to the collective decay rate.

use serde::{Deserialize, Serialize};

use crate::dynamics::DriveSpec;
use crate::error::{Error, Result};

/// Parameters of the open LMG model. The drive's base value is the static
/// interaction strength `lambda0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmgParams {
    /// Level splitting, > 0.
    pub omega0: f64,
    /// Static spin-spin interaction strength (sign free).
    pub lambda0: f64,
    /// Anisotropy of the interaction, in [-1, 1].
    pub gamma: f64,
    /// Collective spin decay rate, >= 0.
    pub decay: f64,
    /// Interaction drive; `drive.base = lambda0`.
    pub drive: DriveSpec,
}

impl LmgParams {
    pub fn new(
        omega0: f64,
        lambda0: f64,
        gamma: f64,
        decay: f64,
        drive_amp: f64,
        drive_freq: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::Config(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(-1.0..=1.0).contains(&gamma) {
            return Err(Error::Config(format!(
                "anisotropy must lie in [-1, 1], got {gamma}"
            )));
        }
        if decay < 0.0 {
            return Err(Error::Config(format!("decay must be >= 0, got {decay}")));
        }
        Ok(Self {
            omega0,
            lambda0,
            gamma,
            decay,
            drive: DriveSpec::new(lambda0, drive_amp, drive_freq)?,
        })
    }

    /// Instantaneous interaction strength `lambda(t)`.
    #[inline]
    pub fn coupling_at(&self, t: f64) -> f64 {
        self.drive.value(t)
    }
}

/// Intensive collective-spin state `(X, Y, Z) = 2 <J> / N` on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmgState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LmgState {
    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: &[f64; 3]) -> Self {
        Self { x: a[0], y: a[1], z: a[2] }
    }

    pub fn norm(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Shift the seed component by the decorrelator offset, recomputing `z`
    /// to stay on the sphere.
    pub fn perturbed(&self, delta: f64) -> Self {
        let y = self.y + delta;
        let z = -(1.0 - self.x * self.x - y * y).sqrt();
        Self { x: self.x, y, z }
    }
}

/// Default initial state: a `5e-8` displacement along `Y` away from the
/// fully down-polarized spin.
pub fn lmg_initial_state() -> LmgState {
    lmg_initial_state_with_seed(5e-8).unwrap()
}

/// Initial state with an explicit seed displacement `y0`; `Z` is fixed by
/// the unit norm, on the lower hemisphere.
///
/// Note the down-polarized sign: the run starts near the lowest-energy
/// configuration, which is the normal-phase attractor.
pub fn lmg_initial_state_with_seed(y0: f64) -> Result<LmgState> {
    if !(0.0..1.0).contains(&y0) {
        return Err(Error::Config(format!(
            "seed displacement must lie in [0, 1), got {y0}"
        )));
    }
    Ok(LmgState { x: 0.0, y: y0, z: -(1.0 - y0 * y0).sqrt() })
}

/// Semiclassical flow of the open LMG model:
///
/// ```text
/// dX/dt = -w0 Y - lambda(t) gamma Y Z + (Gamma/2) X Z
/// dY/dt =  w0 X + lambda(t) X Z       + (Gamma/2) Y Z
/// dZ/dt = -lambda(t)(1 - gamma) X Y   - (Gamma/2)(X^2 + Y^2)
/// ```
pub fn lmg_rhs(p: &LmgParams, s: &LmgState, t: f64) -> LmgState {
    let lambda = p.coupling_at(t);
    let half_decay = 0.5 * p.decay;
    LmgState {
        x: -p.omega0 * s.y - lambda * p.gamma * s.y * s.z + half_decay * s.x * s.z,
        y: p.omega0 * s.x + lambda * s.x * s.z + half_decay * s.y * s.z,
        z: -lambda * (1.0 - p.gamma) * s.x * s.y
            - half_decay * (s.x * s.x + s.y * s.y),
    }
}

/// One symmetry-broken steady-state branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmgSteadyState {
    /// Sign of the `X` component, +1 or -1.
    pub branch: i8,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Auxiliary scale `Lambda = (lambda gamma_+ + sqrt(lambda^2 gamma_-^2 - Gamma^2)) / 2`.
    pub lambda_big: f64,
}

impl LmgSteadyState {
    pub fn state(&self) -> LmgState {
        LmgState { x: self.x, y: self.y, z: self.z }
    }
}

/// Steady states of the undriven model: the normal phase always, plus the
/// two symmetry-broken branches when they exist.
#[derive(Debug, Clone, PartialEq)]
pub enum SteadyStates {
    NormalOnly,
    SymmetryBroken { plus: LmgSteadyState, minus: LmgSteadyState },
}

impl SteadyStates {
    pub fn branches(&self) -> Option<(&LmgSteadyState, &LmgSteadyState)> {
        match self {
            SteadyStates::NormalOnly => None,
            SteadyStates::SymmetryBroken { plus, minus } => Some((plus, minus)),
        }
    }
}

/// The down-polarized normal-phase fixed point.
pub fn normal_steady_state() -> LmgState {
    LmgState { x: 0.0, y: 0.0, z: -1.0 }
}

/// Symmetry-broken steady states of the static (`A = 0`) model:
///
/// `Zs = -w0 / Lambda`, `Xs = +-(Gamma / 2 Lambda) sqrt((Lambda^2 - w0^2) / (lambda gamma_- (lambda - Lambda)))`,
/// `Ys = 2 (Lambda - lambda) Xs / Gamma`.
///
/// Branches exist when `Lambda` is real, `|Zs| <= 1`, and the `Xs` radicand
/// is nonnegative. The `Gamma -> 0` limit is handled in closed form.
pub fn lmg_steady_state(p: &LmgParams) -> SteadyStates {
    let lambda = p.lambda0;
    let w0 = p.omega0;
    let gm = 1.0 - p.gamma;
    let gp = 1.0 + p.gamma;

    if gm == 0.0 {
        // Isotropic interaction never breaks the symmetry.
        return SteadyStates::NormalOnly;
    }

    if p.decay == 0.0 {
        // Limit of the general expressions: Lambda -> (lambda g+ + |lambda| g-)/2.
        // For lambda > 0 the broken direction is X (Ys -> 0); for lambda < 0
        // the transverse radius moves to Y instead.
        let lambda_big = 0.5 * (lambda * gp + lambda.abs() * gm);
        let zs = -w0 / lambda_big;
        if !zs.is_finite() || !(-1.0..0.0).contains(&zs) {
            return SteadyStates::NormalOnly;
        }
        let r = (1.0 - zs * zs).sqrt();
        let mk = |sign: f64| LmgSteadyState {
            branch: sign as i8,
            x: if lambda > 0.0 { sign * r } else { 0.0 },
            y: if lambda > 0.0 { 0.0 } else { sign * r },
            z: zs,
            lambda_big,
        };
        return SteadyStates::SymmetryBroken { plus: mk(1.0), minus: mk(-1.0) };
    }

    let s = lambda * gm;
    let disc = s * s - p.decay * p.decay;
    if disc < 0.0 {
        return SteadyStates::NormalOnly; // overdamped spin
    }
    let root = disc.sqrt();
    let lambda_big = 0.5 * (lambda * gp + root);
    let zs = -w0 / lambda_big;
    if !zs.is_finite() || zs.abs() > 1.0 {
        return SteadyStates::NormalOnly;
    }
    // lambda - Lambda = (s - root)/2; rationalize when s and root nearly
    // cancel, which is the usual small-decay regime.
    let lambda_diff = if s > 0.0 {
        0.5 * p.decay * p.decay / (s + root)
    } else {
        0.5 * (s - root)
    };
    let radicand =
        (lambda_big * lambda_big - w0 * w0) / (lambda * gm * lambda_diff);
    if radicand < 0.0 || !radicand.is_finite() {
        return SteadyStates::NormalOnly;
    }
    let xs = 0.5 * p.decay / lambda_big * radicand.sqrt();
    let mk = |sign: f64| {
        let x = sign * xs;
        LmgSteadyState {
            branch: sign as i8,
            x,
            y: -2.0 * lambda_diff / p.decay * x,
            z: zs,
            lambda_big,
        }
    };
    SteadyStates::SymmetryBroken { plus: mk(1.0), minus: mk(-1.0) }
}

/// Critical coupling(s) where the normal phase destabilizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaCritical {
    /// `gamma = 0`: the single root `Gamma^2 / (4 w0) + w0`.
    Single(f64),
    /// `gamma != 0`: `(+-sqrt(w0^2 gamma_-^2 - Gamma^2 gamma) + w0 gamma_+) / (2 gamma)`,
    /// each `None` if the radicand is negative (no real transition).
    Pair { plus: Option<f64>, minus: Option<f64> },
}

impl LambdaCritical {
    /// All real critical couplings.
    pub fn roots(&self) -> Vec<f64> {
        match self {
            LambdaCritical::Single(v) => vec![*v],
            LambdaCritical::Pair { plus, minus } => {
                plus.iter().chain(minus.iter()).copied().collect()
            }
        }
    }

    /// Smallest real root inside `[lo, hi]`, if any.
    pub fn first_in_range(&self, lo: f64, hi: f64) -> Option<f64> {
        self.roots()
            .into_iter()
            .filter(|v| (lo..=hi).contains(v))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

pub fn lambda_critical(p: &LmgParams) -> LambdaCritical {
    let w0 = p.omega0;
    if p.gamma == 0.0 {
        return LambdaCritical::Single(p.decay * p.decay / (4.0 * w0) + w0);
    }
    let gm = 1.0 - p.gamma;
    let gp = 1.0 + p.gamma;
    let radicand = w0 * w0 * gm * gm - p.decay * p.decay * p.gamma;
    if radicand < 0.0 {
        return LambdaCritical::Pair { plus: None, minus: None };
    }
    let root = radicand.sqrt();
    LambdaCritical::Pair {
        plus: Some((root + w0 * gp) / (2.0 * p.gamma)),
        minus: Some((-root + w0 * gp) / (2.0 * p.gamma)),
    }
}

/// Natural frequency of the oscillator picture,
/// `Omega0 = sqrt((w0 - lambda0)(w0 - gamma lambda0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NaturalFrequency {
    Real(f64),
    /// Radicand negative: the mode has gone unstable (symmetry-broken side);
    /// carries `sqrt(-radicand)`.
    Imaginary(f64),
}

pub fn natural_frequency(p: &LmgParams) -> NaturalFrequency {
    let radicand = (p.omega0 - p.lambda0) * (p.omega0 - p.gamma * p.lambda0);
    if radicand >= 0.0 {
        NaturalFrequency::Real(radicand.sqrt())
    } else {
        NaturalFrequency::Imaginary((-radicand).sqrt())
    }
}

/// Parametric resonance ladder `omega_r(n) = 2 Omega0 / n`; `None` when the
/// natural frequency is imaginary.
pub fn resonance_ladder(p: &LmgParams, n: u32) -> Option<f64> {
    assert!(n >= 1);
    match natural_frequency(p) {
        NaturalFrequency::Real(w) => Some(2.0 * w / n as f64),
        NaturalFrequency::Imaginary(_) => None,
    }
}

/// Closed-form `Z(t)` of the isotropic (`gamma = 1`) model:
/// `Z(t) = tanh(artanh(Z0) - Gamma t / 2)`, the solution of
/// `dZ/dt = -(Gamma/2)(1 - Z^2)` that decays to -1.
pub fn isotropic_z_analytic(decay: f64, z0: f64, t: f64) -> f64 {
    if z0.abs() >= 1.0 {
        return z0.signum(); // poles of the flow
    }
    if decay == 0.0 || t == 0.0 {
        return z0;
    }
    (z0.atanh() - 0.5 * decay * t).tanh()
}

/// Closed-form `X(t)` of the isotropic nondissipative model under drive:
/// a rotation at the instantaneous rate `w0 + lambda(t) Z0`,
///
/// `X(t) = R sin(theta(t) + phi0)`, `R = sqrt(X0^2 + Y0^2)`,
/// `theta(t) = -(w0 + lambda0 Z0) t + (lambda0 Z0 A / w_d)(cos(w_d t) - 1)`,
/// `phi0 = atan2(X0, Y0)`.
///
/// Requires `gamma = 1` and `Gamma = 0` (otherwise `Z` is not constant).
pub fn isotropic_x_analytic(p: &LmgParams, s0: &LmgState, t: f64) -> Result<f64> {
    if p.gamma != 1.0 {
        return Err(Error::NotApplicable(format!(
            "isotropic closed form needs gamma = 1, got {}",
            p.gamma
        )));
    }
    if p.decay != 0.0 {
        return Err(Error::NotApplicable(format!(
            "isotropic X closed form needs Gamma = 0, got {}",
            p.decay
        )));
    }
    let r = s0.x.hypot(s0.y);
    let phi0 = s0.x.atan2(s0.y);
    let mut theta = -(p.omega0 + p.lambda0 * s0.z) * t;
    if p.drive.amplitude != 0.0 {
        theta += p.lambda0 * s0.z * p.drive.amplitude / p.drive.frequency
            * ((p.drive.frequency * t).cos() - 1.0);
    }
    Ok(r * (theta + phi0).sin())
}

/// Microscopic dissipation channels entering the three master-equation
/// variants, one per supported anisotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DissipationChannels {
    /// `gamma = -1`: raising and lowering channels with weights
    /// `alpha`, `beta`.
    AnisotropyMinusOne { alpha: f64, beta: f64, gamma_a: f64, gamma_b: f64 },
    /// `gamma = 0`: a raising channel (plus a dephasing channel that drops
    /// out in the thermodynamic limit).
    AnisotropyZero { gamma_b: f64 },
    /// `gamma = 1`: lowering and raising channels.
    AnisotropyOne { gamma_a: f64, gamma_b: f64 },
}

/// Collective decay rate recovered from the channel rates:
/// `beta^2 Gamma_b - alpha^2 Gamma_a` (`gamma = -1`), `-Gamma_b / 2`
/// (`gamma = 0`), `(Gamma_a - Gamma_b) / 2` (`gamma = 1`).
///
/// The channel rates are negative by convention, making the collective
/// `Gamma` positive.
pub fn gamma_dissipation_map(channels: &DissipationChannels) -> f64 {
    match channels {
        DissipationChannels::AnisotropyMinusOne { alpha, beta, gamma_a, gamma_b } => {
            beta * beta * gamma_b - alpha * alpha * gamma_a
        }
        DissipationChannels::AnisotropyZero { gamma_b } => -gamma_b / 2.0,
        DissipationChannels::AnisotropyOne { gamma_a, gamma_b } => {
            (gamma_a - gamma_b) / 2.0
        }
    }
}
