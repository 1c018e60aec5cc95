//! Mean-field open Dicke model and its effective oscillator reductions.
//!
//! Everything here is written in intensive (N-free) variables: the cavity
//! amplitude `alpha = a / sqrt(N)`, the atomic-mode amplitude
//! `beta = b / sqrt(N)`, and the spin components `s_i = 2 J_i / N`. In these
//! units the order parameter is `J_x / N = sx / 2` for the full mean-field
//! model and `Re(beta)` for the oscillator models.

use serde::{Deserialize, Serialize};

use crate::dynamics::DriveSpec;
use crate::error::{Error, Result};

/// Static critical light-matter coupling separating the normal and
/// superradiant phases: `g_c = (1/2) sqrt((omega0/omega)(kappa^2 + omega^2))`.
pub fn critical_coupling(omega: f64, omega0: f64, kappa: f64) -> f64 {
    0.5 * ((omega0 / omega) * (kappa * kappa + omega * omega)).sqrt()
}

/// Parameters of the open Dicke model and its oscillator reductions.
///
/// The drive's base value is the static coupling `g0 = g_ratio * g_c`; it is
/// derived in [`DickeParams::new`] and kept consistent with `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeParams {
    /// Cavity frequency.
    pub omega: f64,
    /// Atomic transition frequency.
    pub omega0: f64,
    /// Cavity dissipation strength, >= 0.
    pub kappa: f64,
    /// Static coupling in units of the critical one, `g' = g0 / g_c`.
    pub g_ratio: f64,
    /// Coupling drive; `drive.base = g_ratio * g_c`.
    pub drive: DriveSpec,
}

impl DickeParams {
    pub fn new(
        omega: f64,
        omega0: f64,
        kappa: f64,
        g_ratio: f64,
        drive_amp: f64,
        drive_freq: f64,
    ) -> Result<Self> {
        if !(omega > 0.0 && omega0 > 0.0) {
            return Err(Error::Config(format!(
                "cavity and atomic frequencies must be > 0, got ({omega}, {omega0})"
            )));
        }
        if kappa < 0.0 {
            return Err(Error::Config(format!("kappa must be >= 0, got {kappa}")));
        }
        if !(g_ratio > 0.0 && g_ratio < 1.0) {
            return Err(Error::Config(format!(
                "g_ratio must lie in (0, 1) for a normal-phase start, got {g_ratio}"
            )));
        }
        let g0 = g_ratio * critical_coupling(omega, omega0, kappa);
        Ok(Self {
            omega,
            omega0,
            kappa,
            g_ratio,
            drive: DriveSpec::new(g0, drive_amp, drive_freq)?,
        })
    }

    /// Critical coupling for these frequencies and dissipation.
    pub fn critical_coupling(&self) -> f64 {
        critical_coupling(self.omega, self.omega0, self.kappa)
    }

    /// Instantaneous coupling `g(t)`.
    #[inline]
    pub fn coupling_at(&self, t: f64) -> f64 {
        self.drive.value(t)
    }
}

/// Mean-field Dicke state: intensive cavity quadratures and spin triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeMfState {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl DickeMfState {
    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha_re, self.alpha_im, self.sx, self.sy, self.sz]
    }

    pub fn from_array(y: &[f64; 5]) -> Self {
        Self { alpha_re: y[0], alpha_im: y[1], sx: y[2], sy: y[3], sz: y[4] }
    }

    /// `sx^2 + sy^2 + sz^2`; conserved (= 1) by the mean-field flow.
    pub fn spin_norm(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }

    /// Order parameter `J_x / N = sx / 2`.
    pub fn jx(&self) -> f64 {
        self.sx / 2.0
    }

    /// Shift `alpha` and the spin by the decorrelator offset `delta`
    /// (`sx` moves by `2 delta`, matching a `beta + delta` shift in the
    /// oscillator picture); `sz` is recomputed to keep the norm exact.
    pub fn perturbed(&self, delta: f64) -> Self {
        let sx = self.sx + 2.0 * delta;
        let sz = -(1.0 - sx * sx - self.sy * self.sy).sqrt();
        Self { alpha_re: self.alpha_re + delta, sx, sz, ..*self }
    }
}

/// Oscillator-model state: intensive cavity and atomic-mode quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmState {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
}

impl OmState {
    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha_re, self.alpha_im, self.beta_re, self.beta_im]
    }

    pub fn from_array(y: &[f64; 4]) -> Self {
        Self { alpha_re: y[0], alpha_im: y[1], beta_re: y[2], beta_im: y[3] }
    }

    /// Atomic excitation fraction `|beta|^2`.
    pub fn excitation_fraction(&self) -> f64 {
        self.beta_re * self.beta_re + self.beta_im * self.beta_im
    }

    /// Zeroth-order order parameter `J_x / N = Re(beta)`.
    pub fn jx(&self) -> f64 {
        self.beta_re
    }

    /// First-order corrected view `Re(beta) sqrt(1 - |beta|^2)`.
    ///
    /// Fails once `|beta|^2 > 1`, where the bosonic reduction has broken
    /// down and the square root turns imaginary.
    pub fn jx_corrected(&self) -> Result<f64> {
        let n = self.excitation_fraction();
        if n > 1.0 {
            return Err(Error::ValidityBreach { beta_sq: n });
        }
        Ok(self.beta_re * (1.0 - n).sqrt())
    }

    pub fn perturbed(&self, delta: f64) -> Self {
        Self {
            alpha_re: self.alpha_re + delta,
            beta_re: self.beta_re + delta,
            ..*self
        }
    }
}

/// Normal-phase initial state displaced by a small perturbation `epsilon`:
/// oscillator models start at `alpha = epsilon`, `beta = -epsilon`, and the
/// mean-field spin at the consistent `(sx, sy, sz) = (-2e, 0, -sqrt(1-4e^2))`.
pub fn np_initial_state(epsilon: f64) -> Result<(DickeMfState, OmState)> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::Config(format!(
            "epsilon must lie in [0, 0.5) to keep the spin norm, got {epsilon}"
        )));
    }
    let mf = DickeMfState {
        alpha_re: epsilon,
        alpha_im: 0.0,
        sx: -2.0 * epsilon,
        sy: 0.0,
        sz: -(1.0 - 4.0 * epsilon * epsilon).sqrt(),
    };
    let om = OmState {
        alpha_re: epsilon,
        alpha_im: 0.0,
        beta_re: -epsilon,
        beta_im: 0.0,
    };
    Ok((mf, om))
}

/// Mean-field flow of the open Dicke model:
///
/// ```text
/// i da/dt = omega a + g(t) sx - i kappa a
///   dsx/dt = -omega0 sy
///   dsy/dt =  omega0 sx - 2 g(t) (a + a*) sz
///   dsz/dt =            2 g(t) (a + a*) sy
/// ```
pub fn dicke_mf_rhs(p: &DickeParams, s: &DickeMfState, t: f64) -> DickeMfState {
    let g = p.coupling_at(t);
    let two_ar = 2.0 * s.alpha_re;
    DickeMfState {
        alpha_re: p.omega * s.alpha_im - p.kappa * s.alpha_re,
        alpha_im: -p.omega * s.alpha_re - g * s.sx - p.kappa * s.alpha_im,
        sx: -p.omega0 * s.sy,
        sy: p.omega0 * s.sx - 2.0 * g * two_ar * s.sz,
        sz: 2.0 * g * two_ar * s.sy,
    }
}

/// Linear oscillator model:
/// `i da/dt = omega a + g(t)(b + b*) - i kappa a`,
/// `i db/dt = omega0 b + g(t)(a + a*)`.
pub fn lom_rhs(p: &DickeParams, s: &OmState, t: f64) -> OmState {
    let g = p.coupling_at(t);
    OmState {
        alpha_re: p.omega * s.alpha_im - p.kappa * s.alpha_re,
        alpha_im: -p.omega * s.alpha_re - 2.0 * g * s.beta_re - p.kappa * s.alpha_im,
        beta_re: p.omega0 * s.beta_im,
        beta_im: -p.omega0 * s.beta_re - 2.0 * g * s.alpha_re,
    }
}

/// Nonlinear oscillator model in intensive variables:
/// the cavity equation gains the factor `1 - |beta|^2 / 2` and the atomic
/// equation the complex factor `1 - (2|beta|^2 + beta^2) / 2`.
pub fn nom_rhs(p: &DickeParams, s: &OmState, t: f64) -> OmState {
    let g = p.coupling_at(t);
    let br = s.beta_re;
    let bi = s.beta_im;
    let n = br * br + bi * bi;
    // 1 - (2|b|^2 + b^2)/2 split into real and imaginary parts.
    let f_re = 1.0 - 0.5 * (3.0 * br * br + bi * bi);
    let f_im = -br * bi;
    let two_ar = 2.0 * s.alpha_re;
    OmState {
        alpha_re: p.omega * s.alpha_im - p.kappa * s.alpha_re,
        alpha_im: -p.omega * s.alpha_re - 2.0 * g * br * (1.0 - 0.5 * n)
            - p.kappa * s.alpha_im,
        beta_re: p.omega0 * s.beta_im + g * two_ar * f_im,
        beta_im: -p.omega0 * s.beta_re - g * two_ar * f_re,
    }
}

/// Pseudo-energy of the closed undriven linear model (`kappa = 0`, `A = 0`):
///
/// `H = (px^2 + py^2)/2 + (w^2 x^2 + w0^2 y^2)/2 + 2 g sqrt(w w0) x y`
///
/// with `x = alpha_re sqrt(2/w)`, `px = alpha_im sqrt(2w)` and likewise for
/// the atomic mode. Conserved by the `kappa = 0` flow; handy as an
/// integration oracle.
pub fn lom_pseudo_energy(p: &DickeParams, s: &OmState) -> f64 {
    let x = s.alpha_re * (2.0 / p.omega).sqrt();
    let px = s.alpha_im * (2.0 * p.omega).sqrt();
    let y = s.beta_re * (2.0 / p.omega0).sqrt();
    let py = s.beta_im * (2.0 * p.omega0).sqrt();
    0.5 * (px * px + py * py)
        + 0.5 * (p.omega * p.omega * x * x + p.omega0 * p.omega0 * y * y)
        + 2.0 * p.drive.base * (p.omega * p.omega0).sqrt() * x * y
}
