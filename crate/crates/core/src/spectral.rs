//! Closed-form resonance layer for the oscillator reductions of the open
//! Dicke model: polariton frequencies, eigenmodes, critical dissipation
//! strengths, drive-amplitude scaling, and resonance predictions, all
//! cross-checkable against a numeric eigenvalue oracle.
//!
//! Conventions: `omega0 = omega` throughout this layer and
//! `g = g_ratio * g_c(omega, omega, kappa)`.

use num_complex::Complex64;

use crate::dicke::critical_coupling;
use crate::error::{Error, Result};

/// Tolerance inside which a radicand is snapped to an exact branch point.
const BRANCH_EPS: f64 = 1e-12;

/// Principal square root that keeps purely real inputs on exact real or
/// imaginary axes (no 1e-16 spillover from polar rounding).
fn sqrt_principal(re: f64, im: f64) -> Complex64 {
    if im == 0.0 {
        let re = if re.abs() < BRANCH_EPS { 0.0 } else { re };
        if re >= 0.0 {
            Complex64::new(re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-re).sqrt())
        }
    } else {
        Complex64::new(re, im).sqrt()
    }
}

/// Polariton frequencies of the open linear model,
/// `Omega_pm = sqrt(w^2 - k^2/4 pm 2 w sqrt(g^2 - k^2/4))`,
/// on principal complex branches.
pub fn polariton_frequencies(omega: f64, kappa: f64, g_ratio: f64) -> (Complex64, Complex64) {
    let g = g_ratio * critical_coupling(omega, omega, kappa);
    let inner = sqrt_principal(g * g - 0.25 * kappa * kappa, 0.0);
    let base = omega * omega - 0.25 * kappa * kappa;
    let plus = 2.0 * omega * inner;
    let omega_plus = sqrt_principal(base + plus.re, plus.im);
    let omega_minus = sqrt_principal(base - plus.re, -plus.im);
    (omega_plus, omega_minus)
}

/// Upper and lower eigenmode branches of the open linear model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonSpectrum {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// `eps_pm^U = -kappa/2 + i Omega_pm`
    pub eps_plus_upper: Complex64,
    pub eps_minus_upper: Complex64,
    /// `eps_pm^L = -kappa/2 - i Omega_pm`
    pub eps_plus_lower: Complex64,
    pub eps_minus_lower: Complex64,
}

impl PolaritonSpectrum {
    pub fn eigenmodes(&self) -> [Complex64; 4] {
        [
            self.eps_plus_upper,
            self.eps_plus_lower,
            self.eps_minus_upper,
            self.eps_minus_lower,
        ]
    }
}

/// All four eigenmodes `-kappa/2 pm i Omega_pm`.
pub fn eigenmodes(omega: f64, kappa: f64, g_ratio: f64) -> PolaritonSpectrum {
    let (op, om) = polariton_frequencies(omega, kappa, g_ratio);
    let i = Complex64::new(0.0, 1.0);
    let shift = Complex64::new(-0.5 * kappa, 0.0);
    PolaritonSpectrum {
        omega_plus: op,
        omega_minus: om,
        eps_plus_upper: shift + i * op,
        eps_plus_lower: shift - i * op,
        eps_minus_upper: shift + i * om,
        eps_minus_lower: shift - i * om,
    }
}

/// Bad-cavity asymptotes of the eigenmode branches:
/// `eps^U -> pm i w sqrt(1 - g'^2)` and `eps^L -> -kappa pm i w sqrt(1 - g'^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeKappaAsymptotes {
    pub upper: [Complex64; 2],
    pub lower: [Complex64; 2],
}

pub fn large_kappa_asymptotes(omega: f64, kappa: f64, g_ratio: f64) -> LargeKappaAsymptotes {
    let w = omega * (1.0 - g_ratio * g_ratio).max(0.0).sqrt();
    LargeKappaAsymptotes {
        upper: [Complex64::new(0.0, w), Complex64::new(0.0, -w)],
        lower: [Complex64::new(-kappa, w), Complex64::new(-kappa, -w)],
    }
}

/// Independent eigenvalue oracle: characteristic polynomial of the 4x4
/// first-order matrix for the coupled `x_pm` oscillators
/// `x_pm'' + w_pm^2 x_pm = -kappa x_mp'`, in the state order
/// `(x_+, x_+', x_-, x_-')`:
///
/// ```text
///     | 0      1     0     0     |
/// M = | -w+^2  0     0     -kappa|,   w_pm^2 = w^2 + k^2/4 pm 2 g w,
///     | 0      0     0     1     |
///     | 0     -kappa -w-^2 0     |
/// ```
///
/// computed via Faddeev-LeVerrier traces and solved as a biquadratic (the
/// cross-damping couples each acceleration to the other mode's *velocity*,
/// which keeps the polynomial even). The matrix lives in the frame where
/// the `-kappa/2` damping envelope has been factored out, so its
/// eigenvalues are `pm i Omega_pm`.
pub fn eigen_oracle(omega: f64, kappa: f64, g_ratio: f64) -> [Complex64; 4] {
    let g = g_ratio * critical_coupling(omega, omega, kappa);
    let wp2 = omega * omega + 0.25 * kappa * kappa + 2.0 * g * omega;
    let wm2 = omega * omega + 0.25 * kappa * kappa - 2.0 * g * omega;
    let m = [
        [0.0, 1.0, 0.0, 0.0],
        [-wp2, 0.0, 0.0, -kappa],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, -kappa, -wm2, 0.0],
    ];

    // Power traces p_k = tr(M^k), then Newton's identities for the
    // elementary symmetric polynomials e_k.
    let m2 = matmul(&m, &m);
    let m3 = matmul(&m2, &m);
    let m4 = matmul(&m3, &m);
    let p = [trace(&m), trace(&m2), trace(&m3), trace(&m4)];
    let e1 = p[0];
    let e2 = (e1 * p[0] - p[1]) / 2.0;
    let e3 = (e2 * p[0] - e1 * p[1] + p[2]) / 3.0;
    let e4 = (e3 * p[0] - e2 * p[1] + e1 * p[2] - p[3]) / 4.0;
    debug_assert!(e1.abs() < 1e-9 && e3.abs() < 1e-9);

    // s^4 + e2 s^2 + e4 = 0 (odd coefficients vanish by structure).
    let disc = sqrt_principal(e2 * e2 - 4.0 * e4, 0.0);
    let s2_a = (Complex64::new(-e2, 0.0) + disc) / 2.0;
    let s2_b = (Complex64::new(-e2, 0.0) - disc) / 2.0;
    let ra = sqrt_principal(s2_a.re, s2_a.im);
    let rb = sqrt_principal(s2_b.re, s2_b.im);
    [ra, -ra, rb, -rb]
}

fn matmul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn trace(a: &[[f64; 4]; 4]) -> f64 {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// Critical dissipation strengths of the lower and upper polariton modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaCritical {
    /// `kappa'_c`: onset of the overdamped window of the lower mode;
    /// undefined for `g' < sqrt(3)/2`.
    pub lower_onset: Option<f64>,
    /// `kappa''_c`: upper edge of the overdamped window; `+inf` at `g' = 1`
    /// (the window never closes).
    pub upper_edge: f64,
    /// `kappa'_+`: onset of the upper-mode overdamped window; undefined for
    /// `g' < sqrt(3)/2`.
    pub upper_onset: Option<f64>,
}

/// `kappa'_c = 2w sqrt(2g'^2 - 1 - g' sqrt(4g'^2 - 3))`,
/// `kappa''_c = w / sqrt(1/g'^2 - 1)`, and
/// `kappa'_+ = 2w sqrt(2g'^2 - 1 + g' sqrt(4g'^2 - 3))`.
pub fn kappa_critical(omega: f64, g_ratio: f64) -> KappaCritical {
    let g2 = g_ratio * g_ratio;
    let disc = 4.0 * g2 - 3.0;
    let (lower_onset, upper_onset) = if disc < 0.0 {
        (None, None)
    } else {
        let root = g_ratio * disc.sqrt();
        let lo = 2.0 * g2 - 1.0 - root;
        let hi = 2.0 * g2 - 1.0 + root;
        (
            (lo >= -BRANCH_EPS).then(|| 2.0 * omega * lo.max(0.0).sqrt()),
            (hi >= -BRANCH_EPS).then(|| 2.0 * omega * hi.max(0.0).sqrt()),
        )
    };
    let upper_edge = if g_ratio >= 1.0 {
        f64::INFINITY
    } else {
        omega / (1.0 / g2 - 1.0).sqrt()
    };
    KappaCritical { lower_onset, upper_edge, upper_onset }
}

/// Drive-amplitude scaling of the diagonalized polariton drive,
/// `delta = g'^2 (k^2 + w^2) / (g'^2 (k^2 + w^2) - k^2)`.
///
/// Fails at the pole, which coincides with `kappa''_c`.
pub fn drive_amp_scaling(omega: f64, kappa: f64, g_ratio: f64) -> Result<f64> {
    let num = g_ratio * g_ratio * (kappa * kappa + omega * omega);
    let den = num - kappa * kappa;
    if den.abs() < BRANCH_EPS {
        return Err(Error::ScalingPole);
    }
    Ok(num / den)
}

/// Predicted location of the primary parametric resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePrediction {
    /// Resonant drive frequency `2 Re(Omega_-)`.
    pub omega_r: f64,
    /// Minimum resonant amplitude `A_r = 2 Omega_inf kappa / (w^2 + k^2)`.
    pub a_r: f64,
    /// Bad-cavity resonance `2 w sqrt(1 - g'^2)`.
    pub omega_r_large_kappa: f64,
    /// Dissipation maximizing `A_r`; equals `omega` by stationarity.
    pub kappa_max: f64,
    pub kappa_c_prime: Option<f64>,
    pub kappa_c_dprime: f64,
    pub kappa_plus_prime: Option<f64>,
    /// Drive-amplitude scaling, absent at its pole.
    pub delta: Option<f64>,
    /// Inside the overdamped window `Re(Omega_-) = 0` the analytic
    /// `omega_r` is known to sit below the simulated one.
    pub prediction_unreliable: bool,
}

pub fn resonance_prediction(omega: f64, kappa: f64, g_ratio: f64) -> ResonancePrediction {
    let (_, om) = polariton_frequencies(omega, kappa, g_ratio);
    let crit = kappa_critical(omega, g_ratio);
    let omega_inf = omega * (1.0 - g_ratio * g_ratio).max(0.0).sqrt();
    let overdamped = match crit.lower_onset {
        Some(lo) => kappa > lo && kappa < crit.upper_edge,
        None => false,
    };
    ResonancePrediction {
        omega_r: 2.0 * om.re,
        a_r: 2.0 * omega_inf * kappa / (omega * omega + kappa * kappa),
        omega_r_large_kappa: 2.0 * omega_inf,
        kappa_max: omega,
        kappa_c_prime: crit.lower_onset,
        kappa_c_dprime: crit.upper_edge,
        kappa_plus_prime: crit.upper_onset,
        delta: drive_amp_scaling(omega, kappa, g_ratio).ok(),
        prediction_unreliable: overdamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G9: f64 = 0.9;

    #[test]
    fn uncoupled_limit_degenerates_to_omega() {
        // g -> 0 with kappa = 0 leaves two bare oscillators at frequency w.
        let (op, om) = polariton_frequencies(1.0, 0.0, 1e-12);
        assert!((op.re - 1.0).abs() < 1e-9 && op.im == 0.0);
        assert!((om.re - 1.0).abs() < 1e-9 && om.im == 0.0);
    }

    #[test]
    fn closed_system_polaritons() {
        let (op, om) = polariton_frequencies(1.0, 0.0, G9);
        assert!((op.re - 1.3784048752090222).abs() < 1e-14);
        assert!((om.re - 0.31622776601683794).abs() < 1e-14);
        assert_eq!((op.im, om.im), (0.0, 0.0));
    }

    #[test]
    fn open_lower_polariton() {
        let (_, om) = polariton_frequencies(1.0, 0.5, G9);
        assert!((om.re - 0.2535498770880218).abs() < 1e-14);
        assert_eq!(om.im, 0.0);
    }

    #[test]
    fn eigenmode_real_parts() {
        let s = eigenmodes(1.0, 0.0, G9);
        for e in s.eigenmodes() {
            assert_eq!(e.re, 0.0);
        }
        // Below kappa'_c all four modes share the -kappa/2 damping.
        let s = eigenmodes(1.0, 0.5, G9);
        for e in s.eigenmodes() {
            assert!((e.re + 0.25).abs() < 1e-14);
        }
        // Eigenmodes come in conjugate pairs.
        assert_eq!(s.eps_plus_upper.conj(), s.eps_plus_lower);
        assert_eq!(s.eps_minus_upper.conj(), s.eps_minus_lower);
    }

    #[test]
    fn bad_cavity_limit_splits_branches() {
        let kappa = 20.0;
        let s = eigenmodes(1.0, kappa, G9);
        let asym = 0.4358898943540673;
        // Two modes become nearly undamped with Im -> +-w sqrt(1-g'^2)...
        let mut near_zero: Vec<Complex64> = s
            .eigenmodes()
            .into_iter()
            .filter(|e| e.re.abs() < 1.0 / kappa)
            .collect();
        near_zero.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert_eq!(near_zero.len(), 2);
        assert!((near_zero[0].im + asym).abs() < 1e-3);
        assert!((near_zero[1].im - asym).abs() < 1e-3);
        // ...and the other two carry the full -kappa damping.
        let heavy: Vec<Complex64> = s
            .eigenmodes()
            .into_iter()
            .filter(|e| e.re.abs() >= 1.0 / kappa)
            .collect();
        for e in heavy {
            assert!((e.re + kappa).abs() < 0.1);
        }
        let a = large_kappa_asymptotes(1.0, kappa, G9);
        assert!((a.upper[0].im - asym).abs() < 1e-15);
        assert!((a.lower[0].re + kappa).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_closed_form_block_diagonal() {
        let (op, om) = polariton_frequencies(1.0, 0.0, G9);
        let eig = eigen_oracle(1.0, 0.0, G9);
        let mut ims: Vec<f64> = eig.iter().map(|e| e.im.abs()).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] - om.re).abs() < 1e-10);
        assert!((ims[1] - om.re).abs() < 1e-10);
        assert!((ims[2] - op.re).abs() < 1e-10);
        assert!((ims[3] - op.re).abs() < 1e-10);
        for e in eig {
            assert!(e.re.abs() < 1e-10);
        }
    }

    /// Largest distance between the oracle eigenvalue set and `{pm i Omega_pm}`.
    fn oracle_mismatch(omega: f64, kappa: f64, g_ratio: f64) -> f64 {
        let (op, om) = polariton_frequencies(omega, kappa, g_ratio);
        let i = Complex64::new(0.0, 1.0);
        let expected = [i * op, -(i * op), i * om, -(i * om)];
        let eig = eigen_oracle(omega, kappa, g_ratio);
        let mut worst = 0.0f64;
        for e in eig {
            let best = expected
                .iter()
                .map(|x| (e - x).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        worst
    }

    #[test]
    fn oracle_matches_open_case() {
        assert!(oracle_mismatch(1.0, 0.5, G9) < 1e-10);
    }

    #[test]
    fn oracle_fuzz_grid() {
        // Deterministic fuzz over kappa in [0, 5], g' in (0, 1).
        let mut worst = 0.0f64;
        for i in 0..60 {
            let kappa = 5.0 * i as f64 / 59.0;
            for j in 0..40 {
                let gp = 0.02 + 0.96 * j as f64 / 39.0;
                let crit = kappa_critical(1.0, gp);
                // Skip branch-point neighborhoods, where sqrt conditioning
                // blows up the comparison but not the physics.
                let near_branch = [
                    crit.lower_onset.unwrap_or(f64::NAN),
                    crit.upper_edge,
                    crit.upper_onset.unwrap_or(f64::NAN),
                ]
                .iter()
                .any(|k| (kappa - k).abs() < 1e-6);
                if near_branch {
                    continue;
                }
                worst = worst.max(oracle_mismatch(1.0, kappa, gp));
            }
        }
        assert!(worst < 1e-8, "worst oracle mismatch {worst}");
    }

    #[test]
    fn critical_kappas() {
        let c = kappa_critical(1.0, G9);
        assert!((c.lower_onset.unwrap() - 0.8463848918760966).abs() < 1e-14);
        assert!((c.upper_edge - 2.0647416048350559).abs() < 1e-14);
        assert!((c.upper_onset.unwrap() - 2.0600079161993257).abs() < 1e-14);

        let c1 = kappa_critical(1.0, 1.0);
        assert_eq!(c1.lower_onset, Some(0.0));
        assert!(c1.upper_edge.is_infinite());

        let low = kappa_critical(1.0, 0.5);
        assert_eq!(low.lower_onset, None);
        assert_eq!(low.upper_onset, None);
    }

    #[test]
    fn overdamped_window_is_exact() {
        let c = kappa_critical(1.0, G9);
        let (lo, hi) = (c.lower_onset.unwrap(), c.upper_edge);
        for i in 0..200 {
            let kappa = 3.0 * i as f64 / 199.0;
            let (_, om) = polariton_frequencies(1.0, kappa, G9);
            if kappa > lo + 1e-9 && kappa < hi - 1e-9 {
                assert_eq!(om.re, 0.0, "Re(Omega_-) != 0 at kappa = {kappa}");
            } else if (kappa - lo).abs() > 1e-9 && (kappa - hi).abs() > 1e-9 {
                assert!(om.re > 0.0, "Re(Omega_-) = 0 outside window at {kappa}");
            }
        }
    }

    #[test]
    fn scaling_values_and_pole() {
        assert_eq!(drive_amp_scaling(1.0, 0.0, G9).unwrap(), 1.0);
        let d = drive_amp_scaling(1.0, 0.5, G9).unwrap();
        assert!((d - 1.3278688524590163).abs() < 1e-14);
        let pole = kappa_critical(1.0, G9).upper_edge;
        assert!(matches!(
            drive_amp_scaling(1.0, pole, G9),
            Err(Error::ScalingPole)
        ));
        // The pole location coincides with kappa''_c.
        let den = |k: f64| G9 * G9 * (k * k + 1.0) - k * k;
        assert!(den(pole).abs() < 1e-12);
    }

    #[test]
    fn resonance_prediction_values() {
        let r = resonance_prediction(1.0, 0.0, G9);
        assert!((r.omega_r - 0.6324555320336759).abs() < 1e-14);
        assert_eq!(r.a_r, 0.0);
        assert!(!r.prediction_unreliable);

        let r = resonance_prediction(1.0, 1.0, G9);
        assert!((r.a_r - 0.4358898943540673).abs() < 1e-14);
        assert_eq!(r.kappa_max, 1.0);
        assert!(r.prediction_unreliable); // 1.0 sits inside (0.846, 2.065)

        // Asymptote: 2 Re(Omega_-) approaches 2 w sqrt(1 - g'^2) at large kappa.
        let r = resonance_prediction(1.0, 50.0, G9);
        assert!((r.omega_r - r.omega_r_large_kappa).abs() < 1e-2);
    }

    #[test]
    fn a_r_is_symmetric_under_kappa_inversion() {
        for i in 1..50 {
            let kappa = 0.1 + 3.0 * i as f64 / 49.0;
            let a1 = resonance_prediction(1.0, kappa, G9).a_r;
            let a2 = resonance_prediction(1.0, 1.0 / kappa, G9).a_r;
            assert!((a1 - a2).abs() < 1e-12);
        }
        // Maximum at kappa = omega.
        let peak = resonance_prediction(1.0, 1.0, G9).a_r;
        for kappa in [0.5, 0.9, 1.1, 2.0] {
            assert!(resonance_prediction(1.0, kappa, G9).a_r < peak);
        }
    }
}
