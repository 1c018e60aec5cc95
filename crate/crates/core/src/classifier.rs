//! Dynamical-phase classification of trajectory pairs.
//!
//! The pipeline mirrors how the phase diagrams are assembled: boundedness
//! thresholds on the order parameter, a time-averaged decorrelator between
//! an original and a slightly perturbed run, amplitude-envelope statistics
//! over the trajectory tail, and subharmonic peak detection on a Fourier
//! window spanning the last few drive periods.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dynamics::{DriveSpec, Trajectory};
use crate::error::{Error, Result};
use crate::ModelKind;

/// Thresholds and windows of the classification pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    /// Order-parameter ceiling for the normal phase.
    pub np_threshold: f64,
    /// A run also counts as normal-phase when its order parameter never
    /// grows beyond this factor times the seed amplitude. Keeps undamped
    /// (`kappa = 0`) fixed-point oscillations, whose amplitude stays at the
    /// seed scale forever, from leaking into the dynamical labels.
    pub np_growth_factor: f64,
    /// Order-parameter level above which dynamics counts as unbounded.
    pub ub_threshold: f64,
    /// Decorrelator level above which dynamics counts as chaotic.
    pub d2_threshold: f64,
    /// Relative standard deviation of the amplitude envelope admitted for
    /// constant-amplitude (time-crystalline) oscillation.
    pub sigma_amp_threshold: f64,
    /// Fourier window length, in drive periods, taken from the end.
    pub fft_window_periods: f64,
    /// Initial-state offset of the perturbed twin run.
    pub perturbation: f64,
    /// Fraction of the trajectory tail used for envelope statistics.
    pub envelope_window: f64,
    /// Acceptance slack on `omega_d / freq` when rounding to an integer
    /// subharmonic order.
    pub subharmonic_tol: f64,
    /// Spectral peaks below this fraction of the main peak are ignored.
    pub peak_floor: f64,
    /// `|mean(Z) + 1|` below this labels a beating phase as normal beating.
    pub center_tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            np_threshold: 1e-3,
            np_growth_factor: 3.0,
            ub_threshold: 1.0,
            d2_threshold: 1e-3,
            sigma_amp_threshold: 1e-2,
            fft_window_periods: 10.0,
            perturbation: 1e-6,
            envelope_window: 0.5,
            subharmonic_tol: 0.05,
            peak_floor: 0.05,
            center_tol: 0.05,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("np_threshold", self.np_threshold),
            ("np_growth_factor", self.np_growth_factor),
            ("ub_threshold", self.ub_threshold),
            ("d2_threshold", self.d2_threshold),
            ("sigma_amp_threshold", self.sigma_amp_threshold),
            ("perturbation", self.perturbation),
            ("subharmonic_tol", self.subharmonic_tol),
            ("peak_floor", self.peak_floor),
            ("center_tol", self.center_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.fft_window_periods < 4.0 {
            return Err(Error::Config(format!(
                "fft_window_periods must be >= 4, got {}",
                self.fft_window_periods
            )));
        }
        if !(0.0 < self.envelope_window && self.envelope_window <= 1.0) {
            return Err(Error::Config(format!(
                "envelope_window must lie in (0, 1], got {}",
                self.envelope_window
            )));
        }
        Ok(())
    }
}

/// Classification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Normal phase: the order parameter never grows beyond the seed.
    Np,
    /// Static symmetry-broken phase.
    Sb,
    /// Unbounded (unphysical) parametric growth.
    Ub,
    /// Period-doubled response with constant amplitude.
    Dtc2T,
    /// Higher-order subharmonic response (period `order * T`).
    DtcHo { order: u32 },
    /// Normal beating: bounded multi-tone oscillation about the down pole.
    Nb,
    /// Symmetry-broken beating: multi-tone oscillation away from the pole.
    Sbb,
    Chaotic,
    OtherNonDtc,
}

impl LabelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelKind::Np => "NP",
            LabelKind::Sb => "SB",
            LabelKind::Ub => "UB",
            LabelKind::Dtc2T => "DTC_2T",
            LabelKind::DtcHo { .. } => "DTC_HO",
            LabelKind::Nb => "NB",
            LabelKind::Sbb => "SBB",
            LabelKind::Chaotic => "Chaotic",
            LabelKind::OtherNonDtc => "OtherNonDTC",
        }
    }

    /// Same phase family, ignoring the subharmonic order.
    pub fn same_kind(&self, other: &LabelKind) -> bool {
        self.as_str() == other.as_str()
    }

    pub fn is_dtc(&self) -> bool {
        matches!(self, LabelKind::Dtc2T | LabelKind::DtcHo { .. })
    }

    pub fn from_parts(label: &str, order: u32) -> Result<Self> {
        Ok(match label {
            "NP" => LabelKind::Np,
            "SB" => LabelKind::Sb,
            "UB" => LabelKind::Ub,
            "DTC_2T" => LabelKind::Dtc2T,
            "DTC_HO" => LabelKind::DtcHo { order },
            "NB" => LabelKind::Nb,
            "SBB" => LabelKind::Sbb,
            "Chaotic" => LabelKind::Chaotic,
            "OtherNonDTC" => LabelKind::OtherNonDtc,
            other => return Err(Error::Parse(format!("unknown phase label '{other}'"))),
        })
    }
}

impl std::fmt::Display for LabelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numbers the decision was based on; persisted next to every label so
/// thresholds can be re-examined without re-simulating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Max of the order parameter magnitude over the (original) run.
    pub max_amp: f64,
    /// Time-averaged decorrelator; absent when the runs truncated at
    /// different lengths.
    pub d2: Option<f64>,
    /// Relative envelope deviation; absent without enough tail maxima.
    pub sigma_amp: Option<f64>,
    /// Detected subharmonic order `n` with response at `omega_d / n`.
    pub response_order: Option<u32>,
    /// Dominant angular frequency of the tail spectrum.
    pub dominant_freq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    pub kind: LabelKind,
    pub diagnostics: Diagnostics,
}

/// Order-parameter views of a trajectory, as consumed by [`classify`].
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    /// Primary order parameter: `J_x / N` for the cavity models, `X` for
    /// the collective-spin model.
    pub primary: Vec<f64>,
    /// Second decorrelator observable: `2 Re(alpha)`, or `Y` for the
    /// collective-spin model.
    pub secondary: Vec<f64>,
    /// `Z` for the collective-spin model (used to tell beating phases
    /// centered on the pole from off-pole ones).
    pub center: Option<Vec<f64>>,
    pub sample_dt: f64,
    pub diverged: bool,
}

/// Extract the classifier observables from a recorded trajectory.
pub fn observables(traj: &Trajectory, kind: ModelKind) -> Result<ObservableSeries> {
    let expect = kind.component_names().len();
    if traj.ncomp != expect {
        return Err(Error::Parse(format!(
            "trajectory has {} components, {} expects {expect}",
            traj.ncomp, kind
        )));
    }
    let series = |i: usize| traj.component(i);
    let (primary, secondary, center) = match kind {
        ModelKind::DickeMf => (
            traj.samples().map(|s| s[2] / 2.0).collect(),
            traj.samples().map(|s| 2.0 * s[0]).collect(),
            None,
        ),
        ModelKind::Lom | ModelKind::Nom => (
            series(2),
            traj.samples().map(|s| 2.0 * s[0]).collect(),
            None,
        ),
        ModelKind::Lmg => (series(0), series(1), Some(series(2))),
    };
    Ok(ObservableSeries {
        primary,
        secondary,
        center,
        sample_dt: traj.sample_dt(),
        diverged: traj.diverged.is_some(),
    })
}

/// Time-averaged decorrelator between two sets of observable series:
/// `d^2 = (1/n) sum_t sum_i (|O_i^o(t)|^2 - |O_i^p(t)|^2)^2`,
/// averaged over the recorded samples.
pub fn decorrelator(obs_o: &[&[f64]], obs_p: &[&[f64]]) -> Result<f64> {
    assert_eq!(obs_o.len(), obs_p.len(), "observable count mismatch");
    let n = obs_o.first().map_or(0, |s| s.len());
    for (o, p) in obs_o.iter().zip(obs_p) {
        if o.len() != p.len() || o.len() != n {
            return Err(Error::LengthMismatch { left: o.len(), right: p.len() });
        }
    }
    if n == 0 {
        return Err(Error::LengthMismatch { left: 0, right: 0 });
    }
    let mut acc = 0.0;
    for (o, p) in obs_o.iter().zip(obs_p) {
        for (a, b) in o.iter().zip(p.iter()) {
            let diff = a * a - b * b;
            acc += diff * diff;
        }
    }
    Ok(acc / n as f64)
}

/// Local maxima of `|series|` over the tail window, plus their relative
/// standard deviation. Needs at least four maxima to form a statistic.
pub fn amplitude_envelope(
    series: &[f64],
    config: &ClassifierConfig,
) -> Result<(Vec<f64>, f64)> {
    let start = tail_start(series.len(), config.envelope_window);
    let tail = &series[start..];
    let mut peaks = Vec::new();
    for k in 1..tail.len().saturating_sub(1) {
        let (a, b, c) = (tail[k - 1].abs(), tail[k].abs(), tail[k + 1].abs());
        if b >= a && b > c {
            peaks.push(b);
        }
    }
    if peaks.len() < 4 {
        return Err(Error::InsufficientData { found: peaks.len() });
    }
    let mean = peaks.iter().sum::<f64>() / peaks.len() as f64;
    let var =
        peaks.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / peaks.len() as f64;
    Ok((peaks, var.sqrt() / mean))
}

fn tail_start(len: usize, window: f64) -> usize {
    len - ((len as f64 * window).round() as usize).clamp(1, len)
}

/// Magnitude spectrum (DC through Nyquist) of the mean-subtracted series.
fn magnitude_spectrum(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> =
        series.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().take(n / 2 + 1).map(|c| c.norm() * 2.0 / n as f64).collect()
}

/// `|DTFT|` at angular frequency `w` of a pre-tapered series.
fn dtft_magnitude(tapered: &[f64], dt: f64, w: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, x) in tapered.iter().enumerate() {
        let phase = -w * k as f64 * dt;
        re += x * phase.cos();
        im += x * phase.sin();
    }
    re.hypot(im)
}

/// Golden-section maximization of the Hann-tapered DTFT magnitude around a
/// coarse bin. The taper suppresses leakage from the negative-frequency
/// image, which otherwise shifts peaks that sit only a few cycles inside
/// the window.
fn refine_peak(series: &[f64], dt: f64, mut lo: f64, mut hi: f64) -> f64 {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let tapered: Vec<f64> = series
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let hann =
                0.5 - 0.5 * (std::f64::consts::TAU * k as f64 / (n - 1) as f64).cos();
            (v - mean) * hann
        })
        .collect();
    let inv_phi = 0.618_033_988_749_894_9;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = dtft_magnitude(&tapered, dt, a);
    let mut fb = dtft_magnitude(&tapered, dt, b);
    for _ in 0..48 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = dtft_magnitude(&tapered, dt, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = dtft_magnitude(&tapered, dt, b);
        }
    }
    0.5 * (lo + hi)
}

/// Slice covering the last `fft_window_periods` drive periods.
fn fourier_window<'a>(
    series: &'a [f64],
    sample_dt: f64,
    drive: &DriveSpec,
    config: &ClassifierConfig,
) -> &'a [f64] {
    let span = config.fft_window_periods * drive.period();
    let want = (span / sample_dt).round() as usize + 1;
    let n = series.len();
    &series[n.saturating_sub(want.max(8).min(n))..]
}

/// Dominant angular frequency of the tail spectrum and, when it divides the
/// drive frequency to within `subharmonic_tol`, the response order
/// `n = omega_d / freq`.
///
/// The coarse FFT peak is refined against the continuous DTFT, so orders
/// whose subharmonic falls between bins (e.g. `n = 4` on a 10-period
/// window) are still resolved.
pub fn dominant_response_frequency(
    series: &[f64],
    sample_dt: f64,
    drive: &DriveSpec,
    config: &ClassifierConfig,
) -> Option<(f64, Option<u32>)> {
    let window = fourier_window(series, sample_dt, drive, config);
    let n = window.len();
    if n < 8 {
        return None;
    }
    let mean = window.iter().sum::<f64>() / n as f64;
    if window.iter().all(|v| (v - mean).abs() < 1e-300) {
        return None; // flat series, empty spectrum
    }
    let spec = magnitude_spectrum(window);
    let bin = std::f64::consts::TAU / (n as f64 * sample_dt);
    let (k_star, _) = spec
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let lo = (k_star as f64 - 1.0).max(0.25) * bin;
    let hi = (k_star as f64 + 1.0) * bin;
    let freq = refine_peak(window, sample_dt, lo, hi);
    let ratio = drive.frequency / freq;
    let order = ratio.round();
    let n_sub = (order >= 1.0 && (ratio - order).abs() < config.subharmonic_tol)
        .then_some(order as u32);
    Some((freq, n_sub))
}

/// Spectral peaks of the tail window above the configured floor.
#[derive(Debug, Clone)]
pub struct SpectrumPeaks {
    /// Angular-frequency width of one FFT bin.
    pub bin_width: f64,
    /// `(angular frequency, magnitude)` of each retained local maximum,
    /// in increasing frequency.
    pub peaks: Vec<(f64, f64)>,
}

/// Peaks of the envelope-window tail (a much longer stretch than the
/// drive-period Fourier window, so closely spaced beating tones resolve).
pub fn tail_spectrum_peaks(
    series: &[f64],
    sample_dt: f64,
    config: &ClassifierConfig,
) -> SpectrumPeaks {
    let window = &series[tail_start(series.len(), config.envelope_window)..];
    let n = window.len();
    let bin = std::f64::consts::TAU / (n as f64 * sample_dt);
    let spec = magnitude_spectrum(window);
    let top = spec.iter().skip(1).cloned().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for k in 1..spec.len().saturating_sub(1) {
        if spec[k] >= spec[k - 1]
            && spec[k] > spec[k + 1]
            && spec[k] >= config.peak_floor * top
        {
            peaks.push((k as f64 * bin, spec[k]));
        }
    }
    SpectrumPeaks { bin_width: bin, peaks }
}

/// At least three peaks with near-uniform spacing.
fn evenly_spaced(peaks: &SpectrumPeaks) -> bool {
    if peaks.peaks.len() < 3 {
        return false;
    }
    let freqs: Vec<f64> = peaks.peaks.iter().map(|p| p.0).collect();
    let diffs: Vec<f64> = freqs.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let slack = (2.0 * peaks.bin_width).max(0.2 * mean);
    diffs.iter().all(|d| (d - mean).abs() <= slack)
}

/// Full decision pipeline, in precedence order: unbounded, normal phase,
/// static symmetry breaking, chaos, constant-amplitude subharmonics,
/// beating phases, and a catch-all for everything else bounded.
pub fn classify(
    orig: &ObservableSeries,
    pert: &ObservableSeries,
    kind: ModelKind,
    drive: &DriveSpec,
    config: &ClassifierConfig,
) -> Result<PhaseLabel> {
    config.validate()?;
    if orig.primary.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: pert.primary.len() });
    }

    let max_amp = orig.primary.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d2 = if orig.primary.len() == pert.primary.len() {
        Some(decorrelator(
            &[&orig.primary, &orig.secondary],
            &[&pert.primary, &pert.secondary],
        )?)
    } else {
        None
    };
    let mut diag = Diagnostics {
        max_amp,
        d2,
        sigma_amp: None,
        response_order: None,
        dominant_freq: None,
    };

    // 1. Unbounded growth: a truncated run or an unphysical amplitude.
    if orig.diverged || pert.diverged || max_amp > config.ub_threshold {
        return Ok(PhaseLabel { kind: LabelKind::Ub, diagnostics: diag });
    }

    // 2. Normal phase: never grew past the seed scale.
    let seed = orig.primary[0].abs();
    let np_floor = config.np_threshold.max(config.np_growth_factor * seed);
    if max_amp <= np_floor {
        return Ok(PhaseLabel { kind: LabelKind::Np, diagnostics: diag });
    }

    // 3. Static symmetry breaking (collective-spin model only). Undriven
    // non-normal dynamics is symmetry-broken by elimination; under drive a
    // nonzero mean with a collapsed tail oscillation counts as well.
    if kind == ModelKind::Lmg {
        if drive.amplitude == 0.0 {
            return Ok(PhaseLabel { kind: LabelKind::Sb, diagnostics: diag });
        }
        let tail = &orig.primary[tail_start(orig.primary.len(), 0.1)..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let osc = tail.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        if mean.abs() > np_floor && osc < config.np_threshold.max(0.02 * mean.abs()) {
            return Ok(PhaseLabel { kind: LabelKind::Sb, diagnostics: diag });
        }
    }

    // 4. Chaos: the perturbed twin decorrelated.
    let d2 = d2.expect("equal lengths guaranteed for bounded runs");
    if d2 > config.d2_threshold {
        return Ok(PhaseLabel { kind: LabelKind::Chaotic, diagnostics: diag });
    }

    // 5. Constant-amplitude subharmonic response.
    let sigma = match amplitude_envelope(&orig.primary, config) {
        Ok((_, sigma)) => {
            diag.sigma_amp = Some(sigma);
            Some(sigma)
        }
        Err(Error::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some((freq, order)) =
        dominant_response_frequency(&orig.primary, orig.sample_dt, drive, config)
    {
        diag.dominant_freq = Some(freq);
        diag.response_order = order;
        if let (Some(sigma), Some(n)) = (sigma, order) {
            if n >= 2 && sigma <= config.sigma_amp_threshold {
                let kind = if n == 2 {
                    LabelKind::Dtc2T
                } else {
                    LabelKind::DtcHo { order: n }
                };
                return Ok(PhaseLabel { kind, diagnostics: diag });
            }
        }
    }

    // 6. Beating phases (collective-spin model only): an evenly spaced
    // multi-peak spectrum, split by where the oscillation is centered.
    if kind == ModelKind::Lmg {
        let peaks = tail_spectrum_peaks(&orig.primary, orig.sample_dt, config);
        if evenly_spaced(&peaks) {
            let center = orig.center.as_ref().expect("lmg series carry Z");
            let tail = &center[tail_start(center.len(), config.envelope_window)..];
            let zbar = tail.iter().sum::<f64>() / tail.len() as f64;
            let kind = if (zbar + 1.0).abs() < config.center_tol {
                LabelKind::Nb
            } else {
                LabelKind::Sbb
            };
            return Ok(PhaseLabel { kind, diagnostics: diag });
        }
    }

    Ok(PhaseLabel { kind: LabelKind::OtherNonDtc, diagnostics: diag })
}
