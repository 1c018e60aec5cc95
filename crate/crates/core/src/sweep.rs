//! Phase-diagram sweeps: configuration, per-cell simulation+classification,
//! and a work-stealing parallel driver whose output is independent of the
//! worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifier::{
    classify, observables, ClassifierConfig, Diagnostics, LabelKind, PhaseLabel,
};
use crate::dicke::{
    dicke_mf_rhs, lom_rhs, nom_rhs, np_initial_state, DickeMfState, DickeParams,
    OmState,
};
use crate::dynamics::{integrate, DriveSpec, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::lmg::{lmg_initial_state_with_seed, lmg_rhs, LmgParams, LmgState};
use crate::ModelKind;

/// One sweep axis: `count` equally spaced values of a named parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count.max(1);
        (0..n)
            .map(|i| {
                if n == 1 {
                    self.min
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }
}

/// Scalar parameters held fixed during a sweep (axes override two of them).
/// Unused entries for the selected model are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedParams {
    pub omega: f64,
    pub omega0: f64,
    pub kappa: f64,
    pub g_ratio: f64,
    pub lambda0: f64,
    pub gamma: f64,
    pub decay: f64,
    pub drive_amp: f64,
    pub omega_d: f64,
    /// Normal-phase seed displacement of the cavity models.
    pub epsilon: f64,
    /// Seed displacement along `Y` of the collective-spin model.
    pub y0: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega0: 1.0,
            kappa: 0.0,
            g_ratio: 0.9,
            lambda0: 0.8,
            gamma: 0.0,
            decay: 0.0,
            drive_amp: 0.0,
            omega_d: 1.0,
            epsilon: 0.01,
            y0: 5e-8,
        }
    }
}

impl FixedParams {
    /// Replace one named parameter; used to apply axis values.
    pub fn with(&self, name: &str, value: f64) -> Result<FixedParams> {
        let mut out = *self;
        match name {
            "omega" => out.omega = value,
            "omega0" => out.omega0 = value,
            "kappa" => out.kappa = value,
            "g_ratio" => out.g_ratio = value,
            "lambda0" => out.lambda0 = value,
            "gamma" => out.gamma = value,
            "decay" => out.decay = value,
            "drive_amp" => out.drive_amp = value,
            "omega_d" => out.omega_d = value,
            "epsilon" => out.epsilon = value,
            "y0" => out.y0 = value,
            other => {
                return Err(Error::Config(format!("unknown parameter '{other}'")))
            }
        }
        Ok(out)
    }

    pub fn is_axis_supported(kind: ModelKind, name: &str) -> bool {
        let dicke = ["omega", "omega0", "kappa", "g_ratio", "drive_amp", "omega_d", "epsilon"];
        let lmg = ["omega0", "lambda0", "gamma", "decay", "drive_amp", "omega_d", "y0"];
        match kind {
            ModelKind::DickeMf | ModelKind::Lom | ModelKind::Nom => {
                dicke.contains(&name)
            }
            ModelKind::Lmg => lmg.contains(&name),
        }
    }
}

/// A fully resolved model: kind plus constructed parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    DickeMf(DickeParams),
    Lom(DickeParams),
    Nom(DickeParams),
    Lmg(LmgParams),
}

impl ModelConfig {
    pub fn from_fixed(kind: ModelKind, f: &FixedParams) -> Result<ModelConfig> {
        Ok(match kind {
            ModelKind::DickeMf => ModelConfig::DickeMf(Self::dicke(f)?),
            ModelKind::Lom => ModelConfig::Lom(Self::dicke(f)?),
            ModelKind::Nom => ModelConfig::Nom(Self::dicke(f)?),
            ModelKind::Lmg => ModelConfig::Lmg(LmgParams::new(
                f.omega0,
                f.lambda0,
                f.gamma,
                f.decay,
                f.drive_amp,
                f.omega_d,
            )?),
        })
    }

    fn dicke(f: &FixedParams) -> Result<DickeParams> {
        DickeParams::new(f.omega, f.omega0, f.kappa, f.g_ratio, f.drive_amp, f.omega_d)
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::DickeMf(_) => ModelKind::DickeMf,
            ModelConfig::Lom(_) => ModelKind::Lom,
            ModelConfig::Nom(_) => ModelKind::Nom,
            ModelConfig::Lmg(_) => ModelKind::Lmg,
        }
    }

    pub fn drive(&self) -> &DriveSpec {
        match self {
            ModelConfig::DickeMf(p) | ModelConfig::Lom(p) | ModelConfig::Nom(p) => {
                &p.drive
            }
            ModelConfig::Lmg(p) => &p.drive,
        }
    }
}

/// Integrate one run of the given model.
///
/// `seed` is the normal-phase displacement (`epsilon` for the cavity
/// models, `Y0` for the collective-spin model); `perturbation` additionally
/// offsets the initial state for the decorrelator twin.
pub fn simulate(
    model: &ModelConfig,
    seed: f64,
    perturbation: Option<f64>,
    integ: &IntegratorConfig,
) -> Result<Trajectory> {
    match model {
        ModelConfig::DickeMf(p) => {
            let (mf, _) = np_initial_state(seed)?;
            let mf = match perturbation {
                Some(d) => mf.perturbed(d),
                None => mf,
            };
            integrate(
                |t, y: &[f64; 5]| dicke_mf_rhs(p, &DickeMfState::from_array(y), t).to_array(),
                mf.to_array(),
                integ,
                ModelKind::DickeMf.as_str(),
            )
        }
        ModelConfig::Lom(p) => {
            let (_, om) = np_initial_state(seed)?;
            let om = match perturbation {
                Some(d) => om.perturbed(d),
                None => om,
            };
            integrate(
                |t, y: &[f64; 4]| lom_rhs(p, &OmState::from_array(y), t).to_array(),
                om.to_array(),
                integ,
                ModelKind::Lom.as_str(),
            )
        }
        ModelConfig::Nom(p) => {
            let (_, om) = np_initial_state(seed)?;
            let om = match perturbation {
                Some(d) => om.perturbed(d),
                None => om,
            };
            integrate(
                |t, y: &[f64; 4]| nom_rhs(p, &OmState::from_array(y), t).to_array(),
                om.to_array(),
                integ,
                ModelKind::Nom.as_str(),
            )
        }
        ModelConfig::Lmg(p) => {
            let s = lmg_initial_state_with_seed(seed)?;
            let s = match perturbation {
                Some(d) => s.perturbed(d),
                None => s,
            };
            integrate(
                |t, y: &[f64; 3]| lmg_rhs(p, &LmgState::from_array(y), t).to_array(),
                s.to_array(),
                integ,
                ModelKind::Lmg.as_str(),
            )
        }
    }
}

/// Simulate the original/perturbed pair and classify it.
pub fn evaluate_point(
    model: &ModelConfig,
    seed: f64,
    integ: &IntegratorConfig,
    cls: &ClassifierConfig,
) -> Result<PhaseLabel> {
    let orig = simulate(model, seed, None, integ)?;
    let pert = simulate(model, seed, Some(cls.perturbation), integ)?;
    let o = observables(&orig, model.kind())?;
    let p = observables(&pert, model.kind())?;
    classify(&o, &p, model.kind(), model.drive(), cls)
}

/// Sweep description: model, fixed parameters, two axes, and the numeric
/// configuration shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub fixed: FixedParams,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        self.classifier.validate()?;
        for axis in [&self.axis1, &self.axis2] {
            if axis.count < 2 {
                return Err(Error::Config(format!(
                    "axis '{}' needs count >= 2, got {}",
                    axis.name, axis.count
                )));
            }
            if !(axis.min <= axis.max) {
                return Err(Error::Config(format!(
                    "axis '{}' has min {} > max {}",
                    axis.name, axis.min, axis.max
                )));
            }
            if !FixedParams::is_axis_supported(self.model, &axis.name) {
                return Err(Error::Config(format!(
                    "axis '{}' is not a parameter of model {}",
                    axis.name, self.model
                )));
            }
        }
        if self.axis1.name == self.axis2.name {
            return Err(Error::Config(format!(
                "axes must name distinct parameters, both are '{}'",
                self.axis1.name
            )));
        }
        // Every grid cell must construct a valid model.
        for &v1 in &[self.axis1.min, self.axis1.max] {
            for &v2 in &[self.axis2.min, self.axis2.max] {
                self.cell_model(v1, v2)?;
            }
        }
        Ok(())
    }

    /// Model for one grid cell.
    pub fn cell_model(&self, v1: f64, v2: f64) -> Result<ModelConfig> {
        let f = self.fixed.with(&self.axis1.name, v1)?.with(&self.axis2.name, v2)?;
        ModelConfig::from_fixed(self.model, &f)
    }

    pub fn seed(&self) -> f64 {
        match self.model {
            ModelKind::Lmg => self.fixed.y0,
            _ => self.fixed.epsilon,
        }
    }
}

/// One grid cell of a finished sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub axis1: f64,
    pub axis2: f64,
    pub label: LabelKind,
    pub diagnostics: Diagnostics,
    /// Non-fatal per-cell failure, kept out of the exported table.
    pub error: Option<String>,
}

/// Completed sweep: config echo plus one classified cell per grid point,
/// ordered axis1-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub config: SweepConfig,
    pub cells: Vec<CellResult>,
    pub wall_seconds: f64,
}

/// Fraction of cells carrying the same label family (subharmonic order is
/// ignored for higher-order responses).
pub fn area_ratio(diagram: &PhaseDiagram, label: &LabelKind) -> f64 {
    if diagram.cells.is_empty() {
        return 0.0;
    }
    let hits = diagram.cells.iter().filter(|c| c.label.same_kind(label)).count();
    hits as f64 / diagram.cells.len() as f64
}

fn evaluate_cell(config: &SweepConfig, v1: f64, v2: f64) -> CellResult {
    let nan_diag = Diagnostics {
        max_amp: f64::NAN,
        d2: None,
        sigma_amp: None,
        response_order: None,
        dominant_freq: None,
    };
    match config
        .cell_model(v1, v2)
        .and_then(|m| evaluate_point(&m, config.seed(), &config.integrator, &config.classifier))
    {
        Ok(label) => CellResult {
            axis1: v1,
            axis2: v2,
            label: label.kind,
            diagnostics: label.diagnostics,
            error: None,
        },
        Err(e) => CellResult {
            axis1: v1,
            axis2: v2,
            label: LabelKind::OtherNonDtc,
            diagnostics: nan_diag,
            error: Some(e.to_string()),
        },
    }
}

/// Run the sweep over all grid cells.
///
/// Cells are distributed over `workers` threads through a shared counter;
/// every cell is a pure function of the configuration, and results are
/// assembled by cell index, so the diagram is identical for any worker
/// count.
pub fn run_sweep(config: &SweepConfig) -> Result<PhaseDiagram> {
    config.validate()?;
    let start = Instant::now();
    let v1 = config.axis1.values();
    let v2 = config.axis2.values();
    let jobs: Vec<(f64, f64)> = v1
        .iter()
        .flat_map(|a| v2.iter().map(move |b| (*a, *b)))
        .collect();

    let workers = config.workers.max(1).min(jobs.len().max(1));
    let mut cells: Vec<Option<CellResult>> = vec![None; jobs.len()];
    if workers <= 1 {
        for (slot, &(a, b)) in cells.iter_mut().zip(&jobs) {
            *slot = Some(evaluate_cell(config, a, b));
        }
    } else {
        let next = AtomicUsize::new(0);
        let shared = Mutex::new(&mut cells);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= jobs.len() {
                        break;
                    }
                    let (a, b) = jobs[idx];
                    let cell = evaluate_cell(config, a, b);
                    shared.lock().unwrap()[idx] = Some(cell);
                });
            }
        });
    }

    Ok(PhaseDiagram {
        config: config.clone(),
        cells: cells.into_iter().map(|c| c.expect("all cells evaluated")).collect(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            model: ModelKind::Nom,
            fixed: FixedParams { kappa: 0.5, ..Default::default() },
            axis1: AxisSpec { name: "omega_d".into(), min: 0.7, max: 0.9, count: 2 },
            axis2: AxisSpec { name: "drive_amp".into(), min: 0.0, max: 0.6, count: 2 },
            integrator: IntegratorConfig { t_final: 150.0, ..Default::default() },
            classifier: ClassifierConfig::default(),
            workers: 2,
            output: None,
        }
    }

    #[test]
    fn axis_values_are_inclusive_linspace() {
        let a = AxisSpec { name: "kappa".into(), min: 0.0, max: 1.0, count: 5 };
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(a.step(), 0.25);
    }

    #[test]
    fn validate_rejects_bad_axes() {
        let mut c = tiny_config();
        c.axis2 = c.axis1.clone();
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.axis1.count = 1;
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.axis1.name = "lambda0".into(); // not a cavity-model parameter
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.axis1 = AxisSpec { name: "g_ratio".into(), min: 0.5, max: 1.2, count: 3 };
        assert!(c.validate().is_err(), "g_ratio axis crossing 1 must be rejected");
    }

    #[test]
    fn sweep_equals_composed_pointwise_calls() {
        let c = tiny_config();
        let diagram = run_sweep(&c).unwrap();
        assert_eq!(diagram.cells.len(), 4);
        for cell in &diagram.cells {
            let model = c.cell_model(cell.axis1, cell.axis2).unwrap();
            let label =
                evaluate_point(&model, c.seed(), &c.integrator, &c.classifier).unwrap();
            assert_eq!(cell.label, label.kind);
            assert_eq!(cell.diagnostics, label.diagnostics);
        }
    }

    #[test]
    fn serial_and_parallel_sweeps_agree_bitwise() {
        let mut c = tiny_config();
        c.workers = 1;
        let serial = run_sweep(&c).unwrap();
        c.workers = 4;
        let parallel = run_sweep(&c).unwrap();
        assert_eq!(serial.cells, parallel.cells);
    }

    #[test]
    fn area_ratio_counts_label_families() {
        let c = tiny_config();
        let mut d = run_sweep(&c).unwrap();
        for cell in &mut d.cells {
            cell.label = LabelKind::Np;
        }
        assert_eq!(area_ratio(&d, &LabelKind::Np), 1.0);
        d.cells[0].label = LabelKind::DtcHo { order: 3 };
        d.cells[1].label = LabelKind::DtcHo { order: 4 };
        assert_eq!(area_ratio(&d, &LabelKind::Np), 0.5);
        assert_eq!(area_ratio(&d, &LabelKind::DtcHo { order: 7 }), 0.5);
    }
}
