//! Flat-file formats: trajectory CSV and phase-diagram CSV, each carrying a
//! structured parameter echo so stored results can be re-classified or
//! re-run without the original command line.
//!
//! A trajectory file is a `#`-commented TOML header (the [`SimMeta`] echo)
//! followed by a CSV table `t,<components...>,Jx_over_N`. A diagram file is
//! a plain CSV table with a `<stem>.meta.toml` sidecar holding the full
//! sweep config, a version string, and wall-time metadata. Export, import,
//! and re-export are byte-idempotent (floats are written in shortest
//! round-trip form).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{Diagnostics, LabelKind};
use crate::dynamics::{Divergence, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::sweep::{CellResult, FixedParams, PhaseDiagram, SweepConfig};
use crate::ModelKind;

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce (or re-classify) a stored run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMeta {
    pub model: ModelKind,
    /// Seed offset of the perturbed twin, when this file is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<f64>,
    pub fixed: FixedParams,
    pub integrator: IntegratorConfig,
    /// Truncation record, present when the run diverged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged: Option<Divergence>,
}

fn jx_over_n(kind: ModelKind, sample: &[f64]) -> f64 {
    match kind {
        ModelKind::DickeMf => sample[2] / 2.0,
        ModelKind::Lom | ModelKind::Nom => sample[2],
        ModelKind::Lmg => sample[0] / 2.0,
    }
}

/// Render a trajectory file.
pub fn trajectory_to_string(traj: &Trajectory, meta: &SimMeta) -> Result<String> {
    let mut meta = meta.clone();
    meta.diverged = traj.diverged;
    let header = toml::to_string(&meta)
        .map_err(|e| Error::Parse(format!("meta serialization failed: {e}")))?;
    let mut out = String::new();
    for line in header.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = write!(out, "t");
    for name in meta.model.component_names() {
        let _ = write!(out, ",{name}");
    }
    out.push_str(",Jx_over_N\n");
    for k in 0..traj.n_samples() {
        let _ = write!(out, "{}", traj.time(k));
        let s = traj.sample(k);
        for v in s {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", jx_over_n(meta.model, s));
    }
    Ok(out)
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, meta: &SimMeta) -> Result<()> {
    std::fs::write(path, trajectory_to_string(traj, meta)?)?;
    Ok(())
}

/// Parse a trajectory file produced by [`trajectory_to_string`].
pub fn parse_trajectory(text: &str) -> Result<(Trajectory, SimMeta)> {
    let mut meta_lines = Vec::new();
    let mut rest = Vec::new();
    for line in text.lines() {
        if rest.is_empty() && line.starts_with('#') {
            meta_lines.push(line.trim_start_matches('#').trim_start());
        } else if !line.trim().is_empty() {
            rest.push(line);
        }
    }
    let meta: SimMeta = toml::from_str(&meta_lines.join("\n"))
        .map_err(|e| Error::Parse(format!("bad trajectory metadata: {e}")))?;
    if rest.is_empty() {
        return Err(Error::Parse("trajectory file has no table".into()));
    }
    let ncomp = meta.model.component_names().len();
    let header = rest[0];
    let expect_cols = ncomp + 2;
    if header.split(',').count() != expect_cols {
        return Err(Error::Parse(format!(
            "expected {expect_cols} columns for model {}, header is '{header}'",
            meta.model
        )));
    }
    let mut data = Vec::with_capacity((rest.len() - 1) * ncomp);
    for line in &rest[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expect_cols {
            return Err(Error::Parse(format!("short row '{line}'")));
        }
        for f in &fields[1..=ncomp] {
            data.push(parse_f64(f)?);
        }
    }
    let traj = Trajectory {
        model_id: meta.model.as_str().to_string(),
        t0: 0.0,
        dt: meta.integrator.dt,
        stride: meta.integrator.stride,
        ncomp,
        data,
        diverged: meta.diverged,
    };
    Ok((traj, meta))
}

pub fn read_trajectory(path: &Path) -> Result<(Trajectory, SimMeta)> {
    parse_trajectory(&std::fs::read_to_string(path)?)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: '{s}'")))
}

const DIAGRAM_HEADER: &str = "axis1,axis2,label,n,max_amp,d2,sigma_amp,dominant_freq";

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Render the diagram table.
pub fn diagram_to_csv(diagram: &PhaseDiagram) -> String {
    let mut out = String::from(DIAGRAM_HEADER);
    out.push('\n');
    for c in &diagram.cells {
        let d = &c.diagnostics;
        let order = match c.label {
            LabelKind::DtcHo { order } => order,
            _ => d.response_order.unwrap_or(0),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.axis1,
            c.axis2,
            c.label,
            order,
            d.max_amp,
            opt(d.d2),
            opt(d.sigma_amp),
            opt(d.dominant_freq),
        );
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct DiagramMeta {
    version: String,
    wall_seconds: f64,
    sweep: SweepConfig,
}

/// Sidecar path next to a diagram CSV.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Write the diagram CSV plus its config sidecar; returns the sidecar path.
pub fn write_diagram(path: &Path, diagram: &PhaseDiagram) -> Result<PathBuf> {
    std::fs::write(path, diagram_to_csv(diagram))?;
    let meta = DiagramMeta {
        version: FORMAT_VERSION.to_string(),
        wall_seconds: diagram.wall_seconds,
        sweep: diagram.config.clone(),
    };
    let side = sidecar_path(path);
    let text = toml::to_string(&meta)
        .map_err(|e| Error::Parse(format!("sidecar serialization failed: {e}")))?;
    std::fs::write(&side, text)?;
    Ok(side)
}

/// Read a diagram CSV and its sidecar back.
pub fn read_diagram(path: &Path) -> Result<PhaseDiagram> {
    let meta: DiagramMeta =
        toml::from_str(&std::fs::read_to_string(sidecar_path(path))?)
            .map_err(|e| Error::Parse(format!("bad diagram sidecar: {e}")))?;
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == DIAGRAM_HEADER => {}
        other => {
            return Err(Error::Parse(format!("unexpected diagram header {other:?}")))
        }
    }
    let mut cells = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::Parse(format!("short diagram row '{line}'")));
        }
        let order: u32 = f[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad order '{}'", f[3])))?;
        let to_opt = |v: f64| (!v.is_nan()).then_some(v);
        let response_order = (order > 0).then_some(order);
        cells.push(CellResult {
            axis1: parse_f64(f[0])?,
            axis2: parse_f64(f[1])?,
            label: LabelKind::from_parts(f[2], order)?,
            diagnostics: Diagnostics {
                max_amp: parse_f64(f[4])?,
                d2: to_opt(parse_f64(f[5])?),
                sigma_amp: to_opt(parse_f64(f[6])?),
                response_order,
                dominant_freq: to_opt(parse_f64(f[7])?),
            },
            error: None,
        });
    }
    Ok(PhaseDiagram { config: meta.sweep, cells, wall_seconds: meta.wall_seconds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::ClassifierConfig;
    use crate::dynamics::DriveSpec;
    use crate::sweep::AxisSpec;

    fn meta(model: ModelKind) -> SimMeta {
        SimMeta {
            model,
            perturbation: None,
            fixed: FixedParams::default(),
            integrator: IntegratorConfig {
                dt: 0.5,
                t_final: 2.0,
                stride: 1,
                divergence_cutoff: 1e6,
            },
            diverged: None,
        }
    }

    #[test]
    fn trajectory_round_trip_is_idempotent() {
        let traj = Trajectory {
            model_id: "lmg".into(),
            t0: 0.0,
            dt: 0.5,
            stride: 1,
            ncomp: 3,
            data: vec![0.0, 5e-8, -1.0, 0.1, -0.2, 0.97, 0.3, 0.01, -0.954],
            diverged: None,
        };
        let text = trajectory_to_string(&traj, &meta(ModelKind::Lmg)).unwrap();
        assert!(text.contains("t,X,Y,Z,Jx_over_N"));
        let (back, m) = parse_trajectory(&text).unwrap();
        assert_eq!(back.data, traj.data);
        assert_eq!(m.model, ModelKind::Lmg);
        let again = trajectory_to_string(&back, &m).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn trajectory_preserves_divergence_record() {
        let traj = Trajectory {
            model_id: "lom".into(),
            t0: 0.0,
            dt: 0.5,
            stride: 1,
            ncomp: 4,
            data: vec![0.01, 0.0, -0.01, 0.0],
            diverged: Some(Divergence { step: 17, component: 2, value: 2e6 }),
        };
        let text = trajectory_to_string(&traj, &meta(ModelKind::Lom)).unwrap();
        let (back, _) = parse_trajectory(&text).unwrap();
        assert_eq!(back.diverged, traj.diverged);
    }

    #[test]
    fn diagram_round_trip_is_idempotent() {
        let dir = std::env::temp_dir().join("dtc_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let csv = dir.join("diagram.csv");

        let config = SweepConfig {
            model: ModelKind::Lmg,
            fixed: FixedParams::default(),
            axis1: AxisSpec { name: "lambda0".into(), min: 0.0, max: 2.0, count: 2 },
            axis2: AxisSpec { name: "decay".into(), min: 0.0, max: 0.2, count: 2 },
            integrator: IntegratorConfig::default(),
            classifier: ClassifierConfig::default(),
            workers: 1,
            output: None,
        };
        let diagram = PhaseDiagram {
            config,
            cells: vec![
                CellResult {
                    axis1: 0.0,
                    axis2: 0.0,
                    label: LabelKind::Np,
                    diagnostics: Diagnostics {
                        max_amp: 5e-8,
                        d2: Some(1e-20),
                        sigma_amp: None,
                        response_order: None,
                        dominant_freq: None,
                    },
                    error: None,
                },
                CellResult {
                    axis1: 2.0,
                    axis2: 0.2,
                    label: LabelKind::DtcHo { order: 3 },
                    diagnostics: Diagnostics {
                        max_amp: 0.61,
                        d2: Some(2.5e-9),
                        sigma_amp: Some(0.004),
                        response_order: Some(3),
                        dominant_freq: Some(0.283),
                    },
                    error: None,
                },
            ],
            wall_seconds: 1.25,
        };
        write_diagram(&csv, &diagram).unwrap();
        let back = read_diagram(&csv).unwrap();
        assert_eq!(back.cells, diagram.cells);
        assert_eq!(back.config, diagram.config);
        // Re-export reproduces the CSV byte for byte.
        let csv2 = dir.join("diagram2.csv");
        write_diagram(&csv2, &back).unwrap();
        assert_eq!(
            std::fs::read_to_string(&csv).unwrap(),
            std::fs::read_to_string(&csv2).unwrap()
        );
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn drive_spec_survives_fixed_params_echo() {
        // DriveSpec itself is not in FixedParams; make sure the pieces that
        // reconstruct it are.
        let f = FixedParams { drive_amp: 0.5, omega_d: 0.8, ..Default::default() };
        let m = SimMeta { fixed: f, ..meta(ModelKind::Nom) };
        let text = toml::to_string(&m).unwrap();
        let back: SimMeta = toml::from_str(&text).unwrap();
        let d = DriveSpec::new(1.0, back.fixed.drive_amp, back.fixed.omega_d).unwrap();
        assert_eq!((d.amplitude, d.frequency), (0.5, 0.8));
    }
}
