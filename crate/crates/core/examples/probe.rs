//! Scratch fixture probe used while pinning acceptance thresholds.

use std::time::Instant;

use dtc_core::classifier::{observables, classify, tail_spectrum_peaks, ClassifierConfig};
use dtc_core::dynamics::IntegratorConfig;
use dtc_core::sweep::{evaluate_point, simulate, FixedParams, ModelConfig};
use dtc_core::ModelKind;

fn probe(tag: &str, kind: ModelKind, f: FixedParams, integ: &IntegratorConfig) {
    let cls = ClassifierConfig::default();
    let model = ModelConfig::from_fixed(kind, &f).unwrap();
    let seed = match kind {
        ModelKind::Lmg => f.y0,
        _ => f.epsilon,
    };
    let t0 = Instant::now();
    let label = evaluate_point(&model, seed, integ, &cls).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "{tag:28} -> {:12} max_amp={:.4} d2={:.3e} sigma={:?} n={:?} freq={:?}  [{dt:.2}s]",
        label.kind.to_string(),
        label.diagnostics.max_amp,
        label.diagnostics.d2.unwrap_or(f64::NAN),
        label.diagnostics.sigma_amp,
        label.diagnostics.response_order,
        label.diagnostics.dominant_freq,
    );
}

fn main() {
    let integ = IntegratorConfig::default();
    let dicke = |kappa: f64, a: f64, wd: f64| FixedParams {
        kappa,
        drive_amp: a,
        omega_d: wd,
        ..Default::default()
    };
    let lmg = |lambda0: f64, decay: f64, a: f64, wd: f64| FixedParams {
        lambda0,
        decay,
        drive_amp: a,
        omega_d: wd,
        ..Default::default()
    };

    println!("== Fig 1(d): kappa=0.5, wd=0.8, A=0.5 ==");
    probe("nom", ModelKind::Nom, dicke(0.5, 0.5, 0.8), &integ);
    probe("dicke_mf", ModelKind::DickeMf, dicke(0.5, 0.5, 0.8), &integ);
    probe("lom", ModelKind::Lom, dicke(0.5, 0.5, 0.8), &integ);

    println!("== Fig 1(c): kappa=0, wd=0.6, A=0.1 ==");
    probe("nom", ModelKind::Nom, dicke(0.0, 0.1, 0.6), &integ);
    probe("dicke_mf", ModelKind::DickeMf, dicke(0.0, 0.1, 0.6), &integ);
    probe("lom", ModelKind::Lom, dicke(0.0, 0.1, 0.6), &integ);

    println!("== undriven Dicke NP stability (A=0) ==");
    for kappa in [0.0, 0.5, 2.0] {
        probe(&format!("nom kappa={kappa}"), ModelKind::Nom, dicke(kappa, 0.0, 1.0), &integ);
        probe(&format!("dicke kappa={kappa}"), ModelKind::DickeMf, dicke(kappa, 0.0, 1.0), &integ);
    }

    println!("== LMG fixtures ==");
    // Fig 5(c): 2T-DTC at {0.8, 0.1, 0.5, 2wd/w0=1.7}
    probe("lmg dtc fig5c", ModelKind::Lmg, lmg(0.8, 0.1, 0.5, 0.85), &integ);
    // Appendix E: NB {0.8, 0.35, 0.5}, SBB {0.9, 0.9, 0.05}, chaos {1.1, 0.6, 1.1}
    probe("lmg nb fig8a", ModelKind::Lmg, lmg(0.8, 0.1, 0.35, 0.25), &integ);
    probe("lmg sbb fig8b", ModelKind::Lmg, lmg(0.9, 0.1, 0.9, 0.025), &integ);
    probe("lmg chaos fig8c", ModelKind::Lmg, lmg(1.1, 0.1, 0.6, 0.55), &integ);
    // Undriven NP/SB
    probe("lmg A=0 l=0.75", ModelKind::Lmg, lmg(0.75, 0.03, 0.0, 1.0), &integ);
    probe("lmg A=0 l=1.25", ModelKind::Lmg, lmg(1.25, 0.03, 0.0, 1.0), &integ);
    // Fig 1(f)-like dtc and 1(g) isotropic
    probe("lmg fig1f", ModelKind::Lmg, lmg(0.8, 0.01, 0.2, 1.8), &integ);
    probe("lmg iso g=1", ModelKind::Lmg, FixedParams { gamma: 1.0, ..lmg(0.8, 0.0, 0.2, 1.8) }, &integ);

    println!("== spectrum audit for Fig 5(c) ==");
    let f = lmg(0.8, 0.1, 0.5, 0.85);
    let model = ModelConfig::from_fixed(ModelKind::Lmg, &f).unwrap();
    let traj = simulate(&model, f.y0, None, &integ).unwrap();
    let obs = observables(&traj, ModelKind::Lmg).unwrap();
    let cls = ClassifierConfig::default();
    let peaks = tail_spectrum_peaks(&obs.primary, obs.sample_dt, &cls);
    println!("bin width {:.5}", peaks.bin_width);
    for (w, m) in &peaks.peaks {
        println!("  peak at {w:.5} ({:.3} x wd/2) mag {m:.4}", w / 0.425);
    }
    let pert = simulate(&model, f.y0, Some(cls.perturbation), &integ).unwrap();
    let obs_p = observables(&pert, ModelKind::Lmg).unwrap();
    let label = classify(&obs, &obs_p, ModelKind::Lmg, model.drive(), &cls).unwrap();
    println!("label {:?}", label.kind);
}
