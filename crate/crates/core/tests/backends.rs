//! Cross-backend agreement on whole ensembles.

use magicflux::harness::{mipt_records, tdoped_records, BackendChoice, EnsembleConfig, ExperimentKind};

#[test]
fn zero_angle_brickwork_agrees_across_backends() {
    let mut cfg = EnsembleConfig::new(ExperimentKind::Mipt);
    cfg.qubits = vec![8];
    cfg.instances = 12;
    cfg.cycles = 10;
    cfg.pm_grid = "0.05:0.35:0.1".parse().unwrap();
    cfg.backend = BackendChoice::Tableau;
    let tab = mipt_records(&cfg).unwrap();
    cfg.backend = BackendChoice::Statevector;
    let sv = mipt_records(&cfg).unwrap();
    assert_eq!(tab.len(), 48);
    for (a, b) in tab.iter().zip(&sv) {
        for (x, y) in [(a.i2, b.i2), (a.s2_ab, b.s2_ab), (a.s4_ab, b.s4_ab), (a.sz_ab, b.sz_ab)] {
            assert!((x - y).abs() < 1e-9, "{a:?}\n{b:?}");
        }
    }
}

#[test]
fn clifford_tdoped_agrees_across_backends() {
    for block in ["steps", "uniform"] {
        let mut cfg = EnsembleConfig::new(ExperimentKind::Tdoped);
        cfg.qubits = vec![8];
        cfg.nt_values = Some(vec![0]);
        cfg.samples = 30;
        cfg.block = serde_json::from_value(serde_json::Value::String(block.into())).unwrap();
        cfg.backend = BackendChoice::Tableau;
        let tab = tdoped_records(&cfg, cfg.kind).unwrap();
        cfg.backend = BackendChoice::Statevector;
        let sv = tdoped_records(&cfg, cfg.kind).unwrap();
        for (a, b) in tab.iter().zip(&sv) {
            assert!((a.i2 - b.i2).abs() < 1e-9 && (a.s4_ab - b.s4_ab).abs() < 1e-9);
        }
    }
}
