//! Monitored brickwork on the tableau: mean mutual information between the
//! first and third quarters as the measurement rate grows.

use magicflux::harness::{mipt_records, mipt_scaling, mipt_summary, BackendChoice, EnsembleConfig, ExperimentKind};

fn main() -> magicflux::Result<()> {
    let mut cfg = EnsembleConfig::new(ExperimentKind::Mipt);
    cfg.qubits = vec![8, 12, 16];
    cfg.instances = 100;
    cfg.cycles = 60;
    cfg.pm_grid = "0.05:0.35:0.03".parse()?;
    cfg.backend = BackendChoice::Tableau;
    cfg.validate()?;

    let summary = mipt_summary(&mipt_records(&cfg)?)?;
    let (n, p, i2) = (summary.column("n")?, summary.column("p_m")?, summary.column("mean_i2")?);
    for k in 0..summary.len() {
        let bar = "#".repeat((i2[k].unwrap() * 30.0).round() as usize);
        println!("n={:>2} p={:.2} I2={:.3} {bar}", n[k].unwrap(), p[k].unwrap(), i2[k].unwrap());
    }
    let (_, crossings, results) = mipt_scaling(&summary, &[0.0])?;
    println!("crossings: {:?}", crossings.column("p_cross")?);
    if let Some(r) = results[0].1 {
        println!("collapse: p_c = {:.3}, nu = {:.2}, low confidence = {}", r.p_c, r.nu, r.low_confidence);
    }
    Ok(())
}
