//! Kurtosis of region spin expectations across a t-doped ensemble.

use magicflux::harness::{kurtosis_table, per_size_fits, tdoped_records, EnsembleConfig, ExperimentKind};

fn main() -> magicflux::Result<()> {
    let mut cfg = EnsembleConfig::new(ExperimentKind::Kurtosis);
    cfg.qubits = vec![8];
    cfg.nt_max = Some(12);
    cfg.samples = 300;
    cfg.validate()?;
    let table = kurtosis_table(&tdoped_records(&cfg, cfg.kind)?)?;
    let (nt, combo, y) = (table.column("n_t")?, table.column("kurt_combo")?, table.column("neg_ln_kurt_combo")?);
    for i in 0..table.len() {
        println!("n_t={:>2}  Kurt_A+Kurt_B-Kurt_AB = {:>8.3}  -ln = {:?}", nt[i].unwrap(), combo[i].unwrap_or(f64::NAN), y[i]);
    }
    let fits = per_size_fits(&table, "n_t", &["neg_ln_kurt_combo"])?;
    println!("slope {:?}, t = {:?}", fits.column("slope")?[0], fits.column("slope_t")?[0]);
    Ok(())
}
