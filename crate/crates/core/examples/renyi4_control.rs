//! The order-4 entropy: its fluctuations track magic while its mean barely
//! moves.

use magicflux::harness::{per_size_fits, renyi4_table, tdoped_records, EnsembleConfig, ExperimentKind};

fn main() -> magicflux::Result<()> {
    let mut cfg = EnsembleConfig::new(ExperimentKind::Renyi4);
    cfg.qubits = vec![8];
    cfg.nt_max = Some(10);
    cfg.samples = 200;
    cfg.validate()?;
    let table = renyi4_table(&tdoped_records(&cfg, cfg.kind)?)?;
    let fits = per_size_fits(&table, "n_t", &["neg_ln_delta_s4_ab", "neg_ln_mean_s4_ab"])?;
    let slopes = fits.column("slope")?;
    println!("slope of -ln delta S4: {:.4}", slopes[0].unwrap());
    println!("slope of -ln mean S4:  {:.4}", slopes[1].unwrap());
    Ok(())
}
