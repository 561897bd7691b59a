//! Fluctuations of the Renyi-2 mutual information against T count, with
//! the per-size linear fit of -ln delta.

use magicflux::harness::{per_size_fits, tdoped_records, tdoped_summary, EnsembleConfig, ExperimentKind};

fn main() -> magicflux::Result<()> {
    let mut cfg = EnsembleConfig::new(ExperimentKind::Tdoped);
    cfg.qubits = vec![8];
    cfg.nt_max = Some(12);
    cfg.samples = 200;
    cfg.validate()?;

    let records = tdoped_records(&cfg, cfg.kind)?;
    let summary = tdoped_summary(&records)?;
    let nt = summary.column("n_t")?;
    let y = summary.column("neg_ln_delta_i2")?;
    let ab = summary.column("neg_ln_delta_s2_ab")?;
    println!("n_t  -ln d(I2)  -ln d(S_AB)");
    for i in 0..summary.len() {
        println!("{:>3}  {:>9.4}  {:>11.4}", nt[i].unwrap(), y[i].unwrap(), ab[i].unwrap());
    }
    let fits = per_size_fits(&summary, "n_t", &["neg_ln_delta_i2"])?;
    let slope = fits.column("slope")?[0].unwrap();
    let icept = fits.column("intercept")?[0].unwrap();
    println!("-ln delta_I2 ~ {slope:.3} N_T + {icept:.3}   (ln 4/3 = {:.3})", (4.0f64 / 3.0).ln());
    Ok(())
}
