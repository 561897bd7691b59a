//! A TOML-configured run written to disk as CSV plus SVG plots.

use magicflux::harness::{emit_outputs, run_experiment, EnsembleConfig, OutputFormat};

fn main() -> magicflux::Result<()> {
    let cfg = EnsembleConfig::from_toml_str(
        r#"
        kind = "mipt"
        qubits = [8]
        thetas = [0.0, "pi/4"]
        pm_grid = "0.1:0.3:0.1"
        instances = 40
        cycles = 30
        master_seed = 99
        "#,
    )?;
    print!("{}", cfg.to_toml_string());
    let out = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join("magicflux-example");
    for path in emit_outputs(&out, &dir, OutputFormat::Csv)? {
        println!("wrote {}", path.display());
    }
    let (_, summary) = out.tables.iter().find(|(name, _)| name == "mipt_summary").unwrap();
    print!("{}", String::from_utf8_lossy(&summary.to_csv_bytes()));
    Ok(())
}
