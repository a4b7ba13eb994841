//! Writes a spin profile as CSV and a spinor frame as PPM into a directory
//! (CYLQ_OUT_DIR, or a fresh temporary location), then reads the CSV back.

use std::path::PathBuf;

use cylq::io::csv::CsvTable;
use cylq::io::raster::{frame_set_max, render_frame, Manifest};
use cylq::perturbation::synthesize_wavefunction;
use cylq::spin::{assemble_cylinder_spinor, spin_field};
use cylq::spinless::linspace;
use cylq::{solve_perturbation, Branch, ValidConfig};

fn main() -> cylq::Result<()> {
    let dir = std::env::var_os("CYLQ_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cylq-export-example"));
    std::fs::create_dir_all(&dir)?;

    let config = ValidConfig::default();
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;
    let z = linspace(config.z_min, config.z_max, 361);
    let profile = synthesize_wavefunction(&sol, config.epsilon, &z);
    let field = spin_field(&profile, 0.0);

    let mut table = CsvTable::new(["z", "Z_plus", "Z_minus", "rho", "alpha"]).comment("symmetric ground state");
    for i in 0..z.len() {
        table.push(vec![z[i], profile.z_plus[i], profile.z_minus[i], field.rho[i], field.alpha[i]]);
    }
    table.write(&dir.join("spin.csv"))?;

    let spinor = assemble_cylinder_spinor(&profile, 96);
    for c in 0..2 {
        let bytes = render_frame(&spinor, c, frame_set_max(std::slice::from_ref(&spinor), c))?;
        std::fs::write(dir.join(format!("spinor_{c}.ppm")), bytes)?;
    }
    let manifest = Manifest {
        command: "export_data example".into(),
        config: config.to_string(),
        notes: vec!["component 0 is the upper spinor entry".into()],
        files: vec!["spin.csv".into(), "spinor_0.ppm".into(), "spinor_1.ppm".into()],
    };
    manifest.write(&dir, "manifest.txt")?;

    let back = CsvTable::read(&dir.join("spin.csv"))?;
    assert_eq!(back.rows, table.rows);
    println!("wrote {} rows and two frames to {}", back.rows.len(), dir.display());
    Ok(())
}
