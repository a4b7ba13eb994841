//! Density and spin direction along the cylinder for both branches of the
//! perturbed ground state. The spin lies along ±ρ̂ midway between the wells
//! and turns towards ±ẑ away from them.

use std::f64::consts::PI;

use cylq::perturbation::synthesize_wavefunction;
use cylq::spin::spin_field;
use cylq::spinless::linspace;
use cylq::{solve_perturbation, Branch, ValidConfig};

fn main() -> cylq::Result<()> {
    let config = ValidConfig::default();
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;
    let z = linspace(-6.0, 4.0, 21);

    for branch in [Branch::Symmetric, Branch::Antisymmetric] {
        let profile = synthesize_wavefunction(&sol.with_branch(branch), config.epsilon, &z);
        let field = spin_field(&profile, 0.0);
        println!("{} branch, E = {:.10}", branch.name(), profile.energy);
        println!("{:>6} {:>10} {:>10} {:>8}  n = (x, y, z)", "z", "Z+", "Z-", "alpha/pi");
        for i in 0..z.len() {
            let n = field.direction(i);
            println!(
                "{:>6.2} {:>10.6} {:>10.6} {:>8.4}  ({:+.3}, {:+.3}, {:+.3})",
                z[i],
                profile.z_plus[i],
                profile.z_minus[i],
                field.alpha[i] / PI,
                n[0],
                n[1],
                n[2]
            );
        }
        let fine = synthesize_wavefunction(&sol.with_branch(branch), config.epsilon, &linspace(-12.0, 6.0, 3601));
        println!("density maxima at {:?}\n", fine.density_maxima());
    }
    Ok(())
}
