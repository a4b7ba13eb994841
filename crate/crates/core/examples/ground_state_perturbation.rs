//! Energy corrections of the spin-coupled ground state to high order, the
//! resulting symmetric/antisymmetric energies, and the low orders checked
//! against their closed forms.

use cylq::closed_forms::energy_corrections_closed;
use cylq::{solve_perturbation, Branch, PhysicsConfig};

fn main() -> cylq::Result<()> {
    let config = PhysicsConfig {
        series_order: 8,
        ..PhysicsConfig::default()
    }
    .validate()?;
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;

    println!("b = {}", config.b);
    for (k, e) in sol.energies().iter().enumerate() {
        println!("E^({k}) = {e:+.15e}");
    }
    let (e0, e1, e2) = energy_corrections_closed(config.b)?;
    println!("closed forms: {e0:+.15e} {e1:+.15e} {e2:+.15e}");

    println!("\n{:>6} {:>18} {:>18}", "eps", "E_s", "E_a");
    for eps in [0.05, 0.1, 0.25, 0.5] {
        let s = sol.total_energy(eps);
        let a = sol.with_branch(Branch::Antisymmetric).total_energy(eps);
        println!("{eps:>6} {s:>18.12} {a:>18.12}");
    }
    Ok(())
}
