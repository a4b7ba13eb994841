//! A particle prepared in the well at z = −b (spin down) tunnels to the well
//! at z = 0 (spin up) and back, at the frequency set by the splitting of the
//! two lowest levels.

use std::f64::consts::PI;

use cylq::spin::{eigen_energies, rabi_probabilities, TwoStateSystem};
use cylq::ValidConfig;

fn main() -> cylq::Result<()> {
    let config = ValidConfig::default();
    let (e_s, e_a) = eigen_energies(&config)?;
    let sys = TwoStateSystem::new(e_s, e_a);
    let period = PI / sys.omega();
    println!("E_s = {e_s:.12}, E_a = {e_a:.12}, Omega = {:.12}", sys.omega());
    println!("full transfer after t = {:.6}", period / 2.0);
    for i in 0..=16 {
        let t = period * i as f64 / 16.0;
        let (up, down) = rabi_probabilities(&sys, t);
        let bar = "#".repeat((up * 40.0).round() as usize);
        println!("t = {t:8.3}  P_up = {up:.4}  P_down = {down:.4}  {bar}");
    }
    Ok(())
}
