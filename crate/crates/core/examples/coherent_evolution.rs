//! A Gaussian with angular momentum ℓ oscillates rigidly between z = 0 and
//! z = −2ℓb. The closed form is checked against a resummation over the
//! oscillator eigenstates of the displaced well.

use std::f64::consts::PI;

use cylq::oracle::eigenbasis_evolution;
use cylq::spinless::{coherent_mode, linspace, omitted_global_phase};

fn main() -> cylq::Result<()> {
    let (ell, b) = (1, 2.0);
    let z = linspace(-8.0, 4.0, 241);
    println!("{:>8} {:>10} {:>12}", "t/pi", "peak z", "max |diff|");
    for i in 0..=8 {
        let t = PI * i as f64 / 4.0;
        let closed: Vec<_> = z
            .iter()
            .map(|&zi| coherent_mode(ell, b, t, zi) * omitted_global_phase(ell, b, t))
            .collect();
        let resummed = eigenbasis_evolution(ell, b, t, &z)?;
        let diff = closed.iter().zip(&resummed).map(|(a, r)| (a - r).norm()).fold(0.0, f64::max);
        let peak = z
            .iter()
            .zip(&closed)
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|p| *p.0)
            .unwrap_or(f64::NAN);
        println!("{:>8.2} {peak:>10.3} {diff:>12.2e}", t / PI);
    }
    Ok(())
}
