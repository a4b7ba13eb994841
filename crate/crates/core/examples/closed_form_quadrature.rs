//! The first two wavefunction corrections by direct quadrature of their
//! integral representations, next to the series result, and the first order
//! rebuilt as a sum over excited oscillator states.

use cylq::closed_forms::{appendix_first_order, appendix_tail_bound, zplus_correction};
use cylq::perturbation::solve_unchecked;
use cylq::spinless::linspace;
use cylq::Branch;

fn main() -> cylq::Result<()> {
    let b = 2.0;
    let z = linspace(-6.0, 3.0, 10);
    let sol = solve_unchecked(0, 2, Branch::Symmetric, b, 64)?;
    let q1 = zplus_correction(1, b, &z, 64)?;
    let q2 = zplus_correction(2, b, &z, 64)?;
    let s1 = sol.order_profile(1, &z);
    let s2 = sol.order_profile(2, &z);
    println!("{:>6} {:>14} {:>10} {:>14} {:>10}", "z", "Z1 quad", "diff", "Z2 quad", "diff");
    for i in 0..z.len() {
        println!(
            "{:>6.2} {:>14.10} {:>10.1e} {:>14.10} {:>10.1e}",
            z[i],
            q1[i],
            q1[i] - s1[i],
            q2[i],
            q2[i] - s2[i]
        );
    }

    let sum = appendix_first_order(b, 40);
    let worst = (0..=40).map(|k| (sum.coeff(k) - sol.series(1).coeff(k)).abs()).fold(0.0, f64::max);
    println!("\nexcited-state sum vs recursion: max coefficient difference {worst:.1e}");
    println!("omitted tail beyond k = 40 bounded by {:.1e}", appendix_tail_bound(b, 40));
    Ok(())
}
