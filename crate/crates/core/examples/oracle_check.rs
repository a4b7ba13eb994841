//! Brute-force diagonalization of the coupled spinor problem in a truncated
//! Fock basis, compared with the perturbation series order by order.

use cylq::oracle::{coupled_matrix, exact_spectrum, oracle_pair_energies, richardson_order_check, OrderFit};
use cylq::perturbation::solve_unchecked;
use cylq::Branch;

fn main() -> cylq::Result<()> {
    let (b, n) = (2.0, 60);
    let spectrum = exact_spectrum(&coupled_matrix(n, b, 0.1)?)?;
    println!("lowest levels at eps = 0.1 ({} Jacobi sweeps):", spectrum.sweeps);
    for i in 0..6 {
        println!("  {:.12}  {}", spectrum.values[i], spectrum.classify(i).name());
    }

    let eps = [0.02, 0.05, 0.1];
    let oracle: Vec<f64> = oracle_pair_energies(n, b, &eps)?.into_iter().map(|p| p.0).collect();
    for order in 1..=4 {
        let sol = solve_unchecked(0, order, Branch::Symmetric, b, 64)?;
        let series: Vec<f64> = eps.iter().map(|e| sol.total_energy(*e)).collect();
        let fit = richardson_order_check(&series, &oracle, &eps)?;
        let residual = (series[2] - oracle[2]).abs();
        match fit {
            OrderFit::Slope(s) => println!("K = {order}: residual at eps=0.1 {residual:.3e}, slope {s:.3}"),
            OrderFit::Indistinguishable => println!("K = {order}: residual at floating-point floor"),
        }
    }
    Ok(())
}
