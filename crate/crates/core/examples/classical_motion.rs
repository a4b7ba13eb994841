//! The classical particle: the radial field turns axial velocity into
//! rotation about the cylinder and back, at unit frequency.

use std::f64::consts::PI;

use cylq::spinless::classical_trajectory;

fn main() {
    println!("{:>8} {:>9} {:>9} {:>9}", "t/pi", "v_z", "v_phi", "speed");
    for i in 0..=8 {
        let t = PI * i as f64 / 4.0;
        let (vz, vphi) = classical_trajectory(1.0, 0.0, t);
        println!("{:>8.2} {vz:>9.5} {vphi:>9.5} {:>9.5}", t / PI, vz.hypot(vphi));
    }
}
