//! Sorts the angular modes of an initial state into separate Gaussians.
//!
//! A particle starting as a Gaussian at z = 0 with angular profile
//! 1 + e^{−iφ} + 1.5e^{−2iφ} + e^{−3iφ} is evolved for half a period; each
//! mode ℓ lands at z = −2ℓb with height proportional to |f_ℓ|.
//!
//! Set CYLQ_OUT_DIR to also write the frames as PPM images.

use std::f64::consts::PI;
use std::path::PathBuf;

use cylq::io::raster::{write_frames, FrameSpec};
use cylq::spinless::{
    count_peaks, evolution_frames, extract_modes, fourier_transform_protocol, linspace, AngularProfile, FieldGrid,
    ModeNormalization,
};

fn main() -> cylq::Result<()> {
    let b = 8.0;
    let profile = AngularProfile::ladder().normalized();
    let (lo, hi) = profile.z_window(b, 6.0);
    let grid = FieldGrid::uniform(128, lo, hi, 801);

    let field = fourier_transform_protocol(&profile, b, PI, &grid);
    println!("peaks above 10% at t = pi: {}", count_peaks(&field, 0.1));
    let modes = extract_modes(&field, b, &[0, -1, -2, -3], ModeNormalization::ModeZero)?;
    println!("{:>4} {:>10} {:>10}", "ell", "|f_ell|", "measured");
    let f0 = profile.mode(0).norm();
    for (ell, m) in modes {
        println!("{ell:>4} {:>10.6} {m:>10.6}", profile.mode(ell).norm() / f0);
    }

    if let Some(dir) = std::env::var_os("CYLQ_OUT_DIR").map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        let times = linspace(0.0, PI, 9);
        let frames = evolution_frames(&profile, b, &times, &grid);
        let spec = FrameSpec {
            n_phi: grid.n_phi(),
            n_z: grid.n_z(),
            times,
            component: 0,
            out_dir: dir.clone(),
            prefix: "transformer".into(),
        };
        let names = write_frames(&frames, &spec)?;
        println!("wrote {} frames to {}", names.len(), dir.display());
    }
    Ok(())
}
