//! Command-line front end. Each subcommand writes CSV tables and/or PPM
//! frames plus a `manifest.txt` with checksums into the output directory.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::closed_forms::energy_corrections_closed;
use crate::error::{Error, Result};
use crate::io::csv::CsvTable;
use crate::io::raster::{write_frames, FrameSpec, Manifest};
use crate::oracle::{
    build_coupled_matrix, exact_spectrum, oracle_pair_energies, richardson_order_check, truncation_sensitivity,
    OrderFit,
};
use crate::params::{PhysicsConfig, ValidConfig};
use crate::perturbation::{solve_perturbation, synthesize_wavefunction_for_ell, Branch};
use crate::spin::{pair_energies, rabi_probabilities, spin_field, TwoStateSystem};
use crate::spinless::{
    energy, evolution_frames, extract_modes, fourier_transform_protocol, linspace, AngularProfile, FieldGrid,
    ModeNormalization,
};

/// Output directory used when neither `--out` nor `CYLQ_OUT_DIR` is given.
pub const DEFAULT_OUT_DIR: &str = "cylq-out";

/// Well spacing for the Fourier demo when `--b` is not given.
pub const FOURIER_DEFAULT_B: f64 = 8.0;

const GLOBAL_PHASE_NOTE: &str = "each angular mode omits its global phase exp(i l^2 b^2 sin(2t) / 4)";

#[derive(Debug, Parser)]
#[command(name = "cylq", version, about = "Charged particle on a cylinder in a radial magnetic field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spinless spectrum E = n + 1/2 for n below the Fock dimension.
    Spectrum(CommonArgs),
    /// Frames of a single angular mode oscillating about its well.
    Evolve(CommonArgs),
    /// Fourier-transformer frames and the mode amplitudes read off at t = pi.
    Fourier(CommonArgs),
    /// Energy corrections and wavefunction orders of the ground state.
    Perturb(CommonArgs),
    /// Fock-basis diagonalization and series-versus-oracle residuals.
    Oracle(CommonArgs),
    /// Density and spin direction of both ground-state branches.
    Spin(CommonArgs),
    /// Rabi oscillation between the two localized ground states.
    Rabi(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Shift of the gradient-field minimum per unit angular momentum
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Spin coupling strength
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Angular momentum quantum number
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<i32>,
    /// Highest perturbative order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Oscillator level for `perturb`.
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Number of frames or time samples.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Final time of the evolution
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Grid as N_PHIxN_Z, e.g. 256x512.
    #[arg(long)]
    pub grid: Option<String>,
    /// Angular profile: cos, const, ladder, mode:<l>, or l:re[:im],...
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, env = "CYLQ_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    /// Config file (or defaults) overlaid with the flags, then validated.
    pub fn resolve(&self, default_b: Option<f64>) -> Result<ValidConfig> {
        let mut cfg = match &self.config {
            Some(path) => PhysicsConfig::from_file(path)?,
            None => PhysicsConfig::default(),
        };
        if let (None, Some(b), None) = (self.b, default_b, &self.config) {
            cfg.b = b;
        }
        if let Some(b) = self.b {
            cfg.b = b;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(l) = self.ell {
            cfg.ell = l;
        }
        if let Some(k) = self.order {
            cfg.series_order = k;
        }
        if let Some(grid) = &self.grid {
            let (p, z) = parse_grid(grid)?;
            cfg.n_phi = p;
            cfg.n_z = z;
        }
        Ok(cfg.validate()?)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

/// Parses `NxM` into (n_phi, n_z).
pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("grid must look like 256x512 (got '{text}')"));
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 for invalid input, 2 for failed
/// convergence or cross-checks.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.invariant());
            e.exit_code()
        }
    }
}

/// Runs one command and returns the paths it wrote.
pub fn execute(command: &Command) -> Result<Vec<PathBuf>> {
    let (args, name) = match command {
        Command::Spectrum(a) => (a, "spectrum"),
        Command::Evolve(a) => (a, "evolve"),
        Command::Fourier(a) => (a, "fourier"),
        Command::Perturb(a) => (a, "perturb"),
        Command::Oracle(a) => (a, "oracle"),
        Command::Spin(a) => (a, "spin"),
        Command::Rabi(a) => (a, "rabi"),
    };
    let dir = args.out_dir();
    fs::create_dir_all(&dir)?;
    let (config, mut manifest) = match command {
        Command::Spectrum(a) => cmd_spectrum(a, &dir)?,
        Command::Evolve(a) => cmd_evolve(a, &dir)?,
        Command::Fourier(a) => cmd_fourier(a, &dir)?,
        Command::Perturb(a) => cmd_perturb(a, &dir)?,
        Command::Oracle(a) => cmd_oracle(a, &dir)?,
        Command::Spin(a) => cmd_spin(a, &dir)?,
        Command::Rabi(a) => cmd_rabi(a, &dir)?,
    };
    manifest.command = name.to_string();
    manifest.config = config.to_string();
    manifest.write(&dir, "manifest.txt")?;
    let mut written: Vec<PathBuf> = manifest.files.iter().map(|f| dir.join(f)).collect();
    written.push(dir.join("manifest.txt"));
    Ok(written)
}

type Outcome = (ValidConfig, Manifest);

fn save(table: &CsvTable, dir: &Path, name: &str, manifest: &mut Manifest) -> Result<()> {
    table.write(&dir.join(name))?;
    manifest.files.push(name.to_string());
    Ok(())
}

fn frame_times(args: &CommonArgs, default_frames: usize, default_t_max: f64) -> Vec<f64> {
    let n = args.frames.unwrap_or(default_frames).max(1);
    linspace(0.0, args.t_max.unwrap_or(default_t_max), n)
}

pub fn cmd_spectrum(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let mut table = CsvTable::new(["n", "ell", "energy"]).comment("spinless spectrum, degenerate in ell");
    for n in 0..config.fock_dim {
        table.push(vec![n as f64, config.ell as f64, energy(n, config.ell)]);
    }
    let mut manifest = Manifest::default();
    save(&table, dir, "spectrum.csv", &mut manifest)?;
    Ok((config, manifest))
}

fn render_run(
    prefix: &str,
    profile: &AngularProfile,
    b: f64,
    times: &[f64],
    grid: &FieldGrid,
    dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let frames = evolution_frames(profile, b, times, grid);
    let spec = FrameSpec {
        n_phi: grid.n_phi(),
        n_z: grid.n_z(),
        times: times.to_vec(),
        component: 0,
        out_dir: dir.to_path_buf(),
        prefix: prefix.to_string(),
    };
    manifest.files.extend(write_frames(&frames, &spec)?);
    let mut table = CsvTable::new(["frame", "t", "norm"]).comment(GLOBAL_PHASE_NOTE);
    for (i, (t, f)) in times.iter().zip(&frames).enumerate() {
        table.push(vec![i as f64, *t, f.discrete_norm()]);
    }
    save(&table, dir, &format!("{prefix}_frames.csv"), manifest)?;
    manifest.notes.push(GLOBAL_PHASE_NOTE.to_string());
    manifest.notes.push(format!(
        "z from {} to {} (top row is the largest z), phi across",
        grid.z()[0],
        grid.z()[grid.n_z() - 1]
    ));
    Ok(())
}

pub fn cmd_evolve(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let profile = AngularProfile::single(config.ell);
    let (lo, hi) = profile.z_window(config.b, 6.0);
    let grid = FieldGrid::uniform(config.n_phi, lo, hi, config.n_z);
    let times = frame_times(args, 9, 2.0 * PI);
    let mut manifest = Manifest::default();
    render_run("evolve", &profile, config.b, &times, &grid, dir, &mut manifest)?;
    Ok((config, manifest))
}

pub fn cmd_fourier(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(Some(FOURIER_DEFAULT_B))?;
    let profile = match &args.profile {
        Some(p) => AngularProfile::parse(p)?,
        None => AngularProfile::ladder(),
    }
    .normalized();
    let b = config.b;
    let (lo, hi) = profile.z_window(b, 6.0);
    let grid = FieldGrid::uniform(config.n_phi, lo, hi, config.n_z);
    let ells: Vec<i32> = profile.modes().map(|(l, _)| l).collect();
    let readout = fourier_transform_protocol(&profile, b, PI, &grid);
    let measured = extract_modes(&readout, b, &ells, ModeNormalization::Largest)?;
    let largest = profile.modes().map(|(_, f)| f.norm()).fold(0.0, f64::max);

    let mut manifest = Manifest::default();
    let times = frame_times(args, 9, PI);
    render_run("fourier", &profile, b, &times, &grid, dir, &mut manifest)?;
    let mut table = CsvTable::new(["ell", "input_relative", "measured_relative"])
        .comment(format!("peak |psi| at phi=0, z=-2*ell*b, t=pi; b={b}"));
    for (l, m) in measured {
        table.push(vec![l as f64, profile.mode(l).norm() / largest, m]);
    }
    save(&table, dir, "fourier_modes.csv", &mut manifest)?;
    manifest.notes.push(format!("profile = {profile}"));
    Ok((config, manifest))
}

pub fn cmd_perturb(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let sol = solve_perturbation(args.level, config.series_order, Branch::Symmetric, &config)?;
    let closed = energy_corrections_closed(config.b)?;
    let mut manifest = Manifest::default();

    let mut energies = CsvTable::new(["k", "energy"])
        .comment(format!("energy corrections of level {} (symmetric branch)", args.level));
    for (k, e) in sol.energies().iter().enumerate() {
        energies.push(vec![k as f64, *e]);
    }
    if args.level == 0 {
        energies = energies.comment(format!(
            "closed forms: {:.16e}, {:.16e}, {:.16e}",
            closed.0, closed.1, closed.2
        ));
    }
    save(&energies, dir, "perturb_energies.csv", &mut manifest)?;

    let z = linspace(config.z_min, config.z_max, config.n_z);
    let mut columns = vec!["z".to_string()];
    columns.extend((0..=sol.order()).map(|k| format!("order_{k}")));
    let mut profiles = CsvTable::new(columns).comment("unnormalized upper-component contributions Z^(k)(z)");
    let orders: Vec<Vec<f64>> = (0..=sol.order()).map(|k| sol.order_profile(k, &z)).collect();
    for (i, zi) in z.iter().enumerate() {
        let mut row = vec![*zi];
        row.extend(orders.iter().map(|o| o[i]));
        profiles.push(row);
    }
    save(&profiles, dir, "perturb_profiles.csv", &mut manifest)?;
    Ok((config, manifest))
}

pub fn cmd_oracle(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let spectrum = exact_spectrum(&build_coupled_matrix(&config)?)?;
    let mut manifest = Manifest::default();
    let mut eig = CsvTable::new(["index", "eigenvalue", "parity"])
        .comment(format!("Fock dimension {} per spin component", config.fock_dim));
    for i in 0..spectrum.len() {
        eig.push(vec![i as f64, spectrum.values[i], spectrum.parity(i)]);
    }
    save(&eig, dir, "oracle_eigenvalues.csv", &mut manifest)?;

    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;
    let mut eps_list = vec![0.02, 0.05, 0.1];
    if config.epsilon > 0.0 && !eps_list.contains(&config.epsilon) {
        eps_list.push(config.epsilon);
    }
    let oracle = oracle_pair_energies(config.fock_dim, config.b, &eps_list)?;
    let mut res = CsvTable::new([
        "epsilon",
        "series_sym",
        "oracle_sym",
        "residual_sym",
        "series_anti",
        "oracle_anti",
        "residual_anti",
    ]);
    let mut series_sym = Vec::new();
    for (eps, (os, oa)) in eps_list.iter().zip(&oracle) {
        let (s, a) = pair_energies(&sol, *eps);
        series_sym.push(s);
        res.push(vec![*eps, s, *os, s - os, a, *oa, a - oa]);
    }
    let oracle_sym: Vec<f64> = oracle.iter().map(|p| p.0).collect();
    let fit = richardson_order_check(&series_sym[..3], &oracle_sym[..3], &eps_list[..3])?;
    let fit_note = match fit {
        OrderFit::Slope(s) => format!("residual slope {s:.4} (order K = {})", config.series_order),
        OrderFit::Indistinguishable => "residuals at floating-point floor".to_string(),
    };
    let sensitivity = truncation_sensitivity(config.b, config.epsilon, config.fock_dim.saturating_sub(20).max(2), config.fock_dim, 4)?;
    let sens_note = format!("lowest-4 eigenvalue change from Fock dimension N-20 to N: {sensitivity:.3e}");
    res = res.comment(fit_note.clone()).comment(sens_note.clone());
    save(&res, dir, "oracle_residuals.csv", &mut manifest)?;
    manifest.notes.push(fit_note);
    manifest.notes.push(sens_note);
    Ok((config, manifest))
}

pub fn cmd_spin(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;
    let z = linspace(config.z_min, config.z_max, config.n_z);
    let mut manifest = Manifest::default();
    for branch in [Branch::Symmetric, Branch::Antisymmetric] {
        let profile = synthesize_wavefunction_for_ell(&sol.with_branch(branch), config.epsilon, config.ell, &z);
        let field = spin_field(&profile, 0.0);
        let mut table = CsvTable::new(["z", "Z_plus", "Z_minus", "rho", "alpha"]).comment(format!(
            "{} branch, energy {:.16e}, spin azimuth beta = phi (+pi where Z_plus*Z_minus < 0)",
            branch.name(),
            profile.energy
        ));
        for i in 0..z.len() {
            table.push(vec![z[i], profile.z_plus[i], profile.z_minus[i], field.rho[i], field.alpha[i]]);
        }
        save(&table, dir, &format!("spin_{}.csv", branch.name()), &mut manifest)?;
    }
    Ok((config, manifest))
}

pub fn cmd_rabi(args: &CommonArgs, dir: &Path) -> Result<Outcome> {
    let config = args.resolve(None)?;
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, &config)?;
    let (e_s, e_a) = pair_energies(&sol, config.epsilon);
    let sys = TwoStateSystem::new(e_s, e_a);
    let omega = sys.omega();
    let default_t = if omega != 0.0 { 2.0 * PI / omega.abs() } else { 10.0 };
    let times = frame_times(args, 201, default_t);
    let mut table = CsvTable::new(["t", "P_up", "P_down"])
        .comment(format!("E_s = {e_s:.16e}, E_a = {e_a:.16e}, Omega = {omega:.16e}"));
    for t in times {
        let (u, d) = rabi_probabilities(&sys, t);
        table.push(vec![t, u, d]);
    }
    let mut manifest = Manifest::default();
    save(&table, dir, "rabi.csv", &mut manifest)?;
    Ok((config, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("256x512").unwrap(), (256, 512));
        assert_eq!(parse_grid(" 8 X 9 ").unwrap(), (8, 9));
        assert!(parse_grid("256").is_err());
    }

    #[test]
    fn flags_override_defaults() {
        let args = CommonArgs {
            b: Some(3.0),
            epsilon: Some(-0.2),
            order: Some(4),
            grid: Some("16x32".into()),
            ..Default::default()
        };
        let c = args.resolve(Some(8.0)).unwrap();
        assert_eq!((c.b, c.epsilon, c.series_order, c.n_phi, c.n_z), (3.0, -0.2, 4, 16, 32));
        assert_eq!(CommonArgs::default().resolve(Some(8.0)).unwrap().b, 8.0);
    }

    #[test]
    fn validation_failures_exit_with_one() {
        let dir = std::env::temp_dir().join("cylq-cli-unit");
        let code = run(["cylq", "spectrum", "--b", "-1", "--out", dir.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert_eq!(run(["cylq", "nonsense"]), 1);
    }
}
