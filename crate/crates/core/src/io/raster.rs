//! Binary PPM (P6) frames of a complex field on the unrolled cylinder:
//! φ runs left to right, z runs bottom to top, hue encodes arg Ψ and
//! brightness encodes |Ψ| relative to a shared maximum.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spinless::ComplexField;

/// HSV hue in degrees for a phase: 1, i, −1, −i land on red, green, blue and
/// purple, linearly in between.
pub fn phase_hue(arg: f64) -> f64 {
    let a = arg.rem_euclid(2.0 * PI);
    const ANCHORS: [f64; 5] = [0.0, 120.0, 240.0, 300.0, 360.0];
    let q = ((a / FRAC_PI_2) as usize).min(3);
    let frac = (a - q as f64 * FRAC_PI_2) / FRAC_PI_2;
    ANCHORS[q] + frac * (ANCHORS[q + 1] - ANCHORS[q])
}

/// Full-saturation HSV to 8-bit RGB.
pub fn hsv_to_rgb(hue: f64, value: f64) -> [u8; 3] {
    let h = hue.rem_euclid(360.0) / 60.0;
    let v = value.clamp(0.0, 1.0);
    let x = v * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (v, x, 0.0),
        1 => (x, v, 0.0),
        2 => (0.0, v, x),
        3 => (0.0, x, v),
        4 => (x, 0.0, v),
        _ => (v, 0.0, x),
    };
    let q = |c: f64| (c * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

pub fn pixel(value: Complex64, max_abs: f64) -> [u8; 3] {
    let brightness = if max_abs > 0.0 { value.norm() / max_abs } else { 0.0 };
    hsv_to_rgb(phase_hue(value.arg()), brightness)
}

/// Rendering parameters for a set of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub n_phi: usize,
    pub n_z: usize,
    pub times: Vec<f64>,
    /// Field component drawn (0 for spinless fields or the upper spinor entry).
    pub component: usize,
    pub out_dir: PathBuf,
    pub prefix: String,
}

impl FrameSpec {
    pub fn frame_name(&self, index: usize) -> String {
        format!("{}_frame_{index:03}.ppm", self.prefix)
    }
}

/// Largest |Ψ| over all frames; frames share this brightness scale.
pub fn frame_set_max(frames: &[ComplexField], component: usize) -> f64 {
    frames.iter().map(|f| f.max_abs(component)).fold(0.0, f64::max)
}

/// Encodes one frame. The top image row is the largest z.
pub fn render_frame(field: &ComplexField, component: usize, max_abs: f64) -> Result<Vec<u8>> {
    let grid = field.grid();
    let (w, h) = (grid.n_phi(), grid.n_z());
    let header = format!("P6\n{w} {h}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * w * h);
    out.extend_from_slice(header.as_bytes());
    for row in 0..h {
        let iz = h - 1 - row;
        for iphi in 0..w {
            let v = field.get(component, iz, iphi);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { iz, iphi, component });
            }
            out.extend_from_slice(&pixel(v, max_abs));
        }
    }
    Ok(out)
}

/// Parses a P6 header, returning (width, height, offset of the pixel data).
pub fn parse_p6_header(bytes: &[u8]) -> Option<(usize, usize, usize)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_string());
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    Some((fields[1].parse().ok()?, fields[2].parse().ok()?, pos + 1))
}

/// Renders every frame (in parallel) and writes them to `spec.out_dir`.
/// Returns the written file names in frame order.
pub fn write_frames(frames: &[ComplexField], spec: &FrameSpec) -> Result<Vec<String>> {
    use rayon::prelude::*;
    let max_abs = frame_set_max(frames, spec.component);
    let encoded: Vec<Vec<u8>> = frames
        .par_iter()
        .map(|f| render_frame(f, spec.component, max_abs))
        .collect::<Result<_>>()?;
    let mut names = Vec::with_capacity(frames.len());
    for (i, bytes) in encoded.iter().enumerate() {
        let name = spec.frame_name(i);
        fs::write(spec.out_dir.join(&name), bytes)?;
        names.push(name);
    }
    Ok(names)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Run record: command, crate version, config echo, notes and the checksum
/// of every output file. Contains nothing time- or host-dependent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub command: String,
    pub config: String,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn render(&self, dir: &Path) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "# cylq run manifest");
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "version = {}", env!("CARGO_PKG_VERSION"));
        for n in &self.notes {
            let _ = writeln!(out, "note = {n}");
        }
        let _ = writeln!(out, "[config]");
        out.push_str(&self.config);
        let _ = writeln!(out, "[files]");
        for name in &self.files {
            let bytes = fs::read(dir.join(name))?;
            let _ = writeln!(out, "{}  {name}", sha256_hex(&bytes));
        }
        Ok(out)
    }

    pub fn write(&self, dir: &Path, file_name: &str) -> Result<()> {
        fs::write(dir.join(file_name), self.render(dir)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinless::FieldGrid;

    fn constant_field(v: Complex64) -> ComplexField {
        let grid = FieldGrid::uniform(5, 0.0, 1.0, 3);
        ComplexField::new(grid, vec![vec![v; 15]])
    }

    #[test]
    fn quadrant_colours() {
        assert_eq!(pixel(Complex64::new(1.0, 0.0), 1.0), [255, 0, 0]);
        assert_eq!(pixel(Complex64::new(0.0, 1.0), 1.0), [0, 255, 0]);
        assert_eq!(pixel(Complex64::new(-1.0, 0.0), 1.0), [0, 0, 255]);
        assert_eq!(pixel(Complex64::new(0.0, -1.0), 1.0), [255, 0, 255]);
        assert_eq!(pixel(Complex64::new(0.0, 0.0), 1.0), [0, 0, 0]);
    }

    #[test]
    fn constant_field_is_uniform_red() {
        let bytes = render_frame(&constant_field(Complex64::new(2.0, 0.0)), 0, 2.0).unwrap();
        let (w, h, off) = parse_p6_header(&bytes).unwrap();
        assert_eq!((w, h), (5, 3));
        assert_eq!(bytes.len(), off + 3 * 15);
        assert!(bytes[off..].chunks(3).all(|p| p == [255, 0, 0]));
    }

    #[test]
    fn multiplying_by_i_moves_one_quadrant() {
        for arg in [0.1, 1.0, 2.5, 4.0] {
            let v = Complex64::from_polar(0.7, arg);
            let h0 = phase_hue(arg);
            let h1 = phase_hue(arg + FRAC_PI_2);
            let q0 = (h0 / 1.0) as i32;
            assert!(h1 != h0 && q0 >= 0);
            let p0 = pixel(v, 1.0);
            let p1 = pixel(v * Complex64::i(), 1.0);
            assert_eq!(p0.iter().max(), p1.iter().max(), "brightness is preserved");
        }
        // each quadrant boundary maps to the next anchor
        for k in 0..4 {
            let a = phase_hue(k as f64 * FRAC_PI_2);
            let b = phase_hue((k + 1) as f64 * FRAC_PI_2);
            assert!(a < b || k == 3);
        }
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let mut values = vec![Complex64::new(1.0, 0.0); 15];
        values[7] = Complex64::new(f64::NAN, 0.0);
        let f = ComplexField::new(FieldGrid::uniform(5, 0.0, 1.0, 3), vec![values]);
        match render_frame(&f, 0, 1.0) {
            Err(Error::NonFinite { iz, iphi, component }) => assert_eq!((iz, iphi, component), (1, 2, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn checksum_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
