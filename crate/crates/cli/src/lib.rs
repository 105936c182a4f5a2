//! Command-line front end: JSON file formats, SVG rendering, and the
//! `solve`, `verify`, `ears`, `render` and `los-table` commands.
//!
//! Exit codes: 0 success, 2 not certified / verification failed, 3 invalid
//! input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use polyharm::asymptotics::{los_empirical, los_limit};
use polyharm::pole_sum::RootOptions;
use polyharm::{Certificate, Complex64, Error, Partition, Polygon, SolveOptions, StepMap, VerificationReport, VerifyOptions};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonFile {
    pub fn polygon(&self) -> polyharm::Result<Polygon> {
        Polygon::normalize(&to_complex(&self.vertices))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarTraceEntry {
    pub ear_index: usize,
    pub relabel_offset: usize,
    pub epsilon: f64,
    pub w0: [f64; 2],
    pub halvings: u32,
    /// `null` when the insertion left no finite zeros.
    pub margin: Option<f64>,
    pub root_shift: f64,
}

/// Serialized [`Certificate`]. Floats are written in shortest round-trip
/// form, so reloading gives bit-identical doubles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub vertices: Vec<[f64; 2]>,
    pub angles: Vec<f64>,
    pub roots: Vec<[f64; 2]>,
    pub root_error_radii: Vec<f64>,
    /// `null` stands for +∞ (no finite zeros).
    pub exterior_margin: Option<f64>,
    pub ear_trace: Vec<EarTraceEntry>,
    pub verification: Option<VerificationReport>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &Certificate) -> CertificateFile {
        CertificateFile {
            vertices: from_complex(cert.step_map.polygon().vertices()),
            angles: cert.step_map.partition().angles().to_vec(),
            roots: from_complex(&cert.roots.roots),
            root_error_radii: cert.roots.error_radii.clone(),
            exterior_margin: finite(cert.exterior_margin),
            ear_trace: cert
                .ear_trace
                .iter()
                .map(|s| EarTraceEntry {
                    ear_index: s.ear_index,
                    relabel_offset: s.relabel_offset,
                    epsilon: s.epsilon,
                    w0: [s.w0.re, s.w0.im],
                    halvings: s.halvings,
                    margin: finite(s.margin),
                    root_shift: s.root_shift,
                })
                .collect(),
            verification: cert.checks.clone(),
        }
    }

    pub fn step_map(&self) -> polyharm::Result<StepMap> {
        let polygon = Polygon::normalize(&to_complex(&self.vertices))?;
        if polygon.vertices() != to_complex(&self.vertices).as_slice() {
            return Err(Error::InvalidPartition("certificate vertices are not in normalized order".into()));
        }
        StepMap::new(polygon, Partition::new(self.angles.clone())?)
    }

    pub fn margin(&self) -> f64 {
        self.exterior_margin.unwrap_or(f64::INFINITY)
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[x, y]| Complex64::new(x, y)).collect()
}

fn from_complex(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Parser)]
#[command(name = "polyharm", version, about = "Univalent harmonic maps of the disk onto polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a certified partition for a polygon.
    Solve {
        polygon: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = SolveOptions::default().min_margin)]
        min_margin: f64,
        #[arg(long, default_value_t = SolveOptions::default().eps0)]
        eps0: f64,
        #[arg(long, default_value_t = SolveOptions::default().max_halvings)]
        max_halvings: u32,
        /// Number of starting rings tried by the root finder.
        #[arg(long, default_value_t = RootOptions::default().restarts)]
        seed_grid: usize,
    },
    /// Check a certificate against its polygon.
    Verify {
        polygon: PathBuf,
        certificate: PathBuf,
        /// Jacobian polar grid as RADIIxANGLES.
        #[arg(long, default_value = "64x256", value_parser = parse_grid)]
        jacobian_grid: (usize, usize),
        #[arg(long, default_value_t = VerifyOptions::default().boundary_samples)]
        boundary_samples: usize,
    },
    /// List the ears of a polygon with their robustness.
    Ears { polygon: PathBuf },
    /// Draw the image of a polar grid under a certified map.
    Render {
        polygon: PathBuf,
        certificate: PathBuf,
        /// Concentric circles x radial segments.
        #[arg(long, default_value = "8x16", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long)]
        svg: PathBuf,
    },
    /// Tabulate omega(z)/y against its boundary limit B/(A^2+AB).
    LosTable {
        #[arg(long, short = 'a')]
        a: f64,
        #[arg(long, short = 'b')]
        b: f64,
        /// Approach angles in radians, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_2, 5.0 * std::f64::consts::FRAC_PI_6])]
        angles: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
        ys: Vec<f64>,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected RxS, got {s:?}"))?;
    Ok((r.parse().map_err(|e| format!("{e}"))?, a.parse().map_err(|e| format!("{e}"))?))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (exit {})", self.message, self.code)
    }
}

fn invalid(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INVALID, message: message.to_string() }
}

pub type CmdResult = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { polygon, out: path, svg, min_margin, eps0, max_halvings, seed_grid } => {
            let opts = SolveOptions {
                min_margin,
                eps0,
                max_halvings,
                roots: RootOptions { restarts: seed_grid.max(1), ..RootOptions::default() },
                ..SolveOptions::default()
            };
            cmd_solve(&polygon, path.as_deref(), svg.as_deref(), &opts, out)
        }
        Command::Verify { polygon, certificate, jacobian_grid, boundary_samples } => {
            let opts = VerifyOptions {
                jacobian_radii: jacobian_grid.0,
                jacobian_angles: jacobian_grid.1,
                boundary_samples,
                ..VerifyOptions::default()
            };
            cmd_verify(&polygon, &certificate, &opts, out)
        }
        Command::Ears { polygon } => cmd_ears(&polygon, out),
        Command::Render { polygon, certificate, grid, svg } => cmd_render(&polygon, &certificate, grid, &svg),
        Command::LosTable { a, b, angles, ys } => cmd_los_table(a, b, &angles, &ys, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_polygon(path: &Path) -> Result<Polygon, Failure> {
    read_json::<PolygonFile>(path)?.polygon().map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_pair(polygon: &Path, certificate: &Path) -> Result<StepMap, Failure> {
    let polygon = load_polygon(polygon)?;
    let file: CertificateFile = read_json(certificate)?;
    let map = file.step_map().map_err(|e| invalid(format!("{}: {e}", certificate.display())))?;
    let same = polygon.len() == map.polygon().len()
        && polygon.vertices().iter().zip(map.polygon().vertices()).all(|(a, b)| (a - b).norm() <= 1e-12);
    if !same {
        return Err(invalid("certificate vertices do not match the polygon"));
    }
    Ok(map)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn io(e: std::io::Error) -> Failure {
    Failure { code: EXIT_INVALID, message: e.to_string() }
}

pub fn cmd_solve(
    polygon: &Path,
    out_path: Option<&Path>,
    svg: Option<&Path>,
    opts: &SolveOptions,
    out: &mut dyn Write,
) -> CmdResult {
    let polygon = load_polygon(polygon)?;
    let mut cert = match polyharm::solve(&polygon, opts) {
        Ok(cert) => cert,
        Err(e @ (Error::InvalidPolygon(_) | Error::TooFewVertices(_))) => return Err(invalid(e)),
        Err(e) => return Err(Failure { code: EXIT_FAILED, message: format!("not certified: {e}") }),
    };
    let report = polyharm::verify(&cert.step_map, &VerifyOptions::default())
        .map_err(|e| Failure { code: EXIT_FAILED, message: format!("verification error: {e}") })?;
    let pass = report.pass;
    cert.checks = Some(report);

    writeln!(out, "vertices: {}", polygon.len()).map_err(io)?;
    writeln!(out, "exterior margin: {}", fmt_margin(cert.exterior_margin)).map_err(io)?;
    for (level, s) in cert.ear_trace.iter().enumerate() {
        writeln!(
            out,
            "ear {level}: index {} epsilon {:e} halvings {} margin {}",
            s.ear_index,
            s.epsilon,
            s.halvings,
            fmt_margin(s.margin)
        )
        .map_err(io)?;
    }
    writeln!(out, "verification: {}", if pass { "pass" } else { "FAIL" }).map_err(io)?;

    if let Some(path) = out_path {
        write_file(path, &to_json(&CertificateFile::from_certificate(&cert)))?;
    }
    if let Some(path) = svg {
        write_file(path, &render_svg(&cert.step_map, 8, 16))?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

fn fmt_margin(m: f64) -> String {
    if m.is_finite() {
        format!("{m:e}")
    } else {
        "inf (no finite zeros)".into()
    }
}

pub fn cmd_verify(polygon: &Path, certificate: &Path, opts: &VerifyOptions, out: &mut dyn Write) -> CmdResult {
    let map = load_pair(polygon, certificate)?;
    let report = polyharm::verify(&map, opts).map_err(|e| Failure { code: EXIT_FAILED, message: e.to_string() })?;
    writeln!(out, "{}", to_json(&report)).map_err(io)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_ears(polygon: &Path, out: &mut dyn Write) -> CmdResult {
    let polygon = load_polygon(polygon)?;
    let ears = polygon.find_ears().map_err(invalid)?;
    writeln!(out, "{}", to_json(&ears)).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn cmd_render(polygon: &Path, certificate: &Path, grid: (usize, usize), svg: &Path) -> CmdResult {
    let map = load_pair(polygon, certificate)?;
    write_file(svg, &render_svg(&map, grid.0, grid.1))?;
    Ok(EXIT_OK)
}

pub fn cmd_los_table(a: f64, b: f64, angles: &[f64], ys: &[f64], out: &mut dyn Write) -> CmdResult {
    let text = los_table(a, b, angles, ys).map_err(invalid)?;
    write!(out, "{text}").map_err(io)?;
    Ok(EXIT_OK)
}

/// CSV with columns `angle,y,omega_over_y,limit,abs_error`.
pub fn los_table(a: f64, b: f64, angles: &[f64], ys: &[f64]) -> polyharm::Result<String> {
    let limit = los_limit(a, b)?;
    let mut csv = String::from("angle,y,omega_over_y,limit,abs_error\n");
    for &phi in angles {
        if !(phi > 0.0 && phi < std::f64::consts::PI) {
            return Err(Error::NotUpperHalfPlane(Complex64::from_polar(1.0, phi)));
        }
        for &y in ys {
            let v = los_empirical(a, b, phi, y)?;
            writeln!(csv, "{phi},{y},{v},{limit},{}", (v - limit).abs()).unwrap();
        }
    }
    Ok(csv)
}

const SVG_SIZE: f64 = 800.0;
const SVG_PAD: f64 = 40.0;
const CURVE_SAMPLES: usize = 512;

/// SVG 1.1 drawing of the polygon and the images of `circles` concentric
/// circles `|z| = k/(circles+1)` and `rays` radial segments.
pub fn render_svg(map: &StepMap, circles: usize, rays: usize) -> String {
    let v = map.polygon().vertices();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in v {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let scale = (SVG_SIZE - 2.0 * SVG_PAD) / (x1 - x0).max(y1 - y0);
    let width = (x1 - x0) * scale + 2.0 * SVG_PAD;
    let height = (y1 - y0) * scale + 2.0 * SVG_PAD;
    let px = |z: Complex64| ((z.re - x0) * scale + SVG_PAD, (y1 - z.im) * scale + SVG_PAD);
    let points = |zs: &mut dyn Iterator<Item = Complex64>| {
        let mut s = String::new();
        for z in zs {
            let (x, y) = px(z);
            if !s.is_empty() {
                s.push(' ');
            }
            write!(s, "{x:.3},{y:.3}").unwrap();
        }
        s
    };

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r##"<g fill="none" stroke="#3b6ea8" stroke-width="0.8">"##).unwrap();
    let image = |z: Complex64| map.evaluate(z).expect("grid points lie inside the disk");
    for k in 1..=circles {
        let r = k as f64 / (circles + 1) as f64;
        let mut it = (0..=CURVE_SAMPLES)
            .map(|j| image(Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / CURVE_SAMPLES as f64)));
        writeln!(svg, r#"<polyline points="{}"/>"#, points(&mut it)).unwrap();
    }
    for j in 0..rays {
        let theta = std::f64::consts::TAU * j as f64 / rays as f64;
        let mut it = (0..CURVE_SAMPLES)
            .map(|i| image(Complex64::from_polar((1.0 - 1e-3) * i as f64 / (CURVE_SAMPLES - 1) as f64, theta)));
        writeln!(svg, r#"<polyline points="{}"/>"#, points(&mut it)).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    writeln!(
        svg,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        points(&mut v.iter().copied())
    )
    .unwrap();
    let centroid = v.iter().sum::<Complex64>() / v.len() as f64;
    writeln!(svg, r#"<g font-family="sans-serif" font-size="14">"#).unwrap();
    for (k, &c) in v.iter().enumerate() {
        let (x, y) = px(c);
        let (cx, cy) = px(centroid);
        let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt().max(1e-9);
        let (lx, ly) = (x + 16.0 * (x - cx) / d, y + 16.0 * (y - cy) / d);
        writeln!(svg, r#"<text x="{lx:.3}" y="{ly:.3}" text-anchor="middle">c<tspan baseline-shift="sub" font-size="10">{}</tspan></text>"#, k + 1).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    writeln!(svg, "</svg>").unwrap();
    svg
}
