//! Argument parsing and dispatch for the `circum` binary.
//!
//! Every subcommand writes a CSV or JSON report to `--out` (stdout when
//! omitted). Exit codes: 0 on success, 2 for invalid input, 1 when a
//! computation fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use circum_core::bconst::{b_lower, BoundRow};
use circum_core::experiments::{bound_shapes, dyadic_hs, measured_ratio, squeeze_sweep, sweep_rate, FamilySpec};
use circum_core::fem::convergence_study;
use circum_core::geometry::{metrics, Triangle};
use circum_core::interpolation::ErrorField;
use circum_core::norms::{sobolev_seminorm_auto, FieldWithDerivatives, SinSin};
use circum_core::report::{render_json, render_report, Cell, CsvRecord, Format};
use circum_core::{Error, Poly2};

#[derive(Debug, Parser)]
#[command(
    name = "circum",
    version,
    about = "Interpolation error estimates on triangles measured by the circumradius"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format. CSV floats carry 17 significant digits.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
    /// Seed for the sampled error-constant search (p ≠ 2).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Extra exactness degrees for automatically chosen quadrature rules
    /// [default: 2, or CIRCUM_QUAD_BUMP].
    #[arg(long, global = true)]
    pub quad_bump: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

/// Vertex coordinates `x1 y1 x2 y2 x3 y3`.
#[derive(Debug, Args)]
pub struct TriangleArgs {
    /// Triangle vertices as x1 y1 x2 y2 x3 y3; clockwise input is reoriented.
    #[arg(num_args = 6, value_names = ["X1", "Y1", "X2", "Y2", "X3", "Y3"], allow_negative_numbers = true, required = true)]
    pub coords: Vec<f64>,
}

impl TriangleArgs {
    fn triangle(&self) -> Result<Triangle, Error> {
        let c: [f64; 6] = self
            .coords
            .clone()
            .try_into()
            .map_err(|_| Error::InvalidParameter("expected 6 coordinates".into()))?;
        Triangle::from_coords(c)
    }
}

/// Interpolated functions offered by `interp-error`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldChoice {
    /// x²
    X2,
    /// x·y
    Xy,
    /// y²
    Y2,
    /// x³
    X3,
    /// sin(πx) sin(πy)
    Sinsin,
}

impl FieldChoice {
    fn build(self) -> Box<dyn FieldWithDerivatives> {
        let mono = |i, j| Box::new(Poly2::monomial(i, j, 1.0).expect("small degree")) as Box<dyn FieldWithDerivatives>;
        match self {
            FieldChoice::X2 => mono(2, 0),
            FieldChoice::Xy => mono(1, 1),
            FieldChoice::Y2 => mono(0, 2),
            FieldChoice::X3 => mono(3, 0),
            FieldChoice::Sinsin => Box::new(SinSin::new()),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Edge lengths, area, circumradius R, inradius diameter, angles,
    /// chunkiness h/ρ and semiregularity R/h of one triangle.
    Metrics(TriangleArgs),
    /// Measured |v - I^k v|_{m,p} on one triangle with the standard,
    /// circumradius and maximum-angle bound shapes.
    InterpError {
        #[command(flatten)]
        tri: TriangleArgs,
        /// Interpolation order k (1 to 5).
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Derivative order m of the error seminorm (at most k).
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Lebesgue exponent p in [1, ∞]; use `inf` for the maximum norm.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Function being interpolated.
        #[arg(long, value_enum, default_value_t = FieldChoice::X2)]
        field: FieldChoice,
    },
    /// Lower bound of the interpolation error constant
    /// sup |v - I^k v|_{m,p} / |v|_{k+1,p} and its ratio to (R/h)^m h^{k+1-m}.
    Bconst {
        #[command(flatten)]
        tri: TriangleArgs,
        /// Derivative order m of the error seminorm.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Interpolation order k (1 to 5).
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Lebesgue exponent p; p = 2 is solved exactly, others are sampled.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Random directions for the sampled search.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Error sweep of v = x² over the triangles (0,0), (h,0), (h^α, h^β),
    /// fitting convergence rates as h → 0.
    Family {
        /// Exponent α of the flattened vertices, 1 < α < β.
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Exponent β of the apex height, α < β < 1 + α.
        #[arg(long, default_value_t = 2.2)]
        beta: f64,
        /// Interpolation order k.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Derivative order m of the error seminorm.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Lebesgue exponent p.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Smallest h; the sweep uses h = 2^-3, 2^-4, … down to this value.
        #[arg(long, default_value_t = 2e-3)]
        hmin: f64,
        /// Multiply every triangle by this factor.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Also write the fitted rates as JSON to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Error-constant lower bounds on the right triangles (0,0), (1,0), (0,α).
    Squeeze {
        /// Comma-separated α values in (0, 1].
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.1,0.01")]
        alphas: Vec<f64>,
        /// Interpolation order k.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Derivative order m of the error seminorm.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Lebesgue exponent p; p = 2 is solved exactly, others are sampled.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Random directions for the sampled search.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// P1 solution of -Δu = f on the unit square with u = sin(πx) sin(πy),
    /// on criss-cross meshes with n columns and round(n^q) rows.
    Fem {
        /// Row exponent q ≥ 1; the circumradius shrinks with the mesh size
        /// only for q < 2.
        #[arg(long, default_value_t = 1.2)]
        q: f64,
        /// Comma-separated column counts.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n: Vec<usize>,
        /// Measure only the interpolation error.
        #[arg(long)]
        no_solve: bool,
        /// Also write the fitted rates as JSON to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

/// One row of `interp-error`.
#[derive(Debug, Clone, Serialize)]
pub struct InterpRow {
    pub field: String,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub error: f64,
    pub norm: f64,
    pub ratio: f64,
    pub bound_standard: f64,
    pub bound_circum: f64,
    pub bound_jamet: f64,
}

impl CsvRecord for InterpRow {
    fn header() -> Vec<&'static str> {
        vec![
            "field",
            "k",
            "m",
            "p",
            "error",
            "norm",
            "ratio",
            "bound_standard",
            "bound_circum",
            "bound_jamet",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.field.clone()),
            Cell::Int(self.k as i64),
            Cell::Int(self.m as i64),
            Cell::Float(self.p),
            Cell::Float(self.error),
            Cell::Float(self.norm),
            Cell::Float(self.ratio),
            Cell::Float(self.bound_standard),
            Cell::Float(self.bound_circum),
            Cell::Float(self.bound_jamet),
        ]
    }
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Error> {
    let c = &cli.common;
    if let Some(b) = c.quad_bump {
        // read once by the quadrature module on first use
        std::env::set_var("CIRCUM_QUAD_BUMP", b.to_string());
    }
    let format: Format = c.format.into();
    let text = match &cli.command {
        Command::Metrics(t) => render_report(&[metrics(&t.triangle()?)], format)?,
        Command::InterpError { tri, k, m, p, field } => {
            let t = tri.triangle()?;
            let v = field.build();
            if m > k {
                return Err(Error::InvalidParameter(format!("m = {m} must not exceed k = {k}")));
            }
            let e = ErrorField::new(v.as_ref(), *k, &t)?;
            let error = sobolev_seminorm_auto(&e, *m, *p, &t)?;
            let norm = sobolev_seminorm_auto(v.as_ref(), k + 1, *p, &t)?;
            let b = bound_shapes(&metrics(&t), *k, *m);
            let row = InterpRow {
                field: field.to_possible_value().expect("no skipped variants").get_name().to_string(),
                k: *k,
                m: *m,
                p: *p,
                error,
                norm,
                ratio: measured_ratio(v.as_ref(), &t, *k, *m, *p)?,
                bound_standard: b.standard,
                bound_circum: b.circum,
                bound_jamet: b.jamet,
            };
            render_report(&[row], format)?
        }
        Command::Bconst { tri, m, k, p, samples } => {
            let t = tri.triangle()?;
            let est = b_lower(*m, *k, *p, &t, *samples, c.seed)?;
            render_report(&[BoundRow::new(&est, &metrics(&t), *m, *k, *p)], format)?
        }
        Command::Family {
            alpha,
            beta,
            k,
            m,
            p,
            hmin,
            scale,
            summary,
        } => {
            if !(*hmin > 0.0 && *hmin <= 0.125) {
                return Err(Error::InvalidParameter(format!("hmin = {hmin} must lie in (0, 1/8]")));
            }
            let spec = FamilySpec::alpha_beta(*alpha, *beta, dyadic_hs(*hmin))?.with_scale(*scale)?;
            let v = Poly2::monomial(2, 0, 1.0)?;
            let sweep = sweep_rate(&spec, &v, *k, *m, *p)?;
            if let Some(path) = summary {
                std::fs::write(path, render_json(&sweep.summary)?)?;
            }
            match format {
                Format::Csv => render_report(&sweep.rows, format)?,
                Format::Json => render_json(&sweep)?,
            }
        }
        Command::Squeeze { alphas, k, m, p, samples } => {
            render_report(&squeeze_sweep(alphas, *k, *m, *p, *samples, c.seed)?, format)?
        }
        Command::Fem { q, n, no_solve, summary } => {
            let u = SinSin::new();
            let study = convergence_study(*q, n, &u, &u.laplacian_rhs(), !no_solve)?;
            if let Some(path) = summary {
                std::fs::write(path, render_json(&study.rates)?)?;
            }
            match format {
                Format::Csv => render_report(&study.rows, format)?,
                Format::Json => render_json(&study)?,
            }
        }
    };
    emit(&text, &c.out, stdout)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["circum"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn metrics_row() {
        let (code, out, _) = call(&["metrics", "0", "0", "1", "0", "0", "1"]);
        assert_eq!(code, 0);
        let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert!((row[4] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn negative_coordinates_parse() {
        let (code, _, err) = call(&["metrics", "-1", "0", "1", "0", "0", "-1.5"]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn validation_errors_exit_2() {
        assert_eq!(call(&["family", "--alpha", "1.5", "--beta", "2.8"]).0, 2);
        assert_eq!(call(&["metrics", "0", "0", "1", "0", "2", "0"]).0, 2);
        assert_eq!(call(&["metrics", "0", "0", "one", "0", "0", "1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["interp-error", "0", "0", "1", "0", "0", "1", "--k", "1", "--m", "2"]).0, 2);
        assert_eq!(call(&["bconst", "0", "0", "1", "0", "0", "1", "--k", "9"]).0, 2);
        assert_eq!(call(&["fem", "--q", "2.5", "--n", "4,64"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("family"));
    }
}
