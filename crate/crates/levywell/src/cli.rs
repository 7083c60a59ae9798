//! Command-line surface. Every command is a pure function of its
//! arguments: identical configurations produce byte-identical output.
//!
//! Output conventions:
//! * JSON for scalar and summary records, CSV for field data;
//! * floats rendered with 17 significant digits so values round-trip;
//! * every document embeds the full run configuration;
//! * output goes to `--out`, else to `$LEVYWELL_OUT_DIR/<command>.<ext>`
//!   when that variable is set, else to standard output, and is written
//!   in one piece only after the computation succeeded;
//! * exit codes: 0 success, 2 invalid arguments or configuration,
//!   3 numerical non-convergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::evolution::{expand, SpectralCoefficients};
use crate::freekernel::{
    free_kernel, free_kernel_extrapolated, EtaLadder, KernelQuery, TimeType,
};
use crate::grid::WaveFunction;
use crate::params::FractionalParams;
use crate::residual::fse_residual;
use crate::riesz::{RieszMethod, SingularOpts};
use crate::verify::{checks, run_all, VerifyOptions};
use crate::well::{eigenstate, well_kernel_images, well_kernel_spectral};
use crate::Grid;

/// Floats carry 17 significant digits: enough to reproduce the exact
/// binary value on re-parse.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TimeArg {
    Real,
    Imaginary,
}

impl From<TimeArg> for TimeType {
    fn from(t: TimeArg) -> TimeType {
        match t {
            TimeArg::Real => TimeType::Real,
            TimeArg::Imaginary => TimeType::Imaginary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelMode {
    Free,
    WellImages,
    WellSpectral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Singular,
}

/// Physical parameters shared by every command.
#[derive(Debug, Args, Clone)]
pub struct PhysicalArgs {
    /// Levy index, 1 < alpha <= 2
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    /// Fractional diffusion coefficient D_alpha
    #[arg(long = "d", default_value_t = 1.0)]
    pub d_alpha: f64,
    /// Reduced action quantum
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Well half-width
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
}

impl PhysicalArgs {
    fn params(&self) -> Result<FractionalParams> {
        FractionalParams::new(self.alpha, self.d_alpha, self.hbar, self.l)
    }

    fn config_fields(&self, out: &mut String) {
        let _ = write!(
            out,
            "\"alpha\":{},\"d_alpha\":{},\"hbar\":{},\"l\":{}",
            fmt_f(self.alpha),
            fmt_f(self.d_alpha),
            fmt_f(self.hbar),
            fmt_f(self.l)
        );
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "levywell",
    about = "Fractional quantum mechanics in an infinite square well",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels, wavenumbers and parities of the well
    Spectrum(SpectrumArgs),
    /// Samples of one eigenfunction as CSV
    Eigenfunction(EigenfunctionArgs),
    /// Free or in-well propagator values
    Kernel(KernelArgs),
    /// Evolve a state and report norm, energy and fidelity per step
    Evolve(EvolveArgs),
    /// Stationary-equation residual diagnostic of one mode
    Residual(ResidualArgs),
    /// Run the cross-validation suite and print a pass/fail table
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub phys: PhysicalArgs,
    /// Number of levels to emit
    #[arg(long = "n-max")]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed recorded in the configuration (used by randomized checks)
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EigenfunctionArgs {
    #[command(flatten)]
    pub phys: PhysicalArgs,
    /// Mode index, starting at 1
    #[arg(long)]
    pub n: usize,
    /// Sample count over [-l, l] (odd counts include the midpoint)
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub phys: PhysicalArgs,
    #[arg(long, value_enum)]
    pub mode: KernelMode,
    #[arg(long, value_enum, default_value_t = TimeArg::Imaginary)]
    pub time: TimeArg,
    /// Elapsed time (tau for imaginary time)
    #[arg(long)]
    pub t: f64,
    /// Source point
    #[arg(long, default_value_t = 0.0)]
    pub xa: f64,
    /// Final point; ignored when --grid is given
    #[arg(long)]
    pub xb: Option<f64>,
    /// Emit this many records with x_b sweeping [-l, l]
    #[arg(long, conflicts_with = "xb")]
    pub grid: Option<usize>,
    /// Image truncation M
    #[arg(long, default_value_t = 50)]
    pub images: usize,
    /// Mode truncation N
    #[arg(long, default_value_t = 200)]
    pub modes: usize,
    /// With a well mode: also compute the other representation and an
    /// |images - spectral| column
    #[arg(long)]
    pub verify_equivalence: bool,
    /// Largest damping of the eta ladder (real time)
    #[arg(long, default_value_t = 0.1)]
    pub eta0: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub phys: PhysicalArgs,
    /// Initial state: "builtin:uniform" or "file:PATH" (CSV x,re,im on a
    /// uniform bounded grid)
    #[arg(long)]
    pub init: String,
    /// Total evolution time
    #[arg(long)]
    pub t: f64,
    /// Number of equal steps
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Eigenbasis truncation
    #[arg(long, default_value_t = 200)]
    pub modes: usize,
    /// Grid points for reconstruction and builtin states
    #[arg(long, default_value_t = 1025)]
    pub points: usize,
    /// Also write the final field as CSV here
    #[arg(long)]
    pub dump_final: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub phys: PhysicalArgs,
    /// Mode index
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
    pub method: MethodArg,
    /// Padded box width in well widths
    #[arg(long, default_value_t = 4)]
    pub padding: usize,
    /// Fraction of l excluded near each wall
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    /// Points on the padded periodic grid (power of two for spectral)
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// List the checks without running them
    #[arg(long)]
    pub list: bool,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Test hook: force the named check to fail
    #[arg(long, hide = true)]
    pub inject_failure: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv` and runs a command. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Eigenfunction(a) => cmd_eigenfunction(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Residual(a) => cmd_residual(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Writes `content` to the `--out` path, the `LEVYWELL_OUT_DIR` default,
/// or standard output. Called once per command, after all computation.
fn emit(out: &Option<PathBuf>, command: &str, ext: &str, content: &str) -> Result<()> {
    let target: Option<PathBuf> = match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os("LEVYWELL_OUT_DIR")
            .map(|dir| PathBuf::from(dir).join(format!("{command}.{ext}"))),
    };
    match target {
        Some(path) => std::fs::write(&path, content).map_err(|e| {
            Error::Usage(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn config_json(command: &str, phys: &PhysicalArgs, seed: u64, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{{\"command\":\"{}\",", json_escape(command));
    phys.config_fields(&mut s);
    let _ = write!(s, ",\"seed\":{seed}");
    for (k, v) in extra {
        let _ = write!(s, ",\"{}\":{}", json_escape(k), v);
    }
    s.push('}');
    s
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<i32> {
    if a.n_max < 1 {
        return Err(Error::Usage("--n-max must be at least 1".into()));
    }
    let params = a.phys.params()?;
    let config = config_json(
        "spectrum",
        &a.phys,
        a.seed,
        &[("n_max", a.n_max.to_string()), ("format", format!("\"{:?}\"", a.format).to_lowercase())],
    );
    let rows: Vec<_> = (1..=a.n_max)
        .map(|n| eigenstate(n, &params))
        .collect::<Result<_>>()?;
    let content = match a.format {
        OutputFormat::Json => {
            let mut s = String::new();
            let _ = write!(s, "{{\"config\":{config},\"records\":[");
            for (i, st) in rows.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(
                    s,
                    "{{\"n\":{},\"k_n\":{},\"energy\":{},\"parity\":\"{}\"}}",
                    st.n(),
                    fmt_f(st.wavenumber()),
                    fmt_f(st.energy()),
                    st.parity()
                );
            }
            s.push_str("]}\n");
            s
        }
        OutputFormat::Csv => {
            let mut s = format!("# config = {config}\nn,k_n,energy,parity\n");
            for st in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    st.n(),
                    fmt_f(st.wavenumber()),
                    fmt_f(st.energy()),
                    st.parity()
                );
            }
            s
        }
    };
    emit(&a.out, "spectrum", a.format.ext(), &content)?;
    Ok(0)
}

impl OutputFormat {
    fn ext(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

fn cmd_eigenfunction(a: EigenfunctionArgs) -> Result<i32> {
    let params = a.phys.params()?;
    let state = eigenstate(a.n, &params)?;
    let grid = Grid::bounded(-params.l(), params.l(), a.points)?;
    let config = config_json(
        "eigenfunction",
        &a.phys,
        a.seed,
        &[("n", a.n.to_string()), ("points", a.points.to_string())],
    );
    let mut s = format!(
        "# config = {config}\n# n = {}, parity = {}, k_n = {}, energy = {}\nx,value\n",
        a.n,
        state.parity(),
        fmt_f(state.wavenumber()),
        fmt_f(state.energy())
    );
    for x in grid.points() {
        let _ = writeln!(s, "{},{}", fmt_f(x), fmt_f(state.eval(x)));
    }
    emit(&a.out, "eigenfunction", "csv", &s)?;
    Ok(0)
}

struct KernelRecord {
    x_b: f64,
    value: Complex64,
    error_estimate: Option<f64>,
    comparison: Option<(Complex64, f64)>,
}

fn kernel_value(a: &KernelArgs, params: &FractionalParams, x_b: f64) -> Result<KernelRecord> {
    let time: TimeType = a.time.into();
    let (value, error_estimate) = match (a.mode, time) {
        (KernelMode::Free, TimeType::Imaginary) => {
            let q = KernelQuery::imaginary(x_b, a.xa, a.t, params)?;
            (free_kernel(&q, params)?, None)
        }
        (KernelMode::Free, TimeType::Real) => {
            let ladder = EtaLadder { eta0: a.eta0, levels: 4 };
            let out = free_kernel_extrapolated(x_b, a.xa, a.t, &ladder, params)?;
            (out.value, Some(out.error_estimate))
        }
        (KernelMode::WellImages, t) => {
            (well_kernel_images(x_b, a.xa, a.t, a.images, params, t)?, None)
        }
        (KernelMode::WellSpectral, t) => {
            (well_kernel_spectral(x_b, a.xa, a.t, a.modes, params, t)?, None)
        }
    };
    let comparison = if a.verify_equivalence {
        match a.mode {
            KernelMode::Free => {
                return Err(Error::Usage(
                    "--verify-equivalence needs a well kernel mode".into(),
                ))
            }
            KernelMode::WellImages => {
                let other = well_kernel_spectral(x_b, a.xa, a.t, a.modes, params, time)?;
                Some((other, (value - other).norm()))
            }
            KernelMode::WellSpectral => {
                let other = well_kernel_images(x_b, a.xa, a.t, a.images, params, time)?;
                Some((other, (value - other).norm()))
            }
        }
    } else {
        None
    };
    Ok(KernelRecord { x_b, value, error_estimate, comparison })
}

fn cmd_kernel(a: KernelArgs) -> Result<i32> {
    let params = a.phys.params()?;
    let xbs: Vec<f64> = match (a.xb, a.grid) {
        (Some(xb), None) => vec![xb],
        (None, Some(n)) => {
            let g = Grid::bounded(-params.l(), params.l(), n)?;
            g.points().collect()
        }
        (None, None) => {
            return Err(Error::Usage("kernel needs either --xb or --grid".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let mode_name = match a.mode {
        KernelMode::Free => "free",
        KernelMode::WellImages => "well-images",
        KernelMode::WellSpectral => "well-spectral",
    };
    let time_name = match a.time {
        TimeArg::Real => "real",
        TimeArg::Imaginary => "imaginary",
    };
    let config = config_json(
        "kernel",
        &a.phys,
        a.seed,
        &[
            ("mode", format!("\"{mode_name}\"")),
            ("time", format!("\"{time_name}\"")),
            ("t", fmt_f(a.t)),
            ("xa", fmt_f(a.xa)),
            ("images", a.images.to_string()),
            ("modes", a.modes.to_string()),
            ("verify_equivalence", a.verify_equivalence.to_string()),
            ("eta0", fmt_f(a.eta0)),
        ],
    );
    let records: Vec<KernelRecord> = xbs
        .iter()
        .map(|&xb| kernel_value(&a, &params, xb))
        .collect::<Result<_>>()?;

    let content = match a.format {
        OutputFormat::Json => {
            let mut s = String::new();
            let _ = write!(s, "{{\"config\":{config},\"records\":[");
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(
                    s,
                    "{{\"x_b\":{},\"x_a\":{},\"t\":{},\"re\":{},\"im\":{}",
                    fmt_f(r.x_b),
                    fmt_f(a.xa),
                    fmt_f(a.t),
                    fmt_f(r.value.re),
                    fmt_f(r.value.im)
                );
                if let Some(e) = r.error_estimate {
                    let _ = write!(s, ",\"error_estimate\":{}", fmt_f(e));
                }
                if let Some((other, diff)) = r.comparison {
                    let _ = write!(
                        s,
                        ",\"other_re\":{},\"other_im\":{},\"abs_diff\":{}",
                        fmt_f(other.re),
                        fmt_f(other.im),
                        fmt_f(diff)
                    );
                }
                s.push('}');
            }
            s.push_str("]}\n");
            s
        }
        OutputFormat::Csv => {
            let mut s = format!("# config = {config}\n");
            if a.verify_equivalence {
                s.push_str("x_b,x_a,t,re,im,other_re,other_im,abs_diff\n");
            } else {
                s.push_str("x_b,x_a,t,re,im\n");
            }
            for r in &records {
                let _ = write!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f(r.x_b),
                    fmt_f(a.xa),
                    fmt_f(a.t),
                    fmt_f(r.value.re),
                    fmt_f(r.value.im)
                );
                if let Some((other, diff)) = r.comparison {
                    let _ = write!(
                        s,
                        ",{},{},{}",
                        fmt_f(other.re),
                        fmt_f(other.im),
                        fmt_f(diff)
                    );
                }
                s.push('\n');
            }
            s
        }
    };
    emit(&a.out, "kernel", a.format.ext(), &content)?;
    Ok(0)
}

fn load_initial_state(spec: &str, grid: Grid, params: &FractionalParams) -> Result<WaveFunction> {
    if spec == "builtin:uniform" {
        let amp = 1.0 / (2.0 * params.l()).sqrt();
        return Ok(WaveFunction::from_real_fn(grid, |_| amp));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {path}: {e}")))?;
        let mut values = Vec::new();
        let mut xs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
                continue;
            }
            let mut cols = line.split(',');
            let x: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Usage(format!("bad CSV line: {line}")))?;
            let re: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Usage(format!("bad CSV line: {line}")))?;
            let im: f64 = match cols.next() {
                Some(c) => c
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad CSV line: {line}")))?,
                None => 0.0,
            };
            xs.push(x);
            values.push(Complex64::new(re, im));
        }
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "state file has {} samples but --points is {}",
                values.len(),
                grid.len()
            )));
        }
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.point(i)).abs() > 1e-9 * params.l() {
                return Err(Error::Usage(format!(
                    "state file x-column mismatches the [-l, l] grid at row {i}"
                )));
            }
        }
        return WaveFunction::new(grid, values);
    }
    Err(Error::Usage(format!(
        "unknown --init '{spec}' (expected builtin:uniform or file:PATH)"
    )))
}

fn cmd_evolve(a: EvolveArgs) -> Result<i32> {
    if a.steps < 1 {
        return Err(Error::Usage("--steps must be at least 1".into()));
    }
    let params = a.phys.params()?;
    let grid = Grid::bounded(-params.l(), params.l(), a.points)?;
    let psi0 = load_initial_state(&a.init, grid, &params)?;
    let c0 = expand(&psi0, a.modes, &params)?;
    let dt = a.t / a.steps as f64;

    let fidelity = |c: &SpectralCoefficients| -> f64 {
        let overlap: Complex64 = c0
            .coeffs()
            .iter()
            .zip(c.coeffs())
            .map(|(x, y)| x.conj() * y)
            .sum();
        overlap.norm() / c0.mass()
    };

    struct Row {
        step: usize,
        time: f64,
        norm: f64,
        energy: f64,
        fidelity: f64,
    }
    let mut rows = Vec::with_capacity(a.steps + 1);
    let mut c = c0.clone();
    rows.push(Row {
        step: 0,
        time: 0.0,
        norm: c.mass().sqrt(),
        energy: c.energy_expectation(),
        fidelity: fidelity(&c),
    });
    for step in 1..=a.steps {
        c = c.evolve(dt);
        rows.push(Row {
            step,
            time: dt * step as f64,
            norm: c.mass().sqrt(),
            energy: c.energy_expectation(),
            fidelity: fidelity(&c),
        });
    }

    let config = config_json(
        "evolve",
        &a.phys,
        a.seed,
        &[
            ("init", format!("\"{}\"", json_escape(&a.init))),
            ("t", fmt_f(a.t)),
            ("steps", a.steps.to_string()),
            ("modes", a.modes.to_string()),
            ("points", a.points.to_string()),
            ("truncated_mass", fmt_f(1.0 - c0.mass())),
        ],
    );
    let content = match a.format {
        OutputFormat::Json => {
            let mut s = String::new();
            let _ = write!(s, "{{\"config\":{config},\"records\":[");
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(
                    s,
                    "{{\"step\":{},\"time\":{},\"norm\":{},\"energy\":{},\"fidelity\":{}}}",
                    r.step,
                    fmt_f(r.time),
                    fmt_f(r.norm),
                    fmt_f(r.energy),
                    fmt_f(r.fidelity)
                );
            }
            s.push_str("]}\n");
            s
        }
        OutputFormat::Csv => {
            let mut s = format!("# config = {config}\nstep,time,norm,energy,fidelity\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.step,
                    fmt_f(r.time),
                    fmt_f(r.norm),
                    fmt_f(r.energy),
                    fmt_f(r.fidelity)
                );
            }
            s
        }
    };

    if let Some(path) = &a.dump_final {
        let field = c.reconstruct(&grid)?;
        let mut s = format!("# config = {config}\nx,re,im\n");
        for (i, x) in grid.points().enumerate() {
            let v = field.values()[i];
            let _ = writeln!(s, "{},{},{}", fmt_f(x), fmt_f(v.re), fmt_f(v.im));
        }
        std::fs::write(path, s)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }

    emit(&a.out, "evolve", a.format.ext(), &content)?;
    Ok(0)
}

fn cmd_residual(a: ResidualArgs) -> Result<i32> {
    let params = a.phys.params()?;
    let method = match a.method {
        MethodArg::Spectral => RieszMethod::Spectral,
        MethodArg::Singular => RieszMethod::SingularIntegral(SingularOpts::default()),
    };
    let report = fse_residual(a.n, &params, a.points, &method, a.padding, a.margin)?;
    let method_name = match a.method {
        MethodArg::Spectral => "spectral",
        MethodArg::Singular => "singular",
    };
    let config = config_json(
        "residual",
        &a.phys,
        a.seed,
        &[
            ("n", a.n.to_string()),
            ("method", format!("\"{method_name}\"")),
            ("padding", a.padding.to_string()),
            ("margin", fmt_f(a.margin)),
            ("points", a.points.to_string()),
        ],
    );
    let mut s = String::new();
    let _ = write!(
        s,
        "{{\"config\":{config},\"report\":{{\"n\":{},\"alpha\":{},\"method\":\"{}\",\
         \"padding_factor\":{},\"interior_margin\":{},\"n_points\":{},\"l2_rel\":{},\
         \"sup_rel\":{},\"wrap_estimate_rel\":{},\"max_imag_leak\":{},\"diagnostic_only\":true,\
         \"interior_x\":[",
        report.n,
        fmt_f(report.alpha),
        method_name,
        report.padding_factor,
        fmt_f(report.interior_margin),
        report.n_points,
        fmt_f(report.l2_rel),
        fmt_f(report.sup_rel),
        fmt_f(report.wrap_estimate_rel),
        fmt_f(report.max_imag_leak),
    );
    for (i, x) in report.interior_x.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&fmt_f(*x));
    }
    s.push_str("],\"residual\":[");
    for (i, r) in report.residual.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&fmt_f(*r));
    }
    s.push_str("]}}\n");
    emit(&a.out, "residual", "json", &s)?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    if a.list {
        let mut s = String::new();
        for c in checks() {
            let _ = writeln!(s, "{:<26} {}", c.id, c.label);
        }
        emit(&a.out, "verify", "txt", &s)?;
        return Ok(0);
    }
    let opts = VerifyOptions { seed: a.seed, inject_failure: a.inject_failure.clone() };
    let outcomes = run_all(&opts);
    let mut s = String::new();
    let mut all_pass = true;
    for o in &outcomes {
        all_pass &= o.passed;
        let _ = writeln!(
            s,
            "[{}] {:<26} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.detail
        );
    }
    let _ = writeln!(
        s,
        "{} of {} checks passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    emit(&a.out, "verify", "txt", &s)?;
    Ok(if all_pass { 0 } else { 1 })
}
