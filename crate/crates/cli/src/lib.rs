//! Command-line front end: argument parsing, dispatch, and table output.

mod grid;
mod table;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use degenspec::counting::counting_compact;
use degenspec::degeneration::{error_term_report, fit_slope, g_degenerating_counting};
use degenspec::geometry::{hecke_family, load_family, load_surface, DegeneratingFamily, Geodesic, HeckeSignature, SurfaceData};
use degenspec::kernels::{poisson, resolvent, wave, ModeSet};
use degenspec::selberg::{
    selberg_logderiv_integral, selberg_logderiv_kbessel, selberg_logderiv_series, selberg_z_prime_one,
    selberg_zeta_product,
};
use degenspec::traces::{trace_components, CircleTrace, FiniteSpectrumTrace, HeatTrace, SurfaceTrace};
use degenspec::zeta_det::{
    degeneration_subtraction_zeta, det_laplacian, hurwitz_zeta_series, hurwitz_zeta_trace, spectral_zeta_mellin,
    spectral_zeta_series, SpectralInput, StripStage, SubtractionMode,
};
use degenspec::Error;

pub use grid::parse_grid;
pub use table::Table;

/// Relative tolerance the library's adaptive quadratures run at.
const QUAD_REL_TOL: f64 = 1e-13;

#[derive(Debug, Parser)]
#[command(name = "degenspec", version, about = "Spectral invariants of hyperbolic surfaces with degenerating cone points")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Tolerance for truncated products and reported error columns.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegenerateMode {
    Counting,
    Trace,
    Zeta,
    Hurwitz,
    Logdet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Resolvent,
    Poisson,
    Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signature {
    TwoThreeN,
    TwoN,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a surface file and print its invariants.
    Surface {
        #[arg(long)]
        surface: PathBuf,
    },
    /// Heat-trace components on a t-grid.
    Trace {
        #[arg(long)]
        surface: PathBuf,
        /// Grid `start:stop:count`, `log:start:stop:count` or a list.
        #[arg(long)]
        t: String,
    },
    /// Degeneration experiments along a family.
    Degenerate {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_enum, default_value_t = DegenerateMode::Counting)]
        mode: DegenerateMode,
        #[arg(long = "T", default_value_t = 1.25)]
        big_t: f64,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
        /// Time for the trace mode.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        s_im: f64,
        #[arg(long, default_value_t = 0.5)]
        z: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Weighted counting function of a finite spectrum.
    Count {
        #[arg(long)]
        eigs: String,
        #[arg(long = "T")]
        big_t: String,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
    },
    /// Spectral or Hurwitz zeta on an s-grid.
    Zeta {
        #[arg(long, conflicts_with_all = ["eigs", "circle"])]
        surface: Option<PathBuf>,
        #[arg(long, conflicts_with = "circle")]
        eigs: Option<String>,
        /// Spectrum n² with multiplicity 2.
        #[arg(long)]
        circle: bool,
        #[arg(long)]
        s: String,
        /// Imaginary parts of s.
        #[arg(long, default_value = "0")]
        s_im: String,
        /// Hurwitz shift; omitted means the plain zeta.
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Zero-mode count; defaults to what the spectrum reports.
        #[arg(long)]
        c_m: Option<f64>,
        /// Evaluate a finite list by Mellin transform instead of summing.
        #[arg(long)]
        mellin: bool,
    },
    /// Selberg zeta and its logarithmic derivative.
    Selberg {
        #[arg(long, conflicts_with = "lengths")]
        surface: Option<PathBuf>,
        /// `l` or `l:mult` entries separated by commas.
        #[arg(long)]
        lengths: Option<String>,
        #[arg(long)]
        s: String,
    },
    /// Zeta-regularized determinant.
    Det {
        #[arg(long, conflicts_with_all = ["eigs", "circle"])]
        surface: Option<PathBuf>,
        #[arg(long, conflicts_with = "circle")]
        eigs: Option<String>,
        #[arg(long)]
        circle: bool,
        #[arg(long)]
        c_m: Option<f64>,
    },
    /// Resolvent, Poisson or wave kernel of a finite mode set.
    Kernels {
        /// JSON array of {"lambda", "amplitude"} objects.
        #[arg(long, conflicts_with = "mode")]
        modes: Option<PathBuf>,
        /// `lambda:amplitude` entries separated by commas.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, value_enum)]
        kind: KernelKind,
        #[arg(long)]
        w: String,
        /// Imaginary part of w for the resolvent.
        #[arg(long, default_value_t = 0.0)]
        w_im: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Degenerating counting function along Hecke triangle groups.
    HeckeSweep {
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long = "T", default_value_t = 1.25)]
        big_t: f64,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
        #[arg(long, value_enum, default_value_t = Signature::TwoThreeN)]
        signature: Signature,
    },
}

/// Exit status for a failure: 2 for configuration and parse problems, 3
/// for numerical failures, 4 for inputs that violate an invariant.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(Error::Divergence(_) | Error::DegenerateFit(_)) => 3,
        Some(
            Error::Signature(_)
            | Error::Invariant(_)
            | Error::ModelValidation(_)
            | Error::AlphaCollision(_)
            | Error::Admissibility(_)
            | Error::StripViolation { .. }
            | Error::InsufficientSubtractions { .. }
            | Error::Pole(_),
        ) => 4,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("DEGENSPEC_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

struct Provenance {
    command: String,
    hasher: Sha256,
}

impl Provenance {
    fn new(cli: &Cli) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(format!("{:?}", cli.command).as_bytes());
        Provenance {
            command: command_name(&cli.command).to_string(),
            hasher,
        }
    }

    fn read(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(&bytes);
        Ok(())
    }

    fn header(self, table: &mut Table, tol: f64) {
        let digest = hex::encode(self.hasher.finalize());
        let mut comments = vec![
            format!("degenspec {}", self.command),
            format!("input_sha256: {digest}"),
            format!("tolerance: quad_rel={QUAD_REL_TOL:e} tol={tol:e}"),
        ];
        comments.append(&mut table.comments);
        table.comments = comments;
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Surface { .. } => "surface",
        Command::Trace { .. } => "trace",
        Command::Degenerate { .. } => "degenerate",
        Command::Count { .. } => "count",
        Command::Zeta { .. } => "zeta",
        Command::Selberg { .. } => "selberg",
        Command::Det { .. } => "det",
        Command::Kernels { .. } => "kernels",
        Command::HeckeSweep { .. } => "hecke-sweep",
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if !(cli.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let mut prov = Provenance::new(cli);
    let mut table = build_table(cli, &mut prov)?;
    prov.header(&mut table, cli.tol);
    let text = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
        Format::Svg => table.to_svg()?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn surface_input(path: &Path, prov: &mut Provenance) -> Result<SurfaceData> {
    prov.read(path)?;
    Ok(load_surface(path)?)
}

fn family_input(path: &Path, prov: &mut Provenance) -> Result<DegeneratingFamily> {
    prov.read(path)?;
    Ok(load_family(path)?)
}

fn parse_lengths(spec: &str) -> Result<Vec<Geodesic>> {
    spec.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let mut it = p.split(':');
            let l: f64 = it.next().unwrap_or("").trim().parse().with_context(|| format!("bad length `{p}`"))?;
            let m: u32 = match it.next() {
                Some(m) => m.trim().parse().with_context(|| format!("bad multiplicity `{p}`"))?,
                None => 1,
            };
            Ok(Geodesic::new(l, m))
        })
        .collect()
}

fn parse_modes(spec: &str) -> Result<ModeSet> {
    let pairs = spec
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (l, a) = p.split_once(':').ok_or_else(|| anyhow!("mode `{p}` must be lambda:amplitude"))?;
            Ok((l.trim().parse::<f64>()?, a.trim().parse::<f64>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeSet::from_pairs(&pairs)?)
}

fn build_table(cli: &Cli, prov: &mut Provenance) -> Result<Table> {
    match &cli.command {
        Command::Surface { surface } => {
            let s = surface_input(surface, prov)?;
            let mut t = Table::new(&["genus", "cusps", "cones", "degenerating", "kappa", "volume", "log_q", "shortest_length"]);
            t.push(vec![
                s.genus() as f64,
                s.cusps() as f64,
                s.elliptic_orders().len() as f64,
                s.degenerating_indices().len() as f64,
                s.kappa() as f64,
                s.volume(),
                s.log_q(),
                s.shortest_length().unwrap_or(f64::NAN),
            ]);
            Ok(t)
        }
        Command::Trace { surface, t } => {
            let s = surface_input(surface, prov)?;
            let grid = parse_grid(t)?;
            if grid[0] <= 0.0 {
                bail!("trace grid must be positive");
            }
            let mut table = Table::new(&["t", "str", "identity", "htr", "etr", "dtr"]);
            for &tt in &grid {
                let c = trace_components(&s, tt)?;
                table.push(vec![tt, c.standard, c.identity, c.hyperbolic, c.elliptic, c.degenerating]);
            }
            Ok(table)
        }
        Command::Degenerate {
            family,
            mode,
            big_t,
            w,
            t,
            s,
            s_im,
            z,
            alpha,
        } => {
            let fam = family_input(family, prov)?;
            degenerate_table(&fam, *mode, *big_t, *w, *t, Complex64::new(*s, *s_im), *z, *alpha)
        }
        Command::Count { eigs, big_t, w } => {
            let e = grid::parse_list(eigs)?;
            let grid = parse_grid(big_t)?;
            let mut table = Table::new(&["T", "N"]);
            for &tt in &grid {
                table.push(vec![tt, counting_compact(&e, *w, tt)?]);
            }
            Ok(table)
        }
        Command::Zeta {
            surface,
            eigs,
            circle,
            s,
            s_im,
            z,
            alpha,
            c_m,
            mellin,
        } => zeta_table(prov, surface.as_deref(), eigs.as_deref(), *circle, s, s_im, *z, *alpha, *c_m, *mellin),
        Command::Selberg { surface, lengths, s } => {
            let geos = match (surface, lengths) {
                (Some(p), _) => surface_input(p, prov)?.lengths().to_vec(),
                (None, Some(l)) => parse_lengths(l)?,
                (None, None) => bail!("selberg needs --surface or --lengths"),
            };
            let grid = parse_grid(s)?;
            let mut table = Table::new(&["s", "zeta", "logderiv_series", "logderiv_integral", "logderiv_kbessel"]);
            for &x in &grid {
                let sc = Complex64::new(x, 0.0);
                let z = selberg_zeta_product(&geos, sc, cli.tol).map(|v| v.re).unwrap_or(f64::NAN);
                let ser = selberg_logderiv_series(&geos, sc).map(|v| v.value.re).unwrap_or(f64::NAN);
                let int = selberg_logderiv_integral(&geos, sc).map(|v| v.value.re).unwrap_or(f64::NAN);
                let kb = selberg_logderiv_kbessel(&geos, x).map(|v| v.value.re).unwrap_or(f64::NAN);
                table.push(vec![x, z, ser, int, kb]);
            }
            if !geos.is_empty() {
                let zp = selberg_z_prime_one(&geos)?;
                table.comment(format!("z_prime_one: {:?} (finite difference {:?})", zp.value, zp.finite_difference));
            }
            table.comment("NaN marks s outside the domain of that representation");
            Ok(table)
        }
        Command::Det {
            surface,
            eigs,
            circle,
            c_m,
        } => {
            let d = if let Some(p) = surface {
                let tr = SurfaceTrace::standard(surface_input(p, prov)?);
                let cm = c_m.or(tr.zero_modes()).unwrap_or(1.0);
                det_laplacian(SpectralInput::Trace { trace: &tr, c_m: cm })?
            } else if let Some(e) = eigs {
                det_laplacian(SpectralInput::Finite(&grid::parse_list(e)?))?
            } else if *circle {
                det_laplacian(SpectralInput::Trace {
                    trace: &CircleTrace,
                    c_m: c_m.unwrap_or(1.0),
                })?
            } else {
                bail!("det needs --surface, --eigs or --circle");
            };
            let mut table = Table::new(&["zeta_prime_zero", "log_det", "det"]);
            table.push(vec![d.zeta_prime_zero, d.log_det, d.det]);
            table.comment(format!("derivative step: {:e} with Richardson extrapolation", d.step));
            Ok(table)
        }
        Command::Kernels {
            modes,
            mode,
            kind,
            w,
            w_im,
            alpha,
        } => {
            let set = match (modes, mode) {
                (Some(p), _) => {
                    prov.read(p)?;
                    let text = std::fs::read_to_string(p)?;
                    serde_json::from_str::<ModeSet>(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
                }
                (None, Some(m)) => parse_modes(m)?,
                (None, None) => bail!("kernels needs --modes or --mode"),
            };
            let set = set.truncated(*alpha);
            let grid = parse_grid(w)?;
            let mut table = Table::new(&["w", "re", "im"]);
            for &x in &grid {
                let v = match kind {
                    KernelKind::Resolvent => resolvent(&set, Complex64::new(x, *w_im))?,
                    KernelKind::Poisson => Complex64::new(poisson(&set, x)?, 0.0),
                    KernelKind::Wave => wave(&set, x),
                };
                table.push(vec![x, v.re, v.im]);
            }
            Ok(table)
        }
        Command::HeckeSweep { n, big_t, w, signature } => {
            let sig = match signature {
                Signature::TwoThreeN => HeckeSignature::TwoThreeN,
                Signature::TwoN => HeckeSignature::TwoN,
            };
            let hf = hecke_family(n, sig)?;
            let mut table = counting_sweep(&hf.family, *big_t, *w)?;
            table.columns[0] = "N".into();
            Ok(table)
        }
    }
}

/// G against log Πq with the fitted slope and normalized residuals.
fn counting_sweep(fam: &DegeneratingFamily, big_t: f64, w: f64) -> Result<Table> {
    let members = fam.members()?;
    let mut log_q = Vec::new();
    let mut values = Vec::new();
    for m in &members {
        log_q.push(m.log_q());
        values.push(g_degenerating_counting(m, w, big_t)?);
    }
    let mut table = Table::new(&["member", "log_q", "G", "residual"]);
    if members.len() >= 3 {
        let fit = fit_slope(&log_q, &values)?;
        let res = fit.residuals();
        for (k, (&x, &g)) in log_q.iter().zip(&values).enumerate() {
            table.push(vec![fam.schedule()[k].iter().product::<u64>() as f64, x, g, res[k]]);
        }
        table.comment(format!("slope: {:?} intercept: {:?} (1/pi = {:?})", fit.slope, fit.intercept, 1.0 / std::f64::consts::PI));
        if w == 0.0 {
            let report = error_term_report(big_t, fam.schedule(), &log_q, &values)?;
            let normalized: Vec<String> = report.rows.iter().map(|r| format!("{:.6e}", r.normalized)).collect();
            table.comment(format!("normalized error term: [{}] bounded: {}", normalized.join(" "), report.bounded));
        }
    } else {
        for (k, (&x, &g)) in log_q.iter().zip(&values).enumerate() {
            table.push(vec![fam.schedule()[k].iter().product::<u64>() as f64, x, g, f64::NAN]);
        }
        table.comment("fewer than three members: no slope fitted");
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn degenerate_table(
    fam: &DegeneratingFamily,
    mode: DegenerateMode,
    big_t: f64,
    w: f64,
    t: f64,
    s: Complex64,
    z: f64,
    alpha: f64,
) -> Result<Table> {
    let sub = match mode {
        DegenerateMode::Counting => return counting_sweep(fam, big_t, w),
        DegenerateMode::Trace => SubtractionMode::Trace { t },
        DegenerateMode::Zeta => SubtractionMode::Zeta { s },
        DegenerateMode::Hurwitz => SubtractionMode::Hurwitz {
            s,
            z: Complex64::new(z, 0.0),
        },
        DegenerateMode::Logdet => SubtractionMode::LogDet,
    };
    let seq = degeneration_subtraction_zeta(fam, alpha, sub)?;
    let mut table = Table::new(&["member", "log_q", "re", "im", "difference"]);
    for (k, v) in seq.values.iter().enumerate() {
        let orders = &seq.orders[k];
        let logq: f64 = orders.iter().map(|&q| (q as f64).ln()).sum();
        let diff = if k == 0 { f64::NAN } else { seq.differences[k - 1] };
        table.push(vec![orders.iter().product::<u64>() as f64, logq, v.re, v.im, diff]);
    }
    table.comment(format!("successive differences shrinking: {}", seq.shrinking));
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn zeta_table(
    prov: &mut Provenance,
    surface: Option<&Path>,
    eigs: Option<&str>,
    circle: bool,
    s: &str,
    s_im: &str,
    z: Option<f64>,
    alpha: f64,
    c_m: Option<f64>,
    mellin: bool,
) -> Result<Table> {
    let re_grid = parse_grid(s)?;
    let im_grid = parse_grid(s_im)?;
    enum Source {
        Finite(Vec<f64>, FiniteSpectrumTrace),
        Trace(Box<dyn HeatTrace>),
    }
    let source = if let Some(p) = surface {
        Source::Trace(Box::new(SurfaceTrace::standard(surface_input(p, prov)?).truncated(alpha)?))
    } else if let Some(e) = eigs {
        let mut list = grid::parse_list(e)?;
        degenspec::traces::check_alpha(&list, alpha)?;
        list.retain(|&l| alpha == 0.0 || l > alpha);
        let tr = FiniteSpectrumTrace::new(list.clone())?;
        Source::Finite(list, tr)
    } else if circle {
        Source::Trace(Box::new(CircleTrace))
    } else {
        bail!("zeta needs --surface, --eigs or --circle");
    };
    let mut table = Table::new(&["re_s", "im_s", "re_val", "im_val", "n_sub"]);
    for &re in &re_grid {
        for &im in &im_grid {
            let sc = Complex64::new(re, im);
            let (value, n) = match &source {
                Source::Finite(list, tr) => {
                    if mellin {
                        evaluate_trace(tr, sc, z, c_m)?
                    } else {
                        match z {
                            Some(z) => (hurwitz_zeta_series(list, sc, Complex64::new(z, 0.0))?, 0),
                            None => (spectral_zeta_series(list, sc), 0),
                        }
                    }
                }
                Source::Trace(tr) => evaluate_trace(tr.as_ref(), sc, z, c_m)?,
            };
            table.push(vec![re, im, value.re, value.im, n as f64]);
        }
    }
    Ok(table)
}

fn evaluate_trace(trace: &dyn HeatTrace, s: Complex64, z: Option<f64>, c_m: Option<f64>) -> Result<(Complex64, usize)> {
    let cm = c_m.or(trace.zero_modes()).unwrap_or(1.0);
    let ev = match z {
        Some(z) => hurwitz_zeta_trace(trace, cm, s, Complex64::new(z, 0.0), &StripStage::direct(trace), None)?,
        None => spectral_zeta_mellin(trace, cm, s, None)?,
    };
    Ok((ev.value, ev.n_subtractions))
}
