//! Batch front end: every subcommand writes one self-describing artifact
//! (CSV with a `# {json}` header line, or JSON) and is deterministic for a
//! fixed seed regardless of the worker count.

use crate::charpoly::{coeffs_nested_sum, coeffs_recurrence, coeffs_subset_oracle, CharPolyCoeffs};
use crate::density::{
    ks_distance, limiting_flat_cdf, radial_moment, EmpiricalCdf, HistMode, RadialHistogram, Weighting,
};
use crate::eigensolve::{eigenvalues, Gauge, Method};
use crate::ensembles::{read_matrix_csv, write_matrix_csv, EnsembleKind, MatrixHeader, TridiagMatrix};
use crate::exact_n2::{mc_validate_n2, N2Density};
use crate::ginibre::{ginibre_condition_table, ginibre_ks, GinibreMethod};
use crate::linalg::max_matched_distance;
use crate::lowtemp::{convergence_rate, coupled_family, LimitKind};
use crate::pseudospectrum::{condition_table, disc_of_scaled, smin_grid, GridBox};
use crate::randsrc::{par_realizations, RngStream};
use crate::spectralmap::{decompose, reconstruct_general, reconstruct_symmetric, relative_distance, symmetric_distance};
use crate::{Error, Result, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TRIBETA_OUT_DIR";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "tribeta", version, about = "Non-Hermitian tridiagonal β-ensemble experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum KindArg {
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
    #[value(name = "Ttilde")]
    Ttilde,
}

impl KindArg {
    pub fn kind(self) -> EnsembleKind {
        match self {
            KindArg::T => EnsembleKind::GeneralT,
            KindArg::S => EnsembleKind::SymmetricS,
            KindArg::Ttilde => EnsembleKind::NonsymmetricTtilde,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Qr,
    Aberth,
    Both,
}

impl SolverArg {
    fn methods(self) -> Vec<Method> {
        match self {
            SolverArg::Qr => vec![Method::Qr],
            SolverArg::Aberth => vec![Method::Aberth],
            SolverArg::Both => vec![Method::Aberth, Method::Qr],
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Qr => "qr",
        Method::Aberth => "aberth",
    }
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "T")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "aberth")]
    pub solver: SolverArg,
    /// Output file (default: $TRIBETA_OUT_DIR/<subcommand>.<ext>, else stdout).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one sampled matrix as CSV (row,col,re,im).
    Sample {
        #[command(flatten)]
        common: Common,
        /// Realization stream index.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Apply the global 1/√(2nβ) scaling.
        #[arg(long)]
        scaled: bool,
    },
    /// Scaled eigenvalues of m realizations (CSV).
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Radial histogram of scaled eigenvalue moduli against the limiting law (CSV).
    RadialHist {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "flat")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: HistFormat,
    },
    /// Flat-weighted KS distance to the limiting radial law (JSON).
    Ks {
        #[command(flatten)]
        common: Common,
    },
    /// Empirical radial moments against the limiting moments (JSON).
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
    /// Characteristic-polynomial coefficients of the centred matrix (diagonal dropped), JSON.
    Charpoly {
        #[command(flatten)]
        common: Common,
        /// Read the matrix from a CSV written by `sample` instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "recurrence")]
        method: CoeffMethod,
    },
    /// Spectral-map round trip errors over m draws (JSON).
    Roundtrip {
        #[command(flatten)]
        common: Common,
    },
    /// s_min grid (CSV x,y,smin) plus the analytic disc (JSON).
    Pseudospec {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        res: usize,
        /// Half-width of the square grid box.
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        /// Where to write the disc JSON (default: <out>.disc.json, else stderr).
        #[arg(long)]
        disc_out: Option<PathBuf>,
    },
    /// Median eigenvector condition numbers (CSV).
    Condnum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "unit-columns")]
        gauge: GaugeArg,
        /// Tabulate T, S and Ttilde instead of --kind only.
        #[arg(long)]
        all: bool,
    },
    /// Coupled low-temperature convergence rate (JSON).
    Lowtemp {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "100,10000,1000000")]
        betas: Vec<f64>,
    },
    /// Closed-form 2×2 radial densities (CSV), with a Monte Carlo KS when m > 1.
    N2Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Ginibre reference: KS against the circular law and median κ (JSON).
    GinibreRef {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "kostlan")]
        radial: RadialArg,
        /// Also compute the median κ(R) with this many draws (0 = skip).
        #[arg(long, default_value_t = 0)]
        cond_m: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Flat,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HistFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMethod {
    Recurrence,
    Nested,
    Subset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeArg {
    UnitColumns,
    SpectralOnes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialArg {
    Kostlan,
    Dense,
}

/// Failure of a run: bad flags (exit 2) or a numerical error (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Numerical(e.into())
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample { .. } => "sample",
            Command::Spectrum { .. } => "spectrum",
            Command::RadialHist { .. } => "radial-hist",
            Command::Ks { .. } => "ks",
            Command::Moments { .. } => "moments",
            Command::Charpoly { .. } => "charpoly",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Pseudospec { .. } => "pseudospec",
            Command::Condnum { .. } => "condnum",
            Command::Lowtemp { .. } => "lowtemp",
            Command::N2Density { .. } => "n2-density",
            Command::GinibreRef { .. } => "ginibre-ref",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Sample { common, .. }
            | Command::Spectrum { common }
            | Command::RadialHist { common, .. }
            | Command::Ks { common }
            | Command::Moments { common, .. }
            | Command::Charpoly { common, .. }
            | Command::Roundtrip { common }
            | Command::Pseudospec { common, .. }
            | Command::Condnum { common, .. }
            | Command::Lowtemp { common, .. }
            | Command::N2Density { common, .. }
            | Command::GinibreRef { common, .. } => common,
        }
    }

    fn extension(&self) -> &'static str {
        match self {
            Command::RadialHist { format: HistFormat::Svg, .. } => "svg",
            Command::Ks { .. } | Command::Moments { .. } | Command::Charpoly { .. } | Command::Roundtrip { .. } | Command::Lowtemp { .. } | Command::GinibreRef { .. } => "json",
            _ => "csv",
        }
    }
}

fn validate(cmd: &Command) -> std::result::Result<(), CliError> {
    let c = cmd.common();
    if c.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(c.beta > 0.0) || !c.beta.is_finite() {
        return Err(CliError::Usage(format!("--beta must be positive, got {}", c.beta)));
    }
    if c.m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    let needs_two = !matches!(cmd, Command::GinibreRef { .. } | Command::N2Density { .. });
    if needs_two && c.n < 2 {
        return Err(CliError::Usage("this subcommand needs --n ≥ 2".into()));
    }
    match cmd {
        Command::RadialHist { bins, .. } if *bins == 0 => Err(CliError::Usage("--bins must be positive".into())),
        Command::Moments { kmax, .. } if *kmax == 0 => Err(CliError::Usage("--kmax must be positive".into())),
        Command::Pseudospec { eps, res, half_width, .. } if !(*eps > 0.0) || *res < 2 || !(*half_width > 0.0) => {
            Err(CliError::Usage("pseudospec needs --eps > 0, --res ≥ 2, --half-width > 0".into()))
        }
        Command::Lowtemp { betas, .. } if betas.len() < 3 || betas.iter().any(|b| !(*b >= 10.0)) || betas.windows(2).any(|w| w[1] <= w[0]) => {
            Err(CliError::Usage("--betas needs at least three ascending values ≥ 10".into()))
        }
        Command::N2Density { points, .. } if *points < 2 => Err(CliError::Usage("--points must be at least 2".into())),
        _ => Ok(()),
    }
}

/// The JSON header embedded in every artifact.
fn header(cmd: &Command) -> serde_json::Value {
    let c = cmd.common();
    json!({
        "subcommand": cmd.name(),
        "version": VERSION,
        "kind": c.kind,
        "n": c.n,
        "beta": c.beta,
        "m": c.m,
        "seed": c.seed,
        "solver": c.solver,
    })
}

fn output_path(cmd: &Command) -> Option<PathBuf> {
    cmd.common().out.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{}.{}", cmd.name(), cmd.extension()))))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json(w: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

fn write_csv<R: Serialize>(w: &mut dyn Write, head: &serde_json::Value, rows: &[R]) -> Result<()> {
    writeln!(w, "# {}", serde_json::to_string(head)?)?;
    let mut cw = csv::Writer::from_writer(w);
    for r in rows {
        cw.serialize(r)?;
    }
    cw.flush()?;
    Ok(())
}

/// Scaled eigenvalues of `m` realizations with one method, in realization order.
pub fn pooled_spectra(kind: EnsembleKind, n: usize, beta: f64, m: usize, seed: u64, method: Method) -> Result<Vec<Vec<C64>>> {
    let per: Vec<Result<Vec<C64>>> = par_realizations(seed, m, |mut s| Ok(eigenvalues(&kind.sample_scaled(n, beta, &mut s)?, method)?.eigenvalues));
    per.into_iter().collect()
}

/// Pooled spectra for every requested solver plus the largest matched
/// disagreement between solvers (0 for a single solver).
fn spectra_for(c: &Common) -> Result<(Vec<(Method, Vec<Vec<C64>>)>, f64)> {
    let mut out = Vec::new();
    for method in c.solver.methods() {
        out.push((method, pooled_spectra(c.kind.kind(), c.n, c.beta, c.m, c.seed, method)?));
    }
    let mut agreement: f64 = 0.0;
    if out.len() == 2 {
        for (a, b) in out[0].1.iter().zip(&out[1].1) {
            agreement = agreement.max(max_matched_distance(a, b));
        }
    }
    Ok((out, agreement))
}

fn moduli(spectra: &[Vec<C64>]) -> Vec<f64> {
    spectra.iter().flatten().map(|z| z.norm()).collect()
}

#[derive(Serialize)]
struct EigRow {
    solver: &'static str,
    realization: usize,
    index: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct HistRow {
    lo: f64,
    hi: f64,
    centre: f64,
    height: f64,
    limit: f64,
}

#[derive(Serialize)]
struct GridRow {
    x: f64,
    y: f64,
    smin: f64,
}

#[derive(Serialize)]
struct DensRow {
    r: f64,
    density: f64,
}

/// Execute a parsed command.
pub fn run(cli: &Cli) -> std::result::Result<(), CliError> {
    let cmd = &cli.command;
    validate(cmd)?;
    let c = cmd.common();
    let head = header(cmd);
    let path = output_path(cmd);
    let kind = c.kind.kind();
    match cmd {
        Command::Sample { stream, scaled, .. } => {
            let mut s = RngStream::new(c.seed, *stream);
            let m = if *scaled { kind.sample_scaled(c.n, c.beta, &mut s)? } else { kind.sample(c.n, c.beta, &mut s)? };
            let h = MatrixHeader { n: c.n, kind, beta: c.beta, seed: c.seed, stream: *stream };
            write_matrix_csv(open_output(&path)?, &h, &m)?;
        }
        Command::Spectrum { .. } => {
            let (spectra, agreement) = spectra_for(c)?;
            let mut rows = Vec::new();
            for (method, per) in &spectra {
                for (j, lam) in per.iter().enumerate() {
                    for (i, z) in lam.iter().enumerate() {
                        rows.push(EigRow { solver: method_name(*method), realization: j, index: i, re: z.re, im: z.im });
                    }
                }
            }
            let mut head = head;
            head["solver_agreement"] = json!(agreement);
            write_csv(&mut *open_output(&path)?, &head, &rows)?;
        }
        Command::RadialHist { mode, bins, format, .. } => {
            let (spectra, _) = spectra_for(c)?;
            let r = moduli(&spectra[0].1);
            let hm = match mode {
                ModeArg::Flat => HistMode::Flat,
                ModeArg::Area => HistMode::Area,
            };
            let h = RadialHistogram::new(&r, *bins, 1.05 * crate::density::support_radius(), hm)?;
            let (centres, heights, limit) = (h.centres(), h.heights(), h.limiting_curve());
            let rows: Vec<HistRow> = (0..*bins).map(|i| HistRow { lo: h.edges[i], hi: h.edges[i + 1], centre: centres[i], height: heights[i], limit: limit[i] }).collect();
            let mut head = head;
            head["mode"] = json!(mode);
            head["overflow"] = json!(h.overflow);
            match format {
                HistFormat::Csv => write_csv(&mut *open_output(&path)?, &head, &rows)?,
                HistFormat::Svg => write_svg(&mut *open_output(&path)?, &head, &rows)?,
            }
        }
        Command::Ks { .. } => {
            let t0 = Instant::now();
            let (spectra, agreement) = spectra_for(c)?;
            let e = EmpiricalCdf::new(&moduli(&spectra[0].1), Weighting::Flat)?;
            let d = ks_distance(&e, limiting_flat_cdf);
            let v = json!({
                "kind": c.kind, "n": c.n, "beta": c.beta, "m": c.m, "seed": c.seed, "d": d,
                "runtime_s": t0.elapsed().as_secs_f64(),
                "solver": c.solver, "solver_agreement": agreement, "version": VERSION,
            });
            write_json(&mut *open_output(&path)?, &v)?;
        }
        Command::Moments { kmax, .. } => {
            let (spectra, _) = spectra_for(c)?;
            let r = moduli(&spectra[0].1);
            let mut rows = Vec::new();
            for k in 1..=*kmax {
                let emp = r.iter().map(|x| x.powi(2 * k as i32)).sum::<f64>() / r.len() as f64 / (2.0 * std::f64::consts::PI);
                rows.push(json!({"k": k, "empirical": emp, "limit": radial_moment(k)?}));
            }
            let mut head = head;
            head["moments"] = json!(rows);
            write_json(&mut *open_output(&path)?, &head)?;
        }
        Command::Charpoly { input, method, .. } => {
            let m: TridiagMatrix = match input {
                Some(p) => read_matrix_csv(std::io::BufReader::new(std::fs::File::open(p)?))?.1,
                None => kind.sample(c.n, c.beta, &mut RngStream::new(c.seed, 0))?,
            };
            let k = charpoly_of(&m, *method)?;
            let v = json!({"n": k.n, "kappa": k.kappa.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()});
            write_json(&mut *open_output(&path)?, &v)?;
        }
        Command::Roundtrip { .. } => {
            let v = roundtrip_summary(kind, c.n, c.beta, c.m, c.seed)?;
            let mut head = head;
            head["roundtrip"] = serde_json::to_value(v)?;
            write_json(&mut *open_output(&path)?, &head)?;
        }
        Command::Pseudospec { eps, res, half_width, disc_out, .. } => {
            let m = kind.sample_scaled(c.n, c.beta, &mut RngStream::new(c.seed, 0))?;
            let bbox = GridBox::square(*half_width);
            let grid = smin_grid(&m, bbox, *res, *res)?;
            let mut rows = Vec::with_capacity(res * res);
            for iy in 0..*res {
                for ix in 0..*res {
                    let z = grid.point(ix, iy);
                    rows.push(GridRow { x: z.re, y: z.im, smin: grid.value(ix, iy) });
                }
            }
            let mut head = head;
            head["eps"] = json!(eps);
            write_csv(&mut *open_output(&path)?, &head, &rows)?;
            let disc = disc_of_scaled(&m, *eps);
            let dv = json!({
                "eps": eps, "centre": [disc.centre.re, disc.centre.im], "radius_sq": disc.radius_sq,
                "radius": disc.radius(), "empty": disc.is_empty(), "config": head,
            });
            let dpath = disc_out.clone().or_else(|| path.as_ref().map(|p| p.with_extension("disc.json")));
            match dpath {
                Some(p) => write_json(&mut *open_output(&Some(p))?, &dv)?,
                None => write_json(&mut std::io::stderr().lock(), &dv)?,
            }
        }
        Command::Condnum { gauge, all, .. } => {
            let g = match gauge {
                GaugeArg::UnitColumns => Gauge::UnitColumns,
                GaugeArg::SpectralOnes => Gauge::SpectralOnes,
            };
            let kinds = if *all { vec![EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde] } else { vec![kind] };
            let rows = kinds.into_iter().map(|k| condition_table(k, c.n, c.m, c.beta, c.seed, g)).collect::<Result<Vec<_>>>()?;
            write_csv(&mut *open_output(&path)?, &head, &rows)?;
        }
        Command::Lowtemp { betas, .. } => {
            let lk = if kind == EnsembleKind::NonsymmetricTtilde { LimitKind::G } else { LimitKind::D };
            let reports: Vec<Result<_>> = par_realizations(c.seed, c.m, |mut s| convergence_rate(&coupled_family(lk, c.n, betas, &mut s)?));
            let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
            let slopes: Vec<f64> = reports.iter().map(|r| r.slope).collect();
            let mut head = head;
            head["limit"] = json!(lk);
            head["median_slope"] = json!(crate::pseudospectrum::median(&slopes));
            head["draws"] = serde_json::to_value(&reports)?;
            write_json(&mut *open_output(&path)?, &head)?;
        }
        Command::N2Density { points, .. } => {
            let d = N2Density::new(kind, c.beta)?;
            let hi = d.effective_radius()?;
            let rows = (0..*points)
                .map(|i| {
                    let r = hi * i as f64 / (*points - 1) as f64;
                    Ok(DensRow { r, density: d.density(r)? })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut head = head;
            head["low_beta_warning"] = json!(d.low_beta_warning);
            if c.m > 1 {
                head["mc"] = serde_json::to_value(mc_validate_n2(kind, c.beta, c.m, c.seed)?)?;
            }
            write_csv(&mut *open_output(&path)?, &head, &rows)?;
        }
        Command::GinibreRef { radial, cond_m, .. } => {
            let method = match radial {
                RadialArg::Kostlan => GinibreMethod::Kostlan,
                RadialArg::Dense => GinibreMethod::Dense,
            };
            let t0 = Instant::now();
            let d = ginibre_ks(c.n, c.m, c.seed, method)?;
            let mut v = json!({
                "kind": "Ginibre", "n": c.n, "m": c.m, "seed": c.seed, "d": d, "radial": method,
                "runtime_s": t0.elapsed().as_secs_f64(), "version": VERSION,
            });
            if *cond_m > 0 {
                v["median_kappa"] = json!(ginibre_condition_table(c.n, *cond_m, c.seed)?.median_kappa);
            }
            write_json(&mut *open_output(&path)?, &v)?;
        }
    }
    Ok(())
}

/// Static histogram plot: axes, one bar per bin, the limiting curve as a polyline.
fn write_svg(w: &mut dyn Write, head: &serde_json::Value, rows: &[HistRow]) -> Result<()> {
    let (width, height, pad) = (640.0, 400.0, 40.0);
    let x_max = rows.last().map(|r| r.hi).unwrap_or(1.0);
    let y_max = rows.iter().map(|r| r.height.max(r.limit)).fold(0.0, f64::max).max(f64::MIN_POSITIVE) * 1.05;
    let sx = |x: f64| pad + x / x_max * (width - 2.0 * pad);
    let sy = |y: f64| height - pad - y / y_max * (height - 2.0 * pad);
    writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">"#)?;
    writeln!(w, "<!-- {} -->", serde_json::to_string(head)?.replace("--", "- -"))?;
    writeln!(w, r#"<line x1="{pad}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#, height - pad, width - pad)?;
    writeln!(w, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, height - pad)?;
    writeln!(w, r#"<text x="{}" y="{}" font-size="12">|z|</text>"#, width - pad, height - pad / 3.0)?;
    writeln!(w, r#"<text x="{}" y="{}" font-size="12">{x_max:.3}</text>"#, width - pad - 20.0, height - pad + 14.0)?;
    writeln!(w, r#"<text x="2" y="{}" font-size="12">{y_max:.3}</text>"#, pad)?;
    for r in rows {
        let (x0, x1, y) = (sx(r.lo), sx(r.hi), sy(r.height));
        writeln!(w, r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="steelblue" fill-opacity="0.6"/>"#, x1 - x0, height - pad - y)?;
    }
    let pts: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.centre), sy(r.limit))).collect();
    writeln!(w, r#"<polyline points="{}" fill="none" stroke="crimson" stroke-width="2"/>"#, pts.join(" "))?;
    writeln!(w, "</svg>")?;
    Ok(())
}

fn charpoly_of(m: &TridiagMatrix, method: CoeffMethod) -> Result<CharPolyCoeffs> {
    let bt = m.btilde();
    match method {
        CoeffMethod::Recurrence => Ok(coeffs_recurrence(&bt)),
        CoeffMethod::Nested => Ok(coeffs_nested_sum(&bt)),
        CoeffMethod::Subset => coeffs_subset_oracle(&bt),
    }
}

/// Round-trip error statistics.
#[derive(Debug, Clone, Serialize)]
pub struct RoundtripSummary {
    pub draws: usize,
    pub flagged: usize,
    pub failures: usize,
    pub max_error: f64,
    pub max_error_flagged: f64,
}

/// Decompose and rebuild `m` draws; symmetric reconstruction for `S`.
pub fn roundtrip_summary(kind: EnsembleKind, n: usize, beta: f64, m: usize, seed: u64) -> Result<RoundtripSummary> {
    let per: Vec<Option<(bool, f64)>> = par_realizations(seed, m, |mut s| {
        let t = kind.sample_scaled(n, beta, &mut s).ok()?;
        let d = decompose(&t).ok()?;
        let err = if kind == EnsembleKind::SymmetricS {
            symmetric_distance(&t, &reconstruct_symmetric(&d.lambdas, &d.r).ok()?)
        } else {
            relative_distance(&t, &reconstruct_general(&d).ok()?)
        };
        Some((d.near_degenerate(), err))
    });
    let mut out = RoundtripSummary { draws: m, flagged: 0, failures: 0, max_error: 0.0, max_error_flagged: 0.0 };
    for p in per {
        match p {
            None => out.failures += 1,
            Some((true, e)) => {
                out.flagged += 1;
                out.max_error_flagged = out.max_error_flagged.max(e);
            }
            Some((false, e)) => out.max_error = out.max_error.max(e),
        }
    }
    Ok(out)
}

/// Parse arguments, run, and map the outcome to a process exit status:
/// 0 success, 1 numerical failure (diagnostic JSON on stderr), 2 usage error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Numerical(e)) => {
            let diag = json!({
                "status": "error",
                "error": e.to_string(),
                "config": header(&cli.command),
            });
            eprintln!("{}", serde_json::to_string_pretty(&diag).unwrap_or_default());
            1
        }
    }
}
