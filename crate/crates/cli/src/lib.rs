//! `kgrs` command-line driver: verification, classification and spectral
//! runs over the example families, with deterministic JSON/CSV reports.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kgrs_core::grid::GridFunction;
use kgrs_core::grs::{
    build_family, build_guarded, classify_leading, quasi_basis_residual, reconstruct_q_leading, ClassifyOptions,
    FamilyKind, FamilySpec, Perturbation, Verdict, DEFAULT_GUARD,
};
use kgrs_core::hamiltonians::{anharmonic_basis, build_truncated_ne1, example1_apply, shifted_oscillator_apply};
use kgrs_core::krein::{gram_matrix, indefinite_gram, KreinStructure};
use kgrs_core::report::{
    write_json, write_matrix_csv, write_quasi_basis_csv, write_spectrum_csv, ClassificationDocument, ConfigRecord,
    GramReport, GridRecord, Ne1Document, QReconstructionDocument,
};
use kgrs_core::{BiorthogonalSystem, Complex64, Grid};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_NOT_J_ORTHONORMAL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// Spectrum recovery tolerance against the input λ list.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "kgrs", version, about = "Biorthogonal systems in Hilbert and Krein spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrices, biorthogonality and quasi-basis residuals.
    Verify(RunArgs),
    /// First-type classification under parity.
    Classify(RunArgs),
    /// Spectrum of the truncated operator Σ λₙ ⟨·, ψₙ⟩ φₙ.
    Spectrum(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// shifted, example1 or anharmonic
    #[arg(long)]
    pub family: Option<String>,
    /// Imaginary shift of the shifted oscillator.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Exponent of the anharmonic potential |x|^β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Anharmonic perturbation preset: xgauss or tanh.
    #[arg(long)]
    pub preset: Option<String>,
    /// Truncation order N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid half-width L.
    #[arg(long = "grid-l")]
    pub grid_l: Option<f64>,
    /// Number of grid points M (even).
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    /// Certification tolerance.
    #[arg(long = "tol-cert")]
    pub tol_cert: Option<f64>,
    /// Anticommutator threshold; the J-eigen threshold is a tenth of it.
    #[arg(long = "tol-class")]
    pub tol_class: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file of eigenvalues (re[,im] per line) for `spectrum`.
    #[arg(long)]
    pub lambdas: Option<PathBuf>,
    /// Extra functions in the finite section.
    #[arg(long)]
    pub guard: Option<usize>,
    /// Also require J-orthonormality in `verify`.
    #[arg(long = "check-j")]
    pub check_j: bool,
    /// key=value configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<kgrs_core::Error> for ConfigError {
    fn from(e: kgrs_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: FamilyKind,
    pub n: usize,
    pub grid_l: f64,
    pub grid_m: usize,
    pub tol_cert: f64,
    pub tol_class: f64,
    pub out: PathBuf,
    pub lambdas: Option<PathBuf>,
    pub guard: usize,
    pub check_j: bool,
}

const KEYS: &[&str] = &[
    "family", "a", "beta", "preset", "n", "grid-l", "grid-m", "tol-cert", "tol-class", "out", "lambdas", "guard",
    "check-j",
];

/// Flat `key = value` pairs; `[section]` headers group keys but do not
/// qualify them. `#` and `;` start comments.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(ConfigError(format!("line {}: malformed section header", lineno + 1)));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("invalid value '{value}' for {key}")))
}

fn merge_file(args: &RunArgs) -> Result<RunArgs, ConfigError> {
    let mut merged = RunArgs::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        for (key, value) in parse_config_text(&text)? {
            match key.as_str() {
                "family" => merged.family = Some(value),
                "a" => merged.a = Some(parse_value(&key, &value)?),
                "beta" => merged.beta = Some(parse_value(&key, &value)?),
                "preset" => merged.preset = Some(value),
                "n" => merged.n = Some(parse_value(&key, &value)?),
                "grid-l" => merged.grid_l = Some(parse_value(&key, &value)?),
                "grid-m" => merged.grid_m = Some(parse_value(&key, &value)?),
                "tol-cert" => merged.tol_cert = Some(parse_value(&key, &value)?),
                "tol-class" => merged.tol_class = Some(parse_value(&key, &value)?),
                "out" => merged.out = Some(PathBuf::from(value)),
                "lambdas" => merged.lambdas = Some(PathBuf::from(value)),
                "guard" => merged.guard = Some(parse_value(&key, &value)?),
                "check-j" => merged.check_j = parse_value(&key, &value)?,
                _ => unreachable!("keys are validated while parsing"),
            }
        }
    }
    Ok(RunArgs {
        family: args.family.clone().or(merged.family),
        a: args.a.or(merged.a),
        beta: args.beta.or(merged.beta),
        preset: args.preset.clone().or(merged.preset),
        n: args.n.or(merged.n),
        grid_l: args.grid_l.or(merged.grid_l),
        grid_m: args.grid_m.or(merged.grid_m),
        tol_cert: args.tol_cert.or(merged.tol_cert),
        tol_class: args.tol_class.or(merged.tol_class),
        out: args.out.clone().or(merged.out),
        lambdas: args.lambdas.clone().or(merged.lambdas),
        guard: args.guard.or(merged.guard),
        check_j: args.check_j || merged.check_j,
        config: None,
    })
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, ConfigError> {
        let args = merge_file(args)?;
        let family_name = args
            .family
            .as_deref()
            .ok_or_else(|| ConfigError("--family is required (shifted, example1 or anharmonic)".into()))?;
        let family = match family_name {
            "shifted" => FamilyKind::ShiftedOscillator { a: args.a.unwrap_or(0.5) },
            "example1" => FamilyKind::GaussianDeformation,
            "anharmonic" => FamilyKind::AnharmonicDeformation {
                beta: args.beta.unwrap_or(4.0),
                perturbation: Perturbation::preset(args.preset.as_deref().unwrap_or("xgauss"))?,
            },
            other => return Err(ConfigError(format!("unknown family '{other}'"))),
        };
        let config = Self {
            family,
            n: args.n.unwrap_or(12),
            grid_l: args.grid_l.unwrap_or(14.0),
            grid_m: args.grid_m.unwrap_or(1024),
            tol_cert: args.tol_cert.unwrap_or(1e-6),
            tol_class: args.tol_class.unwrap_or(1e-4),
            out: args.out.unwrap_or_else(|| PathBuf::from("kgrs-out")),
            lambdas: args.lambdas,
            guard: args.guard.unwrap_or(DEFAULT_GUARD),
            check_j: args.check_j,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError("N must be at least 1".into()));
        }
        if !(self.grid_l > 0.0 && self.grid_l.is_finite()) {
            return Err(ConfigError(format!("grid half-width must be positive, got {}", self.grid_l)));
        }
        if self.grid_m == 0 || !self.grid_m.is_multiple_of(2) {
            return Err(ConfigError(format!("grid size must be even and positive, got {}", self.grid_m)));
        }
        for (name, v) in [("tol-cert", self.tol_cert), ("tol-class", self.tol_class)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        self.spec()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Ok(Grid::new(self.grid_l, self.grid_m)?)
    }

    pub fn spec(&self) -> Result<FamilySpec, ConfigError> {
        Ok(FamilySpec::new(self.family, self.n, self.grid()?)?)
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            tol_cert: self.tol_cert,
            anticommutator_tol: self.tol_class,
            j_eigen_tol: self.tol_class / 10.0,
        }
    }

    /// Every resolved parameter except the output location.
    pub fn record(&self) -> ConfigRecord {
        let mut r = ConfigRecord::new();
        let family = match self.family {
            FamilyKind::ShiftedOscillator { a } => {
                r.insert("a".into(), a.to_string());
                "shifted"
            }
            FamilyKind::GaussianDeformation => "example1",
            FamilyKind::AnharmonicDeformation { beta, perturbation } => {
                r.insert("beta".into(), beta.to_string());
                r.insert("preset".into(), perturbation.name().into());
                "anharmonic"
            }
        };
        r.insert("family".into(), family.into());
        r.insert("n".into(), self.n.to_string());
        r.insert("grid-l".into(), self.grid_l.to_string());
        r.insert("grid-m".into(), self.grid_m.to_string());
        r.insert("tol-cert".into(), self.tol_cert.to_string());
        r.insert("tol-class".into(), self.tol_class.to_string());
        r.insert("guard".into(), self.guard.to_string());
        r.insert("check-j".into(), self.check_j.to_string());
        if let Some(path) = &self.lambdas {
            r.insert("lambdas".into(), path.display().to_string());
        }
        r
    }
}

/// Parses `re[,im]` lines; blank lines and `#` comments are skipped.
pub fn parse_lambdas(text: &str) -> Result<Vec<Complex64>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let re: f64 = parse_value("lambda", fields.next().unwrap_or(""))?;
        let im: f64 = match fields.next() {
            Some(v) => parse_value("lambda", v)?,
            None => 0.0,
        };
        if fields.next().is_some() || !re.is_finite() || !im.is_finite() {
            return Err(ConfigError(format!("line {}: expected re[,im]", lineno + 1)));
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Eigenvalues attached to each family: n + 1/2, 2n + 1 + a², or the
/// anharmonic energies.
pub fn default_lambdas(config: &RunConfig) -> Result<Vec<Complex64>, ConfigError> {
    let n = config.n;
    Ok(match config.family {
        FamilyKind::ShiftedOscillator { a } => (0..n).map(|k| Complex64::new((2 * k + 1) as f64 + a * a, 0.0)).collect(),
        FamilyKind::GaussianDeformation => (0..n).map(|k| Complex64::new(k as f64 + 0.5, 0.0)).collect(),
        FamilyKind::AnharmonicDeformation { beta, .. } => anharmonic_basis(beta, n, config.grid()?)?
            .iter()
            .map(|s| Complex64::new(s.energy, 0.0))
            .collect(),
    })
}

/// Test pair used for quasi-basis residual curves.
pub fn quasi_basis_pair(grid: Grid) -> Result<(GridFunction, GridFunction), ConfigError> {
    let f = GridFunction::from_real_fn(grid, |x| (-0.5 * (x - 0.3).powi(2)).exp())?;
    let g = GridFunction::from_fn(grid, |x| Complex64::new(1.0, 0.5 * x) * (-0.5 * (x + 0.2).powi(2)).exp())?;
    Ok((f, g))
}

#[derive(Serialize)]
struct VerifySummary {
    family: String,
    #[serde(rename = "N")]
    n: usize,
    grid: GridRecord,
    tolerance: f64,
    biorthogonality_defect: f64,
    cross_path_defect: Option<f64>,
    j_check_requested: bool,
    j_certified: Option<bool>,
    max_j_diag_deviation: f64,
    abs_first_indefinite_diagonal: f64,
    max_j_offdiag: f64,
    quasi_basis_final_phi_psi: f64,
    quasi_basis_final_psi_phi: f64,
    quasi_basis_max_ordering_gap: f64,
    status: String,
    config: ConfigRecord,
}

fn cmd_verify(config: &RunConfig) -> Result<i32, ConfigError> {
    let grid = config.grid()?;
    let system = build_family(&config.spec()?)?;
    let record = config.record();
    let out = &config.out;
    let label = system.family().to_string();
    let j = KreinStructure::parity();

    let ordinary = gram_matrix(system.phi(), system.phi())?;
    let indefinite = indefinite_gram(&j, system.phi())?;
    let biorthogonality = gram_matrix(system.phi(), system.psi())?;
    let reports = [
        ("gram_ordinary", "ordinary", &ordinary),
        ("gram_indefinite", "indefinite", &indefinite),
        ("biorthogonality", "biorthogonality", &biorthogonality),
    ];
    let mut indefinite_report = None;
    for (name, kind, matrix) in reports {
        let report = GramReport::new(&label, kind, &grid, matrix, config.tol_cert, &record);
        write_json(&out.join(format!("{name}.json")), &report)?;
        write_matrix_csv(&out.join(format!("{name}.csv")), matrix)?;
        if kind == "indefinite" {
            indefinite_report = Some(report);
        }
    }
    let indefinite_report = indefinite_report.expect("indefinite report written above");

    let (f, g) = quasi_basis_pair(grid)?;
    let curves = quasi_basis_residual(&system, &f, &g, system.len())?;
    write_quasi_basis_csv(&out.join("quasi_basis.csv"), &curves)?;

    let bio_ok = system.biorthogonality_defect() <= config.tol_cert;
    let j_ok = indefinite_report.identity_within_tolerance;
    let passed = bio_ok && (!config.check_j || j_ok);
    let summary = VerifySummary {
        family: label,
        n: system.len(),
        grid: (&grid).into(),
        tolerance: config.tol_cert,
        biorthogonality_defect: system.biorthogonality_defect(),
        cross_path_defect: system.provenance().cross_path_defect,
        j_check_requested: config.check_j,
        j_certified: config.check_j.then_some(j_ok),
        max_j_diag_deviation: indefinite_report.max_diag_deviation,
        abs_first_indefinite_diagonal: indefinite[(0, 0)].norm(),
        max_j_offdiag: indefinite_report.max_offdiag,
        quasi_basis_final_phi_psi: *curves.phi_psi.last().expect("nonempty"),
        quasi_basis_final_psi_phi: *curves.psi_phi.last().expect("nonempty"),
        quasi_basis_max_ordering_gap: curves.ordering_gap.iter().copied().fold(0.0, f64::max),
        status: if passed { "certified" } else { "certification_failed" }.into(),
        config: record,
    };
    write_json(&out.join("verify.json"), &summary)?;
    Ok(if passed { EXIT_OK } else { EXIT_CERTIFICATION })
}

fn cmd_classify(config: &RunConfig) -> Result<i32, ConfigError> {
    let grid = config.grid()?;
    let spec = config.spec()?;
    let system = build_guarded(&spec, config.guard)?;
    let j = KreinStructure::parity();
    let record = config.record();
    let report = classify_leading(&system, &j, &config.classify_options(), config.n)?;
    write_json(
        &config.out.join("classification.json"),
        &ClassificationDocument::new(&report, &grid, &record),
    )?;
    if let Ok(recon) = reconstruct_q_leading(&system, config.n) {
        let doc = QReconstructionDocument::new(system.family(), &recon, &grid, &record)?;
        write_json(&config.out.join("q_reconstruction.json"), &doc)?;
    }
    Ok(match report.verdict {
        Verdict::FirstTypeEvidence => EXIT_OK,
        Verdict::NotJOrthonormal => EXIT_NOT_J_ORTHONORMAL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

#[derive(Serialize)]
struct OperatorResiduals {
    family: String,
    /// ‖Hφₙ − λₙφₙ‖ / ‖φₙ‖ for the family's differential operator.
    residuals: Vec<f64>,
}

fn operator_residuals(system: &BiorthogonalSystem, kind: FamilyKind, lambdas: &[Complex64]) -> Result<Option<Vec<f64>>, ConfigError> {
    let apply: Box<dyn Fn(&GridFunction) -> kgrs_core::Result<GridFunction>> = match kind {
        FamilyKind::ShiftedOscillator { a } => Box::new(move |f| shifted_oscillator_apply(a, f)),
        FamilyKind::GaussianDeformation => Box::new(example1_apply),
        FamilyKind::AnharmonicDeformation { .. } => return Ok(None),
    };
    let mut out = Vec::with_capacity(system.len());
    for (phi, l) in system.phi().iter().zip(lambdas) {
        out.push(apply(phi)?.axpy(-l, phi)?.norm() / phi.norm());
    }
    Ok(Some(out))
}

fn cmd_spectrum(config: &RunConfig) -> Result<i32, ConfigError> {
    let grid = config.grid()?;
    let j = KreinStructure::parity();
    let built = build_family(&config.spec()?)?;
    let system = match built.clone().certify_signs(&j, config.tol_cert) {
        Ok(signed) => signed,
        Err(kgrs_core::Error::NotJOrthonormal { .. }) => built,
        Err(e) => return Err(e.into()),
    };
    let (lambdas, explicit) = match &config.lambdas {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            (parse_lambdas(&text)?, true)
        }
        None => (default_lambdas(config)?, false),
    };
    if lambdas.len() != config.n {
        return Err(ConfigError(format!(
            "expected {} eigenvalues, found {}",
            config.n,
            lambdas.len()
        )));
    }
    let report = build_truncated_ne1(&system, &lambdas)?;
    let record = config.record();
    let doc = Ne1Document::new(system.family(), &lambdas, &report, &grid, &record);
    write_json(&config.out.join("spectrum.json"), &doc)?;
    write_spectrum_csv(&config.out.join("spectrum_forward.csv"), &report.forward)?;
    write_spectrum_csv(&config.out.join("spectrum_dual.csv"), &report.dual)?;
    if !explicit {
        if let Some(residuals) = operator_residuals(&system, config.family, &lambdas)? {
            let doc = OperatorResiduals {
                family: system.family().to_string(),
                residuals,
            };
            write_json(&config.out.join("operator_residuals.json"), &doc)?;
        }
    }
    let passed = report.forward.eigenvalue_defect <= SPECTRUM_TOLERANCE
        && report.dual.eigenvalue_defect <= SPECTRUM_TOLERANCE
        && report.cross_check.iter().all(|c| c.defect <= SPECTRUM_TOLERANCE);
    Ok(if passed { EXIT_OK } else { EXIT_CERTIFICATION })
}

fn configure_threads() -> Result<(), ConfigError> {
    if let Ok(value) = std::env::var("KGRS_THREADS") {
        let threads: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| ConfigError(format!("KGRS_THREADS must be a positive integer, got '{value}'")))?;
        // A pool configured earlier in this process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<i32, ConfigError> {
    configure_threads()?;
    match &cli.command {
        Command::Verify(args) => cmd_verify(&RunConfig::resolve(args)?),
        Command::Classify(args) => cmd_classify(&RunConfig::resolve(args)?),
        Command::Spectrum(args) => cmd_spectrum(&RunConfig::resolve(args)?),
    }
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kgrs: {e}");
            EXIT_CONFIG
        }
    }
}
