//! The `knotbend` command line.
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 geometry (not biregular,
//! not closed, field does not close), 4 near self-intersection or tube radius
//! too large, 5 failure writing output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bending::{
    bend, bending_residual, decompose_field, field_from_recipe, BendError, BendingField, Integrand,
};
use crate::curve::{sample_curve, GeometryError, SampledCurve};
use crate::energy::{self, EnergyError};
use crate::knotfile::{read_knot_spec, KnotFileError, KnotSpec};
use crate::mesh::{self, MeshError, TubeMesh};
use crate::report::Report;
use crate::variation::{self, loglog_slope, Quantity, Scheme, VariationError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;
pub const EXIT_CLASH: i32 = 4;
pub const EXIT_WRITE: i32 = 5;

/// Steps used by `variation --fd-check`.
pub const FD_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Parser)]
#[command(name = "knotbend", version, about = "Infinitesimal bending of closed space curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a knot file and report curve and field diagnostics.
    Check(Common),
    /// Willmore or Möbius energy, optionally of a bent curve.
    Energy(EnergyArgs),
    /// First variation of curvature, torsion or an energy.
    Variation(VariationArgs),
    /// Write tube meshes of a bent family as OBJ files.
    Mesh(MeshArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Knot definition file.
    pub file: PathBuf,
    /// Number of samples (even, at least 32).
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// Resample to equal arc-length spacing instead of equal parameter spacing.
    #[arg(long)]
    pub arclength: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyChoice {
    Willmore,
    Mobius,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: EnergyChoice,
    /// Also evaluate the bent curve r + εz.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariationChoice {
    K,
    Tau,
    Willmore,
    Mobius,
}

#[derive(Debug, Args)]
pub struct VariationArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: VariationChoice,
    /// Compare with difference quotients at ε = 1e-2, 1e-3, 1e-4.
    #[arg(long)]
    pub fd_check: bool,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[command(flatten)]
    pub common: Common,
    /// Tube radius. Defaults to min(0.25, 0.9 × the largest radius every
    /// curve of the family admits).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub eps_list: Vec<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub rings: usize,
    #[arg(long, default_value_t = 24)]
    pub segments: usize,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<KnotFileError> for CliError {
    fn from(e: KnotFileError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let code = match e {
            GeometryError::SampleCount(_) | GeometryError::Period(_) => EXIT_INPUT,
            _ => EXIT_GEOMETRY,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<BendError> for CliError {
    fn from(e: BendError) -> Self {
        match e {
            BendError::Geometry(g) => g.into(),
            other => CliError {
                code: EXIT_GEOMETRY,
                message: other.to_string(),
            },
        }
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        match e {
            EnergyError::Variation(v) => v.into(),
            EnergyError::NearSelfIntersection { .. } => CliError {
                code: EXIT_CLASH,
                message: e.to_string(),
            },
            other => CliError {
                code: EXIT_GEOMETRY,
                message: other.to_string(),
            },
        }
    }
}

impl From<VariationError> for CliError {
    fn from(e: VariationError) -> Self {
        match e {
            VariationError::Bend(b) => b.into(),
            VariationError::Geometry(g) => g.into(),
            VariationError::Energy(en) => (*en).into(),
            VariationError::Steps(_) => CliError::input(e.to_string()),
            other => CliError {
                code: EXIT_GEOMETRY,
                message: other.to_string(),
            },
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        let code = match e {
            MeshError::NotClosed { .. } => EXIT_GEOMETRY,
            MeshError::RadiusTooLarge { .. } | MeshError::RadiusExceedsCurvature { .. } => EXIT_CLASH,
            MeshError::Resolution { .. } => EXIT_INPUT,
            MeshError::Obj { .. } | MeshError::Io(_) => EXIT_WRITE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli.command) {
        Ok(report) => match out.write_all(report.render().as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: writing report: {e}");
                EXIT_WRITE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed command and returns its report.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Check(c) => cmd_check(c),
        Command::Energy(a) => cmd_energy(a),
        Command::Variation(a) => cmd_variation(a),
        Command::Mesh(a) => cmd_mesh(a),
    }
}

struct Loaded {
    spec: KnotSpec,
    curve: SampledCurve,
}

impl Loaded {
    fn field(&self) -> Result<Option<BendingField>, CliError> {
        match &self.spec.field {
            None => Ok(None),
            Some(recipe) => {
                let raw = field_from_recipe(&self.curve, recipe)?;
                Ok(Some(decompose_field(&self.curve, &raw)?))
            }
        }
    }

    fn require_field(&self, what: &str) -> Result<BendingField, CliError> {
        self.field()?
            .ok_or_else(|| CliError::input(format!("{what} needs a [field] section in the knot file")))
    }
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    let spec = read_knot_spec(&common.file)?;
    let mut curve = sample_curve(&spec.curve, common.samples)?;
    if common.arclength {
        curve = curve.resample_by_arclength(common.samples)?;
    }
    Ok(Loaded { spec, curve })
}

fn input_section(report: &mut Report, common: &Common, loaded: &Loaded) {
    report
        .section("input")
        .text("file", common.file.display())
        .text("samples", loaded.curve.len())
        .text("grid", if common.arclength { "arclength" } else { "parameter" });
}

fn extrema(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn cmd_check(common: &Common) -> Result<Report, CliError> {
    let loaded = load(common)?;
    let curve = &loaded.curve;
    let mut report = Report::new();
    input_section(&mut report, common, &loaded);

    let samples = curve.samples();
    let (k_min, k_max) = extrema(samples.iter().map(|s| s.curvature));
    let (tau_min, tau_max) = extrema(samples.iter().map(|s| s.torsion));
    let (speed_min, _) = extrema(samples.iter().map(|s| s.speed));
    report
        .section("curve")
        .flag("biregular", true)
        .float("length", curve.length())
        .float("closure_gap", curve.closure_gap())
        .flag("closed", curve.is_closed())
        .float("speed_min", speed_min)
        .float("curvature_min", k_min)
        .float("curvature_max", k_max)
        .float("torsion_min", tau_min)
        .float("torsion_max", tau_max)
        .float("arclength_spacing_defect", curve.arclength_spacing_defect());

    if let Some(recipe) = &loaded.spec.field {
        let raw = field_from_recipe(curve, recipe)?;
        let field = decompose_field(curve, &raw)?;
        let check = field.decomposition_check().expect("decomposed field carries its check");
        let closed = field.is_closed_family(curve);
        report
            .section("field")
            .text(
                "form",
                match recipe.integrand {
                    Integrand::Frenet { .. } => "frenet",
                    Integrand::General { .. } => "general",
                },
            )
            .float("bending_residual", bending_residual(curve, &field))
            .float("closure_defect", field.closure_defect())
            .floats("closure_vector", field.closure_vector().as_slice())
            .text("family", if closed { "closed" } else { "open family" })
            .float("tangential_residual", check.residual)
            .float("tangential_residual_fd", check.fd_residual)
            .float("tangential_tolerance", check.tolerance)
            .flag("tangential_check_passed", check.passed())
            .flag("tangential_fd_check_passed", check.fd_passed());
    }
    Ok(report)
}

fn energy_value(kind: EnergyChoice, curve: &SampledCurve) -> Result<energy::EnergyValue, EnergyError> {
    match kind {
        EnergyChoice::Willmore => energy::willmore(curve),
        EnergyChoice::Mobius => energy::mobius(curve),
    }
}

fn quantity(kind: EnergyChoice) -> Quantity {
    match kind {
        EnergyChoice::Willmore => Quantity::Willmore,
        EnergyChoice::Mobius => Quantity::Mobius,
    }
}

fn cmd_energy(args: &EnergyArgs) -> Result<Report, CliError> {
    let loaded = load(&args.common)?;
    let curve = &loaded.curve;
    let mut report = Report::new();
    input_section(&mut report, &args.common, &loaded);

    let value = energy_value(args.kind, curve)?;
    report
        .section("energy")
        .text("kind", quantity(args.kind).name())
        .float("value", value.value)
        .float("refinement_delta", value.refinement_delta);

    let Some(eps) = args.eps else {
        return Ok(report);
    };
    if !eps.is_finite() || eps == 0.0 {
        return Err(CliError::input(format!("--eps must be finite and nonzero, got {eps}")));
    }
    let field = loaded.require_field("--eps")?;
    let q = quantity(args.kind);
    let analytic = variation::analytic_variation(q, curve, &field)?[0];
    let base = variation::measure(q, curve)?[0];
    let steps = [eps, eps / 10.0];
    let mut bent_values = Vec::new();
    let mut quotients = Vec::new();
    for &e in &steps {
        let bent = bend(curve, &field, e)?;
        let v = variation::measure(q, &bent)?[0];
        bent_values.push(v);
        quotients.push((v - base) / e);
    }
    let discrepancy: Vec<f64> = quotients.iter().map(|d| (d - analytic).abs()).collect();
    report
        .section("bent")
        .float("eps", eps)
        .flag("closed", bend(curve, &field, eps)?.is_closed())
        .float("value", bent_values[0])
        .float("variation", analytic)
        .float("fd_estimate", quotients[0])
        .float("discrepancy", discrepancy[0])
        .floats("fd_steps", &steps)
        .floats("fd_estimates", &quotients)
        .float("fd_slope", loglog_slope(&steps.map(f64::abs), &discrepancy));
    Ok(report)
}

fn cmd_variation(args: &VariationArgs) -> Result<Report, CliError> {
    let loaded = load(&args.common)?;
    let curve = &loaded.curve;
    let field = loaded.require_field("variation")?;
    let mut report = Report::new();
    input_section(&mut report, &args.common, &loaded);

    let (q, scheme) = match args.kind {
        VariationChoice::K => (Quantity::Curvature, Scheme::Central),
        VariationChoice::Tau => (Quantity::Torsion, Scheme::Central),
        VariationChoice::Willmore => (Quantity::Willmore, Scheme::Forward),
        VariationChoice::Mobius => (Quantity::Mobius, Scheme::Forward),
    };
    report.section("variation").text("kind", q.name());
    match args.kind {
        VariationChoice::K | VariationChoice::Tau => {
            let delta = variation::analytic_variation(q, curve, &field)?;
            let (lo, hi) = extrema(delta.iter().copied());
            report
                .float("min", lo)
                .float("max", hi)
                .float("max_abs", lo.abs().max(hi.abs()));
        }
        VariationChoice::Willmore => {
            let direct = energy::willmore_variation_direct(curve, &field)?;
            let theorem = energy::willmore_variation_theorem(curve, &field)?;
            report
                .float("value", direct.value)
                .float("interior", theorem.interior.unwrap_or(f64::NAN))
                .float("boundary", theorem.boundary.unwrap_or(f64::NAN))
                .float("theorem_value", theorem.value)
                .float("theorem_gap", (theorem.value - direct.value).abs());
        }
        VariationChoice::Mobius => {
            let v = energy::mobius_variation(curve, &field)?;
            report
                .float("value", v.value)
                .float("swap_defect", v.swap_defect.unwrap_or(f64::NAN));
        }
    }

    if args.fd_check {
        let fd = variation::fd_variation(q, curve, &field, &FD_STEPS, scheme)?;
        report
            .section("fd_check")
            .text(
                "scheme",
                match scheme {
                    Scheme::Forward => "forward",
                    Scheme::Central => "central",
                },
            )
            .floats("eps", &fd.eps)
            .floats("discrepancy", &fd.discrepancy)
            .floats("increment", &fd.increment)
            .float("slope", fd.slope())
            .float("increment_slope", fd.increment_slope());
        if fd.analytic.len() == 1 {
            let estimates: Vec<f64> = fd.oracle.iter().map(|o| o[0]).collect();
            report.floats("estimates", &estimates);
        }
    }
    Ok(report)
}

/// Largest radius below every guard of every curve in the family, capped at 0.25.
fn default_radius(curves: &[SampledCurve]) -> f64 {
    let limit = curves.iter().map(mesh::max_tube_radius).fold(f64::INFINITY, f64::min);
    (0.9 * limit).min(0.25)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "knot".to_string())
}

fn cmd_mesh(args: &MeshArgs) -> Result<Report, CliError> {
    let loaded = load(&args.common)?;
    let curve = &loaded.curve;
    if args.eps_list.iter().any(|e| !e.is_finite()) {
        return Err(CliError::input("--eps-list values must be finite"));
    }
    if let Some(r) = args.radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::input(format!("--radius must be positive, got {r}")));
        }
    }
    let field = if args.eps_list.iter().any(|e| *e != 0.0) {
        Some(loaded.require_field("a nonzero epsilon")?)
    } else {
        None
    };

    let curves = args
        .eps_list
        .iter()
        .map(|&eps| match &field {
            Some(f) => bend(curve, f, eps),
            None => Ok(curve.clone()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let radius = args.radius.unwrap_or_else(|| default_radius(&curves));

    // Build every mesh before writing any file, so a guard failure leaves
    // nothing behind.
    let meshes = curves
        .iter()
        .map(|c| {
            if c.is_closed() {
                mesh::tube_mesh(c, radius, args.rings, args.segments)
            } else {
                mesh::open_tube_mesh(c, radius, args.rings, args.segments)
            }
        })
        .collect::<Result<Vec<TubeMesh>, _>>()?;

    let mut report = Report::new();
    input_section(&mut report, &args.common, &loaded);
    report
        .section("mesh")
        .float("radius", radius)
        .text("rings", args.rings)
        .text("segments", args.segments);
    let stem = file_stem(&args.common.file);
    for ((&eps, c), m) in args.eps_list.iter().zip(&curves).zip(&meshes) {
        let name = mesh::family_file_name(&stem, eps);
        mesh::write_obj_file(m, &args.out.join(&name))?;
        report
            .section(&name)
            .float("eps", eps)
            .flag("closed", m.closed)
            .float("closure_gap", c.closure_gap())
            .float("length", c.length())
            .text("vertices", m.vertices.len())
            .text("faces", m.faces.len())
            .text("euler_characteristic", m.euler_characteristic());
    }
    Ok(report)
}
