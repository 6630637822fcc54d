//! Command-line flags and their validation into a [`RunConfig`].

use crate::error::CliError;
use crate::spec::{parse_function_spec, FunctionSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crg_core::{
    AnnulusSpec, Complex, DensityBudget, DiskSet, EpsilonCascade, GrowthMinorant, Model, ProximateOrder, Region,
    SamplePlan, Window,
};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "crglab",
    version,
    about = "Growth, escape criteria and escaping-set measure for entire functions"
)]
pub struct Cli {
    /// Directory for output files; without it every artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSV of θ, exact and empirical indicator.
    Indicator(IndicatorArgs),
    /// JSON density of the A or B criterion set.
    Density(DensityArgs),
    /// JSON series certificate and density margins along a radius list.
    #[command(name = "check-14")]
    Check14(Check14Args),
    /// PGM escape-time raster.
    EscapeMap(EscapeMapArgs),
    /// JSON escaping-set density estimate.
    Measure(MeasureArgs),
    /// CSV comparison of a ray product with its asymptotic.
    VerifyCrg(VerifyCrgArgs),
    /// Disk covers with certificates.
    #[command(subcommand)]
    Covering(CoveringCommand),
    /// CSV of Schwarz-reconstructed against analytic log-derivatives.
    SchwarzCheck(SchwarzArgs),
    /// CSV of Re(z f'/f) residuals in sectors.
    #[command(name = "check-8l")]
    Check8l(Check8lArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoveringCommand {
    Besicovitch(BesicovitchArgs),
    Fuchs(FuchsArgs),
    Cartan(CartanArgs),
}

#[derive(Debug, Args)]
pub struct FnArg {
    /// Function spec, e.g. "expsum:[1]exp(1)".
    #[arg(long = "fn")]
    pub function: String,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Annulus R/2 < |z| < 2R.
    #[arg(long, conflicts_with = "window")]
    pub annulus: Option<f64>,
    /// Rectangle "x0,x1,y0,y1".
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Monte Carlo sample count.
    #[arg(long, conflicts_with = "grid")]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Deterministic grid "NA,NB" (radius × angle for annuli, x × y for windows).
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Minorant: "exp-power:C,MU", "linear:K" or "default:RHO[,DEPTH]".
    #[arg(long, default_value = "default:1,1")]
    pub beta: String,
    /// Starting radius of the track; defaults to half the distance of the region from 0.
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Bailout on log|z|.
    #[arg(long, default_value_t = crg_core::dynamics::DEFAULT_BAILOUT_LOG)]
    pub bailout: f64,
}

#[derive(Debug, Args)]
pub struct IndicatorArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Number of equally spaced angles in [0, 2π).
    #[arg(long, default_value_t = 360)]
    pub thetas: usize,
    /// Increasing radius list, e.g. "1e2,1e3".
    #[arg(long)]
    pub radii: String,
    /// Order of the growth scale r^ρ; defaults to the order of the model.
    #[arg(long)]
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionSet {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub function: FnArg,
    #[command(flatten)]
    pub region: RegionArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value = "default:1,1")]
    pub beta: String,
    #[arg(long, value_enum, default_value_t = CriterionSet::A)]
    pub set: CriterionSet,
    #[arg(long, default_value_t = 16)]
    pub disk_samples: usize,
    /// DiskSet file whose disks are removed from the count.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Check14Args {
    #[command(flatten)]
    pub function: FnArg,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value = "default:1,1")]
    pub beta: String,
    /// Density budget: "cascade:FACTOR[,DEPTH]", "const:A", "inv-log:P" or "zero".
    #[arg(long, default_value = "cascade:12,1")]
    pub alpha: String,
    #[arg(long, default_value_t = 100.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tail_tol: f64,
    /// Annulus radii for the margins.
    #[arg(long)]
    pub r_list: String,
    #[arg(long, default_value_t = 16)]
    pub disk_samples: usize,
}

#[derive(Debug, Args)]
pub struct EscapeMapArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Rectangle "x0,x1,y0,y1".
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Certification radius for products; defaults to 4 times the region's outer radius.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub function: FnArg,
    #[command(flatten)]
    pub region: RegionArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Certification radius for products; defaults to 4 times the region's outer radius.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyCrgArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Radius list, e.g. "1e3,1e4".
    #[arg(long)]
    pub radii: String,
    /// Angles from the zero ray, in (0, 2π).
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: String,
    /// Density c of the zero counting function; defaults to 1.
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Depth of the ε cascade.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    /// Allowed |n(r) - cV(r)| in units of ε(r)V(r).
    #[arg(long, default_value_t = 1.0)]
    pub hypothesis_constant: f64,
}

#[derive(Debug, Args)]
pub struct BesicovitchArgs {
    /// "re im" per line.
    #[arg(long)]
    pub points: PathBuf,
    /// One radius per line, matching the points.
    #[arg(long, conflicts_with = "radius")]
    pub radii: Option<PathBuf>,
    /// Common radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Random probes for the multiplicity audit, added to the points themselves.
    #[arg(long, default_value_t = 10_000)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FuchsArgs {
    /// "re im" per line.
    #[arg(long)]
    pub points: PathBuf,
    /// Scale H: the squared radii sum to at most 4H².
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CartanArgs {
    /// Polynomial zeros, "re im" per line.
    #[arg(long)]
    pub zeros: PathBuf,
    /// Radius R of the disk D(0, R) being audited.
    #[arg(long)]
    pub r: f64,
    /// Budget η in (0, 3e/2): the radii sum to at most 4ηR.
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SchwarzArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Disk centers "x,y;x,y;...".
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    /// Radius of every disk; the disks must be free of zeros.
    #[arg(long)]
    pub radius: f64,
    /// Quadrature nodes on each circle.
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct Check8lArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Radius list, e.g. "1e3,1e4".
    #[arg(long)]
    pub radii: String,
    /// Angle list in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: String,
    /// Order of the proximate order; defaults to the order of the model.
    #[arg(long)]
    pub order: Option<f64>,
    /// Depth of the ε cascade.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    /// Required distance from indicator breakpoints in units of ε₂(r).
    #[arg(long, default_value_t = 3.0)]
    pub margin: f64,
}

// ---------------------------------------------------------------------------
// validated configuration

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub task: Task,
}

#[derive(Debug, Clone)]
pub struct FunctionInput {
    pub spec: FunctionSpec,
    pub model: Model,
}

#[derive(Debug, Clone)]
pub enum Task {
    Indicator {
        function: FunctionInput,
        thetas: Vec<f64>,
        radii: Vec<f64>,
        order: f64,
    },
    Density {
        function: FunctionInput,
        region: Region,
        plan: SamplePlan,
        beta: GrowthMinorant,
        set: CriterionSet,
        disk_samples: usize,
        exclude: Option<DiskSet>,
    },
    Check14 {
        function: FunctionInput,
        plan: SamplePlan,
        beta: GrowthMinorant,
        alpha: DensityBudget,
        r0: f64,
        tail_tol: f64,
        r_list: Vec<f64>,
        disk_samples: usize,
    },
    EscapeMap {
        function: FunctionInput,
        window: Window,
        width: usize,
        height: usize,
        params: crg_core::EscapeParams,
    },
    Measure {
        function: FunctionInput,
        region: Region,
        plan: SamplePlan,
        params: crg_core::EscapeParams,
    },
    VerifyCrg {
        product: crg_core::CanonicalProduct,
        samples: Vec<(f64, f64)>,
        density: f64,
        cascade: EpsilonCascade,
        hypothesis_constant: f64,
    },
    Besicovitch {
        points: Vec<Complex>,
        radii: Vec<f64>,
        probes: usize,
        seed: u64,
    },
    Fuchs {
        points: Vec<Complex>,
        h: f64,
        seed: u64,
    },
    Cartan {
        zeros: Vec<Complex>,
        r: f64,
        eta: f64,
        seed: u64,
    },
    Schwarz {
        function: FunctionInput,
        centers: Vec<Complex>,
        radius: f64,
        nodes: usize,
        tol: f64,
    },
    Check8l {
        function: FunctionInput,
        samples: Vec<(f64, f64)>,
        order: f64,
        cascade: EpsilonCascade,
        margin: f64,
    },
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

pub fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("{what}: `{s}` is not a finite number")))
        })
        .collect()
}

fn positive_increasing(values: Vec<f64>, what: &str) -> Result<Vec<f64>, CliError> {
    if values.iter().any(|&r| r <= 0.0) || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage(format!("{what} must be positive and increasing")));
    }
    Ok(values)
}

fn positive(x: f64, what: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("{what} must be positive, got {x}")))
    }
}

pub fn parse_window(text: &str) -> Result<Window, CliError> {
    let v = parse_floats(text, "window")?;
    if v.len() != 4 {
        return Err(usage("window needs x0,x1,y0,y1"));
    }
    Window::new(v[0], v[1], v[2], v[3]).ok_or_else(|| usage("window needs x0 < x1 and y0 < y1"))
}

fn parse_region(args: &RegionArgs) -> Result<Region, CliError> {
    match (args.annulus, &args.window) {
        (Some(r), None) => Ok(Region::Annulus(AnnulusSpec::new(positive(r, "annulus radius")?))),
        (None, Some(w)) => Ok(Region::Window(parse_window(w)?)),
        _ => Err(usage("give exactly one of --annulus and --window")),
    }
}

fn parse_plan(args: &PlanArgs) -> Result<SamplePlan, CliError> {
    match (args.mc, &args.grid) {
        (Some(0), None) => Err(usage("--mc must be positive")),
        (Some(samples), None) => Ok(SamplePlan::MonteCarlo {
            samples,
            seed: args.seed,
        }),
        (None, Some(g)) => {
            let v: Vec<&str> = g.split(',').map(str::trim).collect();
            let dims: Option<Vec<usize>> = v.iter().map(|s| s.parse().ok().filter(|&n| n > 0)).collect();
            match dims.as_deref() {
                Some(&[n_a, n_b]) => Ok(SamplePlan::Grid { n_a, n_b }),
                _ => Err(usage(format!("--grid needs two positive integers, got `{g}`"))),
            }
        }
        _ => Err(usage("give exactly one of --mc and --grid")),
    }
}

fn split_kind<'a>(text: &'a str, what: &str) -> Result<(&'a str, Vec<f64>), CliError> {
    match text.split_once(':') {
        Some((kind, args)) => Ok((kind.trim(), parse_floats(args, what)?)),
        None => Ok((text.trim(), Vec::new())),
    }
}

fn depth_arg(x: f64) -> Result<u32, CliError> {
    if x >= 1.0 && x.fract() == 0.0 && x <= 8.0 {
        Ok(x as u32)
    } else {
        Err(usage(format!("cascade depth must be an integer in 1..=8, got {x}")))
    }
}

pub fn parse_beta(text: &str) -> Result<GrowthMinorant, CliError> {
    let (kind, args) = split_kind(text, "beta")?;
    let result = match (kind, args.as_slice()) {
        ("exp-power", &[c, mu]) => GrowthMinorant::exp_power(c, mu),
        ("linear", &[k]) => GrowthMinorant::linear(k),
        ("default", &[rho]) => GrowthMinorant::paper_default(ProximateOrder::constant(rho), EpsilonCascade::new(1)),
        ("default", &[rho, depth]) => {
            GrowthMinorant::paper_default(ProximateOrder::constant(rho), EpsilonCascade::new(depth_arg(depth)?))
        }
        _ => return Err(usage(format!("unknown minorant `{text}`"))),
    };
    result.map_err(|e| usage(format!("minorant `{text}`: {e}")))
}

pub fn parse_alpha(text: &str) -> Result<DensityBudget, CliError> {
    let (kind, args) = split_kind(text, "alpha")?;
    match (kind, args.as_slice()) {
        ("cascade", &[f]) => Ok(DensityBudget::cascade(f, EpsilonCascade::new(1))),
        ("cascade", &[f, depth]) => Ok(DensityBudget::cascade(f, EpsilonCascade::new(depth_arg(depth)?))),
        ("const", &[a]) => Ok(DensityBudget::constant(a)),
        ("inv-log", &[p]) => Ok(DensityBudget::inverse_log_power(positive(p, "inv-log power")?)),
        ("zero", &[]) => Ok(DensityBudget::zero()),
        _ => Err(usage(format!("unknown density budget `{text}`"))),
    }
}

pub fn parse_complex_list(text: &str) -> Result<Vec<Complex>, CliError> {
    text.split(';')
        .map(|pair| {
            let v = parse_floats(pair, "point")?;
            match v.as_slice() {
                &[x, y] => Ok(Complex::new(x, y)),
                _ => Err(usage(format!("point `{pair}` needs x,y"))),
            }
        })
        .collect()
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Whitespace-separated columns, one record per line; `#` starts a comment.
fn read_columns(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_file(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Option<Vec<f64>> = line
            .split_whitespace()
            .map(|s| s.parse().ok().filter(|x: &f64| x.is_finite()))
            .collect();
        match fields {
            Some(v) if v.len() == columns => rows.push(v),
            _ => {
                return Err(usage(format!(
                    "{}:{}: expected {columns} finite numbers",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn read_points(path: &Path) -> Result<Vec<Complex>, CliError> {
    Ok(read_columns(path, 2)?
        .into_iter()
        .map(|v| Complex::new(v[0], v[1]))
        .collect())
}

fn function(args: &FnArg, r_max: f64) -> Result<FunctionInput, CliError> {
    let spec = parse_function_spec(&args.function).map_err(|e| usage(format!("--fn: {e}")))?;
    let model = spec.build(r_max).map_err(|e| usage(format!("--fn: {e}")))?;
    Ok(FunctionInput { spec, model })
}

fn outer_radius(region: &Region) -> f64 {
    match region {
        Region::Annulus(a) => 2.0 * a.r,
        Region::Window(w) => [w.x0.hypot(w.y0), w.x0.hypot(w.y1), w.x1.hypot(w.y0), w.x1.hypot(w.y1)]
            .into_iter()
            .fold(0.0, f64::max),
    }
}

fn model_order(spec: &FunctionSpec) -> f64 {
    match spec {
        FunctionSpec::ExpSum { .. } => 1.0,
        FunctionSpec::Product(p) => 1.0 / p.power.value,
    }
}

fn escape_params(args: &OrbitArgs, region: &Region) -> Result<crg_core::EscapeParams, CliError> {
    let beta = parse_beta(&args.beta)?;
    let r0 = args.r0.unwrap_or_else(|| crg_core::dynamics::default_r0(region));
    crg_core::EscapeParams::new(r0, beta, args.max_iter, args.bailout).map_err(|e| usage(e.to_string()))
}

fn polar_samples(radii: &str, thetas: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let radii = positive_increasing(parse_floats(radii, "radii")?, "radii")?;
    let thetas = parse_floats(thetas, "thetas")?;
    Ok(radii
        .iter()
        .flat_map(|&r| thetas.iter().map(move |&t| (r, t)))
        .collect())
}

impl RunConfig {
    /// Checks every parameter and reads every input file.
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let task = match cli.command {
            Command::Indicator(a) => {
                if a.thetas == 0 {
                    return Err(usage("--thetas must be positive"));
                }
                let radii = positive_increasing(parse_floats(&a.radii, "radii")?, "radii")?;
                let function = function(&a.function, *radii.last().unwrap())?;
                let order = positive(a.order.unwrap_or_else(|| model_order(&function.spec)), "order")?;
                let n = a.thetas;
                Task::Indicator {
                    function,
                    thetas: (0..n)
                        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
                        .collect(),
                    radii,
                    order,
                }
            }
            Command::Density(a) => {
                let region = parse_region(&a.region)?;
                let exclude = match &a.exclude {
                    Some(p) => {
                        Some(DiskSet::from_text(&read_file(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?)
                    }
                    None => None,
                };
                if a.disk_samples == 0 {
                    return Err(usage("--disk-samples must be positive"));
                }
                Task::Density {
                    function: function(&a.function, 2.0 * outer_radius(&region))?,
                    plan: parse_plan(&a.plan)?,
                    beta: parse_beta(&a.beta)?,
                    region,
                    set: a.set,
                    disk_samples: a.disk_samples,
                    exclude,
                }
            }
            Command::Check14(a) => {
                let r_list = positive_increasing(parse_floats(&a.r_list, "r-list")?, "r-list")?;
                if a.disk_samples == 0 {
                    return Err(usage("--disk-samples must be positive"));
                }
                Task::Check14 {
                    function: function(&a.function, 4.0 * r_list.last().unwrap())?,
                    plan: parse_plan(&a.plan)?,
                    beta: parse_beta(&a.beta)?,
                    alpha: parse_alpha(&a.alpha)?,
                    r0: positive(a.r0, "r0")?,
                    tail_tol: positive(a.tail_tol, "tail-tol")?,
                    r_list,
                    disk_samples: a.disk_samples,
                }
            }
            Command::EscapeMap(a) => {
                let window = parse_window(&a.window)?;
                if a.width == 0 || a.height == 0 {
                    return Err(usage("raster dimensions must be positive"));
                }
                let region = Region::Window(window);
                let r_max = positive(a.r_max.unwrap_or(4.0 * outer_radius(&region)), "r-max")?;
                Task::EscapeMap {
                    function: function(&a.function, r_max)?,
                    params: escape_params(&a.orbit, &region)?,
                    window,
                    width: a.width,
                    height: a.height,
                }
            }
            Command::Measure(a) => {
                let region = parse_region(&a.region)?;
                let r_max = positive(a.r_max.unwrap_or(4.0 * outer_radius(&region)), "r-max")?;
                Task::Measure {
                    function: function(&a.function, r_max)?,
                    plan: parse_plan(&a.plan)?,
                    params: escape_params(&a.orbit, &region)?,
                    region,
                }
            }
            Command::VerifyCrg(a) => {
                let samples = polar_samples(&a.radii, &a.thetas)?;
                let r_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
                let FunctionInput { model, .. } = function(&a.function, r_max)?;
                let Model::Product(product) = model else {
                    return Err(usage("verify-crg needs a product spec"));
                };
                Task::VerifyCrg {
                    product,
                    samples,
                    density: positive(a.density, "density")?,
                    cascade: EpsilonCascade::new(depth_arg(a.depth as f64)?),
                    hypothesis_constant: positive(a.hypothesis_constant, "hypothesis-constant")?,
                }
            }
            Command::Covering(CoveringCommand::Besicovitch(a)) => {
                let points = read_points(&a.points)?;
                let radii = match (&a.radii, a.radius) {
                    (Some(p), None) => read_columns(p, 1)?.into_iter().map(|v| v[0]).collect(),
                    (None, Some(r)) => vec![positive(r, "radius")?; points.len()],
                    _ => return Err(usage("give exactly one of --radii and --radius")),
                };
                if radii.len() != points.len() {
                    return Err(usage(format!("{} points but {} radii", points.len(), radii.len())));
                }
                if let Some(r) = radii.iter().find(|&&r| r <= 0.0) {
                    return Err(usage(format!("radius {r} must be positive")));
                }
                Task::Besicovitch {
                    points,
                    radii,
                    probes: a.probes,
                    seed: a.seed,
                }
            }
            Command::Covering(CoveringCommand::Fuchs(a)) => {
                let points = read_points(&a.points)?;
                if points.is_empty() {
                    return Err(usage("no points"));
                }
                Task::Fuchs {
                    points,
                    h: positive(a.h, "h")?,
                    seed: a.seed,
                }
            }
            Command::Covering(CoveringCommand::Cartan(a)) => {
                let r = positive(a.r, "r")?;
                let eta = positive(a.eta, "eta")?;
                if eta >= 1.5 * std::f64::consts::E {
                    return Err(usage("eta must be below 3e/2"));
                }
                let zeros = read_points(&a.zeros)?;
                if let Some(z) = zeros.iter().find(|z| !(z.norm() > 0.0 && z.norm() <= 2.0 * r)) {
                    return Err(usage(format!("zero {z} must satisfy 0 < |z| <= 2R")));
                }
                Task::Cartan {
                    zeros,
                    r,
                    eta,
                    seed: a.seed,
                }
            }
            Command::SchwarzCheck(a) => {
                let centers = parse_complex_list(&a.at)?;
                let radius = positive(a.radius, "radius")?;
                if a.nodes < 16 || !a.nodes.is_power_of_two() {
                    return Err(usage("--nodes must be a power of two, at least 16"));
                }
                let r_max = centers.iter().map(|c| c.norm()).fold(0.0, f64::max) + 2.0 * radius;
                Task::Schwarz {
                    function: function(&a.function, r_max)?,
                    centers,
                    radius,
                    nodes: a.nodes,
                    tol: positive(a.tol, "tol")?,
                }
            }
            Command::Check8l(a) => {
                let samples = polar_samples(&a.radii, &a.thetas)?;
                let r_max = samples.iter().map(|s| s.0).fold(0.0, f64::max) * 1.01;
                let function = function(&a.function, r_max)?;
                let order = positive(a.order.unwrap_or_else(|| model_order(&function.spec)), "order")?;
                if !(a.margin >= 0.0) {
                    return Err(usage("--margin must be non-negative"));
                }
                Task::Check8l {
                    function,
                    samples,
                    order,
                    cascade: EpsilonCascade::new(depth_arg(a.depth as f64)?),
                    margin: a.margin,
                }
            }
        };
        Ok(RunConfig { out: cli.out, task })
    }
}
