use crate::config::{CriterionSet, FunctionInput, RunConfig, Task};
use crate::error::CliError;
use crate::output::{float, json, Artifact, Csv};
use crate::spec::{render, FunctionSpec};
use crg_core::analytic::{check_8l, schwarz_log_derivative, verify_crg_theorem15};
use crg_core::covering::{
    besicovitch_cover_with_radii, cartan_levin_disks, fuchs_macintyre_disks, max_multiplicity, BESICOVITCH_BOUND,
};
use crg_core::criteria::{annulus_density, density_with_exclusions, hypothesis_check_14b, membership_a, membership_b};
use crg_core::dynamics::{escape_map, measure_estimate};
use crg_core::growth::{indicator_empirical, indicator_exact_expsum, indicator_exact_product, series_condition_check};
use crg_core::sampling::uniform_pair;
use crg_core::{Complex, EntireFunction, Indicator, Model, ProximateOrder, Thresholds};
use serde::Serialize;

/// Runs one validated configuration and returns its artifacts in emission
/// order.
pub fn run(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    match &config.task {
        Task::Indicator {
            function,
            thetas,
            radii,
            order,
        } => indicator(function, thetas, radii, *order),
        Task::Density {
            function,
            region,
            plan,
            beta,
            set,
            disk_samples,
            exclude,
        } => {
            let t = Thresholds::default();
            let f = &function.model;
            let inside = |z: Complex| match set {
                CriterionSet::A => membership_a(f, beta, z, &t).is_ok_and(|v| v.in_a),
                CriterionSet::B => membership_b(f, beta, z, *disk_samples, &t).is_ok_and(|v| v.in_b),
            };
            let report = match exclude {
                Some(disks) => density_with_exclusions(inside, region, disks, plan),
                None => annulus_density(inside, region, plan),
            };
            #[derive(Serialize)]
            struct Body<'a> {
                function: String,
                set: &'a str,
                beta: String,
                #[serde(flatten)]
                report: crg_core::DensityReport,
            }
            let body = Body {
                function: render(&function.spec),
                set: match set {
                    CriterionSet::A => "A",
                    CriterionSet::B => "B",
                },
                beta: beta.label(),
                report,
            };
            Ok(vec![json("density.json", "density", &body)])
        }
        Task::Check14 {
            function,
            plan,
            beta,
            alpha,
            r0,
            tail_tol,
            r_list,
            disk_samples,
        } => {
            let series = series_condition_check(alpha, beta, *r0, *tail_tol)?;
            let margins = hypothesis_check_14b(
                &function.model,
                beta,
                alpha,
                r_list,
                plan,
                *disk_samples,
                &Thresholds::default(),
            );
            #[derive(Serialize)]
            struct Body {
                function: String,
                beta: String,
                alpha: String,
                r0: f64,
                tail_tol: f64,
                series: crg_core::growth::SeriesCheck,
                margins: Vec<crg_core::criteria::MarginRow>,
            }
            let body = Body {
                function: render(&function.spec),
                beta: beta.label(),
                alpha: alpha.label().to_string(),
                r0: *r0,
                tail_tol: *tail_tol,
                series,
                margins,
            };
            Ok(vec![json("check14.json", "check-14", &body)])
        }
        Task::EscapeMap {
            function,
            window,
            width,
            height,
            params,
        } => {
            let map = escape_map(&function.model, window, *width, *height, params)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let indeterminate = map.codes().iter().filter(|&&c| c == 255).count();
            let artifact = Artifact::new("escape.pgm", map.to_pgm());
            if 2 * indeterminate > map.verdicts.len() {
                return Err(CliError::Numeric(format!(
                    "{indeterminate} of {} pixels could not be evaluated",
                    map.verdicts.len()
                )));
            }
            Ok(vec![artifact])
        }
        Task::Measure {
            function,
            region,
            plan,
            params,
        } => {
            let report = measure_estimate(&function.model, region, plan, params);
            if 2 * report.indeterminate > report.density.total {
                return Err(CliError::Numeric(format!(
                    "{} of {} samples could not be evaluated",
                    report.indeterminate, report.density.total
                )));
            }
            #[derive(Serialize)]
            struct Body {
                function: String,
                #[serde(flatten)]
                report: crg_core::MeasureReport,
            }
            let body = Body {
                function: render(&function.spec),
                report,
            };
            Ok(vec![json("measure.json", "measure", &body)])
        }
        Task::VerifyCrg {
            product,
            samples,
            density,
            cascade,
            hypothesis_constant,
        } => {
            let po = ProximateOrder::constant(product.rule().convergence_exponent());
            let rows = verify_crg_theorem15(product, *density, &po, *cascade, *hypothesis_constant, samples)?;
            let mut csv = Csv::new(&["r", "theta", "measured", "predicted", "residual", "normalized_residual"]);
            for c in rows {
                csv.floats(&[c.r, c.theta, c.measured, c.predicted, c.residual, c.normalized_residual]);
            }
            Ok(vec![csv.into_artifact("crg.csv")])
        }
        Task::Besicovitch {
            points,
            radii,
            probes,
            seed,
        } => besicovitch(points, radii, *probes, *seed),
        Task::Fuchs { points, h, seed } => {
            let cover = fuchs_macintyre_disks(points, *h, *seed)?;
            Ok(vec![
                Artifact::new("disks.txt", cover.disks.to_text().into_bytes()),
                json("certificate.json", "covering fuchs", &cover.certificate),
            ])
        }
        Task::Cartan { zeros, r, eta, seed } => {
            let cover = cartan_levin_disks(zeros, *r, *eta, *seed)?;
            Ok(vec![
                Artifact::new("disks.txt", cover.disks.to_text().into_bytes()),
                json("certificate.json", "covering cartan", &cover.certificate),
            ])
        }
        Task::Schwarz {
            function,
            centers,
            radius,
            nodes,
            tol,
        } => schwarz(&function.model, centers, *radius, *nodes, *tol),
        Task::Check8l {
            function,
            samples,
            order,
            cascade,
            margin,
        } => {
            let ind = exact_indicator(function)?
                .ok_or_else(|| CliError::Usage("check-8l needs a model with an exact indicator".into()))?;
            let po = ProximateOrder::constant(*order);
            let rows = check_8l(&function.model, &ind, &po, *cascade, *margin, samples)?;
            let mut csv = Csv::new(&["r", "theta", "re_zl", "predicted", "eps2", "residual"]);
            for s in rows {
                csv.floats(&[s.r, s.theta, s.re_zl, s.predicted, s.eps2, s.residual]);
            }
            Ok(vec![csv.into_artifact("check8l.csv")])
        }
    }
}

/// `None` for products of integer order, which have no closed-form indicator.
fn exact_indicator(function: &FunctionInput) -> Result<Option<Indicator>, CliError> {
    match (&function.spec, &function.model) {
        (FunctionSpec::ExpSum { .. }, Model::ExpSum(f)) => Ok(Some(indicator_exact_expsum(f))),
        (_, Model::Product(p)) => {
            let rho = p.rule().convergence_exponent();
            if (rho - rho.round()).abs() < 1e-12 {
                Ok(None)
            } else {
                Ok(Some(indicator_exact_product(p)?))
            }
        }
        _ => unreachable!("spec and model kinds agree"),
    }
}

fn indicator(function: &FunctionInput, thetas: &[f64], radii: &[f64], order: f64) -> Result<Vec<Artifact>, CliError> {
    let exact = exact_indicator(function)?;
    let po = ProximateOrder::constant(order);
    let empirical = indicator_empirical(&function.model, &po, thetas, radii)?;
    let Indicator::Empirical { values, .. } = &empirical else {
        unreachable!("empirical indicator");
    };
    let mut csv = Csv::new(&["theta", "h_exact", "h_empirical"]);
    for (&theta, &h) in thetas.iter().zip(values) {
        csv.floats(&[theta, exact.as_ref().map_or(f64::NAN, |e| e.value(theta)), h]);
    }
    Ok(vec![csv.into_artifact("indicator.csv")])
}

fn besicovitch(points: &[Complex], radii: &[f64], probes: usize, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let cover = besicovitch_cover_with_radii(points, radii)?;
    let uncovered = points.iter().filter(|&&z| !cover.disks.contains(z)).count();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for d in cover.disks.disks() {
        x0 = x0.min(d.center.re - d.radius);
        x1 = x1.max(d.center.re + d.radius);
        y0 = y0.min(d.center.im - d.radius);
        y1 = y1.max(d.center.im + d.radius);
    }
    let mut audit: Vec<Complex> = points.to_vec();
    if !cover.disks.is_empty() {
        audit.extend((0..probes as u64).map(|i| {
            let (u, v) = uniform_pair(seed, i);
            Complex::new(x0 + u * (x1 - x0), y0 + v * (y1 - y0))
        }));
    }
    #[derive(Serialize)]
    struct Certificate {
        points: usize,
        selected: Vec<usize>,
        uncovered: usize,
        probes: usize,
        max_multiplicity: usize,
        multiplicity_bound: usize,
    }
    let certificate = Certificate {
        points: points.len(),
        selected: cover.selected.clone(),
        uncovered,
        probes: audit.len(),
        max_multiplicity: max_multiplicity(&cover.disks, &audit),
        multiplicity_bound: BESICOVITCH_BOUND,
    };
    let artifacts = vec![
        Artifact::new("disks.txt", cover.disks.to_text().into_bytes()),
        json("certificate.json", "covering besicovitch", &certificate),
    ];
    if uncovered > 0 || certificate.max_multiplicity > BESICOVITCH_BOUND {
        return Err(CliError::Audit {
            message: format!(
                "{uncovered} points uncovered, multiplicity {} against bound {BESICOVITCH_BOUND}",
                certificate.max_multiplicity
            ),
            artifacts,
        });
    }
    Ok(artifacts)
}

fn schwarz<F: EntireFunction + ?Sized>(
    f: &F,
    centers: &[Complex],
    radius: f64,
    nodes: usize,
    tol: f64,
) -> Result<Vec<Artifact>, CliError> {
    let mut csv = Csv::new(&[
        "re",
        "im",
        "radius",
        "nodes",
        "schwarz_re",
        "schwarz_im",
        "direct_re",
        "direct_im",
        "relative_error",
    ]);
    let mut worst: f64 = 0.0;
    for &z in centers {
        let rec = schwarz_log_derivative(f, z, radius, nodes)?;
        let direct = f.log_derivative(z)?;
        // relative to |L|, or absolute where |L| < 1 so that zeros of L do not blow it up
        let err = (rec - direct).norm() / direct.norm().max(1.0);
        worst = worst.max(err);
        csv.row(&[
            float(z.re),
            float(z.im),
            float(radius),
            nodes.to_string(),
            float(rec.re),
            float(rec.im),
            float(direct.re),
            float(direct.im),
            float(err),
        ]);
    }
    let artifacts = vec![csv.into_artifact("schwarz.csv")];
    if worst > tol {
        return Err(CliError::Audit {
            message: format!("relative error {worst:e} exceeds {tol:e}"),
            artifacts,
        });
    }
    Ok(artifacts)
}
