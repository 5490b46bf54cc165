//! Command implementations. Each returns the process exit code; `main` owns
//! argument parsing and error-to-exit-code mapping.

use std::path::{Path, PathBuf};
use std::time::Instant;
use tracecone::tol::DEFAULT_SOLVER_TOL;
use tracecone::{
    certificate_residuals, circumcenter, close_group_in, max_radius, positivize, unitarize_table,
    verify_certificate, AlgebraElement, ClosureOverflow, GeodesicSegment, Method, PositiveElement,
    UnitarizeOptions,
};

use crate::fuzz::{run_fuzz, Suite};
use crate::instance::{encode_element, InstanceDoc, Role};
use crate::report::{BallPayload, CertificatePayload, GeodesicPayload, ReportDoc};
use crate::synth::{synthesize, SynthParams};
use crate::{CliError, CliResult, EXIT_PASS, EXIT_PROPERTY_FAILURE};

fn finish_report(mut report: ReportDoc, started: Instant, out: Option<&Path>) -> CliResult<()> {
    report.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = out {
        report.write(path)?;
    }
    Ok(())
}

/// Prints an element block by block, row-major, fixed 12-digit entries.
fn print_element(x: &AlgebraElement) {
    for (b, m) in x.blocks().iter().enumerate() {
        println!("block {b} ({n}x{n}):", n = m.nrows());
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols())
                .map(|j| format!("{:.12}{:+.12}i", m[(i, j)].re, m[(i, j)].im))
                .collect();
            println!("  {}", row.join("  "));
        }
    }
}

fn positive_named(
    doc: &InstanceDoc,
    alg: &std::sync::Arc<tracecone::BlockAlgebra>,
    name: &str,
) -> CliResult<PositiveElement> {
    let x = doc.element(alg, name)?;
    positivize(&x).map_err(|e| CliError::input(format!("element {name:?}: {e}")))
}

pub fn cmd_distance(instance: &Path, a: &str, b: &str, out: Option<&Path>) -> CliResult<i32> {
    let started = Instant::now();
    let doc = InstanceDoc::read(instance)?;
    let alg = doc.to_algebra()?;
    let xa = positive_named(&doc, &alg, a)?;
    let xb = positive_named(&doc, &alg, b)?;
    let d = tracecone::distance(&xa, &xb)?;
    println!("{d:.12}");

    let mut report = ReportDoc::new("distance");
    report.option("instance", instance.display().to_string());
    report.option("a", a);
    report.option("b", b);
    report.info("distance", d);
    finish_report(report, started, out)?;
    Ok(EXIT_PASS)
}

pub fn cmd_geodesic(
    instance: &Path,
    a: &str,
    b: &str,
    t: f64,
    out: Option<&Path>,
) -> CliResult<i32> {
    let started = Instant::now();
    if !t.is_finite() {
        return Err(CliError::input("--t must be finite"));
    }
    let doc = InstanceDoc::read(instance)?;
    let alg = doc.to_algebra()?;
    let xa = positive_named(&doc, &alg, a)?;
    let xb = positive_named(&doc, &alg, b)?;
    let seg = GeodesicSegment::new(&xa, &xb)?;
    let point = seg.eval(t)?;
    print_element(point.element());

    let mut report = ReportDoc::new("geodesic");
    report.option("instance", instance.display().to_string());
    report.option("a", a);
    report.option("b", b);
    report.option("t", t);
    report.info("t", t);
    report.set_certificate(&GeodesicPayload {
        t,
        result: encode_element(point.element()),
    })?;
    finish_report(report, started, out)?;
    Ok(EXIT_PASS)
}

pub fn cmd_circumcenter(
    instance: &Path,
    tol: f64,
    max_iter: usize,
    out: Option<&Path>,
) -> CliResult<i32> {
    let started = Instant::now();
    let doc = InstanceDoc::read(instance)?;
    let alg = doc.to_algebra()?;
    let named = doc.elements_with_role(&alg, Role::Point)?;
    if named.is_empty() {
        return Err(CliError::input(
            "instance has no elements with role \"point\"",
        ));
    }
    let mut names = Vec::with_capacity(named.len());
    let mut points = Vec::with_capacity(named.len());
    for (name, x) in &named {
        points.push(positivize(x).map_err(|e| CliError::input(format!("element {name:?}: {e}")))?);
        names.push(name.clone());
    }

    let ball = circumcenter(&points, tol, max_iter)?;
    println!("radius = {:.12}", ball.radius);
    print_element(ball.center.element());

    let mut report = ReportDoc::new("circumcenter");
    report.option("instance", instance.display().to_string());
    report.option("tol", tol);
    report.option("max_iter", max_iter as u64);
    let enclosure = max_radius(&ball.center, &points)?.0 - ball.radius;
    report.check("enclosure_excess", enclosure, 1e-9);
    if ball.converged {
        report.check_bool("converged", true);
    } else {
        report.warn("converged", None);
    }
    report.info("radius", ball.radius);
    report.info("iterations", ball.iterations as f64);

    let mut point_distances = std::collections::BTreeMap::new();
    for (name, p) in names.iter().zip(&points) {
        point_distances.insert(name.clone(), tracecone::distance(&ball.center, p)?);
    }
    report.set_certificate(&BallPayload {
        center: encode_element(ball.center.element()),
        radius: ball.radius,
        iterations: ball.iterations,
        converged: ball.converged,
        radius_history: ball.radius_history.clone(),
        point_distances,
    })?;
    let pass = report.all_pass() && ball.converged;
    finish_report(report, started, out)?;
    Ok(if pass {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

pub fn cmd_unitarize(
    instance: &Path,
    tol: f64,
    max_iter: usize,
    max_order: usize,
    method: Method,
    out: Option<&Path>,
) -> CliResult<i32> {
    let started = Instant::now();
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::input("--tol must be a positive number"));
    }
    let doc = InstanceDoc::read(instance)?;
    let alg = doc.to_algebra()?;
    let generators: Vec<AlgebraElement> = doc
        .elements_with_role(&alg, Role::Generator)?
        .into_iter()
        .map(|(_, x)| x)
        .collect();

    let (table, overflow) = close_group_in(&alg, &generators, max_order)?;
    match overflow {
        Some(ClosureOverflow::NormGrowth) => {
            return Err(CliError::unbounded(format!(
                "norm growth detected: generated products exceed the uniform bound cap, \
                 the group is not uniformly bounded ({} elements walked)",
                table.order()
            )));
        }
        Some(ClosureOverflow::OrderCap) => {
            return Err(CliError::unbounded(format!(
                "group order cap exceeded: closure passed {max_order} elements; \
                 raise --max-order if the group is genuinely finite"
            )));
        }
        None => {}
    }

    let solver_tol = (tol * 0.1).clamp(1e-12, DEFAULT_SOLVER_TOL);
    let opts = UnitarizeOptions {
        tol: solver_tol,
        max_iter,
        max_order,
        method,
        allow_partial: false,
    };
    let cert = unitarize_table(&table, &opts)?;

    // The report carries freshly recomputed residuals, never the solver's
    // bookkeeping, and the verification verdict at the requested tolerance.
    let res = certificate_residuals(&cert.center, &cert.unitarizer, &table)?;
    let verified = verify_certificate(&cert, &table, tol);

    let method_name = match method {
        Method::Circumcenter => "circumcenter",
        Method::Karcher => "karcher",
    };
    println!(
        "group order {} (uniform bound {:.6}), method {method_name}",
        table.order(),
        table.uniform_bound()
    );
    println!(
        "residual_unitarity = {:.3e}, residual_fixed_point = {:.3e}, verified = {verified}",
        res.unitarity, res.fixed_point
    );
    print_element(cert.unitarizer.element());

    let mut report = ReportDoc::new("unitarize");
    report.option("instance", instance.display().to_string());
    report.option("tol", tol);
    report.option("max_iter", max_iter as u64);
    report.option("max_order", max_order as u64);
    report.option("method", method_name);
    report.check("residual_unitarity", res.unitarity, tol);
    report.check("residual_fixed_point", res.fixed_point, tol);
    report.check_bool("orbit_band", res.orbit_band_ok);
    report.check_bool("unitarizer_band", res.unitarizer_band_ok);
    if cert.converged {
        report.check_bool("solver_converged", true);
    } else {
        report.warn("solver_converged", None);
    }
    report.check_bool("verified", verified);
    report.set_certificate(&CertificatePayload {
        method: method_name.to_string(),
        group_order: cert.group_order,
        group_closed: cert.group_closed,
        uniform_bound: cert.uniform_bound,
        band: [cert.band.lower(), cert.band.upper()],
        center: encode_element(cert.center.element()),
        unitarizer: encode_element(cert.unitarizer.element()),
        residual_unitarity: res.unitarity,
        residual_fixed_point: res.fixed_point,
        orbit_band_ok: res.orbit_band_ok,
        unitarizer_band_ok: res.unitarizer_band_ok,
        converged: cert.converged,
        solver_iterations: cert.solver_iterations,
        verified,
        verify_tolerance: tol,
    })?;
    finish_report(report, started, out)?;
    Ok(if verified {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

pub fn cmd_synth(blocks: &str, group: &str, cond: f64, seed: u64, out: &Path) -> CliResult<i32> {
    let (dims, weights) = crate::synth::parse_blocks(blocks)?;
    let family = crate::synth::parse_family(group)?;
    let params = SynthParams {
        dims,
        weights,
        family,
        cond,
        seed,
    };
    let (instance, truth) = synthesize(&params)?;
    instance.write(out)?;
    let sidecar = truth_path(out);
    truth.write(&sidecar)?;
    println!(
        "wrote {} ({}, {} generators, expected order {}); truth sidecar {}",
        out.display(),
        truth.family,
        instance.elements.len(),
        truth.expected_order,
        sidecar.display()
    );
    Ok(EXIT_PASS)
}

/// Sidecar path of a synthesized instance: the instance path with its
/// extension replaced by `truth.json`.
pub fn truth_path(instance: &Path) -> PathBuf {
    instance.with_extension("truth.json")
}

pub fn cmd_fuzz(suite: &str, trials: usize, seed: u64, out: Option<&Path>) -> CliResult<i32> {
    let started = Instant::now();
    let suites: Vec<Suite> = crate::fuzz::parse_suites(suite)?;
    let checks = run_fuzz(&suites, trials, seed)?;

    for check in &checks {
        let status = match check.status {
            crate::report::CheckStatus::Pass => "PASS",
            crate::report::CheckStatus::Fail => "FAIL",
            crate::report::CheckStatus::Warn => "WARN",
        };
        match (check.measured, check.tolerance) {
            (Some(m), Some(t)) => println!("{status} {} (worst {m:.3e}, tol {t:.1e})", check.name),
            (Some(m), None) => println!("{status} {} (worst {m:.3e})", check.name),
            _ => println!("{status} {}", check.name),
        }
    }

    let mut report = ReportDoc::new("fuzz");
    report.option("suite", suite);
    report.option("trials", trials as u64);
    report.seed = Some(seed);
    report.checks = checks;
    let pass = report.all_pass();
    println!(
        "fuzz {}: {} trials/suite, {}",
        suite,
        trials,
        if pass {
            "all suites PASS"
        } else {
            "FAILURES present"
        }
    );
    finish_report(report, started, out)?;
    Ok(if pass {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}
