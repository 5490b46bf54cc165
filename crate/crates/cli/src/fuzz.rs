//! Seeded property-fuzz suites covering the library invariants: metric
//! axioms, band geometry, hull expansion, enclosing-ball optimality, and
//! end-to-end unitarization. Every trial is a pure function of its sub-seed
//! `seed + trial_index`, so reports are identical regardless of how trials
//! are scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::sync::Arc;
use tracecone::{
    circumcenter, close_group, congruence, distance, exp_hermitian, hull_expand, karcher_mean,
    max_radius, midpoint, norm2, sample_haar_unitary, sample_hermitian, sample_invertible,
    sample_positive_in_band, uniform_norm, unitarize_table, verify_certificate, AlgebraElement,
    Band, BlockAlgebra, GeodesicSegment, HullOptions, Method, PositiveElement, UnitarizeOptions,
};

use crate::report::{CheckRecord, CheckStatus};
use crate::synth::{build_base_generators, sample_conjugator, Family};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Band,
    Hull,
    Circumcenter,
    Unitarize,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Band => "band",
            Suite::Hull => "hull",
            Suite::Circumcenter => "circumcenter",
            Suite::Unitarize => "unitarize",
        }
    }
}

/// Parses `--suite`; `all` expands to every suite in a fixed order.
pub fn parse_suites(text: &str) -> CliResult<Vec<Suite>> {
    match text {
        "metric" => Ok(vec![Suite::Metric]),
        "band" => Ok(vec![Suite::Band]),
        "hull" => Ok(vec![Suite::Hull]),
        "circumcenter" => Ok(vec![Suite::Circumcenter]),
        "unitarize" => Ok(vec![Suite::Unitarize]),
        "all" => Ok(vec![
            Suite::Metric,
            Suite::Band,
            Suite::Hull,
            Suite::Circumcenter,
            Suite::Unitarize,
        ]),
        other => Err(CliError::input(format!(
            "unknown suite {other:?} (expected metric, band, hull, circumcenter, unitarize, all)"
        ))),
    }
}

/// One property reading from one trial.
struct PropertyRow {
    name: &'static str,
    measured: Option<f64>,
    tolerance: Option<f64>,
    pass: bool,
}

impl PropertyRow {
    fn thresholded(name: &'static str, measured: f64, tolerance: f64) -> Self {
        PropertyRow {
            name,
            measured: Some(measured),
            tolerance: Some(tolerance),
            pass: measured <= tolerance,
        }
    }

    fn boolean(name: &'static str, pass: bool) -> Self {
        PropertyRow {
            name,
            measured: None,
            tolerance: None,
            pass,
        }
    }

    fn finite(name: &'static str, measured: f64) -> Self {
        PropertyRow {
            name,
            measured: Some(measured),
            tolerance: None,
            pass: measured.is_finite(),
        }
    }
}

/// Runs `trials` sub-seeded trials of each suite and folds every property
/// into one check record carrying the worst observed reading.
pub fn run_fuzz(suites: &[Suite], trials: usize, seed: u64) -> CliResult<Vec<CheckRecord>> {
    if trials == 0 {
        return Err(CliError::input("--trials must be at least 1"));
    }
    let mut checks = Vec::new();
    for &suite in suites {
        let per_trial: Vec<Vec<PropertyRow>> = (0..trials)
            .into_par_iter()
            .map(|i| run_trial(suite, seed.wrapping_add(i as u64)))
            .collect::<CliResult<_>>()?;
        let row_count = per_trial[0].len();
        for idx in 0..row_count {
            let name = per_trial[0][idx].name;
            debug_assert!(per_trial.iter().all(|rows| rows[idx].name == name));
            let mut worst: Option<f64> = None;
            let mut tolerance: Option<f64> = None;
            let mut pass = true;
            for rows in &per_trial {
                let row = &rows[idx];
                if let Some(m) = row.measured {
                    worst = Some(match worst {
                        Some(w) => w.max(m),
                        None => m,
                    });
                }
                if tolerance.is_none() {
                    tolerance = row.tolerance;
                }
                pass &= row.pass;
            }
            checks.push(CheckRecord {
                name: format!("{}/{}", suite.name(), name),
                status: if pass {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                measured: worst,
                tolerance,
            });
        }
    }
    Ok(checks)
}

fn run_trial(suite: Suite, sub_seed: u64) -> CliResult<Vec<PropertyRow>> {
    let mut rng = ChaCha12Rng::seed_from_u64(sub_seed);
    match suite {
        Suite::Metric => trial_metric(&mut rng),
        Suite::Band => trial_band(&mut rng),
        Suite::Hull => trial_hull(&mut rng, sub_seed),
        Suite::Circumcenter => trial_circumcenter(&mut rng),
        Suite::Unitarize => trial_unitarize(&mut rng),
    }
}

/// The algebras trials draw from; small enough to keep spectral work cheap,
/// varied enough to cover multi-block weighting.
fn trial_algebra(rng: &mut impl Rng) -> Arc<BlockAlgebra> {
    let specs: [(&[usize], &[f64]); 5] = [
        (&[2], &[1.0]),
        (&[3], &[1.0]),
        (&[2, 1], &[0.7, 0.3]),
        (&[2, 2], &[0.5, 0.5]),
        (&[3, 2], &[0.4, 0.6]),
    ];
    let (dims, weights) = specs[rng.random_range(0..specs.len())];
    BlockAlgebra::new(dims.to_vec(), weights.to_vec()).expect("fixed trial algebras are valid")
}

fn trial_metric(rng: &mut impl Rng) -> CliResult<Vec<PropertyRow>> {
    let alg = trial_algebra(rng);
    let band = Band::new(1e-2, 1e2)?;
    let a = sample_positive_in_band(&alg, &band, rng)?;
    let b = sample_positive_in_band(&alg, &band, rng)?;
    let c = sample_positive_in_band(&alg, &band, rng)?;
    let w = sample_positive_in_band(&alg, &band, rng)?;
    let g = sample_invertible(&alg, 1e3, rng);
    let one = PositiveElement::one(&alg);

    let d_ab = distance(&a, &b)?;
    let symmetry = (d_ab - distance(&b, &a)?).abs() / (1.0 + d_ab);
    let triangle = distance(&a, &c)? - d_ab - distance(&b, &c)?;

    let log_a = a.log()?;
    let identity_log = (distance(&one, &a)? - norm2(&log_a)).abs() / (1.0 + norm2(&log_a));

    let z = midpoint(&a, &b)?;
    let semi_par = d_ab * d_ab + 4.0 * distance(&w, &z)?.powi(2)
        - 2.0 * (distance(&w, &a)?.powi(2) + distance(&w, &b)?.powi(2));

    let seg1 = GeodesicSegment::new(&a, &b)?;
    let seg2 = GeodesicSegment::new(&c, &w)?;
    let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
    let f: Vec<f64> = grid
        .iter()
        .map(|&t| distance(&seg1.eval(t)?, &seg2.eval(t)?))
        .collect::<Result<_, _>>()?;
    let convexity = f
        .windows(3)
        .map(|win| win[1] - 0.5 * (win[0] + win[2]))
        .fold(f64::NEG_INFINITY, f64::max);

    let ga = congruence(&g, &a)?;
    let gb = congruence(&g, &b)?;
    let isometry = (distance(&ga, &gb)? - d_ab).abs() / (1.0 + d_ab);

    let endpoint = (norm2(&(seg1.eval(0.0)?.element() - a.element()))
        + norm2(&(seg1.eval(1.0)?.element() - b.element())))
        / (1.0 + norm2(a.element()) + norm2(b.element()));

    let gseg = GeodesicSegment::new(&ga, &gb)?;
    let mut equivariance = 0.0f64;
    let mut reversal = 0.0f64;
    let rev = GeodesicSegment::new(&b, &a)?;
    for &t in &[0.25, 0.5, 0.75] {
        let through_g = congruence(&g, &seg1.eval(t)?)?;
        let direct = gseg.eval(t)?;
        let scale = 1.0 + norm2(direct.element());
        equivariance = equivariance.max(norm2(&(through_g.element() - direct.element())) / scale);
        let fwd = seg1.eval(t)?;
        let bwd = rev.eval(1.0 - t)?;
        reversal =
            reversal.max(norm2(&(fwd.element() - bwd.element())) / (1.0 + norm2(fwd.element())));
    }

    Ok(vec![
        PropertyRow::thresholded("symmetry_rel", symmetry, 1e-9),
        PropertyRow::thresholded("triangle_violation", triangle, 1e-8),
        PropertyRow::thresholded("identity_log_rel", identity_log, 1e-9),
        PropertyRow::thresholded("semi_parallelogram_violation", semi_par, 1e-8),
        PropertyRow::thresholded("midpoint_convexity_violation", convexity, 1e-8),
        PropertyRow::thresholded("congruence_isometry_rel", isometry, 1e-8),
        PropertyRow::thresholded("geodesic_endpoint_rel", endpoint, 1e-9),
        PropertyRow::thresholded("geodesic_equivariance_rel", equivariance, 1e-8),
        PropertyRow::thresholded("geodesic_reversal_rel", reversal, 1e-9),
    ])
}

/// Largest spectral escape of `x` from `band` (0 when inside).
fn band_excess(x: &PositiveElement, band: &Band) -> f64 {
    (band.lower() - x.min_eig())
        .max(x.max_eig() - band.upper())
        .max(0.0)
}

fn trial_band(rng: &mut impl Rng) -> CliResult<Vec<PropertyRow>> {
    let alg = trial_algebra(rng);
    let c1 = rng.random_range(0.05f64.ln()..=0.5f64.ln()).exp();
    let c2 = rng.random_range(2.0f64.ln()..=10.0f64.ln()).exp();
    let band = Band::new(c1, c2)?;
    let a = sample_positive_in_band(&alg, &band, rng)?;
    let b = sample_positive_in_band(&alg, &band, rng)?;

    let d_ab = distance(&a, &b)?;
    let diameter = d_ab - band.diameter_bound();

    let seg = GeodesicSegment::new(&a, &b)?;
    let mut geo_excess = 0.0f64;
    for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        geo_excess = geo_excess.max(band_excess(&seg.eval(t)?, &band));
    }

    let u = sample_haar_unitary(&alg, rng);
    let rotated = congruence(&u, &a)?;
    let unitary_excess = band_excess(&rotated, &band);

    let linear = norm2(&(a.element() - b.element()));
    let (ratio_d, ratio_n) = if linear < 1e-12 || d_ab < 1e-12 {
        (1.0, 1.0)
    } else {
        (d_ab / linear, linear / d_ab)
    };

    Ok(vec![
        PropertyRow::thresholded("diameter_violation", diameter, 1e-8),
        PropertyRow::thresholded("geodesic_band_excess", geo_excess, 1e-10),
        PropertyRow::thresholded("unitary_invariance_excess", unitary_excess, 1e-10),
        PropertyRow::finite("ratio_distance_over_linear", ratio_d),
        PropertyRow::finite("ratio_linear_over_distance", ratio_n),
    ])
}

fn trial_hull(rng: &mut impl Rng, sub_seed: u64) -> CliResult<Vec<PropertyRow>> {
    let alg = trial_algebra(rng);
    let band = Band::new(0.25, 4.0)?;
    let points: Vec<PositiveElement> = (0..3)
        .map(|_| sample_positive_in_band(&alg, &band, rng))
        .collect::<Result<_, _>>()?;
    let opts = HullOptions {
        depth: 2,
        samples_per_pair: 3,
        max_points: 4000,
        seed: sub_seed,
    };
    let hull = hull_expand(&points, &opts)?;
    let gens = hull.generations();

    let mut prefix_defect = 0.0f64;
    for pair in gens.windows(2) {
        for p in &pair[0] {
            let nearest = pair[1]
                .iter()
                .map(|q| norm2(&(p.element() - q.element())))
                .fold(f64::INFINITY, f64::min);
            prefix_defect = prefix_defect.max(nearest / (1.0 + norm2(p.element())));
        }
    }

    let last = gens.last().expect("hull has at least one generation");
    let excess = last
        .iter()
        .map(|p| band_excess(p, &band))
        .fold(0.0f64, f64::max);

    let mid = midpoint(&points[0], &points[1])?;
    let mid_presence = last
        .iter()
        .map(|q| norm2(&(mid.element() - q.element())))
        .fold(f64::INFINITY, f64::min)
        / (1.0 + norm2(mid.element()));

    let single = hull_expand(&points[..1], &opts)?;
    let extra = single
        .generations()
        .iter()
        .map(|g| g.len())
        .max()
        .unwrap_or(1) as f64
        - 1.0;

    Ok(vec![
        PropertyRow::thresholded("generation_prefix_defect", prefix_defect, 1e-9),
        PropertyRow::thresholded("band_excess", excess, 1e-10),
        PropertyRow::thresholded("midpoint_presence", mid_presence, 2e-9),
        PropertyRow::thresholded("singleton_extra_points", extra, 0.0),
    ])
}

fn trial_circumcenter(rng: &mut impl Rng) -> CliResult<Vec<PropertyRow>> {
    let alg = trial_algebra(rng);
    let band = Band::new(0.25, 4.0)?;
    let tol = 1e-8;

    // Two-point exactness against the midpoint.
    let p = sample_positive_in_band(&alg, &band, rng)?;
    let q = sample_positive_in_band(&alg, &band, rng)?;
    let two = circumcenter(&[p.clone(), q.clone()], tol, 0)?;
    let mid = midpoint(&p, &q)?;
    let two_point = distance(&two.center, &mid)?.max((two.radius - 0.5 * distance(&p, &q)?).abs());

    let m = rng.random_range(2..=5);
    let points: Vec<PositiveElement> = (0..m)
        .map(|_| sample_positive_in_band(&alg, &band, rng))
        .collect::<Result<_, _>>()?;
    let ball = circumcenter(&points, tol, 0)?;

    let enclosure = max_radius(&ball.center, &points)?.0 - ball.radius;

    // Minimality: no nearby candidate covers the set with a smaller ball.
    let sqrt_c = ball.center.sqrt()?;
    let mut minimality = f64::NEG_INFINITY;
    for _ in 0..50 {
        let h = sample_hermitian(&alg, 1.0, rng);
        let len = norm2(&h);
        if len < 1e-14 {
            continue;
        }
        let step = rng.random_range(0.0..=0.1);
        let u = h.scale(step / len);
        let probe = congruence(sqrt_c.element(), &exp_hermitian(&u)?)?;
        minimality = minimality.max(ball.radius - max_radius(&probe, &points)?.0);
    }

    let history_increase = ball
        .radius_history
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);

    let g = sample_invertible(&alg, 16.0, rng);
    let moved: Vec<PositiveElement> = points
        .iter()
        .map(|x| congruence(&g, x))
        .collect::<Result<_, _>>()?;
    let moved_ball = circumcenter(&moved, tol, 0)?;
    let equivariance = distance(&moved_ball.center, &congruence(&g, &ball.center)?)?;

    let km = karcher_mean(&points, tol, 0)?;
    let minv = km.mean.inv_sqrt()?;
    let mut grad_sum = AlgebraElement::zero(&alg);
    for x in &points {
        grad_sum = &grad_sum + &congruence(minv.element(), x)?.log()?;
    }
    let recomputed = norm2(&grad_sum);
    let karcher_mismatch = (recomputed - km.gradient_norm).abs();

    Ok(vec![
        PropertyRow::thresholded("two_point_error", two_point, 1e-7),
        PropertyRow::thresholded("enclosure_excess", enclosure, 1e-9),
        PropertyRow::thresholded("minimality_margin", minimality, tol),
        PropertyRow::thresholded("history_max_increase", history_increase, 1e-7),
        PropertyRow::boolean("converged", ball.converged),
        PropertyRow::thresholded("equivariance_distance", equivariance, 10.0 * tol),
        PropertyRow::thresholded("karcher_gradient_norm", km.gradient_norm, tol),
        PropertyRow::thresholded("karcher_certificate_mismatch", karcher_mismatch, 1e-12),
    ])
}

fn trial_unitarize(rng: &mut impl Rng) -> CliResult<Vec<PropertyRow>> {
    let alg = trial_algebra(rng);
    let family = if rng.random_bool(0.5) {
        Family::Cyclic(rng.random_range(2..=8))
    } else {
        Family::Dihedral(rng.random_range(2..=5))
    };
    let cond = rng.random_range(0.0..=4.0f64.ln()).exp();
    let base = build_base_generators(&alg, family, rng)?;
    let (g, g_inv, _) = sample_conjugator(&alg, cond, rng)?;
    let generators: Vec<AlgebraElement> = base.iter().map(|u| &(&g * u) * &g_inv).collect();

    let table = close_group(&generators, 10_000)?;
    let opts_c = UnitarizeOptions {
        tol: 1e-9,
        ..UnitarizeOptions::default()
    };
    let opts_k = UnitarizeOptions {
        tol: 1e-9,
        method: Method::Karcher,
        ..UnitarizeOptions::default()
    };
    let cert_c = unitarize_table(&table, &opts_c)?;
    let cert_k = unitarize_table(&table, &opts_k)?;

    let bands_ok = cert_c.orbit_band_ok && cert_c.unitarizer_band_ok;
    let verified_c = verify_certificate(&cert_c, &table, 1e-6);
    let verified_k = verify_certificate(&cert_k, &table, 1e-6);

    // Conjugation is a homomorphism: images multiply like their sources.
    let s = cert_c.unitarizer.element().clone();
    let s_inv = cert_c.unitarizer.inv()?.element().clone();
    let image = |h: &AlgebraElement| &(&s * h) * &s_inv;
    let mut homomorphism = 0.0f64;
    for _ in 0..5 {
        let h1 = &table.elements()[rng.random_range(0..table.order())];
        let h2 = &table.elements()[rng.random_range(0..table.order())];
        let lhs = &image(h1) * &image(h2);
        let rhs = image(&(h1 * h2));
        homomorphism = homomorphism.max(uniform_norm(&(&lhs - &rhs)) / (1.0 + uniform_norm(&rhs)));
    }

    // Unitarizing the already-unitarized generators must do nothing.
    let images: Vec<AlgebraElement> = generators.iter().map(image).collect();
    let table2 = close_group(&images, 10_000)?;
    let cert2 = unitarize_table(&table2, &UnitarizeOptions::default())?;
    let one = PositiveElement::one(&alg);
    let idempotence = distance(&cert2.unitarizer.powf(2.0)?, &one)?;

    // Both methods' images must be unitary: all singular values near 1.
    let mut sv_defect = 0.0f64;
    for cert in [&cert_c, &cert_k] {
        let s = cert.unitarizer.element().clone();
        let s_inv = cert.unitarizer.inv()?.element().clone();
        for h in table.elements() {
            let q = &(&s * h) * &s_inv;
            sv_defect = sv_defect
                .max((uniform_norm(&q) - 1.0).abs())
                .max((q.smallest_singular_value() - 1.0).abs());
        }
    }

    Ok(vec![
        PropertyRow::thresholded("residual_unitarity", cert_c.residual_unitarity, 1e-7),
        PropertyRow::thresholded("residual_fixed_point", cert_c.residual_fixed_point, 1e-7),
        PropertyRow::boolean("bands_ok", bands_ok),
        PropertyRow::boolean("verified_circumcenter_1e6", verified_c),
        PropertyRow::boolean("verified_karcher_1e6", verified_k),
        PropertyRow::thresholded("homomorphism_defect", homomorphism, 1e-9),
        PropertyRow::thresholded("idempotence_distance", idempotence, 1e-8),
        PropertyRow::thresholded("cross_method_singular_value_defect", sv_defect, 1e-6),
    ])
}
