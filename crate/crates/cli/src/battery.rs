//! The `verify` check battery for Cox and Poisson sources.

use haflab::fock::checks::{
    bridge_check, ccr_checks, density_commutator, density_hermiticity, poisson_theta_check, quasifree_checks,
    relative_error, theta_hafnian_check,
};
use haflab::fock::CcrRepresentation;
use haflab::kernels::{block_kernel, intensity_integral, CellSet, GaussianFieldModel, IntensityProfile};
use haflab::matfun::{hafnian_dp, hafnian_enum, Limits};
use haflab::report::{CheckRecord, MomentReport};
use haflab::sampling::{
    cox_patterns, empirical_product_moment, factorial_moment_quadrature, field_moment_mc, poisson_patterns,
    stream_rng, PointPattern, QuadratureLimits,
};
use haflab::{Result, C64};
use rand::Rng;

/// Standard errors allowed between a Monte Carlo estimate and its exact value.
pub const MC_SIGMAS: f64 = 4.0;

const CCR_TOLERANCE: f64 = 1e-10;
const HAFNIAN_TOLERANCE: f64 = 1e-10;

pub struct Plan {
    pub seed: u64,
    pub boxes: Vec<CellSet>,
    pub orders: Vec<usize>,
    pub truncation: usize,
    pub replicates: usize,
    pub mc_samples: u64,
    pub quadrature: QuadratureLimits,
}

impl Plan {
    fn prefix(&self, n: usize) -> &[CellSet] {
        &self.boxes[..n]
    }

    /// One representative cell per box, used by the pointwise checks.
    fn points(&self, n: usize) -> Vec<usize> {
        self.boxes[..n].iter().map(|b| b.as_slice()[0]).collect()
    }
}

/// Seeds for independent sub-experiments of one run.
fn derived_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn guarded(out: &mut Vec<CheckRecord>, name: &str, f: impl FnOnce() -> Result<Vec<CheckRecord>>) {
    match f() {
        Ok(records) => out.extend(records),
        Err(e) => out.push(CheckRecord::failed(name, e.to_string())),
    }
}

/// `|estimate − exact|` in units of the estimate's standard error.
pub fn mc_record(name: String, estimate: &MomentReport, exact: f64) -> CheckRecord {
    let diff = (estimate.real() - exact).abs();
    let se = estimate.std_error.unwrap_or(0.0);
    let residual = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    CheckRecord::new(name, residual, MC_SIGMAS)
        .with_detail(format!("estimate {} (se {se:.3e}), exact {exact}", estimate.real()))
}

fn test_functions(points: usize, seed: u64) -> [Vec<C64>; 4] {
    let mut rng = stream_rng(derived_seed(seed, 3), 0);
    std::array::from_fn(|_| {
        (0..points)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    })
}

fn label(boxes: &[CellSet]) -> String {
    let parts: Vec<String> = boxes.iter().map(|b| format!("{:?}", b.as_slice())).collect();
    parts.join("x")
}

fn density_checks(out: &mut Vec<CheckRecord>, rep: &CcrRepresentation, plan: &Plan) {
    let window = CellSet::new(0..rep.points());
    for (i, b) in plan.boxes.iter().enumerate() {
        guarded(out, "density hermiticity", || Ok(vec![density_hermiticity(rep, b)?]));
        for c in plan.boxes.iter().skip(i + 1).chain(std::iter::once(&window)) {
            guarded(out, "density commutator", || Ok(vec![density_commutator(rep, b, c)?]));
        }
    }
}

fn moment_vs_patterns(out: &mut Vec<CheckRecord>, rep: &CcrRepresentation, plan: &Plan, patterns: &[PointPattern]) {
    for &n in &plan.orders {
        let boxes = plan.prefix(n);
        guarded(out, "fock moment vs sampled patterns", || {
            let exact = rep.moment(boxes)?;
            let estimate = empirical_product_moment(patterns, boxes)?;
            Ok(vec![mc_record(format!("fock moment vs sampled patterns {}", label(boxes)), &estimate, exact.re)])
        });
    }
}

pub fn cox_battery(model: &GaussianFieldModel, plan: &Plan) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let limits = Limits::default();
    for &n in &plan.orders {
        let points = plan.points(n);
        guarded(&mut out, "hafnian enum vs dp", || {
            let c = block_kernel(model, &points)?.matrix;
            let (a, b) = (hafnian_enum(&c, &limits)?, hafnian_dp(&c, &limits)?);
            Ok(vec![CheckRecord::new(format!("hafnian enum vs dp {points:?}"), relative_error(a, b), HAFNIAN_TOLERANCE)])
        });
        guarded(&mut out, "gaussian moment bridge", || Ok(vec![bridge_check(model, &points)?]));
        guarded(&mut out, "field moment vs hafnian", || {
            let exact = hafnian_dp(&block_kernel(model, &points)?.matrix, &limits)?;
            let estimate = field_moment_mc(model, &points, plan.mc_samples, derived_seed(plan.seed, 1))?;
            Ok(vec![mc_record(format!("field moment vs hafnian {points:?}"), &estimate, exact.re)])
        });
    }

    let rep = CcrRepresentation::cox(model, plan.truncation);
    match &rep {
        Ok(rep) => {
            for &n in &plan.orders {
                guarded(&mut out, "theta vs hafnian quadrature", || {
                    Ok(vec![theta_hafnian_check(model, rep, plan.prefix(n), &plan.quadrature)?])
                });
            }
            if plan.replicates > 0 {
                match cox_patterns(model, plan.replicates, derived_seed(plan.seed, 2)) {
                    Ok(patterns) => moment_vs_patterns(&mut out, rep, plan, &patterns),
                    Err(e) => out.push(CheckRecord::failed("fock moment vs sampled patterns", e.to_string())),
                }
            }
            out.push(worst("ccr", ccr_checks(rep, CCR_TOLERANCE)));
            density_checks(&mut out, rep, plan);
            let hs = test_functions(rep.points(), plan.seed);
            guarded(&mut out, "quasi-free", || quasifree_checks(rep, &hs, true));
        }
        Err(e) => out.push(CheckRecord::failed("fock representation", e.to_string())),
    }

    for b in &plan.boxes {
        for &n in &plan.orders {
            guarded(&mut out, "growth bound", || Ok(vec![growth_record(model, b, n, &plan.quadrature)?]));
        }
    }
    out
}

/// `θ⁽ⁿ⁾(Δⁿ) ≤ (2 I(Δ))ⁿ`; the residual is the ratio of the two sides.
fn growth_record(model: &GaussianFieldModel, b: &CellSet, n: usize, limits: &QuadratureLimits) -> Result<CheckRecord> {
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let theta = factorial_moment_quadrature(model, b, n, limits)?.real() / factorial;
    let bound = (2.0 * intensity_integral(model, b)).powi(n as i32);
    let ratio = if bound > 0.0 {
        theta / bound
    } else if theta == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CheckRecord::new(format!("growth bound {:?}, order {n}", b.as_slice()), ratio, 1.0))
}

/// Collapses a family of records into its worst member.
fn worst(name: &str, records: Vec<CheckRecord>) -> CheckRecord {
    let count = records.len();
    match records.into_iter().max_by(|a, b| a.residual.total_cmp(&b.residual)) {
        Some(r) => CheckRecord::new(name, r.residual, r.tolerance).with_detail(format!("worst of {count}: {}", r.name)),
        None => CheckRecord::new(name, 0.0, CCR_TOLERANCE),
    }
}

pub fn poisson_battery(profile: &IntensityProfile, plan: &Plan) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let rep = match CcrRepresentation::poisson(profile, plan.truncation) {
        Ok(rep) => rep,
        Err(e) => {
            out.push(CheckRecord::failed("fock representation", e.to_string()));
            return out;
        }
    };
    for &n in &plan.orders {
        guarded(&mut out, "poisson theta", || Ok(vec![poisson_theta_check(profile, &rep, plan.prefix(n))?]));
    }
    if plan.replicates > 0 {
        let patterns = poisson_patterns(profile, plan.replicates, derived_seed(plan.seed, 2));
        moment_vs_patterns(&mut out, &rep, plan, &patterns);
    }
    out.push(worst("ccr", ccr_checks(&rep, CCR_TOLERANCE)));
    density_checks(&mut out, &rep, plan);
    let hs = test_functions(rep.points(), plan.seed);
    guarded(&mut out, "quasi-free", || quasifree_checks(&rep, &hs, false));
    out
}
