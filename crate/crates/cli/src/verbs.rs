//! The pipeline behind each CLI verb. Every verb turns a scenario into a
//! [`Report`]; sampling is seeded per sample index, so parallel evaluation
//! never changes the output.

use cocycle_core::cocycle::{BunchedCocycle, BunchingMode};
use cocycle_core::holonomy::{self, HolonomyConstants};
use cocycle_core::linalg;
use cocycle_core::rigidity::{self, Conjugacy, ConjugacyEvaluator, UnwoundConjugacy};
use cocycle_core::{Point, ShiftSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Record, Report};
use crate::scenario::{Scenario, System, BUNCHING_BUDGET};
use crate::CliError;

/// Tolerance for the composition, equivariance and oracle checks.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Tolerance of the coprime-combination residual.
pub const COMBINATION_TOL: f64 = 1e-9;

/// Command-line overrides of scenario values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub horizon: Option<usize>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, s: &Scenario) -> Scenario {
        let mut s = s.clone();
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(tol) = self.tol {
            s.params.tol = tol;
        }
        if let Some(h) = self.horizon {
            s.params.horizon = h;
        }
        if let Some(n) = self.samples {
            s.params.samples = n;
        }
        s
    }
}

fn stage<T>(name: &'static str, r: cocycle_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Stage { stage: name, source })
}

fn rng_for(sys: &System, stream: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sys.seeds.get(stream.wrapping_mul(1 << 32).wrapping_add(index as u64)))
}

/// `x` with a random admissible word written on coordinates `lo..hi`.
fn perturb(space: &ShiftSpace, rng: &mut ChaCha8Rng, x: &Point, lo: i64, hi: i64) -> Point {
    let len = (hi - lo) as usize;
    for _ in 0..1000 {
        let word = space.random_word(rng, Some(x.at(lo - 1)), len);
        if space.admissible_pair(word[len - 1], x.at(hi)) {
            return Point::overlay(x, lo, &word);
        }
    }
    x.clone()
}

pub fn run_bunching(s: &Scenario) -> Result<Report, CliError> {
    let sys = s.build()?;
    let mut report = Report::new("bunching", s.seed);
    let h = sys.a.affordable_horizon(s.params.horizon, BUNCHING_BUDGET);
    if h < s.params.horizon {
        report.push(Record::info("horizon-capped", h as f64).with("requested", s.params.horizon));
    }
    let b = stage("bunching", sys.a.bunching_report(h, BunchingMode::Exhaustive))?;
    for row in &b.rows {
        let fit = b.c3_hat.ln() + b.theta_hat * row.n as f64;
        report.push(
            Record::info("sup-cond", row.sup)
                .with("n", row.n)
                .with("log_sup", crate::report::num(row.sup.ln()))
                .with("fit", crate::report::num(fit)),
        );
    }
    report.push(Record::info("theta-hat", b.theta_hat));
    report.push(Record::info("c3-hat", b.c3_hat));
    report.push(Record::below("bunched", b.theta_hat + b.margin, b.rate).with("margin", b.margin));
    Ok(report)
}

pub fn run_closing(s: &Scenario) -> Result<Report, CliError> {
    let sys = s.build()?;
    let space = &sys.space;
    let c = space.closing_constants();
    let rows: Vec<Result<Record, CliError>> = (0..s.params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&sys, 1, i);
            let n = 1 + i % 12;
            let z = stage("closing", space.random_near_recurrent(&mut rng, n))?;
            let p = stage("closing", space.closing(&z, n))?;
            let gap = space.metric(&z.shift(n as i64), &z);
            let worst = (0..=n as i64)
                .map(|j| {
                    let d = space.metric(&z.shift(j), &p.shift(j));
                    let bound = c.c5 * (-c.rate * j.min(n as i64 - j) as f64).exp() * gap;
                    if d == 0.0 {
                        0.0
                    } else {
                        d / bound
                    }
                })
                .fold(0.0, f64::max);
            Ok(Record::at_most("shadowing", worst, 1.0)
                .with("n", n)
                .with("z", &z)
                .with("p", &p))
        })
        .collect();
    let mut report = Report::new("closing", s.seed);
    report.push(Record::info("c5", c.c5));
    for r in rows {
        report.push(r?);
    }
    Ok(report)
}

pub fn run_holonomy(s: &Scenario) -> Result<Report, CliError> {
    let sys = s.build()?;
    let a = sys.certify(&sys.a, s.params.horizon)?;
    let k = HolonomyConstants::for_cocycle(&a);
    let space = &sys.space;
    let r = s.params.homoclinic_radius.max(1) as i64;
    let tol = s.params.holonomy_tol;
    let rows: Vec<Result<Vec<Record>, CliError>> = (0..s.params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&sys, 2, i);
            let x = stage("sampling", space.random_homoclinic(&mut rng, &sys.anchor, r as usize))?;
            let y = perturb(space, &mut rng, &x, -2 * r, 0);
            let z = perturb(space, &mut rng, &x, -2 * r, 0);
            let w = perturb(space, &mut rng, &x, 1, 2 * r + 1);
            let ids = stage("holonomy", holonomy::holonomy_identity_residuals(&a, &k, &x, &y, &z, tol))?;
            let hs = stage("holonomy", holonomy::stable_holonomy(&a, &y, &z, tol))?;
            let es = stage("holonomy", holonomy::stable_holonomy_exact(&a, &y, &z))?;
            let hu = stage("holonomy", holonomy::unstable_holonomy(&a, &x, &w, tol))?;
            let eu = stage("holonomy", holonomy::unstable_holonomy_exact(&a, &x, &w))?;
            let mut out = vec![
                Record::below("composition", ids.composition, IDENTITY_TOL),
                Record::below("equivariance", ids.equivariance, IDENTITY_TOL),
            ];
            if let Some((lhs, rhs)) = ids.holder {
                out.push(Record::at_most("holder", lhs, rhs));
            }
            let gap_s = linalg::distance(&hs.matrix, &es);
            let gap_u = linalg::distance(&hu.matrix, &eu);
            out.push(Record::at_most("oracle-stable", gap_s, hs.tail_bound.min(IDENTITY_TOL)).with("depth", hs.depth));
            out.push(Record::at_most("oracle-unstable", gap_u, hu.tail_bound.min(IDENTITY_TOL)).with("depth", hu.depth));
            Ok(out.into_iter().map(|r| r.with("sample", i)).collect())
        })
        .collect();
    let mut report = Report::new("holonomy", s.seed);
    report.push(Record::info("c4", k.c4));
    report.push(Record::info("theta-hat", k.theta));
    for r in rows {
        for rec in r? {
            report.push(rec);
        }
    }
    Ok(report)
}

fn periodic_records(sys: &System, s: &Scenario, report: &mut Report) -> Result<(), CliError> {
    let tol = s.params.periodic_tol;
    let plain = stage("periodic-data", rigidity::periodic_data_check(&sys.a, &sys.b, s.params.max_period, None, tol))?;
    let mut rec = Record::below("periodic-identity", plain.max_residual, tol)
        .with("max_period", s.params.max_period)
        .with("checked", plain.checked);
    if let Some(q) = &sys.p_true {
        rec = rec.informational();
        report.push(rec);
        let with_q = stage("periodic-data", rigidity::periodic_data_check(&sys.a, &sys.b, s.params.max_period, Some(q), tol))?;
        report.push(
            Record::below("periodic-witness", with_q.max_residual, tol)
                .with("max_period", s.params.max_period)
                .with("checked", with_q.checked),
        );
        report.push(Record::below("periodic-witness-paths", with_q.path_gap, tol));
        push_failures(&with_q, report);
    } else {
        report.push(rec);
        push_failures(&plain, report);
    }
    Ok(())
}

fn push_failures(r: &rigidity::PeriodicDataReport, report: &mut Report) {
    if let Some(min) = r.min_failing_residual() {
        report.push(Record::info("min-failing-residual", min).with("failures", r.failures.len()));
    }
    for f in r.failures.iter().take(20) {
        report.push(
            Record::info("periodic-failure", f.residual)
                .with("period", f.period)
                .with("point", &f.point),
        );
    }
}

pub fn run_periodic_data(s: &Scenario) -> Result<Report, CliError> {
    let sys = s.build()?;
    let mut report = Report::new("periodic-data", s.seed);
    periodic_records(&sys, s, &mut report)?;
    Ok(report)
}

/// The reconstructed conjugacy: anchored at a fixed point, or unwound from
/// an induced power when the anchor has a longer period.
pub enum Reconstruction {
    Fixed(ConjugacyEvaluator),
    Unwound(UnwoundConjugacy),
}

impl Reconstruction {
    pub fn evaluator(&self) -> &ConjugacyEvaluator {
        match self {
            Reconstruction::Fixed(ev) => ev,
            Reconstruction::Unwound(u) => u.induced(),
        }
    }

    pub fn conjugacy(&self) -> &dyn Conjugacy {
        match self {
            Reconstruction::Fixed(ev) => ev,
            Reconstruction::Unwound(u) => u,
        }
    }
}

pub fn reconstruct(sys: &System, s: &Scenario, a: &BunchedCocycle, b: &BunchedCocycle) -> cocycle_core::Result<Reconstruction> {
    let tol = s.params.holonomy_tol;
    let schedule = rigidity::DEFAULT_RADIUS_SCHEDULE.to_vec();
    if sys.anchor_period == 1 {
        let ev = ConjugacyEvaluator::new(a.clone(), b.clone(), sys.anchor.clone(), tol)?
            .with_extension(s.params.conjugacy_tol, schedule);
        Ok(Reconstruction::Fixed(ev))
    } else {
        let u = rigidity::reduce_to_fixed_point(a, b, &sys.anchor, sys.anchor_period, tol)?;
        Ok(Reconstruction::Unwound(u))
    }
}

struct Pipeline {
    sys: System,
    rec: Option<Reconstruction>,
}

/// Periodic data, bunching, reconstruction, stable/unstable consistency and the
/// cohomology residual. Stage errors become failing records.
fn reconstruction_stages(s: &Scenario, report: &mut Report) -> Result<Option<Pipeline>, CliError> {
    let sys = s.build()?;
    periodic_records(&sys, s, report)?;
    let certified = sys.certify(&sys.a, s.params.horizon).and_then(|a| Ok((a, sys.certify(&sys.b, s.params.horizon)?)));
    let (a, b) = match certified {
        Ok(pair) => pair,
        Err(e) => {
            report.push(Record::error("bunching", &e.to_string()));
            return Ok(None);
        }
    };
    let rec = match reconstruct(&sys, s, &a, &b) {
        Ok(r) => r,
        Err(e) => {
            report.push(Record::error("reconstruct", &e.to_string()));
            return Ok(Some(Pipeline { sys, rec: None }));
        }
    };
    let ev = rec.evaluator();
    let space = &sys.space;
    let radius = s.params.homoclinic_radius.max(1);

    let su: Vec<cocycle_core::Result<f64>> = (0..s.params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&sys, 3, i);
            let y = space.random_homoclinic(&mut rng, ev.anchor(), radius)?;
            ev.su_consistency(&y)
        })
        .collect();
    push_max(report, "su-consistency", su, s.params.conjugacy_tol);

    let p = rec.conjugacy();
    let coh: Vec<cocycle_core::Result<(f64, Point)>> = (0..s.params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&sys, 4, i);
            let z = space.random_point(&mut rng, 4, 8);
            let c = rigidity::verify_cohomology(&sys.a, &sys.b, p, std::slice::from_ref(&z), s.params.tol)?;
            Ok((c.max_residual, z))
        })
        .collect();
    match coh.into_iter().collect::<cocycle_core::Result<Vec<_>>>() {
        Ok(rows) => {
            let (worst, at) = rows
                .into_iter()
                .fold((0.0, None), |(w, at), (r, z)| if r > w || at.is_none() { (r, Some(z)) } else { (w, at) });
            let mut rec = Record::below("cohomology", worst, s.params.tol).with("samples", s.params.samples);
            if let Some(z) = at {
                rec = rec.with("argmax", z);
            }
            report.push(rec);
        }
        Err(e) => report.push(Record::error("cohomology", &e.to_string())),
    }
    Ok(Some(Pipeline { sys, rec: Some(rec) }))
}

fn push_max(report: &mut Report, check: &str, rows: Vec<cocycle_core::Result<f64>>, tol: f64) {
    let n = rows.len();
    match rows.into_iter().collect::<cocycle_core::Result<Vec<f64>>>() {
        Ok(v) => report.push(Record::below(check, v.into_iter().fold(0.0, f64::max), tol).with("samples", n)),
        Err(e) => report.push(Record::error(check, &e.to_string())),
    }
}

pub fn run_reconstruct(s: &Scenario) -> Result<Report, CliError> {
    let mut report = Report::new("reconstruct", s.seed);
    reconstruction_stages(s, &mut report)?;
    Ok(report)
}

/// Everything `reconstruct` checks, plus the closed-orbit identity, the
/// coprime combination, the Lipschitz estimate and, for periodic anchors,
/// the wrap-around consistency.
pub fn run_verify(s: &Scenario) -> Result<Report, CliError> {
    let mut report = Report::new("verify", s.seed);
    let Some(Pipeline { sys, rec: Some(rec) }) = reconstruction_stages(s, &mut report)? else {
        return Ok(report);
    };
    let p = rec.conjugacy();
    let space = &sys.space;

    let mut orbit_points = Vec::new();
    for n in 1..=5usize.min(s.params.max_period) {
        for q in stage("closed-orbit", space.enumerate_periodic(2 * n))? {
            orbit_points.push((q, n));
        }
    }
    let orbit: Vec<cocycle_core::Result<f64>> = orbit_points
        .par_iter()
        .map(|(q, n)| rigidity::closed_orbit_identity(&sys.a, &sys.b, q, *n, Some(p)))
        .collect();
    push_max(&mut report, "closed-orbit", orbit, s.params.periodic_tol);

    let count = s.params.samples.min(100);
    let mut rng = rng_for(&sys, 5, 0);
    let pts: Vec<Point> = (0..count).map(|_| space.random_point(&mut rng, 4, 8)).collect();
    // Premises are checked inside; parallel warm-up of the cache keeps the
    // sequential combination cheap.
    pts.par_iter().for_each(|z| {
        for j in -3..=3 {
            let _ = p.value(&z.shift(j));
        }
    });
    match rigidity::combine_coprime(p, &sys.a, &sys.b, 2, 3, &pts, COMBINATION_TOL) {
        Ok(c) => report.push(
            Record::below("coprime-combination", c.residual, COMBINATION_TOL)
                .with("k", c.k)
                .with("l", c.l)
                .with("premise", crate::report::num(c.premise_residual)),
        ),
        Err(e) => report.push(Record::error("coprime-combination", &e.to_string())),
    }

    if let Reconstruction::Fixed(ev) = &rec {
        match rigidity::lipschitz_estimate(ev, s.params.samples, sys.seeds.get(6)) {
            Ok(l) => report.push(Record::info("lipschitz-estimate", l.l_hat)),
            Err(e) => report.push(Record::error("lipschitz-estimate", &e.to_string())),
        }
    }
    if let Reconstruction::Unwound(u) = &rec {
        let radius = s.params.homoclinic_radius.max(1);
        let wrap: Vec<cocycle_core::Result<f64>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(&sys, 7, i);
                let z = space.random_homoclinic(&mut rng, &sys.anchor, radius)?;
                u.wrap_around_residual(&z)
            })
            .collect();
        push_max(&mut report, "wrap-around", wrap, IDENTITY_TOL);
    }
    Ok(report)
}
