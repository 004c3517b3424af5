//! Reconstruction of a conjugacy from periodic data.
//!
//! Given cocycles `A`, `B` with matching periodic data, a fixed point `x`
//! and a value `C = P(x)`, the conjugacy on the homoclinic class of `x` is
//! `P(y) = H^{s,A}_{xy} · C · H^{s,B}_{yx}`; it extends to every point by
//! approximating with homoclinic points. Points without a fixed anchor go
//! through an induced power over a periodic point and are unwound along
//! the orbit.

use std::collections::HashMap;
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{BunchedCocycle, Cocycle, WindowGenerator};
use crate::error::{Error, Result};
use crate::holonomy::{self, DEFAULT_TOL};
use crate::linalg::{self, Matrix};
use crate::symbolic::{Point, ShiftSpace};

/// Tolerance for the one-step identity and for extension convergence.
pub const CONJUGACY_TOL: f64 = 1e-8;

/// Tolerance for end-to-end cohomology residuals.
pub const END_TO_END_TOL: f64 = 1e-6;

pub const DEFAULT_RADIUS_SCHEDULE: [usize; 6] = [2, 4, 8, 16, 32, 64];

/// Anything that can be evaluated as a candidate conjugacy `P: M → GL(d)`.
pub trait Conjugacy: Sync {
    fn value(&self, x: &Point) -> Result<Matrix>;
}

impl Conjugacy for WindowGenerator {
    fn value(&self, x: &Point) -> Result<Matrix> {
        Ok(self.at(x, 0).clone())
    }
}

/// The constant identity conjugacy.
#[derive(Debug, Clone, Copy)]
pub struct IdentityConjugacy(pub usize);

impl Conjugacy for IdentityConjugacy {
    fn value(&self, _: &Point) -> Result<Matrix> {
        Ok(linalg::identity(self.0))
    }
}

/// The cocycle `P(f(x))⁻¹ A(x) P(x)`, cohomologous to `A` through `P`.
pub fn cohomologous_partner(a: &Cocycle, p: &WindowGenerator) -> Result<Cocycle> {
    a.twist(&p.inverse(a.space())?)
}

/// `x ↦ P(x)·P(anchor)⁻¹`, the same conjugacy class normalized to the identity at `anchor`.
pub fn normalized_at(space: &ShiftSpace, p: &WindowGenerator, anchor: &Point) -> Result<WindowGenerator> {
    let fix = p.inverse_at(anchor, 0).clone();
    p.map(space, |_, m| m * &fix)
}

/// The lexicographically smallest fixed point of the space.
pub fn default_anchor(space: &ShiftSpace) -> Point {
    space
        .fixed_points()
        .into_iter()
        .min()
        .expect("validated spaces have a fixed point")
}

fn check_pair(a: &Cocycle, b: &Cocycle) -> Result<()> {
    if a.dim() != b.dim() || a.step() != b.step() || a.space() != b.space() {
        return Err(Error::Incompatible("cocycles differ in dimension, step or base space".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFailure {
    pub point: Point,
    pub period: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PeriodicDataReport {
    pub max_period: usize,
    pub matched: bool,
    pub witness_q: Option<WindowGenerator>,
    pub failures: Vec<PeriodicFailure>,
    /// Number of (point, period) pairs examined.
    pub checked: usize,
    pub max_residual: f64,
    /// Largest disagreement between the direct and the twisted-`B` evaluation.
    pub path_gap: f64,
}

impl PeriodicDataReport {
    pub fn min_failing_residual(&self) -> Option<f64> {
        self.failures.iter().map(|f| f.residual).reduce(f64::min)
    }
}

/// Compares `Aⁿ(p)` with `Q(p) Bⁿ(p) Q(p)⁻¹` at every `p` with `Fⁿ(p) = p`.
pub fn periodic_data_check(
    a: &Cocycle,
    b: &Cocycle,
    max_period: usize,
    q: Option<&WindowGenerator>,
    tol: f64,
) -> Result<PeriodicDataReport> {
    check_pair(a, b)?;
    let twisted = q.map(|q| b.twist(q)).transpose()?;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut max_residual: f64 = 0.0;
    let mut path_gap: f64 = 0.0;
    for n in 1..=max_period {
        for p in a.space().enumerate_periodic(n * a.step())? {
            let an = a.iterate(&p, n as i64)?;
            let bn = b.iterate(&p, n as i64)?;
            let residual = match (q, &twisted) {
                (Some(q), Some(tw)) => {
                    let direct = linalg::distance(&an, &(q.at(&p, 0) * &bn * q.inverse_at(&p, 0)));
                    let via_twist = linalg::distance(&an, &tw.iterate(&p, n as i64)?);
                    path_gap = path_gap.max((direct - via_twist).abs());
                    direct.max(via_twist)
                }
                _ => linalg::distance(&an, &bn),
            };
            checked += 1;
            max_residual = max_residual.max(residual);
            if !(residual < tol) {
                failures.push(PeriodicFailure {
                    point: p,
                    period: n,
                    residual,
                });
            }
        }
    }
    Ok(PeriodicDataReport {
        max_period,
        matched: failures.is_empty(),
        witness_q: q.cloned(),
        failures,
        checked,
        max_residual,
        path_gap,
    })
}

/// `P(y) = H^{s,A}_{xy} · C · H^{s,B}_{yx}` on the homoclinic class of a fixed anchor `x`.
#[derive(Debug)]
pub struct ConjugacyEvaluator {
    a: BunchedCocycle,
    b: BunchedCocycle,
    anchor: Point,
    anchor_value: Matrix,
    tol: f64,
    extension_tol: f64,
    schedule: Vec<usize>,
    cache: RwLock<HashMap<Point, Matrix>>,
}

impl ConjugacyEvaluator {
    /// Anchors with `P(x) = Id`, which requires `A(x) = B(x)`.
    pub fn new(a: BunchedCocycle, b: BunchedCocycle, anchor: Point, tol: f64) -> Result<Self> {
        let id = linalg::identity(a.dim());
        Self::with_anchor_value(a, b, anchor, id, tol)
    }

    /// Anchors with `P(x) = C`; requires `C·B(x)·C⁻¹ = A(x)`.
    pub fn with_anchor_value(a: BunchedCocycle, b: BunchedCocycle, anchor: Point, c: Matrix, tol: f64) -> Result<Self> {
        check_pair(&a, &b)?;
        a.space().validate(&anchor)?;
        if a.advance(&anchor, 1) != anchor {
            return Err(Error::NotPeriodic(a.step() as i64));
        }
        let c_inv = linalg::inverse(&c)?;
        let ax = a.evaluate(&anchor);
        let gap = linalg::relative_distance(&ax, &(&c * b.evaluate(&anchor) * &c_inv));
        if gap > CONJUGACY_TOL {
            return Err(Error::AnchorMismatch(gap));
        }
        Ok(ConjugacyEvaluator {
            a,
            b,
            anchor,
            anchor_value: c,
            tol,
            extension_tol: CONJUGACY_TOL,
            schedule: DEFAULT_RADIUS_SCHEDULE.to_vec(),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_extension(mut self, tol: f64, schedule: Vec<usize>) -> Self {
        self.extension_tol = tol;
        self.schedule = schedule;
        self
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn a(&self) -> &BunchedCocycle {
        &self.a
    }

    pub fn b(&self) -> &BunchedCocycle {
        &self.b
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn cached(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    fn require_homoclinic(&self, y: &Point) -> Result<()> {
        self.a.space().validate(y)?;
        if !self.anchor.agreement(y).homoclinic() {
            return Err(Error::NotAsymptotic("homoclinic"));
        }
        Ok(())
    }

    pub fn conjugacy_at_homoclinic(&self, y: &Point) -> Result<Matrix> {
        self.require_homoclinic(y)?;
        if *y == self.anchor {
            return Ok(self.anchor_value.clone());
        }
        if let Some(v) = self.cache.read().expect("cache lock").get(y) {
            return Ok(v.clone());
        }
        let ha = holonomy::stable_holonomy(&self.a, &self.anchor, y, self.tol)?.matrix;
        let hb = holonomy::stable_holonomy(&self.b, y, &self.anchor, self.tol)?.matrix;
        let value = ha * &self.anchor_value * hb;
        self.cache
            .write()
            .expect("cache lock")
            .insert(y.clone(), value.clone());
        Ok(value)
    }

    /// `‖H^{s,A}_{xy} C H^{s,B}_{yx} - H^{u,A}_{xy} C H^{u,B}_{yx}‖`.
    pub fn su_consistency(&self, y: &Point) -> Result<f64> {
        self.require_homoclinic(y)?;
        let s = self.conjugacy_at_homoclinic(y)?;
        let ha = holonomy::unstable_holonomy(&self.a, &self.anchor, y, self.tol)?.matrix;
        let hb = holonomy::unstable_holonomy(&self.b, y, &self.anchor, self.tol)?.matrix;
        Ok(linalg::distance(&s, &(ha * &self.anchor_value * hb)))
    }

    /// `P(z)` as the limit over homoclinic approximants of increasing radius.
    pub fn conjugacy_extended(&self, z: &Point) -> Result<Matrix> {
        self.conjugacy_extended_with(z, &self.schedule)
    }

    pub fn conjugacy_extended_with(&self, z: &Point, schedule: &[usize]) -> Result<Matrix> {
        self.a.space().validate(z)?;
        if self.anchor.agreement(z).homoclinic() {
            return self.conjugacy_at_homoclinic(z);
        }
        let mut previous: Option<Matrix> = None;
        let mut gap = f64::INFINITY;
        for &r in schedule {
            let y = self.a.space().homoclinic_approximant(z, &self.anchor, r)?;
            let value = self.conjugacy_at_homoclinic(&y)?;
            if let Some(prev) = &previous {
                gap = linalg::distance(prev, &value);
                if gap < self.extension_tol {
                    return Ok(value);
                }
            }
            previous = Some(value);
        }
        Err(Error::NoConvergence {
            radius: schedule.last().copied().unwrap_or(0),
            gap,
        })
    }
}

impl Conjugacy for ConjugacyEvaluator {
    fn value(&self, x: &Point) -> Result<Matrix> {
        self.conjugacy_extended(x)
    }
}

/// Empirical Lipschitz ratio of `P` over random nearby homoclinic pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    pub l_hat: f64,
    pub max_pair: Option<(Point, Point)>,
}

/// `max ‖P(y) - P(z)‖ / d(y, z)` over seeded pairs `y, z` of homoclinic
/// points differing in one far coordinate.
pub fn lipschitz_estimate(ev: &ConjugacyEvaluator, samples: usize, seed: u64) -> Result<LipschitzEstimate> {
    let space = ev.a.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = LipschitzEstimate {
        l_hat: 0.0,
        max_pair: None,
    };
    let mut taken = 0;
    while taken < samples {
        let radius = rng.random_range(1..=4);
        let y = space.random_homoclinic(&mut rng, &ev.anchor, radius)?;
        let reach = rng.random_range(1..=10i64);
        let at = if rng.random_bool(0.5) { reach } else { -reach };
        let symbol = rng.random_range(0..space.alphabet()) as crate::symbolic::Symbol;
        let z = Point::overlay(&y, at, &[symbol]);
        if z == y || space.validate(&z).is_err() {
            continue;
        }
        taken += 1;
        let ratio = linalg::distance(&ev.conjugacy_at_homoclinic(&y)?, &ev.conjugacy_at_homoclinic(&z)?)
            / space.metric(&y, &z);
        if ratio > best.l_hat || best.max_pair.is_none() {
            best = LipschitzEstimate {
                l_hat: ratio,
                max_pair: Some((y, z)),
            };
        }
    }
    Ok(best)
}

/// `‖(A^{-n}p)⁻¹ W B^{-n}p - (Aⁿp)⁻¹ W Bⁿp‖` at a point with `F^{2n}(p) = p`,
/// where `W = Q(Fⁿp)` for a witness conjugacy `Q` and `W = Id` otherwise.
/// Both sides equal `Q(p)` when `Q` conjugates `A` to `B`.
pub fn closed_orbit_identity(
    a: &Cocycle,
    b: &Cocycle,
    p: &Point,
    n: usize,
    witness: Option<&dyn Conjugacy>,
) -> Result<f64> {
    check_pair(a, b)?;
    let n = n as i64;
    if n == 0 || a.advance(p, 2 * n) != *p {
        return Err(Error::NotPeriodic(2 * n));
    }
    let w = match witness {
        Some(q) => q.value(&a.advance(p, n))?,
        None => linalg::identity(a.dim()),
    };
    let back = a.iterate_inverse(p, -n)? * &w * b.iterate(p, -n)?;
    let forth = a.iterate_inverse(p, n)? * &w * b.iterate(p, n)?;
    Ok(linalg::distance(&back, &forth))
}

/// Largest relative residual `‖A(z) - P(f z) B(z) P(z)⁻¹‖ / ‖A(z)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyCheck {
    pub max_residual: f64,
    pub argmax: Option<Point>,
    pub passed: bool,
}

fn one_step_residual(a: &Cocycle, b: &Cocycle, p: &dyn Conjugacy, z: &Point) -> Result<f64> {
    let lhs = a.evaluate(z);
    let pz_inv = linalg::inverse(&p.value(z)?)?;
    let rhs = p.value(&a.advance(z, 1))? * b.evaluate(z) * pz_inv;
    Ok(linalg::relative_distance(&lhs, &rhs))
}

pub fn verify_cohomology(a: &Cocycle, b: &Cocycle, p: &dyn Conjugacy, samples: &[Point], tol: f64) -> Result<CohomologyCheck> {
    check_pair(a, b)?;
    let mut check = CohomologyCheck {
        max_residual: 0.0,
        argmax: None,
        passed: true,
    };
    for z in samples {
        let r = one_step_residual(a, b, p, z)?;
        if r > check.max_residual || check.argmax.is_none() {
            check.max_residual = r;
            check.argmax = Some(z.clone());
        }
    }
    check.passed = check.max_residual < tol;
    Ok(check)
}

/// Bezout coefficients `(k, l)` with `mk + nl = 1` and `|k|` minimal
/// (positive `k` on ties).
pub fn bezout(m: i64, n: i64) -> Result<(i64, i64)> {
    fn ext(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, x, y) = ext(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }
    if m <= 0 || n <= 0 {
        return Err(Error::NotCoprime { m, n });
    }
    let (g, k0, _) = ext(m, n);
    if g != 1 {
        return Err(Error::NotCoprime { m, n });
    }
    // Solutions are k0 + n t; pick the one closest to zero.
    let mut k = k0.rem_euclid(n);
    if k > n - k {
        k -= n;
    }
    let l = (1 - m * k) / n;
    Ok((k, l))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoprimeCombination {
    pub k: i64,
    pub l: i64,
    pub premise_residual: f64,
    pub residual: f64,
}

fn power_residual(a: &Cocycle, b: &Cocycle, p: &dyn Conjugacy, y: &Point, s: i64) -> Result<f64> {
    let lhs = a.iterate(y, s)?;
    let rhs = p.value(&a.advance(y, s))? * b.iterate(y, s)? * linalg::inverse(&p.value(y)?)?;
    Ok(linalg::relative_distance(&lhs, &rhs))
}

/// Assembles `A(y)` from `k` blocks of `A^{±m}` and `l` blocks of `A^{±n}`,
/// replacing every block by `P(f^s w) B^s(w) P(w)⁻¹`, and compares the
/// telescoped product with `A(y)` and with `P(f y) B(y) P(y)⁻¹`.
pub fn combine_coprime(
    p: &dyn Conjugacy,
    a: &Cocycle,
    b: &Cocycle,
    m: i64,
    n: i64,
    samples: &[Point],
    tol: f64,
) -> Result<CoprimeCombination> {
    check_pair(a, b)?;
    let (k, l) = bezout(m, n)?;
    let mut premise_residual: f64 = 0.0;
    for y in samples {
        for s in [m, n] {
            let r = power_residual(a, b, p, y, s)?;
            if !(r < tol) {
                return Err(Error::PremiseViolated { power: s, residual: r });
            }
            premise_residual = premise_residual.max(r);
        }
    }
    let blocks: Vec<i64> = std::iter::repeat_n(m * k.signum(), k.unsigned_abs() as usize)
        .chain(std::iter::repeat_n(n * l.signum(), l.unsigned_abs() as usize))
        .collect();
    let mut residual: f64 = 0.0;
    for y in samples {
        let mut chain = linalg::identity(a.dim());
        let mut w = y.clone();
        for &s in &blocks {
            let next = a.advance(&w, s);
            let block = p.value(&next)? * b.iterate(&w, s)? * linalg::inverse(&p.value(&w)?)?;
            chain = block * chain;
            w = next;
        }
        let ay = a.evaluate(y);
        let conj = p.value(&a.advance(y, 1))? * b.evaluate(y) * linalg::inverse(&p.value(y)?)?;
        residual = residual
            .max(linalg::relative_distance(&ay, &chain))
            .max(linalg::relative_distance(&conj, &chain));
    }
    Ok(CoprimeCombination {
        k,
        l,
        premise_residual,
        residual,
    })
}

/// `P(fʲ z) = Aʲ(z) P₁(z) Bʲ(z)⁻¹`, where `P₁` conjugates the induced
/// powers over `F = f^{n₀}` and is anchored at an `n₀`-periodic point.
#[derive(Debug)]
pub struct UnwoundConjugacy {
    a: Cocycle,
    b: Cocycle,
    induced: ConjugacyEvaluator,
    period: usize,
}

impl UnwoundConjugacy {
    pub fn induced(&self) -> &ConjugacyEvaluator {
        &self.induced
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// The orbit index `j` with `x ∈ W(fʲ p)`, when there is one.
    pub fn branch(&self, x: &Point) -> Option<usize> {
        let p = self.induced.anchor();
        (0..self.period).find(|&j| p.shift(j as i64).agreement(x).homoclinic())
    }

    /// `P(f^{n₀} z)` as `P₁(F z)` and through the one-step chain from `z`.
    pub fn wrap_around_residual(&self, z: &Point) -> Result<f64> {
        let direct = self.induced.conjugacy_extended(&z.shift(self.period as i64))?;
        let mut chained = self.induced.conjugacy_extended(z)?;
        for j in 0..self.period as i64 {
            let w = z.shift(j);
            chained = self.a.evaluate(&w) * chained * self.b.generator().inverse_at(&w, 0);
        }
        Ok(linalg::distance(&direct, &chained))
    }
}

impl Conjugacy for UnwoundConjugacy {
    fn value(&self, x: &Point) -> Result<Matrix> {
        let j = self.branch(x).unwrap_or(0) as i64;
        let z = x.shift(-j);
        let p1 = self.induced.conjugacy_extended(&z)?;
        Ok(self.a.iterate(&z, j)? * p1 * self.b.iterate_inverse(&z, j)?)
    }
}

/// Builds the induced pipeline over `F = f^{n₀}` anchored at `p` and unwinds it.
pub fn reduce_to_fixed_point(
    a: &BunchedCocycle,
    b: &BunchedCocycle,
    p: &Point,
    n0: usize,
    tol: f64,
) -> Result<UnwoundConjugacy> {
    check_pair(a, b)?;
    if a.step() != 1 {
        return Err(Error::Incompatible("period reduction starts from cocycles over f".into()));
    }
    if n0 == 0 || p.shift(n0 as i64) != *p {
        return Err(Error::NotPeriodic(n0 as i64));
    }
    let induced = ConjugacyEvaluator::new(a.induced_power(n0)?, b.induced_power(n0)?, p.clone(), tol)?;
    Ok(UnwoundConjugacy {
        a: a.cocycle().clone(),
        b: b.cocycle().clone(),
        induced,
        period: n0,
    })
}

/// Default holonomy tolerance re-exported for callers assembling evaluators.
pub const HOLONOMY_TOL: f64 = DEFAULT_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::BunchingMode;
    use std::f64::consts::LN_2;

    fn pair(seed: u64) -> (BunchedCocycle, BunchedCocycle, WindowGenerator) {
        let s = ShiftSpace::full(2, LN_2).unwrap();
        let a = Cocycle::new(s.clone(), WindowGenerator::random_near_identity(&s, 2, 1, 0.05, seed).unwrap()).unwrap();
        let anchor = default_anchor(&s);
        let raw = WindowGenerator::random_near_identity(&s, 2, 1, 0.3, seed + 1000).unwrap();
        let p = normalized_at(&s, &raw, &anchor).unwrap();
        let b = cohomologous_partner(&a, &p).unwrap();
        let a = BunchedCocycle::certify(a, 8, BunchingMode::Exhaustive).unwrap();
        let b = BunchedCocycle::certify(b, 8, BunchingMode::Exhaustive).unwrap();
        (a, b, p)
    }

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout(1, 1).unwrap(), (0, 1));
        assert_eq!(bezout(2, 3).unwrap(), (-1, 1));
        assert_eq!(bezout(3, 2).unwrap(), (1, -1));
        assert_eq!(bezout(5, 7).unwrap(), (3, -2));
        assert!(matches!(bezout(4, 6), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn periodic_check_with_and_without_witness() {
        let (a, b, p) = pair(1);
        let r = periodic_data_check(&a, &b, 4, Some(&p), 1e-10).unwrap();
        assert!(r.matched, "{:?}", r.failures.first());
        assert!(r.path_gap < 1e-12);
        let same = periodic_data_check(&a, &a, 4, None, 1e-10).unwrap();
        assert!(same.matched && same.max_residual == 0.0);
    }

    #[test]
    fn reconstruction_on_homoclinic_points() {
        let (a, b, p) = pair(2);
        let anchor = default_anchor(a.space());
        let ev = ConjugacyEvaluator::new(a.clone(), b.clone(), anchor.clone(), HOLONOMY_TOL).unwrap();
        assert_eq!(ev.conjugacy_at_homoclinic(&anchor).unwrap(), linalg::identity(2));
        for lit in ["(0)*1.01(0)*", "(0)*.1101(0)*", "(0)*111.(0)*"] {
            let y = pt(lit);
            let v = ev.conjugacy_at_homoclinic(&y).unwrap();
            assert!(linalg::distance(&v, p.at(&y, 0)) < 1e-10);
            assert!(ev.su_consistency(&y).unwrap() < 1e-10);
        }
        let z = pt("(01)*.(1)*");
        assert!(linalg::distance(&ev.conjugacy_extended(&z).unwrap(), p.at(&z, 0)) < 1e-9);
        assert!(ev.conjugacy_at_homoclinic(&z).is_err());
    }

    #[test]
    fn anchor_mismatch_detected() {
        let s = ShiftSpace::full(2, LN_2).unwrap();
        let (a, _, _) = pair(3);
        let raw = WindowGenerator::random_near_identity(&s, 2, 1, 0.3, 77).unwrap();
        let b = BunchedCocycle::certify(cohomologous_partner(&a, &raw).unwrap(), 8, BunchingMode::Exhaustive).unwrap();
        let anchor = default_anchor(&s);
        assert!(matches!(
            ConjugacyEvaluator::new(a.clone(), b.clone(), anchor.clone(), HOLONOMY_TOL),
            Err(Error::AnchorMismatch(_))
        ));
        let c = raw.at(&anchor, 0).clone();
        assert!(ConjugacyEvaluator::with_anchor_value(a, b, anchor, c, HOLONOMY_TOL).is_ok());
    }

    #[test]
    fn closed_orbit_examples() {
        let (a, b, p) = pair(4);
        let q = pt("(0011)*.(0011)*");
        assert!(closed_orbit_identity(&a, &a, &q, 2, None).unwrap() < 1e-12);
        assert!(closed_orbit_identity(&a, &b, &q, 2, Some(&p)).unwrap() < 1e-10);
        assert!(closed_orbit_identity(&a, &b, &pt("(001)*.(001)*"), 1, None).is_err());
    }

    #[test]
    fn coprime_combination() {
        let (a, b, p) = pair(5);
        let pts = [pt("(0)*1.01(1)*"), pt("(01)*.1(0)*")];
        let r = combine_coprime(&p, &a, &b, 2, 3, &pts, 1e-9).unwrap();
        assert_eq!((r.k, r.l), (-1, 1));
        assert!(r.residual < 1e-12);
        let swapped = combine_coprime(&p, &a, &b, 3, 2, &pts, 1e-9).unwrap();
        assert!((swapped.residual - r.residual).abs() < 1e-12);
        assert!(matches!(
            combine_coprime(&IdentityConjugacy(2), &a, &b, 2, 3, &pts, 1e-9),
            Err(Error::PremiseViolated { .. })
        ));
    }
}
