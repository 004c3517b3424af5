//! Stable and unstable holonomies of bunched cocycles.
//!
//! `H^s_{yz} = lim A^n(z)⁻¹ A^n(y)` for `z` in the stable set of `y`, and
//! `H^u_{yz} = lim A^{-n}(z)⁻¹ A^{-n}(y)` along unstable sets. For window
//! generators the limits stabilize after finitely many steps, which the
//! `*_exact` functions exploit as an oracle.

use crate::cocycle::{BunchedCocycle, Cocycle};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symbolic::{Extended, Point};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Iterations beyond this depth are reported as non-convergence.
pub const MAX_DEPTH: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyResult {
    pub matrix: Matrix,
    /// Number of cocycle steps multiplied, including the push-forward.
    pub depth: usize,
    /// Geometric tail estimate `‖last increment‖ / (1 - ratio)` plus a
    /// floating-point allowance for the products involved.
    pub tail_bound: f64,
    pub side: Side,
    /// Norms of the successive increments of the limit loop.
    pub increments: Vec<f64>,
}

/// The Hölder certificate `‖H^s_{yz} - Id‖ ≤ C₄·d(y, z)` on local stable sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyConstants {
    pub c4: f64,
    pub theta: f64,
    /// Contraction rate per cocycle step.
    pub lambda: f64,
    pub c2: f64,
    pub c3: f64,
}

impl HolonomyConstants {
    /// For `y, z` agreeing on coordinates `≥ 0` the `n`-th increment is
    /// `A^n(z)⁻¹ A(Fⁿz)⁻¹ (A(Fⁿy) - A(Fⁿz)) A^n(y)`. Only the first
    /// `J = ⌈m/k⌉` factors of `A^n(y)` and `A^n(z)` can differ, so
    /// `‖A^n(y)‖·‖A^n(z)⁻¹‖ ≤ C₃ (ab)^J e^{nθ}` with `a`, `b` the largest
    /// entry and inverse norms, and `d(Fⁿy, Fⁿz) = e^{-nkλ} d(y, z)`.
    /// Summing the geometric series gives
    /// `C₄ = C₃ (ab)^J · b · C₂ / (1 - e^{θ - kλ})`.
    pub fn for_cocycle(c: &BunchedCocycle) -> Self {
        let (a, b) = c.entry_norm_bounds();
        let c2 = c.lipschitz_constant();
        let c3 = c.c3();
        let j = c.generator().radius().div_ceil(c.step());
        let ratio = c.report().holonomy_ratio();
        let c4 = c3 * (a * b).max(1.0).powi(j as i32) * b * c2 / (1.0 - ratio);
        HolonomyConstants {
            c4,
            theta: c.theta(),
            lambda: c.rate(),
            c2,
            c3,
        }
    }
}

fn stable_index(y: &Point, z: &Point) -> Result<i64> {
    match y.agreement(z).stable_from {
        Extended::NegInfinity => Ok(i64::MIN),
        Extended::Finite(n) => Ok(n),
        Extended::PosInfinity => Err(Error::NotAsymptotic("stable")),
    }
}

fn unstable_index(y: &Point, z: &Point) -> Result<i64> {
    match y.agreement(z).unstable_to {
        Extended::PosInfinity => Ok(i64::MAX),
        Extended::Finite(n) => Ok(n),
        Extended::NegInfinity => Err(Error::NotAsymptotic("unstable")),
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Number of forward steps after which all factors at `y` and `z` coincide.
pub fn stable_exact_depth(c: &Cocycle, y: &Point, z: &Point) -> Result<usize> {
    let n = stable_index(y, z)?;
    if n == i64::MIN {
        return Ok(0);
    }
    let m = c.generator().radius() as i64;
    Ok(div_ceil(n + m, c.step() as i64).max(0) as usize)
}

/// Number of backward steps after which all factors at `y` and `z` coincide.
pub fn unstable_exact_depth(c: &Cocycle, y: &Point, z: &Point) -> Result<usize> {
    let u = unstable_index(y, z)?;
    if u == i64::MAX {
        return Ok(0);
    }
    let m = c.generator().radius() as i64;
    let k = c.step() as i64;
    Ok(div_ceil(m - u - k, k).max(0) as usize)
}

/// The stabilized product `A^N(z)⁻¹ A^N(y)` at the exact depth.
pub fn stable_holonomy_exact(c: &Cocycle, y: &Point, z: &Point) -> Result<Matrix> {
    let n = stable_exact_depth(c, y, z)? as i64;
    Ok(c.iterate_inverse(z, n)? * c.iterate(y, n)?)
}

/// The stabilized product `A^{-N}(z)⁻¹ A^{-N}(y)` at the exact depth.
pub fn unstable_holonomy_exact(c: &Cocycle, y: &Point, z: &Point) -> Result<Matrix> {
    let n = unstable_exact_depth(c, y, z)? as i64;
    Ok(c.iterate_inverse(z, -n)? * c.iterate(y, -n)?)
}

fn roundoff(dim: usize, depth: usize, scale: f64) -> f64 {
    4.0 * f64::EPSILON * (dim * (depth + 2)) as f64 * scale
}

/// Iterative stable holonomy with the geometric stopping rule.
pub fn stable_holonomy(c: &BunchedCocycle, y: &Point, z: &Point, tol: f64) -> Result<HolonomyResult> {
    holonomy(c, y, z, tol, Side::Stable)
}

/// Iterative unstable holonomy, the time reversal of [`stable_holonomy`].
pub fn unstable_holonomy(c: &BunchedCocycle, y: &Point, z: &Point, tol: f64) -> Result<HolonomyResult> {
    holonomy(c, y, z, tol, Side::Unstable)
}

fn holonomy(c: &BunchedCocycle, y: &Point, z: &Point, tol: f64, side: Side) -> Result<HolonomyResult> {
    let dim = c.dim();
    let k = c.step() as i64;
    let m = c.generator().radius();
    // Signed direction of time and the number of steps moving the pair
    // into the local stable (or unstable) set.
    let (dir, push) = match side {
        Side::Stable => {
            let n = stable_index(y, z)?;
            (1i64, if n == i64::MIN { 0 } else { div_ceil(n, k).max(0) })
        }
        Side::Unstable => {
            let u = unstable_index(y, z)?;
            (-1i64, if u == i64::MAX { 0 } else { div_ceil(-u, k).max(0) })
        }
    };
    if y == z {
        return Ok(HolonomyResult {
            matrix: linalg::identity(dim),
            depth: 0,
            tail_bound: 0.0,
            side,
            increments: Vec::new(),
        });
    }
    let ratio = c.report().holonomy_ratio();
    let threshold = tol * (1.0 - ratio);
    // Factors whose windows reach behind the agreement region can coincide
    // by accident, so the loop always runs past them.
    let min_depth = m.div_ceil(c.step()) + 1;

    let y1 = c.advance(y, dir * push);
    let z1 = c.advance(z, dir * push);
    // Along the loop: s = (A^{±n}(z1))⁻¹ A^{±n}(y1) kept as two factors.
    let mut prod_y = linalg::identity(dim);
    let mut prod_z_inv = linalg::identity(dim);
    let mut current = linalg::identity(dim);
    let mut increments = Vec::new();
    let mut n = 0usize;
    loop {
        if n >= MAX_DEPTH {
            return Err(Error::NoConvergence {
                radius: n,
                gap: increments.last().copied().unwrap_or(f64::NAN),
            });
        }
        let j = n as i64;
        match side {
            Side::Stable => {
                prod_y = c.factor(&y1, j) * prod_y;
                prod_z_inv *= c.factor_inverse(&z1, j);
            }
            Side::Unstable => {
                prod_y = c.factor_inverse(&y1, -j - 1) * prod_y;
                prod_z_inv *= c.factor(&z1, -j - 1);
            }
        }
        let next = &prod_z_inv * &prod_y;
        let inc = linalg::op_norm(&(&next - &current));
        increments.push(inc);
        current = next;
        n += 1;
        if inc < threshold && n >= min_depth {
            break;
        }
    }

    let (outer_y, outer_z_inv) = match side {
        Side::Stable => (c.iterate(y, push)?, c.iterate_inverse(z, push)?),
        Side::Unstable => (c.iterate(y, -push)?, c.iterate_inverse(z, -push)?),
    };
    let matrix = &outer_z_inv * &current * &outer_y;
    let depth = push as usize + n;
    let scale = linalg::op_norm(&outer_z_inv)
        * linalg::op_norm(&prod_z_inv)
        * linalg::op_norm(&prod_y)
        * linalg::op_norm(&outer_y);
    let last = *increments.last().expect("loop ran at least once");
    Ok(HolonomyResult {
        matrix,
        depth,
        tail_bound: last / (1.0 - ratio) + roundoff(dim, depth, scale),
        side,
        increments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `‖H_{yz} - H_{xz} H_{yx}‖`.
    pub composition: f64,
    /// `‖H_{Fy,Fz} - A(z) H_{yz} A(y)⁻¹‖`.
    pub equivariance: f64,
    /// `(‖H_{yz} - Id‖, C₄·d(y, z))` when `y, z` lie in the local stable set of `x`.
    pub holder: Option<(f64, f64)>,
}

/// Checks composition, equivariance and the Hölder bound for stable holonomies.
pub fn holonomy_identity_residuals(
    c: &BunchedCocycle,
    constants: &HolonomyConstants,
    x: &Point,
    y: &Point,
    z: &Point,
    tol: f64,
) -> Result<IdentityResiduals> {
    let h_yz = stable_holonomy(c, y, z, tol)?.matrix;
    let h_xz = stable_holonomy(c, x, z, tol)?.matrix;
    let h_yx = stable_holonomy(c, y, x, tol)?.matrix;
    let composition = linalg::distance(&h_yz, &(h_xz * h_yx));

    let h_f = stable_holonomy(c, &c.advance(y, 1), &c.advance(z, 1), tol)?.matrix;
    let pushed = c.factor(z, 0) * &h_yz * c.factor_inverse(y, 0);
    let equivariance = linalg::distance(&h_f, &pushed);

    let local = |p: &Point| x.agreement(p).stable_from <= Extended::Finite(0);
    let holder = (local(y) && local(z)).then(|| {
        (
            linalg::distance(&h_yz, &linalg::identity(c.dim())),
            constants.c4 * c.space().metric(y, z),
        )
    });
    Ok(IdentityResiduals {
        composition,
        equivariance,
        holder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{BunchingMode, WindowGenerator};
    use crate::symbolic::ShiftSpace;
    use std::f64::consts::LN_2;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn bunched(seed: u64, radius: usize) -> BunchedCocycle {
        let s = ShiftSpace::full(2, LN_2).unwrap();
        let g = WindowGenerator::random_near_identity(&s, 2, radius, 0.05, seed).unwrap();
        BunchedCocycle::certify(Cocycle::new(s, g).unwrap(), 8, BunchingMode::Exhaustive).unwrap()
    }

    #[test]
    fn reflexive_and_constant() {
        let c = bunched(1, 1);
        let y = p("(0)*1.01(1)*");
        let r = stable_holonomy(&c, &y, &y, DEFAULT_TOL).unwrap();
        assert_eq!(r.matrix, linalg::identity(2));
        assert_eq!(r.depth, 0);

        let s = ShiftSpace::full(2, LN_2).unwrap();
        let m0 = Matrix::from_row_slice(2, 2, &[1.1, 0.1, 0.0, 0.95]);
        let k = BunchedCocycle::certify(
            Cocycle::new(s.clone(), WindowGenerator::constant(&s, m0).unwrap()).unwrap(),
            8,
            BunchingMode::Exhaustive,
        )
        .unwrap();
        let z = p("(1)*0.11(1)*");
        let r = stable_holonomy(&k, &y, &z, DEFAULT_TOL).unwrap();
        assert!(linalg::distance(&r.matrix, &linalg::identity(2)) < 1e-12);
    }

    #[test]
    fn exact_depth_examples() {
        let c = bunched(2, 0);
        // Agree on coordinates ≥ 3, differ at 2.
        let y = p("(0)*.001(0)*");
        let z = p("(0)*.000(0)*");
        assert_eq!(stable_exact_depth(&c, &y, &z).unwrap(), 3);
        let direct = c.iterate_inverse(&z, 3).unwrap() * c.iterate(&y, 3).unwrap();
        let h = stable_holonomy(&c, &y, &z, DEFAULT_TOL).unwrap();
        assert!(linalg::distance(&h.matrix, &direct) < 1e-12);
        // Agreement on all coordinates ≥ -m gives the identity.
        let w = p("(1)*.0(0)*");
        let v = p("(0)*.0(0)*");
        assert_eq!(stable_exact_depth(&c, &w, &v).unwrap(), 0);
        assert!(stable_holonomy(&c, &y, &p("(0)*.(1)*"), DEFAULT_TOL).is_err());
    }

    #[test]
    fn unstable_mirrors_stable() {
        let c = bunched(3, 1);
        let y = p("(1)*1.01(0)*");
        let z = p("(1)*.101(0)*");
        let h = unstable_holonomy(&c, &y, &z, DEFAULT_TOL).unwrap();
        let e = unstable_holonomy_exact(&c, &y, &z).unwrap();
        assert!(linalg::distance(&h.matrix, &e) <= h.tail_bound.max(1e-12));
        let back = unstable_holonomy(&c, &z, &y, DEFAULT_TOL).unwrap();
        assert!(linalg::distance(&(&h.matrix * &back.matrix), &linalg::identity(2)) < 1e-10);
    }

    #[test]
    fn identities_on_a_triple() {
        let c = bunched(4, 1);
        let k = HolonomyConstants::for_cocycle(&c);
        assert!(k.c4.is_finite() && k.c4 > 0.0);
        let x = p("(0)*.0110(0)*");
        let y = p("(1)*10.0110(0)*");
        let z = p("(0)*01.0110(0)*");
        let r = holonomy_identity_residuals(&c, &k, &x, &y, &z, DEFAULT_TOL).unwrap();
        assert!(r.composition < 1e-12 && r.equivariance < 1e-12);
        let (lhs, rhs) = r.holder.unwrap();
        assert!(lhs <= rhs, "{lhs} > {rhs}");
    }
}
