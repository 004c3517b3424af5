#![allow(dead_code)]

use std::f64::consts::LN_2;

use cocycle_core::cocycle::{BunchedCocycle, BunchingMode, Cocycle, WindowGenerator};
use cocycle_core::rigidity::{cohomologous_partner, normalized_at};
use cocycle_core::{Point, ShiftSpace};

pub fn full(k: usize) -> ShiftSpace {
    ShiftSpace::full(k, LN_2).unwrap()
}

pub fn pt(s: &str) -> Point {
    s.parse().unwrap()
}

pub fn bunched(space: &ShiftSpace, dim: usize, radius: usize, scale: f64, seed: u64) -> BunchedCocycle {
    let g = WindowGenerator::random_near_identity(space, dim, radius, scale, seed).unwrap();
    certify(Cocycle::new(space.clone(), g).unwrap())
}

pub fn certify(c: Cocycle) -> BunchedCocycle {
    let h = c.affordable_horizon(8, 1 << 13);
    BunchedCocycle::certify(c, h, BunchingMode::Exhaustive).unwrap()
}

/// `(A, B, P)` with `A = P(f)·B·P⁻¹` and `P(anchor) = Id`.
pub fn matched_pair(space: &ShiftSpace, anchor: &Point, seed: u64) -> (BunchedCocycle, BunchedCocycle, WindowGenerator) {
    let a = bunched(space, 2, 1, 0.05, seed);
    let raw = WindowGenerator::random_near_identity(space, 2, 1, 0.3, seed ^ 0x9e37).unwrap();
    let p = normalized_at(space, &raw, anchor).unwrap();
    let b = cohomologous_partner(a.cocycle(), &p).unwrap();
    let b = certify(b);
    (a, b, p)
}
