//! The shift map on a full shift or a mixing subshift of finite type.

use rand::Rng;

use super::point::{Agreement, Point, Symbol, MAX_ALPHABET};
use crate::error::{Error, Result};

/// Default cap on the number of words any enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

/// Constants of the closing construction.
///
/// If `d(fⁿz, z) < epsilon0` then the periodic point `p` built by
/// [`ShiftSpace::closing`] satisfies
/// `d(fʲz, fʲp) ≤ c5 · e^{-rate·min(j, n-j)} · d(fⁿz, z)` for `0 ≤ j ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosingConstants {
    pub epsilon0: f64,
    pub c5: f64,
    pub rate: f64,
}

/// Hyperbolicity constants of the shift with the exponential metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicConstants {
    pub c1: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpace {
    alphabet: usize,
    transition: Option<Vec<Vec<bool>>>,
    lambda: f64,
    enumeration_cap: u128,
}

impl ShiftSpace {
    /// The full shift on `alphabet` symbols with metric rate `lambda`.
    pub fn full(alphabet: usize, lambda: f64) -> Result<Self> {
        Self::build(alphabet, None, lambda)
    }

    /// The subshift of finite type with the given 0/1 transition matrix.
    ///
    /// The matrix must have no stranded symbols, be primitive (some power
    /// strictly positive) and admit a fixed point.
    pub fn subshift(transition: Vec<Vec<bool>>, lambda: f64) -> Result<Self> {
        let k = transition.len();
        Self::build(k, Some(transition), lambda)
    }

    fn build(alphabet: usize, transition: Option<Vec<Vec<bool>>>, lambda: f64) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&alphabet) {
            return Err(Error::InvalidSpace(format!(
                "alphabet size {alphabet} outside 2..={MAX_ALPHABET}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidSpace(format!("metric rate {lambda} must be positive")));
        }
        if let Some(t) = &transition {
            validate_transition(t)?;
        }
        Ok(ShiftSpace {
            alphabet,
            transition,
            lambda,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    pub fn with_enumeration_cap(mut self, cap: u128) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn transition(&self) -> Option<&[Vec<bool>]> {
        self.transition.as_deref()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn enumeration_cap(&self) -> u128 {
        self.enumeration_cap
    }

    /// `e^{-λ}`: the contraction factor per step.
    pub fn contraction(&self) -> f64 {
        (-self.lambda).exp()
    }

    pub fn hyperbolic_constants(&self) -> HyperbolicConstants {
        HyperbolicConstants {
            c1: 1.0,
            lambda: self.lambda,
            epsilon: 0.5,
            tau: self.contraction(),
        }
    }

    pub fn tau(&self) -> f64 {
        self.contraction()
    }

    pub fn closing_constants(&self) -> ClosingConstants {
        let q = self.contraction();
        ClosingConstants {
            epsilon0: q,
            c5: (1.0 / q).max(2.0) / (1.0 - q),
            rate: self.lambda,
        }
    }

    pub fn admissible_pair(&self, a: Symbol, b: Symbol) -> bool {
        match &self.transition {
            None => true,
            Some(t) => t[a as usize][b as usize],
        }
    }

    pub fn admissible_word(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&s| (s as usize) < self.alphabet)
            && word.windows(2).all(|w| self.admissible_pair(w[0], w[1]))
    }

    /// Checks that every symbol is in range and every adjacent pair allowed.
    pub fn validate(&self, x: &Point) -> Result<()> {
        if x.max_symbol() as usize >= self.alphabet {
            return Err(Error::InvalidPoint(format!(
                "{x} uses a symbol outside an alphabet of size {}",
                self.alphabet
            )));
        }
        if self.transition.is_some() {
            for n in x.pair_window() {
                let (a, b) = (x.at(n), x.at(n + 1));
                if !self.admissible_pair(a, b) {
                    return Err(Error::Inadmissible(vec![a, b]));
                }
            }
        }
        Ok(())
    }

    /// `fˢᵗᵉᵖˢ(x)`.
    pub fn shift(&self, x: &Point, steps: i64) -> Point {
        x.shift(steps)
    }

    /// `d(x, y) = ∑ₙ e^{-λ|n|} [xₙ ≠ yₙ]`, summed exactly.
    pub fn metric(&self, x: &Point, y: &Point) -> f64 {
        x.disagreement_series(y, self.contraction())
    }

    pub fn agreement_range(&self, x: &Point, y: &Point) -> Agreement {
        x.agreement(y)
    }

    /// `[x, y]`: the future of `x` spliced onto the past of `y`.
    pub fn bracket(&self, x: &Point, y: &Point) -> Result<Point> {
        let distance = self.metric(x, y);
        let tau = self.tau();
        if distance >= tau {
            return Err(Error::BracketUndefined { distance, tau });
        }
        Ok(Point::splice(y, x, 0))
    }

    /// Periodic point shadowing the almost-closed orbit segment `z, …, fⁿz`.
    pub fn closing(&self, z: &Point, n: usize) -> Result<Point> {
        if n == 0 {
            return Err(Error::InvalidPoint("closing needs n ≥ 1".into()));
        }
        let distance = self.metric(&z.shift(n as i64), z);
        let epsilon0 = self.closing_constants().epsilon0;
        if distance >= epsilon0 {
            return Err(Error::NotRecurrent { distance, epsilon0 });
        }
        let word = z.word(0, n);
        if !self.admissible_word(&word) || !self.admissible_pair(word[n - 1], word[0]) {
            return Err(Error::Inadmissible(word));
        }
        Point::periodic(&word)
    }

    /// Number of points with `fⁿ(p) = p`, i.e. `trace(Tⁿ)`.
    pub fn periodic_count(&self, n: usize) -> u128 {
        let k = self.alphabet;
        match &self.transition {
            None => (k as u128).saturating_pow(n as u32),
            Some(t) => {
                let base: Vec<Vec<u128>> = t
                    .iter()
                    .map(|row| row.iter().map(|&b| b as u128).collect())
                    .collect();
                let mut acc = identity_u128(k);
                for _ in 0..n {
                    acc = mul_u128(&acc, &base);
                }
                (0..k).map(|i| acc[i][i]).sum()
            }
        }
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        let requested = (self.alphabet as u128).saturating_pow(n as u32);
        if requested > self.enumeration_cap {
            return Err(Error::CapExceeded {
                requested,
                cap: self.enumeration_cap,
            });
        }
        Ok(())
    }

    /// All admissible words of length `len`, in lexicographic order.
    pub fn words(&self, len: usize) -> Result<Vec<Vec<Symbol>>> {
        self.check_cap(len)?;
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(len);
        self.extend_words(&mut word, len, &mut |w| out.push(w.to_vec()));
        Ok(out)
    }

    fn extend_words(&self, word: &mut Vec<Symbol>, len: usize, emit: &mut dyn FnMut(&[Symbol])) {
        if word.len() == len {
            emit(word);
            return;
        }
        for s in 0..self.alphabet as Symbol {
            if word.last().is_none_or(|&prev| self.admissible_pair(prev, s)) {
                word.push(s);
                self.extend_words(word, len, emit);
                word.pop();
            }
        }
    }

    /// Every point with `fⁿ(p) = p`, ordered by the word `p₀ … p_{n-1}`.
    pub fn enumerate_periodic(&self, n: usize) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::InvalidPoint("period must be at least 1".into()));
        }
        let mut out = Vec::new();
        for w in self.words(n)? {
            if self.admissible_pair(w[n - 1], w[0]) {
                out.push(Point::periodic(&w)?);
            }
        }
        Ok(out)
    }

    /// Fixed points (constant sequences), smallest symbol first.
    pub fn fixed_points(&self) -> Vec<Point> {
        (0..self.alphabet as Symbol)
            .filter(|&a| self.admissible_pair(a, a))
            .map(Point::constant)
            .collect()
    }

    /// A word `w` of length `len` with `from → w → to` admissible.
    pub fn connecting_word(&self, from: Symbol, to: Symbol, len: usize) -> Option<Vec<Symbol>> {
        let k = self.alphabet;
        if len == 0 {
            return self.admissible_pair(from, to).then(Vec::new);
        }
        // layers[i][s]: s reachable at position i of the word.
        let mut layers = vec![vec![false; k]; len];
        for s in 0..k {
            layers[0][s] = self.admissible_pair(from, s as Symbol);
        }
        for i in 1..len {
            for s in 0..k {
                layers[i][s] = (0..k).any(|r| layers[i - 1][r] && self.admissible_pair(r as Symbol, s as Symbol));
            }
        }
        let mut next = to;
        let mut word = vec![0; len];
        for i in (0..len).rev() {
            let s = (0..k).find(|&s| layers[i][s] && self.admissible_pair(s as Symbol, next))?;
            word[i] = s as Symbol;
            next = s as Symbol;
        }
        Some(word)
    }

    fn connection_cap(&self) -> usize {
        self.alphabet * self.alphabet + 1
    }

    /// `anchor` with `window` written at coordinates `from ..`, joined to the
    /// anchor's tails by the shortest admissible connecting words.
    pub fn splice_into(&self, anchor: &Point, from: i64, window: &[Symbol]) -> Result<Point> {
        if window.is_empty() {
            return Ok(anchor.clone());
        }
        if !self.admissible_word(window) {
            return Err(Error::Inadmissible(window.to_vec()));
        }
        let to = from + window.len() as i64;
        let cap = self.connection_cap();
        let (left_len, left_word) = (0..=cap)
            .find_map(|len| {
                let before = anchor.at(from - len as i64 - 1);
                self.connecting_word(before, window[0], len).map(|w| (len, w))
            })
            .ok_or(Error::NoConnection(cap))?;
        let right_word = (0..=cap)
            .find_map(|len| {
                let after = anchor.at(to + len as i64);
                self.connecting_word(window[window.len() - 1], after, len)
            })
            .ok_or(Error::NoConnection(cap))?;
        let mut symbols = left_word;
        symbols.extend_from_slice(window);
        symbols.extend(right_word);
        Ok(Point::overlay(anchor, from - left_len as i64, &symbols))
    }

    /// `z` on coordinates `|n| ≤ radius`, the anchor elsewhere.
    ///
    /// The result is homoclinic to `anchor`. In a subshift the window may be
    /// widened by connecting words where the junctions are not admissible.
    pub fn homoclinic_approximant(&self, z: &Point, anchor: &Point, radius: usize) -> Result<Point> {
        if anchor.period().is_none() {
            return Err(Error::InvalidPoint(format!("anchor {anchor} is not periodic")));
        }
        let r = radius as i64;
        self.splice_into(anchor, -r, &z.word(-r, 2 * radius + 1))
    }

    /// A uniformly chosen successor of `prev` (any symbol when `prev` is `None`).
    fn random_successor<R: Rng + ?Sized>(&self, rng: &mut R, prev: Option<Symbol>) -> Symbol {
        let choices: Vec<Symbol> = (0..self.alphabet as Symbol)
            .filter(|&s| prev.is_none_or(|p| self.admissible_pair(p, s)))
            .collect();
        choices[rng.random_range(0..choices.len())]
    }

    /// Random admissible word of length `len` starting after `prev`.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, prev: Option<Symbol>, len: usize) -> Vec<Symbol> {
        let mut word = Vec::with_capacity(len);
        let mut last = prev;
        for _ in 0..len {
            let s = self.random_successor(rng, last);
            word.push(s);
            last = Some(s);
        }
        word
    }

    fn random_cycle<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> Vec<Symbol> {
        loop {
            let len = rng.random_range(1..=max_len);
            let w = self.random_word(rng, None, len);
            if self.admissible_pair(w[len - 1], w[0]) {
                return w;
            }
        }
    }

    /// A random eventually periodic point: tail periods of length at most
    /// `max_period`, a core of length at most `max_core` placed near the origin.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, max_period: usize, max_core: usize) -> Point {
        loop {
            let left = self.random_cycle(rng, max_period.max(1));
            let core_len = rng.random_range(0..=max_core);
            let core = self.random_word(rng, left.last().copied(), core_len);
            let last = core.last().or(left.last()).copied();
            let right = self.random_cycle(rng, max_period.max(1));
            if last.is_some_and(|s| !self.admissible_pair(s, right[0])) {
                continue;
            }
            let start = -(rng.random_range(0..=core_len) as i64);
            return Point::new(left, core, start, right).expect("nonempty tails");
        }
    }

    /// A random point whose orbit nearly closes after `n` steps: an admissible
    /// cycle of length `n` repeated around the origin inside the tails of a
    /// fixed point, resampled until `d(fⁿz, z) < ε₀`.
    pub fn random_near_recurrent<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Point> {
        if n == 0 {
            return Err(Error::InvalidPoint("closing needs n ≥ 1".into()));
        }
        let anchor = self.fixed_points().into_iter().next().expect("validated spaces have a fixed point");
        let epsilon0 = self.closing_constants().epsilon0;
        for _ in 0..10_000 {
            let cycle = self.random_word(rng, None, n);
            if !self.admissible_pair(cycle[n - 1], cycle[0]) {
                continue;
            }
            let reps = rng.random_range(1..=4usize);
            let window: Vec<Symbol> = cycle.iter().copied().cycle().take(2 * reps * n + n).collect();
            let from = -((reps * n) as i64) - rng.random_range(0..n as i64);
            let z = self.splice_into(&anchor, from, &window)?;
            if self.metric(&z.shift(n as i64), &z) < epsilon0 {
                return Ok(z);
            }
        }
        Err(Error::NoConnection(n))
    }

    /// A random point homoclinic to `anchor`, differing from it only on
    /// (roughly) `|n| ≤ radius`.
    pub fn random_homoclinic<R: Rng + ?Sized>(&self, rng: &mut R, anchor: &Point, radius: usize) -> Result<Point> {
        let r = radius as i64;
        let window = self.random_word(rng, None, 2 * radius + 1);
        self.splice_into(anchor, -r, &window)
    }
}

fn validate_transition(t: &[Vec<bool>]) -> Result<()> {
    let k = t.len();
    if t.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidSpace("transition matrix must be square".into()));
    }
    for i in 0..k {
        if !t[i].iter().any(|&b| b) {
            return Err(Error::InvalidSpace(format!("symbol {i} has no successor")));
        }
        if !(0..k).any(|r| t[r][i]) {
            return Err(Error::InvalidSpace(format!("symbol {i} has no predecessor")));
        }
    }
    if !(0..k).any(|i| t[i][i]) {
        return Err(Error::InvalidSpace("subshift has no fixed point".into()));
    }
    // Primitive iff some power up to k² is strictly positive.
    let mut power: Vec<Vec<bool>> = t.to_vec();
    for _ in 1..=k * k {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(());
        }
        power = (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|r| power[i][r] && t[r][j])).collect())
            .collect();
    }
    Err(Error::InvalidSpace("subshift is not topologically mixing".into()))
}

fn identity_u128(k: usize) -> Vec<Vec<u128>> {
    (0..k).map(|i| (0..k).map(|j| (i == j) as u128).collect()).collect()
}

fn mul_u128(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let k = a.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).map(|r| a[i][r].saturating_mul(b[r][j])).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn golden_mean() -> ShiftSpace {
        ShiftSpace::subshift(vec![vec![true, true], vec![true, false]], LN_2).unwrap()
    }

    #[test]
    fn metric_examples() {
        let space = ShiftSpace::full(2, LN_2).unwrap();
        let zero = Point::constant(0);
        assert_eq!(space.metric(&zero, &zero), 0.0);
        assert!((space.metric(&zero, &p("(0)*.1(0)*")) - 1.0).abs() < 1e-15);
        // 1 + 2 ∑_{n≥1} 2^{-n}, accumulated term by term.
        let partial: f64 = 1.0 + 2.0 * (1..60).map(|n| 0.5f64.powi(n)).sum::<f64>();
        let closed = space.metric(&zero, &Point::constant(1));
        assert!((closed - 3.0).abs() < 1e-14);
        assert!((closed - partial).abs() < 1e-14);
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(ShiftSpace::full(1, 1.0).is_err());
        assert!(ShiftSpace::full(2, 0.0).is_err());
        // No fixed point.
        assert!(ShiftSpace::subshift(vec![vec![false, true], vec![true, false]], 1.0).is_err());
        // Stranded symbol.
        assert!(ShiftSpace::subshift(vec![vec![true, false], vec![false, false]], 1.0).is_err());
        // Reducible.
        assert!(ShiftSpace::subshift(vec![vec![true, true], vec![false, true]], 1.0).is_err());
        assert!(golden_mean().fixed_points() == vec![Point::constant(0)]);
    }

    #[test]
    fn validation_of_points() {
        let gm = golden_mean();
        assert!(gm.validate(&p("(0)*.1(0)*")).is_ok());
        assert!(gm.validate(&p("(0)*.11(0)*")).is_err());
        assert!(gm.validate(&p("(1)*.(0)*")).is_err());
        assert!(gm.validate(&p("(01)*.(01)*")).is_ok());
        assert!(ShiftSpace::full(2, 1.0).unwrap().validate(&p("(0)*.2(0)*")).is_err());
    }

    #[test]
    fn bracket_examples() {
        let space = ShiftSpace::full(2, LN_2).unwrap();
        let zero = Point::constant(0);
        assert_eq!(space.bracket(&zero, &zero).unwrap(), zero);
        let y = Point::overlay(&zero, -5, &[1]);
        assert_eq!(space.bracket(&zero, &y).unwrap(), y);
        assert!(matches!(
            space.bracket(&p("(0)*.1(0)*"), &zero),
            Err(Error::BracketUndefined { .. })
        ));
    }

    #[test]
    fn closing_examples() {
        let space = ShiftSpace::full(2, LN_2).unwrap();
        let q = p("(01)*.(01)*");
        assert_eq!(space.closing(&q, 2).unwrap(), q);

        // …000.101010 000…: the word 10 three times, then zeros.
        let z = Point::overlay(&Point::constant(0), 0, &[1, 0, 1, 0, 1, 0]);
        let closed = space.closing(&z, 2).unwrap();
        assert_eq!(closed, p("(10)*.(10)*"));
        assert_eq!(closed.at(0), 1);
        assert_eq!(closed.shift(2), closed);

        // Independent check of the shadowing inequality, coordinate by coordinate.
        let c = space.closing_constants();
        let gap: f64 = (-80i64..80)
            .filter(|&n| z.at(n + 2) != z.at(n))
            .map(|n| 0.5f64.powi(n.unsigned_abs() as i32))
            .sum();
        assert!((gap - space.metric(&z.shift(2), &z)).abs() < 1e-15);
        for j in 0..=2i64 {
            let d: f64 = (-80i64..80)
                .filter(|&n| z.at(n + j) != closed.at(n + j))
                .map(|n| 0.5f64.powi(n.unsigned_abs() as i32))
                .sum();
            let bound = c.c5 * (-LN_2 * j.min(2 - j) as f64).exp() * gap;
            assert!(d <= bound, "j={j}: {d} > {bound}");
        }

        assert!(matches!(
            space.closing(&p("(0)*.1(0)*"), 3),
            Err(Error::NotRecurrent { .. })
        ));
    }

    #[test]
    fn periodic_enumeration_matches_trace() {
        let full = ShiftSpace::full(2, LN_2).unwrap();
        assert_eq!(full.enumerate_periodic(1).unwrap(), vec![Point::constant(0), Point::constant(1)]);
        assert_eq!(full.enumerate_periodic(2).unwrap().len(), 4);
        let gm = golden_mean();
        let two = gm.enumerate_periodic(2).unwrap();
        assert_eq!(two.len(), 3);
        assert_eq!(gm.periodic_count(2), 3);
        for n in 1..=10 {
            assert_eq!(gm.enumerate_periodic(n).unwrap().len() as u128, gm.periodic_count(n));
        }
        let capped = ShiftSpace::full(3, 1.0).unwrap().with_enumeration_cap(100);
        assert!(matches!(capped.enumerate_periodic(5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn homoclinic_approximant_examples() {
        let space = ShiftSpace::full(2, LN_2).unwrap();
        let zero = Point::constant(0);
        let z = space.homoclinic_approximant(&Point::constant(1), &zero, 2).unwrap();
        assert_eq!(z, p("(0)*11.111(0)*"));
        let y = p("(0)*1.01(0)*");
        assert_eq!(space.homoclinic_approximant(&y, &zero, 4).unwrap(), y);
        assert!(space.homoclinic_approximant(&y, &y, 1).is_err());
    }

    #[test]
    fn approximant_distance_decays_geometrically() {
        let space = ShiftSpace::full(2, LN_2).unwrap();
        let zero = Point::constant(0);
        let z = p("(1)*.(1)*");
        let d: Vec<f64> = (1..=10)
            .map(|r| space.metric(&z, &space.homoclinic_approximant(&z, &zero, r).unwrap()))
            .collect();
        for w in d.windows(2) {
            assert!(w[1] < w[0]);
            assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn subshift_approximant_connects_tails() {
        let gm = golden_mean();
        let zero = Point::constant(0);
        // Window is all ones around the origin: inadmissible, rejected.
        assert!(gm.homoclinic_approximant(&Point::constant(1), &zero, 1).is_err());
        let z = p("(01)*.(01)*");
        let a = gm.homoclinic_approximant(&z, &zero, 3).unwrap();
        gm.validate(&a).unwrap();
        assert!(a.agreement(&zero).homoclinic());
        for n in -3..=3 {
            assert_eq!(a.at(n), z.at(n));
        }
    }

    #[test]
    fn connecting_words_in_golden_mean() {
        let gm = golden_mean();
        assert_eq!(gm.connecting_word(1, 1, 0), None);
        assert_eq!(gm.connecting_word(1, 1, 1), Some(vec![0]));
        assert_eq!(gm.connecting_word(0, 0, 0), Some(vec![]));
    }
}
