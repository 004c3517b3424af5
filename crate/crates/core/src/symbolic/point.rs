//! Eventually periodic bi-infinite sequences.
//!
//! A [`Point`] is stored as a left tail period, a finite core and a right
//! tail period. The core occupies coordinates `start .. start + core.len()`,
//! the left period is repeated to the left of `start` (its last symbol sits
//! at `start - 1`) and the right period is repeated from `start + core.len()`
//! onwards.
//!
//! Every constructor canonicalizes: both periods are primitive, the right
//! tail begins as far left as possible and the core is whatever remains
//! between the two tails. A purely periodic sequence has an empty core and
//! `start == 0`. Two points are equal iff they are equal as sequences.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Symbol = u8;

/// Largest alphabet expressible in the literal syntax (`0-9a-z`).
pub const MAX_ALPHABET: usize = 36;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    left: Vec<Symbol>,
    core: Vec<Symbol>,
    right: Vec<Symbol>,
    start: i64,
}

/// An integer extended by ±∞, ordered as `NegInfinity < Finite(_) < PosInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    NegInfinity,
    Finite(i64),
    PosInfinity,
}

impl Extended {
    pub fn finite(self) -> Option<i64> {
        match self {
            Extended::Finite(n) => Some(n),
            _ => None,
        }
    }
}

/// Where two points agree.
///
/// `stable_from` is the least `N` with `x_n = y_n` for all `n ≥ N`
/// (`NegInfinity` if they agree everywhere, `PosInfinity` if no such `N`
/// exists). `unstable_to` is the greatest `N` with `x_n = y_n` for all
/// `n ≤ N`, with the mirrored conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agreement {
    pub stable_from: Extended,
    pub unstable_to: Extended,
}

impl Agreement {
    pub fn everywhere(&self) -> bool {
        self.stable_from == Extended::NegInfinity
    }

    /// `y ∈ W^s(x)`.
    pub fn stable(&self) -> bool {
        self.stable_from != Extended::PosInfinity
    }

    /// `y ∈ W^u(x)`.
    pub fn unstable(&self) -> bool {
        self.unstable_to != Extended::NegInfinity
    }

    /// `y ∈ W(x) = W^s(x) ∩ W^u(x)`.
    pub fn homoclinic(&self) -> bool {
        self.stable() && self.unstable()
    }
}

/// Length of the primitive root of `word`.
fn primitive_period(word: &[Symbol]) -> usize {
    let n = word.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && word[i] != word[k] {
            k = fail[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n % p == 0 {
        p
    } else {
        n
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

struct Raw<'a> {
    left: &'a [Symbol],
    core: &'a [Symbol],
    right: &'a [Symbol],
    start: i64,
}

impl Raw<'_> {
    fn at(&self, n: i64) -> Symbol {
        let end = self.start + self.core.len() as i64;
        if n >= end {
            let r = self.right.len() as i64;
            self.right[(n - end).rem_euclid(r) as usize]
        } else if n >= self.start {
            self.core[(n - self.start) as usize]
        } else {
            let l = self.left.len() as i64;
            self.left[(l - 1 - (self.start - 1 - n).rem_euclid(l)) as usize]
        }
    }
}

pub(crate) fn symbol_char(s: Symbol) -> char {
    std::char::from_digit(s as u32, MAX_ALPHABET as u32).unwrap_or('?')
}

fn char_symbol(c: char) -> Option<Symbol> {
    c.to_digit(MAX_ALPHABET as u32).map(|d| d as Symbol)
}

impl Point {
    /// Builds a point from an arbitrary (possibly non-canonical) description.
    pub fn new(left: Vec<Symbol>, core: Vec<Symbol>, start: i64, right: Vec<Symbol>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidPoint("tail periods must be nonempty".into()));
        }
        Ok(Self::canonical(&left, &core, start, &right))
    }

    /// The constant sequence `…aaa…`.
    pub fn constant(symbol: Symbol) -> Self {
        Point {
            left: vec![symbol],
            core: Vec::new(),
            right: vec![symbol],
            start: 0,
        }
    }

    /// The periodic sequence repeating `word`, with `word[0]` at coordinate 0.
    pub fn periodic(word: &[Symbol]) -> Result<Self> {
        Self::new(word.to_vec(), Vec::new(), 0, word.to_vec())
    }

    /// `base` with coordinates `from .. from + symbols.len()` overwritten.
    pub fn overlay(base: &Point, from: i64, symbols: &[Symbol]) -> Self {
        let to = from + symbols.len() as i64;
        let lo = from.min(base.start);
        let hi = to.max(base.end());
        let core: Vec<Symbol> = (lo..hi)
            .map(|n| {
                if n >= from && n < to {
                    symbols[(n - from) as usize]
                } else {
                    base.at(n)
                }
            })
            .collect();
        let left = base.left_word_before(lo);
        let right = base.right_word_from(hi);
        Self::canonical(&left, &core, lo, &right)
    }

    /// The sequence equal to `past` on coordinates `< at` and to `future` on `≥ at`.
    pub fn splice(past: &Point, future: &Point, at: i64) -> Self {
        let lo = past.start.min(at);
        let hi = future.end().max(at);
        let core: Vec<Symbol> = (lo..hi)
            .map(|n| if n < at { past.at(n) } else { future.at(n) })
            .collect();
        let left = past.left_word_before(lo);
        let right = future.right_word_from(hi);
        Self::canonical(&left, &core, lo, &right)
    }

    fn canonical(left: &[Symbol], core: &[Symbol], start: i64, right: &[Symbol]) -> Self {
        let left = &left[left.len() - primitive_period(left)..];
        let right = &right[..primitive_period(right)];
        let raw = Raw {
            left,
            core,
            right,
            start,
        };
        let l = left.len() as i64;
        let r = right.len() as i64;
        let end = start + core.len() as i64;

        // Leftmost start of the right tail.
        let floor = start - l - r - 2;
        let mut b = end;
        let mut purely_periodic = false;
        while raw.at(b - 1) == raw.at(b - 1 + r) {
            b -= 1;
            if b < floor {
                purely_periodic = true;
                break;
            }
        }
        // Rightmost end of the left tail.
        let mut e = start - 1;
        if !purely_periodic {
            let ceil = end + l + r + 2;
            while raw.at(e + 1) == raw.at(e + 1 - l) {
                e += 1;
                if e > ceil {
                    purely_periodic = true;
                    break;
                }
            }
        }
        if purely_periodic {
            let word: Vec<Symbol> = (0..r).map(|n| raw.at(n)).collect();
            return Point {
                left: word.clone(),
                core: Vec::new(),
                right: word,
                start: 0,
            };
        }
        let (core, start) = if e + 1 < b {
            ((e + 1..b).map(|n| raw.at(n)).collect(), e + 1)
        } else {
            (Vec::new(), b)
        };
        Point {
            left: (start - l..start).map(|n| raw.at(n)).collect(),
            core,
            right: (b..b + r).map(|n| raw.at(n)).collect(),
            start,
        }
    }

    /// Symbol at coordinate `n`.
    pub fn at(&self, n: i64) -> Symbol {
        Raw {
            left: &self.left,
            core: &self.core,
            right: &self.right,
            start: self.start,
        }
        .at(n)
    }

    /// Symbols on coordinates `from .. from + len`.
    pub fn word(&self, from: i64, len: usize) -> Vec<Symbol> {
        (from..from + len as i64).map(|n| self.at(n)).collect()
    }

    pub fn left_period(&self) -> &[Symbol] {
        &self.left
    }

    pub fn right_period(&self) -> &[Symbol] {
        &self.right
    }

    pub fn core(&self) -> &[Symbol] {
        &self.core
    }

    /// First coordinate of the core.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last coordinate of the core.
    pub fn end(&self) -> i64 {
        self.start + self.core.len() as i64
    }

    /// Left period aligned to end at coordinate `pos - 1` (`pos ≤ start`).
    fn left_word_before(&self, pos: i64) -> Vec<Symbol> {
        debug_assert!(pos <= self.start);
        self.word(pos - self.left.len() as i64, self.left.len())
    }

    /// Right period aligned to begin at `pos` (`pos ≥ end`).
    fn right_word_from(&self, pos: i64) -> Vec<Symbol> {
        debug_assert!(pos >= self.end());
        self.word(pos, self.right.len())
    }

    /// Minimal period if the sequence is purely periodic.
    pub fn period(&self) -> Option<usize> {
        (self.core.is_empty() && self.left == self.right && self.start == 0).then_some(self.right.len())
    }

    pub fn is_fixed(&self) -> bool {
        self.period() == Some(1)
    }

    /// `f^steps(x)`: coordinate `n` of the result is `x_{n + steps}`.
    pub fn shift(&self, steps: i64) -> Self {
        if self.period().is_some() {
            let p = self.right.len() as i64;
            let word = self.word(steps.rem_euclid(p), p as usize);
            return Point {
                left: word.clone(),
                core: Vec::new(),
                right: word,
                start: 0,
            };
        }
        Point {
            left: self.left.clone(),
            core: self.core.clone(),
            right: self.right.clone(),
            start: self.start - steps,
        }
    }

    /// Coordinates spanned by both cores, widened to contain the origin.
    fn joint_window(&self, other: &Point) -> (i64, i64) {
        (
            self.start.min(other.start).min(0),
            self.end().max(other.end()).max(1),
        )
    }

    pub fn agreement(&self, other: &Point) -> Agreement {
        let (lo, hi) = self.joint_window(other);
        let rp = lcm(self.right.len(), other.right.len()) as i64;
        let lp = lcm(self.left.len(), other.left.len()) as i64;
        let differs = |n: i64| self.at(n) != other.at(n);

        let right_tail_differs = (hi..hi + rp).any(differs);
        let left_tail_differs = (lo - lp..lo).any(differs);

        let stable_from = if right_tail_differs {
            Extended::PosInfinity
        } else if let Some(n) = (lo - lp..hi).rev().find(|&n| differs(n)) {
            Extended::Finite(n + 1)
        } else {
            Extended::NegInfinity
        };
        let unstable_to = if left_tail_differs {
            Extended::NegInfinity
        } else if let Some(n) = (lo..hi + rp).find(|&n| differs(n)) {
            Extended::Finite(n - 1)
        } else {
            Extended::PosInfinity
        };
        Agreement {
            stable_from,
            unstable_to,
        }
    }

    /// `∑ₙ rate^{|n|} [xₙ ≠ yₙ]` for `0 < rate < 1`, summed in closed form.
    pub(crate) fn disagreement_series(&self, other: &Point, rate: f64) -> f64 {
        let (lo, hi) = self.joint_window(other);
        let differs = |n: i64| self.at(n) != other.at(n);
        let weight = |n: i64| rate.powi(n.unsigned_abs() as i32);

        let middle: f64 = (lo..hi).filter(|&n| differs(n)).map(weight).sum();

        let rp = lcm(self.right.len(), other.right.len()) as i64;
        let right_block: f64 = (hi..hi + rp).filter(|&n| differs(n)).map(weight).sum();
        let right = right_block / (1.0 - rate.powi(rp as i32));

        let lp = lcm(self.left.len(), other.left.len()) as i64;
        let left_block: f64 = (lo - lp..lo).filter(|&n| differs(n)).map(weight).sum();
        let left = left_block / (1.0 - rate.powi(lp as i32));

        middle + right + left
    }

    /// Largest symbol appearing anywhere in the sequence.
    pub fn max_symbol(&self) -> Symbol {
        self.left
            .iter()
            .chain(&self.core)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Coordinates whose adjacent pairs cover every pair in the sequence.
    pub(crate) fn pair_window(&self) -> std::ops::Range<i64> {
        self.start - self.left.len() as i64 - 1..self.end() + self.right.len() as i64 + 1
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.start.min(0);
        let hi = self.end().max(0);
        let chars = |w: &[Symbol]| w.iter().map(|&s| symbol_char(s)).collect::<String>();
        write!(
            f,
            "({})*{}.{}({})*",
            chars(&self.left_word_before(lo)),
            chars(&self.word(lo, (-lo) as usize)),
            chars(&self.word(0, hi as usize)),
            chars(&self.right_word_from(hi)),
        )
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({self})")
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses `(w_left)* core . core (w_right)*`, e.g. `(0)*10.01(0)*`.
    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::ParsePoint {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = text.strip_prefix('(').ok_or_else(|| fail("expected '(' opening the left period"))?;
        let (left, rest) = rest.split_once(")*").ok_or_else(|| fail("expected ')*' closing the left period"))?;
        let (middle, rest) = rest.split_once('(').ok_or_else(|| fail("expected '(' opening the right period"))?;
        let right = rest.strip_suffix(")*").ok_or_else(|| fail("expected ')*' closing the right period"))?;
        let (before, after) = middle.split_once('.').ok_or_else(|| fail("missing '.' origin marker"))?;
        if after.contains('.') {
            return Err(fail("more than one '.' origin marker"));
        }
        let symbols = |w: &str| {
            w.chars()
                .map(|c| char_symbol(c).ok_or_else(|| fail(&format!("invalid symbol {c:?}"))))
                .collect::<Result<Vec<Symbol>>>()
        };
        let left = symbols(left)?;
        let right = symbols(right)?;
        let mut core = symbols(before)?;
        let start = -(core.len() as i64);
        core.extend(symbols(after)?);
        if left.is_empty() || right.is_empty() {
            return Err(fail("tail periods must be nonempty"));
        }
        Point::new(left, core, start, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_period(&[0, 1, 0, 1]), 2);
        assert_eq!(primitive_period(&[0, 1, 0]), 3);
        assert_eq!(primitive_period(&[1, 1, 1]), 1);
    }

    #[test]
    fn canonical_forms_coincide() {
        assert_eq!(p("(00)*.(0)*"), Point::constant(0));
        assert_eq!(p("(0)*000.000(0)*"), Point::constant(0));
        assert_eq!(p("(01)*.(01)*"), p("(10)*1.0(10)*"));
        assert_eq!(p("(0)*0.1000(0)*"), p("(0)*.1(0)*"));
        assert_ne!(p("(0)*.1(0)*"), p("(0)*1.(0)*"));
    }

    #[test]
    fn sliding_boundary_is_normalized() {
        // …0101 | 001001…: the junction can slide, the canonical form cannot.
        let a = Point::new(vec![0, 1], vec![], 0, vec![0, 0, 1]).unwrap();
        let b = Point::new(vec![1, 0], vec![], 1, vec![0, 1, 0]).unwrap();
        assert_eq!(a, b);
        for n in -10..10 {
            assert_eq!(a.at(n), b.at(n));
        }
    }

    #[test]
    fn literal_round_trip() {
        for s in ["(0)*10.01(0)*", "(01)*.(01)*", "(0)*.(1)*", "(12)*a.b(z)*", "(0)*.1(0)*"] {
            let x = p(s);
            assert_eq!(p(&x.to_string()), x, "{s}");
        }
        assert_eq!(p("(0)*10.01(0)*").at(-2), 1);
        assert_eq!(p("(0)*10.01(0)*").at(1), 1);
        assert_eq!(p("(0)*10.01(0)*").at(0), 0);
    }

    #[test]
    fn malformed_literals() {
        for s in ["0.0", "(0)*00(0)*", "(0)*0.0.0(0)*", "()*.(0)*", "(0)*.#(0)*"] {
            assert!(s.parse::<Point>().is_err(), "{s}");
        }
    }

    #[test]
    fn shift_moves_symbols_left() {
        let x = p("(0)*.1(0)*");
        let y = x.shift(1);
        assert_eq!(y.at(-1), 1);
        assert_eq!(y.at(0), 0);
        assert_eq!(y, p("(0)*1.(0)*"));
        assert_eq!(y.shift(-1), x);
        assert_eq!(Point::constant(0).shift(5), Point::constant(0));
        let q = p("(011)*.(011)*");
        assert_eq!(q.shift(3), q);
        assert_ne!(q.shift(1), q);
    }

    #[test]
    fn agreement_examples() {
        let zero = Point::constant(0);
        let single = p("(0)*.1(0)*");
        let a = zero.agreement(&single);
        assert_eq!(a.stable_from, Extended::Finite(1));
        assert_eq!(a.unstable_to, Extended::Finite(-1));
        let all_one = Point::constant(1);
        let b = zero.agreement(&all_one);
        assert_eq!(b.stable_from, Extended::PosInfinity);
        assert_eq!(b.unstable_to, Extended::NegInfinity);
        assert!(zero.agreement(&zero).everywhere());
    }

    #[test]
    fn agreement_in_tails() {
        // Differ only in the left tail: stable everywhere to the right.
        let x = p("(01)*.(0)*");
        let y = p("(0)*.(0)*");
        let a = x.agreement(&y);
        assert_eq!(a.stable_from, Extended::Finite(0));
        assert!(!a.unstable());
    }
}
