//! Locally constant matrix cocycles over a shift.
//!
//! A [`WindowGenerator`] assigns an invertible matrix to every admissible
//! word of length `2m + 1`; evaluated at a point it reads the symbols on
//! coordinates `-m ..= m`. A [`Cocycle`] pairs a generator with a shift
//! space and a step `k`, so that it lives over `F = fᵏ` (step 1 for an
//! ordinary cocycle, larger steps for induced powers).

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symbolic::{Point, ShiftSpace, Symbol};

/// Matrices with an entry above this magnitude abort an iteration.
pub const DEFAULT_OVERFLOW_CAP: f64 = 1e100;

/// Safety margin required between the fitted bunching rate and `λ`.
pub const DEFAULT_BUNCHING_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone)]
struct Entry {
    matrix: Matrix,
    inverse: Matrix,
}

/// A map `M → GL(d, ℝ)` depending only on the coordinates `-m ..= m`.
#[derive(Debug, Clone)]
pub struct WindowGenerator {
    dim: usize,
    radius: usize,
    alphabet: usize,
    table: Vec<Option<Entry>>,
}

fn word_index(word: &[Symbol], alphabet: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * alphabet + s as usize)
}

impl WindowGenerator {
    /// Tabulates `f` over every admissible word of length `2·radius + 1`.
    pub fn from_fn<F>(space: &ShiftSpace, dim: usize, radius: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[Symbol]) -> Matrix,
    {
        if dim == 0 {
            return Err(Error::InvalidGenerator("dimension must be at least 1".into()));
        }
        let k = space.alphabet();
        let len = 2 * radius + 1;
        let mut table = vec![None; k.pow(len as u32)];
        for word in space.words(len)? {
            let matrix = f(&word);
            if matrix.shape() != (dim, dim) {
                return Err(Error::InvalidGenerator(format!(
                    "entry for {word:?} has shape {:?}, expected {dim}x{dim}",
                    matrix.shape()
                )));
            }
            let inverse = linalg::inverse(&matrix)
                .map_err(|_| Error::InvalidGenerator(format!("entry for {word:?} is not invertible")))?;
            table[word_index(&word, k)] = Some(Entry { matrix, inverse });
        }
        Ok(WindowGenerator {
            dim,
            radius,
            alphabet: k,
            table,
        })
    }

    pub fn constant(space: &ShiftSpace, matrix: Matrix) -> Result<Self> {
        let dim = matrix.nrows();
        Self::from_fn(space, dim, 0, |_| matrix.clone())
    }

    pub fn identity(space: &ShiftSpace, dim: usize) -> Result<Self> {
        Self::constant(space, linalg::identity(dim))
    }

    /// Radius-0 generator taking `matrices[s]` on points with `x₀ = s`.
    pub fn per_symbol(space: &ShiftSpace, matrices: &[Matrix]) -> Result<Self> {
        if matrices.len() != space.alphabet() {
            return Err(Error::InvalidGenerator(format!(
                "{} matrices for an alphabet of size {}",
                matrices.len(),
                space.alphabet()
            )));
        }
        let dim = matrices[0].nrows();
        Self::from_fn(space, dim, 0, |w| matrices[w[0] as usize].clone())
    }

    /// Entries `exp(scale · G)` with `G` a standard normal matrix, drawn per word.
    pub fn random_near_identity(space: &ShiftSpace, dim: usize, radius: usize, scale: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(space, dim, radius, |_| random_exponential(&mut rng, dim, scale))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Entry for a word of length `2m + 1`.
    pub fn lookup(&self, word: &[Symbol]) -> Option<&Matrix> {
        self.entry(word).map(|e| &e.matrix)
    }

    pub fn lookup_inverse(&self, word: &[Symbol]) -> Option<&Matrix> {
        self.entry(word).map(|e| &e.inverse)
    }

    fn entry(&self, word: &[Symbol]) -> Option<&Entry> {
        if word.len() != 2 * self.radius + 1 || word.iter().any(|&s| s as usize >= self.alphabet) {
            return None;
        }
        self.table[word_index(word, self.alphabet)].as_ref()
    }

    fn entry_at(&self, x: &Point, center: i64) -> &Entry {
        let m = self.radius as i64;
        let word = x.word(center - m, self.radius * 2 + 1);
        self.entry(&word)
            .unwrap_or_else(|| panic!("no generator entry for inadmissible word {word:?}"))
    }

    /// Value at `f^center(x)`.
    pub fn at(&self, x: &Point, center: i64) -> &Matrix {
        &self.entry_at(x, center).matrix
    }

    pub fn inverse_at(&self, x: &Point, center: i64) -> &Matrix {
        &self.entry_at(x, center).inverse
    }

    /// Value of the sub-window centred at `center` of a longer word.
    pub fn in_word(&self, word: &[Symbol], center: usize) -> &Matrix {
        let m = self.radius;
        self.lookup(&word[center - m..=center + m])
            .expect("sub-words of admissible words are admissible")
    }

    fn inverse_in_word(&self, word: &[Symbol], center: usize) -> &Matrix {
        let m = self.radius;
        self.lookup_inverse(&word[center - m..=center + m])
            .expect("sub-words of admissible words are admissible")
    }

    /// `(word, matrix)` pairs in lexicographic word order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<Symbol>, &Matrix)> {
        let k = self.alphabet;
        let len = 2 * self.radius + 1;
        self.table.iter().enumerate().filter_map(move |(idx, e)| {
            e.as_ref().map(|e| {
                let mut word = vec![0; len];
                let mut rest = idx;
                for slot in word.iter_mut().rev() {
                    *slot = (rest % k) as Symbol;
                    rest /= k;
                }
                (word, &e.matrix)
            })
        })
    }

    /// Applies `f` to every entry.
    pub fn map<F>(&self, space: &ShiftSpace, mut f: F) -> Result<Self>
    where
        F: FnMut(&[Symbol], &Matrix) -> Matrix,
    {
        Self::from_fn(space, self.dim, self.radius, |w| f(w, self.lookup(w).expect("same space")))
    }

    /// The pointwise inverse `x ↦ G(x)⁻¹`.
    pub fn inverse(&self, space: &ShiftSpace) -> Result<Self> {
        Self::from_fn(space, self.dim, self.radius, |w| {
            self.lookup_inverse(w).expect("same space").clone()
        })
    }

    /// The same generator tabulated over a wider window.
    pub fn widened(&self, space: &ShiftSpace, radius: usize) -> Result<Self> {
        if radius < self.radius {
            return Err(Error::InvalidGenerator("cannot narrow a window".into()));
        }
        Self::from_fn(space, self.dim, radius, |w| self.in_word(w, radius).clone())
    }

    /// Whether `self` and `other` agree as functions on `M` to within `tol`.
    pub fn max_gap(&self, other: &WindowGenerator, space: &ShiftSpace) -> Result<f64> {
        let radius = self.radius.max(other.radius);
        let mut worst: f64 = 0.0;
        for w in space.words(2 * radius + 1)? {
            worst = worst.max(linalg::distance(self.in_word(&w, radius), other.in_word(&w, radius)));
        }
        Ok(worst)
    }

    /// Serializes to the generator file format: a `d m k` header, then one
    /// line per word with the `d×d` entries in row-major order.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.radius, self.alphabet);
        for (word, m) in self.entries() {
            let w: String = word.iter().map(|&s| crate::symbolic::symbol_char(s)).collect();
            out.push_str(&w);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let _ = write!(out, " {}", m[(i, j)]);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the generator file format; `#` starts a comment.
    pub fn from_file_str(space: &ShiftSpace, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty generator file".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [dim, radius, alphabet] = header[..] else {
            return Err(Error::Parse("header must be `d m k`".into()));
        };
        if alphabet != space.alphabet() {
            return Err(Error::Incompatible(format!(
                "generator alphabet {alphabet} vs space alphabet {}",
                space.alphabet()
            )));
        }
        let mut records = std::collections::HashMap::new();
        for line in lines {
            let mut tokens = line.split_whitespace();
            let word_token = tokens.next().expect("nonempty line");
            let word: Vec<Symbol> = word_token
                .chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(|d| d as Symbol)
                        .ok_or_else(|| Error::Parse(format!("bad symbol {c:?}")))
                })
                .collect::<Result<_>>()?;
            if word.len() != 2 * radius + 1 {
                return Err(Error::Parse(format!("word {word_token:?} has the wrong length")));
            }
            let values: Vec<f64> = tokens
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<_>>()?;
            if values.len() != dim * dim {
                return Err(Error::Parse(format!("word {word_token:?} needs {} entries", dim * dim)));
            }
            records.insert(word, Matrix::from_row_slice(dim, dim, &values));
        }
        let mut missing = None;
        let generator = Self::from_fn(space, dim, radius, |w| match records.get(w) {
            Some(m) => m.clone(),
            None => {
                missing.get_or_insert_with(|| w.to_vec());
                linalg::identity(dim)
            }
        })?;
        if let Some(w) = missing {
            return Err(Error::InvalidGenerator(format!("no record for admissible word {w:?}")));
        }
        Ok(generator)
    }
}

fn random_exponential<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Matrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    (g * scale).exp()
}

/// Exhaustive enumeration of cylinders, or a seeded random sample of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BunchingMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunchingRow {
    pub n: usize,
    /// `sup ‖Aⁿ(x)‖·‖Aⁿ(x)⁻¹‖` over the cylinders (or samples).
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BunchingReport {
    pub horizon: usize,
    pub theta_hat: f64,
    pub c3_hat: f64,
    /// Contraction rate of the base dynamics per step of the cocycle.
    pub rate: f64,
    pub margin: f64,
    pub bunched: bool,
    pub exhaustive: bool,
    pub rows: Vec<BunchingRow>,
}

impl BunchingReport {
    fn from_rows(rows: Vec<BunchingRow>, rate: f64, margin: f64, exhaustive: bool) -> Self {
        let horizon = rows.len();
        // Fit the asymptotic slope on the upper half of the horizon.
        let fit: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| 2 * r.n >= horizon)
            .map(|r| (r.n as f64, r.sup.ln()))
            .collect();
        let slope = if fit.len() < 2 {
            fit.first().map_or(0.0, |&(n, l)| l / n)
        } else {
            let count = fit.len() as f64;
            let mean_n = fit.iter().map(|p| p.0).sum::<f64>() / count;
            let mean_l = fit.iter().map(|p| p.1).sum::<f64>() / count;
            let cov: f64 = fit.iter().map(|p| (p.0 - mean_n) * (p.1 - mean_l)).sum();
            let var: f64 = fit.iter().map(|p| (p.0 - mean_n).powi(2)).sum();
            cov / var
        };
        let theta_hat = slope.max(0.0);
        let c3_hat = rows
            .iter()
            .map(|r| r.sup * (-theta_hat * r.n as f64).exp())
            .fold(1.0, f64::max);
        BunchingReport {
            horizon,
            theta_hat,
            c3_hat,
            rate,
            margin,
            bunched: theta_hat + margin < rate,
            exhaustive,
            rows,
        }
    }

    /// `e^{θ̂ - rate}`, the geometric ratio governing holonomy convergence.
    pub fn holonomy_ratio(&self) -> f64 {
        (self.theta_hat - self.rate).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovPair {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub period: usize,
}

/// Empirical constant of the norm-product bound on a stable set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormProductCheck {
    /// `max_n ‖Aⁿ(y)‖·‖Aⁿ(z)⁻¹‖·e^{-nθ}` over `n ≤ horizon`.
    pub constant: f64,
    /// Largest ratio on the upper half of the horizon divided by the largest
    /// on the lower half; stays near or below 1 when the products do not
    /// outgrow `e^{nθ}`.
    pub worst_ratio: f64,
}

/// A generator together with the shift it lives over.
#[derive(Debug, Clone)]
pub struct Cocycle {
    space: ShiftSpace,
    generator: Arc<WindowGenerator>,
    step: usize,
    overflow_cap: f64,
}

impl Cocycle {
    pub fn new(space: ShiftSpace, generator: WindowGenerator) -> Result<Self> {
        Self::with_step(space, generator, 1)
    }

    fn with_step(space: ShiftSpace, generator: WindowGenerator, step: usize) -> Result<Self> {
        if generator.alphabet != space.alphabet() {
            return Err(Error::Incompatible(format!(
                "generator alphabet {} vs space alphabet {}",
                generator.alphabet,
                space.alphabet()
            )));
        }
        for w in space.words(2 * generator.radius + 1)? {
            if generator.lookup(&w).is_none() {
                return Err(Error::Incompatible(format!("generator has no entry for {w:?}")));
            }
        }
        Ok(Cocycle {
            space,
            generator: Arc::new(generator),
            step,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
        })
    }

    pub fn with_overflow_cap(mut self, cap: f64) -> Self {
        self.overflow_cap = cap;
        self
    }

    pub fn space(&self) -> &ShiftSpace {
        &self.space
    }

    pub fn generator(&self) -> &WindowGenerator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim
    }

    /// Number of base shifts per application of the cocycle.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Contraction rate of the base map per cocycle step, `k·λ`.
    pub fn rate(&self) -> f64 {
        self.space.lambda() * self.step as f64
    }

    /// `F(x)` with `F = f^step`.
    pub fn advance(&self, x: &Point, steps: i64) -> Point {
        x.shift(steps * self.step as i64)
    }

    pub fn evaluate(&self, x: &Point) -> Matrix {
        self.generator.at(x, 0).clone()
    }

    /// `A(Fʲ x)`.
    pub fn factor(&self, x: &Point, j: i64) -> &Matrix {
        self.generator.at(x, j * self.step as i64)
    }

    /// `A(Fʲ x)⁻¹`.
    pub fn factor_inverse(&self, x: &Point, j: i64) -> &Matrix {
        self.generator.inverse_at(x, j * self.step as i64)
    }

    fn guard(&self, m: &Matrix) -> Result<()> {
        let norm = linalg::max_abs_entry(m);
        if !(norm <= self.overflow_cap) {
            return Err(Error::Overflow {
                norm,
                cap: self.overflow_cap,
            });
        }
        Ok(())
    }

    /// `Aⁿ(x)`: `A(F^{n-1}x)⋯A(x)` for `n > 0`, the identity for `n = 0`,
    /// and `A(Fⁿx)⁻¹⋯A(F⁻¹x)⁻¹` for `n < 0`.
    pub fn iterate(&self, x: &Point, n: i64) -> Result<Matrix> {
        let mut acc = linalg::identity(self.dim());
        if n >= 0 {
            for j in 0..n {
                acc = self.factor(x, j) * acc;
                self.guard(&acc)?;
            }
        } else {
            for j in (n..0).rev() {
                acc = self.factor_inverse(x, j) * acc;
                self.guard(&acc)?;
            }
        }
        Ok(acc)
    }

    /// `Aⁿ(x)⁻¹`, accumulated from the stored inverses.
    pub fn iterate_inverse(&self, x: &Point, n: i64) -> Result<Matrix> {
        let mut acc = linalg::identity(self.dim());
        if n >= 0 {
            for j in 0..n {
                acc *= self.factor_inverse(x, j);
                self.guard(&acc)?;
            }
        } else {
            for j in (n..0).rev() {
                acc *= self.factor(x, j);
                self.guard(&acc)?;
            }
        }
        Ok(acc)
    }

    /// `‖A^{p+q}(x) - A^p(F^q x)·A^q(x)‖ / ‖A^{p+q}(x)‖`.
    pub fn cocycle_property_residual(&self, x: &Point, p: i64, q: i64) -> Result<f64> {
        let whole = self.iterate(x, p + q)?;
        let split = self.iterate(&self.advance(x, q), p)? * self.iterate(x, q)?;
        Ok(linalg::relative_distance(&whole, &split))
    }

    /// A certified `C₂` with `‖A(x) - A(y)‖ ≤ C₂·d(x, y)`.
    ///
    /// Distinct entries come from points differing somewhere in `|n| ≤ m`,
    /// hence at distance at least `e^{-λm}`. Tables with more than 256
    /// entries use the triangle-inequality bound `2·max ‖A_w - A_{w₀}‖`.
    pub fn lipschitz_constant(&self) -> f64 {
        let entries: Vec<&Matrix> = self.generator.entries().map(|(_, m)| m).collect();
        let spread = if entries.len() <= 256 {
            let mut worst: f64 = 0.0;
            for (i, a) in entries.iter().enumerate() {
                for b in &entries[i + 1..] {
                    worst = worst.max(linalg::distance(a, b));
                }
            }
            worst
        } else {
            2.0 * entries
                .iter()
                .map(|m| linalg::distance(m, entries[0]))
                .fold(0.0, f64::max)
        };
        spread * (self.space.lambda() * self.generator.radius as f64).exp()
    }

    /// `max ‖A_w‖` and `max ‖A_w⁻¹‖` over the table.
    pub fn entry_norm_bounds(&self) -> (f64, f64) {
        self.generator
            .table
            .iter()
            .flatten()
            .fold((0.0f64, 0.0f64), |(a, b), e| {
                (a.max(linalg::op_norm(&e.matrix)), b.max(linalg::op_norm(&e.inverse)))
            })
    }

    /// Largest horizon `≤ max` whose exhaustive bunching run visits at most
    /// `budget` cylinders (at least 1).
    pub fn affordable_horizon(&self, max: usize, budget: u128) -> usize {
        let m = self.generator.radius;
        let k = self.space.alphabet() as u128;
        (1..=max.max(1))
            .take_while(|&h| {
                let len = (h - 1) * self.step + 2 * m + 1;
                h == 1 || k.saturating_pow(len as u32) <= budget
            })
            .last()
            .unwrap_or(1)
    }

    /// Supremum of `‖Aⁿ‖·‖Aⁿ⁻¹‖` for `n ≤ horizon` and the fitted exponential rate.
    pub fn bunching_report(&self, horizon: usize, mode: BunchingMode) -> Result<BunchingReport> {
        self.bunching_report_with_margin(horizon, mode, DEFAULT_BUNCHING_MARGIN)
    }

    pub fn bunching_report_with_margin(&self, horizon: usize, mode: BunchingMode, margin: f64) -> Result<BunchingReport> {
        if horizon == 0 {
            return Err(Error::InvalidGenerator("bunching horizon must be at least 1".into()));
        }
        let mut sups = vec![1.0f64; horizon];
        match mode {
            BunchingMode::Exhaustive => {
                // Aⁿ depends on coordinates -m ..= (n-1)k + m.
                let m = self.generator.radius;
                let len = (horizon - 1) * self.step + 2 * m + 1;
                let requested = (self.space.alphabet() as u128).saturating_pow(len as u32);
                if requested > self.space.enumeration_cap() {
                    return Err(Error::CapExceeded {
                        requested,
                        cap: self.space.enumeration_cap(),
                    });
                }
                let mut word = Vec::with_capacity(len);
                self.cylinder_sups(&mut word, &linalg::identity(self.dim()), 0, &mut sups);
            }
            BunchingMode::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = self.generator.radius;
                let len = (horizon - 1) * self.step + 2 * m + 1;
                let anchor = self.space.fixed_points()[0].clone();
                for _ in 0..samples {
                    let window = self.space.random_word(&mut rng, None, len);
                    let x = self.space.splice_into(&anchor, -(m as i64), &window)?;
                    let mut acc = linalg::identity(self.dim());
                    for (j, sup) in sups.iter_mut().enumerate() {
                        acc = self.factor(&x, j as i64) * acc;
                        self.guard(&acc)?;
                        *sup = sup.max(linalg::condition_number(&acc));
                    }
                }
            }
        }
        let rows = sups
            .into_iter()
            .enumerate()
            .map(|(i, sup)| BunchingRow { n: i + 1, sup })
            .collect();
        Ok(BunchingReport::from_rows(
            rows,
            self.rate(),
            margin,
            matches!(mode, BunchingMode::Exhaustive),
        ))
    }

    fn cylinder_sups(&self, word: &mut Vec<Symbol>, product: &Matrix, next: usize, sups: &mut [f64]) {
        if next == sups.len() {
            return;
        }
        let m = self.generator.radius;
        let complete = next * self.step + 2 * m + 1;
        if word.len() == complete {
            let prod = self.generator.in_word(word, complete - 1 - m) * product;
            sups[next] = sups[next].max(linalg::condition_number(&prod));
            self.cylinder_sups(word, &prod, next + 1, sups);
            return;
        }
        for s in 0..self.space.alphabet() as Symbol {
            if word.last().is_none_or(|&p| self.space.admissible_pair(p, s)) {
                word.push(s);
                self.cylinder_sups(word, product, next, sups);
                word.pop();
            }
        }
    }

    /// Checks `‖Aⁿ(y)‖·‖Aⁿ(z)⁻¹‖ ≤ C·e^{nθ}` for `y, z` in the local stable set of `x`.
    pub fn norm_product_check(&self, x: &Point, y: &Point, z: &Point, horizon: usize, theta: f64) -> Result<NormProductCheck> {
        for p in [y, z] {
            if x.agreement(p).stable_from > crate::symbolic::Extended::Finite(0) {
                return Err(Error::NotAsymptotic("local stable"));
            }
        }
        let mut ay = linalg::identity(self.dim());
        let mut az_inv = linalg::identity(self.dim());
        let mut ratios = Vec::with_capacity(horizon + 1);
        ratios.push(1.0);
        for j in 0..horizon as i64 {
            ay = self.factor(y, j) * ay;
            az_inv *= self.factor_inverse(z, j);
            self.guard(&ay)?;
            self.guard(&az_inv)?;
            let n = (j + 1) as f64;
            ratios.push(linalg::op_norm(&ay) * linalg::op_norm(&az_inv) * (-theta * n).exp());
        }
        let constant = ratios.iter().copied().fold(0.0, f64::max);
        let half = horizon / 2;
        let lower = ratios[..=half].iter().copied().fold(0.0, f64::max);
        let upper = ratios[half..].iter().copied().fold(0.0, f64::max);
        Ok(NormProductCheck {
            constant,
            worst_ratio: upper / lower,
        })
    }

    /// Extremal Lyapunov exponents at a point with `Fⁿ(p) = p`.
    pub fn lyapunov_at_periodic(&self, p: &Point, n: usize) -> Result<LyapunovPair> {
        if n == 0 || self.advance(p, n as i64) != *p {
            return Err(Error::NotPeriodic(n as i64));
        }
        let m = self.iterate(p, n as i64)?;
        let lambda_plus = linalg::spectral_radius(&m).ln() / n as f64;
        let lambda_minus = linalg::smallest_eigen_modulus(&m).ln() / n as f64;
        Ok(LyapunovPair {
            lambda_plus,
            lambda_minus,
            period: n,
        })
    }

    /// The cohomologous cocycle `x ↦ Q(F x)·A(x)·Q(x)⁻¹`.
    pub fn twist(&self, q: &WindowGenerator) -> Result<Cocycle> {
        if q.dim != self.dim() || q.alphabet != self.generator.alphabet {
            return Err(Error::Incompatible("twisting generator has the wrong shape".into()));
        }
        let m = self.generator.radius;
        let radius = m.max(q.radius + self.step);
        let c = radius;
        let generator = WindowGenerator::from_fn(&self.space, self.dim(), radius, |w| {
            q.in_word(w, c + self.step) * self.generator.in_word(w, c) * q.inverse_in_word(w, c)
        })?;
        Cocycle::with_step(self.space.clone(), generator, self.step)
    }

    /// The cocycle `x ↦ Aᵏ(x)` over `Fᵏ`.
    pub fn induced_power(&self, k: usize) -> Result<Cocycle> {
        if k == 0 {
            return Err(Error::InvalidGenerator("induced power needs k ≥ 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let m = self.generator.radius;
        let radius = m + (k - 1) * self.step;
        let generator = WindowGenerator::from_fn(&self.space, self.dim(), radius, |w| {
            let mut acc = linalg::identity(self.dim());
            for j in 0..k {
                acc = self.generator.in_word(w, radius + j * self.step) * acc;
            }
            acc
        })?;
        Cocycle::with_step(self.space.clone(), generator, self.step * k)
    }
}

/// A cocycle with a bunching certificate: holonomies converge for it.
#[derive(Debug, Clone)]
pub struct BunchedCocycle {
    cocycle: Cocycle,
    report: BunchingReport,
}

impl BunchedCocycle {
    /// Runs the bunching report and refuses cocycles that fail it.
    pub fn certify(cocycle: Cocycle, horizon: usize, mode: BunchingMode) -> Result<Self> {
        let report = cocycle.bunching_report(horizon, mode)?;
        Self::from_report(cocycle, report)
    }

    pub fn from_report(cocycle: Cocycle, report: BunchingReport) -> Result<Self> {
        if !report.bunched {
            return Err(Error::NotBunched {
                theta: report.theta_hat,
                rate: report.rate,
            });
        }
        Ok(BunchedCocycle { cocycle, report })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn report(&self) -> &BunchingReport {
        &self.report
    }

    pub fn theta(&self) -> f64 {
        self.report.theta_hat
    }

    pub fn c3(&self) -> f64 {
        self.report.c3_hat
    }

    /// The induced power over `Fᵏ`, certified from this report:
    /// `sup ‖Ãⁿ‖·‖Ãⁿ⁻¹‖ = sup ‖A^{kn}‖·‖A^{kn}⁻¹‖ ≤ C₃ e^{kθn}`.
    pub fn induced_power(&self, k: usize) -> Result<Self> {
        let cocycle = self.cocycle.induced_power(k)?;
        let rows: Vec<BunchingRow> = self
            .report
            .rows
            .iter()
            .filter(|r| r.n % k == 0)
            .map(|r| BunchingRow { n: r.n / k, sup: r.sup })
            .collect();
        let kf = k as f64;
        let report = BunchingReport {
            horizon: rows.len(),
            theta_hat: self.report.theta_hat * kf,
            c3_hat: self.report.c3_hat,
            rate: self.report.rate * kf,
            margin: self.report.margin * kf,
            bunched: self.report.bunched,
            exhaustive: self.report.exhaustive,
            rows,
        };
        Ok(BunchedCocycle { cocycle, report })
    }
}

impl std::ops::Deref for BunchedCocycle {
    type Target = Cocycle;

    fn deref(&self) -> &Cocycle {
        &self.cocycle
    }
}
