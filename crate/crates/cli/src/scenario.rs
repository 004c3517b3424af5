//! Scenario files: a versioned TOML description of a shift, a cocycle pair
//! and the parameters of a run.

use std::fs;
use std::path::{Path, PathBuf};

use cocycle_core::cocycle::{BunchedCocycle, BunchingMode, Cocycle, WindowGenerator};
use cocycle_core::rigidity::{cohomologous_partner, default_anchor, normalized_at};
use cocycle_core::{Matrix, Point, ShiftSpace};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "cocycle-rigidity/scenario/v1";

/// Largest number of cylinders an exhaustive bunching run may visit.
pub const BUNCHING_BUDGET: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub seed: u64,
    pub space: SpaceConfig,
    pub cocycle: CocycleSource,
    #[serde(default)]
    pub twist: TwistSource,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub alphabet: usize,
    pub lambda: f64,
    /// 0/1 transition matrix; absent for the full shift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum CocycleSource {
    Random { dim: usize, radius: usize, scale: f64 },
    File { path: PathBuf },
    Identity { dim: usize },
    Constant { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum TwistSource {
    #[default]
    None,
    /// Hidden conjugacy drawn near the identity.
    Random { radius: usize, scale: f64 },
    /// Hidden conjugacy read from a generator file.
    File { path: PathBuf },
    /// `B` equals `A` except for one shifted table entry.
    Perturb { word: String, row: usize, col: usize, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub horizon: usize,
    pub samples: usize,
    /// End-to-end tolerance.
    pub tol: f64,
    pub holonomy_tol: f64,
    pub conjugacy_tol: f64,
    pub periodic_tol: f64,
    pub max_period: usize,
    /// Radius of the windows used to sample homoclinic points.
    pub homoclinic_radius: usize,
    /// Anchor point literal; the smallest fixed point when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            horizon: 10,
            samples: 100,
            tol: cocycle_core::rigidity::END_TO_END_TOL,
            holonomy_tol: cocycle_core::holonomy::DEFAULT_TOL,
            conjugacy_tol: cocycle_core::rigidity::CONJUGACY_TOL,
            periodic_tol: 1e-10,
            max_period: 6,
            homoclinic_radius: 4,
            anchor: None,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if s.schema != SCHEMA {
            return Err(CliError::Config(format!("unsupported schema {:?}, expected {SCHEMA:?}", s.schema)));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        let mut s = Self::parse(&text)?;
        // Relative generator paths are resolved against the scenario file.
        if let Some(dir) = path.parent() {
            s.resolve_paths(dir);
        }
        Ok(s)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        if let CocycleSource::File { path } = &mut self.cocycle {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
        if let TwistSource::File { path } = &mut self.twist {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios serialize")
    }

    /// Instantiates the space, the cocycle pair and the hidden conjugacy.
    pub fn build(&self) -> Result<System, CliError> {
        let space = match &self.space.transition {
            None => ShiftSpace::full(self.space.alphabet, self.space.lambda)?,
            Some(t) => {
                if t.len() != self.space.alphabet {
                    return Err(CliError::Config("transition size differs from alphabet".into()));
                }
                ShiftSpace::subshift(t.iter().map(|r| r.iter().map(|&v| v != 0).collect()).collect(), self.space.lambda)?
            }
        };
        let seeds = SeedStream::new(self.seed);
        let a_gen = match &self.cocycle {
            CocycleSource::Random { dim, radius, scale } => {
                WindowGenerator::random_near_identity(&space, *dim, *radius, *scale, seeds.get(0))?
            }
            CocycleSource::File { path } => WindowGenerator::from_file_str(&space, &read(path)?)?,
            CocycleSource::Identity { dim } => WindowGenerator::identity(&space, *dim)?,
            CocycleSource::Constant { matrix } => WindowGenerator::constant(&space, to_matrix(matrix)?)?,
        };
        let a = Cocycle::new(space.clone(), a_gen)?;
        let anchor = match &self.params.anchor {
            Some(lit) => {
                let p: Point = lit.parse()?;
                space.validate(&p)?;
                p
            }
            None => default_anchor(&space),
        };
        let anchor_period = (1..=64)
            .find(|&n| anchor.shift(n) == anchor)
            .ok_or_else(|| CliError::Config("anchor must be periodic with period at most 64".into()))?
            as usize;
        let (b, p_true) = match &self.twist {
            TwistSource::None => (a.clone(), None),
            TwistSource::Random { radius, scale } => {
                let raw = WindowGenerator::random_near_identity(&space, a.dim(), *radius, *scale, seeds.get(1))?;
                let p = normalized_at(&space, &raw, &anchor)?;
                (cohomologous_partner(&a, &p)?, Some(p))
            }
            TwistSource::File { path } => {
                let raw = WindowGenerator::from_file_str(&space, &read(path)?)?;
                let p = normalized_at(&space, &raw, &anchor)?;
                (cohomologous_partner(&a, &p)?, Some(p))
            }
            TwistSource::Perturb { word, row, col, delta } => {
                let target: Vec<u8> = word
                    .chars()
                    .map(|c| c.to_digit(36).map(|d| d as u8))
                    .collect::<Option<_>>()
                    .ok_or_else(|| CliError::Config(format!("bad word {word:?}")))?;
                if target.len() != 2 * a.generator().radius() + 1 || a.generator().lookup(&target).is_none() {
                    return Err(CliError::Config(format!("{word:?} is not an admissible generator window")));
                }
                if *row >= a.dim() || *col >= a.dim() {
                    return Err(CliError::Config("perturbed entry out of range".into()));
                }
                let g = a.generator().map(&space, |w, m| {
                    let mut m = m.clone();
                    if w == target.as_slice() {
                        m[(*row, *col)] += delta;
                    }
                    m
                })?;
                (Cocycle::new(space.clone(), g)?, None)
            }
        };
        Ok(System {
            space,
            a,
            b,
            p_true,
            anchor,
            anchor_period,
            seeds,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

fn to_matrix(rows: &[Vec<f64>]) -> Result<Matrix, CliError> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Config("constant matrix must be square and nonempty".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Matrix::from_row_slice(d, d, &flat))
}

/// Independent seeds derived from the scenario seed by a fixed mixing rule.
#[derive(Debug, Clone, Copy)]
pub struct SeedStream(u64);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream(seed)
    }

    pub fn get(&self, index: u64) -> u64 {
        // splitmix64 finalizer
        let mut z = self.0 ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone)]
pub struct System {
    pub space: ShiftSpace,
    pub a: Cocycle,
    pub b: Cocycle,
    pub p_true: Option<WindowGenerator>,
    pub anchor: Point,
    pub anchor_period: usize,
    pub seeds: SeedStream,
}

impl System {
    /// Certifies bunching with the largest affordable exhaustive horizon.
    pub fn certify(&self, c: &Cocycle, horizon: usize) -> Result<BunchedCocycle, CliError> {
        let h = c.affordable_horizon(horizon, BUNCHING_BUDGET);
        BunchedCocycle::certify(c.clone(), h, BunchingMode::Exhaustive).map_err(|source| CliError::Stage {
            stage: "bunching",
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
schema = "cocycle-rigidity/scenario/v1"
seed = 42

[space]
alphabet = 2
lambda = 0.6931471805599453

[cocycle]
source = "random"
dim = 2
radius = 1
scale = 0.05

[twist]
source = "random"
radius = 1
scale = 0.3
"#;

    #[test]
    fn round_trip() {
        let s = Scenario::parse(TEXT).unwrap();
        assert_eq!(s.params, Params::default());
        let back = Scenario::parse(&s.to_toml()).unwrap();
        assert_eq!(back, s);
        let sys = s.build().unwrap();
        assert!(sys.p_true.is_some());
        assert_eq!(sys.anchor_period, 1);
    }

    #[test]
    fn schema_and_fields_checked() {
        assert!(Scenario::parse(&TEXT.replace("v1", "v0")).is_err());
        assert!(Scenario::parse(&TEXT.replace("seed = 42", "seed = 42\nextra = 1")).is_err());
    }

    #[test]
    fn seeds_are_distinct() {
        let s = SeedStream::new(7);
        assert_ne!(s.get(0), s.get(1));
        assert_eq!(s.get(3), SeedStream::new(7).get(3));
    }
}
