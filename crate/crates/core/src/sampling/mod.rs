//! Collocation point generation.

mod geometry;
mod sequences;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use geometry::{sample_domain, BoundaryPoint, CollocationSet, DirichletPoint, Face, Geometry, NeumannPoint};
pub use sequences::{anchored_box_discrepancy, open_unit_points, radical_inverse, unit_points};

pub const DEFAULT_KOROBOV_GENERATOR: u64 = 17;

/// Point-set construction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplerKind {
    Halton,
    Hammersley,
    Sobol,
    KorobovLattice { generator: u64 },
    LatinHypercube { seed: u64 },
    MonteCarlo { seed: u64 },
    UniformRandom { seed: u64 },
}

impl SamplerKind {
    /// All seven kinds, seeded kinds with `seed` and Korobov with the default
    /// generator.
    pub fn all(seed: u64) -> [SamplerKind; 7] {
        [
            SamplerKind::LatinHypercube { seed },
            SamplerKind::MonteCarlo { seed },
            SamplerKind::UniformRandom { seed },
            SamplerKind::Halton,
            SamplerKind::Hammersley,
            SamplerKind::KorobovLattice {
                generator: DEFAULT_KOROBOV_GENERATOR,
            },
            SamplerKind::Sobol,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::Halton => "halton",
            SamplerKind::Hammersley => "hammersley",
            SamplerKind::Sobol => "sobol",
            SamplerKind::KorobovLattice { .. } => "korobov",
            SamplerKind::LatinHypercube { .. } => "lhs",
            SamplerKind::MonteCarlo { .. } => "monte_carlo",
            SamplerKind::UniformRandom { .. } => "random",
        }
    }

    pub fn is_seeded(&self) -> bool {
        matches!(
            self,
            SamplerKind::LatinHypercube { .. } | SamplerKind::MonteCarlo { .. } | SamplerKind::UniformRandom { .. }
        )
    }

    /// Same kind with a different seed; unseeded kinds are returned as is.
    pub fn reseeded(self, seed: u64) -> Self {
        match self {
            SamplerKind::LatinHypercube { .. } => SamplerKind::LatinHypercube { seed },
            SamplerKind::MonteCarlo { .. } => SamplerKind::MonteCarlo { seed },
            SamplerKind::UniformRandom { .. } => SamplerKind::UniformRandom { seed },
            other => other,
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = SamplingError;

    /// Parses a kind name; seeded kinds get seed 0 and Korobov the default
    /// generator (use [`SamplerKind::reseeded`] afterwards).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "halton" => SamplerKind::Halton,
            "hammersley" => SamplerKind::Hammersley,
            "sobol" => SamplerKind::Sobol,
            "korobov" | "korobovlattice" => SamplerKind::KorobovLattice {
                generator: DEFAULT_KOROBOV_GENERATOR,
            },
            "lhs" | "latinhypercube" => SamplerKind::LatinHypercube { seed: 0 },
            "montecarlo" => SamplerKind::MonteCarlo { seed: 0 },
            "random" | "uniformrandom" => SamplerKind::UniformRandom { seed: 0 },
            _ => return Err(SamplingError::UnknownSampler(s.to_string())),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SamplingError {
    #[error("point count must be at least 1")]
    EmptyRequest,
    #[error("dimension must be 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("Korobov generator {generator} is not coprime with n = {n}")]
    KorobovGenerator { generator: u64, n: usize },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("unknown sampler `{0}`")]
    UnknownSampler(String),
}
