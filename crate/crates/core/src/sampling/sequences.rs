//! Unit-hypercube point sets.

use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SamplerKind, SamplingError};

const HALTON_BASES: [u64; 3] = [2, 3, 5];

/// Digit-reversal of `index` in `base`, in `[0, 1)`.
pub fn radical_inverse(base: u64, mut index: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut scale = inv_base;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv_base;
    }
    out
}

/// Sobol direction numbers for the first three dimensions, 32 bits each.
///
/// Dimension 1 is the van der Corput sequence; dimensions 2 and 3 use the
/// primitive polynomials `x + 1` and `x^2 + x + 1` with initial values
/// `m = (1)` and `m = (1, 3)`.
fn sobol_directions() -> [[u32; 32]; 3] {
    let mut v = [[0u32; 32]; 3];
    for (k, slot) in v[0].iter_mut().enumerate() {
        *slot = 1u32 << (31 - k);
    }
    // degree 1, no inner coefficients
    v[1][0] = 1u32 << 31;
    for k in 1..32 {
        v[1][k] = v[1][k - 1] ^ (v[1][k - 1] >> 1);
    }
    // degree 2, inner coefficient a1 = 1
    v[2][0] = 1u32 << 31;
    v[2][1] = 3u32 << 30;
    for k in 2..32 {
        v[2][k] = v[2][k - 1] ^ v[2][k - 2] ^ (v[2][k - 2] >> 2);
    }
    v
}

/// Gray-code Sobol points with indices `1..=n` (the origin is skipped).
fn sobol(n: usize, dim: usize) -> Vec<Vec<f64>> {
    let dirs = sobol_directions();
    let mut state = [0u32; 3];
    let scale = 1.0 / 4_294_967_296.0;
    (0..n)
        .map(|i| {
            // index of the lowest zero bit of i
            let c = (!(i as u64)).trailing_zeros() as usize;
            (0..dim)
                .map(|d| {
                    state[d] ^= dirs[d][c];
                    state[d] as f64 * scale
                })
                .collect()
        })
        .collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn korobov_vector(n: usize, generator: u64, dim: usize) -> Result<Vec<u64>, SamplingError> {
    let n64 = n as u64;
    if generator == 0 || gcd(generator, n64) != 1 {
        return Err(SamplingError::KorobovGenerator { generator, n });
    }
    let mut g = Vec::with_capacity(dim);
    let mut power = 1u64 % n64;
    for _ in 0..dim {
        g.push(power);
        power = (power * (generator % n64)) % n64;
    }
    Ok(g)
}

fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn latin_hypercube(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed, 0);
    let mut pts = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        strata.shuffle(&mut rng);
        for (p, &k) in pts.iter_mut().zip(&strata) {
            let jitter: f64 = rng.sample(Open01);
            // clamp guards the rounding case (k + jitter) / n == (k + 1) / n
            p[d] = ((k as f64 + jitter) / n as f64).min(next_below((k + 1) as f64 / n as f64));
        }
    }
    pts
}

fn next_below(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

fn uniform(n: usize, dim: usize, seed: u64, stream: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed, stream);
    (0..n).map(|_| (0..dim).map(|_| rng.sample(Open01)).collect()).collect()
}

fn check(n: usize, dim: usize) -> Result<(), SamplingError> {
    if n == 0 {
        return Err(SamplingError::EmptyRequest);
    }
    if !(1..=3).contains(&dim) {
        return Err(SamplingError::Dimension(dim));
    }
    Ok(())
}

/// `n` points of the requested kind in `[0, 1)^dim`.
///
/// Halton uses indices `1..=n` with bases 2, 3, 5. Hammersley uses the grid
/// `i / n` (`i = 0..n`) as its first coordinate and radical inverses of `i`
/// in bases 2 and 3 for the rest. Korobov returns the rank-1 lattice
/// `i * (1, a, a^2 mod n) / n`.
pub fn unit_points(kind: SamplerKind, n: usize, dim: usize) -> Result<Vec<Vec<f64>>, SamplingError> {
    check(n, dim)?;
    let pts = match kind {
        SamplerKind::Halton => (1..=n as u64)
            .map(|i| HALTON_BASES[..dim].iter().map(|&b| radical_inverse(b, i)).collect())
            .collect(),
        SamplerKind::Hammersley => (0..n as u64)
            .map(|i| {
                let mut p = vec![i as f64 / n as f64];
                p.extend(HALTON_BASES[..dim - 1].iter().map(|&b| radical_inverse(b, i)));
                p
            })
            .collect(),
        SamplerKind::Sobol => sobol(n, dim),
        SamplerKind::KorobovLattice { generator } => {
            let g = korobov_vector(n, generator, dim)?;
            (0..n as u64)
                .map(|i| g.iter().map(|&gk| ((i * gk) % n as u64) as f64 / n as f64).collect())
                .collect()
        }
        SamplerKind::LatinHypercube { seed } => latin_hypercube(n, dim, seed),
        SamplerKind::MonteCarlo { seed } => uniform(n, dim, seed, 1),
        SamplerKind::UniformRandom { seed } => uniform(n, dim, seed, 2),
    };
    Ok(pts)
}

/// Like [`unit_points`] but every coordinate lies strictly inside `(0, 1)`.
///
/// Grid-based sets are shifted by half a cell (Hammersley grid
/// `(i + 1/2) / n` with radical inverses of `i + 1`; Korobov lattice offset
/// by `1 / (2n)`). The other kinds already avoid the cube faces.
pub fn open_unit_points(kind: SamplerKind, n: usize, dim: usize) -> Result<Vec<Vec<f64>>, SamplingError> {
    check(n, dim)?;
    match kind {
        SamplerKind::Hammersley => Ok((0..n as u64)
            .map(|i| {
                let mut p = vec![(i as f64 + 0.5) / n as f64];
                p.extend(HALTON_BASES[..dim - 1].iter().map(|&b| radical_inverse(b, i + 1)));
                p
            })
            .collect()),
        SamplerKind::KorobovLattice { generator } => {
            let g = korobov_vector(n, generator, dim)?;
            Ok((0..n as u64)
                .map(|i| {
                    g.iter()
                        .map(|&gk| (((i * gk) % n as u64) as f64 + 0.5) / n as f64)
                        .collect()
                })
                .collect())
        }
        other => unit_points(other, n, dim),
    }
}

/// Largest gap between the empirical fraction of points and the volume over
/// the `grid x grid` anchored boxes `[0, a) x [0, b)` with `a, b` in
/// `{1/grid, ..., 1}`. A cheap proxy for the 2D star discrepancy.
pub fn anchored_box_discrepancy(points: &[Vec<f64>], grid: usize) -> f64 {
    let n = points.len() as f64;
    let mut worst: f64 = 0.0;
    for ia in 1..=grid {
        let a = ia as f64 / grid as f64;
        for ib in 1..=grid {
            let b = ib as f64 / grid as f64;
            let count = points.iter().filter(|p| p[0] < a && p[1] < b).count() as f64;
            worst = worst.max((count / n - a * b).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        let got: Vec<f64> = (1..=4).map(|i| radical_inverse(2, i)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
        assert_eq!(radical_inverse(3, 1), 1.0 / 3.0);
        assert_eq!(radical_inverse(3, 4), 1.0 / 3.0 + 1.0 / 9.0);
    }

    #[test]
    fn halton_first_points() {
        let pts = unit_points(SamplerKind::Halton, 4, 1).unwrap();
        let flat: Vec<f64> = pts.into_iter().map(|p| p[0]).collect();
        assert_eq!(flat, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn hammersley_grid_coordinate() {
        let pts = unit_points(SamplerKind::Hammersley, 4, 2).unwrap();
        let first: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        assert_eq!(first, vec![0.0, 0.25, 0.5, 0.75]);
        let second: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        assert_eq!(second, vec![0.0, 0.5, 0.25, 0.75]);
    }

    #[test]
    fn sobol_reference_points() {
        // unscrambled Sobol points 1..=7 (index 0 is the origin)
        let expected = [
            [0.5, 0.5, 0.5],
            [0.75, 0.25, 0.25],
            [0.25, 0.75, 0.75],
            [0.375, 0.375, 0.625],
            [0.875, 0.875, 0.125],
            [0.625, 0.125, 0.875],
            [0.125, 0.625, 0.375],
        ];
        let pts = unit_points(SamplerKind::Sobol, 7, 3).unwrap();
        for (p, e) in pts.iter().zip(expected) {
            assert_eq!(p.as_slice(), e.as_slice());
        }
        // deeper indices exercise the higher direction numbers
        let pts = unit_points(SamplerKind::Sobol, 1023, 3).unwrap();
        assert_eq!(pts[776], vec![0.6923828125, 0.9365234375, 0.1630859375]);
        assert_eq!(pts[999], vec![0.2197265625, 0.0966796875, 0.5185546875]);
        assert_eq!(pts[1022], vec![0.0009765625, 0.7529296875, 0.6123046875]);
    }

    #[test]
    fn korobov_lattice_points() {
        let pts = unit_points(SamplerKind::KorobovLattice { generator: 3 }, 5, 3).unwrap();
        // generating vector (1, 3, 9 mod 5 = 4)
        assert_eq!(pts[1], vec![0.2, 0.6, 0.8]);
        assert_eq!(pts[2], vec![0.4, 0.2, 0.6]);
        assert!(unit_points(SamplerKind::KorobovLattice { generator: 17 }, 34, 2).is_err());
    }

    #[test]
    fn rejects_empty_and_bad_dimension() {
        assert!(matches!(
            unit_points(SamplerKind::Halton, 0, 2),
            Err(SamplingError::EmptyRequest)
        ));
        assert!(matches!(
            unit_points(SamplerKind::Sobol, 3, 4),
            Err(SamplingError::Dimension(4))
        ));
    }

    #[test]
    fn open_points_avoid_faces() {
        let kinds = [
            SamplerKind::Halton,
            SamplerKind::Hammersley,
            SamplerKind::Sobol,
            SamplerKind::KorobovLattice { generator: 17 },
            SamplerKind::LatinHypercube { seed: 4 },
            SamplerKind::MonteCarlo { seed: 4 },
            SamplerKind::UniformRandom { seed: 4 },
        ];
        for kind in kinds {
            for p in open_unit_points(kind, 256, 3).unwrap() {
                assert!(p.iter().all(|&u| u > 0.0 && u < 1.0), "{kind:?}: {p:?}");
            }
        }
    }

    #[test]
    fn random_kinds_use_distinct_streams() {
        let mc = unit_points(SamplerKind::MonteCarlo { seed: 1 }, 5, 3).unwrap();
        let ur = unit_points(SamplerKind::UniformRandom { seed: 1 }, 5, 3).unwrap();
        assert_ne!(mc, ur);
        assert_eq!(mc, unit_points(SamplerKind::MonteCarlo { seed: 1 }, 5, 3).unwrap());
    }
}
