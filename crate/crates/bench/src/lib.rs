//! Seeded fixtures shared by the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbfix_core::{AnyMap, Entry, MapSpec, Matrix, NormKind, PairSpec, PointSet, Vector};

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::new((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).expect("finite coordinates")
}

/// `n` uniform points in `[-10, 10]^dim`.
pub fn point_set(seed: u64, n: usize, dim: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::new((0..n).map(|_| random_vector(&mut rng, dim)).collect(), NormKind::L2).expect("nonempty")
}

/// `x ↦ Ax + c` with `‖A‖_F = 0.9`.
pub fn affine_contraction(seed: u64, dim: usize) -> MapSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let frob = rows.iter().flatten().map(|a| a * a).sum::<f64>().sqrt();
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|a| 0.9 * a / frob).collect())
        .collect();
    MapSpec::affine(Matrix::from_rows(rows).expect("square"), random_vector(&mut rng, dim)).expect("consistent")
}

/// The two-exceptional-point map: zero except at (4,5) and (5,4).
pub fn two_point_map() -> AnyMap {
    let v = |c: [f64; 2]| Vector::new(c.to_vec()).expect("finite");
    AnyMap::from(MapSpec::PiecewiseOverride {
        default: Box::new(MapSpec::affine(Matrix::scaled_identity(2, 0.0), v([0.0, 0.0])).expect("dim 2")),
        overrides: vec![
            Entry::new(v([4.0, 5.0]), v([4.0, 0.0])),
            Entry::new(v([5.0, 4.0]), v([0.0, 4.0])),
        ],
    })
}

/// Integer-spaced grid `[-10, 10]^2` with `steps` points per axis.
pub fn grid(steps: usize) -> PairSpec {
    PairSpec::Grid {
        lower: vec![-10.0, -10.0],
        upper: vec![10.0, 10.0],
        steps,
    }
}
