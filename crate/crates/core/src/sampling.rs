//! Seeded random samples of states, covectors, and variations.
//!
//! Every randomized sweep in the crate (tests and scenario runner alike)
//! draws from these so that a fixed seed reproduces a run bit for bit.

use crate::geometry::Covector;
use crate::state::StateVector;
use rand::Rng;

/// A state in the interior of the admissible set with moderate velocity,
/// suitable for the randomized identity sweeps.
pub fn admissible_state<R: Rng>(rng: &mut R) -> StateVector {
    StateVector::new(
        rng.gen_range(0.3..3.0),
        rng.gen_range(0.3..3.0),
        [
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
        ],
        rng.gen_range(-0.5..0.5),
        [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ],
    )
}

/// A covector in the positive inner characteristic core: ξ·ξ < 0, ξ₀ > 0.
pub fn core_covector<R: Rng>(rng: &mut R) -> Covector {
    loop {
        let sp: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let len = (sp[0] * sp[0] + sp[1] * sp[1] + sp[2] * sp[2]).sqrt();
        if len < 1e-3 {
            continue;
        }
        let xi0 = len * rng.gen_range(1.05..3.0);
        return Covector([xi0, sp[0], sp[1], sp[2]]);
    }
}

/// An arbitrary covector with components of order one.
pub fn any_covector<R: Rng>(rng: &mut R) -> Covector {
    Covector([
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ])
}

/// A variation direction on the unit sphere of R^10.
pub fn unit_variation<R: Rng>(rng: &mut R) -> StateVector {
    loop {
        let mut v = [0.0; 10];
        let mut norm2 = 0.0f64;
        for x in v.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
            norm2 += *x * *x;
        }
        if norm2 > 1e-6 {
            let norm = norm2.sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            return StateVector(v);
        }
    }
}
