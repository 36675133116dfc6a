//! Riemannian geometry and magnetic-curve dynamics of the 3-dimensional
//! Heisenberg group.
//!
//! The model space is R³ with coordinates (x, y, z) and the left-invariant
//! metric g = (1/λ²) dx² + dy² + (x dy + dz)², parametrised by λ > 0.
//! The crate provides:
//!
//! - [`geometry`]: the metric, its orthonormal frame, the Levi-Civita
//!   connection, the frame cross product and the canonical Killing fields;
//! - [`contact`]: the almost-contact structure (φ, ξ, η) and measured
//!   checks of its identities;
//! - [`dynamics`]: the geodesic and Killing-magnetic second-order systems,
//!   their conserved speed and per-field first integrals;
//! - [`integrate`]: fixed RK4 and embedded Dormand-Prince 5(4) integrators
//!   with conservation diagnostics;
//! - [`closedform`]: the catalogue of explicit solution families, each in a
//!   `Printed` and a `Corrected` variant;
//! - [`verify`]: residual oracles that grade closed-form candidates against
//!   the equations of motion, structure self-tests, and the resulting
//!   defect ledger.
//!
//! Everything is deterministic: random sampling is seeded, and no
//! parallelism or time-dependent state is used.

pub mod contact;
pub mod closedform;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod numdiff;
pub mod verify;

pub use dynamics::{State, SystemKind};
pub use error::{H3Error, Result};
pub use geometry::{CoordVector, FrameVector, KillingFieldId, KillingTag, ModelParams, PointH3};

#[cfg(test)]
pub(crate) mod testutil {
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::dynamics::{State, SystemKind};
    use crate::geometry::{CoordVector, FrameVector, KillingTag, PointH3};

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn r(rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-2.0..2.0)
    }

    pub fn random_point(rng: &mut ChaCha8Rng) -> PointH3 {
        PointH3::new(r(rng), r(rng), r(rng))
    }

    pub fn random_coord(rng: &mut ChaCha8Rng) -> CoordVector {
        CoordVector::new(r(rng), r(rng), r(rng))
    }

    pub fn random_frame(rng: &mut ChaCha8Rng) -> FrameVector {
        FrameVector::new(r(rng), r(rng), r(rng))
    }

    pub fn random_state(rng: &mut ChaCha8Rng) -> State {
        State::new(r(rng), r(rng), r(rng), r(rng), r(rng), r(rng))
    }

    pub fn all_systems() -> Vec<SystemKind> {
        let mut v = vec![SystemKind::Geodesic];
        v.extend(KillingTag::ALL.map(SystemKind::magnetic));
        v
    }
}
