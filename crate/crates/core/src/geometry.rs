//! Left-invariant Riemannian geometry of the 3-dimensional Heisenberg group.
//!
//! The metric is the one-parameter family
//! `g = (1/λ²)dx² + dy² + (x dy + dz)²` on global coordinates `(x, y, z)`,
//! with the left-invariant orthonormal frame
//! `e₁ = ∂y − x∂z`, `e₂ = λ∂x`, `e₃ = ∂z`.
//!
//! Everything here is exact closed-form algebra except the `_numeric`
//! oracles, which recompute the same objects by finite differences so the
//! two routes can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{H3Error, Result};
use crate::numdiff;

/// The strictly positive metric parameter λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ModelParams {
    lambda: f64,
}

impl ModelParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(H3Error::InvalidParam(format!(
                "lambda must be a strictly positive real, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl TryFrom<f64> for ModelParams {
    type Error = H3Error;
    fn try_from(v: f64) -> Result<Self> {
        ModelParams::new(v)
    }
}

impl From<ModelParams> for f64 {
    fn from(p: ModelParams) -> f64 {
        p.lambda
    }
}

/// A point of H₃ in global coordinates; all of R³ is valid.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointH3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointH3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Tangent vector components in the coordinate basis (∂x, ∂y, ∂z).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoordVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl CoordVector {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self { dx, dy, dz }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.dx, s * self.dy, s * self.dz)
    }
}

/// Tangent vector components in the orthonormal frame (e₁, e₂, e₃).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl FrameVector {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { a1, a2, a3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a1, s * self.a2, s * self.a3)
    }

    /// Euclidean dot of frame components; equals g because the frame is
    /// orthonormal.
    pub fn dot(&self, other: &FrameVector) -> f64 {
        self.a1 * other.a1 + self.a2 * other.a2 + self.a3 * other.a3
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Which of the four generators of the Killing algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KillingTag {
    K1,
    K2,
    K3,
    K4,
}

impl KillingTag {
    pub const ALL: [KillingTag; 4] = [KillingTag::K1, KillingTag::K2, KillingTag::K3, KillingTag::K4];

    pub fn label(&self) -> &'static str {
        match self {
            KillingTag::K1 => "K1",
            KillingTag::K2 => "K2",
            KillingTag::K3 => "K3",
            KillingTag::K4 => "K4",
        }
    }
}

/// A Killing field selection: one of the four generators, optionally scaled
/// (any scalar multiple of a Killing field is Killing).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingFieldId {
    pub tag: KillingTag,
    pub scale: f64,
}

impl KillingFieldId {
    pub fn new(tag: KillingTag) -> Self {
        Self { tag, scale: 1.0 }
    }

    pub fn scaled(tag: KillingTag, scale: f64) -> Result<Self> {
        if !scale.is_finite() {
            return Err(H3Error::InvalidParam(format!(
                "killing field scale must be finite, got {scale}"
            )));
        }
        Ok(Self { tag, scale })
    }

    pub fn is_unit(&self) -> bool {
        self.scale == 1.0
    }
}

// --- small 3x3 helpers -----------------------------------------------------

pub(crate) type Mat3 = [[f64; 3]; 3];

pub(crate) fn mat3_det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn mat3_inv(m: &Mat3) -> Mat3 {
    let det = mat3_det(m);
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2) / det, -c(0, 2, 1, 2) / det, c(0, 1, 1, 2) / det],
        [-c(1, 2, 0, 2) / det, c(0, 2, 0, 2) / det, -c(0, 1, 0, 2) / det],
        [c(1, 2, 0, 1) / det, -c(0, 2, 0, 1) / det, c(0, 1, 0, 1) / det],
    ]
}

// --- metric and frame ------------------------------------------------------

/// Coordinate components of the metric at `pt`, basis order (∂x, ∂y, ∂z):
/// `[[1/λ², 0, 0], [0, 1 + x², x], [0, x, 1]]`.
pub fn metric_matrix(p: &ModelParams, pt: &PointH3) -> Mat3 {
    let l = p.lambda();
    let x = pt.x;
    [
        [1.0 / (l * l), 0.0, 0.0],
        [0.0, 1.0 + x * x, x],
        [0.0, x, 1.0],
    ]
}

/// The metric pairing g(u, v) at `pt`.
pub fn inner(p: &ModelParams, pt: &PointH3, u: &CoordVector, v: &CoordVector) -> f64 {
    let g = metric_matrix(p, pt);
    let ua = u.as_array();
    let va = v.as_array();
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += ua[i] * g[i][j] * va[j];
        }
    }
    s
}

/// Express a coordinate tangent vector in the orthonormal frame:
/// `(dy, dx/λ, dz + x·dy)`.
pub fn coordinate_to_frame(p: &ModelParams, pt: &PointH3, v: &CoordVector) -> FrameVector {
    FrameVector::new(v.dy, v.dx / p.lambda(), v.dz + pt.x * v.dy)
}

/// Inverse of [`coordinate_to_frame`]: `(λ·a2, a1, a3 − x·a1)`.
pub fn frame_to_coordinate(p: &ModelParams, pt: &PointH3, w: &FrameVector) -> CoordVector {
    CoordVector::new(p.lambda() * w.a2, w.a1, w.a3 - pt.x * w.a1)
}

/// The frame field e_i (i in 1..=3) as a coordinate vector at `pt`.
pub fn frame_field(p: &ModelParams, i: usize, pt: &PointH3) -> CoordVector {
    match i {
        1 => CoordVector::new(0.0, 1.0, -pt.x),
        2 => CoordVector::new(p.lambda(), 0.0, 0.0),
        3 => CoordVector::new(0.0, 0.0, 1.0),
        _ => panic!("frame index must be 1, 2 or 3, got {i}"),
    }
}

/// The Levi-Civita connection on the frame: entry `[i-1][j-1]` holds the
/// frame components of ∇_{eᵢ} eⱼ. Only six entries are nonzero:
/// ∇_{e₁}e₂ = (λ/2)e₃, ∇_{e₂}e₃ = (λ/2)e₁, ∇_{e₃}e₂ = (λ/2)e₁ and the
/// metric-compatibility mirrors with opposite sign.
pub fn connection_table(p: &ModelParams) -> [[FrameVector; 3]; 3] {
    let h = p.lambda() / 2.0;
    let z = FrameVector::default();
    [
        [
            z,
            FrameVector::new(0.0, 0.0, h),
            FrameVector::new(0.0, -h, 0.0),
        ],
        [
            FrameVector::new(0.0, 0.0, -h),
            z,
            FrameVector::new(h, 0.0, 0.0),
        ],
        [
            FrameVector::new(0.0, -h, 0.0),
            FrameVector::new(h, 0.0, 0.0),
            z,
        ],
    ]
}

/// Coordinate Christoffel symbols Γᵏᵢⱼ at `pt`, computed from central
/// finite differences of [`metric_matrix`]. Indexed `[k][i][j]`.
pub fn christoffel_numeric(p: &ModelParams, pt: &PointH3) -> [[[f64; 3]; 3]; 3] {
    let g_at = |q: [f64; 3]| metric_matrix(p, &PointH3::new(q[0], q[1], q[2]));
    let base = pt.as_array();

    // dg[l][i][j] = ∂_l g_ij
    let mut dg = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                dg[l][i][j] = numdiff::partial(|q| g_at(q)[i][j], base, l);
            }
        }
    }

    let ginv = mat3_inv(&metric_matrix(p, pt));
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Covariant derivative ∇_u V of a coordinate vector field `field` at `pt`,
/// using numeric Christoffel symbols and finite differences of the field.
pub fn covariant_derivative_numeric<F>(
    p: &ModelParams,
    field: &F,
    pt: &PointH3,
    u: &CoordVector,
) -> CoordVector
where
    F: Fn(&PointH3) -> CoordVector,
{
    let gamma = christoffel_numeric(p, pt);
    let base = pt.as_array();
    let ua = u.as_array();
    let k_here = field(pt).as_array();

    let mut out = [0.0; 3];
    for k in 0..3 {
        // directional derivative u^i ∂_i K^k
        let mut s = 0.0;
        for i in 0..3 {
            s += ua[i]
                * numdiff::partial(
                    |q| field(&PointH3::new(q[0], q[1], q[2])).as_array()[k],
                    base,
                    i,
                );
        }
        for i in 0..3 {
            for j in 0..3 {
                s += gamma[k][i][j] * ua[i] * k_here[j];
            }
        }
        out[k] = s;
    }
    CoordVector::new(out[0], out[1], out[2])
}

/// Cross product on frame components, oriented so that e₁×e₂ = e₃.
/// This is the unique orientation for which K₁×t reproduces the Lorentz
/// force of the contact magnetic field.
pub fn cross(u: &FrameVector, v: &FrameVector) -> FrameVector {
    FrameVector::new(
        u.a2 * v.a3 - u.a3 * v.a2,
        u.a3 * v.a1 - u.a1 * v.a3,
        u.a1 * v.a2 - u.a2 * v.a1,
    )
}

/// Coordinate components of the selected Killing field at `pt`.
///
/// The coordinate forms are canonical:
/// K₁ = ∂z, K₂ = ∂y, K₃ = ∂x − y∂z,
/// K₄ = λ²y∂x − x∂y − ½(λ²y² − x²)∂z.
/// Frame forms are always obtained through [`coordinate_to_frame`].
pub fn killing_field(id: &KillingFieldId, p: &ModelParams, pt: &PointH3) -> CoordVector {
    let l = p.lambda();
    let v = match id.tag {
        KillingTag::K1 => CoordVector::new(0.0, 0.0, 1.0),
        KillingTag::K2 => CoordVector::new(0.0, 1.0, 0.0),
        KillingTag::K3 => CoordVector::new(1.0, 0.0, -pt.y),
        KillingTag::K4 => CoordVector::new(
            l * l * pt.y,
            -pt.x,
            -0.5 * (l * l * pt.y * pt.y - pt.x * pt.x),
        ),
    };
    v.scale(id.scale)
}

/// Frame components of the selected Killing field (derived by conversion).
pub fn killing_field_frame(id: &KillingFieldId, p: &ModelParams, pt: &PointH3) -> FrameVector {
    coordinate_to_frame(p, pt, &killing_field(id, p, pt))
}

/// The frame form of K₄ exactly as printed in the source material:
/// `−x e₁ + λy e₂ − ½(λ²y² − 3x²) e₃`. Converting the coordinate K₄
/// through the frame instead yields an e₃-coefficient of −½(λ²y² + x²);
/// both versions are fed to the Killing-residual oracle side by side.
pub fn k4_frame_as_printed(p: &ModelParams, pt: &PointH3) -> FrameVector {
    let l = p.lambda();
    FrameVector::new(
        -pt.x,
        l * pt.y,
        -0.5 * (l * l * pt.y * pt.y - 3.0 * pt.x * pt.x),
    )
}

/// Killing-equation residual g(∇_u K, v) + g(∇_v K, u) for an arbitrary
/// coordinate vector field, via the numeric connection oracle. Zero (to
/// tolerance) exactly when the field is Killing.
pub fn killing_residual_of<F>(
    p: &ModelParams,
    field: &F,
    pt: &PointH3,
    u: &CoordVector,
    v: &CoordVector,
) -> f64
where
    F: Fn(&PointH3) -> CoordVector,
{
    let du = covariant_derivative_numeric(p, field, pt, u);
    let dv = covariant_derivative_numeric(p, field, pt, v);
    inner(p, pt, &du, v) + inner(p, pt, &dv, u)
}

/// [`killing_residual_of`] specialised to one of the four generators.
pub fn killing_residual(
    p: &ModelParams,
    id: &KillingFieldId,
    pt: &PointH3,
    u: &CoordVector,
    v: &CoordVector,
) -> f64 {
    let id = *id;
    let p2 = *p;
    killing_residual_of(p, &move |q: &PointH3| killing_field(&id, &p2, q), pt, u, v)
}

/// Lie bracket [eᵢ, eⱼ] computed as a coordinate vector-field commutator by
/// finite differences, returned in frame components. Matches
/// [e₁,e₂] = λe₃ with all other brackets zero.
pub fn frame_bracket_numeric(p: &ModelParams, i: usize, j: usize, pt: &PointH3) -> FrameVector {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j), "frame indices must be in 1..=3");
    let base = pt.as_array();
    let comp = |idx: usize, k: usize, q: [f64; 3]| {
        frame_field(p, idx, &PointH3::new(q[0], q[1], q[2])).as_array()[k]
    };
    let ui = frame_field(p, i, pt).as_array();
    let uj = frame_field(p, j, pt).as_array();

    let mut out = [0.0; 3];
    for k in 0..3 {
        let mut s = 0.0;
        for a in 0..3 {
            s += ui[a] * numdiff::partial(|q| comp(j, k, q), base, a);
            s -= uj[a] * numdiff::partial(|q| comp(i, k, q), base, a);
        }
        out[k] = s;
    }
    coordinate_to_frame(p, pt, &CoordVector::new(out[0], out[1], out[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lam(l: f64) -> ModelParams {
        ModelParams::new(l).unwrap()
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(ModelParams::new(0.0).is_err());
        assert!(ModelParams::new(-1.0).is_err());
        assert!(ModelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn metric_identity_at_origin_lambda_one() {
        let g = metric_matrix(&lam(1.0), &PointH3::default());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g[i][j], expect);
            }
        }
    }

    #[test]
    fn metric_at_x_one_lambda_two() {
        let g = metric_matrix(&lam(2.0), &PointH3::new(1.0, 5.0, -3.0));
        assert_eq!(g[0][0], 0.25);
        assert_eq!(g[1][1], 2.0);
        assert_eq!(g[1][2], 1.0);
        assert_eq!(g[2][1], 1.0);
        assert_eq!(g[2][2], 1.0);
    }

    #[test]
    fn metric_determinant_is_inverse_lambda_squared() {
        for l in [0.5, 1.0, 2.0, 7.0] {
            let p = lam(l);
            for pt in [
                PointH3::new(0.3, -1.2, 4.0),
                PointH3::new(-5.0, 0.0, 0.1),
                PointH3::default(),
            ] {
                let det = mat3_det(&metric_matrix(&p, &pt));
                assert!((det - 1.0 / (l * l)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inner_cross_term() {
        let p = lam(1.0);
        let pt = PointH3::new(1.0, 0.0, 0.0);
        let u = CoordVector::new(0.0, 1.0, 0.0);
        let v = CoordVector::new(0.0, 0.0, 1.0);
        assert!((inner(&p, &pt, &u, &v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inner_dx_term() {
        let p = lam(2.0);
        let pt = PointH3::new(3.0, 1.0, -2.0);
        let u = CoordVector::new(1.0, 0.0, 0.0);
        assert!((inner(&p, &pt, &u, &u) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn frame_conversion_examples() {
        let p = lam(2.0);
        let w = coordinate_to_frame(&p, &PointH3::default(), &CoordVector::new(1.0, 0.0, 0.0));
        assert_eq!(w.as_array(), [0.0, 0.5, 0.0]);

        let p1 = lam(1.0);
        let w = coordinate_to_frame(&p1, &PointH3::new(3.0, 0.0, 0.0), &CoordVector::new(0.0, 1.0, 0.0));
        assert_eq!(w.as_array(), [1.0, 0.0, 3.0]);

        let v = frame_to_coordinate(&p1, &PointH3::new(2.0, 0.0, 0.0), &FrameVector::new(1.0, 0.0, 0.0));
        assert_eq!(v.as_array(), [0.0, 1.0, -2.0]);

        let v = frame_to_coordinate(&lam(3.0), &PointH3::default(), &FrameVector::new(0.0, 1.0, 0.0));
        assert_eq!(v.as_array(), [3.0, 0.0, 0.0]);
    }

    #[test]
    fn connection_table_entries() {
        let t = connection_table(&lam(1.0));
        // ∇_{e1}e3 = -(λ/2) e2
        assert_eq!(t[0][2].as_array(), [0.0, -0.5, 0.0]);
        // diagonal entries vanish
        for i in 0..3 {
            assert_eq!(t[i][i].as_array(), [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn connection_is_metric_compatible() {
        // g(∇_{ei}ej, ek) + g(ej, ∇_{ei}ek) = 0 over all 27 triples
        for l in [0.5, 1.0, 2.0] {
            let t = connection_table(&lam(l));
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let s = t[i][j].as_array()[k] + t[i][k].as_array()[j];
                        assert!(s.abs() < 1e-15, "i={i} j={j} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_yz_entry_at_origin() {
        // frame relation ∇_{e1}e3 = -(λ/2)e2 pushed through the frame gives
        // Γ^x_{yz} = -λ²/2 at the origin.
        let gamma = christoffel_numeric(&lam(1.0), &PointH3::default());
        assert!((gamma[0][1][2] - (-0.5)).abs() < 1e-9);
    }

    #[test]
    fn christoffel_symmetric_in_lower_indices() {
        let mut rng = crate::testutil::rng(7);
        let p = lam(1.7);
        for _ in 0..50 {
            let pt = crate::testutil::random_point(&mut rng);
            let gamma = christoffel_numeric(&p, &pt);
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((gamma[k][i][j] - gamma[k][j][i]).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_reconstructs_connection_table() {
        // ∇_{ei}ej from coordinate Christoffels + frame derivatives must
        // match the closed-form table.
        let mut rng = crate::testutil::rng(11);
        for l in [0.5, 1.0, 2.0] {
            let p = lam(l);
            let table = connection_table(&p);
            for _ in 0..5 {
                let pt = crate::testutil::random_point(&mut rng);
                for i in 1..=3 {
                    for j in 1..=3 {
                        let ei = frame_field(&p, i, &pt);
                        let nabla = covariant_derivative_numeric(
                            &p,
                            &|q: &PointH3| frame_field(&p, j, q),
                            &pt,
                            &ei,
                        );
                        let got = coordinate_to_frame(&p, &pt, &nabla);
                        let want = table[i - 1][j - 1];
                        for (a, b) in got.as_array().iter().zip(want.as_array()) {
                            assert!((a - b).abs() < 1e-6, "i={i} j={j} l={l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cross_examples() {
        let c = cross(&FrameVector::new(0.0, 0.0, 1.0), &FrameVector::new(2.0, 3.0, 5.0));
        assert_eq!(c.as_array(), [-3.0, 2.0, 0.0]);
        let c = cross(&FrameVector::new(1.0, 0.0, 0.0), &FrameVector::new(0.0, 1.0, 0.0));
        assert_eq!(c.as_array(), [0.0, 0.0, 1.0]);
        let u = FrameVector::new(1.3, -0.2, 0.7);
        let c = cross(&u, &u);
        assert_eq!(c.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn killing_field_examples() {
        let p = lam(1.0);
        let k3 = killing_field(&KillingFieldId::new(KillingTag::K3), &p, &PointH3::new(7.0, 2.0, 0.0));
        assert_eq!(k3.as_array(), [1.0, 0.0, -2.0]);

        let k2 = killing_field_frame(&KillingFieldId::new(KillingTag::K2), &p, &PointH3::new(4.0, 0.0, 0.0));
        assert_eq!(k2.as_array(), [1.0, 0.0, 4.0]);

        let k4 = killing_field(&KillingFieldId::new(KillingTag::K4), &p, &PointH3::new(1.0, 1.0, 0.0));
        assert_eq!(k4.as_array(), [1.0, -1.0, 0.0]);
    }

    #[test]
    fn killing_residual_vanishes_for_generators() {
        let mut rng = crate::testutil::rng(23);
        for l in [0.5, 1.0, 2.0] {
            let p = lam(l);
            for tag in KillingTag::ALL {
                let id = KillingFieldId::new(tag);
                for _ in 0..10 {
                    let pt = crate::testutil::random_point(&mut rng);
                    let u = crate::testutil::random_coord(&mut rng);
                    let v = crate::testutil::random_coord(&mut rng);
                    let r = killing_residual(&p, &id, &pt, &u, &v);
                    assert!(r.abs() < 1e-6, "{tag:?} λ={l} residual={r}");
                }
            }
        }
    }

    #[test]
    fn killing_residual_zero_vectors() {
        let p = lam(1.0);
        let z = CoordVector::default();
        let r = killing_residual(&p, &KillingFieldId::new(KillingTag::K1), &PointH3::new(1.0, 2.0, 3.0), &z, &z);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn negative_control_field_is_not_killing() {
        // ∂y + z∂x fails the Killing equation somewhere.
        let p = lam(1.0);
        let field = |q: &PointH3| CoordVector::new(q.z, 1.0, 0.0);
        let mut rng = crate::testutil::rng(31);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let pt = crate::testutil::random_point(&mut rng);
            let u = crate::testutil::random_coord(&mut rng);
            let v = crate::testutil::random_coord(&mut rng);
            worst = worst.max(killing_residual_of(&p, &field, &pt, &u, &v).abs());
        }
        assert!(worst > 1e-2, "negative control residual only {worst}");
    }

    #[test]
    fn printed_k4_frame_disagrees_with_coordinate_form() {
        let p = lam(1.0);
        let pt = PointH3::new(1.0, 0.5, 0.0);
        let derived = killing_field_frame(&KillingFieldId::new(KillingTag::K4), &p, &pt);
        let printed = k4_frame_as_printed(&p, &pt);
        assert!((derived.a1 - printed.a1).abs() < 1e-15);
        assert!((derived.a2 - printed.a2).abs() < 1e-15);
        // e3 coefficients: -(λ²y²+x²)/2 vs -(λ²y²-3x²)/2
        assert!((derived.a3 - printed.a3).abs() > 1.0);
    }

    #[test]
    fn frame_brackets() {
        let p = lam(3.0);
        let pt = PointH3::new(0.4, -0.3, 1.1);
        let b = frame_bracket_numeric(&p, 1, 2, &pt);
        assert!((b.a1).abs() < 1e-6 && (b.a2).abs() < 1e-6 && (b.a3 - 3.0).abs() < 1e-6);
        let b = frame_bracket_numeric(&p, 1, 3, &pt);
        assert!(b.norm() < 1e-6);
        let b = frame_bracket_numeric(&p, 2, 2, &pt);
        assert_eq!(b.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn frame_orthonormality() {
        let mut rng = crate::testutil::rng(41);
        for l in [0.5, 1.0, 2.0, 7.0] {
            let p = lam(l);
            for _ in 0..100 {
                let pt = crate::testutil::random_point(&mut rng);
                for i in 1..=3 {
                    for j in 1..=3 {
                        let gij = inner(&p, &pt, &frame_field(&p, i, &pt), &frame_field(&p, j, &pt));
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((gij - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn metric_positive_definite() {
        let mut rng = crate::testutil::rng(43);
        for l in [0.5, 1.0, 2.0, 7.0] {
            let p = lam(l);
            for _ in 0..50 {
                let pt = crate::testutil::random_point(&mut rng);
                let g = metric_matrix(&p, &pt);
                // leading principal minors
                let m1 = g[0][0];
                let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
                let m3 = mat3_det(&g);
                assert!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn frame_roundtrip_is_identity(
            l in 0.2f64..5.0,
            x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0,
            dx in -5.0f64..5.0, dy in -5.0f64..5.0, dz in -5.0f64..5.0,
        ) {
            let p = lam(l);
            let pt = PointH3::new(x, y, z);
            let v = CoordVector::new(dx, dy, dz);
            let back = frame_to_coordinate(&p, &pt, &coordinate_to_frame(&p, &pt, &v));
            for (a, b) in back.as_array().iter().zip(v.as_array()) {
                prop_assert!((a - b).abs() < 1e-13);
            }
        }

        #[test]
        fn cross_matches_volume_form(
            u1 in -3.0f64..3.0, u2 in -3.0f64..3.0, u3 in -3.0f64..3.0,
            v1 in -3.0f64..3.0, v2 in -3.0f64..3.0, v3 in -3.0f64..3.0,
            w1 in -3.0f64..3.0, w2 in -3.0f64..3.0, w3 in -3.0f64..3.0,
        ) {
            let u = FrameVector::new(u1, u2, u3);
            let v = FrameVector::new(v1, v2, v3);
            let w = FrameVector::new(w1, w2, w3);
            // g(u×v, w) equals the determinant of frame components
            let det = mat3_det(&[u.as_array(), v.as_array(), w.as_array()]);
            prop_assert!((cross(&u, &v).dot(&w) - det).abs() < 1e-12);
            // antisymmetry and orthogonality
            let c = cross(&u, &v);
            let cr = cross(&v, &u);
            prop_assert!((c.a1 + cr.a1).abs() < 1e-12);
            prop_assert!(c.dot(&u).abs() < 1e-12);
        }
    }
}
