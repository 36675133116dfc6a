//! The catalogue of explicit solution-curve families: two geodesic families
//! and the magnetic families of the four Killing fields.
//!
//! Every family ships in two variants. `Printed` is a verbatim
//! transcription of the published closed-form expressions, kept even where
//! they fail the residual oracle; `Corrected` is the re-derived form
//! obtained by substituting the verified x(t), y(t) into the first-integral
//! relation z' = w − x·y' and integrating, which the oracle classifies as
//! PASS. For the fourth magnetic family the published reduction (which
//! assumes x ≡ y) is inconsistent with the system; the corrected variant is
//! the x ≡ 0 branch, whose y solves the cubic oscillator y'' = −(λ²/2)y³
//! in terms of the Jacobi cn function.
//!
//! All families — corrected variants included — solve the reduced systems
//! in their as-printed form (`dynamics::printed_system_rhs`), whose
//! connection coupling differs in sign from the speed-preserving Lorentz
//! assembly; see the errata ledger for that finding.

use serde::{Deserialize, Serialize};

use crate::dynamics::{State, SystemKind};
use crate::elliptic;
use crate::error::{H3Error, Result};
use crate::geometry::{KillingTag, ModelParams, PointH3};
use crate::numdiff;

/// The eight curve families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    /// Geodesics with w = z' + x·y' ≡ 0: straight lines in (x, y).
    #[serde(rename = "GEO_I")]
    GeoI,
    /// Geodesics with w ≡ c ≠ 0: exponential profiles in x and y.
    #[serde(rename = "GEO_II")]
    GeoII,
    /// First magnetic family of K₁ (c = 1/λ): parabolic y.
    #[serde(rename = "TK1_1")]
    Tk1A,
    /// Second magnetic family of K₁ (c = −1/λ): parabolic x.
    #[serde(rename = "TK1_2")]
    Tk1B,
    /// Third magnetic family of K₁ (|λc| > 1): hyperbolic exponentials.
    #[serde(rename = "TK1_3")]
    Tk1C,
    /// Magnetic family of K₂ (c = 0): circular x, secular y.
    #[serde(rename = "TK2")]
    Tk2,
    /// Magnetic family of K₃ (c = 0): linear x, exponential y.
    #[serde(rename = "TK3")]
    Tk3,
    /// Magnetic family of K₄ (c = 0).
    #[serde(rename = "TK4")]
    Tk4,
}

impl FamilyId {
    pub const ALL: [FamilyId; 8] = [
        FamilyId::GeoI,
        FamilyId::GeoII,
        FamilyId::Tk1A,
        FamilyId::Tk1B,
        FamilyId::Tk1C,
        FamilyId::Tk2,
        FamilyId::Tk3,
        FamilyId::Tk4,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FamilyId::GeoI => "GEO_I",
            FamilyId::GeoII => "GEO_II",
            FamilyId::Tk1A => "TK1_1",
            FamilyId::Tk1B => "TK1_2",
            FamilyId::Tk1C => "TK1_3",
            FamilyId::Tk2 => "TK2",
            FamilyId::Tk3 => "TK3",
            FamilyId::Tk4 => "TK4",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyId> {
        let up = s.to_ascii_uppercase();
        FamilyId::ALL.into_iter().find(|f| f.label() == up)
    }

    /// The ODE system this family claims to solve.
    pub fn system(&self) -> SystemKind {
        match self {
            FamilyId::GeoI | FamilyId::GeoII => SystemKind::Geodesic,
            FamilyId::Tk1A | FamilyId::Tk1B | FamilyId::Tk1C => SystemKind::magnetic(KillingTag::K1),
            FamilyId::Tk2 => SystemKind::magnetic(KillingTag::K2),
            FamilyId::Tk3 => SystemKind::magnetic(KillingTag::K3),
            FamilyId::Tk4 => SystemKind::magnetic(KillingTag::K4),
        }
    }

    /// Whether the first-integral constant c is a free parameter, and its
    /// fixed value when it is not.
    pub fn fixed_c(&self, lambda: f64) -> Option<f64> {
        match self {
            FamilyId::GeoI => Some(0.0),
            FamilyId::GeoII | FamilyId::Tk1C => None,
            FamilyId::Tk1A => Some(1.0 / lambda),
            FamilyId::Tk1B => Some(-1.0 / lambda),
            FamilyId::Tk2 | FamilyId::Tk3 | FamilyId::Tk4 => Some(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Corrected,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Corrected => "corrected",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Some(Variant::Printed),
            "corrected" => Some(Variant::Corrected),
            _ => None,
        }
    }
}

/// A fully-specified member of a family: variant plus all constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSpec {
    pub family: FamilyId,
    pub variant: Variant,
    pub lambda: f64,
    /// First-integral constant; fixed per family except GEO_II and TK1_3.
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    /// Sign choice of the printed fourth magnetic family; ignored elsewhere.
    pub branch: i8,
}

impl ClosedFormSpec {
    /// Build a spec, forcing c to its family-fixed value where applicable,
    /// and validate it.
    pub fn new(
        family: FamilyId,
        variant: Variant,
        lambda: f64,
        c: f64,
        consts: [f64; 5],
        branch: i8,
    ) -> Result<Self> {
        let c = family.fixed_c(lambda).unwrap_or(c);
        let spec = Self {
            family,
            variant,
            lambda,
            c,
            c1: consts[0],
            c2: consts[1],
            c3: consts[2],
            c4: consts[3],
            c5: consts[4],
            branch,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.lambda)
    }

    pub fn constants(&self) -> [f64; 5] {
        [self.c1, self.c2, self.c3, self.c4, self.c5]
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        for v in [self.c, self.c1, self.c2, self.c3, self.c4, self.c5] {
            if !v.is_finite() {
                return Err(H3Error::InvalidParam("curve constants must be finite".to_string()));
            }
        }
        if self.branch != 1 && self.branch != -1 {
            return Err(H3Error::InvalidParam(format!("branch must be +1 or -1, got {}", self.branch)));
        }
        if let Some(fixed) = self.family.fixed_c(self.lambda) {
            if (self.c - fixed).abs() > 1e-12 * (1.0 + fixed.abs()) {
                return Err(H3Error::DomainViolation(format!(
                    "{} fixes c = {fixed}, got {}",
                    self.family.label(),
                    self.c
                )));
            }
        }
        let lc = self.lambda * self.c;
        match self.family {
            FamilyId::GeoII => {
                if self.c == 0.0 {
                    return Err(H3Error::DomainViolation("GEO_II requires c != 0".to_string()));
                }
            }
            FamilyId::Tk1C => {
                if lc.abs() <= 1.0 {
                    return Err(H3Error::DomainViolation(format!(
                        "TK1_3 requires |lambda*c| > 1, got {}",
                        lc.abs()
                    )));
                }
            }
            FamilyId::Tk3 => {
                if 2.0 * self.lambda * self.c1 - 1.0 <= 0.0 {
                    return Err(H3Error::DomainViolation(format!(
                        "TK3 requires 2*lambda*c1 - 1 > 0, got {}",
                        2.0 * self.lambda * self.c1 - 1.0
                    )));
                }
            }
            FamilyId::Tk4 => {
                if self.variant == Variant::Corrected && self.c1 == 0.0 {
                    return Err(H3Error::DomainViolation(
                        "TK4 corrected requires a nonzero amplitude c1".to_string(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// For the printed TK4 family: the radicand c₁ − (1+λ²)t/(3λ), which
    /// must stay strictly positive.
    fn tk4_radicand(&self, t: f64) -> f64 {
        self.c1 - (1.0 + self.lambda * self.lambda) / (3.0 * self.lambda) * t
    }

    /// Largest |t - t0| over which evaluation is guaranteed to stay inside
    /// the family domain (infinite for pole-free families).
    pub fn domain_margin(&self, t: f64) -> f64 {
        if self.family == FamilyId::Tk4 && self.variant == Variant::Printed {
            let slope = (1.0 + self.lambda * self.lambda) / (3.0 * self.lambda);
            self.tk4_radicand(t) / slope
        } else {
            f64::INFINITY
        }
    }
}

/// Evaluate the curve position at parameter t.
pub fn eval(spec: &ClosedFormSpec, t: f64) -> Result<PointH3> {
    spec.validate()?;
    let l = spec.lambda;
    let (c, c1, c2, c3, c4, c5) = (spec.c, spec.c1, spec.c2, spec.c3, spec.c4, spec.c5);
    let printed = spec.variant == Variant::Printed;
    let pt = match spec.family {
        FamilyId::GeoI => {
            let x = c1 * t + c2;
            let y = c3 * t + c4;
            let z = if printed {
                c1 * c3 / 2.0 * t * t + c2 * c3 * t + c5
            } else {
                -c1 * c3 / 2.0 * t * t - c2 * c3 * t + c5
            };
            PointH3::new(x, y, z)
        }
        FamilyId::GeoII => {
            let u = c * l * t;
            let (ep, em) = (u.exp(), (-u).exp());
            let x = -c1 / c * ep - c2 / c * em + c3;
            let y = c1 / (c * l) * ep - c2 / (c * l) * em + c4;
            let z = if printed {
                (2.0 * c1 * c2 + c * c) / c * t - c3 / (l * c) * (c1 * ep - c2 * em)
                    + (c1 * c1 - c2 * c2) / (2.0 * c * c * l) * em * em
            } else {
                (c + 2.0 * c1 * c2 / c) * t + c1 * c1 / (2.0 * c * c * l) * ep * ep
                    - c2 * c2 / (2.0 * c * c * l) * em * em
                    - c3 / (c * l) * (c1 * ep - c2 * em)
                    + c5
            };
            PointH3::new(x, y, z)
        }
        FamilyId::Tk1A => {
            // printed form verifies; the corrected variant coincides with it
            let x = c1 * t + c2;
            let y = -c1 / l * t * t + c3 * t + c4;
            let z = 2.0 * c1 * c1 / (3.0 * l) * t * t * t + c1 * (c2 / l - c3 / 2.0) * t * t
                + (1.0 / l - c2 * c3) * t
                + c5;
            PointH3::new(x, y, z)
        }
        FamilyId::Tk1B => {
            let x = c1 * l * t * t + c2 * t + c3;
            let y = c1 * t + c4;
            let z = if printed {
                c1 * c2 / 2.0 * t * t + (-1.0 / l + c3 * c1 - c1 * c1 / 3.0 * l) * t + c5
            } else {
                -c1 * c1 * l / 3.0 * t * t * t - c1 * c2 / 2.0 * t * t - (1.0 / l + c1 * c3) * t + c5
            };
            PointH3::new(x, y, z)
        }
        FamilyId::Tk1C => {
            let m = (l * l * c * c - 1.0).sqrt();
            let d = l * c + 1.0;
            let (ep, em) = ((m * t).exp(), (-m * t).exp());
            let x = l / d * (c1 * ep + c2 * em) + c3;
            let y = if printed {
                (c1 * ep - c2 * em) / m + c4
            } else {
                -(c1 * ep - c2 * em) / m + c4
            };
            let z = if printed {
                (c + 2.0 * l * c1 * c2 / d) * t
                    + (c3 * (c1 * em - c2 * ep) + l / (2.0 * d) * (c1 * c1 * em * em - c2 * c2 * ep * ep))
                        / m
                    + c5
            } else {
                (c + 2.0 * l * c1 * c2 / d) * t
                    + l / (2.0 * m * d) * (c1 * c1 * ep * ep - c2 * c2 * em * em)
                    + c3 / m * (c1 * ep - c2 * em)
                    + c5
            };
            PointH3::new(x, y, z)
        }
        FamilyId::Tk2 => {
            let x = c1 * t.cos() - c2 * t.sin();
            let y_core = c1 * c2 / (2.0 * l) * (2.0 * t).cos()
                + (c1 * c1 - c2 * c2) / (4.0 * l) * (2.0 * t).sin()
                + (c1 * c1 + c2 * c2) / (2.0 * l) * t;
            let y = if printed { y_core } else { -y_core + c3 };
            let z_core = (c2 / 4.0 * (c1 * c1 - c2 * c2 / 3.0) * (3.0 * t).cos()
                + c1 / 4.0 * (c1 * c1 / 3.0 - c2 * c2) * (3.0 * t).sin()
                + (1.0 + 0.75 * (c1 * c1 + c2 * c2)) * (c2 * t.cos() + c1 * t.sin()))
                / l;
            let z = if printed { z_core } else { z_core + c5 };
            PointH3::new(x, y, z)
        }
        FamilyId::Tk3 => {
            let sig = (2.0 * l * c1 - 1.0).sqrt();
            let mu = sig / l;
            let (ep, em) = ((mu * t).exp(), (-mu * t).exp());
            let x = c1 * t + c2;
            let y = c3 * ep + c4 * em;
            let z = if printed {
                (-c3 / sig - c3 * (c2 - l * c1 * sig + c1 * t)) * ep
                    + (c4 / sig - c4 * (c2 + l * c1 * sig + c1 * t)) * em
            } else {
                c3 * ep * (-1.0 / sig + l * c1 / sig - c2 - c1 * t)
                    + c4 * em * (1.0 / sig - l * c1 / sig - c2 - c1 * t)
                    + c5
            };
            PointH3::new(x, y, z)
        }
        FamilyId::Tk4 => {
            if printed {
                let q = spec.tk4_radicand(t);
                if q <= 0.0 {
                    return Err(H3Error::DomainViolation(format!(
                        "TK4 printed radicand c1 - (1+lambda^2)t/(3 lambda) = {q} <= 0 at t = {t}"
                    )));
                }
                let s = spec.branch as f64;
                let x = 1.0 / (2.0 * q).sqrt();
                let y = s * x;
                let z = 0.75 * q.ln() + s / (4.0 * q) + c2;
                PointH3::new(x, y, z)
            } else {
                // x ≡ 0; y = A·cn(Ωt + φ₀) with Ω = λ|A|/√2 solves
                // y'' = −(λ²/2) y³, and z integrates z' = −λ y²/2.
                let amp = c1;
                let omega = l * amp.abs() / std::f64::consts::SQRT_2;
                let theta = omega * t + c2;
                let y = amp * elliptic::cn(theta);
                let z = c5
                    - amp.abs() / std::f64::consts::SQRT_2
                        * (2.0 * elliptic::epsilon(theta) - theta);
                PointH3::new(0.0, y, z)
            }
        }
    };
    if ![pt.x, pt.y, pt.z].iter().all(|v| v.is_finite()) {
        return Err(H3Error::NonFinite { t });
    }
    Ok(pt)
}

/// Position and finite-difference velocity at t0, suitable as integrator
/// initial data.
pub fn to_initial_state(spec: &ClosedFormSpec, t0: f64) -> Result<State> {
    let pos = eval(spec, t0)?;
    // the Richardson stencil reaches t0 ± h; require the whole stencil to
    // stay inside the domain
    let h = numdiff::step_first(t0);
    if spec.domain_margin(t0) <= 2.0 * h {
        return Err(H3Error::DomainViolation(format!(
            "t0 = {t0} is too close to the family's pole for finite differencing"
        )));
    }
    let comp = |idx: usize| {
        numdiff::deriv1(
            |t| eval(spec, t).map(|p| p.as_array()[idx]).unwrap_or(f64::NAN),
            t0,
        )
    };
    let (vx, vy, vz) = (comp(0), comp(1), comp(2));
    if ![vx, vy, vz].iter().all(|v| v.is_finite()) {
        return Err(H3Error::DomainViolation(format!(
            "finite-difference stencil at t0 = {t0} left the family domain"
        )));
    }
    Ok(State::new(pos.x, pos.y, pos.z, vx, vy, vz))
}

/// One row of the family catalogue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub family: FamilyId,
    pub constraints: &'static str,
    pub variants: [Variant; 2],
}

/// Enumerate the catalogue: every family, its constant constraints, and the
/// variants it ships.
pub fn families() -> Vec<FamilyInfo> {
    let both = [Variant::Printed, Variant::Corrected];
    vec![
        FamilyInfo { family: FamilyId::GeoI, constraints: "c = 0; c1..c5 free", variants: both },
        FamilyInfo { family: FamilyId::GeoII, constraints: "c != 0; c1..c5 free", variants: both },
        FamilyInfo { family: FamilyId::Tk1A, constraints: "c = 1/lambda; c1..c5 free", variants: both },
        FamilyInfo { family: FamilyId::Tk1B, constraints: "c = -1/lambda; c1..c5 free", variants: both },
        FamilyInfo { family: FamilyId::Tk1C, constraints: "|lambda*c| > 1; c1..c5 free", variants: both },
        FamilyInfo { family: FamilyId::Tk2, constraints: "c = 0; c1, c2 free (corrected adds c3, c5)", variants: both },
        FamilyInfo { family: FamilyId::Tk3, constraints: "c = 0; 2*lambda*c1 - 1 > 0; c1..c4 free (corrected adds c5)", variants: both },
        FamilyInfo {
            family: FamilyId::Tk4,
            constraints: "c = 0; printed: pole at t = 3*lambda*c1/(1+lambda^2), branch = +-1; corrected: amplitude c1 != 0, phase c2, offset c5",
            variants: both,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn spec(family: FamilyId, variant: Variant, lambda: f64) -> ClosedFormSpec {
        let c = family.fixed_c(lambda).unwrap_or(0.0);
        ClosedFormSpec {
            family,
            variant,
            lambda,
            c,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            c4: 0.0,
            c5: 0.0,
            branch: 1,
        }
    }

    fn with_consts(mut s: ClosedFormSpec, c: [f64; 5]) -> ClosedFormSpec {
        [s.c1, s.c2, s.c3, s.c4, s.c5] = c;
        s
    }

    #[test]
    fn catalogue_has_eight_families_with_both_variants() {
        let fams = families();
        assert_eq!(fams.len(), 8);
        for (info, fam) in fams.iter().zip(FamilyId::ALL) {
            assert_eq!(info.family, fam);
            assert_eq!(info.variants, [Variant::Printed, Variant::Corrected]);
        }
        let tk1c = &fams[4];
        assert!(tk1c.constraints.contains("|lambda*c| > 1"));
    }

    #[test]
    fn family_labels_round_trip() {
        for fam in FamilyId::ALL {
            assert_eq!(FamilyId::parse(fam.label()), Some(fam));
            assert_eq!(FamilyId::parse(&fam.label().to_lowercase()), Some(fam));
        }
        assert_eq!(FamilyId::parse("nope"), None);
        assert_eq!(Variant::parse("PRINTED"), Some(Variant::Printed));
        assert_eq!(Variant::parse("corrected"), Some(Variant::Corrected));
    }

    #[test]
    fn tk1a_printed_point_values() {
        let s = with_consts(spec(FamilyId::Tk1A, Variant::Printed, 1.0), [1.0, 1.0, 1.0, 0.0, 0.0]);
        let p0 = eval(&s, 0.0).unwrap();
        assert_eq!(p0.as_array(), [1.0, 0.0, 0.0]);
        let p1 = eval(&s, 1.0).unwrap();
        assert!((p1.x - 2.0).abs() < 1e-15);
        assert!(p1.y.abs() < 1e-15);
        assert!((p1.z - 7.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tk4_printed_point_value_and_branch() {
        let s = spec(FamilyId::Tk4, Variant::Printed, 1.0);
        let p = eval(&s, -1.5).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert!((p.x - r).abs() < 1e-15);
        assert!((p.y - r).abs() < 1e-15);
        assert!((p.z - 0.25).abs() < 1e-15);

        let mut sm = s;
        sm.branch = -1;
        let pm = eval(&sm, -1.5).unwrap();
        assert!((pm.x - r).abs() < 1e-15, "x carries no sign choice");
        assert!((pm.y + r).abs() < 1e-15);
        assert!((pm.z + 0.25).abs() < 1e-15);
    }

    #[test]
    fn tk4_printed_pole_is_rejected() {
        let s = spec(FamilyId::Tk4, Variant::Printed, 1.0);
        // radicand = -(2/3)t: positive only for t < 0
        assert!(eval(&s, -0.5).is_ok());
        match eval(&s, 0.5) {
            Err(H3Error::DomainViolation(_)) => {}
            other => panic!("expected DomainViolation, got {other:?}"),
        }
        match eval(&s, 0.0) {
            Err(H3Error::DomainViolation(_)) => {}
            other => panic!("expected DomainViolation at the pole, got {other:?}"),
        }
    }

    #[test]
    fn constraint_violations_are_domain_errors() {
        let mut s = spec(FamilyId::Tk1C, Variant::Printed, 1.0);
        s.c = 0.5;
        assert!(matches!(eval(&s, 0.0), Err(H3Error::DomainViolation(_))));
        s.c = 2.0;
        assert!(eval(&s, 0.0).is_ok());

        let s = spec(FamilyId::GeoII, Variant::Printed, 1.0);
        assert!(matches!(eval(&s, 0.0), Err(H3Error::DomainViolation(_))));

        let mut s = spec(FamilyId::Tk3, Variant::Printed, 1.0);
        s.c1 = 0.3; // 2*lambda*c1 - 1 < 0
        assert!(matches!(eval(&s, 0.0), Err(H3Error::DomainViolation(_))));

        let mut s = spec(FamilyId::Tk4, Variant::Corrected, 1.0);
        s.c1 = 0.0;
        assert!(matches!(eval(&s, 0.0), Err(H3Error::DomainViolation(_))));
    }

    #[test]
    fn fixed_c_is_normalized_by_new() {
        let s = ClosedFormSpec::new(FamilyId::Tk1A, Variant::Printed, 2.0, 99.0, [0.0; 5], 1)
            .unwrap();
        assert_eq!(s.c, 0.5);
        // but a hand-built spec with the wrong fixed c is rejected
        let mut bad = s;
        bad.c = 1.0;
        assert!(matches!(bad.validate(), Err(H3Error::DomainViolation(_))));
    }

    #[test]
    fn constant_geodesic_has_zero_velocity() {
        let s = with_consts(spec(FamilyId::GeoI, Variant::Printed, 1.0), [0.0, 1.0, 0.0, 2.0, 3.0]);
        for t0 in [-1.0, 0.0, 2.5] {
            let st = to_initial_state(&s, t0).unwrap();
            assert!(st.vx.abs() < 1e-12 && st.vy.abs() < 1e-12 && st.vz.abs() < 1e-12);
        }
    }

    #[test]
    fn tk1a_initial_velocity() {
        let s = with_consts(spec(FamilyId::Tk1A, Variant::Printed, 1.0), [1.0, 1.0, 1.0, 0.0, 0.0]);
        let st = to_initial_state(&s, 0.0).unwrap();
        // x' = c1, y' = c3, z' = 1/lambda - c2*c3 = 0
        assert!((st.vx - 1.0).abs() < 1e-9);
        assert!((st.vy - 1.0).abs() < 1e-9);
        assert!(st.vz.abs() < 1e-9);
    }

    #[test]
    fn geo2_fd_velocity_matches_analytic_derivative() {
        let mut rng = crate::testutil::rng(17);
        for _ in 0..10 {
            let l: f64 = rng.gen_range(0.5..2.0);
            let c: f64 = rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let consts: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let s = with_consts(
                ClosedFormSpec { c, ..spec(FamilyId::GeoII, Variant::Corrected, l) },
                consts,
            );
            let t0: f64 = rng.gen_range(-1.0..1.0);
            let st = to_initial_state(&s, t0).unwrap();
            let [c1, c2, c3, _, _] = consts;
            let u = c * l * t0;
            let (ep, em) = (u.exp(), (-u).exp());
            let vx = -c1 * l * ep + c2 * l * em;
            let vy = c1 * ep + c2 * em;
            // z' = w - x y' with w = c
            let x = -c1 / c * ep - c2 / c * em + c3;
            let vz = c - x * vy;
            assert!((st.vx - vx).abs() < 1e-9 * (1.0 + vx.abs()));
            assert!((st.vy - vy).abs() < 1e-9 * (1.0 + vy.abs()));
            assert!((st.vz - vz).abs() < 1e-9 * (1.0 + vz.abs()));
        }
    }

    #[test]
    fn tk1_reduced_subsystem_residuals() {
        // reduced first-magnetic-family equations after the first-integral
        // substitution: y'' + x'(c + 1/lambda) = 0, x'' + y' lambda (lambda c - 1) = 0
        let residual = |s: &ClosedFormSpec| {
            let l = s.lambda;
            let mut worst: f64 = 0.0;
            for i in 0..100 {
                let t = -1.0 + 2.0 * i as f64 / 99.0;
                let x = |t| eval(s, t).unwrap().x;
                let y = |t| eval(s, t).unwrap().y;
                let xp = numdiff::deriv1(x, t);
                let yp = numdiff::deriv1(y, t);
                let xpp = numdiff::deriv2(x, t);
                let ypp = numdiff::deriv2(y, t);
                let r1 = ypp + xp * (s.c + 1.0 / l);
                let r2 = xpp + yp * l * (l * s.c - 1.0);
                worst = worst.max(r1.abs()).max(r2.abs());
            }
            worst
        };

        let tk1a = with_consts(spec(FamilyId::Tk1A, Variant::Printed, 1.0), [1.0, 1.0, 1.0, 0.5, 0.0]);
        assert!(residual(&tk1a) < 1e-8, "first family printed x,y: {}", residual(&tk1a));

        let mut tk1c_printed =
            with_consts(spec(FamilyId::Tk1C, Variant::Printed, 1.0), [1.0, 1.0, 1.0, 0.0, 0.0]);
        tk1c_printed.c = 2.0f64.sqrt();
        let mut tk1c_corrected = tk1c_printed;
        tk1c_corrected.variant = Variant::Corrected;
        // the printed y carries a sign defect; the corrected variant fixes it
        assert!(residual(&tk1c_printed) > 1e-2, "printed third family should fail: {}", residual(&tk1c_printed));
        assert!(residual(&tk1c_corrected) < 1e-8, "corrected third family: {}", residual(&tk1c_corrected));
    }

    #[test]
    fn tk4_corrected_solves_the_reduced_system() {
        let s = with_consts(spec(FamilyId::Tk4, Variant::Corrected, 1.3), [0.8, 0.4, 0.0, 0.0, -0.2]);
        let l = s.lambda;
        for i in 0..50 {
            let t = -1.0 + 2.0 * i as f64 / 49.0;
            let y = |t| eval(&s, t).unwrap().y;
            let z = |t| eval(&s, t).unwrap().z;
            let yv = y(t);
            let ypp = numdiff::deriv2(y, t);
            assert!((ypp + l * l / 2.0 * yv * yv * yv).abs() < 1e-7, "cubic oscillator at {t}");
            // first integral: w = z' + x y' = z' since x = 0, and w = -lambda y^2 / 2
            let zp = numdiff::deriv1(z, t);
            assert!((zp + l * yv * yv / 2.0).abs() < 1e-9, "z slope at {t}");
        }
    }

    #[test]
    fn eval_rejects_near_pole_initial_states() {
        let s = spec(FamilyId::Tk4, Variant::Printed, 1.0);
        // pole at t = 0: t0 just below it is inside the domain but too close
        // for the derivative stencil
        assert!(matches!(
            to_initial_state(&s, -1e-9),
            Err(H3Error::DomainViolation(_))
        ));
        assert!(to_initial_state(&s, -1.0).is_ok());
    }
}
