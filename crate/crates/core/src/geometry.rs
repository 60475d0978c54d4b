//! Blow-ups of projective space along linear subspaces and complete
//! intersections.
//!
//! Chow rings of centers are modeled by the hyperplane class alone:
//! `A(X) = Q[h]/(h^(m+1))` with `i^* H = h` and `i_*(h^k) = deg(X) H^(d+k)`.
//! A complete-intersection center is assumed smooth and transversal; nothing
//! here checks that, since it cannot be decided from the degrees.

use std::fmt;
use std::sync::Arc;
use web_time::Instant;

use serde::{Deserialize, Serialize};

use crate::blowup::{
    bl_pushforward, bl_restrict, difflp_expansion, porteous_delta, BlowupClass, BlowupContext, Pushforward,
    RingMap, VerificationReport,
};
use crate::bundles::BundleClass;
use crate::chowring::{ChowClass, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{rational, GradedPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Center {
    /// A linear subspace of dimension `dim`.
    Linear { dim: u32 },
    /// A complete intersection of hypersurfaces of the given degrees.
    Ci { degrees: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ambient_dim: u32,
    pub center: Center,
    #[serde(default)]
    pub label: String,
}

impl Scenario {
    pub fn linear(ambient_dim: u32, dim: u32, label: &str) -> Self {
        Scenario { ambient_dim, center: Center::Linear { dim }, label: label.into() }
    }

    pub fn ci(ambient_dim: u32, degrees: &[u32], label: &str) -> Self {
        Scenario { ambient_dim, center: Center::Ci { degrees: degrees.to_vec() }, label: label.into() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(format!("scenario JSON: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        if n == 0 {
            return Err(Error::InvalidScenario("ambient dimension must be positive".into()));
        }
        match &self.center {
            Center::Linear { dim } if *dim >= n => Err(Error::InvalidScenario(format!(
                "linear center of dimension {dim} is not a proper subspace of P^{n}"
            ))),
            Center::Ci { degrees } if degrees.is_empty() || degrees.len() > n as usize => Err(
                Error::InvalidScenario(format!("{} hypersurfaces cannot cut a center in P^{n}", degrees.len())),
            ),
            Center::Ci { degrees } if degrees.contains(&0) => {
                Err(Error::InvalidScenario("hypersurface degrees must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Degrees of the hypersurfaces cutting out the center; hyperplanes for a
    /// linear center.
    pub fn degrees(&self) -> Vec<u32> {
        match &self.center {
            Center::Linear { dim } => vec![1; (self.ambient_dim - dim) as usize],
            Center::Ci { degrees } => degrees.clone(),
        }
    }

    pub fn codim(&self) -> usize {
        self.degrees().len()
    }

    pub fn center_dim(&self) -> u32 {
        self.ambient_dim - self.codim() as u32
    }

    pub fn center_degree(&self) -> u64 {
        self.degrees().iter().map(|&a| u64::from(a)).product()
    }

    /// `label` if set, otherwise a generated description.
    pub fn name(&self) -> String {
        if !self.label.is_empty() {
            return self.label.clone();
        }
        match &self.center {
            Center::Linear { dim } => format!("P^{dim} in P^{}", self.ambient_dim),
            Center::Ci { degrees } => {
                let ds: Vec<String> = degrees.iter().map(u32::to_string).collect();
                format!("CI({}) in P^{}", ds.join(","), self.ambient_dim)
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn scenario_context(s: &Scenario) -> Result<Arc<BlowupContext>> {
    s.validate()?;
    let n = s.ambient_dim;
    let m = s.center_dim();
    let ring_y = RingPresentation::projective_space("H", n)?.into_arc();
    let ring_x = RingPresentation::projective_space("h", m)?.into_arc();
    let tx = ring_x.table();
    let h = GradedPoly::var(tx, 0);
    let restrict = RingMap::new(&ring_y, &ring_x, vec![h.clone()])?;
    let degree = rational(s.center_degree() as i64);
    let class = ChowClass::var(&ring_y, "H")?.pow(s.codim() as u32).scale(&degree);
    let push = Pushforward::new(&ring_x, &ring_y, vec![GradedPoly::var(ring_y.table(), 0)], class)?;
    let mut total = ChowClass::one(&ring_x);
    for a in s.degrees() {
        let factor = ChowClass::new(&ring_x, &(GradedPoly::one(tx) + h.scale(&rational(i64::from(a)))))?;
        total = total.try_mul(&factor)?;
    }
    let normal = BundleClass::from_total(s.codim(), &total)?;
    BlowupContext::new(&ring_y, normal, Some(restrict), Some(push))
}

/// `(1 + H)^(n+1)` on the ambient space.
pub fn ambient_tangent_chern(ring_y: &Arc<RingPresentation>) -> Result<ChowClass> {
    let n = ring_y.dim().ok_or(Error::NoDegreeMap)?;
    let one_plus = ChowClass::parse(ring_y, "1 + H")?;
    Ok(one_plus.pow(n + 1))
}

/// `c(T_X) = (1 + h)^(n+1) / c(N)`.
pub fn center_tangent_chern(s: &Scenario) -> Result<ChowClass> {
    let ctx = scenario_context(s)?;
    tangent_of_center(&ctx, s)
}

fn tangent_of_center(ctx: &BlowupContext, s: &Scenario) -> Result<ChowClass> {
    let ring_x = ctx.ring_x();
    let ambient = ChowClass::parse(ring_x, "1 + h")?.pow(s.ambient_dim + 1);
    ambient.try_mul(&ctx.normal().segre(s.center_dim())?)
}

/// Topological Euler characteristic of the center: the degree of `c_top(T_X)`
/// times the number of points in `h^m`.
pub fn center_euler_characteristic(s: &Scenario) -> Result<Rational> {
    let ctx = scenario_context(s)?;
    Ok(tangent_of_center(&ctx, s)?.degree()? * rational(s.center_degree() as i64))
}

#[derive(Debug, Clone)]
pub struct BlowupChern {
    /// `c(T)` of the blow-up as `f^* c(Y) + j_*(g^* c(X) alpha)`.
    pub class: BlowupClass,
    /// `f_*` of the class.
    pub pushed: ChowClass,
    /// `j^*` of the class.
    pub restricted: ChowClass,
    pub chi: Rational,
    pub center_chi: Rational,
}

pub fn blowup_total_chern(s: &Scenario) -> Result<BlowupChern> {
    blowup_total_chern_in(&scenario_context(s)?, s)
}

/// As [`blowup_total_chern`], on a context already built by
/// [`scenario_context`].
pub fn blowup_total_chern_in(ctx: &Arc<BlowupContext>, s: &Scenario) -> Result<BlowupChern> {
    let ctx = ctx.clone();
    let cy = ambient_tangent_chern(ctx.ring_y())?;
    let cx = tangent_of_center(&ctx, s)?;
    let class = BlowupClass::pullback(&ctx, &cy)?.try_add(&porteous_delta(&ctx, &cx)?)?;
    let pushed = bl_pushforward(&class)?;
    let restricted = bl_restrict(&class)?;
    let chi = pushed.degree()?;
    let center_chi = cx.degree()? * rational(s.center_degree() as i64);
    Ok(BlowupChern { class, pushed, restricted, chi, center_chi })
}

/// Hypersurface classes `a_i H` cutting out the center.
pub fn hypersurface_classes(ctx: &BlowupContext, s: &Scenario) -> Result<Vec<ChowClass>> {
    let h = ChowClass::var(ctx.ring_y(), "H")?;
    Ok(s.degrees().into_iter().map(|a| h.scale(&rational(i64::from(a)))).collect())
}

/// The same class through the log-tangent form, with the hypersurfaces of the
/// center as the `Z_i`.
pub fn blowup_total_chern_difflp(ctx: &Arc<BlowupContext>, s: &Scenario) -> Result<BlowupClass> {
    let hyper = hypersurface_classes(ctx, s)?;
    let cy = ambient_tangent_chern(ctx.ring_y())?;
    difflp_expansion(ctx, &hyper)?.apply(&BlowupClass::pullback(ctx, &cy)?)
}

/// `chi(Bl) = chi(P^n) + (d - 1) chi(X)`.
pub fn euler_identity_check(s: &Scenario) -> VerificationReport {
    let start = Instant::now();
    let mut parameters = std::collections::BTreeMap::new();
    parameters.insert("scenario".to_string(), s.name().into());
    let outcome = (|| {
        let r = blowup_total_chern(s)?;
        let expected = rational(i64::from(s.ambient_dim) + 1) + rational(s.codim() as i64 - 1) * r.center_chi.clone();
        if r.chi == expected {
            Ok(None)
        } else {
            Ok(Some(format!("chi = {}, expected {}", r.chi, expected)))
        }
    })();
    VerificationReport::from_outcome("euler_identity", parameters, outcome, start)
}

/// Blow-ups of projective spaces of dimension at most 5.
pub fn catalog() -> Vec<Scenario> {
    vec![
        Scenario::linear(2, 0, "point in P^2"),
        Scenario::linear(3, 1, "line in P^3"),
        Scenario::ci(3, &[2, 2], "CI(2,2) in P^3"),
        Scenario::linear(3, 0, "point in P^3"),
        Scenario::linear(3, 2, "plane in P^3"),
        Scenario::ci(2, &[2], "conic in P^2"),
        Scenario::ci(2, &[2, 2], "four points in P^2"),
        Scenario::ci(3, &[3, 3], "CI(3,3) in P^3"),
        Scenario::linear(4, 1, "line in P^4"),
        Scenario::linear(4, 2, "plane in P^4"),
        Scenario::ci(4, &[2, 3], "CI(2,3) in P^4"),
        Scenario::ci(4, &[2, 2, 2], "CI(2,2,2) in P^4"),
        Scenario::ci(4, &[3], "cubic threefold in P^4"),
        Scenario::linear(5, 0, "point in P^5"),
        Scenario::ci(5, &[2, 2, 2, 2], "CI(2,2,2,2) in P^5"),
    ]
}
