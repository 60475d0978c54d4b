//! Classes on a blow-up `f: Bl_X Y -> Y` and the Chern-class formulas.
//!
//! Notation: `i: X -> Y` is the center of codimension `d` with normal bundle
//! `N`, `g: P(N) -> X` the exceptional divisor, `j: P(N) -> Bl_X Y` its
//! inclusion and `z = c_1(O(1))` on `P(N)`. Since `O(exceptional)` restricts to
//! `O(-1)`, the exceptional class `e` satisfies `j^* e = -z` and
//! `j^* j_* = (-z)`.
//!
//! A class on the blow-up is stored as a pair `(y, x)` standing for
//! `f^* y + j_* x`. The pair is not unique; two classes are equal exactly when
//! their push-forwards to `Y` and their restrictions to `P(N)` agree, and
//! [`bl_equal`] decides equality that way.

mod expand;
mod formulas;
mod operator;
mod universal;
mod verify;

use std::sync::Arc;

use crate::bundles::{chern_polys, BundleClass};
use crate::chowring::{ChowClass, ProjectiveBundle, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{GradedPoly, Rational};

pub use expand::{expand_text, Formula, MAX_EXPAND_CODIM};
pub use formulas::{
    difflp_expansion, difflp_operator, difflp_total_chern, main_normal_chern, newnormal_chern, oldrec_operator,
    oldrec_total_chern, porteous_alpha, porteous_alpha_in, porteous_delta, simlem_expansion,
    simlem_normal_chern, GlobalExpansion, Twist,
};
pub use operator::{
    apply_twisted_operator, operator_table, OperatorBinding, PreparedOperator, TwistedOperator,
};
pub use universal::{split_universal_context, universal_bundle, universal_context};
pub use verify::{
    default_trunc, line_in_plane_normal_degree, verify_d1_degeneracy, verify_difflp_equals_porteous, verify_key_formula,
    verify_newnormal_extremes, verify_oldrec_equals_porteous, verify_pushforward_identity,
    verify_restriction_identity, verify_self_intersection, verify_simlem_equals_main,
    VerificationReport,
};

/// A degree-preserving ring homomorphism between presentations, given by the
/// images of the source variables.
#[derive(Debug, Clone)]
pub struct RingMap {
    source: Arc<RingPresentation>,
    target: Arc<RingPresentation>,
    images: Vec<GradedPoly>,
}

impl RingMap {
    /// Checks that every relation of the source maps to zero and that the
    /// target does not keep degrees the source has already killed.
    pub fn new(
        source: &Arc<RingPresentation>,
        target: &Arc<RingPresentation>,
        images: Vec<GradedPoly>,
    ) -> Result<Self> {
        let map = RingMap { source: source.clone(), target: target.clone(), images };
        if let Some(sb) = source.bound() {
            if target.bound().is_none_or(|tb| tb > sb) {
                return Err(Error::InvalidScenario(
                    "ring map target keeps degrees that vanish in the source".into(),
                ));
            }
        }
        for rule in source.rules() {
            let lhs = GradedPoly::var(source.table(), rule.var()).pow(u32::from(rule.power()));
            let relation = lhs.try_sub(rule.replacement())?;
            if !map.apply_poly(&relation)?.is_zero() {
                return Err(Error::InvalidScenario(format!(
                    "ring map does not respect the relation for `{}`",
                    source.table().name(rule.var())
                )));
            }
        }
        Ok(map)
    }

    pub fn parse(
        source: &Arc<RingPresentation>,
        target: &Arc<RingPresentation>,
        images: &[&str],
    ) -> Result<Self> {
        let images = images
            .iter()
            .map(|s| GradedPoly::parse(target.table(), s))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(source, target, images)
    }

    pub fn source(&self) -> &Arc<RingPresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RingPresentation> {
        &self.target
    }

    pub fn images(&self) -> &[GradedPoly] {
        &self.images
    }

    fn apply_poly(&self, p: &GradedPoly) -> Result<ChowClass> {
        let raw = p.map_into(self.target.table(), &self.images, self.target.bound())?;
        ChowClass::new(&self.target, &raw)
    }

    pub fn apply(&self, a: &ChowClass) -> Result<ChowClass> {
        if a.ring() != &self.source {
            return Err(Error::RingMismatch);
        }
        self.apply_poly(a.value())
    }
}

/// `i_*` for a closed embedding presented as `i_*(x) = lift(x) [X]`, where
/// `lift` sends the generators of `A(X)` to classes on `Y` restricting to them.
#[derive(Debug, Clone)]
pub struct Pushforward {
    source: Arc<RingPresentation>,
    target: Arc<RingPresentation>,
    lift: Vec<GradedPoly>,
    class: ChowClass,
}

impl Pushforward {
    pub fn new(
        source: &Arc<RingPresentation>,
        target: &Arc<RingPresentation>,
        lift: Vec<GradedPoly>,
        class: ChowClass,
    ) -> Result<Self> {
        if class.ring() != target {
            return Err(Error::RingMismatch);
        }
        let push = Pushforward { source: source.clone(), target: target.clone(), lift, class };
        for rule in source.rules() {
            let lhs = GradedPoly::var(source.table(), rule.var()).pow(u32::from(rule.power()));
            let relation = lhs.try_sub(rule.replacement())?;
            if !push.apply_poly(&relation)?.is_zero() {
                return Err(Error::InvalidScenario(format!(
                    "push-forward does not respect the relation for `{}`",
                    source.table().name(rule.var())
                )));
            }
        }
        Ok(push)
    }

    pub fn class(&self) -> &ChowClass {
        &self.class
    }

    pub fn lift(&self) -> &[GradedPoly] {
        &self.lift
    }

    fn apply_poly(&self, p: &GradedPoly) -> Result<ChowClass> {
        let raw = p.map_into(self.target.table(), &self.lift, self.target.bound())?;
        ChowClass::new(&self.target, &raw)?.try_mul(&self.class)
    }

    pub fn apply(&self, x: &ChowClass) -> Result<ChowClass> {
        if x.ring() != &self.source {
            return Err(Error::RingMismatch);
        }
        self.apply_poly(x.value())
    }
}

/// The blow-up square of a center `X` in `Y`.
#[derive(Debug)]
pub struct BlowupContext {
    ring_y: Arc<RingPresentation>,
    normal: BundleClass,
    exceptional: ProjectiveBundle,
    restrict: Option<RingMap>,
    push: Option<Pushforward>,
}

impl BlowupContext {
    /// `normal` lives on `A(X)`; `restrict` is `i^*` and `push` is `i_*`.
    pub fn new(
        ring_y: &Arc<RingPresentation>,
        normal: BundleClass,
        restrict: Option<RingMap>,
        push: Option<Pushforward>,
    ) -> Result<Arc<Self>> {
        let ring_x = normal.ring().clone();
        if let Some(r) = &restrict {
            if r.source() != ring_y || r.target() != &ring_x {
                return Err(Error::RingMismatch);
            }
        }
        if let Some(p) = &push {
            if p.source != ring_x || &p.target != ring_y {
                return Err(Error::RingMismatch);
            }
        }
        let exceptional = ProjectiveBundle::new(&ring_x, normal.rank(), &chern_polys(&normal), "z")?;
        Ok(Arc::new(BlowupContext { ring_y: ring_y.clone(), normal, exceptional, restrict, push }))
    }

    pub fn codim(&self) -> usize {
        self.normal.rank()
    }

    pub fn ring_y(&self) -> &Arc<RingPresentation> {
        &self.ring_y
    }

    pub fn ring_x(&self) -> &Arc<RingPresentation> {
        self.normal.ring()
    }

    pub fn ring_xt(&self) -> &Arc<RingPresentation> {
        self.exceptional.total()
    }

    pub fn normal(&self) -> &BundleClass {
        &self.normal
    }

    pub fn exceptional(&self) -> &ProjectiveBundle {
        &self.exceptional
    }

    pub fn zeta(&self) -> ChowClass {
        self.exceptional.zeta()
    }

    pub fn pull_i(&self, y: &ChowClass) -> Result<ChowClass> {
        self.restrict.as_ref().ok_or(Error::NoPullback)?.apply(y)
    }

    pub fn push_i(&self, x: &ChowClass) -> Result<ChowClass> {
        self.push.as_ref().ok_or(Error::NoPushforward)?.apply(x)
    }

    pub fn g_pull(&self, x: &ChowClass) -> Result<ChowClass> {
        self.exceptional.pullback(x)
    }

    pub fn g_push(&self, b: &ChowClass) -> Result<ChowClass> {
        self.exceptional.pushforward(b)
    }

    /// `g^* i^*`.
    pub fn restrict_to_exceptional(&self, y: &ChowClass) -> Result<ChowClass> {
        self.g_pull(&self.pull_i(y)?)
    }

    /// `i_*(i^*(a) b) = a i_*(b)` for every generator `a` of `A(Y)` and every
    /// `b` in `{1} + generators of A(X)`. Returns the first failure.
    pub fn check_projection_formula(&self) -> Result<Option<String>> {
        let ty = self.ring_y.table();
        let tx = self.ring_x().table();
        let mut xs = vec![ChowClass::one(self.ring_x())];
        for v in 0..tx.len() {
            xs.push(ChowClass::new(self.ring_x(), &GradedPoly::var(tx, v))?);
        }
        for v in 0..ty.len() {
            let a = ChowClass::new(&self.ring_y, &GradedPoly::var(ty, v))?;
            for b in &xs {
                let lhs = self.push_i(&(&self.pull_i(&a)? * b))?;
                let rhs = &a * &self.push_i(b)?;
                if lhs != rhs {
                    return Ok(Some(format!(
                        "i_*(i^*({}) * {}) = {} but {} * i_*({}) = {}",
                        ty.name(v),
                        b,
                        lhs,
                        ty.name(v),
                        b,
                        rhs
                    )));
                }
            }
        }
        Ok(None)
    }
}

/// `f^* y + j_* x`.
#[derive(Debug, Clone)]
pub struct BlowupClass {
    ctx: Arc<BlowupContext>,
    y_part: ChowClass,
    x_part: ChowClass,
}

impl BlowupClass {
    pub fn new(ctx: &Arc<BlowupContext>, y_part: ChowClass, x_part: ChowClass) -> Result<Self> {
        if y_part.ring() != ctx.ring_y() || x_part.ring() != ctx.ring_xt() {
            return Err(Error::RingMismatch);
        }
        Ok(BlowupClass { ctx: ctx.clone(), y_part, x_part })
    }

    pub fn zero(ctx: &Arc<BlowupContext>) -> Self {
        BlowupClass {
            ctx: ctx.clone(),
            y_part: ChowClass::zero(ctx.ring_y()),
            x_part: ChowClass::zero(ctx.ring_xt()),
        }
    }

    /// `f^* y`.
    pub fn pullback(ctx: &Arc<BlowupContext>, y: &ChowClass) -> Result<Self> {
        BlowupClass::new(ctx, y.clone(), ChowClass::zero(ctx.ring_xt()))
    }

    /// `j_* x`.
    pub fn exceptional(ctx: &Arc<BlowupContext>, x: &ChowClass) -> Result<Self> {
        BlowupClass::new(ctx, ChowClass::zero(ctx.ring_y()), x.clone())
    }

    /// The fundamental class of the blow-up.
    pub fn fundamental(ctx: &Arc<BlowupContext>) -> Self {
        BlowupClass::pullback(ctx, &ChowClass::one(ctx.ring_y())).expect("unit lives in A(Y)")
    }

    pub fn ctx(&self) -> &Arc<BlowupContext> {
        &self.ctx
    }

    pub fn y_part(&self) -> &ChowClass {
        &self.y_part
    }

    pub fn x_part(&self) -> &ChowClass {
        &self.x_part
    }

    fn check(&self, other: &BlowupClass) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &BlowupClass) -> Result<BlowupClass> {
        self.check(other)?;
        Ok(BlowupClass {
            ctx: self.ctx.clone(),
            y_part: self.y_part.try_add(&other.y_part)?,
            x_part: self.x_part.try_add(&other.x_part)?,
        })
    }

    pub fn try_sub(&self, other: &BlowupClass) -> Result<BlowupClass> {
        self.try_add(&other.scale(&Rational::from_integer((-1).into())))
    }

    pub fn scale(&self, s: &Rational) -> BlowupClass {
        BlowupClass { ctx: self.ctx.clone(), y_part: self.y_part.scale(s), x_part: self.x_part.scale(s) }
    }

    /// `f^* b . a = f^*(b y) + j_*(g^* i^* b . x)`.
    pub fn mul_pullback(&self, b: &ChowClass) -> Result<BlowupClass> {
        Ok(BlowupClass {
            ctx: self.ctx.clone(),
            y_part: b.try_mul(&self.y_part)?,
            x_part: self.ctx.restrict_to_exceptional(b)?.try_mul(&self.x_part)?,
        })
    }

    /// Multiplication by the exceptional divisor class `e`, which is `j_*(1)`:
    /// `e . (f^* y + j_* x) = j_*(g^* i^* y - z x)`.
    pub fn mul_exceptional(&self) -> Result<BlowupClass> {
        BlowupClass::exceptional(&self.ctx, &bl_restrict(self)?)
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(bl_pushforward(self)?.is_zero() && bl_restrict(self)?.is_zero())
    }
}

/// `f_*(f^* y + j_* x) = y + i_* g_* x`.
pub fn bl_pushforward(a: &BlowupClass) -> Result<ChowClass> {
    let ctx = &a.ctx;
    a.y_part.try_add(&ctx.push_i(&ctx.g_push(&a.x_part)?)?)
}

/// `j^*(f^* y + j_* x) = g^* i^* y - z x`.
pub fn bl_restrict(a: &BlowupClass) -> Result<ChowClass> {
    let ctx = &a.ctx;
    let zx = ctx.zeta().try_mul(&a.x_part)?;
    ctx.restrict_to_exceptional(&a.y_part)?.try_sub(&zx)
}

/// Differences of push-forwards and of restrictions.
pub fn bl_difference(a: &BlowupClass, b: &BlowupClass) -> Result<(ChowClass, ChowClass)> {
    a.check(b)?;
    let d = a.try_sub(b)?;
    Ok((bl_pushforward(&d)?, bl_restrict(&d)?))
}

pub fn bl_equal(a: &BlowupClass, b: &BlowupClass) -> Result<bool> {
    let (p, r) = bl_difference(a, b)?;
    Ok(p.is_zero() && r.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedpoly::rational;

    /// A point in the projective plane.
    fn point_in_plane() -> Arc<BlowupContext> {
        let y = RingPresentation::projective_space("H", 2).unwrap().into_arc();
        let tx = crate::gradedpoly::VarTable::new(Vec::<(String, u32)>::new()).unwrap();
        let x = RingPresentation::free(&tx).with_dim(0, Some(tx.one_exps())).unwrap().into_arc();
        let restrict = RingMap::new(&y, &x, vec![GradedPoly::zero(&tx)]).unwrap();
        let class = ChowClass::parse(&y, "H^2").unwrap();
        let push = Pushforward::new(&x, &y, vec![], class).unwrap();
        BlowupContext::new(&y, BundleClass::trivial(&x, 2), Some(restrict), Some(push)).unwrap()
    }

    #[test]
    fn self_intersection_of_exceptional_divisor() {
        let ctx = point_in_plane();
        let e = BlowupClass::exceptional(&ctx, &ChowClass::one(ctx.ring_xt())).unwrap();
        assert_eq!(bl_restrict(&e).unwrap(), -&ctx.zeta());
        let e2 = e.mul_exceptional().unwrap();
        // e^2 = -[line], pushing forward to -1 times a point.
        assert_eq!(bl_pushforward(&e2).unwrap(), ChowClass::parse(ctx.ring_y(), "-H^2").unwrap());
    }

    #[test]
    fn pushforward_of_pullback_is_identity() {
        let ctx = point_in_plane();
        let b = ChowClass::parse(ctx.ring_y(), "1 + 3*H").unwrap();
        let a = BlowupClass::pullback(&ctx, &b).unwrap();
        assert_eq!(bl_pushforward(&a).unwrap(), b);
        assert_eq!(bl_restrict(&BlowupClass::fundamental(&ctx)).unwrap(), ChowClass::one(ctx.ring_xt()));
        let jz = BlowupClass::exceptional(&ctx, &ctx.zeta()).unwrap();
        assert_eq!(bl_pushforward(&jz).unwrap(), ChowClass::parse(ctx.ring_y(), "H^2").unwrap());
    }

    #[test]
    fn equality_uses_both_invariants() {
        let ctx = point_in_plane();
        let a = BlowupClass::fundamental(&ctx);
        assert!(bl_equal(&a, &a).unwrap());
        // f^*[pt] and j_*(z) push forward to the same point class but differ on
        // the exceptional divisor only through z^2 = 0; they are equal.
        let p = BlowupClass::pullback(&ctx, &ChowClass::parse(ctx.ring_y(), "H^2").unwrap()).unwrap();
        let q = BlowupClass::exceptional(&ctx, &ctx.zeta()).unwrap();
        assert!(bl_equal(&p, &q).unwrap());
        let e = BlowupClass::exceptional(&ctx, &ChowClass::one(ctx.ring_xt())).unwrap();
        assert!(!bl_equal(&a, &a.try_add(&e).unwrap()).unwrap());
    }

    #[test]
    fn projection_formula_on_generators() {
        let ctx = point_in_plane();
        assert_eq!(ctx.check_projection_formula().unwrap(), None);
        let two = rational(2);
        let a = BlowupClass::fundamental(&ctx).scale(&two);
        assert_eq!(bl_pushforward(&a).unwrap(), ChowClass::constant(ctx.ring_y(), two));
    }

    #[test]
    fn ring_maps_must_respect_relations() {
        let p1 = RingPresentation::projective_space("H", 1).unwrap().into_arc();
        let p2 = RingPresentation::projective_space("H", 2).unwrap().into_arc();
        // H -> H from P^1 to P^2 would send H^2 = 0 to a nonzero class.
        assert!(RingMap::parse(&p1, &p2, &["H"]).is_err());
        assert!(RingMap::parse(&p2, &p1, &["H"]).is_ok());
    }
}
