//! Formal expressions in `z` and the Chern classes of two bundles, read as
//! operators on the Chow group of the blow-up.
//!
//! An expression `F = F_0 + F_+` splits into its `z`-free part and the rest.
//! On a class `a = f^* y + j_* x` it acts by
//!
//! ```text
//! F(a) = f^*(F_0^Y y) + j_*( G . g^* i^* y + (g^* i^* F_0^Y + F_+) . x ),   G = -F_+/z
//! ```
//!
//! where `F_0^Y` is a class on `Y` supplied by the caller (the expression
//! itself only knows the restrictions of the bundles to the center) and the
//! formal variables inside `G` and `F_+` are evaluated on the exceptional
//! divisor. The `-1/z` comes from `z = -e` on the blow-up together with
//! `e . f^* y = j_*(g^* i^* y)`.

use std::sync::Arc;


use super::{BlowupClass, BlowupContext};
use crate::bundles::BundleClass;
use crate::chowring::{ChowClass, ProjectiveBundle, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{GradedPoly, VarTable};

/// `[n1..nd, q1..qe, z]`, with `deg n_i = i`, `deg q_j = j`, `deg z = 1`.
pub fn operator_table(d: usize, excess: usize) -> Result<Arc<VarTable>> {
    let mut vars: Vec<(String, u32)> = (1..=d).map(|i| (format!("n{i}"), i as u32)).collect();
    vars.extend((1..=excess).map(|j| (format!("q{j}"), j as u32)));
    vars.push(("z".into(), 1));
    VarTable::new(vars)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedOperator {
    d: usize,
    excess: usize,
    rank: usize,
    bound: u32,
    normal_chern: Vec<GradedPoly>,
    expr: GradedPoly,
    f0: GradedPoly,
    fplus: GradedPoly,
}

impl TwistedOperator {
    /// `expr` lives over a table whose last variable is `z`. The first `d`
    /// variables are evaluated through the normal bundle and the next `excess`
    /// through the excess bundle. `normal_chern` gives `c(N)` in these
    /// variables and is only used by [`reduced`](Self::reduced).
    pub fn new(
        d: usize,
        excess: usize,
        rank: usize,
        bound: u32,
        normal_chern: Vec<GradedPoly>,
        expr: GradedPoly,
    ) -> Result<Self> {
        let table = expr.table().clone();
        if table.len() != d + excess + 1 {
            return Err(Error::LengthMismatch { expected: d + excess + 1, found: table.len() });
        }
        let z = table.len() - 1;
        let parts = expr.split_by_var(z);
        let f0 = parts.first().cloned().unwrap_or_else(|| GradedPoly::zero(&table));
        let fplus = expr.try_sub(&f0)?;
        Ok(TwistedOperator { d, excess, rank, bound, normal_chern, expr, f0, fplus })
    }

    pub fn codim(&self) -> usize {
        self.d
    }

    pub fn excess(&self) -> usize {
        self.excess
    }

    /// Rank of the bundle whose Chern class the expression represents.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.expr.table()
    }

    pub fn zeta_var(&self) -> usize {
        self.table().len() - 1
    }

    pub fn expr(&self) -> &GradedPoly {
        &self.expr
    }

    pub fn f0(&self) -> &GradedPoly {
        &self.f0
    }

    pub fn fplus(&self) -> &GradedPoly {
        &self.fplus
    }

    /// `-F_+ / z`, the factor applied to `g^* i^* y` on the exceptional divisor.
    pub fn exceptional_part(&self) -> Result<GradedPoly> {
        self.fplus
            .exact_div_by_var(self.zeta_var())
            .map(|g| -g)
            .map_err(|e| Error::InternalConsistency(e.to_string()))
    }

    /// `F_0 + z . G'` where `G'` is `F_+/z` reduced with the Grothendieck
    /// relation of the normal bundle. Two operators that agree on every blow-up
    /// have the same reduced form.
    pub fn reduced(&self) -> Result<GradedPoly> {
        if self.d == 0 {
            // no normal bundle, hence no relation on z
            return Ok(self.expr.clone());
        }
        let table = self.table();
        let z = self.zeta_var();
        let base_vars: Vec<(String, u32)> =
            table.entries().take(z).map(|(n, d)| (n.to_string(), d)).collect();
        let base_table = VarTable::new(base_vars)?;
        let base_trunc = (self.bound + 1).saturating_sub(self.d as u32 + 1);
        let base = RingPresentation::free(&base_table).with_truncation(base_trunc).into_arc();
        let chern = self
            .normal_chern
            .iter()
            .map(|c| c.project(&base_table))
            .collect::<Result<Vec<_>>>()?;
        let pb = ProjectiveBundle::new(&base, self.d, &chern, "z")?;
        let g = self.fplus.exact_div_by_var(z).map_err(|e| Error::InternalConsistency(e.to_string()))?;
        // the bundle's table equals the operator table variable for variable
        let g = ChowClass::new(pb.total(), &g)?.value().clone();
        self.f0.try_add(&g.shift_var(z, 1))
    }
}

/// How the formal variables of an operator are interpreted: the Chern classes
/// of the normal and excess bundles on `X`, and the class on `Y` that the
/// `z`-free part stands for.
#[derive(Debug, Clone)]
pub struct OperatorBinding {
    pub normal: Vec<ChowClass>,
    pub excess: Vec<ChowClass>,
    pub f0: ChowClass,
}

impl OperatorBinding {
    pub fn new(normal: &BundleClass, excess: &BundleClass, f0: ChowClass) -> Self {
        OperatorBinding {
            normal: (1..=normal.rank()).map(|i| normal.c(i)).collect(),
            excess: (1..=excess.rank()).map(|j| excess.c(j)).collect(),
            f0,
        }
    }

    /// Binding for an operator with no excess variables.
    pub fn normal_only(ctx: &BlowupContext, f0: ChowClass) -> Self {
        OperatorBinding { normal: (1..=ctx.codim()).map(|i| ctx.normal().c(i)).collect(), excess: Vec::new(), f0 }
    }
}

/// An operator with its exceptional-divisor factors evaluated once, ready to
/// act on many classes of the same blow-up.
#[derive(Debug, Clone)]
pub struct PreparedOperator {
    ctx: Arc<BlowupContext>,
    f0: ChowClass,
    exceptional_factor: ChowClass,
    plus_factor: ChowClass,
}

impl PreparedOperator {
    /// Direct construction from the three factors: `y -> f0 y` on the
    /// pulled-back part, `G . g^* i^* y` and `P . x` on the exceptional part.
    pub fn from_factors(
        ctx: &Arc<BlowupContext>,
        f0: ChowClass,
        exceptional_factor: ChowClass,
        plus_factor: ChowClass,
    ) -> Result<Self> {
        if f0.ring() != ctx.ring_y()
            || exceptional_factor.ring() != ctx.ring_xt()
            || plus_factor.ring() != ctx.ring_xt()
        {
            return Err(Error::RingMismatch);
        }
        Ok(PreparedOperator { ctx: ctx.clone(), f0, exceptional_factor, plus_factor })
    }

    pub fn new(op: &TwistedOperator, binding: &OperatorBinding, ctx: &Arc<BlowupContext>) -> Result<Self> {
        if binding.normal.len() != op.d {
            return Err(Error::LengthMismatch { expected: op.d, found: binding.normal.len() });
        }
        if binding.excess.len() != op.excess {
            return Err(Error::LengthMismatch { expected: op.excess, found: binding.excess.len() });
        }
        let xt = ctx.ring_xt();
        let needed = xt.bound().map(|b| b + 1);
        if needed.is_none_or(|n| op.bound < n) {
            return Err(Error::InvalidScenario(format!(
                "operator truncated at degree {} but the blow-up needs {}",
                op.bound,
                needed.map_or("an unbounded expansion".to_string(), |n| n.to_string())
            )));
        }
        let mut images = Vec::with_capacity(op.table().len());
        for c in binding.normal.iter().chain(&binding.excess) {
            if c.ring() != ctx.ring_x() {
                return Err(Error::RingMismatch);
            }
            images.push(ctx.g_pull(c)?.value().clone());
        }
        images.push(GradedPoly::var(xt.table(), ctx.exceptional().zeta_var()));
        let eval = |p: &GradedPoly| -> Result<ChowClass> {
            ChowClass::new(xt, &p.map_into(xt.table(), &images, xt.bound())?)
        };
        let exceptional_factor = eval(&op.exceptional_part()?)?;
        let plus = eval(&op.fplus)?;
        let f0_restricted = ctx.restrict_to_exceptional(&binding.f0)?;
        PreparedOperator::from_factors(ctx, binding.f0.clone(), exceptional_factor, f0_restricted.try_add(&plus)?)
    }

    pub fn f0(&self) -> &ChowClass {
        &self.f0
    }

    pub fn exceptional_factor(&self) -> &ChowClass {
        &self.exceptional_factor
    }

    pub fn plus_factor(&self) -> &ChowClass {
        &self.plus_factor
    }

    pub fn apply(&self, a: &BlowupClass) -> Result<BlowupClass> {
        if !Arc::ptr_eq(a.ctx(), &self.ctx) {
            return Err(Error::ContextMismatch);
        }
        let y = self.f0.try_mul(a.y_part())?;
        let restricted = self.ctx.restrict_to_exceptional(a.y_part())?;
        let x = self
            .exceptional_factor
            .try_mul(&restricted)?
            .try_add(&self.plus_factor.try_mul(a.x_part())?)?;
        BlowupClass::new(&self.ctx, y, x)
    }
}

pub fn apply_twisted_operator(
    op: &TwistedOperator,
    binding: &OperatorBinding,
    a: &BlowupClass,
) -> Result<BlowupClass> {
    PreparedOperator::new(op, binding, a.ctx())?.apply(a)
}

#[cfg(test)]
pub(crate) fn is_zeta_free(p: &GradedPoly, z: usize) -> bool {
    p.terms().all(|(e, c)| e[z] == 0 || num_traits::Zero::is_zero(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{bl_equal, bl_pushforward, universal_context};
    use crate::chowring::ChowClass;
    use crate::gradedpoly::rational;

    fn op_from(d: usize, bound: u32, s: &str) -> TwistedOperator {
        let t = operator_table(d, 0).unwrap();
        let mut chern = vec![GradedPoly::one(&t)];
        chern.extend((0..d).map(|i| GradedPoly::var(&t, i)));
        TwistedOperator::new(d, 0, 0, bound, chern, GradedPoly::parse(&t, s).unwrap()).unwrap()
    }

    #[test]
    fn split_into_free_and_positive_parts() {
        let op = op_from(2, 6, "1 + n1 + z*n1 + z^2");
        assert_eq!(op.f0().to_string(), "1 + n1");
        assert_eq!(op.fplus().to_string(), "n1*z + z^2");
        assert!(is_zeta_free(op.f0(), op.zeta_var()));
        assert_eq!(op.exceptional_part().unwrap().to_string(), "-n1 - z");
    }

    #[test]
    fn identity_operator_and_zeta_powers() {
        let ctx = universal_context(2, 0, 6).unwrap();
        let one_y = ChowClass::one(ctx.ring_y());
        let bind = OperatorBinding::normal_only(&ctx, one_y.clone());
        let base = BlowupClass::fundamental(&ctx);

        let id = apply_twisted_operator(&op_from(2, 7, "1"), &bind, &base).unwrap();
        assert!(bl_equal(&id, &base).unwrap());

        // z acting on [Y~] is -e = j_*(-1); the z-free part is 0 here
        let bind = OperatorBinding::normal_only(&ctx, ChowClass::zero(ctx.ring_y()));
        let z = apply_twisted_operator(&op_from(2, 7, "z"), &bind, &base).unwrap();
        let minus_e = BlowupClass::exceptional(&ctx, &ChowClass::constant(ctx.ring_xt(), rational(-1))).unwrap();
        assert!(bl_equal(&z, &minus_e).unwrap());

        // z^2 [Y~] = j_*(-z)
        let z2 = apply_twisted_operator(&op_from(2, 7, "z^2"), &bind, &base).unwrap();
        let expected = BlowupClass::exceptional(&ctx, &-&ctx.zeta()).unwrap();
        assert!(bl_equal(&z2, &expected).unwrap());
        assert_eq!(bl_pushforward(&z2).unwrap(), -&ctx.push_i(&ChowClass::one(ctx.ring_x())).unwrap());
    }

    #[test]
    fn operator_must_cover_the_blow_up_degrees() {
        let ctx = universal_context(2, 0, 6).unwrap();
        let bind = OperatorBinding::normal_only(&ctx, ChowClass::one(ctx.ring_y()));
        let short = op_from(2, 3, "1 + z");
        assert!(matches!(
            apply_twisted_operator(&short, &bind, &BlowupClass::fundamental(&ctx)),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn reduced_form_uses_the_relation() {
        // d = 1: z = -n1, so z*(n1 + z) reduces to zero
        let op = op_from(1, 4, "1 + n1*z + z^2");
        assert_eq!(op.reduced().unwrap().to_string(), "1");
    }
}
