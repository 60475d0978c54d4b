//! The blow-up formulas.
//!
//! All of them are written with `z = c_1(O(1))` on the exceptional divisor,
//! equivalently `z = c_1(O(-e))` on the blow-up, so `c(O(e)) = 1 - z`.
//!
//! * `alpha = (1/z) [ sum c_{d-i}(N) - (1 - z) sum (1 + z)^i c_{d-i}(N) ]`, and
//!   `c(Bl) - f^* c(Y) = j_*(g^* c(X) alpha)`.
//! * Normal bundle of the blow-up inside `P(E)`:
//!   `c(NN) c(CC (x) O(z)) / (1 - z)`, with `F_0` read as `c(E)`.
//! * Total Chern class of the blow-up as an operator on `f^* c(Y)`:
//!   `(1 - z) c(NN (x) O(z)) / c(NN)`.
//! * Log-tangent form for a center cut out by hypersurfaces `Z_1..Z_d`:
//!   `(1 - z) prod (1 + Z_i + z) / prod (1 + Z_i)`.
//! * Normal bundle of a proper transform: `c(NN) c(CC (x) O(s z))`, where the
//!   sign `s` is the [`Twist`].
//!
//! A worked case, `d = 2`: the bracket divided by `z` is
//! `(n2 - 1) + (1 + n1) z + z^2`, and `z^2 = -n1 z - n2` turns it into
//! `-1 + z`. Then `g^* c(N) - z alpha = 1 + n1 + n2 + z - z^2
//! = 1 + n1 + 2 n2 + (1 + n1) z`, which is also `(1 - z) c(N (x) O(1))`
//! after reduction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::operator::{operator_table, OperatorBinding, PreparedOperator, TwistedOperator};
use super::{BlowupClass, BlowupContext};
use crate::bundles::{tensor_line, BundleClass};
use crate::chowring::{ChowClass, ProjectiveBundle, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{GradedPoly, VarTable};

/// `alpha` on a projective bundle `P(N)`: the bracket is divided by `z`
/// before the Grothendieck relation is applied.
pub fn porteous_alpha_in(pb: &ProjectiveBundle) -> Result<ChowClass> {
    let table = pb.total().table();
    let z = pb.zeta_var();
    let d = pb.rank();
    let chern = pb.chern().iter().map(|c| c.embed(table)).collect::<Result<Vec<_>>>()?;
    let one = GradedPoly::one(table);
    let zeta = GradedPoly::var(table, z);
    let one_plus = &one + &zeta;
    let mut plain = GradedPoly::zero(table);
    let mut twisted = GradedPoly::zero(table);
    let mut power = one.clone();
    for i in 0..=d {
        plain = &plain + &chern[d - i];
        twisted = &twisted + &(&power * &chern[d - i]);
        power = &power * &one_plus;
    }
    let bracket = &plain - &(&(&one - &zeta) * &twisted);
    let alpha = bracket
        .exact_div_by_var(z)
        .map_err(|e| Error::InternalConsistency(format!("alpha bracket: {e}")))?;
    ChowClass::new(pb.total(), &alpha)
}

pub fn porteous_alpha(ctx: &BlowupContext) -> Result<ChowClass> {
    porteous_alpha_in(ctx.exceptional())
}

/// `c(Bl) - f^* c(Y) = j_*(g^* c(X) alpha)`.
pub fn porteous_delta(ctx: &Arc<BlowupContext>, cx: &ChowClass) -> Result<BlowupClass> {
    let x = ctx.g_pull(cx)?.try_mul(&porteous_alpha(ctx)?)?;
    BlowupClass::exceptional(ctx, &x)
}

fn operator_ring(table: &Arc<VarTable>, bound: u32) -> Arc<RingPresentation> {
    RingPresentation::free(table).with_truncation(bound).into_arc()
}

/// `[1, n1, ..., nd]` on the operator table.
fn formal_normal(table: &Arc<VarTable>, d: usize) -> Vec<GradedPoly> {
    let mut c = vec![GradedPoly::one(table)];
    c.extend((0..d).map(|i| GradedPoly::var(table, i)));
    c
}

fn formal_bundle(ring: &Arc<RingPresentation>, first: usize, rank: usize) -> Result<BundleClass> {
    let t = ring.table();
    let mut comps = vec![ChowClass::one(ring)];
    for j in 0..rank {
        comps.push(ChowClass::new(ring, &GradedPoly::var(t, first + j))?);
    }
    BundleClass::new(rank, comps)
}

fn geometric_inverse(table: &Arc<VarTable>, z: usize, bound: u32) -> Result<GradedPoly> {
    (GradedPoly::one(table) - GradedPoly::var(table, z)).series_inverse(bound)
}

/// Normal bundle of the blow-up in `P(E)`, for a normal bundle of rank `d` and
/// an excess bundle `C = E|_X / N` of rank `excess`. Represents a bundle of
/// rank `d - 1 + excess`.
pub fn main_normal_chern(d: usize, excess: usize, bound: u32) -> Result<TwistedOperator> {
    let table = operator_table(d, excess)?;
    let ring = operator_ring(&table, bound);
    let z = table.len() - 1;
    let nn = formal_bundle(&ring, 0, d)?;
    let cc = formal_bundle(&ring, d, excess)?;
    let zeta = ChowClass::new(&ring, &GradedPoly::var(&table, z))?;
    let twisted = tensor_line(&cc, &zeta)?.total();
    let expr = nn.total().try_mul(&twisted)?.value().mul_bounded(&geometric_inverse(&table, z, bound)?, Some(bound))?;
    TwistedOperator::new(d, excess, d - 1 + excess, bound, formal_normal(&table, d), expr)
}

/// `(1 - z) c(NN (x) O(z)) s(NN)`; its `z`-free part is 1.
pub fn oldrec_operator(d: usize, bound: u32) -> Result<TwistedOperator> {
    let table = operator_table(d, 0)?;
    let ring = operator_ring(&table, bound);
    let z = table.len() - 1;
    let nn = formal_bundle(&ring, 0, d)?;
    let zeta = ChowClass::new(&ring, &GradedPoly::var(&table, z))?;
    let twisted = tensor_line(&nn, &zeta)?.total();
    let one_minus = ChowClass::new(&ring, &(GradedPoly::one(&table) - GradedPoly::var(&table, z)))?;
    let expr = one_minus.try_mul(&twisted)?.try_mul(&nn.segre(bound)?)?;
    let op = TwistedOperator::new(d, 0, d, bound, formal_normal(&table, d), expr.value().clone())?;
    if !op.f0().is_one() {
        return Err(Error::InternalConsistency(format!("z-free part is {}, expected 1", op.f0())));
    }
    Ok(op)
}

fn operator_bound(ctx: &BlowupContext) -> Result<u32> {
    ctx.ring_y()
        .bound()
        .ok_or_else(|| Error::InvalidScenario("the ambient ring has no degree bound".into()))
}

/// Total Chern class of the blow-up, `(1 - z) c(NN (x) O(1)) / c(NN)` acting
/// on `f^* c(Y)`.
pub fn oldrec_total_chern(ctx: &Arc<BlowupContext>, cy: &ChowClass) -> Result<BlowupClass> {
    let op = oldrec_operator(ctx.codim(), operator_bound(ctx)?)?;
    let binding = OperatorBinding::normal_only(ctx, ChowClass::one(ctx.ring_y()));
    PreparedOperator::new(&op, &binding, ctx)?.apply(&BlowupClass::pullback(ctx, cy)?)
}

/// An expression in classes on `Y` and `z`, evaluated honestly on the
/// blow-up. With `expr = sum y_k z^k`, `z^k [Bl] = j_*(-z^(k-1))` for
/// `k >= 1` and `f^* y_k` acts by the projection formula, so only `y_0` on
/// `Y` and the restrictions `i^* y_k` are needed. The latter are kept as one
/// polynomial over the table of `P(N)` with `z` still formal.
#[derive(Debug, Clone)]
pub struct GlobalExpansion {
    ctx: Arc<BlowupContext>,
    f0: ChowClass,
    restricted: GradedPoly,
}

/// `A(X)[z]` with `z` free, truncated like `A(X)` in the base variables and at
/// `bound` overall.
fn formal_ring(ctx: &BlowupContext, bound: u32) -> Result<Arc<RingPresentation>> {
    let table = ctx.ring_xt().table();
    let mut ring = RingPresentation::free(table).with_truncation(bound);
    if let Some(xb) = ctx.ring_x().bound() {
        ring = ring.with_base_bound(table.len() - 1, xb)?;
    }
    Ok(ring.into_arc())
}

impl GlobalExpansion {
    /// `restricted` lives over the table of `P(N)`; its `z`-free part must be
    /// the restriction of `f0`.
    pub fn new(ctx: &Arc<BlowupContext>, f0: ChowClass, restricted: GradedPoly) -> Result<Self> {
        if f0.ring() != ctx.ring_y() {
            return Err(Error::RingMismatch);
        }
        if restricted.table() != ctx.ring_xt().table() {
            return Err(Error::TableMismatch);
        }
        let expansion = GlobalExpansion { ctx: ctx.clone(), f0, restricted };
        let c0 = expansion.coefficients()?.into_iter().next().unwrap_or_else(|| ChowClass::zero(ctx.ring_x()));
        let expected = ctx.pull_i(&expansion.f0)?;
        if c0 != expected {
            return Err(Error::InconsistentScenario(format!(
                "z-free part restricts to {expected}, but the expansion starts with {c0}"
            )));
        }
        Ok(expansion)
    }

    pub fn f0(&self) -> &ChowClass {
        &self.f0
    }

    pub fn restricted(&self) -> &GradedPoly {
        &self.restricted
    }

    /// Restricted coefficients `i^* y_k` of `z^k`, as classes on `X`.
    pub fn coefficients(&self) -> Result<Vec<ChowClass>> {
        let tx = self.ctx.ring_x().table();
        let z = self.restricted.table().len() - 1;
        self.restricted
            .split_by_var(z)
            .iter()
            .map(|p| ChowClass::new(self.ctx.ring_x(), &p.project(tx)?))
            .collect()
    }

    pub fn prepare(&self) -> Result<PreparedOperator> {
        let ctx = &self.ctx;
        let zeta = ctx.zeta();
        let mut exceptional = ChowClass::zero(ctx.ring_xt());
        let mut plus = ChowClass::zero(ctx.ring_xt());
        let mut power = ChowClass::one(ctx.ring_xt());
        for (k, ck) in self.coefficients()?.iter().enumerate() {
            let pulled = ctx.g_pull(ck)?;
            if k >= 1 {
                // power is z^(k-1) here
                exceptional = exceptional.try_sub(&pulled.try_mul(&power)?)?;
                power = power.try_mul(&zeta)?;
            }
            plus = plus.try_add(&pulled.try_mul(&power)?)?;
        }
        PreparedOperator::from_factors(ctx, self.f0.clone(), exceptional, plus)
    }

    pub fn apply(&self, a: &BlowupClass) -> Result<BlowupClass> {
        self.prepare()?.apply(a)
    }
}

fn check_on_y(ctx: &BlowupContext, b: &BundleClass) -> Result<()> {
    if b.ring() != ctx.ring_y() {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

/// Restriction of a bundle on `Y` to `X`, then into the formal ring.
fn restrict_bundle(ctx: &BlowupContext, b: &BundleClass, ring: &Arc<RingPresentation>) -> Result<BundleClass> {
    let comps = b
        .classes()
        .iter()
        .map(|c| ChowClass::new(ring, &ctx.pull_i(c)?.value().embed(ring.table())?))
        .collect::<Result<Vec<_>>>()?;
    BundleClass::new(b.rank(), comps)
}

fn formal_zeta(ring: &Arc<RingPresentation>) -> Result<ChowClass> {
    let t = ring.table();
    ChowClass::new(ring, &GradedPoly::var(t, t.len() - 1))
}

/// `1 / (1 - z)` in the formal ring.
fn geometric_in(ring: &Arc<RingPresentation>, bound: u32) -> Result<ChowClass> {
    let t = ring.table();
    ChowClass::new(ring, &geometric_inverse(t, t.len() - 1, bound)?)
}

/// The complete-intersection formula
/// `c(f^* NN^) c(f^* CC^ (x) O(z)) / (1 - z)` with both bundles defined on
/// `Y`. `nhat` must restrict to the normal bundle of the center.
pub fn simlem_expansion(
    ctx: &Arc<BlowupContext>,
    nhat: &BundleClass,
    chat: &BundleClass,
) -> Result<GlobalExpansion> {
    check_on_y(ctx, nhat)?;
    check_on_y(ctx, chat)?;
    if nhat.rank() != ctx.codim() {
        return Err(Error::InconsistentScenario(format!(
            "bundle of rank {} cannot restrict to a normal bundle of rank {}",
            nhat.rank(),
            ctx.codim()
        )));
    }
    for i in 1..=nhat.rank() {
        let restricted = ctx.pull_i(&nhat.c(i))?;
        if restricted != ctx.normal().c(i) {
            return Err(Error::InconsistentScenario(format!(
                "c_{i} restricts to {restricted}, but the normal bundle has c_{i} = {}",
                ctx.normal().c(i)
            )));
        }
    }
    let bound = operator_bound(ctx)?;
    let ring = formal_ring(ctx, bound)?;
    let zeta = formal_zeta(&ring)?;
    let n = restrict_bundle(ctx, nhat, &ring)?;
    let c = tensor_line(&restrict_bundle(ctx, chat, &ring)?, &zeta)?;
    let restricted = n.total().try_mul(&c.total())?.try_mul(&geometric_in(&ring, bound)?)?;
    let f0 = nhat.total().try_mul(&chat.total())?;
    GlobalExpansion::new(ctx, f0, restricted.value().clone())
}

/// Chern class of the normal bundle of the blow-up in `P(E)` for
/// `E = NN^ + CC^`, capped with the fundamental class.
pub fn simlem_normal_chern(
    ctx: &Arc<BlowupContext>,
    nhat: &BundleClass,
    chat: &BundleClass,
) -> Result<BlowupClass> {
    simlem_expansion(ctx, nhat, chat)?.apply(&BlowupClass::fundamental(ctx))
}

/// `(1 - z) prod (1 + Z_i + z) / prod (1 + Z_i)` for a center cut out by the
/// hypersurface classes `Z_i` on `Y`. At `z = 0` numerator and denominator
/// coincide, so the `z`-free part is 1.
pub fn difflp_expansion(ctx: &Arc<BlowupContext>, hypersurfaces: &[ChowClass]) -> Result<GlobalExpansion> {
    let d = ctx.codim();
    if hypersurfaces.len() != d {
        return Err(Error::LengthMismatch { expected: d, found: hypersurfaces.len() });
    }
    let mut restricted_z = Vec::with_capacity(d);
    let mut product = ChowClass::one(ctx.ring_x());
    for zi in hypersurfaces {
        if zi.ring() != ctx.ring_y() {
            return Err(Error::RingMismatch);
        }
        if !zi.value().is_homogeneous_of(1) {
            return Err(Error::InconsistentScenario(format!("hypersurface class {zi} is not a divisor class")));
        }
        let r = ctx.pull_i(zi)?;
        product = product.try_mul(&ChowClass::one(ctx.ring_x()).try_add(&r)?)?;
        restricted_z.push(r);
    }
    if product != ctx.normal().total() {
        return Err(Error::InconsistentScenario(format!(
            "hypersurfaces give c(N) = {product}, expected {}",
            ctx.normal().total()
        )));
    }
    let bound = operator_bound(ctx)?;
    let ring = formal_ring(ctx, bound)?;
    let zeta = formal_zeta(&ring)?;
    let one = ChowClass::one(&ring);
    let mut numer = one.try_sub(&zeta)?;
    for r in &restricted_z {
        let r = ChowClass::new(&ring, &r.value().embed(ring.table())?)?;
        numer = numer.try_mul(&one.try_add(&r)?.try_add(&zeta)?)?;
    }
    // the denominator is c(N), whose inverse only needs the base degrees
    let xb = ctx.ring_x().bound().unwrap_or(bound);
    let inverse = ctx.normal().segre(xb)?;
    let inverse = ChowClass::new(&ring, &inverse.value().embed(ring.table())?)?;
    let restricted = numer.try_mul(&inverse)?;
    GlobalExpansion::new(ctx, ChowClass::one(ctx.ring_y()), restricted.value().clone())
}

pub fn difflp_total_chern(
    ctx: &Arc<BlowupContext>,
    hypersurfaces: &[ChowClass],
    cy: &ChowClass,
) -> Result<BlowupClass> {
    difflp_expansion(ctx, hypersurfaces)?.apply(&BlowupClass::pullback(ctx, cy)?)
}

/// The log-tangent expression written in Chern roots `z1..zd` of the normal
/// bundle, for display and reduction.
pub fn difflp_operator(d: usize, bound: u32) -> Result<TwistedOperator> {
    let mut vars: Vec<(String, u32)> = (1..=d).map(|i| (format!("z{i}"), 1)).collect();
    vars.push(("z".into(), 1));
    let table = VarTable::new(vars)?;
    let one = GradedPoly::one(&table);
    let zeta = GradedPoly::var(&table, d);
    let mut numer = &one - &zeta;
    let mut denom = one.clone();
    for i in 0..d {
        let zi = GradedPoly::var(&table, i);
        numer = numer.mul_bounded(&(&(&one + &zi) + &zeta), Some(bound))?;
        denom = denom.mul_bounded(&(&one + &zi), Some(bound))?;
    }
    let expr = numer.mul_bounded(&denom.series_inverse(bound)?, Some(bound))?;
    let normal: Vec<GradedPoly> = (0..=d as u32).map(|k| denom.component(k)).collect();
    TwistedOperator::new(d, 0, d, bound, normal, expr)
}

/// Which line bundle twists the excess part of a proper-transform normal
/// bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Twist {
    /// `O(-e)`, first Chern class `+z`.
    #[default]
    #[serde(rename = "-e")]
    MinusExceptional,
    /// `O(e)`, first Chern class `-z`.
    #[serde(rename = "+e")]
    PlusExceptional,
}

impl Twist {
    pub fn sign(self) -> i64 {
        match self {
            Twist::MinusExceptional => 1,
            Twist::PlusExceptional => -1,
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::MinusExceptional => "-e",
            Twist::PlusExceptional => "+e",
        })
    }
}

impl FromStr for Twist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "-e" => Ok(Twist::MinusExceptional),
            "+e" | "e" => Ok(Twist::PlusExceptional),
            _ => Err(Error::InvalidScenario(format!("unknown twist `{s}`, expected `-e` or `+e`"))),
        }
    }
}

/// Normal bundle of a proper transform, `c(NN) c(CC (x) L)` with
/// `L = O(-e)` or `O(e)`; `NN` has rank `d_prime` and `CC` rank `excess`.
/// The `z`-free part stands for `c(N_Y Z)`.
pub fn newnormal_chern(d_prime: usize, excess: usize, twist: Twist, bound: u32) -> Result<TwistedOperator> {
    let table = operator_table(d_prime, excess)?;
    let ring = operator_ring(&table, bound);
    let z = table.len() - 1;
    let nn = formal_bundle(&ring, 0, d_prime)?;
    let cc = formal_bundle(&ring, d_prime, excess)?;
    let line = ChowClass::new(&ring, &GradedPoly::var(&table, z))?.scale(&crate::gradedpoly::rational(twist.sign()));
    let expr = nn.total().try_mul(&tensor_line(&cc, &line)?.total())?;
    TwistedOperator::new(d_prime, excess, d_prime + excess, bound, formal_normal(&table, d_prime), expr.value().clone())
}
