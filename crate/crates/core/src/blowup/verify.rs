//! Verification checks for the blow-up formulas.
//!
//! Each check returns a [`VerificationReport`]. On failure the residual is
//! the full difference polynomial (or the pair of differences under `f_*`
//! and `j^*`), so a sign slip shows up in the output.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use web_time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::formulas::{
    difflp_expansion, difflp_total_chern, main_normal_chern, newnormal_chern, oldrec_operator, oldrec_total_chern,
    porteous_alpha_in, porteous_delta, simlem_expansion, Twist,
};
use super::operator::{OperatorBinding, PreparedOperator};
use super::universal::{split_universal_context, universal_bundle, universal_context};
use super::{bl_difference, bl_restrict, BlowupClass, BlowupContext, Pushforward, RingMap};
use crate::bundles::{tensor_line, BundleClass};
use crate::chowring::{ChowClass, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{rational, GradedPoly, VarTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub pass: bool,
    /// Canonical residual, `0` on success.
    pub residual: String,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    /// Builds a report from a check outcome: `None` is a pass, `Some` a residual.
    pub fn from_outcome(check: &str, parameters: BTreeMap<String, Value>, outcome: Result<Option<String>>, start: Instant) -> Self {
        let (pass, residual) = match outcome {
            Ok(None) => (true, "0".to_string()),
            Ok(Some(r)) => (false, r),
            Err(e) => (false, format!("error: {e}")),
        };
        VerificationReport {
            check: check.to_string(),
            parameters,
            pass,
            residual,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    /// One line without timing, stable across runs.
    pub fn summary_line(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("{verdict} {}", self.check);
        if !params.is_empty() {
            line.push_str(&format!(" [{}]", params.join(", ")));
        }
        if !self.pass {
            line.push_str(&format!(" residual: {}", self.residual));
        }
        line
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary_line())
    }
}

fn params<const N: usize>(entries: [(&str, Value); N]) -> BTreeMap<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn residual_of(diff: &ChowClass) -> Option<String> {
    (!diff.is_zero()).then(|| diff.to_string())
}

/// `None` when the classes agree, otherwise both differences.
fn compare(label: &str, a: &BlowupClass, b: &BlowupClass) -> Result<Option<String>> {
    let (p, r) = bl_difference(a, b)?;
    if p.is_zero() && r.is_zero() {
        Ok(None)
    } else {
        Ok(Some(format!("{label}: f_* difference {p}; j^* difference {r}")))
    }
}

fn first_failure<I>(checks: I) -> Result<Option<String>>
where
    I: IntoIterator<Item = Result<Option<String>>>,
{
    for c in checks {
        if let Some(r) = c? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Degree bound on the exceptional divisor, `2d + 2` unless overridden.
pub fn default_trunc(d: usize, max_degree: Option<u32>) -> u32 {
    max_degree.unwrap_or(2 * d as u32 + 2)
}

fn require_codim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidScenario("codimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `f^*(H^k)` for `k` up to the degree bound of `X`, plus `f^* t`.
fn spanning_set(ctx: &Arc<BlowupContext>) -> Result<Vec<(String, ChowClass)>> {
    let ring = ctx.ring_y();
    let h = ChowClass::var(ring, "H")?;
    let top = ctx.ring_x().bound().unwrap_or(0);
    let mut out: Vec<(String, ChowClass)> = (0..=top).map(|k| (format!("H^{k}"), h.pow(k))).collect();
    if let Ok(t) = ChowClass::var(ring, "t") {
        out.push(("t".into(), t));
    }
    Ok(out)
}

/// `f^* y + j_*(g^*(i^* y . s(N)) . alpha)`, the classical formula with `y`
/// in place of `c(Y)`.
fn porteous_total(ctx: &Arc<BlowupContext>, y: &ChowClass) -> Result<BlowupClass> {
    let bound = ctx.ring_x().bound().unwrap_or(0);
    let cx = ctx.pull_i(y)?.try_mul(&ctx.normal().segre(bound)?)?;
    BlowupClass::pullback(ctx, y)?.try_add(&porteous_delta(ctx, &cx)?)
}

/// `g_* alpha = d - 1`.
pub fn verify_pushforward_identity(d: usize) -> VerificationReport {
    let start = Instant::now();
    let outcome = (|| {
        require_codim(d)?;
        let pb = universal_bundle(d, 2 * d as u32 + 2)?;
        let pushed = pb.pushforward(&porteous_alpha_in(&pb)?)?;
        let expected = ChowClass::constant(pb.base(), rational(d as i64 - 1));
        Ok(residual_of(&pushed.try_sub(&expected)?))
    })();
    VerificationReport::from_outcome("pushforward_identity", params([("d", d.into())]), outcome, start)
}

/// `g^* c(N) - z alpha = (1 - z) c(N (x) O(1))`.
pub fn verify_restriction_identity(d: usize) -> VerificationReport {
    let start = Instant::now();
    let outcome = (|| {
        require_codim(d)?;
        let pb = universal_bundle(d, 2 * d as u32 + 2)?;
        let ring = pb.total();
        let comps = pb
            .chern()
            .iter()
            .map(|c| pb.pullback(&ChowClass::new(pb.base(), c)?))
            .collect::<Result<Vec<_>>>()?;
        let n = BundleClass::new(d, comps)?;
        let zeta = pb.zeta();
        let lhs = n.total().try_sub(&zeta.try_mul(&porteous_alpha_in(&pb)?)?)?;
        let one_minus = ChowClass::one(ring).try_sub(&zeta)?;
        let rhs = one_minus.try_mul(&tensor_line(&n, &zeta)?.total())?;
        Ok(residual_of(&lhs.try_sub(&rhs)?))
    })();
    VerificationReport::from_outcome("restriction_identity", params([("d", d.into())]), outcome, start)
}

/// The tangent-class operator `(1 - z) c(NN (x) O(1)) / c(NN)` against the
/// classical formula, for a center of codimension `d` in `Y` and `E` of rank
/// `rank_e` carrying `q_1..q_(rank_e - d)`.
///
/// Also checks the formal identity behind the operator: multiplying it by the
/// normal-bundle expression of the blow-up in `P(E)` gives
/// `c(NN (x) O(1)) c(CC (x) O(1))`.
pub fn verify_oldrec_equals_porteous(d: usize, rank_e: usize, max_degree: Option<u32>) -> VerificationReport {
    let start = Instant::now();
    let trunc = default_trunc(d, max_degree);
    let outcome = (|| {
        require_codim(d)?;
        if rank_e < d {
            return Err(Error::RankUnderflow { total: rank_e, sub: d });
        }
        let excess = rank_e - d;
        let bound = trunc + 1;
        let main = main_normal_chern(d, excess, bound)?;
        let table = main.table().clone();
        let old = oldrec_operator(d, bound)?;
        let images: Vec<GradedPoly> = (0..d)
            .chain(std::iter::once(table.len() - 1))
            .map(|v| GradedPoly::var(&table, v))
            .collect();
        let old = old.expr().map_into(&table, &images, Some(bound))?;
        let product = old.mul_bounded(main.expr(), Some(bound))?;
        let z = table.len() - 1;
        let ring = RingPresentation::free(&table).with_truncation(bound).into_arc();
        let zeta = ChowClass::new(&ring, &GradedPoly::var(&table, z))?;
        let nn = BundleClass::new(
            d,
            std::iter::once(Ok(ChowClass::one(&ring)))
                .chain((0..d).map(|i| ChowClass::new(&ring, &GradedPoly::var(&table, i))))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let cc = BundleClass::new(
            excess,
            std::iter::once(Ok(ChowClass::one(&ring)))
                .chain((0..excess).map(|j| ChowClass::new(&ring, &GradedPoly::var(&table, d + j))))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let tangent = tensor_line(&nn, &zeta)?.total().try_mul(&tensor_line(&cc, &zeta)?.total())?;
        let formal = ChowClass::new(&ring, &product)?.try_sub(&tangent)?;
        if !formal.is_zero() {
            return Ok(Some(format!("operator product: {formal}")));
        }

        let ctx = universal_context(d, excess, trunc)?;
        let binding = OperatorBinding::normal_only(&ctx, ChowClass::one(ctx.ring_y()));
        let op = PreparedOperator::new(&oldrec_operator(d, bound)?, &binding, &ctx)?;
        first_failure(spanning_set(&ctx)?.into_iter().map(|(label, y)| {
            let lhs = op.apply(&BlowupClass::pullback(&ctx, &y)?)?;
            compare(&label, &lhs, &porteous_total(&ctx, &y)?)
        }))
    })();
    VerificationReport::from_outcome(
        "oldrec_equals_porteous",
        params([("d", d.into()), ("rank_e", rank_e.into()), ("max_degree", trunc.into())]),
        outcome,
        start,
    )
}

/// The log-tangent form against the classical formula for a split normal
/// bundle, `c_i(N) = e_i(z_1..z_d)`.
pub fn verify_difflp_equals_porteous(d: usize, max_degree: Option<u32>) -> VerificationReport {
    let start = Instant::now();
    let trunc = default_trunc(d, max_degree);
    let outcome = (|| {
        require_codim(d)?;
        let (ctx, hyper) = split_universal_context(d, trunc)?;
        let op = difflp_expansion(&ctx, &hyper)?.prepare()?;
        first_failure(spanning_set(&ctx)?.into_iter().map(|(label, y)| {
            let lhs = op.apply(&BlowupClass::pullback(&ctx, &y)?)?;
            compare(&label, &lhs, &porteous_total(&ctx, &y)?)
        }))
    })();
    VerificationReport::from_outcome(
        "difflp_equals_porteous",
        params([("d", d.into()), ("max_degree", trunc.into())]),
        outcome,
        start,
    )
}

/// A random homogeneous polynomial of the given weight with small integer
/// coefficients.
fn random_poly(rng: &mut ChaCha8Rng, table: &Arc<VarTable>, weight: u32) -> GradedPoly {
    let monomials = table.monomials_of_weight(weight);
    let mut out = GradedPoly::zero(table);
    for m in monomials {
        if rng.gen_bool(0.4) {
            let c: i64 = rng.gen_range(-3..=3);
            out = &out + &GradedPoly::monomial(table, m, rational(c));
        }
    }
    out
}

/// A bundle on `Y` with `c_k = lift_k + t . (random of degree k - 1)`, so it
/// restricts to the bundle with classes `lift_k`.
fn random_extension(
    rng: &mut ChaCha8Rng,
    ring_y: &Arc<RingPresentation>,
    names: &[String],
) -> Result<BundleClass> {
    let table = ring_y.table();
    let t = GradedPoly::var_named(table, "t")?;
    let mut comps = vec![ChowClass::one(ring_y)];
    for (k, name) in names.iter().enumerate() {
        let base = GradedPoly::var_named(table, name)?;
        let noise = &t * &random_poly(rng, table, k as u32);
        comps.push(ChowClass::new(ring_y, &(&base + &noise))?);
    }
    BundleClass::new(names.len(), comps)
}

/// Complete-intersection form against the general normal-bundle formula,
/// over `cases` random extensions `NN^`, `CC^` of `N` and of an excess bundle
/// of rank `excess`.
pub fn verify_simlem_equals_main(
    d: usize,
    excess: usize,
    cases: usize,
    seed: u64,
    max_degree: Option<u32>,
) -> VerificationReport {
    let start = Instant::now();
    let trunc = default_trunc(d, max_degree);
    let outcome = (|| {
        require_codim(d)?;
        let ctx = universal_context(d, excess, trunc)?;
        let bound = trunc + 1;
        let main = main_normal_chern(d, excess, bound)?;
        let n_names: Vec<String> = (1..=d).map(|i| format!("n{i}")).collect();
        let q_names: Vec<String> = (1..=excess).map(|j| format!("q{j}")).collect();
        let excess_x = BundleClass::new(
            excess,
            std::iter::once(Ok(ChowClass::one(ctx.ring_x())))
                .chain(q_names.iter().map(|q| ChowClass::var(ctx.ring_x(), q)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let span = spanning_set(&ctx)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for case in 0..cases {
            let nhat = random_extension(&mut rng, ctx.ring_y(), &n_names)?;
            let chat = random_extension(&mut rng, ctx.ring_y(), &q_names)?;
            let simlem = simlem_expansion(&ctx, &nhat, &chat)?.prepare()?;
            let f0 = nhat.total().try_mul(&chat.total())?;
            let binding = OperatorBinding::new(ctx.normal(), &excess_x, f0);
            let general = PreparedOperator::new(&main, &binding, &ctx)?;
            for (label, y) in &span {
                let a = BlowupClass::pullback(&ctx, y)?;
                if let Some(r) = compare(&format!("case {case}, {label}"), &simlem.apply(&a)?, &general.apply(&a)?)? {
                    return Ok(Some(r));
                }
            }
        }
        Ok(None)
    })();
    VerificationReport::from_outcome(
        "simlem_equals_main",
        params([
            ("d", d.into()),
            ("excess", excess.into()),
            ("cases", cases.into()),
            ("seed", seed.into()),
            ("max_degree", trunc.into()),
        ]),
        outcome,
        start,
    )
}

/// `c(O(-e))^(-1) . a`, computed with honest multiplication by `e`.
fn divide_by_one_plus_e(a: &BlowupClass, terms: u32) -> Result<BlowupClass> {
    let mut acc = a.clone();
    let mut power = a.clone();
    for k in 1..=terms {
        power = power.mul_exceptional()?;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        acc = acc.try_add(&power.scale(&rational(sign)))?;
    }
    Ok(acc)
}

/// `c(L)` for `L = O(-e)` (sign `+1`) or `O(e)` (sign `-1`), applied to `a`
/// with powers of `e` evaluated honestly, then twisted into `c(V (x) L)`.
fn honest_twisted_chern(v: &BundleClass, sign: i64, a: &BlowupClass) -> Result<BlowupClass> {
    // c_k(V (x) L) = sum_i C(r - i, k - i) c_i(V) l^(k - i), l = -sign . e
    let r = v.rank();
    let mut total = BlowupClass::zero(a.ctx());
    for i in 0..=r {
        let ci = a.mul_pullback(&v.c(i))?;
        let mut power = ci;
        for m in 0..=(r - i) {
            let coeff = num_integer::binomial(r - i, m) as i64;
            total = total.try_add(&power.scale(&rational(coeff)))?;
            power = power.mul_exceptional()?.scale(&rational(-sign));
        }
    }
    Ok(total)
}

/// A line through the blown-up point of the plane: `Y = P^1`, `X = W` a
/// point, `N_Y Z = O(1)`. The proper transform of the line has
/// self-intersection 0, so its normal bundle has degree 0. Returns that
/// degree as computed by the operator with the given twist.
pub fn line_in_plane_normal_degree(twist: Twist) -> Result<GradedPoly> {
    let y = RingPresentation::projective_space("H", 1)?.into_arc();
    let tx = VarTable::new(Vec::<(String, u32)>::new())?;
    let x = RingPresentation::free(&tx).with_dim(0, Some(tx.one_exps()))?.into_arc();
    let restrict = RingMap::new(&y, &x, vec![GradedPoly::zero(&tx)])?;
    let push = Pushforward::new(&x, &y, vec![], ChowClass::parse(&y, "H")?)?;
    let ctx = BlowupContext::new(&y, BundleClass::trivial(&x, 1), Some(restrict), Some(push))?;
    let op = newnormal_chern(0, 1, twist, 2)?;
    let excess = BundleClass::trivial(&x, 1);
    let binding = OperatorBinding::new(&BundleClass::trivial(&x, 0), &excess, ChowClass::parse(&y, "1 + H")?);
    let c = PreparedOperator::new(&op, &binding, &ctx)?.apply(&BlowupClass::fundamental(&ctx))?;
    Ok(super::bl_pushforward(&c)?.component(1).value().clone())
}

fn newnormal_binding(ctx: &Arc<BlowupContext>, d_prime: usize, excess: usize, global: &BundleClass) -> Result<OperatorBinding> {
    let ring_x = ctx.ring_x();
    let n = BundleClass::new(
        d_prime,
        std::iter::once(Ok(ChowClass::one(ring_x)))
            .chain((1..=d_prime).map(|i| ChowClass::var(ring_x, &format!("n{i}"))))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let c = BundleClass::new(
        excess,
        std::iter::once(Ok(ChowClass::one(ring_x)))
            .chain((1..=excess).map(|j| ChowClass::var(ring_x, &format!("q{j}"))))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(OperatorBinding::new(&n, &c, global.total()))
}

/// `N_Y Z` on `Y` with `c_j = q_j + t^j`, restricting to the excess classes.
fn global_excess(ctx: &Arc<BlowupContext>, excess: usize) -> Result<BundleClass> {
    let ring = ctx.ring_y();
    let mut comps = vec![ChowClass::one(ring)];
    for j in 1..=excess {
        comps.push(ChowClass::parse(ring, &format!("q{j} + t^{j}"))?);
    }
    BundleClass::new(excess, comps)
}

fn extremes_check(d_prime: usize, excess: usize, twist: Twist, trunc: u32) -> Result<Option<String>> {
    let bound = trunc + 1;

    // Both bundles on X: F_0 is c(NN) c(CC).
    let op = newnormal_chern(d_prime, excess, twist, bound)?;
    let table = op.table().clone();
    let mut f0 = GradedPoly::one(&table);
    for (first, rank) in [(0, d_prime), (d_prime, excess)] {
        let mut c = GradedPoly::one(&table);
        for v in first..first + rank {
            c = &c + &GradedPoly::var(&table, v);
        }
        f0 = &f0 * &c;
    }
    if op.f0() != &f0 {
        return Ok(Some(format!("z-free part {} differs from c(NN) c(CC) = {f0}", op.f0())));
    }

    // Proper intersection: no excess bundle, the operator is c(f^* N_Y Z).
    let proper = newnormal_chern(d_prime, 0, twist, bound)?;
    if !proper.fplus().is_zero() {
        return Ok(Some(format!("proper intersection leaves z-terms {}", proper.fplus())));
    }
    if d_prime >= 1 {
        let ctx = universal_context(d_prime, 0, trunc)?;
        let nyz = BundleClass::new(
            d_prime,
            std::iter::once(Ok(ChowClass::one(ctx.ring_y())))
                .chain((1..=d_prime).map(|i| ChowClass::parse(ctx.ring_y(), &format!("n{i} + H^{i}"))))
                .collect::<Result<Vec<_>>>()?,
        )?;
        // here NN restricts to the normal bundle of X in W, independent of N_X Y
        let binding = newnormal_binding(&ctx, d_prime, 0, &nyz)?;
        let prepared = PreparedOperator::new(&proper, &binding, &ctx)?;
        for (label, y) in spanning_set(&ctx)? {
            let a = BlowupClass::pullback(&ctx, &y)?;
            let honest = a.mul_pullback(&nyz.total())?;
            if let Some(r) = compare(&format!("proper intersection, {label}"), &prepared.apply(&a)?, &honest)? {
                return Ok(Some(r));
            }
        }
    }

    // X = W: NN = 0, CC = N_Y Z restricted, against c(f^* N_Y Z (x) O(-e)).
    if excess >= 1 {
        let codim = d_prime.max(1);
        let ctx = universal_context(codim, excess, trunc)?;
        let op = newnormal_chern(0, excess, twist, bound)?;
        let nyz = global_excess(&ctx, excess)?;
        let binding = newnormal_binding(&ctx, 0, excess, &nyz)?;
        let prepared = PreparedOperator::new(&op, &binding, &ctx)?;
        for (label, y) in spanning_set(&ctx)? {
            let a = BlowupClass::pullback(&ctx, &y)?;
            let honest = honest_twisted_chern(&nyz, 1, &a)?;
            if let Some(r) = compare(&format!("center inside W, {label}"), &prepared.apply(&a)?, &honest)? {
                return Ok(Some(r));
            }
        }
    }

    // Blow-up inside P(E): dividing by c(O(e)) = 1 - z gives the normal
    // bundle formula, both formally and as operators.
    let d = d_prime.max(1);
    let instance = newnormal_chern(d, excess, twist, bound)?;
    let main = main_normal_chern(d, excess, bound)?;
    let z = instance.zeta_var();
    let inv = (GradedPoly::one(instance.table()) - GradedPoly::var(instance.table(), z)).series_inverse(bound)?;
    let divided = instance.expr().mul_bounded(&inv, Some(bound))?;
    if &divided != main.expr() {
        return Ok(Some(format!("c(N~E~) / (1 - z) - main = {}", divided.try_sub(main.expr())?)));
    }
    let ctx = universal_context(d, excess, trunc)?;
    let n_total = (1..=d).try_fold(ChowClass::one(ctx.ring_y()), |acc, i| {
        acc.try_add(&ChowClass::var(ctx.ring_y(), &format!("n{i}"))?)
    })?;
    let q_total = global_excess(&ctx, excess)?.total();
    let e_bundle = BundleClass::from_total(d + excess, &n_total.try_mul(&q_total)?)?;
    let binding = newnormal_binding(&ctx, d, excess, &e_bundle)?;
    let new_prepared = PreparedOperator::new(&instance, &binding, &ctx)?;
    let main_prepared = PreparedOperator::new(&main, &binding, &ctx)?;
    for (label, y) in spanning_set(&ctx)? {
        let a = BlowupClass::pullback(&ctx, &y)?;
        let lhs = main_prepared.apply(&a)?;
        let rhs = new_prepared.apply(&divide_by_one_plus_e(&a, bound)?)?;
        if let Some(r) = compare(&format!("inside P(E), {label}"), &lhs, &rhs)? {
            return Ok(Some(r));
        }
    }

    // The line through the blown-up point of the plane.
    let degree = line_in_plane_normal_degree(twist)?;
    if !degree.is_zero() {
        return Ok(Some(format!("proper transform of a line through the point has normal degree {degree}")));
    }
    Ok(None)
}

/// Degenerate cases of the proper-transform operator with `NN` of rank
/// `d_prime` and `CC` of rank `excess`, under the default twist. The
/// parameters record whether the opposite twist would also pass.
pub fn verify_newnormal_extremes(d_prime: usize, excess: usize, max_degree: Option<u32>) -> VerificationReport {
    let start = Instant::now();
    let trunc = default_trunc(d_prime.max(1), max_degree);
    let twist = Twist::default();
    let other = match twist {
        Twist::MinusExceptional => Twist::PlusExceptional,
        Twist::PlusExceptional => Twist::MinusExceptional,
    };
    let outcome = extremes_check(d_prime, excess, twist, trunc);
    let other_passes = matches!(extremes_check(d_prime, excess, other, trunc), Ok(None));
    VerificationReport::from_outcome(
        "newnormal_extremes",
        params([
            ("d_prime", d_prime.into()),
            ("excess", excess.into()),
            ("twist", twist.to_string().into()),
            ("opposite_twist_passes", other_passes.into()),
            ("max_degree", trunc.into()),
        ]),
        outcome,
        start,
    )
}

/// `j^* j_* beta = -z beta` for `beta` in `{1, z, g^* generators}`.
pub fn verify_self_intersection(d: usize) -> VerificationReport {
    let start = Instant::now();
    let outcome = (|| {
        require_codim(d)?;
        let ctx = universal_context(d, 0, default_trunc(d, None))?;
        let zeta = ctx.zeta();
        let mut betas = vec![ChowClass::one(ctx.ring_xt()), zeta.clone()];
        for v in 0..ctx.ring_x().table().len() {
            let g = GradedPoly::var(ctx.ring_x().table(), v);
            betas.push(ctx.g_pull(&ChowClass::new(ctx.ring_x(), &g)?)?);
        }
        for beta in betas {
            let restricted = bl_restrict(&BlowupClass::exceptional(&ctx, &beta)?)?;
            let expected = -&zeta.try_mul(&beta)?;
            if let Some(r) = residual_of(&restricted.try_sub(&expected)?) {
                return Ok(Some(format!("beta = {beta}: {r}")));
            }
        }
        Ok(None)
    })();
    VerificationReport::from_outcome("self_intersection", params([("d", d.into())]), outcome, start)
}

/// `f^* i_* x = j_*(c_(d-1)(Q) g^* x)` with `Q = g^* N / O(-1)`.
pub fn verify_key_formula(d: usize) -> VerificationReport {
    let start = Instant::now();
    let outcome = (|| {
        require_codim(d)?;
        let ctx = universal_context(d, 0, 2 * d as u32 + 2)?;
        let table = ctx.ring_xt().table();
        let z = ctx.exceptional().zeta_var();
        // c(Q) = c(N) / (1 - z); its degree d-1 part
        let mut top = GradedPoly::zero(table);
        for i in 0..d {
            let ci = ctx.normal().c(i).value().embed(table)?;
            top = &top + &ci.shift_var(z, (d - 1 - i) as u16);
        }
        let top = ChowClass::new(ctx.ring_xt(), &top)?;
        let tx = ctx.ring_x().table();
        let mut xs = vec![("1".to_string(), ChowClass::one(ctx.ring_x()))];
        for v in 0..tx.len() {
            xs.push((tx.name(v).to_string(), ChowClass::new(ctx.ring_x(), &GradedPoly::var(tx, v))?));
        }
        xs.push(("h^2".into(), ChowClass::parse(ctx.ring_x(), "h^2")?));
        first_failure(xs.into_iter().map(|(label, x)| {
            let lhs = BlowupClass::pullback(&ctx, &ctx.push_i(&x)?)?;
            let rhs = BlowupClass::exceptional(&ctx, &top.try_mul(&ctx.g_pull(&x)?)?)?;
            compare(&label, &lhs, &rhs)
        }))
    })();
    VerificationReport::from_outcome("key_formula", params([("d", d.into())]), outcome, start)
}

/// Codimension one: `alpha = 0`, the log-tangent factor and the tangent-class
/// operator act as the identity.
pub fn verify_d1_degeneracy() -> VerificationReport {
    let start = Instant::now();
    let outcome = (|| {
        let ctx = universal_context(1, 0, 4)?;
        let alpha = super::porteous_alpha(&ctx)?;
        if !alpha.is_zero() {
            return Ok(Some(format!("alpha = {alpha}")));
        }
        let reduced = super::formulas::difflp_operator(1, 6)?.reduced()?;
        if !reduced.is_one() {
            return Ok(Some(format!("log-tangent factor reduces to {reduced}")));
        }
        let reduced = oldrec_operator(1, 6)?.reduced()?;
        if !reduced.is_one() {
            return Ok(Some(format!("tangent-class operator reduces to {reduced}")));
        }
        let (split, hyper) = split_universal_context(1, 4)?;
        for (label, y) in spanning_set(&ctx)? {
            let delta = porteous_delta(&ctx, &ctx.pull_i(&y)?)?;
            if !delta.is_zero()? {
                return Ok(Some(format!("{label}: correction term is nonzero")));
            }
            let a = BlowupClass::pullback(&ctx, &y)?;
            if let Some(r) = compare(&label, &oldrec_total_chern(&ctx, &y)?, &a)? {
                return Ok(Some(r));
            }
        }
        for (label, y) in spanning_set(&split)? {
            let a = BlowupClass::pullback(&split, &y)?;
            if let Some(r) = compare(&label, &difflp_total_chern(&split, &hyper, &y)?, &a)? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    })();
    VerificationReport::from_outcome("d1_degeneracy", BTreeMap::new(), outcome, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_identities_small_codim() {
        for d in 1..=4 {
            let r = verify_pushforward_identity(d);
            assert!(r.pass, "{r}");
            let r = verify_restriction_identity(d);
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn oldrec_and_difflp_small_codim() {
        for d in 1..=2 {
            let r = verify_oldrec_equals_porteous(d, d + 1, None);
            assert!(r.pass, "{r}");
            let r = verify_difflp_equals_porteous(d, None);
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn simlem_small_codim() {
        let r = verify_simlem_equals_main(2, 1, 3, 7, None);
        assert!(r.pass, "{r}");
    }

    #[test]
    fn newnormal_sign_is_forced() {
        assert!(line_in_plane_normal_degree(Twist::MinusExceptional).unwrap().is_zero());
        assert_eq!(line_in_plane_normal_degree(Twist::PlusExceptional).unwrap().to_string(), "2*H");
        let r = verify_newnormal_extremes(1, 1, None);
        assert!(r.pass, "{r}");
        assert_eq!(r.parameters["opposite_twist_passes"], Value::Bool(false));
    }

    #[test]
    fn self_intersection_and_key_formula() {
        for d in 1..=3 {
            assert!(verify_self_intersection(d).pass);
            let r = verify_key_formula(d);
            assert!(r.pass, "{r}");
        }
        let r = verify_d1_degeneracy();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn report_lines_are_stable() {
        let r = verify_pushforward_identity(2);
        assert_eq!(r.summary_line(), "PASS pushforward_identity [d=2]");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["residual"], "0");
        assert!(json.get("elapsed_ms").is_some());
    }
}
