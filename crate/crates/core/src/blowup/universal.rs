//! Universal blow-up squares.
//!
//! The center is `X` with a free Chow ring on `h`, the Chern classes
//! `n_1..n_d` of the normal bundle `N` and the classes `q_1..q_r` of an extra
//! bundle, truncated above some degree. The ambient space is the projective
//! completion `Y = P(N + O)` of `N`, with `X` embedded as the section
//! `P(0 + O)`:
//!
//! * `A(Y) = A(X)[t] / (t^(d+1) + n_1 t^d + ... + n_d t)` with `t = c_1(O(1))`,
//!   so `t` restricts to zero on `X`;
//! * the normal bundle of the section is `N`, and `[X] = c_d(N (x) O(1)) =
//!   sum n_i t^(d-i)`;
//! * `i_*(x) = pi^*(x) [X]` for the bundle projection `pi`.
//!
//! Identities that hold here hold for every blow-up along a regular
//! embedding, since the classes `n_i`, `q_j`, `h` are algebraically
//! independent.
//!
//! The base ring `A(X)` is truncated above `trunc - d + 1`, and `Y`, `P(N)`
//! are built over this truncated ring rather than truncated by total degree,
//! so every ring in the square is an honest quotient of the universal one.
//! Classes on `P(N)` then vanish above `trunc` and those on `Y` above
//! `trunc + 1`.

use std::sync::Arc;

use super::{BlowupContext, Pushforward, RingMap};
use crate::bundles::BundleClass;
use crate::chowring::{ChowClass, ProjectiveBundle, RewriteRule, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{GradedPoly, VarTable};

fn x_bound(d: usize, trunc: u32) -> Result<u32> {
    if d == 0 {
        return Err(Error::EmptyBundle);
    }
    (trunc + 1)
        .checked_sub(d as u32)
        .ok_or_else(|| Error::InvalidScenario(format!("truncation {trunc} is below codimension {d} - 1")))
}

/// `P(N)` over `Q[n_1..n_d]` with the exceptional ring truncated above `trunc`.
pub fn universal_bundle(d: usize, trunc: u32) -> Result<ProjectiveBundle> {
    let xb = x_bound(d, trunc)?;
    let table = VarTable::new((1..=d).map(|i| (format!("n{i}"), i as u32)))?;
    let base = RingPresentation::free(&table).with_truncation(xb).into_arc();
    let mut chern = vec![GradedPoly::one(&table)];
    chern.extend((0..d).map(|i| GradedPoly::var(&table, i)));
    ProjectiveBundle::new(&base, d, &chern, "z")
}

/// `t^(d+1) -> -sum_{i=1}^{d} c_i t^(d+1-i)`, the relation of `P(N + O)`.
fn completion_rule(table: &Arc<VarTable>, t: usize, chern: &[GradedPoly]) -> Result<RewriteRule> {
    let d = chern.len() - 1;
    let parts: Vec<GradedPoly> =
        (1..=d).map(|i| -chern[i].shift_var(t, (d + 1 - i) as u16)).collect();
    RewriteRule::new(t, (d + 1) as u16, GradedPoly::sum(table, &parts)?)
}

/// Builds the square from the `X` table, its `Y` counterpart (same variables
/// renamed where wanted, plus `t` last) and the Chern classes of `N` on `X`.
fn complete(
    x_table: &Arc<VarTable>,
    y_table: &Arc<VarTable>,
    normal: &[GradedPoly],
    trunc: u32,
) -> Result<Arc<BlowupContext>> {
    let d = normal.len() - 1;
    let xb = x_bound(d, trunc)?;
    let ring_x = RingPresentation::free(x_table).with_truncation(xb).into_arc();
    let t = y_table.len() - 1;
    let lift: Vec<GradedPoly> =
        (0..x_table.len()).map(|v| GradedPoly::var(y_table, v)).collect();
    let normal_y: Vec<GradedPoly> = normal
        .iter()
        .map(|c| c.map_into(y_table, &lift, None))
        .collect::<Result<_>>()?;
    let ring_y = RingPresentation::free(y_table)
        .with_rule(completion_rule(y_table, t, &normal_y)?)?
        .with_truncation(trunc + 1)
        .with_base_bound(t, xb)?
        .into_arc();

    let mut restrict: Vec<GradedPoly> =
        (0..x_table.len()).map(|v| GradedPoly::var(x_table, v)).collect();
    restrict.push(GradedPoly::zero(x_table));
    let restrict = RingMap::new(&ring_y, &ring_x, restrict)?;

    let section: Vec<GradedPoly> =
        (0..=d).map(|i| normal_y[i].shift_var(t, (d - i) as u16)).collect();
    let class = ChowClass::new(&ring_y, &GradedPoly::sum(y_table, &section)?)?;
    let push = Pushforward::new(&ring_x, &ring_y, lift, class)?;

    let comps = normal.iter().map(|c| ChowClass::new(&ring_x, c)).collect::<Result<Vec<_>>>()?;
    BlowupContext::new(&ring_y, BundleClass::new(d, comps)?, Some(restrict), Some(push))
}

/// Universal square with normal bundle of rank `d` and `excess` extra classes
/// `q_1..q_excess` on `X`. `X` carries `h`, `Y` carries its lift `H`.
pub fn universal_context(d: usize, excess: usize, trunc: u32) -> Result<Arc<BlowupContext>> {
    let mut x_vars: Vec<(String, u32)> = vec![("h".into(), 1)];
    x_vars.extend((1..=d).map(|i| (format!("n{i}"), i as u32)));
    x_vars.extend((1..=excess).map(|j| (format!("q{j}"), j as u32)));
    let mut y_vars = x_vars.clone();
    y_vars[0].0 = "H".into();
    y_vars.push(("t".into(), 1));
    let x_table = VarTable::new(x_vars)?;
    let y_table = VarTable::new(y_vars)?;
    let mut normal = vec![GradedPoly::one(&x_table)];
    normal.extend((1..=d).map(|i| GradedPoly::var(&x_table, i)));
    complete(&x_table, &y_table, &normal, trunc)
}

/// Universal square with split normal bundle `N = L_1 + ... + L_d`,
/// `c_1(L_i) = z_i`. `X` is the transversal intersection of the hypersurfaces
/// `Z_i = t + z_i` of `Y`; these are returned alongside the context.
pub fn split_universal_context(d: usize, trunc: u32) -> Result<(Arc<BlowupContext>, Vec<ChowClass>)> {
    let mut x_vars: Vec<(String, u32)> = vec![("h".into(), 1)];
    x_vars.extend((1..=d).map(|i| (format!("z{i}"), 1)));
    let mut y_vars = x_vars.clone();
    y_vars[0].0 = "H".into();
    y_vars.push(("t".into(), 1));
    let x_table = VarTable::new(x_vars)?;
    let y_table = VarTable::new(y_vars)?;
    let mut total = GradedPoly::one(&x_table);
    for i in 1..=d {
        total = &total * &(GradedPoly::one(&x_table) + GradedPoly::var(&x_table, i));
    }
    let normal: Vec<GradedPoly> = (0..=d as u32).map(|k| total.component(k)).collect();
    let ctx = complete(&x_table, &y_table, &normal, trunc)?;
    let t = GradedPoly::var(&y_table, y_table.len() - 1);
    let hyper = (1..=d)
        .map(|i| ChowClass::new(ctx.ring_y(), &(&t + &GradedPoly::var(&y_table, i))))
        .collect::<Result<Vec<_>>>()?;
    Ok((ctx, hyper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_square_satisfies_projection_formula() {
        for d in 1..=3 {
            let ctx = universal_context(d, 1, 2 * d as u32 + 2).unwrap();
            assert_eq!(ctx.check_projection_formula().unwrap(), None, "d = {d}");
        }
        let (ctx, _) = split_universal_context(2, 5).unwrap();
        assert_eq!(ctx.check_projection_formula().unwrap(), None);
    }

    #[test]
    fn self_intersection_of_the_section() {
        // i^* i_* 1 = c_d(N)
        let ctx = universal_context(2, 0, 6).unwrap();
        let one = ChowClass::one(ctx.ring_x());
        let self_int = ctx.pull_i(&ctx.push_i(&one).unwrap()).unwrap();
        assert_eq!(self_int, ctx.normal().c(2));
    }

    #[test]
    fn split_hypersurfaces_cut_out_the_center() {
        let (ctx, hyper) = split_universal_context(3, 6).unwrap();
        let mut prod = ChowClass::one(ctx.ring_y());
        for z in &hyper {
            prod = &prod * z;
        }
        assert_eq!(prod, ctx.push_i(&ChowClass::one(ctx.ring_x())).unwrap());
    }

    #[test]
    fn bounds_follow_codimension() {
        let ctx = universal_context(3, 0, 8).unwrap();
        assert_eq!(ctx.ring_x().bound(), Some(6));
        assert_eq!(ctx.ring_xt().bound(), Some(8));
        assert_eq!(ctx.ring_y().bound(), Some(9));
        assert!(universal_context(4, 0, 2).is_err());
    }
}
