//! Presented graded rings standing in for Chow rings.
//!
//! A presentation is a free polynomial ring on a [`VarTable`] together with
//! top-power rewrite rules `v^m -> r` (with `r` of lower degree in `v`) and an
//! optional degree bound. Everything above the bound is zero, which models
//! `A^k = 0` for `k > dim`. Bounded rings with a fundamental monomial carry a
//! degree map.
//!
//! [`ProjectiveBundle`] builds the ring of a projective bundle of lines
//! `P(N) -> X` from the ring of `X` via the Grothendieck relation
//! `sum c_i(N) z^(d-i) = 0`, with `z = c_1(O(1))`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradedpoly::{Exponents, GradedPoly, Rational, VarTable};

/// `var^power -> replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    var: usize,
    power: u16,
    replacement: GradedPoly,
}

impl RewriteRule {
    pub fn new(var: usize, power: u16, replacement: GradedPoly) -> Result<Self> {
        let table = replacement.table().clone();
        if var >= table.len() {
            return Err(Error::InvalidRule(format!("variable index {var} out of range")));
        }
        let name = table.name(var);
        if power == 0 {
            return Err(Error::InvalidRule(format!("rule for `{name}` has power 0")));
        }
        let degree = u32::from(power) * table.degree(var);
        if !replacement.is_homogeneous_of(degree) {
            return Err(Error::InvalidRule(format!(
                "replacement for `{name}^{power}` is not homogeneous of degree {degree}"
            )));
        }
        if replacement.var_degree(var) >= power {
            return Err(Error::InvalidRule(format!(
                "replacement for `{name}^{power}` does not lower the power of `{name}`"
            )));
        }
        Ok(RewriteRule { var, power, replacement })
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn power(&self) -> u16 {
        self.power
    }

    pub fn replacement(&self) -> &GradedPoly {
        &self.replacement
    }
}

/// A graded ring `Q[vars] / (rules, everything of degree > bound)`.
///
/// Base bounds `(k, b)` additionally kill every monomial whose weight in the
/// first `k` variables exceeds `b`. They model `A[z]/(rel)` over a truncated
/// coefficient ring `A`, which stays an honest ring when `A` is truncated.
#[derive(Debug)]
pub struct RingPresentation {
    table: Arc<VarTable>,
    rules: Vec<RewriteRule>,
    dim: Option<u32>,
    truncation: Option<u32>,
    base_bounds: Vec<(usize, u32)>,
    fundamental: Option<Exponents>,
    // reduced images of var^k for each rule, filled on demand
    power_cache: Vec<Mutex<Vec<GradedPoly>>>,
}

impl Clone for RingPresentation {
    fn clone(&self) -> Self {
        RingPresentation {
            table: self.table.clone(),
            rules: self.rules.clone(),
            dim: self.dim,
            truncation: self.truncation,
            base_bounds: self.base_bounds.clone(),
            fundamental: self.fundamental.clone(),
            power_cache: self.rules.iter().map(|_| Mutex::new(Vec::new())).collect(),
        }
    }
}

impl PartialEq for RingPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && self.rules == other.rules
            && self.dim == other.dim
            && self.truncation == other.truncation
            && self.base_bounds == other.base_bounds
            && self.fundamental == other.fundamental
    }
}

impl Eq for RingPresentation {}

fn same_ring(a: &Arc<RingPresentation>, b: &Arc<RingPresentation>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl RingPresentation {
    /// Polynomial ring with no relations and no bound.
    pub fn free(table: &Arc<VarTable>) -> Self {
        RingPresentation {
            table: table.clone(),
            rules: Vec::new(),
            dim: None,
            truncation: None,
            base_bounds: Vec::new(),
            fundamental: None,
            power_cache: Vec::new(),
        }
    }

    /// `Q[name] / (name^(n+1))` with fundamental class `name^n`.
    pub fn projective_space(name: &str, n: u32) -> Result<Self> {
        let table = VarTable::new([(name, 1)])?;
        let top = u16::try_from(n + 1).map_err(|_| Error::InvalidRule("dimension too large".into()))?;
        let mut fundamental = table.one_exps();
        fundamental[0] = n as u16;
        RingPresentation::free(&table)
            .with_rule(RewriteRule::new(0, top, GradedPoly::zero(&table))?)?
            .with_dim(n, Some(fundamental))
    }

    pub fn with_rule(mut self, rule: RewriteRule) -> Result<Self> {
        if rule.replacement.table() != &self.table {
            return Err(Error::TableMismatch);
        }
        if self.rules.iter().any(|r| r.var == rule.var) {
            return Err(Error::InvalidRule(format!(
                "second rule for `{}`",
                self.table.name(rule.var)
            )));
        }
        self.rules.push(rule);
        self.reset_cache();
        Ok(self)
    }

    /// Declares an honest dimension; classes above it vanish. The optional
    /// fundamental monomial must have weight `dim`.
    pub fn with_dim(mut self, dim: u32, fundamental: Option<Exponents>) -> Result<Self> {
        if let Some(f) = &fundamental {
            if f.len() != self.table.len() || self.table.weight(f) != dim {
                return Err(Error::InvalidRule(format!(
                    "fundamental monomial must have degree {dim}"
                )));
            }
        }
        self.dim = Some(dim);
        self.fundamental = fundamental;
        self.reset_cache();
        Ok(self)
    }

    /// Formal degree bound for dimension-free (universal) rings.
    pub fn with_truncation(mut self, bound: u32) -> Self {
        self.truncation = Some(bound);
        self.reset_cache();
        self
    }

    /// Kills monomials whose weight in the first `k` variables exceeds `bound`.
    pub fn with_base_bound(mut self, k: usize, bound: u32) -> Result<Self> {
        if k > self.table.len() {
            return Err(Error::InvalidRule(format!("base bound over {k} of {} variables", self.table.len())));
        }
        if !self.base_bounds.contains(&(k, bound)) {
            self.base_bounds.push((k, bound));
        }
        self.reset_cache();
        Ok(self)
    }

    pub fn base_bounds(&self) -> &[(usize, u32)] {
        &self.base_bounds
    }

    fn within_base_bounds(&self, exps: &[u16]) -> bool {
        self.base_bounds.iter().all(|&(k, b)| self.table.weight(&exps[..k]) <= b)
    }

    fn apply_base_bounds(&self, p: GradedPoly) -> GradedPoly {
        if self.base_bounds.is_empty() || p.terms().all(|(e, _)| self.within_base_bounds(e)) {
            return p;
        }
        GradedPoly::from_terms(
            &self.table,
            p.terms().filter(|(e, _)| self.within_base_bounds(e)).map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    fn reset_cache(&mut self) {
        self.power_cache = self.rules.iter().map(|_| Mutex::new(Vec::new())).collect();
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn dim(&self) -> Option<u32> {
        self.dim
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn fundamental(&self) -> Option<&Exponents> {
        self.fundamental.as_ref()
    }

    /// Degree above which every class vanishes.
    pub fn bound(&self) -> Option<u32> {
        self.dim.or(self.truncation)
    }

    pub fn rule_for(&self, var: usize) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.var == var)
    }

    /// Reduced form of `var^k` under rule `idx` alone (other rules may still apply).
    fn reduced_power(&self, idx: usize, k: u16) -> GradedPoly {
        let rule = &self.rules[idx];
        let bound = self.bound();
        let mut cache = self.power_cache[idx].lock().unwrap_or_else(|e| e.into_inner());
        if cache.is_empty() {
            cache.push(self.apply_base_bounds(rule.replacement.truncate_opt(bound)));
        }
        let m = rule.power;
        while cache.len() <= usize::from(k - m) {
            let shifted = cache.last().unwrap().shift_var(rule.var, 1);
            let mut parts = shifted.split_by_var(rule.var);
            let mut next = GradedPoly::zero(&self.table);
            if parts.len() > usize::from(m) {
                let top = parts.pop().unwrap();
                next = top.mul_bounded(&rule.replacement, bound).expect("same table");
            }
            for (j, part) in parts.iter().enumerate() {
                next = &next + &part.shift_var(rule.var, j as u16);
            }
            cache.push(self.apply_base_bounds(next.truncate_opt(bound)));
        }
        cache[usize::from(k - m)].clone()
    }

    /// Exhaustive rule application followed by truncation at the bound.
    pub fn reduce(&self, p: &GradedPoly) -> Result<GradedPoly> {
        if p.table() != &self.table {
            return Err(Error::TableMismatch);
        }
        let bound = self.bound();
        let mut cur = self.apply_base_bounds(p.truncate_opt(bound));
        loop {
            let mut changed = false;
            for (idx, rule) in self.rules.iter().enumerate() {
                if cur.var_degree(rule.var) < rule.power {
                    continue;
                }
                changed = true;
                let mut pieces = Vec::new();
                for (k, coeff) in cur.split_by_var(rule.var).into_iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let k = k as u16;
                    if k < rule.power {
                        pieces.push(coeff.shift_var(rule.var, k));
                    } else {
                        pieces.push(coeff.mul_bounded(&self.reduced_power(idx, k), bound)?);
                    }
                }
                cur = self.apply_base_bounds(GradedPoly::sum(&self.table, &pieces)?);
            }
            if !changed {
                return Ok(cur);
            }
        }
    }

    /// One rewrite step on a single monomial `exps` using rule `idx`; exposed
    /// for order-independence tests.
    pub fn rewrite_once(&self, p: &GradedPoly, idx: usize, exps: &Exponents) -> Result<GradedPoly> {
        let rule = &self.rules[idx];
        let c = p.coefficient(exps);
        if c.is_zero() || exps[rule.var] < rule.power {
            return Ok(p.clone());
        }
        let mut rest = exps.clone();
        rest[rule.var] -= rule.power;
        let old = GradedPoly::monomial(&self.table, exps.clone(), c.clone());
        let new = GradedPoly::monomial(&self.table, rest, c).try_mul(&rule.replacement)?;
        p.try_sub(&old)?.try_add(&new)
    }

    pub fn is_normal(&self, p: &GradedPoly) -> bool {
        self.rules.iter().all(|r| p.var_degree(r.var) < r.power)
            && self.bound().is_none_or(|b| p.degree().is_none_or(|d| d <= b))
            && p.terms().all(|(e, _)| self.within_base_bounds(e))
    }
}

/// An element of a presented ring, always stored in normal form.
#[derive(Clone, Debug)]
pub struct ChowClass {
    ring: Arc<RingPresentation>,
    value: GradedPoly,
}

impl PartialEq for ChowClass {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.value == other.value
    }
}

impl Eq for ChowClass {}

impl ChowClass {
    pub fn new(ring: &Arc<RingPresentation>, p: &GradedPoly) -> Result<Self> {
        Ok(ChowClass { ring: ring.clone(), value: ring.reduce(p)? })
    }

    pub fn zero(ring: &Arc<RingPresentation>) -> Self {
        ChowClass { ring: ring.clone(), value: GradedPoly::zero(ring.table()) }
    }

    pub fn one(ring: &Arc<RingPresentation>) -> Self {
        ChowClass::constant(ring, Rational::from_integer(1.into()))
    }

    pub fn constant(ring: &Arc<RingPresentation>, c: Rational) -> Self {
        ChowClass { ring: ring.clone(), value: GradedPoly::constant(ring.table(), c) }
    }

    pub fn var(ring: &Arc<RingPresentation>, name: &str) -> Result<Self> {
        ChowClass::new(ring, &GradedPoly::var_named(ring.table(), name)?)
    }

    pub fn parse(ring: &Arc<RingPresentation>, s: &str) -> Result<Self> {
        ChowClass::new(ring, &GradedPoly::parse(ring.table(), s)?)
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn value(&self) -> &GradedPoly {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn component(&self, k: u32) -> ChowClass {
        ChowClass { ring: self.ring.clone(), value: self.value.component(k) }
    }

    fn check(&self, other: &ChowClass) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &ChowClass) -> Result<ChowClass> {
        self.check(other)?;
        Ok(ChowClass { ring: self.ring.clone(), value: self.value.try_add(&other.value)? })
    }

    pub fn try_sub(&self, other: &ChowClass) -> Result<ChowClass> {
        self.check(other)?;
        Ok(ChowClass { ring: self.ring.clone(), value: self.value.try_sub(&other.value)? })
    }

    pub fn try_mul(&self, other: &ChowClass) -> Result<ChowClass> {
        self.check(other)?;
        let raw = self.value.mul_bounded(&other.value, self.ring.bound())?;
        Ok(ChowClass { ring: self.ring.clone(), value: self.ring.reduce(&raw)? })
    }

    pub fn scale(&self, s: &Rational) -> ChowClass {
        ChowClass { ring: self.ring.clone(), value: self.value.scale(s) }
    }

    pub fn pow(&self, k: u32) -> ChowClass {
        let mut acc = ChowClass::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of the fundamental monomial.
    pub fn degree(&self) -> Result<Rational> {
        match (self.ring.dim, &self.ring.fundamental) {
            (Some(_), Some(f)) => Ok(self.value.coefficient(f)),
            _ => Err(Error::NoDegreeMap),
        }
    }
}

impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl Neg for &ChowClass {
    type Output = ChowClass;
    fn neg(self) -> ChowClass {
        ChowClass { ring: self.ring.clone(), value: -&self.value }
    }
}

macro_rules! class_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&ChowClass> for &ChowClass {
            type Output = ChowClass;
            fn $method(self, rhs: &ChowClass) -> ChowClass {
                self.$call(rhs).expect("classes in different rings")
            }
        }
        impl $trait<ChowClass> for ChowClass {
            type Output = ChowClass;
            fn $method(self, rhs: ChowClass) -> ChowClass {
                (&self).$call(&rhs).expect("classes in different rings")
            }
        }
    };
}

class_binop!(Add, add, try_add);
class_binop!(Sub, sub, try_sub);
class_binop!(Mul, mul, try_mul);

/// Normal form of `p` in `ring`.
pub fn normal_form(p: &GradedPoly, ring: &Arc<RingPresentation>) -> Result<ChowClass> {
    ChowClass::new(ring, p)
}

pub fn degree(a: &ChowClass) -> Result<Rational> {
    a.degree()
}

/// Grothendieck relation for a rank `rank` bundle with Chern classes
/// `chern[0..=rank]` (missing entries are zero): `z^d -> -sum_{i>=1} c_i z^(d-i)`.
pub fn grothendieck_rule(zeta: usize, rank: usize, chern: &[GradedPoly]) -> Result<RewriteRule> {
    if rank == 0 {
        return Err(Error::EmptyBundle);
    }
    let table = chern.first().map(|c| c.table().clone()).ok_or(Error::EmptyBundle)?;
    let mut pieces = Vec::new();
    for (i, c) in chern.iter().enumerate().skip(1).take(rank) {
        if c.contains_var(zeta) {
            return Err(Error::InvalidRule("Chern classes must not involve the tautological class".into()));
        }
        pieces.push(-c.shift_var(zeta, (rank - i) as u16));
    }
    let replacement = GradedPoly::sum(&table, &pieces)?;
    RewriteRule::new(zeta, rank as u16, replacement)
}

/// The projective bundle of lines `P(N) -> X` for a bundle given by its rank
/// and Chern classes on `X`.
#[derive(Debug, Clone)]
pub struct ProjectiveBundle {
    base: Arc<RingPresentation>,
    total: Arc<RingPresentation>,
    rank: usize,
    chern: Vec<GradedPoly>,
    zeta: usize,
}

impl ProjectiveBundle {
    /// `chern` holds `c_0 = 1, c_1, ...` over the base table; entries beyond
    /// the rank are ignored. The tautological class is named `zeta_name`.
    pub fn new(
        base: &Arc<RingPresentation>,
        rank: usize,
        chern: &[GradedPoly],
        zeta_name: &str,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyBundle);
        }
        let table = base.table().extend([(zeta_name, 1)])?;
        let zeta = table.len() - 1;
        let mut lifted = Vec::with_capacity(rank + 1);
        for i in 0..=rank {
            let c = match chern.get(i) {
                Some(c) => base.reduce(c)?,
                None => GradedPoly::zero(base.table()),
            };
            lifted.push(c);
        }
        let in_total: Vec<GradedPoly> =
            lifted.iter().map(|c| c.embed(&table)).collect::<Result<_>>()?;
        let mut total = RingPresentation::free(&table);
        for rule in base.rules() {
            total = total.with_rule(RewriteRule::new(rule.var, rule.power, rule.replacement.embed(&table)?)?)?;
        }
        total = total.with_rule(grothendieck_rule(zeta, rank, &in_total)?)?;
        let rel = (rank - 1) as u32;
        for &(k, b) in base.base_bounds() {
            total = total.with_base_bound(k, b)?;
        }
        if let Some(t) = base.truncation() {
            total = total.with_truncation(t + rel).with_base_bound(base.table().len(), t)?;
        }
        if let Some(dim) = base.dim() {
            let fundamental = base.fundamental().map(|f| {
                let mut f: Exponents = f.iter().copied().collect();
                f.push(rel as u16);
                f
            });
            total = total.with_dim(dim + rel, fundamental)?;
        }
        Ok(ProjectiveBundle { base: base.clone(), total: total.into_arc(), rank, chern: lifted, zeta })
    }

    pub fn base(&self) -> &Arc<RingPresentation> {
        &self.base
    }

    pub fn total(&self) -> &Arc<RingPresentation> {
        &self.total
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn zeta_var(&self) -> usize {
        self.zeta
    }

    pub fn chern(&self) -> &[GradedPoly] {
        &self.chern
    }

    pub fn zeta(&self) -> ChowClass {
        ChowClass::new(&self.total, &GradedPoly::var(self.total.table(), self.zeta))
            .expect("zeta lives in the total ring")
    }

    /// Segre classes `s_0..=s_max` of the bundle, as polynomials on the base.
    pub fn segre(&self, max: u32) -> Result<Vec<GradedPoly>> {
        let c = GradedPoly::sum(self.base.table(), &self.chern)?;
        let s = c.series_inverse(max)?;
        Ok((0..=max).map(|j| s.component(j)).collect())
    }

    /// `g^*`: classes on the base viewed on the bundle.
    pub fn pullback(&self, a: &ChowClass) -> Result<ChowClass> {
        if !same_ring(a.ring(), &self.base) {
            return Err(Error::RingMismatch);
        }
        ChowClass::new(&self.total, &a.value().embed(self.total.table())?)
    }

    /// `g_*`, using `g_*(z^(d-1+j) g^*a) = s_j a` and `g_*(z^k g^*a) = 0` for
    /// `k < d-1`. Valid on any polynomial over the total table, reduced or not.
    pub fn push_poly(&self, p: &GradedPoly) -> Result<ChowClass> {
        if p.table() != self.total.table() {
            return Err(Error::TableMismatch);
        }
        let parts = p.split_by_var(self.zeta);
        let low = self.rank - 1;
        if parts.len() <= low {
            return Ok(ChowClass::zero(&self.base));
        }
        let segre = self.segre((parts.len() - 1 - low) as u32)?;
        let mut pieces = Vec::new();
        for (k, coeff) in parts.iter().enumerate().skip(low) {
            if coeff.is_zero() {
                continue;
            }
            let coeff = coeff.project(self.base.table())?;
            pieces.push(coeff.mul_bounded(&segre[k - low], self.base.bound())?);
        }
        ChowClass::new(&self.base, &GradedPoly::sum(self.base.table(), &pieces)?)
    }

    pub fn pushforward(&self, b: &ChowClass) -> Result<ChowClass> {
        if !same_ring(b.ring(), &self.total) {
            return Err(Error::RingMismatch);
        }
        self.push_poly(b.value())
    }
}

/// `g_*` as a free function.
pub fn segre_pushforward(beta: &ChowClass, bundle: &ProjectiveBundle) -> Result<ChowClass> {
    bundle.pushforward(beta)
}

/// Serializable ring description: variables, rules as `var^power = poly`
/// strings, optional dimension and fundamental monomial, optional truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub vars: Vec<(String, u32)>,
    #[serde(default)]
    pub rules: Vec<String>,
    #[serde(default)]
    pub dim: Option<u32>,
    #[serde(default)]
    pub fundamental: Option<String>,
    #[serde(default)]
    pub truncation: Option<u32>,
}

impl RingSpec {
    pub fn build(&self) -> Result<Arc<RingPresentation>> {
        let table = VarTable::new(self.vars.iter().map(|(n, d)| (n.clone(), *d)))?;
        let mut ring = RingPresentation::free(&table);
        for rule in &self.rules {
            let (lhs, rhs) = rule
                .split_once('=')
                .ok_or_else(|| Error::InvalidRule(format!("`{rule}` is not of the form `v^m = poly`")))?;
            let lhs = GradedPoly::parse(&table, lhs)?;
            let (exps, _) = lhs
                .terms()
                .next()
                .filter(|(_, c)| lhs.num_terms() == 1 && **c == Rational::from_integer(1.into()))
                .ok_or_else(|| Error::InvalidRule(format!("left side of `{rule}` is not a power")))?;
            let nonzero: Vec<usize> = (0..exps.len()).filter(|&i| exps[i] > 0).collect();
            if nonzero.len() != 1 {
                return Err(Error::InvalidRule(format!("left side of `{rule}` is not a power")));
            }
            let var = nonzero[0];
            ring = ring.with_rule(RewriteRule::new(var, exps[var], GradedPoly::parse(&table, rhs)?)?)?;
        }
        if let Some(t) = self.truncation {
            ring = ring.with_truncation(t);
        }
        if let Some(dim) = self.dim {
            let fundamental = match &self.fundamental {
                Some(s) => {
                    let m = GradedPoly::parse(&table, s)?;
                    let exps = m.terms().next().filter(|_| m.num_terms() == 1).map(|(e, _)| e.clone());
                    match exps {
                        Some(e) => Some(e),
                        None => return Err(Error::InvalidRule(format!("fundamental `{s}` is not a monomial"))),
                    }
                }
                None => None,
            };
            ring = ring.with_dim(dim, fundamental)?;
        } else if self.fundamental.is_some() {
            return Err(Error::InvalidRule("a fundamental monomial needs a dimension".into()));
        }
        Ok(ring.into_arc())
    }

    pub fn describe(ring: &RingPresentation) -> RingSpec {
        let table = ring.table();
        RingSpec {
            vars: table.entries().map(|(n, d)| (n.to_string(), d)).collect(),
            rules: ring
                .rules()
                .iter()
                .map(|r| format!("{}^{} = {}", table.name(r.var), r.power, r.replacement))
                .collect(),
            dim: ring.dim(),
            fundamental: ring.fundamental().map(|f| table.render_monomial(f)),
            truncation: ring.truncation(),
        }
    }
}
