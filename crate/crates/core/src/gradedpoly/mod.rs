//! Exact multivariate polynomials over the rationals with weighted variables.
//!
//! Every variable carries a positive integer degree, so the degree of a
//! monomial is the weighted sum of its exponents. Truncation by degree is the
//! only size control at this layer; quotient relations live in
//! [`crate::chowring`].
//!
//! Terms are printed in a canonical order: ascending weighted degree, and
//! within one degree the monomial with the larger exponent on the earlier
//! variable comes first.

mod parse;

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponent vector, one entry per variable of the owning [`VarTable`].
pub type Exponents = SmallVec<[u16; 12]>;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Ordered list of named variables with positive degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
    degrees: Vec<u32>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarTable {
    pub fn new<I, S>(entries: I) -> Result<Arc<VarTable>>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut names: Vec<String> = Vec::new();
        let mut degrees = Vec::new();
        for (name, degree) in entries {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(Error::InvalidTable(format!("`{name}` is not a valid variable name")));
            }
            if degree == 0 {
                return Err(Error::InvalidTable(format!("variable `{name}` has degree 0")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidTable(format!("duplicate variable `{name}`")));
            }
            names.push(name);
            degrees.push(degree);
        }
        Ok(Arc::new(VarTable { names, degrees }))
    }

    /// A new table with `entries` appended after the existing variables.
    pub fn extend<I, S>(&self, entries: I) -> Result<Arc<VarTable>>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let own = self.entries().map(|(n, d)| (n.to_string(), d));
        VarTable::new(own.chain(entries.into_iter().map(|(n, d)| (n.into(), d))))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn degree(&self, var: usize) -> u32 {
        self.degrees[var]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.names.iter().map(String::as_str).zip(self.degrees.iter().copied())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn weight(&self, exps: &[u16]) -> u32 {
        exps.iter().zip(&self.degrees).map(|(&e, &d)| u32::from(e) * d).sum()
    }

    pub fn is_prefix_of(&self, other: &VarTable) -> bool {
        self.len() <= other.len()
            && self.entries().zip(other.entries()).all(|(a, b)| a == b)
    }

    pub fn unit(&self, var: usize) -> Exponents {
        let mut e: Exponents = SmallVec::from_elem(0, self.len());
        e[var] = 1;
        e
    }

    pub fn one_exps(&self) -> Exponents {
        SmallVec::from_elem(0, self.len())
    }

    /// All exponent vectors of weighted degree exactly `weight`.
    pub fn monomials_of_weight(&self, weight: u32) -> Vec<Exponents> {
        fn rec(t: &VarTable, var: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
            if var == t.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let d = t.degree(var);
            let mut k = 0;
            while k * d <= left {
                cur[var] = k as u16;
                rec(t, var + 1, left - k * d, cur, out);
                k += 1;
            }
            cur[var] = 0;
        }
        let mut out = Vec::new();
        let mut cur = self.one_exps();
        rec(self, 0, weight, &mut cur, &mut out);
        out
    }

    pub(crate) fn render_monomial(&self, exps: &[u16]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sum of rational multiples of monomials, keyed by exponent vector.
#[derive(Clone, Debug)]
pub struct GradedPoly {
    table: Arc<VarTable>,
    terms: BTreeMap<Exponents, Rational>,
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for GradedPoly {}

#[derive(Default)]
struct Accumulator {
    terms: HashMap<Exponents, Rational>,
}

impl Accumulator {
    fn add(&mut self, e: Exponents, c: Rational) {
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => *o.get_mut() += c,
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn add_poly(&mut self, p: &GradedPoly, scale: Option<&Rational>) {
        for (e, c) in &p.terms {
            let c = match scale {
                Some(s) => c * s,
                None => c.clone(),
            };
            self.add(e.clone(), c);
        }
    }

    fn finish(self, table: &Arc<VarTable>) -> GradedPoly {
        GradedPoly {
            table: table.clone(),
            terms: self.terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

impl GradedPoly {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        GradedPoly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::constant(table, Rational::one())
    }

    pub fn constant(table: &Arc<VarTable>, c: Rational) -> Self {
        Self::monomial(table, table.one_exps(), c)
    }

    pub fn integer(table: &Arc<VarTable>, n: i64) -> Self {
        Self::constant(table, rational(n))
    }

    pub fn var(table: &Arc<VarTable>, var: usize) -> Self {
        Self::monomial(table, table.unit(var), Rational::one())
    }

    pub fn var_named(table: &Arc<VarTable>, name: &str) -> Result<Self> {
        Ok(Self::var(table, table.var(name)?))
    }

    pub fn monomial(table: &Arc<VarTable>, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), table.len(), "exponent vector length does not match table");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        GradedPoly { table: table.clone(), terms }
    }

    pub fn from_terms<I>(table: &Arc<VarTable>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut acc = Accumulator::default();
        for (e, c) in terms {
            assert_eq!(e.len(), table.len(), "exponent vector length does not match table");
            acc.add(e, c);
        }
        acc.finish(table)
    }

    /// Sum of polynomials that all live over `table`.
    pub fn sum<'a, I>(table: &Arc<VarTable>, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a GradedPoly>,
    {
        let mut acc = Accumulator::default();
        for p in parts {
            if !same_table(&p.table, table) {
                return Err(Error::TableMismatch);
            }
            acc.add_poly(p, None);
        }
        Ok(acc.finish(table))
    }

    pub fn parse(table: &Arc<VarTable>, input: &str) -> Result<Self> {
        parse::parse(table, input)
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn coefficient(&self, exps: &[u16]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&self.table.one_exps())
    }

    /// Highest weighted degree of a term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.table.weight(e)).max()
    }

    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| self.table.weight(e) == degree)
    }

    pub fn component(&self, degree: u32) -> GradedPoly {
        self.filter(|e| self.table.weight(e) == degree)
    }

    /// Homogeneous components of degree `0..=max_degree`.
    pub fn components(&self, max_degree: u32) -> Vec<GradedPoly> {
        let mut out = vec![GradedPoly::zero(&self.table); max_degree as usize + 1];
        for (e, c) in &self.terms {
            let w = self.table.weight(e);
            if w <= max_degree {
                out[w as usize].terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Largest exponent of `var` among the terms.
    pub fn var_degree(&self, var: usize) -> u16 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    fn filter(&self, keep: impl Fn(&Exponents) -> bool) -> GradedPoly {
        GradedPoly {
            table: self.table.clone(),
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn check_table(&self, other: &GradedPoly) -> Result<()> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.check_table(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(e);
            }
        }
        Ok(GradedPoly { table: self.table.clone(), terms })
    }

    pub fn try_sub(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.mul_bounded(other, None)
    }

    fn neg_ref(&self) -> GradedPoly {
        GradedPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> GradedPoly {
        if s.is_zero() {
            return GradedPoly::zero(&self.table);
        }
        GradedPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Product with every term of degree above `bound` discarded.
    pub fn mul_bounded(&self, other: &GradedPoly, bound: Option<u32>) -> Result<GradedPoly> {
        self.check_table(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(GradedPoly::zero(&self.table));
        }
        let lhs = self.weighted_terms();
        let rhs = other.weighted_terms();
        let limit = bound.unwrap_or(u32::MAX);
        let mut acc = Accumulator::default();
        for &(wa, ea, ca) in &lhs {
            if wa > limit {
                break;
            }
            for &(wb, eb, cb) in &rhs {
                if wa + wb > limit {
                    break;
                }
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                acc.add(e, ca * cb);
            }
        }
        Ok(acc.finish(&self.table))
    }

    fn weighted_terms(&self) -> Vec<(u32, &Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (self.table.weight(e), e, c)).collect();
        v.sort_by_key(|t| t.0);
        v
    }

    pub fn pow_bounded(&self, k: u32, bound: Option<u32>) -> GradedPoly {
        let mut result = GradedPoly::one(&self.table).truncate_opt(bound);
        let mut base = self.truncate_opt(bound);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_bounded(&base, bound).expect("same table");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_bounded(&base, bound).expect("same table");
            }
        }
        result
    }

    pub fn pow(&self, k: u32) -> GradedPoly {
        self.pow_bounded(k, None)
    }

    /// Drops every monomial of weighted degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> GradedPoly {
        self.filter(|e| self.table.weight(e) <= max_degree)
    }

    pub fn truncate_opt(&self, bound: Option<u32>) -> GradedPoly {
        match bound {
            Some(b) => self.truncate(b),
            None => self.clone(),
        }
    }

    /// Inverse of `self` modulo terms of degree above `max_degree`.
    ///
    /// The constant term must be 1. Writing `self = 1 + u`, the result is the
    /// geometric series `1 - u + u^2 - ...`, accumulated one homogeneous degree
    /// at a time: `b_k = -(u_1 b_{k-1} + ... + u_k b_0)`.
    pub fn series_inverse(&self, max_degree: u32) -> Result<GradedPoly> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(Error::NotAUnitSeries(render_rational(&c0)));
        }
        let u = self.components(max_degree);
        let mut inv: Vec<GradedPoly> = vec![GradedPoly::one(&self.table)];
        for k in 1..=max_degree as usize {
            let mut acc = Accumulator::default();
            for i in 1..=k {
                if u[i].is_zero() || inv[k - i].is_zero() {
                    continue;
                }
                let prod = u[i].mul_bounded(&inv[k - i], None)?;
                acc.add_poly(&prod, Some(&rational(-1)));
            }
            inv.push(acc.finish(&self.table));
        }
        let mut total = Accumulator::default();
        for part in &inv {
            total.add_poly(part, None);
        }
        Ok(total.finish(&self.table))
    }

    /// Divides every term by `var`; fails if some term lacks it.
    pub fn exact_div_by_var(&self, var: usize) -> Result<GradedPoly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                let term = GradedPoly::monomial(&self.table, e.clone(), c.clone());
                return Err(Error::NotDivisible {
                    var: self.table.name(var).to_string(),
                    term: term.to_string(),
                });
            }
            let mut e = e.clone();
            e[var] -= 1;
            terms.insert(e, c.clone());
        }
        Ok(GradedPoly { table: self.table.clone(), terms })
    }

    /// Multiplies by `var^k`.
    pub fn shift_var(&self, var: usize, k: u16) -> GradedPoly {
        GradedPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[var] += k;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Coefficients of `var^0, var^1, ...` with `var` removed.
    pub fn split_by_var(&self, var: usize) -> Vec<GradedPoly> {
        let top = self.var_degree(var) as usize;
        let mut out = vec![GradedPoly::zero(&self.table); if self.is_zero() { 0 } else { top + 1 }];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut e = e.clone();
            e[var] = 0;
            out[k].terms.insert(e, c.clone());
        }
        out
    }

    /// Simultaneous substitution of some variables by polynomials over the
    /// same table. Each replacement must be homogeneous of its variable's
    /// degree (zero is allowed).
    pub fn subst(&self, assignment: &[(usize, GradedPoly)]) -> Result<GradedPoly> {
        let mut images: Vec<GradedPoly> =
            (0..self.table.len()).map(|v| GradedPoly::var(&self.table, v)).collect();
        for (var, image) in assignment {
            self.check_table(image)?;
            images[*var] = image.clone();
        }
        self.map_into(&self.table, &images, None)
    }

    /// Ring homomorphism into polynomials over `target`, sending variable `i`
    /// to `images[i]`.
    pub fn map_into(
        &self,
        target: &Arc<VarTable>,
        images: &[GradedPoly],
        bound: Option<u32>,
    ) -> Result<GradedPoly> {
        if images.len() != self.table.len() {
            return Err(Error::LengthMismatch { expected: self.table.len(), found: images.len() });
        }
        for (i, image) in images.iter().enumerate() {
            if !same_table(image.table(), target) {
                return Err(Error::TableMismatch);
            }
            if !image.is_homogeneous_of(self.table.degree(i)) {
                return Err(Error::GradingViolation {
                    var: self.table.name(i).to_string(),
                    degree: self.table.degree(i),
                });
            }
        }
        let mut powers: Vec<Vec<GradedPoly>> =
            images.iter().map(|img| vec![GradedPoly::one(target), img.clone()]).collect();
        let mut acc = Accumulator::default();
        for (e, c) in &self.terms {
            let mut term = GradedPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul_bounded(&images[i], bound)?;
                    powers[i].push(next);
                }
                term = term.mul_bounded(&powers[i][k], bound)?;
                if term.is_zero() {
                    break;
                }
            }
            acc.add_poly(&term, None);
        }
        Ok(acc.finish(target))
    }

    /// Reinterprets the polynomial over a table that extends its own.
    pub fn embed(&self, target: &Arc<VarTable>) -> Result<GradedPoly> {
        if !self.table.is_prefix_of(target) {
            return Err(Error::TableMismatch);
        }
        let pad = target.len() - self.table.len();
        Ok(GradedPoly {
            table: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.extend(std::iter::repeat_n(0, pad));
                    (e, c.clone())
                })
                .collect(),
        })
    }

    /// Inverse of [`embed`](Self::embed): the dropped variables must not occur.
    pub fn project(&self, target: &Arc<VarTable>) -> Result<GradedPoly> {
        if !target.is_prefix_of(&self.table) {
            return Err(Error::TableMismatch);
        }
        let n = target.len();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[n..].iter().any(|&k| k > 0) {
                return Err(Error::TableMismatch);
            }
            terms.insert(e[..n].iter().copied().collect(), c.clone());
        }
        Ok(GradedPoly { table: target.clone(), terms })
    }

    /// Terms in canonical print order.
    pub fn canonical_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| canonical_cmp(&self.table, a, b));
        v
    }
}

/// Ascending weighted degree; ties put the larger exponent on the earlier
/// variable first.
pub fn canonical_cmp(table: &VarTable, a: &[u16], b: &[u16]) -> Ordering {
    table.weight(a).cmp(&table.weight(b)).then_with(|| b.cmp(a))
}

pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.canonical_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let constant = e.iter().all(|&k| k == 0);
            if constant {
                f.write_str(&render_rational(&magnitude))?;
            } else if magnitude.is_one() {
                f.write_str(&self.table.render_monomial(e))?;
            } else {
                write!(f, "{}*{}", render_rational(&magnitude), self.table.render_monomial(e))?;
            }
        }
        Ok(())
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.neg_ref()
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.neg_ref()
    }
}

// The operator forms panic on mismatched tables; use the `try_*` methods when
// the tables are not known to agree.
macro_rules! binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&GradedPoly> for &GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: &GradedPoly) -> GradedPoly {
                self.$call(rhs).expect("polynomials over different variable tables")
            }
        }
        impl $trait<GradedPoly> for GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: GradedPoly) -> GradedPoly {
                (&self).$call(&rhs).expect("polynomials over different variable tables")
            }
        }
        impl $trait<&GradedPoly> for GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: &GradedPoly) -> GradedPoly {
                (&self).$call(rhs).expect("polynomials over different variable tables")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn table(entries: &[(&str, u32)]) -> Arc<VarTable> {
        VarTable::new(entries.iter().map(|&(n, d)| (n, d))).unwrap()
    }

    fn p(t: &Arc<VarTable>, s: &str) -> GradedPoly {
        GradedPoly::parse(t, s).unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(VarTable::new([("a", 1), ("a", 2)]).is_err());
        assert!(VarTable::new([("a", 0)]).is_err());
        assert!(VarTable::new([("1a", 1)]).is_err());
        let t = table(&[("n1", 1), ("n2", 2)]);
        assert_eq!(t.weight(&[2, 1]), 4);
        assert!(t.is_prefix_of(&t.extend([("z", 1)]).unwrap()));
    }

    #[test]
    fn arithmetic_examples() {
        let t = table(&[("t", 1), ("h", 1)]);
        assert_eq!(p(&t, "1+t") * p(&t, "1-t"), p(&t, "1 - t^2"));
        let h = p(&t, "1+h");
        assert_eq!(&(&h * &h) * &h, p(&t, "1 + 3*h + 3*h^2 + h^3"));
        assert!((-GradedPoly::zero(&t)).is_zero());
    }

    #[test]
    fn mismatched_tables_are_rejected() {
        let a = table(&[("t", 1)]);
        let b = table(&[("s", 1)]);
        assert_eq!(GradedPoly::one(&a).try_add(&GradedPoly::one(&b)), Err(Error::TableMismatch));
        assert_eq!(GradedPoly::one(&a).try_mul(&GradedPoly::one(&b)), Err(Error::TableMismatch));
    }

    #[test]
    fn truncation_uses_weights() {
        let t = table(&[("h", 1)]);
        assert_eq!(p(&t, "(1+h)^3").truncate(2), p(&t, "1 + 3*h + 3*h^2"));
        let t = table(&[("n1", 1), ("n2", 2)]);
        assert!(p(&t, "n2*n1").truncate(2).is_zero());
        assert_eq!(p(&t, "7 + n1 + n2").truncate(0), p(&t, "7"));
    }

    #[test]
    fn series_inverse_examples() {
        let t = table(&[("t", 1)]);
        assert_eq!(p(&t, "1+t").series_inverse(3).unwrap(), p(&t, "1 - t + t^2 - t^3"));
        assert_eq!(p(&t, "1").series_inverse(5).unwrap(), p(&t, "1"));
        assert_eq!(
            p(&t, "2+t").series_inverse(3),
            Err(Error::NotAUnitSeries("2".to_string()))
        );
    }

    #[test]
    fn series_inverse_graded_multiplies_back() {
        let t = table(&[("n1", 1), ("n2", 2)]);
        let a = p(&t, "1 + n1 + n2");
        let inv = a.series_inverse(2).unwrap();
        assert_eq!(inv, p(&t, "1 - n1 + n1^2 - n2"));
        assert!((&a * &inv).truncate(2).is_one());
    }

    #[test]
    fn exact_division() {
        let t = table(&[("c1", 1), ("z", 1)]);
        let z = t.var("z").unwrap();
        assert_eq!(p(&t, "z*c1 + z^2").exact_div_by_var(z).unwrap(), p(&t, "c1 + z"));
        assert!(matches!(p(&t, "1 + z").exact_div_by_var(z), Err(Error::NotDivisible { .. })));
        // d = 2 bracket with trivial normal bundle
        assert_eq!(p(&t, "-z + z^2 + z^3").exact_div_by_var(z).unwrap(), p(&t, "-1 + z + z^2"));
    }

    #[test]
    fn substitution_examples() {
        let t = table(&[("z", 1), ("z1", 1), ("z2", 1), ("n1", 1), ("n2", 2)]);
        let z = t.var("z").unwrap();
        assert_eq!(p(&t, "z^2").subst(&[(z, p(&t, "-z1"))]).unwrap(), p(&t, "z1^2"));
        let n1 = t.var("n1").unwrap();
        let n2 = t.var("n2").unwrap();
        let e = p(&t, "1 + n1 + n2")
            .subst(&[(n1, p(&t, "z1 + z2")), (n2, p(&t, "z1*z2"))])
            .unwrap();
        assert_eq!(e, p(&t, "(1+z1)*(1+z2)"));
        assert!(GradedPoly::zero(&t).subst(&[(z, p(&t, "z1"))]).unwrap().is_zero());
        assert!(matches!(
            p(&t, "n2").subst(&[(n2, p(&t, "z1"))]),
            Err(Error::GradingViolation { .. })
        ));
    }

    #[test]
    fn canonical_rendering() {
        let t = table(&[("H", 1)]);
        assert_eq!(p(&t, "4*H^2 + 1 + 3*H").to_string(), "1 + 3*H + 4*H^2");
        let t = table(&[("n1", 1), ("n2", 2), ("z", 1)]);
        assert_eq!(p(&t, "-n2 + n1^2 - n1 + 1").to_string(), "1 - n1 + n1^2 - n2");
        assert_eq!(p(&t, "z - 1").to_string(), "-1 + z");
        assert_eq!(p(&t, "-3/2*n1*z + 1/2").to_string(), "1/2 - 3/2*n1*z");
        assert_eq!(GradedPoly::zero(&t).to_string(), "0");
    }

    #[test]
    fn embed_and_project_round_trip() {
        let t = table(&[("h", 1)]);
        let tz = t.extend([("z", 1)]).unwrap();
        let a = p(&t, "1 + 2*h");
        let b = a.embed(&tz).unwrap();
        assert_eq!(b.project(&t).unwrap(), a);
        assert!(p(&tz, "z").project(&t).is_err());
    }

    #[test]
    fn monomial_enumeration() {
        let t = table(&[("n1", 1), ("n2", 2), ("n3", 3)]);
        // partitions of 4 into parts of size at most 3
        assert_eq!(t.monomials_of_weight(4).len(), 4);
        assert_eq!(t.monomials_of_weight(0).len(), 1);
    }
}
