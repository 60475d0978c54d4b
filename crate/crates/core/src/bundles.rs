//! Vector bundles as rank plus total Chern class.
//!
//! Bundles here are formal: nothing checks that the classes come from an
//! actual bundle, and universal bundles are allowed to have algebraically
//! independent Chern classes. The only structural requirements are `c_0 = 1`,
//! `c_i` homogeneous of degree `i`, and no components above the rank.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::chowring::{ChowClass, RingPresentation};
use crate::error::{Error, Result};
use crate::gradedpoly::{GradedPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleClass {
    rank: usize,
    chern: Vec<ChowClass>,
    // components above the rank produced by a formal quotient
    overflow: Vec<ChowClass>,
}

fn check_ring(ring: &Arc<RingPresentation>, c: &ChowClass) -> Result<()> {
    if Arc::ptr_eq(ring, c.ring()) || **ring == **c.ring() {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

impl BundleClass {
    /// `components` is `[c_0, c_1, ...]`, at most `rank + 1` long.
    pub fn new(rank: usize, components: Vec<ChowClass>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidBundle("no Chern classes given".into()))?;
        let ring = first.ring().clone();
        if components.len() > rank + 1 {
            return Err(Error::InvalidBundle(format!(
                "{} Chern classes given for a rank {rank} bundle",
                components.len()
            )));
        }
        if *first != ChowClass::one(&ring) {
            return Err(Error::InvalidBundle(format!("c_0 is {first}, expected 1")));
        }
        for (i, c) in components.iter().enumerate() {
            check_ring(&ring, c)?;
            if !c.value().is_homogeneous_of(i as u32) {
                return Err(Error::InvalidBundle(format!("c_{i} = {c} is not homogeneous of degree {i}")));
            }
        }
        let mut chern = components;
        chern.resize(rank + 1, ChowClass::zero(&ring));
        Ok(BundleClass { rank, chern, overflow: Vec::new() })
    }

    /// Splits a total Chern class into components.
    pub fn from_total(rank: usize, total: &ChowClass) -> Result<Self> {
        let top = total.value().degree().unwrap_or(0) as usize;
        if top > rank {
            return Err(Error::InvalidBundle(format!(
                "total class {total} has components above rank {rank}"
            )));
        }
        BundleClass::new(rank, (0..=rank).map(|i| total.component(i as u32)).collect())
    }

    pub fn parse(ring: &Arc<RingPresentation>, rank: usize, chern: &[&str]) -> Result<Self> {
        let comps = chern.iter().map(|s| ChowClass::parse(ring, s)).collect::<Result<Vec<_>>>()?;
        BundleClass::new(rank, comps)
    }

    pub fn trivial(ring: &Arc<RingPresentation>, rank: usize) -> Self {
        BundleClass::new(rank, vec![ChowClass::one(ring)]).expect("trivial bundle is valid")
    }

    pub fn line(c1: &ChowClass) -> Result<Self> {
        BundleClass::new(1, vec![ChowClass::one(c1.ring()), c1.clone()])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        self.chern[0].ring()
    }

    /// `c_i`, zero above the rank.
    pub fn c(&self, i: usize) -> ChowClass {
        self.chern.get(i).cloned().unwrap_or_else(|| ChowClass::zero(self.ring()))
    }

    pub fn classes(&self) -> &[ChowClass] {
        &self.chern
    }

    /// Components above the rank left over from a formal quotient.
    pub fn overflow(&self) -> &[ChowClass] {
        &self.overflow
    }

    pub fn total(&self) -> ChowClass {
        let mut acc = ChowClass::zero(self.ring());
        for c in &self.chern {
            acc = &acc + c;
        }
        acc
    }

    /// `s(E) = 1/c(E)` through degree `max`.
    pub fn segre(&self, max: u32) -> Result<ChowClass> {
        let inv = self.total().value().series_inverse(max)?;
        ChowClass::new(self.ring(), &inv)
    }

    fn check_same(&self, other: &BundleClass) -> Result<()> {
        check_ring(self.ring(), &other.chern[0])
    }
}

/// `c(A + B) = c(A) c(B)`.
pub fn whitney_sum(a: &BundleClass, b: &BundleClass) -> Result<BundleClass> {
    a.check_same(b)?;
    let total = a.total().try_mul(&b.total())?;
    BundleClass::from_total(a.rank + b.rank, &total)
}

/// `c_i(A^dual) = (-1)^i c_i(A)`.
pub fn dual(a: &BundleClass) -> BundleClass {
    let chern = a
        .chern
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
        .collect();
    BundleClass { rank: a.rank, chern, overflow: Vec::new() }
}

/// Twist by a line bundle with first Chern class `l`:
/// `c_k(A (x) L) = sum_{i<=k} C(r-i, k-i) c_i(A) l^(k-i)`.
pub fn tensor_line(a: &BundleClass, l: &ChowClass) -> Result<BundleClass> {
    check_ring(a.ring(), l)?;
    if !l.value().is_homogeneous_of(1) {
        return Err(Error::NonLinearTwist);
    }
    let r = a.rank;
    let powers: Vec<ChowClass> = (0..=r as u32).map(|k| l.pow(k)).collect();
    let mut chern = Vec::with_capacity(r + 1);
    for k in 0..=r {
        let mut ck = ChowClass::zero(a.ring());
        for i in 0..=k {
            let coeff = Rational::from_integer(binomial(BigInt::from(r - i), BigInt::from(k - i)));
            ck = &ck + &(&a.chern[i] * &powers[k - i]).scale(&coeff);
        }
        chern.push(ck);
    }
    BundleClass::new(r, chern)
}

/// `c(E/S) = c(E) s(S)`. The quotient series is kept through the ring's
/// degree bound (or the rank of `E` for unbounded rings); components above the
/// new rank go to [`BundleClass::overflow`].
pub fn quotient_chern(e: &BundleClass, s: &BundleClass) -> Result<BundleClass> {
    e.check_same(s)?;
    if s.rank > e.rank {
        return Err(Error::RankUnderflow { total: e.rank, sub: s.rank });
    }
    let rank = e.rank - s.rank;
    let bound = e.ring().bound().unwrap_or(e.rank as u32);
    let total = e.total().try_mul(&s.segre(bound)?)?;
    let total = ChowClass::new(e.ring(), &total.value().truncate(bound))?;
    let chern = (0..=rank).map(|i| total.component(i as u32)).collect();
    let overflow = ((rank + 1) as u32..=bound)
        .map(|i| total.component(i))
        .filter(|c| !c.is_zero())
        .collect();
    let mut q = BundleClass::new(rank, chern)?;
    q.overflow = overflow;
    Ok(q)
}

/// Serializable bundle: rank and Chern classes as polynomial strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub rank: usize,
    pub chern: Vec<String>,
}

impl BundleSpec {
    pub fn build(&self, ring: &Arc<RingPresentation>) -> Result<BundleClass> {
        let refs: Vec<&str> = self.chern.iter().map(String::as_str).collect();
        BundleClass::parse(ring, self.rank, &refs)
    }

    pub fn describe(b: &BundleClass) -> BundleSpec {
        BundleSpec { rank: b.rank(), chern: b.classes().iter().map(|c| c.to_string()).collect() }
    }
}

/// `[c_0, c_1, ...]` as raw polynomials, for ring constructors.
pub fn chern_polys(b: &BundleClass) -> Vec<GradedPoly> {
    b.classes().iter().map(|c| c.value().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedpoly::VarTable;

    fn ring() -> Arc<RingPresentation> {
        let t = VarTable::new([("a", 1), ("b", 1), ("c1", 1), ("c2", 2), ("l", 1)]).unwrap();
        RingPresentation::free(&t).with_truncation(8).into_arc()
    }

    fn cls(r: &Arc<RingPresentation>, s: &str) -> ChowClass {
        ChowClass::parse(r, s).unwrap()
    }

    #[test]
    fn whitney_of_lines() {
        let r = ring();
        let a = BundleClass::line(&cls(&r, "a")).unwrap();
        let b = BundleClass::line(&cls(&r, "b")).unwrap();
        let s = whitney_sum(&a, &b).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.total(), cls(&r, "1 + a + b + a*b"));
        let t = whitney_sum(&s, &BundleClass::trivial(&r, 3)).unwrap();
        assert_eq!((t.rank(), t.total()), (5, s.total()));
    }

    #[test]
    fn dual_examples() {
        let r = ring();
        let e = BundleClass::parse(&r, 2, &["1", "c1", "c2"]).unwrap();
        assert_eq!(dual(&e).total(), cls(&r, "1 - c1 + c2"));
        assert_eq!(dual(&dual(&e)), e);
        assert_eq!(dual(&BundleClass::trivial(&r, 2)), BundleClass::trivial(&r, 2));
    }

    #[test]
    fn tensor_examples() {
        let r = ring();
        let e = BundleClass::parse(&r, 2, &["1", "c1", "c2"]).unwrap();
        let t = tensor_line(&e, &cls(&r, "l")).unwrap();
        assert_eq!(t.c(1), cls(&r, "c1 + 2*l"));
        assert_eq!(t.c(2), cls(&r, "c2 + c1*l + l^2"));
        assert_eq!(tensor_line(&e, &ChowClass::zero(&r)).unwrap(), e);
        let line = BundleClass::line(&cls(&r, "c1")).unwrap();
        assert_eq!(tensor_line(&line, &cls(&r, "l")).unwrap().total(), cls(&r, "1 + c1 + l"));
        assert_eq!(tensor_line(&e, &cls(&r, "1 + l")), Err(Error::NonLinearTwist));
    }

    #[test]
    fn quotient_examples() {
        let r = ring();
        let e = BundleClass::parse(&r, 2, &["1", "c1", "c2"]).unwrap();
        assert_eq!(quotient_chern(&e, &e).unwrap(), BundleClass::trivial(&r, 0));
        let s = BundleClass::line(&cls(&r, "a")).unwrap();
        let q = quotient_chern(&e, &s).unwrap();
        assert_eq!(q.c(1), cls(&r, "c1 - a"));
        assert!(!q.overflow().is_empty());
        assert_eq!(
            quotient_chern(&s, &e),
            Err(Error::RankUnderflow { total: 1, sub: 2 })
        );
    }

    #[test]
    fn construction_is_validated() {
        let r = ring();
        assert!(BundleClass::parse(&r, 1, &["1", "c1", "c2"]).is_err());
        assert!(BundleClass::parse(&r, 2, &["2", "c1"]).is_err());
        assert!(BundleClass::parse(&r, 2, &["1", "c2"]).is_err());
        assert!(BundleClass::from_total(1, &cls(&r, "1 + a + a^2")).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let r = ring();
        let e = BundleClass::parse(&r, 2, &["1", "c1", "c2"]).unwrap();
        let spec = BundleSpec::describe(&e);
        assert_eq!(spec.build(&r).unwrap(), e);
    }
}
