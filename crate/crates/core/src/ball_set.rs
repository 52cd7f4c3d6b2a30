//! Finite unions of balls in `Z_p`, stored as a normalized radix-`p` trie.
//!
//! A node at depth `d` reached by digits `c_0, ..., c_{d-1}` stands for the
//! class `c_0 + c_1 p + ... + c_{d-1} p^{d-1} + p^d Z_p`. No split node has
//! all children full or all children empty, so two sets are equal exactly
//! when their tries are equal.
//!
//! Singletons have measure zero. By default they are dropped on insertion;
//! a set built with [`BallSet::retaining_singletons`] keeps their centres so
//! membership queries still see them.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{self, BallKind, PAdicBall};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Empty,
    Full,
    Split(Box<[Node]>),
}

impl Node {
    fn split_empty(p: u64) -> Node {
        Node::Split(vec![Node::Empty; p as usize].into_boxed_slice())
    }

    fn normalized(children: Box<[Node]>) -> Node {
        if children.iter().all(|c| *c == Node::Full) {
            Node::Full
        } else if children.iter().all(|c| *c == Node::Empty) {
            Node::Empty
        } else {
            Node::Split(children)
        }
    }

    fn insert(&mut self, p: u64, digits: &[u32]) {
        match digits.split_first() {
            _ if *self == Node::Full => {}
            None => *self = Node::Full,
            Some((&d, rest)) => {
                if *self == Node::Empty {
                    *self = Node::split_empty(p);
                }
                let Node::Split(children) = std::mem::replace(self, Node::Empty) else { unreachable!() };
                let mut children = children;
                children[d as usize].insert(p, rest);
                *self = Node::normalized(children);
            }
        }
    }

    fn union(a: &Node, b: &Node) -> Node {
        match (a, b) {
            (Node::Full, _) | (_, Node::Full) => Node::Full,
            (Node::Empty, x) | (x, Node::Empty) => x.clone(),
            (Node::Split(x), Node::Split(y)) => {
                Node::normalized(x.iter().zip(y.iter()).map(|(u, v)| Node::union(u, v)).collect())
            }
        }
    }

    fn intersect(a: &Node, b: &Node) -> Node {
        match (a, b) {
            (Node::Empty, _) | (_, Node::Empty) => Node::Empty,
            (Node::Full, x) | (x, Node::Full) => x.clone(),
            (Node::Split(x), Node::Split(y)) => {
                Node::normalized(x.iter().zip(y.iter()).map(|(u, v)| Node::intersect(u, v)).collect())
            }
        }
    }

    fn complement(&self) -> Node {
        match self {
            Node::Empty => Node::Full,
            Node::Full => Node::Empty,
            Node::Split(x) => Node::Split(x.iter().map(Node::complement).collect()),
        }
    }

    fn depth(&self) -> u32 {
        match self {
            Node::Split(x) => 1 + x.iter().map(Node::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn walk_full(&self, p: &BigUint, depth: u32, prefix: BigUint, scale: BigUint, out: &mut Vec<(BigUint, u32)>) {
        match self {
            Node::Empty => {}
            Node::Full => out.push((prefix, depth)),
            Node::Split(children) => {
                for (d, child) in children.iter().enumerate() {
                    let next = &prefix + &scale * BigUint::from(d);
                    child.walk_full(p, depth + 1, next, &scale * p, out);
                }
            }
        }
    }

    fn contains_digits(&self, digits: &[u32]) -> bool {
        match self {
            Node::Empty => false,
            Node::Full => true,
            Node::Split(children) => match digits.split_first() {
                Some((&d, rest)) => children[d as usize].contains_digits(rest),
                None => false,
            },
        }
    }
}

/// A finite union of residue classes in `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSet {
    p: u64,
    root: Node,
    singletons: Option<BTreeSet<Rational>>,
}

impl BallSet {
    /// The empty set; singleton insertions are dropped.
    pub fn new(p: u64) -> Self {
        Self { p, root: Node::Empty, singletons: None }
    }

    /// The empty set, keeping singleton centres for membership queries.
    pub fn retaining_singletons(p: u64) -> Self {
        Self { p, root: Node::Empty, singletons: Some(BTreeSet::new()) }
    }

    pub fn full(p: u64) -> Self {
        Self { p, root: Node::Full, singletons: None }
    }

    /// The shell `p^k Z_p^x` of elements with valuation exactly `k`.
    pub fn shell(p: u64, k: u32) -> Self {
        let mut s = Self::new(p);
        let mut digits = vec![0u32; k as usize + 1];
        for u in 1..p as u32 {
            digits[k as usize] = u;
            s.root.insert(p, &digits);
        }
        s
    }

    /// `p^k Z_p`.
    pub fn multiples(p: u64, k: u32) -> Self {
        let mut s = Self::new(p);
        s.root.insert(p, &vec![0; k as usize]);
        s
    }

    pub fn from_classes<I>(p: u64, classes: I) -> Self
    where
        I: IntoIterator<Item = (BigUint, u32)>,
    {
        let mut s = Self::new(p);
        for (c, d) in classes {
            s.insert_class(&c, d);
        }
        s
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn retains_singletons(&self) -> bool {
        self.singletons.is_some()
    }

    pub fn singletons(&self) -> impl Iterator<Item = &Rational> {
        self.singletons.iter().flatten()
    }

    fn check_prime(&self, p: u64) -> Result<()> {
        if p == self.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch { left: self.p, right: p })
        }
    }

    /// Adds `residue + p^depth Z_p` (the residue is reduced first).
    pub fn insert_class(&mut self, residue: &BigUint, depth: u32) {
        let r = residue % padic::p_power(self.p, depth);
        let digits = padic::digits_of(self.p, &r, depth);
        self.root.insert(self.p, &digits);
    }

    pub fn insert(&mut self, ball: &PAdicBall) -> Result<()> {
        self.check_prime(ball.p)?;
        match &ball.kind {
            BallKind::Empty => {}
            BallKind::Singleton(c) => {
                if let Some(s) = self.singletons.as_mut() {
                    s.insert(c.clone());
                }
            }
            BallKind::Class { residue, depth } => self.insert_class(residue, *depth),
        }
        Ok(())
    }

    /// Exact Haar measure, ignoring singletons.
    pub fn measure(&self) -> Rational {
        self.classes().iter().map(|(_, d)| rational::pow(self.p, -(*d as i64))).sum()
    }

    /// Maximal classes of the normalized trie, in digit order.
    pub fn classes(&self) -> Vec<(BigUint, u32)> {
        let mut out = Vec::new();
        let pb = BigUint::from(self.p);
        self.root.walk_full(&pb, 0, BigUint::zero(), BigUint::from(1u32), &mut out);
        out
    }

    pub fn balls(&self) -> Vec<PAdicBall> {
        self.classes().into_iter().map(|(c, d)| PAdicBall::class(self.p, c, d)).collect()
    }

    /// Depth of the deepest node.
    pub fn depth(&self) -> u32 {
        self.root.depth()
    }

    /// `true` iff the set has measure zero (retained singletons aside).
    pub fn is_null(&self) -> bool {
        self.root == Node::Empty
    }

    pub fn is_full(&self) -> bool {
        self.root == Node::Full
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if self.singletons().any(|s| s == x) {
            return true;
        }
        let depth = self.depth();
        match padic::residue(self.p, x, depth) {
            Ok(r) => self.root.contains_digits(&padic::digits_of(self.p, &r, depth)),
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &BallSet) -> Result<BallSet> {
        self.check_prime(other.p)?;
        let singletons = match (&self.singletons, &other.singletons) {
            (None, None) => None,
            (a, b) => Some(a.iter().chain(b.iter()).flatten().cloned().collect()),
        };
        Ok(BallSet { p: self.p, root: Node::union(&self.root, &other.root), singletons })
    }

    pub fn intersect(&self, other: &BallSet) -> Result<BallSet> {
        self.check_prime(other.p)?;
        let singletons = match (&self.singletons, &other.singletons) {
            (None, None) => None,
            _ => Some(
                self.singletons()
                    .filter(|s| other.contains(s))
                    .chain(other.singletons().filter(|s| self.contains(s)))
                    .cloned()
                    .collect(),
            ),
        };
        Ok(BallSet { p: self.p, root: Node::intersect(&self.root, &other.root), singletons })
    }

    /// `Z_p` minus the set, modulo null sets (retained singletons are cleared).
    pub fn complement_in_zp(&self) -> BallSet {
        BallSet {
            p: self.p,
            root: self.root.complement(),
            singletons: self.singletons.as_ref().map(|_| BTreeSet::new()),
        }
    }

    pub fn difference(&self, other: &BallSet) -> Result<BallSet> {
        self.check_prime(other.p)?;
        Ok(BallSet { p: self.p, root: Node::intersect(&self.root, &other.root.complement()), singletons: None })
    }

    /// Inclusion up to null sets.
    pub fn is_subset(&self, other: &BallSet) -> Result<bool> {
        Ok(self.difference(other)?.is_null())
    }

    /// `mu_p(set ∩ p^k Z_p^x)`.
    pub fn shell_measure(&self, k: u32) -> Rational {
        self.intersect(&BallSet::shell(self.p, k)).expect("same prime").measure()
    }

    /// `true` iff `p^k Z_p^x` is contained in the set.
    pub fn contains_shell(&self, k: u32) -> bool {
        BallSet::shell(self.p, k).is_subset(self).expect("same prime")
    }

    /// Drops the singleton side list.
    pub fn without_singletons(mut self) -> BallSet {
        self.singletons = None;
        self
    }
}

#[derive(Serialize, Deserialize)]
struct BallSetRepr {
    p: u64,
    classes: Vec<(u128, u32)>,
}

impl Serialize for BallSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let classes = self
            .classes()
            .into_iter()
            .map(|(c, d)| {
                c.to_u128().map(|c| (c, d)).ok_or_else(|| serde::ser::Error::custom("residue exceeds 128 bits"))
            })
            .collect::<std::result::Result<_, _>>()?;
        BallSetRepr { p: self.p, classes }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BallSetRepr::deserialize(d)?;
        if repr.p < 2 {
            return Err(serde::de::Error::custom("p must be at least 2"));
        }
        Ok(BallSet::from_classes(repr.p, repr.classes.into_iter().map(|(c, d)| (BigUint::from(c), d))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn class(p: u64, c: u64, d: u32) -> PAdicBall {
        PAdicBall::class(p, c, d)
    }

    fn set(p: u64, classes: &[(u64, u32)]) -> BallSet {
        BallSet::from_classes(p, classes.iter().map(|&(c, d)| (BigUint::from(c), d)))
    }

    #[test]
    fn insertion_examples() {
        let mut s = BallSet::new(3);
        s.insert(&class(3, 2, 1)).unwrap();
        assert_eq!(s.measure(), ratio(1, 3));

        let mut s = BallSet::new(3);
        for c in [1, 2, 0] {
            s.insert(&class(3, c, 1)).unwrap();
        }
        assert!(s.is_full());
        assert_eq!(s.measure(), int(1));

        let mut s = BallSet::new(3);
        let single = padic::ball_intersect_zp(3, &ratio(1, 2), &int(0)).unwrap();
        s.insert(&single).unwrap();
        assert_eq!(s.measure(), int(0));
        assert!(!s.contains(&ratio(1, 2)));

        let mut kept = BallSet::retaining_singletons(3);
        kept.insert(&single).unwrap();
        assert_eq!(kept.measure(), int(0));
        assert!(kept.contains(&ratio(1, 2)));

        assert!(matches!(BallSet::new(3).insert(&class(2, 1, 1)), Err(Error::PrimeMismatch { .. })));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(BallSet::full(7).measure(), int(1));
        assert_eq!(set(13, &[(1, 1), (5, 1), (8, 1), (12, 1)]).measure(), ratio(4, 13));
        assert_eq!(set(2, &[(1, 2), (3, 3)]).measure(), ratio(3, 8));
    }

    #[test]
    fn boolean_examples() {
        let units = BallSet::new(3).union(&set(3, &[(0, 1)])).unwrap().complement_in_zp();
        assert_eq!(units, set(3, &[(1, 1), (2, 1)]));
        assert_eq!(units.measure(), ratio(2, 3));
        let i = units.intersect(&set(3, &[(2, 2)])).unwrap();
        assert_eq!(i, set(3, &[(2, 2)]));
        assert_eq!(i.measure(), ratio(1, 9));
        assert!(BallSet::new(2).union(&BallSet::new(3)).is_err());
    }

    #[test]
    fn shell_examples() {
        assert_eq!(BallSet::full(5).shell_measure(2), ratio(4, 125));
        let units = set(3, &[(1, 1), (2, 1)]);
        assert_eq!(units.shell_measure(0), ratio(2, 3));
        assert_eq!(units.shell_measure(1), int(0));
        assert_eq!(set(3, &[(3, 2)]).shell_measure(1), ratio(1, 9));
        assert!(units.contains_shell(0));
        assert!(!set(3, &[(1, 1)]).contains_shell(0));
        assert!((0..6).all(|k| BallSet::full(3).contains_shell(k)));
        assert_eq!(BallSet::shell(3, 0), units);
    }

    #[test]
    fn membership_walks_the_trie() {
        let s = set(5, &[(7, 2), (1, 1)]);
        assert!(s.contains(&int(32)));
        assert!(s.contains(&ratio(1, 4)) == (padic::residue(5, &ratio(1, 4), 1).unwrap() == 1u32.into()));
        assert!(!s.contains(&int(2)));
        assert!(!s.contains(&ratio(1, 5)));
    }

    #[test]
    fn json_shape() {
        let s = set(3, &[(2, 2), (1, 1)]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"p":3,"classes":[[1,1],[2,2]]}"#);
        let back: BallSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }

    #[derive(Debug, Clone)]
    struct Spec {
        p: u64,
        classes: Vec<(u64, u32)>,
    }

    fn spec_strategy() -> impl Strategy<Value = Spec> {
        prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| {
            prop::collection::vec((0u64..10_000, 0u32..5), 0..8).prop_map(move |classes| Spec { p, classes })
        })
    }

    fn build(spec: &Spec) -> BallSet {
        BallSet::from_classes(spec.p, spec.classes.iter().map(|&(c, d)| (BigUint::from(c), d)))
    }

    /// Residues mod `p^depth` lying in any listed class.
    fn members(spec: &Spec, depth: u32) -> BTreeSet<u64> {
        let modulus = spec.p.pow(depth);
        (0..modulus).filter(|x| spec.classes.iter().any(|&(c, d)| x % spec.p.pow(d) == c % spec.p.pow(d))).collect()
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in spec_strategy(), b_classes in prop::collection::vec((0u64..10_000, 0u32..5), 0..8)) {
            let b = Spec { p: a.p, classes: b_classes };
            let (sa, sb) = (build(&a), build(&b));
            let u = sa.union(&sb).unwrap();
            let i = sa.intersect(&sb).unwrap();
            prop_assert_eq!(u.measure() + i.measure(), sa.measure() + sb.measure());
            prop_assert!(sa.union(&sa.complement_in_zp()).unwrap().is_full());
            // De Morgan
            let lhs = u.complement_in_zp();
            let rhs = sa.complement_in_zp().intersect(&sb.complement_in_zp()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn trie_matches_residue_enumeration(a in spec_strategy(), b_classes in prop::collection::vec((0u64..10_000, 0u32..5), 0..8)) {
            let b = Spec { p: a.p, classes: b_classes };
            let depth = 4;
            let (sa, sb) = (build(&a), build(&b));
            let (ma, mb) = (members(&a, depth), members(&b, depth));
            prop_assert_eq!(sa == sb, ma == mb);
            let modulus = a.p.pow(depth);
            prop_assert_eq!(sa.measure(), ratio(ma.len() as i64, modulus as i64));
            let ua = sa.union(&sb).unwrap();
            prop_assert_eq!(ua.measure(), ratio(ma.union(&mb).count() as i64, modulus as i64));
        }

        #[test]
        fn insertion_is_idempotent(a in spec_strategy()) {
            let s = build(&a);
            let mut t = s.clone();
            for &(c, d) in &a.classes {
                t.insert(&class(a.p, c, d)).unwrap();
            }
            prop_assert_eq!(s.clone(), t);
            let js = serde_json::to_string(&s).unwrap();
            let back: BallSet = serde_json::from_str(&js).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn shells_decompose_measure(a in spec_strategy()) {
            let s = build(&a);
            let top = s.depth();
            let shells: Rational = (0..top).map(|k| s.shell_measure(k)).sum();
            let core = s.intersect(&BallSet::multiples(a.p, top)).unwrap().measure();
            prop_assert_eq!(shells + core, s.measure());
        }
    }
}
