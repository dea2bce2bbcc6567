//! Exact combinatorics of the rational projective line.
//!
//! Slopes `p/q` label the complementary regions of the trivalent Farey tree.
//! The tree is rooted at the base triangle `(∞, 0, 1)`; every other slope is
//! born as the mediant of an edge of some Farey triangle, and that edge gives
//! its two *parents*.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `P¹(Q)` in canonical form: `gcd(|p|, |q|) = 1` and either
/// `q > 0` or `(p, q) = (1, 0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    p: Integer,
    q: Integer,
}

impl Slope {
    /// Reduces and canonicalizes an integer pair. `(0, 0)` is rejected.
    pub fn new(p: impl Into<Integer>, q: impl Into<Integer>) -> Result<Self> {
        let mut p = p.into();
        let mut q = q.into();
        if p == 0 && q == 0 {
            return Err(Error::InvalidSlope("0/0".into()));
        }
        let g = Integer::from(p.gcd_ref(&q));
        if g != 1 {
            p /= &g;
            q /= &g;
        }
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    /// Canonical slope of a nonzero homogeneous vector.
    pub(crate) fn from_vec(v: &IntVec) -> Self {
        Slope::new(v.0.clone(), v.1.clone()).expect("nonzero homogeneous vector")
    }

    pub fn infinity() -> Self {
        Slope { p: Integer::from(1), q: Integer::from(0) }
    }

    pub fn integer(n: i64) -> Self {
        Slope { p: Integer::from(n), q: Integer::from(1) }
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }

    pub fn q(&self) -> &Integer {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    /// One of the three slopes of the base triangle `(∞, 0, 1)`.
    pub fn is_base(&self) -> bool {
        self.q == 0 || (self.q == 1 && (self.p == 0 || self.p == 1))
    }

    pub(crate) fn vec(&self) -> IntVec {
        IntVec(self.p.clone(), self.q.clone())
    }

    /// `|p| + |q|`, a height that strictly decreases towards the base triangle
    /// along parent chains.
    pub fn height(&self) -> Integer {
        Integer::from(self.p.abs_ref()) + &self.q
    }

    /// Total order following the circle `P¹(R)`, cut just before `∞`:
    /// `∞` first, then all finite slopes in increasing order.
    pub fn circular_cmp(&self, other: &Slope) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                let lhs = Integer::from(&self.p * &other.q);
                let rhs = Integer::from(&other.p * &self.q);
                lhs.cmp(&rhs)
            }
        }
    }

    /// Approximate value as `f64` (`+inf` for `∞`).
    pub fn to_f64(&self) -> f64 {
        if self.is_infinity() {
            f64::INFINITY
        } else {
            self.p.to_f64() / self.q.to_f64()
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Slope({}/{})", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∞" || s.eq_ignore_ascii_case("inf") {
            return Ok(Slope::infinity());
        }
        let bad = || Error::InvalidSlope(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: Integer = p.parse().map_err(|_| bad())?;
        let q: Integer = q.parse().map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A homogeneous integer vector, not necessarily canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntVec(pub Integer, pub Integer);

impl IntVec {
    pub fn det(&self, other: &IntVec) -> Integer {
        Integer::from(&self.0 * &other.1) - Integer::from(&self.1 * &other.0)
    }

    pub fn add(&self, other: &IntVec) -> IntVec {
        IntVec(Integer::from(&self.0 + &other.0), Integer::from(&self.1 + &other.1))
    }

    pub fn sub(&self, other: &IntVec) -> IntVec {
        IntVec(Integer::from(&self.0 - &other.0), Integer::from(&self.1 - &other.1))
    }

    pub fn neg(&self) -> IntVec {
        IntVec(Integer::from(-&self.0), Integer::from(-&self.1))
    }

    pub fn add_scaled(&self, k: &Integer, other: &IntVec) -> IntVec {
        IntVec(
            &self.0 + Integer::from(k * &other.0),
            &self.1 + Integer::from(k * &other.1),
        )
    }
}

/// `det(s, t) = p q′ − q p′` on canonical representatives.
pub fn det(s: &Slope, t: &Slope) -> Integer {
    s.vec().det(&t.vec())
}

pub fn is_neighbor(s: &Slope, t: &Slope) -> bool {
    det(s, t).cmp_abs(&Integer::from(1)) == Ordering::Equal
}

fn require_neighbors(s: &Slope, t: &Slope) -> Result<()> {
    if is_neighbor(s, t) {
        Ok(())
    } else {
        Err(Error::NotNeighbors(s.clone(), t.clone()))
    }
}

/// `(p + p′)/(q + q′)` on canonical representatives.
pub fn mediant(s: &Slope, t: &Slope) -> Result<Slope> {
    third_region(s, t, Direction::Plus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

/// The two regions adjacent to both `s` and `t` are `(p ± p′)/(q ± q′)`.
pub fn third_region(s: &Slope, t: &Slope, direction: Direction) -> Result<Slope> {
    require_neighbors(s, t)?;
    let v = match direction {
        Direction::Plus => s.vec().add(&t.vec()),
        Direction::Minus => s.vec().sub(&t.vec()),
    };
    Ok(Slope::from_vec(&v))
}

/// The common neighbor of `s` and `t` which is not `other`.
pub fn opposite(s: &Slope, t: &Slope, other: &Slope) -> Result<Slope> {
    let plus = third_region(s, t, Direction::Plus)?;
    if &plus != other {
        return Ok(plus);
    }
    third_region(s, t, Direction::Minus)
}

/// The Farey-neighbor pair from which `s` was born, older parent first
/// (the one closer to the base triangle).
pub fn parents(s: &Slope) -> Result<(Slope, Slope)> {
    if s.is_base() {
        return Err(Error::BaseRegion(s.clone()));
    }
    let negative = s.p < 0;
    let p = Integer::from(s.p.abs_ref());
    let q = s.q.clone();
    // Stern–Brocot parents of p/q > 0: the left parent a/b solves
    // p·b − q·a = 1 with 0 < b ≤ q, the right parent is (p − a)/(q − b).
    let b = if q == 1 {
        Integer::from(1)
    } else {
        let inv = p.clone().invert(&q).expect("coprime");
        if inv == 0 { q.clone() } else { inv }
    };
    let a = (Integer::from(&p * &b) - 1u32) / &q;
    let left = IntVec(a, b);
    let right = IntVec(p, q).sub(&left);
    let mut u = Slope::from_vec(&left);
    let mut v = Slope::from_vec(&right);
    if negative {
        u = Slope::new(Integer::from(-&u.p), u.q.clone())?;
        v = Slope::new(Integer::from(-&v.p), v.q.clone())?;
    }
    Ok(order_by_age(u, v))
}

fn order_by_age(u: Slope, v: Slope) -> (Slope, Slope) {
    let rank = |s: &Slope| (s.height(), base_rank(s));
    if rank(&u) <= rank(&v) {
        (u, v)
    } else {
        (v, u)
    }
}

fn base_rank(s: &Slope) -> u8 {
    if s.is_infinity() {
        0
    } else if s.p == 0 {
        1
    } else {
        2
    }
}

/// Representative of a neighbor `r0` of `r` with `det(r, r0) = +1`.
pub(crate) fn oriented_neighbor(r: &Slope, r0: &Slope) -> Result<IntVec> {
    let d = det(r, r0);
    if d == 1 {
        Ok(r0.vec())
    } else if d == -1 {
        Ok(r0.vec().neg())
    } else {
        Err(Error::NotNeighbors(r.clone(), r0.clone()))
    }
}

/// `R_n = r0 + n·r`, the `n`-th Farey neighbor of `r`.
///
/// `r` uses its canonical representative and `r0` the representative with
/// `det(r, r0) = +1`. Under this convention `R_n` approaches `r` from below
/// (in circular order) as `n → +∞`, for every `r`.
pub fn neighbor_sequence(r: &Slope, r0: &Slope, n: i64) -> Result<Slope> {
    let base = oriented_neighbor(r, r0)?;
    Ok(Slope::from_vec(&base.add_scaled(&Integer::from(n), &r.vec())))
}

/// The oriented pair `(R_0, R_1)` of consecutive neighbors of `r` formed by
/// the two regions `r` is born from (or, for base slopes, the two other base
/// slopes).
pub fn neighbor_frame(r: &Slope) -> (Slope, Slope) {
    let (u, v) = if r.is_base() {
        let mut others = BASE.iter().map(|&(p, q)| Slope::new(p, q).unwrap()).filter(|s| s != r);
        (others.next().unwrap(), others.next().unwrap())
    } else {
        parents(r).expect("non-base slope")
    };
    for (first, second) in [(&u, &v), (&v, &u)] {
        let r0 = oriented_neighbor(r, first).expect("parents are neighbors");
        if Slope::from_vec(&r0.add(&r.vec())) == *second {
            return (first.clone(), second.clone());
        }
    }
    unreachable!("parents of {r} are consecutive neighbors")
}

const BASE: [(i64, i64); 3] = [(1, 0), (0, 1), (1, 1)];

/// The base triangle `(∞, 0, 1)`.
pub fn base_slopes() -> [Slope; 3] {
    [Slope::infinity(), Slope::integer(0), Slope::integer(1)]
}

/// Three pairwise Farey-neighbor slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareyTriangle {
    pub a: Slope,
    pub b: Slope,
    pub c: Slope,
}

impl FareyTriangle {
    pub fn new(a: Slope, b: Slope, c: Slope) -> Result<Self> {
        require_neighbors(&a, &b)?;
        require_neighbors(&b, &c)?;
        require_neighbors(&c, &a)?;
        Ok(FareyTriangle { a, b, c })
    }

    pub fn base() -> Self {
        let [a, b, c] = base_slopes();
        FareyTriangle { a, b, c }
    }

    /// The triangle reached from the base by the given tree address.
    pub fn at(address: &TreeAddress) -> Self {
        let mut crossing: Option<Crossing> = None;
        for (i, &step) in address.steps().iter().enumerate() {
            crossing = Some(if i == 0 {
                Crossing::from_base(step as usize)
            } else {
                crossing.unwrap().children()[step as usize].clone()
            });
        }
        match crossing {
            None => FareyTriangle::base(),
            Some(c) => FareyTriangle { a: c.left, b: c.new, c: c.right },
        }
    }
}

/// A path in the Farey tree from the base triangle: the first step picks one
/// of the three sides of `(∞, 0, 1)`, each later step one of the two
/// non-returning sides.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeAddress(Vec<u8>);

impl TreeAddress {
    pub fn new(steps: Vec<u8>) -> Result<Self> {
        for (i, &s) in steps.iter().enumerate() {
            let limit = if i == 0 { 3 } else { 2 };
            if s >= limit {
                return Err(Error::InvalidAddress(steps.clone()));
            }
        }
        Ok(TreeAddress(steps))
    }

    pub fn steps(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// All addresses of a given length, in lexicographic order.
    pub fn all(depth: usize) -> Vec<TreeAddress> {
        if depth == 0 {
            return vec![TreeAddress(Vec::new())];
        }
        let mut out: Vec<Vec<u8>> = (0..3).map(|s| vec![s]).collect();
        for _ in 1..depth {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..2).map(move |s| {
                        let mut w = w.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(TreeAddress).collect()
    }
}

/// A crossing of a Farey edge `(left, right)` away from the base, creating
/// the triangle `(left, new, right)`; `old` is the vertex on the base side,
/// so `(new, left, right, old)` is a Markoff quadruple `(R, R′, R″, R‴)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub left: Slope,
    pub right: Slope,
    pub old: Slope,
    pub new: Slope,
}

impl Crossing {
    /// Crossing of side `i` of the base triangle: `(∞,0)`, `(0,1)`, `(1,∞)`.
    pub fn from_base(i: usize) -> Self {
        let b = base_slopes();
        let (left, right, old) = match i {
            0 => (&b[0], &b[1], &b[2]),
            1 => (&b[1], &b[2], &b[0]),
            2 => (&b[2], &b[0], &b[1]),
            _ => panic!("base triangle has three sides"),
        };
        Crossing::across(left.clone(), right.clone(), old.clone())
    }

    fn across(left: Slope, right: Slope, old: Slope) -> Self {
        let new = opposite(&left, &right, &old).expect("Farey edge");
        Crossing { left, right, old, new }
    }

    /// The two crossings leaving the new triangle.
    pub fn children(&self) -> [Crossing; 2] {
        [
            Crossing::across(self.left.clone(), self.new.clone(), self.right.clone()),
            Crossing::across(self.new.clone(), self.right.clone(), self.left.clone()),
        ]
    }
}

/// All crossings of the Farey tree up to `depth`, level by level. Level `k`
/// (1-based) holds the `3·2^(k-1)` crossings creating the triangles at tree
/// distance `k` from the base.
pub fn crossings(depth: usize) -> Vec<Vec<Crossing>> {
    let mut levels: Vec<Vec<Crossing>> = Vec::with_capacity(depth);
    if depth == 0 {
        return levels;
    }
    levels.push((0..3).map(Crossing::from_base).collect());
    for _ in 1..depth {
        let next = levels.last().unwrap().iter().flat_map(|c| c.children()).collect();
        levels.push(next);
    }
    levels
}

/// All slopes whose region touches a Farey triangle within tree distance
/// `depth` of the base triangle, in breadth-first order. There are
/// `3·2^depth` of them.
pub fn enumerate(depth: usize) -> Vec<Slope> {
    let mut out: Vec<Slope> = base_slopes().into();
    for level in crossings(depth) {
        out.extend(level.into_iter().map(|c| c.new));
    }
    out
}

/// Sorts slopes into the circular order of `P¹(Q)`, starting at `∞`.
pub fn circular_sort(slopes: &mut [Slope]) {
    slopes.sort_by(|a, b| a.circular_cmp(b));
}

/// Helper for callers holding `i64` pairs.
pub fn slope(p: i64, q: i64) -> Slope {
    Slope::new(p, q).expect("nonzero slope")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn canonical_form() {
        assert_eq!(slope(-2, -4), slope(1, 2));
        assert_eq!(slope(-3, 0), Slope::infinity());
        assert_eq!(slope(0, -5), slope(0, 1));
        assert_eq!(slope(2, -3).to_string(), "-2/3");
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("1/0".parse::<Slope>().unwrap(), Slope::infinity());
        assert_eq!("-4/6".parse::<Slope>().unwrap().to_string(), "-2/3");
        assert_eq!("7".parse::<Slope>().unwrap(), Slope::integer(7));
        assert!("x/2".parse::<Slope>().is_err());
        assert!("0/0".parse::<Slope>().is_err());
    }

    #[test]
    fn neighbor_examples() {
        assert!(is_neighbor(&slope(1, 0), &slope(0, 1)));
        assert!(is_neighbor(&slope(1, 2), &slope(1, 3)));
        assert!(!is_neighbor(&slope(1, 2), &slope(3, 4)));
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&slope(0, 1), &slope(1, 1)).unwrap(), slope(1, 2));
        assert_eq!(mediant(&slope(1, 0), &slope(0, 1)).unwrap(), slope(1, 1));
        assert_eq!(mediant(&slope(1, 2), &slope(1, 3)).unwrap(), slope(2, 5));
        assert!(matches!(mediant(&slope(1, 2), &slope(3, 4)), Err(Error::NotNeighbors(..))));
    }

    #[test]
    fn third_region_examples() {
        assert_eq!(third_region(&slope(0, 1), &slope(1, 1), Direction::Minus).unwrap(), Slope::infinity());
        assert_eq!(third_region(&slope(1, 2), &slope(1, 3), Direction::Minus).unwrap(), slope(0, 1));
        assert_eq!(third_region(&slope(1, 2), &slope(1, 1), Direction::Plus).unwrap(), slope(2, 3));
    }

    #[test]
    fn parents_examples() {
        assert_eq!(parents(&slope(2, 5)).unwrap(), (slope(1, 2), slope(1, 3)));
        assert_eq!(parents(&slope(1, 2)).unwrap(), (slope(0, 1), slope(1, 1)));
        assert_eq!(parents(&slope(2, 1)).unwrap(), (Slope::infinity(), slope(1, 1)));
        assert_eq!(parents(&slope(-1, 1)).unwrap(), (Slope::infinity(), slope(0, 1)));
        assert_eq!(parents(&slope(-2, 5)).unwrap(), (slope(-1, 2), slope(-1, 3)));
        assert!(matches!(parents(&Slope::infinity()), Err(Error::BaseRegion(_))));
        assert!(parents(&slope(0, 1)).is_err());
        assert!(parents(&slope(1, 1)).is_err());
    }

    #[test]
    fn neighbor_sequence_examples() {
        for n in -5..=5 {
            assert_eq!(neighbor_sequence(&Slope::infinity(), &slope(0, 1), n).unwrap(), Slope::integer(n));
        }
        assert_eq!(neighbor_sequence(&Slope::infinity(), &slope(0, 1), 1).unwrap(), slope(1, 1));
        let r = neighbor_sequence(&slope(1, 2), &slope(0, 1), 2).unwrap();
        assert_eq!(r, slope(2, 5));
        assert!(is_neighbor(&r, &slope(1, 2)));
        assert_eq!(neighbor_sequence(&slope(1, 2), &slope(0, 1), 0).unwrap(), slope(0, 1));
        assert!(neighbor_sequence(&slope(1, 2), &slope(3, 4), 1).is_err());
    }

    #[test]
    fn neighbor_frames_of_base() {
        assert_eq!(neighbor_frame(&Slope::infinity()), (slope(0, 1), slope(1, 1)));
        assert_eq!(neighbor_frame(&slope(0, 1)), (slope(1, 1), Slope::infinity()));
        assert_eq!(neighbor_frame(&slope(1, 1)), (Slope::infinity(), slope(0, 1)));
        assert_eq!(neighbor_frame(&slope(1, 2)), (slope(1, 1), slope(0, 1)));
    }

    #[test]
    fn enumerate_small_depths() {
        let e0: HashSet<_> = enumerate(0).into_iter().collect();
        assert_eq!(e0, [slope(1, 0), slope(0, 1), slope(1, 1)].into_iter().collect());
        let e1: HashSet<_> = enumerate(1).into_iter().collect();
        let want: HashSet<_> =
            [slope(1, 0), slope(0, 1), slope(1, 1), slope(1, 2), slope(2, 1), slope(-1, 1)].into_iter().collect();
        assert_eq!(e1, want);
        assert_eq!(enumerate(2).len(), 12);
    }

    #[test]
    fn enumerate_cardinality_and_nesting() {
        let mut prev: HashSet<Slope> = HashSet::new();
        for d in 0..=12 {
            let e = enumerate(d);
            let set: HashSet<_> = e.iter().cloned().collect();
            assert_eq!(set.len(), e.len(), "duplicates at depth {d}");
            assert_eq!(e.len(), 3 << d);
            assert!(prev.is_subset(&set));
            prev = set;
        }
    }

    #[test]
    fn tree_addresses() {
        assert_eq!(FareyTriangle::at(&TreeAddress::default()), FareyTriangle::base());
        let t = FareyTriangle::at(&TreeAddress::new(vec![1]).unwrap());
        assert_eq!((t.a, t.b, t.c), (slope(0, 1), slope(1, 2), slope(1, 1)));
        assert!(TreeAddress::new(vec![3]).is_err());
        assert!(TreeAddress::new(vec![0, 2]).is_err());
        for d in 0..=6 {
            let addrs = TreeAddress::all(d);
            let want = if d == 0 { 1 } else { 3 << (d - 1) };
            assert_eq!(addrs.len(), want);
            let tris: Vec<_> = addrs.iter().map(FareyTriangle::at).collect();
            for t in &tris {
                FareyTriangle::new(t.a.clone(), t.b.clone(), t.c.clone()).unwrap();
            }
            let distinct: HashSet<_> = tris.iter().map(|t| t.b.clone()).collect();
            assert_eq!(distinct.len(), tris.len());
        }
    }

    #[test]
    fn circular_order() {
        let mut v = enumerate(2);
        circular_sort(&mut v);
        let s: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(s, ["1/0", "-2/1", "-1/1", "-1/2", "0/1", "1/3", "1/2", "2/3", "1/1", "3/2", "2/1", "3/1"]);
    }
}
