//! Markoff maps, their first-order jets and the half-trace coordinates of a
//! region's neighbor family.
//!
//! A Markoff map is determined by its values `(A, B, C)` on the base regions
//! `R_∞, R_0, R_1`. Every other value follows from
//! `Φ(R) + Φ(R‴) = Φ(R′)·Φ(R″)`, and differentiating that relation gives the
//! gradient of `Φ(R)` with respect to `(A, B, C)`: the linear functional
//! whose positive half-space is the lengthening constraint of `R`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rug::float::Constant;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::farey::{self, Crossing, Slope};
use crate::real::{self, check_bits, default_tol, Mat3, Real, Vec3};

/// Values of a Markoff map on the base triangle: `A = Φ(R_∞)`,
/// `B = Φ(R_0)`, `C = Φ(R_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkoffTriple {
    pub a: Real,
    pub b: Real,
    pub c: Real,
}

impl MarkoffTriple {
    pub fn new(a: Real, b: Real, c: Real) -> Result<Self> {
        let bits = a.prec().min(b.prec()).min(c.prec());
        check_bits(bits)?;
        let t = MarkoffTriple { a: Float::with_val(bits, a), b: Float::with_val(bits, b), c: Float::with_val(bits, c) };
        if !t.values().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Markoff value".into()));
        }
        Ok(t)
    }

    pub fn from_f64(bits: u32, a: f64, b: f64, c: f64) -> Result<Self> {
        MarkoffTriple::new(real::real(bits, a), real::real(bits, b), real::real(bits, c))
    }

    pub fn parse(bits: u32, a: &str, b: &str, c: &str) -> Result<Self> {
        MarkoffTriple::new(real::parse_real(bits, a)?, real::parse_real(bits, b)?, real::parse_real(bits, c)?)
    }

    /// The constant Markoff map `Φ ≡ 2`.
    pub fn euclidean(bits: u32) -> Result<Self> {
        MarkoffTriple::from_f64(bits, 2.0, 2.0, 2.0)
    }

    pub fn bits(&self) -> u32 {
        self.a.prec()
    }

    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        MarkoffTriple::new(real::with_bits(&self.a, bits), real::with_bits(&self.b, bits), real::with_bits(&self.c, bits))
    }

    pub fn values(&self) -> [&Real; 3] {
        [&self.a, &self.b, &self.c]
    }

    /// Recovers the base triple from the values on any Farey triangle by
    /// walking back down the tree.
    pub fn from_triangle(slopes: [Slope; 3], values: [Real; 3]) -> Result<Self> {
        let mut slopes = slopes;
        let mut values = values;
        farey::FareyTriangle::new(slopes[0].clone(), slopes[1].clone(), slopes[2].clone())?;
        loop {
            if slopes.iter().all(Slope::is_base) {
                let mut out: [Option<Real>; 3] = [None, None, None];
                for (s, v) in slopes.iter().zip(values.iter()) {
                    let i = farey::base_slopes().iter().position(|b| b == s).unwrap();
                    out[i] = Some(v.clone());
                }
                let [a, b, c] = out.map(|v| v.unwrap());
                return MarkoffTriple::new(a, b, c);
            }
            let young = (0..3).max_by(|&i, &j| slopes[i].height().cmp(&slopes[j].height())).unwrap();
            let (i, j) = ((young + 1) % 3, (young + 2) % 3);
            let older = farey::opposite(&slopes[i], &slopes[j], &slopes[young])?;
            let mut v = Float::with_val(values[i].prec(), &values[i] * &values[j]);
            v -= &values[young];
            slopes[young] = older;
            values[young] = v;
        }
    }

    /// `K = A² + B² + C² − ABC − 2`, the trace of the loop around the hole.
    pub fn commutator_trace(&self) -> Real {
        commutator_trace_of(&self.a, &self.b, &self.c)
    }

    pub fn classify(&self) -> Classification {
        self.classify_with_tol(&default_tol(self.bits()))
    }

    pub fn classify_with_tol(&self, tol: &Real) -> Classification {
        let bits = self.bits();
        let two = Float::with_val(bits, 2);
        let is_two = |v: &Real| Float::with_val(bits, v - &two).abs() <= Float::with_val(bits, tol * 2u32);
        let twos: Vec<usize> = (0..3).filter(|&i| is_two(self.values()[i])).collect();
        let k = self.commutator_trace();
        match twos.len() {
            3 => Classification::Euclidean,
            1 => {
                let i = twos[0];
                let (u, v) = (self.values()[(i + 1) % 3], self.values()[(i + 2) % 3]);
                let close = Float::with_val(bits, u - v).abs() <= Float::with_val(bits, tol * u.clone().abs().max(&two));
                if u > &two && v > &two && close {
                    let y = Float::with_val(bits, u + v) / 4u32;
                    Classification::OnePinch { pinched: farey::base_slopes()[i].clone(), y }
                } else {
                    Classification::Invalid
                }
            }
            0 if self.values().iter().all(|v| *v > &two) => {
                let abc = Float::with_val(bits, &self.a * &self.b) * &self.c;
                let scale = abc.abs().max(&Float::with_val(bits, 1));
                let kp2 = Float::with_val(bits, &k + 2u32);
                if kp2.clone().abs() <= Float::with_val(bits, tol * &scale) {
                    Classification::Cusp
                } else if kp2 < 0 {
                    let half = Float::with_val(bits, -&k) / 2u32;
                    Classification::Funnel { boundary_length: half.acosh() * 2u32 }
                } else if k < 2 {
                    let half = Float::with_val(bits, -&k) / 2u32;
                    Classification::Cone { angle: half.acos() * 2u32 }
                } else {
                    Classification::Invalid
                }
            }
            _ => Classification::Invalid,
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        self.classify().mode()
    }

    pub fn require_geometric(&self) -> Result<()> {
        match self.classify() {
            c if c.mode() == Some(Mode::Geometric) => Ok(()),
            c => Err(Error::NotGeometric(format!("({}, {}, {}) classifies as {}", self.a, self.b, self.c, c))),
        }
    }
}

fn commutator_trace_of(a: &Real, b: &Real, c: &Real) -> Real {
    let bits = a.prec();
    let mut k = Float::with_val(bits, a.square_ref());
    k += Float::with_val(bits, b.square_ref());
    k += Float::with_val(bits, c.square_ref());
    k -= Float::with_val(bits, a * b) * c;
    k -= 2u32;
    k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[serde(rename = "generic")]
    Geometric,
    OnePinch,
    Euclidean,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Geometric => "generic",
            Mode::OnePinch => "one_pinch",
            Mode::Euclidean => "euclidean",
        })
    }
}

/// Geometric type of the singular hyperbolic torus a triple describes.
///
/// The cone angle is `θ = 2·arccos(−K/2)` and the funnel boundary length
/// `λ` satisfies `cosh(λ/2) = −K/2`.
#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Cone { angle: Real },
    Cusp,
    Funnel { boundary_length: Real },
    OnePinch { pinched: Slope, y: Real },
    Euclidean,
    Invalid,
}

impl Classification {
    pub fn mode(&self) -> Option<Mode> {
        match self {
            Classification::Cone { .. } | Classification::Cusp | Classification::Funnel { .. } => Some(Mode::Geometric),
            Classification::OnePinch { .. } => Some(Mode::OnePinch),
            Classification::Euclidean => Some(Mode::Euclidean),
            Classification::Invalid => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Cone { .. } => "cone",
            Classification::Cusp => "cusp",
            Classification::Funnel { .. } => "funnel",
            Classification::OnePinch { .. } => "one_pinch",
            Classification::Euclidean => "euclidean",
            Classification::Invalid => "invalid",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Value of `Φ` at a region together with its gradient with respect to
/// `(A, B, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: Real,
    pub grad: Vec3,
}

impl Jet {
    fn unit(value: &Real, axis: usize) -> Jet {
        let bits = value.prec();
        let mut grad = real::vec3(bits, [0.0; 3]);
        grad[axis] = Float::with_val(bits, 1);
        Jet { value: value.clone(), grad }
    }

    /// `f_R(v)`: the derivative of `Φ(R)` in the direction `v`.
    pub fn apply(&self, v: &Vec3) -> Real {
        real::dot(&self.grad, v)
    }

    /// Jet of the region `R` in a Markoff quadruple `(R, R′, R″, R‴)`, from
    /// the jets of `R′`, `R″` (in either order) and `R‴`.
    fn across(first: (&Slope, &Jet), second: (&Slope, &Jet), old: &Jet) -> Jet {
        // The order of the two parents is fixed by slope so that every route
        // to a region rounds identically.
        let (u, v) = if first.0.circular_cmp(second.0) == Ordering::Greater {
            (second.1, first.1)
        } else {
            (first.1, second.1)
        };
        let bits = u.value.prec();
        let mut value = Float::with_val(bits, &u.value * &v.value);
        value -= &old.value;
        let grad = [0, 1, 2].map(|i| {
            let mut g = Float::with_val(bits, &u.value * &v.grad[i]);
            g += &v.value * &u.grad[i];
            g -= &old.grad[i];
            g
        });
        Jet { value, grad }
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

/// Memoized evaluation of a Markoff map and its jets.
#[derive(Clone, Debug)]
pub struct MarkoffMap {
    triple: MarkoffTriple,
    memo: HashMap<Slope, Jet>,
}

impl MarkoffMap {
    pub fn new(triple: &MarkoffTriple) -> Self {
        let mut memo = HashMap::new();
        for (i, s) in farey::base_slopes().into_iter().enumerate() {
            memo.insert(s, Jet::unit(triple.values()[i], i));
        }
        MarkoffMap { triple: triple.clone(), memo }
    }

    /// Evaluates every slope of `enumerate(depth)` by sweeping the tree.
    pub fn with_depth(triple: &MarkoffTriple, depth: usize) -> Result<Self> {
        let mut map = MarkoffMap::new(triple);
        for level in farey::crossings(depth) {
            for c in level {
                map.insert_crossing(&c)?;
            }
        }
        Ok(map)
    }

    fn insert_crossing(&mut self, c: &Crossing) -> Result<()> {
        if self.memo.contains_key(&c.new) {
            return Ok(());
        }
        let jet = Jet::across((&c.left, &self.memo[&c.left]), (&c.right, &self.memo[&c.right]), &self.memo[&c.old]);
        if !jet.is_finite() {
            return Err(Error::PrecisionExhausted { slope: c.new.clone(), bits: self.triple.bits() });
        }
        self.memo.insert(c.new.clone(), jet);
        Ok(())
    }

    pub fn triple(&self) -> &MarkoffTriple {
        &self.triple
    }

    pub fn bits(&self) -> u32 {
        self.triple.bits()
    }

    pub fn jet(&mut self, s: &Slope) -> Result<&Jet> {
        if !self.memo.contains_key(s) {
            self.fill(s)?;
        }
        Ok(&self.memo[s])
    }

    pub fn value(&mut self, s: &Slope) -> Result<Real> {
        Ok(self.jet(s)?.value.clone())
    }

    /// Jet of an already evaluated slope.
    pub fn cached(&self, s: &Slope) -> Option<&Jet> {
        self.memo.get(s)
    }

    /// Evaluates `s` along its parent chain, iteratively.
    fn fill(&mut self, s: &Slope) -> Result<()> {
        let mut stack = vec![s.clone()];
        while let Some(top) = stack.last().cloned() {
            if self.memo.contains_key(&top) {
                stack.pop();
                continue;
            }
            let (u, v) = farey::parents(&top)?;
            let w = farey::opposite(&u, &v, &top)?;
            let missing: Vec<Slope> = [&u, &v, &w].into_iter().filter(|x| !self.memo.contains_key(*x)).cloned().collect();
            if missing.is_empty() {
                let crossing = Crossing { left: u, right: v, old: w, new: top };
                self.insert_crossing(&crossing)?;
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
        Ok(())
    }

    /// Largest binary exponent among the evaluated values.
    pub fn max_exponent(&self) -> i32 {
        self.memo.values().filter_map(|j| j.value.get_exp()).max().unwrap_or(0)
    }
}

pub fn value_at(t: &MarkoffTriple, s: &Slope) -> Result<Real> {
    MarkoffMap::new(t).value(s)
}

pub fn jet_at(t: &MarkoffTriple, s: &Slope) -> Result<Jet> {
    MarkoffMap::new(t).jet(s).cloned()
}

/// Largest deviation of `K` over the Farey triangles within `depth` of the
/// base triangle.
#[derive(Clone, Debug)]
pub struct KDeviation {
    /// `max |K(T) − K|`.
    pub max_abs: Real,
    /// `max |K(T) − K| / max(1, |Φ(a)Φ(b)Φ(c)|)`, the deviation relative to
    /// the size of the terms cancelling in `K(T)`.
    pub max_rel: Real,
    pub triangles: usize,
}

pub fn k_constancy_check(t: &MarkoffTriple, depth: usize) -> Result<KDeviation> {
    let bits = t.bits();
    let map = MarkoffMap::with_depth(t, depth)?;
    let k = t.commutator_trace();
    let mut max_abs = Float::with_val(bits, 0);
    let mut max_rel = Float::with_val(bits, 0);
    let mut triangles = 1;
    let mut visit = |a: &Real, b: &Real, c: &Real| {
        let dev = Float::with_val(bits, commutator_trace_of(a, b, c) - &k).abs();
        let scale = (Float::with_val(bits, a * b) * c).abs().max(&Float::with_val(bits, 1));
        let rel = Float::with_val(bits, &dev / &scale);
        if dev > max_abs {
            max_abs = dev;
        }
        if rel > max_rel {
            max_rel = rel;
        }
    };
    for level in farey::crossings(depth) {
        for c in level {
            let get = |s: &Slope| &map.cached(s).expect("evaluated").value;
            visit(get(&c.left), get(&c.new), get(&c.right));
            triangles += 1;
        }
    }
    Ok(KDeviation { max_abs, max_rel, triangles })
}

/// Parameters `(ℓ, x, y)` with `Φ(region) = 2 cosh ℓ` and
/// `Φ(R_n) = 2y·cosh(nℓ − x)` on the neighbors `R_n` of `region`, where
/// `R_0 = index0` and `R_n` follows [`farey::neighbor_sequence`].
#[derive(Clone, Debug, PartialEq)]
pub struct HalfTraceCoords {
    pub ell: Real,
    pub x: Real,
    pub y: Real,
    pub region: Slope,
    pub index0: Slope,
}

impl HalfTraceCoords {
    /// Coordinates relative to region `∞` with `R_0 = 0`, given directly.
    pub fn from_params(ell: Real, x: Real, y: Real) -> Result<Self> {
        let bits = ell.prec().min(x.prec()).min(y.prec());
        check_bits(bits)?;
        if ell <= 0 || !ell.is_finite() {
            return Err(Error::InvalidParameter(format!("half-length must be positive, got {ell}")));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        if y <= 1 {
            return Err(Error::NotGeometric(format!("y = {y} must exceed 1")));
        }
        Ok(HalfTraceCoords {
            ell: Float::with_val(bits, ell),
            x: Float::with_val(bits, x),
            y: Float::with_val(bits, y),
            region: Slope::infinity(),
            index0: Slope::integer(0),
        })
    }

    pub fn from_f64(bits: u32, ell: f64, x: f64, y: f64) -> Result<Self> {
        HalfTraceCoords::from_params(real::real(bits, ell), real::real(bits, x), real::real(bits, y))
    }

    pub fn bits(&self) -> u32 {
        self.ell.prec()
    }

    /// `ξ_n = nℓ − x`.
    pub fn xi(&self, n: i64) -> Real {
        Float::with_val(self.bits(), &self.ell * n) - &self.x
    }

    /// `2y·cosh(nℓ − x)`.
    pub fn neighbor_value(&self, n: i64) -> Real {
        self.xi(n).cosh() * &self.y * 2u32
    }

    pub fn region_value(&self) -> Real {
        Float::with_val(self.bits(), self.ell.cosh_ref()) * 2u32
    }

    pub fn neighbor(&self, n: i64) -> Slope {
        farey::neighbor_sequence(&self.region, &self.index0, n).expect("validated frame")
    }

    /// The Markoff triple these coordinates describe.
    pub fn triple(&self) -> Result<MarkoffTriple> {
        MarkoffTriple::from_triangle(
            [self.region.clone(), self.neighbor(0), self.neighbor(1)],
            [self.region_value(), self.neighbor_value(0), self.neighbor_value(1)],
        )
    }

    /// `Φ′(R_n)` for a deformation with coordinates `(L, Y, X)`:
    /// `2Y cosh ξ_n + 2y(nL − X) sinh ξ_n`.
    pub fn neighbor_derivative(&self, n: i64, lyx: &Vec3) -> Real {
        let bits = self.bits();
        let xi = self.xi(n);
        let (sh, ch) = xi.sinh_cosh(Float::new(bits));
        let mut a = Float::with_val(bits, &lyx[1] * &ch);
        let mut b = Float::with_val(bits, &lyx[0] * n);
        b -= &lyx[2];
        b *= &self.y;
        b *= &sh;
        a += b;
        a * 2u32
    }

    /// `Φ′(region) = 2L sinh ℓ`.
    pub fn region_derivative(&self, lyx: &Vec3) -> Real {
        Float::with_val(self.bits(), self.ell.sinh_ref()) * &lyx[0] * 2u32
    }
}

/// Solves for `(ℓ, x, y)` relative to `region` with `R_0 = index0`.
pub fn half_trace_coords(t: &MarkoffTriple, region: &Slope, index0: &Slope) -> Result<HalfTraceCoords> {
    t.require_geometric()?;
    let bits = t.bits();
    let r1 = farey::neighbor_sequence(region, index0, 1)?;
    let mut map = MarkoffMap::new(t);
    let phi = map.value(region)?;
    let phi0 = map.value(index0)?;
    let phi1 = map.value(&r1)?;
    if phi <= 2 {
        return Err(Error::Degenerate(region.clone()));
    }
    let ell = Float::with_val(bits, &phi / 2u32).acosh();
    let (sh, ch) = ell.clone().sinh_cosh(Float::new(bits));
    // tanh x = (Φ(R_0) cosh ℓ − Φ(R_1)) / (Φ(R_0) sinh ℓ)
    let mut num = Float::with_val(bits, &phi0 * &ch);
    num -= &phi1;
    let tanh_x = num / Float::with_val(bits, &phi0 * &sh);
    if tanh_x.clone().abs() >= 1 {
        return Err(Error::NotGeometric(format!("|tanh x| = {} ≥ 1 for region {region}", tanh_x.abs())));
    }
    let x = tanh_x.atanh();
    let y = Float::with_val(bits, &phi0 / Float::with_val(bits, x.cosh_ref())) / 2u32;
    Ok(HalfTraceCoords { ell, x, y, region: region.clone(), index0: index0.clone() })
}

/// The linear map from deformation coordinates `(L, Y, X)` to the
/// derivatives `(Φ′(region), Φ′(R_0), Φ′(R_1))`, and its inverse.
#[derive(Clone, Debug)]
pub struct BasisChange {
    pub forward: Mat3,
    pub inverse: Mat3,
}

impl BasisChange {
    pub fn to_local(&self, lyx: &Vec3) -> Vec3 {
        self.forward.apply(lyx)
    }

    pub fn to_lyx(&self, local: &Vec3) -> Vec3 {
        self.inverse.apply(local)
    }
}

pub fn basis_change(c: &HalfTraceCoords) -> Result<BasisChange> {
    let bits = c.bits();
    if c.ell.is_zero() {
        return Err(Error::Degenerate(c.region.clone()));
    }
    let zero = || Float::new(bits);
    let two = |v: Float| v * 2u32;
    let (sh_x, ch_x) = c.x.clone().sinh_cosh(Float::new(bits));
    let (sh_1, ch_1) = c.xi(1).sinh_cosh(Float::new(bits));
    let y_sh_1 = two(Float::with_val(bits, &c.y * &sh_1));
    let forward = Mat3::from_rows([
        [two(Float::with_val(bits, c.ell.sinh_ref())), zero(), zero()],
        [zero(), two(ch_x), two(Float::with_val(bits, &c.y * &sh_x))],
        [y_sh_1.clone(), two(ch_1), -y_sh_1],
    ]);
    let inverse = forward.inverse().ok_or_else(|| Error::Degenerate(c.region.clone()))?;
    Ok(BasisChange { forward, inverse })
}

/// `π` at the given precision.
pub fn pi(bits: u32) -> Real {
    Float::with_val(bits, Constant::Pi)
}
