//! Sides of the polygon `Π` of lengthening directions, its depth-truncated
//! approximations, membership and the circumscribed quadrilateral `Q`.
//!
//! Directions are triples `(A′, B′, C′)` of derivatives of the base values.
//! The side of slope `r` lies on the line `f_r = 0` and is cut out by the
//! requirement that `Φ′` be a geometric progression of ratio `a^{±1}` along
//! the neighbors of `r`, where `a + a⁻¹ = Φ(r)`.
//!
//! Walking the boundary through increasing slopes, each side runs from
//! `p_minus` to `p_plus`: `p_minus` borders the sides of slopes just below
//! `r`, `p_plus` those just above.

use std::collections::HashMap;

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::farey::{self, Slope};
use crate::markoff::{self, BasisChange, HalfTraceCoords, Jet, MarkoffMap, MarkoffTriple};
use crate::real::{self, default_tol, Mat3, Real, Vec3};

/// Extra bits carried beyond the precision needed to absorb the size of the
/// Markoff values.
pub const GUARD_BITS: u32 = 64;

/// A point of `P²(R)` given by homogeneous coordinates.
#[derive(Clone, Debug)]
pub struct ProjectivePoint(Vec3);

impl ProjectivePoint {
    pub fn new(v: Vec3) -> Result<Self> {
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidParameter("projective point with all coordinates zero".into()));
        }
        Ok(ProjectivePoint(v))
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn bits(&self) -> u32 {
        self.0[0].prec()
    }

    /// Coordinates scaled so the largest-magnitude entry is `+1`.
    pub fn normalized(&self) -> Vec3 {
        let i = (0..3).max_by(|&i, &j| real::cmp_real(&self.0[i].clone().abs(), &self.0[j].clone().abs())).unwrap();
        let k = self.0[i].clone();
        self.0.clone().map(|x| x / &k)
    }

    /// Representative with positive coordinate sum, the orientation used for
    /// points of the positive octant.
    pub fn oriented(&self) -> Vec3 {
        let s = Float::with_val(self.bits(), &self.0[0] + &self.0[1]) + &self.0[2];
        if s < 0 {
            self.0.clone().map(|x| -x)
        } else {
            self.0.clone()
        }
    }

    pub fn distance(&self, other: &ProjectivePoint) -> Real {
        real::projective_distance(&self.0, &other.0)
    }

    /// Position in the octant chart `A′ + B′ + C′ = 1`, drawn in the
    /// equilateral triangle with `A′`, `B′`, `C′` corners at `(0, 0)`,
    /// `(1, 0)` and `(1/2, √3/2)`. `None` on the line at infinity.
    pub fn octant(&self) -> Option<[Real; 2]> {
        let bits = self.bits();
        let s = Float::with_val(bits, &self.0[0] + &self.0[1]) + &self.0[2];
        if s.is_zero() {
            return None;
        }
        let half_c = Float::with_val(bits, &self.0[2] / 2u32);
        let x = Float::with_val(bits, &self.0[1] + &half_c) / &s;
        let y = Float::with_val(bits, 3).sqrt() * half_c / &s;
        Some([x, y])
    }
}

/// One side of `Π`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub slope: Slope,
    /// The functional `f_slope`, whose zero line carries the side.
    pub line: Vec3,
    pub p_minus: ProjectivePoint,
    pub p_plus: ProjectivePoint,
    /// Largest deviation from `1` of `Φ′(R_{n+1})Φ′(R_{n−1}) / Φ′(R_n)²` at
    /// either endpoint, over the neighbors `R_0, R_1` used in the solve.
    pub certificate: Real,
    pub chart_minus: Option<[Real; 2]>,
    pub chart_plus: Option<[Real; 2]>,
}

/// `a = (Φ + √(Φ² − 4)) / 2`, the larger root of `a + a⁻¹ = Φ`.
pub fn edge_ratio(phi: &Real) -> Real {
    let bits = phi.prec();
    let disc = Float::with_val(bits, phi.square_ref()) - 4u32;
    (disc.sqrt() + phi) / 2u32
}

fn require_side(r: &Slope, phi: &Real) -> Result<()> {
    if *phi == 2 {
        Err(Error::Degenerate(r.clone()))
    } else if *phi < 2 {
        Err(Error::NotGeometric(format!("Φ({r}) = {phi} < 2")))
    } else {
        Ok(())
    }
}

/// Endpoints of a side in the coordinates `(Φ′(r), Φ′(R_0), Φ′(R_1))`
/// attached to the neighbor frame of `r`.
#[derive(Clone, Debug)]
pub struct LocalEdge {
    pub slope: Slope,
    pub frame: (Slope, Slope),
    pub a: Real,
    /// `[0 : a : 1]`
    pub p_minus: Vec3,
    /// `[0 : 1 : a]`
    pub p_plus: Vec3,
}

pub fn edge_local(t: &MarkoffTriple, r: &Slope) -> Result<LocalEdge> {
    t.require_geometric()?;
    let phi = markoff::value_at(t, r)?;
    require_side(r, &phi)?;
    let bits = t.bits();
    let a = edge_ratio(&phi);
    let zero = Float::new(bits);
    let one = Float::with_val(bits, 1);
    Ok(LocalEdge {
        slope: r.clone(),
        frame: farey::neighbor_frame(r),
        p_minus: [zero.clone(), a.clone(), one.clone()],
        p_plus: [zero, one, a.clone()],
        a,
    })
}

/// Precision for solving the side systems: the configured bits plus four
/// times the binary exponent of the largest jet involved. Evaluating
/// `f_{R_2}(p) = a⁻¹` cancels terms as large as `‖∇Φ(R_2)‖‖p‖`, which costs
/// up to that many bits.
pub fn working_bits(bits: u32, max_exponent: i32) -> u32 {
    bits + 4 * max_exponent.max(0) as u32 + GUARD_BITS
}

/// The neighbors of `r` whose jets the side solve and its certificate use.
fn side_neighbors(r: &Slope) -> [Slope; 4] {
    let (r0, r1) = farey::neighbor_frame(r);
    let rm = farey::neighbor_sequence(r, &r0, -1).expect("frame neighbor");
    let r2 = farey::neighbor_sequence(r, &r0, 2).expect("frame neighbor");
    [rm, r0, r1, r2]
}

fn jet_exponent(j: &Jet) -> i32 {
    std::iter::once(&j.value).chain(j.grad.iter()).filter_map(|x| x.get_exp()).max().unwrap_or(0)
}

/// Jets evaluated at a working precision large enough for the side solves
/// of a fixed set of slopes.
#[derive(Clone, Debug)]
pub struct EdgeContext {
    map: MarkoffMap,
    bits: u32,
}

impl EdgeContext {
    /// Context for the slopes of `enumerate(depth)` plus `extra`.
    pub fn new(t: &MarkoffTriple, depth: usize, extra: &[Slope]) -> Result<Self> {
        t.require_geometric()?;
        let bits = t.bits();
        let mut needed: Vec<Slope> = farey::enumerate(depth);
        needed.extend(extra.iter().cloned());
        let fill = |map: &mut MarkoffMap| -> Result<()> {
            for s in &needed {
                map.jet(s)?;
                for n in side_neighbors(s) {
                    map.jet(&n)?;
                }
            }
            Ok(())
        };
        let mut probe = MarkoffMap::with_depth(&t.with_bits(real::MIN_BITS)?, depth)?;
        fill(&mut probe)?;
        let exponent = needed.iter().flat_map(|s| {
            let mut slopes = side_neighbors(s).to_vec();
            slopes.push(s.clone());
            slopes
        });
        let e = exponent.map(|s| jet_exponent(probe.cached(&s).unwrap())).max().unwrap_or(0);
        let mut map = MarkoffMap::with_depth(&t.with_bits(working_bits(bits, e))?, depth)?;
        fill(&mut map)?;
        Ok(EdgeContext { map, bits })
    }

    pub fn working_bits(&self) -> u32 {
        self.map.bits()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn map(&self) -> &MarkoffMap {
        &self.map
    }

    fn jet(&self, s: &Slope) -> Result<&Jet> {
        self.map.cached(s).ok_or_else(|| Error::InvalidParameter(format!("slope {s} outside the evaluated set")))
    }

    /// Solves `f_r(v) = 0`, `(f_{R_0}, f_{R_1})(v) = (a, 1)` resp. `(1, a)`.
    pub fn edge(&self, r: &Slope) -> Result<Edge> {
        let [rm, r0, r1, r2] = side_neighbors(r);
        let jr = self.jet(r)?;
        require_side(r, &jr.value)?;
        let wb = self.working_bits();
        let a = edge_ratio(&jr.value);
        let system = Mat3::from_rows([jr.grad.clone(), self.jet(&r0)?.grad.clone(), self.jet(&r1)?.grad.clone()]);
        let inverse = system.inverse().ok_or_else(|| Error::Singular(r.clone()))?;
        let zero = Float::new(wb);
        let one = Float::with_val(wb, 1);
        let p_minus = inverse.apply(&[zero.clone(), a.clone(), one.clone()]);
        let p_plus = inverse.apply(&[zero, one, a]);
        let neighbors = [self.jet(&rm)?, self.jet(&r0)?, self.jet(&r1)?, self.jet(&r2)?];
        let mut certificate = Float::new(wb);
        for p in [&p_minus, &p_plus] {
            let f: Vec<Real> = neighbors.iter().map(|j| j.apply(p)).collect();
            for k in 1..3 {
                let ratio = Float::with_val(wb, &f[k + 1] * &f[k - 1]) / Float::with_val(wb, f[k].square_ref());
                let dev = (ratio - 1u32).abs();
                if dev > certificate || dev.is_nan() {
                    certificate = dev;
                }
            }
        }
        if certificate.is_nan() || certificate > default_tol(self.bits) {
            return Err(Error::CertificateFailed { slope: r.clone(), deviation: certificate.to_f64() });
        }
        Ok(Edge {
            slope: r.clone(),
            line: jr.grad.clone(),
            p_minus: ProjectivePoint::new(p_minus)?,
            p_plus: ProjectivePoint::new(p_plus)?,
            certificate,
            chart_minus: None,
            chart_plus: None,
        })
    }
}

/// The side of slope `r`, in base coordinates `(A′, B′, C′)`.
pub fn edge_global(t: &MarkoffTriple, r: &Slope) -> Result<Edge> {
    EdgeContext::new(t, 0, std::slice::from_ref(r))?.edge(r)
}

/// The affine coordinates `(L, Y, X)` attached to a region's neighbor
/// family, together with the maps to and from `(A′, B′, C′)`.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    pub coords: HalfTraceCoords,
    basis: BasisChange,
    jets: Mat3,
    jets_inverse: Mat3,
}

impl LocalFrame {
    pub fn new(t: &MarkoffTriple, region: &Slope) -> Result<Self> {
        let (r0, r1) = farey::neighbor_frame(region);
        let coords = markoff::half_trace_coords(t, region, &r0)?;
        let basis = markoff::basis_change(&coords)?;
        let mut map = MarkoffMap::new(t);
        let rows = [region, &r0, &r1].map(|s| map.jet(s).map(|j| j.grad.clone()));
        let [a, b, c] = rows;
        let jets = Mat3::from_rows([a?, b?, c?]);
        let jets_inverse = jets.inverse().ok_or_else(|| Error::Singular(region.clone()))?;
        Ok(LocalFrame { coords, basis, jets, jets_inverse })
    }

    pub fn region(&self) -> &Slope {
        &self.coords.region
    }

    pub fn to_lyx(&self, v: &Vec3) -> Vec3 {
        self.basis.to_lyx(&self.jets.apply(v))
    }

    pub fn to_global(&self, lyx: &Vec3) -> Vec3 {
        self.jets_inverse.apply(&self.basis.to_local(lyx))
    }

    /// `(X/L, Y/L)`, or `None` on the line `L = 0`.
    pub fn chart_point(&self, v: &Vec3) -> Option<[Real; 2]> {
        let lyx = self.to_lyx(v);
        let scale = real::norm(&lyx);
        if Float::with_val(scale.prec(), lyx[0].abs_ref()) <= scale * default_tol(lyx[0].prec()) {
            return None;
        }
        let [l, y, x] = lyx;
        Some([x / &l, y / l])
    }
}

/// Affine chart in which a polygon is reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chart {
    /// The plane `L = 1` of the `(L, Y, X)` coordinates of `region`.
    Local { region: Slope },
    /// The plane `A′ + B′ + C′ = 1`.
    Octant,
}

impl Chart {
    pub fn name(&self) -> String {
        match self {
            Chart::Local { region } => format!("L1:{region}"),
            Chart::Octant => "octant".into(),
        }
    }
}

enum ChartMap {
    Local(Box<LocalFrame>),
    Octant,
}

impl ChartMap {
    fn new(t: &MarkoffTriple, chart: &Chart) -> Result<Self> {
        Ok(match chart {
            Chart::Local { region } => ChartMap::Local(Box::new(LocalFrame::new(t, region)?)),
            Chart::Octant => ChartMap::Octant,
        })
    }

    fn point(&self, p: &ProjectivePoint) -> Option<[Real; 2]> {
        match self {
            ChartMap::Local(frame) => frame.chart_point(p.coords()),
            ChartMap::Octant => p.octant(),
        }
    }
}

/// The side of `R_n` from the closed-form expressions in the `(L, Y, X)`
/// coordinates of `c.region`, normalized to `L = 1`. Points are `(X, Y)`.
#[derive(Clone, Debug)]
pub struct ChartEdge {
    pub n: i64,
    pub minus: [Real; 2],
    pub plus: [Real; 2],
}

impl ChartEdge {
    pub fn lyx_minus(&self) -> Vec3 {
        lyx_of(&self.minus)
    }

    pub fn lyx_plus(&self) -> Vec3 {
        lyx_of(&self.plus)
    }
}

fn lyx_of(p: &[Real; 2]) -> Vec3 {
    [Float::with_val(p[0].prec(), 1), p[1].clone(), p[0].clone()]
}

/// With `ξ = nℓ − x` and `s = √(cosh²ξ − y⁻²)`:
/// `Y± = y sinh²ξ / tanh ℓ ± y sinh ξ · s`,
/// `X± = sinh ξ cosh ξ / tanh ℓ ± cosh ξ · s + n`.
pub fn edge_closed_form(c: &HalfTraceCoords, n: i64) -> Result<ChartEdge> {
    closed_form_with_shift(c, n, &Float::new(c.bits()))
}

/// [`edge_closed_form`] with the `+ n` term of `X±` displaced by `shift`;
/// used to check that the verification suites notice a wrong constant.
#[doc(hidden)]
pub fn closed_form_with_shift(c: &HalfTraceCoords, n: i64, shift: &Real) -> Result<ChartEdge> {
    let bits = c.bits();
    if c.y <= 1 {
        return Err(Error::NotGeometric(format!("y = {} must exceed 1", c.y)));
    }
    let xi = c.xi(n);
    let (sh, ch) = xi.sinh_cosh(Float::new(bits));
    let tanh_l = Float::with_val(bits, c.ell.tanh_ref());
    let y_inv2 = Float::with_val(bits, c.y.square_ref()).recip();
    let s = (Float::with_val(bits, ch.square_ref()) - y_inv2).sqrt();
    let y_mid = Float::with_val(bits, sh.square_ref()) * &c.y / &tanh_l;
    let y_off = Float::with_val(bits, &sh * &s) * &c.y;
    let x_mid = Float::with_val(bits, &sh * &ch) / &tanh_l + n + shift;
    let x_off = Float::with_val(bits, &ch * &s);
    Ok(ChartEdge {
        n,
        minus: [Float::with_val(bits, &x_mid - &x_off), Float::with_val(bits, &y_mid - &y_off)],
        plus: [x_mid + x_off, y_mid + y_off],
    })
}

/// Distances of the closed-form endpoints to the ends `[0 : y : ±1]` of the
/// region's own side.
#[derive(Clone, Debug)]
pub struct LimitReport {
    /// `(n, distance of P_n^-, distance of P_n^+)` to `[0 : y : 1]`, `n = 1..=N`.
    pub forward: Vec<(i64, Real, Real)>,
    /// The same to `[0 : y : −1]` for `n = −1..=−N`.
    pub backward: Vec<(i64, Real, Real)>,
    /// Smallest `n₀` from which both forward sequences decrease.
    pub monotone_from: Option<i64>,
    /// Smallest `n₀` from which both backward sequences decrease in `|n|`.
    pub monotone_from_backward: Option<i64>,
}

impl LimitReport {
    /// Ratio of consecutive forward distances at `n`, `n + 1`.
    pub fn decay_ratio(&self, n: i64) -> Option<Real> {
        let i = self.forward.iter().position(|(m, _, _)| *m == n)?;
        let (_, a, _) = &self.forward[i];
        let (_, b, _) = self.forward.get(i + 1)?;
        Some(Float::with_val(a.prec(), b / a))
    }
}

pub fn endpoint_limits(c: &HalfTraceCoords, n_max: i64) -> Result<LimitReport> {
    let bits = c.bits();
    let end = |sign: i32| [Float::new(bits), c.y.clone(), Float::with_val(bits, sign)];
    let collect = |range: Vec<i64>, target: Vec3| -> Result<Vec<(i64, Real, Real)>> {
        range
            .into_iter()
            .map(|n| {
                let e = edge_closed_form(c, n)?;
                let d = |p: Vec3| real::projective_distance(&p, &target);
                Ok((n, d(e.lyx_minus()), d(e.lyx_plus())))
            })
            .collect()
    };
    let forward = collect((1..=n_max).collect(), end(1))?;
    let backward = collect((1..=n_max).map(|n| -n).collect(), end(-1))?;
    let monotone = |seq: &[(i64, Real, Real)]| {
        let mut start = seq.first().map(|s| s.0);
        for w in seq.windows(2) {
            if !(w[1].1 < w[0].1 && w[1].2 < w[0].2) {
                start = Some(w[1].0);
            }
        }
        if seq.len() >= 2 && start == seq.last().map(|s| s.0) {
            None
        } else {
            start
        }
    };
    Ok(LimitReport { monotone_from: monotone(&forward), monotone_from_backward: monotone(&backward), forward, backward })
}

/// Turning behaviour of the cyclic vertex sequence of an approximation.
#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub strictly_convex: bool,
    /// Smallest `|sin|` of a turning angle.
    pub min_turn: Real,
    pub vertices: usize,
    pub outer_convex: bool,
}

/// Depth-truncated approximation of `Π`: the sides of the slopes of
/// `enumerate(depth)` in increasing circular order from `∞`.
#[derive(Clone, Debug)]
pub struct PolygonApprox {
    pub triple: MarkoffTriple,
    pub depth: usize,
    pub chart: Chart,
    pub working_bits: u32,
    pub edges: Vec<Edge>,
    /// `outer[i]` is the intersection of the lines of `edges[i]` and
    /// `edges[i + 1]` (cyclically): the vertices of the polygon cut out by
    /// the enumerated half-planes.
    pub outer: Vec<ProjectivePoint>,
    pub convexity: ConvexityReport,
}

impl PolygonApprox {
    pub fn bits(&self) -> u32 {
        self.triple.bits()
    }

    /// Endpoints in boundary order.
    pub fn boundary(&self) -> Vec<&ProjectivePoint> {
        self.edges.iter().flat_map(|e| [&e.p_minus, &e.p_plus]).collect()
    }

    pub fn edge(&self, s: &Slope) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.slope == s)
    }
}

#[derive(Clone, Debug, Default)]
pub struct AssembleOptions {
    pub workers: Option<usize>,
}

pub fn assemble(t: &MarkoffTriple, depth: usize, chart: Chart) -> Result<PolygonApprox> {
    assemble_with(t, depth, chart, &AssembleOptions::default())
}

pub fn assemble_with(t: &MarkoffTriple, depth: usize, chart: Chart, options: &AssembleOptions) -> Result<PolygonApprox> {
    let mut slopes = farey::enumerate(depth);
    farey::circular_sort(&mut slopes);
    let ctx = EdgeContext::new(t, depth, &[])?;
    let wide = t.with_bits(ctx.working_bits())?;
    let chart_map = ChartMap::new(&wide, &chart)?;
    let solve = || -> Vec<Result<Edge>> {
        slopes
            .par_iter()
            .map(|s| {
                let mut e = ctx.edge(s)?;
                e.chart_minus = chart_map.point(&e.p_minus);
                e.chart_plus = chart_map.point(&e.p_plus);
                Ok(e)
            })
            .collect()
    };
    let results = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(solve),
        None => solve(),
    };
    let edges = results.into_iter().collect::<Result<Vec<_>>>()?;
    let outer = outer_vertices(&edges)?;
    let convexity = convexity(&edges, &outer);
    Ok(PolygonApprox { triple: t.clone(), depth, chart, working_bits: ctx.working_bits(), edges, outer, convexity })
}

fn outer_vertices(edges: &[Edge]) -> Result<Vec<ProjectivePoint>> {
    let n = edges.len();
    (0..n)
        .map(|i| {
            let v = real::cross(&edges[i].line, &edges[(i + 1) % n].line);
            ProjectivePoint::new(ProjectivePoint(v).oriented())
        })
        .collect()
}

/// `sin` of the turning angles of a closed planar path.
fn turns(points: &[[Real; 2]]) -> Vec<Real> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q, r) = (&points[(i + n - 1) % n], &points[i], &points[(i + 1) % n]);
            let bits = q[0].prec();
            let d1 = [Float::with_val(bits, &q[0] - &p[0]), Float::with_val(bits, &q[1] - &p[1])];
            let d2 = [Float::with_val(bits, &r[0] - &q[0]), Float::with_val(bits, &r[1] - &q[1])];
            let cross = Float::with_val(bits, &d1[0] * &d2[1]) - Float::with_val(bits, &d1[1] * &d2[0]);
            let l1 = Float::with_val(bits, d1[0].square_ref()) + Float::with_val(bits, d1[1].square_ref());
            let l2 = Float::with_val(bits, d2[0].square_ref()) + Float::with_val(bits, d2[1].square_ref());
            cross / (l1 * l2).sqrt()
        })
        .collect()
}

fn one_signed(turns: &[Real]) -> bool {
    let pos = turns.iter().filter(|t| **t > 0).count();
    let neg = turns.iter().filter(|t| **t < 0).count();
    pos == turns.len() || neg == turns.len()
}

fn convexity(edges: &[Edge], outer: &[ProjectivePoint]) -> ConvexityReport {
    let inner: Option<Vec<[Real; 2]>> = edges.iter().flat_map(|e| [e.p_minus.octant(), e.p_plus.octant()]).collect();
    let outer_pts: Option<Vec<[Real; 2]>> = outer.iter().map(ProjectivePoint::octant).collect();
    let bits = edges[0].line[0].prec();
    match inner {
        Some(points) => {
            let t = turns(&points);
            let min_turn = t.iter().map(|x| x.clone().abs()).min_by(real::cmp_real).unwrap_or_else(|| Float::new(bits));
            let outer_convex = outer_pts.map(|p| p.len() < 3 || one_signed(&turns(&p))).unwrap_or(false);
            ConvexityReport { strictly_convex: one_signed(&t), min_turn, vertices: points.len(), outer_convex }
        }
        None => ConvexityReport { strictly_convex: false, min_turn: Float::new(bits), vertices: 0, outer_convex: false },
    }
}

/// How an approximation at a greater depth relates to a coarser one.
#[derive(Clone, Debug)]
pub struct RefinementReport {
    /// Every coarse side reappears with the same endpoints.
    pub sides_preserved: bool,
    pub max_drift: Real,
    /// Every new side lies in the corner between the two coarse sides
    /// around it without reaching either of them.
    pub corners_only: bool,
    /// Smallest normalized value of a new functional at the adjacent coarse
    /// endpoints, or of the adjacent coarse functionals at the new endpoints.
    pub min_margin: Real,
}

fn normalized_value(f: &Vec3, p: &ProjectivePoint) -> Real {
    let v = p.oriented();
    let bits = v[0].prec().max(f[0].prec());
    let denom = Float::with_val(bits, real::norm(f) * real::norm(&v));
    real::dot(f, &v) / denom
}

pub fn refinement_check(coarse: &PolygonApprox, fine: &PolygonApprox) -> RefinementReport {
    let bits = fine.working_bits;
    let tol = default_tol(coarse.bits());
    let by_slope: HashMap<&Slope, &Edge> = fine.edges.iter().map(|e| (&e.slope, e)).collect();
    let mut max_drift = Float::new(bits);
    let mut sides_preserved = true;
    for e in &coarse.edges {
        match by_slope.get(&e.slope) {
            Some(f) => {
                let d = e.p_minus.distance(&f.p_minus).max(&e.p_plus.distance(&f.p_plus));
                if d > max_drift {
                    max_drift = d;
                }
            }
            None => sides_preserved = false,
        }
    }
    sides_preserved &= max_drift <= tol;

    let coarse_slopes: HashMap<&Slope, usize> = coarse.edges.iter().enumerate().map(|(i, e)| (&e.slope, i)).collect();
    let m = coarse.edges.len();
    let mut min_margin = Float::with_val(bits, 1);
    let mut last_coarse = fine.edges.iter().rev().find_map(|e| coarse_slopes.get(&e.slope).copied());
    for e in &fine.edges {
        if let Some(&i) = coarse_slopes.get(&e.slope) {
            last_coarse = Some(i);
            continue;
        }
        let Some(below) = last_coarse else { continue };
        let lower = &coarse.edges[below];
        let upper = &coarse.edges[(below + 1) % m];
        let margins = [
            normalized_value(&e.line, &lower.p_plus),
            normalized_value(&e.line, &upper.p_minus),
            normalized_value(&lower.line, &e.p_minus),
            normalized_value(&lower.line, &e.p_plus),
            normalized_value(&upper.line, &e.p_minus),
            normalized_value(&upper.line, &e.p_plus),
        ];
        for x in margins {
            if x < min_margin {
                min_margin = x;
            }
        }
    }
    let corners_only = min_margin > 0;
    RefinementReport { sides_preserved, max_drift, corners_only, min_margin }
}

/// The quadrilateral cut out by the lines of the sides of `∞`, `0`, `1`
/// and `2`, listed in circular order.
#[derive(Clone, Debug)]
pub struct Quadrilateral {
    pub lines: [Vec3; 4],
    /// `vertices[i]` is the intersection of `lines[i]` and `lines[i + 1]`.
    pub vertices: [ProjectivePoint; 4],
}

impl Quadrilateral {
    /// Smallest normalized value of the four functionals at `p`.
    pub fn margin(&self, p: &ProjectivePoint) -> Real {
        self.lines.iter().map(|f| normalized_value(f, p)).min_by(real::cmp_real).unwrap()
    }

    pub fn contains(&self, p: &ProjectivePoint, tol: &Real) -> bool {
        self.margin(p) >= Float::with_val(tol.prec(), -tol)
    }
}

pub fn quadrilateral_q(t: &MarkoffTriple) -> Result<Quadrilateral> {
    t.require_geometric()?;
    let mut map = MarkoffMap::new(t);
    let slopes = [Slope::infinity(), Slope::integer(0), Slope::integer(1), Slope::integer(2)];
    let mut lines: Vec<Vec3> = Vec::with_capacity(4);
    for s in &slopes {
        lines.push(map.jet(s)?.grad.clone());
    }
    let lines: [Vec3; 4] = lines.try_into().unwrap();
    let mut vertices = Vec::with_capacity(4);
    for i in 0..4 {
        let v = real::cross(&lines[i], &lines[(i + 1) % 4]);
        let p = ProjectivePoint::new(v).map_err(|_| Error::Singular(slopes[i].clone()))?;
        vertices.push(ProjectivePoint(p.oriented()));
    }
    Ok(Quadrilateral { lines, vertices: vertices.try_into().unwrap() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside { witness: Slope },
    Boundary { slope: Slope },
}

/// Sign sweep of `f_R(v)` over `enumerate(depth)`; the witness is the first
/// violated slope in enumeration order.
pub fn membership(t: &MarkoffTriple, v: &Vec3, depth: usize) -> Result<Membership> {
    membership_with_tol(t, v, depth, &default_tol(t.bits()))
}

pub fn membership_with_tol(t: &MarkoffTriple, v: &Vec3, depth: usize, tol: &Real) -> Result<Membership> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidParameter("zero direction".into()));
    }
    let map = MarkoffMap::with_depth(t, depth)?;
    let norm_v = real::norm(v);
    let mut boundary = None;
    for s in farey::enumerate(depth) {
        let jet = map.cached(&s).expect("evaluated");
        let f = jet.apply(v);
        let band = Float::with_val(f.prec(), real::norm(&jet.grad) * &norm_v) * tol;
        if f < Float::with_val(band.prec(), -&band) {
            return Ok(Membership::Outside { witness: s });
        }
        if boundary.is_none() && f.clone().abs() <= band {
            boundary = Some(s);
        }
    }
    Ok(match boundary {
        Some(slope) => Membership::Boundary { slope },
        None => Membership::Inside,
    })
}

/// Centroid of the six endpoints of the sides of `∞`, `0`, `1`, each scaled
/// to coordinate sum `1`.
pub fn interior_point(t: &MarkoffTriple) -> Result<Vec3> {
    t.require_geometric()?;
    let bits = t.bits();
    let mut sum = real::vec3(bits, [0.0; 3]);
    for s in farey::base_slopes() {
        let e = edge_global(t, &s)?;
        for p in [&e.p_minus, &e.p_plus] {
            let v = p.oriented();
            let total = Float::with_val(v[0].prec(), &v[0] + &v[1]) + &v[2];
            sum = real::add(&sum, &v.map(|x| x / &total));
        }
    }
    Ok(sum.map(|x| Float::with_val(bits, x / 6u32)))
}

/// `dℓ_s(v) = 2 f_s(v) / √(Φ(s)² − 4)`, from `Φ(s) = 2 cosh(ℓ_s / 2)`.
pub fn dlength(t: &MarkoffTriple, s: &Slope, v: &Vec3) -> Result<Real> {
    t.require_geometric()?;
    let jet = markoff::jet_at(t, s)?;
    require_side(s, &jet.value)?;
    Ok(dlength_from_jet(&jet, v))
}

pub fn dlength_from_jet(jet: &Jet, v: &Vec3) -> Real {
    let bits = jet.value.prec();
    let root = (Float::with_val(bits, jet.value.square_ref()) - 4u32).sqrt();
    jet.apply(v) * 2u32 / root
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::slope;

    fn t(a: f64, b: f64, c: f64) -> MarkoffTriple {
        MarkoffTriple::from_f64(256, a, b, c).unwrap()
    }

    fn close(u: &Vec3, v: &[f64; 3], eps: f64) -> bool {
        let v = real::vec3(u[0].prec(), *v);
        real::projective_distance(u, &v) < eps
    }

    #[test]
    fn edge_ratio_examples() {
        let a = edge_ratio(&Float::with_val(128, 3));
        assert!((a.to_f64() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(edge_ratio(&Float::with_val(128, 2)), 1);
    }

    #[test]
    fn local_edges() {
        let e = edge_local(&t(3.0, 3.0, 3.0), &Slope::infinity()).unwrap();
        assert_eq!(e.frame, (slope(0, 1), slope(1, 1)));
        let mid = real::vec3(256, [0.0, 1.0, 1.0]);
        // [0:1:1] lies between the endpoints on the line Φ′(r) = 0.
        let s = Float::with_val(256, &e.p_minus[1] / &e.p_minus[2]);
        let u = Float::with_val(256, &e.p_plus[1] / &e.p_plus[2]);
        assert!(s > Float::with_val(256, &mid[1] / &mid[2]) && u < 1);
        assert!(edge_local(&MarkoffTriple::from_f64(64, 2.0, 3.0, 3.0).unwrap(), &Slope::infinity()).is_err());
    }

    #[test]
    fn global_edges_of_base_and_half() {
        let m = t(3.0, 3.0, 3.0);
        let e = edge_global(&m, &Slope::infinity()).unwrap();
        let a = edge_ratio(&Float::with_val(256, 3)).to_f64();
        assert!(close(e.p_minus.coords(), &[0.0, a, 1.0], 1e-15));
        assert!(close(e.p_plus.coords(), &[0.0, 1.0, a], 1e-15));
        assert!(e.p_minus.coords()[0].is_zero() && e.p_plus.coords()[0].is_zero());

        let e = edge_global(&m, &slope(1, 2)).unwrap();
        let a = 3.0 + 2.0 * 2f64.sqrt();
        assert!(close(e.p_minus.coords(), &[3.0 * (1.0 + a), 1.0, a], 1e-15));
        assert!(close(e.p_plus.coords(), &[3.0 * (1.0 + a), a, 1.0], 1e-15));
        assert!(e.certificate < 1e-60);
    }

    #[test]
    fn endpoints_satisfy_all_other_constraints() {
        let m = MarkoffTriple::parse(256, "3.2", "4.5", "2.8").unwrap();
        let slopes = farey::enumerate(4);
        for r in &slopes[..12] {
            let e = edge_global(&m, r).unwrap();
            for p in [&e.p_minus, &e.p_plus] {
                assert_eq!(membership(&m, p.coords(), 8).unwrap(), Membership::Boundary { slope: r.clone() });
            }
        }
    }

    #[test]
    fn closed_form_main_edge_and_identification() {
        let c = HalfTraceCoords::from_f64(256, 1.0, 0.3, 1.5).unwrap();
        let m = c.triple().unwrap();
        let frame = LocalFrame::new(&m, &Slope::infinity()).unwrap();
        for n in [-3, 0, 1, 4] {
            let ce = edge_closed_form(&c, n).unwrap();
            let ge = edge_global(&m, &Slope::integer(n)).unwrap();
            let dm = real::projective_distance(&frame.to_global(&ce.lyx_minus()), ge.p_minus.coords());
            let dp = real::projective_distance(&frame.to_global(&ce.lyx_plus()), ge.p_plus.coords());
            assert!(dm < 1e-40 && dp < 1e-40, "n={n}: {dm} {dp}");
        }
        // The side of the region itself is [0 : y : ±1]; its p_minus is [0 : y : 1].
        let ge = edge_global(&m, &Slope::infinity()).unwrap();
        let lyx = frame.to_lyx(ge.p_minus.coords());
        assert!(real::projective_distance(&lyx, &[Float::new(256), c.y.clone(), Float::with_val(256, 1)]) < 1e-60);
        let lyx = frame.to_lyx(ge.p_plus.coords());
        assert!(real::projective_distance(&lyx, &[Float::new(256), c.y.clone(), Float::with_val(256, -1)]) < 1e-60);
    }

    #[test]
    fn closed_form_quadratic_oracle() {
        let c = HalfTraceCoords::from_f64(256, 0.8, -0.4, 2.2).unwrap();
        let bits = 256;
        let (sh_l, ch_l) = c.ell.clone().sinh_cosh(Float::new(bits));
        for n in -5..=5 {
            let e = edge_closed_form(&c, n).unwrap();
            let sh_xi = c.xi(n).sinh();
            for p in [&e.minus, &e.plus] {
                let z = Float::with_val(bits, &p[1] / &c.y);
                let q2 = Float::with_val(bits, sh_l.square_ref()) / Float::with_val(bits, sh_xi.square_ref());
                let y_inv2 = Float::with_val(bits, c.y.square_ref()).recip();
                let cst = Float::with_val(bits, sh_xi.square_ref()) - (1u32 - y_inv2) * Float::with_val(bits, sh_l.square_ref());
                let res = Float::with_val(bits, z.square_ref()) * q2 - Float::with_val(bits, &z * &sh_l) * &ch_l * 2u32 + cst;
                assert!(res.abs() < 1e-60, "n={n}");
            }
        }
    }

    #[test]
    fn limits_decay() {
        let c = HalfTraceCoords::from_f64(256, 1.0, 0.3, 1.5).unwrap();
        let r = endpoint_limits(&c, 20).unwrap();
        assert!(r.monotone_from.unwrap() <= 20);
        assert!(r.monotone_from_backward.is_some());
        // The distance behaves like n·e^{−2nℓ}, so the ratio tends to e^{−2ℓ}
        // with a (n + 1)/n correction.
        let off = |n: i64| (r.decay_ratio(n).unwrap().to_f64() / (-2.0f64).exp() - 1.0).abs();
        assert!(off(18) < off(6) && off(18) < 0.07, "{} {}", off(6), off(18));
        let (_, dm, dp) = &r.backward.last().unwrap();
        assert!(*dm < 1e-10 && *dp < 1e-10);
    }

    #[test]
    fn assemble_depth_two() {
        let m = t(3.0, 3.0, 3.0);
        let p = assemble(&m, 2, Chart::Octant).unwrap();
        assert_eq!(p.edges.len(), 12);
        assert!(p.convexity.strictly_convex && p.convexity.outer_convex);
        let order: Vec<String> = p.edges.iter().map(|e| e.slope.to_string()).collect();
        assert_eq!(order[0], "1/0");
        let q = quadrilateral_q(&m).unwrap();
        let tol = default_tol(256);
        assert!(p.boundary().iter().all(|v| q.contains(v, &tol)));
        assert!(p.outer.iter().all(|v| q.contains(v, &tol)));
    }

    #[test]
    fn base_hexagon_is_convex() {
        let p = assemble(&MarkoffTriple::parse(256, "5.5", "2.3", "3.9").unwrap(), 0, Chart::Octant).unwrap();
        assert_eq!(p.convexity.vertices, 6);
        assert!(p.convexity.strictly_convex);
    }

    #[test]
    fn local_chart_puts_region_side_at_infinity() {
        let p = assemble(&t(3.0, 3.0, 3.0), 1, Chart::Local { region: Slope::infinity() }).unwrap();
        for e in &p.edges {
            assert_eq!(e.chart_minus.is_none(), e.slope.is_infinity());
        }
    }

    #[test]
    fn refinement_cuts_corners() {
        let m = t(3.0, 3.0, 4.0);
        let coarse = assemble(&m, 3, Chart::Octant).unwrap();
        let fine = assemble(&m, 4, Chart::Octant).unwrap();
        let r = refinement_check(&coarse, &fine);
        assert!(r.sides_preserved && r.corners_only, "{r:?}");
    }

    #[test]
    fn quadrilateral_of_symmetric_triple() {
        let m = t(3.0, 2.5, 3.0);
        let q = quadrilateral_q(&m).unwrap();
        let swapped: Vec<Vec3> = q.vertices.iter().map(|v| {
            let c = v.coords();
            [c[2].clone(), c[1].clone(), c[0].clone()]
        }).collect();
        for s in &swapped {
            assert!(q.vertices.iter().any(|v| real::projective_distance(v.coords(), s) < 1e-60));
        }
        // The base sides lie inside Q's sides.
        let tol = default_tol(256);
        for s in farey::base_slopes() {
            let e = edge_global(&m, &s).unwrap();
            assert!(q.contains(&e.p_minus, &tol) && q.contains(&e.p_plus, &tol));
        }
    }

    #[test]
    fn membership_examples() {
        let m = t(3.0, 3.0, 3.0);
        let out = membership(&m, &real::vec3(256, [-1.0, 0.0, 0.0]), 4).unwrap();
        assert_eq!(out, Membership::Outside { witness: Slope::infinity() });
        let c = interior_point(&m).unwrap();
        assert!(close(&c, &[1.0, 1.0, 1.0], 1e-60));
        assert_eq!(membership(&m, &c, 12).unwrap(), Membership::Inside);
        let reflected = [-c[0].clone(), c[1].clone(), c[2].clone()];
        assert_eq!(membership(&m, &reflected, 12).unwrap(), Membership::Outside { witness: Slope::infinity() });
    }

    #[test]
    fn dlength_examples() {
        let m = MarkoffTriple::parse(256, "3.4", "2.9", "4.2").unwrap();
        let c = interior_point(&m).unwrap();
        let s = slope(2, 3);
        let d = dlength(&m, &s, &c).unwrap();
        assert!(d > 0);
        let d2 = dlength(&m, &s, &real::scale(&c, &Float::with_val(256, 2))).unwrap();
        assert!((d2 - Float::with_val(256, &d * 2u32)).abs() < 1e-60);
        let e = edge_global(&m, &s).unwrap();
        assert!(dlength(&m, &s, e.p_minus.coords()).unwrap().abs() < 1e-40);
    }
}
