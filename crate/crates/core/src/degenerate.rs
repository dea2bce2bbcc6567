//! The two limits of the polygon: one pinched curve, where the sides of its
//! neighbors are caught between two parabolas, and the constant map `Φ ≡ 2`,
//! where the polygon becomes a round disk.

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::farey::{self, Slope};
use crate::markoff::{Classification, MarkoffMap, MarkoffTriple};
use crate::polygon::{self, edge_global, Chart, ChartEdge, ProjectivePoint};
use crate::real::{self, default_tol, Real, Vec3};

/// A Markoff map with one region `R` at value `2`; its neighbors all take
/// the value `2y`. Deformations are normalized to `Φ′(R) = 1`, and
/// `Φ′(R_n) = yn² − Xn + Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct OnePinchModel {
    pub y: Real,
}

impl OnePinchModel {
    pub fn new(y: Real) -> Result<Self> {
        if y.is_nan() || y < 1 {
            return Err(Error::InvalidParameter(format!("one-pinch constant y = {y} must be at least 1")));
        }
        Ok(OnePinchModel { y })
    }

    pub fn from_triple(t: &MarkoffTriple) -> Result<Self> {
        match t.classify() {
            Classification::OnePinch { y, .. } => OnePinchModel::new(y),
            c => Err(Error::NotGeometric(format!("expected a one-pinch triple, got {c}"))),
        }
    }

    /// The torus collapses to a circle of length `2 arccosh y`.
    pub fn collapsed_length(&self) -> Real {
        Float::with_val(self.y.prec(), self.y.acosh_ref()) * 2u32
    }

    /// `√(y² − 1)`
    pub fn root(&self) -> Real {
        (Float::with_val(self.y.prec(), self.y.square_ref()) - 1u32).sqrt()
    }

    /// `(2, 2y, 2y)`: the pinched region is `∞`.
    pub fn triple(&self) -> Result<MarkoffTriple> {
        let bits = self.y.prec();
        let v = Float::with_val(bits, &self.y * 2u32);
        MarkoffTriple::new(Float::with_val(bits, 2), v.clone(), v)
    }

    /// The point `(1, Y, y − X + Y)` of `(Φ′(R), Φ′(R_0), Φ′(R_1))`.
    pub fn local_point(&self, p: &[Real; 2]) -> Vec3 {
        let bits = self.y.prec();
        let [x, y_cap] = p;
        let c = Float::with_val(bits, &self.y - x) + y_cap;
        [Float::with_val(bits, 1), y_cap.clone(), c]
    }
}

/// Endpoints `X± = 2ny ± √(y² − 1)`, `Y± = yn² ± n√(y² − 1)` of the side of
/// `R_n`, as `(X, Y)`.
pub fn one_pinch_edge(y: &Real, n: i64) -> Result<ChartEdge> {
    let model = OnePinchModel::new(y.clone())?;
    if *y == 1 {
        return Err(Error::InvalidParameter("y = 1: every side collapses; this is the Euclidean limit".into()));
    }
    let bits = y.prec();
    let s = model.root();
    let x = Float::with_val(bits, y * (2 * n));
    let yc = Float::with_val(bits, y * (n * n));
    let ns = Float::with_val(bits, &s * n);
    Ok(ChartEdge {
        n,
        minus: [Float::with_val(bits, &x - &s), Float::with_val(bits, &yc - &ns)],
        plus: [x + s, yc + ns],
    })
}

/// Residuals of the parabola statements over a range of `n`.
#[derive(Clone, Debug)]
pub struct ParabolaReport {
    /// `max |Y − X²/(4y) + (y − y⁻¹)/4|` over all endpoints.
    pub endpoint_residual: Real,
    /// `max |m² + b/y| / max(1, m²)` for the side lines `Y = mX + b`: zero
    /// iff the line is tangent to `Y = X²/(4y)`.
    pub tangency_discriminant: Real,
    /// `max(|X_t − 2yn|, |f′(X_t) − n|)` at the tangency points `X_t`.
    pub tangency_point_residual: Real,
    /// `max |(X⁺ + X⁻)/2 − 2yn|`.
    pub symmetry_residual: Real,
}

impl ParabolaReport {
    pub fn max(&self) -> Real {
        [&self.endpoint_residual, &self.tangency_discriminant, &self.tangency_point_residual, &self.symmetry_residual]
            .into_iter()
            .cloned()
            .max_by(real::cmp_real)
            .unwrap()
    }

    pub fn passes(&self, tol: &Real) -> bool {
        self.max() <= *tol
    }
}

pub fn parabola_certificates(y: &Real, from: i64, to: i64) -> Result<ParabolaReport> {
    let bits = y.prec();
    let model = OnePinchModel::new(y.clone())?;
    let four_y = Float::with_val(bits, y * 4u32);
    let shift = Float::with_val(bits, y - Float::with_val(bits, y.recip_ref())) / 4u32;
    let f = |x: &Real| Float::with_val(bits, x.square_ref()) / &four_y;
    let mut report = ParabolaReport {
        endpoint_residual: Float::new(bits),
        tangency_discriminant: Float::new(bits),
        tangency_point_residual: Float::new(bits),
        symmetry_residual: Float::new(bits),
    };
    let bump = |slot: &mut Real, v: Real| {
        let v = v.abs();
        if v > *slot {
            *slot = v;
        }
    };
    for n in from..=to {
        let e = one_pinch_edge(&model.y, n)?;
        for p in [&e.minus, &e.plus] {
            bump(&mut report.endpoint_residual, Float::with_val(bits, &p[1] - f(&p[0])) + &shift);
        }
        let m = Float::with_val(bits, &e.plus[1] - &e.minus[1]) / Float::with_val(bits, &e.plus[0] - &e.minus[0]);
        let b = Float::with_val(bits, &e.plus[1] - Float::with_val(bits, &m * &e.plus[0]));
        let m2 = Float::with_val(bits, m.square_ref());
        let disc = Float::with_val(bits, &m2 + Float::with_val(bits, &b / y));
        bump(&mut report.tangency_discriminant, disc / m2.max(&Float::with_val(bits, 1)));
        let xt = Float::with_val(bits, &m * y) * 2u32;
        let xn = Float::with_val(bits, y * (2 * n));
        bump(&mut report.tangency_point_residual, Float::with_val(bits, &xt - &xn));
        let slope_at = Float::with_val(bits, &xt / y) / 2u32;
        bump(&mut report.tangency_point_residual, slope_at - n);
        let mid = Float::with_val(bits, &e.plus[0] + &e.minus[0]) / 2u32;
        bump(&mut report.symmetry_residual, mid - xn);
    }
    Ok(report)
}

/// Share of the perimeter covered by the sides of `R_n`, `n ∈ [−N, N]`,
/// each side counted with the chord that follows it; tends to
/// `√(y² − 1)/y`.
pub fn one_pinch_gap_fraction(y: &Real, window: i64) -> Result<Real> {
    let bits = y.prec();
    let len = |a: &[Real; 2], b: &[Real; 2]| {
        let dx = Float::with_val(bits, &a[0] - &b[0]);
        let dy = Float::with_val(bits, &a[1] - &b[1]);
        (dx.square() + dy.square()).sqrt()
    };
    let mut sides = Float::new(bits);
    let mut chords = Float::new(bits);
    let mut current = one_pinch_edge(y, -window)?;
    for n in -window..=window {
        let next = one_pinch_edge(y, n + 1)?;
        sides += len(&current.plus, &current.minus);
        chords += len(&next.minus, &current.plus);
        current = next;
    }
    let total = Float::with_val(bits, &sides + &chords);
    Ok(sides / total)
}

/// Distance, in `(Φ′(R), Φ′(R_0), Φ′(R_1))`, between the sides of a nearly
/// pinched map and the one-pinch sides.
#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub epsilon: Real,
    /// `max` over `n` and both endpoints of the projective distance.
    pub max_distance: Real,
}

/// The geometric triple `(2 + ε, 2y cosh(ℓ/2), 2y cosh(ℓ/2))` with
/// `2 cosh ℓ = 2 + ε`, compared with the one-pinch limit `(2, 2y, 2y)` on the
/// sides of `R_n = n`, `|n| ≤ n_max`.
pub fn one_pinch_continuity(y: &Real, epsilon: &Real, n_max: i64) -> Result<ContinuityReport> {
    let bits = y.prec();
    let model = OnePinchModel::new(y.clone())?;
    let ell = (Float::with_val(bits, epsilon / 2u32) + 1u32).acosh();
    let side = Float::with_val(bits, &ell / 2u32).cosh() * y * 2u32;
    let t = MarkoffTriple::new(Float::with_val(bits, epsilon + 2u32), side.clone(), side)?;
    let mut max_distance = Float::new(bits);
    for n in -n_max..=n_max {
        let generic = edge_global(&t, &Slope::integer(n))?;
        let limit = one_pinch_edge(y, n)?;
        for (g, l) in [(&generic.p_minus, &limit.minus), (&generic.p_plus, &limit.plus)] {
            let d = real::projective_distance(g.coords(), &model.local_point(l));
            if d > max_distance {
                max_distance = d;
            }
        }
    }
    Ok(ContinuityReport { epsilon: epsilon.clone(), max_distance })
}

/// Integer null vector `(p² + q², p² − q², 2pq)` of `xx′ − yy′ − zz′`
/// attached to the slope `p/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightlikeVector {
    pub slope: Slope,
    pub v: [Integer; 3],
}

impl LightlikeVector {
    pub fn pairing(&self, other: &LightlikeVector) -> Integer {
        minkowski(&self.v, &other.v)
    }

    pub fn to_real(&self, bits: u32) -> Vec3 {
        self.v.clone().map(|x| Float::with_val(bits, x))
    }
}

pub fn minkowski(u: &[Integer; 3], v: &[Integer; 3]) -> Integer {
    Integer::from(&u[0] * &v[0]) - Integer::from(&u[1] * &v[1]) - Integer::from(&u[2] * &v[2])
}

pub fn lightlike_vector(s: &Slope) -> LightlikeVector {
    let (p, q) = (s.p(), s.q());
    let p2 = Integer::from(p.square_ref());
    let q2 = Integer::from(q.square_ref());
    let v = [Integer::from(&p2 + &q2), Integer::from(&p2 - &q2), Integer::from(p * q) * 2u32];
    LightlikeVector { slope: s.clone(), v }
}

/// Exact checks of the lightlike vectors over `enumerate(depth)`.
#[derive(Clone, Debug)]
pub struct LightlikeReport {
    pub vectors: usize,
    pub all_null: bool,
    pub all_future: bool,
    /// The pairing values found across Farey-neighbor pairs.
    pub neighbor_pairings: Vec<Integer>,
    pub quadruples: usize,
    /// `v_R + v_R‴ = 2(v_R′ + v_R″)` on every crossing.
    pub four_term_holds: bool,
}

impl LightlikeReport {
    pub fn passes(&self) -> bool {
        self.all_null && self.all_future && self.neighbor_pairings.len() == 1 && self.four_term_holds
    }
}

pub fn lightlike_checks(depth: usize) -> LightlikeReport {
    let slopes = farey::enumerate(depth);
    let vectors: Vec<LightlikeVector> = slopes.iter().map(lightlike_vector).collect();
    let all_null = vectors.iter().all(|v| v.pairing(v) == 0);
    let all_future = vectors.iter().all(|v| v.v[0] > 0);
    let mut pairings: Vec<Integer> = Vec::new();
    let mut record = |s: &Slope, t: &Slope| {
        let p = lightlike_vector(s).pairing(&lightlike_vector(t));
        if !pairings.contains(&p) {
            pairings.push(p);
        }
    };
    let base = farey::base_slopes();
    for i in 0..3 {
        record(&base[i], &base[(i + 1) % 3]);
    }
    let mut quadruples = 0;
    let mut four_term_holds = true;
    for level in farey::crossings(depth) {
        for c in level {
            record(&c.new, &c.left);
            record(&c.new, &c.right);
            let [n, o, l, r] = [&c.new, &c.old, &c.left, &c.right].map(lightlike_vector);
            for k in 0..3 {
                let lhs = Integer::from(&n.v[k] + &o.v[k]);
                let rhs = Integer::from(&l.v[k] + &r.v[k]) * 2u32;
                four_term_holds &= lhs == rhs;
            }
            quadruples += 1;
        }
    }
    LightlikeReport { vectors: vectors.len(), all_null, all_future, neighbor_pairings: pairings, quadruples, four_term_holds }
}

/// Squared-length form `l_{p/q} = E p² + 2F pq + G q²` of a flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatTorusForm {
    pub e: Real,
    pub f: Real,
    pub g: Real,
}

impl FlatTorusForm {
    pub fn new(e: Real, f: Real, g: Real) -> Result<Self> {
        let det = Float::with_val(e.prec(), &e * &g) - Float::with_val(f.prec(), f.square_ref());
        if !(e > 0 && det > 0) {
            return Err(Error::InvalidParameter(format!("form ({e}, {f}, {g}) is not positive definite")));
        }
        Ok(FlatTorusForm { e, f, g })
    }

    /// The linear form `η` with `l_q = η · v_q`: `((E + G)/2, (E − G)/2, F)`.
    pub fn eta(&self) -> Vec3 {
        let bits = self.e.prec();
        [
            Float::with_val(bits, &self.e + &self.g) / 2u32,
            Float::with_val(bits, &self.e - &self.g) / 2u32,
            self.f.clone(),
        ]
    }
}

pub fn flat_length(form: &FlatTorusForm, s: &Slope) -> Real {
    let bits = form.e.prec();
    let p = Float::with_val(bits, s.p());
    let q = Float::with_val(bits, s.q());
    let mut l = Float::with_val(bits, p.square_ref()) * &form.e;
    l += Float::with_val(bits, &p * &q) * &form.f * 2u32;
    l += Float::with_val(bits, q.square_ref()) * &form.g;
    l
}

/// The linear form taking the values `(h_∞, h_0, h_1)` on `v_∞, v_0, v_1`.
pub fn eta_from_values(h_inf: &Real, h0: &Real, h1: &Real) -> Vec3 {
    let bits = h_inf.prec();
    let e0 = Float::with_val(bits, h_inf + h0) / 2u32;
    let e1 = Float::with_val(bits, h_inf - h0) / 2u32;
    let e2 = Float::with_val(bits, h1 / 2u32) - &e0;
    [e0, e1, e2]
}

pub fn eta_at(eta: &Vec3, s: &Slope) -> Real {
    let bits = eta[0].prec();
    real::dot(eta, &lightlike_vector(s).to_real(bits))
}

/// `l₀² + l₁² + l_∞² − 2(l₀l₁ + l₁l_∞ + l_∞l₀)`; negative iff `√l₀, √l₁, √l_∞`
/// satisfy the strict triangle inequality.
pub fn discriminant(l_inf: &Real, l0: &Real, l1: &Real) -> Real {
    let bits = l_inf.prec();
    let sq = Float::with_val(bits, l0.square_ref()) + Float::with_val(bits, l1.square_ref()) + Float::with_val(bits, l_inf.square_ref());
    let cross = Float::with_val(bits, l0 * l1) + Float::with_val(bits, l1 * l_inf) + Float::with_val(bits, l_inf * l0);
    sq - cross * 2u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeVerdict {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct RoundConeTest {
    pub discriminant: Real,
    pub verdict: ConeVerdict,
}

/// Sign of the discriminant for nonnegative squared lengths.
pub fn round_cone_test(l_inf: &Real, l0: &Real, l1: &Real) -> Result<RoundConeTest> {
    if *l_inf < 0 || *l0 < 0 || *l1 < 0 {
        return Err(Error::InvalidParameter("squared lengths must be nonnegative".into()));
    }
    let tol = default_tol(l_inf.prec());
    Ok(cone_verdict(l_inf, l0, l1, &tol))
}

/// Verdict for arbitrary values: inside iff the discriminant is below
/// `−tol·scale` and the values are positive, boundary within the band
/// `|disc| ≤ tol·scale`, where `scale = (|l_∞| + |l₀| + |l₁|)²`.
pub fn cone_verdict(l_inf: &Real, l0: &Real, l1: &Real, tol: &Real) -> RoundConeTest {
    let bits = l_inf.prec();
    let disc = discriminant(l_inf, l0, l1);
    let scale = (Float::with_val(bits, l_inf.abs_ref()) + Float::with_val(bits, l0.abs_ref()) + Float::with_val(bits, l1.abs_ref())).square();
    let band = scale * tol;
    let verdict = if Float::with_val(bits, disc.abs_ref()) <= band {
        ConeVerdict::Boundary
    } else if disc < 0 && *l_inf > 0 {
        ConeVerdict::Inside
    } else {
        ConeVerdict::Outside
    };
    RoundConeTest { discriminant: disc, verdict }
}

/// Agreement between the discriminant test and the positivity of `η(v_q)`
/// over all `p/q` with `|p|, |q| ≤ bound`.
#[derive(Clone, Debug)]
pub struct ConeEquivalence {
    pub verdict: ConeVerdict,
    pub all_positive: bool,
    pub min_value: Real,
    pub min_slope: Slope,
    /// The verdict is `Inside` exactly when every `η(v_q)` is positive, or
    /// the verdict is `Boundary`.
    pub agrees: bool,
}

pub fn euclidean_cone_equivalence(eta: &Vec3, bound: i64, band: &Real) -> ConeEquivalence {
    let bits = eta[0].prec();
    let values = [Slope::infinity(), Slope::integer(0), Slope::integer(1)].map(|s| eta_at(eta, &s));
    let test = cone_verdict(&values[0], &values[1], &values[2], band);
    let mut min_value = values[0].clone();
    let mut min_slope = Slope::infinity();
    for q in 1..=bound {
        for p in -bound..=bound {
            if Integer::from(p).gcd(&Integer::from(q)) != 1 {
                continue;
            }
            let s = farey::slope(p, q);
            let v = eta_at(eta, &s);
            if v < min_value {
                min_value = v;
                min_slope = s;
            }
        }
    }
    let all_positive = min_value > 0;
    let agrees = match test.verdict {
        ConeVerdict::Boundary => true,
        ConeVerdict::Inside => all_positive,
        ConeVerdict::Outside => !all_positive,
    };
    let _ = bits;
    ConeEquivalence { verdict: test.verdict, all_positive, min_value, min_slope, agrees }
}

/// Largest gap between the derivative of `Φ(R_q)` at the constant map
/// `Φ ≡ 2` in the direction `d` and `η_d(v_q)`, over `enumerate(depth)`.
pub fn linearization_residual(d: &Vec3, depth: usize) -> Result<Real> {
    let bits = d[0].prec();
    let map = MarkoffMap::with_depth(&MarkoffTriple::euclidean(bits)?, depth)?;
    let eta = eta_from_values(&d[0], &d[1], &d[2]);
    let gaps = farey::enumerate(depth).into_iter().map(|s| {
        let f = map.cached(&s).unwrap().apply(d);
        (f - eta_at(&eta, &s)).abs()
    });
    Ok(real::max_real(gaps, bits))
}

/// `A = 2 cosh(t√λ)`, `B = 2 cosh(t√μ)`, `C = 2 cosh(t√ν)`.
pub fn shrink_family(lambda: &Real, mu: &Real, nu: &Real, t: &Real) -> Result<MarkoffTriple> {
    if t.is_nan() || *t <= 0 {
        return Err(Error::InvalidParameter(format!("shrink parameter t = {t} must be positive")));
    }
    if !(*lambda > 0 && *mu > 0 && *nu > 0) {
        return Err(Error::InvalidParameter("squared lengths must be positive".into()));
    }
    let bits = t.prec();
    let v = |l: &Real| (Float::with_val(bits, l.sqrt_ref()) * t).cosh() * 2u32;
    MarkoffTriple::new(v(lambda), v(mu), v(nu))
}

/// `(λ, μ, ν) = (arccosh(A/2)², arccosh(B/2)², arccosh(C/2)²)`, the inverse
/// of [`shrink_family`] at `t = 1`.
pub fn shrink_parameters(t: &MarkoffTriple) -> [Real; 3] {
    t.values().map(|v| (Float::with_val(v.prec(), v / 2u32).acosh()).square())
}

/// Symmetric matrix of the conic `discriminant = 0` in `(A′, B′, C′)`.
pub fn disk_conic() -> [[i32; 3]; 3] {
    [[1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
}

/// Point where the line `f · v = 0` touches the disk conic: `M⁻¹ f`, with
/// `M⁻¹ = (I − J)/2`.
pub fn tangency_point(f: &Vec3) -> Vec3 {
    let bits = f[0].prec();
    let sum = Float::with_val(bits, &f[0] + &f[1]) + &f[2];
    f.clone().map(|x| (x - &sum) / 2u32)
}

/// Double-root certificate that the disk conic touches each coordinate line
/// of the octant exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceTangency {
    /// Index of the vanishing coordinate.
    pub face: usize,
    /// Discriminant of the restricted binary quadratic; zero for a double root.
    pub discriminant: i64,
    pub point: [i64; 3],
}

pub fn octant_tangency() -> [FaceTangency; 3] {
    let m = disk_conic();
    [0, 1, 2].map(|face| {
        let (i, j) = ((face + 1) % 3, (face + 2) % 3);
        // m_ii u² + 2 m_ij uv + m_jj v²
        let (a, b, c) = (m[i][i] as i64, 2 * m[i][j] as i64, m[j][j] as i64);
        let discriminant = b * b - 4 * a * c;
        let mut point = [0i64; 3];
        // double root u/v = −b/(2a)
        point[i] = -b;
        point[j] = 2 * a;
        FaceTangency { face, discriminant, point }
    })
}

/// Hausdorff distance, in the octant chart, between the side endpoints of the
/// approximation along the shrink family and the tangency points of the
/// lines of the limiting disk.
#[derive(Clone, Debug)]
pub struct DiskConvergence {
    pub t: Real,
    pub classification: Classification,
    pub hausdorff: Real,
}

pub fn disk_convergence(lambda: &Real, mu: &Real, nu: &Real, ts: &[Real], depth: usize) -> Result<Vec<DiskConvergence>> {
    let bits = lambda.prec();
    let euclid = MarkoffMap::with_depth(&MarkoffTriple::euclidean(bits)?, depth)?;
    let mut limit: Vec<[Real; 2]> = Vec::new();
    for s in farey::enumerate(depth) {
        let p = ProjectivePoint::new(tangency_point(&euclid.cached(&s).unwrap().grad))?;
        limit.push(ProjectivePoint::new(p.oriented())?.octant().expect("tangency points lie in the octant"));
    }
    ts.iter()
        .map(|t| {
            let triple = shrink_family(lambda, mu, nu, t)?;
            let classification = triple.classify();
            let polygon = polygon::assemble(&triple, depth, Chart::Octant)?;
            let points: Vec<[Real; 2]> = polygon.boundary().iter().filter_map(|p| p.octant()).collect();
            Ok(DiskConvergence { t: t.clone(), classification, hausdorff: hausdorff(&points, &limit) })
        })
        .collect()
}

fn hausdorff(a: &[[Real; 2]], b: &[[Real; 2]]) -> Real {
    let bits = a[0][0].prec();
    let dist = |p: &[Real; 2], q: &[Real; 2]| {
        let dx = Float::with_val(bits, &p[0] - &q[0]);
        let dy = Float::with_val(bits, &p[1] - &q[1]);
        (dx.square() + dy.square()).sqrt()
    };
    let directed = |from: &[[Real; 2]], to: &[[Real; 2]]| {
        real::max_real(from.iter().map(|p| to.iter().map(|q| dist(p, q)).min_by(real::cmp_real).unwrap()), bits)
    };
    directed(a, b).max(&directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::slope;

    fn r(v: f64) -> Real {
        Float::with_val(256, v)
    }

    fn sqrt2() -> Real {
        Float::with_val(256, 2).sqrt()
    }

    #[test]
    fn one_pinch_examples() {
        let e = one_pinch_edge(&sqrt2(), 0).unwrap();
        assert!((e.minus[0].clone() + 1u32).abs() < 1e-70 && e.minus[1].is_zero());
        assert!((e.plus[0].clone() - 1u32).abs() < 1e-70 && e.plus[1].is_zero());
        let e = one_pinch_edge(&sqrt2(), 1).unwrap();
        let two_r2 = Float::with_val(256, sqrt2() * 2u32);
        assert!((e.plus[0].clone() - two_r2.clone() - 1u32).abs() < 1e-70);
        assert!((e.minus[1].clone() - sqrt2() + 1u32).abs() < 1e-70);
        let near = one_pinch_edge(&(r(1.0) + 1e-30), 3).unwrap();
        assert!((near.plus[0].clone() - 6u32).abs() < 1e-14 && (near.minus[1].clone() - 9u32).abs() < 1e-13);
        assert!(one_pinch_edge(&r(1.0), 2).is_err());
        assert!(one_pinch_edge(&r(0.9), 2).is_err());
    }

    #[test]
    fn one_pinch_model_from_triple() {
        let t = MarkoffTriple::from_f64(256, 2.0, 3.0, 3.0).unwrap();
        let m = OnePinchModel::from_triple(&t).unwrap();
        assert_eq!(m.y, 1.5);
        assert_eq!(t.commutator_trace(), 2);
        let want = Float::with_val(256, 1.5).acosh() * 2u32;
        assert_eq!(m.collapsed_length(), want);
    }

    #[test]
    fn parabolas() {
        for y in [r(1.1), sqrt2(), r(3.0)] {
            let rep = parabola_certificates(&y, -10, 10).unwrap();
            assert!(rep.passes(&r(1e-25)), "{rep:?}");
        }
    }

    #[test]
    fn gap_fraction_converges() {
        for y in [r(1.1), sqrt2(), r(3.0)] {
            let g = one_pinch_gap_fraction(&y, 50).unwrap().to_f64();
            let want = (y.to_f64().powi(2) - 1.0).sqrt() / y.to_f64();
            assert!((g / want - 1.0).abs() < 0.01, "{g} {want}");
        }
    }

    #[test]
    fn continuity_is_of_order_root_epsilon() {
        let y = sqrt2();
        let a = one_pinch_continuity(&y, &r(1e-4), 4).unwrap().max_distance.to_f64();
        let b = one_pinch_continuity(&y, &r(1e-6), 4).unwrap().max_distance.to_f64();
        assert!(b < a);
        assert!(a / 1e-2 < 0.01 && b / 1e-3 < a / 1e-2, "{a} {b}");
    }

    #[test]
    fn lightlike_examples() {
        let v = |s: Slope| lightlike_vector(&s).v.map(|x| x.to_i64().unwrap());
        assert_eq!(v(Slope::infinity()), [1, 1, 0]);
        assert_eq!(v(slope(0, 1)), [1, -1, 0]);
        assert_eq!(v(slope(1, 1)), [2, 0, 2]);
        assert_eq!(v(slope(-1, 1)), [2, 0, -2]);
        let rep = lightlike_checks(8);
        assert!(rep.passes(), "{rep:?}");
        assert_eq!(rep.neighbor_pairings, vec![Integer::from(2)]);
    }

    #[test]
    fn flat_lengths() {
        let sq = FlatTorusForm::new(r(1.0), r(0.0), r(1.0)).unwrap();
        assert_eq!(flat_length(&sq, &Slope::infinity()), 1);
        assert_eq!(flat_length(&sq, &slope(0, 1)), 1);
        assert_eq!(flat_length(&sq, &slope(1, 1)), 2);
        assert!(FlatTorusForm::new(r(1.0), r(2.0), r(1.0)).is_err());
        let form = FlatTorusForm::new(r(2.0), r(0.3), r(0.7)).unwrap();
        let eta = form.eta();
        for s in farey::enumerate(8) {
            assert!((flat_length(&form, &s) - eta_at(&eta, &s)).abs() < 1e-60);
        }
        for level in farey::crossings(6) {
            for c in level {
                let l = |s: &Slope| flat_length(&form, s);
                let lhs = l(&c.new) + l(&c.old);
                let rhs = (l(&c.left) + l(&c.right)) * 2u32;
                assert!((lhs - rhs).abs() < 1e-60);
            }
        }
    }

    #[test]
    fn round_cone_examples() {
        let t = |a: f64, b: f64, c: f64| round_cone_test(&r(a), &r(b), &r(c)).unwrap();
        let x = t(1.0, 1.0, 1.0);
        assert_eq!((x.discriminant.to_f64(), x.verdict), (-3.0, ConeVerdict::Inside));
        let x = t(1.0, 1.0, 4.0);
        assert_eq!((x.discriminant.to_f64(), x.verdict), (0.0, ConeVerdict::Boundary));
        let x = t(1.0, 1.0, 9.0);
        assert_eq!((x.discriminant.to_f64(), x.verdict), (45.0, ConeVerdict::Outside));
    }

    #[test]
    fn discriminant_is_minkowski_norm_of_eta() {
        let (a, b, c) = (r(1.3), r(0.4), r(2.2));
        let eta = eta_from_values(&a, &b, &c);
        let norm = eta[0].clone().square() - eta[1].clone().square() - eta[2].clone().square();
        assert!((discriminant(&a, &b, &c) + norm * 4u32).abs() < 1e-60);
    }

    #[test]
    fn cone_equivalence_examples() {
        let band = r(1e-6);
        let unit = eta_from_values(&r(1.0), &r(1.0), &r(1.0));
        let e = euclidean_cone_equivalence(&unit, 20, &band);
        assert!(e.agrees && e.all_positive && e.verdict == ConeVerdict::Inside);
        let touching = eta_from_values(&r(1.0), &r(1.0), &r(0.0));
        assert!(eta_at(&touching, &slope(1, 1)).is_zero());
        let e = euclidean_cone_equivalence(&touching, 20, &band);
        assert_eq!(e.verdict, ConeVerdict::Boundary);
        let outside = eta_from_values(&r(1.0), &r(1.0), &r(9.0));
        let e = euclidean_cone_equivalence(&outside, 20, &band);
        assert!(e.agrees && !e.all_positive);
    }

    #[test]
    fn linearization_matches_eta() {
        let d = real::vec3(256, [0.7, -0.2, 1.9]);
        assert!(linearization_residual(&d, 8).unwrap() < 1e-40);
    }

    #[test]
    fn shrink_family_examples() {
        let m = MarkoffTriple::from_f64(256, 3.0, 3.0, 3.0).unwrap();
        let [l, mu, nu] = shrink_parameters(&m);
        let back = shrink_family(&l, &mu, &nu, &r(1.0)).unwrap();
        for (u, v) in back.values().iter().zip(m.values()) {
            assert!(real::rel_err(u, v, 1.0) < 1e-70);
        }
        let small = shrink_family(&r(1.0), &r(1.0), &r(1.0), &r(1e-3)).unwrap();
        match small.classify() {
            Classification::Cone { angle } => assert!((angle.to_f64() - 2.0 * std::f64::consts::PI).abs() < 1e-2),
            c => panic!("{c}"),
        }
        let outside = shrink_family(&r(1.0), &r(1.0), &r(9.0), &r(1e-3)).unwrap();
        assert_eq!(outside.classify(), Classification::Invalid);
        assert!(shrink_family(&r(1.0), &r(1.0), &r(1.0), &r(0.0)).is_err());
    }

    #[test]
    fn tangency_of_disk() {
        for f in octant_tangency() {
            assert_eq!(f.discriminant, 0);
            let p = f.point.map(|x| Float::with_val(64, x));
            assert!(discriminant(&p[0], &p[1], &p[2]).is_zero());
        }
        // Each Euclidean jet line touches the conic at M⁻¹f.
        let map = MarkoffMap::with_depth(&MarkoffTriple::euclidean(256).unwrap(), 4).unwrap();
        for s in farey::enumerate(4) {
            let g = &map.cached(&s).unwrap().grad;
            let p = tangency_point(g);
            assert!(discriminant(&p[0], &p[1], &p[2]).is_zero(), "{s}");
            assert!(real::dot(g, &p).is_zero());
        }
    }

    #[test]
    fn disk_convergence_decreases() {
        let ts: Vec<Real> = [1.0, 0.5, 0.25, 0.125].map(r).to_vec();
        let rows = disk_convergence(&r(1.0), &r(1.2), &r(0.9), &ts, 3).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].hausdorff < w[0].hausdorff, "{:?}", rows.iter().map(|x| x.hausdorff.to_f64()).collect::<Vec<_>>());
        }
    }
}
