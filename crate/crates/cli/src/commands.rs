use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use lengthen::asymptotics;
use lengthen::degenerate::{self, OnePinchModel};
use lengthen::farey::{self, Slope};
use lengthen::markoff::{self, Classification, HalfTraceCoords, MarkoffTriple};
use lengthen::polygon::{self, AssembleOptions, Chart, EdgeContext, LocalFrame, Membership, PolygonApprox};
use lengthen::real::{self, Real};
use lengthen::report::{self, Decimal, PolygonReport};
use rug::Float;
use serde::Serialize;

use crate::config::{Input, RunConfig};
use crate::error::CliError;
use crate::svg::{Figure, Point, Style};

pub fn write_artifact(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Writes to stdout; a closed pipe is not an error.
pub fn to_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io { path: "<stdout>".into(), source: e })
        }
        _ => Ok(()),
    }
}

/// The report written in place of the requested one when a computation
/// fails numerically.
pub fn failure_report(err: &CliError) -> Option<String> {
    let slope = err.slope()?;
    let report = serde_json::json!({ "status": "numeric_failure", "error": err.to_string(), "slope": slope });
    Some(to_json(&report))
}

/// Passes `result` through, first writing the failure report to `--out`
/// when there is one.
pub fn finish(cfg: &RunConfig, result: Result<(), CliError>) -> Result<(), CliError> {
    if let (Err(e), Some(path)) = (&result, &cfg.out) {
        if let Some(report) = failure_report(e) {
            write_artifact(path, &(report + "\n"))?;
        }
    }
    result
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Writes `json` (or `csv` when the output path ends in `.csv`) to the
/// configured output, or to stdout.
fn emit(cfg: &RunConfig, json: String, csv: impl FnOnce() -> Result<String, CliError>) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) if is_csv(p) => write_artifact(p, &csv()?),
        Some(p) => write_artifact(p, &(json + "\n")),
        None => to_stdout(&(json + "\n")),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn assemble(cfg: &RunConfig, t: &MarkoffTriple, depth: usize) -> Result<PolygonApprox, CliError> {
    let options = AssembleOptions { workers: cfg.workers };
    Ok(polygon::assemble_with(t, depth, cfg.chart.clone(), &options)?)
}

fn one_pinch_model(t: &MarkoffTriple) -> Result<OnePinchModel, CliError> {
    match t.classify() {
        Classification::OnePinch { pinched, y } if pinched.is_infinity() => Ok(OnePinchModel::new(y)?),
        Classification::OnePinch { pinched, .. } => {
            Err(CliError::Usage(format!("the pinched value sits at {pinched}; put it in --A")))
        }
        c => Err(CliError::Usage(format!("expected a one-pinch triple, got {c}"))),
    }
}

/// The polygon report for the triple, whatever its mode.
fn polygon_report(cfg: &RunConfig, t: &MarkoffTriple) -> Result<(PolygonReport, Option<PolygonApprox>), CliError> {
    match t.classify() {
        Classification::Invalid if cfg.allow_invalid => Ok((PolygonReport::header_only(t, cfg.depth, cfg.bits), None)),
        Classification::Invalid => Err(CliError::Usage(format!(
            "triple classifies as invalid (K = {}); pass --allow-invalid to report it anyway",
            t.commutator_trace().to_f64()
        ))),
        Classification::Euclidean => Ok((PolygonReport::euclidean(cfg.depth, cfg.bits)?, None)),
        Classification::OnePinch { .. } => {
            let model = one_pinch_model(t)?;
            Ok((PolygonReport::one_pinch(&model, cfg.depth as i64, cfg.bits)?, None))
        }
        _ => {
            let p = assemble(cfg, t, cfg.depth)?;
            Ok((PolygonReport::generic(&p, cfg.bits)?, Some(p)))
        }
    }
}

pub fn polygon(cfg: &RunConfig) -> Result<(), CliError> {
    let t = cfg.triple()?;
    let (report, approx) = polygon_report(cfg, &t)?;
    if let Some(path) = &cfg.svg {
        let figure = match (&approx, report.mode) {
            (Some(p), _) => polygon_figure(p, true),
            (None, lengthen::Mode::OnePinch) => one_pinch_figure(&one_pinch_model(&t)?, -(cfg.depth as i64), cfg.depth as i64)?,
            (None, lengthen::Mode::Euclidean) => euclidean_figure(cfg)?,
            (None, _) => Figure::new("empty"),
        };
        write_artifact(path, &figure.render()?)?;
    }
    emit(cfg, report.to_json(), || Ok(report.to_csv()?))
}

#[derive(Serialize)]
struct SuiteResult {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    triple: [Decimal; 3],
    depth: usize,
    bits: u32,
    tol: Decimal,
    passed: bool,
    suites: Vec<SuiteResult>,
}

fn sci(x: &Real) -> String {
    format!("{:.3e}", x.to_f64())
}

fn max_of(values: impl IntoIterator<Item = Real>, bits: u32) -> Real {
    real::max_real(values.into_iter().map(|v| real::with_bits(&v, bits)), bits)
}

type Suite = Result<(bool, String), CliError>;

fn suite_k_constancy(cfg: &RunConfig, t: &MarkoffTriple) -> Suite {
    let dev = markoff::k_constancy_check(t, cfg.depth)?;
    Ok((dev.max_rel <= cfg.tol, format!("{} triangles, max relative deviation {}", dev.triangles, sci(&dev.max_rel))))
}

fn suite_half_trace(cfg: &RunConfig, t: &MarkoffTriple) -> Suite {
    let bits = t.bits();
    let k = t.commutator_trace();
    let mut ok = true;
    let mut worst = Float::new(bits);
    for region in farey::base_slopes() {
        let c = markoff::half_trace_coords(t, &region, &farey::neighbor_frame(&region).0)?;
        ok &= c.y > 1;
        let sh2 = Float::with_val(bits, c.ell.sinh_ref()).square();
        let predicted = (1u32 - Float::with_val(bits, c.y.square_ref())) * sh2 * 4u32 + 2u32;
        worst = worst.max(&real::rel_err(&predicted, &k, 1.0));
    }
    Ok((ok && worst <= cfg.tol, format!("y > 1 at 1/0, 0/1, 1/1: {ok}; K from (l, y) off by {}", sci(&worst))))
}

fn suite_closed_form(cfg: &RunConfig, t: &MarkoffTriple) -> Suite {
    let bits = t.bits();
    let shift = cfg.fault.clone().unwrap_or_else(|| Float::new(bits));
    let mut worst = Float::new(bits);
    for region in farey::base_slopes() {
        let c = markoff::half_trace_coords(t, &region, &farey::neighbor_frame(&region).0)?;
        let frame = LocalFrame::new(t, &region)?;
        let slopes: Vec<Slope> = (-8..=8).map(|n| c.neighbor(n)).collect();
        let ctx = EdgeContext::new(t, 0, &slopes)?;
        for (n, s) in (-8..=8).zip(&slopes) {
            let closed = polygon::closed_form_with_shift(&c, n, &shift)?;
            let solved = ctx.edge(s)?;
            for (lyx, p) in [(closed.lyx_minus(), &solved.p_minus), (closed.lyx_plus(), &solved.p_plus)] {
                worst = worst.max(&real::with_bits(&real::projective_distance(&frame.to_global(&lyx), p.coords()), bits));
            }
        }
    }
    Ok((worst <= cfg.tol, format!("51 sides around 1/0, 0/1, 1/1; max distance {}", sci(&worst))))
}

fn suite_polygon(cfg: &RunConfig, t: &MarkoffTriple, p: &PolygonApprox) -> Vec<(&'static str, Suite)> {
    let bits = t.bits();
    let certificate = max_of(p.edges.iter().map(|e| e.certificate.clone()), bits);
    let mut out: Vec<(&'static str, Suite)> = vec![
        ("certificates", Ok((certificate <= cfg.tol, format!("{} sides, max deviation {}", p.edges.len(), sci(&certificate))))),
        ("convexity", Ok((p.convexity.strictly_convex, format!("{} vertices, min turn {}", p.convexity.vertices, sci(&p.convexity.min_turn))))),
    ];
    out.push((
        "quadrilateral",
        polygon::quadrilateral_q(t).map_err(CliError::from).map(|q| {
            let tol = real::default_tol(bits);
            let inside = p.boundary().iter().all(|v| q.contains(v, &tol));
            (inside, format!("all {} vertices inside Q: {inside}", p.boundary().len()))
        }),
    ));
    if cfg.depth > 0 {
        out.push((
            "nesting",
            assemble(cfg, t, cfg.depth - 1).map(|coarse| {
                let r = polygon::refinement_check(&coarse, p);
                (
                    r.sides_preserved && r.corners_only,
                    format!("depth {} -> {}: sides kept {}, corners only {}", cfg.depth - 1, cfg.depth, r.sides_preserved, r.corners_only),
                )
            }),
        ));
    }
    out.push(("length_differentials", suite_dlength(cfg, t, p)));
    out
}

fn suite_dlength(cfg: &RunConfig, t: &MarkoffTriple, p: &PolygonApprox) -> Suite {
    let bits = t.bits();
    let mut map = markoff::MarkoffMap::new(&p.triple.with_bits(p.working_bits)?);
    let interior = polygon::interior_point(t)?;
    let mut worst = Float::new(bits);
    let mut positive = true;
    for e in &p.edges {
        let jet = map.jet(&e.slope)?.clone();
        for q in [&e.p_minus, &e.p_plus] {
            let scale = Float::with_val(q.bits(), real::norm(&jet.grad) * real::norm(q.coords()));
            worst = worst.max(&real::with_bits(&(jet.apply(q.coords()) / scale).abs(), bits));
        }
        positive &= polygon::dlength_from_jet(&jet, &interior) > 0;
    }
    Ok((
        worst <= cfg.tol && positive,
        format!("max normalized dlength at endpoints {}; positive at the interior point: {positive}", sci(&worst)),
    ))
}

fn suite_membership(cfg: &RunConfig, t: &MarkoffTriple) -> Suite {
    let v = polygon::interior_point(t)?;
    let inside = polygon::membership(t, &v, cfg.depth)?;
    let mut reflected = v.clone();
    reflected[0] = -reflected[0].clone();
    let outside = polygon::membership(t, &reflected, cfg.depth)?;
    let ok = inside == Membership::Inside && outside == Membership::Outside { witness: Slope::infinity() };
    let describe = |m: &Membership| match m {
        Membership::Inside => "inside".to_string(),
        Membership::Outside { witness } => format!("outside, witness {witness}"),
        Membership::Boundary { slope } => format!("on the side {slope}"),
    };
    Ok((ok, format!("interior point {}; reflected across f_1/0 {}", describe(&inside), describe(&outside))))
}

fn suite_intercept(cfg: &RunConfig, t: &MarkoffTriple) -> Suite {
    let c = markoff::half_trace_coords(t, &Slope::infinity(), &Slope::integer(0))?;
    let mut worst = Float::new(t.bits());
    for n in -20..=20 {
        worst = worst.max(&(asymptotics::axis_intercept(&c, n)? - n).abs());
    }
    Ok((worst <= cfg.tol, format!("n in [-20, 20], max |intercept - n| {}", sci(&worst))))
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let t = cfg.triple()?;
    t.require_geometric().map_err(|e| CliError::Usage(e.to_string()))?;
    let p = assemble(cfg, &t, cfg.depth)?;
    let mut suites: Vec<(&'static str, Suite)> = vec![
        ("k_constancy", suite_k_constancy(cfg, &t)),
        ("half_trace", suite_half_trace(cfg, &t)),
        ("closed_form", suite_closed_form(cfg, &t)),
    ];
    suites.extend(suite_polygon(cfg, &t, &p));
    suites.push(("membership", suite_membership(cfg, &t)));
    suites.push(("axis_intercept", suite_intercept(cfg, &t)));

    let mut results = Vec::new();
    for (name, outcome) in suites {
        let (passed, detail) = match outcome {
            Ok(r) => r,
            Err(CliError::Numeric(e)) => (false, format!("numeric failure: {e}")),
            Err(e) => return Err(e),
        };
        eprintln!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        results.push(SuiteResult { name, passed, detail });
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let report = VerifyReport {
        triple: t.values().map(|v| Decimal::new(v, cfg.bits)),
        depth: cfg.depth,
        bits: cfg.bits,
        tol: Decimal::new(&cfg.tol, cfg.bits),
        passed: failed.is_empty(),
        suites: results,
    };
    emit(cfg, to_json(&report), || {
        let rows: Vec<Vec<String>> =
            report.suites.iter().map(|s| vec![s.name.to_string(), s.passed.to_string(), s.detail.clone()]).collect();
        Ok(report::table_csv(&["suite", "passed", "detail"], &rows)?)
    })?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SuiteFailed(format!("failed suites: {}", failed.join(", "))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LimitMode {
    #[value(name = "generic")]
    Generic,
    #[value(name = "one_pinch", alias = "one-pinch")]
    OnePinch,
    #[value(name = "euclidean")]
    Euclidean,
}

pub struct LimitsOptions {
    pub mode: LimitMode,
    pub steps: usize,
    pub l: Option<String>,
    pub m: Option<String>,
    pub n: Option<String>,
}

fn lambda_mu_nu(cfg: &RunConfig, l: &Option<String>, m: &Option<String>, n: &Option<String>) -> Result<[Real; 3], CliError> {
    let one = || Float::with_val(cfg.bits, 1);
    Ok([
        cfg.number(l, "l")?.unwrap_or_else(one),
        cfg.number(m, "m")?.unwrap_or_else(one),
        cfg.number(n, "n")?.unwrap_or_else(one),
    ])
}

fn coords_of(cfg: &RunConfig) -> Result<HalfTraceCoords, CliError> {
    match &cfg.input {
        Input::Coords(c) => Ok(c.clone()),
        _ => {
            let t = cfg.triple()?;
            Ok(markoff::half_trace_coords(&t, &cfg.region, &farey::neighbor_frame(&cfg.region).0)?)
        }
    }
}

fn pinch_y(cfg: &RunConfig) -> Result<Real, CliError> {
    match cfg.number(&cfg.raw.y, "y")? {
        Some(y) => Ok(y),
        None => Ok(one_pinch_model(&cfg.triple()?)?.y),
    }
}

#[derive(Serialize)]
struct LimitsReport<R> {
    mode: &'static str,
    passed: bool,
    rows: Vec<R>,
}

#[derive(Serialize)]
struct EndpointRow {
    n: i64,
    distance_minus: Decimal,
    distance_plus: Decimal,
}

#[derive(Serialize)]
struct ContinuityRow {
    epsilon: Decimal,
    max_distance: Decimal,
}

#[derive(Serialize)]
struct ShrinkRow {
    t: Decimal,
    #[serde(rename = "K")]
    k: Decimal,
    classification: Classification,
    hausdorff: Decimal,
}

fn strictly_decreasing(values: &[Real]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

pub fn limits(cfg: &RunConfig, opts: &LimitsOptions) -> Result<(), CliError> {
    let bits = cfg.bits;
    let (json, passed, headline) = match opts.mode {
        LimitMode::Generic => {
            let c = coords_of(cfg)?;
            let r = polygon::endpoint_limits(&c, opts.steps.max(2) as i64)?;
            let passed = r.monotone_from.is_some() && r.monotone_from_backward.is_some();
            let rows = r
                .forward
                .iter()
                .chain(&r.backward)
                .map(|(n, dm, dp)| EndpointRow { n: *n, distance_minus: Decimal::new(dm, bits), distance_plus: Decimal::new(dp, bits) })
                .collect();
            let show = |n: Option<i64>| n.map_or_else(|| "never".to_string(), |n| n.to_string());
            let headline = format!(
                "distances to [0:y:±1] decrease from n = {} forward, n = {} backward",
                show(r.monotone_from),
                show(r.monotone_from_backward)
            );
            (to_json(&LimitsReport { mode: "generic", passed, rows }), passed, headline)
        }
        LimitMode::OnePinch => {
            let y = pinch_y(cfg)?;
            let mut values = Vec::new();
            let mut rows = Vec::new();
            for k in 1..=opts.steps {
                let eps = real::pow10(bits, -2 * k as i32);
                let r = degenerate::one_pinch_continuity(&y, &eps, 4)?;
                rows.push(ContinuityRow { epsilon: Decimal::new(&eps, bits), max_distance: Decimal::new(&r.max_distance, bits) });
                values.push(r.max_distance);
            }
            let passed = strictly_decreasing(&values);
            let headline = format!("distances {:?}", values.iter().map(|v| v.to_f64()).collect::<Vec<_>>());
            (to_json(&LimitsReport { mode: "one_pinch", passed, rows }), passed, headline)
        }
        LimitMode::Euclidean => {
            let [l, m, n] = lambda_mu_nu(cfg, &opts.l, &opts.m, &opts.n)?;
            let ts: Vec<Real> = (0..opts.steps).map(|k| Float::with_val(bits, Float::i_exp(1, -(k as i32)))).collect();
            let rows = degenerate::disk_convergence(&l, &m, &n, &ts, cfg.depth.min(8))?;
            let values: Vec<Real> = rows.iter().map(|r| r.hausdorff.clone()).collect();
            let passed = strictly_decreasing(&values);
            let headline = format!("Hausdorff distances {:?}", values.iter().map(|v| v.to_f64()).collect::<Vec<_>>());
            let rows = rows
                .into_iter()
                .map(|r| {
                    let t = degenerate::shrink_family(&l, &m, &n, &r.t).expect("validated above");
                    ShrinkRow {
                        t: Decimal::new(&r.t, bits),
                        k: Decimal::new(&t.commutator_trace(), bits),
                        classification: r.classification,
                        hausdorff: Decimal::new(&r.hausdorff, bits),
                    }
                })
                .collect();
            (to_json(&LimitsReport { mode: "euclidean", passed, rows }), passed, headline)
        }
    };
    eprintln!("{} {headline}", if passed { "PASS" } else { "FAIL" });
    emit(cfg, json, || Err(CliError::Usage("limits writes JSON only".into())))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::SuiteFailed("limit is not approached monotonically".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepPath {
    /// Euclidean shrink path t = 1, 1/2, 1/4, …
    #[value(name = "shrink")]
    Shrink,
    /// n-sweep of the axis intercept and gap proportion
    #[value(name = "n")]
    N,
    /// y-sweep of the one-pinch gap fraction
    #[value(name = "pinch")]
    Pinch,
}

pub struct SweepOptions {
    pub path: SweepPath,
    pub steps: usize,
    pub from: i64,
    pub to: i64,
    pub y_from: String,
    pub y_to: String,
    pub l: Option<String>,
    pub m: Option<String>,
    pub n: Option<String>,
}

pub fn sweep(cfg: &RunConfig, opts: &SweepOptions) -> Result<(), CliError> {
    let bits = cfg.bits;
    let d = |x: &Real| Decimal::new(x, bits).as_str().to_string();
    let blank = String::new;
    let first = match opts.path {
        SweepPath::Shrink => "t",
        SweepPath::N => "n",
        SweepPath::Pinch => "index",
    };
    let header = [first, "K", "y", "gap_proportion", "hausdorff", "intercept", "limit"];
    let mut rows: Vec<Vec<String>> = Vec::new();
    match opts.path {
        SweepPath::Shrink => {
            let [l, m, n] = lambda_mu_nu(cfg, &opts.l, &opts.m, &opts.n)?;
            let ts: Vec<Real> = (0..opts.steps).map(|k| Float::with_val(bits, Float::i_exp(1, -(k as i32)))).collect();
            for r in degenerate::disk_convergence(&l, &m, &n, &ts, cfg.depth.min(8))? {
                let k = degenerate::shrink_family(&l, &m, &n, &r.t)?.commutator_trace();
                rows.push(vec![d(&r.t), d(&k), blank(), blank(), d(&r.hausdorff), blank(), blank()]);
            }
        }
        SweepPath::N => {
            let c = coords_of(cfg)?;
            let k = c.triple()?.commutator_trace();
            for n in opts.from..=opts.to {
                let gap = if n >= 1 { d(&asymptotics::gap_proportion(&c, n)?) } else { blank() };
                let intercept = asymptotics::axis_intercept(&c, n)?;
                rows.push(vec![n.to_string(), d(&k), d(&c.y), gap, blank(), d(&intercept), blank()]);
            }
        }
        SweepPath::Pinch => {
            let steps = opts.steps.max(2);
            let y0 = cfg.number(&Some(opts.y_from.clone()), "y-from")?.expect("present");
            let y1 = cfg.number(&Some(opts.y_to.clone()), "y-to")?.expect("present");
            for i in 0..steps {
                let y = Float::with_val(bits, &y1 - &y0) * i as u32 / (steps - 1) as u32 + &y0;
                let model = OnePinchModel::new(y.clone())?;
                let k = model.triple()?.commutator_trace();
                let gap = degenerate::one_pinch_gap_fraction(&y, 50)?;
                let limit = model.root() / &y;
                rows.push(vec![i.to_string(), d(&k), d(&y), d(&gap), blank(), blank(), d(&limit)]);
            }
        }
    }
    let csv = report::table_csv(&header, &rows)?;
    match &cfg.out {
        Some(p) => write_artifact(p, &csv),
        None => to_stdout(&csv),
    }
}

fn f2(p: &[Real; 2]) -> Point {
    [p[0].to_f64(), p[1].to_f64()]
}

fn octant_frame(figure: &mut Figure) {
    let h = 3f64.sqrt() / 2.0;
    figure.path(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]], true, Style::Frame);
    figure.label([-0.04, -0.04], "A′");
    figure.label([1.0, -0.04], "B′");
    figure.label([0.5, h], "C′");
}

fn polygon_figure(p: &PolygonApprox, overlay_q: bool) -> Figure {
    let mut figure = Figure::new(format!("sides of the lengthening polygon, depth {}, chart {}", p.depth, p.chart.name()));
    if p.chart == Chart::Octant {
        octant_frame(&mut figure);
    }
    if overlay_q && p.chart == Chart::Octant {
        if let Ok(q) = polygon::quadrilateral_q(&p.triple) {
            let pts: Vec<Point> = q.vertices.iter().filter_map(|v| v.octant()).map(|v| f2(&v)).collect();
            figure.path(pts, true, Style::Overlay);
        }
    }
    let label = p.edges.len() <= 24;
    for (i, e) in p.edges.iter().enumerate() {
        let next = &p.edges[(i + 1) % p.edges.len()];
        if let (Some(a), Some(b)) = (&e.chart_minus, &e.chart_plus) {
            figure.line(f2(a), f2(b), Style::Side);
            if label {
                figure.label(mid(f2(a), f2(b)), format!("E_{}", e.slope));
            }
        }
        if let (Some(a), Some(b)) = (&e.chart_plus, &next.chart_minus) {
            figure.line(f2(a), f2(b), Style::Chord);
        }
    }
    figure
}

fn mid(a: Point, b: Point) -> Point {
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
}

/// Sides `R_n`, `n ∈ [from, to]`, in the `L = 1` chart of the region, with
/// dotted rays of slope `±y` towards the side at infinity.
fn local_figure(c: &HalfTraceCoords, from: i64, to: i64) -> Result<Figure, CliError> {
    let mut figure = Figure::new(format!("sides E_R_n, n in [{from}, {to}], chart L = 1 of {}", c.region));
    let edges = (from..=to).map(|n| polygon::edge_closed_form(c, n)).collect::<Result<Vec<_>, _>>()?;
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = (f2(&e.minus), f2(&e.plus));
        figure.line(a, b, Style::Side);
        figure.dot(a);
        figure.dot(b);
        figure.label(a, format!("P_{}^-", e.n));
        figure.label(b, format!("P_{}^+", e.n));
        if let Some(next) = edges.get(i + 1) {
            figure.line(b, f2(&next.minus), Style::Chord);
        }
    }
    let y = c.y.to_f64();
    let (first, last) = (f2(&edges[0].minus), f2(&edges[edges.len() - 1].plus));
    let reach = (last[0] - first[0]).abs().max(1.0) * 0.3;
    figure.line(last, [last[0] + reach, last[1] + y * reach], Style::Asymptote);
    figure.line(first, [first[0] - reach, first[1] + y * reach], Style::Asymptote);
    Ok(figure)
}

fn one_pinch_figure(model: &OnePinchModel, from: i64, to: i64) -> Result<Figure, CliError> {
    let y = model.y.to_f64();
    let mut figure = Figure::new(format!("one-pinch sides between two parabolas, y = {y}"));
    let shift = (y - 1.0 / y) / 4.0;
    let (x0, x1) = (2.0 * y * from as f64 - 2.0 * y, 2.0 * y * to as f64 + 2.0 * y);
    let samples = 200;
    let parabola = |offset: f64| -> Vec<Point> {
        (0..=samples)
            .map(|i| {
                let x = x0 + (x1 - x0) * i as f64 / samples as f64;
                [x, x * x / (4.0 * y) - offset]
            })
            .collect()
    };
    figure.path(parabola(0.0), false, Style::Overlay);
    figure.path(parabola(shift), false, Style::Asymptote);
    for n in from..=to {
        let e = degenerate::one_pinch_edge(&model.y, n)?;
        let (a, b) = (f2(&e.minus), f2(&e.plus));
        figure.line(a, b, Style::Side);
        figure.dot(a);
        figure.dot(b);
        figure.label(b, format!("P_{n}^+"));
    }
    Ok(figure)
}

fn euclidean_figure(cfg: &RunConfig) -> Result<Figure, CliError> {
    let report = PolygonReport::euclidean(cfg.depth, cfg.bits)?;
    let mut figure = Figure::new("round disk of the Euclidean limit with tangency points");
    octant_frame(&mut figure);
    let h = 3f64.sqrt() / 2.0;
    figure.circle([0.5, h / 3.0], h / 3.0, Style::Overlay);
    for e in &report.edges {
        if let Some([x, y]) = &e.chart_P_minus {
            let p = [x.as_str().parse::<f64>().unwrap_or(f64::NAN), y.as_str().parse::<f64>().unwrap_or(f64::NAN)];
            figure.dot(p);
        }
    }
    Ok(figure)
}

pub struct RenderOptions {
    pub mode: Option<LimitMode>,
    pub from: i64,
    pub to: i64,
    pub slices: Option<Vec<f64>>,
    pub no_q: bool,
}

pub fn render(cfg: &RunConfig, opts: &RenderOptions) -> Result<(), CliError> {
    let figure = if let Some(slices) = &opts.slices {
        let mut figure = Figure::new("slices A + B + C - 6 = s of the deformation space, octant chart");
        octant_frame(&mut figure);
        for (i, s) in slices.iter().enumerate() {
            let v = 2.0 + s / 3.0;
            let t = MarkoffTriple::from_f64(cfg.bits, v, v, v)?;
            let p = polygon::assemble_with(&t, cfg.depth, Chart::Octant, &AssembleOptions { workers: cfg.workers })?;
            let pts: Vec<Point> = p.boundary().iter().filter_map(|q| q.octant()).map(|q| f2(&q)).collect();
            figure.path(pts, true, Style::Slice(i));
        }
        figure
    } else {
        match opts.mode {
            Some(LimitMode::OnePinch) => one_pinch_figure(&OnePinchModel::new(pinch_y(cfg)?)?, opts.from, opts.to)?,
            Some(LimitMode::Euclidean) => euclidean_figure(cfg)?,
            _ => match &cfg.chart {
                Chart::Local { .. } => local_figure(&coords_of(cfg)?, opts.from, opts.to)?,
                Chart::Octant => polygon_figure(&assemble(cfg, &cfg.triple()?, cfg.depth)?, !opts.no_q),
            },
        }
    };
    let svg = figure.render()?;
    match cfg.svg.as_ref().or(cfg.out.as_ref()) {
        Some(p) => write_artifact(p, &svg),
        None => to_stdout(&svg),
    }
}
