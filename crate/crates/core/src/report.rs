//! Serializable reports. Every number is a decimal string carrying the full
//! configured precision, so equal inputs give byte-identical output.

use serde::Serialize;

use crate::asymptotics::AsymptoticRow;
use crate::degenerate::{self, OnePinchModel};
use crate::error::{Error, Result};
use crate::farey::{self, Slope};
use crate::markoff::{Classification, MarkoffMap, MarkoffTriple, Mode};
use crate::polygon::{self, PolygonApprox, ProjectivePoint};
use crate::real::{self, Real, Vec3};

/// A number rendered at a fixed output precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Decimal(String);

impl Decimal {
    pub fn new(x: &Real, bits: u32) -> Self {
        Decimal(real::to_decimal(&real::with_bits(x, bits)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn point(v: &Vec3, bits: u32) -> [Decimal; 3] {
    v.clone().map(|x| Decimal::new(&x, bits))
}

fn projective(p: &ProjectivePoint, bits: u32) -> [Decimal; 3] {
    let oriented = ProjectivePoint::new(p.oriented()).expect("nonzero point");
    point(&oriented.normalized(), bits)
}

fn chart(p: &Option<[Real; 2]>, bits: u32) -> Option<[Decimal; 2]> {
    p.as_ref().map(|q| q.clone().map(|x| Decimal::new(&x, bits)))
}

#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct EdgeRecord {
    pub slope: Slope,
    pub P_minus: [Decimal; 3],
    pub P_plus: [Decimal; 3],
    pub chart_P_minus: Option<[Decimal; 2]>,
    pub chart_P_plus: Option<[Decimal; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonReport {
    pub mode: Mode,
    pub triple: [Decimal; 3],
    #[serde(rename = "K")]
    pub k: Decimal,
    pub classification: Classification,
    /// Cone angle, funnel boundary length or one-pinch constant `y`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_value: Option<Decimal>,
    pub depth: usize,
    pub chart: String,
    pub bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<[[Decimal; 3]; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<[Decimal; 3]>,
}

fn header(t: &MarkoffTriple, bits: u32) -> (Mode, [Decimal; 3], Decimal, Classification, Option<Decimal>) {
    let class = t.classify();
    let value = match &class {
        Classification::Cone { angle } => Some(Decimal::new(angle, bits)),
        Classification::Funnel { boundary_length } => Some(Decimal::new(boundary_length, bits)),
        Classification::OnePinch { y, .. } => Some(Decimal::new(y, bits)),
        _ => None,
    };
    let mode = class.mode().unwrap_or(Mode::Geometric);
    let triple = t.values().map(|v| Decimal::new(v, bits));
    (mode, triple, Decimal::new(&t.commutator_trace(), bits), class, value)
}

impl PolygonReport {
    /// Report of an assembled polygon, with `Q` and the interior point.
    pub fn generic(p: &PolygonApprox, bits: u32) -> Result<Self> {
        let (mode, triple, k, classification, classification_value) = header(&p.triple, bits);
        let edges = p
            .edges
            .iter()
            .map(|e| EdgeRecord {
                slope: e.slope.clone(),
                P_minus: projective(&e.p_minus, bits),
                P_plus: projective(&e.p_plus, bits),
                chart_P_minus: chart(&e.chart_minus, bits),
                chart_P_plus: chart(&e.chart_plus, bits),
            })
            .collect();
        let q = polygon::quadrilateral_q(&p.triple)?;
        let interior = ProjectivePoint::new(polygon::interior_point(&p.triple)?)?;
        Ok(PolygonReport {
            mode,
            triple,
            k,
            classification,
            classification_value,
            depth: p.depth,
            chart: p.chart.name(),
            bits,
            normalization: None,
            edges,
            q: Some(q.vertices.each_ref().map(|v| projective(v, bits))),
            interior_point: Some(projective(&interior, bits)),
        })
    }

    /// Sides of `R_n`, `|n| ≤ window`, around the pinched region `∞` of
    /// `(2, 2y, 2y)`, in the `(X, Y)` chart normalized by `Φ′(R) = 1`.
    pub fn one_pinch(model: &OnePinchModel, window: i64, bits: u32) -> Result<Self> {
        let t = model.triple()?;
        let (_, triple, k, classification, classification_value) = header(&t, bits);
        let edges = (-window..=window)
            .map(|n| {
                let e = degenerate::one_pinch_edge(&model.y, n)?;
                Ok(EdgeRecord {
                    slope: Slope::integer(n),
                    P_minus: point(&model.local_point(&e.minus), bits),
                    P_plus: point(&model.local_point(&e.plus), bits),
                    chart_P_minus: chart(&Some(e.minus), bits),
                    chart_P_plus: chart(&Some(e.plus), bits),
                })
            })
            .collect::<Result<_>>()?;
        Ok(PolygonReport {
            mode: Mode::OnePinch,
            triple,
            k,
            classification,
            classification_value,
            depth: window as usize,
            chart: "XY:1/0".into(),
            bits,
            normalization: Some("dPhi(1/0) = 1".into()),
            edges,
            q: None,
            interior_point: None,
        })
    }

    /// The degenerate sides of the constant map `Φ ≡ 2`: each is the point
    /// where its line touches the disk conic.
    pub fn euclidean(depth: usize, bits: u32) -> Result<Self> {
        let t = MarkoffTriple::euclidean(bits)?;
        let (_, triple, k, classification, classification_value) = header(&t, bits);
        let map = MarkoffMap::with_depth(&t, depth)?;
        let mut slopes = farey::enumerate(depth);
        farey::circular_sort(&mut slopes);
        let edges = slopes
            .into_iter()
            .map(|s| {
                let jet = map.cached(&s).ok_or_else(|| Error::InvalidSlope(s.to_string()))?;
                let p = ProjectivePoint::new(degenerate::tangency_point(&jet.grad))?;
                let octant = p.octant();
                Ok(EdgeRecord {
                    slope: s,
                    P_minus: projective(&p, bits),
                    P_plus: projective(&p, bits),
                    chart_P_minus: chart(&octant, bits),
                    chart_P_plus: chart(&octant, bits),
                })
            })
            .collect::<Result<_>>()?;
        Ok(PolygonReport {
            mode: Mode::Euclidean,
            triple,
            k,
            classification,
            classification_value,
            depth,
            chart: "octant".into(),
            bits,
            normalization: None,
            edges,
            q: None,
            interior_point: None,
        })
    }

    /// Classification of a triple that admits no polygon, with no sides.
    pub fn header_only(t: &MarkoffTriple, depth: usize, bits: u32) -> Self {
        let (mode, triple, k, classification, classification_value) = header(t, bits);
        PolygonReport {
            mode,
            triple,
            k,
            classification,
            classification_value,
            depth,
            chart: "none".into(),
            bits,
            normalization: None,
            edges: Vec::new(),
            q: None,
            interior_point: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One edge per row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let head = [
            "slope", "P_minus_0", "P_minus_1", "P_minus_2", "P_plus_0", "P_plus_1", "P_plus_2", "chart_P_minus_x",
            "chart_P_minus_y", "chart_P_plus_x", "chart_P_plus_y",
        ];
        w.write_record(head).map_err(csv_error)?;
        for e in &self.edges {
            let mut row = vec![e.slope.to_string()];
            row.extend(e.P_minus.iter().chain(&e.P_plus).map(|d| d.0.clone()));
            for c in [&e.chart_P_minus, &e.chart_P_plus] {
                match c {
                    Some([x, y]) => row.extend([x.0.clone(), y.0.clone()]),
                    None => row.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&row).map_err(csv_error)?;
        }
        finish(w)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rows of the asymptotic report as CSV.
pub fn asymptotic_csv(rows: &[AsymptoticRow], bits: u32) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n", "Xi", "side_length", "chord_length", "sigma", "sigma_prime", "intercept", "sigma_residual",
        "intercept_residual", "proximity_normalized",
    ])
    .map_err(csv_error)?;
    for r in rows {
        let mut row = vec![r.n.to_string()];
        let xi = r.xi.clone().abs();
        for v in [
            &xi, &r.side_length, &r.chord_length, &r.side_slope, &r.chord_slope, &r.intercept, &r.side_slope_residual,
            &r.intercept_residual, &r.proximity_normalized,
        ] {
            row.push(Decimal::new(v, bits).0);
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Generic table of decimal rows with a header.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::Chart;

    #[test]
    fn cusp_report_shape() {
        let t = MarkoffTriple::from_f64(128, 3.0, 3.0, 3.0).unwrap();
        let p = polygon::assemble(&t, 2, Chart::Octant).unwrap();
        let r = PolygonReport::generic(&p, 128).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["classification"], "cusp");
        assert_eq!(v["mode"], "generic");
        assert_eq!(v["edges"].as_array().unwrap().len(), 12);
        assert_eq!(v["edges"][0]["slope"], "1/0");
        assert!(v["K"].as_str().unwrap().starts_with("-2.0"));
        assert_eq!(r.to_json(), PolygonReport::generic(&p, 128).unwrap().to_json());
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 13);
    }

    #[test]
    fn degenerate_reports() {
        let y = Real::with_val(128, 2).sqrt();
        let r = PolygonReport::one_pinch(&OnePinchModel::new(y).unwrap(), 3, 128).unwrap();
        assert_eq!(r.edges.len(), 7);
        assert_eq!(r.mode, Mode::OnePinch);
        let e = PolygonReport::euclidean(3, 128).unwrap();
        assert_eq!(e.edges.len(), 24);
        assert_eq!(serde_json::to_value(&e).unwrap()["mode"], "euclidean");
    }
}
