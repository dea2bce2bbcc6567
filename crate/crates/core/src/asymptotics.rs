//! Shape of `Π` near the end of a side: the sides `E_{R_n}` and the chords
//! between them as `n → +∞`, in the `(X, Y)` chart `L = 1`.
//!
//! With `Ξ_n = e^{nℓ − x}` the sides grow like `Ξ_n²` while the chords stay
//! bounded, so the sides fill up the perimeter.

use rug::ops::Pow;
use rug::Float;

use crate::error::Result;
use crate::markoff::HalfTraceCoords;
use crate::polygon::{edge_closed_form, ChartEdge};
use crate::real::{self, Real};

/// `Ξ_n = e^{ξ_n}`; consecutive values differ by the factor `e^ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborScale(pub Real);

impl NeighborScale {
    pub fn new(c: &HalfTraceCoords, n: i64) -> Self {
        NeighborScale(c.xi(n).exp())
    }
}

fn xi_scale(c: &HalfTraceCoords, n: i64) -> Real {
    NeighborScale::new(c, n).0
}

fn diff(a: &[Real; 2], b: &[Real; 2]) -> [Real; 2] {
    let bits = a[0].prec();
    [Float::with_val(bits, &a[0] - &b[0]), Float::with_val(bits, &a[1] - &b[1])]
}

fn length(v: &[Real; 2]) -> Real {
    let bits = v[0].prec();
    (Float::with_val(bits, v[0].square_ref()) + Float::with_val(bits, v[1].square_ref())).sqrt()
}

/// The side `P_n⁻ → P_n⁺` and the chord `P_n⁺ → P_{n+1}⁻`, as `(ΔX, ΔY)`.
#[derive(Clone, Debug)]
pub struct SideChord {
    pub n: i64,
    pub side: [Real; 2],
    pub chord: [Real; 2],
    pub side_length: Real,
    pub chord_length: Real,
    /// `|P_n⁺P_n⁻| / |P_n⁺P_{n+1}⁻|`, asymptotic to `y²Ξ_n²/2`.
    pub proximity_ratio: Real,
}

pub fn side_and_chord(c: &HalfTraceCoords, n: i64) -> Result<SideChord> {
    let here = edge_closed_form(c, n)?;
    let next = edge_closed_form(c, n + 1)?;
    Ok(side_chord_of(n, &here, &next))
}

fn side_chord_of(n: i64, here: &ChartEdge, next: &ChartEdge) -> SideChord {
    let side = diff(&here.plus, &here.minus);
    let chord = diff(&next.minus, &here.plus);
    let side_length = length(&side);
    let chord_length = length(&chord);
    let proximity_ratio = Float::with_val(side_length.prec(), &side_length / &chord_length);
    SideChord { n, side, chord, side_length, chord_length, proximity_ratio }
}

fn slope_of(v: &[Real; 2]) -> Real {
    Float::with_val(v[0].prec(), &v[1] / &v[0])
}

/// `σ_n`, the slope of the side `P_n⁻P_n⁺`; equal to `y tanh ξ_n`.
pub fn side_slope(c: &HalfTraceCoords, n: i64) -> Result<Real> {
    let e = edge_closed_form(c, n)?;
    Ok(slope_of(&diff(&e.plus, &e.minus)))
}

/// `σ′_n`, the slope of the chord `P_n⁺P_{n+1}⁻`.
pub fn chord_slope(c: &HalfTraceCoords, n: i64) -> Result<Real> {
    let here = edge_closed_form(c, n)?;
    let next = edge_closed_form(c, n + 1)?;
    Ok(slope_of(&diff(&next.minus, &here.plus)))
}

/// Where the line of the side `E_{R_n}` meets the axis `Y = 0`; equal to `n`.
pub fn axis_intercept(c: &HalfTraceCoords, n: i64) -> Result<Real> {
    let e = edge_closed_form(c, n)?;
    Ok(intercept_of(&e))
}

fn intercept_of(e: &ChartEdge) -> Real {
    let bits = e.plus[0].prec();
    let ([xp, yp], [xm, ym]) = (&e.plus, &e.minus);
    let num = Float::with_val(bits, yp * xm) - Float::with_val(bits, ym * xp);
    num / Float::with_val(bits, yp - ym)
}

/// Share of the perimeter taken by the sides over the window `[N, 2N]`:
/// sides `n ∈ [N, 2N]`, chords `n ∈ [N, 2N − 1]`, Euclidean lengths.
pub fn gap_proportion(c: &HalfTraceCoords, window: i64) -> Result<Real> {
    let bits = c.bits();
    let edges = (window..=2 * window).map(|n| edge_closed_form(c, n)).collect::<Result<Vec<_>>>()?;
    let mut sides = Float::new(bits);
    let mut chords = Float::new(bits);
    for (i, e) in edges.iter().enumerate() {
        sides += length(&diff(&e.plus, &e.minus));
        if let Some(next) = edges.get(i + 1) {
            chords += length(&diff(&next.minus, &e.plus));
        }
    }
    let total = Float::with_val(bits, &sides + &chords);
    Ok(sides / total)
}

/// Factor by which the leading term must dominate before `n` counts as
/// large: `Ξ_n² ≥ factor · max(1, y²)`.
pub const LARGE_N_FACTOR: f64 = 10.0;

/// Smallest `n ≥ 0` with `Ξ_n² ≥ factor · max(1, y²)`.
pub fn large_n_threshold(c: &HalfTraceCoords, factor: f64) -> i64 {
    let bits = c.bits();
    let y2 = Float::with_val(bits, c.y.square_ref()).max(&Float::with_val(bits, 1));
    let bound = y2 * factor;
    (0..)
        .find(|&n| {
            let xi = xi_scale(c, n);
            Float::with_val(bits, xi.square_ref()) >= bound
        })
        .unwrap()
}

/// Whether `σ_n < σ′_n < σ_{n+1} < …` holds on `n ∈ [from, to]`.
pub fn interleaved_increasing(c: &HalfTraceCoords, from: i64, to: i64) -> Result<bool> {
    let mut seq = Vec::new();
    for n in from..=to {
        seq.push(side_slope(c, n)?);
        seq.push(chord_slope(c, n)?);
    }
    seq.push(side_slope(c, to + 1)?);
    Ok(seq.windows(2).all(|w| w[0] < w[1]))
}

/// The truncated expansions in `Ξ_n` of the closed-form quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// `√(cosh²ξ − y⁻²) ≈ Ξ/2 + (1 − 2y⁻²)Ξ⁻¹/2 + (2y⁻² − 2y⁻⁴)Ξ⁻³/2`
    Root,
    /// `4Y⁺/y`
    YPlus,
    /// `4Y⁻/y`
    YMinus,
    /// `4X⁺`
    XPlus,
    /// `4X⁻`
    XMinus,
    /// `(4/y)(Y⁺ − Y⁻) ≈ 2Ξ² − 4y⁻²`
    SideY,
    /// `4(X⁺ − X⁻) ≈ 2Ξ² + 4 − 4y⁻²`
    SideX,
    /// `(4/y)(Y_{n+1}⁻ − Y_n⁺)`
    ChordY,
    /// `4(X_{n+1}⁻ − X_n⁺)`
    ChordX,
    /// `σ_n ≈ y(1 − 2Ξ⁻²)`
    SideSlope,
    /// `σ′_n ≈ y(1 − (1 + e^{−2ℓ})Ξ⁻²)`
    ChordSlope,
}

impl Expansion {
    pub const ALL: [Expansion; 11] = [
        Expansion::Root,
        Expansion::YPlus,
        Expansion::YMinus,
        Expansion::XPlus,
        Expansion::XMinus,
        Expansion::SideY,
        Expansion::SideX,
        Expansion::ChordY,
        Expansion::ChordX,
        Expansion::SideSlope,
        Expansion::ChordSlope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Expansion::Root => "root",
            Expansion::YPlus => "y_plus",
            Expansion::YMinus => "y_minus",
            Expansion::XPlus => "x_plus",
            Expansion::XMinus => "x_minus",
            Expansion::SideY => "side_y",
            Expansion::SideX => "side_x",
            Expansion::ChordY => "chord_y",
            Expansion::ChordX => "chord_x",
            Expansion::SideSlope => "side_slope",
            Expansion::ChordSlope => "chord_slope",
        }
    }

    /// The first omitted power of `Ξ_n⁻¹`.
    pub fn order(self) -> i32 {
        match self {
            Expansion::Root => 5,
            Expansion::SideY | Expansion::SideX => 2,
            _ => 4,
        }
    }

    /// The quantity computed from the closed-form endpoints.
    pub fn exact(self, c: &HalfTraceCoords, n: i64) -> Result<Real> {
        let bits = c.bits();
        let e = edge_closed_form(c, n)?;
        let four_over_y = Float::with_val(bits, 4u32) / &c.y;
        let next = || edge_closed_form(c, n + 1);
        Ok(match self {
            Expansion::Root => {
                let ch = c.xi(n).cosh();
                let y_inv2 = Float::with_val(bits, c.y.square_ref()).recip();
                (Float::with_val(bits, ch.square_ref()) - y_inv2).sqrt()
            }
            Expansion::YPlus => e.plus[1].clone() * four_over_y,
            Expansion::YMinus => e.minus[1].clone() * four_over_y,
            Expansion::XPlus => e.plus[0].clone() * 4u32,
            Expansion::XMinus => e.minus[0].clone() * 4u32,
            Expansion::SideY => Float::with_val(bits, &e.plus[1] - &e.minus[1]) * four_over_y,
            Expansion::SideX => Float::with_val(bits, &e.plus[0] - &e.minus[0]) * 4u32,
            Expansion::ChordY => Float::with_val(bits, &next()?.minus[1] - &e.plus[1]) * four_over_y,
            Expansion::ChordX => Float::with_val(bits, &next()?.minus[0] - &e.plus[0]) * 4u32,
            Expansion::SideSlope => side_slope(c, n)?,
            Expansion::ChordSlope => chord_slope(c, n)?,
        })
    }

    /// The truncated expansion.
    pub fn truncated(self, c: &HalfTraceCoords, n: i64) -> Real {
        let bits = c.bits();
        let f = |v: f64| Float::with_val(bits, v);
        let xi = xi_scale(c, n);
        let xi2 = Float::with_val(bits, xi.square_ref());
        let xi_m2 = Float::with_val(bits, xi2.recip_ref());
        let yi2 = Float::with_val(bits, c.y.square_ref()).recip();
        let yi4 = Float::with_val(bits, yi2.square_ref());
        let (sh, ch) = c.ell.clone().sinh_cosh(Float::new(bits));
        let e_pos = Float::with_val(bits, c.ell.exp_ref());
        let e_neg = Float::with_val(bits, e_pos.recip_ref());
        let coth = Float::with_val(bits, &ch / &sh);
        let ep_sh = Float::with_val(bits, &e_pos / &sh);
        let en_sh = Float::with_val(bits, &e_neg / &sh);
        let four_n = f(4.0 * n as f64);
        let one_e2 = Float::with_val(bits, e_neg.square_ref()) + 1u32;
        match self {
            Expansion::Root => {
                let a = Float::with_val(bits, &xi / 2u32);
                let b = (f(1.0) - Float::with_val(bits, &yi2 * 2u32)) / &xi / 2u32;
                let c3 = (Float::with_val(bits, &yi2 * 2u32) - Float::with_val(bits, &yi4 * 2u32))
                    / Float::with_val(bits, &xi2 * &xi)
                    / 2u32;
                a + b + c3
            }
            Expansion::YPlus => {
                let k0 = Float::with_val(bits, &coth * 2u32) + Float::with_val(bits, &yi2 * 2u32);
                let k2 = Float::with_val(bits, &en_sh + Float::with_val(bits, &yi2 * 4u32)) - Float::with_val(bits, &yi4 * 2u32);
                Float::with_val(bits, &ep_sh * &xi2) - k0 + k2 * &xi_m2
            }
            Expansion::YMinus => {
                let k0 = Float::with_val(bits, &coth * 2u32) - Float::with_val(bits, &yi2 * 2u32);
                let k2 = Float::with_val(bits, &ep_sh - Float::with_val(bits, &yi2 * 4u32)) + Float::with_val(bits, &yi4 * 2u32);
                Float::with_val(bits, &en_sh * &xi2) - k0 + k2 * &xi_m2
            }
            Expansion::XPlus => {
                let k0 = f(2.0) - Float::with_val(bits, &yi2 * 2u32);
                let k2 = Float::with_val(bits, -&en_sh) - Float::with_val(bits, &yi4 * 2u32);
                Float::with_val(bits, &ep_sh * &xi2) + k0 + k2 * &xi_m2 + four_n
            }
            Expansion::XMinus => {
                let k0 = f(2.0) - Float::with_val(bits, &yi2 * 2u32);
                let k2 = Float::with_val(bits, -&ep_sh) + Float::with_val(bits, &yi4 * 2u32);
                Float::with_val(bits, &en_sh * &xi2) - k0 + k2 * &xi_m2 + four_n
            }
            Expansion::SideY => Float::with_val(bits, &xi2 * 2u32) - Float::with_val(bits, &yi2 * 4u32),
            Expansion::SideX => Float::with_val(bits, &xi2 * 2u32) + 4u32 - Float::with_val(bits, &yi2 * 4u32),
            Expansion::ChordY => {
                let k2 = (Float::with_val(bits, &yi2 * 4u32) - Float::with_val(bits, &yi4 * 2u32)) * &one_e2;
                Float::with_val(bits, &yi2 * 4u32) - k2 * &xi_m2
            }
            Expansion::ChordX => {
                let k2 = Float::with_val(bits, &yi4 * 2u32) * &one_e2;
                Float::with_val(bits, &yi2 * 4u32) + k2 * &xi_m2
            }
            Expansion::SideSlope => (f(1.0) - Float::with_val(bits, &xi_m2 * 2u32)) * &c.y,
            Expansion::ChordSlope => (f(1.0) - one_e2 * &xi_m2) * &c.y,
        }
    }

    /// `(exact − truncated) · Ξ_n^k`.
    pub fn scaled_residual(self, c: &HalfTraceCoords, n: i64) -> Result<Real> {
        let residual = self.exact(c, n)? - self.truncated(c, n);
        Ok(residual * xi_scale(c, n).pow(self.order()))
    }
}

/// Scaled residuals of one expansion over a range of `n`.
#[derive(Clone, Debug)]
pub struct ExpansionCheck {
    pub expansion: Expansion,
    pub scaled: Vec<(i64, Real)>,
    /// `max |s_n| ≤ 100 · max(1, |s_last|)` and the last two values agree to
    /// `1%` of `max(1, |s_last|)`: the scaled residual settles to a constant
    /// instead of growing.
    pub bounded: bool,
}

pub fn check_expansion(c: &HalfTraceCoords, expansion: Expansion, from: i64, to: i64) -> Result<ExpansionCheck> {
    let scaled = (from..=to).map(|n| Ok((n, expansion.scaled_residual(c, n)?))).collect::<Result<Vec<_>>>()?;
    let bits = c.bits();
    let abs = |x: &Real| Float::with_val(bits, x.abs_ref());
    let last = abs(&scaled.last().unwrap().1).max(&Float::with_val(bits, 1));
    let max = real::max_real(scaled.iter().map(|(_, s)| abs(s)), bits);
    let stationary = match scaled.len() {
        0 | 1 => true,
        k => abs(&Float::with_val(bits, &scaled[k - 1].1 - &scaled[k - 2].1)) <= Float::with_val(bits, &last / 100u32),
    };
    let bounded = max <= Float::with_val(bits, &last * 100u32) && stationary;
    Ok(ExpansionCheck { expansion, scaled, bounded })
}

/// Precision at which truncation error, not rounding, dominates the scaled
/// residuals up to `n_max`.
pub fn expansion_bits(c: &HalfTraceCoords, n_max: i64) -> u32 {
    let log2_xi = (c.xi(n_max).to_f64().max(0.0) / std::f64::consts::LN_2).ceil() as u32;
    (128 + 8 * log2_xi).max(512)
}

/// One line of the asymptotic report.
#[derive(Clone, Debug)]
pub struct AsymptoticRow {
    pub n: i64,
    pub xi: Real,
    pub side_length: Real,
    pub chord_length: Real,
    pub side_slope: Real,
    pub chord_slope: Real,
    pub intercept: Real,
    /// `σ_n − y tanh ξ_n`
    pub side_slope_residual: Real,
    /// `axis_intercept − n`
    pub intercept_residual: Real,
    /// `proximity_ratio / (y²Ξ_n²/2)`
    pub proximity_normalized: Real,
}

pub fn report_rows(c: &HalfTraceCoords, from: i64, to: i64) -> Result<Vec<AsymptoticRow>> {
    let bits = c.bits();
    (from..=to)
        .map(|n| {
            let sc = side_and_chord(c, n)?;
            let here = edge_closed_form(c, n)?;
            let xi = xi_scale(c, n);
            let side_slope = slope_of(&sc.side);
            let chord_slope = slope_of(&sc.chord);
            let intercept = intercept_of(&here);
            let exact_slope = c.xi(n).tanh() * &c.y;
            let predicted = Float::with_val(bits, c.y.square_ref()) * Float::with_val(bits, xi.square_ref()) / 2u32;
            Ok(AsymptoticRow {
                n,
                side_slope_residual: Float::with_val(bits, &side_slope - &exact_slope),
                intercept_residual: Float::with_val(bits, &intercept - n),
                proximity_normalized: Float::with_val(bits, &sc.proximity_ratio / &predicted),
                xi,
                side_length: sc.side_length,
                chord_length: sc.chord_length,
                side_slope,
                chord_slope,
                intercept,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(bits: u32) -> HalfTraceCoords {
        HalfTraceCoords::from_f64(bits, 1.0, 0.3, 1.5).unwrap()
    }

    #[test]
    fn scale_is_geometric() {
        let c = coords(256);
        let r = xi_scale(&c, 5) / xi_scale(&c, 4);
        assert!((r - c.ell.clone().exp()).abs() < 1e-70);
    }

    #[test]
    fn axis_intercept_examples() {
        let c = coords(256);
        for n in [7, 0, -12] {
            let v = axis_intercept(&c, n).unwrap();
            assert!((v - n).abs() < 1e-25, "{n}");
        }
    }

    #[test]
    fn side_slope_is_y_tanh_xi() {
        let c = coords(256);
        for n in -6..=9 {
            let s = side_slope(&c, n).unwrap();
            let want = c.xi(n).tanh() * &c.y;
            assert!((s - want).abs() < 1e-25, "{n}");
        }
        assert!((side_slope(&c, 40).unwrap() - &c.y).abs() < 1e-30);
    }

    #[test]
    fn proximity_ratio_matches_prediction() {
        let c = coords(256);
        let rows = report_rows(&c, 10, 10).unwrap();
        let r = rows[0].proximity_normalized.to_f64();
        assert!((0.9..=1.1).contains(&r), "{r}");
    }

    #[test]
    fn chord_x_tends_to_y_inverse_square() {
        let c = coords(512);
        let v = Expansion::ChordX.exact(&c, 20).unwrap() / 4u32;
        let want = Float::with_val(512, c.y.square_ref()).recip();
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn expansions_have_their_orders() {
        let c = coords(expansion_bits(&coords(64), 20));
        for e in Expansion::ALL {
            let check = check_expansion(&c, e, 5, 20).unwrap();
            assert!(check.bounded, "{}: {:?}", e.name(), check.scaled.iter().map(|(n, s)| (*n, s.to_f64())).collect::<Vec<_>>());
        }
    }

    #[test]
    fn wrong_order_is_not_bounded() {
        // Multiplying by one more power of Ξ makes the residual grow.
        let c = coords(expansion_bits(&coords(64), 20));
        let scaled: Vec<f64> = (5..=20)
            .map(|n| (Expansion::SideY.scaled_residual(&c, n).unwrap() * xi_scale(&c, n)).to_f64().abs())
            .collect();
        assert!(scaled.last().unwrap() > &(100.0 * scaled[0]));
    }

    #[test]
    fn interleaved_slopes_increase() {
        let c = coords(256);
        let n0 = large_n_threshold(&c, LARGE_N_FACTOR);
        assert!(interleaved_increasing(&c, n0, n0 + 20).unwrap());
    }

    #[test]
    fn gap_proportion_grows() {
        let c = coords(512);
        let p6 = gap_proportion(&c, 6).unwrap();
        let p12 = gap_proportion(&c, 12).unwrap();
        assert!(p12 > p6);
        assert!(p6 > 0.99);
        assert!(p12 <= 1);
    }
}
