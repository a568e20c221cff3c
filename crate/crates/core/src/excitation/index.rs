//! Finite-lambda proxies for the lower and upper excitation indices.

use std::ops::Range;

use crate::error::{invalid, Error, Result};

/// Number of trailing slopes used when no window is given.
pub const DEFAULT_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    pub lambda: f64,
    /// `log E`, where `E` is the energy at this lambda
    pub log_energy: f64,
    /// standard error of `log E`
    pub log_stderr: f64,
    pub samples: usize,
}

impl EnergyPoint {
    pub fn energy(&self) -> f64 {
        self.log_energy.exp()
    }

    pub fn stderr(&self) -> f64 {
        self.energy() * self.log_stderr
    }
}

/// Energy estimates over a strictly ascending lambda grid at fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    pub t: f64,
    pub p: f64,
    points: Vec<EnergyPoint>,
}

impl EnergyCurve {
    pub fn new(t: f64, p: f64, points: Vec<EnergyPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("energy curve needs at least one point"));
        }
        for w in points.windows(2) {
            if !(w[1].lambda > w[0].lambda) {
                return Err(invalid("lambda grid must be strictly ascending"));
            }
        }
        for pt in &points {
            if !(pt.lambda > 0.0) || pt.log_energy.is_nan() || !(pt.log_stderr >= 0.0) {
                return Err(invalid(format!("invalid energy point at lambda = {}", pt.lambda)));
            }
        }
        Ok(Self { t, p, points })
    }

    pub fn points(&self) -> &[EnergyPoint] {
        &self.points
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEstimate {
    /// all consecutive slopes of `log log E` against `log lambda`
    pub slopes: Vec<f64>,
    /// slope indices used for the proxies
    pub window: Range<usize>,
    pub lower: f64,
    pub upper: f64,
}

impl IndexEstimate {
    pub fn windowed(&self) -> &[f64] {
        &self.slopes[self.window.clone()]
    }

    pub fn is_increasing(&self) -> bool {
        self.slopes.windows(2).all(|w| w[1] > w[0])
    }
}

/// Consecutive double-log slopes and their min/max over `window` (slope
/// indices; defaults to the last [`DEFAULT_WINDOW`]).
pub fn index_fit(curve: &EnergyCurve, window: Option<Range<usize>>) -> Result<IndexEstimate> {
    let pts = curve.points();
    if pts.len() < 2 {
        return Err(invalid("index fit needs at least two lambda values"));
    }
    let n = pts.len() - 1;
    let window = window.unwrap_or(n.saturating_sub(DEFAULT_WINDOW)..n);
    if window.is_empty() || window.end > n {
        return Err(invalid(format!("fit window {window:?} outside 0..{n}")));
    }
    let needed = window.start..window.end + 1;
    for pt in &pts[needed] {
        if !(pt.log_energy > 1.0) {
            return Err(Error::EnergyTooSmall { lambda: pt.lambda, energy: pt.energy() });
        }
    }
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| {
            if w[0].log_energy > 1.0 && w[1].log_energy > 1.0 {
                (w[1].log_energy.ln() - w[0].log_energy.ln()) / (w[1].lambda.ln() - w[0].lambda.ln())
            } else {
                f64::NAN
            }
        })
        .collect();
    let sel = &slopes[window.clone()];
    let lower = sel.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = sel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(IndexEstimate { slopes, window, lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(c: f64, q: f64, lambdas: &[f64]) -> EnergyCurve {
        let pts = lambdas
            .iter()
            .map(|&l| EnergyPoint { lambda: l, log_energy: c * l.powf(q), log_stderr: 0.0, samples: 0 })
            .collect();
        EnergyCurve::new(0.5, 2.0, pts).unwrap()
    }

    #[test]
    fn power_law_exponent_recovered() {
        let est = index_fit(&synthetic(1.0, 2.0, &[4.0, 8.0, 16.0, 32.0]), None).unwrap();
        assert_eq!(est.slopes.len(), 3);
        for s in &est.slopes {
            assert!((s - 2.0).abs() < 1e-12);
        }
        let est = index_fit(&synthetic(1.0, 4.0, &[2.0, 3.0, 5.0]), None).unwrap();
        assert!((est.lower - 4.0).abs() < 1e-12 && (est.upper - 4.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn any_scale_any_exponent(c in 0.5f64..20.0, q in 0.3f64..6.0) {
            let est = index_fit(&synthetic(c, q, &[2.0, 4.0, 8.0, 16.0]), None).unwrap();
            for s in &est.slopes {
                prop_assert!((s - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn default_window_is_top_three() {
        let est = index_fit(&synthetic(1.0, 2.0, &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0]), None).unwrap();
        assert_eq!(est.window, 2..5);
        let est = index_fit(&synthetic(1.0, 2.0, &[2.0, 4.0, 8.0]), None).unwrap();
        assert_eq!(est.window, 0..2);
    }

    #[test]
    fn small_energy_rejected() {
        let curve = synthetic(0.1, 2.0, &[1.0, 2.0, 4.0, 8.0]);
        let err = index_fit(&curve, Some(0..3)).unwrap_err();
        assert!(err.to_string().contains("lambda grid too small"));
        // the window can skip the low end
        assert!(index_fit(&curve, Some(2..3)).is_ok());
    }

    #[test]
    fn curve_validation() {
        let pt = |l: f64| EnergyPoint { lambda: l, log_energy: 2.0, log_stderr: 0.0, samples: 0 };
        assert!(EnergyCurve::new(1.0, 2.0, vec![pt(2.0), pt(2.0)]).is_err());
        assert!(EnergyCurve::new(1.0, 2.0, vec![pt(4.0), pt(2.0)]).is_err());
        assert!(EnergyCurve::new(1.0, 2.0, vec![]).is_err());
        let c = EnergyCurve::new(1.0, 2.0, vec![pt(1.0)]).unwrap();
        assert!(index_fit(&c, None).is_err());
    }
}
