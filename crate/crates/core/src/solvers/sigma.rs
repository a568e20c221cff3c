use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// `min_z sin(z)/z`, attained at the first positive root of `tan z = z`.
const SINC_MIN: f64 = -0.217_233_628_211_221_7;

/// Noise coefficient `sigma` with declared envelope constants
/// `l |z| <= |sigma(z)| <= L |z|`.
#[derive(Clone)]
pub struct SigmaSpec {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub l_sigma: f64,
    pub big_l_sigma: f64,
    /// `sigma(z)` has the sign of `z`
    pub sign_definite: bool,
    linear: bool,
}

impl fmt::Debug for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaSpec")
            .field("name", &self.name)
            .field("l_sigma", &self.l_sigma)
            .field("big_l_sigma", &self.big_l_sigma)
            .field("sign_definite", &self.sign_definite)
            .finish()
    }
}

impl SigmaSpec {
    /// `sigma(u) = u`.
    pub fn linear() -> Self {
        Self {
            name: "linear".into(),
            f: Arc::new(|u| u),
            l_sigma: 1.0,
            big_l_sigma: 1.0,
            sign_definite: true,
            linear: true,
        }
    }

    /// `sigma(u) = u + a sin(u)` for `0 <= a < 1/|min sinc|`.
    pub fn scaled_sin_plus_linear(a: f64) -> Result<Self> {
        let lower = 1.0 + a * SINC_MIN;
        if !(a >= 0.0 && lower > 0.0) {
            return Err(invalid(format!("sin amplitude {a} breaks the lower envelope")));
        }
        Ok(Self {
            name: format!("scaled_sin_plus_linear({a})"),
            f: Arc::new(move |u| u + a * u.sin()),
            l_sigma: lower,
            big_l_sigma: 1.0 + a,
            sign_definite: true,
            linear: a == 0.0,
        })
    }

    /// Arbitrary coefficient with caller-declared constants. Declarations
    /// are not trusted; see [`SigmaSpec::check_envelope`].
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l_sigma: f64,
        big_l_sigma: f64,
        sign_definite: bool,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            l_sigma,
            big_l_sigma,
            sign_definite,
            linear: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True for `sigma(u) = u`, where the exact sampler applies.
    pub fn is_linear(&self) -> bool {
        self.linear
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    /// Verifies `sigma(0) = 0` and the declared envelopes on a symmetric
    /// log-spaced probe set within `[-extent, extent]`.
    pub fn check_envelope(&self, extent: f64) -> Result<()> {
        let s0 = self.eval(0.0);
        if s0 != 0.0 {
            return Err(invalid(format!("sigma(0) = {s0}, expected 0")));
        }
        let probes = 2000;
        let lo = (extent * 1e-6).ln();
        let hi = extent.ln();
        for i in 0..=probes {
            let mag = (lo + (hi - lo) * i as f64 / probes as f64).exp();
            for z in [mag, -mag] {
                let ratio = (self.eval(z) / z).abs();
                let tol = 1e-12;
                if ratio < self.l_sigma - tol || ratio > self.big_l_sigma + tol {
                    return Err(invalid(format!(
                        "|sigma(z)/z| = {ratio} at z = {z} outside [{}, {}]",
                        self.l_sigma, self.big_l_sigma
                    )));
                }
                if self.sign_definite && self.eval(z) * z < 0.0 {
                    return Err(invalid(format!("sigma changes sign relative to z at {z}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn registry_envelopes_hold() {
        SigmaSpec::linear().check_envelope(1e3).unwrap();
        SigmaSpec::scaled_sin_plus_linear(0.5).unwrap().check_envelope(1e3).unwrap();
    }

    #[test]
    fn false_declaration_is_caught() {
        let s = SigmaSpec::custom("lying", |u| 2.0 * u, 1.0, 1.5, true);
        assert!(s.check_envelope(10.0).is_err());
        let s = SigmaSpec::custom("offset", |u| u + 1.0, 0.0, 10.0, false);
        assert!(s.check_envelope(10.0).is_err());
    }

    #[test]
    fn amplitude_out_of_range() {
        assert!(SigmaSpec::scaled_sin_plus_linear(5.0).is_err());
        assert!(SigmaSpec::scaled_sin_plus_linear(-0.1).is_err());
    }

    proptest! {
        #[test]
        fn sin_plus_linear_sandwich(a in 0.0f64..2.0, z in -200.0f64..200.0) {
            prop_assume!(z.abs() > 1e-9);
            let s = SigmaSpec::scaled_sin_plus_linear(a).unwrap();
            let r = (s.eval(z) / z).abs();
            prop_assert!(r >= s.l_sigma - 1e-12);
            prop_assert!(r <= s.big_l_sigma + 1e-12);
        }
    }
}
