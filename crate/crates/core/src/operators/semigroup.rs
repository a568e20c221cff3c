use super::EigenDecomposition;
use crate::error::{invalid, Result};

/// Discrete heat semigroup `exp(t * Delta_h) u0`, evaluated spectrally.
pub fn heat_apply(decomp: &EigenDecomposition, t: f64, u0: &[f64]) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(invalid(format!("heat semigroup needs t >= 0, got {t}")));
    }
    check_len(decomp, u0)?;
    let c = decomp.coefficients(u0);
    Ok(decomp.synthesize(&c, |mu| (-mu * t).exp()))
}

/// `exp(-t (-Delta_h)^{alpha/2}) u0`: spectral fractional power of the
/// discrete Dirichlet Laplacian.
pub fn fractional_semigroup_apply(
    decomp: &EigenDecomposition,
    alpha: f64,
    t: f64,
    u0: &[f64],
) -> Result<Vec<f64>> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(invalid(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    if !(t >= 0.0) {
        return Err(invalid(format!("semigroup needs t >= 0, got {t}")));
    }
    check_len(decomp, u0)?;
    let c = decomp.coefficients(u0);
    let half = 0.5 * alpha;
    Ok(decomp.synthesize(&c, |mu| (-mu.powf(half) * t).exp()))
}

fn check_len(decomp: &EigenDecomposition, u0: &[f64]) -> Result<()> {
    if u0.len() != decomp.len() {
        return Err(invalid(format!(
            "grid function has {} nodes, decomposition has {}",
            u0.len(),
            decomp.len()
        )));
    }
    Ok(())
}
