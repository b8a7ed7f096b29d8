//! Transform-free reference routes used to cross-check the product tree.

use super::coeffs::WalshCoeffs;
use crate::error::{Error, Result};

/// Largest arity accepted by [`explicit_grad_oracle`].
pub const EXPLICIT_ORACLE_MAX_ARITY: usize = 64;

/// `[e_k, ..., e_0]` as the linear convolution `[x_1, 1] * ... * [x_k, 1]`.
pub fn esp(xlits: &[f64]) -> Vec<f64> {
    let mut seq = Vec::with_capacity(xlits.len() + 1);
    seq.push(1.0);
    for &x in xlits {
        seq.push(0.0);
        for m in (0..seq.len()).rev() {
            let above = if m > 0 { seq[m - 1] } else { 0.0 };
            seq[m] = seq[m] * x + above;
        }
    }
    seq
}

/// Value and gradient from the explicit ESP form, in real arithmetic.
///
/// `∂e_j/∂x_i = e_{j-1}(x without x_i)`, so the partial derivative for
/// literal `i` is the coefficient vector without its constant term dotted
/// with the ESPs of the other `k - 1` literals.
pub fn explicit_grad_oracle(wc: &WalshCoeffs, xlits: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = wc.arity();
    if xlits.len() != k {
        return Err(Error::ArityMismatch { expected: k, got: xlits.len() });
    }
    if k > EXPLICIT_ORACLE_MAX_ARITY {
        return Err(Error::InvalidParameter(format!(
            "explicit oracle limited to arity {EXPLICIT_ORACLE_MAX_ARITY}, got {k}"
        )));
    }
    let coeffs = wc.as_slice();
    let value = coeffs.iter().zip(esp(xlits)).map(|(c, e)| c * e).sum();
    let mut rest = Vec::with_capacity(k.saturating_sub(1));
    let grad = (0..k)
        .map(|i| {
            rest.clear();
            rest.extend(xlits.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
            coeffs[..k].iter().zip(esp(&rest)).map(|(c, e)| c * e).sum()
        })
        .collect();
    Ok((value, grad))
}

/// Central differences, with probes clamped to `[-1, 1]`.
pub fn finite_diff_grad<F>(mut eval: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let hi = (x[i] + h).min(1.0);
            let lo = (x[i] - h).max(-1.0);
            probe[i] = hi;
            let fh = eval(&probe);
            probe[i] = lo;
            let fl = eval(&probe);
            probe[i] = x[i];
            (fh - fl) / (hi - lo)
        })
        .collect()
}
