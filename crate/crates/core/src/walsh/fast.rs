//! Closed forms that bypass the transform.
//!
//! XOR has a single nonzero Walsh coefficient, so its expansion collapses
//! to `±Π x_i`. A short OR clause is `2 Π (1 + x_i)/2 - 1`.

/// Prefix/suffix products: `out[i] = Π_{j≠i} factor(j)`; returns the full product.
fn leave_one_out_products(factor: impl Fn(usize) -> f64, out: &mut [f64]) -> f64 {
    let mut acc = 1.0;
    for (i, o) in out.iter_mut().enumerate() {
        *o = acc;
        acc *= factor(i);
    }
    let mut suffix = 1.0;
    for (i, o) in out.iter_mut().enumerate().rev() {
        *o *= suffix;
        suffix *= factor(i);
    }
    acc
}

/// Value and gradient of an XOR constraint in O(k).
pub fn xor_fast_eval_grad(xlits: &[f64], odd: bool) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; xlits.len()];
    let v = xor_fast_eval_grad_into(xlits, odd, &mut grad);
    (v, grad)
}

pub fn xor_fast_eval_grad_into(xlits: &[f64], odd: bool, grad: &mut [f64]) -> f64 {
    let sign = if odd { 1.0 } else { -1.0 };
    let prod = leave_one_out_products(|i| xlits[i], grad);
    if !odd {
        grad.iter_mut().for_each(|g| *g = -*g);
    }
    sign * prod
}

pub fn xor_fast_eval(xlits: &[f64], odd: bool) -> f64 {
    let prod: f64 = xlits.iter().product();
    if odd {
        prod
    } else {
        -prod
    }
}

/// Value and gradient of an OR clause via `2 Π (1 + x_i)/2 - 1`.
pub fn or_fast_eval_grad_into(xlits: &[f64], grad: &mut [f64]) -> f64 {
    let prod = leave_one_out_products(|i| 0.5 * (1.0 + xlits[i]), grad);
    // d/dx_i of 2 Π (1 + x_j)/2 is Π_{j≠i} (1 + x_j)/2.
    2.0 * prod - 1.0
}

pub fn or_fast_eval(xlits: &[f64]) -> f64 {
    2.0 * xlits.iter().map(|x| 0.5 * (1.0 + x)).product::<f64>() - 1.0
}
