//! Product-tree evaluation of a symmetric constraint in the frequency
//! domain, and its reverse-mode gradient.
//!
//! Leaf `i` is the transform of `[x_i, 1, 0, ..., 0]`, i.e.
//! `γ_i[j] = ω^j + x_i`. Internal nodes hold pointwise products of their
//! children, so the root holds the transform of the ESP sequence
//! `[e_k, ..., e_0]`. The value is `Re(f̃ · γ_root)`.

use num_complex::Complex64;

use super::coeffs::ConjugatedCoeffs;
use crate::error::{Error, Result};

const LEAF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    left: u32,
    right: u32,
    // Leaf: literal position. Internal: unused.
    lit: u32,
}

/// Forward-pass record consumed by [`backward_grad`].
///
/// Nodes are stored children-before-parents; the root is last.
#[derive(Debug, Clone, Default)]
pub struct EvalTrace {
    arity: usize,
    nodes: Vec<Node>,
    data: Vec<Complex64>,
    adjoint: Vec<Complex64>,
    value: f64,
    imag_residual: f64,
}

impl EvalTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn width(&self) -> usize {
        self.arity + 1
    }

    fn node_data(&self, idx: usize) -> &[Complex64] {
        let w = self.width();
        &self.data[idx * w..(idx + 1) * w]
    }

    /// Pointwise product of every leaf.
    pub fn root(&self) -> &[Complex64] {
        self.node_data(self.nodes.len() - 1)
    }

    /// Frequency-domain sequence of literal `i`.
    pub fn leaf(&self, i: usize) -> &[Complex64] {
        let idx = self.nodes.iter().position(|n| n.left == LEAF && n.lit as usize == i).expect("leaf index in range");
        self.node_data(idx)
    }

    /// Internal partial products, children before parents.
    pub fn internal_products(&self) -> impl Iterator<Item = &[Complex64]> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.left != LEAF).map(move |(i, _)| self.node_data(i))
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `|Im(f̃ · γ_root)|`, which is zero in exact arithmetic.
    pub fn imag_residual(&self) -> f64 {
        self.imag_residual
    }

    /// Whether the imaginary residual stayed under `1e-6 * (k + 1)`.
    pub fn is_healthy(&self) -> bool {
        self.imag_residual <= 1e-6 * self.width() as f64
    }

    fn build(&mut self, lo: usize, hi: usize, roots: &[Complex64], xlits: &[f64]) -> u32 {
        let w = roots.len();
        let idx = self.nodes.len();
        if hi - lo == 1 {
            let x = xlits[lo];
            self.data.extend(roots.iter().map(|r| r + x));
            self.nodes.push(Node { left: LEAF, right: LEAF, lit: lo as u32 });
            return idx as u32;
        }
        let mid = lo + (hi - lo) / 2;
        let l = self.build(lo, mid, roots, xlits) as usize;
        let r = self.build(mid, hi, roots, xlits) as usize;
        let idx = self.nodes.len();
        let start = self.data.len();
        self.data.resize(start + w, Complex64::default());
        let (head, tail) = self.data.split_at_mut(start);
        let (ld, rd) = (&head[l * w..(l + 1) * w], &head[r * w..(r + 1) * w]);
        for ((o, a), b) in tail.iter_mut().zip(ld).zip(rd) {
            *o = a * b;
        }
        self.nodes.push(Node { left: l as u32, right: r as u32, lit: 0 });
        idx as u32
    }
}

/// Evaluates one constraint at the signed literal values `xlits`.
pub fn forward_eval(cc: &ConjugatedCoeffs, xlits: &[f64]) -> Result<(f64, EvalTrace)> {
    let mut trace = EvalTrace::new();
    let v = forward_eval_into(cc, xlits, &mut trace)?;
    Ok((v, trace))
}

/// [`forward_eval`] reusing the buffers of `trace`.
pub fn forward_eval_into(cc: &ConjugatedCoeffs, xlits: &[f64], trace: &mut EvalTrace) -> Result<f64> {
    let k = cc.arity();
    if xlits.len() != k || k == 0 {
        return Err(Error::ArityMismatch { expected: k, got: xlits.len() });
    }
    trace.arity = k;
    trace.nodes.clear();
    trace.data.clear();
    trace.build(0, k, cc.roots(), xlits);

    let acc: Complex64 = cc.as_slice().iter().zip(trace.root()).map(|(f, g)| f * g).sum();
    trace.value = acc.re;
    trace.imag_residual = acc.im.abs();
    if !trace.is_healthy() {
        log::warn!("imaginary residual {:.3e} at arity {k} exceeds health threshold", trace.imag_residual);
    }
    Ok(acc.re)
}

/// Gradient with respect to the signed literal values of the forward pass.
pub fn backward_grad(trace: &EvalTrace, cc: &ConjugatedCoeffs) -> Result<Vec<f64>> {
    let mut trace = trace.clone();
    let mut grad = vec![0.0; trace.arity];
    backward_grad_into(&mut trace, cc, &mut grad)?;
    Ok(grad)
}

/// Reverse traversal of the product tree.
///
/// The root adjoint is `f̃`; a child's adjoint is its parent's adjoint times
/// the sibling's partial product. Since `∂γ_i[j]/∂x_i = 1`, the partial
/// derivative for literal `i` is the real part of the sum of its leaf
/// adjoint.
pub fn backward_grad_into(trace: &mut EvalTrace, cc: &ConjugatedCoeffs, grad: &mut [f64]) -> Result<()> {
    let k = trace.arity;
    if cc.arity() != k || trace.nodes.is_empty() {
        return Err(Error::ArityMismatch { expected: k, got: cc.arity() });
    }
    if grad.len() != k {
        return Err(Error::ArityMismatch { expected: k, got: grad.len() });
    }
    let w = k + 1;
    trace.adjoint.clear();
    trace.adjoint.resize(trace.data.len(), Complex64::default());
    let root = trace.nodes.len() - 1;
    trace.adjoint[root * w..].copy_from_slice(cc.as_slice());

    for idx in (0..trace.nodes.len()).rev() {
        let node = trace.nodes[idx];
        let (adj_before, adj_here) = trace.adjoint.split_at_mut(idx * w);
        let adj_here = &adj_here[..w];
        if node.left == LEAF {
            grad[node.lit as usize] = adj_here.iter().map(|z| z.re).sum();
            continue;
        }
        let (l, r) = (node.left as usize, node.right as usize);
        let ld = &trace.data[l * w..(l + 1) * w];
        let rd = &trace.data[r * w..(r + 1) * w];
        for j in 0..w {
            adj_before[l * w + j] = adj_here[j] * rd[j];
            adj_before[r * w + j] = adj_here[j] * ld[j];
        }
    }
    Ok(())
}
