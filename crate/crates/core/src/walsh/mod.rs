//! Walsh expansions of symmetric constraints: coefficients, product-tree
//! evaluation with reverse-mode gradients, closed-form fast paths and
//! reference oracles.

pub mod coeffs;
pub mod fast;
pub mod oracle;
pub mod tree;

pub use coeffs::{
    conjugate_coeffs, symmetric_walsh_coeffs, symmetric_walsh_coeffs_exact, CoeffCache, ConjugatedCoeffs, Shape,
    ShapeKey, WalshCoeffs,
};
pub use fast::{xor_fast_eval, xor_fast_eval_grad};
pub use oracle::{esp, explicit_grad_oracle, finite_diff_grad};
pub use tree::{backward_grad, forward_eval, forward_eval_into, EvalTrace};
