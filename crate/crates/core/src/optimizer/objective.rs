use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{ConstraintKind, Formula};
use crate::walsh::coeffs::{CoeffCache, Shape, ShapeKey};
use crate::walsh::fast::{or_fast_eval, or_fast_eval_grad_into, xor_fast_eval, xor_fast_eval_grad_into};
use crate::walsh::tree::{backward_grad_into, forward_eval_into, EvalTrace};

/// OR clauses up to this arity use the closed-form product.
pub const OR_FAST_PATH_MAX_ARITY: usize = 2;

#[derive(Debug, Clone)]
enum TermEval {
    Xor { odd: bool },
    ShortOr,
    General(Arc<Shape>),
}

#[derive(Debug, Clone)]
struct Term {
    vars: Vec<usize>,
    signs: Vec<f64>,
    eval: TermEval,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    xlits: Vec<f64>,
    glits: Vec<f64>,
    trace: EvalTrace,
}

/// The weighted sum `F(x) = Σ_c w_c · WE_c(x)` over a formula's constraints.
///
/// Evaluation methods take `&mut self` only to reuse scratch buffers; each
/// search worker owns its own clone.
#[derive(Debug, Clone)]
pub struct Objective {
    n_vars: usize,
    terms: Arc<[Term]>,
    weights: Vec<f64>,
    scratch: Scratch,
}

impl Objective {
    /// Objective with the formula's static weights, coefficients drawn from
    /// the process-wide cache.
    pub fn new(f: &Formula) -> Self {
        Self::with_cache(f, CoeffCache::global())
    }

    pub fn with_cache(f: &Formula, cache: &CoeffCache) -> Self {
        let terms: Vec<Term> = f
            .constraints()
            .iter()
            .map(|c| {
                let eval = match c.kind() {
                    ConstraintKind::Xor { odd } => TermEval::Xor { odd },
                    ConstraintKind::Or if c.arity() <= OR_FAST_PATH_MAX_ARITY => TermEval::ShortOr,
                    kind => TermEval::General(cache.get(ShapeKey::new(kind, c.arity()))),
                };
                Term {
                    vars: c.lits().iter().map(|l| l.index()).collect(),
                    signs: c.lits().iter().map(|l| l.sign()).collect(),
                    eval,
                }
            })
            .collect();
        Objective {
            n_vars: f.n_vars(),
            terms: terms.into(),
            weights: f.constraints().iter().map(|c| c.weight()).collect(),
            scratch: Scratch::default(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.terms.len() {
            return Err(Error::ArityMismatch { expected: self.terms.len(), got: weights.len() });
        }
        self.weights.clear();
        self.weights.extend_from_slice(weights);
        Ok(())
    }

    /// `Σ |w_c|`, the largest possible `|F|` on the box.
    pub fn weight_bound(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_vars {
            return Err(Error::ArityMismatch { expected: self.n_vars, got: x.len() });
        }
        Ok(())
    }

    pub fn value(&mut self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let Scratch { xlits, trace, .. } = &mut self.scratch;
        let mut total = 0.0;
        for (term, &w) in self.terms.iter().zip(&self.weights) {
            xlits.clear();
            xlits.extend(term.vars.iter().zip(&term.signs).map(|(&v, &s)| s * x[v]));
            let we = match &term.eval {
                TermEval::Xor { odd } => xor_fast_eval(xlits, *odd),
                TermEval::ShortOr => or_fast_eval(xlits),
                TermEval::General(shape) => forward_eval_into(&shape.conjugated, xlits, trace)?,
            };
            total += w * we;
        }
        Ok(total)
    }

    /// Writes `∇F(x)` into `grad` and returns `F(x)`.
    pub fn value_grad(&mut self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        self.check_len(x)?;
        if grad.len() != self.n_vars {
            return Err(Error::ArityMismatch { expected: self.n_vars, got: grad.len() });
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        let Scratch { xlits, glits, trace } = &mut self.scratch;
        let mut total = 0.0;
        for (term, &w) in self.terms.iter().zip(&self.weights) {
            xlits.clear();
            xlits.extend(term.vars.iter().zip(&term.signs).map(|(&v, &s)| s * x[v]));
            glits.clear();
            glits.resize(xlits.len(), 0.0);
            let we = match &term.eval {
                TermEval::Xor { odd } => xor_fast_eval_grad_into(xlits, *odd, glits),
                TermEval::ShortOr => or_fast_eval_grad_into(xlits, glits),
                TermEval::General(shape) => {
                    let v = forward_eval_into(&shape.conjugated, xlits, trace)?;
                    backward_grad_into(trace, &shape.conjugated, glits)?;
                    v
                }
            };
            total += w * we;
            // Negated literals flip the sign of their partial derivative.
            for ((&v, &s), &g) in term.vars.iter().zip(&term.signs).zip(glits.iter()) {
                grad[v] += w * s * g;
            }
        }
        Ok(total)
    }

    pub fn eval_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; self.n_vars];
        let v = self.value_grad(x, &mut grad)?;
        Ok((v, grad))
    }
}

pub fn objective_eval_grad(obj: &mut Objective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    obj.eval_grad(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Constraint, Literal};

    fn chain() -> Formula {
        let xor = |a, b| Constraint::xor(vec![Literal::pos(a), Literal::pos(b)], true).unwrap();
        Formula::new(4, vec![xor(1, 2), xor(2, 3), xor(3, 4)]).unwrap()
    }

    fn saddle() -> Formula {
        Formula::new(
            2,
            vec![
                Constraint::or(vec![Literal::pos(1), Literal::neg(2)]).unwrap(),
                Constraint::xor(vec![Literal::neg(1), Literal::pos(2)], true).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reweighted_xor_chain_gradient() {
        let mut obj = Objective::new(&chain());
        obj.set_weights(&[0.6, 1.0, 0.6]).unwrap();
        let (_, g) = obj.eval_grad(&[1.0, -1.0, -1.0, 1.0]).unwrap();
        let want = [-0.6, -0.4, -0.4, -0.6];
        for (a, b) in g.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn saddle_has_zero_gradient() {
        let mut obj = Objective::new(&saddle());
        let x = [-1.0 / 3.0, 1.0 / 3.0];
        let (v, g) = obj.eval_grad(&x).unwrap();
        // F = -1/2 + x1/2 - x2/2 - 3 x1 x2 / 2
        let f = -0.5 + x[0] / 2.0 - x[1] / 2.0 - 1.5 * x[0] * x[1];
        assert!((v - f).abs() < 1e-15);
        assert!(g.iter().all(|g| g.abs() < 1e-15), "{g:?}");
    }

    #[test]
    fn reweighted_saddle_gradient_signs() {
        let mut obj = Objective::new(&saddle());
        obj.set_weights(&[0.6, 1.0]).unwrap();
        let (_, g) = obj.eval_grad(&[-1.0 / 3.0, 1.0 / 3.0]).unwrap();
        // F' = -3/10 + 3x1/10 - 3x2/10 - 13x1x2/10
        assert!((g[0] + 2.0 / 15.0).abs() < 1e-12 && (g[1] - 2.0 / 15.0).abs() < 1e-12);
        assert!(g[0] < 0.0 && g[1] > 0.0);
    }

    #[test]
    fn empty_formula() {
        let mut obj = Objective::new(&Formula::new(3, vec![]).unwrap());
        assert_eq!(obj.eval_grad(&[0.1, 0.2, 0.3]).unwrap(), (0.0, vec![0.0; 3]));
    }

    #[test]
    fn value_only_matches_value_grad() {
        let f = Formula::new(
            5,
            vec![
                Constraint::card_ge(2, vec![Literal::pos(1), Literal::neg(3), Literal::pos(5)]).unwrap(),
                Constraint::or(vec![Literal::neg(2), Literal::pos(4), Literal::pos(1)]).unwrap(),
                Constraint::or(vec![Literal::neg(2), Literal::pos(4)]).unwrap(),
                Constraint::xor(vec![Literal::neg(5), Literal::pos(4)], false).unwrap(),
            ],
        )
        .unwrap();
        let mut obj = Objective::new(&f);
        let x = [0.3, -0.2, 0.9, -1.0, 0.05];
        let v = obj.value(&x).unwrap();
        let (vg, _) = obj.eval_grad(&x).unwrap();
        assert_eq!(v.to_bits(), vg.to_bits());
    }

    #[test]
    fn rejects_wrong_lengths() {
        let mut obj = Objective::new(&chain());
        assert!(obj.value(&[0.0; 3]).is_err());
        assert!(obj.set_weights(&[1.0]).is_err());
    }
}
