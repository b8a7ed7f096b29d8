use super::objective::Objective;
use crate::error::{Error, Result};

/// Step-size and iteration limits for the inner descent and the outer
/// restart loop.
#[derive(Debug, Clone, PartialEq)]
pub struct PgdConfig {
    pub eta0: f64,
    pub eta_min: f64,
    pub armijo_c1: f64,
    pub max_inner_iters: usize,
    pub max_restarts: u64,
}

impl Default for PgdConfig {
    fn default() -> Self {
        PgdConfig { eta0: 1.0, eta_min: 1e-12, armijo_c1: 1e-4, max_inner_iters: 500, max_restarts: 1000 }
    }
}

impl PgdConfig {
    /// Checks the step sizes and the Armijo constant. `eta_min >= eta0` is
    /// accepted: the descent then stops at its first rejected step.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return Err(Error::InvalidParameter(format!("eta0 {} must be positive", self.eta0)));
        }
        if !(self.eta_min.is_finite() && self.eta_min > 0.0) {
            return Err(Error::InvalidParameter(format!("eta_min {} must be positive", self.eta_min)));
        }
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 1.0) {
            return Err(Error::InvalidParameter(format!("armijo_c1 {} outside (0, 1)", self.armijo_c1)));
        }
        Ok(())
    }
}

/// Coordinate-wise clamp to `[-1, 1]`.
pub fn project(x: &[f64]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    project_in_place(&mut out)?;
    Ok(out)
}

pub fn project_in_place(x: &mut [f64]) -> Result<()> {
    for (i, v) in x.iter_mut().enumerate() {
        if v.is_nan() {
            return Err(Error::NonFinite(i));
        }
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgdResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Accepted steps.
    pub steps: usize,
}

/// Projected gradient descent with monotone Armijo backtracking.
pub fn pgd(obj: &mut Objective, x0: &[f64], cfg: &PgdConfig) -> Result<PgdResult> {
    pgd_observed(obj, x0, cfg, |_, _| {})
}

/// [`pgd`], calling `observe` on the start point and every accepted iterate.
///
/// A trial `p = clip(x - η g)` is accepted when
/// `F(p) <= F(x) + c1 <g, p - x>` (the usual `-c1 η |g|²` bound whenever no
/// coordinate is clipped) and the decrease exceeds the rounding noise of `F`,
/// so a stationary point never drifts. Rejection halves `η`; acceptance
/// doubles it up to `eta0`. The descent stops when `η < eta_min`, when the
/// projected step is null, or after `max_inner_iters` accepted steps.
pub fn pgd_observed<O>(obj: &mut Objective, x0: &[f64], cfg: &PgdConfig, mut observe: O) -> Result<PgdResult>
where
    O: FnMut(&[f64], f64),
{
    let n = obj.n_vars();
    let mut x = project(x0)?;
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut f = obj.value_grad(&x, &mut grad)?;
    observe(&x, f);
    let mut eta = cfg.eta0;
    let mut steps = 0;
    // Decreases below this are indistinguishable from summation error.
    let noise = 8.0 * f64::EPSILON * obj.weight_bound().max(1.0);

    'outer: while steps < cfg.max_inner_iters {
        loop {
            let mut slope = 0.0;
            let mut moved = false;
            for i in 0..n {
                let t = (x[i] - eta * grad[i]).clamp(-1.0, 1.0);
                trial[i] = t;
                slope += grad[i] * (t - x[i]);
                moved |= t != x[i];
            }
            if !moved {
                break 'outer;
            }
            let ft = obj.value(&trial)?;
            if f - ft > noise && ft <= f + cfg.armijo_c1 * slope {
                break;
            }
            eta *= 0.5;
            if eta < cfg.eta_min {
                break 'outer;
            }
        }
        std::mem::swap(&mut x, &mut trial);
        f = obj.value_grad(&x, &mut grad)?;
        steps += 1;
        observe(&x, f);
        eta = (2.0 * eta).min(cfg.eta0);
    }
    Ok(PgdResult { x, value: f, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Constraint, Formula, Literal};

    #[test]
    fn projection() {
        assert_eq!(project(&[1.5, -2.0, 0.3]).unwrap(), vec![1.0, -1.0, 0.3]);
        let inside = [0.9, -0.1, -1.0, 1.0];
        assert_eq!(project(&inside).unwrap(), inside.to_vec());
        assert_eq!(project(&[0.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert_eq!(project(&[f64::INFINITY]).unwrap(), vec![1.0]);
    }

    #[test]
    fn config_validation() {
        assert!(PgdConfig::default().validate().is_ok());
        let bad = PgdConfig { armijo_c1: 1.0, ..PgdConfig::default() };
        assert!(bad.validate().is_err());
        let bad = PgdConfig { eta0: 0.0, ..PgdConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_clause_reaches_satisfying_corner() {
        let f = Formula::new(3, vec![Constraint::or((1..=3).map(Literal::pos).collect()).unwrap()]).unwrap();
        let mut obj = Objective::new(&f);
        let res = pgd(&mut obj, &[0.2, -0.4, 0.7], &PgdConfig { max_inner_iters: 200, ..Default::default() }).unwrap();
        assert!((res.value + 1.0).abs() < 1e-12, "{res:?}");
        assert!(res.steps <= 200);
    }

    #[test]
    fn zero_gradient_start_is_fixed() {
        let f = Formula::new(
            2,
            vec![
                Constraint::or(vec![Literal::pos(1), Literal::neg(2)]).unwrap(),
                Constraint::xor(vec![Literal::neg(1), Literal::pos(2)], true).unwrap(),
            ],
        )
        .unwrap();
        let mut obj = Objective::new(&f);
        let x0 = [-1.0 / 3.0, 1.0 / 3.0];
        let res = pgd(&mut obj, &x0, &PgdConfig::default()).unwrap();
        assert_eq!(res.x, x0.to_vec());
        assert_eq!(res.steps, 0);
    }

    #[test]
    fn degenerate_step_limits_stop_after_first_rejection() {
        // F = -x1 x2 at (1/2, -1/2): the unit step lands on the origin with
        // F = 0, short of the demanded 1/4 - c1/2 decrease.
        let f = Formula::new(2, vec![Constraint::xor(vec![Literal::pos(1), Literal::pos(2)], false).unwrap()]).unwrap();
        let mut obj = Objective::new(&f);
        let cfg = PgdConfig { eta0: 1.0, eta_min: 1.0, armijo_c1: 0.9999, ..Default::default() };
        let mut seen = 0;
        let res = pgd_observed(&mut obj, &[0.5, -0.5], &cfg, |_, _| seen += 1).unwrap();
        assert_eq!(res.steps, 0);
        assert_eq!(res.x, vec![0.5, -0.5]);
        assert_eq!(seen, 1);
    }
}
