//! Restart heuristics: adaptive constraint weights (an exponential
//! recency-weighted average of unsatisfaction scores) and rephasing.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::optimizer::RestartHook;
use crate::rng;

/// Decay used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.4;

/// `r_c = U_c / max(U)`, or all zeros when no task left anything unsatisfied.
pub fn unsat_scores(u: &[usize], p_t: usize) -> Vec<f64> {
    debug_assert!(u.iter().all(|&c| c <= p_t), "U_c exceeds task count");
    let max = u.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0.0; u.len()];
    }
    u.iter().map(|&c| c as f64 / max as f64).collect()
}

/// Adaptive per-constraint weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    w: Vec<f64>,
    alpha: f64,
}

impl WeightState {
    /// `m` weights initialized to 1.
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        Self::from_weights(vec![1.0; m], alpha)
    }

    pub fn from_weights(w: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(WeightState { w, alpha })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `w_c ← (1 - α) w_c + α r_c`.
    pub fn update(&mut self, r: &[f64]) {
        assert_eq!(r.len(), self.w.len(), "score vector length");
        let a = self.alpha;
        for (w, &r) in self.w.iter_mut().zip(r) {
            debug_assert!((0.0..=1.0).contains(&r));
            *w = (1.0 - a) * *w + a * r;
        }
    }

    /// Folds one round of per-constraint unsatisfied counts into the
    /// weights. Rounds where nothing was unsatisfied leave them untouched.
    pub fn observe(&mut self, u: &[usize], p_t: usize) {
        if u.iter().all(|&c| c == 0) {
            return;
        }
        self.update(&unsat_scores(u, p_t));
    }
}

pub fn erwa_update(state: &WeightState, r: &[f64]) -> WeightState {
    let mut next = state.clone();
    next.update(r);
    next
}

/// Where a restart puts the next starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Keep the previous optimum.
    Original,
    /// Negate every coordinate of the previous optimum.
    Flipped,
    /// Draw a fresh uniform point.
    Random,
}

impl Phase {
    pub fn letter(self) -> char {
        match self {
            Phase::Original => 'O',
            Phase::Flipped => 'F',
            Phase::Random => 'R',
        }
    }

    pub fn apply<R: Rng + ?Sized>(self, x_prev: &[f64], rng: &mut R) -> Vec<f64> {
        match self {
            Phase::Original => x_prev.to_vec(),
            Phase::Flipped => x_prev.iter().map(|v| -v).collect(),
            Phase::Random => rng::uniform_box(rng, x_prev.len()),
        }
    }
}

/// A cyclic sequence of phases, e.g. `ROF` for `(ROF)^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RephasePolicy {
    cycle: Vec<Phase>,
    pos: usize,
}

impl RephasePolicy {
    pub fn new(cycle: Vec<Phase>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidParameter("empty rephase cycle".into()));
        }
        Ok(RephasePolicy { cycle, pos: 0 })
    }

    /// Starts the cycle `offset` positions in.
    pub fn with_offset(mut self, offset: usize) -> Self {
        self.pos = offset % self.cycle.len();
        self
    }

    pub fn cycle(&self) -> &[Phase] {
        &self.cycle
    }

    /// Returns the current phase and advances the counter.
    pub fn next_phase(&mut self) -> Phase {
        let p = self.cycle[self.pos];
        self.pos = (self.pos + 1) % self.cycle.len();
        p
    }

    pub fn rephase<R: Rng + ?Sized>(&mut self, x_prev: &[f64], rng: &mut R) -> Vec<f64> {
        self.next_phase().apply(x_prev, rng)
    }
}

impl FromStr for RephasePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cycle = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'O' => Ok(Phase::Original),
                'F' => Ok(Phase::Flipped),
                'R' => Ok(Phase::Random),
                other => Err(Error::InvalidParameter(format!("unknown phase `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        RephasePolicy::new(cycle)
    }
}

impl fmt::Display for RephasePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cycle.iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

/// Restart behaviour of a search.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicsConfig {
    pub adaptive_weights: bool,
    pub alpha: f64,
    pub policy: RephasePolicy,
}

impl HeuristicsConfig {
    /// Adaptive weights with `(ROF)^∞`.
    pub fn decision() -> Self {
        HeuristicsConfig { adaptive_weights: true, alpha: DEFAULT_ALPHA, policy: "ROF".parse().expect("valid policy") }
    }

    /// Fixed problem weights with `(RF)^∞`.
    pub fn optimization() -> Self {
        HeuristicsConfig { adaptive_weights: false, alpha: DEFAULT_ALPHA, policy: "RF".parse().expect("valid policy") }
    }

    /// Fixed weights and a fresh random point at every restart.
    pub fn blind() -> Self {
        HeuristicsConfig { adaptive_weights: false, alpha: DEFAULT_ALPHA, policy: "R".parse().expect("valid policy") }
    }
}

/// Single-worker restart hook combining both heuristics.
#[derive(Debug, Clone)]
pub struct Restarter {
    static_weights: Vec<f64>,
    adaptive: Option<WeightState>,
    policy: RephasePolicy,
    seed: u64,
    worker: u64,
}

impl Restarter {
    pub fn new(cfg: &HeuristicsConfig, static_weights: Vec<f64>, seed: u64, worker: u64) -> Result<Self> {
        let adaptive =
            if cfg.adaptive_weights { Some(WeightState::new(static_weights.len(), cfg.alpha)?) } else { None };
        let offset = worker as usize;
        Ok(Restarter { static_weights, adaptive, policy: cfg.policy.clone().with_offset(offset), seed, worker })
    }
}

impl RestartHook for Restarter {
    fn restart(&mut self, round: u64, x: &mut Vec<f64>, weights: &mut [f64], unsat: &[bool]) {
        if let Some(state) = &mut self.adaptive {
            let u: Vec<usize> = unsat.iter().map(|&b| b as usize).collect();
            state.observe(&u, 1);
            for ((w, s), a) in weights.iter_mut().zip(&self.static_weights).zip(state.weights()) {
                *w = s * a;
            }
        }
        let mut rng = rng::stream(self.seed, self.worker, round);
        *x = self.policy.rephase(x, &mut rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_examples() {
        assert_eq!(unsat_scores(&[2, 4, 0], 4), vec![0.5, 1.0, 0.0]);
        assert_eq!(unsat_scores(&[0, 0, 0], 4), vec![0.0; 3]);
        assert_eq!(unsat_scores(&[8, 8], 8), vec![1.0, 1.0]);
        assert!(unsat_scores(&[], 4).is_empty());
    }

    #[test]
    fn erwa_examples() {
        let s = WeightState::new(2, 0.4).unwrap();
        let next = erwa_update(&s, &[0.0, 1.0]);
        assert_eq!(next.weights(), &[0.6, 1.0]);
        let half = WeightState::from_weights(vec![0.5], 0.4).unwrap();
        assert_eq!(erwa_update(&half, &[0.5]).weights(), &[0.5]);
        assert!(WeightState::new(1, 1.5).is_err());
    }

    #[test]
    fn erwa_on_saddle_and_chain() {
        // Saddle example: r = (0, 1); chain example: r = (0, 1, 0).
        let mut s = WeightState::new(2, DEFAULT_ALPHA).unwrap();
        s.observe(&[0, 1], 1);
        assert_eq!(s.weights(), &[0.6, 1.0]);
        let mut s = WeightState::new(3, DEFAULT_ALPHA).unwrap();
        s.observe(&[0, 1, 0], 1);
        assert_eq!(s.weights(), &[0.6, 1.0, 0.6]);
    }

    #[test]
    fn observe_skips_all_zero_rounds() {
        let mut s = WeightState::from_weights(vec![0.3, 0.9], 0.4).unwrap();
        s.observe(&[0, 0], 4);
        assert_eq!(s.weights(), &[0.3, 0.9]);
    }

    #[test]
    fn phases() {
        let mut rng = rng::stream(0, 0, 0);
        assert_eq!(Phase::Flipped.apply(&[0.2, -1.0], &mut rng), vec![-0.2, 1.0]);
        assert_eq!(Phase::Original.apply(&[0.2, -1.0], &mut rng), vec![0.2, -1.0]);
        let a = Phase::Random.apply(&[0.0; 5], &mut rng::stream(9, 1, 2));
        let b = Phase::Random.apply(&[0.0; 5], &mut rng::stream(9, 1, 2));
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn policy_cycles() {
        let mut p: RephasePolicy = "ROF".parse().unwrap();
        let seq: String = (0..7).map(|_| p.next_phase().letter()).collect();
        assert_eq!(seq, "ROFROFR");
        let mut p: RephasePolicy = "rof".parse::<RephasePolicy>().unwrap().with_offset(4);
        assert_eq!(p.next_phase(), Phase::Original);
        assert_eq!(p.to_string(), "ROF");
        assert!("".parse::<RephasePolicy>().is_err());
        assert!("RXF".parse::<RephasePolicy>().is_err());
    }

    #[test]
    fn restarter_updates_weights() {
        let cfg = HeuristicsConfig::decision();
        let mut r = Restarter::new(&cfg, vec![1.0, 2.0], 0, 0).unwrap();
        let mut x = vec![0.5, -0.5];
        let mut w = vec![1.0, 2.0];
        r.restart(1, &mut x, &mut w, &[false, true]);
        assert_eq!(w, vec![0.6, 2.0]);
        assert!(x.iter().all(|v| v.abs() <= 1.0));
    }
}
