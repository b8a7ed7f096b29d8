use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::objective::Objective;
use super::pgd::{pgd, PgdConfig};
use crate::error::Result;
use crate::formula::{count_unsat, DiscreteAssignment, Formula};
use crate::rng;

/// Decision problems stop at the first certified solution; optimization
/// problems keep improving the incumbent until a limit is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Decision,
    Optimization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SATISFIABLE",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// Sign-rounded check of a continuous point.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub is_solution: bool,
    pub assignment: DiscreteAssignment,
    /// Falsified static weight.
    pub cost: f64,
    pub unsat_count: usize,
}

impl Certificate {
    /// Per-constraint unsatisfied flags under the rounded assignment.
    pub fn unsat_flags(&self, f: &Formula) -> Vec<bool> {
        f.constraints().iter().map(|c| !c.is_satisfied(&self.assignment)).collect()
    }
}

/// Rounds `x` (ties to False) and counts falsified constraints exactly.
pub fn certificate_check(f: &Formula, x: &[f64]) -> Certificate {
    let assignment = DiscreteAssignment::from_signs(x);
    let (unsat_count, cost) = count_unsat(f, &assignment);
    Certificate { is_solution: unsat_count == 0, assignment, cost, unsat_count }
}

/// Limits and mode shared by every search driver.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub mode: Mode,
    pub seed: u64,
    pub pgd: PgdConfig,
    pub timeout: Option<Duration>,
    /// Stop as soon as the incumbent cost is at most this value.
    pub target_cost: Option<f64>,
    /// External interruption flag, polled between rounds.
    pub stop: Option<Arc<AtomicBool>>,
}

impl SearchOptions {
    pub fn new(mode: Mode, seed: u64) -> Self {
        SearchOptions { mode, seed, pgd: PgdConfig::default(), timeout: None, target_cost: None, stop: None }
    }

    pub(crate) fn interrupted(&self, started: Instant) -> bool {
        self.timeout.is_some_and(|t| started.elapsed() >= t)
            || self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
    }

    /// Whether an incumbent of `cost` ends an optimization run.
    pub(crate) fn reached_target(&self, cost: f64) -> bool {
        cost <= 0.0 || self.target_cost.is_some_and(|t| cost <= t)
    }
}

/// A strict improvement of the incumbent.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub round: u64,
    pub worker: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub best_assignment: DiscreteAssignment,
    pub best_cost: f64,
    /// Descent rounds executed.
    pub rounds: u64,
    /// Round in which a certificate fired, if any.
    pub solved_round: Option<u64>,
    pub timed_out: bool,
    pub improvements: Vec<Improvement>,
}

/// Called between rounds to pick the next start point and weights.
pub trait RestartHook {
    /// `round` is the round that just finished (1-based); `unsat` flags the
    /// constraints its rounded optimum left unsatisfied.
    fn restart(&mut self, round: u64, x: &mut Vec<f64>, weights: &mut [f64], unsat: &[bool]);
}

/// Restart from a fresh uniform point with unchanged weights.
#[derive(Debug, Clone)]
pub struct RandomRestart {
    pub seed: u64,
    pub worker: u64,
}

impl RestartHook for RandomRestart {
    fn restart(&mut self, round: u64, x: &mut Vec<f64>, _weights: &mut [f64], _unsat: &[bool]) {
        *x = rng::uniform_box(&mut rng::stream(self.seed, self.worker, round), x.len());
    }
}

/// Single-worker continuous local search.
///
/// Starts from a uniform point, alternates projected descent with the
/// restart hook, and keeps the rounded point of lowest falsified static
/// weight.
pub fn cls_solve(f: &Formula, opts: &SearchOptions, hook: &mut dyn RestartHook) -> Result<SolveResult> {
    opts.pgd.validate()?;
    let started = Instant::now();
    let mut obj = Objective::new(f);
    let mut weights: Vec<f64> = obj.weights().to_vec();
    let mut x = rng::uniform_box(&mut rng::stream(opts.seed, 0, 0), f.n_vars());

    let mut best: Option<Certificate> = None;
    let mut improvements = Vec::new();
    let mut rounds = 0;
    let mut timed_out = false;

    for round in 1..=opts.pgd.max_restarts.max(1) {
        if round > 1 && opts.interrupted(started) {
            timed_out = true;
            break;
        }
        rounds = round;
        let res = pgd(&mut obj, &x, &opts.pgd)?;
        x = res.x;
        let cert = certificate_check(f, &x);
        if best.as_ref().is_none_or(|b| cert.cost < b.cost) {
            improvements.push(Improvement { round, worker: 0, cost: cert.cost });
            best = Some(cert.clone());
        }
        if cert.is_solution && opts.mode == Mode::Decision {
            return Ok(finish(best.unwrap(), rounds, Some(round), false, improvements));
        }
        let best_cost = best.as_ref().unwrap().cost;
        if opts.mode == Mode::Optimization && opts.reached_target(best_cost) {
            break;
        }
        if round == opts.pgd.max_restarts {
            break;
        }
        let unsat = cert.unsat_flags(f);
        hook.restart(round, &mut x, &mut weights, &unsat);
        obj.set_weights(&weights)?;
    }
    let best = best.expect("at least one round");
    let solved = best.is_solution.then_some(rounds);
    Ok(finish(best, rounds, solved, timed_out, improvements))
}

pub(crate) fn finish(
    best: Certificate,
    rounds: u64,
    solved_round: Option<u64>,
    timed_out: bool,
    improvements: Vec<Improvement>,
) -> SolveResult {
    SolveResult {
        status: if best.is_solution { Status::Sat } else { Status::Unknown },
        best_assignment: best.assignment,
        best_cost: best.cost,
        rounds,
        solved_round,
        timed_out,
        improvements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{brute_force_best, Constraint, Literal};
    use crate::heuristics::{HeuristicsConfig, Restarter};

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
    fn certificate_examples() {
        let xor = |a, b| Constraint::xor(vec![Literal::pos(a), Literal::pos(b)], true).unwrap();
        let chain = Formula::new(4, vec![xor(1, 2), xor(2, 3), xor(3, 4)]).unwrap();
        let c = certificate_check(&chain, &[1.0, -1.0, -1.0, 1.0]);
        assert!(!c.is_solution);
        assert_eq!(c.cost, 1.0);
        assert_eq!(c.unsat_flags(&chain), vec![false, true, false]);

        let c = certificate_check(&chain, &[0.0; 4]);
        assert_eq!(c.assignment, DiscreteAssignment::all_false(4));

        let c = certificate_check(&chain, &[0.5, -0.5, 0.5, -0.5]);
        assert!(c.is_solution);
        assert_eq!(c.cost, 0.0);
    }

    #[test]
    fn unit_clause_solves_in_one_round() {
        let f = Formula::new(1, vec![Constraint::or(vec![Literal::pos(1)]).unwrap()]).unwrap();
        for seed in 0..10 {
            let opts = SearchOptions::new(Mode::Decision, seed);
            let res = cls_solve(&f, &opts, &mut RandomRestart { seed, worker: 0 }).unwrap();
            assert_eq!(res.status, Status::Sat);
            assert_eq!(res.rounds, 1);
        }
    }

    #[test]
    fn saddle_formula_is_solved() {
        let f = saddle();
        assert_eq!(brute_force_best(&f).unwrap().0, 0.0);
        let opts = SearchOptions::new(Mode::Decision, 3);
        let mut hook = Restarter::new(&HeuristicsConfig::decision(), vec![1.0; 2], 3, 0).unwrap();
        let res = cls_solve(&f, &opts, &mut hook).unwrap();
        assert_eq!(res.status, Status::Sat);
        assert_eq!(count_unsat(&f, &res.best_assignment).0, 0);
    }

    #[test]
    fn complementary_units_stay_unknown() {
        let f = Formula::new(
            1,
            vec![Constraint::or(vec![Literal::pos(1)]).unwrap(), Constraint::or(vec![Literal::neg(1)]).unwrap()],
        )
        .unwrap();
        let mut opts = SearchOptions::new(Mode::Decision, 1);
        opts.pgd.max_restarts = 25;
        let mut hook = Restarter::new(&HeuristicsConfig::decision(), vec![1.0; 2], 1, 0).unwrap();
        let res = cls_solve(&f, &opts, &mut hook).unwrap();
        assert_eq!(res.status, Status::Unknown);
        assert_eq!(res.rounds, 25);
        assert_eq!(res.best_cost, 1.0);
        assert_eq!(res.solved_round, None);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = saddle();
        let run = || {
            let mut opts = SearchOptions::new(Mode::Optimization, 11);
            opts.pgd.max_restarts = 7;
            let mut hook = Restarter::new(&HeuristicsConfig::optimization(), vec![1.0; 2], 11, 0).unwrap();
            cls_solve(&f, &opts, &mut hook).unwrap()
        };
        assert_eq!(run(), run());
    }
}
