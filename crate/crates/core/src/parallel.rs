//! Round-synchronous multi-start search.
//!
//! Every round each worker runs one descent from its own start point; the
//! barrier then merges certificates in worker order, folds the per-pool
//! unsatisfied counts into that pool's adaptive weights and rephases each
//! worker. Physical scheduling never affects the result.

use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::heuristics::{HeuristicsConfig, RephasePolicy, WeightState};
use crate::optimizer::cls::finish;
use crate::optimizer::{certificate_check, pgd, Certificate, Improvement, Mode, Objective, SearchOptions, SolveResult};
use crate::rng;

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Logical worker count.
    pub p_t: usize,
    pub search: SearchOptions,
    pub heuristics: HeuristicsConfig,
}

impl RunConfig {
    /// Heuristics chosen by mode: adaptive `ROF` for decision problems,
    /// fixed weights with `RF` for optimization.
    pub fn new(mode: Mode, p_t: usize, seed: u64) -> Self {
        let heuristics = match mode {
            Mode::Decision => HeuristicsConfig::decision(),
            Mode::Optimization => HeuristicsConfig::optimization(),
        };
        RunConfig { p_t, search: SearchOptions::new(mode, seed), heuristics }
    }
}

struct Pool {
    workers: Range<usize>,
    adaptive: Option<WeightState>,
    effective: Vec<f64>,
}

struct Worker {
    obj: Objective,
    x: Vec<f64>,
    policy: RephasePolicy,
    cert: Option<Certificate>,
}

pub fn multi_start_run(f: &Formula, cfg: &RunConfig) -> Result<SolveResult> {
    multi_start_run_observed(f, cfg, |_| {})
}

/// [`multi_start_run`], reporting each incumbent improvement as it is
/// accepted at a round barrier.
pub fn multi_start_run_observed<O>(f: &Formula, cfg: &RunConfig, observe: O) -> Result<SolveResult>
where
    O: FnMut(&Improvement),
{
    if cfg.p_t == 0 {
        return Err(Error::InvalidParameter("p_t must be at least 1".into()));
    }
    run_pools(f, &cfg.search, &[(cfg.heuristics.clone(), 0..cfg.p_t)], observe)
}

/// Runs a heuristics pool (`cfg.heuristics`, the first `⌈p_t/2⌉` workers)
/// beside a blind pool (fixed weights, random restarts). Each pool keeps its
/// own weights; certificates and incumbents are merged across both.
pub fn portfolio_run(f: &Formula, cfg: &RunConfig) -> Result<SolveResult> {
    portfolio_run_observed(f, cfg, |_| {})
}

pub fn portfolio_run_observed<O>(f: &Formula, cfg: &RunConfig, observe: O) -> Result<SolveResult>
where
    O: FnMut(&Improvement),
{
    if cfg.p_t < 2 {
        return Err(Error::InvalidParameter("a portfolio needs p_t >= 2".into()));
    }
    let split = cfg.p_t.div_ceil(2);
    let pools = [(cfg.heuristics.clone(), 0..split), (HeuristicsConfig::blind(), split..cfg.p_t)];
    run_pools(f, &cfg.search, &pools, observe)
}

fn run_pools<O>(
    f: &Formula,
    opts: &SearchOptions,
    pools: &[(HeuristicsConfig, Range<usize>)],
    mut observe: O,
) -> Result<SolveResult>
where
    O: FnMut(&Improvement),
{
    opts.pgd.validate()?;
    let started = Instant::now();
    let base = Objective::new(f);
    let static_w = base.weights().to_vec();

    let mut states = Vec::with_capacity(pools.len());
    let mut workers = Vec::new();
    for (h, range) in pools {
        let adaptive = if h.adaptive_weights { Some(WeightState::new(f.len(), h.alpha)?) } else { None };
        states.push(Pool { workers: range.clone(), adaptive, effective: static_w.clone() });
        for i in range.clone() {
            workers.push(Worker {
                obj: base.clone(),
                x: rng::uniform_box(&mut rng::stream(opts.seed, i as u64, 0), f.n_vars()),
                policy: h.policy.clone().with_offset(i),
                cert: None,
            });
        }
    }

    let mut best: Option<Certificate> = None;
    let mut improvements = Vec::new();
    let mut rounds = 0;
    let mut timed_out = false;
    let max_rounds = opts.pgd.max_restarts.max(1);

    for round in 1..=max_rounds {
        if round > 1 && opts.interrupted(started) {
            timed_out = true;
            break;
        }
        rounds = round;

        workers.par_iter_mut().try_for_each(|w| -> Result<()> {
            let res = pgd(&mut w.obj, &w.x, &opts.pgd)?;
            w.x = res.x;
            w.cert = Some(certificate_check(f, &w.x));
            Ok(())
        })?;

        // Merge in worker order: the lowest index wins ties.
        let mut solved = false;
        for (i, w) in workers.iter().enumerate() {
            let cert = w.cert.as_ref().expect("certificate set this round");
            if best.as_ref().is_none_or(|b| cert.cost < b.cost) {
                let imp = Improvement { round, worker: i, cost: cert.cost };
                observe(&imp);
                improvements.push(imp);
                best = Some(cert.clone());
            }
            solved |= cert.is_solution;
        }
        if solved && opts.mode == Mode::Decision {
            let winner = workers.iter().find_map(|w| w.cert.as_ref().filter(|c| c.is_solution)).unwrap();
            return Ok(finish(winner.clone(), rounds, Some(round), false, improvements));
        }
        if opts.mode == Mode::Optimization && opts.reached_target(best.as_ref().unwrap().cost) {
            break;
        }
        if round == max_rounds {
            break;
        }

        for pool in &mut states {
            if let Some(state) = &mut pool.adaptive {
                let mut u = vec![0usize; f.len()];
                for w in &workers[pool.workers.clone()] {
                    let a = &w.cert.as_ref().unwrap().assignment;
                    for (uc, c) in u.iter_mut().zip(f.constraints()) {
                        *uc += !c.is_satisfied(a) as usize;
                    }
                }
                state.observe(&u, pool.workers.len());
                for ((e, s), a) in pool.effective.iter_mut().zip(&static_w).zip(state.weights()) {
                    *e = s * a;
                }
            }
            for (i, w) in workers[pool.workers.clone()].iter_mut().enumerate() {
                let id = pool.workers.start + i;
                if pool.adaptive.is_some() {
                    w.obj.set_weights(&pool.effective)?;
                }
                let mut r = rng::stream(opts.seed, id as u64, round);
                w.x = w.policy.rephase(&w.x, &mut r);
            }
        }
    }
    let best = best.expect("at least one round");
    let solved = best.is_solution.then_some(rounds);
    Ok(finish(best, rounds, solved, timed_out, improvements))
}
