use fourier_cls::heuristics::HeuristicsConfig;
use fourier_cls::optimizer::{Mode, Status};
use fourier_cls::parallel::{multi_start_run, portfolio_run, RunConfig};
use fourier_cls::{Constraint, Formula, Literal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_3sat(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Formula {
    let clauses = (0..m)
        .map(|_| {
            let vars = rand::seq::index::sample(rng, n, 3);
            Constraint::or(vars.iter().map(|v| Literal::new(v as u32 + 1, rng.gen())).collect()).unwrap()
        })
        .collect();
    Formula::new(n, clauses).unwrap()
}

#[test]
fn portfolio_solves_at_least_as_many_as_either_pool() {
    let mut rng = ChaCha8Rng::seed_from_u64(150);
    let suite: Vec<Formula> = (0..10).map(|_| random_3sat(50, 218, &mut rng)).collect();
    let (mut with, mut without, mut both) = (0, 0, 0);
    for (i, f) in suite.iter().enumerate() {
        let mut cfg = RunConfig::new(Mode::Decision, 4, i as u64);
        cfg.search.pgd.max_restarts = 30;
        with += (multi_start_run(f, &cfg).unwrap().status == Status::Sat) as usize;
        both += (portfolio_run(f, &cfg).unwrap().status == Status::Sat) as usize;
        cfg.heuristics = HeuristicsConfig::blind();
        without += (multi_start_run(f, &cfg).unwrap().status == Status::Sat) as usize;
    }
    eprintln!("heuristics {with}, blind {without}, portfolio {both}");
    assert!(both >= with.max(without), "heuristics {with}, blind {without}, portfolio {both}");
}
