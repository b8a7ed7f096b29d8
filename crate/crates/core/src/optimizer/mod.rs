//! The continuous objective, projected descent and the restart loop.

pub mod cls;
pub mod objective;
pub mod pgd;

pub use cls::{
    certificate_check, cls_solve, Certificate, Improvement, Mode, RandomRestart, RestartHook, SearchOptions,
    SolveResult, Status,
};
pub use objective::{objective_eval_grad, Objective, OR_FAST_PATH_MAX_ARITY};
pub use pgd::{pgd, pgd_observed, project, project_in_place, PgdConfig, PgdResult};
