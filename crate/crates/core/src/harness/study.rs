//! Convergence studies over a list of budgets.

use rayon::prelude::*;

use super::catalog::CatalogEntry;
use crate::error::Result;
use crate::numerics::{PrecisionContext, Real};
use crate::planner::{plan, Balance};
use crate::quadrature::{evaluate_adaptive, evaluate_box};

#[derive(Clone, Debug, PartialEq)]
pub enum StudyMode {
    /// Balanced plan per budget, then a symmetric box.
    Planned { balance: Balance },
    /// Each budget is read as `M`; the step is `ħ = π/M` and the box is found
    /// by scanning with cut-off `exp(-a/ħ)`.
    Adaptive { threshold_exponent: Real },
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub budgets: Vec<u64>,
    pub lambda: Real,
    pub mode: StudyMode,
    /// Use the estimate of the last budget as the reference value.
    pub self_reference: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRecord {
    pub budget_n: u64,
    pub points_used: u64,
    pub estimate: Real,
    pub reference: Real,
    pub relative_error: Real,
    pub predicted_bound: Real,
    pub h: Real,
    pub lambda: Real,
}

impl StudyRecord {
    /// Relative error below `10^-(digits - 10)`.
    pub fn precision_limited(&self, ctx: PrecisionContext) -> bool {
        self.relative_error < ctx.tolerance(10)
    }
}

/// Cut-off exponent `a` used for the sinc studies: 5 up to three dimensions, 6 above.
pub fn default_threshold_exponent(dims: usize) -> u32 {
    if dims <= 3 {
        5
    } else {
        6
    }
}

struct Run {
    budget: u64,
    points: u64,
    estimate: Real,
    bound: Real,
    h: Real,
}

/// Runs every budget of `config` against `entry`; records follow budget order.
pub fn run_study(
    ctx: PrecisionContext,
    entry: &CatalogEntry,
    config: &StudyConfig,
) -> Result<Vec<StudyRecord>> {
    let runs: Vec<Run> = config
        .budgets
        .par_iter()
        .map(|&budget| run_one(ctx, entry, config, budget))
        .collect::<Result<_>>()?;

    let reference = match (config.self_reference, runs.last()) {
        (true, Some(last)) => last.estimate.clone(),
        _ => entry.reference_value.clone(),
    };
    let scale = ctx.real(reference.abs_ref());
    Ok(runs
        .into_iter()
        .map(|run| {
            let diff = ctx.real(&run.estimate - &reference).abs();
            let relative_error = if scale.is_zero() { diff } else { diff / &scale };
            StudyRecord {
                budget_n: run.budget,
                points_used: run.points,
                estimate: run.estimate,
                reference: reference.clone(),
                relative_error,
                predicted_bound: run.bound,
                h: run.h,
                lambda: config.lambda.clone(),
            }
        })
        .collect())
}

fn run_one(
    ctx: PrecisionContext,
    entry: &CatalogEntry,
    config: &StudyConfig,
    budget: u64,
) -> Result<Run> {
    match &config.mode {
        StudyMode::Planned { balance } => {
            let (plan, report) = plan(ctx, &entry.profile, budget, &config.lambda, *balance)?;
            let integrand = entry.integrand_for_steps(ctx, &plan.h_per_dim)?;
            let result = evaluate_box(ctx, &integrand, &plan.h_per_dim, &plan.half_width_per_dim)?;
            Ok(Run {
                budget,
                points: result.points_evaluated,
                estimate: result.estimate,
                bound: report.total_bound,
                h: plan.h,
            })
        }
        StudyMode::Adaptive { threshold_exponent } => {
            let h = ctx.pi() / ctx.real(budget);
            let steps = vec![h.clone(); entry.dims];
            let integrand = entry.integrand_for_steps(ctx, &steps)?;
            let result = evaluate_adaptive(ctx, &integrand, &h, threshold_exponent)?;
            let bound = ctx.real(-ctx.real(threshold_exponent / &h)).exp();
            Ok(Run {
                budget,
                points: result.points_evaluated,
                estimate: result.estimate,
                bound,
                h,
            })
        }
    }
}
